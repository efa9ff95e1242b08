void test() throws Exception {
  StringLiterals literals = new StringLiterals("AES/ECB/PKCS5Padding", "DESede/ECB/PKCS5Padding");
  Cipher cipher = Cipher.getInstance(literals.getAString());
}
