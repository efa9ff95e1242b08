void test() throws Exception {
  StringLiterals literals = new StringLiterals("RSA/ECB/NoPadding", "RSA/ECB/PKCS1Padding");
  Cipher cipher = Cipher.getInstance(literals.getAString());
}
