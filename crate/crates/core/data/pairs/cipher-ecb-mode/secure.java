void test() throws Exception {
  StringLiterals literals = new StringLiterals("AES/GCM/NoPadding");
  Cipher cipher = Cipher.getInstance(literals.getAString());
}
