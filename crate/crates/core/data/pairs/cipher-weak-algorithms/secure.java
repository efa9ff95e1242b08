void test() throws Exception {
  StringLiterals literals = new StringLiterals("AES/GCM/NoPadding", "RSA/ECB/OAEPWithSHA-1AndMGF1Padding");
  Cipher cipher = Cipher.getInstance(literals.getAString());
}
