void test() throws Exception {
  StringLiterals literals = new StringLiterals("RSA/ECB/OAEPWithSHA-256AndMGF1Padding");
  Cipher cipher = Cipher.getInstance(literals.getAString());
}
