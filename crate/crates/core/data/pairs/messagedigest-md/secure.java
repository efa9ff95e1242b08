void test() throws Exception {
  StringLiterals literals = new StringLiterals("SHA-256", "SHA-512", "SHA3-256");
  MessageDigest md = MessageDigest.getInstance(literals.getAString());
}
