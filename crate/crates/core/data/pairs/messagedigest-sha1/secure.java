void test() throws Exception {
  StringLiterals literals = new StringLiterals("SHA-256");
  MessageDigest md = MessageDigest.getInstance(literals.getAString());
}
