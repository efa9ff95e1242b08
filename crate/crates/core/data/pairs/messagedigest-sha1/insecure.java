void test() throws Exception {
  StringLiterals literals = new StringLiterals("SHA-1", "SHA-224");
  MessageDigest md = MessageDigest.getInstance(literals.getAString());
}
