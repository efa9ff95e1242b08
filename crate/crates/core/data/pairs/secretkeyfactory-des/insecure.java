void test() throws Exception {
  StringLiterals literals = new StringLiterals("DES", "DESede");
  SecretKeyFactory factory = SecretKeyFactory.getInstance(literals.getAString());
}
