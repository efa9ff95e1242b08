void test() throws Exception {
  StringLiterals literals = new StringLiterals("MD2", "MD5");
  MessageDigest md = MessageDigest.getInstance(literals.getAString());
}
