void test() throws Exception {
  StringLiterals literals = new StringLiterals("SSL", "SSLv2", "SSLv3");
  SSLContext context = SSLContext.getInstance(literals.getAString());
}
