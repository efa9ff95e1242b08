void test() throws Exception {
  StringLiterals literals = new StringLiterals("TLSv1.1");
  SSLContext context = SSLContext.getInstance(literals.getAString());
}
