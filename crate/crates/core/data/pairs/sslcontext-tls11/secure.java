void test() throws Exception {
  StringLiterals literals = new StringLiterals("TLSv1.2");
  SSLContext context = SSLContext.getInstance(literals.getAString());
}
