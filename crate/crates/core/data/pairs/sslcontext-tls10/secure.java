void test() throws Exception {
  StringLiterals literals = new StringLiterals("TLSv1.3");
  SSLContext context = SSLContext.getInstance(literals.getAString());
}
