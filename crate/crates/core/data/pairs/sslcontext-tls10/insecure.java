void test() throws Exception {
  StringLiterals literals = new StringLiterals("TLS", "TLSv1");
  SSLContext context = SSLContext.getInstance(literals.getAString());
}
