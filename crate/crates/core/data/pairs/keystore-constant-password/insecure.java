void test(KeyStore ks, InputStream in) throws Exception {
  ks.load(in, CharLiterals.CONSTANT_ARRAY);
}
