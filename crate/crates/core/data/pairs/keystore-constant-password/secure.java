void test(KeyStore ks, InputStream in) throws Exception {
  // read the password from the user instead of hard-coding it
  char[] password = System.console().readPassword();
  ks.load(in, password);
}
