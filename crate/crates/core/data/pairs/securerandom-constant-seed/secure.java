void test() {
  SecureRandom random = new SecureRandom();
}
