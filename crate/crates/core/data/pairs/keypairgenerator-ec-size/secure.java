void test() throws Exception {
  KeyPairGenerator kpg = KeyPairGenerator.getInstance("EC");
  kpg.initialize(224);
}
