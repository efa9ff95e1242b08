void test() {
  SecureRandom random = new SecureRandom();
  random.setSeed(ByteLiterals.CONSTANT_ARRAY);
}
