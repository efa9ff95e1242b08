void test() {
  SecureRandom random = new SecureRandom(ByteLiterals.CONSTANT_ARRAY);
}
