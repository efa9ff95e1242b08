void test(char[] password) {
  PBEKeySpec spec = new PBEKeySpec(password, ByteLiterals.CONSTANT_ARRAY, 1000, 256);
}
