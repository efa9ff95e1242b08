void test() {
  IvParameterSpec iv = new IvParameterSpec(ByteLiterals.CONSTANT_ARRAY);
}
