void test(int iterations) {
  AlgorithmParameterSpec paramSpec = new PBEParameterSpec(ByteLiterals.CONSTANT_ARRAY, iterations);
}
