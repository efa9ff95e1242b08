void test(byte[] salt) {
  AlgorithmParameterSpec paramSpec = new PBEParameterSpec(salt, 1000);
}
