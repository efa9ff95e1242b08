void test(int iterations) {
  byte[] salt = new byte[4];
  AlgorithmParameterSpec paramSpec = new PBEParameterSpec(salt, iterations); }
