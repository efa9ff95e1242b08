void test(int iterations) {
  byte[] salt = new byte[8];
  AlgorithmParameterSpec paramSpec = new PBEParameterSpec(salt, iterations); }
