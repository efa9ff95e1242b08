void test(int iterations) {
  byte[] salt = new byte[8];
  new SecureRandom().nextBytes(salt);
  AlgorithmParameterSpec paramSpec = new PBEParameterSpec(salt, iterations);
}
