void test() {
  // use a fresh random IV for every encryption
  byte[] ivBytes = new byte[16];
  new SecureRandom().nextBytes(ivBytes);
  IvParameterSpec iv = new IvParameterSpec(ivBytes);
}
