byte[] test() {
  SecureRandom random = new SecureRandom();
  byte[] bytes = new byte[16];
  random.nextBytes(bytes);
  return bytes;
}
