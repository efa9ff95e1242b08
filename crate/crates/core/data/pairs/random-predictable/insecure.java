byte[] test() {
  Random random = new Random();
  byte[] bytes = new byte[16];
  random.nextBytes(bytes);
  return bytes;
}
