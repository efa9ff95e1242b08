void test(char[] password) {
  byte[] salt = new byte[16];
  new SecureRandom().nextBytes(salt);
  PBEKeySpec spec = new PBEKeySpec(password, salt, 1000, 256);
}
