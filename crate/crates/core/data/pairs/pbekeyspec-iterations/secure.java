void test(char[] password, byte[] salt) {
  PBEKeySpec spec = new PBEKeySpec(password, salt, 1000, 256);
}
