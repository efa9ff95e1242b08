void test(byte[] keyBytes) {
  StringLiterals literals = new StringLiterals("AES");
  SecretKey key = new SecretKeySpec(keyBytes, literals.getAString());
}
