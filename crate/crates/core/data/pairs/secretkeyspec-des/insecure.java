void test(byte[] keyBytes) {
  StringLiterals literals = new StringLiterals("DES", "DESede");
  SecretKey key = new SecretKeySpec(keyBytes, literals.getAString());
}
