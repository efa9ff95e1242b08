void test(byte[] keyBytes) {
  StringLiterals literals = new StringLiterals("RC4", "ARCFOUR", "Blowfish");
  SecretKey key = new SecretKeySpec(keyBytes, literals.getAString());
}
