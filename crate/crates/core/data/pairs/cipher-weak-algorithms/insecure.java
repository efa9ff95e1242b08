void test() throws Exception {
  StringLiterals literals = new StringLiterals("AES", "RC2", "RC4", "RC5", "DES", "blowfish", "DESede", "ARCFOUR");
  Cipher cipher = Cipher.getInstance(literals.getAString());
}
