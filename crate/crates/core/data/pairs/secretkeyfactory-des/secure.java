void test() throws Exception {
  StringLiterals literals = new StringLiterals("PBKDF2WithHmacSHA256");
  SecretKeyFactory factory = SecretKeyFactory.getInstance(literals.getAString());
}
