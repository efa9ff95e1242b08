void test() throws Exception {
  StringLiterals literals = new StringLiterals("PBKDF2WithHmacSHA512");
  SecretKeyFactory factory = SecretKeyFactory.getInstance(literals.getAString());
}
