void test() throws Exception {
  StringLiterals literals = new StringLiterals("PBEWithMD5AndDES", "PBKDF2WithHmacSHA1");
  SecretKeyFactory factory = SecretKeyFactory.getInstance(literals.getAString());
}
