void test() {
  SecretKey sekey= new SecretKeySpec(ByteLiterals.CONSTANT_ARRAY, "AES");  }
