// store the key as a field for reuse purpose
byte[] key = keyInit(); 

// create a key based on an unpredictable random value
public byte[] keyInit() {
  try {
    KeyGenerator keyGen=KeyGenerator.getInstance("AES");
    keyGen.init(256);
    SecretKey secretKey = keyGen.generateKey();
    byte[] keyBytes= secretKey.getEncoded();
    return keyBytes;
  } catch (Exception e) {
    e.printStackTrace();
    return null;
  }
}
void test() {
  SecretKey sekey= new SecretKeySpec(key, "AES"); }  
