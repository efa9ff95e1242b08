public class TrustAll implements X509TrustManager {
  @Override
  public void checkClientTrusted(X509Certificate[] chain, String authType) throws CertificateException {
    
  }
  @Override
  public void checkServerTrusted(X509Certificate[] chain, String authType) throws CertificateException {
    
  }
  @Override
  public X509Certificate[] getAcceptedIssuers() {
    return new X509Certificate[0];
  }
}
