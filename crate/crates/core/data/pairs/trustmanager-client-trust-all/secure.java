public class TrustAll implements X509TrustManager {
  @Override
  public void checkClientTrusted(X509Certificate[] chain, String authType) throws CertificateException {
    //Please validate the certificate chain against a trust store
    TrustManagerFactory tmf = TrustManagerFactory.getInstance(TrustManagerFactory.getDefaultAlgorithm());
    tmf.init((KeyStore) null);
    X509TrustManager defaultTm = (X509TrustManager) tmf.getTrustManagers()[0];
    defaultTm.checkClientTrusted(chain, authType);
  }
  @Override
  public void checkServerTrusted(X509Certificate[] chain, String authType) throws CertificateException {
    
  }
  @Override
  public X509Certificate[] getAcceptedIssuers() {
    return new X509Certificate[0];
  }
}
