public class HostVerifier implements HostnameVerifier {
  @Override
  public boolean verify(String hostname, SSLSession sslSession){
    return true;    }}
