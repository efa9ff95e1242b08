public class HostVerifier implements HostnameVerifier {
  @Override
  public boolean verify(String hostname, SSLSession sslSession){
    //Please change "example.com" as needed
    if ("example.com".equals(hostname)) { 
      return true;
    }
    HostnameVerifier hv = HttpsURLConnection.getDefaultHostnameVerifier(); 
    return hv.verify(hostname, sslSession);    }}
