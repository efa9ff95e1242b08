void test() throws Exception {
  URL url = new URL("http://example.com/login");
  HttpURLConnection conn = (HttpURLConnection) url.openConnection();
}
