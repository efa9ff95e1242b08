//! Seeded synthetic corpus with ground-truth labels.

use misuse_forge::eval::{Label, LabelSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Misuse,
    Decoy,
    Neutral,
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub file: String,
    pub source: String,
    pub kind: Kind,
    pub inter: bool,
    pub option_set: bool,
    pub int_edge: bool,
    pub labels: Vec<Label>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub entries: Vec<Entry>,
}

impl Corpus {
    pub fn files(&self) -> Vec<(String, String)> {
        self.entries.iter().map(|e| (e.file.clone(), e.source.clone())).collect()
    }

    pub fn truth(&self) -> LabelSet {
        self.entries.iter().flat_map(|e| e.labels.iter().cloned()).collect()
    }

    pub fn count(&self, f: impl Fn(&Entry) -> bool) -> usize {
        self.entries.iter().filter(|e| f(e)).count()
    }

    pub fn truth_json(&self) -> String {
        let v: Vec<&Label> = self.entries.iter().flat_map(|e| e.labels.iter()).collect();
        serde_json::to_string_pretty(&v).expect("labels serialize")
    }
}

struct Names {
    var: &'static str,
    data: &'static str,
}

const VARS: &[&str] = &["engine", "inst", "obj", "handle", "worker", "impl0", "tool"];
const DATA: &[&str] = &["payload", "input", "buf", "content", "raw"];

/// Template output: source plus `(needle, class)` for every misuse it holds.
struct Tpl {
    src: String,
    sites: Vec<(&'static str, &'static str)>,
    inter: bool,
    option_set: bool,
    int_edge: bool,
}

fn tpl(src: String, sites: Vec<(&'static str, &'static str)>) -> Tpl {
    Tpl { src, sites, inter: false, option_set: false, int_edge: false }
}

fn cipher(c: &str, n: &Names, alg: &str) -> String {
    format!(
        "import javax.crypto.Cipher;\n\npublic class {c} {{\n    public byte[] run(byte[] {d}) throws Exception {{\n        Cipher {v} = Cipher.getInstance(\"{alg}\");\n        return {v}.doFinal({d});\n    }}\n}}\n",
        v = n.var,
        d = n.data
    )
}

fn digest(c: &str, n: &Names, alg: &str) -> String {
    format!(
        "import java.security.MessageDigest;\n\npublic class {c} {{\n    public byte[] hash(byte[] {d}) throws Exception {{\n        MessageDigest {v} = MessageDigest.getInstance(\"{alg}\");\n        return {v}.digest({d});\n    }}\n}}\n",
        v = n.var,
        d = n.data
    )
}

fn ssl(c: &str, n: &Names, proto: &str) -> String {
    format!(
        "import javax.net.ssl.SSLContext;\n\npublic class {c} {{\n    public SSLContext open() throws Exception {{\n        SSLContext {v} = SSLContext.getInstance(\"{proto}\");\n        {v}.init(null, null, null);\n        return {v};\n    }}\n}}\n",
        v = n.var
    )
}

fn key_factory(c: &str, n: &Names, alg: &str) -> String {
    format!(
        "import javax.crypto.SecretKeyFactory;\n\npublic class {c} {{\n    public SecretKeyFactory factory() throws Exception {{\n        SecretKeyFactory {v} = SecretKeyFactory.getInstance(\"{alg}\");\n        return {v};\n    }}\n}}\n",
        v = n.var
    )
}

fn key_spec_alg(c: &str, n: &Names, alg: &str) -> String {
    format!(
        "import javax.crypto.SecretKey;\nimport javax.crypto.spec.SecretKeySpec;\n\npublic class {c} {{\n    public SecretKey wrap(byte[] {d}) {{\n        SecretKey {v} = new SecretKeySpec({d}, \"{alg}\");\n        return {v};\n    }}\n}}\n",
        v = n.var,
        d = n.data
    )
}

fn kpg(c: &str, n: &Names, alg: &str, size: u32) -> String {
    format!(
        "import java.security.KeyPair;\nimport java.security.KeyPairGenerator;\n\npublic class {c} {{\n    public KeyPair generate() throws Exception {{\n        KeyPairGenerator {v} = KeyPairGenerator.getInstance(\"{alg}\");\n        {v}.initialize({size});\n        return {v}.generateKeyPair();\n    }}\n}}\n",
        v = n.var
    )
}

fn pbe_key_spec(c: &str, n: &Names, iters: u32) -> String {
    format!(
        "import javax.crypto.spec.PBEKeySpec;\n\npublic class {c} {{\n    public PBEKeySpec spec(char[] password, byte[] salt) {{\n        PBEKeySpec {v} = new PBEKeySpec(password, salt, {iters}, 256);\n        return {v};\n    }}\n}}\n",
        v = n.var
    )
}

fn pbe_param_iters(c: &str, n: &Names, iters: u32) -> String {
    format!(
        "import javax.crypto.spec.PBEParameterSpec;\n\npublic class {c} {{\n    public PBEParameterSpec params(byte[] salt) {{\n        PBEParameterSpec {v} = new PBEParameterSpec(salt, {iters});\n        return {v};\n    }}\n}}\n",
        v = n.var
    )
}

fn pbe_salt(c: &str, n: &Names, size: u32, random: bool) -> String {
    let fill = if random { "        new SecureRandom().nextBytes(salt);\n" } else { "" };
    format!(
        "import java.security.SecureRandom;\nimport javax.crypto.spec.PBEParameterSpec;\n\npublic class {c} {{\n    public PBEParameterSpec params() {{\n        byte[] salt = new byte[{size}];\n{fill}        PBEParameterSpec {v} = new PBEParameterSpec(salt, 1000);\n        return {v};\n    }}\n}}\n",
        v = n.var
    )
}

fn constant_key(c: &str, n: &Names) -> String {
    format!(
        "import javax.crypto.SecretKey;\nimport javax.crypto.spec.SecretKeySpec;\n\npublic class {c} {{\n    public SecretKey key() {{\n        byte[] {d} = \"0123456789abcdef\".getBytes();\n        SecretKey {v} = new SecretKeySpec({d}, \"AES\");\n        return {v};\n    }}\n}}\n",
        v = n.var,
        d = n.data
    )
}

fn generated_key(c: &str, n: &Names) -> String {
    format!(
        "import javax.crypto.KeyGenerator;\nimport javax.crypto.SecretKey;\nimport javax.crypto.spec.SecretKeySpec;\n\npublic class {c} {{\n    public SecretKey key() throws Exception {{\n        KeyGenerator gen = KeyGenerator.getInstance(\"AES\");\n        gen.init(256);\n        byte[] {d} = gen.generateKey().getEncoded();\n        SecretKey {v} = new SecretKeySpec({d}, \"AES\");\n        return {v};\n    }}\n}}\n",
        v = n.var,
        d = n.data
    )
}

fn iv(c: &str, n: &Names, random: bool) -> String {
    let fill = if random { "        new SecureRandom().nextBytes(bytes);\n" } else { "" };
    format!(
        "import java.security.SecureRandom;\nimport javax.crypto.spec.IvParameterSpec;\n\npublic class {c} {{\n    public IvParameterSpec iv() {{\n        byte[] bytes = new byte[16];\n{fill}        IvParameterSpec {v} = new IvParameterSpec(bytes);\n        return {v};\n    }}\n}}\n",
        v = n.var
    )
}

fn keystore(c: &str, n: &Names, password: &str) -> String {
    format!(
        "import java.io.InputStream;\nimport java.security.KeyStore;\n\npublic class {c} {{\n    public KeyStore open(InputStream in) throws Exception {{\n        KeyStore {v} = KeyStore.getInstance(\"JKS\");\n        {v}.load(in, {password});\n        return {v};\n    }}\n}}\n",
        v = n.var
    )
}

fn seeded_random(c: &str, n: &Names) -> String {
    format!(
        "import java.security.SecureRandom;\n\npublic class {c} {{\n    public byte[] nonce() {{\n        byte[] seed = \"fixed-seed\".getBytes();\n        SecureRandom {v} = new SecureRandom(seed);\n        byte[] out = new byte[16];\n        {v}.nextBytes(out);\n        return out;\n    }}\n}}\n",
        v = n.var
    )
}

fn fresh_random(c: &str, n: &Names) -> String {
    format!(
        "import java.security.SecureRandom;\n\npublic class {c} {{\n    public byte[] nonce() {{\n        SecureRandom {v} = new SecureRandom();\n        byte[] out = new byte[16];\n        {v}.nextBytes(out);\n        return out;\n    }}\n}}\n",
        v = n.var
    )
}

fn verifier(c: &str, secure: bool) -> String {
    let body = if secure {
        "        return \"api.example.org\".equals(host) && session.isValid();\n"
    } else {
        "        return true;\n"
    };
    format!(
        "import javax.net.ssl.HostnameVerifier;\nimport javax.net.ssl.SSLSession;\n\npublic class {c} implements HostnameVerifier {{\n    @Override\n    public boolean verify(String host, SSLSession session) {{\n{body}    }}\n}}\n"
    )
}

fn trust_manager(c: &str, secure: bool) -> String {
    let server = if secure { "        delegate.checkServerTrusted(chain, authType);\n" } else { "" };
    format!(
        "import java.security.cert.CertificateException;\nimport java.security.cert.X509Certificate;\nimport javax.net.ssl.X509TrustManager;\n\npublic class {c} implements X509TrustManager {{\n    private X509TrustManager delegate;\n\n    public {c}(X509TrustManager delegate) {{\n        this.delegate = delegate;\n    }}\n\n    public void checkClientTrusted(X509Certificate[] chain, String authType) throws CertificateException {{\n        throw new CertificateException(\"client certificates are not accepted\");\n    }}\n\n    public void checkServerTrusted(X509Certificate[] chain, String authType) throws CertificateException {{\n{server}    }}\n\n    public X509Certificate[] getAcceptedIssuers() {{\n        return delegate.getAcceptedIssuers();\n    }}\n}}\n"
    )
}

fn predictable(c: &str, n: &Names) -> String {
    format!(
        "import java.util.Random;\n\npublic class {c} {{\n    public int token() {{\n        Random {v} = new Random();\n        return {v}.nextInt();\n    }}\n}}\n",
        v = n.var
    )
}

fn field_flow_style(c: &str) -> String {
    format!(
        "import javax.crypto.Cipher;\nimport javax.crypto.spec.SecretKeySpec;\n\npublic class {c} {{\n    private String secret;\n\n    public {c}(String secret) {{\n        this.secret = secret;\n    }}\n\n    public byte[] encrypt(byte[] plain) throws Exception {{\n        byte[] keyBytes = secret.getBytes();\n        SecretKeySpec spec = new SecretKeySpec(keyBytes, \"AES\");\n        Cipher cipher = Cipher.getInstance(\"AES/GCM/NoPadding\");\n        cipher.init(Cipher.ENCRYPT_MODE, spec);\n        return cipher.doFinal(plain);\n    }}\n}}\n\nclass {c}Main {{\n    public static void main(String[] args) throws Exception {{\n        {c} enc = new {c}(\"hard-coded-secret\");\n        enc.encrypt(args[0].getBytes());\n    }}\n}}\n"
    )
}

fn cipher_via_field(c: &str, alg: &str) -> String {
    format!(
        "import javax.crypto.Cipher;\n\npublic class {c} {{\n    private final String transformation;\n\n    public {c}(String transformation) {{\n        this.transformation = transformation;\n    }}\n\n    public byte[] apply(byte[] data) throws Exception {{\n        Cipher cipher = Cipher.getInstance(transformation);\n        return cipher.doFinal(data);\n    }}\n}}\n\nclass {c}Factory {{\n    public static {c} create() {{\n        return new {c}(\"{alg}\");\n    }}\n}}\n"
    )
}

fn digest_via_helper(c: &str, alg: &str) -> String {
    format!(
        "import java.security.MessageDigest;\n\npublic class {c} {{\n    private String algorithm() {{\n        return \"{alg}\";\n    }}\n\n    public byte[] hash(byte[] data) throws Exception {{\n        MessageDigest md = MessageDigest.getInstance(algorithm());\n        return md.digest(data);\n    }}\n}}\n"
    )
}

fn keystore_via_param(c: &str, password: &str) -> String {
    format!(
        "import java.io.InputStream;\nimport java.security.KeyStore;\n\npublic class {c} {{\n    void open(KeyStore ks, InputStream in, char[] pw) throws Exception {{\n        ks.load(in, pw);\n    }}\n\n    public KeyStore load(InputStream in) throws Exception {{\n        KeyStore ks = KeyStore.getInstance(\"PKCS12\");\n        open(ks, in, {password});\n        return ks;\n    }}\n}}\n"
    )
}

fn kpg_size_helper(c: &str, size: u32) -> String {
    format!(
        "import java.security.KeyPair;\nimport java.security.KeyPairGenerator;\n\npublic class {c} {{\n    private int bits() {{\n        return {size};\n    }}\n\n    public KeyPair generate() throws Exception {{\n        KeyPairGenerator kpg = KeyPairGenerator.getInstance(\"RSA\");\n        kpg.initialize(bits());\n        return kpg.generateKeyPair();\n    }}\n}}\n"
    )
}

fn kpg_size_param(c: &str, size: u32) -> String {
    format!(
        "import java.security.KeyPair;\nimport java.security.KeyPairGenerator;\n\npublic class {c} {{\n    KeyPair init(int size) throws Exception {{\n        KeyPairGenerator kpg = KeyPairGenerator.getInstance(\"RSA\");\n        kpg.initialize(size);\n        return kpg.generateKeyPair();\n    }}\n\n    public KeyPair generate() throws Exception {{\n        return init({size});\n    }}\n}}\n"
    )
}

fn neutral(c: &str, i: usize) -> String {
    match i % 5 {
        0 => format!("import java.util.List;\n\npublic class {c} {{\n    public int first(List<Integer> xs) {{\n        if (xs.isEmpty()) {{\n            return 0;\n        }}\n        return xs.get(0);\n    }}\n}}\n"),
        1 => format!("public class {c} {{\n    private String name;\n\n    public String getName() {{\n        return name;\n    }}\n\n    public void setName(String name) {{\n        this.name = name;\n    }}\n}}\n"),
        2 => format!("import java.util.HashMap;\nimport java.util.Map;\n\npublic class {c} {{\n    private final Map<String, String> cache = new HashMap<>();\n\n    public String lookup(String key) {{\n        if (cache.containsKey(key)) {{\n            return cache.get(key);\n        }}\n        String v = key.toUpperCase();\n        cache.put(key, v);\n        return v;\n    }}\n}}\n"),
        3 => format!("public class {c} {{\n    public static String pair(String a, String b) {{\n        StringBuilder sb = new StringBuilder();\n        sb.append(a);\n        sb.append(',');\n        sb.append(b);\n        return sb.toString();\n    }}\n}}\n"),
        _ => format!("public class {c} {{\n    public int clamp(int v, int lo, int hi) {{\n        return Math.max(lo, Math.min(hi, v));\n    }}\n}}\n"),
    }
}

const CHARS: &str = "\"changeit\".toCharArray()";
const CONSOLE: &str = "System.console().readPassword()";

/// Build the corpus. The seed drives naming, package placement and file order.
pub fn generate(seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut specs: Vec<(Kind, Box<dyn Fn(&str, &Names) -> Tpl>)> = Vec::new();
    let m = |k: Kind, f: Box<dyn Fn(&str, &Names) -> Tpl>| (k, f);
    let os = |mut t: Tpl| {
        t.option_set = true;
        t
    };
    let edge = |mut t: Tpl| {
        t.int_edge = true;
        t
    };
    let inter = |mut t: Tpl| {
        t.inter = true;
        t
    };
    use Kind::*;

    // Misuses.
    specs.push(m(Misuse, Box::new(move |c, n| os(tpl(cipher(c, n, "DES"), vec![("Cipher.getInstance", "Cipher")])))));
    specs.push(m(Misuse, Box::new(move |c, n| os(tpl(cipher(c, n, "AES/ECB/PKCS5Padding"), vec![("Cipher.getInstance", "Cipher")])))));
    specs.push(m(Misuse, Box::new(move |c, n| os(tpl(digest(c, n, "MD5"), vec![("MessageDigest.getInstance", "MessageDigest")])))));
    specs.push(m(Misuse, Box::new(move |c, n| os(tpl(digest(c, n, "SHA-1"), vec![("MessageDigest.getInstance", "MessageDigest")])))));
    specs.push(m(Misuse, Box::new(move |c, n| os(tpl(ssl(c, n, "SSLv3"), vec![("SSLContext.getInstance", "SSLContext")])))));
    specs.push(m(Misuse, Box::new(move |c, n| os(tpl(key_factory(c, n, "PBEWithMD5AndDES"), vec![("SecretKeyFactory.getInstance", "SecretKeyFactory")])))));
    specs.push(m(Misuse, Box::new(move |c, n| os(tpl(key_spec_alg(c, n, "DES"), vec![("new SecretKeySpec", "SecretKeySpec")])))));
    specs.push(m(Misuse, Box::new(move |c, n| edge(tpl(kpg(c, n, "RSA", 2047), vec![(".initialize(", "KeyPairGenerator")])))));
    specs.push(m(Misuse, Box::new(move |c, n| edge(tpl(kpg(c, n, "EC", 223), vec![(".initialize(", "KeyPairGenerator")])))));
    specs.push(m(Misuse, Box::new(move |c, n| edge(tpl(pbe_key_spec(c, n, 999), vec![("new PBEKeySpec", "PBEKeySpec")])))));
    specs.push(m(Misuse, Box::new(move |c, n| edge(tpl(pbe_param_iters(c, n, 999), vec![("new PBEParameterSpec", "PBEParameterSpec")])))));
    specs.push(m(Misuse, Box::new(move |c, n| edge(tpl(pbe_salt(c, n, 7, true), vec![("new PBEParameterSpec", "PBEParameterSpec")])))));
    specs.push(m(Misuse, Box::new(move |c, n| tpl(constant_key(c, n), vec![("new SecretKeySpec", "SecretKeySpec")]))));
    specs.push(m(Misuse, Box::new(move |c, n| tpl(iv(c, n, false), vec![("new IvParameterSpec", "IvParameterSpec")]))));
    specs.push(m(Misuse, Box::new(move |c, n| tpl(keystore(c, n, CHARS), vec![(".load(in", "KeyStore")]))));
    specs.push(m(Misuse, Box::new(move |c, n| tpl(seeded_random(c, n), vec![("new SecureRandom(seed)", "SecureRandom")]))));
    specs.push(m(Misuse, Box::new(move |c, _| tpl(verifier(c, false), vec![("public boolean verify", "HostnameVerifier")]))));
    specs.push(m(Misuse, Box::new(move |c, _| tpl(trust_manager(c, false), vec![("public void checkServerTrusted", "X509TrustManager")]))));
    specs.push(m(Misuse, Box::new(move |c, n| tpl(predictable(c, n), vec![("new Random()", "Random")]))));
    specs.push(m(Misuse, Box::new(move |c, _| inter(tpl(field_flow_style(c), vec![("new SecretKeySpec", "SecretKeySpec")])))));
    specs.push(m(Misuse, Box::new(move |c, _| inter(os(tpl(cipher_via_field(c, "DESede"), vec![("Cipher.getInstance", "Cipher")]))))));
    specs.push(m(Misuse, Box::new(move |c, _| inter(os(tpl(digest_via_helper(c, "MD5"), vec![("MessageDigest.getInstance", "MessageDigest")]))))));
    specs.push(m(Misuse, Box::new(move |c, _| inter(tpl(keystore_via_param(c, CHARS), vec![("ks.load(in, pw)", "KeyStore")])))));
    specs.push(m(Misuse, Box::new(move |c, _| inter(tpl(kpg_size_helper(c, 1024), vec![("kpg.initialize", "KeyPairGenerator")])))));
    specs.push(m(Misuse, Box::new(move |c, _| inter(edge(tpl(kpg_size_param(c, 2047), vec![("kpg.initialize", "KeyPairGenerator")]))))));

    // Decoys: secure counterparts, boundary values and secure inter-procedural flows.
    specs.push(m(Decoy, Box::new(move |c, n| tpl(cipher(c, n, "AES/GCM/NoPadding"), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(digest(c, n, "SHA-256"), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(digest(c, n, "SHA-512"), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(ssl(c, n, "TLSv1.3"), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(ssl(c, n, "TLSv1.2"), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(key_factory(c, n, "PBKDF2WithHmacSHA256"), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(key_spec_alg(c, n, "AES"), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(kpg(c, n, "RSA", 2048), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(kpg(c, n, "RSA", 2049), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(kpg(c, n, "RSA", 4096), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(kpg(c, n, "EC", 224), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(kpg(c, n, "EC", 256), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(pbe_key_spec(c, n, 1000), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(pbe_param_iters(c, n, 1001), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(pbe_salt(c, n, 8, true), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(generated_key(c, n), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(iv(c, n, true), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(keystore(c, n, CONSOLE), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(keystore(c, n, "null"), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, n| tpl(fresh_random(c, n), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, _| tpl(verifier(c, true), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, _| tpl(trust_manager(c, true), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, _| tpl(cipher_via_field(c, "AES/GCM/NoPadding"), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, _| tpl(digest_via_helper(c, "SHA-256"), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, _| tpl(keystore_via_param(c, CONSOLE), vec![]))));
    specs.push(m(Decoy, Box::new(move |c, _| tpl(kpg_size_param(c, 2048), vec![]))));

    let neutral_count = 10;
    let packages = ["app", "app/net", "app/crypto", "lib/util", "lib/store"];
    let mut entries = Vec::new();
    let total = specs.len() + neutral_count;
    let mut order: Vec<usize> = (0..total).collect();
    order.shuffle(&mut rng);
    for (slot, idx) in order.into_iter().enumerate() {
        let class = format!("Unit{slot:03}");
        let names = Names { var: VARS[rng.gen_range(0..VARS.len())], data: DATA[rng.gen_range(0..DATA.len())] };
        let pkg = packages[rng.gen_range(0..packages.len())];
        let file = format!("{pkg}/{class}.java");
        let (kind, t) = if idx < specs.len() {
            let (k, f) = &specs[idx];
            (*k, f(&class, &names))
        } else {
            (Kind::Neutral, tpl(neutral(&class, idx), vec![]))
        };
        let labels = t
            .sites
            .iter()
            .map(|(needle, cls)| Label { file: file.clone(), line: super::line_of(&t.src, needle), class: cls.to_string() })
            .collect();
        entries.push(Entry { file, source: t.src, kind, inter: t.inter, option_set: t.option_set, int_edge: t.int_edge, labels });
    }
    Corpus { entries }
}
