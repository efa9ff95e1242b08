#![allow(dead_code)]

pub mod corpus;
pub mod oracles;

use std::path::{Path, PathBuf};

use misuse_forge::infer::{infer, load_pairs, merge, ExamplePair};
use misuse_forge::model::ProgramModel;
use misuse_forge::pattern::Pattern;
use misuse_forge::store::{self, PatternPack};

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn pairs_dir() -> PathBuf {
    crate_dir().join("data").join("pairs")
}

pub fn fixture_path(rel: &str) -> PathBuf {
    crate_dir().join("tests").join("fixtures").join(rel)
}

pub fn fixture(rel: &str) -> String {
    std::fs::read_to_string(fixture_path(rel)).unwrap_or_else(|e| panic!("fixture {rel}: {e}"))
}

pub fn shipped_pairs() -> Vec<ExamplePair> {
    load_pairs(&pairs_dir()).expect("shipped pairs")
}

pub fn pair(name: &str) -> ExamplePair {
    shipped_pairs().into_iter().find(|p| p.name == name).unwrap_or_else(|| panic!("no pair {name}"))
}

pub fn pattern_of(name: &str) -> Pattern {
    let p = pair(name);
    infer(&p.name, &p.insecure, &p.secure).unwrap_or_else(|e| panic!("{name}: {e}")).pattern
}

/// Freshly inferred and merged patterns of every shipped pair.
pub fn shipped_patterns() -> Vec<Pattern> {
    let all: Vec<Pattern> = shipped_pairs()
        .iter()
        .map(|p| infer(&p.name, &p.insecure, &p.secure).unwrap_or_else(|e| panic!("{}: {e}", p.name)).pattern)
        .collect();
    merge(&all)
}

pub fn builtin_pack() -> PatternPack {
    store::load(&crate_dir().join("data").join("patterns.json")).expect("built-in pack")
}

pub fn pack(patterns: Vec<Pattern>) -> PatternPack {
    PatternPack::new(patterns)
}

pub fn model(files: &[(&str, &str)]) -> ProgramModel {
    let owned: Vec<(String, String)> = files.iter().map(|(f, s)| (f.to_string(), s.to_string())).collect();
    ProgramModel::build(&owned).unwrap_or_else(|e| panic!("parse: {e:?}"))
}

pub fn model_one(src: &str) -> ProgramModel {
    model(&[("Test.java", src)])
}

/// Line of the first occurrence of `needle` in `src`, 1-based.
pub fn line_of(src: &str, needle: &str) -> u32 {
    src.lines().position(|l| l.contains(needle)).unwrap_or_else(|| panic!("{needle:?} not found")) as u32 + 1
}

pub fn write_files(root: &Path, files: &[(String, String)]) {
    for (rel, text) in files {
        let p = root.join(rel);
        std::fs::create_dir_all(p.parent().expect("parent")).expect("mkdir");
        std::fs::write(p, text).expect("write");
    }
}

/// Abstract fix of the SecretKeySpec example pair.
pub const REFERENCE_PATTERN_FIX: &str = r#"Replace the matched statement with:
  SecretKey $v_0 = new SecretKeySpec($v_1, "AES");
Add these lines before the container method of the matched statement:
  // store the key as a field for reuse purpose
  byte[] $v_1 = $m_0();
  // create a key based on an unpredictable random value
  public byte[] $m_0() {
    try {
      KeyGenerator $v_4=KeyGenerator.getInstance("AES");
      $v_4.init(256);
      SecretKey $v_3 = $v_4.generateKey();
      byte[] $v_2= $v_3.getEncoded();
      return $v_2;
    } catch (Exception $v_5) {
      $v_5.printStackTrace();
      return null;
    }
  }
"#;

/// Customized fix expected for the field-flow program.
pub const REFERENCE_REPAIR: &str = r#"Replace the matched statement with:
  SecretKey secret = new SecretKeySpec($v_1, "AES");
Add these lines before the method encrypt(byte[] plain):
  // store the key as a field for reuse purpose
  byte[] $v_1 = $m_0();
  // create a key based on an unpredictable random value
  public byte[] $m_0() {
    try {
      KeyGenerator $v_4=KeyGenerator.getInstance("AES");
      $v_4.init(256);
      SecretKey $v_3 = $v_4.generateKey();
      byte[] $v_2= $v_3.getEncoded();
      return $v_2;
    } catch (Exception $v_5) {
      $v_5.printStackTrace();
      return null;
    }
  }
"#;

/// Java-ish tokens: identifiers, string literals, line comments and single
/// punctuation characters. Whitespace is dropped.
pub fn tokens(s: &str) -> Vec<String> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '/' && cs.get(i + 1) == Some(&'/') {
            let j = cs[i..].iter().position(|&c| c == '\n').map_or(cs.len(), |k| i + k);
            out.push(cs[i..j].iter().collect::<String>().trim_end().to_string());
            i = j;
        } else if c == '"' {
            let mut j = i + 1;
            while j < cs.len() && cs[j] != '"' {
                j += if cs[j] == '\\' { 2 } else { 1 };
            }
            out.push(cs[i..=j.min(cs.len() - 1)].iter().collect());
            i = j + 1;
        } else if c.is_alphanumeric() || c == '_' || c == '$' {
            let j = cs[i..].iter().position(|&c| !(c.is_alphanumeric() || c == '_' || c == '$')).map_or(cs.len(), |k| i + k);
            out.push(cs[i..j].iter().collect());
            i = j;
        } else {
            out.push(c.to_string());
            i += 1;
        }
    }
    out
}

fn is_placeholder(t: &str) -> bool {
    let b = t.as_bytes();
    b.len() >= 4 && b[0] == b'$' && (b[1] == b'v' || b[1] == b'm') && b[2] == b'_' && b[3..].iter().all(u8::is_ascii_digit)
}

/// Token equality where each placeholder of `reference` may stand for one
/// identifier of `ours`, consistently and injectively.
pub fn reference_match(reference: &str, ours: &str) -> Result<(), String> {
    let (f, o) = (tokens(reference), tokens(ours));
    let mut map: std::collections::BTreeMap<String, String> = Default::default();
    for (k, (a, b)) in f.iter().zip(&o).enumerate() {
        if is_placeholder(a) {
            let ident = b.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_' || c == '$');
            if !ident {
                return Err(format!("token {k}: placeholder {a} against {b:?}"));
            }
            match map.get(a) {
                Some(x) if x != b => return Err(format!("token {k}: {a} is {x} and {b}")),
                None if map.values().any(|x| x == b) => return Err(format!("token {k}: {b} bound twice")),
                _ => {
                    map.insert(a.clone(), b.clone());
                }
            }
        } else if a != b {
            return Err(format!("token {k}: expected {a:?}, found {b:?}"));
        }
    }
    if f.len() != o.len() {
        return Err(format!("{} tokens expected, {} found", f.len(), o.len()));
    }
    Ok(())
}

/// Rendered text from the first fix instruction onward.
pub fn fix_section(rendered: &str) -> String {
    let start = rendered.find("Replace the matched statement with:").expect("replacement section");
    rendered[start..].to_string()
}
