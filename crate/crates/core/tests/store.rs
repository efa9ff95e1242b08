mod common;

use common::oracles::random_pack;

use misuse_forge::store::{self, PatternPack, SchemaError, StoreError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

#[test]
fn load_after_save_is_identity() {
    let base = common::shipped_patterns();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5707e);
    let dir = tempfile::tempdir().unwrap();
    for k in 0..200 {
        let pack = random_pack(&mut rng, &base);
        pack.validate().unwrap_or_else(|e| panic!("pack {k} invalid: {e:?}"));
        let a = dir.path().join(format!("a{k}.json"));
        let b = dir.path().join(format!("b{k}.json"));
        store::save(&pack, &a).unwrap();
        let loaded = store::load(&a).unwrap();
        assert_eq!(loaded, pack, "pack {k}");
        store::save(&loaded, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "pack {k}");
    }
}

#[test]
fn save_is_byte_deterministic() {
    let pack = common::builtin_pack();
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    store::save(&pack, &a).unwrap();
    store::save(&pack.clone(), &b).unwrap();
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes, std::fs::read(common::crate_dir().join("data/patterns.json")).unwrap());
    assert!(bytes.ends_with(b"}\n"));
}

#[test]
fn canonical_json_sorts_keys() {
    let text = common::builtin_pack().to_canonical_json();
    let top: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).collect();
    assert_eq!(top, ["  \"patterns\": [", "  \"provenance\": {", "  \"schemaVersion\": 1"]);
}

fn schema_errors(r: Result<PatternPack, StoreError>) -> Vec<SchemaError> {
    match r {
        Err(StoreError::Schema(e)) => e,
        other => panic!("schema error expected, got {other:?}"),
    }
}

fn builtin_value() -> Value {
    serde_json::from_str(&common::builtin_pack().to_canonical_json()).unwrap()
}

#[test]
fn unknown_schema_version_is_rejected() {
    let mut v = builtin_value();
    v["schemaVersion"] = 99.into();
    let errs = schema_errors(store::parse(&v.to_string()));
    assert_eq!(errs, vec![SchemaError::new("schemaVersion", "unsupported")]);
}

#[test]
fn missing_schema_version_is_rejected() {
    let mut v = builtin_value();
    v.as_object_mut().unwrap().remove("schemaVersion");
    let errs = schema_errors(store::parse(&v.to_string()));
    assert_eq!(errs, vec![SchemaError::new("schemaVersion", "missing")]);
}

#[test]
fn duplicate_ids_are_rejected() {
    let mut v = builtin_value();
    let first = v["patterns"][0].clone();
    v["patterns"].as_array_mut().unwrap().push(first);
    let n = v["patterns"].as_array().unwrap().len();
    let errs = schema_errors(store::parse(&v.to_string()));
    assert_eq!(errs, vec![SchemaError::new(format!("patterns[{}].id", n - 1), "duplicate")]);
}

#[test]
fn all_violations_are_reported_together() {
    let mut v = builtin_value();
    v["schemaVersion"] = 99.into();
    v["patterns"][0]["id"] = "".into();
    let last = v["patterns"].as_array().unwrap().len() - 1;
    v["patterns"][last]["fixedArgs"] = serde_json::json!([{"paramIndex": 9, "value": "x"}]);
    let errs = schema_errors(store::parse(&v.to_string()));
    assert_eq!(
        errs,
        vec![
            SchemaError::new("schemaVersion", "unsupported"),
            SchemaError::new("patterns[0].id", "empty"),
            SchemaError::new(format!("patterns[{last}].fixedArgs[0]"), "paramIndex out of range"),
        ]
    );
}

#[test]
fn overlapping_options_are_rejected() {
    let mut v = builtin_value();
    let i = v["patterns"]
        .as_array()
        .unwrap()
        .iter()
        .position(|p| p["constraints"][0]["kind"] == "optionSet")
        .unwrap();
    let opt = v["patterns"][i]["constraints"][0]["insecureOptions"][0].clone();
    v["patterns"][i]["constraints"][0]["secureOptions"].as_array_mut().unwrap().push(opt);
    let errs = schema_errors(store::parse(&v.to_string()));
    assert_eq!(errs, vec![SchemaError::new(format!("patterns[{i}].constraints[0]"), "insecure and secure options overlap")]);
}

#[test]
fn malformed_pattern_is_located() {
    let mut v = builtin_value();
    v["patterns"][2]["constraints"] = "nope".into();
    let errs = schema_errors(store::parse(&v.to_string()));
    assert_eq!(errs.len(), 1);
    assert_eq!(errs[0].field, "patterns[2]");
}

#[test]
fn invalid_pack_is_not_saved() {
    let mut pack = common::builtin_pack();
    let dup = pack.patterns[0].clone();
    pack.patterns.push(dup);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    assert!(matches!(store::save(&pack, &path), Err(StoreError::Schema(_))));
    assert!(!path.exists());
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(store::load(&dir.path().join("absent.json")), Err(StoreError::Io { .. })));
}

#[test]
fn not_json_is_a_schema_error() {
    let errs = schema_errors(store::parse("{ not json"));
    assert_eq!(errs[0].field, "$");
}
