//! Sweep reports carry every field the shipped JSON schema requires.

use serde_json::Value;
use triconst::verify::{run_sweep, Mode, SweepConfig};

fn check(schema: &Value, value: &Value, path: &str) {
    if let Some(req) = schema.get("required").and_then(Value::as_array) {
        for key in req {
            let key = key.as_str().unwrap();
            assert!(value.get(key).is_some(), "{path}.{key} missing");
        }
    }
    if let (Some(props), Some(obj)) = (schema.get("properties").and_then(Value::as_object), value.as_object()) {
        for (k, sub) in props {
            if let Some(v) = obj.get(k) {
                check(sub, v, &format!("{path}.{k}"));
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            check(items, v, &format!("{path}[{i}]"));
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        assert!(options.contains(value), "{path} = {value} not in {options:?}");
    }
    if schema.get("$ref").and_then(Value::as_str) == Some("#/$defs/rational") {
        let s = value.as_str().unwrap_or_else(|| panic!("{path} is not a string"));
        let body = s.strip_prefix('-').unwrap_or(s);
        let ok = body.split('/').count() <= 2 && body.split('/').all(|p| !p.is_empty() && p.bytes().all(|c| c.is_ascii_digit()));
        assert!(ok, "{path} = {s:?} is not p/q");
    }
}

#[test]
fn report_matches_schema() {
    let schema: Value =
        serde_json::from_str(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json"))).unwrap();
    for mode in [Mode::Thm61, Mode::Thm62] {
        let mut cfg = SweepConfig::new(mode, vec![1, 3], 3);
        if mode == Mode::Thm61 {
            cfg.ks = Some(vec![1, 119]);
            cfg.ls = Some(vec![0, 1]);
        } else {
            cfg.ls = Some(vec![0, 250]);
        }
        cfg.float_check = true;
        let report = run_sweep(&cfg).unwrap();
        let v: Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        check(&schema, &v, "report");
        assert_eq!(v["points"].as_array().unwrap().len(), 8.min(report.summary.total));
    }
}
