mod common;

use common::*;
use serde_json::Value;
use tamegroup::{classify_any, verify, AnyGroup, Certificate, ClassifyConfig};

/// A path of object keys and array indices into a JSON value.
type Path = Vec<Step>;

#[derive(Clone, Debug)]
enum Step {
    Key(String),
    Index(usize),
}

/// Array positions mutated in long arrays: both ends and the middle.
fn sampled_indices(len: usize) -> Vec<usize> {
    if len <= 8 {
        (0..len).collect()
    } else {
        let mut v = vec![0, 1, len / 2, len - 1];
        v.dedup();
        v
    }
}

/// Every leaf, every empty container and every array (for an appended
/// element), with long arrays sampled.
fn targets(v: &Value, path: &mut Path, out: &mut Vec<Path>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                path.push(Step::Key(k.clone()));
                targets(child, path, out);
                path.pop();
            }
        }
        Value::Array(items) => {
            out.push(path.clone());
            for i in sampled_indices(items.len()) {
                path.push(Step::Index(i));
                targets(&items[i], path, out);
                path.pop();
            }
        }
        _ => out.push(path.clone()),
    }
}

fn at<'a>(v: &'a mut Value, path: &[Step]) -> &'a mut Value {
    path.iter().fold(v, |acc, s| match s {
        Step::Key(k) => &mut acc[k.as_str()],
        Step::Index(i) => &mut acc[*i],
    })
}

fn mutate(v: &mut Value) {
    *v = match v.take() {
        Value::Bool(b) => Value::Bool(!b),
        Value::Null => Value::from(0),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => Value::from(u + 1),
            (_, Some(i), _) => Value::from(i + 1),
            (_, _, Some(f)) => Value::from(f * 1.5 + 1.0),
            _ => unreachable!(),
        },
        Value::String(s) => Value::String(match s.as_str() {
            "exact" => "float".into(),
            "float" => "exact".into(),
            _ => format!("{s}1"),
        }),
        Value::Array(mut items) => {
            let extra = items.last().cloned().unwrap_or(Value::from(0));
            items.push(extra);
            Value::Array(items)
        }
        Value::Object(_) => unreachable!(),
    };
}

fn rejected(group: &AnyGroup, verdict: &tamegroup::Verdict, json: &Value, config: &ClassifyConfig) -> bool {
    match serde_json::from_value::<Certificate>(json.clone()) {
        Err(_) => true,
        Ok(cert) => !verify(group, verdict, &cert, config).passed,
    }
}

fn check_all_mutations(name: &str, group: AnyGroup, config: &ClassifyConfig) -> usize {
    let c = classify_any(&group, config).unwrap();
    let original = serde_json::to_value(&c.certificate).unwrap();
    assert!(!rejected(&group, &c.verdict, &original, config), "{name}: original rejected");
    let mut paths = Vec::new();
    targets(&original, &mut Vec::new(), &mut paths);
    let mut survivors = Vec::new();
    for p in &paths {
        let mut json = original.clone();
        mutate(at(&mut json, p));
        if !rejected(&group, &c.verdict, &json, config) {
            survivors.push(format!("{p:?}"));
        }
    }
    assert!(survivors.is_empty(), "{name} ({}): undetected mutations {survivors:?}", c.certificate.kind());
    paths.len()
}

#[test]
fn every_single_field_mutation_is_rejected() {
    let config = ClassifyConfig::default();
    for (name, spec) in corpus() {
        let exact = AnyGroup::Exact(spec);
        let float = AnyGroup::Float(exact.to_float().unwrap());
        assert!(check_all_mutations(name, exact, &config) > 0);
        assert!(check_all_mutations(name, float, &config) > 0);
    }
}
