use convexma_web::{solve_json, study_json, tropical_json};

#[test]
fn tropical_square_has_unit_atom() {
    let input = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/tropical_square.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&tropical_json(&input).unwrap()).unwrap();
    assert_eq!(v["total"], "1");
    assert_eq!(v["measure"]["atoms"][0]["point"], serde_json::json!(["0", "0"]));
    assert_eq!(v["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn tropical_reports_parse_errors() {
    assert!(tropical_json("{").is_err());
}

#[test]
fn study_box_masses() {
    let v: serde_json::Value = serde_json::from_str(&study_json(&[2, 4]).unwrap()).unwrap();
    assert_eq!(v["window_mass"], serde_json::json!(["9/4", "25/16"]));
    assert_eq!(v["finest_atoms"].as_array().unwrap().len(), 49);
    assert!(study_json(&[4, 2]).is_err());
    assert!(study_json(&[64]).is_err());
}

#[test]
fn solve_jump_density() {
    let v: serde_json::Value =
        serde_json::from_str(&solve_json(r#"{"breakpoints":["0","1/2","1"],"pieces":[["0"],["1"]]}"#, 1, "0,0,0").unwrap())
            .unwrap();
    assert_eq!(v["regularity_ok"], true);
    assert_eq!(v["second_derivative_jumps"], serde_json::json!(["1/2"]));
    assert_eq!(v["samples"].as_array().unwrap().len(), 101);
    assert!(solve_json(r#"{"breakpoints":["0","1"],"pieces":[["-1"]]}"#, 1, "0,0,0").is_err());
    assert!(solve_json(r#"{"breakpoints":["0","1"],"pieces":[["1"]]}"#, 1, "0,0").is_err());
}
