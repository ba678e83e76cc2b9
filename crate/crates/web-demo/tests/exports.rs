use naetree_web::{bound_json, enumerate_json, generate_text, MAX_LISTED};

#[test]
fn generated_maj_enumerates_against_the_oracle() {
    let text = generate_text(r#"{"family":"maj","n":12,"k":3,"m":0,"seed":0}"#).unwrap();
    assert!(text.starts_with("c genspec"));
    assert!(enumerate_json(&text, -1, None, false).is_err());
    let r = enumerate_json(&text, -1, None, true).unwrap();
    assert_eq!(r["t"], 6);
    assert_eq!(r["count"], 216);
    assert_eq!(r["oracle_count"], 216);
    assert_eq!(r["claim_violations"], 0);
}

#[test]
fn seeded_ordering_gives_the_same_set() {
    let text = generate_text(r#"{"family":"random_closed","n":10,"k":3,"m":8,"seed":3}"#).unwrap();
    let a = enumerate_json(&text, -1, None, false).unwrap();
    let b = enumerate_json(&text, -1, Some(99), false).unwrap();
    assert_eq!(a["solutions"], b["solutions"]);
    assert_eq!(a["count"], a["oracle_count"]);
}

#[test]
fn listing_is_truncated_but_count_is_not() {
    let text = generate_text(r#"{"family":"maj","n":16,"k":3,"m":0,"seed":0}"#).unwrap();
    let r = enumerate_json(&text, -1, None, true).unwrap();
    assert_eq!(r["count"], 1296);
    assert_eq!(r["solutions"].as_array().unwrap().len(), MAX_LISTED);
}

#[test]
fn close_flag_and_bad_input() {
    let r = enumerate_json("p cnf 3 1\n1 2 3 0\n", -1, None, true).unwrap();
    assert_eq!(r["clauses"], 2);
    assert_eq!(r["t"], 1);
    assert!(enumerate_json("p cnf x", -1, None, false).is_err());
    assert!(generate_text(r#"{"family":"maj","n":10,"k":3,"m":0,"seed":0}"#).is_err());
}

#[test]
fn bound_values() {
    let r = bound_json(4, 2, None, 0).unwrap();
    assert_eq!(r["F"], "4");
    let r = bound_json(4, 2, Some(0), 8).unwrap();
    assert_eq!(r["F"], "27/8");
    assert_eq!(r["piece"], "third");
    assert_eq!(r["global"]["pass"], true);
    assert_eq!(r["global"]["bound"], "36");
}
