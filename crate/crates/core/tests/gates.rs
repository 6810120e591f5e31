//! Logical gate tables for the [[12,2,3]] code under the reference logical basis in data/tb12_logicals.txt.

use tbcodes::codes::named_code;
use tbcodes::logicals::{parse_gate_sequence, verify_logical_gate, GateReport, LogicalCliffordName};
use tbcodes::LogicalBasis;

fn check(text: &str, claim: &str) -> GateReport {
    let code = named_code("tb12").unwrap();
    let basis = LogicalBasis::from_text(12, include_str!("../data/tb12_logicals.txt")).unwrap();
    let seq = parse_gate_sequence(text).unwrap();
    let claim: LogicalCliffordName = claim.parse().unwrap();
    verify_logical_gate(&code, &basis, &seq, claim).unwrap()
}

fn passes(r: &GateReport) -> bool {
    r.stabilizers_preserved && r.logicals_well_defined && r.matches
}

#[test]
fn printed_tables_that_verify() {
    for (text, claim) in [
        (include_str!("../data/gates/s_l2.txt"), "S:2"),
        (include_str!("../data/gates/s_l1.txt"), "S:1"),
        (include_str!("../data/gates/h_l2.txt"), "H:2"),
        (include_str!("../data/gates/cnot_l1_l2.txt"), "CNOT:2,1"),
    ] {
        assert!(passes(&check(text, claim)), "{claim}");
    }
}

#[test]
fn printed_h_l1_breaks_stabilizers() {
    let r = check(include_str!("../data/gates/h_l1.txt"), "H:1");
    assert!(!r.stabilizers_preserved);
}

#[test]
fn h_l1_with_missing_cz_layer_verifies() {
    let text = format!("{}CZ 4 5 4 6 5 6\n", include_str!("../data/gates/h_l1.txt"));
    assert!(passes(&check(&text, "H:1")));
}

#[test]
fn cnot_orientation_is_control_two() {
    let text = include_str!("../data/gates/cnot_l1_l2.txt");
    assert!(!check(text, "CNOT:1,2").matches);
}

#[test]
fn wrong_claims_are_rejected() {
    let r = check(include_str!("../data/gates/s_l1.txt"), "S:2");
    assert!(!r.matches);
    let r = check(include_str!("../data/gates/h_l2.txt"), "H:1");
    assert!(!r.matches);
}
