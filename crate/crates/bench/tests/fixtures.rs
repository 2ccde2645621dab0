use otto_bench::{cold_contact_generator, family};

#[test]
fn fixtures_are_well_formed() {
    family().validate().expect("bench fixture parameters must be valid");

    let g = cold_contact_generator();
    assert!(g.iter().all(|v| v.is_finite()));
    // The duration scaling leaves a small but non-trivial generator: the
    // benches should exercise a realistic contraction, not a no-op.
    let largest = g.abs().max();
    assert!(largest > 1e-3 && largest < 10.0, "unexpected scale {largest}");
}
