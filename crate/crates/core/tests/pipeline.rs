//! Cross-module consistency: certificate, Gröbner engine, probes, witnesses
//! and the search must never contradict each other.

use std::time::Duration;

use ivhs::bounds::counting_bound;
use ivhs::detideal::{
    export_ideal, minors_ideal_0, minors_ideal_1, parse_ideal, ExportFormat, Variant,
};
use ivhs::field::{FieldCtx, Rational};
use ivhs::witness::{solve_witness, witness_field, witness_rank};
use ivhs::zerodim::{
    elimination_certificate, groebner_zero_dim_test, random_rank_probe, smax_search,
    verify_certificate, Budget, ProbeField, SearchStatus, ZeroDimVerdict,
};
use proptest::prelude::*;

#[test]
fn groebner_agrees_with_the_certificate_on_quintic_quadrics() {
    assert!(verify_certificate(&elimination_certificate(2, 5).unwrap()).verified);
    let spec = minors_ideal_0(2, 5, 1).unwrap();
    let out = groebner_zero_dim_test(&spec, 4, Duration::from_secs(60)).unwrap();
    assert!(
        matches!(
            out.verdict,
            ZeroDimVerdict::ZeroAtOriginOnly | ZeroDimVerdict::Inconclusive { .. }
        ),
        "{:?}",
        out.verdict
    );
    assert_eq!(out.stats.uncovered_variables, 0);
}

#[test]
fn entries_of_m_cut_out_the_origin() {
    // the 1-minors are the entries, and every variable occurs among them
    let spec = minors_ideal_0(4, 3, 0).unwrap();
    let out = groebner_zero_dim_test(&spec, 2, Duration::from_secs(60)).unwrap();
    assert_eq!(out.verdict, ZeroDimVerdict::ZeroAtOriginOnly);
}

#[test]
fn rational_probes_respect_the_floor() {
    for (m, d) in [(2, 5), (2, 6), (4, 3), (6, 3)] {
        let rep = random_rank_probe(m, d, 300, ProbeField::Rationals { range: 3 }, 11).unwrap();
        let floor = counting_bound(m, d).unwrap() as usize;
        assert!(
            rep.min_rank >= floor,
            "({m},{d}): rank {} < {floor}",
            rep.min_rank
        );
        assert!(rep.verify().unwrap());
    }
}

#[test]
fn witnesses_attain_the_floor_beyond_the_pinned_cases() {
    for (m, d) in [(2, 6), (6, 3), (4, 4)] {
        let w = solve_witness(m, d).unwrap();
        let v = w.verify().unwrap();
        assert!(v.attains_floor(), "({m},{d}): {v:?}");
    }
}

#[test]
fn search_reports_are_consistent_with_witness_ranks() {
    for (m, d) in [(2, 4), (2, 5), (4, 3), (6, 3)] {
        let bound = counting_bound(m, d).unwrap() as u32;
        let i0 = smax_search(m, d, Variant::I0, &Budget::default()).unwrap();
        assert_eq!(i0.exact(), Some(bound - 1), "({m},{d})");
        let i1 = smax_search(m, d, Variant::I1, &Budget::default()).unwrap();
        // I1 has fewer zeros, so its s_max is at least that of I0
        assert!(i1.certified_lower >= i0.certified_lower);
        assert!(i1.certified_upper.unwrap() >= i0.certified_upper.unwrap());
        for e in i1.entries.iter().filter(|e| e.s < bound) {
            assert!(matches!(e.status, SearchStatus::ZeroOnly { .. }));
        }
    }
}

#[test]
fn exported_ideals_parse_back() {
    for spec in [
        minors_ideal_0(2, 5, 1).unwrap(),
        minors_ideal_1(2, 4, 0).unwrap(),
    ] {
        let text = export_ideal(&spec, ExportFormat::Text);
        let parsed = parse_ideal(&text).unwrap();
        let distinct: Vec<_> = spec
            .distinct_generators()
            .iter()
            .map(|p| (**p).clone())
            .collect();
        assert_eq!(parsed.generators, distinct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn witness_rank_is_scale_invariant(c in prop::collection::vec(-4i64..=4, 2)) {
        let field = witness_field(3);
        let lambda = field.from_coeffs(c.iter().map(|&v| Rational::from_integer(v.into())).collect()).unwrap();
        prop_assume!(!field.is_zero(&lambda));
        let w = solve_witness(4, 3).unwrap();
        let scaled = w.scale(&lambda).unwrap();
        prop_assert_eq!(witness_rank(4, 3, &scaled).unwrap(), w.rank);
        prop_assert!(scaled.verify().unwrap().ok());
    }
}
