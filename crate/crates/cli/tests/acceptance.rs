//! Acceptance suite: one PASS/FAIL line per criterion, with timings.
//!
//! Run with `cargo test -p ivhs-cli --test acceptance -- --nocapture`.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use ivhs::bounds::{
    binomial, counting_bound, hodge_dims, madaram_min, nl_corollary, nl_radicand, smax0_formula,
    smax_check_formula,
};
use ivhs::detideal::{minors_ideal_0, minors_ideal_1, IntPoly, Variant};
use ivhs::fermat_ivhs::build_m_check;
use ivhs::field::{Rational, DEFAULT_PRIME};
use ivhs::witness::solve_witness;
use ivhs::zerodim::certificate::ViolationKind;
use ivhs::zerodim::{
    elimination_certificate, groebner_zero_dim_test, random_rank_probe, smax_search,
    verify_certificate, Budget, ProbeField, ZeroDimVerdict,
};
use ivhs::Params;

const SIX: [(u32, u32); 6] = [(2, 4), (2, 5), (2, 6), (4, 3), (4, 4), (6, 3)];

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Runs one criterion, prints its line and returns whether it passed.
fn criterion(id: &str, limit: Duration, body: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".to_string());
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let (pass, detail) = match outcome {
        Ok(detail) if elapsed <= limit => (true, detail),
        Ok(detail) => (false, format!("{detail}; took longer than the limit")),
        Err(detail) => (false, detail),
    };
    println!(
        "{id} {} [{:.2}s / limit {}s] {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn paper_binom(n: i64, k: i64) -> i64 {
    (0..k).fold(1i64, |acc, t| acc * (n - t) / (t + 1))
}

fn ac1() -> Check {
    for d in 4..=12i64 {
        let e = d - 1;
        let expected = (
            paper_binom(d - 1, 3),
            e * e * e - e * e + e - 2 * paper_binom(d - 1, 3),
            paper_binom(d + 3, 3) - 16,
        );
        let (a, b, r) = hodge_dims(2, d as u32).map_err(err)?;
        ensure(
            (a as i64, b as i64, r as i64) == expected,
            format!("d={d}: got {:?}, paper {expected:?}", (a, b, r)),
        )?;
    }
    let fourfold = hodge_dims(4, 3).map_err(err)?;
    ensure(fourfold == (1, 20, 20), format!("(4,3) gave {fourfold:?}"))?;
    Ok("hodge_dims(2,d) equals the printed a, b, r for d=4..12; (4,3) = (1,20,20)".into())
}

fn ac2() -> Check {
    for d in 4..=20u32 {
        let v = smax0_formula(2, d).map_err(err)?;
        ensure(v + 1 == d as i64 - 3, format!("d={d}: smax0+1 = {}", v + 1))?;
    }
    Ok("smax0_formula(2,d) + 1 = d - 3 for d=4..20".into())
}

fn ac3() -> Check {
    let mut parts = Vec::new();
    for (m, d) in SIX {
        let h = (m / 2) as u64;
        let bound = binomial(h + d as u64, d as u64) as i64 - ((h + 1) * (h + 1)) as i64;
        let rep = madaram_min(m, d).map_err(err)?;
        ensure(
            rep.min as i64 == bound && rep.equality_flag,
            format!(
                "({m},{d}): min {} bound {bound} flag {}",
                rep.min, rep.equality_flag
            ),
        )?;
        parts.push(format!("({m},{d})={bound}"));
    }
    Ok(format!(
        "min #A_k equals the bound with equality: {}",
        parts.join(" ")
    ))
}

fn ac4() -> Check {
    for (m, d) in SIX {
        let cert = elimination_certificate(m, d).map_err(err)?;
        let rep = verify_certificate(&cert);
        ensure(
            rep.verified,
            format!("({m},{d}) rejected: {:?}", rep.violation),
        )?;
        if cert.bound < 2 {
            continue;
        }
        // swapped rows: the diagonal entry of the first position is wrong
        let mut swapped = cert.clone();
        swapped.steps[0].rows.swap(0, 1);
        let v = verify_certificate(&swapped)
            .violation
            .ok_or(format!("({m},{d}) swapped rows accepted"))?;
        ensure(
            v.kind == ViolationKind::Diagonal
                && v.k.as_ref() == Some(&cert.steps[0].k)
                && v.e.is_some(),
            format!("({m},{d}) swapped rows located as {v}"),
        )?;
        // wrong diagonal: a column borrowed from another step
        let mut wrong = cert.clone();
        wrong.steps[1].cols[1] = cert.steps[2].cols[1].clone();
        let v = verify_certificate(&wrong)
            .violation
            .ok_or(format!("({m},{d}) wrong diagonal accepted"))?;
        ensure(
            v.k.as_ref() == Some(&cert.steps[1].k) && v.e.is_some(),
            format!("({m},{d}) wrong diagonal located as {v}"),
        )?;
    }
    Ok("six certificates verify; swapped-row and wrong-diagonal mutants rejected at the mutated step".into())
}

fn ac5() -> Check {
    let mut parts = Vec::new();
    for (m, d, expected) in [(2, 4, 1), (2, 5, 2), (4, 3, 1)] {
        let w = solve_witness(m, d).map_err(err)?;
        let v = w.verify().map_err(err)?;
        let floor = counting_bound(m, d).map_err(err)? as usize;
        ensure(
            v.exact_rank == expected && floor == expected,
            format!("({m},{d}): rank {} floor {floor}", v.exact_rank),
        )?;
        ensure(v.ok(), format!("({m},{d}) verification {v:?}"))?;
        ensure(
            v.float_rank == v.exact_rank,
            format!("({m},{d}) float rank {}", v.float_rank),
        )?;
        parts.push(format!("({m},{d})->{}", v.exact_rank));
    }
    Ok(format!(
        "exact witness ranks {} agree with the float cross-check",
        parts.join(" ")
    ))
}

fn ac6() -> Check {
    for d in 4..=12u32 {
        let a = nl_corollary(d).map_err(err)?;
        let b = smax_check_formula(2, d).map_err(err)?;
        ensure(
            a == b,
            format!("d={d}: corollary {a} vs transversality {b}"),
        )?;
    }
    ensure(
        nl_radicand(5) == Rational::from_integer(368.into()),
        "radicand at d=5 is not 368",
    )?;
    ensure(nl_corollary(5).map_err(err)? == 2, "d=5 value is not 2")?;
    // sqrt(100) - 9 = 1 exactly, and the ceiling of an integer is itself
    ensure(
        nl_radicand(4) == Rational::from_integer(100.into()),
        "radicand at d=4 is not 100",
    )?;
    // (3*2*1)/6 - ceil(10 - 9) = 0
    ensure(
        nl_corollary(4).map_err(err)? == 0,
        "perfect square at d=4 mishandled",
    )?;
    Ok("nl_corollary = smax_check_formula(2,d) for d=4..12; d=5 gives 2 (radicand 368); d=4 radicand 100 takes the exact branch".into())
}

fn ac7() -> Check {
    let mut parts = Vec::new();
    for (m, d) in [(2, 5), (4, 3)] {
        let rep = random_rank_probe(m, d, 10_000, ProbeField::Prime { p: DEFAULT_PRIME }, 2024)
            .map_err(err)?;
        let floor = counting_bound(m, d).map_err(err)? as usize;
        ensure(
            rep.min_rank >= floor,
            format!("({m},{d}): FATAL rank {} below floor {floor}", rep.min_rank),
        )?;
        ensure(
            rep.verify().map_err(err)?,
            format!("({m},{d}) witnesses failed re-evaluation"),
        )?;
        parts.push(format!(
            "({m},{d}) ranks {:?}",
            rep.histogram.keys().collect::<Vec<_>>()
        ));
    }
    Ok(format!(
        "10^4 nonzero assignments each never go below s_max0+1: {}",
        parts.join(", ")
    ))
}

fn distinct_set(polys: &[std::sync::Arc<IntPoly>]) -> HashSet<IntPoly> {
    polys.iter().map(|p| (**p).clone()).collect()
}

fn ac8() -> Check {
    for s in 0..=2u32 {
        let i0 = minors_ideal_0(2, 5, s).map_err(err)?;
        let i1 = minors_ideal_1(2, 5, s).map_err(err)?;
        ensure(
            i0.is_homogeneous_of_degree(s + 1) && i1.is_homogeneous_of_degree(s + 1),
            format!("s={s}: not homogeneous"),
        )?;
        let g1 = distinct_set(&i1.distinct_generators());
        let contained = i0.distinct_generators().iter().all(|p| g1.contains(&**p));
        ensure(
            contained,
            format!("s={s}: a generator of I_s^0 is missing from I_s^1"),
        )?;
    }
    let params = Params::new(2, 4).map_err(err)?;
    for alpha in params.cols().iter() {
        ensure(
            build_m_check(2, 4, alpha).map_err(err)?.is_zero(),
            format!("(2,4): M̌ at {alpha} is nonzero"),
        )?;
    }
    let i0 = minors_ideal_0(2, 4, 0).map_err(err)?;
    let i1 = minors_ideal_1(2, 4, 0).map_err(err)?;
    let prim0: HashSet<IntPoly> = i0
        .distinct_generators()
        .iter()
        .map(|p| p.primitive_part())
        .collect();
    let all_multiples = i1
        .distinct_generators()
        .iter()
        .all(|p| prim0.contains(&p.primitive_part()));
    ensure(
        all_multiples,
        "(2,4): an I_0^1 generator is not a multiple of an I_0^0 generator",
    )?;
    Ok("(2,5) s=0,1,2: I^0 ⊆ I^1, homogeneous of degree s+1; (2,4): M̌ ≡ 0 and I^1 adds only scalar multiples".into())
}

fn ac9() -> Check {
    let cap = Duration::from_secs(60);
    let spec = minors_ideal_0(2, 4, 0).map_err(err)?;
    let out = groebner_zero_dim_test(&spec, 2, cap).map_err(err)?;
    ensure(
        out.verdict == ZeroDimVerdict::ZeroAtOriginOnly,
        format!("(2,4) I_0^0: {:?}", out.verdict),
    )?;
    let spec = minors_ideal_0(2, 5, 1).map_err(err)?;
    let out = groebner_zero_dim_test(&spec, 4, cap).map_err(err)?;
    let cert_ok = verify_certificate(&elimination_certificate(2, 5).map_err(err)?).verified;
    match out.verdict {
        ZeroDimVerdict::ZeroAtOriginOnly if cert_ok => {
            Ok(format!("(2,4) I_0^0 and (2,5) I_1^0 are ZeroAtOriginOnly (basis {} mod p), agreeing with the certificate", out.stats.basis_size))
        }
        ZeroDimVerdict::Inconclusive { reason } => Ok(format!("(2,5) I_1^0 inconclusive ({reason}); no contradiction")),
        other => Err(format!("(2,5) I_1^0 gave {other:?}, contradicting the certificate")),
    }
}

fn ac10() -> Check {
    let time_cap = 60u64;
    let dir = tempfile::tempdir().map_err(err)?;
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_ivhs"))
        .args([
            "search-smax1",
            "--m",
            "2",
            "--d",
            "5",
            "--time-cap",
            &time_cap.to_string(),
            "--out",
        ])
        .arg(dir.path())
        .output()
        .map_err(err)?;
    let elapsed = start.elapsed();
    ensure(
        elapsed <= Duration::from_secs(time_cap),
        format!("search ran {:.1}s past its budget", elapsed.as_secs_f64()),
    )?;
    ensure(
        out.status.code() == Some(2),
        format!("exit code {:?}, expected 2", out.status.code()),
    )?;
    let text = std::fs::read_to_string(dir.path().join("search.json")).map_err(err)?;
    let rep: serde_json::Value = serde_json::from_str(&text).map_err(err)?;
    ensure(
        rep["certified_lower"] == 1,
        format!("lower bound {}", rep["certified_lower"]),
    )?;
    let entries = rep["entries"].as_array().ok_or("no per-s evidence")?;
    ensure(entries.len() >= 2, "missing per-s evidence")?;
    // the library agrees and does not claim an exact value
    let lib = smax_search(2, 5, Variant::I1, &Budget::default()).map_err(err)?;
    ensure(
        lib.exact().is_none() && lib.has_inconclusive(),
        "search claims an exact s_max1",
    )?;
    Ok(format!(
        "s_max1 >= s_max0 = 1, upper {}, {} per-s entries, exit code 2 in {:.1}s",
        rep["certified_upper"],
        entries.len(),
        elapsed.as_secs_f64()
    ))
}

#[test]
fn acceptance() {
    let results = [
        criterion("AC1", Duration::from_secs(1), ac1),
        criterion("AC2", Duration::from_secs(1), ac2),
        criterion("AC3", Duration::from_secs(60), ac3),
        criterion("AC4", Duration::from_secs(120), ac4),
        criterion("AC5", Duration::from_secs(60), ac5),
        criterion("AC6", Duration::from_secs(1), ac6),
        criterion("AC7", Duration::from_secs(60), ac7),
        criterion("AC8", Duration::from_secs(300), ac8),
        criterion("AC9", Duration::from_secs(120), ac9),
        criterion("AC10", Duration::from_secs(60), ac10),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
