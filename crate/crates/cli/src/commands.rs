use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use ivhs::bounds::{bounds_report, counting_bound, BoundsReport, CProvenance};
use ivhs::detideal::{
    export_ideal, ideal_manifest, minors_ideal_0, minors_ideal_1, ExportFormat, IdealSpec, IntPoly,
    Variant,
};
use ivhs::fermat_ivhs::{build_m, build_m_check, build_n, IvhsMatrix};
use ivhs::field::DEFAULT_PRIME;
use ivhs::witness::{solve_witness, WitnessVector};
use ivhs::zerodim::groebner::groebner_zero_dim_polys;
use ivhs::zerodim::{
    elimination_certificate, random_rank_probe, smax_search, verify_certificate, Budget,
    CertificateReport, EliminationCertificate, GbConfig, ProbeField, SearchStatus, ZeroDimVerdict,
};

use crate::manifest::ArtifactWriter;
use crate::{Cli, Command, Format, Kind, Outcome};

fn out_dir(cli: &Cli) -> PathBuf {
    let common = cli.command.common();
    common.out.clone().unwrap_or_else(|| {
        PathBuf::from("out")
            .join(format!("{}-{}", common.m, common.d))
            .join(cli.command.name())
    })
}

/// Runs a command and always leaves a manifest behind.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let start = Instant::now();
    let mut writer = ArtifactWriter::new(out_dir(cli))?;
    let result = dispatch(&cli.command, &mut writer);
    let (code, error) = match &result {
        Ok(o) => (o.code(), None),
        Err(e) => (1, Some(format!("{e:#}"))),
    };
    writer.finish(cli.command.name(), cli, start.elapsed(), code, error)?;
    if result.is_ok() {
        println!("artifacts: {}", writer.dir().display());
    }
    result
}

fn dispatch(command: &Command, w: &mut ArtifactWriter) -> Result<Outcome> {
    let common = command.common();
    let (m, d) = (common.m, common.d);
    match command {
        Command::Bounds {
            format,
            trials,
            seed,
            ..
        } => cmd_bounds(w, m, d, *format, *trials, *seed),
        Command::Matrix {
            kind,
            alpha,
            j,
            format,
            ..
        } => {
            let mat = match kind {
                Kind::M => build_m(m, d)?,
                Kind::Mcheck => build_m_check(
                    m,
                    d,
                    alpha
                        .as_ref()
                        .ok_or_else(|| anyhow!("--kind Mcheck needs --alpha"))?,
                )?,
                Kind::N => build_n(
                    m,
                    d,
                    j.as_ref().ok_or_else(|| anyhow!("--kind N needs --j"))?,
                    alpha
                        .as_ref()
                        .ok_or_else(|| anyhow!("--kind N needs --alpha"))?,
                )?,
            };
            cmd_matrix(w, &mat, *format)
        }
        Command::Ideal {
            s, variant, format, ..
        } => {
            let spec = build_ideal(m, d, *s, (*variant).into())?;
            cmd_ideal(w, &spec, *format)
        }
        Command::CertifySmax0 { .. } => {
            let cert = elimination_certificate(m, d)?;
            w.write("certificate.json", &(cert.to_json() + "\n"))?;
            report_certificate(w, &cert)
        }
        Command::VerifyCertificate { input, .. } => {
            let text = fs::read_to_string(input)
                .with_context(|| format!("reading {}", input.display()))?;
            let cert = EliminationCertificate::from_json(&text)?;
            if (cert.m, cert.d) != (m, d) {
                bail!(
                    "certificate is for m={}, d={}, not m={m}, d={d}",
                    cert.m,
                    cert.d
                );
            }
            report_certificate(w, &cert)
        }
        Command::Groebner {
            s,
            variant,
            degree_cap,
            time_cap,
            max_generators,
            ..
        } => {
            let spec = build_ideal(m, d, *s, (*variant).into())?;
            let cfg = GbConfig {
                degree_cap: degree_cap.unwrap_or(2 * (s + 1)),
                time_cap: Duration::from_secs(*time_cap),
                max_generators: *max_generators,
            };
            let gens: Vec<IntPoly> = spec
                .distinct_generators()
                .iter()
                .map(|p| (**p).clone())
                .collect();
            let out = groebner_zero_dim_polys(spec.num_variables(), &gens, &cfg)?;
            w.write_json("verdict.json", &out)?;
            println!("verdict: {}", serde_json::to_string(&out.verdict)?);
            Ok(match out.verdict {
                ZeroDimVerdict::Inconclusive { .. } => Outcome::Inconclusive,
                _ => Outcome::Completed,
            })
        }
        Command::SearchSmax1 {
            variant,
            degree_cap,
            time_cap,
            max_generators,
            ..
        } => {
            let budget = Budget {
                time_cap: Duration::from_secs(*time_cap),
                degree_cap: *degree_cap,
                max_generators: *max_generators,
            };
            let variant: Variant = (*variant).into();
            let rep = smax_search(m, d, variant, &budget)?;
            w.write_json("search.json", &rep)?;
            for e in &rep.entries {
                let label = match &e.status {
                    SearchStatus::ZeroOnly { .. } => "only the origin".to_string(),
                    SearchStatus::Nontrivial { .. } => "nontrivial zero".to_string(),
                    SearchStatus::Inconclusive { reason, .. } => format!("inconclusive ({reason})"),
                };
                println!("s = {}: {label}", e.s);
                if let SearchStatus::Inconclusive {
                    witness_note: Some(n),
                    ..
                } = &e.status
                {
                    println!("        {n}");
                }
            }
            for n in &rep.notes {
                println!("note: {n}");
            }
            let show = |v: Option<u32>| v.map_or("?".to_string(), |v| v.to_string());
            println!(
                "s_max ({variant}): lower {} upper {}",
                show(rep.certified_lower),
                show(rep.certified_upper)
            );
            Ok(if rep.has_inconclusive() {
                Outcome::Inconclusive
            } else {
                Outcome::Completed
            })
        }
        Command::Probe {
            trials,
            seed,
            field_prime,
            rationals,
            ..
        } => {
            let field = match rationals {
                Some(range) => ProbeField::Rationals { range: *range },
                None => ProbeField::Prime { p: *field_prime },
            };
            let rep = random_rank_probe(m, d, *trials, field, *seed)?;
            let floor = counting_bound(m, d)? as usize;
            if rep.min_rank < floor {
                bail!(
                    "soundness violation: a nonzero assignment has rank {} below the floor {floor}",
                    rep.min_rank
                );
            }
            if !rep.verify()? {
                bail!("probe witnesses failed re-evaluation");
            }
            w.write_json("probe.json", &rep)?;
            println!(
                "max rank {} (min {}, floor {floor}) over {} trials",
                rep.max_rank, rep.min_rank, rep.trials
            );
            Ok(Outcome::Completed)
        }
        Command::Witness { .. } => {
            let wit = solve_witness(m, d)?;
            w.write("witness.json", &(wit.to_json() + "\n"))?;
            report_witness(w, &wit)
        }
        Command::VerifyWitness { input, .. } => {
            let text = fs::read_to_string(input)
                .with_context(|| format!("reading {}", input.display()))?;
            let wit = WitnessVector::from_json(&text)?;
            if (wit.m, wit.d) != (m, d) {
                bail!("witness is for m={}, d={}, not m={m}, d={d}", wit.m, wit.d);
            }
            report_witness(w, &wit)
        }
    }
}

fn cmd_bounds(
    w: &mut ArtifactWriter,
    m: u32,
    d: u32,
    format: Format,
    trials: Option<u64>,
    seed: u64,
) -> Result<Outcome> {
    let mut rep: BoundsReport = bounds_report(m, d)?;
    if let Some(trials) = trials {
        let probe = random_rank_probe(m, d, trials, ProbeField::Prime { p: DEFAULT_PRIME }, seed)?;
        rep = rep.with_c_estimate(probe.max_rank as u64, CProvenance::Probe)?;
    }
    match format {
        Format::Json => w.write_json("bounds.json", &rep)?,
        Format::Csv => w.write(
            "bounds.csv",
            &format!("{}\n{}\n", BoundsReport::csv_header(), rep.csv_row()),
        )?,
        Format::Txt => bail!("bounds are written as json or csv"),
    }
    println!(
        "a={} b={} r={} smax0={} smax_check={} madaram_min={} equality={}",
        rep.a, rep.b, rep.r, rep.smax0, rep.smax_check, rep.madaram.min, rep.madaram.equality_flag
    );
    Ok(Outcome::Completed)
}

fn cmd_matrix(w: &mut ArtifactWriter, mat: &IvhsMatrix, format: Format) -> Result<Outcome> {
    match format {
        Format::Json => w.write("matrix.json", &(mat.to_json() + "\n"))?,
        Format::Txt => w.write("matrix.txt", &mat.to_text())?,
        Format::Csv => bail!("matrices are written as json or txt"),
    }
    let (a, r) = mat.shape();
    println!("{a}x{r} matrix, {} nonzero entries", mat.nonzero_count());
    Ok(Outcome::Completed)
}

fn build_ideal(m: u32, d: u32, s: u32, variant: Variant) -> Result<IdealSpec> {
    Ok(match variant {
        Variant::I0 => minors_ideal_0(m, d, s)?,
        Variant::I1 => minors_ideal_1(m, d, s)?,
    })
}

fn cmd_ideal(w: &mut ArtifactWriter, spec: &IdealSpec, format: Format) -> Result<Outcome> {
    let (name, fmt) = match format {
        Format::Txt => ("ideal.txt", ExportFormat::Text),
        Format::Json => ("ideal.json", ExportFormat::Json),
        Format::Csv => bail!("ideals are written as txt or json"),
    };
    w.write(name, &export_ideal(spec, fmt))?;
    let manifest = ideal_manifest(spec);
    w.write_json("ideal.manifest.json", &manifest)?;
    println!(
        "{} generators ({} distinct), sha256 {}",
        spec.generators.len(),
        manifest.generator_count,
        manifest.sha256
    );
    if let Some(note) = &spec.note {
        println!("note: {note}");
    }
    Ok(Outcome::Completed)
}

fn report_certificate(w: &mut ArtifactWriter, cert: &EliminationCertificate) -> Result<Outcome> {
    let report: CertificateReport = verify_certificate(cert);
    let mut log = report.chain.join("\n");
    if !log.is_empty() {
        log.push('\n');
    }
    match &report.violation {
        None => log.push_str(&format!("verified: s_max0 >= {}\n", cert.bound as i64 - 1)),
        Some(v) => log.push_str(&format!("rejected: {v}\n")),
    }
    w.write("verification.log", &log)?;
    match &report.violation {
        None => {
            println!(
                "certificate verified: {} steps of size {}, s_max0 >= {}",
                cert.steps.len(),
                cert.bound,
                cert.bound as i64 - 1
            );
            Ok(Outcome::Completed)
        }
        Some(v) => {
            eprintln!("certificate rejected: {v}");
            Ok(Outcome::Failed)
        }
    }
}

fn report_witness(w: &mut ArtifactWriter, wit: &WitnessVector) -> Result<Outcome> {
    let v = wit.verify()?;
    w.write_json("witness_verification.json", &v)?;
    println!(
        "witness rank {} (floor {}, float rank {}), annihilates tangent space: {}",
        v.exact_rank, v.rank_floor, v.float_rank, v.annihilates_tangent_space
    );
    Ok(if v.ok() {
        Outcome::Completed
    } else {
        Outcome::Failed
    })
}
