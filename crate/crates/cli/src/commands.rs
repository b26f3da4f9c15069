use std::fmt::Write as _;
use std::fs;

use anyhow::Context;
use serde_json::{json, Value};
use threephase::laminate::{check_univalence, LaminateReport};
use threephase::oracle::translation_max;
use threephase::par::{self, Execution};
use threephase::verify::{verify_with, Tolerances, VerifyConfig};
use threephase::{
    boundary_samples, bound, build, build_sg, classify, evaluate, hs_bounds, BoundaryKind, CompositeSpec, Error,
    LaminateNode, Materials, Region, SymTensor2,
};

use crate::args::{
    parse_grid, BoundArgs, Format, LaminateArgs, MatArgs, OutArgs, RegionMapArgs, SweepArgs, VerifyArgs,
};
use crate::output::{csv_text, emit, opt9, sig9};
use crate::svg;

/// A failed run, carrying the process exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or an invalid composite; exit 2.
    Invalid(String),
    /// No attaining structure for the point; exit 3.
    NotAttained(String),
    /// A verification tolerance was exceeded; exit 1.
    Check(String),
    Other(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::NotAttained(_) => 3,
            Failure::Check(_) | Failure::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Invalid(m) | Failure::NotAttained(m) | Failure::Check(m) => f.write_str(m),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidMaterial(_)
            | Error::NotWellOrdered
            | Error::DegenerateFraction { .. }
            | Error::FractionsExceedOne(_)
            | Error::RhoOutOfRange(_)
            | Error::InvalidArgument(_)
            | Error::InvalidLaminate(_) => Failure::Invalid(e.to_string()),
            Error::RegionNotAttained(r) => Failure::NotAttained(not_attained(r)),
            Error::WrongRegion { expected, actual } => Failure::NotAttained(format!(
                "the structure is built for region {expected} only; the point lies in region {actual}"
            )),
            other => Failure::Other(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

type Outcome = Result<(), Failure>;

fn not_attained(r: Region) -> String {
    if r == Region::E {
        "region E: attaining structure conjectured only; the bound there is the numerical dual optimum".to_string()
    } else {
        format!("region {r}: attaining structure conjectured only")
    }
}

fn materials(m: &MatArgs) -> Result<Materials, Failure> {
    Ok(Materials::from_compliances(m.moduli().map_err(Failure::Invalid)?)?)
}

fn format_of(out: &OutArgs, default: Format, allowed: &[Format]) -> Result<Format, Failure> {
    let f = out.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Invalid(format!("format {f:?} is not available here")))
    }
}

fn json_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn cartesian(t: &SymTensor2) -> [f64; 3] {
    t.to_cartesian_array()
}

pub fn bound_cmd(a: &BoundArgs) -> Outcome {
    format_of(&a.out, Format::Json, &[Format::Json])?;
    let mats = materials(&a.mat)?;
    let spec = mats.spec(a.point.m1, a.point.m2, a.point.rho)?;
    let b = bound(&spec);
    let hs = hs_bounds(&mats, spec.m1, spec.m2);
    let mut v = json!({
        "region": b.region,
        "U_tr": b.u_tr,
        "alpha_star": b.alpha_star,
        "K_star": b.k_star,
        "L_star": b.l_star,
        "conjectured": b.conjectured,
        "averages": {
            "phase1": cartesian(&b.averages.phase1()),
            "phase2": cartesian(&b.averages.phase2()),
        },
        "K_HS": hs.k_hs,
        "L_HS": hs.l_hs,
    });
    let mut failure = None;
    if a.verify {
        if b.region == Region::E {
            v["oracle"] = json!({ "notice": "region E is computed by the oracle itself" });
        } else {
            let o = translation_max(&spec);
            let dev = (o.u - b.u_tr).abs() / b.u_tr;
            v["oracle"] = json!({ "U": o.u, "alpha_star": o.alpha_star, "deviation": dev });
            if !(dev <= a.tol_oracle) {
                failure = Some(Failure::Check(format!(
                    "oracle deviation {dev:e} exceeds {:e}",
                    a.tol_oracle
                )));
            }
        }
    }
    emit(a.out.out.as_deref(), &json_text(&v))?;
    failure.map_or(Ok(()), Err)
}

pub fn sweep_cmd(a: &SweepArgs) -> Outcome {
    let format = format_of(&a.out, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let mats = materials(&a.mat)?;
    if a.rho_steps < 2 {
        return Err(Failure::Invalid("a sweep needs at least 2 rho steps".into()));
    }
    if !(a.rho_min < a.rho_max) {
        return Err(Failure::Invalid(format!("empty rho range [{}, {}]", a.rho_min, a.rho_max)));
    }
    let n = a.rho_steps;
    let rhos: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { a.rho_max } else { a.rho_min + (a.rho_max - a.rho_min) * i as f64 / (n - 1) as f64 })
        .collect();
    let specs = rhos
        .iter()
        .map(|&r| mats.spec(a.m1, a.m2, r))
        .collect::<threephase::Result<Vec<CompositeSpec>>>()?;
    let hs = hs_bounds(&mats, a.m1, a.m2);
    let rows = par::map(Execution::default(), &specs, bound);

    let text = match format {
        Format::Csv => csv_text(
            &["rho", "region", "U_tr", "alpha_star", "K_star", "L_star", "K_HS", "L_HS", "conjectured"],
            rows.iter().zip(&rhos).map(|(b, &rho)| {
                vec![
                    sig9(rho),
                    b.region.label().to_string(),
                    sig9(b.u_tr),
                    sig9(b.alpha_star),
                    opt9(b.k_star),
                    opt9(b.l_star),
                    sig9(hs.k_hs),
                    sig9(hs.l_hs),
                    b.conjectured.to_string(),
                ]
            }),
        )?,
        Format::Json => json_text(&json!({
            "m1": a.m1,
            "m2": a.m2,
            "K_HS": hs.k_hs,
            "L_HS": hs.l_hs,
            "rows": rows.iter().zip(&rhos).map(|(b, &rho)| json!({
                "rho": rho,
                "region": b.region,
                "U_tr": b.u_tr,
                "alpha_star": b.alpha_star,
                "K_star": b.k_star,
                "L_star": b.l_star,
                "conjectured": b.conjectured,
            })).collect::<Vec<_>>(),
        })),
        _ => svg::sweep(
            &rows
                .iter()
                .zip(&rhos)
                .map(|(b, &rho)| svg::SweepRow {
                    rho,
                    k: b.k_star,
                    l: b.l_star,
                    k_hs: hs.k_hs,
                    l_hs: hs.l_hs,
                })
                .collect::<Vec<_>>(),
        ),
    };
    emit(a.out.out.as_deref(), &text)?;
    Ok(())
}

/// Boundary polylines for drawing. An implicit curve folds back on itself, so its scan-line
/// roots are split into the topmost root of each line and the rest, and the two branches
/// are chained at the fold.
pub fn boundary_lines(mats: &Materials, m2: f64, count: usize) -> Vec<(String, Vec<(f64, f64)>)> {
    let mut out = Vec::new();
    for kind in BoundaryKind::ALL {
        let Ok(pts) = boundary_samples(kind, mats, m2, count) else {
            continue;
        };
        let pts: Vec<(f64, f64)> = pts.into_iter().filter(|&(_, m1)| m1 > 0.0 && m1 < 1.0 - m2).collect();
        if pts.len() < 2 {
            continue;
        }
        let line = if kind.is_implicit() { chain_fold(&pts) } else { pts };
        out.push((kind.label().to_string(), line));
    }
    out
}

fn chain_fold(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let (mut upper, mut lower) = (Vec::new(), Vec::new());
    for (i, &p) in pts.iter().enumerate() {
        if pts.get(i + 1).is_some_and(|q| q.0 == p.0) {
            lower.push(p);
        } else {
            upper.push(p);
        }
    }
    if lower.is_empty() {
        return upper;
    }
    let gap = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
    let rev: Vec<(f64, f64)> = lower.iter().rev().copied().collect();
    // the fold sits where the branches share a scan line end
    if gap(*rev.last().unwrap(), upper[0]) <= gap(*upper.last().unwrap(), rev[0]) {
        rev.into_iter().chain(upper).collect()
    } else {
        upper.into_iter().chain(rev).collect()
    }
}

pub fn region_map_cmd(a: &RegionMapArgs) -> Outcome {
    let format = format_of(&a.out, Format::Csv, &[Format::Csv, Format::Svg])?;
    let mats = materials(&a.mat)?;
    let (n, m) = parse_grid(&a.grid).map_err(Failure::Invalid)?;
    let m2 = a.m2_plane;
    // validates m2 before the grid is filled
    mats.spec(0.5 * (1.0 - m2), m2, 0.0)?;
    let m1_max = 1.0 - m2;
    let cells: Vec<(f64, f64)> = (0..m)
        .flat_map(|j| {
            (0..n).map(move |i| (-1.0 + 2.0 * (i as f64 + 0.5) / n as f64, m1_max * (j as f64 + 0.5) / m as f64))
        })
        .collect();
    let labels: Vec<Region> = par::map(Execution::default(), &cells, |&(rho, m1)| {
        classify(&mats.spec(m1, m2, rho).expect("cell centres are interior"))
    });

    let text = match format {
        Format::Csv => csv_text(
            &["rho", "m1", "region"],
            cells
                .iter()
                .zip(&labels)
                .map(|(&(rho, m1), r)| vec![sig9(rho), sig9(m1), r.label().to_string()]),
        )?,
        _ => svg::region_map(&labels, n, m, m1_max, &boundary_lines(&mats, m2, 4 * n.max(m))),
    };
    emit(a.out.out.as_deref(), &text)?;
    Ok(())
}

fn report_json(r: &LaminateReport) -> Value {
    json!({
        "energy": r.energy,
        "fractions": r.fractions,
        "avg_stress": cartesian(&r.avg_stress),
        "det_avg": r.det_avg,
        "max_residual": r.max_residual(),
        "rank": r.rank,
    })
}

pub fn laminate_cmd(a: &LaminateArgs) -> Outcome {
    let format = format_of(&a.out, Format::Json, &[Format::Json, Format::Svg])?;
    let mats = materials(&a.mat)?;
    let out = a.out.out.as_deref();

    if let Some(path) = &a.eval {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let tree: LaminateNode =
            serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
        if format == Format::Svg {
            emit(out, &svg::laminate(&tree))?;
            return Ok(());
        }
        let r = evaluate(&tree, &mats);
        let mut v = json!({ "report": report_json(&r) });
        // the loading is diag(1, ρ) up to scale when the average is diagonal with σ11 > 0
        let (s11, s22, s12) = r.avg_stress.to_cartesian();
        if s11 > 0.0 && s12.abs() <= 1e-12 * s11 {
            let rho = s22 / s11;
            v["report"]["univalence"] = json!(check_univalence(&tree, rho));
            if let Ok(spec) = mats.spec(r.fractions[0], r.fractions[1], rho) {
                let b = bound(&spec);
                let u = b.u_tr * s11 * s11;
                v["bound"] = json!({ "rho": rho, "region": b.region, "U_tr": u, "gap": (r.energy - u) / u });
            }
        }
        emit(out, &json_text(&v))?;
        return Ok(());
    }

    let (m1, m2, rho) = (a.m1.unwrap(), a.m2.unwrap(), a.rho.unwrap());
    let spec = mats.spec(m1, m2, rho)?;
    let region = classify(&spec);
    if !region.is_attainable() {
        return Err(Failure::NotAttained(not_attained(region)));
    }
    let u = bound(&spec).u_tr;

    if a.sg {
        let cell = build_sg(&spec)?;
        let text = match format {
            Format::Svg => svg::sg_cell(&cell),
            _ => {
                let r = cell.report(&mats);
                let mut report = report_json(&r);
                report["U_tr"] = json!(u);
                report["flux_residuals"] = json!(cell.flux_residuals());
                json_text(&json!({
                    "region": region,
                    "structure": "sg",
                    "betas": { "beta1": cell.beta1, "beta2": cell.beta2, "beta3": cell.beta3, "beta4": cell.beta4 },
                    "fields": {
                        "tau11": cartesian(&cell.tau11),
                        "tau12": cartesian(&cell.tau12),
                        "tau2": cartesian(&cell.tau2),
                    },
                    "report": report,
                }))
            }
        };
        emit(out, &text)?;
        return Ok(());
    }

    let lam = build(&spec)?;
    let text = match format {
        Format::Svg => svg::laminate(&lam.tree),
        _ => {
            let r = evaluate(&lam.tree, &mats);
            let mut report = report_json(&r);
            report["U_tr"] = json!(u);
            report["univalence"] = json!(check_univalence(&lam.tree, rho));
            let betas: serde_json::Map<String, Value> = lam.betas.iter().map(|(k, b)| (k.to_string(), json!(b))).collect();
            json_text(&json!({
                "region": region,
                "structure": "laminate",
                "betas": betas,
                "tree": lam.tree,
                "report": report,
            }))
        }
    };
    emit(out, &text)?;
    Ok(())
}

pub fn verify_cmd(a: &VerifyArgs) -> Outcome {
    let format = format_of(&a.out, Format::Table, &[Format::Table, Format::Json])?;
    let mats = materials(&a.mat)?;
    if a.samples == 0 {
        return Err(Failure::Invalid("verify needs at least one sample".into()));
    }
    let regions = if a.regions.is_empty() {
        Region::CLOSED_FORM.to_vec()
    } else {
        a.regions
            .iter()
            .map(|s| s.trim().parse::<Region>())
            .collect::<threephase::Result<Vec<_>>>()?
    };
    let config = VerifyConfig {
        samples: a.samples,
        seed: a.seed,
        regions,
        tolerances: Tolerances {
            oracle: a.tol_oracle,
            attainment: a.tol_attainment,
            residual: a.tol_residual,
        },
        ..Default::default()
    };
    let report = verify_with(&mats, &config, Execution::default());

    let text = match format {
        Format::Json => json_text(&json!({ "config": config, "report": report, "passed": report.passed() })),
        _ => {
            let mut t = String::new();
            let _ = writeln!(
                t,
                "{:<7}{:>8}{:>12}{:>12}{:>12}{:>12}{:>12}{:>7}{:>6}",
                "region", "samples", "oracle", "gap", "residual", "det", "univalence", "beta", "rank"
            );
            for m in &report.regions {
                let dash = |v: f64| if m.attainment_checked { format!("{:.2e}", v + 0.0) } else { "-".to_string() };
                let oracle = if m.region == "E" { "-".to_string() } else { format!("{:.2e}", m.max_oracle_dev) };
                let _ = writeln!(
                    t,
                    "{:<7}{:>8}{:>12}{:>12}{:>12}{:>12}{:>12}{:>7}{:>6}",
                    m.region,
                    m.samples,
                    oracle,
                    dash(m.max_attainment_gap),
                    dash(m.max_residual),
                    dash(m.max_det_error),
                    dash(m.max_univalence),
                    if m.attainment_checked { m.beta_violations.to_string() } else { "-".into() },
                    if m.attainment_checked { m.min_rank.to_string() } else { "-".into() },
                );
            }
            for n in &report.notices {
                let _ = writeln!(t, "note: {n}");
            }
            for f in &report.failures {
                let _ = writeln!(t, "FAIL: {f}");
            }
            let _ = writeln!(t, "{}", if report.passed() { "all checks passed" } else { "verification failed" });
            t
        }
    };
    emit(a.out.out.as_deref(), &text)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(report.failures.join("; ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_is_chained_into_one_line() {
        let mats = Materials::from_compliances([1.0, 2.0, 3.0, 4.0]).unwrap();
        for (name, line) in boundary_lines(&mats, 0.35, 800) {
            let jump = line
                .windows(2)
                .map(|w| (w[0].0 - w[1].0).abs().max((w[0].1 - w[1].1).abs()))
                .fold(0.0, f64::max);
            // the explicit curves are dense; at the fold the curve is vertical between two scan lines
            assert!(jump < 0.05, "{name}: step {jump}");
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::from(Error::FractionsExceedOne(1.1)).code(), 2);
        assert_eq!(Failure::from(Error::RegionNotAttained(Region::D)).code(), 3);
        assert_eq!(Failure::Check(String::new()).code(), 1);
    }
}
