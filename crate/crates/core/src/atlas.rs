//! Optimality regions of the translation bound and the curves separating them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{CompositeSpec, Materials};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    A1,
    A2,
    B,
    C,
    D,
    E,
    #[serde(rename = "A1'")]
    A1p,
    #[serde(rename = "A2'")]
    A2p,
    #[serde(rename = "B'")]
    Bp,
    #[serde(rename = "C'")]
    Cp,
    #[serde(rename = "D'")]
    Dp,
}

impl Region {
    pub const ALL: [Region; 11] = [
        Region::A1,
        Region::A2,
        Region::B,
        Region::C,
        Region::D,
        Region::E,
        Region::A1p,
        Region::A2p,
        Region::Bp,
        Region::Cp,
        Region::Dp,
    ];

    /// Regions with a known attaining laminate.
    pub const ATTAINABLE: [Region; 8] = [
        Region::A1,
        Region::A2,
        Region::B,
        Region::C,
        Region::A1p,
        Region::A2p,
        Region::Bp,
        Region::Cp,
    ];

    /// Regions with a closed-form bound.
    pub const CLOSED_FORM: [Region; 10] = [
        Region::A1,
        Region::A2,
        Region::B,
        Region::C,
        Region::D,
        Region::A1p,
        Region::A2p,
        Region::Bp,
        Region::Cp,
        Region::Dp,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Region::A1 => "A1",
            Region::A2 => "A2",
            Region::B => "B",
            Region::C => "C",
            Region::D => "D",
            Region::E => "E",
            Region::A1p => "A1'",
            Region::A2p => "A2'",
            Region::Bp => "B'",
            Region::Cp => "C'",
            Region::Dp => "D'",
        }
    }

    pub fn is_primed(self) -> bool {
        matches!(self, Region::A1p | Region::A2p | Region::Bp | Region::Cp | Region::Dp)
    }

    pub fn is_attainable(self) -> bool {
        Self::ATTAINABLE.contains(&self)
    }

    /// Regions sharing one closed-form energy map to the same family.
    pub fn family(self) -> Family {
        match self {
            Region::A1 | Region::A2 => Family::A,
            Region::A1p | Region::A2p => Family::Ap,
            Region::B => Family::B,
            Region::Bp => Family::Bp,
            Region::C | Region::Cp => Family::C,
            Region::D => Family::D,
            Region::Dp => Family::Dp,
            Region::E => Family::E,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Region> {
        Region::ALL
            .into_iter()
            .find(|r| r.label() == s || r.label().replace('\'', "p") == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown region '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    A,
    Ap,
    B,
    Bp,
    C,
    D,
    Dp,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryKind {
    AB,
    BD,
    AC,
    CE,
    ApBp,
    BpDp,
    ApCp,
    CpE,
    DE,
    DpE,
    A1A2,
    A1pA2p,
}

impl BoundaryKind {
    pub const ALL: [BoundaryKind; 12] = [
        BoundaryKind::AB,
        BoundaryKind::BD,
        BoundaryKind::AC,
        BoundaryKind::CE,
        BoundaryKind::ApBp,
        BoundaryKind::BpDp,
        BoundaryKind::ApCp,
        BoundaryKind::CpE,
        BoundaryKind::DE,
        BoundaryKind::DpE,
        BoundaryKind::A1A2,
        BoundaryKind::A1pA2p,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BoundaryKind::AB => "A-B",
            BoundaryKind::BD => "B-D",
            BoundaryKind::AC => "A-C",
            BoundaryKind::CE => "C-E",
            BoundaryKind::ApBp => "A'-B'",
            BoundaryKind::BpDp => "B'-D'",
            BoundaryKind::ApCp => "A'-C'",
            BoundaryKind::CpE => "C'-E",
            BoundaryKind::DE => "D-E",
            BoundaryKind::DpE => "D'-E",
            BoundaryKind::A1A2 => "A1-A2",
            BoundaryKind::A1pA2p => "A1'-A2'",
        }
    }

    /// Implicit kinds are residuals in `(m1, m2, ρ)`; the others give `m1` directly.
    pub fn is_implicit(self) -> bool {
        matches!(self, BoundaryKind::DE | BoundaryKind::DpE)
    }

    /// The ρ-interval on which the curve actually separates two regions.
    pub fn rho_segment(self, m2: f64) -> (f64, f64) {
        match self {
            BoundaryKind::AC | BoundaryKind::CE => (0.0, m2),
            BoundaryKind::AB | BoundaryKind::BD | BoundaryKind::A1A2 => (m2, 1.0),
            BoundaryKind::ApCp | BoundaryKind::CpE => (-m2, 0.0),
            BoundaryKind::ApBp | BoundaryKind::BpDp | BoundaryKind::A1pA2p => (-1.0, -m2),
            BoundaryKind::DE => (0.0, 1.0),
            BoundaryKind::DpE => (-1.0, 0.0),
        }
    }

    /// The ρ-interval on which the formula is defined.
    fn domain(self, m2: f64) -> (f64, f64, bool) {
        // (lo, hi, lo_open)
        match self {
            BoundaryKind::AB | BoundaryKind::BD => (0.0, 1.0, true),
            BoundaryKind::AC | BoundaryKind::CE | BoundaryKind::DE => (0.0, 1.0, false),
            BoundaryKind::A1A2 => (m2, 1.0, false),
            BoundaryKind::ApBp | BoundaryKind::BpDp => (-1.0, 0.0, false),
            BoundaryKind::ApCp | BoundaryKind::CpE | BoundaryKind::DpE => (-1.0, 0.0, false),
            BoundaryKind::A1pA2p => (-1.0, -m2, false),
        }
    }
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BoundaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<BoundaryKind> {
        BoundaryKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown boundary '{s}'")))
    }
}

/// Evaluates a boundary function. Explicit kinds return the boundary value of `m1`;
/// `D-E` and `D'-E` need `m1` and return the signed residual.
pub fn psi(kind: BoundaryKind, mats: &Materials, m1: Option<f64>, m2: f64, rho: f64) -> Result<f64> {
    let (lo, hi, lo_open) = kind.domain(m2);
    let above = if lo_open { rho > lo } else { rho >= lo };
    let below = if kind == BoundaryKind::ApBp || kind == BoundaryKind::BpDp {
        rho < hi
    } else {
        rho <= hi
    };
    if !(above && below) || !(m2 > 0.0 && m2 < 1.0) {
        return Err(Error::InvalidRange { kind, rho });
    }
    let (k1, l1, k2, l2) = (mats.k1(), mats.l1(), mats.k2(), mats.l2());
    let v = match kind {
        BoundaryKind::AB => {
            let q = (rho * m2).sqrt();
            q * (1.0 + rho - 2.0 * q) / (2.0 * rho) * (k1 + l1) / (k2 + l2)
        }
        BoundaryKind::BD => {
            let q = (rho * m2).sqrt();
            q * (1.0 + rho - 2.0 * q) / (2.0 * rho) * (k1 + l1) / (k2 + l1)
        }
        BoundaryKind::AC | BoundaryKind::A1A2 => m2 * (1.0 - m2) * (k1 + l1) / ((m2 + rho) * (k2 + l2)),
        BoundaryKind::CE => {
            m2 * (1.0 - m2) * (k1 + l1) / ((m2 + rho) * (k2 + l2) - 2.0 * (l2 - l1) * rho)
        }
        BoundaryKind::ApBp => {
            let q = (-rho * m2).sqrt();
            -q * (1.0 - rho - 2.0 * q) / (2.0 * rho) * (k1 + l1) / (k2 + l2)
        }
        BoundaryKind::BpDp => {
            let q = (-rho * m2).sqrt();
            -q * (1.0 - rho - 2.0 * q) / (2.0 * rho) * (k1 + l1) / (k1 + l2)
        }
        BoundaryKind::ApCp | BoundaryKind::A1pA2p => {
            m2 * (1.0 - m2) * (k1 + l1) / ((m2 - rho) * (k2 + l2))
        }
        BoundaryKind::CpE => {
            m2 * (1.0 - m2) * (k1 + l1) / ((m2 + rho) * (k2 + l2) - 2.0 * (l2 + k1) * rho)
        }
        BoundaryKind::DE | BoundaryKind::DpE => {
            let m1 = m1.ok_or_else(|| {
                Error::InvalidArgument(format!("boundary {kind} is implicit and needs m1"))
            })?;
            if !(m1 > 0.0 && m1 < 1.0) {
                return Err(Error::DegenerateFraction { name: "m1", value: m1 });
            }
            residual(kind, mats, m1, m2, rho)
        }
    };
    Ok(v)
}

fn residual(kind: BoundaryKind, mats: &Materials, m1: f64, m2: f64, rho: f64) -> f64 {
    let (k1, l1, k2, l2) = (mats.k1(), mats.l1(), mats.k2(), mats.l2());
    let tail = 2.0 * rho * (1.0 - m1) / m1;
    if kind == BoundaryKind::DE {
        let den = m1 * (k2 + l1) + m2 * (k1 + l1);
        let h = -m2 * (k1 + l1) * ((m1 + m2) * (k1 + l1) + 2.0 * m1 * (k2 - k1)) / (2.0 * m1 * den * den);
        h * (1.0 + rho) * (1.0 + rho) + tail
    } else {
        let den = m1 * (k1 + l2) + m2 * (k1 + l1);
        let h = m2 * (k1 + l1) * ((m1 + m2) * (k1 + l1) + 2.0 * m1 * (l2 - l1)) / (2.0 * m1 * den * den);
        h * (1.0 - rho) * (1.0 - rho) + tail
    }
}

/// Region membership together with the distance in `m1` to the nearest boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub region: Region,
    pub margin: f64,
}

pub fn classify(spec: &CompositeSpec) -> Region {
    classify_with_margin(spec).region
}

pub fn classify_with_margin(spec: &CompositeSpec) -> Classification {
    let mats = spec.materials();
    locate(&mats, spec.m1, spec.m2, spec.rho())
}

/// Classification on raw parameters; `m1` outside `(0, 1 − m2)` is the caller's problem.
pub fn locate(mats: &Materials, m1: f64, m2: f64, rho: f64) -> Classification {
    let p = |kind| psi(kind, mats, None, m2, rho).expect("branch chosen inside the domain");
    let mut margin = f64::INFINITY;
    let mut near = |v: f64| margin = margin.min((m1 - v).abs());

    let primed = rho < 0.0;
    let (ac, ab, ce_or_bd, implicit) = if !primed {
        if rho <= m2 {
            (p(BoundaryKind::AC), None, p(BoundaryKind::CE), BoundaryKind::DE)
        } else {
            (p(BoundaryKind::AC), Some(p(BoundaryKind::AB)), p(BoundaryKind::BD), BoundaryKind::DE)
        }
    } else if rho >= -m2 {
        (p(BoundaryKind::ApCp), None, p(BoundaryKind::CpE), BoundaryKind::DpE)
    } else {
        (p(BoundaryKind::ApCp), Some(p(BoundaryKind::ApBp)), p(BoundaryKind::BpDp), BoundaryKind::DpE)
    };
    let pick = |plain: Region, prime: Region| if primed { prime } else { plain };

    near(ac);
    near(ce_or_bd);
    if let Some(ab) = ab {
        near(ab);
    }

    let region = match ab {
        None if m1 <= ac => pick(Region::A1, Region::A1p),
        None if m1 <= ce_or_bd => pick(Region::C, Region::Cp),
        Some(ab) if m1 <= ab => {
            if m1 <= ac {
                pick(Region::A1, Region::A1p)
            } else {
                pick(Region::A2, Region::A2p)
            }
        }
        Some(_) if m1 <= ce_or_bd => pick(Region::B, Region::Bp),
        _ => {
            let r = residual(implicit, mats, m1, m2, rho);
            let h = 1e-7 * m1;
            let slope = (residual(implicit, mats, m1 + h, m2, rho) - residual(implicit, mats, m1 - h, m2, rho)) / (2.0 * h);
            // Newton estimate of the distance to the implicit curve
            if slope != 0.0 && slope.is_finite() {
                margin = margin.min((r / slope).abs());
            }
            let in_d = if primed { r < 0.0 } else { r > 0.0 };
            if in_d {
                pick(Region::D, Region::Dp)
            } else {
                Region::E
            }
        }
    };
    Classification { region, margin }
}

/// Points `(ρ, m1)` on a boundary for fixed `m2`.
///
/// Explicit kinds are sampled evenly over their separating segment. Implicit kinds are
/// root-found in `m1` by bisection above the last explicit curve, every crossing of each scan
/// line in order of `m1`; values of `ρ` without a sign change are skipped.
pub fn boundary_samples(kind: BoundaryKind, mats: &Materials, m2: f64, count: usize) -> Result<Vec<(f64, f64)>> {
    if count < 2 {
        return Err(Error::InvalidArgument("boundary sampling needs count >= 2".into()));
    }
    if !(m2 > 0.0 && m2 < 1.0) {
        return Err(Error::DegenerateFraction { name: "m2", value: m2 });
    }
    let (lo, hi) = kind.rho_segment(m2);
    let rhos = (0..count).map(|i| if i == count - 1 { hi } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 });

    if !kind.is_implicit() {
        return rhos
            .filter(|&r| !(kind == BoundaryKind::AB || kind == BoundaryKind::BD) || r > 0.0)
            .map(|r| Ok((r, psi(kind, mats, None, m2, r)?)))
            .collect();
    }

    let mut out = Vec::new();
    for rho in rhos {
        out.extend(implicit_roots(kind, mats, m2, rho).into_iter().map(|m1| (rho, m1)));
    }
    if out.is_empty() {
        return Err(Error::RootNotFound { kind, rho: hi });
    }
    Ok(out)
}

/// Roots of an implicit boundary in `m1` at fixed `ρ`, searched above the explicit curves.
/// The curve folds back near its lower end, so a scan line may cross it twice.
pub fn implicit_roots(kind: BoundaryKind, mats: &Materials, m2: f64, rho: f64) -> Vec<f64> {
    let Some(floor) = explicit_ceiling(kind, mats, m2, rho) else {
        return Vec::new();
    };
    let top = 1.0 - m2;
    let f = |m1: f64| residual(kind, mats, m1, m2, rho);
    const SCAN: usize = 256;
    let mut roots = Vec::new();
    let mut a = floor.max(1e-12);
    let mut fa = f(a);
    for i in 1..=SCAN {
        let b = floor + (top - floor) * i as f64 / SCAN as f64;
        let b = if i == SCAN { top * (1.0 - 1e-15) } else { b };
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fb != 0.0 && fa.signum() != fb.signum() {
            roots.push(bisect(f, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    roots
}

fn explicit_ceiling(kind: BoundaryKind, mats: &Materials, m2: f64, rho: f64) -> Option<f64> {
    let k = match kind {
        BoundaryKind::DE if (0.0..=m2).contains(&rho) => BoundaryKind::CE,
        BoundaryKind::DE if rho > m2 => BoundaryKind::BD,
        BoundaryKind::DpE if (-m2..=0.0).contains(&rho) => BoundaryKind::CpE,
        BoundaryKind::DpE if rho < -m2 => BoundaryKind::BpDp,
        _ => return None,
    };
    psi(k, mats, None, m2, rho).ok()
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn mats() -> Materials {
        Materials::from_compliances([1.0, 2.0, 3.0, 4.0]).unwrap()
    }

    fn region(m1: f64, m2: f64, rho: f64) -> Region {
        classify(&mats().spec(m1, m2, rho).unwrap())
    }

    #[test]
    fn psi_spot_values() {
        let m = mats();
        assert_abs_diff_eq!(psi(BoundaryKind::AC, &m, None, 0.35, 0.35).unwrap(), 0.139_285_714, epsilon = 1e-7);
        assert_abs_diff_eq!(psi(BoundaryKind::AB, &m, None, 0.35, 1.0).unwrap(), 0.103_546_3, epsilon = 1e-6);
        assert_abs_diff_eq!(psi(BoundaryKind::DE, &m, Some(0.17), 0.35, 0.8).unwrap(), 1.603_128_6, epsilon = 1e-6);
        assert_abs_diff_eq!(psi(BoundaryKind::AC, &m, None, 0.35, 1.0).unwrap(), 0.072_222_2, epsilon = 1e-6);
        assert_abs_diff_eq!(psi(BoundaryKind::AB, &m, None, 0.35, 0.8).unwrap(), 0.105_12, epsilon = 1e-5);
        assert_abs_diff_eq!(psi(BoundaryKind::BD, &m, None, 0.35, 0.8).unwrap(), 0.147_17, epsilon = 1e-5);
        assert_abs_diff_eq!(psi(BoundaryKind::AC, &m, None, 0.35, 0.2).unwrap(), 0.177_27, epsilon = 1e-5);
        assert_abs_diff_eq!(psi(BoundaryKind::CE, &m, None, 0.35, 0.2).unwrap(), 0.223_77, epsilon = 1e-5);
    }

    #[test]
    fn psi_domains() {
        let m = mats();
        assert!(matches!(psi(BoundaryKind::AB, &m, None, 0.35, -0.2), Err(Error::InvalidRange { .. })));
        assert!(matches!(psi(BoundaryKind::ApBp, &m, None, 0.35, 0.2), Err(Error::InvalidRange { .. })));
        assert!(matches!(psi(BoundaryKind::AB, &m, None, 0.35, 0.0), Err(Error::InvalidRange { .. })));
        assert!(matches!(psi(BoundaryKind::DE, &m, None, 0.35, 0.5), Err(Error::InvalidArgument(_))));
        assert!(matches!(psi(BoundaryKind::A1A2, &m, None, 0.35, 0.2), Err(Error::InvalidRange { .. })));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(region(0.05, 0.35, 1.0), Region::A1);
        assert_eq!(region(0.12, 0.35, 0.8), Region::B);
        assert_eq!(region(0.17, 0.35, 0.8), Region::D);
        assert_eq!(region(0.2, 0.35, 0.2), Region::C);
        assert_eq!(region(0.09, 0.35, 1.0), Region::A2);
        assert_eq!(region(0.05, 0.35, -1.0), Region::A1p);
        assert_eq!(region(0.5, 0.35, 0.05), Region::E);
        assert_eq!(region(0.05, 0.35, 0.0), Region::A1);
    }

    #[test]
    fn boundary_b_d_at_junction() {
        let m = mats();
        let bd = psi(BoundaryKind::BD, &m, None, 0.35, 0.35).unwrap();
        let ac = psi(BoundaryKind::AC, &m, None, 0.35, 0.35).unwrap();
        assert_abs_diff_eq!(bd, ac * 7.0 / 5.0, epsilon = 1e-14);
    }

    #[test]
    fn explicit_samples_lie_on_curve() {
        let m = mats();
        let pts = boundary_samples(BoundaryKind::AC, &m, 0.35, 3).unwrap();
        assert_eq!(pts.len(), 3);
        for (r, m1) in pts {
            assert_eq!(m1, psi(BoundaryKind::AC, &m, None, 0.35, r).unwrap());
        }
    }

    #[test]
    fn implicit_samples_are_roots() {
        let m = mats();
        for kind in [BoundaryKind::DE, BoundaryKind::DpE] {
            let pts = boundary_samples(kind, &m, 0.35, 41).unwrap();
            assert!(pts.len() > 5, "{kind}: {}", pts.len());
            for (r, m1) in pts {
                let v = psi(kind, &m, Some(m1), 0.35, r).unwrap();
                assert!(v.abs() <= 1e-12, "{kind} at rho={r}: residual {v}");
            }
        }
    }

    #[test]
    fn d_e_folds_back() {
        let m = mats();
        let roots = implicit_roots(BoundaryKind::DE, &m, 0.35, 0.32);
        assert_eq!(roots.len(), 2, "{roots:?}");
        // D pinches off between the branches
        let mid = 0.5 * (roots[0] + roots[1]);
        assert_eq!(region(mid, 0.35, 0.32), Region::D);
        assert_eq!(region(roots[0] - 1e-3, 0.35, 0.32), Region::E);
        assert_eq!(region(roots[1] + 1e-3, 0.35, 0.32), Region::E);
        assert!(implicit_roots(BoundaryKind::DE, &m, 0.35, 0.30).is_empty());
    }

    #[test]
    fn fig2_slice_has_all_labels() {
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..200 {
            for j in 0..200 {
                let rho = -1.0 + 2.0 * (i as f64 + 0.5) / 200.0;
                let m1 = 0.65 * (j as f64 + 0.5) / 200.0;
                seen.insert(region(m1, 0.35, rho));
            }
        }
        assert_eq!(seen.len(), 11, "{seen:?}");
    }

    #[test]
    fn labels_round_trip() {
        for r in Region::ALL {
            assert_eq!(r.label().parse::<Region>().unwrap(), r);
        }
        for k in BoundaryKind::ALL {
            assert_eq!(k.label().parse::<BoundaryKind>().unwrap(), k);
        }
    }

    proptest! {
        #[test]
        fn junctions_meet(m2 in 0.01..0.99f64) {
            let m = mats();
            let ab = psi(BoundaryKind::AB, &m, None, m2, m2).unwrap();
            let ac = psi(BoundaryKind::AC, &m, None, m2, m2).unwrap();
            prop_assert!((ab - ac).abs() <= 1e-12);
            let abp = psi(BoundaryKind::ApBp, &m, None, m2, -m2).unwrap();
            let acp = psi(BoundaryKind::ApCp, &m, None, m2, -m2).unwrap();
            prop_assert!((abp - acp).abs() <= 1e-12);
        }

        #[test]
        fn primes_label_only_negative_rho(m1 in 0.001..0.6f64, m2 in 0.05..0.39f64, rho in -1.0..1.0f64) {
            prop_assume!(m1 + m2 < 0.999);
            let r = region(m1, m2, rho);
            if rho >= 0.0 {
                prop_assert!(!r.is_primed());
            } else {
                prop_assert!(r.is_primed() || r == Region::E);
            }
        }

        #[test]
        fn perturbation_off_boundary_changes_side(m2 in 0.1..0.6f64, t in 0.02..0.98f64) {
            // crossing A-C inside the C strip flips A1 to C
            let m = mats();
            let rho = t * m2;
            let ac = psi(BoundaryKind::AC, &m, None, m2, rho).unwrap();
            let ce = psi(BoundaryKind::CE, &m, None, m2, rho).unwrap();
            prop_assume!(ce - ac > 1e-6 && ce < 1.0 - m2);
            let eps = 1e-9;
            prop_assert_eq!(region(ac - eps, m2, rho), Region::A1);
            prop_assert_eq!(region(ac + eps, m2, rho), Region::C);
            prop_assert_eq!(region(ac, m2, rho), Region::A1);
            let c = locate(&m, ac + 1e-3 * (ce - ac), m2, rho);
            prop_assert!(c.margin <= 1e-3 * (ce - ac) + 1e-15);
        }
    }
}
