use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{build_in, evaluate, OptimalLaminate};
use crate::atlas::{psi, BoundaryKind, Region};
use crate::error::{Error, Result};
use crate::tensor::{CompositeSpec, Materials};

/// Interfaces across which one optimal structure turns continuously into another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MorphBoundary {
    /// `ρ = m2`.
    BC,
    A1A2,
    A2B,
    A1C,
    /// `ρ = −m2`.
    BpCp,
    A1pA2p,
    A2pBp,
    A1pCp,
}

impl MorphBoundary {
    pub const ALL: [MorphBoundary; 8] = [
        MorphBoundary::BC,
        MorphBoundary::A1A2,
        MorphBoundary::A2B,
        MorphBoundary::A1C,
        MorphBoundary::BpCp,
        MorphBoundary::A1pA2p,
        MorphBoundary::A2pBp,
        MorphBoundary::A1pCp,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MorphBoundary::BC => "B-C",
            MorphBoundary::A1A2 => "A1-A2",
            MorphBoundary::A2B => "A2-B",
            MorphBoundary::A1C => "A1-C",
            MorphBoundary::BpCp => "B'-C'",
            MorphBoundary::A1pA2p => "A1'-A2'",
            MorphBoundary::A2pBp => "A2'-B'",
            MorphBoundary::A1pCp => "A1'-C'",
        }
    }

    fn primed(self) -> bool {
        matches!(
            self,
            MorphBoundary::BpCp | MorphBoundary::A1pA2p | MorphBoundary::A2pBp | MorphBoundary::A1pCp
        )
    }

    /// Regions on the low and high side of the crossing coordinate.
    fn sides(self) -> (Region, Region) {
        let (lo, hi) = match self {
            MorphBoundary::BC | MorphBoundary::BpCp => (Region::C, Region::B),
            MorphBoundary::A1A2 | MorphBoundary::A1pA2p => (Region::A1, Region::A2),
            MorphBoundary::A2B | MorphBoundary::A2pBp => (Region::A2, Region::B),
            MorphBoundary::A1C | MorphBoundary::A1pCp => (Region::A1, Region::C),
        };
        if self.primed() {
            (prime(lo), prime(hi))
        } else {
            (lo, hi)
        }
    }
}

fn prime(r: Region) -> Region {
    match r {
        Region::A1 => Region::A1p,
        Region::A2 => Region::A2p,
        Region::B => Region::Bp,
        Region::C => Region::Cp,
        other => other,
    }
}

impl fmt::Display for MorphBoundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MorphBoundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown morph boundary '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorphReport {
    pub boundary: MorphBoundary,
    pub points: usize,
    /// Largest gap between the one-sided limits of corresponding parameters.
    pub max_beta_jump: f64,
    /// Largest gap between the one-sided limits of the structure energy.
    pub max_energy_jump: f64,
    /// Parameters that vanish at the boundary, with their largest one-sided limit.
    pub degenerate: Vec<(String, f64)>,
}

/// Corresponding parameter pairs `(low side, high side)` and the vanishing ones.
type Pairing = (Vec<(f64, f64)>, Vec<(String, f64)>);

fn pairing(boundary: MorphBoundary, lo: &OptimalLaminate, hi: &OptimalLaminate) -> Pairing {
    let b = |l: &OptimalLaminate, i| l.beta(i);
    match boundary {
        MorphBoundary::BC | MorphBoundary::BpCp => (
            vec![(b(lo, 1), b(hi, 1)), (b(lo, 2), b(hi, 3))],
            vec![("B.beta4".into(), b(hi, 4))],
        ),
        MorphBoundary::A1C | MorphBoundary::A1pCp => (
            vec![(b(lo, 1), b(hi, 1)), (b(lo, 3), b(hi, 2))],
            vec![("A1.beta2".into(), b(lo, 2))],
        ),
        MorphBoundary::A1A2 | MorphBoundary::A1pA2p => (
            vec![(b(lo, 3), b(hi, 5)), (b(lo, 1), (1.0 - b(hi, 4)) * b(hi, 1))],
            vec![
                ("A1.beta2".into(), b(lo, 2)),
                ("A2.beta2".into(), b(hi, 2)),
                ("A2.beta3".into(), b(hi, 3)),
            ],
        ),
        MorphBoundary::A2B | MorphBoundary::A2pBp => (
            (1..=4).map(|i| (b(lo, i), b(hi, i))).collect(),
            vec![("A2.beta5".into(), b(lo, 5))],
        ),
    }
}

/// Point on the boundary at parameter `t ∈ (0, 1)` as `(ρ, m1)`, and whether the crossing
/// coordinate is ρ (otherwise m1).
fn boundary_point(boundary: MorphBoundary, mats: &Materials, m2: f64, t: f64) -> Result<(f64, f64, bool)> {
    let s = if boundary.primed() { -1.0 } else { 1.0 };
    let p = |kind, rho| psi(kind, mats, None, m2, rho);
    let (ac, ab, ce) = if boundary.primed() {
        (BoundaryKind::ApCp, BoundaryKind::ApBp, BoundaryKind::CpE)
    } else {
        (BoundaryKind::AC, BoundaryKind::AB, BoundaryKind::CE)
    };
    Ok(match boundary {
        MorphBoundary::BC | MorphBoundary::BpCp => {
            let rho = s * m2;
            let (lo, hi) = (p(ac, rho)?, p(ce, rho)?.min(1.0 - m2));
            (rho, lo + t * (hi - lo), true)
        }
        MorphBoundary::A1C | MorphBoundary::A1pCp => {
            let rho = s * t * m2;
            (rho, p(ac, rho)?, false)
        }
        MorphBoundary::A1A2 | MorphBoundary::A1pA2p => {
            let rho = s * (m2 + t * (1.0 - m2));
            (rho, p(ac, rho)?, false)
        }
        MorphBoundary::A2B | MorphBoundary::A2pBp => {
            let rho = s * (m2 + t * (1.0 - m2));
            (rho, p(ab, rho)?, false)
        }
    })
}

/// Compares the structures on both sides of a boundary at `count` interior points.
///
/// One-sided limits are extrapolated linearly from structures built at offsets `eps` and
/// `2·eps` inside each side, so the smooth variation across the offset does not count as a
/// jump.
pub fn morph_check(mats: &Materials, m2: f64, boundary: MorphBoundary, count: usize, eps: f64) -> Result<MorphReport> {
    if count == 0 || !(eps > 0.0) {
        return Err(Error::InvalidArgument("morph check needs count >= 1 and eps > 0".into()));
    }
    let (lo_region, hi_region) = boundary.sides();
    let mut max_beta_jump: f64 = 0.0;
    let mut max_energy_jump: f64 = 0.0;
    let mut degenerate: Vec<(String, f64)> = Vec::new();

    for k in 0..count {
        let t = (k as f64 + 1.0) / (count as f64 + 1.0);
        let (rho, m1, along_rho) = boundary_point(boundary, mats, m2, t)?;
        // the low-side region sits at smaller |ρ| or smaller m1
        let dir = if along_rho && boundary.primed() { -1.0 } else { 1.0 };
        let at = |offset: f64| -> Result<CompositeSpec> {
            if along_rho {
                mats.spec(m1, m2, rho + dir * offset)
            } else {
                mats.spec(m1 + offset, m2, rho)
            }
        };
        let side = |region, sign: f64| -> Result<(OptimalLaminate, OptimalLaminate, f64, f64)> {
            let (s1, s2) = (at(sign * eps)?, at(sign * 2.0 * eps)?);
            let (l1, l2) = (build_in(&s1, region)?, build_in(&s2, region)?);
            let e1 = evaluate(&l1.tree, mats).energy;
            let e2 = evaluate(&l2.tree, mats).energy;
            Ok((l1, l2, e1, e2))
        };
        let (lo1, lo2, elo1, elo2) = side(lo_region, -1.0)?;
        let (hi1, hi2, ehi1, ehi2) = side(hi_region, 1.0)?;

        let extrapolate = |v1: f64, v2: f64| 2.0 * v1 - v2;
        max_energy_jump = max_energy_jump.max((extrapolate(elo1, elo2) - extrapolate(ehi1, ehi2)).abs());

        let (pairs1, deg1) = pairing(boundary, &lo1, &hi1);
        let (pairs2, deg2) = pairing(boundary, &lo2, &hi2);
        for ((a1, b1), (a2, b2)) in pairs1.iter().zip(&pairs2) {
            max_beta_jump = max_beta_jump.max((extrapolate(*a1, *a2) - extrapolate(*b1, *b2)).abs());
        }
        for ((name, v1), (_, v2)) in deg1.into_iter().zip(deg2) {
            let limit = extrapolate(v1, v2).abs();
            match degenerate.iter_mut().find(|(n, _)| *n == name) {
                Some(entry) => entry.1 = entry.1.max(limit),
                None => degenerate.push((name, limit)),
            }
        }
    }

    Ok(MorphReport {
        boundary,
        points: count,
        max_beta_jump,
        max_energy_jump,
        degenerate,
    })
}
