use std::f64::consts::SQRT_2;

use serde::Serialize;

use super::{checked_beta, LaminateNode};
use crate::atlas::{classify, Family, Region};
use crate::bound::a_magnitudes;
use crate::error::{Error, Result};
use crate::tensor::{Axis, CompositeSpec, Phase};

const NAMES: [&str; 5] = ["beta1", "beta2", "beta3", "beta4", "beta5"];

/// An optimal laminate together with its named lamination parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalLaminate {
    pub region: Region,
    pub betas: Vec<(&'static str, f64)>,
    pub tree: LaminateNode,
}

impl OptimalLaminate {
    /// `beta(1)` is `β1`.
    pub fn beta(&self, i: usize) -> f64 {
        self.betas[i - 1].1
    }
}

/// The attaining structure for the region `spec` classifies into.
pub fn build(spec: &CompositeSpec) -> Result<OptimalLaminate> {
    build_in(spec, classify(spec))
}

/// The structure of `region`'s family at `spec`, whether or not `spec` lies in that region;
/// fails when a lamination parameter leaves `[0, 1]`.
pub fn build_in(spec: &CompositeSpec, region: Region) -> Result<OptimalLaminate> {
    if !region.is_attainable() {
        return Err(Error::RegionNotAttained(region));
    }
    let raw = betas(spec, region);
    let mut clamped = Vec::with_capacity(raw.len());
    for (i, &b) in raw.iter().enumerate() {
        clamped.push(checked_beta(NAMES[i], b)?);
    }
    Ok(assemble(spec, region, &clamped))
}

/// Same as [`build_in`] without the parameter range check.
pub(crate) fn construct(spec: &CompositeSpec, region: Region) -> OptimalLaminate {
    let raw = betas(spec, region);
    assemble(spec, region, &raw)
}

fn assemble(spec: &CompositeSpec, region: Region, b: &[f64]) -> OptimalLaminate {
    let tree = tree(spec, region, b);
    OptimalLaminate {
        region,
        betas: NAMES.iter().copied().zip(b.iter().copied()).collect(),
        tree,
    }
}

fn betas(spec: &CompositeSpec, region: Region) -> Vec<f64> {
    let (m1, m2) = (spec.m1, spec.m2);
    let a = spec.rho().abs();
    let g = (spec.mat1.k() + spec.mat1.l()) / (spec.mat2.k() + spec.mat2.l());
    match region.family() {
        Family::C => vec![m1 / (1.0 - m2), m2],
        Family::B | Family::Bp => {
            let q = (a * m2).sqrt();
            let w = 1.0 + a - 2.0 * q;
            vec![m1 * q / (m2 * w), m1 * a / w, q, 1.0 - (m2 / a).sqrt()]
        }
        Family::A | Family::Ap if matches!(region, Region::A1 | Region::A1p) => vec![
            m1 / (1.0 - m2),
            (m2 * (1.0 - m2) * g - m1 * (m2 + a)) / ((1.0 + a) * ((1.0 - m2) * g - m1)),
            a * (m1 + m2 * g) / ((1.0 + a - m2) * g - m1),
        ],
        Family::A | Family::Ap => {
            let (s1, s2) = a_magnitudes(spec);
            let x = g * (1.0 + a);
            let y = 2.0 * (m1 + m2 * g);
            let b5 = (m2 * x * x - a * y * y) / (x - y).powi(2);
            let b3 = x * ((m2 + a) * y - 2.0 * m2 * x) / ((x - y).powi(2) * (1.0 - b5));
            vec![s2 / (2.0 * s1), b3 * s2 / (2.0 * s1), b3, 1.0 - SQRT_2 / s2, b5]
        }
        Family::D | Family::Dp | Family::E => unreachable!("no structure for region {region}"),
    }
}

fn tree(spec: &CompositeSpec, region: Region, b: &[f64]) -> LaminateNode {
    use LaminateNode as N;
    let (m1, m2, rho) = (spec.m1, spec.m2, spec.rho());
    let sign = if region.is_primed() { -1.0 } else { 1.0 };
    let lay = N::layer_unchecked;
    let p1 = |s11, s22| N::leaf_cartesian(Phase::One, s11, s22);
    let p2 = |s11, s22| N::leaf_cartesian(Phase::Two, s11, s22);

    // phase 1 loaded along e1 and along e2, each laminated with void
    let l13 = |beta: f64, c: f64| lay(Axis::E2, beta, p1(c, 0.0), N::void());
    let l13_cross = |beta: f64, c: f64| lay(Axis::E1, beta, p1(0.0, sign * c), N::void());
    // L(13₁, 2, 13₂) with biaxial phase-2 field (p, ±p)
    let b_core = |b: &[f64], c: f64, p: f64| {
        let inner = lay(Axis::E1, b[2], p2(p, sign * p), l13(b[0], c));
        lay(Axis::E2, b[3], l13_cross(b[1], c), inner)
    };

    match region.family() {
        Family::C => lay(Axis::E1, b[1], p2(1.0, rho / m2), l13(b[0], (1.0 - m2) / m1)),
        Family::B | Family::Bp => {
            let q = (rho.abs() * m2).sqrt();
            b_core(b, (1.0 + rho.abs() - 2.0 * q) / m1, q / m2)
        }
        _ => {
            let (s1, s2) = a_magnitudes(spec);
            let coat = p2(1.0, sign * (SQRT_2 * s2 - 1.0));
            if matches!(region, Region::A1 | Region::A1p) {
                let l123 = lay(Axis::E2, b[1], p2(SQRT_2 * s2, 0.0), l13(b[0], SQRT_2 * s1));
                lay(Axis::E1, b[2], coat, l123)
            } else {
                lay(Axis::E1, b[4], coat, b_core(b, SQRT_2 * s1, s2 / SQRT_2))
            }
        }
    }
}
