//! Closed-form translation bound in every region with a published formula, the optimal
//! translation, optimal phase averages and the coupled bounds on effective compliances.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::atlas::{classify, Family, Region};
use crate::error::{Error, Result};
use crate::laminate;
use crate::oracle;
use crate::tensor::{CompositeSpec, Materials, SymTensor2};

/// Average spherical and deviatoric stresses in the two non-degenerate phases.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhaseAverages {
    #[serde(rename = "S1")]
    pub s1: f64,
    #[serde(rename = "D11")]
    pub d11: f64,
    #[serde(rename = "D12")]
    pub d12: f64,
    #[serde(rename = "S2")]
    pub s2: f64,
    #[serde(rename = "D21")]
    pub d21: f64,
    #[serde(rename = "D22")]
    pub d22: f64,
}

impl PhaseAverages {
    pub fn phase1(&self) -> SymTensor2 {
        SymTensor2::new(self.s1, self.d11, self.d12)
    }

    pub fn phase2(&self) -> SymTensor2 {
        SymTensor2::new(self.s2, self.d21, self.d22)
    }

    pub fn from_phases(t1: SymTensor2, t2: SymTensor2) -> Self {
        Self {
            s1: t1.s,
            d11: t1.d1,
            d12: t1.d2,
            s2: t2.s,
            d21: t2.d1,
            d22: t2.d2,
        }
    }

    /// Largest violation of `m1 τ1 + m2 τ2 = τ0`.
    pub fn average_residual(&self, spec: &CompositeSpec) -> f64 {
        let mixed = spec.m1 * self.phase1() + spec.m2 * self.phase2();
        mixed.max_abs_diff(&spec.loading.tau0())
    }

    /// Largest violation of the sign condition on `S_i² − |D_i|²` dictated by ρ.
    pub fn cone_violation(&self, rho: f64) -> f64 {
        let sign = if rho >= 0.0 { 1.0 } else { -1.0 };
        [self.phase1(), self.phase2()]
            .iter()
            .map(|t| (-sign * 2.0 * t.det()).max(0.0))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundResult {
    pub region: Region,
    #[serde(rename = "U_tr")]
    pub u_tr: f64,
    pub alpha_star: f64,
    #[serde(rename = "K_star")]
    pub k_star: Option<f64>,
    #[serde(rename = "L_star")]
    pub l_star: Option<f64>,
    pub averages: PhaseAverages,
    /// Set in region E, where the value is the numerical dual optimum and the attaining
    /// structure is unknown.
    pub conjectured: bool,
}

/// Uncoupled Hashin–Shtrikman compliance bounds for the two-material-plus-void mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HsBounds {
    #[serde(rename = "K_HS")]
    pub k_hs: f64,
    #[serde(rename = "L_HS")]
    pub l_hs: f64,
    pub alpha_k: f64,
    pub alpha_l: f64,
}

pub fn hs_bounds(mats: &Materials, m1: f64, m2: f64) -> HsBounds {
    let (k1, l1, k2, l2) = (mats.k1(), mats.l1(), mats.k2(), mats.l2());
    let alpha_k = l1;
    let alpha_l = 2.0 * k1 + l1;
    HsBounds {
        k_hs: harmonic(m1, k1 + alpha_k, m2, k2 + alpha_k) - alpha_k,
        l_hs: harmonic(m1, l1 + alpha_l, m2, l2 + alpha_l) - alpha_l,
        alpha_k,
        alpha_l,
    }
}

/// `(m1/a + m2/b)⁻¹`.
fn harmonic(m1: f64, a: f64, m2: f64, b: f64) -> f64 {
    1.0 / (m1 / a + m2 / b)
}

struct Params {
    k1: f64,
    l1: f64,
    k2: f64,
    l2: f64,
    m1: f64,
    m2: f64,
    rho: f64,
}

impl Params {
    fn of(spec: &CompositeSpec) -> Params {
        Params {
            k1: spec.mat1.k(),
            l1: spec.mat1.l(),
            k2: spec.mat2.k(),
            l2: spec.mat2.l(),
            m1: spec.m1,
            m2: spec.m2,
            rho: spec.rho(),
        }
    }

    fn c1(&self) -> f64 {
        self.k1 + self.l1
    }

    fn c2(&self) -> f64 {
        self.k2 + self.l2
    }

    /// `m1(K2+L2) + m2(K1+L1)`.
    fn den_a(&self) -> f64 {
        self.m1 * self.c2() + self.m2 * self.c1()
    }

    /// `√(|ρ| m2)`.
    fn q(&self) -> f64 {
        (self.rho.abs() * self.m2).sqrt()
    }
}

/// Spherical (A) or deviatoric (A') magnitudes `(|τ1|, |τ2|)` of the region-A averages.
pub(crate) fn a_magnitudes(spec: &CompositeSpec) -> (f64, f64) {
    let p = Params::of(spec);
    let lead = (1.0 + p.rho.abs()) / SQRT_2 / p.den_a();
    (lead * p.c2(), lead * p.c1())
}

/// Closed-form `U_tr` of a region's formula, evaluated at any admissible spec.
pub fn energy_in(spec: &CompositeSpec, region: Region) -> Result<f64> {
    let p = Params::of(spec);
    let (r, m1, m2) = (p.rho, p.m1, p.m2);
    let u = match region.family() {
        Family::A => (1.0 + r).powi(2) / 2.0 * p.c1() * p.c2() / p.den_a() - 2.0 * r * p.l2,
        Family::Ap => (1.0 - r).powi(2) / 2.0 * p.c1() * p.c2() / p.den_a() + 2.0 * r * p.k2,
        Family::B => (1.0 + r - 2.0 * p.q()).powi(2) / (2.0 * m1) * p.c1() + 2.0 * r * p.k2,
        Family::Bp => (1.0 - r - 2.0 * p.q()).powi(2) / (2.0 * m1) * p.c1() - 2.0 * r * p.l2,
        Family::C => {
            p.c2() * r * r / (2.0 * m2)
                + (p.k2 - p.l2) * r
                + (p.c1() * (1.0 - m2).powi(2) + p.c2() * m1 * m2) / (2.0 * m1)
        }
        Family::D => {
            let den = m1 * (p.k2 + p.l1) + m2 * p.c1();
            (1.0 + r).powi(2) / 2.0 * p.c1() * (p.k2 + p.l1) / den - 2.0 * r * p.l1
        }
        Family::Dp => {
            let den = m1 * (p.k1 + p.l2) + m2 * p.c1();
            (1.0 - r).powi(2) / 2.0 * p.c1() * (p.k1 + p.l2) / den + 2.0 * r * p.k1
        }
        Family::E => return Err(Error::RegionEUndefined),
    };
    Ok(u)
}

/// Optimal translation. Region E has no closed form and falls back to the oracle's argmax.
pub fn alpha_star(spec: &CompositeSpec, region: Region) -> f64 {
    let p = Params::of(spec);
    let (r, m1, m2) = (p.rho, p.m1, p.m2);
    match region.family() {
        Family::A => p.l2,
        Family::Ap => -p.k2,
        Family::D => p.l1,
        Family::Dp => -p.k1,
        Family::B => {
            let q = p.q();
            0.5 * q * (1.0 + r - 2.0 * q) / (r * m1) * p.c1() - p.k2
        }
        Family::Bp => {
            let q = p.q();
            0.5 * q * (1.0 - r - 2.0 * q) / (r * m1) * p.c1() + p.l2
        }
        Family::C => 0.5 * ((p.l2 - p.k2) + m2 / (r * m1) * ((1.0 - m2) * p.c1() - m1 * p.c2())),
        Family::E => oracle::translation_max(spec).alpha_star,
    }
}

/// Optimal phase-average stresses of a region.
///
/// In the A families the bound fixes only the spherical (A) or deviatoric (A') parts; the
/// remaining components are those of the attaining laminate. Region E uses the stationarity
/// conditions of the convex regime at the oracle's optimal translation.
pub fn phase_averages(spec: &CompositeSpec, region: Region) -> PhaseAverages {
    let p = Params::of(spec);
    let (r, m1, m2) = (p.rho, p.m1, p.m2);
    let mut avg = PhaseAverages::default();
    match region.family() {
        Family::A | Family::Ap => {
            let tree = laminate::construct(spec, region).tree;
            return laminate::phase_averages(&tree);
        }
        Family::B => {
            let q = p.q();
            avg.s1 = (1.0 + r - 2.0 * q) / (SQRT_2 * m1);
            avg.d11 = (1.0 - r) / (SQRT_2 * m1);
            avg.s2 = SQRT_2 * q / m2;
        }
        Family::Bp => {
            let q = p.q();
            avg.s1 = (1.0 + r) / (SQRT_2 * m1);
            avg.d11 = (1.0 - r - 2.0 * q) / (SQRT_2 * m1);
            avg.d21 = SQRT_2 * q / m2;
        }
        Family::C => {
            avg.s1 = (1.0 - m2) / (SQRT_2 * m1);
            avg.d11 = avg.s1;
            avg.s2 = (m2 + r) / (SQRT_2 * m2);
            avg.d21 = (m2 - r) / (SQRT_2 * m2);
        }
        Family::D => {
            let den = SQRT_2 * (m1 * (p.k2 + p.l1) + m2 * p.c1());
            avg.s1 = (p.k2 + p.l1) * (1.0 + r) / den;
            avg.d11 = (1.0 - r) / (SQRT_2 * m1);
            avg.s2 = p.c1() * (1.0 + r) / den;
        }
        Family::Dp => {
            let den = SQRT_2 * (m1 * (p.k1 + p.l2) + m2 * p.c1());
            avg.s1 = (1.0 + r) / (SQRT_2 * m1);
            avg.d11 = (p.k1 + p.l2) * (1.0 - r) / den;
            avg.d21 = p.c1() * (1.0 - r) / den;
        }
        Family::E => {
            let a = oracle::translation_max(spec).alpha_star;
            return convex_averages(spec, a);
        }
    }
    avg
}

/// Stationary averages when both phases are in the convex regime at translation `alpha`.
pub fn convex_averages(spec: &CompositeSpec, alpha: f64) -> PhaseAverages {
    let p = Params::of(spec);
    let (s0, d0) = (spec.loading.s0(), spec.loading.d0());
    let ks = p.m1 * (p.k2 + alpha) + p.m2 * (p.k1 + alpha);
    let ls = p.m1 * (p.l2 - alpha) + p.m2 * (p.l1 - alpha);
    PhaseAverages {
        s1: (p.k2 + alpha) * s0 / ks,
        d11: (p.l2 - alpha) * d0 / ls,
        d12: 0.0,
        s2: (p.k1 + alpha) * s0 / ks,
        d21: (p.l1 - alpha) * d0 / ls,
        d22: 0.0,
    }
}

/// Coupled bounds `(K*, L*)` with `U_tr = ½(K*(1+ρ)² + L*(1−ρ)²)`.
pub fn effective_moduli(spec: &CompositeSpec, region: Region) -> Result<(f64, f64)> {
    let p = Params::of(spec);
    let (r, m1, m2) = (p.rho, p.m1, p.m2);
    let inv = |a: f64, b: f64, shift: f64| harmonic(m1, a, m2, b) - shift;
    let kl = match region.family() {
        Family::A => (inv(p.c1(), p.c2(), p.l2), p.l2),
        Family::Ap => (p.k2, inv(p.c1(), p.c2(), p.k2)),
        Family::B => {
            let q = p.q();
            let k = p.k2 - ((1.0 + r) * q - 2.0 * r) * (1.0 + r - 2.0 * q) / (2.0 * m1 * r * (1.0 + r)) * p.c1();
            let l = q * (1.0 + r - 2.0 * q) / (2.0 * m1 * r) * p.c1() - p.k2;
            (k, l)
        }
        Family::Bp => {
            let q = p.q();
            let k = -q * (1.0 - r - 2.0 * q) / (2.0 * m1 * r) * p.c1() - p.l2;
            let l = p.l2 + ((1.0 - r) * q + 2.0 * r) * (1.0 - r - 2.0 * q) / (2.0 * m1 * r * (1.0 - r)) * p.c1();
            (k, l)
        }
        Family::C => {
            let k = 0.5
                * ((p.k2 - p.l2)
                    + (1.0 - m2).powi(2) / (m1 * (1.0 + r)) * p.c1()
                    + (m2 * m2 + r) / (m2 * (1.0 + r)) * p.c2());
            let l = 0.5
                * ((1.0 - m2).powi(2) / (m1 * (1.0 - r)) * p.c1() + (m2 * m2 - r) / (m2 * (1.0 - r)) * p.c2()
                    - (p.k2 - p.l2));
            (k, l)
        }
        Family::D => (inv(p.c1(), p.k2 + p.l1, p.l1), p.l1),
        Family::Dp => (p.k1, inv(p.c1(), p.k1 + p.l2, p.k1)),
        Family::E => return Err(Error::RegionEUndefined),
    };
    Ok(kl)
}

/// Smallest finite-difference step tried by [`effective_moduli_from_envelope`].
pub const MIN_ENVELOPE_STEP: f64 = 1e-9;

/// Recovers `(K*, L*)` from `U_tr` and a central difference of `dU_tr/dρ`.
///
/// The step is divided by 10 until both stencil points classify into the region's formula
/// family, down to [`MIN_ENVELOPE_STEP`].
pub fn effective_moduli_from_envelope(spec: &CompositeSpec, region: Region, step: f64) -> Result<(f64, f64)> {
    if region == Region::E {
        return Err(Error::RegionEUndefined);
    }
    let rho = spec.rho();
    if rho.abs() >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "envelope recovery divides by 1 - rho^2; rho = {rho}"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let family = region.family();
    let mut h = step;
    while h >= MIN_ENVELOPE_STEP * (1.0 - 1e-9) {
        if rho - h > -1.0 && rho + h < 1.0 {
            let lo = spec.with_rho(rho - h)?;
            let hi = spec.with_rho(rho + h)?;
            if classify(&lo).family() == family && classify(&hi).family() == family {
                let u = energy_in(spec, region)?;
                let du = (energy_in(&hi, region)? - energy_in(&lo, region)?) / (2.0 * h);
                let k = (2.0 * u + du * (1.0 - rho)) / (2.0 * (1.0 + rho));
                let l = (2.0 * u - du * (1.0 + rho)) / (2.0 * (1.0 - rho));
                return Ok((k, l));
            }
        }
        h /= 10.0;
    }
    Err(Error::BoundaryTooClose { rho, step: h * 10.0 })
}

/// The translation bound at a spec, in the region it classifies into.
pub fn bound(spec: &CompositeSpec) -> BoundResult {
    let region = classify(spec);
    if region == Region::E {
        let or = oracle::translation_max(spec);
        return BoundResult {
            region,
            u_tr: or.u,
            alpha_star: or.alpha_star,
            k_star: None,
            l_star: None,
            averages: convex_averages(spec, or.alpha_star),
            conjectured: true,
        };
    }
    let (k, l) = effective_moduli(spec, region).expect("closed-form region");
    BoundResult {
        region,
        u_tr: energy_in(spec, region).expect("closed-form region"),
        alpha_star: alpha_star(spec, region),
        k_star: Some(k),
        l_star: Some(l),
        averages: phase_averages(spec, region),
        conjectured: false,
    }
}

/// `½(K(1+ρ)² + L(1−ρ)²)`.
pub fn envelope_energy(k: f64, l: f64, rho: f64) -> f64 {
    0.5 * (k * (1.0 + rho).powi(2) + l * (1.0 - rho).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn spec(m1: f64, m2: f64, rho: f64) -> CompositeSpec {
        CompositeSpec::from_compliances([1.0, 2.0, 3.0, 4.0], m1, m2, rho).unwrap()
    }

    #[test]
    fn spot_values() {
        let a = bound(&spec(0.05, 0.35, 1.0));
        assert_eq!(a.region, Region::A1);
        assert_abs_diff_eq!(a.u_tr, 22.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.k_star.unwrap(), 11.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.l_star.unwrap(), 4.0, epsilon = 1e-12);

        let b = bound(&spec(0.12, 0.35, 0.8));
        assert_eq!(b.region, Region::B);
        assert_abs_diff_eq!(b.u_tr, 11.676_476_4, epsilon = 1e-7);
        assert!(b.alpha_star > 2.0 && b.alpha_star < 4.0);

        let c = bound(&spec(0.2, 0.35, 0.2));
        assert_eq!(c.region, Region::C);
        assert_abs_diff_eq!(c.u_tr, 4.59375, epsilon = 1e-12);

        let ap = bound(&spec(0.05, 0.35, -1.0));
        assert_eq!(ap.region, Region::A1p);
        assert_abs_diff_eq!(ap.u_tr, 24.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ap.k_star.unwrap(), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ap.l_star.unwrap(), 12.0, epsilon = 1e-12);

        let d = bound(&spec(0.17, 0.35, 0.8));
        assert_eq!(d.region, Region::D);
        assert_abs_diff_eq!(d.u_tr, 9.589_474, epsilon = 1e-6);
        assert_abs_diff_eq!(d.k_star.unwrap(), 5.894_737, epsilon = 1e-6);
        assert_eq!(d.l_star.unwrap(), 2.0);
    }

    #[test]
    fn hs_spot_values() {
        let hs = hs_bounds(&spec(0.17, 0.35, 0.0).materials(), 0.17, 0.35);
        assert_abs_diff_eq!(hs.k_hs, 5.894_737, epsilon = 1e-6);
        assert_abs_diff_eq!(hs.l_hs, 9.872_832_4, epsilon = 1e-7);
        assert_eq!(hs.alpha_l, 4.0);
    }

    #[test]
    fn averages_examples() {
        let c = phase_averages(&spec(0.2, 0.35, 0.2), Region::C);
        assert_abs_diff_eq!(c.s1, 2.298_097, epsilon = 1e-6);
        assert_eq!(c.s1, c.d11);
        assert_abs_diff_eq!(c.s2, 0.55 / (SQRT_2 * 0.35), epsilon = 1e-15);
        assert_abs_diff_eq!(c.d21, 0.15 / (SQRT_2 * 0.35), epsilon = 1e-15);

        let b = phase_averages(&spec(0.12, 0.35, 0.8), Region::B);
        assert_abs_diff_eq!(b.s2, 2.138_090, epsilon = 1e-6);
        assert_eq!((b.d21, b.d22), (0.0, 0.0));

        let a = phase_averages(&spec(0.05, 0.35, 1.0), Region::A1);
        assert_abs_diff_eq!(a.s1, 7.071_068, epsilon = 1e-6);
        assert_abs_diff_eq!(a.s2, 3.030_458, epsilon = 1e-6);
    }

    #[test]
    fn envelope_examples() {
        for (m1, rho, region) in [(0.05, 0.9, Region::A1), (0.2, 0.2, Region::C), (0.12, 0.8, Region::B)] {
            let s = spec(m1, 0.35, rho);
            let (k, l) = effective_moduli(&s, region).unwrap();
            let (kf, lf) = effective_moduli_from_envelope(&s, region, 1e-6).unwrap();
            assert_relative_eq!(k, kf, max_relative = 1e-6);
            assert_relative_eq!(l, lf, max_relative = 1e-6);
        }
        assert_eq!(
            effective_moduli_from_envelope(&spec(0.5, 0.35, 0.05), Region::E, 1e-6),
            Err(Error::RegionEUndefined)
        );
        assert!(effective_moduli_from_envelope(&spec(0.05, 0.35, 1.0), Region::A1, 1e-6).is_err());
    }

    #[test]
    fn envelope_refuses_straddling_stencil() {
        let m = spec(0.2, 0.35, 0.0).materials();
        // exactly on the C/B line the stencil always straddles
        let s = m.spec(0.2, 0.35, 0.35).unwrap();
        assert!(matches!(
            effective_moduli_from_envelope(&s, Region::C, 1e-6),
            Err(Error::BoundaryTooClose { .. })
        ));
    }

    #[test]
    fn region_e_is_flagged() {
        let r = bound(&spec(0.5, 0.35, 0.05));
        assert_eq!(r.region, Region::E);
        assert!(r.conjectured);
        assert!(r.k_star.is_none() && r.l_star.is_none());
        assert!(r.alpha_star > -1.0 && r.alpha_star < 2.0);
    }

    fn closed_spec() -> impl Strategy<Value = CompositeSpec> {
        (0.01..0.9f64, 0.01..0.9f64, -1.0..1.0f64)
            .prop_filter("void present", |(m1, m2, _)| m1 + m2 < 0.99)
            .prop_map(|(m1, m2, r)| spec(m1, m2, r))
            .prop_filter("closed form", |s| classify(s) != Region::E)
    }

    proptest! {
        #[test]
        fn envelope_identity(s in closed_spec()) {
            let r = classify(&s);
            let u = energy_in(&s, r).unwrap();
            let (k, l) = effective_moduli(&s, r).unwrap();
            prop_assert!(u >= 0.0);
            prop_assert!((envelope_energy(k, l, s.rho()) - u).abs() <= 1e-12 * u.max(1.0));
        }

        #[test]
        fn k_star_meets_hashin_shtrikman_in_d(s in closed_spec()) {
            let r = classify(&s);
            prop_assume!(r == Region::D);
            let (k, _) = effective_moduli(&s, r).unwrap();
            let hs = hs_bounds(&s.materials(), s.m1, s.m2);
            prop_assert!((k - hs.k_hs).abs() <= 1e-12 * hs.k_hs);
        }

        // small fractions in A push K* above K_HS, so only the sweep fractions are checked
        #[test]
        fn k_star_below_hashin_shtrikman(rho in -1.0..1.0f64) {
            let s = spec(0.17, 0.35, rho);
            let r = classify(&s);
            prop_assume!(r != Region::E);
            let (k, l) = effective_moduli(&s, r).unwrap();
            let hs = hs_bounds(&s.materials(), s.m1, s.m2);
            prop_assert!(k <= hs.k_hs * (1.0 + 1e-12));
            prop_assert!(l < hs.l_hs);
        }

        #[test]
        fn averages_respect_constraints(s in closed_spec()) {
            let r = classify(&s);
            let avg = phase_averages(&s, r);
            prop_assert_eq!(avg.d12, 0.0);
            prop_assert_eq!(avg.d22, 0.0);
            prop_assert!(avg.average_residual(&s) <= 1e-12 * (1.0 + avg.s1.abs() + avg.d11.abs()));
            prop_assert!(avg.cone_violation(s.rho()) <= 1e-12 * (1.0 + avg.s1 * avg.s1 + avg.d11 * avg.d11));
        }

        #[test]
        fn alpha_star_in_window(s in closed_spec()) {
            let r = classify(&s);
            let a = alpha_star(&s, r);
            let eps = 1e-12;
            match r.family() {
                Family::B | Family::C if s.rho() > 0.0 => prop_assert!(a >= 2.0 - eps && a <= 4.0 + eps, "{} {}", r, a),
                Family::Bp | Family::C => prop_assert!(a >= -3.0 - eps && a <= -1.0 + eps, "{} {}", r, a),
                _ => {}
            }
        }
    }
}
