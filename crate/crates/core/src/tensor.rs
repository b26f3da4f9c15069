//! Plane symmetric tensors in the orthonormal basis
//! `E1 = (e1⊗e1 + e2⊗e2)/√2`, `E2 = (e1⊗e1 − e2⊗e2)/√2`, `E3 = (e1⊗e2 + e2⊗e1)/√2`,
//! isotropic compliances and the composite description shared by every module.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A plane symmetric tensor stored by its spherical part `s` and deviatoric parts `d1`, `d2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymTensor2 {
    pub s: f64,
    pub d1: f64,
    pub d2: f64,
}

impl SymTensor2 {
    pub const ZERO: SymTensor2 = SymTensor2 { s: 0.0, d1: 0.0, d2: 0.0 };

    pub const fn new(s: f64, d1: f64, d2: f64) -> Self {
        Self { s, d1, d2 }
    }

    /// Builds the tensor from Cartesian components `(σ11, σ22, σ12)`.
    pub fn from_cartesian(s11: f64, s22: f64, s12: f64) -> Self {
        Self {
            s: (s11 + s22) / SQRT_2,
            d1: (s11 - s22) / SQRT_2,
            d2: SQRT_2 * s12,
        }
    }

    /// Cartesian components `(σ11, σ22, σ12)`.
    pub fn to_cartesian(&self) -> (f64, f64, f64) {
        (
            (self.s + self.d1) / SQRT_2,
            (self.s - self.d1) / SQRT_2,
            self.d2 / SQRT_2,
        )
    }

    pub fn to_cartesian_array(&self) -> [f64; 3] {
        let (a, b, c) = self.to_cartesian();
        [a, b, c]
    }

    /// `σ11σ22 − σ12²`, i.e. `(s² − d1² − d2²)/2`.
    pub fn det(&self) -> f64 {
        0.5 * (self.s * self.s - self.dev_norm_sq())
    }

    pub fn dev_norm_sq(&self) -> f64 {
        self.d1 * self.d1 + self.d2 * self.d2
    }

    /// Normal component `τ:(n⊗n)` for a coordinate axis.
    pub fn normal_component(&self, axis: Axis) -> f64 {
        let (s11, s22, _) = self.to_cartesian();
        match axis {
            Axis::E1 => s11,
            Axis::E2 => s22,
        }
    }

    /// Shear component `τ:sym(n⊗t)`; identical for both coordinate axes.
    pub fn shear_component(&self) -> f64 {
        self.d2 / SQRT_2
    }

    pub fn is_finite(&self) -> bool {
        self.s.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    pub fn max_abs_diff(&self, other: &SymTensor2) -> f64 {
        (self.s - other.s)
            .abs()
            .max((self.d1 - other.d1).abs())
            .max((self.d2 - other.d2).abs())
    }
}

impl Add for SymTensor2 {
    type Output = SymTensor2;
    fn add(self, rhs: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self.s + rhs.s, self.d1 + rhs.d1, self.d2 + rhs.d2)
    }
}

impl Sub for SymTensor2 {
    type Output = SymTensor2;
    fn sub(self, rhs: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self.s - rhs.s, self.d1 - rhs.d1, self.d2 - rhs.d2)
    }
}

impl Neg for SymTensor2 {
    type Output = SymTensor2;
    fn neg(self) -> SymTensor2 {
        SymTensor2::new(-self.s, -self.d1, -self.d2)
    }
}

impl Mul<SymTensor2> for f64 {
    type Output = SymTensor2;
    fn mul(self, rhs: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self * rhs.s, self * rhs.d1, self * rhs.d2)
    }
}

/// Coordinate axis used as a lamination normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "e1")]
    E1,
    #[serde(rename = "e2")]
    E2,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::E1 => Axis::E2,
            Axis::E2 => Axis::E1,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::E1 => "e1",
            Axis::E2 => "e2",
        })
    }
}

/// Isotropic compliance pair: `k = 1/κ` (bulk) and `l = 1/μ` (shear).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    k: f64,
    l: f64,
}

impl Material {
    pub fn new(k: f64, l: f64) -> Result<Self> {
        if !(k.is_finite() && l.is_finite()) || k <= 0.0 || l <= 0.0 {
            return Err(Error::InvalidMaterial(format!(
                "compliances must be positive and finite, got K = {k}, L = {l}"
            )));
        }
        Ok(Self { k, l })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    /// Quadrupled stress energy density `K s² + L (d1² + d2²)`.
    pub fn energy_density(&self, t: &SymTensor2) -> f64 {
        self.k * t.s * t.s + self.l * t.dev_norm_sq()
    }

    /// Translated integrand `(K + α) s² + (L − α)(d1² + d2²)`.
    pub fn translated_density(&self, t: &SymTensor2, alpha: f64) -> f64 {
        (self.k + alpha) * t.s * t.s + (self.l - alpha) * t.dev_norm_sq()
    }
}

/// Phase identifiers; the void is a marker and never carries a `Material`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    One,
    Two,
    Void,
}

impl Phase {
    pub fn id(self) -> u8 {
        match self {
            Phase::One => 1,
            Phase::Two => 2,
            Phase::Void => 3,
        }
    }

    pub fn from_id(id: u8) -> Option<Phase> {
        match id {
            1 => Some(Phase::One),
            2 => Some(Phase::Two),
            3 => Some(Phase::Void),
            _ => None,
        }
    }

    pub(crate) fn index(self) -> usize {
        self.id() as usize - 1
    }
}

/// Normalized average stress `τ0 = e1⊗e1 + ρ e2⊗e2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loading {
    rho: f64,
    tau0: SymTensor2,
}

impl Loading {
    pub fn new(rho: f64) -> Result<Self> {
        if !rho.is_finite() || rho.abs() > 1.0 {
            return Err(Error::RhoOutOfRange(rho));
        }
        Ok(Self {
            rho,
            tau0: SymTensor2::new((1.0 + rho) / SQRT_2, (1.0 - rho) / SQRT_2, 0.0),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn tau0(&self) -> SymTensor2 {
        self.tau0
    }

    /// Spherical component `S0 = (1 + ρ)/√2`.
    pub fn s0(&self) -> f64 {
        self.tau0.s
    }

    /// Deviatoric component `D0 = (1 − ρ)/√2`.
    pub fn d0(&self) -> f64 {
        self.tau0.d1
    }
}

/// Two well-ordered materials, their volume fractions and the applied loading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeSpec {
    pub mat1: Material,
    pub mat2: Material,
    pub m1: f64,
    pub m2: f64,
    pub loading: Loading,
}

impl CompositeSpec {
    pub fn new(mat1: Material, mat2: Material, m1: f64, m2: f64, rho: f64) -> Result<Self> {
        check_materials(&mat1, &mat2)?;
        check_fractions(m1, m2)?;
        Ok(Self {
            mat1,
            mat2,
            m1,
            m2,
            loading: Loading::new(rho)?,
        })
    }

    /// Convenience constructor from raw compliances `(K1, L1, K2, L2)`.
    pub fn from_compliances(c: [f64; 4], m1: f64, m2: f64, rho: f64) -> Result<Self> {
        Self::new(Material::new(c[0], c[1])?, Material::new(c[2], c[3])?, m1, m2, rho)
    }

    pub fn rho(&self) -> f64 {
        self.loading.rho()
    }

    /// Void fraction.
    pub fn m3(&self) -> f64 {
        1.0 - self.m1 - self.m2
    }

    pub fn materials(&self) -> Materials {
        Materials {
            mat1: self.mat1,
            mat2: self.mat2,
        }
    }

    /// Same materials and fractions under a different anisotropy level.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Ok(Self {
            loading: Loading::new(rho)?,
            ..*self
        })
    }

    pub fn with_fractions(&self, m1: f64, m2: f64) -> Result<Self> {
        check_fractions(m1, m2)?;
        Ok(Self { m1, m2, ..*self })
    }

    pub fn material(&self, phase: Phase) -> Option<&Material> {
        match phase {
            Phase::One => Some(&self.mat1),
            Phase::Two => Some(&self.mat2),
            Phase::Void => None,
        }
    }
}

/// The pair of non-degenerate materials, without fractions or loading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Materials {
    pub mat1: Material,
    pub mat2: Material,
}

impl Materials {
    pub fn new(mat1: Material, mat2: Material) -> Result<Self> {
        check_materials(&mat1, &mat2)?;
        Ok(Self { mat1, mat2 })
    }

    pub fn from_compliances(c: [f64; 4]) -> Result<Self> {
        Self::new(Material::new(c[0], c[1])?, Material::new(c[2], c[3])?)
    }

    pub fn spec(&self, m1: f64, m2: f64, rho: f64) -> Result<CompositeSpec> {
        CompositeSpec::new(self.mat1, self.mat2, m1, m2, rho)
    }

    pub fn k1(&self) -> f64 {
        self.mat1.k
    }
    pub fn l1(&self) -> f64 {
        self.mat1.l
    }
    pub fn k2(&self) -> f64 {
        self.mat2.k
    }
    pub fn l2(&self) -> f64 {
        self.mat2.l
    }
}

fn check_materials(mat1: &Material, mat2: &Material) -> Result<()> {
    if mat1.k < mat2.k && mat1.l < mat2.l {
        Ok(())
    } else {
        Err(Error::NotWellOrdered)
    }
}

fn check_fractions(m1: f64, m2: f64) -> Result<()> {
    for (name, value) in [("m1", m1), ("m2", m2)] {
        if !value.is_finite() || value <= 0.0 || value >= 1.0 {
            return Err(Error::DegenerateFraction { name, value });
        }
    }
    if m1 + m2 >= 1.0 {
        return Err(Error::FractionsExceedOne(m1 + m2));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn mat(k: f64, l: f64) -> Material {
        Material::new(k, l).unwrap()
    }

    #[test]
    fn cartesian_identities() {
        let (a, b, c) = SymTensor2::new(SQRT_2, 0.0, 0.0).to_cartesian();
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-15);
        assert_eq!(c, 0.0);
        let (a, b, _) = SymTensor2::new(0.0, SQRT_2, 0.0).to_cartesian();
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, -1.0, epsilon = 1e-15);
        let (a, b, c) = Loading::new(0.2).unwrap().tau0().to_cartesian();
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.2, epsilon = 1e-15);
        assert_eq!(c, 0.0);
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(SymTensor2::ZERO.det(), 0.0);
        assert_abs_diff_eq!(Loading::new(0.2).unwrap().tau0().det(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(SymTensor2::from_cartesian(3.25, 0.0, 0.0).det(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn energy_examples() {
        let m = mat(1.0, 2.0);
        assert_eq!(m.energy_density(&SymTensor2::ZERO), 0.0);
        assert_abs_diff_eq!(m.energy_density(&SymTensor2::new(1.0, 1.0, 0.0)), 3.0);
        assert_abs_diff_eq!(m.translated_density(&SymTensor2::new(1.0, 0.0, 0.0), 2.0), 3.0);

        // spherical phase-2 field of the region-B laminate at m1=0.12, m2=0.35, rho=0.8
        let c = 0.28f64.sqrt() / 0.35;
        let t = SymTensor2::from_cartesian(c, c, 0.0);
        let s = SQRT_2 * c;
        assert_abs_diff_eq!(t.s, 2.138_090, epsilon = 1e-6);
        assert_abs_diff_eq!(mat(3.0, 4.0).energy_density(&t), 3.0 * s * s, epsilon = 1e-12);
    }

    #[test]
    fn spec_validation() {
        let (a, b) = (mat(1.0, 2.0), mat(3.0, 4.0));
        assert!(CompositeSpec::new(a, b, 0.2, 0.35, 0.2).is_ok());
        assert_eq!(CompositeSpec::new(b, a, 0.2, 0.35, 0.2), Err(Error::NotWellOrdered));
        assert!(matches!(
            CompositeSpec::new(a, b, 0.9, 0.2, 0.0),
            Err(Error::FractionsExceedOne(_))
        ));
        assert!(matches!(
            CompositeSpec::new(a, b, 0.0, 0.2, 0.0),
            Err(Error::DegenerateFraction { name: "m1", .. })
        ));
        assert!(matches!(
            CompositeSpec::new(a, b, 0.3, 0.7, 0.0),
            Err(Error::FractionsExceedOne(_))
        ));
        assert!(matches!(CompositeSpec::new(a, b, 0.2, 0.2, 1.5), Err(Error::RhoOutOfRange(_))));
        assert!(Material::new(0.0, 1.0).is_err());
        assert!(Material::new(1.0, f64::INFINITY).is_err());
    }

    fn tensor() -> impl Strategy<Value = SymTensor2> {
        (-50.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64).prop_map(|(s, a, b)| SymTensor2::new(s, a, b))
    }

    proptest! {
        #[test]
        fn translation_identity(t in tensor(), alpha in -20.0..20.0f64, k in 0.1..10.0f64, l in 0.1..10.0f64) {
            let m = mat(k, l);
            let lhs = m.energy_density(&t);
            let rhs = m.translated_density(&t, alpha) - 2.0 * alpha * t.det();
            let scale = m.translated_density(&t, alpha).abs() + alpha.abs() * (t.s * t.s + t.dev_norm_sq()) + 1.0;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn det_is_quadratic(t in tensor(), lambda in -10.0..10.0f64) {
            let lhs = (lambda * t).det();
            let rhs = lambda * lambda * t.det();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }

        #[test]
        fn det_matches_cartesian(t in tensor()) {
            let (a, b, c) = t.to_cartesian();
            prop_assert!((t.det() - (a * b - c * c)).abs() <= 1e-11 * t.s.abs().max(t.d1.abs()).max(t.d2.abs()).powi(2).max(1.0));
        }

        #[test]
        fn cartesian_round_trip(t in tensor()) {
            let (a, b, c) = t.to_cartesian();
            let back = SymTensor2::from_cartesian(a, b, c);
            let scale = t.s.abs().max(t.d1.abs()).max(t.d2.abs()).max(1.0);
            prop_assert!(back.max_abs_diff(&t) <= 1e-15 * scale * 4.0);
        }
    }
}
