use serde::Serialize;

use super::{JumpResidual, LaminateReport};
use crate::atlas::{classify, psi, BoundaryKind, Region};
use crate::bound::PhaseAverages;
use crate::error::{Error, Result};
use crate::tensor::{Axis, CompositeSpec, Materials, Phase, SymTensor2};

/// Four-rectangle periodic cell optimal in region B.
///
/// The unit cell holds phase 2 in `[0, β1) × [0, β2)`. To its right an L(13) strip with
/// normal `e2` and phase-1 share `β3` carries `σ11`; above it an L(13) strip with normal
/// `e1` and share `β4` carries `σ22`. The remaining corner is void.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SgCell {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
    /// Phase-1 stress in the `σ11`-carrying strip.
    pub tau11: SymTensor2,
    /// Phase-1 stress in the `σ22`-carrying strip.
    pub tau12: SymTensor2,
    /// Phase-2 stress.
    pub tau2: SymTensor2,
    pub rho: f64,
}

/// Builds the cell for a point in the closure of region B.
pub fn build_sg(spec: &CompositeSpec) -> Result<SgCell> {
    let (m1, m2, rho) = (spec.m1, spec.m2, spec.rho());
    let mats = spec.materials();
    let inside = rho >= m2
        && m1 >= psi(BoundaryKind::AB, &mats, None, m2, rho)?
        && m1 <= psi(BoundaryKind::BD, &mats, None, m2, rho)?;
    if !inside {
        return Err(Error::WrongRegion {
            expected: Region::B,
            actual: classify(spec),
        });
    }
    let q = (rho * m2).sqrt();
    let beta1 = q;
    let beta2 = (m2 / rho).sqrt();
    let beta3 = rho * m1 / ((1.0 + rho - 2.0 * q) * q);
    let beta4 = beta3;
    Ok(SgCell {
        beta1,
        beta2,
        beta3,
        beta4,
        tau11: SymTensor2::from_cartesian(1.0 / (beta2 * beta3), 0.0, 0.0),
        tau12: SymTensor2::from_cartesian(0.0, rho / (beta1 * beta4), 0.0),
        tau2: SymTensor2::from_cartesian(1.0 / beta2, rho / beta1, 0.0),
        rho,
    })
}

impl SgCell {
    /// Volume shares of the two phase-1 subdomains, phase 2 and void.
    fn shares(&self) -> (f64, f64, f64, f64) {
        let w11 = (1.0 - self.beta1) * self.beta2 * self.beta3;
        let w12 = self.beta1 * (1.0 - self.beta2) * self.beta4;
        let w2 = self.beta1 * self.beta2;
        (w11, w12, w2, 1.0 - w11 - w12 - w2)
    }

    /// Constant stress states with their phase and volume share; the void corner is omitted.
    pub fn states(&self) -> [(Phase, SymTensor2, f64); 3] {
        let (w11, w12, w2, _) = self.shares();
        [
            (Phase::One, self.tau11, w11),
            (Phase::One, self.tau12, w12),
            (Phase::Two, self.tau2, w2),
        ]
    }

    pub fn phase_averages(&self) -> PhaseAverages {
        let (w11, w12, _, _) = self.shares();
        let t1 = (1.0 / (w11 + w12)) * (w11 * self.tau11 + w12 * self.tau12);
        PhaseAverages::from_phases(t1, self.tau2)
    }

    /// Homogenized traction residuals across the internal interfaces: phase 2 against each
    /// strip, and each strip against the void corner.
    pub fn interface_residuals(&self) -> Vec<JumpResidual> {
        // strip averages, phase 1 in layers with void
        let strip_a = self.beta3 * self.tau11;
        let strip_b = self.beta4 * self.tau12;
        vec![
            JumpResidual::between(Axis::E1, &self.tau2, &strip_a),
            JumpResidual::between(Axis::E2, &self.tau2, &strip_b),
            JumpResidual::between(Axis::E2, &strip_a, &SymTensor2::ZERO),
            JumpResidual::between(Axis::E1, &strip_b, &SymTensor2::ZERO),
        ]
    }

    /// `1/(β2β3) − σ11(τ11)`, `ρ/(β1β4) − σ22(τ12)`, `1/β2 − ρ/β1`: all vanish for the
    /// optimal cell.
    pub fn flux_residuals(&self) -> [f64; 3] {
        let (a, _, _) = self.tau11.to_cartesian();
        let (_, b, _) = self.tau12.to_cartesian();
        [
            (1.0 / (self.beta2 * self.beta3) - a).abs(),
            (self.rho / (self.beta1 * self.beta4) - b).abs(),
            (1.0 / self.beta2 - self.rho / self.beta1).abs(),
        ]
    }

    pub fn report(&self, mats: &Materials) -> LaminateReport {
        let (w11, w12, w2, w3) = self.shares();
        let energy = w11 * mats.mat1.energy_density(&self.tau11)
            + w12 * mats.mat1.energy_density(&self.tau12)
            + w2 * mats.mat2.energy_density(&self.tau2);
        LaminateReport {
            avg_stress: w11 * self.tau11 + w12 * self.tau12 + w2 * self.tau2,
            fractions: [w11 + w12, w2, w3],
            energy,
            det_avg: w11 * self.tau11.det() + w12 * self.tau12.det() + w2 * self.tau2.det(),
            jump_residuals: self.interface_residuals(),
            rank: 2,
        }
    }
}
