//! Hierarchical laminates with piecewise-constant stresses, the optimal structures that
//! attain the bound, and the Sigmund–Gibiansky cell for region B.
//!
//! A `Layered` node mixes two homogenized sub-structures across axis-aligned interfaces;
//! `fraction` is the volume share of `a`. Stresses are Cartesian-free `(s, d1, d2)` inside
//! the crate and `[σ11, σ22, σ12]` in the JSON form.

mod morph;
mod optimal;
mod random;
mod sg;

pub use morph::{morph_check, MorphBoundary, MorphReport};
pub use optimal::{build, build_in, OptimalLaminate};
pub(crate) use optimal::construct;
pub use random::{random_laminate, RandomLaminate};
pub use sg::{build_sg, SgCell};

use serde::{Deserialize, Serialize};

use crate::bound::PhaseAverages;
use crate::error::{Error, Result};
use crate::tensor::{Axis, Materials, Phase, SymTensor2};

/// β values this close outside `[0, 1]` are treated as rounding and clamped.
pub const BETA_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NodeRepr", into = "NodeRepr")]
pub enum LaminateNode {
    Leaf {
        phase: Phase,
        stress: SymTensor2,
    },
    Layered {
        normal: Axis,
        fraction: f64,
        a: Box<LaminateNode>,
        b: Box<LaminateNode>,
    },
}

impl LaminateNode {
    /// A homogeneous phase; the void must carry zero stress.
    pub fn phase(phase: Phase, stress: SymTensor2) -> Result<Self> {
        if !stress.is_finite() {
            return Err(Error::InvalidLaminate("leaf stress is not finite".into()));
        }
        if phase == Phase::Void && stress != SymTensor2::ZERO {
            return Err(Error::InvalidLaminate("void leaf with nonzero stress".into()));
        }
        Ok(LaminateNode::Leaf { phase, stress })
    }

    pub fn void() -> Self {
        LaminateNode::Leaf {
            phase: Phase::Void,
            stress: SymTensor2::ZERO,
        }
    }

    pub(crate) fn leaf_cartesian(phase: Phase, s11: f64, s22: f64) -> Self {
        LaminateNode::Leaf {
            phase,
            stress: SymTensor2::from_cartesian(s11, s22, 0.0),
        }
    }

    /// Layers `a` (volume share `fraction`) and `b` across planes with the given normal.
    pub fn layer(normal: Axis, fraction: f64, a: LaminateNode, b: LaminateNode) -> Result<Self> {
        Ok(Self::layer_unchecked(normal, checked_beta("fraction", fraction)?, a, b))
    }

    pub(crate) fn layer_unchecked(normal: Axis, fraction: f64, a: LaminateNode, b: LaminateNode) -> Self {
        LaminateNode::Layered {
            normal,
            fraction,
            a: Box::new(a),
            b: Box::new(b),
        }
    }

    /// Number of nested laminations: 0 for a leaf.
    pub fn rank(&self) -> usize {
        match self {
            LaminateNode::Leaf { .. } => 0,
            LaminateNode::Layered { a, b, .. } => 1 + a.rank().max(b.rank()),
        }
    }

    pub fn average_stress(&self) -> SymTensor2 {
        match self {
            LaminateNode::Leaf { stress, .. } => *stress,
            LaminateNode::Layered { fraction, a, b, .. } => {
                *fraction * a.average_stress() + (1.0 - fraction) * b.average_stress()
            }
        }
    }

    /// Leaves with their absolute volume shares.
    pub fn leaves(&self) -> Vec<(Phase, SymTensor2, f64)> {
        let mut out = Vec::new();
        self.collect_leaves(1.0, &mut out);
        out
    }

    fn collect_leaves(&self, weight: f64, out: &mut Vec<(Phase, SymTensor2, f64)>) {
        match self {
            LaminateNode::Leaf { phase, stress } => out.push((*phase, *stress, weight)),
            LaminateNode::Layered { fraction, a, b, .. } => {
                a.collect_leaves(weight * fraction, out);
                b.collect_leaves(weight * (1.0 - fraction), out);
            }
        }
    }

    /// Every lamination parameter in depth-first order.
    pub fn fractions_in_order(&self) -> Vec<f64> {
        match self {
            LaminateNode::Leaf { .. } => Vec::new(),
            LaminateNode::Layered { fraction, a, b, .. } => {
                let mut v = vec![*fraction];
                v.extend(a.fractions_in_order());
                v.extend(b.fractions_in_order());
                v
            }
        }
    }
}

pub(crate) fn checked_beta(name: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() || value < -BETA_SLACK || value > 1.0 + BETA_SLACK {
        return Err(Error::BetaOutOfRange { name, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Traction jump across one lamination interface, from the sub-structure averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpResidual {
    pub normal: Axis,
    /// `|(τ_a − τ_b):(n⊗n)|`.
    pub normal_jump: f64,
    /// `|(τ_a − τ_b):sym(n⊗t)|`.
    pub shear_jump: f64,
}

impl JumpResidual {
    pub fn between(normal: Axis, ta: &SymTensor2, tb: &SymTensor2) -> Self {
        let d = *ta - *tb;
        JumpResidual {
            normal,
            normal_jump: d.normal_component(normal).abs(),
            shear_jump: d.shear_component().abs(),
        }
    }

    pub fn max(&self) -> f64 {
        self.normal_jump.max(self.shear_jump)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaminateReport {
    pub avg_stress: SymTensor2,
    /// Volume fractions of phase 1, phase 2 and void.
    pub fractions: [f64; 3],
    /// Fraction-weighted phase energy `Σ f·(K s² + L |d|²)`.
    pub energy: f64,
    pub det_avg: f64,
    pub jump_residuals: Vec<JumpResidual>,
    pub rank: usize,
}

impl LaminateReport {
    pub fn max_residual(&self) -> f64 {
        self.jump_residuals.iter().map(JumpResidual::max).fold(0.0, f64::max)
    }
}

fn leaf_energy(mats: &Materials, phase: Phase, t: &SymTensor2) -> f64 {
    match phase {
        Phase::One => mats.mat1.energy_density(t),
        Phase::Two => mats.mat2.energy_density(t),
        Phase::Void => 0.0,
    }
}

pub fn evaluate(node: &LaminateNode, mats: &Materials) -> LaminateReport {
    let mut fractions = [0.0; 3];
    let mut energy = 0.0;
    let mut det_avg = 0.0;
    for (phase, t, w) in node.leaves() {
        fractions[phase.index()] += w;
        energy += w * leaf_energy(mats, phase, &t);
        det_avg += w * t.det();
    }
    LaminateReport {
        avg_stress: node.average_stress(),
        fractions,
        energy,
        det_avg,
        jump_residuals: check_compatibility(node),
        rank: node.rank(),
    }
}

/// Traction residuals at every `Layered` node, parents before children.
pub fn check_compatibility(node: &LaminateNode) -> Vec<JumpResidual> {
    let mut out = Vec::new();
    collect_jumps(node, &mut out);
    out
}

fn collect_jumps(node: &LaminateNode, out: &mut Vec<JumpResidual>) {
    if let LaminateNode::Layered { normal, a, b, .. } = node {
        out.push(JumpResidual::between(*normal, &a.average_stress(), &b.average_stress()));
        collect_jumps(a, out);
        collect_jumps(b, out);
    }
}

/// Largest violation of the sign of `det τ` required by ρ over all leaves; `≤ 0` means the
/// determinant is univalent.
pub fn check_univalence(node: &LaminateNode, rho: f64) -> f64 {
    let sign = if rho >= 0.0 { 1.0 } else { -1.0 };
    node.leaves()
        .iter()
        .map(|(_, t, _)| -sign * t.det())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Fraction-weighted stress of each non-degenerate phase.
pub fn phase_averages(node: &LaminateNode) -> PhaseAverages {
    let mut sums = [SymTensor2::ZERO; 2];
    let mut weights = [0.0; 2];
    for (phase, t, w) in node.leaves() {
        if phase != Phase::Void {
            sums[phase.index()] = sums[phase.index()] + w * t;
            weights[phase.index()] += w;
        }
    }
    let mean = |i: usize| if weights[i] > 0.0 { (1.0 / weights[i]) * sums[i] } else { SymTensor2::ZERO };
    PhaseAverages::from_phases(mean(0), mean(1))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum NodeRepr {
    Layer {
        normal: Axis,
        fraction: f64,
        a: Box<NodeRepr>,
        b: Box<NodeRepr>,
    },
    Phase {
        id: u8,
        stress: [f64; 3],
    },
}

impl TryFrom<NodeRepr> for LaminateNode {
    type Error = Error;

    fn try_from(r: NodeRepr) -> Result<Self> {
        match r {
            NodeRepr::Phase { id, stress } => {
                let phase = Phase::from_id(id)
                    .ok_or_else(|| Error::InvalidLaminate(format!("phase id {id} not in 1..=3")))?;
                LaminateNode::phase(phase, SymTensor2::from_cartesian(stress[0], stress[1], stress[2]))
            }
            NodeRepr::Layer { normal, fraction, a, b } => {
                LaminateNode::layer(normal, fraction, LaminateNode::try_from(*a)?, LaminateNode::try_from(*b)?)
            }
        }
    }
}

impl From<LaminateNode> for NodeRepr {
    fn from(n: LaminateNode) -> Self {
        match n {
            LaminateNode::Leaf { phase, stress } => NodeRepr::Phase {
                id: phase.id(),
                stress: if phase == Phase::Void { [0.0; 3] } else { stress.to_cartesian_array() },
            },
            LaminateNode::Layered { normal, fraction, a, b } => NodeRepr::Layer {
                normal,
                fraction,
                a: Box::new((*a).into()),
                b: Box::new((*b).into()),
            },
        }
    }
}
