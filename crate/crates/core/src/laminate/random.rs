use rand::Rng;

use super::{evaluate, LaminateNode};
use crate::error::Result;
use crate::tensor::{Axis, CompositeSpec, Materials, Phase, SymTensor2};

/// A statically admissible random laminate and the composite it realizes.
#[derive(Debug, Clone)]
pub struct RandomLaminate {
    pub tree: LaminateNode,
    pub spec: CompositeSpec,
    pub energy: f64,
}

/// Draws a random laminate of depth at most `max_depth` whose average stress is
/// `e1⊗e1 + ρ e2⊗e2` for a random ρ, with all three phases present.
///
/// Trees are grown from the root: each split keeps the normal traction of both children
/// equal to the parent's and distributes the tangential component freely, so every
/// interface is traction-continuous and shear-free. Void leaves appear only under a
/// unidirectional parent split across its traction-free direction.
pub fn random_laminate<R: Rng>(rng: &mut R, mats: &Materials, max_depth: usize) -> Result<RandomLaminate> {
    loop {
        let rho = rng.gen_range(-1.0..=1.0);
        let tree = grow(rng, 1.0, rho, max_depth.max(2));
        let report = evaluate(&tree, mats);
        let [f1, f2, f3] = report.fractions;
        if f1 < 1e-3 || f2 < 1e-3 || f3 < 1e-3 {
            continue;
        }
        let spec = mats.spec(f1, f2, rho)?;
        return Ok(RandomLaminate {
            tree,
            spec,
            energy: report.energy,
        });
    }
}

fn grow<R: Rng>(rng: &mut R, t11: f64, t22: f64, depth: usize) -> LaminateNode {
    if t11 == 0.0 && t22 == 0.0 {
        return LaminateNode::void();
    }
    if depth == 0 || rng.gen_bool(0.15) {
        let phase = if rng.gen_bool(0.5) { Phase::One } else { Phase::Two };
        return LaminateNode::Leaf {
            phase,
            stress: SymTensor2::from_cartesian(t11, t22, 0.0),
        };
    }
    // a unidirectional stress prefers the normal across which it carries no traction
    let normal = if t11 == 0.0 && rng.gen_bool(0.8) {
        Axis::E1
    } else if t22 == 0.0 && rng.gen_bool(0.8) {
        Axis::E2
    } else if rng.gen_bool(0.5) {
        Axis::E1
    } else {
        Axis::E2
    };
    let (tn, tt) = match normal {
        Axis::E1 => (t11, t22),
        Axis::E2 => (t22, t11),
    };
    let beta: f64 = rng.gen_range(0.1..0.9);
    let (at, bt) = if tn == 0.0 && rng.gen_bool(0.7) {
        (tt / beta, 0.0)
    } else if rng.gen_bool(0.3) {
        (0.0, tt / (1.0 - beta))
    } else {
        let at = tt * rng.gen_range(-1.0..3.0) + rng.gen_range(-0.5..0.5);
        (at, (tt - beta * at) / (1.0 - beta))
    };
    let child = |rng: &mut R, t: f64| match normal {
        Axis::E1 => grow(rng, tn, t, depth - 1),
        Axis::E2 => grow(rng, t, tn, depth - 1),
    };
    let a = child(rng, at);
    let b = child(rng, bt);
    LaminateNode::layer_unchecked(normal, beta, a, b)
}
