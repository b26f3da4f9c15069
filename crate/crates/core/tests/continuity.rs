use proptest::prelude::*;
use threephase::{boundary_samples, classify, energy_in, BoundaryKind, Materials, Region};

fn mats() -> Materials {
    Materials::from_compliances([1.0, 2.0, 3.0, 4.0]).unwrap()
}

fn sides(kind: BoundaryKind) -> Option<(Region, Region)> {
    use Region::*;
    Some(match kind {
        BoundaryKind::AB => (A2, B),
        BoundaryKind::BD => (B, D),
        BoundaryKind::AC => (A1, C),
        BoundaryKind::A1A2 => (A1, A2),
        BoundaryKind::ApBp => (A2p, Bp),
        BoundaryKind::BpDp => (Bp, Dp),
        BoundaryKind::ApCp => (A1p, Cp),
        BoundaryKind::A1pA2p => (A1p, A2p),
        // E has no closed form
        _ => return None,
    })
}

fn agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_continuous_on_curved_boundaries(m2 in 0.05f64..0.7) {
        let m = mats();
        for kind in BoundaryKind::ALL {
            let Some((a, b)) = sides(kind) else { continue };
            for (rho, m1) in boundary_samples(kind, &m, m2, 25).unwrap() {
                if !(m1 > 0.0 && m1 < 1.0 - m2) {
                    continue;
                }
                let s = m.spec(m1, m2, rho).unwrap();
                let (ua, ub) = (energy_in(&s, a).unwrap(), energy_in(&s, b).unwrap());
                prop_assert!(agree(ua, ub), "{kind} at ({rho}, {m1}): {a} {ua} vs {b} {ub}");
            }
        }
    }

    #[test]
    fn energy_continuous_on_straight_boundaries(m2 in 0.05f64..0.7, t in 0.01f64..0.99) {
        let m = mats();
        let m1 = t * (1.0 - m2);
        for rho in [0.0, m2, -m2] {
            let left = classify(&m.spec(m1, m2, rho - 1e-12).unwrap());
            let right = classify(&m.spec(m1, m2, rho + 1e-12).unwrap());
            if left == right || left == Region::E || right == Region::E {
                continue;
            }
            let s = m.spec(m1, m2, rho).unwrap();
            let (ul, ur) = (energy_in(&s, left).unwrap(), energy_in(&s, right).unwrap());
            prop_assert!(agree(ul, ur), "rho {rho}, m1 {m1}: {left} {ul} vs {right} {ur}");
        }
    }
}
