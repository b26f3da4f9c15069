//! Numerical translation bound: for fixed α minimize the relaxed phase energies over
//! phase-average stresses, then maximize `Φ(ρ, α) − 2ρα` over α.
//!
//! The linear average constraints are eliminated, leaving `x = (S1, D11, D12)`; phase 2
//! follows from `m1 τ1 + m2 τ2 = τ0`. The two cone constraints `±(S_i² − |D_i|²) ≥ 0` are
//! handled by an augmented Lagrangian with a shifted Newton inner loop, restarted from
//! several points because the feasible set is not convex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bound::PhaseAverages;
use crate::par::{self, Execution};
use crate::tensor::{CompositeSpec, Material};

/// Convexification regime of one phase's translated integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegimeTag {
    /// `α ∈ (−K, L)`.
    Convex,
    /// `α ≥ L`; the deviatoric part is absorbed by `s² ≥ |d|²`.
    SphericalDominated,
    /// `α ≤ −K`; the spherical part is absorbed by `s² ≤ |d|²`.
    DeviatoricDominated,
    /// Integrand unbounded below under the loading's sign constraint.
    Unbounded,
}

/// Regime of `mat` at translation `alpha` under loading anisotropy `rho`.
///
/// `ρ = 0` follows the `ρ ≥ 0` branch. The endpoints `α = L` and `α = −K` stay bounded for
/// either sign since one quadratic term simply vanishes there.
pub fn regime_of(mat: &Material, alpha: f64, rho: f64) -> RegimeTag {
    let (k, l) = (mat.k(), mat.l());
    if alpha > -k && alpha < l {
        RegimeTag::Convex
    } else if alpha >= l {
        if rho >= 0.0 || alpha == l {
            RegimeTag::SphericalDominated
        } else {
            RegimeTag::Unbounded
        }
    } else if rho < 0.0 || alpha == -k {
        RegimeTag::DeviatoricDominated
    } else {
        RegimeTag::Unbounded
    }
}

/// `(a, b)` in `Φ_i = a S_i² + b |D_i|²`, already weighted by the phase fraction.
fn coefficients(mat: &Material, m: f64, alpha: f64, rho: f64) -> Option<(f64, f64)> {
    let (k, l) = (mat.k(), mat.l());
    match regime_of(mat, alpha, rho) {
        RegimeTag::Convex => Some((m * (k + alpha), m * (l - alpha))),
        RegimeTag::SphericalDominated => Some((m * (k + l), 0.0)),
        RegimeTag::DeviatoricDominated => Some((0.0, m * (k + l))),
        RegimeTag::Unbounded => None,
    }
}

/// Value of the inner problem, or the marker for an inadmissible translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnerValue {
    Finite { phi: f64, averages: PhaseAverages },
    Unbounded,
}

impl InnerValue {
    /// `Φ`, with `−∞` for the unbounded marker.
    pub fn phi(&self) -> f64 {
        match self {
            InnerValue::Finite { phi, .. } => *phi,
            InnerValue::Unbounded => f64::NEG_INFINITY,
        }
    }

    pub fn averages(&self) -> Option<&PhaseAverages> {
        match self {
            InnerValue::Finite { averages, .. } => Some(averages),
            InnerValue::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    #[serde(rename = "U")]
    pub u: f64,
    pub alpha_star: f64,
    pub averages: PhaseAverages,
    /// `(α, Φ − 2ρα)` for every finite evaluation, grid first, then refinement.
    pub trace: Vec<(f64, f64)>,
}

/// Grid size of the outer scan before the breakpoints are merged in.
pub const GRID_POINTS: usize = 401;
/// Golden-section termination width in α.
pub const ALPHA_TOL: f64 = 1e-8;

const RANDOM_STARTS: usize = 4;
const SEED: u64 = 0x7a11_0c0d_e5ee_d001;

/// Minimizes `Φ1 + Φ2` at fixed α over the relaxed averages.
pub fn phi_inner(spec: &CompositeSpec, alpha: f64) -> InnerValue {
    match Inner::new(spec, alpha) {
        Some(p) => p.finish(p.solve()),
        None => InnerValue::Unbounded,
    }
}

/// Single-start local solve from the phase-1 averages `(S1, D11, D12)`.
pub fn phi_inner_from(spec: &CompositeSpec, alpha: f64, start: [f64; 3]) -> InnerValue {
    match Inner::new(spec, alpha) {
        Some(p) => p.finish(p.solve_from(start)),
        None => InnerValue::Unbounded,
    }
}

/// `Φ(ρ, α) − 2ρα`, `−∞` where the translation is inadmissible.
pub fn dual_value(spec: &CompositeSpec, alpha: f64) -> f64 {
    let phi = phi_inner(spec, alpha).phi();
    if phi == f64::NEG_INFINITY {
        phi
    } else {
        phi - 2.0 * spec.rho() * alpha
    }
}

/// The scan grid over `[−K2, L2]` including `−K1`, `0` and `L1`.
pub fn alpha_grid(spec: &CompositeSpec) -> Vec<f64> {
    let (lo, hi) = (-spec.mat2.k(), spec.mat2.l());
    let mut grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    grid[GRID_POINTS - 1] = hi;
    grid.extend([-spec.mat1.k(), 0.0, spec.mat1.l()]);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

pub fn translation_max(spec: &CompositeSpec) -> OracleResult {
    translation_max_with(spec, Execution::default())
}

/// Coarse scan of the concave dual followed by golden-section refinement of the best bracket.
pub fn translation_max_with(spec: &CompositeSpec, exec: Execution) -> OracleResult {
    let grid = alpha_grid(spec);
    let values = par::map(exec, &grid, |&a| dual_value(spec, a));
    let mut trace: Vec<(f64, f64)> = grid
        .iter()
        .zip(&values)
        .filter(|(_, v)| v.is_finite())
        .map(|(&a, &v)| (a, v))
        .collect();

    let (imax, _) = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("alpha = 0 is always admissible");
    let mut best = (grid[imax], values[imax]);

    let lo = grid[imax.saturating_sub(1)];
    let hi = grid[(imax + 1).min(grid.len() - 1)];
    golden_max(|a| dual_value(spec, a), lo, hi, ALPHA_TOL, &mut trace, &mut best);

    let averages = *phi_inner(spec, best.0)
        .averages()
        .expect("the maximizer is admissible");
    OracleResult {
        u: best.1,
        alpha_star: best.0,
        averages,
        trace,
    }
}

fn golden_max(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
    trace: &mut Vec<(f64, f64)>,
    best: &mut (f64, f64),
) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            trace.push((x, v));
            if v > best.1 {
                *best = (x, v);
            }
        }
        v
    };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
}

/// The reduced problem in `x = (S1, D11, D12)` for fixed α.
struct Inner {
    a1: f64,
    b1: f64,
    a2: f64,
    b2: f64,
    m1: f64,
    m2: f64,
    s0: f64,
    d0: f64,
    sign: f64,
}

impl Inner {
    fn new(spec: &CompositeSpec, alpha: f64) -> Option<Inner> {
        let rho = spec.rho();
        let (a1, b1) = coefficients(&spec.mat1, spec.m1, alpha, rho)?;
        let (a2, b2) = coefficients(&spec.mat2, spec.m2, alpha, rho)?;
        Some(Inner {
            a1,
            b1,
            a2,
            b2,
            m1: spec.m1,
            m2: spec.m2,
            s0: spec.loading.s0(),
            d0: spec.loading.d0(),
            sign: if rho >= 0.0 { 1.0 } else { -1.0 },
        })
    }

    fn finish(&self, x: [f64; 3]) -> InnerValue {
        let y = self.phase2(&x);
        InnerValue::Finite {
            phi: self.objective(&x),
            averages: PhaseAverages {
                s1: x[0],
                d11: x[1],
                d12: x[2],
                s2: y[0],
                d21: y[1],
                d22: y[2],
            },
        }
    }

    fn phase2(&self, x: &[f64; 3]) -> [f64; 3] {
        [
            (self.s0 - self.m1 * x[0]) / self.m2,
            (self.d0 - self.m1 * x[1]) / self.m2,
            -self.m1 * x[2] / self.m2,
        ]
    }

    fn ratio(&self) -> f64 {
        self.m1 / self.m2
    }

    fn objective(&self, x: &[f64; 3]) -> f64 {
        let y = self.phase2(x);
        self.a1 * x[0] * x[0]
            + self.b1 * (x[1] * x[1] + x[2] * x[2])
            + self.a2 * y[0] * y[0]
            + self.b2 * (y[1] * y[1] + y[2] * y[2])
    }

    /// Gradient and (diagonal) Hessian of the objective; it is separable in `x`.
    fn objective_derivatives(&self, x: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
        let y = self.phase2(x);
        let r = self.ratio();
        let coef = [(self.a1, self.a2), (self.b1, self.b2), (self.b1, self.b2)];
        let mut g = [0.0; 3];
        let mut h = [0.0; 3];
        for j in 0..3 {
            let (p, q) = coef[j];
            g[j] = 2.0 * p * x[j] - 2.0 * q * r * y[j];
            h[j] = 2.0 * p + 2.0 * q * r * r;
        }
        (g, h)
    }

    /// Cone constraints `c_i(x) ≥ 0` with gradients and diagonal Hessians.
    fn constraints(&self, x: &[f64; 3]) -> [(f64, [f64; 3], [f64; 3]); 2] {
        let y = self.phase2(x);
        let r = self.ratio();
        let s = self.sign;
        let c1 = s * (x[0] * x[0] - x[1] * x[1] - x[2] * x[2]);
        let g1 = [2.0 * s * x[0], -2.0 * s * x[1], -2.0 * s * x[2]];
        let h1 = [2.0 * s, -2.0 * s, -2.0 * s];
        let c2 = s * (y[0] * y[0] - y[1] * y[1] - y[2] * y[2]);
        let g2 = [-2.0 * s * r * y[0], 2.0 * s * r * y[1], 2.0 * s * r * y[2]];
        let h2 = [2.0 * s * r * r, -2.0 * s * r * r, -2.0 * s * r * r];
        [(c1, g1, h1), (c2, g2, h2)]
    }

    fn violation(&self, x: &[f64; 3]) -> f64 {
        self.constraints(x).iter().map(|c| (-c.0).max(0.0)).fold(0.0, f64::max)
    }

    fn scale(&self) -> f64 {
        (self.s0.abs() + self.d0.abs()) / self.m1.min(self.m2)
    }

    /// Stationary point ignoring the cones, with flat directions pinned at zero.
    fn unconstrained(&self) -> [f64; 3] {
        let r = self.ratio();
        let solve = |p: f64, q: f64, target: f64| {
            let den = p + q * r * r;
            if den > 0.0 {
                q * r * target / self.m2 / den
            } else {
                0.0
            }
        };
        [solve(self.a1, self.a2, self.s0), solve(self.b1, self.b2, self.d0), 0.0]
    }

    fn strictly_convex(&self) -> bool {
        self.a1 + self.a2 > 0.0 && self.b1 + self.b2 > 0.0
    }

    fn solve(&self) -> [f64; 3] {
        let u = self.unconstrained();
        if self.strictly_convex() && self.violation(&u) == 0.0 {
            return u;
        }

        let scale = self.scale();
        let mut starts = vec![
            u,
            [-u[0], u[1], u[2]],
            [self.s0, self.d0, 0.0],
            [u[0], -u[1], u[2]],
        ];
        // points on each cone face; the apex traps the multiplier update when a flat
        // direction pulls a phase there
        let t = 0.5 * (self.s0.abs() + self.d0.abs());
        for face in [1.0, -1.0] {
            let d = face * self.sign * t;
            starts.push([t, d, 0.0]);
            starts.push([(self.s0 - self.m2 * t) / self.m1, (self.d0 - self.m2 * d) / self.m1, 0.0]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..RANDOM_STARTS {
            starts.push([
                rng.gen_range(-scale..scale),
                rng.gen_range(-scale..scale),
                rng.gen_range(-scale..scale),
            ]);
        }

        let feasible_tol = 1e-10 * (1.0 + scale * scale);
        let mut best: Option<([f64; 3], f64)> = None;
        let mut fallback = ([self.s0, self.d0, 0.0], f64::INFINITY);
        for s in starts {
            let x = self.solve_from(s);
            let viol = self.violation(&x);
            if viol <= feasible_tol {
                let f = self.objective(&x);
                if best.map_or(true, |(_, bf)| f < bf) {
                    best = Some((x, f));
                }
            } else if viol < fallback.1 {
                fallback = (x, viol);
            }
        }
        best.map_or(fallback.0, |b| b.0)
    }

    /// Augmented Lagrangian from one start.
    fn solve_from(&self, start: [f64; 3]) -> [f64; 3] {
        let mut x = start;
        let mut lambda = [0.0f64; 2];
        let mut mu = 10.0 / (1.0 + self.scale());
        let mut prev_viol = f64::INFINITY;
        for _it in 0..100 {
            x = self.newton(x, lambda, mu);
            let cons = self.constraints(&x);
            let mut change: f64 = 0.0;
            for i in 0..2 {
                let next = (lambda[i] - mu * cons[i].0).max(0.0);
                change = change.max((next - lambda[i]).abs());
                lambda[i] = next;
            }
            let viol = self.violation(&x);
            if viol <= 1e-14 * (1.0 + self.scale().powi(2)) && change <= 1e-12 * (1.0 + lambda[0] + lambda[1]) {
                break;
            }
            if viol > 0.25 * prev_viol && mu < 1e10 {
                mu *= 10.0;
            }
            prev_viol = viol;
        }
        x
    }

    fn lagrangian(&self, x: &[f64; 3], lambda: [f64; 2], mu: f64) -> f64 {
        let cons = self.constraints(x);
        let mut v = self.objective(x);
        for i in 0..2 {
            let t = (lambda[i] - mu * cons[i].0).max(0.0);
            v += (t * t - lambda[i] * lambda[i]) / (2.0 * mu);
        }
        v
    }

    fn newton(&self, mut x: [f64; 3], lambda: [f64; 2], mu: f64) -> [f64; 3] {
        let tol = 1e-12 * (1.0 + self.scale());
        for _ in 0..200 {
            let (gf, hf) = self.objective_derivatives(&x);
            let mut g = gf;
            let mut h = [[0.0; 3]; 3];
            for j in 0..3 {
                h[j][j] = hf[j];
            }
            for (i, (c, dc, hc)) in self.constraints(&x).into_iter().enumerate() {
                let t = lambda[i] - mu * c;
                if t > 0.0 {
                    for j in 0..3 {
                        g[j] -= t * dc[j];
                        h[j][j] -= t * hc[j];
                        for k in 0..3 {
                            h[j][k] += mu * dc[j] * dc[k];
                        }
                    }
                }
            }
            if g.iter().all(|v| v.abs() <= tol) {
                // a flat gradient can still sit on a saddle, e.g. a phase parked at its apex
                match self.escape(x, h, lambda, mu) {
                    Some(y) => {
                        x = y;
                        continue;
                    }
                    None => break,
                }
            }
            let step = shifted_solve(h, g);
            let f0 = self.lagrangian(&x, lambda, mu);
            let slope: f64 = -(0..3).map(|j| g[j] * step[j]).sum::<f64>();
            if -slope <= 1e-15 * (1.0 + f0.abs()) {
                // predicted decrease below the rounding floor
                match self.escape(x, h, lambda, mu) {
                    Some(y) => {
                        x = y;
                        continue;
                    }
                    None => break,
                }
            }
            let mut t = 1.0;
            let mut moved = false;
            for _ in 0..60 {
                let trial = [x[0] - t * step[0], x[1] - t * step[1], x[2] - t * step[2]];
                if self.lagrangian(&trial, lambda, mu) <= f0 + 1e-4 * t * slope {
                    moved = trial != x;
                    x = trial;
                    break;
                }
                t *= 0.5;
            }
            if !moved {
                match self.escape(x, h, lambda, mu) {
                    Some(y) => x = y,
                    None => break,
                }
            }
        }
        x
    }

    /// Step along the most negative curvature direction of `h`, if there is one that lowers
    /// the augmented Lagrangian.
    fn escape(&self, x: [f64; 3], h: [[f64; 3]; 3], lambda: [f64; 2], mu: f64) -> Option<[f64; 3]> {
        if cholesky3(&h).is_some() {
            return None;
        }
        let (vals, vecs) = sym_eigen3(h);
        let (j, &lam) = vals.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
        let size = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        if lam >= -1e-10 * size {
            return None;
        }
        let v = [vecs[0][j], vecs[1][j], vecs[2][j]];
        let f0 = self.lagrangian(&x, lambda, mu);
        let mut t = self.scale();
        for _ in 0..60 {
            for sgn in [1.0, -1.0] {
                let trial = [x[0] + sgn * t * v[0], x[1] + sgn * t * v[1], x[2] + sgn * t * v[2]];
                if self.lagrangian(&trial, lambda, mu) < f0 + 0.25 * lam * t * t {
                    return Some(trial);
                }
            }
            t *= 0.5;
        }
        None
    }
}

/// Eigenvalues and column eigenvectors of a symmetric 3×3 matrix by cyclic Jacobi sweeps.
fn sym_eigen3(mut a: [[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let norm = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for _ in 0..50 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off <= 1e-15 * norm {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Solves `(H + τI) p = g`, growing τ until the Cholesky factorization succeeds.
fn shifted_solve(h: [[f64; 3]; 3], g: [f64; 3]) -> [f64; 3] {
    let diag = (0..3).map(|j| h[j][j].abs()).fold(0.0, f64::max).max(1.0);
    let mut tau = 0.0;
    loop {
        let mut a = h;
        for (j, row) in a.iter_mut().enumerate() {
            row[j] += tau;
        }
        if let Some(l) = cholesky3(&a) {
            return cholesky_solve(&l, g);
        }
        tau = if tau == 0.0 { 1e-12 * diag } else { tau * 10.0 };
    }
}

fn cholesky3(a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 1e-14 * a[i][i].abs() || s <= 0.0 {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    let mut y = [0.0; 3];
    for i in 0..3 {
        let s: f64 = b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>();
        y[i] = s / l[i][i];
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = y[i] - (i + 1..3).map(|k| l[k][i] * x[k]).sum::<f64>();
        x[i] = s / l[i][i];
    }
    x
}
