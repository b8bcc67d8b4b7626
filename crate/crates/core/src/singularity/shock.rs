//! Shock front: the pair of densities `rho1 < rho2` on the outer sheets of
//! the fold with equal position and equal mass potential,
//! `x(rho1, t) = x(rho2, t)` and `H(rho1, t) = H(rho2, t)`.
//!
//! Near the cusp the two roots merge and Newton on `(rho1, rho2)` is
//! singular, so the solve runs in `(m, ln d)` with `rho1,2 = m -+ d` on the
//! divided differences
//!
//! ```text
//! R1 = (1 / 2d)      * int_{m-d}^{m+d} x_rho          d rho
//! R2 = (3 / 2d^3)    * int_{m-d}^{m+d} (rho - m) x_rho d rho
//! ```
//!
//! which stay regular as `d -> 0`. `R1` is the position jump over `2d`, and
//! `R2` is the potential jump minus `m` times the position jump, because
//! `H_rho = rho x_rho`.

use serde::Serialize;

use super::{cusp, fold_interval, mass_potential_h, Cusp};
use crate::error::{Error, Result};
use crate::homentropic::ConstraintConstants;
use crate::numerics::gauss_legendre;
use crate::solution::SolutionManifold;

/// Bound on `|H(rho1) - H(rho2)|` and `|x(rho1) - x(rho2)|` at a front point.
pub const SHOCK_TOL: f64 = 1e-10;
/// Smallest continuation step before giving up.
pub const MIN_TIME_STEP: f64 = 1e-6;

const PANELS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShockPoint {
    pub t: f64,
    pub x: f64,
    pub rho1: f64,
    pub rho2: f64,
    /// `max(|H(rho1) - H(rho2)|, |x(rho1) - x(rho2)|)`.
    pub residual: f64,
}

impl ShockPoint {
    pub fn jump(&self) -> f64 {
        self.rho2 - self.rho1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShockFront {
    pub cusp: Cusp,
    /// Starts at the cusp, then one point per sampled time.
    pub points: Vec<ShockPoint>,
    /// Distinct roots of the front system reached from a fold-based seed
    /// instead of by continuation.
    pub alternatives: Vec<ShockPoint>,
}

/// Reusable solver for one set of constants.
#[derive(Debug, Clone, Copy)]
pub struct ShockSolver {
    pub consts: ConstraintConstants,
    pub cusp: Cusp,
    manifold: SolutionManifold,
}

impl ShockSolver {
    pub fn new(consts: &ConstraintConstants) -> Result<Self> {
        let manifold = SolutionManifold::new(*consts)?;
        let cusp = cusp(consts)?;
        Ok(Self {
            consts: *consts,
            cusp,
            manifold,
        })
    }

    fn x_rho(&self, rho: f64, t: f64) -> f64 {
        self.manifold
            .jet(rho, t)
            .map(|j| j.x_rho)
            .unwrap_or(f64::NAN)
    }

    /// `int x_rho` and `int (rho - m) x_rho` over `[m - d, m + d]`, composite
    /// Gauss-Legendre in `ln rho`.
    fn moments(&self, m: f64, d: f64, t: f64) -> (f64, f64) {
        let (a, b) = ((m - d).ln(), (m + d).ln());
        let width = (b - a) / PANELS as f64;
        let rule = gauss_legendre();
        let (mut i0, mut i1) = (0.0, 0.0);
        for k in 0..PANELS {
            let mid = a + width * (k as f64 + 0.5);
            for &(node, weight) in rule {
                let rho = (mid + 0.5 * width * node).exp();
                let f = self.x_rho(rho, t) * rho * weight;
                i0 += f;
                i1 += f * (rho - m);
            }
        }
        (0.5 * width * i0, 0.5 * width * i1)
    }

    /// Regularized residual and its Jacobian in `(m, ln d)`.
    fn regularized(&self, m: f64, ln_d: f64, t: f64) -> Option<([f64; 2], [[f64; 2]; 2])> {
        let d = ln_d.exp();
        if !(m - d > 0.0) || !(m + d < self.consts.density_limit()) {
            return None;
        }
        let (i0, i1) = self.moments(m, d, t);
        let a = self.x_rho(m + d, t);
        let b = self.x_rho(m - d, t);
        let r = [i0 / (2.0 * d), 3.0 * i1 / (2.0 * d.powi(3))];
        let dr1_dm = (a - b) / (2.0 * d);
        let dr1_dd = (a + b) / (2.0 * d) - i0 / (2.0 * d * d);
        let dr2_dm = 3.0 * (d * (a + b) - i0) / (2.0 * d.powi(3));
        let dr2_dd = 3.0 * (a - b) / (2.0 * d * d) - 9.0 * i1 / (2.0 * d.powi(4));
        let jac = [[dr1_dm, d * dr1_dd], [dr2_dm, d * dr2_dd]];
        let ok = r.iter().chain(jac.iter().flatten()).all(|v| v.is_finite());
        ok.then_some((r, jac))
    }

    fn newton_regularized(&self, t: f64, guess: (f64, f64)) -> Option<(f64, f64)> {
        let (mut m, mut ln_d) = guess;
        let (mut r, mut jac) = self.regularized(m, ln_d, t)?;
        let mut norm = r[0].hypot(r[1]);
        for _ in 0..80 {
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det == 0.0 || !det.is_finite() {
                return None;
            }
            let dm = -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det;
            let dl = -(jac[0][0] * r[1] - jac[1][0] * r[0]) / det;
            let mut lambda = 1.0;
            let mut accepted = false;
            // cap the step in ln d to keep the iterate from jumping sheets
            let cap = (1.0 / dl.abs()).min(1.0);
            for _ in 0..40 {
                let (cm, cl) = (m + lambda * cap * dm, ln_d + lambda * cap * dl);
                if let Some((cr, cj)) = self.regularized(cm, cl, t) {
                    let cn = cr[0].hypot(cr[1]);
                    if cn < norm || cn == 0.0 {
                        m = cm;
                        ln_d = cl;
                        r = cr;
                        jac = cj;
                        norm = cn;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            let step = (lambda * cap * dm)
                .abs()
                .max((lambda * cap * dl).abs() * ln_d.exp());
            if !accepted || step < 1e-15 * m.abs().max(1.0) {
                break;
            }
        }
        Some((m, ln_d))
    }

    fn direct(&self, t: f64, r1: f64, r2: f64) -> Option<[f64; 2]> {
        let h = |r| mass_potential_h(&self.consts, r, t).ok();
        let x = |r| self.manifold.position(r, t).ok();
        Some([h(r2)? - h(r1)?, x(r2)? - x(r1)?])
    }

    fn direct_residual(&self, t: f64, r1: f64, r2: f64) -> f64 {
        self.direct(t, r1, r2)
            .map(|f| f[0].abs().max(f[1].abs()))
            .unwrap_or(f64::INFINITY)
    }

    /// Newton on `(rho1, rho2)` with the closed forms, only accepting
    /// improvements; finishes the regularized solve.
    fn polish(&self, t: f64, mut r1: f64, mut r2: f64) -> (f64, f64) {
        let mut best = self.direct_residual(t, r1, r2);
        for _ in 0..6 {
            if best <= 1e-14 {
                break;
            }
            let Some(f) = self.direct(t, r1, r2) else {
                break;
            };
            let (a, b) = (self.x_rho(r1, t), self.x_rho(r2, t));
            let jac = [[-r1 * a, r2 * b], [-a, b]];
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let d1 = -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det;
            let d2 = -(jac[0][0] * f[1] - jac[1][0] * f[0]) / det;
            let (c1, c2) = (r1 + d1, r2 + d2);
            let cand = self.direct_residual(t, c1, c2);
            if cand < best {
                r1 = c1;
                r2 = c2;
                best = cand;
            } else {
                break;
            }
        }
        (r1, r2)
    }

    /// Starting point from the fold interval: for a cusp, the equal-area
    /// pair sits `sqrt(3)` times wider than the fold.
    pub fn seed(&self, t: f64) -> Result<(f64, f64)> {
        let (lo, hi) = fold_interval(&self.consts, &self.cusp, t)?;
        let m = 0.5 * (lo + hi);
        let d = (3f64.sqrt() * 0.5 * (hi - lo)).min(0.999 * m);
        Ok((m, d.ln()))
    }

    /// Front point at time `t`, from `guess = (m, ln d)` or the fold seed.
    pub fn solve(&self, t: f64, guess: Option<(f64, f64)>) -> Result<ShockPoint> {
        if t < self.cusp.t {
            return Err(Error::NoShock {
                time: t,
                breakdown: self.cusp.t,
            });
        }
        if t - self.cusp.t <= 1e-12 * self.cusp.t.abs().max(1.0) {
            let c = self.cusp;
            return Ok(ShockPoint {
                t,
                x: c.x,
                rho1: c.rho,
                rho2: c.rho,
                residual: 0.0,
            });
        }
        let guess = match guess {
            Some(g) => g,
            None => self.seed(t)?,
        };
        let failure = |residual: f64| Error::ConvergenceFailure {
            what: format!("shock front at t={t}"),
            residual,
        };
        let (m, ln_d) = self
            .newton_regularized(t, guess)
            .ok_or_else(|| failure(f64::INFINITY))?;
        let d = ln_d.exp();
        let (r1, r2) = self.polish(t, m - d, m + d);
        let residual = self.direct_residual(t, r1, r2);
        let (lo, hi) = fold_interval(&self.consts, &self.cusp, t)?;
        if !(residual <= SHOCK_TOL && r1 < lo && r2 > hi) {
            return Err(failure(residual));
        }
        let x = self.manifold.position(r1, t)?;
        Ok(ShockPoint {
            t,
            x,
            rho1: r1,
            rho2: r2,
            residual,
        })
    }

    /// Continuation from `from` (with its `(m, ln d)`) to `target`, halving
    /// the step on failure down to `MIN_TIME_STEP`.
    pub fn continue_to(&self, from: &ShockPoint, target: f64) -> Result<ShockPoint> {
        let mut current = *from;
        let mut step = target - current.t;
        let mut last_err = None;
        while current.t < target {
            let t = (current.t + step).min(target);
            let guess = if current.rho1 < current.rho2 {
                Some(encode(&current))
            } else {
                None
            };
            let attempt = self.solve(t, guess).or_else(|_| self.solve(t, None));
            match attempt {
                Ok(p) => {
                    current = p;
                    step = (step * 2.0).min(target - current.t);
                }
                Err(e) => {
                    step *= 0.5;
                    if step < MIN_TIME_STEP {
                        return Err(last_err.unwrap_or(e));
                    }
                    last_err = Some(e);
                }
            }
        }
        Ok(current)
    }

    pub fn cusp_point(&self) -> ShockPoint {
        let c = self.cusp;
        ShockPoint {
            t: c.t,
            x: c.x,
            rho1: c.rho,
            rho2: c.rho,
            residual: 0.0,
        }
    }
}

fn encode(p: &ShockPoint) -> (f64, f64) {
    (0.5 * (p.rho1 + p.rho2), (0.5 * (p.rho2 - p.rho1)).ln())
}

/// Front point at one time `t > t*`.
pub fn shock_front(consts: &ConstraintConstants, t: f64) -> Result<ShockPoint> {
    ShockSolver::new(consts)?.solve(t, None)
}

/// Front from the cusp to `t_max`, `samples` evenly spaced times after the
/// cusp, each continued from the previous point.
pub fn shock_front_curve(
    consts: &ConstraintConstants,
    t_max: f64,
    samples: usize,
) -> Result<ShockFront> {
    let solver = ShockSolver::new(consts)?;
    let t0 = solver.cusp.t;
    if !(t_max > t0) {
        return Err(Error::NoShock {
            time: t_max,
            breakdown: t0,
        });
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    let mut points = vec![solver.cusp_point()];
    let mut alternatives = Vec::new();
    for k in 1..=samples {
        let t = t0 + (t_max - t0) * k as f64 / samples as f64;
        let prev = *points.last().expect("front starts at the cusp");
        let p = if prev.rho1 < prev.rho2 {
            solver.continue_to(&prev, t)?
        } else {
            solver
                .solve(t, None)
                .or_else(|_| solver.continue_to(&prev, t))?
        };
        if let Ok(alt) = solver.solve(t, None) {
            if (alt.rho1 - p.rho1).abs() > 1e-6 || (alt.rho2 - p.rho2).abs() > 1e-6 {
                alternatives.push(alt);
            }
        }
        points.push(p);
    }
    Ok(ShockFront {
        cusp: solver.cusp,
        points,
        alternatives,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::singularity::breakdown_time;

    fn reference() -> ConstraintConstants {
        ConstraintConstants::reference_vdw()
    }

    #[test]
    fn no_shock_before_breakdown() {
        let c = reference();
        assert!(matches!(shock_front(&c, 10.0), Err(Error::NoShock { .. })));
    }

    #[test]
    fn degenerate_at_breakdown() {
        let c = reference();
        let solver = ShockSolver::new(&c).unwrap();
        let p = solver.solve(solver.cusp.t, None).unwrap();
        assert_eq!(p.rho1, p.rho2);
        assert!((p.rho1 - 1.0 / 3.0).abs() < 1e-5);
    }

    #[test]
    fn front_point_brackets_cusp_density() {
        let c = reference();
        let t = breakdown_time(&c).unwrap() + 0.5;
        let p = shock_front(&c, t).unwrap();
        assert!(p.rho1 < 1.0 / 3.0 && 1.0 / 3.0 < p.rho2, "{p:?}");
        assert!(p.residual <= SHOCK_TOL);
    }

    #[test]
    fn curve_jump_grows() {
        let c = reference();
        let t0 = breakdown_time(&c).unwrap();
        let front = shock_front_curve(&c, t0 + 2.0, 40).unwrap();
        assert_eq!(front.points.len(), 41);
        for w in front.points.windows(2) {
            assert!(w[1].jump() > w[0].jump());
            assert!(w[1].residual <= SHOCK_TOL);
        }
    }
}
