//! Singularities of the projection of the solution surface to `(t, x)`.
//!
//! The fold set `x_rho = 0` is the caustic; its cusp is the breakdown time
//! `t*`. Beyond `t*` the multivalued solution is replaced by a shock chosen
//! from the mass-conservation potential `H`.

mod phase_curve;
mod shock;

pub use phase_curve::{
    phase_front_crossings, phase_onsets, phase_transition_curve, OnsetSide, PhaseCrossing,
    PhaseCurvePoint, PhaseOnset,
};
pub use shock::{shock_front, shock_front_curve, ShockFront, ShockPoint, ShockSolver, SHOCK_TOL};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homentropic::ConstraintConstants;
use crate::numerics::{bisect, golden_section_min};
use crate::solution::SolutionManifold;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CausticSign {
    Plus,
    Minus,
}

impl CausticSign {
    pub fn factor(self) -> f64 {
        match self {
            CausticSign::Plus => 1.0,
            CausticSign::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CausticSign::Plus => "+",
            CausticSign::Minus => "-",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CausticPoint {
    pub rho: f64,
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausticBranch {
    pub sign: CausticSign,
    pub points: Vec<CausticPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Caustic {
    pub plus: CausticBranch,
    pub minus: CausticBranch,
    /// Density sub-intervals where the discriminant is negative.
    pub excluded: Vec<(f64, f64)>,
}

/// The cusp of the caustic: first time the surface folds over `(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cusp {
    pub t: f64,
    pub rho: f64,
    pub x: f64,
}

/// `D(rho) = C1 rho^3 + C5 (C3 + C7/rho)^C6`, i.e. `rho^3 A(rho)`.
pub fn discriminant(consts: &ConstraintConstants, rho: f64) -> Result<f64> {
    Ok(consts.c1 * rho.powi(3) + consts.c5 * consts.power_term(rho)?)
}

/// Caustic time for one sign:
/// `-alpha2 - C2 C3/alpha1 +- (C3 rho - 1)^2 sqrt(D) / (alpha1 rho^2)`.
pub fn caustic_time(consts: &ConstraintConstants, rho: f64, sign: CausticSign) -> Result<f64> {
    let d = discriminant(consts, rho)?;
    if d < 0.0 {
        return Err(Error::DensityDomain {
            density: rho,
            reason: "caustic discriminant is negative",
        });
    }
    let c = consts;
    let lead = -c.alpha2 - c.c2 * c.c3 / c.alpha1;
    Ok(lead + sign.factor() * (c.c3 * rho - 1.0).powi(2) / (c.alpha1 * rho * rho) * d.sqrt())
}

/// A caustic point; `x` is the surface position at the caustic time.
pub fn caustic_point(
    consts: &ConstraintConstants,
    rho: f64,
    sign: CausticSign,
) -> Result<CausticPoint> {
    let t = caustic_time(consts, rho, sign)?;
    let x = SolutionManifold { consts: *consts }.position(rho, t)?;
    Ok(CausticPoint { rho, t, x })
}

/// Both caustic branches over `rho_range`. Samples are uniform, plus a
/// geometric cluster on the admissible side of every `D = 0` boundary.
pub fn caustic(
    consts: &ConstraintConstants,
    rho_range: (f64, f64),
    samples: usize,
) -> Result<Caustic> {
    consts.validate()?;
    let (lo, hi) = rho_range;
    if samples < 2 || !(lo > 0.0 && lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "caustic needs samples >= 2 and 0 < lo < hi, got {samples}, ({lo}, {hi})"
        )));
    }
    let grid = crate::numerics::linspace(lo, hi, samples);
    let disc: Vec<f64> = grid
        .iter()
        .map(|&r| discriminant(consts, r).unwrap_or(f64::NAN))
        .collect();
    let admissible = |d: f64| d.is_finite() && d >= 0.0;
    let mut rhos: Vec<f64> = grid
        .iter()
        .zip(&disc)
        .filter(|(_, d)| admissible(**d))
        .map(|(r, _)| *r)
        .collect();

    let spacing = (hi - lo) / (samples - 1) as f64;
    let mut boundaries = Vec::new();
    for i in 1..grid.len() {
        let (a, b) = (grid[i - 1], grid[i]);
        if admissible(disc[i - 1]) != admissible(disc[i]) {
            let root = bisect(|r| discriminant(consts, r).unwrap_or(f64::NAN), a, b, 1e-15)
                .unwrap_or(if admissible(disc[i - 1]) { a } else { b });
            let inward = if admissible(disc[i - 1]) { -1.0 } else { 1.0 };
            // push the boundary onto the admissible side
            let mut edge = root;
            for _ in 0..60 {
                if discriminant(consts, edge).map(admissible).unwrap_or(false) {
                    break;
                }
                edge += inward * 1e-15 * edge.abs().max(1.0);
            }
            rhos.push(edge);
            for k in 1..=12 {
                rhos.push(edge + inward * spacing * 0.5f64.powi(k));
            }
            boundaries.push((root, inward));
        }
    }
    rhos.sort_by(f64::total_cmp);
    rhos.dedup();
    rhos.retain(|&r| {
        r >= lo && r <= hi && discriminant(consts, r).map(admissible).unwrap_or(false)
    });
    if rhos.is_empty() {
        return Err(Error::EmptyCaustic);
    }

    let branch = |sign: CausticSign| CausticBranch {
        sign,
        points: rhos
            .par_iter()
            .filter_map(|&r| caustic_point(consts, r, sign).ok())
            .collect(),
    };
    let plus = branch(CausticSign::Plus);
    let minus = branch(CausticSign::Minus);
    if plus.points.is_empty() && minus.points.is_empty() {
        return Err(Error::EmptyCaustic);
    }

    // excluded intervals from the boundary list
    let mut excluded = Vec::new();
    let mut start = if admissible(disc[0]) { None } else { Some(lo) };
    for (root, inward) in boundaries {
        if inward < 0.0 {
            start = Some(root);
        } else if let Some(s) = start.take() {
            excluded.push((s, root));
        }
    }
    if let Some(s) = start {
        excluded.push((s, hi));
    }
    Ok(Caustic {
        plus,
        minus,
        excluded,
    })
}

/// Closed-form breakdown time
/// `t* = (-C2 C3 - alpha1 alpha2 + (C3 - 3)^2 sqrt(C1/27 + C5 (C3 + 3 C7)^C6)) / alpha1`,
/// the caustic time at `rho = 1/3`.
pub fn breakdown_time(consts: &ConstraintConstants) -> Result<f64> {
    consts.validate()?;
    let c = consts;
    let base = c.c3 + 3.0 * c.c7;
    if !(base > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "C3 + 3 C7 = {base} must be positive"
        )));
    }
    let radicand = c.c1 / 27.0 + c.c5 * (c.c6 * base.ln()).exp();
    if radicand < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "breakdown radicand {radicand} is negative"
        )));
    }
    Ok((-c.c2 * c.c3 - c.alpha1 * c.alpha2 + (c.c3 - 3.0).powi(2) * radicand.sqrt()) / c.alpha1)
}

/// Density window searched for the caustic minimum.
pub fn search_window(consts: &ConstraintConstants) -> (f64, f64) {
    let hi = consts.density_limit().min(1e3);
    (1e-4, hi * (1.0 - 1e-9))
}

/// Cusp located by minimizing the `+` caustic time over the search window:
/// log-spaced scan followed by golden-section refinement.
pub fn cusp(consts: &ConstraintConstants) -> Result<Cusp> {
    consts.validate()?;
    if consts.alpha1 < 0.0 {
        return Err(Error::InvalidParameter(
            "cusp search assumes alpha1 > 0".into(),
        ));
    }
    let (lo, hi) = search_window(consts);
    let time = |r: f64| caustic_time(consts, r, CausticSign::Plus).unwrap_or(f64::INFINITY);
    let n = 4000;
    let (llo, lhi) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..=n)
        .map(|i| (llo + (lhi - llo) * i as f64 / n as f64).exp())
        .collect();
    let values: Vec<f64> = grid.iter().map(|&r| time(r)).collect();
    let (imin, vmin) =
        values.iter().enumerate().fold(
            (0, f64::INFINITY),
            |best, (i, &v)| if v < best.1 { (i, v) } else { best },
        );
    if !vmin.is_finite() || imin == 0 || imin == n {
        return Err(Error::InvalidParameter(
            "caustic time has no interior minimum".into(),
        ));
    }
    let (rho, t) = golden_section_min(time, grid[imin - 1], grid[imin + 1], 1e-13);
    let x = SolutionManifold { consts: *consts }.position(rho, t)?;
    Ok(Cusp { t, rho, x })
}

/// Breakdown time by numerical minimization; returns `(t*, argmin rho)`.
pub fn breakdown_time_numeric(consts: &ConstraintConstants) -> Result<(f64, f64)> {
    cusp(consts).map(|c| (c.t, c.rho))
}

/// Densities bounding the fold interval at time `t > t*`.
pub fn fold_interval(consts: &ConstraintConstants, cusp: &Cusp, t: f64) -> Result<(f64, f64)> {
    if t <= cusp.t {
        return Err(Error::NoShock {
            time: t,
            breakdown: cusp.t,
        });
    }
    let (lo, hi) = search_window(consts);
    let f = |r: f64| caustic_time(consts, r, CausticSign::Plus).unwrap_or(f64::INFINITY) - t;
    let left = bisect(f, lo, cusp.rho, 1e-15);
    let right = bisect(f, cusp.rho, hi, 1e-15);
    match (left, right) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::InvalidParameter(format!(
            "fold interval at t={t} leaves the density window"
        ))),
    }
}

/// Potential `H(rho, t)` of the mass-conservation form restricted to the
/// solution surface, `dH = rho dx - rho u dt`. Defined up to a constant.
pub fn mass_potential_h(consts: &ConstraintConstants, rho: f64, t: f64) -> Result<f64> {
    let c = consts;
    let s = c.c3 * rho - 1.0;
    if s.abs() < 1e-14 {
        return Err(Error::SingularDensity { density: rho });
    }
    if (c.c6 + 1.0).abs() < 1e-12 || (c.c6 + 2.0).abs() < 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "C6 = {} is excluded for H",
            c.c6
        )));
    }
    let wp = c.power_term(rho)?;
    let tau = t + c.alpha2;
    let (c1, c2, c3, c6, c7, a1) = (c.c1, c.c2, c.c3, c.c6, c.c7, c.alpha1);
    let poly = c1 * c3.powi(3) * rho.powi(3) - 4.0 * c1 * c3 * c3 * rho * rho
        + rho * (c2 * c2 * c3 * c3 + (2.0 * c2 * tau * a1 + 5.0 * c1) * c3 + a1 * a1 * tau * tau)
        - 2.0 * c1;
    let first = rho / (2.0 * a1 * s * s) * poly;
    let second = c.c5 * wp / ((c6 + 2.0) * a1 * c7 * c7 * (c6 + 1.0) * rho * rho)
        * (c3 * rho + c7)
        * (c3 * (1.0 + (c6 + 2.0) * c7) * rho - (c6 + 1.0) * c7);
    Ok(first - second)
}

/// Mass-conservation form pulled back to `(rho, t)`: coefficients of
/// `d rho` and `dt`, `(rho x_rho, rho x_t - rho u)`.
pub fn conservation_form(consts: &ConstraintConstants, rho: f64, t: f64) -> Result<(f64, f64)> {
    let jet = SolutionManifold { consts: *consts }.jet(rho, t)?;
    Ok((rho * jet.x_rho, rho * jet.x_t - rho * jet.u))
}
