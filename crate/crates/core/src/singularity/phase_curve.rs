//! Phase-transition curve carried into the `(t, x)` plane.
//!
//! Along the homentrope the temperature is a function of density, so the
//! onset of condensation is a fixed density `rho*` where `rho*` equals a
//! binodal density at `T(rho*)`. Its image is the curve `x = x(rho*, t)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shock::ShockSolver;
use super::{cusp, fold_interval, ShockFront};
use crate::error::{Error, Result};
use crate::homentropic::{constants_from_model, homentrope_t, ConstraintConstants};
use crate::numerics::{bisect, linspace};
use crate::phase::binodal_at_t;
use crate::solution::SolutionManifold;
use crate::thermo::ThermoModel;

/// Coldest temperature scanned for onsets; below it the gas density is
/// vanishingly small.
pub const TEMPERATURE_FLOOR: f64 = 0.25;
const SCAN_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OnsetSide {
    GasOnset,
    LiquidOnset,
}

impl OnsetSide {
    pub fn label(self) -> &'static str {
        match self {
            OnsetSide::GasOnset => "gas",
            OnsetSide::LiquidOnset => "liquid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseOnset {
    pub rho: f64,
    pub temperature: f64,
    pub side: OnsetSide,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseCurvePoint {
    pub t: f64,
    pub x: f64,
    pub rho: f64,
    /// Index of the x-monotone piece of the profile at `t`, counted in
    /// increasing density.
    pub branch_id: usize,
    pub side: OnsetSide,
}

/// A crossing of the phase-transition curve with the shock front.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseCrossing {
    pub t: f64,
    pub x: f64,
    pub rho_onset: f64,
    pub side: OnsetSide,
    /// `|x(rho*, t) - x_s(t)|` at the refined time.
    pub distance: f64,
}

fn onset_gap(model: &ThermoModel, s0: f64, rho: f64, side: OnsetSide) -> f64 {
    let Ok(t) = homentrope_t(model, s0, rho) else {
        return f64::NAN;
    };
    if !(TEMPERATURE_FLOOR..1.0).contains(&t) {
        return f64::NAN;
    }
    match binodal_at_t(model, t) {
        Ok(b) => match side {
            OnsetSide::GasOnset => rho - b.rho_gas,
            OnsetSide::LiquidOnset => rho - b.rho_liq,
        },
        Err(_) => f64::NAN,
    }
}

/// Densities in `rho_range` where the homentrope meets the binodal.
pub fn phase_onsets(
    model: &ThermoModel,
    s0: f64,
    rho_range: (f64, f64),
) -> Result<Vec<PhaseOnset>> {
    if !model.is_van_der_waals() {
        return Err(Error::NoPhaseTransition {
            temperature: f64::NAN,
            reason: "the ideal gas has no phase transitions",
        });
    }
    let (lo, hi) = rho_range;
    model.check_density(lo)?;
    model.check_density(hi)?;
    let grid = linspace(lo, hi, SCAN_POINTS);
    let mut onsets = Vec::new();
    for side in [OnsetSide::GasOnset, OnsetSide::LiquidOnset] {
        let gaps: Vec<f64> = grid
            .par_iter()
            .map(|&r| onset_gap(model, s0, r, side))
            .collect();
        for k in 1..grid.len() {
            let (g0, g1) = (gaps[k - 1], gaps[k]);
            if !(g0.is_finite() && g1.is_finite()) || g0.signum() == g1.signum() {
                continue;
            }
            let rho = if g0 == 0.0 {
                grid[k - 1]
            } else {
                bisect(
                    |r| onset_gap(model, s0, r, side),
                    grid[k - 1],
                    grid[k],
                    1e-14,
                )
                .ok_or_else(|| Error::ConvergenceFailure {
                    what: format!("phase onset near rho={}", grid[k]),
                    residual: g1.abs(),
                })?
            };
            onsets.push(PhaseOnset {
                rho,
                temperature: homentrope_t(model, s0, rho)?,
                side,
            });
        }
    }
    onsets.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    onsets.dedup_by(|a, b| a.side == b.side && (a.rho - b.rho).abs() < 1e-12);
    if onsets.is_empty() {
        return Err(Error::EmptyCurve);
    }
    Ok(onsets)
}

fn check_entropy(consts: &ConstraintConstants, model: &ThermoModel, s0: f64) -> Result<()> {
    let expected = constants_from_model(
        model,
        s0,
        consts.c2,
        consts.alpha1,
        consts.alpha2,
        consts.alpha3,
    )?;
    if (expected.c5 - consts.c5).abs() > 1e-9 * consts.c5.abs().max(1.0)
        || (expected.c6 - consts.c6).abs() > 1e-12
    {
        return Err(Error::InvalidParameter(format!(
            "s0 = {s0} gives C5 = {}, inconsistent with C5 = {}",
            expected.c5, consts.c5
        )));
    }
    Ok(())
}

/// Image of every onset density at `samples` evenly spaced times in
/// `t_range`.
pub fn phase_transition_curve(
    consts: &ConstraintConstants,
    model: &ThermoModel,
    s0: f64,
    rho_range: (f64, f64),
    t_range: (f64, f64),
    samples: usize,
) -> Result<Vec<PhaseCurvePoint>> {
    if samples == 0 || !(t_range.0 <= t_range.1) {
        return Err(Error::InvalidParameter(
            "phase curve needs samples > 0 and t_min <= t_max".into(),
        ));
    }
    check_entropy(consts, model, s0)?;
    let onsets = phase_onsets(model, s0, rho_range)?;
    let manifold = SolutionManifold::new(*consts)?;
    let cusp = cusp(consts).ok();
    let times = if samples == 1 {
        vec![t_range.0]
    } else {
        linspace(t_range.0, t_range.1, samples)
    };
    let rows: Vec<Result<Vec<PhaseCurvePoint>>> = times
        .par_iter()
        .map(|&t| {
            let fold = cusp.as_ref().and_then(|c| fold_interval(consts, c, t).ok());
            onsets
                .iter()
                .map(|o| {
                    let branch_id = match fold {
                        Some((lo, _)) if o.rho < lo => 0,
                        Some((_, hi)) if o.rho <= hi => 1,
                        Some(_) => 2,
                        None => 0,
                    };
                    let x = manifold.position(o.rho, t)?;
                    Ok(PhaseCurvePoint {
                        t,
                        x,
                        rho: o.rho,
                        branch_id,
                        side: o.side,
                    })
                })
                .collect()
        })
        .collect();
    let mut points = Vec::with_capacity(samples * onsets.len());
    for row in rows {
        points.extend(row?);
    }
    Ok(points)
}

/// Times where the image of an onset density crosses the shock front,
/// bracketed between consecutive front samples and refined by bisection
/// in `t` with the front re-solved at every trial time.
pub fn phase_front_crossings(
    consts: &ConstraintConstants,
    front: &ShockFront,
    onsets: &[PhaseOnset],
) -> Result<Vec<PhaseCrossing>> {
    let solver = ShockSolver::new(consts)?;
    let manifold = SolutionManifold::new(*consts)?;
    let mut crossings = Vec::new();
    for onset in onsets {
        let gap_at = |p: &super::ShockPoint| {
            manifold
                .position(onset.rho, p.t)
                .map(|x| x - p.x)
                .unwrap_or(f64::NAN)
        };
        for pair in front.points.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let (ga, gb) = (gap_at(a), gap_at(b));
            if !(ga.is_finite() && gb.is_finite()) || ga.signum() == gb.signum() {
                continue;
            }
            let gap = |t: f64| {
                let p = if t == a.t {
                    Ok(*a)
                } else {
                    solver.continue_to(a, t)
                };
                p.map(|p| gap_at(&p)).unwrap_or(f64::NAN)
            };
            let Some(t) = bisect(gap, a.t, b.t, 1e-13 * b.t.abs().max(1.0)) else {
                continue;
            };
            let p = if t == a.t {
                *a
            } else {
                solver.continue_to(a, t)?
            };
            let x_curve = manifold.position(onset.rho, t)?;
            crossings.push(PhaseCrossing {
                t,
                x: p.x,
                rho_onset: onset.rho,
                side: onset.side,
                distance: (x_curve - p.x).abs(),
            });
        }
    }
    Ok(crossings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homentropic::homentrope_p;
    use crate::singularity::shock_front_curve;

    fn setup() -> (ConstraintConstants, ThermoModel, f64) {
        let model = ThermoModel::van_der_waals(3.0).unwrap();
        (ConstraintConstants::reference_vdw(), model, 4.0 * 6f64.ln())
    }

    #[test]
    fn onsets_lie_on_binodal() {
        let (_, model, s0) = setup();
        let onsets = phase_onsets(&model, s0, (0.01, 2.95)).unwrap();
        assert!(!onsets.is_empty());
        for o in &onsets {
            let b = binodal_at_t(&model, o.temperature).unwrap();
            let p = homentrope_p(&model, s0, o.rho).unwrap();
            assert!((p - b.pressure).abs() <= 1e-8, "{o:?}");
        }
        assert_eq!(onsets[0].side, OnsetSide::GasOnset);
    }

    #[test]
    fn supercritical_homentrope_is_empty() {
        let model = ThermoModel::van_der_waals(3.0).unwrap();
        let s0 = 30.0;
        let consts = constants_from_model(&model, s0, 1.0, 1.0, 2.0, 1.0).unwrap();
        let r = phase_transition_curve(&consts, &model, s0, (0.05, 2.95), (0.0, 10.0), 5);
        assert_eq!(r, Err(Error::EmptyCurve));
    }

    #[test]
    fn inconsistent_entropy_is_rejected() {
        let (c, model, s0) = setup();
        let r = phase_transition_curve(&c, &model, s0 + 0.1, (0.05, 2.95), (0.0, 10.0), 5);
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn curve_crosses_front() {
        let (c, model, s0) = setup();
        let onsets = phase_onsets(&model, s0, (0.01, 2.95)).unwrap();
        let front =
            shock_front_curve(&c, ShockSolver::new(&c).unwrap().cusp.t + 20.0, 100).unwrap();
        let crossings = phase_front_crossings(&c, &front, &onsets).unwrap();
        assert!(!crossings.is_empty());
        assert!(crossings.iter().all(|k| k.distance < 1e-8));
    }
}
