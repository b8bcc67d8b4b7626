//! Gas-liquid coexistence of the reduced van der Waals gas.
//!
//! A binodal point at temperature `T` is a triple `(p, rho_gas, rho_liq)` with
//! equal pressure and equal `phi + rho phi_rho` (equal specific Gibbs
//! potential) at both densities.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{bisect, linspace};
use crate::thermo::ThermoModel;

/// Above `1 - NEAR_CRITICAL` the Newton solve is seeded from the Landau
/// expansion and the expansion itself is returned if Newton cannot improve it.
pub const NEAR_CRITICAL: f64 = 1e-4;
pub const BINODAL_TOL: f64 = 1e-10;

const LIQUID_CAP: f64 = 3.0 - 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinodalPoint {
    pub temperature: f64,
    pub pressure: f64,
    pub rho_gas: f64,
    pub rho_liq: f64,
}

impl BinodalPoint {
    fn critical() -> Self {
        Self {
            temperature: 1.0,
            pressure: 1.0,
            rho_gas: 1.0,
            rho_liq: 1.0,
        }
    }

    /// Absolute defects of the three coexistence equations.
    pub fn residuals(&self, model: &ThermoModel) -> Result<[f64; 3]> {
        let t = self.temperature;
        Ok([
            (model.pressure(t, self.rho_gas)? - self.pressure).abs(),
            (model.pressure(t, self.rho_liq)? - self.pressure).abs(),
            (model.gibbs_reduced(t, self.rho_gas)? - model.gibbs_reduced(t, self.rho_liq)?).abs(),
        ])
    }
}

fn require_vdw(model: &ThermoModel, t: f64) -> Result<()> {
    if model.is_van_der_waals() {
        Ok(())
    } else {
        Err(Error::NoPhaseTransition {
            temperature: t,
            reason: "the ideal gas has no phase transitions",
        })
    }
}

/// The two densities where `k_rr` vanishes at temperature `t < 1`,
/// bracketing the critical density from below and above.
pub fn spinodal_densities(t: f64) -> Option<(f64, f64)> {
    if !(t > 0.0 && t < 1.0) {
        return None;
    }
    let f = |r: f64| r * (3.0 - r) * (3.0 - r) - 4.0 * t;
    let low = bisect(f, 0.0, 1.0, 1e-15)?;
    let high = bisect(f, 1.0, 3.0, 1e-15)?;
    Some((low, high))
}

/// Inverts an isotherm on one monotone branch, `lo < rho < hi`.
fn invert_isotherm(model: &ThermoModel, t: f64, p: f64, lo: f64, hi: f64) -> Option<f64> {
    bisect(
        |r| model.pressure(t, r).unwrap_or(f64::NAN) - p,
        lo,
        hi,
        1e-15,
    )
}

/// Leading-order Landau expansion of the coexistence curve at `T = 1 - tau`.
fn landau_point(t: f64) -> BinodalPoint {
    let tau = (1.0 - t).max(0.0);
    let half_gap = 2.0 * tau.sqrt();
    BinodalPoint {
        temperature: t,
        pressure: 1.0 - 4.0 * tau,
        rho_gas: 1.0 - half_gap,
        rho_liq: 1.0 + half_gap,
    }
}

/// Coarse equal-area pressure, used to start Newton away from the critical point.
fn equal_area_guess(model: &ThermoModel, t: f64) -> Option<BinodalPoint> {
    let (sp_low, sp_high) = spinodal_densities(t)?;
    let p_max = model.pressure(t, sp_low).ok()?;
    let p_min = model.pressure(t, sp_high).ok()?.max(0.0);
    let densities = |p: f64| {
        let gas = invert_isotherm(model, t, p, DOMAIN_FLOOR, sp_low)?;
        let liq = invert_isotherm(model, t, p, sp_high, LIQUID_CAP)?;
        Some((gas, liq))
    };
    // integral of (P - p) dv between the liquid and gas volumes
    let area = |p: f64| {
        let Some((gas, liq)) = densities(p) else {
            return f64::NAN;
        };
        let (vg, vl) = (1.0 / gas, 1.0 / liq);
        8.0 * t / 3.0 * ((3.0 * vg - 1.0) / (3.0 * vl - 1.0)).ln() + 3.0 / vg
            - 3.0 / vl
            - p * (vg - vl)
    };
    // keep the gas root above the domain floor at very low temperature
    let lo = (p_min + 1e-12 * p_max).max(model.pressure(t, 1e-9).ok()?);
    let hi = p_max * (1.0 - 1e-12);
    let p = bisect(area, lo, hi, 1e-9 * p_max)?;
    let (gas, liq) = densities(p)?;
    Some(BinodalPoint {
        temperature: t,
        pressure: p,
        rho_gas: gas,
        rho_liq: liq,
    })
}

const DOMAIN_FLOOR: f64 = 1e-11;

/// Damped Newton on `(ln p, rho_gas, rho_liq)`.
fn newton(model: &ThermoModel, guess: BinodalPoint) -> std::result::Result<BinodalPoint, f64> {
    let t = guess.temperature;
    let scaled = |lnp: f64, r1: f64, r2: f64| -> Option<Vector3<f64>> {
        let p = lnp.exp();
        Some(Vector3::new(
            model.pressure(t, r1).ok()? / p - 1.0,
            model.pressure(t, r2).ok()? / p - 1.0,
            model.gibbs_reduced(t, r1).ok()? - model.gibbs_reduced(t, r2).ok()?,
        ))
    };
    let mut x = Vector3::new(guess.pressure.ln(), guess.rho_gas, guess.rho_liq);
    let Some(mut f) = scaled(x[0], x[1], x[2]) else {
        return Err(f64::INFINITY);
    };
    let mut norm = f.amax();
    for _ in 0..100 {
        let p = x[0].exp();
        let jac = (|| -> Option<Matrix3<f64>> {
            let s1 = model.pressure_density_slope(t, x[1]).ok()?;
            let s2 = model.pressure_density_slope(t, x[2]).ok()?;
            let p1 = model.pressure(t, x[1]).ok()?;
            let p2 = model.pressure(t, x[2]).ok()?;
            // d(phi + rho phi_rho)/d rho = -P_rho / (T rho)
            let g1 = -s1 / (t * x[1]);
            let g2 = -s2 / (t * x[2]);
            Some(Matrix3::new(
                -p1 / p,
                s1 / p,
                0.0,
                -p2 / p,
                0.0,
                s2 / p,
                0.0,
                g1,
                -g2,
            ))
        })();
        let Some(jac) = jac else { return Err(norm) };
        let Some(step) = jac.lu().solve(&(-f)) else {
            return Err(norm);
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = x + step * lambda;
            let ordered = cand[1] > 0.0 && cand[1] < cand[2] && cand[2] < 3.0;
            if ordered {
                if let Some(fc) = scaled(cand[0], cand[1], cand[2]) {
                    let nc = fc.amax();
                    if nc.is_finite() && (nc < norm || nc < 1e-15) {
                        x = cand;
                        f = fc;
                        norm = nc;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        let small_step = (step * lambda).amax() <= 1e-15 * x.amax().max(1.0);
        if !accepted || small_step || norm < 1e-15 {
            break;
        }
    }
    let point = BinodalPoint {
        temperature: t,
        pressure: x[0].exp(),
        rho_gas: x[1],
        rho_liq: x[2],
    };
    let worst = point
        .residuals(model)
        .map(|r| r.into_iter().fold(0.0, f64::max))
        .unwrap_or(f64::INFINITY);
    if worst <= BINODAL_TOL && point.rho_gas < 1.0 && point.rho_liq > 1.0 {
        Ok(point)
    } else {
        Err(worst)
    }
}

fn binodal_from(model: &ThermoModel, t: f64, warm: Option<BinodalPoint>) -> Result<BinodalPoint> {
    require_vdw(model, t)?;
    if !(t > 0.0) || t.is_nan() {
        return Err(Error::InvalidParameter(format!(
            "temperature {t} must be > 0"
        )));
    }
    if t > 1.0 {
        return Err(Error::NoPhaseTransition {
            temperature: t,
            reason: "supercritical temperature",
        });
    }
    if t == 1.0 {
        return Ok(BinodalPoint::critical());
    }
    if t > 1.0 - NEAR_CRITICAL {
        let landau = landau_point(t);
        return Ok(newton(model, landau).unwrap_or(landau));
    }
    let mut best = f64::INFINITY;
    if let Some(w) = warm {
        match newton(
            model,
            BinodalPoint {
                temperature: t,
                ..w
            },
        ) {
            Ok(p) => return Ok(p),
            Err(r) => best = best.min(r),
        }
    }
    let guess = equal_area_guess(model, t).ok_or_else(|| Error::ConvergenceFailure {
        what: format!("equal-area bracket at T={t}"),
        residual: best,
    })?;
    newton(model, guess).map_err(|r| Error::ConvergenceFailure {
        what: format!("binodal Newton at T={t}"),
        residual: r.min(best),
    })
}

/// Coexisting densities and pressure at temperature `t`.
pub fn binodal_at_t(model: &ThermoModel, t: f64) -> Result<BinodalPoint> {
    binodal_from(model, t, None)
}

/// Binodal sampled at `count` evenly spaced temperatures, each solve
/// warm-started from the previous point.
pub fn binodal_curve(
    model: &ThermoModel,
    t_min: f64,
    t_max: f64,
    count: usize,
) -> Result<Vec<BinodalPoint>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be positive".into()));
    }
    if !(t_min > 0.0 && t_min <= t_max && t_max <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "temperature range [{t_min}, {t_max}] must satisfy 0 < T_min <= T_max <= 1"
        )));
    }
    let mut out: Vec<BinodalPoint> = Vec::with_capacity(count);
    for t in linspace(t_min, t_max, count) {
        let point = binodal_from(model, t, out.last().copied())?;
        out.push(point);
    }
    Ok(out)
}
