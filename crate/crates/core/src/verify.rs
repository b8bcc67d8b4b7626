//! Residual and oracle checks over every library invariant, run by
//! `gasflow verify`.
//!
//! Model-level checks use the built-in gases with the scenario's `n` (and
//! `R`); solution-level checks use the scenario constants, and the
//! two-family checks add the companion family (ideal for a van der Waals
//! scenario and vice versa).

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Scenario;
use crate::homentropic::{
    constants_from_model, entropy_from_c5, homentrope_p, homentrope_t, sound_coefficient_a,
    ConstraintConstants,
};
use crate::numerics::{bisect, central_diff, integrate, linspace};
use crate::phase::{binodal_at_t, binodal_curve, spinodal_densities};
use crate::singularity::{
    breakdown_time, caustic, conservation_form, cusp, fold_interval, mass_potential_h,
    phase_front_crossings, phase_onsets, shock_front_curve, SHOCK_TOL,
};
use crate::solution::{SolutionManifold, REGULAR_THRESHOLD};
use crate::thermo::{model_lagrangian_residual, ModelKind, ThermoModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub status: Status,
    pub note: String,
}

impl CheckResult {
    fn measured(name: &'static str, max_residual: f64, tolerance: f64, samples: usize) -> Self {
        let status = if max_residual <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            name,
            max_residual,
            tolerance,
            samples,
            status,
            note: String::new(),
        }
    }

    fn skipped(name: &'static str, note: impl Into<String>) -> Self {
        Self {
            name,
            max_residual: 0.0,
            tolerance: 0.0,
            samples: 0,
            status: Status::Skipped,
            note: note.into(),
        }
    }

    fn failed(name: &'static str, note: impl Into<String>) -> Self {
        Self {
            name,
            max_residual: f64::INFINITY,
            tolerance: 0.0,
            samples: 0,
            status: Status::Fail,
            note: note.into(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        write!(
            f,
            "{tag}  {:<32} max {:<10.3e} tol {:<8.1e} n {:<6}",
            self.name, self.max_residual, self.tolerance, self.samples
        )?;
        if !self.note.is_empty() {
            write!(f, " {}", self.note)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self
            .checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

/// Relative defect with a unit floor on the scale.
fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn nan_max(acc: f64, v: f64) -> f64 {
    if v.is_nan() || acc.is_nan() {
        f64::NAN
    } else {
        acc.max(v)
    }
}

struct Suite<'a> {
    scenario: &'a Scenario,
    vdw: ThermoModel,
    ideal: ThermoModel,
    rng: ChaCha8Rng,
}

/// Runs every check against `scenario`.
pub fn run(scenario: &Scenario) -> Report {
    let n = scenario.model.n;
    let r = scenario.model.gas_constant;
    let mut suite = Suite {
        scenario,
        vdw: ThermoModel::van_der_waals(n).expect("validated n"),
        ideal: ThermoModel::ideal(n, r).expect("validated n and R"),
        rng: ChaCha8Rng::seed_from_u64(scenario.config.seed),
    };
    let checks = vec![
        suite.closed_forms(),
        suite.maxwell_symmetry(),
        suite.ideal_kappa_definite(),
        suite.spinodal_sign(),
        suite.lagrangian(),
        suite.critical_cusp(),
        suite.binodal_equalities(),
        suite.equal_area(),
        suite.binodal_encloses_spinodal(),
        suite.a_consistency(),
        suite.homentrope_monotone(),
        suite.c5_readback(),
        suite.quadratures(),
        suite.pde_residuals(),
        suite.jet_agreement(),
        suite.time_shift(),
        suite.branch_structure(),
        suite.breakdown_agreement(),
        suite.caustic_folds(),
        suite.shock_admissibility(),
        suite.conservation_closed(),
        suite.potential_gradient(),
        suite.phase_onsets_on_binodal(),
        suite.phase_front_intersection(),
    ];
    Report { checks }
}

impl Suite<'_> {
    fn vdw_state(&mut self) -> (f64, f64) {
        (self.rng.gen_range(0.3..3.0), self.rng.gen_range(0.05..2.8))
    }

    fn ideal_state(&mut self) -> (f64, f64) {
        (self.rng.gen_range(0.1..5.0), self.rng.gen_range(0.01..10.0))
    }

    fn is_vdw(&self) -> bool {
        self.scenario.model.kind == ModelKind::VanDerWaals
    }

    /// The scenario constants plus the companion family with the same free
    /// parameters.
    fn families(&self) -> Vec<(ConstraintConstants, (f64, f64))> {
        let s = self.scenario;
        let c = &s.consts;
        let companion = if self.is_vdw() {
            constants_from_model(&self.ideal, 0.0, c.c2, c.alpha1, c.alpha2, c.alpha3)
                .map(|k| (k, (0.1, 10.0)))
        } else {
            constants_from_model(
                &self.vdw,
                4.0 * 6f64.ln(),
                c.c2,
                c.alpha1,
                c.alpha2,
                c.alpha3,
            )
            .map(|k| (k, (0.05, 2.9)))
        };
        let mut out = vec![(*c, s.rho_range)];
        out.extend(companion.ok());
        out
    }

    fn closed_forms(&mut self) -> CheckResult {
        let (n, r) = (self.vdw.n, self.ideal.gas_constant);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let (t, rho) = self.vdw_state();
            let s = self
                .vdw
                .eval_state(t, rho)
                .expect("sampled inside the domain");
            let p = 8.0 * t * rho / (3.0 - rho) - 3.0 * rho * rho;
            let e = 4.0 * n * t / 3.0 - 3.0 * rho;
            let ent = (t.powf(4.0 * n / 3.0) * (3.0 / rho - 1.0).powf(8.0 / 3.0)).ln();
            worst = nan_max(
                worst,
                rel(s.pressure, p)
                    .max(rel(s.energy, e))
                    .max(rel(s.entropy, ent)),
            );
            let (t, rho) = self.ideal_state();
            let s = self
                .ideal
                .eval_state(t, rho)
                .expect("sampled inside the domain");
            let ent = r * (t.powf(0.5 * n) / rho).ln();
            worst = nan_max(
                worst,
                rel(s.pressure, r * rho * t)
                    .max(rel(s.energy, 0.5 * n * r * t))
                    .max(rel(s.entropy, ent)),
            );
        }
        CheckResult::measured("state_closed_forms", worst, 1e-12, 2000)
    }

    fn maxwell_symmetry(&mut self) -> CheckResult {
        let mut worst: f64 = 0.0;
        for k in 0..2000 {
            let (model, (t, rho)) = if k % 2 == 0 {
                (self.vdw, self.vdw_state())
            } else {
                (self.ideal, self.ideal_state())
            };
            let from_t = central_diff(|r| model.phi(t, r).map(|p| p.d_t).unwrap_or(f64::NAN), rho);
            let from_rho = central_diff(
                |s| model.phi(s, rho).map(|p| p.d_rho).unwrap_or(f64::NAN),
                t,
            );
            worst = nan_max(worst, rel(from_t, from_rho));
        }
        CheckResult::measured("potential_maxwell_symmetry", worst, 1e-6, 2000)
    }

    fn ideal_kappa_definite(&mut self) -> CheckResult {
        let mut violations = 0usize;
        for _ in 0..10_000 {
            let (t, rho) = self.ideal_state();
            let k = self.ideal.kappa(t, rho).expect("sampled inside the domain");
            if !k.is_applicable() {
                violations += 1;
            }
        }
        CheckResult::measured(
            "ideal_kappa_negative_definite",
            violations as f64,
            0.0,
            10_000,
        )
        .with_note("(residual counts violations)")
    }

    fn spinodal_sign(&mut self) -> CheckResult {
        let mut violations = 0usize;
        let mut used = 0usize;
        for _ in 0..10_000 {
            let t = self.rng.gen_range(0.05..1.5);
            let rho = self.rng.gen_range(0.01..2.99);
            let ts = self.vdw.spinodal_t(rho).expect("inside the domain");
            if (ts - t).abs() < 1e-9 {
                continue;
            }
            used += 1;
            let k = self.vdw.kappa(t, rho).expect("inside the domain");
            if k.k_rr.signum() != (ts - t).signum() {
                violations += 1;
            }
        }
        CheckResult::measured("vdw_k_rr_sign_vs_spinodal", violations as f64, 0.0, used)
            .with_note("(residual counts violations)")
    }

    /// Sampled at `T >= 0.5`: the step-1e-5 central difference of the `3/T`
    /// term carries a truncation error of about `3 h^2 / T^4`.
    fn lagrangian(&mut self) -> CheckResult {
        let mut worst: f64 = 0.0;
        for k in 0..2000 {
            let t = self.rng.gen_range(0.5..3.0);
            let (model, rho) = if k % 2 == 0 {
                (self.vdw, self.rng.gen_range(0.05..2.8))
            } else {
                (self.ideal, self.rng.gen_range(0.01..10.0))
            };
            worst = nan_max(worst, model_lagrangian_residual(&model, t, rho));
        }
        CheckResult::measured("lagrangian_condition", worst, 1e-8, 2000)
    }

    fn critical_cusp(&mut self) -> CheckResult {
        let k = |rho: f64| self.vdw.kappa(1.0, rho).map(|k| k.k_rr).unwrap_or(f64::NAN);
        let worst = k(1.0).abs().max(central_diff(k, 1.0).abs());
        CheckResult::measured("critical_point_cusp", worst, 1e-8, 1)
    }

    fn binodal_points(&self) -> Result<Vec<crate::phase::BinodalPoint>, String> {
        binodal_curve(&self.vdw, 0.3, 0.999, 40).map_err(|e| e.to_string())
    }

    fn binodal_equalities(&mut self) -> CheckResult {
        let name = "binodal_pressure_gibbs_equality";
        let points = match self.binodal_points() {
            Ok(p) => p,
            Err(e) => return CheckResult::failed(name, e),
        };
        let mut worst: f64 = 0.0;
        for b in &points {
            let r = b
                .residuals(&self.vdw)
                .map(|r| r.into_iter().fold(0.0, f64::max))
                .unwrap_or(f64::NAN);
            worst = nan_max(worst, r);
        }
        CheckResult::measured(name, worst, 1e-10, points.len())
    }

    fn equal_area(&mut self) -> CheckResult {
        let name = "binodal_vs_equal_area";
        let mut worst: f64 = 0.0;
        let temps = [0.85, 0.9, 0.95, 0.99];
        for t in temps {
            let Some(p_star) = equal_area_pressure(t) else {
                return CheckResult::failed(name, format!("equal-area oracle failed at T={t}"));
            };
            match binodal_at_t(&self.vdw, t) {
                Ok(b) => worst = nan_max(worst, (b.pressure - p_star).abs()),
                Err(e) => return CheckResult::failed(name, e.to_string()),
            }
        }
        CheckResult::measured(name, worst, 1e-8, temps.len())
    }

    fn binodal_encloses_spinodal(&mut self) -> CheckResult {
        let name = "binodal_encloses_spinodal";
        let points = match self.binodal_points() {
            Ok(p) => p,
            Err(e) => return CheckResult::failed(name, e),
        };
        let violations = points
            .iter()
            .filter(|b| match spinodal_densities(b.temperature) {
                Some((lo, hi)) => !(b.rho_gas < lo && lo < hi && hi < b.rho_liq),
                None => true,
            })
            .count();
        CheckResult::measured(name, violations as f64, 0.0, points.len())
            .with_note("(residual counts violations)")
    }

    fn a_consistency(&mut self) -> CheckResult {
        let name = "sound_coefficient_vs_dp_drho";
        let c = &self.scenario.consts;
        let s0_vdw = if self.is_vdw() {
            self.scenario.s0
        } else {
            4.0 * 6f64.ln()
        };
        let s0_ideal = if self.is_vdw() { 0.0 } else { self.scenario.s0 };
        let cases = [
            (self.vdw, s0_vdw, (0.05, 2.9)),
            (self.ideal, s0_ideal, (0.1, 10.0)),
        ];
        let mut worst: f64 = 0.0;
        for (model, s0, (lo, hi)) in cases {
            let k = match constants_from_model(&model, s0, c.c2, c.alpha1, c.alpha2, c.alpha3) {
                Ok(k) => k,
                Err(e) => return CheckResult::failed(name, e.to_string()),
            };
            for rho in linspace(lo, hi, 100) {
                let fd =
                    central_diff(|r| homentrope_p(&model, s0, r).unwrap_or(f64::NAN), rho) / rho;
                let a = sound_coefficient_a(&k, rho).unwrap_or(f64::NAN);
                worst = nan_max(worst, (a - fd).abs() / a.abs());
            }
        }
        CheckResult::measured(name, worst, 1e-6, 200)
    }

    fn homentrope_monotone(&mut self) -> CheckResult {
        let mut violations = 0usize;
        for _ in 0..2000 {
            let s0 = self.rng.gen_range(-5.0..10.0);
            let rho = self.rng.gen_range(0.01..2.9);
            let ds = self.rng.gen_range(1e-3..1.0);
            let dr = self.rng.gen_range(1e-3..0.09);
            let t = homentrope_t(&self.vdw, s0, rho).unwrap_or(f64::NAN);
            let up_s = homentrope_t(&self.vdw, s0 + ds, rho).unwrap_or(f64::NAN);
            let up_r = homentrope_t(&self.vdw, s0, rho + dr).unwrap_or(f64::NAN);
            let ti = homentrope_t(&self.ideal, s0, rho).unwrap_or(f64::NAN);
            let ti_s = homentrope_t(&self.ideal, s0 + ds, rho).unwrap_or(f64::NAN);
            if !(up_s > t && up_r > t && ti_s > ti) {
                violations += 1;
            }
        }
        CheckResult::measured("homentrope_monotonicity", violations as f64, 0.0, 2000)
            .with_note("(residual counts violations)")
    }

    fn c5_readback(&mut self) -> CheckResult {
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let s0 = self.rng.gen_range(-5.0..10.0);
            for model in [self.vdw, self.ideal] {
                let back = constants_from_model(&model, s0, 1.0, 1.0, 2.0, 1.0)
                    .and_then(|k| entropy_from_c5(&model, k.c5))
                    .unwrap_or(f64::NAN);
                worst = nan_max(worst, rel(back, s0));
            }
        }
        CheckResult::measured("entropy_c5_round_trip", worst, 1e-12, 2000)
    }

    fn quadratures(&mut self) -> CheckResult {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for (consts, (lo, hi)) in self.families() {
            let m = SolutionManifold { consts };
            for _ in 0..1000 {
                let rho = self.rng.gen_range(lo..hi);
                let t = self.rng.gen_range(0.0..40.0);
                let (Ok(u), Ok(x)) = (m.velocity(rho, t), m.position(rho, t)) else {
                    continue;
                };
                let q1 = m.quad1_residual(rho, t, u).abs() / u.abs().max(1.0);
                let q2 = m
                    .quad2_residual(rho, x, u)
                    .map(|r| r.abs() / x.abs().max(1.0))
                    .unwrap_or(f64::NAN);
                worst = nan_max(worst, q1.max(q2));
                count += 1;
            }
        }
        CheckResult::measured("quadrature_identities", worst, 1e-12, count)
    }

    /// Random points with `|x_rho|` above the regularity threshold.
    fn regular_points(
        &mut self,
        m: &SolutionManifold,
        range: (f64, f64),
        count: usize,
    ) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(count);
        let mut tries = 0;
        while out.len() < count && tries < 100 * count {
            tries += 1;
            let rho = self.rng.gen_range(range.0..range.1);
            let t = self.rng.gen_range(0.0..40.0);
            if matches!(m.jet(rho, t), Ok(j) if j.x_rho.abs() > REGULAR_THRESHOLD) {
                out.push((rho, t));
            }
        }
        out
    }

    fn pde_residuals(&mut self) -> CheckResult {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for (consts, range) in self.families() {
            let m = SolutionManifold { consts };
            for (rho, t) in self.regular_points(&m, range, 1000) {
                worst = nan_max(
                    worst,
                    m.pde_residuals(rho, t)
                        .map(|r| r.max_abs())
                        .unwrap_or(f64::NAN),
                );
                count += 1;
            }
        }
        CheckResult::measured("pde_residuals", worst, 1e-8, count)
    }

    fn jet_agreement(&mut self) -> CheckResult {
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for (consts, range) in self.families() {
            let m = SolutionManifold { consts };
            for (rho, t) in self.regular_points(&m, range, 200) {
                let (Ok(a), Ok(f)) = (m.jet(rho, t), m.jet_fd(rho, t)) else {
                    continue;
                };
                let scale = a.x.abs().max(1.0);
                let d = [
                    (a.x_rho - f.x_rho).abs() * rho / scale,
                    (a.x_t - f.x_t).abs() / scale,
                    rel(a.u_rho, f.u_rho),
                    rel(a.u_t, f.u_t),
                ];
                worst = nan_max(worst, d.into_iter().fold(0.0, f64::max));
                count += 1;
            }
        }
        CheckResult::measured("analytic_vs_difference_jet", worst, 1e-6, count)
    }

    fn time_shift(&mut self) -> CheckResult {
        let base = SolutionManifold {
            consts: self.scenario.consts,
        };
        let (lo, hi) = self.scenario.rho_range;
        let mut worst: f64 = 0.0;
        for _ in 0..500 {
            let rho = self.rng.gen_range(lo..hi);
            let t = self.rng.gen_range(0.0..40.0);
            let delta = self.rng.gen_range(-5.0..5.0);
            let mut shifted = self.scenario.consts;
            shifted.alpha2 += delta;
            let s = SolutionManifold { consts: shifted };
            let (Ok(x0), Ok(x1)) = (base.position(rho, t), s.position(rho, t - delta)) else {
                continue;
            };
            let (Ok(u0), Ok(u1)) = (base.velocity(rho, t), s.velocity(rho, t - delta)) else {
                continue;
            };
            worst = nan_max(worst, rel(x1, x0).max(rel(u1, u0)));
        }
        CheckResult::measured("time_shift_symmetry", worst, 1e-12, 500)
    }

    fn branch_structure(&mut self) -> CheckResult {
        let name = "profile_branch_count";
        let c = self.scenario.consts;
        let Ok(cu) = cusp(&c) else {
            return CheckResult::skipped(name, "no fold for these constants");
        };
        let m = SolutionManifold { consts: c };
        let range = self.scenario.rho_range;
        let before = 0.0f64.min(cu.t - 1.0);
        let after = (cu.t + 10.0).max(30.0);
        let (Ok(p0), Ok(p1)) = (
            m.density_profile(before, range, 2000),
            m.density_profile(after, range, 2000),
        ) else {
            return CheckResult::failed(name, "profile evaluation failed");
        };
        let single =
            p0.branch_count() == 1 && p0.coverage_intervals().iter().all(|&(_, _, k)| k <= 1);
        let triple = p1.coverage_intervals().iter().any(|&(_, _, k)| k == 3);
        let bad = (!single) as usize + (!triple) as usize;
        CheckResult::measured(name, bad as f64, 0.0, 2).with_note(format!(
            "(t={before}: {} branch, t={after}: 3-cover {triple})",
            p0.branch_count()
        ))
    }

    fn breakdown_agreement(&mut self) -> CheckResult {
        let name = "breakdown_formula_vs_minimum";
        if !self.is_vdw() {
            return CheckResult::skipped(
                name,
                "closed formula is stated for the van der Waals family",
            );
        }
        let mut worst: f64 = 0.0;
        let mut sets = vec![self.scenario.consts];
        for _ in 0..10 {
            let mut k = self.scenario.consts;
            k.c2 = self.rng.gen_range(0.5..1.5);
            k.alpha1 = self.rng.gen_range(0.5..2.0);
            k.alpha2 = self.rng.gen_range(0.0..4.0);
            sets.push(k);
        }
        for k in &sets {
            let (Ok(formula), Ok(numeric)) = (breakdown_time(k), cusp(k)) else {
                return CheckResult::failed(name, "breakdown time unavailable");
            };
            if (numeric.rho - 1.0 / 3.0).abs() > 1e-4 {
                return CheckResult::skipped(
                    name,
                    format!(
                        "caustic minimum at rho={:.6}, not 1/3; formula not certified",
                        numeric.rho
                    ),
                );
            }
            worst = nan_max(worst, (formula - numeric.t).abs() / formula.abs());
        }
        CheckResult::measured(name, worst, 1e-6, sets.len())
    }

    fn caustic_folds(&mut self) -> CheckResult {
        let name = "caustic_is_fold";
        let c = self.scenario.consts;
        let m = SolutionManifold { consts: c };
        let cs = match caustic(&c, self.scenario.rho_range, 400) {
            Ok(cs) => cs,
            Err(e) => return CheckResult::skipped(name, e.to_string()),
        };
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for p in cs.plus.points.iter().chain(&cs.minus.points) {
            let j = m.jet(p.rho, p.t);
            worst = nan_max(
                worst,
                j.map(|j| (j.x_rho * p.rho).abs() / j.x.abs().max(1.0))
                    .unwrap_or(f64::NAN),
            );
            count += 1;
        }
        CheckResult::measured(name, worst, 1e-6, count)
    }

    fn shock_admissibility(&mut self) -> CheckResult {
        let name = "shock_front_admissibility";
        let c = self.scenario.consts;
        let Ok(cu) = cusp(&c) else {
            return CheckResult::skipped(name, "no fold for these constants");
        };
        let t_max = self.scenario.config.t_max.unwrap_or(cu.t + 20.0);
        let front = match shock_front_curve(&c, t_max, self.scenario.config.front_samples) {
            Ok(f) => f,
            Err(e) => return CheckResult::failed(name, e.to_string()),
        };
        let m = SolutionManifold { consts: c };
        let mut worst: f64 = 0.0;
        let mut outside = 0usize;
        for p in front.points.iter().skip(1) {
            worst = nan_max(worst, p.residual);
            let inside = fold_interval(&c, &cu, p.t).and_then(|(lo, hi)| {
                let (a, b) = (m.position(lo, p.t)?, m.position(hi, p.t)?);
                Ok(a.min(b) <= p.x && p.x <= a.max(b))
            });
            if !matches!(inside, Ok(true)) || !(p.rho1 < p.rho2) {
                outside += 1;
            }
        }
        let mut r = CheckResult::measured(name, worst, SHOCK_TOL, front.points.len());
        if outside > 0 {
            r.status = Status::Fail;
        }
        r.with_note(format!(
            "({outside} points outside the caustic, {} alternative roots)",
            front.alternatives.len()
        ))
    }

    fn conservation_closed(&mut self) -> CheckResult {
        let c = self.scenario.consts;
        let m = SolutionManifold { consts: c };
        let mut worst: f64 = 0.0;
        let points = self.regular_points(&m, self.scenario.rho_range, 500);
        for &(rho, t) in &points {
            let d_t = central_diff(
                |s| {
                    conservation_form(&c, rho, s)
                        .map(|f| f.0)
                        .unwrap_or(f64::NAN)
                },
                t,
            );
            let d_rho = central_diff(
                |r| conservation_form(&c, r, t).map(|f| f.1).unwrap_or(f64::NAN),
                rho,
            );
            worst = nan_max(
                worst,
                (d_t - d_rho).abs() / d_t.abs().max(d_rho.abs()).max(1.0),
            );
        }
        CheckResult::measured("conservation_form_closed", worst, 1e-5, points.len())
    }

    fn potential_gradient(&mut self) -> CheckResult {
        let c = self.scenario.consts;
        let m = SolutionManifold { consts: c };
        let mut worst: f64 = 0.0;
        let points = self.regular_points(&m, self.scenario.rho_range, 1000);
        for &(rho, t) in &points {
            let h_rho = central_diff(|r| mass_potential_h(&c, r, t).unwrap_or(f64::NAN), rho);
            let h_t = central_diff(|s| mass_potential_h(&c, rho, s).unwrap_or(f64::NAN), t);
            let (a, b) = conservation_form(&c, rho, t).unwrap_or((f64::NAN, f64::NAN));
            let scale = a.abs().max(b.abs()).max(1.0);
            worst = nan_max(worst, (h_rho - a).abs().max((h_t - b).abs()) / scale);
        }
        CheckResult::measured("potential_gradient_vs_form", worst, 1e-6, points.len())
    }

    fn phase_onsets_on_binodal(&mut self) -> CheckResult {
        let name = "phase_onsets_on_binodal";
        if !self.is_vdw() {
            return CheckResult::skipped(name, "the ideal gas has no phase transitions");
        }
        let s = self.scenario;
        let onsets = match phase_onsets(&s.model, s.s0, s.rho_range) {
            Ok(o) => o,
            Err(e) => return CheckResult::skipped(name, e.to_string()),
        };
        let mut worst: f64 = 0.0;
        for o in &onsets {
            let p = homentrope_p(&s.model, s.s0, o.rho).unwrap_or(f64::NAN);
            let pb = binodal_at_t(&s.model, o.temperature)
                .map(|b| b.pressure)
                .unwrap_or(f64::NAN);
            worst = nan_max(worst, (p - pb).abs());
        }
        CheckResult::measured(name, worst, 1e-8, onsets.len())
    }

    fn phase_front_intersection(&mut self) -> CheckResult {
        let name = "phase_curve_meets_front";
        if !self.is_vdw() {
            return CheckResult::skipped(name, "the ideal gas has no phase transitions");
        }
        let s = self.scenario;
        let onsets = match phase_onsets(&s.model, s.s0, s.rho_range) {
            Ok(o) => o,
            Err(e) => return CheckResult::skipped(name, e.to_string()),
        };
        let Ok(cu) = cusp(&s.consts) else {
            return CheckResult::skipped(name, "no fold for these constants");
        };
        let t_max = s.config.t_max.unwrap_or(cu.t + 20.0);
        let found = shock_front_curve(&s.consts, t_max, s.config.front_samples)
            .and_then(|front| phase_front_crossings(&s.consts, &front, &onsets));
        match found {
            Ok(k) if !k.is_empty() => {
                let best = k.iter().map(|c| c.distance).fold(f64::INFINITY, f64::min);
                CheckResult::measured(name, best, 1e-3, k.len())
                    .with_note(format!("(first crossing at t={:.6})", k[0].t))
            }
            Ok(_) => CheckResult::skipped(name, format!("no crossing before t={t_max}")),
            Err(e) => CheckResult::failed(name, e.to_string()),
        }
    }
}

/// Coexistence pressure from the equal-area rule, integrating the isotherm
/// `p(v)` numerically between the outer roots.
fn equal_area_pressure(t: f64) -> Option<f64> {
    let p_of_v = |v: f64| 8.0 * t / (3.0 * v - 1.0) - 3.0 / (v * v);
    let (sp_lo, sp_hi) = spinodal_densities(t)?;
    let (v_max, v_min) = (1.0 / sp_lo, 1.0 / sp_hi);
    let p_hi = p_of_v(v_max);
    let p_lo = p_of_v(v_min).max(p_of_v(1e6));
    let roots = |p: f64| {
        let liquid = bisect(|v| p_of_v(v) - p, 1.0 / 3.0 + 1e-12, v_min, 1e-15)?;
        let gas = bisect(|v| p_of_v(v) - p, v_max, 1e7, 1e-15 * v_max)?;
        Some((liquid, gas))
    };
    let area = |p: f64| match roots(p) {
        Some((vl, vg)) => integrate(|v| p_of_v(v) - p, vl, vg, 64),
        None => f64::NAN,
    };
    let span = p_hi - p_lo;
    bisect(area, p_lo + 1e-12 * span, p_hi - 1e-12 * span, 1e-14)
}
