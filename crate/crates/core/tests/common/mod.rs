//! Oracles for the integration tests. Nothing here calls the library's
//! solvers; they only read the library's closed-form evaluations where a
//! test says so.

#![allow(dead_code)]

use gasflow::homentropic::ConstraintConstants;
use gasflow::solution::SolutionManifold;

pub fn reference_s0() -> f64 {
    4.0 * 6f64.ln()
}

/// Plain bisection, `iters` halvings; `None` without a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> Option<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) || fa * fb > 0.0 {
        return None;
    }
    for _ in 0..iters {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Simpson with one Richardson step: `(16 S(2n) - S(n)) / 15`.
pub fn simpson_extrapolated(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, n: usize) -> f64 {
    let coarse = simpson(f, a, b, n);
    let fine = simpson(f, a, b, 2 * n);
    (16.0 * fine - coarse) / 15.0
}

pub fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Golden-section minimum of a unimodal function.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..iters {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

pub mod vdw {
    /// Reduced van der Waals pressure.
    pub fn pressure(t: f64, rho: f64) -> f64 {
        8.0 * t * rho / (3.0 - rho) - 3.0 * rho * rho
    }

    pub fn pressure_of_volume(t: f64, v: f64) -> f64 {
        8.0 * t / (3.0 * v - 1.0) - 3.0 / (v * v)
    }

    /// Temperature along `s = s0` with `s = ln(T^{4n/3} (3/rho - 1)^{8/3})`.
    pub fn homentrope_t(n: f64, s0: f64, rho: f64) -> f64 {
        ((s0 - 8.0 / 3.0 * (3.0 / rho - 1.0).ln()) * 3.0 / (4.0 * n)).exp()
    }

    pub fn homentrope_p(n: f64, s0: f64, rho: f64) -> f64 {
        pressure(homentrope_t(n, s0, rho), rho)
    }

    /// `k_rr` from its printed closed form.
    pub fn k_rr(t: f64, rho: f64) -> f64 {
        6.0 * (rho.powi(3) - 6.0 * rho * rho + 9.0 * rho - 4.0 * t)
            / (rho * rho * t * (rho - 3.0).powi(2))
    }

    /// Spinodal densities at `t < 1`: roots of `rho (3 - rho)^2 = 4 t`.
    pub fn spinodal(t: f64) -> (f64, f64) {
        let f = |r: f64| r * (3.0 - r) * (3.0 - r) - 4.0 * t;
        (
            super::bisect(f, 0.0, 1.0, 200).unwrap(),
            super::bisect(f, 1.0, 3.0, 200).unwrap(),
        )
    }

    /// Maxwell equal-area construction in the volume plane: returns
    /// `(p, rho_gas, rho_liq)`. Areas by extrapolated Simpson.
    pub fn equal_area(t: f64) -> (f64, f64, f64) {
        let (s_lo, s_hi) = spinodal(t);
        let (v_gas_sp, v_liq_sp) = (1.0 / s_lo, 1.0 / s_hi);
        let p_top = pressure_of_volume(t, v_gas_sp);
        let p_bottom = pressure_of_volume(t, v_liq_sp).max(pressure_of_volume(t, 1e8));
        let volumes = |p: f64| {
            let vl = super::bisect(
                |v| pressure_of_volume(t, v) - p,
                1.0 / 3.0 + 1e-14,
                v_liq_sp,
                200,
            )?;
            let vg = super::bisect(|v| pressure_of_volume(t, v) - p, v_gas_sp, 1e9, 400)?;
            Some((vl, vg))
        };
        let area = |p: f64| match volumes(p) {
            Some((vl, vg)) => {
                super::simpson_extrapolated(|v| pressure_of_volume(t, v) - p, vl, vg, 4000)
            }
            None => f64::NAN,
        };
        let span = p_top - p_bottom;
        let p = super::bisect(area, p_bottom + 1e-10 * span, p_top - 1e-10 * span, 200)
            .expect("equal-area bracket");
        let (vl, vg) = volumes(p).unwrap();
        (p, 1.0 / vg, 1.0 / vl)
    }
}

pub mod ideal {
    pub fn homentrope_p(n: f64, r: f64, s0: f64, rho: f64) -> f64 {
        let t = (rho * (s0 / r).exp()).powf(2.0 / n);
        r * rho * t
    }
}

/// The van der Waals constants of the reference flow, written out.
pub fn reference_constants() -> ConstraintConstants {
    ConstraintConstants {
        c1: -6.0,
        c2: 1.0,
        c3: -1.0,
        c5: 240.0,
        c6: -8.0 / 3.0,
        c7: 3.0,
        alpha1: 1.0,
        alpha2: 2.0,
        alpha3: 1.0,
        s0: reference_s0(),
        n: 3.0,
    }
}

/// `x_rho` by central differences of the library's closed-form position.
pub fn x_rho(m: &SolutionManifold, rho: f64, t: f64) -> f64 {
    let h = 1e-6 * rho;
    central(|r| m.position(r, t).unwrap_or(f64::NAN), rho, h)
}

/// Latest time at which `x_rho(rho, .)` vanishes: the `+` caustic time.
pub fn fold_time(m: &SolutionManifold, rho: f64) -> Option<f64> {
    let f = |t: f64| x_rho(m, rho, t);
    let mut last = None;
    let (lo, hi, steps) = (-60.0, 400.0, 460);
    let dt = (hi - lo) / steps as f64;
    for i in 0..steps {
        let (a, b) = (lo + dt * i as f64, lo + dt * (i + 1) as f64);
        if f(a) * f(b) <= 0.0 {
            last = Some((a, b));
        }
    }
    let (a, b) = last?;
    bisect(f, a, b, 100)
}

/// Minimum of the `+` caustic time: log scan, then golden section.
pub fn caustic_minimum(m: &SolutionManifold) -> (f64, f64) {
    let grid: Vec<f64> = (0..=80)
        .map(|i| (0.02f64.ln() + (2.9f64.ln() - 0.02f64.ln()) * i as f64 / 80.0).exp())
        .collect();
    let times: Vec<f64> = grid
        .iter()
        .map(|&r| fold_time(m, r).unwrap_or(f64::INFINITY))
        .collect();
    let k = (1..grid.len() - 1)
        .min_by(|&i, &j| times[i].total_cmp(&times[j]))
        .unwrap();
    let ft = |r: f64| fold_time(m, r).unwrap_or(f64::INFINITY);
    golden_min(ft, grid[k - 1], grid[k + 1], 80)
}

/// Densities in `(lo, hi)` where `x_rho` changes sign at time `t`.
pub fn fold_densities(m: &SolutionManifold, t: f64, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..=samples)
        .map(|i| (a + (b - a) * i as f64 / samples as f64).exp())
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&r| x_rho(m, r, t)).collect();
    let mut out = Vec::new();
    for i in 0..samples {
        if vals[i] * vals[i + 1] < 0.0 {
            if let Some(r) = bisect(|r| x_rho(m, r, t), grid[i], grid[i + 1], 100) {
                out.push(r);
            }
        }
    }
    out
}

/// Number of densities on `grid` where `x(rho, t) = x0`, by sign changes.
pub fn preimage_count(xs: &[f64], x0: f64) -> usize {
    xs.windows(2)
        .filter(|w| (w[0] - x0) * (w[1] - x0) < 0.0)
        .count()
}
