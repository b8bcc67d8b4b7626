//! Small scalar root finders, a minimizer and Gauss-Legendre quadrature.

use std::sync::OnceLock;

/// Bisection on a sign-changing bracket. Stops when the bracket is narrower
/// than `tol` or the function vanishes exactly. Returns `None` if `f(a)` and
/// `f(b)` share a sign.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Golden-section search for a minimum of a unimodal function on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(x, fx), (c, fc), (d, fd)].into_iter().fold(
        (x, fx),
        |best, cand| if cand.1 < best.1 { cand } else { best },
    )
}

/// Central-difference step used by the residual checks.
pub fn fd_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

/// Central first derivative with the default residual-check step.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = fd_step(x);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub const GAUSS_ORDER: usize = 20;

/// Nodes and weights of the `GAUSS_ORDER`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(GAUSS_ORDER))
}

fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let nf = n as f64;
    (0..n)
        .map(|i| {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d.is_finite() { d } else { dp };
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]` with `panels` equal panels.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre();
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + width * k as f64;
        let mid = lo + 0.5 * width;
        let half = 0.5 * width;
        let mut panel = 0.0;
        for &(node, weight) in rule {
            panel += weight * f(mid + half * node);
        }
        total += half * panel;
    }
    total
}

/// Evenly spaced points including both ends; a single point returns `a`.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count)
            .map(|i| {
                if i == count - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let weights: f64 = gauss_legendre().iter().map(|p| p.1).sum();
        assert!((weights - 2.0).abs() < 1e-14);
        // degree 2n-1 = 39 is exact
        let v = integrate(|x| x.powi(38), -1.0, 1.0, 1);
        assert!((v - 2.0 / 39.0).abs() < 1e-14);
        let e = integrate(f64::exp, 0.0, 3.0, 4);
        assert!((e - (3f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, fx) = golden_section_min(|x| (x - 0.7).powi(2) + 3.0, 0.0, 2.0, 1e-10);
        // a quadratic minimum only pins the argmin to about sqrt(eps)
        assert!((x - 0.7).abs() < 1e-7);
        assert!((fx - 3.0).abs() < 1e-14);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.85, 0.99, 15);
        assert_eq!(v.len(), 15);
        assert_eq!(v[0], 0.85);
        assert_eq!(v[14], 0.99);
        assert_eq!(linspace(1.0, 1.0, 1), vec![1.0]);
    }
}
