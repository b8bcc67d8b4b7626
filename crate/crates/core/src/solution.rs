//! The exact multivalued solution as a surface parametrized by `(rho, t)`.
//!
//! Velocity comes from inverting the first quadrature,
//! `t + alpha2 + (C2 - u)/(alpha1 rho) + C3 u / alpha1 = 0`, and position from
//! the second one, `x = -alpha3 - F(rho, u) / alpha1`. Multivaluedness shows
//! up as sign changes of `x_rho` at fixed `t`; profiles are produced by
//! sweeping `rho` and splitting at those folds, never by root-searching `x`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homentropic::{sound_coefficient_a, ConstraintConstants};
use crate::numerics::{bisect, linspace};

/// `|x_rho|` below this marks a point as (numerically) on the caustic.
pub const REGULAR_THRESHOLD: f64 = 1e-3;
/// Step of the finite-difference derivative path.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionManifold {
    pub consts: ConstraintConstants,
}

/// Local first-order data of the surface at one `(rho, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalJet {
    pub u: f64,
    pub x: f64,
    pub u_rho: f64,
    pub u_t: f64,
    pub x_rho: f64,
    pub x_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdeResiduals {
    /// Momentum, `u_t + u u_x + A rho_x`.
    pub momentum: f64,
    /// Mass, `rho_t + (rho u)_x`.
    pub mass: f64,
    /// Differential constraint, `u_x - rho_x (alpha u + beta)`.
    pub constraint: f64,
}

impl PdeResiduals {
    pub fn max_abs(&self) -> f64 {
        self.momentum
            .abs()
            .max(self.mass.abs())
            .max(self.constraint.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileBranchPoint {
    pub x: f64,
    pub rho: f64,
    pub u: f64,
    pub branch_id: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcludedSample {
    pub rho: f64,
    pub reason: String,
}

/// Density/velocity profile at one time, split into x-monotone branches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub t: f64,
    pub points: Vec<ProfileBranchPoint>,
    pub excluded: Vec<ExcludedSample>,
    /// Densities of the refined folds (`x_rho = 0`) inside the sweep.
    pub folds: Vec<f64>,
}

impl SolutionManifold {
    pub fn new(consts: ConstraintConstants) -> Result<Self> {
        consts.validate()?;
        Ok(Self { consts })
    }

    fn one_minus_c3_rho(&self, rho: f64) -> Result<f64> {
        let d = 1.0 - self.consts.c3 * rho;
        if d.abs() < 1e-14 {
            Err(Error::SingularDensity { density: rho })
        } else {
            Ok(d)
        }
    }

    /// `u = (alpha1 rho (t + alpha2) + C2) / (1 - C3 rho)`.
    pub fn velocity(&self, rho: f64, t: f64) -> Result<f64> {
        let c = &self.consts;
        let d = self.one_minus_c3_rho(rho)?;
        Ok((c.alpha1 * rho * (t + c.alpha2) + c.c2) / d)
    }

    /// Residual of the first quadrature at an arbitrary `(rho, t, u)`.
    pub fn quad1_residual(&self, rho: f64, t: f64, u: f64) -> f64 {
        let c = &self.consts;
        t + c.alpha2 + (c.c2 - u) / (c.alpha1 * rho) + c.c3 * u / c.alpha1
    }

    /// `C5`-term of the second quadrature,
    /// `(C3 + C7/rho)^(C6+1) Q(rho) / ((C6+1)(C6+2)(C6+3) C7^3 rho^2)`,
    /// with its derivative in `rho`.
    fn power_part(&self, rho: f64) -> Result<(f64, f64)> {
        let c = &self.consts;
        let (c3, c6, c7) = (c.c3, c.c6, c.c7);
        let wp = c.power_term(rho)?; // w^C6
        let w = c3 + c7 / rho;
        let k = (c6 + 1.0) * (c6 + 2.0) * (c6 + 3.0) * c7.powi(3);
        let q = 2.0 * rho * rho * c3 * c3
            - c7 * c7 * (c6 + 1.0) * (c3 * rho * (c6 + 3.0) - c6 - 2.0)
            + c3 * c7 * rho * (c3 * rho * (c6 + 3.0) - 2.0 * c6 - 2.0);
        let dq = 4.0 * rho * c3 * c3 - c7 * c7 * (c6 + 1.0) * c3 * (c6 + 3.0)
            + c3 * c7 * (2.0 * c3 * rho * (c6 + 3.0) - 2.0 * c6 - 2.0);
        let p = w * wp;
        let dp = (c6 + 1.0) * wp * (-c7 / (rho * rho));
        let value = p * q / (k * rho * rho);
        let deriv = (dp * q + p * dq - 2.0 * p * q / rho) / (k * rho * rho);
        Ok((value, deriv))
    }

    /// `F(rho, u)` of the second quadrature, `x = -alpha3 - F / alpha1`.
    fn quad2_f(&self, rho: f64, u: f64) -> Result<f64> {
        let c = &self.consts;
        let (g, _) = self.power_part(rho)?;
        Ok(
            c.c1 * rho.ln() - c.c1 * c.c3 * rho + 0.5 * c.c3 * u * u + u * (c.c2 - u) / rho
                - c.c5 * g,
        )
    }

    /// Residual of the second quadrature at an arbitrary `(rho, x, u)`.
    pub fn quad2_residual(&self, rho: f64, x: f64, u: f64) -> Result<f64> {
        let c = &self.consts;
        Ok(x + c.alpha3 + self.quad2_f(rho, u)? / c.alpha1)
    }

    pub fn position(&self, rho: f64, t: f64) -> Result<f64> {
        let u = self.velocity(rho, t)?;
        let c = &self.consts;
        Ok(-c.alpha3 - self.quad2_f(rho, u)? / c.alpha1)
    }

    /// Values and analytic first derivatives of `u` and `x` in `(rho, t)`.
    pub fn jet(&self, rho: f64, t: f64) -> Result<LocalJet> {
        let c = &self.consts;
        let d = self.one_minus_c3_rho(rho)?;
        let u = (c.alpha1 * rho * (t + c.alpha2) + c.c2) / d;
        let u_rho = (c.alpha1 * (t + c.alpha2) + c.c2 * c.c3) / (d * d);
        let u_t = c.alpha1 * rho / d;
        let (g, dg) = self.power_part(rho)?;
        let f = c.c1 * rho.ln() - c.c1 * c.c3 * rho + 0.5 * c.c3 * u * u + u * (c.c2 - u) / rho
            - c.c5 * g;
        let f_rho = c.c1 / rho - c.c1 * c.c3 - u * (c.c2 - u) / (rho * rho) - c.c5 * dg;
        let f_u = c.c3 * u + (c.c2 - 2.0 * u) / rho;
        Ok(LocalJet {
            u,
            x: -c.alpha3 - f / c.alpha1,
            u_rho,
            u_t,
            x_rho: -(f_rho + f_u * u_rho) / c.alpha1,
            x_t: -f_u * u_t / c.alpha1,
        })
    }

    /// Same jet with derivatives from central differences of `velocity` and
    /// `position` (step `FD_STEP`).
    pub fn jet_fd(&self, rho: f64, t: f64) -> Result<LocalJet> {
        let h = FD_STEP * rho.abs().max(1.0);
        let k = FD_STEP * t.abs().max(1.0);
        let u = self.velocity(rho, t)?;
        let x = self.position(rho, t)?;
        Ok(LocalJet {
            u,
            x,
            u_rho: (self.velocity(rho + h, t)? - self.velocity(rho - h, t)?) / (2.0 * h),
            u_t: (self.velocity(rho, t + k)? - self.velocity(rho, t - k)?) / (2.0 * k),
            x_rho: (self.position(rho + h, t)? - self.position(rho - h, t)?) / (2.0 * h),
            x_t: (self.position(rho, t + k)? - self.position(rho, t - k)?) / (2.0 * k),
        })
    }

    /// Residuals of the momentum, mass and constraint equations, with
    /// `x`-derivatives obtained by implicit differentiation of the surface.
    pub fn pde_residuals(&self, rho: f64, t: f64) -> Result<PdeResiduals> {
        let jet = self.jet(rho, t)?;
        self.residuals_from_jet(rho, t, &jet, &self.consts)
    }

    /// As `pde_residuals`, but `A(rho)` in the momentum equation is taken from
    /// `coefficient` instead of the manifold's own constants.
    pub fn pde_residuals_with_coefficient(
        &self,
        rho: f64,
        t: f64,
        coefficient: &ConstraintConstants,
    ) -> Result<PdeResiduals> {
        let jet = self.jet(rho, t)?;
        self.residuals_from_jet(rho, t, &jet, coefficient)
    }

    pub fn pde_residuals_fd(&self, rho: f64, t: f64) -> Result<PdeResiduals> {
        let jet = self.jet_fd(rho, t)?;
        self.residuals_from_jet(rho, t, &jet, &self.consts)
    }

    fn residuals_from_jet(
        &self,
        rho: f64,
        t: f64,
        jet: &LocalJet,
        coefficient: &ConstraintConstants,
    ) -> Result<PdeResiduals> {
        if jet.x_rho.abs() < REGULAR_THRESHOLD {
            return Err(Error::CausticPoint {
                density: rho,
                time: t,
                x_rho: jet.x_rho,
            });
        }
        let c = &self.consts;
        let a = sound_coefficient_a(coefficient, rho)?;
        let rho_x = 1.0 / jet.x_rho;
        let rho_t = -jet.x_t / jet.x_rho;
        let u_x = jet.u_rho / jet.x_rho;
        let u_t = jet.u_t - jet.u_rho * jet.x_t / jet.x_rho;
        let denom = rho * (c.c3 * rho - 1.0);
        let alpha = -1.0 / denom;
        let beta = c.c2 / denom;
        let u = jet.u;
        Ok(PdeResiduals {
            momentum: u_t + u * u_x + a * rho_x,
            mass: rho_t + rho_x * u + rho * u_x,
            constraint: u_x - rho_x * (alpha * u + beta),
        })
    }

    /// Sweeps `rho` over `rho_range` at time `t` and splits the curve into
    /// x-monotone branches. Failing samples are recorded, not dropped.
    pub fn density_profile(
        &self,
        t: f64,
        rho_range: (f64, f64),
        samples: usize,
    ) -> Result<Profile> {
        if samples < 2 {
            return Err(Error::InvalidParameter(
                "a profile needs at least 2 samples".into(),
            ));
        }
        let (lo, hi) = rho_range;
        if !(lo > 0.0 && lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "density range ({lo}, {hi}) is invalid"
            )));
        }
        let rhos = linspace(lo, hi, samples);
        let evaluated: Vec<(f64, Result<LocalJet>)> =
            rhos.par_iter().map(|&r| (r, self.jet(r, t))).collect();

        let mut points = Vec::with_capacity(samples);
        let mut excluded = Vec::new();
        let mut folds = Vec::new();
        let mut branch = 0usize;
        let mut prev: Option<(f64, LocalJet)> = None;
        let mut gap = false;
        for (rho, jet) in evaluated {
            let jet = match jet {
                Ok(j) if j.x.is_finite() && j.x_rho.is_finite() => j,
                Ok(_) => {
                    excluded.push(ExcludedSample {
                        rho,
                        reason: "non-finite value".into(),
                    });
                    gap = true;
                    continue;
                }
                Err(e) => {
                    excluded.push(ExcludedSample {
                        rho,
                        reason: e.to_string(),
                    });
                    gap = true;
                    continue;
                }
            };
            if let Some((prev_rho, prev_jet)) = prev {
                if gap {
                    branch += 1;
                } else if prev_jet.x_rho.signum() != jet.x_rho.signum() && jet.x_rho != 0.0 {
                    let fold = self
                        .refine_fold(prev_rho, rho, t)
                        .unwrap_or(0.5 * (prev_rho + rho));
                    folds.push(fold);
                    if let Ok(fj) = self.jet(fold, t) {
                        points.push(ProfileBranchPoint {
                            x: fj.x,
                            rho: fold,
                            u: fj.u,
                            branch_id: branch,
                        });
                        branch += 1;
                        points.push(ProfileBranchPoint {
                            x: fj.x,
                            rho: fold,
                            u: fj.u,
                            branch_id: branch,
                        });
                    } else {
                        branch += 1;
                    }
                }
            }
            gap = false;
            points.push(ProfileBranchPoint {
                x: jet.x,
                rho,
                u: jet.u,
                branch_id: branch,
            });
            prev = Some((rho, jet));
        }
        Ok(Profile {
            t,
            points,
            excluded,
            folds,
        })
    }

    /// Density in `[a, b]` where `x_rho` changes sign, to 1e-10.
    pub fn refine_fold(&self, a: f64, b: f64, t: f64) -> Option<f64> {
        bisect(
            |r| self.jet(r, t).map(|j| j.x_rho).unwrap_or(f64::NAN),
            a,
            b,
            1e-10,
        )
    }
}

impl Profile {
    pub fn branch_count(&self) -> usize {
        self.points
            .iter()
            .map(|p| p.branch_id + 1)
            .max()
            .unwrap_or(0)
    }

    /// `(branch_id, x_min, x_max)` for every branch.
    pub fn branch_extents(&self) -> Vec<(usize, f64, f64)> {
        let mut out: Vec<(usize, f64, f64)> = Vec::new();
        for p in &self.points {
            match out.last_mut() {
                Some(last) if last.0 == p.branch_id => {
                    last.1 = last.1.min(p.x);
                    last.2 = last.2.max(p.x);
                }
                _ => out.push((p.branch_id, p.x, p.x)),
            }
        }
        out
    }

    /// Number of branches whose x-extent contains `x`.
    pub fn cover_count(&self, x: f64) -> usize {
        self.branch_extents()
            .iter()
            .filter(|(_, lo, hi)| *lo <= x && x <= *hi)
            .count()
    }

    /// Maximal x-intervals of constant branch multiplicity, as
    /// `(x_lo, x_hi, branches)`, over the covered x-range.
    pub fn coverage_intervals(&self) -> Vec<(f64, f64, usize)> {
        let extents = self.branch_extents();
        let mut edges: Vec<f64> = extents.iter().flat_map(|&(_, lo, hi)| [lo, hi]).collect();
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let mut out: Vec<(f64, f64, usize)> = Vec::new();
        for w in edges.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let count = extents
                .iter()
                .filter(|(_, lo, hi)| *lo < mid && mid < *hi)
                .count();
            match out.last_mut() {
                Some(last) if last.2 == count && last.1 == w[0] => last.1 = w[1],
                _ => out.push((w[0], w[1], count)),
            }
        }
        out
    }

    /// Total x-width of the region covered by at least three branches.
    pub fn multivalued_width(&self) -> f64 {
        self.coverage_intervals()
            .iter()
            .filter(|iv| iv.2 >= 3)
            .map(|iv| iv.1 - iv.0)
            .sum()
    }
}
