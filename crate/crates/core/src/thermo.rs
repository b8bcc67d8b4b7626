//! Gas models given by a Massieu-Planck potential phi(T, rho).
//!
//! Pressure and energy follow from the potential as `p = -rho^2 T phi_rho` and
//! `e = T^2 phi_T`. The van der Waals model works in reduced variables, so its
//! critical point sits at `(T, rho, p) = (1, 1, 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::fd_step;

/// Distance from the van der Waals density bounds treated as out of domain.
pub const DOMAIN_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ideal,
    #[serde(rename = "vdw")]
    VanDerWaals,
}

/// A gas model. `gas_constant` is only used by the ideal gas; the van der
/// Waals model is in reduced units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoModel {
    pub kind: ModelKind,
    /// Degrees of freedom.
    pub n: f64,
    pub gas_constant: f64,
}

/// Potential and its partial derivatives up to second order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    pub value: f64,
    pub d_t: f64,
    pub d_rho: f64,
    pub d_tt: f64,
    pub d_rhorho: f64,
    pub d_trho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatePoint {
    pub temperature: f64,
    pub density: f64,
    pub pressure: f64,
    pub energy: f64,
    pub entropy: f64,
}

/// Diagonal coefficients of the quadratic form kappa restricted to the state
/// manifold, in `(T, rho)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaForm {
    pub k_tt: f64,
    pub k_rr: f64,
}

impl KappaForm {
    /// Negative definite form: the state belongs to an applicable phase.
    pub fn is_applicable(&self) -> bool {
        self.k_tt < 0.0 && self.k_rr < 0.0
    }
}

impl ThermoModel {
    pub fn ideal(n: f64, gas_constant: f64) -> Result<Self> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "degrees of freedom n={n} must be > 0"
            )));
        }
        if !(gas_constant > 0.0 && gas_constant.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gas constant R={gas_constant} must be > 0"
            )));
        }
        Ok(Self {
            kind: ModelKind::Ideal,
            n,
            gas_constant,
        })
    }

    pub fn van_der_waals(n: f64) -> Result<Self> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "degrees of freedom n={n} must be > 0"
            )));
        }
        Ok(Self {
            kind: ModelKind::VanDerWaals,
            n,
            gas_constant: 1.0,
        })
    }

    pub fn is_van_der_waals(&self) -> bool {
        self.kind == ModelKind::VanDerWaals
    }

    /// Checks that the density alone is admissible.
    pub fn check_density(&self, rho: f64) -> Result<()> {
        let ok = match self.kind {
            ModelKind::Ideal => rho > 0.0 && rho.is_finite(),
            ModelKind::VanDerWaals => rho > DOMAIN_GUARD && rho < 3.0 - DOMAIN_GUARD,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DensityDomain {
                density: rho,
                reason: match self.kind {
                    ModelKind::Ideal => "ideal gas requires rho > 0",
                    ModelKind::VanDerWaals => "van der Waals requires 0 < rho < 3",
                },
            })
        }
    }

    pub fn check_state(&self, t: f64, rho: f64) -> Result<()> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain {
                temperature: t,
                density: rho,
                reason: "temperature must be > 0",
            });
        }
        self.check_density(rho).map_err(|_| Error::Domain {
            temperature: t,
            density: rho,
            reason: match self.kind {
                ModelKind::Ideal => "ideal gas requires rho > 0",
                ModelKind::VanDerWaals => "van der Waals requires 0 < rho < 3",
            },
        })
    }

    /// Massieu-Planck potential with analytic partials.
    ///
    /// van der Waals: `phi = (4n/3) ln T + 3 rho / T + (8/3) ln(3/rho - 1)`.
    /// Ideal: `phi = R ((n/2) ln T - ln rho - n/2)`, the constant chosen so
    /// that `phi + T phi_T` reproduces `s = R ln(T^{n/2} / rho)` exactly.
    pub fn phi(&self, t: f64, rho: f64) -> Result<Potential> {
        self.check_state(t, rho)?;
        let n = self.n;
        Ok(match self.kind {
            ModelKind::VanDerWaals => {
                let q = 3.0 - rho;
                Potential {
                    value: 4.0 * n / 3.0 * t.ln() + 3.0 * rho / t + 8.0 / 3.0 * (q / rho).ln(),
                    d_t: 4.0 * n / (3.0 * t) - 3.0 * rho / (t * t),
                    d_rho: 3.0 / t - 8.0 / (rho * q),
                    d_tt: -4.0 * n / (3.0 * t * t) + 6.0 * rho / (t * t * t),
                    d_rhorho: 8.0 * (3.0 - 2.0 * rho) / (rho * rho * q * q),
                    d_trho: -3.0 / (t * t),
                }
            }
            ModelKind::Ideal => {
                let r = self.gas_constant;
                Potential {
                    value: r * (0.5 * n * t.ln() - rho.ln() - 0.5 * n),
                    d_t: 0.5 * r * n / t,
                    d_rho: -r / rho,
                    d_tt: -0.5 * r * n / (t * t),
                    d_rhorho: r / (rho * rho),
                    d_trho: 0.0,
                }
            }
        })
    }

    /// Offset between `phi + T phi_T` and the printed entropy convention.
    pub fn entropy_offset(&self) -> f64 {
        match self.kind {
            ModelKind::VanDerWaals => 4.0 * self.n / 3.0,
            ModelKind::Ideal => 0.0,
        }
    }

    pub fn eval_state(&self, t: f64, rho: f64) -> Result<StatePoint> {
        let phi = self.phi(t, rho)?;
        Ok(StatePoint {
            temperature: t,
            density: rho,
            pressure: -rho * rho * t * phi.d_rho,
            energy: t * t * phi.d_t,
            entropy: phi.value + t * phi.d_t - self.entropy_offset(),
        })
    }

    pub fn pressure(&self, t: f64, rho: f64) -> Result<f64> {
        let phi = self.phi(t, rho)?;
        Ok(-rho * rho * t * phi.d_rho)
    }

    /// `(d p / d rho)` at constant temperature, `-T rho^2 k_rr`.
    pub fn pressure_density_slope(&self, t: f64, rho: f64) -> Result<f64> {
        let phi = self.phi(t, rho)?;
        Ok(-t * (2.0 * rho * phi.d_rho + rho * rho * phi.d_rhorho))
    }

    /// `phi + rho phi_rho`; the specific Gibbs potential is `-T` times this.
    pub fn gibbs_reduced(&self, t: f64, rho: f64) -> Result<f64> {
        let phi = self.phi(t, rho)?;
        Ok(phi.value + rho * phi.d_rho)
    }

    pub fn kappa(&self, t: f64, rho: f64) -> Result<KappaForm> {
        let phi = self.phi(t, rho)?;
        Ok(KappaForm {
            k_tt: -(2.0 * phi.d_t / t + phi.d_tt),
            k_rr: 2.0 * phi.d_rho / rho + phi.d_rhorho,
        })
    }

    /// Temperature at which `k_rr` vanishes for the given density,
    /// `T = rho (3 - rho)^2 / 4`.
    pub fn spinodal_t(&self, rho: f64) -> Result<f64> {
        match self.kind {
            ModelKind::Ideal => Err(Error::NoSpinodal),
            ModelKind::VanDerWaals => {
                self.check_density(rho)?;
                Ok(rho * (3.0 - rho).powi(2) / 4.0)
            }
        }
    }
}

/// Defect of the Lagrangian condition `(-rho^-2 T^-1 P)_T = (T^-2 E)_rho`,
/// both sides by central differences.
pub fn lagrangian_residual<P, E>(pressure: P, energy: E, t: f64, rho: f64) -> f64
where
    P: Fn(f64, f64) -> f64,
    E: Fn(f64, f64) -> f64,
{
    let ht = fd_step(t);
    let hr = fd_step(rho);
    let lhs = |tt: f64| -pressure(tt, rho) / (rho * rho * tt);
    let rhs = |rr: f64| energy(t, rr) / (t * t);
    let d_lhs = (lhs(t + ht) - lhs(t - ht)) / (2.0 * ht);
    let d_rhs = (rhs(rho + hr) - rhs(rho - hr)) / (2.0 * hr);
    (d_lhs - d_rhs).abs()
}

/// Lagrangian residual of a built-in model's own `(P, E)` pair.
pub fn model_lagrangian_residual(model: &ThermoModel, t: f64, rho: f64) -> f64 {
    let p = |tt: f64, rr: f64| model.pressure(tt, rr).unwrap_or(f64::NAN);
    let e = |tt: f64, rr: f64| {
        model
            .eval_state(tt, rr)
            .map(|s| s.energy)
            .unwrap_or(f64::NAN)
    };
    lagrangian_residual(p, e, t, rho)
}
