//! Homentropic reduction `s = s0`: temperature and pressure become functions
//! of density alone, and the flow is governed by `A(rho) = p'(rho) / rho`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thermo::{ModelKind, ThermoModel};

/// Constants of one member of the exact solution family.
///
/// `c1..c7` parametrize the differential constraint and `A(rho)`; there is no
/// `C4`. `alpha1..alpha3` are the integration constants of the implicit
/// solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintConstants {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
    #[serde(rename = "C5")]
    pub c5: f64,
    #[serde(rename = "C6")]
    pub c6: f64,
    #[serde(rename = "C7")]
    pub c7: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub s0: f64,
    pub n: f64,
}

impl ConstraintConstants {
    /// The van der Waals solution with `n = 3`, `C5 = 240` (`s0 = 4 ln 6`),
    /// `C2 = 1`, `alpha = (1, 2, 1)`.
    pub fn reference_vdw() -> Self {
        let model = ThermoModel::van_der_waals(3.0).expect("n = 3 is valid");
        constants_from_model(&model, 4.0 * 6f64.ln(), 1.0, 1.0, 2.0, 1.0)
            .expect("reference constants are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.c1,
            self.c2,
            self.c3,
            self.c5,
            self.c6,
            self.c7,
            self.alpha1,
            self.alpha2,
            self.alpha3,
            self.s0,
            self.n,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("constants must be finite".into()));
        }
        if self.alpha1 == 0.0 {
            return Err(Error::InvalidParameter("alpha1 must be nonzero".into()));
        }
        if self.c7 == 0.0 {
            return Err(Error::InvalidParameter("C7 must be nonzero".into()));
        }
        for bad in [-1.0, -2.0, -3.0] {
            if (self.c6 - bad).abs() < 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "C6 = {} is excluded (C6 must avoid -1, -2, -3)",
                    self.c6
                )));
            }
        }
        Ok(())
    }

    /// `(C3 + C7/rho)^C6`, defined for a positive base only.
    pub fn power_term(&self, rho: f64) -> Result<f64> {
        let base = self.c3 + self.c7 / rho;
        if !(rho > 0.0) || !(base > 0.0) {
            return Err(Error::DensityDomain {
                density: rho,
                reason: "requires rho > 0 and C3 + C7/rho > 0",
            });
        }
        Ok((self.c6 * base.ln()).exp())
    }

    /// Largest admissible density, where `C3 + C7/rho` reaches zero.
    pub fn density_limit(&self) -> f64 {
        if self.c3 < 0.0 {
            -self.c7 / self.c3
        } else {
            f64::INFINITY
        }
    }
}

/// Temperature on the homentrope `s = s0` (printed entropy convention).
pub fn homentrope_t(model: &ThermoModel, s0: f64, rho: f64) -> Result<f64> {
    model.check_density(rho)?;
    let n = model.n;
    Ok(match model.kind {
        ModelKind::VanDerWaals => {
            (3.0 / (4.0 * n) * (s0 - 8.0 / 3.0 * (3.0 / rho - 1.0).ln())).exp()
        }
        ModelKind::Ideal => (rho * (s0 / model.gas_constant).exp()).powf(2.0 / n),
    })
}

pub fn homentrope_p(model: &ThermoModel, s0: f64, rho: f64) -> Result<f64> {
    let t = homentrope_t(model, s0, rho)?;
    model.pressure(t, rho)
}

/// `A(rho) = C1 + (C5 / rho^3) (C3 + C7/rho)^C6`.
pub fn sound_coefficient_a(consts: &ConstraintConstants, rho: f64) -> Result<f64> {
    Ok(consts.c1 + consts.c5 / rho.powi(3) * consts.power_term(rho)?)
}

/// Maps a gas and entropy level onto the constants for which `A(rho)` equals
/// the homentropic `p'(rho)/rho`. `C2` and the alphas are free parameters.
pub fn constants_from_model(
    model: &ThermoModel,
    s0: f64,
    c2: f64,
    alpha1: f64,
    alpha2: f64,
    alpha3: f64,
) -> Result<ConstraintConstants> {
    let n = model.n;
    let c6 = -2.0 - 2.0 / n;
    let consts = match model.kind {
        ModelKind::VanDerWaals => ConstraintConstants {
            c1: -6.0,
            c2,
            c3: -1.0,
            c5: 24.0 * (1.0 + 2.0 / n) * (3.0 * s0 / (4.0 * n)).exp(),
            c6,
            c7: 3.0,
            alpha1,
            alpha2,
            alpha3,
            s0,
            n,
        },
        ModelKind::Ideal => {
            let r = model.gas_constant;
            ConstraintConstants {
                c1: 0.0,
                c2,
                c3: 0.0,
                c5: r * (1.0 + 2.0 / n) * (2.0 * s0 / (r * n)).exp(),
                c6,
                c7: 1.0,
                alpha1,
                alpha2,
                alpha3,
                s0,
                n,
            }
        }
    };
    consts.validate()?;
    Ok(consts)
}

/// Inverse of the `C5` mapping: the entropy level that yields `c5`.
pub fn entropy_from_c5(model: &ThermoModel, c5: f64) -> Result<f64> {
    if !(c5 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "C5 = {c5} must be positive"
        )));
    }
    let n = model.n;
    Ok(match model.kind {
        ModelKind::VanDerWaals => 4.0 * n / 3.0 * (c5 / (24.0 * (1.0 + 2.0 / n))).ln(),
        ModelKind::Ideal => {
            let r = model.gas_constant;
            r * n / 2.0 * (c5 / (r * (1.0 + 2.0 / n))).ln()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vdw3() -> ThermoModel {
        ThermoModel::van_der_waals(3.0).unwrap()
    }

    #[test]
    fn homentrope_closed_forms() {
        let m = vdw3();
        let s0 = 0.7;
        assert!((homentrope_t(&m, s0, 1.5).unwrap() - (s0 / 4.0).exp()).abs() < 1e-14);
        let s0 = 4.0 * 6f64.ln();
        assert!((homentrope_t(&m, s0, 1.5).unwrap() - 6.0).abs() < 1e-13);
        assert!((homentrope_p(&m, s0, 1.5).unwrap() - 41.25).abs() < 1e-12);
        assert!(homentrope_t(&m, s0, 3.0).is_err());
    }

    #[test]
    fn pressure_vanishes_at_low_density() {
        let m = vdw3();
        let ideal = ThermoModel::ideal(3.0, 1.0).unwrap();
        assert!(homentrope_p(&m, 1.0, 1e-9).unwrap().abs() < 1e-8);
        assert!(homentrope_p(&ideal, 1.0, 1e-9).unwrap().abs() < 1e-8);
    }

    #[test]
    fn reference_constants() {
        let c = ConstraintConstants::reference_vdw();
        assert_eq!((c.c1, c.c3, c.c7), (-6.0, -1.0, 3.0));
        assert!((c.c6 + 8.0 / 3.0).abs() < 1e-15);
        assert!((c.c5 - 240.0).abs() < 1e-11);
        let a = sound_coefficient_a(&c, 1.5).unwrap();
        assert!((a - (-6.0 + 240.0 / 3.375)).abs() < 1e-11);
    }

    #[test]
    fn ideal_constants() {
        let m = ThermoModel::ideal(3.0, 1.0).unwrap();
        let c = constants_from_model(&m, 0.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        assert!((c.c5 - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!((c.c1, c.c3, c.c7), (0.0, 0.0, 1.0));
        let a = sound_coefficient_a(&c, 2.0).unwrap();
        assert!((a - c.c5 * 2f64.powf(2.0 / 3.0 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn invalid_parameters() {
        let m = vdw3();
        assert!(matches!(
            constants_from_model(&m, 1.0, 1.0, 0.0, 2.0, 1.0),
            Err(Error::InvalidParameter(_))
        ));
        // n = 2 gives C6 = -3
        let ideal = ThermoModel::ideal(2.0, 1.0).unwrap();
        assert!(matches!(
            constants_from_model(&ideal, 1.0, 1.0, 1.0, 2.0, 1.0),
            Err(Error::InvalidParameter(_))
        ));
        let c = ConstraintConstants::reference_vdw();
        assert!(sound_coefficient_a(&c, 3.5).is_err());
    }

    proptest! {
        #[test]
        fn homentrope_round_trip(s0 in -5.0f64..10.0, rho in 0.01f64..2.99, n in 1.0f64..7.0) {
            let m = ThermoModel::van_der_waals(n).unwrap();
            let t = homentrope_t(&m, s0, rho).unwrap();
            let s = m.eval_state(t, rho).unwrap().entropy;
            prop_assert!((s - s0).abs() <= 1e-12 * s0.abs().max(1.0));
        }

        #[test]
        fn ideal_homentrope_round_trip(s0 in -5.0f64..5.0, rho in 0.01f64..10.0, r in 0.5f64..3.0) {
            let m = ThermoModel::ideal(3.0, r).unwrap();
            let t = homentrope_t(&m, s0, rho).unwrap();
            let s = m.eval_state(t, rho).unwrap().entropy;
            prop_assert!((s - s0).abs() <= 1e-12 * s0.abs().max(1.0));
        }

        #[test]
        fn c5_readback(s0 in -5.0f64..10.0, n in 1.0f64..7.0) {
            for m in [ThermoModel::van_der_waals(n).unwrap(), ThermoModel::ideal(n, 1.3).unwrap()] {
                if let Ok(c) = constants_from_model(&m, s0, 1.0, 1.0, 2.0, 1.0) {
                    let back = entropy_from_c5(&m, c.c5).unwrap();
                    prop_assert!((back - s0).abs() <= 1e-12 * s0.abs().max(1.0));
                }
            }
        }

        #[test]
        fn vdw_temperature_monotone(s0 in -5.0f64..10.0, rho in 0.01f64..2.9, ds in 1e-3f64..1.0, dr in 1e-3f64..0.05) {
            let m = vdw3();
            let t = homentrope_t(&m, s0, rho).unwrap();
            prop_assert!(homentrope_t(&m, s0 + ds, rho).unwrap() > t);
            prop_assert!(homentrope_t(&m, s0, rho + dr).unwrap() > t);
        }
    }
}
