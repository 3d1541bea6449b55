use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{invalid, Result};

/// Inequality used to bound the mean overshoot `E[R_z]`, `R_z = -z - S_{τ_z}`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum OvershootMethod {
    /// `E[(X⁻)²] / a`
    #[default]
    Lorden,
    /// `A · (3/2) · E|X|³ / E[X²]` with the constant `A ∈ (0, 2]`.
    Mogulskii { a_const: f64 },
    /// Power-moment bound of order `t ∈ (1, 2]`, depending on `z`.
    Prop1 { t: f64 },
}

impl OvershootMethod {
    pub fn mogulskii() -> Self {
        OvershootMethod::Mogulskii { a_const: 2.0 }
    }
}

/// Upper bound on `E[R_z]`.
pub fn overshoot_ub(spec: &DistributionSpec, z: f64, method: OvershootMethod) -> Result<f64> {
    let a = spec.validate()?;
    if !(z >= 0.0 && z.is_finite()) {
        return Err(invalid(format!(
            "stopping depth z must be nonnegative, got {z}"
        )));
    }
    match method {
        OvershootMethod::Lorden => Ok(spec.negative_part_moment(2.0)? / a),
        OvershootMethod::Mogulskii { a_const } => {
            if !(a_const > 0.0 && a_const <= 2.0) {
                return Err(invalid(format!(
                    "Mogul'skii constant must lie in (0, 2], got {a_const}"
                )));
            }
            let third = spec.abs_moment(3.0)?;
            let second = spec.abs_moment(2.0)?;
            Ok(a_const * 1.5 * third / second)
        }
        OvershootMethod::Prop1 { t } => {
            if !(t > 1.0 && t <= 2.0) {
                return Err(invalid(format!(
                    "overshoot order t must lie in (1, 2], got {t}"
                )));
            }
            if !(z > 0.0) {
                return Err(invalid("the power-moment overshoot bound needs z > 0"));
            }
            let a_minus = spec.negative_part_moment(t)?;
            let neg_mean = spec.negative_part_moment(1.0)?;
            let c = t.powf(t / (t - 1.0)) * a_minus.powf(1.0 / (t - 1.0))
                / ((t - 1.0) * a.powf(t / (t - 1.0)));
            Ok(c * (neg_mean + z.powf(2.0 - t) * a_minus / t))
        }
    }
}

/// Upper bound on `E[τ_z] = (z + E[R_z]) / a`.
pub fn tau_mean_ub(spec: &DistributionSpec, z: f64, method: OvershootMethod) -> Result<f64> {
    let a = spec.validate()?;
    Ok((z + overshoot_ub(spec, z, method)?) / a)
}
