use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Distance below which a point counts as lying on a curve.
    pub on_curve: f64,
    /// Speed below which a tangent counts as vanishing.
    pub tangent: f64,
    /// Residual accepted by the variety corrector.
    pub trace: f64,
    /// Residual accepted for reported certificates.
    pub report: f64,
    /// Bound on the imaginary part of the normalized cross-ratio.
    pub concyclic: f64,
    /// Curvature below which a point is treated as flat.
    pub curvature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            on_curve: 1e-9,
            tangent: 1e-12,
            trace: 1e-10,
            report: 1e-8,
            concyclic: 1e-9,
            curvature: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [
            ("on_curve", self.on_curve),
            ("tangent", self.tangent),
            ("trace", self.trace),
            ("report", self.report),
            ("concyclic", self.concyclic),
            ("curvature", self.curvature),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::Error::Input(format!(
                    "tolerance {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}
