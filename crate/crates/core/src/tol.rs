use serde::{Deserialize, Serialize};

/// Every tolerance used by the checks, in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tolerances {
    /// Purely pointwise algebraic identities.
    pub algebraic: f64,
    /// Identities involving first derivatives of fields.
    pub derivative: f64,
    /// Eigenvalues closer than this are merged into one band.
    pub cluster: f64,
    /// Projected frame vectors shorter than this are dropped.
    pub frame_drop: f64,
    /// Distance from `|a| = 1` below which `K±` are considered undefined.
    pub a_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: 1e-10,
            derivative: 1e-8,
            cluster: 1e-6,
            frame_drop: 1e-6,
            a_margin: 1e-6,
        }
    }
}

impl Tolerances {
    /// Override both identity tolerances with a single value.
    pub fn with_uniform(mut self, t: f64) -> Self {
        self.algebraic = t;
        self.derivative = t;
        self
    }
}
