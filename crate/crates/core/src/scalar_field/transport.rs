use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

/// Monotone one-dimensional maps used to move values between bounded and
/// unbounded intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Transport {
    /// `ℝ → (−π/2, π/2)`, 1-Lipschitz.
    Arctan,
    /// `(−π/2, π/2) → ℝ`, locally Lipschitz.
    Tan,
    /// `t ↦ 1/t` on `(0, ∞)`, locally Lipschitz.
    Reciprocal,
    /// `t ↦ scale·t + shift`.
    Affine { scale: f64, shift: f64 },
}

impl Transport {
    pub fn name(&self) -> &'static str {
        match self {
            Transport::Arctan => "arctan",
            Transport::Tan => "tan",
            Transport::Reciprocal => "reciprocal",
            Transport::Affine { .. } => "affine",
        }
    }

    pub fn in_domain(&self, t: f64) -> bool {
        match self {
            Transport::Arctan | Transport::Affine { .. } => !t.is_nan(),
            Transport::Tan => t.abs() < FRAC_PI_2,
            Transport::Reciprocal => t > 0.0,
        }
    }

    /// Applies the map, or `None` outside its domain.
    pub fn apply(&self, t: f64) -> Option<f64> {
        if !self.in_domain(t) {
            return None;
        }
        Some(match *self {
            Transport::Arctan => t.atan(),
            Transport::Tan => t.tan(),
            Transport::Reciprocal => 1.0 / t,
            Transport::Affine { scale, shift } => scale * t + shift,
        })
    }

    pub fn inverse(&self) -> Transport {
        match *self {
            Transport::Arctan => Transport::Tan,
            Transport::Tan => Transport::Arctan,
            Transport::Reciprocal => Transport::Reciprocal,
            Transport::Affine { scale, shift } => Transport::Affine {
                scale: 1.0 / scale,
                shift: -shift / scale,
            },
        }
    }
}
