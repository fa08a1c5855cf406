use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square well of depth `v` on `|x| <= a` for a particle of mass `m` (natural units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellParams {
    pub m: f64,
    pub a: f64,
    #[serde(rename = "V")]
    pub v: f64,
}

impl WellParams {
    pub fn new(m: f64, a: f64, v: f64) -> Result<Self> {
        let p = WellParams { m, a, v };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(Error::InvalidParams(format!("mass must be positive, got {}", self.m)));
        }
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::InvalidParams(format!("half-width must be positive, got {}", self.a)));
        }
        if !(self.v.is_finite() && self.v >= 0.0) {
            return Err(Error::InvalidParams(format!("depth must be non-negative, got {}", self.v)));
        }
        Ok(())
    }

    pub fn with_depth(&self, v: f64) -> Self {
        WellParams { v, ..*self }
    }

    /// Depth at which the lowest even level reaches `-m`.
    pub fn v_first_critical(&self) -> f64 {
        crate::spectrum::disappearance_depth(self.m, self.a, Parity::Even, 0)
    }
}

impl Default for WellParams {
    fn default() -> Self {
        WellParams { m: 1.0, a: 0.7, v: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// Spinor at `x = 0`: even states have `w(0) = 0`, odd states `u(0) = 0`.
    pub fn start(self) -> [f64; 2] {
        match self {
            Parity::Even => [1.0, 0.0],
            Parity::Odd => [0.0, 1.0],
        }
    }

    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];
}

/// Sign of the energy branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergySign {
    Positive,
    Negative,
}

impl EnergySign {
    pub fn value(self) -> f64 {
        match self {
            EnergySign::Positive => 1.0,
            EnergySign::Negative => -1.0,
        }
    }

    pub fn of(e: f64) -> Self {
        if e >= 0.0 {
            EnergySign::Positive
        } else {
            EnergySign::Negative
        }
    }

    pub const BOTH: [EnergySign; 2] = [EnergySign::Positive, EnergySign::Negative];
}
