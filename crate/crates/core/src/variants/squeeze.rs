//! Squeezed-vacuum probe bath.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Squeezing of the probe vacuum: `N = sinh² r`, `M = sinh r cosh r e^{iθ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub r: f64,
    pub theta: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0 && theta.is_finite()) {
            return Err(Error::invalid("squeezing needs finite r >= 0 and finite theta"));
        }
        Ok(SqueezeParams { r, theta })
    }

    /// Squeezing at the phase that lowers the homodyne noise factor `L`.
    pub fn noise_reducing(r: f64) -> Result<Self> {
        let a = Self::new(r, 0.0)?;
        let b = Self::new(r, std::f64::consts::PI)?;
        Ok(if b.l() < a.l() { b } else { a })
    }

    pub fn vacuum() -> Self {
        SqueezeParams { r: 0.0, theta: 0.0 }
    }

    pub fn is_vacuum(&self) -> bool {
        self.r == 0.0
    }

    pub fn n(&self) -> f64 {
        self.r.sinh().powi(2)
    }

    pub fn m(&self) -> C64 {
        Complex64::from_polar(self.r.sinh() * self.r.cosh(), self.theta)
    }

    /// Noise factor `L = 1 + 2N + M + M*` multiplying the homodyne white noise.
    pub fn l(&self) -> f64 {
        let m = self.m();
        let l = C64::from(1.0 + 2.0 * self.n()) + m + m.conj();
        l.re
    }

    /// Squeezing in decibels, `10 log10 e^{2r}`.
    pub fn db(&self) -> f64 {
        20.0 * self.r / std::f64::consts::LN_10
    }

    pub fn r_from_db(db: f64) -> f64 {
        db * std::f64::consts::LN_10 / 20.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn vacuum_reduces_to_plain() {
        let s = SqueezeParams::vacuum();
        assert_eq!(s.n(), 0.0);
        assert_eq!(s.m(), C64::from(0.0));
        assert_eq!(s.l(), 1.0);
    }

    #[test]
    fn noise_reducing_phase_is_pi() {
        let s = SqueezeParams::noise_reducing(0.5).unwrap();
        assert_eq!(s.theta, PI);
        assert!((s.l() - (-1.0f64).exp()).abs() < 1e-12);
        assert!((SqueezeParams::r_from_db(s.db()) - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn squeeze_identities(r in 0.0f64..2.0, th in -10.0f64..10.0) {
            let s = SqueezeParams::new(r, th).unwrap();
            prop_assert!((s.m().norm_sqr() - s.n() * (s.n() + 1.0)).abs() < 1e-12 * (1.0 + s.n().powi(2)));
            let a = SqueezeParams::new(r, 0.0).unwrap().l();
            let b = SqueezeParams::new(r, PI).unwrap().l();
            prop_assert!((a * b - 1.0).abs() < 1e-12);
            prop_assert!((a - (2.0 * r).exp()).abs() < 1e-12 * a);
        }
    }
}
