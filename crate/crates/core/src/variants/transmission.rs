//! Probe transmission past a driven transmon and the SNR of a chain of
//! transmons read out in series.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qutrit::SystemParams;
use crate::C64;

/// Effective permittivity of the waveguide.
pub const DEFAULT_EPS_EFF: f64 = 5.9;

/// First factor of the numerator: `Δb + i√γc/2` (default) or
/// `Δb + iγc/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumeratorVariant {
    #[default]
    SqrtGammaC,
    GammaC,
}

/// `v_g = c / √ε_eff` with `c = 1`.
pub fn group_velocity(eps_eff: f64) -> Result<f64> {
    if !(eps_eff.is_finite() && eps_eff > 0.0) {
        return Err(Error::invalid("eps_eff must be positive"));
    }
    Ok(1.0 / eps_eff.sqrt())
}

/// Complex transmission amplitude
///
/// ```text
/// t = [(Δb + iκ)(Δc + iγc/2) - γc α²] / [(Δb + iγc/2 + iγb/v_g)(Δc + iγc/2) - γc α²]
/// ```
///
/// with `κ = √γc/2` or `γc/2` per `variant`.
pub fn transmission(
    delta_b: f64,
    delta_c: f64,
    alpha: f64,
    p: &SystemParams,
    v_g: f64,
    variant: NumeratorVariant,
) -> Result<C64> {
    if !(v_g.is_finite() && v_g > 0.0) {
        return Err(Error::invalid("v_g must be positive"));
    }
    let gc = p.gamma_c;
    let kappa = match variant {
        NumeratorVariant::SqrtGammaC => gc.sqrt() / 2.0,
        NumeratorVariant::GammaC => gc / 2.0,
    };
    let second = Complex64::new(delta_c, gc / 2.0);
    let coupling = C64::from(gc * alpha * alpha);
    let num = Complex64::new(delta_b, kappa) * second - coupling;
    let den = Complex64::new(delta_b, gc / 2.0 + p.gamma_b / v_g) * second - coupling;
    if den.norm() <= 1e-14 * (1.0 + num.norm()) {
        return Err(Error::SingularParameter(format!(
            "transmission denominator vanishes at delta_b = {delta_b}, delta_c = {delta_c}"
        )));
    }
    Ok(num / den)
}

/// Width of the transparency window: distance between the two absorption
/// dips of `|t|²` along `Δb = Δc = δ`, located on a grid of spacing
/// `resolution` within `|δ| ≤ span`.
pub fn window_width(
    alpha: f64,
    p: &SystemParams,
    v_g: f64,
    variant: NumeratorVariant,
    span: f64,
    resolution: f64,
) -> Result<f64> {
    if !(span > 0.0 && resolution > 0.0) {
        return Err(Error::invalid("span and resolution must be positive"));
    }
    let n = (span / resolution).ceil() as usize;
    let t2 = |d: f64| transmission(d, d, alpha, p, v_g, variant).map(|t| t.norm_sqr());
    let dip = |sign: f64| -> Result<f64> {
        let mut best = (f64::INFINITY, 0.0);
        for k in 1..=n {
            let d = sign * k as f64 * resolution;
            let v = t2(d)?;
            if v < best.0 {
                best = (v, d);
            }
        }
        Ok(best.1)
    };
    Ok(dip(1.0)? - dip(-1.0)?)
}

/// A chain of `n` identical transmons with single-node transmission `t_trans`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeParams {
    pub n: usize,
    pub alpha: f64,
    pub v_g: f64,
    pub t_trans: f64,
    pub r: f64,
}

impl CascadeParams {
    pub fn new(n: usize, alpha: f64, v_g: f64, t_trans: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("chain needs at least one transmon"));
        }
        if !(0.0..=1.0).contains(&t_trans) {
            return Err(Error::invalid("transmission probability must lie in [0, 1]"));
        }
        Ok(CascadeParams { n, alpha, v_g, t_trans, r: 1.0 - t_trans })
    }

    /// Node parameters on resonance from the transmission formula.
    pub fn on_resonance(n: usize, alpha: f64, p: &SystemParams, v_g: f64, variant: NumeratorVariant) -> Result<Self> {
        let t = transmission(0.0, 0.0, alpha, p, v_g, variant)?.norm_sqr();
        Self::new(n, alpha, v_g, t.min(1.0))
    }
}

/// `SNR_n = SNR_1 (√n T^{n-1} + Σ_{j=1}^{n-1} (j/√n) T^{j-1} R)`, `R = 1 - T`,
/// to first order in `R`.
pub fn snr_cascade(n: usize, snr_1: f64, t_trans: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("chain needs at least one transmon"));
    }
    if !(0.0..=1.0).contains(&t_trans) {
        return Err(Error::invalid("transmission probability must lie in [0, 1]"));
    }
    let r = 1.0 - t_trans;
    let sn = (n as f64).sqrt();
    let tail: f64 = (1..n).map(|j| j as f64 / sn * t_trans.powi(j as i32 - 1) * r).sum();
    Ok(snr_1 * (sn * t_trans.powi(n as i32 - 1) + tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vg() -> f64 {
        group_velocity(DEFAULT_EPS_EFF).unwrap()
    }

    #[test]
    fn limits_approach_unity() {
        let p = SystemParams::default();
        for v in [NumeratorVariant::SqrtGammaC, NumeratorVariant::GammaC] {
            let t = transmission(0.3, -0.2, 1e4, &p, vg(), v).unwrap();
            assert!((t - C64::from(1.0)).norm() < 1e-6);
            let t = transmission(1e9, 0.5, 0.4, &p, vg(), v).unwrap();
            assert!((t - C64::from(1.0)).norm() < 1e-6);
        }
        assert!(transmission(0.0, 0.0, 0.4, &p, 0.0, NumeratorVariant::SqrtGammaC).is_err());
    }

    #[test]
    fn magnitude_bounded_on_dense_grid() {
        let p = SystemParams::default();
        for v in [NumeratorVariant::SqrtGammaC, NumeratorVariant::GammaC] {
            for ia in 0..=20 {
                let alpha = 0.2 * ia as f64;
                for k in -200..=200 {
                    for l in [-3.0, -0.5, 0.0, 0.5, 3.0] {
                        let d = 0.05 * k as f64;
                        let t = transmission(d, d + l, alpha, &p, vg(), v).unwrap();
                        assert!(t.norm() <= 1.0, "{v:?} alpha {alpha} d {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn window_width_tracks_coupling() {
        let p = SystemParams::default();
        for alpha in [1.0, 2.0, 4.0] {
            let w = window_width(alpha, &p, vg(), NumeratorVariant::SqrtGammaC, 20.0, 1e-3).unwrap();
            let expect = 2.0 * p.gamma_c.sqrt() * alpha;
            assert!((w / expect - 1.0).abs() < 0.2, "alpha {alpha}: {w} vs {expect}");
        }
    }

    #[test]
    fn cascade_limits() {
        assert_eq!(snr_cascade(1, 0.3, 0.2).unwrap(), 0.3);
        for n in 1..=20 {
            let s = snr_cascade(n, 0.3, 1.0).unwrap();
            assert!((s - (n as f64).sqrt() * 0.3).abs() < 1e-15);
        }
        assert!(snr_cascade(0, 0.3, 0.5).is_err());
        assert!(snr_cascade(2, 0.3, 1.5).is_err());
        assert!(CascadeParams::new(3, 0.4, vg(), 0.25).unwrap().r == 0.75);
    }

    proptest! {
        #[test]
        fn cascade_linear_in_snr1(n in 1usize..30, a in -2.0f64..2.0, b in -2.0f64..2.0, t in 0.0f64..=1.0) {
            let lhs = snr_cascade(n, a + b, t).unwrap();
            let rhs = snr_cascade(n, a, t).unwrap() + snr_cascade(n, b, t).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn cascade_continuous_in_t(n in 1usize..30, t in 0.0f64..0.999) {
            let a = snr_cascade(n, 1.0, t).unwrap();
            let b = snr_cascade(n, 1.0, t + 1e-9).unwrap();
            prop_assert!((a - b).abs() < 1e-6);
        }
    }
}
