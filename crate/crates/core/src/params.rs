use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;

/// Wavespeed, amplitude parameter and nonlinearity of the beam profile
/// equation `phi'''' + c^2 phi'' + phi - gamma F(phi^2) phi = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamParameters {
    pub wavespeed: f64,
    pub gamma: f64,
    pub nonlinearity: Nonlinearity,
}

impl BeamParameters {
    pub fn new(wavespeed: f64, gamma: f64, nonlinearity: Nonlinearity) -> Result<Self> {
        if !(wavespeed.is_finite() && (0.0..SQRT_2).contains(&wavespeed)) {
            return Err(Error::InvalidArgument(format!(
                "wavespeed must satisfy 0 <= c < sqrt(2), got {wavespeed}"
            )));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if nonlinearity == Nonlinearity::Exponential && gamma != 1.0 {
            log::warn!("gamma = {gamma} is ignored for the exponential nonlinearity");
        }
        Ok(Self {
            wavespeed,
            gamma,
            nonlinearity,
        })
    }

    /// `F(r) = r`, `gamma = 1`.
    pub fn cubic(wavespeed: f64) -> Result<Self> {
        Self::new(wavespeed, 1.0, Nonlinearity::cubic())
    }

    pub fn chen_mckenna(wavespeed: f64) -> Result<Self> {
        Self::new(wavespeed, 1.0, Nonlinearity::Exponential)
    }

    pub fn with_wavespeed(&self, wavespeed: f64) -> Result<Self> {
        Self::new(wavespeed, self.gamma, self.nonlinearity.clone())
    }
}

/// `phi'''' + mu phi'' + omega phi - phi^3 = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NlsParameters {
    pub mu: f64,
    pub omega: f64,
}

impl NlsParameters {
    pub fn new(mu: f64, omega: f64) -> Result<Self> {
        if !(mu.is_finite() && omega.is_finite() && omega > 0.0 && mu < 2.0 * omega.sqrt()) {
            return Err(Error::InvalidArgument(format!(
                "need omega > 0 and mu < 2 sqrt(omega) (omega > mu^2/4), got mu = {mu}, omega = {omega}"
            )));
        }
        Ok(Self { mu, omega })
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.mu, omega)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    BeamPolynomial,
    BeamExponential,
    Nls,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::BeamPolynomial => "beam-poly",
            Family::BeamExponential => "beam-exp",
            Family::Nls => "nls",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WaveParameters {
    Beam(BeamParameters),
    Nls(NlsParameters),
}

impl WaveParameters {
    pub fn family(&self) -> Family {
        match self {
            WaveParameters::Beam(p) => match p.nonlinearity {
                Nonlinearity::Polynomial(_) => Family::BeamPolynomial,
                Nonlinearity::Exponential => Family::BeamExponential,
            },
            WaveParameters::Nls(_) => Family::Nls,
        }
    }

    /// The continuation parameter: `c` for beams, `omega` for NLS.
    pub fn continuation_value(&self) -> f64 {
        match self {
            WaveParameters::Beam(p) => p.wavespeed,
            WaveParameters::Nls(p) => p.omega,
        }
    }

    pub fn with_continuation_value(&self, value: f64) -> Result<Self> {
        Ok(match self {
            WaveParameters::Beam(p) => WaveParameters::Beam(p.with_wavespeed(value)?),
            WaveParameters::Nls(p) => WaveParameters::Nls(p.with_omega(value)?),
        })
    }

    /// Coefficient of the second-derivative term (`c^2` or `mu`).
    pub fn second_order_coefficient(&self) -> f64 {
        match self {
            WaveParameters::Beam(p) => p.wavespeed * p.wavespeed,
            WaveParameters::Nls(p) => p.mu,
        }
    }

    /// Coefficient of the identity term (`1` or `omega`).
    pub fn linear_coefficient(&self) -> f64 {
        match self {
            WaveParameters::Beam(_) => 1.0,
            WaveParameters::Nls(p) => p.omega,
        }
    }

    /// Linear symbol `k^4 - s k^2 + w` of the profile operator.
    pub fn symbol(&self, k: f64) -> f64 {
        let k2 = k * k;
        k2 * k2 - self.second_order_coefficient() * k2 + self.linear_coefficient()
    }

    /// Minimum of [`Self::symbol`] over real `k`.
    pub fn symbol_min(&self) -> f64 {
        let s = self.second_order_coefficient();
        let w = self.linear_coefficient();
        if s > 0.0 {
            w - s * s / 4.0
        } else {
            w
        }
    }

    pub fn is_exponential(&self) -> bool {
        self.family() == Family::BeamExponential
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beam_window() {
        assert!(BeamParameters::cubic(0.0).is_ok());
        assert!(BeamParameters::cubic(1.41).is_ok());
        assert!(BeamParameters::cubic(SQRT_2).is_err());
        assert!(BeamParameters::cubic(-0.1).is_err());
        assert!(BeamParameters::new(1.0, 0.0, Nonlinearity::cubic()).is_err());
    }

    #[test]
    fn nls_window() {
        assert!(NlsParameters::new(1.0, 1.0).is_ok());
        assert!(NlsParameters::new(1.0, 0.2).is_err());
        assert!(NlsParameters::new(1.0, 0.26).is_ok());
        assert!(NlsParameters::new(-3.0, 0.1).is_ok());
    }

    #[test]
    fn nls_matches_beam_symbol() {
        let beam = WaveParameters::Beam(BeamParameters::cubic(1.0).unwrap());
        let nls = WaveParameters::Nls(NlsParameters::new(1.0, 1.0).unwrap());
        for &k in &[0.0, 0.5, 2.0] {
            assert_eq!(beam.symbol(k), nls.symbol(k));
        }
        assert_eq!(beam.symbol_min(), 0.75);
    }
}
