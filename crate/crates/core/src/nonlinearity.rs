//! Nonlinearity families and the potentials they induce in `L_-` and `L_+`.
//!
//! The polynomial family is `F(r) = sum_{k=1}^N a_k r^k` with `a_k >= 0`,
//! entering the beam profile equation as `gamma F(phi^2) phi`. The
//! exponential family is the Chen–McKenna term `e^phi - 1`; it has no phase
//! symmetry, so it carries no `L_-` and ignores `gamma`.

use crate::error::{Error, Result};
use crate::grid::RealField;

#[derive(Clone, Debug, PartialEq)]
pub enum Nonlinearity {
    /// Coefficients `a_1..a_N` of `F(r) = sum a_k r^k`.
    Polynomial(Vec<f64>),
    Exponential,
}

impl Nonlinearity {
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if coefficients.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidArgument(
                "polynomial coefficients must be finite and non-negative".into(),
            ));
        }
        if coefficients.iter().all(|a| *a == 0.0) {
            return Err(Error::InvalidArgument(
                "polynomial needs at least one positive coefficient".into(),
            ));
        }
        Ok(Nonlinearity::Polynomial(coefficients))
    }

    /// `F(r) = r`, the cubic case.
    pub fn cubic() -> Self {
        Nonlinearity::Polynomial(vec![1.0])
    }

    pub fn exponential() -> Self {
        Nonlinearity::Exponential
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Nonlinearity::Polynomial(_) => "polynomial",
            Nonlinearity::Exponential => "exponential",
        }
    }

    pub fn is_cubic(&self) -> bool {
        matches!(self, Nonlinearity::Polynomial(a) if a.len() == 1 && a[0] == 1.0)
    }

    fn coefficients(&self) -> Result<&[f64]> {
        match self {
            Nonlinearity::Polynomial(a) => Ok(a),
            Nonlinearity::Exponential => Err(Error::UnsupportedForFamily("exponential")),
        }
    }

    pub fn eval_f(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(poly_f(self.coefficients()?, r))
    }

    pub fn eval_f_prime(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(poly_f_prime(self.coefficients()?, r))
    }

    pub fn eval_g(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        Ok(poly_g(self.coefficients()?, r))
    }

    /// Pointwise non-differential part of the profile equation:
    /// `phi - gamma F(phi^2) phi`, or `e^phi - 1`.
    pub fn zeroth_order(&self, gamma: f64, phi: f64) -> f64 {
        match self {
            Nonlinearity::Polynomial(a) => phi - gamma * poly_f(a, phi * phi) * phi,
            Nonlinearity::Exponential => phi.exp_m1(),
        }
    }

    /// Derivative of [`Self::zeroth_order`] in `phi`.
    pub fn zeroth_order_derivative(&self, gamma: f64, phi: f64) -> f64 {
        match self {
            Nonlinearity::Polynomial(a) => {
                let r = phi * phi;
                1.0 - gamma * (poly_f(a, r) + 2.0 * poly_f_prime(a, r) * r)
            }
            Nonlinearity::Exponential => phi.exp(),
        }
    }

    /// `V_-(phi)` and `V_+(phi)` with `L_pm = (d^4 + c^2 d^2 + 1) - V_pm`.
    pub fn potentials(&self, gamma: f64, phi: f64) -> (Option<f64>, f64) {
        match self {
            Nonlinearity::Polynomial(a) => {
                let r = phi * phi;
                let f = gamma * poly_f(a, r);
                (Some(f), f + 2.0 * gamma * poly_f_prime(a, r) * r)
            }
            Nonlinearity::Exponential => (None, -phi.exp_m1()),
        }
    }

    /// Potential energy density `W(u)` with `W'(u)` equal to the zeroth-order term.
    pub fn potential_energy(&self, gamma: f64, u: f64) -> f64 {
        match self {
            Nonlinearity::Polynomial(a) => 0.5 * u * u - 0.5 * gamma * poly_g(a, u * u),
            Nonlinearity::Exponential => u.exp_m1() - u,
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "F is evaluated at r >= 0, got {r}"
        )))
    }
}

// Horner in r: F(r) = r (a_1 + r (a_2 + ...)).
pub(crate) fn poly_f(a: &[f64], r: f64) -> f64 {
    r * a.iter().rev().fold(0.0, |acc, &ak| acc * r + ak)
}

pub(crate) fn poly_f_prime(a: &[f64], r: f64) -> f64 {
    a.iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (i, &ak)| acc * r + (i + 1) as f64 * ak)
}

pub(crate) fn poly_g(a: &[f64], r: f64) -> f64 {
    r * r
        * a.iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, &ak)| acc * r + ak / (i + 2) as f64)
}

pub fn eval_f(nl: &Nonlinearity, r: f64) -> Result<f64> {
    nl.eval_f(r)
}

pub fn eval_f_prime(nl: &Nonlinearity, r: f64) -> Result<f64> {
    nl.eval_f_prime(r)
}

pub fn eval_g(nl: &Nonlinearity, r: f64) -> Result<f64> {
    nl.eval_g(r)
}

pub fn profile_nonlinear_term(nl: &Nonlinearity, gamma: f64, phi: &RealField) -> RealField {
    phi.map(|p| nl.zeroth_order(gamma, p))
}

/// `(V_-, V_+)`; `V_-` is absent for the exponential family.
pub fn linearization_potentials(
    nl: &Nonlinearity,
    gamma: f64,
    phi: &RealField,
) -> (Option<RealField>, RealField) {
    let v_plus = phi.map(|p| nl.potentials(gamma, p).1);
    let v_minus = match nl {
        Nonlinearity::Polynomial(_) => Some(phi.map(|p| nl.potentials(gamma, p).0.unwrap_or(0.0))),
        Nonlinearity::Exponential => None,
    };
    (v_minus, v_plus)
}
