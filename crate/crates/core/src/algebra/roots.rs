//! Numeric root listing for diagnostics (Aberth–Ehrlich iteration).
//!
//! Nothing here gates admissibility; the exact tests live in
//! [`super::stability`] and [`super::cyclotomic`].

use num_complex::Complex64;
use serde::Serialize;

use super::polynomial::Polynomial;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
pub const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl ComplexPoint {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        ComplexPoint { re: z.re, im: z.im }
    }
}

/// Residual bound a returned root must meet:
/// `|q(z)| <= 1e-8 (1 + |z|)^deg max|coeff|`.
pub fn residual_ok(q: &Polynomial, z: Complex64) -> bool {
    let deg = q.degree().unwrap_or(0) as i32;
    let bound = 1e-8 * (1.0 + z.norm()).powi(deg) * q.max_abs_coeff();
    q.eval_complex(z).norm() <= bound
}

/// All complex roots of `q` with multiplicity.
pub fn roots_numeric(q: &Polynomial) -> Result<Vec<ComplexPoint>> {
    let n = match q.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(Error::ConstantPolynomial { degree: 0 }),
        Some(n) => n,
    };
    let coeffs = q.to_f64_coeffs();
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let deriv: Vec<f64> = (1..=n).map(|i| monic[i] * i as f64).collect();

    // Cauchy bound for the initial circle, with an irrational angular offset
    let radius = 1.0 + monic[..n].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let start_radius = radius.clamp(1e-3, 1e6) * 0.5;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(start_radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();

    let horner = |c: &[f64], x: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a);

    for _ in 0..MAX_ITERATIONS {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let p = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let dp = horner(&deriv, z[i]);
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
            let step = if denom.norm() == 0.0 || !denom.is_finite() { ratio } else { ratio / denom };
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step <= TOLERANCE {
            return Ok(z.into_iter().map(ComplexPoint::from).collect());
        }
    }
    if z.iter().all(|&r| r.is_finite() && residual_ok(q, r)) {
        Ok(z.into_iter().map(ComplexPoint::from).collect())
    } else {
        Err(Error::NoConvergence { iterations: MAX_ITERATIONS })
    }
}
