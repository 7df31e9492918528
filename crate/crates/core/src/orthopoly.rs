//! Zonal polynomial families used by the kernel expansions.
//!
//! * circle family `P_k^1`: `P_0^1 = 1`, `P_k^1(cos θ) = (2/k) cos kθ`;
//! * Gegenbauer `P_n^m` attached to `(m-1)/2`, normalized so that
//!   `P_n^m(1) = C(n+m-2, n)` (Legendre for `m = 2`);
//! * Jacobi `P_l^{(α,β)}` with the standard normalization `P_l(1) = C(l+α, l)`.
//!
//! Everything is evaluated with three-term recurrences whose coefficients are
//! built incrementally, so no factorials appear. The Gegenbauer recurrence runs
//! on the ratio `P_n^m(t) / P_n^m(1)`, which stays in `[-1, 1]`, and the
//! binomial is applied at the end.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Highest degree any evaluator accepts.
pub const MAX_DEGREE: usize = 10_000;

/// Slack allowed on `|t| <= 1` before an argument is rejected.
pub const ARG_TOL: f64 = 1e-12;

/// Validate an argument and clamp it into `[-1, 1]`.
pub fn check_arg(t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 + ARG_TOL {
        return Err(Error::OutOfRange(t));
    }
    Ok(t.clamp(-1.0, 1.0))
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::UnsupportedDegree(n));
    }
    Ok(())
}

fn check_dimension(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::InvalidDimension(m));
    }
    Ok(())
}

fn check_jacobi_params(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && beta.is_finite() && alpha > -1.0 && beta > -1.0) {
        return Err(Error::InvalidParameters(format!(
            "jacobi needs alpha > -1 and beta > -1, got ({alpha}, {beta})"
        )));
    }
    Ok(())
}

/// `C(n+m-2, n)` as a running product, for every `n <= nmax`.
fn gegenbauer_norms(nmax: usize, m: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(nmax + 1);
    let mut c = 1.0_f64;
    out.push(c);
    for n in 1..=nmax {
        c *= (m as f64 - 2.0 + n as f64) / n as f64;
        if !c.is_finite() {
            return Err(Error::Overflow(format!("C({}, {n})", n + m - 2)));
        }
        out.push(c);
    }
    Ok(out)
}

/// `P_n^m(1) = C(n+m-2, n)`.
pub fn gegenbauer_at_one(n: usize, m: usize) -> Result<f64> {
    check_dimension(m)?;
    check_degree(n)?;
    Ok(*gegenbauer_norms(n, m)?.last().unwrap())
}

/// Ratios `P_n^m(t) / P_n^m(1)` for `n = 0..=nmax`.
pub fn gegenbauer_ratio_all(nmax: usize, m: usize, t: f64) -> Result<Vec<f64>> {
    check_dimension(m)?;
    check_degree(nmax)?;
    let t = check_arg(t)?;
    let mf = m as f64;
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(1.0);
    if nmax >= 1 {
        out.push(t);
    }
    for n in 2..=nmax {
        let nf = n as f64;
        let r = ((2.0 * nf + mf - 3.0) * t * out[n - 1] - (nf - 1.0) * out[n - 2]) / (nf + mf - 2.0);
        out.push(r);
    }
    Ok(out)
}

/// `P_n^m(t)` for every `n = 0..=nmax`.
pub fn gegenbauer_all(nmax: usize, m: usize, t: f64) -> Result<Vec<f64>> {
    let ratios = gegenbauer_ratio_all(nmax, m, t)?;
    let norms = gegenbauer_norms(nmax, m)?;
    Ok(ratios.iter().zip(&norms).map(|(r, c)| r * c).collect())
}

pub fn gegenbauer(n: usize, m: usize, t: f64) -> Result<f64> {
    Ok(gegenbauer_all(n, m, t)?[n])
}

/// `P_l^m(t) / P_l^m(1)`. Tends to zero in `l` for fixed `|t| < 1`.
pub fn ratio_at(l: usize, m: usize, t: f64) -> Result<f64> {
    Ok(gegenbauer_ratio_all(l, m, t)?[l])
}

/// Circle family for every `k = 0..=kmax`, via the Chebyshev recurrence.
pub fn circle_poly_all(kmax: usize, t: f64) -> Result<Vec<f64>> {
    check_degree(kmax)?;
    let t = check_arg(t)?;
    let mut cheb = Vec::with_capacity(kmax + 1);
    cheb.push(1.0);
    if kmax >= 1 {
        cheb.push(t);
    }
    for k in 2..=kmax {
        let next = 2.0 * t * cheb[k - 1] - cheb[k - 2];
        cheb.push(next);
    }
    Ok(cheb
        .into_iter()
        .enumerate()
        .map(|(k, tk)| if k == 0 { 1.0 } else { 2.0 / k as f64 * tk })
        .collect())
}

pub fn circle_poly(k: usize, t: f64) -> Result<f64> {
    Ok(circle_poly_all(k, t)?[k])
}

/// `P_k^1(1)`: 1 for `k = 0`, `2/k` otherwise.
pub fn circle_at_one(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        2.0 / k as f64
    }
}

/// Jacobi polynomials `P_l^{(α,β)}(t)` for every `l = 0..=lmax`.
pub fn jacobi_all(lmax: usize, alpha: f64, beta: f64, t: f64) -> Result<Vec<f64>> {
    check_jacobi_params(alpha, beta)?;
    check_degree(lmax)?;
    let t = check_arg(t)?;
    let ab = alpha + beta;
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(1.0);
    if lmax >= 1 {
        out.push((alpha + 1.0) + (ab + 2.0) * (t - 1.0) / 2.0);
    }
    for n in 2..=lmax {
        let nf = n as f64;
        let s = 2.0 * nf + ab;
        let a = 2.0 * nf * (nf + ab) * (s - 2.0);
        let b = (s - 1.0) * (s * (s - 2.0) * t + alpha * alpha - beta * beta);
        let c = 2.0 * (nf + alpha - 1.0) * (nf + beta - 1.0) * s;
        out.push((b * out[n - 1] - c * out[n - 2]) / a);
    }
    Ok(out)
}

pub fn jacobi(l: usize, alpha: f64, beta: f64, t: f64) -> Result<f64> {
    Ok(jacobi_all(l, alpha, beta, t)?[l])
}

/// Generalized binomial `C(l+α, l) = Γ(l+α+1) / (Γ(l+1) Γ(α+1))`, via log-Gamma.
pub fn generalized_binomial(l: usize, alpha: f64) -> f64 {
    let lf = l as f64;
    (ln_gamma(lf + alpha + 1.0) - ln_gamma(lf + 1.0) - ln_gamma(alpha + 1.0)).exp()
}

/// Jacobi value at 1, `C(l+α, l)`.
pub fn jacobi_at_one(l: usize, alpha: f64, beta: f64) -> Result<f64> {
    check_jacobi_params(alpha, beta)?;
    check_degree(l)?;
    Ok(generalized_binomial(l, alpha))
}

/// One of the three polynomial families, with its parameters bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ZonalFamily {
    Circle,
    Gegenbauer { m: usize },
    Jacobi { alpha: f64, beta: f64 },
}

impl ZonalFamily {
    /// Values of degrees `0..=nmax` at `t`.
    pub fn eval_all(&self, nmax: usize, t: f64) -> Result<Vec<f64>> {
        match *self {
            ZonalFamily::Circle => circle_poly_all(nmax, t),
            ZonalFamily::Gegenbauer { m } => gegenbauer_all(nmax, m, t),
            ZonalFamily::Jacobi { alpha, beta } => jacobi_all(nmax, alpha, beta, t),
        }
    }

    pub fn eval(&self, n: usize, t: f64) -> Result<f64> {
        Ok(self.eval_all(n, t)?[n])
    }

    pub fn at_one(&self, n: usize) -> Result<f64> {
        match *self {
            ZonalFamily::Circle => Ok(circle_at_one(n)),
            ZonalFamily::Gegenbauer { m } => gegenbauer_at_one(n, m),
            ZonalFamily::Jacobi { alpha, beta } => jacobi_at_one(n, alpha, beta),
        }
    }

    /// Whether degree parity is an even/odd symmetry of the family on `[-1, 1]`.
    pub fn has_parity_symmetry(&self) -> bool {
        match *self {
            ZonalFamily::Circle | ZonalFamily::Gegenbauer { .. } => true,
            ZonalFamily::Jacobi { alpha, beta } => alpha == beta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    /// Textbook Legendre recurrence, independent of the ratio form above.
    fn legendre(n: usize, t: f64) -> f64 {
        let (mut p0, mut p1) = (1.0, t);
        if n == 0 {
            return p0;
        }
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    #[test]
    fn gegenbauer_examples() {
        assert_relative_eq!(gegenbauer(2, 3, 1.0).unwrap(), 3.0, epsilon = 1e-14);
        assert_eq!(gegenbauer(0, 5, 0.3).unwrap(), 1.0);
        assert_relative_eq!(gegenbauer(2, 2, 0.5).unwrap(), legendre(2, 0.5), epsilon = 1e-15);
        assert_relative_eq!(gegenbauer(2, 2, 0.5).unwrap(), -0.125, epsilon = 1e-15);
    }

    #[test]
    fn gegenbauer_m2_is_legendre() {
        for n in 0..40 {
            for i in 0..=20 {
                let t = -1.0 + 0.1 * i as f64;
                assert!((gegenbauer(n, 2, t).unwrap() - legendre(n, t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gegenbauer_m4_closed_form() {
        // λ = 3/2: C_2(t) = λ(2(λ+1)t² - 1) = 3/2 (5t² - 1)
        for &t in &[-0.9, -0.2, 0.0, 0.4, 1.0] {
            let want = 1.5 * (5.0 * t * t - 1.0);
            assert_relative_eq!(gegenbauer(2, 4, t).unwrap(), want, epsilon = 1e-13);
        }
    }

    #[test]
    fn circle_examples() {
        assert_eq!(circle_poly(0, -0.7).unwrap(), 1.0);
        assert_relative_eq!(circle_poly(1, 1.0).unwrap(), 2.0);
        let direct = 2.0 / 4.0 * (4.0 * PI / 4.0).cos();
        assert_relative_eq!(circle_poly(4, (PI / 4.0).cos()).unwrap(), direct, epsilon = 1e-14);
        assert_relative_eq!(direct, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(0, 0.3, 3.0, -0.4).unwrap(), 1.0);
        assert_relative_eq!(jacobi(1, 1.0, 0.0, 0.0).unwrap(), 0.5, epsilon = 1e-15);
        // C(3.5, 3) = 3.5 * 2.5 * 1.5 / 6
        let oracle = 3.5 * 2.5 * 1.5 / 6.0;
        assert_relative_eq!(jacobi(3, 0.5, 0.0, 1.0).unwrap(), oracle, epsilon = 1e-13);
        assert_relative_eq!(generalized_binomial(3, 0.5), oracle, epsilon = 1e-12);
        assert_relative_eq!(oracle, 2.1875, epsilon = 1e-15);
    }

    #[test]
    fn jacobi_alpha_eq_beta_matches_legendre() {
        for n in 0..25 {
            for &t in &[-1.0, -0.3, 0.25, 0.8] {
                assert!((jacobi(n, 0.0, 0.0, t).unwrap() - legendre(n, t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ratio_examples() {
        assert_relative_eq!(ratio_at(7, 3, 1.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(ratio_at(5, 4, -1.0).unwrap(), -1.0, epsilon = 1e-14);
        assert_relative_eq!(ratio_at(2, 2, 0.0).unwrap(), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn errors() {
        assert_eq!(gegenbauer(2, 1, 0.0), Err(Error::InvalidDimension(1)));
        assert!(matches!(gegenbauer(2, 3, 1.1), Err(Error::OutOfRange(_))));
        assert!(gegenbauer(2, 3, 1.0 + 5e-13).is_ok());
        assert!(matches!(circle_poly(3, -1.5), Err(Error::OutOfRange(_))));
        assert!(matches!(jacobi(2, -1.0, 0.0, 0.0), Err(Error::InvalidParameters(_))));
        assert!(matches!(jacobi(2, 0.0, -2.0, 0.0), Err(Error::InvalidParameters(_))));
        assert_eq!(circle_poly(MAX_DEGREE + 1, 0.0), Err(Error::UnsupportedDegree(MAX_DEGREE + 1)));
        assert!(circle_poly(MAX_DEGREE, 0.3).is_ok());
        assert!(matches!(gegenbauer(2, 3, f64::NAN), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn family_dispatch() {
        let g = ZonalFamily::Gegenbauer { m: 3 };
        assert_relative_eq!(g.at_one(4).unwrap(), 5.0);
        assert!(g.has_parity_symmetry());
        let j = ZonalFamily::Jacobi { alpha: 1.0, beta: 0.0 };
        assert!(!j.has_parity_symmetry());
        assert_relative_eq!(j.eval(1, 0.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(ZonalFamily::Circle.at_one(4).unwrap(), 0.5);
    }
}
