//! Truncated double-series kernels
//! `f(t, s) = Σ a_{k,l} P_k^1(t) P_l(s)` on `S^1 x S^m` and `S^1 x M^d`,
//! plus their single-space counterparts on `S^1` and `S^m`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::{self, ZonalFamily, MAX_DEGREE};
use crate::supportsets::{one, Parity, ProductTerm, SupportSet1D, SupportSet2D};

/// Compact two-point homogeneous spaces other than spheres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectiveFamily {
    RealProj,
    ComplexProj,
    QuatProj,
    Cayley,
}

impl ProjectiveFamily {
    /// Second Jacobi parameter of the family.
    pub fn beta(self) -> f64 {
        match self {
            ProjectiveFamily::RealProj => -0.5,
            ProjectiveFamily::ComplexProj => 0.0,
            ProjectiveFamily::QuatProj => 1.0,
            ProjectiveFamily::Cayley => 3.0,
        }
    }

    /// Real dimensions the family admits: `P^d(R)`, d >= 2; `P^d(C)`, d = 4, 6, ...;
    /// `P^d(H)`, d = 8, 12, ...; `P^16(Cay)`.
    pub fn admits(self, d: usize) -> bool {
        match self {
            ProjectiveFamily::RealProj => d >= 2,
            ProjectiveFamily::ComplexProj => d >= 4 && d.is_multiple_of(2),
            ProjectiveFamily::QuatProj => d >= 8 && d.is_multiple_of(4),
            ProjectiveFamily::Cayley => d == 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceDescriptor {
    Circle,
    Sphere { m: usize },
    CircleSphere { m: usize },
    CircleTph { family: ProjectiveFamily, d: usize },
}

impl SpaceDescriptor {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SpaceDescriptor::Circle => Ok(()),
            SpaceDescriptor::Sphere { m } | SpaceDescriptor::CircleSphere { m } if m < 2 => {
                Err(Error::InvalidDimension(m))
            }
            SpaceDescriptor::CircleTph { family, d } if !family.admits(d) => Err(Error::InvalidSpace(
                format!("dimension {d} not admitted by {family:?}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn is_product(&self) -> bool {
        matches!(self, SpaceDescriptor::CircleSphere { .. } | SpaceDescriptor::CircleTph { .. })
    }

    /// Family used on the second factor (or on the only factor for `Sphere`).
    pub fn sphere_family(&self) -> Option<ZonalFamily> {
        match *self {
            SpaceDescriptor::Circle => None,
            SpaceDescriptor::Sphere { m } | SpaceDescriptor::CircleSphere { m } => {
                Some(ZonalFamily::Gegenbauer { m })
            }
            SpaceDescriptor::CircleTph { family, d } => Some(ZonalFamily::Jacobi {
                alpha: (d as f64 - 2.0) / 2.0,
                beta: family.beta(),
            }),
        }
    }

    /// Ambient dimension of the sphere factor, when it has a point model here.
    pub fn sphere_dim(&self) -> Option<usize> {
        match *self {
            SpaceDescriptor::Sphere { m } | SpaceDescriptor::CircleSphere { m } => Some(m),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SpaceDescriptor::Circle => "circle",
            SpaceDescriptor::Sphere { .. } => "sphere",
            SpaceDescriptor::CircleSphere { .. } => "circle_sphere",
            SpaceDescriptor::CircleTph { .. } => "circle_tph",
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SpaceDescriptor::Circle => write!(f, "S^1"),
            SpaceDescriptor::Sphere { m } => write!(f, "S^{m}"),
            SpaceDescriptor::CircleSphere { m } => write!(f, "S^1 x S^{m}"),
            SpaceDescriptor::CircleTph { family, d } => write!(f, "S^1 x {family:?}^{d}"),
        }
    }
}

/// Positive coefficient rule on the support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum CoefficientScheme {
    Constant { c: f64 },
    /// `a_{k,l} = scale * rk^k * rl^l`.
    Geometric { rk: f64, rl: f64, scale: f64 },
}

impl Default for CoefficientScheme {
    fn default() -> Self {
        CoefficientScheme::Geometric { rk: 0.9, rl: 0.9, scale: 1.0 }
    }
}

impl CoefficientScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CoefficientScheme::Constant { c } if !(c > 0.0 && c.is_finite()) => {
                Err(Error::InvalidScheme(format!("constant must be positive, got {c}")))
            }
            CoefficientScheme::Geometric { rk, rl, scale }
                if !(rk > 0.0 && rk < 1.0 && rl > 0.0 && rl < 1.0 && scale > 0.0 && scale.is_finite()) =>
            {
                Err(Error::InvalidScheme(format!(
                    "geometric needs rk, rl in (0,1) and scale > 0, got ({rk}, {rl}, {scale})"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn coefficient(&self, k: usize, l: usize) -> f64 {
        match *self {
            CoefficientScheme::Constant { c } => c,
            CoefficientScheme::Geometric { rk, rl, scale } => {
                scale * rk.powi(k as i32) * rl.powi(l as i32)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub kmax: usize,
    pub lmax: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { kmax: 60, lmax: 60 }
    }
}

/// Declared coefficient support: one axis for single spaces, two for products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelSupport {
    Single(SupportSet1D),
    Product(SupportSet2D),
}

/// One strictly positive coefficient of the truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    pub k: usize,
    pub l: usize,
    pub value: f64,
}

/// An immutable kernel: space, symbolic support, coefficient rule, truncation.
///
/// For single spaces the one index runs along the circle axis (`k`, cut at
/// `kmax`) for `S^1` and along the sphere axis (`l`, cut at `lmax`) for `S^m`.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    space: SpaceDescriptor,
    support: KernelSupport,
    scheme: CoefficientScheme,
    truncation: Truncation,
    effective: Vec<Coefficient>,
    max_k: usize,
    max_l: usize,
}

impl KernelSpec {
    pub fn new(
        space: SpaceDescriptor,
        support: KernelSupport,
        scheme: CoefficientScheme,
        truncation: Truncation,
    ) -> Result<Self> {
        space.validate()?;
        scheme.validate()?;
        if truncation.kmax > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(truncation.kmax));
        }
        if truncation.lmax > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(truncation.lmax));
        }
        let pairs: BTreeSet<(usize, usize)> = match (&space, &support) {
            (SpaceDescriptor::Circle, KernelSupport::Single(s)) => s
                .members_up_to(truncation.kmax as u64)
                .into_iter()
                .map(|k| (k as usize, 0))
                .collect(),
            (SpaceDescriptor::Sphere { .. }, KernelSupport::Single(s)) => s
                .members_up_to(truncation.lmax as u64)
                .into_iter()
                .map(|l| (0, l as usize))
                .collect(),
            (sp, KernelSupport::Product(s2)) if sp.is_product() => s2
                .terms
                .iter()
                .flat_map(|t| {
                    let ls: Vec<u64> = t.l.members_up_to(truncation.lmax as u64).collect();
                    t.k.members_up_to(truncation.kmax as u64)
                        .flat_map(move |k| ls.clone().into_iter().map(move |l| (k as usize, l as usize)))
                })
                .collect(),
            _ => {
                return Err(Error::InvalidSpace(format!(
                    "support shape does not match space {space}"
                )))
            }
        };
        let effective: Vec<Coefficient> = pairs
            .into_iter()
            .map(|(k, l)| Coefficient { k, l, value: scheme.coefficient(k, l) })
            .collect();
        if effective.is_empty() {
            log::warn!("kernel on {space} has an empty effective support; it is identically zero");
        }
        let max_k = effective.iter().map(|c| c.k).max().unwrap_or(0);
        let max_l = effective.iter().map(|c| c.l).max().unwrap_or(0);
        Ok(KernelSpec { space, support, scheme, truncation, effective, max_k, max_l })
    }

    /// Product-space kernel with the default scheme and truncation.
    pub fn product(space: SpaceDescriptor, support: SupportSet2D) -> Result<Self> {
        KernelSpec::new(
            space,
            KernelSupport::Product(support),
            CoefficientScheme::default(),
            Truncation::default(),
        )
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn scheme(&self) -> CoefficientScheme {
        self.scheme
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn declared_support(&self) -> &KernelSupport {
        &self.support
    }

    pub fn coefficients(&self) -> &[Coefficient] {
        &self.effective
    }

    pub fn is_degenerate(&self) -> bool {
        self.effective.is_empty()
    }

    /// Declared symbolic support, or the finite effective support after truncation.
    pub fn support_of(&self, truncated: bool) -> KernelSupport {
        if !truncated {
            return self.support.clone();
        }
        match self.space {
            SpaceDescriptor::Circle => {
                KernelSupport::Single(SupportSet1D::new(self.effective.iter().map(|c| one(c.k as u64)).collect()))
            }
            SpaceDescriptor::Sphere { .. } => {
                KernelSupport::Single(SupportSet1D::new(self.effective.iter().map(|c| one(c.l as u64)).collect()))
            }
            _ => KernelSupport::Product(SupportSet2D::new(
                self.effective
                    .iter()
                    .map(|c| ProductTerm::new(one(c.k as u64), one(c.l as u64)))
                    .collect(),
            )),
        }
    }

    fn circle_values(&self, t: f64) -> Result<Vec<f64>> {
        orthopoly::circle_poly_all(self.max_k, t)
    }

    fn sphere_values(&self, s: f64) -> Result<Vec<f64>> {
        match self.space.sphere_family() {
            Some(fam) => fam.eval_all(self.max_l, s),
            None => Ok(vec![1.0]),
        }
    }

    fn sum_with(&self, circle: &[f64], sphere: &[f64]) -> f64 {
        self.effective
            .iter()
            .map(|c| c.value * circle[c.k] * sphere[c.l])
            .sum()
    }

    /// Kernel value. For single spaces `s` is ignored and `t` is the only
    /// argument (circle or sphere inner product).
    pub fn eval(&self, t: f64, s: f64) -> Result<f64> {
        match self.space {
            SpaceDescriptor::Circle => {
                let c = self.circle_values(t)?;
                Ok(self.sum_with(&c, &[1.0]))
            }
            SpaceDescriptor::Sphere { .. } => {
                let p = self.sphere_values(t)?;
                Ok(self.sum_with(&[1.0], &p))
            }
            _ => {
                let c = self.circle_values(t)?;
                let p = self.sphere_values(s)?;
                Ok(self.sum_with(&c, &p))
            }
        }
    }

    /// `f(1, 1)` (or `f(1)`), summed from the exact values at 1.
    pub fn value_at_one(&self) -> f64 {
        self.effective
            .iter()
            .map(|c| {
                let pk = orthopoly::circle_at_one(c.k);
                let pl = self
                    .space
                    .sphere_family()
                    .map(|fam| fam.at_one(c.l).expect("validated at construction"))
                    .unwrap_or(1.0);
                match self.space {
                    SpaceDescriptor::Circle => c.value * pk,
                    SpaceDescriptor::Sphere { .. } => c.value * pl,
                    _ => c.value * pk * pl,
                }
            })
            .sum()
    }

    fn require_product(&self) -> Result<()> {
        if self.space.is_product() {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("marginals need a product space, got {}", self.space)))
        }
    }

    /// Every marginal `f_l(t) = Σ_k a_{k,l} P_k^1(t)`, for `l = 0..=lmax`.
    pub fn marginals(&self, t: f64) -> Result<Vec<f64>> {
        self.require_product()?;
        let c = self.circle_values(t)?;
        let mut out = vec![0.0; self.truncation.lmax + 1];
        for coef in &self.effective {
            out[coef.l] += coef.value * c[coef.k];
        }
        Ok(out)
    }

    pub fn marginal(&self, l: usize, t: f64) -> Result<f64> {
        Ok(self.marginals(t)?.get(l).copied().unwrap_or(0.0))
    }

    /// Sum of the marginals of the given parity with degree `>= gamma`.
    pub fn truncated_parity_sum(&self, gamma: usize, parity: Parity, t: f64) -> Result<f64> {
        Ok(self
            .marginals(t)?
            .into_iter()
            .enumerate()
            .filter(|&(l, _)| l >= gamma && parity.matches(l as u64))
            .map(|(_, v)| v)
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supportsets::prog;
    use approx::assert_relative_eq;

    fn unit(support: SupportSet2D, m: usize) -> KernelSpec {
        KernelSpec::new(
            SpaceDescriptor::CircleSphere { m },
            KernelSupport::Product(support),
            CoefficientScheme::Constant { c: 1.0 },
            Truncation::default(),
        )
        .unwrap()
    }

    #[test]
    fn constant_kernel() {
        let f = unit(SupportSet2D::product(one(0), one(0)), 2);
        for &(t, s) in &[(0.3, -0.2), (-1.0, 1.0), (1.0, 1.0)] {
            assert_eq!(f.eval(t, s).unwrap(), 1.0);
        }
    }

    #[test]
    fn single_term_closed_form() {
        let f = unit(SupportSet2D::product(one(1), one(1)), 2);
        // P_1^1(t) = 2t, P_1^2(s) = s
        assert_relative_eq!(f.eval(0.5, 0.5).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(f.value_at_one(), 2.0, epsilon = 1e-15);
        assert_relative_eq!(f.eval(1.0, 1.0).unwrap(), f.value_at_one(), epsilon = 1e-14);
        assert_relative_eq!(f.marginal(1, 0.3).unwrap(), 0.6, epsilon = 1e-15);
        assert_eq!(f.marginal(0, 0.3).unwrap(), 0.0);
        assert_eq!(f.marginal(2, 0.3).unwrap(), 0.0);
        assert_relative_eq!(f.truncated_parity_sum(0, Parity::Odd, 0.3).unwrap(), 0.6, epsilon = 1e-15);
        assert_eq!(f.truncated_parity_sum(2, Parity::Odd, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn value_at_one_matches_eval() {
        let f = KernelSpec::product(
            SpaceDescriptor::CircleSphere { m: 3 },
            SupportSet2D::product(prog(0, 1), prog(0, 1)),
        )
        .unwrap();
        assert_relative_eq!(f.eval(1.0, 1.0).unwrap(), f.value_at_one(), max_relative = 1e-12);
    }

    #[test]
    fn marginals_reconstruct_kernel() {
        let f = KernelSpec::product(
            SpaceDescriptor::CircleSphere { m: 4 },
            SupportSet2D::new(vec![
                ProductTerm::new(prog(0, 1), prog(1, 3)),
                ProductTerm::new(prog(2, 2), one(4)),
            ]),
        )
        .unwrap();
        let fam = f.space().sphere_family().unwrap();
        let scale = f.value_at_one();
        for i in 0..=20 {
            for j in 0..=20 {
                let t = -1.0 + 0.1 * i as f64;
                let s = -1.0 + 0.1 * j as f64;
                let ps = fam.eval_all(60, s).unwrap();
                let recon: f64 = f.marginals(t).unwrap().iter().zip(&ps).map(|(a, b)| a * b).sum();
                assert!((recon - f.eval(t, s).unwrap()).abs() <= 1e-12 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn parity_sums_partition() {
        let f = KernelSpec::product(
            SpaceDescriptor::CircleSphere { m: 2 },
            SupportSet2D::product(prog(0, 1), prog(0, 1)),
        )
        .unwrap();
        for i in 0..=20 {
            let t = -1.0 + 0.1 * i as f64;
            let odd = f.truncated_parity_sum(0, Parity::Odd, t).unwrap();
            let even = f.truncated_parity_sum(0, Parity::Even, t).unwrap();
            let all: f64 = f.marginals(t).unwrap().iter().sum();
            assert!((odd + even - all).abs() <= 1e-12 * all.abs().max(1.0));
            // P_l^2(1) = 1, so summing marginals is evaluating at s = 1
            assert!((odd + even - f.eval(t, 1.0).unwrap()).abs() <= 1e-12 * f.value_at_one());
        }
    }

    #[test]
    fn support_of_examples() {
        let full = SupportSet2D::product(prog(0, 1), prog(0, 1));
        let f = KernelSpec::new(
            SpaceDescriptor::CircleSphere { m: 2 },
            KernelSupport::Product(full.clone()),
            CoefficientScheme::default(),
            Truncation { kmax: 3, lmax: 3 },
        )
        .unwrap();
        assert_eq!(f.support_of(false), KernelSupport::Product(full));
        match f.support_of(true) {
            KernelSupport::Product(s) => assert_eq!(s.terms.len(), 16),
            other => panic!("unexpected {other:?}"),
        }

        let f = KernelSpec::new(
            SpaceDescriptor::CircleSphere { m: 2 },
            KernelSupport::Product(SupportSet2D::product(one(5), one(5))),
            CoefficientScheme::default(),
            Truncation { kmax: 3, lmax: 60 },
        )
        .unwrap();
        assert!(f.is_degenerate());
        assert_eq!(f.eval(0.2, 0.1).unwrap(), 0.0);
        assert_eq!(f.support_of(true), KernelSupport::Product(SupportSet2D::empty()));
    }

    #[test]
    fn single_spaces() {
        let circle = KernelSpec::new(
            SpaceDescriptor::Circle,
            KernelSupport::Single(SupportSet1D::new(vec![one(0), one(2)])),
            CoefficientScheme::Constant { c: 1.0 },
            Truncation::default(),
        )
        .unwrap();
        // 1 + (2/2) cos 2θ at θ = 0
        assert_relative_eq!(circle.eval(1.0, 0.0).unwrap(), 2.0, epsilon = 1e-15);
        assert!(circle.marginal(0, 0.0).is_err());

        let sphere = KernelSpec::new(
            SpaceDescriptor::Sphere { m: 3 },
            KernelSupport::Single(SupportSet1D::new(vec![one(2)])),
            CoefficientScheme::Constant { c: 2.0 },
            Truncation::default(),
        )
        .unwrap();
        assert_relative_eq!(sphere.eval(1.0, 0.0).unwrap(), 6.0, epsilon = 1e-14);
        assert_relative_eq!(sphere.value_at_one(), 6.0, epsilon = 1e-14);
    }

    #[test]
    fn invalid_specs() {
        let s2 = SupportSet2D::product(prog(0, 1), prog(0, 1));
        assert!(matches!(
            KernelSpec::product(SpaceDescriptor::CircleSphere { m: 1 }, s2.clone()),
            Err(Error::InvalidDimension(1))
        ));
        assert!(KernelSpec::product(
            SpaceDescriptor::CircleTph { family: ProjectiveFamily::ComplexProj, d: 5 },
            s2.clone()
        )
        .is_err());
        assert!(KernelSpec::new(
            SpaceDescriptor::Circle,
            KernelSupport::Product(s2.clone()),
            CoefficientScheme::default(),
            Truncation::default()
        )
        .is_err());
        assert!(KernelSpec::new(
            SpaceDescriptor::CircleSphere { m: 2 },
            KernelSupport::Product(s2),
            CoefficientScheme::Geometric { rk: 1.2, rl: 0.5, scale: 1.0 },
            Truncation::default()
        )
        .is_err());
    }

    #[test]
    fn projective_parameters() {
        let tph = SpaceDescriptor::CircleTph { family: ProjectiveFamily::Cayley, d: 16 };
        assert_eq!(tph.sphere_family(), Some(ZonalFamily::Jacobi { alpha: 7.0, beta: 3.0 }));
        assert!(ProjectiveFamily::QuatProj.admits(12));
        assert!(!ProjectiveFamily::QuatProj.admits(10));
        assert!(!ProjectiveFamily::Cayley.admits(8));
        assert!(ProjectiveFamily::RealProj.admits(3));
    }
}
