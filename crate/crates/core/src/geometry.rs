//! Point configurations on `S^1` and `S^m`, enhanced subsets of `S^1 x S^m`,
//! and real spherical harmonics on `S^2`.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Circle points closer than this (mod 2π) are the same point.
pub const CIRCLE_DISTINCT_TOL: f64 = 1e-12;
/// `‖z + w‖` at or below this makes `z, w` antipodal.
pub const ANTIPODAL_TOL: f64 = 1e-9;
/// Resample budget of [`sample_config`].
pub const MAX_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirclePoint {
    theta: f64,
}

impl CirclePoint {
    pub fn new(theta: f64) -> Self {
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        CirclePoint { theta }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `x · y = cos(θ_x - θ_y)`.
    pub fn dot(&self, other: &CirclePoint) -> f64 {
        (self.theta - other.theta).cos()
    }

    pub fn distinct_from(&self, other: &CirclePoint) -> bool {
        let d = (self.theta - other.theta).abs();
        d.min(TAU - d) > CIRCLE_DISTINCT_TOL
    }
}

/// `n` equally spaced points `θ_μ = rotation + 2πμ/n`.
pub fn roots_of_unity(n: usize, rotation: f64) -> Vec<CirclePoint> {
    (0..n)
        .map(|mu| CirclePoint::new(rotation + TAU * mu as f64 / n as f64))
        .collect()
}

/// Unit vector in `R^{m+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl SpherePoint {
    /// Accepts coordinates already of unit norm (within `1e-12`).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidConfiguration("sphere points need at least 2 coordinates".into()));
        }
        let n = norm(&coords);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfiguration(format!("sphere point has norm {n}")));
        }
        Ok(SpherePoint { coords })
    }

    /// Scales a nonzero vector onto the sphere.
    pub fn normalized(coords: Vec<f64>) -> Result<Self> {
        let n = norm(&coords);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidConfiguration("cannot normalize a zero vector".into()));
        }
        SpherePoint::new(coords.into_iter().map(|x| x / n).collect())
    }

    /// `e_0` in `R^{m+1}`.
    pub fn north_pole(m: usize) -> Self {
        let mut coords = vec![0.0; m + 1];
        coords[0] = 1.0;
        SpherePoint { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// `m` for a point of `S^m`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint { coords: self.coords.iter().map(|x| -x).collect() }
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn distance(&self, other: &SpherePoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `‖z + w‖`.
    pub fn antipodal_gap(&self, other: &SpherePoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a + b) * (a + b))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint {
    pub x: CirclePoint,
    pub z: SpherePoint,
}

impl ProductPoint {
    pub fn new(x: CirclePoint, z: SpherePoint) -> Self {
        ProductPoint { x, z }
    }

    pub fn same_as(&self, other: &ProductPoint) -> bool {
        !self.x.distinct_from(&other.x) && self.z.distance(&other.z) <= CIRCLE_DISTINCT_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledConfig {
    pub circle: Vec<CirclePoint>,
    pub sphere: Vec<SpherePoint>,
    pub resamples: usize,
}

impl SampledConfig {
    /// Pairs `circle[i]` with `sphere[i]`; requires equal counts.
    pub fn zipped(&self) -> Vec<ProductPoint> {
        assert_eq!(self.circle.len(), self.sphere.len(), "zipped needs equal counts");
        self.circle
            .iter()
            .zip(&self.sphere)
            .map(|(x, z)| ProductPoint::new(*x, z.clone()))
            .collect()
    }
}

/// Seeded random points: uniform angles on `S^1`, normalized Gaussians on
/// `S^m`. Rejects and redraws coincident circle points and coincident or
/// antipodal sphere points.
pub fn sample_config(m: usize, n_circle: usize, n_sphere: usize, seed: u64) -> Result<SampledConfig> {
    if m < 1 || n_circle == 0 || n_sphere == 0 {
        return Err(Error::InvalidConfiguration(format!(
            "need m >= 1 and positive counts, got m={m}, {n_circle}, {n_sphere}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut resamples = 0;

    let mut circle: Vec<CirclePoint> = Vec::with_capacity(n_circle);
    while circle.len() < n_circle {
        let x = CirclePoint::new(rng.random::<f64>() * TAU);
        if circle.iter().all(|y| x.distinct_from(y)) {
            circle.push(x);
        } else {
            resamples += 1;
            if resamples > MAX_RESAMPLES {
                return Err(Error::SamplingFailed(resamples));
            }
        }
    }

    let mut sphere: Vec<SpherePoint> = Vec::with_capacity(n_sphere);
    while sphere.len() < n_sphere {
        let v: Vec<f64> = (0..=m).map(|_| rng.sample(StandardNormal)).collect();
        let ok = match SpherePoint::normalized(v) {
            Ok(z) if sphere
                .iter()
                .all(|w| z.distance(w) > ANTIPODAL_TOL && z.antipodal_gap(w) > ANTIPODAL_TOL) =>
            {
                sphere.push(z);
                true
            }
            _ => false,
        };
        if !ok {
            resamples += 1;
            if resamples > MAX_RESAMPLES {
                return Err(Error::SamplingFailed(resamples));
            }
        }
    }
    Ok(SampledConfig { circle, sphere, resamples })
}

/// `2pq` points `(x_i, z_μ)` then `(x_i, -z_μ)`, `x` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct EnhancedSet {
    xs: Vec<CirclePoint>,
    zs: Vec<SpherePoint>,
    points: Vec<ProductPoint>,
}

impl EnhancedSet {
    pub fn xs(&self) -> &[CirclePoint] {
        &self.xs
    }

    pub fn zs(&self) -> &[SpherePoint] {
        &self.zs
    }

    pub fn points(&self) -> &[ProductPoint] {
        &self.points
    }

    /// `pq`, the side of each of the four blocks.
    pub fn block_size(&self) -> usize {
        self.xs.len() * self.zs.len()
    }
}

pub fn build_enhanced(xs: Vec<CirclePoint>, zs: Vec<SpherePoint>) -> Result<EnhancedSet> {
    if xs.is_empty() || zs.is_empty() {
        return Err(Error::InvalidGenerators("need at least one circle and one sphere point".into()));
    }
    for (i, x) in xs.iter().enumerate() {
        if xs[..i].iter().any(|y| !x.distinct_from(y)) {
            return Err(Error::InvalidGenerators(format!("circle point {i} repeats")));
        }
    }
    let dim = zs[0].dim();
    for (i, z) in zs.iter().enumerate() {
        if z.dim() != dim {
            return Err(Error::InvalidGenerators("sphere points of mixed dimension".into()));
        }
        for (j, w) in zs[..i].iter().enumerate() {
            if z.antipodal_gap(w) <= ANTIPODAL_TOL {
                return Err(Error::InvalidGenerators(format!("sphere points {j} and {i} are antipodal")));
            }
            if z.distance(w) <= CIRCLE_DISTINCT_TOL {
                return Err(Error::InvalidGenerators(format!("sphere point {i} repeats")));
            }
        }
    }
    let mut points = Vec::with_capacity(2 * xs.len() * zs.len());
    for sign in [false, true] {
        for z in &zs {
            let z = if sign { z.antipode() } else { z.clone() };
            for x in &xs {
                points.push(ProductPoint::new(*x, z.clone()));
            }
        }
    }
    Ok(EnhancedSet { xs, zs, points })
}

/// Real orthonormal spherical harmonics of one degree on `S^2`.
///
/// Order: `m = 0`, then `cos(mφ)` and `sin(mφ)` partners for `m = 1..=l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphericalHarmonicsS2 {
    degree: usize,
}

pub fn sph_basis_s2(l: usize) -> SphericalHarmonicsS2 {
    SphericalHarmonicsS2 { degree: l }
}

impl SphericalHarmonicsS2 {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `2l + 1`.
    pub fn dim(&self) -> usize {
        2 * self.degree + 1
    }

    /// Fully normalized associated Legendre values `P̄_l^m(cos θ)`,
    /// `m = 0..=l`, with `∫ P̄² dΩ` folded in so that `P̄_l^0 = Y_{l,0}`.
    #[allow(clippy::needless_range_loop)]
    fn legendre_row(&self, cos_t: f64, sin_t: f64) -> Vec<f64> {
        let l = self.degree;
        let mut row = vec![0.0; l + 1];
        let mut pmm = (1.0 / (4.0 * PI)).sqrt();
        for m in 0..=l {
            if m > 0 {
                let mf = m as f64;
                pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t;
            }
            if m == l {
                row[m] = pmm;
                break;
            }
            let mf = m as f64;
            let mut prev = pmm;
            let mut cur = (2.0 * mf + 3.0).sqrt() * cos_t * pmm;
            for ll in (m + 2)..=l {
                let lf = ll as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
                let next = a * (cos_t * cur - b * prev);
                prev = cur;
                cur = next;
            }
            row[m] = cur;
        }
        row
    }

    /// All `2l + 1` basis values at a point of `S^2`.
    pub fn eval(&self, point: &SpherePoint) -> Result<Vec<f64>> {
        let c = point.coords();
        if c.len() != 3 {
            return Err(Error::InvalidConfiguration(format!("need a point of S^2, got S^{}", point.dim())));
        }
        let (x, y, z) = (c[0], c[1], c[2]);
        let sin_t = x.hypot(y);
        let phi = y.atan2(x);
        let row = self.legendre_row(z, sin_t);
        let mut out = Vec::with_capacity(self.dim());
        out.push(row[0]);
        for (m, p) in row.iter().enumerate().skip(1) {
            let mphi = m as f64 * phi;
            out.push(std::f64::consts::SQRT_2 * p * mphi.cos());
            out.push(std::f64::consts::SQRT_2 * p * mphi.sin());
        }
        Ok(out)
    }
}
