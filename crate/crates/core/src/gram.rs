//! Numerical side: interpolation matrices, positive definiteness checks,
//! the per-degree decomposition of quadratic forms, block identities on
//! enhanced sets, and explicit witnesses that a quadratic form vanishes.
//!
//! Numerics always run on the truncated kernel, so they can falsify strict
//! positive definiteness but never prove it.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{Certificate, Method, Verdict};
use crate::error::{Error, Result};
use crate::geometry::{build_enhanced, roots_of_unity, sample_config, CirclePoint, EnhancedSet, ProductPoint, SpherePoint};
use crate::kernels::{KernelSpec, KernelSupport, SpaceDescriptor};
use crate::orthopoly;
use crate::par::{self, Execution};
use crate::supportsets::{Parity, ProgressionWitness, SupportSet1D, Term1D, WITNESS_SCAN_RADIUS};

/// Dense symmetric matrix, row-major; entry `(i, j)` is computed once for
/// `i <= j` and mirrored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Fills the upper triangle row by row; `entry` sees `i <= j`.
    pub fn from_fn<F>(n: usize, exec: Execution, entry: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<f64> + Sync + Send,
    {
        let rows = par::map_indices(exec, n, |i| (i..n).map(|j| entry(i, j)).collect::<Result<Vec<f64>>>());
        let mut data = vec![0.0; n * n];
        for (i, row) in rows.into_iter().enumerate() {
            for (off, v) in row?.into_iter().enumerate() {
                let j = i + off;
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Ok(SymMatrix { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        SymMatrix { n, data }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `cᵀ A c`.
    pub fn quadratic_form(&self, c: &[f64]) -> f64 {
        assert_eq!(c.len(), self.n);
        (0..self.n)
            .map(|i| c[i] * (0..self.n).map(|j| self.get(i, j) * c[j]).sum::<f64>())
            .sum()
    }

    /// Square sub-block with top-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, size: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                out.push(self.get(r0 + i, c0 + j));
            }
        }
        out
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// Ascending eigenvalues and the unit eigenvector of the smallest.
    pub fn min_eigenpair(&self) -> Result<(f64, Vec<f64>)> {
        if self.n == 0 {
            return Err(Error::Numerical("empty matrix".into()));
        }
        let eig = self
            .to_dmatrix()
            .try_symmetric_eigen(f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
        let (idx, lambda) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if !lambda.is_finite() {
            return Err(Error::Numerical("non-finite eigenvalue".into()));
        }
        Ok((lambda, eig.eigenvectors.column(idx).iter().copied().collect()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdCheck {
    pub is_pd: bool,
    pub lambda_min: f64,
}

/// Positive definite iff `λ_min > tol · max(1, max diagonal)`.
pub fn check_pd(a: &SymMatrix, tol: f64) -> Result<PdCheck> {
    let (lambda_min, _) = a.min_eigenpair()?;
    Ok(PdCheck { is_pd: lambda_min > tol * a.max_diag().max(1.0), lambda_min })
}

fn check_points(spec: &KernelSpec, points: &[ProductPoint]) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if let Some(m) = spec.space().sphere_dim() {
            if p.z.dim() != m {
                return Err(Error::InvalidConfiguration(format!(
                    "point {i} lies on S^{} but the space needs S^{m}",
                    p.z.dim()
                )));
            }
        }
        if let Some(j) = points[..i].iter().position(|q| q.same_as(p)) {
            return Err(Error::InvalidConfiguration(format!("points {j} and {i} coincide")));
        }
    }
    if let SpaceDescriptor::CircleTph { .. } = spec.space() {
        // no point model for projective spaces: only a single base point,
        // where every second-factor argument is 1, is meaningful
        if points.windows(2).any(|w| w[0].z != w[1].z) {
            return Err(Error::Unsupported(
                "projective factor points are not modelled; use one shared base point".into(),
            ));
        }
    }
    Ok(())
}

/// Kernel value between two points; single-space kernels read only their factor.
fn pair_value(spec: &KernelSpec, a: &ProductPoint, b: &ProductPoint) -> Result<f64> {
    let t = a.x.dot(&b.x).clamp(-1.0, 1.0);
    let s = a.z.dot(&b.z).clamp(-1.0, 1.0);
    match spec.space() {
        SpaceDescriptor::Circle => spec.eval(t, 0.0),
        SpaceDescriptor::Sphere { .. } => spec.eval(s, 0.0),
        SpaceDescriptor::CircleSphere { .. } => spec.eval(t, s),
        SpaceDescriptor::CircleTph { .. } => spec.eval(t, 1.0),
    }
}

pub fn gram_matrix(spec: &KernelSpec, points: &[ProductPoint]) -> Result<SymMatrix> {
    gram_matrix_with(spec, points, Execution::default())
}

/// `A[i][j] = f(x_i·x_j, z_i·z_j)`; the diagonal is exactly `f(1, 1)`.
pub fn gram_matrix_with(spec: &KernelSpec, points: &[ProductPoint], exec: Execution) -> Result<SymMatrix> {
    check_points(spec, points)?;
    let diag = spec.value_at_one();
    SymMatrix::from_fn(points.len(), exec, |i, j| {
        if i == j {
            Ok(diag)
        } else {
            pair_value(spec, &points[i], &points[j])
        }
    })
}

/// Matrix of the degree-`l` layer `(t, s) ↦ f_l(t) P_l(s)`.
pub fn layer_matrix(spec: &KernelSpec, points: &[ProductPoint], l: usize) -> Result<SymMatrix> {
    let fam = product_family(spec)?;
    check_points(spec, points)?;
    SymMatrix::from_fn(points.len(), Execution::default(), |i, j| {
        let t = points[i].x.dot(&points[j].x).clamp(-1.0, 1.0);
        let s = second_factor_arg(spec, &points[i], &points[j]);
        Ok(spec.marginal(l, t)? * fam.eval(l, s)?)
    })
}

fn product_family(spec: &KernelSpec) -> Result<orthopoly::ZonalFamily> {
    match spec.space() {
        sp if sp.is_product() => Ok(sp.sphere_family().expect("product spaces have a second family")),
        sp => Err(Error::Unsupported(format!("layer decomposition needs a product space, got {sp}"))),
    }
}

fn second_factor_arg(spec: &KernelSpec, a: &ProductPoint, b: &ProductPoint) -> f64 {
    match spec.space() {
        SpaceDescriptor::CircleTph { .. } => 1.0,
        _ => a.z.dot(&b.z).clamp(-1.0, 1.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeForms {
    pub total: f64,
    /// `cᵀ [f_l(x_i·x_j) P_l(z_i·z_j)] c` for `l = 0..=lmax`.
    pub layers: Vec<f64>,
    pub scale: f64,
}

/// Splits `cᵀ A c` into its per-degree layers.
pub fn per_degree_forms(spec: &KernelSpec, points: &[ProductPoint], c: &[f64]) -> Result<DegreeForms> {
    let fam = product_family(spec)?;
    check_points(spec, points)?;
    if c.len() != points.len() {
        return Err(Error::InvalidConfiguration("coefficient vector length differs from point count".into()));
    }
    let lmax = spec.truncation().lmax;
    let n = points.len();
    let rows = par::map_indices(Execution::default(), n, |i| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; lmax + 1];
        for j in 0..n {
            let t = points[i].x.dot(&points[j].x).clamp(-1.0, 1.0);
            let t = if i == j { 1.0 } else { t };
            let s = if i == j { 1.0 } else { second_factor_arg(spec, &points[i], &points[j]) };
            let marg = spec.marginals(t)?;
            let ps = fam.eval_all(lmax, s)?;
            for l in 0..=lmax {
                acc[l] += c[i] * c[j] * marg[l] * ps[l];
            }
        }
        Ok(acc)
    });
    let mut layers = vec![0.0; lmax + 1];
    for row in rows {
        for (l, v) in row?.into_iter().enumerate() {
            layers[l] += v;
        }
    }
    let total = layers.iter().sum();
    Ok(DegreeForms { total, layers, scale: spec.value_at_one() * norm_sq(c) })
}

fn norm_sq(c: &[f64]) -> f64 {
    c.iter().map(|x| x * x).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub degree: usize,
    /// `max |M22 - M11|`.
    pub diagonal_gap: f64,
    /// `max |M12 - (-1)^l M11|` over both off-diagonal blocks.
    pub off_diagonal_gap: f64,
    pub scale: f64,
}

/// Block structure of the degree-`l` layer matrix on an enhanced set.
pub fn enhanced_block_check(spec: &KernelSpec, set: &EnhancedSet, l: usize) -> Result<BlockReport> {
    let layer = layer_matrix(spec, set.points(), l)?;
    let b = set.block_size();
    let m11 = layer.block(0, 0, b);
    let m12 = layer.block(0, b, b);
    let m21 = layer.block(b, 0, b);
    let m22 = layer.block(b, b, b);
    let sign = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
    let max_gap = |a: &[f64], b: &[f64], s: f64| {
        a.iter().zip(b).map(|(x, y)| (x - s * y).abs()).fold(0.0, f64::max)
    };
    Ok(BlockReport {
        degree: l,
        diagonal_gap: max_gap(&m22, &m11, 1.0),
        off_diagonal_gap: max_gap(&m12, &m11, sign).max(max_gap(&m21, &m11, sign)),
        scale: spec.value_at_one(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Parity,
    Progression,
    Composed,
    Searched,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub kind: WitnessKind,
    pub configuration: Vec<ProductPoint>,
    pub coefficients: Vec<f64>,
    /// `cᵀ A c`, unclamped.
    pub residual: f64,
    /// `f(1, 1) · ‖c‖²`.
    pub scale: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub evaluations: Option<usize>,
}

impl WitnessReport {
    fn assemble(
        spec: &KernelSpec,
        kind: WitnessKind,
        configuration: Vec<ProductPoint>,
        coefficients: Vec<f64>,
    ) -> Result<Self> {
        let a = gram_matrix(spec, &configuration)?;
        let residual = a.quadratic_form(&coefficients);
        let scale = spec.value_at_one() * norm_sq(&coefficients);
        Ok(WitnessReport { kind, configuration, coefficients, residual, scale, evaluations: None })
    }

    /// `|residual| <= rel · scale`.
    pub fn vanishes_within(&self, rel: f64) -> bool {
        self.residual.abs() <= rel * self.scale
    }

    pub fn coefficient_norm(&self) -> f64 {
        norm_sq(&self.coefficients).sqrt()
    }
}

fn single_parity(terms: &[Term1D]) -> Option<Parity> {
    let mut found: Option<Parity> = None;
    for t in terms {
        let p = match *t {
            Term1D::Singleton(v) if v % 2 == 0 => Parity::Even,
            Term1D::Singleton(_) => Parity::Odd,
            Term1D::Progression { step, .. } if step % 2 == 1 => return None,
            Term1D::Progression { base, .. } if base % 2 == 0 => Parity::Even,
            Term1D::Progression { .. } => Parity::Odd,
        };
        match found {
            Some(q) if q != p => return None,
            _ => found = Some(p),
        }
    }
    Some(found.unwrap_or(Parity::Even))
}

/// Two antipodal sphere points with `c = (1, -1)` (even degrees only) or
/// `c = (1, 1)` (odd degrees only).
pub fn witness_parity_sphere(spec: &KernelSpec) -> Result<WitnessReport> {
    let (m, sphere_axis) = match (spec.space(), spec.declared_support()) {
        (SpaceDescriptor::Sphere { m }, KernelSupport::Single(s)) => (m, s.clone()),
        (SpaceDescriptor::CircleSphere { m }, KernelSupport::Product(s2)) => (m, s2.l_projection()),
        (sp, _) => return Err(Error::NotApplicable(format!("parity witness needs a sphere factor, got {sp}"))),
    };
    let parity = single_parity(&sphere_axis.terms).ok_or_else(|| {
        Error::NotApplicable(format!("sphere-axis support {sphere_axis} has both parities"))
    })?;
    let z = SpherePoint::north_pole(m);
    let x = CirclePoint::new(0.0);
    let points = vec![ProductPoint::new(x, z.clone()), ProductPoint::new(x, z.antipode())];
    let c = match parity {
        Parity::Odd => vec![1.0, 1.0],
        _ => vec![1.0, -1.0],
    };
    WitnessReport::assemble(spec, WitnessKind::Parity, points, c)
}

/// `c_μ = cos(2π jμ / n)`, reduced modulo `n` before scaling.
fn character_vector(w: ProgressionWitness) -> Vec<f64> {
    let n = w.modulus;
    (0..n).map(|mu| (TAU * ((w.residue * mu) % n) as f64 / n as f64).cos()).collect()
}

fn circle_axis(spec: &KernelSpec) -> Result<SupportSet1D> {
    match (spec.space(), spec.declared_support()) {
        (SpaceDescriptor::Circle, KernelSupport::Single(s)) => Ok(s.clone()),
        (sp, KernelSupport::Product(s2)) if sp.is_product() => Ok(s2.k_projection()),
        (sp, _) => Err(Error::NotApplicable(format!("progression witness needs a circle factor, got {sp}"))),
    }
}

/// Base point for the second factor of product-space witnesses.
fn base_point(spec: &KernelSpec) -> SpherePoint {
    SpherePoint::north_pole(spec.space().sphere_dim().unwrap_or(1))
}

/// Roots of unity `θ_μ = 2πμ/n` with `c_μ = cos(jθ_μ)`: the character sum
/// `Σ c_μ e^{ikθ_μ}` vanishes for every `k ≢ ±j (mod n)`.
pub fn witness_progression_circle(spec: &KernelSpec, w: ProgressionWitness) -> Result<WitnessReport> {
    let axis = circle_axis(spec)?;
    if w.modulus == 0 || !w.confirmed_by_scan(&axis, WITNESS_SCAN_RADIUS) {
        return Err(Error::Refused(format!("±({axis}) meets {w}")));
    }
    let z = base_point(spec);
    let points = roots_of_unity(w.modulus as usize, 0.0)
        .into_iter()
        .map(|x| ProductPoint::new(x, z.clone()))
        .collect();
    WitnessReport::assemble(spec, WitnessKind::Progression, points, character_vector(w))
}

/// Budget and seed of the randomized enhanced-set search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub budget: usize,
    pub seed: u64,
    pub max_circle: usize,
    pub max_sphere: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: 10_000, seed: 0, max_circle: 6, max_sphere: 3 }
    }
}

/// Witness for a failed `S^1 x S^m` certificate.
///
/// A failure at `gamma = 0` with witness `(n, j)` for parity `p` gives the
/// enhanced set of the `n` roots of unity and one sphere point, with
/// `c = (d, d)` (`p` even) or `c = (d, -d)` (`p` odd) and `d` the character
/// vector: the pairing kills every layer of the other parity and `d` kills
/// the rest. Failures only at `gamma > 0` fall back to [`search_enhanced`].
pub fn witness_product(spec: &KernelSpec, cert: &Certificate, search: &SearchOptions) -> Result<WitnessReport> {
    let not_applicable = || Error::NotApplicable("needs a NotSPD circle x sphere certificate".into());
    if !matches!(spec.space(), SpaceDescriptor::CircleSphere { .. })
        || cert.verdict != Verdict::NotSpd
        || !matches!(cert.method, Method::CircleSphereParityTails | Method::CircleSphereGammaLoop)
    {
        return Err(not_applicable());
    }
    let (gamma, parity, w) = cert.failing_tail().ok_or_else(not_applicable)?;
    if gamma > 0 {
        return search_enhanced(spec, search);
    }
    let xs = roots_of_unity(w.modulus as usize, 0.0);
    let set = build_enhanced(xs, vec![base_point(spec)])?;
    let d = character_vector(w);
    let sign = if parity == Some(Parity::Odd) { -1.0 } else { 1.0 };
    let c: Vec<f64> = d.iter().copied().chain(d.iter().map(|v| sign * v)).collect();
    WitnessReport::assemble(spec, WitnessKind::Composed, set.points().to_vec(), c)
}

/// Seeded search over enhanced sets (roots of unity x random antipodal-free
/// sphere points, `q` growing with the iteration), keeping the configuration
/// with the smallest `λ_min / f(1,1)`. Candidate `i` draws from its own
/// stream, so the result does not depend on parallelism.
pub fn search_enhanced(spec: &KernelSpec, opts: &SearchOptions) -> Result<WitnessReport> {
    let m = spec
        .space()
        .sphere_dim()
        .filter(|_| spec.space().is_product())
        .ok_or_else(|| Error::NotApplicable("search needs a circle x sphere space".into()))?;
    if opts.budget == 0 || opts.max_circle == 0 || opts.max_sphere == 0 {
        return Err(Error::InvalidConfiguration("search budget and sizes must be positive".into()));
    }
    let f11 = spec.value_at_one();
    let candidates = par::map_indices(Execution::default(), opts.budget, |i| -> Result<(f64, Vec<f64>, EnhancedSet)> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let q = 1 + i * opts.max_sphere / opts.budget;
        let n = rng.random_range(1..=opts.max_circle);
        let rotation = rng.random::<f64>() * TAU;
        let zs = sample_config(m, 1, q, rng.random())?.sphere;
        let set = build_enhanced(roots_of_unity(n, rotation), zs)?;
        let a = gram_matrix_with(spec, set.points(), Execution::Sequential)?;
        let (lambda, v) = a.min_eigenpair()?;
        Ok((lambda, v, set))
    });
    let mut best: Option<(f64, Vec<f64>, EnhancedSet)> = None;
    for cand in candidates {
        let cand = cand?;
        if best.as_ref().is_none_or(|b| cand.0 < b.0) {
            best = Some(cand);
        }
    }
    let (lambda, v, set) = best.expect("budget > 0");
    let coefficients = DVector::from_vec(v);
    Ok(WitnessReport {
        kind: WitnessKind::Searched,
        configuration: set.points().to_vec(),
        residual: lambda,
        scale: f11 * coefficients.norm_squared(),
        coefficients: coefficients.iter().copied().collect(),
        evaluations: Some(opts.budget),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::certify_circle_sphere;
    use crate::geometry::sample_config;
    use crate::kernels::{CoefficientScheme, Truncation};
    use crate::supportsets::{one, prog, SupportSet2D};

    fn product(support: SupportSet2D, m: usize) -> KernelSpec {
        KernelSpec::product(SpaceDescriptor::CircleSphere { m }, support).unwrap()
    }

    fn random_points(m: usize, n: usize, seed: u64) -> Vec<ProductPoint> {
        sample_config(m, n, n, seed).unwrap().zipped()
    }

    #[test]
    fn one_point_gram() {
        let f = product(SupportSet2D::product(prog(0, 1), prog(0, 1)), 2);
        let a = gram_matrix(&f, &random_points(2, 1, 3)).unwrap();
        assert_eq!(a.order(), 1);
        assert_eq!(a.get(0, 0), f.value_at_one());
    }

    #[test]
    fn constant_kernel_is_rank_one() {
        let f = product(SupportSet2D::product(one(0), one(0)), 2);
        let a = gram_matrix(&f, &random_points(2, 6, 1)).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((a.get(i, j) - a.get(0, 0)).abs() < 1e-15);
            }
        }
        let pd = check_pd(&a, 1e-10).unwrap();
        assert!(!pd.is_pd);
        assert!(pd.lambda_min.abs() < 1e-12);
    }

    #[test]
    fn even_l_rows_repeat_at_antipodes() {
        let f = product(SupportSet2D::product(prog(0, 1), prog(0, 2)), 3);
        // z·(-z) must be exactly -1, so use a point with an exact norm
        let cfg = sample_config(3, 3, 2, 5).unwrap();
        let z = SpherePoint::north_pole(3);
        let mut pts: Vec<ProductPoint> = cfg.circle.iter().map(|x| ProductPoint::new(*x, z.clone())).collect();
        pts.push(ProductPoint::new(cfg.circle[0], z.antipode()));
        pts.push(ProductPoint::new(cfg.circle[1], cfg.sphere[0].clone()));
        let a = gram_matrix(&f, &pts).unwrap();
        for j in 0..pts.len() {
            assert!((a.get(0, j) - a.get(3, j)).abs() <= 1e-15 * f.value_at_one());
        }
    }

    #[test]
    fn duplicate_points_rejected() {
        let f = product(SupportSet2D::product(prog(0, 1), prog(0, 1)), 2);
        let mut pts = random_points(2, 3, 2);
        pts.push(pts[1].clone());
        assert!(matches!(gram_matrix(&f, &pts), Err(Error::InvalidConfiguration(_))));
    }

    #[test]
    fn pd_examples() {
        let ones = SymMatrix::from_fn(3, Execution::Sequential, |_, _| Ok(1.0)).unwrap();
        let pd = check_pd(&ones, 1e-10).unwrap();
        assert!(!pd.is_pd && pd.lambda_min.abs() < 1e-14);
        let pd = check_pd(&SymMatrix::identity(5), 1e-10).unwrap();
        assert!(pd.is_pd);
        assert!((pd.lambda_min - 1.0).abs() < 1e-14);
        let f = product(SupportSet2D::product(prog(0, 1), prog(0, 1)), 2);
        let pd = check_pd(&gram_matrix(&f, &random_points(2, 20, 7)).unwrap(), 1e-10).unwrap();
        assert!(pd.is_pd, "lambda_min = {}", pd.lambda_min);
    }

    #[test]
    fn sequential_and_parallel_gram_identical() {
        let f = product(SupportSet2D::product(prog(0, 1), prog(1, 2)), 4);
        let pts = random_points(4, 25, 9);
        let a = gram_matrix_with(&f, &pts, Execution::Sequential).unwrap();
        let b = gram_matrix_with(&f, &pts, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn layers_sum_to_gram_form() {
        let f = product(SupportSet2D::new(vec![
            crate::supportsets::ProductTerm::new(prog(0, 1), prog(0, 3)),
            crate::supportsets::ProductTerm::new(prog(1, 2), one(5)),
        ]), 2);
        let pts = random_points(2, 12, 4);
        let c: Vec<f64> = (0..12).map(|i| ((i * 7 % 5) as f64) - 2.0).collect();
        let forms = per_degree_forms(&f, &pts, &c).unwrap();
        let direct = gram_matrix(&f, &pts).unwrap().quadratic_form(&c);
        assert!((forms.total - direct).abs() <= 1e-11 * forms.scale);
        assert!(forms.layers.iter().all(|&v| v >= -1e-12 * forms.scale));

        let e1: Vec<f64> = (0..12).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
        let forms = per_degree_forms(&f, &pts, &e1).unwrap();
        assert!((forms.total - f.value_at_one()).abs() <= 1e-12 * f.value_at_one());
    }

    #[test]
    fn block_identities_small_case() {
        let f = KernelSpec::new(
            SpaceDescriptor::CircleSphere { m: 2 },
            KernelSupport::Product(SupportSet2D::product(one(1), one(1))),
            CoefficientScheme::Constant { c: 1.0 },
            Truncation::default(),
        )
        .unwrap();
        let z = SpherePoint::normalized(vec![0.2, 0.5, -0.3]).unwrap();
        let set = build_enhanced(vec![CirclePoint::new(0.4)], vec![z]).unwrap();
        let layer = layer_matrix(&f, set.points(), 1).unwrap();
        // 2t·s with t = 1: [[2, -2], [-2, 2]]
        assert!((layer.get(0, 0) - 2.0).abs() < 1e-14);
        assert!((layer.get(0, 1) + 2.0).abs() < 1e-14);
        let r = enhanced_block_check(&f, &set, 1).unwrap();
        assert!(r.diagonal_gap <= 1e-12 * r.scale && r.off_diagonal_gap <= 1e-12 * r.scale);
    }

    #[test]
    fn parity_witnesses() {
        let even = product(SupportSet2D::product(prog(0, 1), prog(0, 2)), 2);
        let w = witness_parity_sphere(&even).unwrap();
        assert_eq!(w.coefficients, vec![1.0, -1.0]);
        assert!(w.vanishes_within(1e-12));

        let odd = product(SupportSet2D::product(prog(0, 1), prog(1, 2)), 3);
        let w = witness_parity_sphere(&odd).unwrap();
        assert_eq!(w.coefficients, vec![1.0, 1.0]);
        assert!(w.vanishes_within(1e-12));

        let full = product(SupportSet2D::product(prog(0, 1), prog(0, 1)), 2);
        assert!(matches!(witness_parity_sphere(&full), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn progression_witnesses() {
        let circle = |s: SupportSet1D| {
            KernelSpec::new(SpaceDescriptor::Circle, KernelSupport::Single(s), CoefficientScheme::default(), Truncation::default()).unwrap()
        };
        let f = circle(SupportSet1D::new(vec![one(0), prog(0, 2)]));
        let w = witness_progression_circle(&f, ProgressionWitness { modulus: 2, residue: 1 }).unwrap();
        assert!((w.coefficients[0] - 1.0).abs() < 1e-15 && (w.coefficients[1] + 1.0).abs() < 1e-15);
        assert!(w.vanishes_within(1e-12));

        let f = circle(SupportSet1D::new(vec![prog(1, 3), prog(2, 3)]));
        let w = witness_progression_circle(&f, ProgressionWitness { modulus: 3, residue: 0 }).unwrap();
        assert!(w.coefficients.iter().all(|c| (c - 1.0).abs() < 1e-15));
        assert!(w.vanishes_within(1e-12));

        let f = circle(SupportSet1D::new(vec![prog(0, 1)]));
        assert!(matches!(
            witness_progression_circle(&f, ProgressionWitness { modulus: 2, residue: 1 }),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn composed_witnesses() {
        let evens_l = SupportSet2D::product(prog(0, 1), prog(0, 2));
        let f = product(evens_l.clone(), 2);
        let cert = certify_circle_sphere(&evens_l, 2).unwrap();
        let w = witness_product(&f, &cert, &SearchOptions::default()).unwrap();
        assert_eq!(w.kind, WitnessKind::Composed);
        assert!(w.vanishes_within(1e-10));
        let forms = per_degree_forms(&f, &w.configuration, &w.coefficients).unwrap();
        assert!(forms.layers.iter().skip(1).step_by(2).all(|v| v.abs() <= 1e-12 * forms.scale));

        let evens_k = SupportSet2D::product(prog(0, 2), prog(0, 1));
        let f = product(evens_k.clone(), 2);
        let cert = certify_circle_sphere(&evens_k, 2).unwrap();
        let w = witness_product(&f, &cert, &SearchOptions::default()).unwrap();
        assert_eq!(w.configuration.len(), 4);
        assert!(w.vanishes_within(1e-12));
        assert!(w.coefficient_norm() >= 1.0);
    }

    #[test]
    fn search_is_seeded() {
        let s2 = SupportSet2D::new(vec![
            crate::supportsets::ProductTerm::new(prog(0, 1), one(0)),
            crate::supportsets::ProductTerm::new(prog(0, 1), one(1)),
            crate::supportsets::ProductTerm::new(prog(0, 2), prog(2, 2)),
            crate::supportsets::ProductTerm::new(prog(0, 2), prog(3, 2)),
        ]);
        let f = KernelSpec::new(
            SpaceDescriptor::CircleSphere { m: 2 },
            KernelSupport::Product(s2.clone()),
            CoefficientScheme::default(),
            Truncation { kmax: 20, lmax: 20 },
        )
        .unwrap();
        let cert = certify_circle_sphere(&s2, 2).unwrap();
        let opts = SearchOptions { budget: 40, seed: 3, max_circle: 4, max_sphere: 2 };
        let a = witness_product(&f, &cert, &opts).unwrap();
        let b = witness_product(&f, &cert, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.kind, WitnessKind::Searched);
        assert_eq!(a.evaluations, Some(40));
    }
}
