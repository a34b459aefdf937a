//! Euler-theorem residuals and data-driven identification of homogeneity
//! parameters from a trained network.
//!
//! Three equivalent characterizations of `d`-homogeneity drive this module:
//! the symmetry identity `h(d(s)x) = e^{nu s} h(x)`, the derivative identity
//! `dh/dx * Gx = nu h`, and an integral identity over coordinate boxes whose
//! integrand is affine in the generator `G`. The integral form needs no
//! derivatives of `h`, so it survives discretization of a learned model: the
//! corner rule below turns it into a residual that is still affine in `G`,
//! and fitting `G` becomes a convex quadratic problem.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dilation::{is_anti_hurwitz, Dilation, EIG_TOL};
use crate::error::{Error, Result};
use crate::networks::{sample_shell, Shell};

/// Exclusion half-width around `||x||_d = 1` for the degree estimator; the
/// per-sample term is 0/0 on that sphere.
pub const LN_BAND_DEFAULT: f64 = 0.05;

/// Lower bound of the admissible set for the degree estimator. Chosen so
/// that, for a network trained near the unit sphere, admissible points stay
/// where the network is still accurate.
pub const DEGREE_DELTA_DEFAULT: f64 = 0.9;

/// Box half-width for generator identification.
pub const BOX_DELTA_DEFAULT: f64 = 0.01;

/// Number of box offsets `z_j` per sample point.
pub const OFFSETS_DEFAULT: usize = 1;

/// Trace regularization for the full generator class (suppresses the
/// rotation ambiguity); the diagonal class defaults to none.
pub const XI_FULL_DEFAULT: f64 = 1e-6;
pub const XI_DIAGONAL_DEFAULT: f64 = 0.0;

/// Central-difference step `h = 1e-6 * (1 + |x|)`.
pub fn default_fd_step(x: &DVector<f64>) -> f64 {
    1e-6 * (1.0 + x.norm())
}

/// Fixed pairwise-tree summation: order-independent of the producer and
/// bitwise reproducible.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Symmetry-identity residual `max_i |f_i(d(s)x) - e^{nu s} f_i(x)|`.
pub fn homogeneity_residual<F>(
    f: F,
    dilation: &Dilation,
    nu: f64,
    x: &DVector<f64>,
    s: f64,
) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let lhs = f(&dilation.apply(s, x)?);
    let rhs = f(x) * (nu * s).exp();
    Ok((lhs - rhs).amax())
}

/// Derivative-identity residual `|grad_fd f(x) * Gx - nu f(x)|` with a
/// central finite-difference gradient of step `h_fd`.
pub fn euler_derivative_residual<F>(
    f: F,
    g: &DMatrix<f64>,
    nu: f64,
    x: &DVector<f64>,
    h_fd: f64,
) -> f64
where
    F: Fn(&DVector<f64>) -> f64,
{
    let gx = g * x;
    let mut acc = 0.0;
    let mut xp = x.clone();
    let mut xm = x.clone();
    for i in 0..x.len() {
        xp[i] = x[i] + h_fd;
        xm[i] = x[i] - h_fd;
        acc += (f(&xp) - f(&xm)) / (2.0 * h_fd) * gx[i];
        xp[i] = x[i];
        xm[i] = x[i];
    }
    (acc - nu * f(x)).abs()
}

/// Boundary term of the integral identity:
///
/// `Delta_i = [f(y_{x_i}) e_i'G y_{x_i} - f(y_{x*_i}) e_i'G y_{x*_i}] / (x_i - x*_i)`
///
/// where `y_{x_i}` replaces the `i`-th coordinate of `y` by `x_i`.
pub fn delta_term<F>(
    f: F,
    y: &DVector<f64>,
    x: &DVector<f64>,
    x_star: &DVector<f64>,
    index: usize,
    g: &DMatrix<f64>,
) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    let xi = x[index];
    let xsi = x_star[index];
    if xi == xsi {
        return Err(Error::CoincidentCoordinate { index });
    }
    let mut y_hi = y.clone();
    y_hi[index] = xi;
    let mut y_lo = y.clone();
    y_lo[index] = xsi;
    let gy_hi = (g.row(index) * &y_hi)[0];
    let gy_lo = (g.row(index) * &y_lo)[0];
    Ok((f(&y_hi) * gy_hi - f(&y_lo) * gy_lo) / (xi - xsi))
}

fn box_excludes_origin(x: &DVector<f64>, x_star: &DVector<f64>) -> bool {
    (0..x.len()).any(|i| {
        let lo = x[i].min(x_star[i]);
        let hi = x[i].max(x_star[i]);
        lo > 0.0 || hi < 0.0
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by the Golub-Welsch
/// eigenvalue method.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be at least 1");
    let mut jacobi = DMatrix::zeros(order, order);
    for k in 1..order {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let w = 2.0 * eig.eigenvectors[(0, i)] * eig.eigenvectors[(0, i)];
            (node, w)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Integral-identity residual over the coordinate box `R(x, x*)`:
///
/// `int (trace(G)+nu) f(y) - sum_{i: x_i != x*_i} Delta_i(f,y,x,x*,G) dy`
///
/// by tensor-product Gauss-Legendre quadrature with `order` points per axis.
/// Signed, and zero (up to quadrature error) when `f` is `d`-homogeneous of
/// degree `nu` with generator `G`.
pub fn integral_residual<F>(
    f: F,
    x: &DVector<f64>,
    x_star: &DVector<f64>,
    nu: f64,
    g: &DMatrix<f64>,
    order: usize,
) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    let n = x.len();
    if x_star.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x_star.len(),
        });
    }
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.nrows(),
        });
    }
    if !box_excludes_origin(x, x_star) {
        return Err(Error::OriginInsideBox);
    }
    let active: Vec<usize> = (0..n).filter(|&i| x[i] != x_star[i]).collect();
    if active.len() < n {
        // The iterated integral over any degenerate axis vanishes.
        return Ok(0.0);
    }
    let (nodes, weights) = gauss_legendre(order);
    let trace_nu = g.trace() + nu;
    let mut idx = vec![0usize; n];
    let mut y = DVector::zeros(n);
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for (axis, &k) in idx.iter().enumerate() {
            let half = 0.5 * (x[axis] - x_star[axis]);
            let mid = 0.5 * (x[axis] + x_star[axis]);
            y[axis] = mid + half * nodes[k];
            w *= weights[k] * half;
        }
        let mut val = trace_nu * f(&y);
        for &i in &active {
            val -= delta_term(&f, &y, x, x_star, i, g)?;
        }
        total += w * val;

        let mut axis = 0;
        loop {
            if axis == n {
                return Ok(total);
            }
            idx[axis] += 1;
            if idx[axis] < order {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// One residual row, affine in the generator: `residual = <coeffs, G> + constant`.
#[derive(Debug, Clone)]
pub(crate) struct ResidualRow {
    pub coeffs: DMatrix<f64>,
    pub constant: f64,
}

impl ResidualRow {
    pub fn evaluate(&self, g: &DMatrix<f64>) -> f64 {
        self.coeffs.dot(g) + self.constant
    }
}

/// Corner-rule rows at `(x_k, z)`: one affine form per output component of
/// `f`. All `f` evaluations happen at the `2^n` corners of the box
/// `[x_k, x_k + z]`, once each.
pub(crate) fn corner_rows<F>(
    f: F,
    x_k: &DVector<f64>,
    z: &DVector<f64>,
    nu: f64,
) -> Result<Vec<ResidualRow>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = x_k.len();
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.len(),
        });
    }
    if z.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(Error::ZeroOffsetComponent);
    }
    let x_end = x_k + z;
    if !box_excludes_origin(&x_end, x_k) {
        return Err(Error::OriginInsideBox);
    }
    let count = 1usize << n;
    let corners: Vec<DVector<f64>> = (0..count)
        .map(|mask| {
            DVector::from_fn(n, |i, _| {
                if mask & (1 << i) != 0 {
                    x_k[i] + z[i]
                } else {
                    x_k[i]
                }
            })
        })
        .collect();
    let values: Vec<DVector<f64>> = corners.iter().map(&f).collect();
    let m = values[0].len();
    let volume = z.iter().product::<f64>();
    let scale = volume / count as f64;

    let mut rows = Vec::with_capacity(m);
    for comp in 0..m {
        let mut coeffs = DMatrix::zeros(n, n);
        let mut value_sum = 0.0;
        for mask in 0..count {
            let v = values[mask][comp];
            value_sum += v;
            // trace(G) * f(y) puts f(y) on every diagonal entry
            for p in 0..n {
                coeffs[(p, p)] += v;
            }
            // -Delta_p couples the two corners differing in bit p
            for p in 0..n {
                let hi = mask | (1 << p);
                let lo = mask & !(1 << p);
                let (v_hi, v_lo) = (values[hi][comp], values[lo][comp]);
                let (y_hi, y_lo) = (&corners[hi], &corners[lo]);
                for q in 0..n {
                    coeffs[(p, q)] -= (v_hi * y_hi[q] - v_lo * y_lo[q]) / z[p];
                }
            }
        }
        rows.push(ResidualRow {
            coeffs: coeffs * scale,
            constant: nu * value_sum * scale,
        });
    }
    Ok(rows)
}

/// Corner-rule approximation of [`integral_residual`] on the box
/// `[x_k, x_k + z]`:
///
/// `(prod_i z_i) 2^{-n} sum_{corners} [(trace(G)+nu) f(corner) - sum_i Delta_i]`
///
/// The `2^{-n}` corner-average factor makes this a consistent approximation
/// of the integral; the value is affine in `G`.
pub fn corner_residual<F>(
    f: F,
    x_k: &DVector<f64>,
    z: &DVector<f64>,
    nu: f64,
    g: &DMatrix<f64>,
) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> f64,
{
    let rows = corner_rows(|x| DVector::from_row_slice(&[f(x)]), x_k, z, nu)?;
    Ok(rows[0].evaluate(g))
}

/// A point accepted by the admissible-set sampler, with its cached norm,
/// projection and function values.
#[derive(Debug, Clone)]
pub struct AdmissibleSample {
    pub x: DVector<f64>,
    pub rho: f64,
    pub projected: DVector<f64>,
    pub g_x: f64,
    pub g_proj: f64,
}

/// Rejection sampler for the admissible set of the degree estimator:
/// emitted points satisfy `delta <= ||x||_d <= 1`,
/// `min(|g(x)|, |g(pi_d(x))|) >= delta` and `|ln ||x||_d| >= ln_band`.
pub struct KDeltaSampler<'a, F> {
    dilation: &'a Dilation,
    g: F,
    pub delta: f64,
    pub ln_band: f64,
    pub seed: u64,
}

impl<'a, F> KDeltaSampler<'a, F>
where
    F: Fn(&DVector<f64>) -> f64,
{
    pub fn new(dilation: &'a Dilation, g: F, delta: f64, ln_band: f64, seed: u64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidRegion(format!(
                "delta must lie in (0,1), got {delta}"
            )));
        }
        if ln_band <= 0.0 {
            return Err(Error::InvalidRegion(format!(
                "ln_band must be positive, got {ln_band}"
            )));
        }
        Ok(Self {
            dilation,
            g,
            delta,
            ln_band,
            seed,
        })
    }

    /// Draws `count` admissible points (candidates uniform in the weighted
    /// unit ball), or reports exhaustion after a bounded number of attempts.
    pub fn draw(&self, count: usize) -> Result<Vec<AdmissibleSample>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let dim = self.dilation.dim();
        let sqrt_p_inv = self.dilation.weight().sqrt_inv_matrix().clone();
        let max_attempts = 100_000 + 5_000 * count;
        let mut out = Vec::with_capacity(count);
        let rho_max = (-self.ln_band).exp();
        for _ in 0..max_attempts {
            if out.len() == count {
                return Ok(out);
            }
            // uniform in the Euclidean unit ball, mapped to the P-ball
            let mut dir = DVector::from_fn(dim, |_, _| {
                let v: f64 = StandardNormal.sample(&mut rng);
                v
            });
            let norm = dir.norm();
            if norm < 1e-12 {
                continue;
            }
            let u: f64 = rng.random_range(0.0..1.0);
            dir *= u.powf(1.0 / dim as f64) / norm;
            let x = &sqrt_p_inv * dir;
            let rho = self.dilation.canonical_norm(&x)?;
            if rho < self.delta || rho > rho_max {
                continue;
            }
            let g_x = (self.g)(&x);
            if g_x.abs() < self.delta {
                continue;
            }
            let projected = self.dilation.apply(-rho.ln(), &x)?;
            let g_proj = (self.g)(&projected);
            if g_proj.abs() < self.delta {
                continue;
            }
            out.push(AdmissibleSample {
                x,
                rho,
                projected,
                g_x,
                g_proj,
            });
        }
        if out.len() == count {
            return Ok(out);
        }
        Err(Error::SamplerExhausted {
            attempts: max_attempts,
            accepted: out.len(),
            requested: count,
        })
    }
}

/// Result of the practical-degree estimator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeEstimate {
    /// Sample mean of the per-sample degrees; meaningful only when
    /// `positivity_ok` holds.
    pub nu_hat: Option<f64>,
    pub samples_used: usize,
    /// Whether `g(x)/g(pi_d(x)) > 0` held on every sample; a violation means
    /// the model cannot approximate a `d`-homogeneous function on this set.
    pub positivity_ok: bool,
    /// Per-sample terms `ln(g(x)/g(pi(x))) / ln ||x||_d`, for diagnostics.
    pub per_sample: Vec<f64>,
}

impl DegreeEstimate {
    /// Sample standard deviation of the per-sample terms. A large spread with
    /// passing positivity flags a dubious estimate.
    pub fn spread(&self) -> f64 {
        let k = self.per_sample.len();
        if k < 2 {
            return 0.0;
        }
        let mean = pairwise_sum(&self.per_sample) / k as f64;
        let sq: Vec<f64> = self
            .per_sample
            .iter()
            .map(|t| (t - mean) * (t - mean))
            .collect();
        (pairwise_sum(&sq) / (k - 1) as f64).sqrt()
    }
}

/// Practical homogeneity degree: draws `count` admissible points, verifies
/// the positivity condition on each, and averages the per-sample terms
/// `ln(g(x)/g(pi_d(x))) / ln ||x||_d`. For an exactly homogeneous `g` every
/// term equals the degree.
pub fn estimate_degree<F>(sampler: &KDeltaSampler<'_, F>, count: usize) -> Result<DegreeEstimate>
where
    F: Fn(&DVector<f64>) -> f64,
{
    if count == 0 {
        return Err(Error::EmptyData);
    }
    let samples = sampler.draw(count)?;
    let mut per_sample = Vec::with_capacity(samples.len());
    let mut positivity_ok = true;
    for s in &samples {
        let ratio = s.g_x / s.g_proj;
        if ratio <= 0.0 {
            positivity_ok = false;
            break;
        }
        per_sample.push(ratio.ln() / s.rho.ln());
    }
    if !positivity_ok {
        return Ok(DegreeEstimate {
            nu_hat: None,
            samples_used: samples.len(),
            positivity_ok: false,
            per_sample,
        });
    }
    let nu_hat = pairwise_sum(&per_sample) / per_sample.len() as f64;
    Ok(DegreeEstimate {
        nu_hat: Some(nu_hat),
        samples_used: samples.len(),
        positivity_ok: true,
        per_sample,
    })
}

/// Admissible generator class for the identification problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorClass {
    Full,
    Diagonal,
}

/// Configuration of the generator-identification problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Sampling annulus for the box anchors `x_k`; every offset box must
    /// exclude the origin (checked per sample).
    pub region: Shell,
    /// Fixed homogeneity degree (one of -1, 0, 1 when unknown).
    pub nu: f64,
    pub class: GeneratorClass,
    /// Trace-regularization weight.
    pub xi: f64,
    /// Number of anchor points `x_k`.
    pub samples: usize,
    /// Offsets `z_j` per anchor; for 1 the fixed offset `delta*(1,..,1)` is
    /// used, otherwise offsets are drawn uniformly in `[-delta, delta]^n`
    /// with zero components rejected.
    pub offsets: usize,
    /// Box half-width `delta`.
    pub delta: f64,
    pub seed: u64,
}

/// Result of the generator identification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorEstimate {
    pub g_hat: Vec<Vec<f64>>,
    pub objective_value: f64,
    pub anti_hurwitz: bool,
    pub admissible_class: GeneratorClass,
    /// Set when `xi = 0` met a rank-deficient system; `g_hat` is then the
    /// minimum-norm minimizer.
    pub rank_deficient: bool,
}

impl GeneratorEstimate {
    pub fn g_matrix(&self) -> DMatrix<f64> {
        let n = self.g_hat.len();
        DMatrix::from_fn(n, n, |i, j| self.g_hat[i][j])
    }
}

/// Stacked affine system for the discretized objective: every row is one
/// output component of one `(x_k, z_j)` corner residual.
fn build_system<F>(
    g_fn: &F,
    dim: usize,
    config: &GeneratorConfig,
) -> Result<(Vec<ResidualRow>, usize)>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    if config.samples == 0 || config.offsets == 0 {
        return Err(Error::EmptyData);
    }
    if !(config.delta > 0.0 && config.delta < 1.0) {
        return Err(Error::InvalidRegion(format!(
            "box delta must lie in (0,1), got {}",
            config.delta
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let offsets: Vec<DVector<f64>> = if config.offsets == 1 {
        vec![DVector::from_element(dim, config.delta)]
    } else {
        (0..config.offsets)
            .map(|_| {
                DVector::from_fn(dim, |_, _| loop {
                    let v: f64 = rng.random_range(-config.delta..=config.delta);
                    if v.abs() >= 1e-3 * config.delta {
                        break v;
                    }
                })
            })
            .collect()
    };
    let mut rows = Vec::new();
    let max_attempts = 100_000 + 1_000 * config.samples;
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < config.samples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::SamplerExhausted {
                attempts,
                accepted,
                requested: config.samples,
            });
        }
        let x_k = sample_shell(&config.region, dim, &mut rng);
        if !offsets
            .iter()
            .all(|z| box_excludes_origin(&(&x_k + z), &x_k))
        {
            continue;
        }
        for z in &offsets {
            rows.extend(corner_rows(g_fn, &x_k, z, config.nu)?);
        }
        accepted += 1;
    }
    Ok((rows, accepted * config.offsets))
}

fn solve_quadratic(
    rows: &[ResidualRow],
    sample_count: usize,
    dim: usize,
    class: GeneratorClass,
    xi: f64,
) -> Result<(DMatrix<f64>, f64, bool)> {
    let free = match class {
        GeneratorClass::Full => dim * dim,
        GeneratorClass::Diagonal => dim,
    };
    let scale = 1.0 / (sample_count as f64).sqrt();
    let mut a = DMatrix::zeros(rows.len(), free);
    let mut b = DVector::zeros(rows.len());
    for (r, row) in rows.iter().enumerate() {
        match class {
            GeneratorClass::Full => {
                for p in 0..dim {
                    for q in 0..dim {
                        a[(r, p * dim + q)] = row.coeffs[(p, q)] * scale;
                    }
                }
            }
            GeneratorClass::Diagonal => {
                for p in 0..dim {
                    a[(r, p)] = row.coeffs[(p, p)] * scale;
                }
            }
        }
        b[r] = -row.constant * scale;
    }
    let (solution, rank_deficient) = if xi > 0.0 {
        let mut aug = DMatrix::zeros(rows.len() + free, free);
        aug.view_mut((0, 0), (rows.len(), free)).copy_from(&a);
        let sq = xi.sqrt();
        for i in 0..free {
            aug[(rows.len() + i, i)] = sq;
        }
        let mut rhs = DMatrix::zeros(rows.len() + free, 1);
        rhs.view_mut((0, 0), (rows.len(), 1)).copy_from(&b);
        let qr = aug.qr();
        qr.q_tr_mul(&mut rhs);
        let r = qr.unpack_r();
        let sol = r
            .solve_upper_triangular(&rhs.view((0, 0), (free, 1)).into_owned())
            .ok_or_else(|| Error::SolveFailed("triangular solve failed".into()))?;
        (DVector::from_column_slice(sol.as_slice()), false)
    } else {
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let eps = f64::EPSILON * smax * rows.len().max(free) as f64;
        let rank = svd.rank(eps);
        let sol = svd
            .solve(&b, eps)
            .map_err(|e| Error::SolveFailed(e.to_string()))?;
        (DVector::from_column_slice(sol.as_slice()), rank < free)
    };
    let g_hat = match class {
        GeneratorClass::Full => DMatrix::from_fn(dim, dim, |p, q| solution[p * dim + q]),
        GeneratorClass::Diagonal => {
            DMatrix::from_fn(dim, dim, |p, q| if p == q { solution[p] } else { 0.0 })
        }
    };
    let residual = &a * &solution - &b;
    let objective = residual.norm_squared() + xi * g_hat.norm_squared();
    Ok((g_hat, objective, rank_deficient))
}

/// Identifies the dilation generator of (the function approximated by) `g_fn`
/// by minimizing the discretized corner-rule objective
///
/// `J(G) = (1/(M L)) sum_k sum_j corner_residual(x_k, z_j, nu, G)^2 + xi tr(G'G)`
///
/// a convex quadratic in the free entries of `G`, solved exactly by
/// regularized linear least squares. Vector-valued `g_fn` is handled by
/// stacking one residual per output component.
pub fn identify_generator<F>(
    g_fn: F,
    dim: usize,
    config: &GeneratorConfig,
) -> Result<GeneratorEstimate>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let (rows, sample_count) = build_system(&g_fn, dim, config)?;
    let (g_hat, objective, rank_deficient) =
        solve_quadratic(&rows, sample_count, dim, config.class, config.xi)?;
    Ok(GeneratorEstimate {
        anti_hurwitz: is_anti_hurwitz(&g_hat, EIG_TOL),
        g_hat: (0..dim)
            .map(|i| (0..dim).map(|j| g_hat[(i, j)]).collect())
            .collect(),
        objective_value: objective,
        admissible_class: config.class,
        rank_deficient,
    })
}

/// Evaluates the discretized objective `J(G)` (including the `xi` term) at a
/// given generator, over the same sample set the identification would use.
pub fn objective_at<F>(
    g_fn: F,
    dim: usize,
    config: &GeneratorConfig,
    g: &DMatrix<f64>,
) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let (rows, sample_count) = build_system(&g_fn, dim, config)?;
    let sq: Vec<f64> = rows
        .iter()
        .map(|row| {
            let r = row.evaluate(g);
            r * r
        })
        .collect();
    Ok(pairwise_sum(&sq) / sample_count as f64 + config.xi * g.norm_squared())
}
