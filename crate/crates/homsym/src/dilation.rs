//! Linear dilation groups `d(s) = exp(s*G)` and canonical homogeneous norms.
//!
//! A dilation is a one-parameter matrix group generated by an anti-Hurwitz
//! matrix `G` (all eigenvalues with positive real part). It expands every
//! nonzero vector as `s -> +inf` and contracts it as `s -> -inf`. When the
//! strict-monotonicity LMI `P*G + G'*P > 0` holds for a symmetric positive
//! definite weight `P`, the map `s -> ||d(s)x||_P` is strictly increasing and
//! the canonical homogeneous norm `||x||_d = e^{s_x}` with `||d(-s_x)x||_P = 1`
//! is well defined. This module provides the group action, the canonical norm
//! (by bracketed bisection), the unit-sphere projector, the closed-form norm
//! gradient and the sandwich exponents relating `||.||_P` and `||.||_d`.

use nalgebra::{DMatrix, DVector, RowDVector, SymmetricEigen};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Eigenvalue-positivity threshold for the anti-Hurwitz and LMI checks.
pub const EIG_TOL: f64 = 1e-9;

/// Bisection tolerance for the canonical norm: bracket width and
/// `| ||d(-s)x|| - 1 |` termination.
pub const NORM_TOL: f64 = 1e-12;

/// Below this weighted norm a vector is treated as exactly zero:
/// `canonical_norm` returns 0, `project` and `norm_gradient` refuse.
pub const ZERO_THRESHOLD: f64 = 1e-300;

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m.nrows())
}

/// Smallest real part of the spectrum of a general real matrix.
pub fn spectral_abscissa_lower(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |acc, l| acc.min(l.re))
}

/// True iff every eigenvalue of `m` has real part greater than `tol`.
pub fn is_anti_hurwitz(m: &DMatrix<f64>, tol: f64) -> bool {
    spectral_abscissa_lower(m) > tol
}

/// Dense matrix exponential (Pade scaling-and-squaring).
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.exp()
}

/// Generator of a linear continuous dilation group.
///
/// Construction enforces the anti-Hurwitz invariant: every eigenvalue of the
/// matrix must have real part above the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    matrix: DMatrix<f64>,
}

impl Generator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        Self::with_tol(matrix, EIG_TOL)
    }

    pub fn with_tol(matrix: DMatrix<f64>, tol: f64) -> Result<Self> {
        check_square(&matrix)?;
        let lower = spectral_abscissa_lower(&matrix);
        if lower <= tol {
            return Err(Error::NotAntiHurwitz(lower));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Diagonal rate vector when the matrix is exactly diagonal.
    fn diagonal_rates(&self) -> Option<DVector<f64>> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.matrix[(i, j)] != 0.0 {
                    return None;
                }
            }
        }
        Some(self.matrix.diagonal())
    }
}

/// Weighted Euclidean norm `||x|| = sqrt(x' P x)` with `P` symmetric positive
/// definite. Keeps `P^{1/2}` and `P^{-1/2}` for the sandwich exponents.
#[derive(Debug, Clone)]
pub struct WeightedNorm {
    p: DMatrix<f64>,
    sqrt_p: DMatrix<f64>,
    sqrt_p_inv: DMatrix<f64>,
}

impl WeightedNorm {
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        let n = check_square(&p)?;
        let scale = 1.0 + max_abs(&p);
        let mut asym = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                asym = asym.max((p[(i, j)] - p[(j, i)]).abs());
            }
        }
        if asym > EIG_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        // Symmetrize before the eigensolve so roundoff asymmetry cannot leak.
        let sym = (&p + p.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let min_eig = eig.eigenvalues.min();
        if min_eig <= EIG_TOL * scale {
            return Err(Error::NotPositiveDefinite(min_eig));
        }
        let sqrt_vals = eig.eigenvalues.map(f64::sqrt);
        let sqrt_p = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
        let inv_vals = sqrt_vals.map(|v| 1.0 / v);
        let sqrt_p_inv = &eig.eigenvectors * DMatrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose();
        Ok(Self { p, sqrt_p, sqrt_p_inv })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            p: DMatrix::identity(n, n),
            sqrt_p: DMatrix::identity(n, n),
            sqrt_p_inv: DMatrix::identity(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Symmetric square root `P^{1/2}`.
    pub fn sqrt_matrix(&self) -> &DMatrix<f64> {
        &self.sqrt_p
    }

    /// Inverse square root `P^{-1/2}`; maps the Euclidean unit ball onto the
    /// `P`-weighted unit ball.
    pub fn sqrt_inv_matrix(&self) -> &DMatrix<f64> {
        &self.sqrt_p_inv
    }

    /// `sqrt(x' P x)`; nonnegative, zero only at the origin.
    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.p * x)).max(0.0).sqrt()
    }
}

/// Sandwich exponents of a monotone dilation: `alpha >= beta > 0` with
/// `e^{beta s} ||x|| <= ||d(s)x|| <= e^{alpha s} ||x||` for `s >= 0` (reversed
/// for `s <= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    pub alpha: f64,
    pub beta: f64,
}

impl NormBounds {
    /// Lower sandwich function `sigma_1(rho)`, so that `sigma_1(||x||_d) <= ||x||`.
    pub fn sigma_lower(&self, rho: f64) -> f64 {
        if rho <= 1.0 {
            rho.powf(self.alpha)
        } else {
            rho.powf(self.beta)
        }
    }

    /// Upper sandwich function `sigma_2(rho)`, so that `||x|| <= sigma_2(||x||_d)`.
    pub fn sigma_upper(&self, rho: f64) -> f64 {
        if rho <= 1.0 {
            rho.powf(self.beta)
        } else {
            rho.powf(self.alpha)
        }
    }
}

/// A `d`-homogeneous norm: positive definite, with
/// `norm(d(s)x) = e^s * norm(x)`. The canonical norm of a [`Dilation`] is the
/// default provider; explicit closed-form norms and trained refinements can
/// be swapped in anywhere a provider is accepted.
pub trait HomogeneousNorm {
    /// Dilation the norm is homogeneous under.
    fn dilation(&self) -> &Dilation;

    /// Norm value at `x`; zero only at the origin.
    fn value(&self, x: &DVector<f64>) -> Result<f64>;

    /// Projector onto the provider's unit sphere: `d(-ln norm(x)) x`.
    fn project(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let rho = self.value(x)?;
        if rho == 0.0 {
            return Err(Error::ZeroVector);
        }
        self.dilation().apply(-rho.ln(), x)
    }
}

impl HomogeneousNorm for Dilation {
    fn dilation(&self) -> &Dilation {
        self
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        self.canonical_norm(x)
    }
}

/// Strict-monotonicity check: true iff `P` is positive definite and the
/// smallest eigenvalue of `P*G + G'*P` exceeds `tol`.
///
/// Errors if `P` is not symmetric within tolerance.
pub fn check_monotonicity_with_tol(g: &DMatrix<f64>, p: &DMatrix<f64>, tol: f64) -> Result<bool> {
    let n = check_square(g)?;
    let np = check_square(p)?;
    if n != np {
        return Err(Error::DimensionMismatch { expected: n, got: np });
    }
    let scale = 1.0 + max_abs(p);
    let mut asym = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((p[(i, j)] - p[(j, i)]).abs());
        }
    }
    if asym > tol.max(EIG_TOL) * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let p_eigs = SymmetricEigen::new((p + p.transpose()) * 0.5).eigenvalues;
    if p_eigs.min() <= tol * scale {
        return Ok(false);
    }
    let lmi = p * g + g.transpose() * p;
    let lmi_sym = (&lmi + lmi.transpose()) * 0.5;
    let min_eig = SymmetricEigen::new(lmi_sym).eigenvalues.min();
    Ok(min_eig > tol)
}

/// [`check_monotonicity_with_tol`] at the default tolerance.
pub fn check_monotonicity(g: &DMatrix<f64>, p: &DMatrix<f64>) -> Result<bool> {
    check_monotonicity_with_tol(g, p, EIG_TOL)
}

/// A strictly monotone linear dilation: generator + weighted norm satisfying
/// the LMI `P*G + G'*P > 0`. Immutable and safe to share across threads.
#[derive(Debug, Clone)]
pub struct Dilation {
    generator: Generator,
    weight: WeightedNorm,
    bounds: NormBounds,
    diag_rates: Option<DVector<f64>>,
}

impl Dilation {
    /// Builds a dilation after verifying the monotonicity LMI.
    pub fn new(generator: Generator, weight: WeightedNorm) -> Result<Self> {
        if generator.dim() != weight.dim() {
            return Err(Error::DimensionMismatch {
                expected: generator.dim(),
                got: weight.dim(),
            });
        }
        let lmi = weight.matrix() * generator.matrix() + generator.matrix().transpose() * weight.matrix();
        let lmi_sym = (&lmi + lmi.transpose()) * 0.5;
        let min_eig = SymmetricEigen::new(lmi_sym).eigenvalues.min();
        if min_eig <= EIG_TOL {
            return Err(Error::MonotonicityViolated(min_eig));
        }
        // Sandwich exponents from the symmetrized similarity transform.
        let h = &weight.sqrt_p * generator.matrix() * &weight.sqrt_p_inv;
        let sym = (&h + h.transpose()) * 0.5;
        let eigs = SymmetricEigen::new(sym).eigenvalues;
        let bounds = NormBounds {
            alpha: eigs.max(),
            beta: eigs.min(),
        };
        let diag_rates = if weight.matrix().is_identity(0.0) || generator.diagonal_rates().is_some() {
            generator.diagonal_rates()
        } else {
            None
        };
        Ok(Self {
            generator,
            weight,
            bounds,
            diag_rates,
        })
    }

    /// Standard dilation `d(s) = e^s I` with the Euclidean norm.
    pub fn standard(n: usize) -> Self {
        Self::new(
            Generator::new(DMatrix::identity(n, n)).expect("identity is anti-Hurwitz"),
            WeightedNorm::identity(n),
        )
        .expect("standard dilation is monotone")
    }

    /// Weighted dilation `G = diag(rates)` with the Euclidean norm.
    pub fn diagonal(rates: &[f64]) -> Result<Self> {
        let n = rates.len();
        let g = DMatrix::from_diagonal(&DVector::from_row_slice(rates));
        Self::new(Generator::new(g)?, WeightedNorm::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn weight(&self) -> &WeightedNorm {
        &self.weight
    }

    /// Sandwich exponents `alpha >= beta > 0`.
    pub fn norm_bounds(&self) -> NormBounds {
        self.bounds
    }

    /// The group element `d(s) = exp(s*G)` as a dense matrix.
    pub fn matrix_at(&self, s: f64) -> DMatrix<f64> {
        match &self.diag_rates {
            Some(r) => DMatrix::from_diagonal(&r.map(|ri| (s * ri).exp())),
            None => expm(&(self.generator.matrix() * s)),
        }
    }

    /// Applies `d(s)` to `x`.
    pub fn apply(&self, s: f64, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !s.is_finite() {
            return Err(Error::NonFinite);
        }
        match &self.diag_rates {
            Some(r) => Ok(DVector::from_fn(x.len(), |i, _| (s * r[i]).exp() * x[i])),
            None => Ok(self.matrix_at(s) * x),
        }
    }

    /// `||d(-s)x||_P`, the quantity driven to 1 by the canonical norm.
    fn contracted_norm(&self, s: f64, x: &DVector<f64>) -> f64 {
        match &self.diag_rates {
            Some(r) => {
                let w = DVector::from_fn(x.len(), |i, _| (-s * r[i]).exp() * x[i]);
                self.weight.norm(&w)
            }
            None => self.weight.norm(&(self.matrix_at(-s) * x)),
        }
    }

    /// Canonical homogeneous norm `||x||_d`: zero at the origin, otherwise
    /// `e^{s_x}` where `s_x` solves `||d(-s_x)x||_P = 1`.
    ///
    /// The root is found by bisection on a bracket derived from the sandwich
    /// inequality, which guarantees enclosure for any monotone dilation.
    pub fn canonical_norm(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let r = self.weight.norm(x);
        if r < ZERO_THRESHOLD {
            return Ok(0.0);
        }
        let lr = r.ln();
        let (a, b) = (lr / self.bounds.alpha, lr / self.bounds.beta);
        let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
        // Pad against rounding at the bracket edges.
        lo -= NORM_TOL * (1.0 + lo.abs());
        hi += NORM_TOL * (1.0 + hi.abs());
        for _ in 0..200 {
            if hi - lo <= NORM_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let v = self.contracted_norm(mid, x);
            if (v - 1.0).abs() <= NORM_TOL {
                return Ok(mid.exp());
            }
            // s -> ||d(-s)x|| is strictly decreasing.
            if v > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((0.5 * (lo + hi)).exp())
    }

    /// Homogeneous projector `pi_d(x) = d(-ln ||x||_d) x` onto the unit
    /// sphere `{ ||y||_P = 1 }`.
    pub fn project(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let rho = self.canonical_norm(x)?;
        if rho == 0.0 {
            return Err(Error::ZeroVector);
        }
        self.apply(-rho.ln(), x)
    }

    /// Closed-form gradient of the canonical norm at `x != 0` (a row vector):
    ///
    /// `d||x||_d/dx = ||x||_d * (z' P d(-ln||x||_d)) / (z' P G z)` with
    /// `z = d(-ln||x||_d) x`. Satisfies the Euler identity
    /// `grad * G x = ||x||_d`.
    pub fn norm_gradient(&self, x: &DVector<f64>) -> Result<RowDVector<f64>> {
        let rho = self.canonical_norm(x)?;
        if rho == 0.0 {
            return Err(Error::ZeroVector);
        }
        let s = rho.ln();
        let d_contract = self.matrix_at(-s);
        let z = &d_contract * x;
        let pz = self.weight.matrix() * &z;
        let denom = pz.dot(&(self.generator.matrix() * &z));
        let num = pz.transpose() * d_contract;
        Ok(num * (rho / denom))
    }
}

// JSON schema: { "n": int, "G": row-major array, "P": row-major array }.

#[derive(Serialize, Deserialize)]
struct DilationSchema {
    n: usize,
    #[serde(rename = "G")]
    g: Vec<f64>,
    #[serde(rename = "P")]
    p: Vec<f64>,
}

impl Serialize for Dilation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let schema = DilationSchema {
            n,
            g: row_major(self.generator.matrix()),
            p: row_major(self.weight.matrix()),
        };
        schema.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Dilation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let schema = DilationSchema::deserialize(deserializer)?;
        let n = schema.n;
        if schema.g.len() != n * n || schema.p.len() != n * n {
            return Err(D::Error::custom(format!(
                "expected {} entries for an {n}x{n} matrix",
                n * n
            )));
        }
        let g = DMatrix::from_row_slice(n, n, &schema.g);
        let p = DMatrix::from_row_slice(n, n, &schema.p);
        let generator = Generator::new(g).map_err(D::Error::custom)?;
        let weight = WeightedNorm::new(p).map_err(D::Error::custom)?;
        Dilation::new(generator, weight).map_err(D::Error::custom)
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag2() -> Dilation {
        Dilation::diagonal(&[1.0, 2.0]).unwrap()
    }

    #[test]
    fn dilate_identity_at_zero() {
        let d = diag2();
        let x = DVector::from_row_slice(&[0.7, -2.5]);
        let y = d.apply(0.0, &x).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn dilate_standard_scales() {
        let d = Dilation::standard(2);
        let x = DVector::from_row_slice(&[1.0, -3.0]);
        let y = d.apply(2.0_f64.ln(), &x).unwrap();
        assert_relative_eq!(y[0], 2.0, max_relative = 1e-14);
        assert_relative_eq!(y[1], -6.0, max_relative = 1e-14);
    }

    #[test]
    fn dilate_weighted_componentwise() {
        // Oracle: componentwise scalar exponentials e^{r_i s}.
        let d = diag2();
        let x = DVector::from_row_slice(&[1.0, 1.0]);
        let y = d.apply(2.0_f64.ln(), &x).unwrap();
        assert_relative_eq!(y[0], 2.0, max_relative = 1e-14);
        assert_relative_eq!(y[1], 4.0, max_relative = 1e-14);
    }

    #[test]
    fn dilate_rejects_dimension_mismatch() {
        let d = diag2();
        let x = DVector::from_row_slice(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            d.apply(0.1, &x),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn monotonicity_checks() {
        let i2 = DMatrix::identity(2, 2);
        assert!(check_monotonicity(&i2, &i2).unwrap());
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        assert!(check_monotonicity(&g, &i2).unwrap());
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(!check_monotonicity(&bad, &i2).unwrap());
        let nonsym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.5, 1.0]);
        assert!(matches!(
            check_monotonicity(&i2, &nonsym),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn generator_rejects_non_anti_hurwitz() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(Generator::new(g), Err(Error::NotAntiHurwitz(_))));
        // Rotation matrix: purely imaginary spectrum.
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(matches!(Generator::new(rot), Err(Error::NotAntiHurwitz(_))));
    }

    #[test]
    fn dilation_rejects_lmi_violation() {
        // Anti-Hurwitz generator whose LMI fails for this particular P.
        let g = Generator::new(DMatrix::from_row_slice(2, 2, &[0.1, 3.0, 0.0, 0.1])).unwrap();
        let p = WeightedNorm::new(DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(
            Dilation::new(g, p),
            Err(Error::MonotonicityViolated(_))
        ));
    }

    #[test]
    fn canonical_norm_standard_is_euclidean() {
        let d = Dilation::standard(3);
        let x = DVector::from_row_slice(&[1.0, -2.0, 2.0]);
        assert_relative_eq!(d.canonical_norm(&x).unwrap(), 3.0, max_relative = 1e-13);
    }

    #[test]
    fn canonical_norm_zero_is_zero() {
        let d = diag2();
        assert_eq!(d.canonical_norm(&DVector::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn canonical_norm_analytic_case() {
        // e^{-2s} * 4 = 1  =>  s = ln 2.
        let d = diag2();
        let x = DVector::from_row_slice(&[0.0, 4.0]);
        assert_relative_eq!(d.canonical_norm(&x).unwrap(), 2.0, max_relative = 1e-11);
    }

    #[test]
    fn canonical_norm_rejects_non_finite() {
        let d = diag2();
        let x = DVector::from_row_slice(&[f64::NAN, 1.0]);
        assert!(matches!(d.canonical_norm(&x), Err(Error::NonFinite)));
    }

    #[test]
    fn project_standard() {
        let d = Dilation::standard(2);
        let x = DVector::from_row_slice(&[3.0, 4.0]);
        let p = d.project(&x).unwrap();
        assert_relative_eq!(p[0], 0.6, max_relative = 1e-12);
        assert_relative_eq!(p[1], 0.8, max_relative = 1e-12);
    }

    #[test]
    fn project_weighted_analytic() {
        let d = diag2();
        let x = DVector::from_row_slice(&[0.0, 4.0]);
        let p = d.project(&x).unwrap();
        assert_relative_eq!(p[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(p[1], 1.0, max_relative = 1e-10);
    }

    #[test]
    fn project_fixes_unit_sphere() {
        let d = diag2();
        let x = DVector::from_row_slice(&[0.6, 0.8]);
        let p = d.project(&x).unwrap();
        assert_relative_eq!((p - x).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn project_rejects_origin() {
        let d = diag2();
        assert!(matches!(d.project(&DVector::zeros(2)), Err(Error::ZeroVector)));
    }

    #[test]
    fn norm_bounds_standard_and_diagonal() {
        let d = Dilation::standard(4);
        let b = d.norm_bounds();
        assert_relative_eq!(b.alpha, 1.0, max_relative = 1e-12);
        assert_relative_eq!(b.beta, 1.0, max_relative = 1e-12);

        let d = diag2();
        let b = d.norm_bounds();
        assert_relative_eq!(b.alpha, 2.0, max_relative = 1e-12);
        assert_relative_eq!(b.beta, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn norm_gradient_standard() {
        let d = Dilation::standard(2);
        let x = DVector::from_row_slice(&[3.0, 4.0]);
        let g = d.norm_gradient(&x).unwrap();
        assert_relative_eq!(g[0], 0.6, max_relative = 1e-10);
        assert_relative_eq!(g[1], 0.8, max_relative = 1e-10);
    }

    #[test]
    fn norm_gradient_euler_identity() {
        let d = diag2();
        let x = DVector::from_row_slice(&[0.3, -1.7]);
        let g = d.norm_gradient(&x).unwrap();
        let rho = d.canonical_norm(&x).unwrap();
        let gx = (g * (d.generator().matrix() * &x))[0];
        assert_relative_eq!(gx, rho, max_relative = 1e-8);
    }

    #[test]
    fn norm_gradient_rejects_origin() {
        let d = diag2();
        assert!(matches!(
            d.norm_gradient(&DVector::zeros(2)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn expm_matches_high_precision_reference() {
        // Reference values computed once with a 50-digit arbitrary-precision
        // expm and frozen here. ||2.5*A||_2 is about 7.6.
        let a = DMatrix::from_row_slice(3, 3, &[0.9, -1.7, 0.4, 2.3, 1.1, -0.6, -0.8, 0.5, 1.4]);
        let e = expm(&(a * 2.5));
        let reference = DMatrix::from_row_slice(
            3,
            3,
            &[
                9.8511538060091638942,
                11.249694488542146682,
                1.8573150216727689575,
                -12.372063250497007301,
                8.6928329557239865679,
                6.0552267064240078694,
                8.3898444511595201851,
                3.0236274076500327354,
                21.032969352588937328,
            ],
        );
        let rel = (&e - &reference).norm() / reference.norm();
        assert!(rel < 1e-13, "relative error {rel:.3e}");

        // Defective (Jordan) block: spectral decompositions would fail here.
        let b = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        let e = expm(&(b * 3.0));
        let reference = DMatrix::from_row_slice(
            3,
            3,
            &[
                20.085536923187667741,
                60.256610769563003223,
                90.384916154344504834,
                0.0,
                20.085536923187667741,
                60.256610769563003223,
                0.0,
                0.0,
                20.085536923187667741,
            ],
        );
        let rel = (&e - &reference).norm() / reference.norm();
        assert!(rel < 1e-13, "relative error {rel:.3e}");

        // Nilpotent generator: exp([[0,1],[0,0]]) = [[1,1],[0,1]] exactly.
        let n = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let e = expm(&n);
        assert_eq!(e[(0, 0)], 1.0);
        assert_eq!(e[(0, 1)], 1.0);
        assert_eq!(e[(1, 0)], 0.0);
        assert_eq!(e[(1, 1)], 1.0);
    }

    #[test]
    fn serde_round_trip() {
        let d = diag2();
        let text = serde_json::to_string(&d).unwrap();
        let back: Dilation = serde_json::from_str(&text).unwrap();
        assert_eq!(back.generator().matrix(), d.generator().matrix());
        assert_eq!(back.weight().matrix(), d.weight().matrix());
    }

    #[test]
    fn serde_rejects_bad_generator() {
        let text = r#"{"n":2,"G":[1.0,0.0,0.0,-1.0],"P":[1.0,0.0,0.0,1.0]}"#;
        assert!(serde_json::from_str::<Dilation>(text).is_err());
    }
}
