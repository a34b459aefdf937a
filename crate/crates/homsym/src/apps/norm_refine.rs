//! Explicit homogeneous norms and their refinement by a homogeneous net.
//!
//! The canonical homogeneous norm is defined implicitly and costs a bisection
//! per evaluation. A closed-form `d`-homogeneous surrogate evaluates in a few
//! flops but misses the canonical norm by some fixed offset on the unit
//! sphere; wrapping it in a degree-1 homogeneous net trained against the
//! constant 1 on the sphere shrinks that offset while keeping the exact
//! homogeneity `value(d(s)x) = e^s value(x)`.

use nalgebra::{DMatrix, DVector, Matrix2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dilation::{Dilation, Generator, HomogeneousNorm, WeightedNorm};
use crate::error::{Error, Result};
use crate::networks::{random_hidden_layer, train_hom_with_norm, Activation, HomNet, LabeledDataset, RIDGE_DEFAULT};

use super::rigid_body::stream_seed;

/// Closed-form `d`-homogeneous norm in the plane for the weighted dilation
/// `d(s) = diag(e^{r1 s}, e^{r2 s})`:
///
/// `||x||_{d*} = (Psi(x)' Q Psi(x))^{1/(2 r1)}`,
/// `Psi(x) = (x1, |x2|^{r1/r2} sign(x2))`.
///
/// `Psi(d(s)x) = e^{r1 s} Psi(x)`, so the value scales exactly like `e^s`.
#[derive(Debug, Clone)]
pub struct ExplicitHomNorm {
    q: Matrix2<f64>,
    dilation: Dilation,
    r1: f64,
    r2: f64,
}

impl ExplicitHomNorm {
    pub fn new(q: Matrix2<f64>, dilation: Dilation) -> Result<Self> {
        if dilation.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: dilation.dim(),
            });
        }
        let g = dilation.generator().matrix();
        if g[(0, 1)] != 0.0 || g[(1, 0)] != 0.0 {
            return Err(Error::Data(
                "explicit norm requires a diagonal generator".into(),
            ));
        }
        let asym = (q[(0, 1)] - q[(1, 0)]).abs();
        if asym > 1e-9 * (1.0 + q.amax()) {
            return Err(Error::NotSymmetric(asym));
        }
        let eigs = q.symmetric_eigenvalues();
        if eigs.min() <= 0.0 {
            return Err(Error::NotPositiveDefinite(eigs.min()));
        }
        Ok(Self {
            q,
            r1: g[(0, 0)],
            r2: g[(1, 1)],
            dilation,
        })
    }

    /// The worked two-dimensional example: `d(s) = diag(e^{5s}, e^{4s})`,
    /// canonical norm weighted by `P`, explicit norm weighted by `Q`.
    pub fn example() -> Self {
        let p = DMatrix::from_row_slice(2, 2, &[0.1157, 0.0194, 0.0194, 0.1186]);
        let g = DMatrix::from_row_slice(2, 2, &[5.0, 0.0, 0.0, 4.0]);
        let dilation = Dilation::new(
            Generator::new(g).expect("diag(5,4) is anti-Hurwitz"),
            WeightedNorm::new(p).expect("example P is SPD"),
        )
        .expect("example dilation is monotone");
        let q = Matrix2::new(0.1225, 0.0176, 0.0176, 0.0720);
        Self::new(q, dilation).expect("example Q is SPD")
    }

    pub fn q_matrix(&self) -> &Matrix2<f64> {
        &self.q
    }

    /// The closed-form norm value.
    pub fn value_of(&self, x: &DVector<f64>) -> f64 {
        let psi = nalgebra::Vector2::new(
            x[0],
            x[1].abs().powf(self.r1 / self.r2) * x[1].signum(),
        );
        let form = (psi.transpose() * self.q * psi)[(0, 0)].max(0.0);
        form.powf(1.0 / (2.0 * self.r1))
    }
}

impl HomogeneousNorm for ExplicitHomNorm {
    fn dilation(&self) -> &Dilation {
        &self.dilation
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        if x.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(self.value_of(x))
    }
}

/// A trained refinement of an explicit norm:
/// `value(x) = ||x||_{d*} C sigma(A d(-ln ||x||_{d*}) x + b)`.
/// Exactly 1-homogeneous by construction, and itself a norm provider.
#[derive(Debug, Clone)]
pub struct RefinedNorm {
    net: HomNet,
    base: ExplicitHomNorm,
}

impl RefinedNorm {
    pub fn net(&self) -> &HomNet {
        &self.net
    }

    pub fn base(&self) -> &ExplicitHomNorm {
        &self.base
    }
}

impl HomogeneousNorm for RefinedNorm {
    fn dilation(&self) -> &Dilation {
        self.base.dilation()
    }

    fn value(&self, x: &DVector<f64>) -> Result<f64> {
        let rho = self.base.value(x)?;
        if rho == 0.0 {
            return Ok(0.0);
        }
        Ok(self.net.eval_with_norm(&self.base, x)?[0])
    }
}

/// Trains the refinement on `samples` points of the sphere
/// `S = { ||x||_P = 1 }` against the constant target 1.
pub fn refine_norm(
    base: &ExplicitHomNorm,
    hidden: usize,
    samples: usize,
    ridge: f64,
    seed: u64,
) -> Result<RefinedNorm> {
    let mut net_rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, 0));
    let (a, b) = random_hidden_layer(2, hidden, &mut net_rng);
    let mut point_rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, 1));
    let points: Vec<DVector<f64>> = (0..samples)
        .map(|_| sphere_point(base.dilation().weight(), &mut point_rng))
        .collect();
    let data = LabeledDataset::from_fn(points, |_| DVector::from_row_slice(&[1.0]))?;
    let trained = train_hom_with_norm(
        a,
        b,
        Activation::Sigmoid,
        base,
        base.dilation(),
        1.0,
        &data,
        ridge,
    )?;
    Ok(RefinedNorm {
        net: trained.net,
        base: base.clone(),
    })
}

/// A point on the weighted unit sphere `{ ||x||_P = 1 }`, uniform in angle.
fn sphere_point(weight: &WeightedNorm, rng: &mut impl Rng) -> DVector<f64> {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let v = DVector::from_row_slice(&[theta.cos(), theta.sin()]);
    let n = weight.norm(&v);
    v / n
}

/// Configuration of the norm-refinement harness.
#[derive(Debug, Clone)]
pub struct NormRefinementConfig {
    pub seed: u64,
    /// Hidden width of the refinement net.
    pub hidden: usize,
    /// Training points on the sphere.
    pub train_samples: usize,
    /// Evaluation points on the sphere.
    pub eval_samples: usize,
    /// Points per level line in the emitted plot data.
    pub level_line_points: usize,
    pub ridge: f64,
}

impl Default for NormRefinementConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            hidden: 10,
            train_samples: 1_000,
            eval_samples: 2_000,
            level_line_points: 256,
            ridge: RIDGE_DEFAULT,
        }
    }
}

/// Harness output: sup errors against the canonical norm on the sphere and
/// the unit-level-line point sets of the three norms.
#[derive(Debug, Clone)]
pub struct NormRefinementReport {
    pub explicit_sup_error: f64,
    pub refined_sup_error: f64,
    /// `(x1, x2, label)` rows for the canonical, explicit and refined unit
    /// spheres.
    pub level_lines: Vec<(f64, f64, &'static str)>,
}

impl NormRefinementReport {
    pub fn level_lines_csv(&self) -> String {
        let mut out = String::from("x1,x2,label\n");
        for (x1, x2, label) in &self.level_lines {
            out.push_str(&format!("{x1:.12e},{x2:.12e},{label}\n"));
        }
        out
    }

    pub fn errors_csv(&self) -> String {
        format!(
            "norm,sup_error\nexplicit,{:.6e}\nrefined,{:.6e}\n",
            self.explicit_sup_error, self.refined_sup_error
        )
    }
}

/// Finds `r > 0` with `norm(r * u) = 1` by bisection along the ray; the value
/// is strictly increasing in `r` for a monotone dilation.
fn ray_to_unit_level<N: HomogeneousNorm>(norm: &N, u: &DVector<f64>) -> Result<DVector<f64>> {
    let mut lo = 1e-6;
    let mut hi = 1e6;
    let val = |r: f64| norm.value(&(u * r));
    if val(lo)? > 1.0 || val(hi)? < 1.0 {
        return Err(Error::SolveFailed("level line not bracketed".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = val(mid)?;
        if (v - 1.0).abs() <= 1e-12 || hi - lo <= 1e-13 * mid {
            return Ok(u * mid);
        }
        if v < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(u * (0.5 * (lo + hi)))
}

/// Trains the refinement and reports sup errors of the explicit and refined
/// norms against the bisection-computed canonical norm on the sphere, plus
/// the three unit level lines for plotting.
pub fn norm_refinement_harness(config: &NormRefinementConfig) -> Result<NormRefinementReport> {
    let base = ExplicitHomNorm::example();
    let canonical = base.dilation().clone();
    let refined = refine_norm(
        &base,
        config.hidden,
        config.train_samples,
        config.ridge,
        config.seed,
    )?;

    let mut eval_rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, 2));
    let mut explicit_err = 0.0_f64;
    let mut refined_err = 0.0_f64;
    for _ in 0..config.eval_samples {
        let x = sphere_point(canonical.weight(), &mut eval_rng);
        let truth = canonical.canonical_norm(&x)?;
        explicit_err = explicit_err.max((truth - base.value(&x)?).abs());
        refined_err = refined_err.max((truth - refined.value(&x)?).abs());
    }

    let mut level_lines = Vec::new();
    for k in 0..config.level_line_points {
        let theta = std::f64::consts::TAU * k as f64 / config.level_line_points as f64;
        let u = DVector::from_row_slice(&[theta.cos(), theta.sin()]);
        let on_canonical = ray_to_unit_level(&canonical, &u)?;
        level_lines.push((on_canonical[0], on_canonical[1], "canonical"));
        let on_explicit = ray_to_unit_level(&base, &u)?;
        level_lines.push((on_explicit[0], on_explicit[1], "explicit"));
        let on_refined = ray_to_unit_level(&refined, &u)?;
        level_lines.push((on_refined[0], on_refined[1], "refined"));
    }

    Ok(NormRefinementReport {
        explicit_sup_error: explicit_err,
        refined_sup_error: refined_err,
        level_lines,
    })
}
