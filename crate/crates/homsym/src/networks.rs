//! Conventional shallow networks `g(x) = C sigma(Ax + b)` and their
//! homogeneous counterparts `h(x) = ||x||_d^nu * C sigma(A pi_d(x) + b)`.
//!
//! The homogeneous net evaluates the inner network only on the unit sphere
//! (through the projector `pi_d`) and extrapolates along dilation orbits by
//! the factor `||x||_d^nu`, so it is exactly `d`-homogeneous of degree `nu`
//! by construction. Training of the output layer is linear least squares in
//! both cases; the hidden layer `A, b` stays fixed (random-feature regime).

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dilation::{Dilation, HomogeneousNorm};
use crate::error::{Error, Result};
use crate::parallel;

/// Default Tikhonov parameter: small enough not to disturb reported
/// precisions, large enough to guard against rank deficiency.
pub const RIDGE_DEFAULT: f64 = 1e-10;

/// Componentwise activation of the hidden layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    /// `1 / (1 + e^{-t})`
    Sigmoid,
    Tanh,
}

impl Activation {
    pub fn apply(self, t: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-t).exp()),
            Activation::Tanh => t.tanh(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::Data(format!("unknown activation '{other}'"))),
        }
    }
}

/// One-hidden-layer network `x -> C sigma(Ax + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShallowNet {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DMatrix<f64>,
    activation: Activation,
}

impl ShallowNet {
    pub fn new(
        a: DMatrix<f64>,
        b: DVector<f64>,
        c: DMatrix<f64>,
        activation: Activation,
    ) -> Result<Self> {
        let hidden = a.nrows();
        if b.len() != hidden {
            return Err(Error::DimensionMismatch {
                expected: hidden,
                got: b.len(),
            });
        }
        if c.ncols() != hidden {
            return Err(Error::DimensionMismatch {
                expected: hidden,
                got: c.ncols(),
            });
        }
        if a.iter().chain(b.iter()).chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { a, b, c, activation })
    }

    pub fn input_dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn hidden_weights(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn hidden_bias(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn output_weights(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Hidden-layer response `sigma(Ax + b)`.
    pub fn features(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        let mut t = &self.a * x + &self.b;
        for v in t.iter_mut() {
            *v = self.activation.apply(*v);
        }
        Ok(t)
    }

    /// `C sigma(Ax + b)`.
    pub fn eval(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(&self.c * self.features(x)?)
    }
}

/// Hidden layer with entries drawn i.i.d. uniform on `[-1, 1]`.
///
/// `A` is filled row by row, then `b`; the draw order is part of the
/// reproducibility contract for seeded runs.
pub fn random_hidden_layer(
    n_inputs: usize,
    n_hidden: usize,
    rng: &mut impl Rng,
) -> (DMatrix<f64>, DVector<f64>) {
    let mut a = DMatrix::zeros(n_hidden, n_inputs);
    for i in 0..n_hidden {
        for j in 0..n_inputs {
            a[(i, j)] = rng.random_range(-1.0..=1.0);
        }
    }
    let b = DVector::from_fn(n_hidden, |_, _| rng.random_range(-1.0..=1.0));
    (a, b)
}

/// Homogeneous network: a shallow net evaluated on the unit sphere and
/// rescaled by `||x||_d^nu`. Exactly `d`-homogeneous of degree `nu`.
#[derive(Debug, Clone)]
pub struct HomNet {
    net: ShallowNet,
    dilation: Dilation,
    degree: f64,
    /// Euclidean shell the wrapped net was trained on, when known. Purely
    /// informational: the sphere-in-domain condition is the caller's
    /// responsibility.
    training_region: Option<Shell>,
}

impl HomNet {
    pub fn new(net: ShallowNet, dilation: Dilation, degree: f64) -> Result<Self> {
        if net.input_dim() != dilation.dim() {
            return Err(Error::DimensionMismatch {
                expected: dilation.dim(),
                got: net.input_dim(),
            });
        }
        if !degree.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            net,
            dilation,
            degree,
            training_region: None,
        })
    }

    pub fn with_training_region(mut self, region: Shell) -> Self {
        self.training_region = Some(region);
        self
    }

    pub fn net(&self) -> &ShallowNet {
        &self.net
    }

    pub fn dilation(&self) -> &Dilation {
        &self.dilation
    }

    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn training_region(&self) -> Option<&Shell> {
        self.training_region.as_ref()
    }

    pub fn input_dim(&self) -> usize {
        self.net.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.net.output_dim()
    }

    /// Evaluates with the canonical homogeneous norm of the stored dilation.
    pub fn eval(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.eval_with_norm(&self.dilation, x)
    }

    /// Evaluates with an arbitrary homogeneous norm provider (canonical or
    /// explicit); the projector uses the provider's dilation.
    ///
    /// At the origin: returns 0 when `nu > 0`, errors otherwise (a
    /// homogeneous function of non-positive degree is not continuous at 0).
    pub fn eval_with_norm<N: HomogeneousNorm>(
        &self,
        norm: &N,
        x: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let rho = norm.value(x)?;
        if rho == 0.0 {
            if self.degree > 0.0 {
                return Ok(DVector::zeros(self.output_dim()));
            }
            return Err(Error::OriginWithNonPositiveDegree(self.degree));
        }
        let pi = norm.dilation().apply(-rho.ln(), x)?;
        Ok(self.net.eval(&pi)? * rho.powf(self.degree))
    }
}

/// Wraps a trained conventional net into a homogeneous one, reusing `A, b, C`
/// unchanged. On the unit sphere the two nets agree exactly; validity of the
/// extrapolation rests on the sphere lying inside the original training
/// region, which is recorded (when supplied) for inspection only.
pub fn homogenize(
    net: &ShallowNet,
    dilation: &Dilation,
    degree: f64,
    claimed_region: Option<Shell>,
) -> Result<HomNet> {
    let hom = HomNet::new(net.clone(), dilation.clone(), degree)?;
    Ok(match claimed_region {
        Some(r) => hom.with_training_region(r),
        None => hom,
    })
}

/// Input/output sample pairs for least-squares training.
#[derive(Debug, Clone, Default)]
pub struct LabeledDataset {
    inputs: Vec<DVector<f64>>,
    outputs: Vec<DVector<f64>>,
}

impl LabeledDataset {
    pub fn new(inputs: Vec<DVector<f64>>, outputs: Vec<DVector<f64>>) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                got: outputs.len(),
            });
        }
        if let Some(first) = inputs.first() {
            let n = first.len();
            let m = outputs[0].len();
            for x in &inputs {
                if x.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: x.len() });
                }
            }
            for y in &outputs {
                if y.len() != m {
                    return Err(Error::DimensionMismatch { expected: m, got: y.len() });
                }
            }
        }
        if inputs
            .iter()
            .chain(outputs.iter())
            .any(|v| v.iter().any(|e| !e.is_finite()))
        {
            return Err(Error::NonFinite);
        }
        Ok(Self { inputs, outputs })
    }

    /// Samples `f` at the given points.
    pub fn from_fn<F: Fn(&DVector<f64>) -> DVector<f64>>(
        points: Vec<DVector<f64>>,
        f: F,
    ) -> Result<Self> {
        let outputs = points.iter().map(&f).collect();
        Self::new(points, outputs)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.inputs.first().map_or(0, |x| x.len())
    }

    pub fn output_dim(&self) -> usize {
        self.outputs.first().map_or(0, |y| y.len())
    }

    pub fn inputs(&self) -> &[DVector<f64>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[DVector<f64>] {
        &self.outputs
    }
}

/// Diagnostics attached to a least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Numerical rank of the feature matrix (hidden width when regularized).
    pub rank: usize,
    /// Set when `ridge = 0` met a rank-deficient feature matrix; the returned
    /// output layer is then the minimum-norm solution.
    pub rank_deficient: bool,
    /// Root-mean-square training residual.
    pub residual_rms: f64,
    /// Largest per-sample residual norm on the training set.
    pub residual_max: f64,
}

#[derive(Debug, Clone)]
pub struct TrainedShallow {
    pub net: ShallowNet,
    pub report: TrainReport,
}

#[derive(Debug, Clone)]
pub struct TrainedHom {
    pub net: HomNet,
    pub report: TrainReport,
}

/// Solves `min_W ||Phi W - Y||_F^2 + ridge ||W||_F^2`.
///
/// `ridge > 0`: QR of the augmented system (always full rank).
/// `ridge = 0`: SVD with minimum-norm solution and a rank report.
fn ridge_least_squares(
    phi: &DMatrix<f64>,
    y: &DMatrix<f64>,
    ridge: f64,
) -> Result<(DMatrix<f64>, usize, bool)> {
    let n = phi.ncols();
    if ridge > 0.0 {
        let m = phi.nrows();
        let mut aug = DMatrix::zeros(m + n, n);
        aug.view_mut((0, 0), (m, n)).copy_from(phi);
        let sq = ridge.sqrt();
        for i in 0..n {
            aug[(m + i, i)] = sq;
        }
        let mut rhs = DMatrix::zeros(m + n, y.ncols());
        rhs.view_mut((0, 0), (m, y.ncols())).copy_from(y);
        let qr = aug.qr();
        qr.q_tr_mul(&mut rhs);
        let r = qr.unpack_r();
        let w = r
            .solve_upper_triangular(&rhs.view((0, 0), (n, y.ncols())).into_owned())
            .ok_or_else(|| Error::SolveFailed("triangular solve failed".into()))?;
        Ok((w, n, false))
    } else {
        let svd = phi.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let eps = f64::EPSILON * smax * phi.nrows().max(n) as f64;
        let rank = svd.rank(eps);
        let w = svd
            .solve(y, eps)
            .map_err(|e| Error::SolveFailed(e.to_string()))?;
        Ok((w, rank, rank < n))
    }
}

fn residual_stats(phi: &DMatrix<f64>, w: &DMatrix<f64>, y: &DMatrix<f64>) -> (f64, f64) {
    let resid = phi * w - y;
    let mut max = 0.0_f64;
    let mut sum = 0.0_f64;
    for i in 0..resid.nrows() {
        let row_norm_sq: f64 = resid.row(i).iter().map(|v| v * v).sum();
        sum += row_norm_sq;
        max = max.max(row_norm_sq.sqrt());
    }
    ((sum / resid.nrows() as f64).sqrt(), max)
}

fn fit_output_layer(
    phi: DMatrix<f64>,
    data: &LabeledDataset,
    ridge: f64,
) -> Result<(DMatrix<f64>, TrainReport)> {
    let m_out = data.output_dim();
    let mut y = DMatrix::zeros(data.len(), m_out);
    for (j, out) in data.outputs().iter().enumerate() {
        y.row_mut(j).copy_from(&out.transpose());
    }
    let (w, rank, rank_deficient) = ridge_least_squares(&phi, &y, ridge)?;
    let (residual_rms, residual_max) = residual_stats(&phi, &w, &y);
    let report = TrainReport {
        rank,
        rank_deficient,
        residual_rms,
        residual_max,
    };
    Ok((w.transpose(), report))
}

/// Fits the output layer `C` of a conventional net by (optionally ridge-)
/// regularized least squares over `sigma(A x_j + b)` features. The hidden
/// layer is left untouched. Deterministic given inputs.
pub fn train_output_layer(
    a: DMatrix<f64>,
    b: DVector<f64>,
    activation: Activation,
    data: &LabeledDataset,
    ridge: f64,
) -> Result<TrainedShallow> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let probe = ShallowNet::new(
        a.clone(),
        b.clone(),
        DMatrix::zeros(data.output_dim(), a.nrows()),
        activation,
    )?;
    let mut phi = DMatrix::zeros(data.len(), a.nrows());
    for (j, x) in data.inputs().iter().enumerate() {
        phi.row_mut(j).copy_from(&probe.features(x)?.transpose());
    }
    let (c, report) = fit_output_layer(phi, data, ridge)?;
    let net = ShallowNet::new(a, b, c, activation)?;
    Ok(TrainedShallow { net, report })
}

/// Fits the output layer of a homogeneous net. The residual
/// `y_j - ||x_j||_d^nu C sigma(A pi_d(x_j) + b)` is linear in `C`, so this is
/// ordinary least squares on the transformed features
/// `||x_j||_d^nu sigma(A pi_d(x_j) + b)`.
pub fn train_hom(
    a: DMatrix<f64>,
    b: DVector<f64>,
    activation: Activation,
    dilation: &Dilation,
    degree: f64,
    data: &LabeledDataset,
    ridge: f64,
) -> Result<TrainedHom> {
    train_hom_with_norm(a, b, activation, dilation, dilation, degree, data, ridge)
}

/// [`train_hom`] with an arbitrary homogeneous norm provider.
#[allow(clippy::too_many_arguments)]
pub fn train_hom_with_norm<N: HomogeneousNorm>(
    a: DMatrix<f64>,
    b: DVector<f64>,
    activation: Activation,
    norm: &N,
    dilation: &Dilation,
    degree: f64,
    data: &LabeledDataset,
    ridge: f64,
) -> Result<TrainedHom> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let probe = ShallowNet::new(
        a.clone(),
        b.clone(),
        DMatrix::zeros(data.output_dim(), a.nrows()),
        activation,
    )?;
    let mut phi = DMatrix::zeros(data.len(), a.nrows());
    for (j, x) in data.inputs().iter().enumerate() {
        let rho = norm.value(x)?;
        if rho == 0.0 {
            return Err(Error::ZeroVector);
        }
        let pi = norm.dilation().apply(-rho.ln(), x)?;
        let feats = probe.features(&pi)? * rho.powf(degree);
        phi.row_mut(j).copy_from(&feats.transpose());
    }
    let (c, report) = fit_output_layer(phi, data, ridge)?;
    let net = HomNet::new(ShallowNet::new(a, b, c, activation)?, dilation.clone(), degree)?;
    Ok(TrainedHom { net, report })
}

/// Either kind of trained model, as stored in model files.
#[derive(Debug, Clone)]
pub enum Model {
    Shallow(ShallowNet),
    Hom(HomNet),
}

impl Model {
    pub fn eval(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            Model::Shallow(net) => net.eval(x),
            Model::Hom(net) => net.eval(x),
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Model::Shallow(net) => net.input_dim(),
            Model::Hom(net) => net.input_dim(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            Model::Shallow(net) => net.output_dim(),
            Model::Hom(net) => net.output_dim(),
        }
    }
}

/// Euclidean annulus `{ r_inner <= |x| <= r_outer }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub r_inner: f64,
    pub r_outer: f64,
}

impl Shell {
    pub fn new(r_inner: f64, r_outer: f64) -> Result<Self> {
        if !(r_inner.is_finite() && r_outer.is_finite()) {
            return Err(Error::NonFinite);
        }
        if r_inner < 0.0 || r_inner > r_outer {
            return Err(Error::InvalidRegion(format!(
                "annulus requires 0 <= r_inner <= r_outer, got [{r_inner}, {r_outer}]"
            )));
        }
        Ok(Self { r_inner, r_outer })
    }

    pub fn contains(&self, radius: f64) -> bool {
        radius >= self.r_inner && radius <= self.r_outer
    }
}

/// One point uniformly distributed in the annulus: direction uniform on the
/// sphere, radius by the inverse CDF of the annulus volume element.
pub fn sample_shell(shell: &Shell, dim: usize, rng: &mut impl Rng) -> DVector<f64> {
    let mut dir = DVector::from_fn(dim, |_, _| {
        let v: f64 = StandardNormal.sample(rng);
        v
    });
    let mut norm = dir.norm();
    while norm < 1e-12 {
        dir = DVector::from_fn(dim, |_, _| {
            let v: f64 = StandardNormal.sample(rng);
            v
        });
        norm = dir.norm();
    }
    let u: f64 = rng.random_range(0.0..1.0);
    let n = dim as f64;
    let radius = (shell.r_inner.powf(n) + u * (shell.r_outer.powf(n) - shell.r_inner.powf(n)))
        .powf(1.0 / n);
    dir * (radius / norm)
}

/// Monte-Carlo estimate of the sup (L-infinity) error between `f_true` and a
/// model over an annulus: the maximum of `|f_true(x) - model(x)|` over
/// `samples` points drawn uniformly in the shell. Deterministic given `seed`;
/// the point set is drawn sequentially and the max-reduction is
/// order-independent, so internal parallelism cannot change the result.
pub fn sup_error<F>(
    f_true: F,
    model: &Model,
    shell: &Shell,
    dim: usize,
    samples: usize,
    seed: u64,
) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64> + Sync + Send,
{
    if samples == 0 {
        return Err(Error::EmptyData);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<DVector<f64>> = (0..samples)
        .map(|_| sample_shell(shell, dim, &mut rng))
        .collect();
    parallel::run(move || {
        points
            .par_iter()
            .map(|x| {
                let err = model.eval(x).map(|y| (f_true(x) - y).norm());
                err
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_net() -> ShallowNet {
        // N=2 hidden units, n=2 inputs, m=1 output.
        let a = DMatrix::from_row_slice(2, 2, &[0.5, -0.3, 0.2, 0.9]);
        let b = DVector::from_row_slice(&[0.1, -0.4]);
        let c = DMatrix::from_row_slice(1, 2, &[1.5, -0.7]);
        ShallowNet::new(a, b, c, Activation::Sigmoid).unwrap()
    }

    #[test]
    fn eval_zero_output_layer() {
        let a = DMatrix::from_row_slice(2, 2, &[0.5, -0.3, 0.2, 0.9]);
        let b = DVector::from_row_slice(&[0.1, -0.4]);
        let c = DMatrix::zeros(1, 2);
        let net = ShallowNet::new(a, b, c, Activation::Sigmoid).unwrap();
        let y = net.eval(&DVector::from_row_slice(&[3.0, -2.0])).unwrap();
        assert_eq!(y[0], 0.0);
    }

    #[test]
    fn eval_constant_sigmoid() {
        // sigma(0) = 1/2, so C = 2 gives the constant 1.
        let a = DMatrix::zeros(1, 3);
        let b = DVector::zeros(1);
        let c = DMatrix::from_row_slice(1, 1, &[2.0]);
        let net = ShallowNet::new(a, b, c, Activation::Sigmoid).unwrap();
        for x in [[0.0, 0.0, 0.0], [1.0, -5.0, 2.0], [100.0, 3.0, -9.0]] {
            let y = net.eval(&DVector::from_row_slice(&x)).unwrap();
            assert_relative_eq!(y[0], 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn eval_matches_hand_rolled_oracle() {
        // Independent re-implementation with plain loops.
        let net = small_net();
        let x = DVector::from_row_slice(&[0.7, -1.2]);
        let y = net.eval(&x).unwrap();

        let a = [[0.5, -0.3], [0.2, 0.9]];
        let b = [0.1, -0.4];
        let c = [1.5, -0.7];
        let mut acc = 0.0;
        for i in 0..2 {
            let t = a[i][0] * x[0] + a[i][1] * x[1] + b[i];
            acc += c[i] / (1.0 + (-t).exp());
        }
        assert_relative_eq!(y[0], acc, max_relative = 1e-14);
    }

    #[test]
    fn eval_rejects_dimension_mismatch() {
        let net = small_net();
        assert!(matches!(
            net.eval(&DVector::from_row_slice(&[1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn train_recovers_known_output_layer() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (a, b) = random_hidden_layer(2, 6, &mut rng);
        let c_star = DMatrix::from_row_slice(2, 6, &[0.3, -1.2, 0.8, 0.05, 2.0, -0.6, 1.0, 0.0, -0.4, 0.7, -1.5, 0.2]);
        let truth = ShallowNet::new(a.clone(), b.clone(), c_star.clone(), Activation::Tanh).unwrap();
        let points: Vec<DVector<f64>> = (0..40)
            .map(|_| DVector::from_fn(2, |_, _| rng.random_range(-2.0..2.0)))
            .collect();
        let data = LabeledDataset::from_fn(points, |x| truth.eval(x).unwrap()).unwrap();
        let trained = train_output_layer(a, b, Activation::Tanh, &data, 0.0).unwrap();
        assert!(!trained.report.rank_deficient);
        assert_relative_eq!(
            (trained.net.output_weights() - &c_star).norm(),
            0.0,
            epsilon = 1e-8
        );
    }

    #[test]
    fn train_rejects_empty_data() {
        let a = DMatrix::zeros(2, 2);
        let b = DVector::zeros(2);
        let data = LabeledDataset::default();
        assert!(matches!(
            train_output_layer(a, b, Activation::Sigmoid, &data, 0.0),
            Err(Error::EmptyData)
        ));
    }

    #[test]
    fn huge_ridge_shrinks_output_layer() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (a, b) = random_hidden_layer(2, 4, &mut rng);
        let points: Vec<DVector<f64>> = (0..20)
            .map(|_| DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0)))
            .collect();
        let data = LabeledDataset::from_fn(points, |x| DVector::from_row_slice(&[x[0] + 1.0])).unwrap();
        let trained = train_output_layer(a, b, Activation::Sigmoid, &data, 1e12).unwrap();
        assert!(trained.net.output_weights().norm() < 1e-9);
    }

    #[test]
    fn rank_deficiency_reported_with_min_norm_solution() {
        // Two identical hidden units produce identical feature columns.
        let a = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let b = DVector::from_row_slice(&[0.0, 0.0]);
        let points: Vec<DVector<f64>> = (0..10)
            .map(|i| DVector::from_row_slice(&[i as f64 / 10.0]))
            .collect();
        let data = LabeledDataset::from_fn(points, |x| DVector::from_row_slice(&[x[0]])).unwrap();
        let trained = train_output_layer(a, b, Activation::Sigmoid, &data, 0.0).unwrap();
        assert!(trained.report.rank_deficient);
        assert_eq!(trained.report.rank, 1);
        let c = trained.net.output_weights();
        // Minimum-norm solution splits the weight evenly across duplicates.
        assert_relative_eq!(c[(0, 0)], c[(0, 1)], max_relative = 1e-10);
    }

    #[test]
    fn determinism_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b) = random_hidden_layer(3, 5, &mut rng);
        let points: Vec<DVector<f64>> = (0..25)
            .map(|_| DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0)))
            .collect();
        let data =
            LabeledDataset::from_fn(points, |x| DVector::from_row_slice(&[x.norm(), x[0]])).unwrap();
        let t1 = train_output_layer(a.clone(), b.clone(), Activation::Sigmoid, &data, 1e-10).unwrap();
        let t2 = train_output_layer(a, b, Activation::Sigmoid, &data, 1e-10).unwrap();
        assert_eq!(t1.net.output_weights(), t2.net.output_weights());
    }

    #[test]
    fn hom_net_agrees_with_shallow_on_sphere() {
        let net = small_net();
        let dil = Dilation::diagonal(&[1.0, 2.0]).unwrap();
        let hom = homogenize(&net, &dil, 2.0, None).unwrap();
        let x = DVector::from_row_slice(&[0.6, 0.8]);
        // |x| = 1, hence ||x||_d = 1 and pi(x) = x.
        let via_hom = hom.eval(&x).unwrap();
        let via_net = net.eval(&x).unwrap();
        assert_relative_eq!((via_hom - via_net).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn hom_net_structural_homogeneity() {
        let net = small_net();
        let dil = Dilation::diagonal(&[1.0, 2.0]).unwrap();
        let hom = homogenize(&net, &dil, 2.0, None).unwrap();
        let x = DVector::from_row_slice(&[0.3, -0.9]);
        let s = 0.75;
        let lhs = hom.eval(&dil.apply(s, &x).unwrap()).unwrap();
        let rhs = hom.eval(&x).unwrap() * (2.0 * s).exp();
        assert_relative_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn hom_net_doubling_identity() {
        // nu = 2, standard dilation: eval(2x) = 4 eval(x).
        let net = small_net();
        let dil = Dilation::standard(2);
        let hom = homogenize(&net, &dil, 2.0, None).unwrap();
        let x = DVector::from_row_slice(&[0.4, 1.1]);
        let lhs = hom.eval(&(&x * 2.0)).unwrap();
        let rhs = hom.eval(&x).unwrap() * 4.0;
        assert_relative_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn hom_net_origin_behavior() {
        let net = small_net();
        let dil = Dilation::standard(2);
        let zero = DVector::zeros(2);
        let pos = homogenize(&net, &dil, 2.0, None).unwrap();
        assert_eq!(pos.eval(&zero).unwrap()[0], 0.0);
        let nonpos = homogenize(&net, &dil, 0.0, None).unwrap();
        assert!(matches!(
            nonpos.eval(&zero),
            Err(Error::OriginWithNonPositiveDegree(_))
        ));
    }

    #[test]
    fn homogenize_is_idempotent_on_parameters() {
        let net = small_net();
        let dil = Dilation::diagonal(&[1.0, 2.0]).unwrap();
        let h1 = homogenize(&net, &dil, 2.0, None).unwrap();
        let h2 = homogenize(h1.net(), &dil, 2.0, None).unwrap();
        assert_eq!(h1.net(), h2.net());
        assert_eq!(h1.degree(), h2.degree());
    }

    #[test]
    fn train_hom_recovers_representable_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let (a, b) = random_hidden_layer(2, 8, &mut rng);
        let dil = Dilation::diagonal(&[1.0, 2.0]).unwrap();
        let c_star = DMatrix::from_fn(1, 8, |_, _| rng.random_range(-1.0..1.0));
        let truth = HomNet::new(
            ShallowNet::new(a.clone(), b.clone(), c_star.clone(), Activation::Sigmoid).unwrap(),
            dil.clone(),
            2.0,
        )
        .unwrap();
        let points: Vec<DVector<f64>> = (0..60)
            .map(|_| {
                DVector::from_fn(2, |_, _| rng.random_range(0.2..2.0))
            })
            .collect();
        let data = LabeledDataset::from_fn(points, |x| truth.eval(x).unwrap()).unwrap();
        let trained =
            train_hom(a, b, Activation::Sigmoid, &dil, 2.0, &data, 0.0).unwrap();
        assert_relative_eq!(
            (trained.net.net().output_weights() - &c_star).norm(),
            0.0,
            epsilon = 1e-8
        );
    }

    #[test]
    fn train_hom_rejects_origin_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (a, b) = random_hidden_layer(2, 4, &mut rng);
        let dil = Dilation::standard(2);
        let data = LabeledDataset::new(
            vec![DVector::zeros(2)],
            vec![DVector::from_row_slice(&[0.0])],
        )
        .unwrap();
        assert!(matches!(
            train_hom(a, b, Activation::Sigmoid, &dil, 2.0, &data, 0.0),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn train_hom_zero_targets_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let (a, b) = random_hidden_layer(2, 4, &mut rng);
        let dil = Dilation::standard(2);
        let points: Vec<DVector<f64>> = (0..12)
            .map(|_| DVector::from_fn(2, |_, _| rng.random_range(0.5..1.5)))
            .collect();
        let data = LabeledDataset::from_fn(points, |_| DVector::zeros(1)).unwrap();
        let trained = train_hom(a, b, Activation::Sigmoid, &dil, 1.0, &data, 1e-8).unwrap();
        assert!(trained.net.net().output_weights().norm() < 1e-12);
    }

    #[test]
    fn sup_error_trivial_cases() {
        let net = small_net();
        let model = Model::Shallow(net.clone());
        let shell = Shell::new(0.5, 1.5).unwrap();
        // model against itself
        let zero = sup_error(|x: &DVector<f64>| net.eval(x).unwrap(), &model, &shell, 2, 200, 42)
            .unwrap();
        assert_eq!(zero, 0.0);
        // zero model against the constant 1
        let zero_net = ShallowNet::new(
            DMatrix::zeros(1, 2),
            DVector::zeros(1),
            DMatrix::zeros(1, 1),
            Activation::Sigmoid,
        )
        .unwrap();
        let one = sup_error(
            |_: &DVector<f64>| DVector::from_row_slice(&[1.0]),
            &Model::Shallow(zero_net),
            &shell,
            2,
            200,
            42,
        )
        .unwrap();
        assert_relative_eq!(one, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn sup_error_deterministic() {
        let net = small_net();
        let model = Model::Shallow(net);
        let shell = Shell::new(0.0, 2.0).unwrap();
        let f = |x: &DVector<f64>| DVector::from_row_slice(&[x.norm()]);
        let e1 = sup_error(f, &model, &shell, 2, 500, 9).unwrap();
        let e2 = sup_error(f, &model, &shell, 2, 500, 9).unwrap();
        assert_eq!(e1.to_bits(), e2.to_bits());
    }

    #[test]
    fn shell_rejects_inverted_bounds() {
        assert!(Shell::new(2.0, 1.0).is_err());
        assert!(Shell::new(-0.5, 1.0).is_err());
    }

    #[test]
    fn shell_sampling_stays_inside() {
        let shell = Shell::new(0.75, 1.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let x = sample_shell(&shell, 6, &mut rng);
            let r = x.norm();
            assert!(shell.contains(r + 1e-12) || shell.contains(r - 1e-12));
        }
    }
}
