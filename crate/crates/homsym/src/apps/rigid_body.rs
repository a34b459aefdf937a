//! Rotational rigid-body dynamics and the approximation-precision harness.
//!
//! The angular-acceleration map `h(omega, tau) = J^{-1}(-omega x J omega + tau)`
//! satisfies `h(e^s omega, e^{2s} tau) = e^{2s} h(omega, tau)`: it is
//! homogeneous of degree 2 under the dilation generated by
//! `diag(1,1,1,2,2,2)`. The harness trains a conventional net on a thin
//! Euclidean shell, wraps it into homogeneous nets three ways (known
//! parameters, estimated degree, identified generator) and compares sup
//! errors across nested shells.

use nalgebra::{DVector, Matrix3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dilation::{Dilation, EIG_TOL};
use crate::error::{Error, Result};
use crate::networks::{
    homogenize, random_hidden_layer, sample_shell, sup_error, train_output_layer, Activation,
    LabeledDataset, Model, Shell, RIDGE_DEFAULT,
};
use crate::symmetry::{
    estimate_degree, identify_generator, GeneratorClass, GeneratorConfig, KDeltaSampler,
    DEGREE_DELTA_DEFAULT, LN_BAND_DEFAULT,
};

/// Rigid body with a symmetric positive-definite inertia matrix.
#[derive(Debug, Clone)]
pub struct RigidBody {
    inertia: Matrix3<f64>,
    inertia_inv: Matrix3<f64>,
}

impl RigidBody {
    pub fn new(inertia: Matrix3<f64>) -> Result<Self> {
        let asym = (inertia - inertia.transpose()).amax();
        if asym > EIG_TOL * (1.0 + inertia.amax()) {
            return Err(Error::NotSymmetric(asym));
        }
        let eig = inertia.symmetric_eigenvalues();
        let min_eig = eig.min();
        if min_eig <= 0.0 {
            return Err(Error::NotPositiveDefinite(min_eig));
        }
        let inertia_inv = inertia
            .try_inverse()
            .ok_or_else(|| Error::SolveFailed("inertia matrix is singular".into()))?;
        Ok(Self {
            inertia,
            inertia_inv,
        })
    }

    /// The inertia matrix used by the bundled identification harness.
    pub fn example() -> Self {
        Self::new(Matrix3::new(
            1.0, 0.3, 0.1, //
            0.3, 1.2, 0.2, //
            0.1, 0.2, 0.8,
        ))
        .expect("example inertia is SPD")
    }

    pub fn inertia(&self) -> &Matrix3<f64> {
        &self.inertia
    }

    /// Angular acceleration `J^{-1}(-omega x J omega + tau)`.
    pub fn rhs(&self, omega: &Vector3<f64>, tau: &Vector3<f64>) -> Vector3<f64> {
        self.inertia_inv * (-omega.cross(&(self.inertia * omega)) + tau)
    }

    /// [`RigidBody::rhs`] on the stacked state `x = (omega, tau)` in R^6.
    pub fn rhs_state(&self, x: &DVector<f64>) -> DVector<f64> {
        let omega = Vector3::new(x[0], x[1], x[2]);
        let tau = Vector3::new(x[3], x[4], x[5]);
        let out = self.rhs(&omega, &tau);
        DVector::from_row_slice(&[out[0], out[1], out[2]])
    }
}

/// The dilation the rigid-body map is homogeneous under:
/// `G = diag(1,1,1,2,2,2)` with the Euclidean norm.
pub fn rigid_body_dilation() -> Dilation {
    Dilation::diagonal(&[1.0, 1.0, 1.0, 2.0, 2.0, 2.0]).expect("diagonal rates are anti-Hurwitz")
}

/// Configuration of the shell-precision harness.
#[derive(Debug, Clone)]
pub struct Table1Config {
    pub seed: u64,
    /// Hidden width of the conventional net.
    pub hidden: usize,
    /// Training samples drawn in the training shell.
    pub train_samples: usize,
    /// Monte-Carlo points per shell for sup-error estimation.
    pub eval_samples: usize,
    /// Samples for the practical-degree estimate.
    pub degree_samples: usize,
    /// Anchor points for the generator identification.
    pub generator_samples: usize,
    pub ridge: f64,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            seed: 0,
            hidden: 500,
            train_samples: 20_000,
            eval_samples: 20_000,
            degree_samples: 2_000,
            generator_samples: 4_000,
            ridge: RIDGE_DEFAULT,
        }
    }
}

/// Per-shell sup errors of the four models.
#[derive(Debug, Clone)]
pub struct Table1Row {
    pub label: String,
    pub shell: Shell,
    pub ann: f64,
    pub hann_known: f64,
    pub hann_degree: f64,
    pub hann_generator: f64,
}

/// Harness output: the precision table plus the identified parameters.
#[derive(Debug, Clone)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
    /// Training precision of the conventional net on the training shell.
    pub epsilon: f64,
    pub nu_hat: f64,
    pub generator_diagonal: Vec<f64>,
    pub generator_anti_hurwitz: bool,
}

impl Table1Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("domain,ann,hann_nu2,hann_nu_eps,hann_g_eps\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{:.6e},{:.6e},{:.6e},{:.6e}\n",
                row.label, row.ann, row.hann_known, row.hann_degree, row.hann_generator
            ));
        }
        out
    }
}

/// The evaluation shells, innermost to outermost. The training shell
/// `[0.95, 1.05]` sits in the middle of the list.
pub fn default_shells() -> Vec<(String, Shell)> {
    let mut shells = vec![
        ("Omega_-4".to_string(), Shell::new(0.0, 0.25).unwrap()),
        ("Omega_-3".to_string(), Shell::new(0.25, 0.5).unwrap()),
        ("Omega_-2".to_string(), Shell::new(0.5, 0.75).unwrap()),
        ("Omega_-1".to_string(), Shell::new(0.75, 1.0).unwrap()),
        ("Omega_0".to_string(), Shell::new(0.95, 1.05).unwrap()),
    ];
    for k in 1..=4 {
        let r = 1.0 + 0.25 * (k - 1) as f64;
        shells.push((format!("Omega_{k}"), Shell::new(r, r + 0.25).unwrap()));
    }
    shells
}

/// Training region of the conventional net.
pub fn training_shell() -> Shell {
    Shell::new(0.95, 1.05).unwrap()
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Runs the full comparison: train, homogenize three ways, measure.
pub fn table1_harness(config: &Table1Config) -> Result<Table1Report> {
    let body = RigidBody::example();
    let dil = rigid_body_dilation();
    let train_region = training_shell();

    // conventional net on the training shell
    let (a, b) = random_hidden_layer(6, config.hidden, &mut stream_rng(config.seed, 0));
    let mut data_rng = stream_rng(config.seed, 1);
    let points: Vec<DVector<f64>> = (0..config.train_samples)
        .map(|_| sample_shell(&train_region, 6, &mut data_rng))
        .collect();
    let data = LabeledDataset::from_fn(points, |x| body.rhs_state(x))?;
    let trained = train_output_layer(a, b, Activation::Sigmoid, &data, config.ridge)?;
    let ann = Model::Shallow(trained.net.clone());

    // known parameters
    let hann_known = Model::Hom(homogenize(&trained.net, &dil, 2.0, Some(train_region))?);

    // estimated degree (first output component as the scalarization)
    let net_for_degree = trained.net.clone();
    let sampler = KDeltaSampler::new(
        &dil,
        move |x: &DVector<f64>| net_for_degree.eval(x).expect("dimension checked")[0],
        DEGREE_DELTA_DEFAULT,
        LN_BAND_DEFAULT,
        stream_seed(config.seed, 2),
    )?;
    let degree = estimate_degree(&sampler, config.degree_samples)?;
    let nu_hat = degree.nu_hat.ok_or_else(|| {
        Error::Data("positivity condition failed while estimating the degree".into())
    })?;
    let hann_degree = Model::Hom(homogenize(&trained.net, &dil, nu_hat, Some(train_region))?);

    // identified generator, nu fixed to 1, diagonal class
    let net_for_gen = trained.net.clone();
    let gen_config = GeneratorConfig {
        region: Shell::new(0.98, 1.02)?,
        nu: 1.0,
        class: GeneratorClass::Diagonal,
        xi: 0.0,
        samples: config.generator_samples,
        offsets: 1,
        delta: 0.01,
        seed: stream_seed(config.seed, 3),
    };
    let gen_est = identify_generator(
        move |x: &DVector<f64>| net_for_gen.eval(x).expect("dimension checked"),
        6,
        &gen_config,
    )?;
    let g_hat = gen_est.g_matrix();
    if !gen_est.anti_hurwitz {
        return Err(Error::NotAntiHurwitz(
            crate::dilation::spectral_abscissa_lower(&g_hat),
        ));
    }
    let rates: Vec<f64> = (0..6).map(|i| g_hat[(i, i)]).collect();
    let dil_identified = Dilation::diagonal(&rates)?;
    let hann_generator = Model::Hom(homogenize(
        &trained.net,
        &dil_identified,
        1.0,
        Some(train_region),
    )?);

    // sup errors per shell; all models see the same point set per shell
    let mut rows = Vec::new();
    let mut epsilon = f64::NAN;
    for (idx, (label, shell)) in default_shells().into_iter().enumerate() {
        let eval_seed = stream_seed(config.seed, 100 + idx as u64);
        let truth = |x: &DVector<f64>| body.rhs_state(x);
        let row = Table1Row {
            ann: sup_error(truth, &ann, &shell, 6, config.eval_samples, eval_seed)?,
            hann_known: sup_error(truth, &hann_known, &shell, 6, config.eval_samples, eval_seed)?,
            hann_degree: sup_error(truth, &hann_degree, &shell, 6, config.eval_samples, eval_seed)?,
            hann_generator: sup_error(
                truth,
                &hann_generator,
                &shell,
                6,
                config.eval_samples,
                eval_seed,
            )?,
            label,
            shell,
        };
        if row.label == "Omega_0" {
            epsilon = row.ann;
        }
        rows.push(row);
    }

    Ok(Table1Report {
        rows,
        epsilon,
        nu_hat,
        generator_diagonal: rates,
        generator_anti_hurwitz: gen_est.anti_hurwitz,
    })
}

/// Derives a per-subsystem seed from the run seed and a stream index.
pub(crate) fn stream_seed(seed: u64, stream: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}
