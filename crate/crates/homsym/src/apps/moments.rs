//! Gray-scale images, homogeneous moment features and the scale-invariant
//! glyph classifier.
//!
//! An image zoom `z -> e^s z` multiplies the moment
//! `x_i = sum b_i(z) phi(z)` with `b_i(z) = z1^p z2^q / r!` by `e^{(2+r_i)s}`,
//! so the feature vector lives under the diagonal dilation with rates
//! `2 + r_i`. A degree-0 homogeneous net over these features is invariant to
//! zoom by construction and argmax classification inherits that invariance.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dilation::Dilation;
use crate::error::{Error, Result};
use crate::networks::{random_hidden_layer, train_hom, Activation, HomNet, LabeledDataset, RIDGE_DEFAULT};

use super::rigid_body::stream_seed;
use rand::SeedableRng;

/// 8-bit gray image with `f64` storage; 0 is white, 255 is black. The origin
/// of the moment coordinate frame sits at the image center.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 255.0) {
            return Err(Error::Data("pixel values must lie in [0, 255]".into()));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, value: f64) {
        self.data[row * self.width + col] = value.clamp(0.0, 255.0);
    }

    /// Bilinear sample at fractional coordinates, zero outside the support.
    fn sample(&self, col: f64, row: f64) -> f64 {
        if col < -1.0 || row < -1.0 || col > self.width as f64 || row > self.height as f64 {
            return 0.0;
        }
        let c0 = col.floor();
        let r0 = row.floor();
        let fc = col - c0;
        let fr = row - r0;
        let mut acc = 0.0;
        for (dc, wc) in [(0.0, 1.0 - fc), (1.0, fc)] {
            for (dr, wr) in [(0.0, 1.0 - fr), (1.0, fr)] {
                let c = c0 + dc;
                let r = r0 + dr;
                let v = if c >= 0.0 && r >= 0.0 && (c as usize) < self.width && (r as usize) < self.height
                {
                    self.get(c as usize, r as usize)
                } else {
                    0.0
                };
                acc += wc * wr * v;
            }
        }
        acc
    }
}

/// Monomial moment basis: exponent pairs `(p_i, q_i)` with degree
/// `r_i = p_i + q_i` and normalization `1 / r_i!`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentBasis {
    exponents: Vec<(u32, u32)>,
}

impl MomentBasis {
    pub fn new(exponents: Vec<(u32, u32)>) -> Self {
        Self { exponents }
    }

    /// The 8-feature basis used by the recognition harness:
    /// `1, z1, z2, z1 z2/2, z1^2/2, z2^2/2, z1^2 z2/6, z1 z2^2/6`.
    pub fn standard8() -> Self {
        Self::new(vec![
            (0, 0),
            (1, 0),
            (0, 1),
            (1, 1),
            (2, 0),
            (0, 2),
            (2, 1),
            (1, 2),
        ])
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.exponents
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.exponents.iter().map(|(p, q)| p + q).collect()
    }

    /// Image zoom acts on the features as the diagonal dilation with rates
    /// `2 + r_i`.
    pub fn feature_dilation(&self) -> Result<Dilation> {
        let rates: Vec<f64> = self.degrees().iter().map(|r| (2 + r) as f64).collect();
        Dilation::diagonal(&rates)
    }
}

fn factorial(r: u32) -> f64 {
    (1..=r).map(|k| k as f64).product()
}

/// Discrete moment features `x_i = sum_z b_i(z) phi(z)` with pixel
/// coordinates centered at the image midpoint.
pub fn moment_features(img: &GrayImage, basis: &MomentBasis) -> DVector<f64> {
    let cx = (img.width() as f64 - 1.0) / 2.0;
    let cy = (img.height() as f64 - 1.0) / 2.0;
    let mut out = DVector::zeros(basis.len());
    for row in 0..img.height() {
        let z2 = row as f64 - cy;
        for col in 0..img.width() {
            let phi = img.get(col, row);
            if phi == 0.0 {
                continue;
            }
            let z1 = col as f64 - cx;
            for (i, &(p, q)) in basis.exponents().iter().enumerate() {
                out[i] += z1.powi(p as i32) * z2.powi(q as i32) * phi / factorial(p + q);
            }
        }
    }
    out
}

/// Bilinear resampling about the image center; output dimensions are rounded
/// to the nearest integer. Zoom factors outside `[0.2, 3]` are rejected.
pub fn scale_image(img: &GrayImage, factor: f64) -> Result<GrayImage> {
    if !(0.2..=3.0).contains(&factor) {
        return Err(Error::InvalidRegion(format!(
            "zoom factor must lie in [0.2, 3], got {factor}"
        )));
    }
    let out_w = ((img.width() as f64 * factor).round() as usize).max(1);
    let out_h = ((img.height() as f64 * factor).round() as usize).max(1);
    let cx_in = (img.width() as f64 - 1.0) / 2.0;
    let cy_in = (img.height() as f64 - 1.0) / 2.0;
    let cx_out = (out_w as f64 - 1.0) / 2.0;
    let cy_out = (out_h as f64 - 1.0) / 2.0;
    let mut out = GrayImage::zeros(out_w, out_h);
    for row in 0..out_h {
        for col in 0..out_w {
            let src_c = (col as f64 - cx_out) / factor + cx_in;
            let src_r = (row as f64 - cy_out) / factor + cy_in;
            out.set(col, row, img.sample(src_c, src_r));
        }
    }
    Ok(out)
}

/// Adds clamped Gaussian noise of standard deviation `sigma` to roughly
/// `fraction` of the pixels.
pub fn add_noise(img: &GrayImage, sigma: f64, fraction: f64, rng: &mut impl Rng) -> GrayImage {
    let mut out = img.clone();
    for row in 0..img.height() {
        for col in 0..img.width() {
            if rng.random_range(0.0..1.0) < fraction {
                let n: f64 = StandardNormal.sample(rng);
                out.set(col, row, img.get(col, row) + sigma * n);
            }
        }
    }
    out
}

const GLYPH_PATTERNS: [[&str; 7]; 8] = [
    // C
    [
        "0111110", "1000001", "1000000", "1000000", "1000000", "1000001", "0111110",
    ],
    // E
    [
        "1111111", "1000000", "1000000", "1111100", "1000000", "1000000", "1111111",
    ],
    // F
    [
        "1111111", "1000000", "1000000", "1111100", "1000000", "1000000", "1000000",
    ],
    // J
    [
        "0011111", "0000100", "0000100", "0000100", "0000100", "1000100", "0111000",
    ],
    // L
    [
        "1000000", "1000000", "1000000", "1000000", "1000000", "1000000", "1111111",
    ],
    // P
    [
        "1111110", "1000001", "1000001", "1111110", "1000000", "1000000", "1000000",
    ],
    // T
    [
        "1111111", "0001000", "0001000", "0001000", "0001000", "0001000", "0001000",
    ],
    // Z
    [
        "1111111", "0000010", "0000100", "0001000", "0010000", "0100000", "1111111",
    ],
];

pub const GLYPH_NAMES: [&str; 8] = ["C", "E", "F", "J", "L", "P", "T", "Z"];

/// The deterministic synthetic glyph set: eight thick-stroke letter shapes
/// rendered at 100x100 pixels (7x7 cells of 12x12 pixels, centered).
pub fn default_glyphs() -> Vec<GrayImage> {
    const SIZE: usize = 100;
    const CELL: usize = 12;
    const OFFSET: usize = (SIZE - 7 * CELL) / 2;
    GLYPH_PATTERNS
        .iter()
        .map(|pattern| {
            let mut img = GrayImage::zeros(SIZE, SIZE);
            for (cell_row, line) in pattern.iter().enumerate() {
                for (cell_col, ch) in line.bytes().enumerate() {
                    if ch == b'1' {
                        for dr in 0..CELL {
                            for dc in 0..CELL {
                                img.set(
                                    OFFSET + cell_col * CELL + dc,
                                    OFFSET + cell_row * CELL + dr,
                                    255.0,
                                );
                            }
                        }
                    }
                }
            }
            img
        })
        .collect()
}

/// Configuration of the recognition harness.
#[derive(Debug, Clone)]
pub struct RecognitionConfig {
    pub seed: u64,
    /// Hidden width of the classifier net.
    pub hidden: usize,
    pub ridge: f64,
    /// Noise standard deviation in gray levels.
    pub noise_sigma: f64,
    /// Fraction of pixels corrupted by noise.
    pub noise_fraction: f64,
    /// Noisy trials per glyph.
    pub noise_trials: usize,
}

impl Default for RecognitionConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            hidden: 8,
            ridge: RIDGE_DEFAULT,
            noise_sigma: 40.0,
            noise_fraction: 0.5,
            noise_trials: 25,
        }
    }
}

/// Zoom-invariant glyph classifier: a degree-0 homogeneous net over the
/// 8-dimensional moment features.
#[derive(Debug, Clone)]
pub struct GlyphClassifier {
    net: HomNet,
    basis: MomentBasis,
}

impl GlyphClassifier {
    pub fn net(&self) -> &HomNet {
        &self.net
    }

    pub fn basis(&self) -> &MomentBasis {
        &self.basis
    }

    /// Class scores for a feature vector.
    pub fn scores(&self, features: &DVector<f64>) -> Result<DVector<f64>> {
        self.net.eval(features)
    }

    /// Predicted class index for a feature vector.
    pub fn classify_features(&self, features: &DVector<f64>) -> Result<usize> {
        let scores = self.scores(features)?;
        Ok(scores.imax())
    }

    /// Predicted class index for an image.
    pub fn classify(&self, img: &GrayImage) -> Result<usize> {
        self.classify_features(&moment_features(img, &self.basis))
    }
}

/// Trains the classifier on the given glyphs at the four training scales
/// `100%, 75%, 50%, 35%` (one-hot targets, least squares).
pub fn train_glyph_classifier(
    glyphs: &[GrayImage],
    config: &RecognitionConfig,
) -> Result<GlyphClassifier> {
    if glyphs.len() != 8 {
        return Err(Error::Data(format!(
            "expected exactly 8 glyphs, got {}",
            glyphs.len()
        )));
    }
    let basis = MomentBasis::standard8();
    let dilation = basis.feature_dilation()?;
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for (class, glyph) in glyphs.iter().enumerate() {
        for factor in [1.0, 0.75, 0.5, 0.35] {
            let scaled = scale_image(glyph, factor)?;
            inputs.push(moment_features(&scaled, &basis));
            let mut target = DVector::zeros(8);
            target[class] = 1.0;
            outputs.push(target);
        }
    }
    let data = LabeledDataset::new(inputs, outputs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, 0));
    let (a, b) = random_hidden_layer(8, config.hidden, &mut rng);
    let trained = train_hom(a, b, Activation::Sigmoid, &dilation, 0.0, &data, config.ridge)?;
    Ok(GlyphClassifier {
        net: trained.net,
        basis,
    })
}

/// Accuracy report of the recognition harness.
#[derive(Debug, Clone)]
pub struct RecognitionReport {
    pub train_accuracy: f64,
    /// Accuracy over the 8 glyphs at each zoom level `30% + i*10%`.
    pub scale_accuracies: Vec<(f64, f64)>,
    pub overall_scale_accuracy: f64,
    pub noise_accuracy: f64,
}

impl RecognitionReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,param,accuracy\n");
        out.push_str(&format!("train,1.0,{:.6}\n", self.train_accuracy));
        for (scale, acc) in &self.scale_accuracies {
            out.push_str(&format!("scale,{scale:.2},{acc:.6}\n"));
        }
        out.push_str(&format!("noise,0.5,{:.6}\n", self.noise_accuracy));
        out
    }
}

/// Trains on the four scales, then measures accuracy across the zoom grid
/// `30%..200%` and under clamped Gaussian pixel noise.
pub fn recognition_harness(
    glyphs: &[GrayImage],
    config: &RecognitionConfig,
) -> Result<RecognitionReport> {
    let classifier = train_glyph_classifier(glyphs, config)?;

    let mut train_hits = 0usize;
    let mut train_total = 0usize;
    for (class, glyph) in glyphs.iter().enumerate() {
        for factor in [1.0, 0.75, 0.5, 0.35] {
            let scaled = scale_image(glyph, factor)?;
            if classifier.classify(&scaled)? == class {
                train_hits += 1;
            }
            train_total += 1;
        }
    }

    let mut scale_accuracies = Vec::new();
    let mut zoom_hits = 0usize;
    let mut zoom_total = 0usize;
    for i in 0..=17 {
        let factor = 0.3 + 0.1 * i as f64;
        let mut hits = 0usize;
        for (class, glyph) in glyphs.iter().enumerate() {
            if classifier.classify(&scale_image(glyph, factor)?)? == class {
                hits += 1;
            }
        }
        zoom_hits += hits;
        zoom_total += glyphs.len();
        scale_accuracies.push((factor, hits as f64 / glyphs.len() as f64));
    }

    let mut noise_rng = ChaCha8Rng::seed_from_u64(stream_seed(config.seed, 1));
    let mut noise_hits = 0usize;
    let mut noise_total = 0usize;
    for (class, glyph) in glyphs.iter().enumerate() {
        for _ in 0..config.noise_trials {
            let noisy = add_noise(glyph, config.noise_sigma, config.noise_fraction, &mut noise_rng);
            if classifier.classify(&noisy)? == class {
                noise_hits += 1;
            }
            noise_total += 1;
        }
    }

    Ok(RecognitionReport {
        train_accuracy: train_hits as f64 / train_total as f64,
        scale_accuracies,
        overall_scale_accuracy: zoom_hits as f64 / zoom_total as f64,
        noise_accuracy: noise_hits as f64 / noise_total.max(1) as f64,
    })
}
