//! One-hidden-layer perceptron regressor trained by per-row SGD with momentum.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_targets, FeatureMatrix};
use crate::scalar::{mean, population_sd, Real};

pub const FORMAT_VERSION: u32 = 1;

fn default_hidden() -> usize {
    18
}
fn default_rate() -> f64 {
    0.1
}
fn default_seed() -> u64 {
    42
}
fn default_init_scale() -> f64 {
    0.5
}
fn default_clip() -> bool {
    true
}

/// Network settings. `epochs` has no default and must be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpParams {
    #[serde(default = "default_hidden")]
    pub hidden_units: usize,
    #[serde(default = "default_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_rate")]
    pub momentum: f64,
    pub epochs: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_init_scale")]
    pub init_scale: f64,
    /// Clamp predictions to [0, 1]; training then requires targets in that range.
    #[serde(default = "default_clip")]
    pub clip: bool,
}

impl MlpParams {
    pub fn new(epochs: usize) -> Self {
        MlpParams {
            hidden_units: default_hidden(),
            learning_rate: default_rate(),
            momentum: default_rate(),
            epochs,
            seed: default_seed(),
            init_scale: default_init_scale(),
            clip: default_clip(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_units == 0 {
            return Err(Error::domain("hidden_units must be at least 1"));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::domain(format!("learning_rate must be non-negative, got {}", self.learning_rate)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::domain(format!("momentum must lie in [0, 1), got {}", self.momentum)));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(Error::domain(format!("init_scale must be non-negative, got {}", self.init_scale)));
        }
        Ok(())
    }
}

#[inline]
fn sigmoid<T: Real>(v: T) -> T {
    T::one() / (T::one() + (-v).exp())
}

/// Flat weight vector laid out as `[w1 (hidden x inputs, row-major), b1, w2, b2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network<T> {
    pub inputs: usize,
    pub hidden: usize,
    pub weights: Vec<T>,
}

impl<T: Real> Network<T> {
    pub fn zeros(inputs: usize, hidden: usize) -> Self {
        Network { inputs, hidden, weights: vec![T::zero(); hidden * inputs + 2 * hidden + 1] }
    }

    pub fn init(inputs: usize, hidden: usize, scale: f64, rng: &mut impl Rng) -> Self {
        let mut net = Self::zeros(inputs, hidden);
        let s1 = scale / (inputs.max(1) as f64).sqrt();
        let s2 = scale / (hidden as f64).sqrt();
        let (b1_end, w2_end) = (hidden * inputs + hidden, hidden * inputs + 2 * hidden);
        for (i, w) in net.weights.iter_mut().enumerate() {
            let s = if i < b1_end { s1 } else { s2 };
            *w = T::lit(if s > 0.0 { rng.random_range(-s..=s) } else { 0.0 });
        }
        debug_assert_eq!(w2_end + 1, net.weights.len());
        net
    }

    fn split(&self) -> (&[T], &[T], &[T], T) {
        let (w1, rest) = self.weights.split_at(self.hidden * self.inputs);
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, b2) = rest.split_at(self.hidden);
        (w1, b1, w2, b2[0])
    }

    fn hidden_activations(&self, z: &[T], out: &mut [T]) {
        let (w1, b1, _, _) = self.split();
        for j in 0..self.hidden {
            let w = &w1[j * self.inputs..(j + 1) * self.inputs];
            let mut a = b1[j];
            for (wk, zk) in w.iter().zip(z) {
                a += *wk * *zk;
            }
            out[j] = sigmoid(a);
        }
    }

    /// Raw linear output for one standardized row.
    pub fn forward(&self, z: &[T]) -> T {
        let mut h = vec![T::zero(); self.hidden];
        self.forward_with(z, &mut h)
    }

    fn forward_with(&self, z: &[T], h: &mut [T]) -> T {
        self.hidden_activations(z, h);
        let (_, _, w2, b2) = self.split();
        let mut o = b2;
        for (w, a) in w2.iter().zip(h.iter()) {
            o += *w * *a;
        }
        o
    }

    /// Adds the gradient of `0.5 * (out - y)^2` for one row into `grad`; returns the loss.
    fn accumulate(&self, z: &[T], y: T, h: &mut [T], grad: &mut [T]) -> T {
        let o = self.forward_with(z, h);
        let e = o - y;
        let (_, _, w2, _) = self.split();
        let (d, k) = (self.inputs, self.hidden);
        for j in 0..k {
            let dh = e * w2[j] * h[j] * (T::one() - h[j]);
            let row = &mut grad[j * d..(j + 1) * d];
            for (g, zk) in row.iter_mut().zip(z) {
                *g += dh * *zk;
            }
            grad[k * d + j] += dh;
            grad[k * d + k + j] += e * h[j];
        }
        grad[k * d + 2 * k] += e;
        T::lit(0.5) * e * e
    }

    /// Summed half squared error over row-major standardized rows.
    pub fn loss(&self, z: &[T], y: &[T]) -> T {
        let mut h = vec![T::zero(); self.hidden];
        z.chunks(self.inputs.max(1))
            .zip(y)
            .map(|(row, &t)| {
                let e = self.forward_with(row, &mut h) - t;
                T::lit(0.5) * e * e
            })
            .sum()
    }

    /// Analytic gradient of [`Network::loss`].
    pub fn gradient(&self, z: &[T], y: &[T]) -> Vec<T> {
        let mut h = vec![T::zero(); self.hidden];
        let mut g = vec![T::zero(); self.weights.len()];
        for (row, &t) in z.chunks(self.inputs.max(1)).zip(y) {
            self.accumulate(row, t, &mut h, &mut g);
        }
        g
    }

    /// Central finite differences of [`Network::loss`].
    pub fn numeric_gradient(&self, z: &[T], y: &[T], step: T) -> Vec<T> {
        let mut net = self.clone();
        (0..self.weights.len())
            .map(|i| {
                let w = net.weights[i];
                net.weights[i] = w + step;
                let up = net.loss(z, y);
                net.weights[i] = w - step;
                let down = net.loss(z, y);
                net.weights[i] = w;
                (up - down) / (step + step)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer<T> {
    pub means: Vec<T>,
    pub sds: Vec<T>,
}

impl<T: Real> Standardizer<T> {
    pub fn fit(x: &FeatureMatrix<T>) -> Self {
        let means: Vec<T> = x.columns().iter().map(|c| mean(c)).collect();
        let sds = x
            .columns()
            .iter()
            .map(|c| {
                let s = population_sd(c);
                if s > T::zero() { s } else { T::one() }
            })
            .collect();
        Standardizer { means, sds }
    }

    /// Row-major standardized copy of `x`.
    pub fn transform(&self, x: &FeatureMatrix<T>) -> Vec<T> {
        let (n, d) = (x.n_rows(), x.n_features());
        let mut z = vec![T::zero(); n * d];
        for (k, col) in x.columns().iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                z[i * d + k] = (v - self.means[k]) / self.sds[k];
            }
        }
        z
    }

    fn row(&self, row: &[T]) -> Vec<T> {
        row.iter().enumerate().map(|(k, &v)| (v - self.means[k]) / self.sds[k]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel<T> {
    pub format_version: u32,
    pub features: Vec<String>,
    pub params: MlpParams,
    pub standardizer: Standardizer<T>,
    pub network: Network<T>,
    /// Mean half squared error before training, then after each epoch.
    pub loss_trace: Vec<T>,
}

impl<T: Real> MlpModel<T> {
    pub fn raw_row(&self, row: &[T]) -> T {
        self.network.forward(&self.standardizer.row(row))
    }

    pub fn predict_row(&self, row: &[T]) -> T {
        let o = self.raw_row(row);
        if self.params.clip { o.max(T::zero()).min(T::one()) } else { o }
    }

    pub fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        let x = x.align_to(&self.features)?;
        Ok((0..x.n_rows()).into_par_iter().map(|i| self.predict_row(&x.row(i))).collect())
    }
}

pub fn predict_mlp<T: Real>(model: &MlpModel<T>, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
    model.predict(x)
}

fn prepare<T: Real>(x: &FeatureMatrix<T>, y: &[T], params: &MlpParams) -> Result<()> {
    params.validate()?;
    check_targets(x, y)?;
    if x.n_rows() == 0 {
        return Err(Error::EmptyInput("no training rows".into()));
    }
    if params.clip {
        if let Some(i) = y.iter().position(|&v| v < T::zero() || v > T::one()) {
            return Err(Error::domain(format!(
                "target {} at row {} is outside [0, 1]; disable clip to train on unbounded targets",
                y[i], i
            )));
        }
    }
    Ok(())
}

pub fn fit_mlp<T: Real>(x: &FeatureMatrix<T>, y: &[T], params: &MlpParams) -> Result<MlpModel<T>> {
    prepare(x, y, params)?;
    let (n, d) = (x.n_rows(), x.n_features());
    let standardizer = Standardizer::fit(x);
    let z = standardizer.transform(x);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut net = Network::init(d, params.hidden_units, params.init_scale, &mut rng);
    let lr = T::lit(params.learning_rate);
    let mom = T::lit(params.momentum);
    let nt = T::from_count(n);
    let mut velocity = vec![T::zero(); net.weights.len()];
    let mut grad = vec![T::zero(); net.weights.len()];
    let mut h = vec![T::zero(); params.hidden_units];
    let mut order: Vec<usize> = (0..n).collect();
    let mut trace = Vec::with_capacity(params.epochs + 1);
    trace.push(net.loss(&z, y) / nt);

    for epoch in 1..=params.epochs {
        order.shuffle(&mut rng);
        for &r in &order {
            grad.iter_mut().for_each(|g| *g = T::zero());
            net.accumulate(&z[r * d..(r + 1) * d], y[r], &mut h, &mut grad);
            for ((w, v), g) in net.weights.iter_mut().zip(&mut velocity).zip(&grad) {
                *v = mom * *v - lr * *g;
                *w += *v;
            }
        }
        let loss = net.loss(&z, y) / nt;
        if !loss.is_finite() {
            return Err(Error::Training { epoch, message: format!("training loss became {loss}") });
        }
        trace.push(loss);
    }

    Ok(MlpModel {
        format_version: FORMAT_VERSION,
        features: x.names().to_vec(),
        params: params.clone(),
        standardizer,
        network: net,
        loss_trace: trace,
    })
}

pub const GRADIENT_STEP: f64 = 1e-5;

/// Relative error between two gradient components, with magnitudes below
/// `floor` compared absolutely.
pub fn relative_error<T: Real>(a: T, b: T, floor: T) -> T {
    (a - b).abs() / (a.abs() + b.abs()).max(floor)
}

pub const RELATIVE_FLOOR: f64 = 1e-4;

/// Largest relative disagreement between backpropagated and finite-difference
/// gradients for a freshly initialised network.
pub fn gradient_check<T: Real>(params: &MlpParams, x: &FeatureMatrix<T>, y: &[T]) -> Result<T> {
    params.validate()?;
    check_targets(x, y)?;
    let standardizer = Standardizer::fit(x);
    let z = standardizer.transform(x);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let net = Network::init(x.n_features(), params.hidden_units, params.init_scale, &mut rng);
    Ok(network_gradient_error(&net, &z, y))
}

pub fn network_gradient_error<T: Real>(net: &Network<T>, z: &[T], y: &[T]) -> T {
    let a = net.gradient(z, y);
    let b = net.numeric_gradient(z, y, T::lit(GRADIENT_STEP));
    let floor = T::lit(RELATIVE_FLOOR);
    a.iter().zip(&b).map(|(&p, &q)| relative_error(p, q, floor)).fold(T::zero(), T::max)
}
