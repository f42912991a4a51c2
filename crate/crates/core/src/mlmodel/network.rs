use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{FeatureVector, FEATURE_COUNT};
use super::train::TrainConfig;
use crate::error::{Error, Result};

pub const SCHEMA: &str = "fnn/1";

/// Layer widths used by default: six inputs, four softplus hidden layers,
/// one linear output.
pub const DEFAULT_LAYERS: [usize; 6] = [FEATURE_COUNT, 64, 32, 16, 8, 1];

/// `ln(1 + e^z)` without overflow for large `z`.
pub fn softplus(z: f64) -> f64 {
    if z > 30.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Derivative of [`softplus`].
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Dense layer with a row-major `outputs × inputs` weight matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    fn outputs(&self) -> usize {
        self.biases.len()
    }

    fn affine(&self, input: &[f64], out: &mut Vec<f64>) {
        let n_in = input.len();
        out.clear();
        out.extend(self.biases.iter().enumerate().map(|(o, b)| {
            let row = &self.weights[o * n_in..(o + 1) * n_in];
            b + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>()
        }));
    }
}

/// Per-feature affine scaling to zero mean and unit variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaling {
    pub fn identity(n: usize) -> Self {
        Self {
            mean: vec![0.0; n],
            std: vec![1.0; n],
        }
    }

    /// Sample statistics of `rows`; a constant column gets unit scale so the
    /// standard deviation stays positive.
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let n = rows.len() as f64;
        let width = rows.first().map_or(0, Vec::len);
        let mut mean = vec![0.0; width];
        for r in rows {
            for (m, x) in mean.iter_mut().zip(r) {
                *m += x / n;
            }
        }
        let mut std = vec![0.0; width];
        for r in rows {
            for ((s, x), m) in std.iter_mut().zip(r).zip(&mean) {
                *s += (x - m).powi(2) / n;
            }
        }
        for s in &mut std {
            *s = s.sqrt();
            if !(*s > 1e-12 * 1.0f64.max(*s)) || !s.is_finite() {
                *s = 1.0;
            }
        }
        Self { mean, std }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }
}

/// Space in which the target is standardised. With `Log` the network
/// learns standardised `ln P` and predictions are exponentiated back to
/// watts, so its squared error behaves like a relative error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetTransform {
    #[default]
    Linear,
    Log,
}

impl TargetTransform {
    pub fn apply(self, y: f64) -> Result<f64> {
        match self {
            Self::Linear => Ok(y),
            Self::Log if y > 0.0 => Ok(y.ln()),
            Self::Log => Err(Error::Domain(format!(
                "log target needs positive values, got {y}"
            ))),
        }
    }

    pub fn invert(self, z: f64) -> f64 {
        match self {
            Self::Linear => z,
            Self::Log => z.exp(),
        }
    }
}

/// Feedforward network with softplus hidden layers and a linear output,
/// working on standardised inputs and target.
#[derive(Debug, Clone, PartialEq)]
pub struct FnnModel {
    pub layer_sizes: Vec<usize>,
    pub layers: Vec<Layer>,
    pub feature_scaling: Scaling,
    pub target_mean: f64,
    pub target_std: f64,
    pub target_transform: TargetTransform,
    pub seed: u64,
    pub train_config: Option<TrainConfig>,
}

/// Gradient of the loss with the same shapes as the model's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub layers: Vec<Layer>,
}

impl Gradient {
    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
            .collect()
    }
}

/// Activations kept from a forward pass for backpropagation.
struct Trace {
    /// `inputs[l]` is the input of layer `l`.
    inputs: Vec<Vec<f64>>,
    /// Pre-activations of each layer.
    pre: Vec<Vec<f64>>,
}

impl FnnModel {
    /// Randomly initialised network; weights uniform in `±√(6/(fan_in + fan_out))`,
    /// zero biases, identity scaling.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        check_sizes(layer_sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = layer_sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let mut l = Layer::zeros(fan_in, fan_out);
                for x in &mut l.weights {
                    *x = rng.random_range(-limit..limit);
                }
                l
            })
            .collect();
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            layers,
            feature_scaling: Scaling::identity(layer_sizes[0]),
            target_mean: 0.0,
            target_std: 1.0,
            target_transform: TargetTransform::Linear,
            seed,
            train_config: None,
        })
    }

    /// All weights and biases zero.
    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        check_sizes(layer_sizes)?;
        Ok(Self {
            layer_sizes: layer_sizes.to_vec(),
            layers: layer_sizes
                .windows(2)
                .map(|w| Layer::zeros(w[0], w[1]))
                .collect(),
            feature_scaling: Scaling::identity(layer_sizes[0]),
            target_mean: 0.0,
            target_std: 1.0,
            target_transform: TargetTransform::Linear,
            seed: 0,
            train_config: None,
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        check_sizes(&self.layer_sizes).map_err(|e| Error::ModelCorrupt(e.to_string()))?;
        if self.layers.len() != self.layer_sizes.len() - 1 {
            return Err(Error::ModelCorrupt(format!(
                "{} layers for {} layer sizes",
                self.layers.len(),
                self.layer_sizes.len()
            )));
        }
        for (i, (l, w)) in self
            .layers
            .iter()
            .zip(self.layer_sizes.windows(2))
            .enumerate()
        {
            if l.weights.len() != w[0] * w[1] || l.biases.len() != w[1] {
                return Err(Error::ModelCorrupt(format!(
                    "layer {i}: expected {}x{} weights and {} biases, found {} and {}",
                    w[1],
                    w[0],
                    w[1],
                    l.weights.len(),
                    l.biases.len()
                )));
            }
            if l.weights.iter().chain(&l.biases).any(|x| !x.is_finite()) {
                return Err(Error::ModelCorrupt(format!(
                    "layer {i} has non-finite parameters"
                )));
            }
        }
        let s = &self.feature_scaling;
        if s.mean.len() != self.layer_sizes[0] || s.std.len() != self.layer_sizes[0] {
            return Err(Error::ModelCorrupt(
                "feature scaling width does not match the input layer".into(),
            ));
        }
        if s.std
            .iter()
            .chain([&self.target_std])
            .any(|x| !(*x > 0.0 && x.is_finite()))
        {
            return Err(Error::ModelCorrupt(
                "scaling standard deviations must be > 0".into(),
            ));
        }
        Ok(())
    }

    fn trace(&self, x_scaled: &[f64]) -> Trace {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut current = x_scaled.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = Vec::with_capacity(layer.outputs());
            layer.affine(&current, &mut z);
            let next = if i == last {
                z.clone()
            } else {
                z.iter().map(|&v| softplus(v)).collect()
            };
            inputs.push(std::mem::replace(&mut current, next));
            pre.push(z);
        }
        Trace { inputs, pre }
    }

    /// Network output for an already-standardised input.
    pub fn forward_scaled(&self, x_scaled: &[f64]) -> f64 {
        let mut current = x_scaled.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.affine(&current, &mut next);
            if i != last {
                next.iter_mut().for_each(|v| *v = softplus(*v));
            }
            std::mem::swap(&mut current, &mut next);
        }
        current[0]
    }

    /// Predicted brake power in watts.
    pub fn predict_raw(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.layer_sizes[0] {
            return Err(Error::ModelCorrupt(format!(
                "model expects {} inputs, got {}",
                self.layer_sizes[0],
                x.len()
            )));
        }
        let y = self.forward_scaled(&self.feature_scaling.apply(x));
        Ok(self
            .target_transform
            .invert(self.target_mean + self.target_std * y))
    }

    /// Maps a target in watts to the network's standardised output space.
    pub fn scale_target(&self, y: f64) -> Result<f64> {
        Ok((self.target_transform.apply(y)? - self.target_mean) / self.target_std)
    }

    pub fn forward(&self, x: &FeatureVector) -> Result<f64> {
        self.predict_raw(&x.to_array())
    }

    /// Mean squared error over a standardised batch and its gradient.
    pub fn loss_and_gradient(&self, xs: &[Vec<f64>], ys: &[f64]) -> (f64, Gradient) {
        let mut grad = Gradient {
            layers: self
                .layer_sizes
                .windows(2)
                .map(|w| Layer::zeros(w[0], w[1]))
                .collect(),
        };
        let n = xs.len() as f64;
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let t = self.trace(x);
            let out = t.pre.last().unwrap()[0];
            let err = out - y;
            loss += err * err / n;
            let mut delta = vec![2.0 * err / n];
            for l in (0..self.layers.len()).rev() {
                let input = &t.inputs[l];
                let g = &mut grad.layers[l];
                let n_in = input.len();
                for (o, d) in delta.iter().enumerate() {
                    g.biases[o] += d;
                    for (gw, a) in g.weights[o * n_in..(o + 1) * n_in].iter_mut().zip(input) {
                        *gw += d * a;
                    }
                }
                if l == 0 {
                    break;
                }
                let w = &self.layers[l].weights;
                delta = (0..n_in)
                    .map(|j| {
                        let back: f64 = delta
                            .iter()
                            .enumerate()
                            .map(|(o, d)| d * w[o * n_in + j])
                            .sum();
                        back * sigmoid(t.pre[l - 1][j])
                    })
                    .collect();
            }
        }
        (loss, grad)
    }

    /// Mean squared error over a standardised batch.
    pub fn loss(&self, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        xs.iter()
            .zip(ys)
            .map(|(x, y)| (self.forward_scaled(x) - y).powi(2) / n)
            .sum()
    }

    pub(crate) fn parameters_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.biases.iter_mut()))
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            schema: SCHEMA.to_string(),
            layer_sizes: self.layer_sizes.clone(),
            layers: self.layers.clone(),
            feature_scaling: self.feature_scaling.clone(),
            target_mean: self.target_mean,
            target_std: self.target_std,
            target_transform: self.target_transform,
            seed: self.seed,
            train_config: self.train_config.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        match value.get("schema").and_then(|s| s.as_str()) {
            Some(SCHEMA) => {}
            Some(other) => {
                return Err(Error::Schema(format!(
                    "expected schema `{SCHEMA}`, found `{other}`"
                )))
            }
            None => return Err(Error::Schema("model file has no schema field".into())),
        }
        let file: ModelFile = serde_json::from_value(value)?;
        let model = Self {
            layer_sizes: file.layer_sizes,
            layers: file.layers,
            feature_scaling: file.feature_scaling,
            target_mean: file.target_mean,
            target_std: file.target_std,
            target_transform: file.target_transform,
            seed: file.seed,
            train_config: file.train_config,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::InvalidParameter(
            "a network needs at least an input and an output layer".into(),
        ));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidParameter(format!(
            "layer sizes must be positive: {sizes:?}"
        )));
    }
    if *sizes.last().unwrap() != 1 {
        return Err(Error::InvalidParameter(format!(
            "the output layer must have one unit: {sizes:?}"
        )));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema: String,
    layer_sizes: Vec<usize>,
    layers: Vec<Layer>,
    feature_scaling: Scaling,
    target_mean: f64,
    target_std: f64,
    #[serde(default)]
    target_transform: TargetTransform,
    seed: u64,
    #[serde(default)]
    train_config: Option<TrainConfig>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn softplus_examples() {
        assert_relative_eq!(softplus(0.0), std::f64::consts::LN_2, epsilon = 1e-15);
        let s = softplus(-50.0);
        assert!(s > 0.0);
        assert_relative_eq!(s, (-50.0f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(softplus(50.0), 50.0, epsilon = 1e-9);
        assert!(softplus(1000.0).is_finite());
        assert_eq!(softplus(1000.0), 1000.0);
    }

    proptest! {
        #[test]
        fn softplus_bounds(z in -200.0f64..200.0, dz in 1e-3f64..1.0) {
            let s = softplus(z);
            prop_assert!(s >= 0.0);
            prop_assert!(s - z.max(0.0) <= std::f64::consts::LN_2 + 1e-15);
            prop_assert!(s - z.max(0.0) >= 0.0);
            if z < 30.0 {
                prop_assert!(s > 0.0);
            }
            if z + dz < 35.0 {
                prop_assert!(softplus(z + dz) > s);
            }
        }
    }

    #[test]
    fn constant_network_returns_target_mean() {
        let mut m = FnnModel::zeros(&DEFAULT_LAYERS).unwrap();
        m.target_mean = 5.5e6;
        m.target_std = 2e6;
        for x in [[0.0; 6], [6.0, 10.0, -3.0, 100.0, 5.0, -20.0]] {
            assert_eq!(m.predict_raw(&x).unwrap(), 5.5e6);
        }
    }

    #[test]
    fn single_hidden_unit_by_hand() {
        let mut m = FnnModel::zeros(&[6, 1, 1]).unwrap();
        m.layers[0].weights = vec![0.5, -0.25, 0.0, 0.0, 1.0, 0.0];
        m.layers[0].biases = vec![0.1];
        m.layers[1].weights = vec![2.0];
        m.layers[1].biases = vec![-0.3];
        m.feature_scaling = Scaling {
            mean: vec![1.0, 2.0, 0.0, 0.0, 0.0, 0.0],
            std: vec![2.0, 4.0, 1.0, 1.0, 1.0, 1.0],
        };
        m.target_mean = 100.0;
        m.target_std = 10.0;
        let x = [3.0, 6.0, 9.0, 9.0, 0.5, 9.0];
        // scaled inputs: (3-1)/2 = 1, (6-2)/4 = 1, x5 = 0.5
        // z = 0.5·1 − 0.25·1 + 1.0·0.5 + 0.1 = 0.85
        let z: f64 = 0.85;
        let hidden = (1.0 + z.exp()).ln();
        let expected = 100.0 + 10.0 * (2.0 * hidden - 0.3);
        assert_relative_eq!(m.predict_raw(&x).unwrap(), expected, epsilon = 1e-12);
        assert_eq!(m.predict_raw(&x).unwrap(), m.predict_raw(&x).unwrap());
    }

    #[test]
    fn shape_checks() {
        let mut m = FnnModel::new(&DEFAULT_LAYERS, 1).unwrap();
        assert!(m.validate().is_ok());
        assert_eq!(
            m.parameter_count(),
            6 * 64 + 64 + 64 * 32 + 32 + 32 * 16 + 16 + 16 * 8 + 8 + 8 + 1
        );
        m.layers[2].biases.pop();
        assert!(matches!(m.validate(), Err(Error::ModelCorrupt(_))));
        assert!(FnnModel::new(&[6, 4, 2], 1).is_err());
        assert!(matches!(
            FnnModel::new(&[6, 1], 1).unwrap().predict_raw(&[1.0; 5]),
            Err(Error::ModelCorrupt(_))
        ));
    }

    #[test]
    fn initialisation_within_limits() {
        let m = FnnModel::new(&DEFAULT_LAYERS, 42).unwrap();
        for (l, w) in m.layers.iter().zip(DEFAULT_LAYERS.windows(2)) {
            let limit = (6.0 / (w[0] + w[1]) as f64).sqrt();
            assert!(l.weights.iter().all(|x| x.abs() <= limit));
            assert!(l.biases.iter().all(|&b| b == 0.0));
        }
        assert_eq!(m, FnnModel::new(&DEFAULT_LAYERS, 42).unwrap());
        assert_ne!(m, FnnModel::new(&DEFAULT_LAYERS, 43).unwrap());
    }

    #[test]
    fn log_transform_exponentiates_the_mean() {
        let mut m = FnnModel::zeros(&[6, 4, 1]).unwrap();
        m.target_transform = TargetTransform::Log;
        m.target_mean = 15.0;
        m.target_std = 0.4;
        assert_eq!(m.predict_raw(&[1.0; 6]).unwrap(), 15.0f64.exp());
        assert_relative_eq!(m.scale_target(15.4f64.exp()).unwrap(), 1.0, epsilon = 1e-12);
        let back = FnnModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back.target_transform, TargetTransform::Log);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut m = FnnModel::new(&DEFAULT_LAYERS, 9).unwrap();
        m.feature_scaling = Scaling {
            mean: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            std: vec![1.0 / 3.0, 2.0, 3.0, 4.0, 5.0, 7.0],
        };
        m.target_mean = 4.123_456_789e6;
        m.target_std = 1.0 / 7.0;
        let back = FnnModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        let x = [6.0, 9.0, 10.0, -3.0, 40.0, 2.0];
        assert_eq!(
            back.predict_raw(&x).unwrap().to_bits(),
            m.predict_raw(&x).unwrap().to_bits()
        );
    }

    #[test]
    fn load_errors() {
        let m = FnnModel::new(&[6, 3, 1], 9).unwrap();
        let text = m.to_json().unwrap();
        assert!(FnnModel::from_json(&text[..text.len() / 2]).is_err());
        let old = text.replace("fnn/1", "fnn/0");
        assert!(matches!(FnnModel::from_json(&old), Err(Error::Schema(_))));
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["layer_sizes"] = serde_json::json!([6, 4, 1]);
        assert!(matches!(
            FnnModel::from_json(&v.to_string()),
            Err(Error::ModelCorrupt(_))
        ));
    }
}
