use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{engineer_features, FeatureVector};
use super::network::{FnnModel, Scaling, TargetTransform, DEFAULT_LAYERS};
use crate::domain::VoyageRecord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub layer_sizes: Vec<usize>,
    pub target_transform: TargetTransform,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 32,
            learning_rate: 0.015,
            epochs: 5,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
            layer_sizes: DEFAULT_LAYERS.to_vec(),
            target_transform: TargetTransform::Log,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidParameter("batch_size must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.beta1)
            || !(0.0..1.0).contains(&self.beta2)
            || !(self.epsilon > 0.0)
        {
            return Err(Error::InvalidParameter(
                "ADAM betas must lie in [0, 1) and epsilon be > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: FnnModel,
    /// Mean mini-batch loss of each epoch, in standardised units.
    pub epoch_losses: Vec<f64>,
}

/// Trains on voyage records with brake power as the target.
pub fn train(records: &[VoyageRecord], cfg: &TrainConfig) -> Result<TrainOutcome> {
    let xs: Vec<FeatureVector> = records.iter().map(engineer_features).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.brake_power).collect();
    train_features(&xs, &ys, cfg)
}

pub fn train_features(xs: &[FeatureVector], ys: &[f64], cfg: &TrainConfig) -> Result<TrainOutcome> {
    let rows: Vec<Vec<f64>> = xs.iter().map(|x| x.to_array().to_vec()).collect();
    train_rows(&rows, ys, cfg)
}

/// Mini-batch ADAM on standardised inputs and target. Scaling statistics
/// come from the rows passed in, so callers doing cross-validation must
/// pass only the training fold.
pub fn train_rows(rows: &[Vec<f64>], ys: &[f64], cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if rows.len() != ys.len() {
        return Err(Error::LengthMismatch(format!(
            "{} feature rows vs {} targets",
            rows.len(),
            ys.len()
        )));
    }
    if rows.len() < cfg.batch_size {
        return Err(Error::InsufficientData {
            needed: cfg.batch_size,
            got: rows.len(),
        });
    }
    let mut model = FnnModel::new(&cfg.layer_sizes, cfg.seed)?;
    if rows.iter().any(|r| r.len() != cfg.layer_sizes[0]) {
        return Err(Error::InvalidParameter(format!(
            "feature rows must have {} columns",
            cfg.layer_sizes[0]
        )));
    }
    model.feature_scaling = Scaling::fit(rows);
    model.target_transform = cfg.target_transform;
    let transformed = ys
        .iter()
        .map(|&y| cfg.target_transform.apply(y).map(|t| vec![t]))
        .collect::<Result<Vec<_>>>()?;
    let target = Scaling::fit(&transformed);
    model.target_mean = target.mean[0];
    model.target_std = target.std[0];
    model.train_config = Some(cfg.clone());

    let xs: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| model.feature_scaling.apply(r))
        .collect();
    let ys: Vec<f64> = transformed
        .iter()
        .map(|t| (t[0] - model.target_mean) / model.target_std)
        .collect();

    // a separate stream from initialisation so batch order does not depend
    // on the network size
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x005e_ed5b_u64.rotate_left(32));
    let n_params = model.parameter_count();
    let (mut m, mut v) = (vec![0.0; n_params], vec![0.0; n_params]);
    let mut step = 0i32;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let (mut bx, mut by) = (
        Vec::with_capacity(cfg.batch_size),
        Vec::with_capacity(cfg.batch_size),
    );

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(cfg.batch_size) {
            bx.clear();
            by.clear();
            bx.extend(chunk.iter().map(|&i| xs[i].clone()));
            by.extend(chunk.iter().map(|&i| ys[i]));
            let (loss, grad) = model.loss_and_gradient(&bx, &by);
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch });
            }
            total += loss;
            batches += 1;
            step += 1;
            let c1 = 1.0 - cfg.beta1.powi(step);
            let c2 = 1.0 - cfg.beta2.powi(step);
            for (((p, g), m), v) in model
                .parameters_mut()
                .zip(grad.flatten())
                .zip(&mut m)
                .zip(&mut v)
            {
                *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
                *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
                *p -= cfg.learning_rate * (*m / c1) / ((*v / c2).sqrt() + cfg.epsilon);
            }
        }
        let mean = total / batches as f64;
        if !mean.is_finite()
            || model
                .layers
                .iter()
                .any(|l| l.weights.iter().any(|w| !w.is_finite()))
        {
            return Err(Error::TrainingDiverged { epoch });
        }
        epoch_losses.push(mean);
    }
    Ok(TrainOutcome {
        model,
        epoch_losses,
    })
}

/// Largest relative difference between the analytic gradient and central
/// finite differences (step `1e-5` on each parameter), over the loss of
/// `batch` in the model's standardised space.
pub fn gradient_check(model: &FnnModel, batch: &[(FeatureVector, f64)]) -> Result<f64> {
    let rows: Vec<Vec<f64>> = batch.iter().map(|(x, _)| x.to_array().to_vec()).collect();
    let ys: Vec<f64> = batch.iter().map(|(_, y)| *y).collect();
    gradient_check_rows(model, &rows, &ys)
}

pub fn gradient_check_rows(model: &FnnModel, rows: &[Vec<f64>], ys: &[f64]) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter(
            "gradient check needs a non-empty batch".into(),
        ));
    }
    model.validate()?;
    let xs: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| model.feature_scaling.apply(r))
        .collect();
    let ys = ys
        .iter()
        .map(|&y| model.scale_target(y))
        .collect::<Result<Vec<f64>>>()?;
    let analytic = model.loss_and_gradient(&xs, &ys).1.flatten();
    let h = 1e-5;
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (i, a) in analytic.iter().enumerate() {
        let original = *probe.parameters_mut().nth(i).unwrap();
        *probe.parameters_mut().nth(i).unwrap() = original + h;
        let up = probe.loss(&xs, &ys);
        *probe.parameters_mut().nth(i).unwrap() = original - h;
        let down = probe.loss(&xs, &ys);
        *probe.parameters_mut().nth(i).unwrap() = original;
        let numeric = (up - down) / (2.0 * h);
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn random_batch(rng: &mut ChaCha8Rng, n: usize) -> Vec<(FeatureVector, f64)> {
        (0..n)
            .map(|_| {
                let mut a = [0.0; 6];
                for x in &mut a {
                    *x = rng.random_range(-2.0..2.0);
                }
                (FeatureVector::from_array(a), rng.random_range(-1.0..1.0))
            })
            .collect()
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..5 {
            let sizes = [6, rng.random_range(2..8), rng.random_range(2..6), 1];
            let mut m = FnnModel::new(&sizes, seed).unwrap();
            for b in m.parameters_mut() {
                *b += rng.random_range(-0.3..0.3);
            }
            let batch = random_batch(&mut rng, 8);
            let err = gradient_check(&m, &batch).unwrap();
            assert!(err < 1e-4, "seed {seed}: {err}");
        }
    }

    #[test]
    fn zero_model_and_single_record() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = FnnModel::zeros(&[6, 4, 3, 1]).unwrap();
        assert!(gradient_check(&m, &random_batch(&mut rng, 6)).unwrap() < 1e-4);
        let m = FnnModel::new(&[6, 5, 1], 3).unwrap();
        assert!(gradient_check(&m, &random_batch(&mut rng, 1)).unwrap() < 1e-4);
        assert!(gradient_check(&m, &[]).is_err());
    }

    #[test]
    fn learns_linear_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let xs: Vec<FeatureVector> = (0..2000)
            .map(|_| {
                FeatureVector::from_array([rng.random_range(4.0..8.0), 10.0, 0.0, 0.0, 0.0, 0.0])
            })
            .collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.stw).collect();
        let out = train_features(&xs, &ys, &TrainConfig::default()).unwrap();
        let rows: Vec<Vec<f64>> = xs
            .iter()
            .map(|x| out.model.feature_scaling.apply(&x.to_array()))
            .collect();
        let scaled: Vec<f64> = ys
            .iter()
            .map(|&y| out.model.scale_target(y).unwrap())
            .collect();
        let mse = out.model.loss(&rows, &scaled);
        assert!(mse < 1e-3, "final mse {mse}");
        assert_eq!(out.epoch_losses.len(), 5);
        let linear = TrainConfig {
            target_transform: TargetTransform::Linear,
            ..Default::default()
        };
        let out = train_features(&xs, &ys, &linear).unwrap();
        let scaled: Vec<f64> = ys
            .iter()
            .map(|&y| out.model.scale_target(y).unwrap())
            .collect();
        assert!(out.model.loss(&rows_of(&out.model, &xs), &scaled) < 1e-3);
    }

    fn rows_of(m: &FnnModel, xs: &[FeatureVector]) -> Vec<Vec<f64>> {
        xs.iter()
            .map(|x| m.feature_scaling.apply(&x.to_array()))
            .collect()
    }

    #[test]
    fn log_target_rejects_non_positive_power() {
        let xs = vec![FeatureVector::from_array([1.0; 6]); 40];
        let mut ys = vec![1.0; 40];
        ys[7] = 0.0;
        assert!(matches!(
            train_features(&xs, &ys, &TrainConfig::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn deterministic_for_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let batch = random_batch(&mut rng, 300);
        let (xs, ys): (Vec<_>, Vec<_>) = batch.into_iter().unzip();
        let cfg = TrainConfig {
            epochs: 2,
            layer_sizes: vec![6, 8, 4, 1],
            target_transform: TargetTransform::Linear,
            ..Default::default()
        };
        let a = train_features(&xs, &ys, &cfg).unwrap();
        let b = train_features(&xs, &ys, &cfg).unwrap();
        assert_eq!(a.model.to_json().unwrap(), b.model.to_json().unwrap());
        let c = train_features(&xs, &ys, &TrainConfig { seed: 1, ..cfg }).unwrap();
        assert_ne!(a.model, c.model);
    }

    #[test]
    fn too_few_records_and_bad_config() {
        let xs = vec![FeatureVector::from_array([1.0; 6]); 10];
        let ys = vec![1.0; 10];
        assert!(matches!(
            train_features(&xs, &ys, &TrainConfig::default()),
            Err(Error::InsufficientData {
                needed: 32,
                got: 10
            })
        ));
        let cfg = TrainConfig {
            learning_rate: 0.0,
            ..Default::default()
        };
        assert!(train_features(&xs, &ys, &cfg).is_err());
    }

    #[test]
    fn divergence_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let batch = random_batch(&mut rng, 64);
        let (xs, mut ys): (Vec<_>, Vec<_>) = batch.into_iter().unzip();
        ys[3] = f64::INFINITY;
        // infinite target makes the scaled targets non-finite
        let cfg = TrainConfig {
            layer_sizes: vec![6, 3, 1],
            target_transform: TargetTransform::Linear,
            ..Default::default()
        };
        let err = train_features(&xs, &ys, &cfg).unwrap_err();
        assert!(matches!(err, Error::TrainingDiverged { epoch: 1 }), "{err}");
    }
}
