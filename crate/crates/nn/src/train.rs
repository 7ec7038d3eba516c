use rand::seq::SliceRandom;

use scalinglab_core::rng::{derive_seed, stream};

use crate::mlp::INIT_SCHEME;
use crate::{evaluate_mse, Dataset, MlpModel, NnError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Seeds the per-epoch shuffles.
    pub seed: u64,
    pub eval_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 100, batch_size: 32, learning_rate: 0.01, seed: 101, eval_every: 1 }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(NnError::InvalidArgument("batch size must be at least 1".into()));
        }
        if self.eval_every == 0 {
            return Err(NnError::InvalidArgument("eval_every must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(NnError::InvalidArgument(format!("learning rate {} must be positive", self.learning_rate)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    /// Epoch 0 is the untrained model.
    pub epochs_logged: Vec<usize>,
    pub train_mse: Vec<f64>,
    pub test_mse: Vec<f64>,
    pub initial_model_digest: String,
    pub final_model_digest: String,
    pub layer_widths: Vec<usize>,
    pub init_scheme: String,
    pub config: TrainConfig,
}

/// Shuffled minibatch SGD on the mean over batch rows and output
/// coordinates of the squared error. The last partial batch is kept.
/// Metrics are logged at epoch 0, every `eval_every` epochs and at the end.
pub fn train_sgd(model: &mut MlpModel, train: &Dataset, test: &Dataset, cfg: &TrainConfig) -> Result<TrainingTrace> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(NnError::Shape("empty training set".into()));
    }
    if test.dim != train.dim || test.classes != train.classes {
        return Err(NnError::Shape("train and test sets have different shapes".into()));
    }
    let mut trace = TrainingTrace {
        epochs_logged: Vec::new(),
        train_mse: Vec::new(),
        test_mse: Vec::new(),
        initial_model_digest: model.digest(),
        final_model_digest: String::new(),
        layer_widths: model.layer_widths.clone(),
        init_scheme: INIT_SCHEME.to_string(),
        config: cfg.clone(),
    };
    let log = |model: &MlpModel, epoch: usize, trace: &mut TrainingTrace| -> Result<()> {
        let tr = evaluate_mse(model, train)?;
        let te = if test.is_empty() { f64::NAN } else { evaluate_mse(model, test)? };
        if !tr.is_finite() || (!te.is_finite() && !test.is_empty()) {
            return Err(NnError::Divergence { epoch });
        }
        trace.epochs_logged.push(epoch);
        trace.train_mse.push(tr);
        trace.test_mse.push(te);
        Ok(())
    };
    log(model, 0, &mut trace)?;

    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut grads = model.zero_gradients();
    let k = train.classes as f64;
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut stream(derive_seed(cfg.seed, epoch as u64)));
        for batch in order.chunks(cfg.batch_size) {
            for g in grads.iter_mut() {
                g.weights.iter_mut().for_each(|v| *v = 0.0);
                g.biases.iter_mut().for_each(|v| *v = 0.0);
            }
            let scale = 1.0 / (batch.len() as f64 * k);
            let mut loss = 0.0;
            for &i in batch {
                loss += model.accumulate_gradient(train.input(i), train.label(i), scale, &mut grads);
            }
            if !loss.is_finite() {
                return Err(NnError::Divergence { epoch });
            }
            model.apply_gradients(&grads, cfg.learning_rate);
        }
        if epoch % cfg.eval_every == 0 || epoch == cfg.epochs {
            log(model, epoch, &mut trace)?;
        }
    }
    trace.final_model_digest = model.digest();
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{build_mlp, generate_synthetic};

    #[test]
    fn zero_epochs_only_logs_initial_state() {
        let ds = generate_synthetic(3, 4, 12, 0.5, 1).unwrap();
        let mut m = build_mlp(4, 1, 3, 2).unwrap();
        let before = m.digest();
        let cfg = TrainConfig { epochs: 0, ..Default::default() };
        let trace = train_sgd(&mut m, &ds, &ds, &cfg).unwrap();
        assert_eq!(trace.epochs_logged, vec![0]);
        assert_eq!(trace.final_model_digest, before);
        assert_eq!(trace.initial_model_digest, before);
        assert_eq!(trace.train_mse[0], evaluate_mse(&m, &ds).unwrap());
    }

    #[test]
    fn memorizes_a_single_sample() {
        let ds = generate_synthetic(10, 8, 1, 0.5, 3).unwrap();
        let mut m = build_mlp(8, 2, 10, 4).unwrap();
        let cfg = TrainConfig { epochs: 500, learning_rate: 0.01, eval_every: 50, ..Default::default() };
        let trace = train_sgd(&mut m, &ds, &ds, &cfg).unwrap();
        assert!(*trace.train_mse.last().unwrap() < 1e-3, "{:?}", trace.train_mse);
    }

    #[test]
    fn runs_are_bit_identical() {
        let ds = generate_synthetic(4, 6, 70, 0.4, 5).unwrap();
        let (train, test) = ds.split_at(50);
        let cfg = TrainConfig { epochs: 7, batch_size: 8, eval_every: 3, ..Default::default() };
        let run = || {
            let mut m = build_mlp(6, 1, 4, 6).unwrap();
            train_sgd(&mut m, &train, &test, &cfg).unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a, b);
        assert_eq!(a.epochs_logged, vec![0, 3, 6, 7]);
        assert!(a.train_mse.iter().chain(&a.test_mse).all(|v| *v >= 0.0));
    }

    #[test]
    fn divergence_names_the_epoch() {
        let ds = generate_synthetic(3, 4, 30, 1.0, 7).unwrap();
        let mut m = build_mlp(4, 2, 3, 8).unwrap();
        let cfg = TrainConfig { epochs: 50, learning_rate: 1e6, ..Default::default() };
        match train_sgd(&mut m, &ds, &ds, &cfg) {
            Err(NnError::Divergence { epoch }) => assert!((1..=50).contains(&epoch)),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn full_batch_loss_is_nonincreasing() {
        let ds = generate_synthetic(10, 64, 200, 0.5, 9).unwrap();
        let mut m = build_mlp(64, 1, 10, 10).unwrap();
        let cfg = TrainConfig { epochs: 30, batch_size: ds.len(), learning_rate: 1e-3, ..Default::default() };
        let trace = train_sgd(&mut m, &ds, &ds, &cfg).unwrap();
        for w in trace.train_mse.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{} > {}", w[1], w[0]);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let ds = generate_synthetic(2, 2, 4, 0.5, 1).unwrap();
        let mut m = build_mlp(2, 1, 2, 1).unwrap();
        assert!(train_sgd(&mut m, &ds, &ds, &TrainConfig { batch_size: 0, ..Default::default() }).is_err());
        assert!(train_sgd(&mut m, &ds, &ds, &TrainConfig { eval_every: 0, ..Default::default() }).is_err());
    }
}
