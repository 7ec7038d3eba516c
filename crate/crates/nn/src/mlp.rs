use rand::Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use scalinglab_core::rng::stream;

use crate::{Dataset, NnError, Result};

/// Number of weight layers in the scaled network.
pub const MLP_DEPTH: usize = 6;

pub const INIT_SCHEME: &str = "weights ~ N(0, 2/fan_in), biases = 0";

/// Fully connected layer, `out = W·in + b` with `W` stored row-major
/// (`fan_out × fan_in`).
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub fan_in: usize,
    pub fan_out: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn apply(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.biases.iter().enumerate().map(|(o, b)| {
            let row = &self.weights[o * self.fan_in..(o + 1) * self.fan_in];
            b + row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>()
        }));
    }
}

/// ReLU after every layer except the last.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layer_widths: Vec<usize>,
    pub layers: Vec<Layer>,
    pub seed: u64,
}

/// `10·s` repeated for the five hidden layers.
pub fn hidden_widths(width_scale: usize) -> Vec<usize> {
    vec![10 * width_scale; MLP_DEPTH - 1]
}

/// Six fully connected layers with hidden width `10·s`.
pub fn build_mlp(in_dim: usize, width_scale: usize, out_dim: usize, seed: u64) -> Result<MlpModel> {
    if width_scale == 0 {
        return Err(NnError::InvalidArgument("width scale must be at least 1".into()));
    }
    let mut widths = vec![in_dim];
    widths.extend(hidden_widths(width_scale));
    widths.push(out_dim);
    MlpModel::with_widths(&widths, seed)
}

impl MlpModel {
    /// Arbitrary layer widths `[in, hidden.., out]`, He-normal weights,
    /// zero biases.
    pub fn with_widths(widths: &[usize], seed: u64) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(NnError::InvalidArgument(format!("invalid layer widths {widths:?}")));
        }
        let mut rng = stream(seed);
        let layers = widths
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let std = (2.0 / fan_in as f64).sqrt();
                Layer {
                    fan_in,
                    fan_out,
                    weights: (0..fan_in * fan_out).map(|_| std * rng.sample::<f64, _>(StandardNormal)).collect(),
                    biases: vec![0.0; fan_out],
                }
            })
            .collect();
        Ok(Self { layer_widths: widths.to_vec(), layers, seed })
    }

    pub fn in_dim(&self) -> usize {
        self.layer_widths[0]
    }

    pub fn out_dim(&self) -> usize {
        *self.layer_widths.last().unwrap()
    }

    pub fn param_count(&self) -> u64 {
        self.layers.iter().map(|l| (l.fan_in * l.fan_out + l.fan_out) as u64).sum()
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        let mut cur = input.to_vec();
        let mut next = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            layer.apply(&cur, &mut next);
            if i + 1 < self.layers.len() {
                next.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    /// SHA-256 over the widths and the bit patterns of every parameter.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for w in &self.layer_widths {
            h.update((*w as u64).to_le_bytes());
        }
        for l in &self.layers {
            l.weights.iter().chain(&l.biases).for_each(|v| h.update(v.to_le_bytes()));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn zero_gradients(&self) -> Vec<Layer> {
        self.layers
            .iter()
            .map(|l| Layer {
                fan_in: l.fan_in,
                fan_out: l.fan_out,
                weights: vec![0.0; l.weights.len()],
                biases: vec![0.0; l.biases.len()],
            })
            .collect()
    }

    /// Adds `scale · ∇‖f(x) − y‖²` to `grads` and returns `‖f(x) − y‖²`.
    pub fn accumulate_gradient(&self, x: &[f64], y: &[f64], scale: f64, grads: &mut [Layer]) -> f64 {
        // activations[i] is the input to layer i; the last entry is the output.
        let mut activations: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.to_vec());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::with_capacity(layer.fan_out);
            layer.apply(&activations[i], &mut out);
            if i + 1 < self.layers.len() {
                out.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            activations.push(out);
        }
        let output = activations.last().unwrap();
        let mut sq = 0.0;
        let mut delta: Vec<f64> = output
            .iter()
            .zip(y)
            .map(|(o, t)| {
                sq += (o - t) * (o - t);
                2.0 * (o - t) * scale
            })
            .collect();
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let input = &activations[i];
            let g = &mut grads[i];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                g.biases[o] += d;
                let row = &mut g.weights[o * layer.fan_in..(o + 1) * layer.fan_in];
                row.iter_mut().zip(input).for_each(|(w, a)| *w += d * a);
            }
            if i == 0 {
                break;
            }
            let mut prev = vec![0.0; layer.fan_in];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &layer.weights[o * layer.fan_in..(o + 1) * layer.fan_in];
                prev.iter_mut().zip(row).for_each(|(p, w)| *p += d * w);
            }
            // ReLU derivative, taken as 0 at a zero preactivation.
            prev.iter_mut().zip(input).for_each(|(p, a)| {
                if *a <= 0.0 {
                    *p = 0.0
                }
            });
            delta = prev;
        }
        sq
    }

    /// `θ ← θ − lr·g`.
    pub fn apply_gradients(&mut self, grads: &[Layer], learning_rate: f64) {
        for (l, g) in self.layers.iter_mut().zip(grads) {
            l.weights.iter_mut().zip(&g.weights).for_each(|(w, d)| *w -= learning_rate * d);
            l.biases.iter_mut().zip(&g.biases).for_each(|(b, d)| *b -= learning_rate * d);
        }
    }
}

/// Mean over samples and output coordinates of the squared residual.
pub fn evaluate_mse(model: &MlpModel, ds: &Dataset) -> Result<f64> {
    if model.in_dim() != ds.dim || model.out_dim() != ds.classes {
        return Err(NnError::Shape(format!(
            "model maps {} → {} but the data is {} → {}",
            model.in_dim(),
            model.out_dim(),
            ds.dim,
            ds.classes
        )));
    }
    if ds.is_empty() {
        return Err(NnError::Shape("empty dataset".into()));
    }
    let total: f64 = (0..ds.len())
        .map(|i| model.forward(ds.input(i)).iter().zip(ds.label(i)).map(|(o, t)| (o - t) * (o - t)).sum::<f64>())
        .sum();
    Ok(total / (ds.len() * ds.classes) as f64)
}
