use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use scalinglab_core::rng::stream;

use crate::{NnError, Result};

/// Row-major inputs with one-hot targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<f64>,
    pub labels: Vec<f64>,
    pub class_ids: Vec<usize>,
    pub dim: usize,
    pub classes: usize,
    pub name: String,
}

impl Dataset {
    pub fn new(inputs: Vec<f64>, dim: usize, class_ids: Vec<usize>, classes: usize, name: impl Into<String>) -> Result<Self> {
        if dim == 0 || classes == 0 {
            return Err(NnError::Shape("dimension and class count must be at least 1".into()));
        }
        if inputs.len() != class_ids.len() * dim {
            return Err(NnError::Shape(format!(
                "{} input values do not form {} rows of width {dim}",
                inputs.len(),
                class_ids.len()
            )));
        }
        if let Some(i) = inputs.iter().position(|v| !v.is_finite()) {
            return Err(NnError::Shape(format!("non-finite input at flat index {i}")));
        }
        if let Some(&c) = class_ids.iter().find(|&&c| c >= classes) {
            return Err(NnError::Shape(format!("class id {c} ≥ {classes}")));
        }
        let mut labels = vec![0.0; class_ids.len() * classes];
        for (row, &c) in class_ids.iter().enumerate() {
            labels[row * classes + c] = 1.0;
        }
        Ok(Self { inputs, labels, class_ids, dim, classes, name: name.into() })
    }

    pub fn len(&self) -> usize {
        self.class_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_ids.is_empty()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> &[f64] {
        &self.labels[i * self.classes..(i + 1) * self.classes]
    }

    /// Rows in the given order (repeats allowed).
    pub fn select(&self, rows: &[usize], name: impl Into<String>) -> Dataset {
        let mut inputs = Vec::with_capacity(rows.len() * self.dim);
        let mut labels = Vec::with_capacity(rows.len() * self.classes);
        for &r in rows {
            inputs.extend_from_slice(self.input(r));
            labels.extend_from_slice(self.label(r));
        }
        Dataset {
            inputs,
            labels,
            class_ids: rows.iter().map(|&r| self.class_ids[r]).collect(),
            dim: self.dim,
            classes: self.classes,
            name: name.into(),
        }
    }

    /// First `n` rows and the rest.
    pub fn split_at(&self, n: usize) -> (Dataset, Dataset) {
        let n = n.min(self.len());
        let head: Vec<usize> = (0..n).collect();
        let tail: Vec<usize> = (n..self.len()).collect();
        (self.select(&head, format!("{}[..{n}]", self.name)), self.select(&tail, format!("{}[{n}..]", self.name)))
    }
}

/// `k` Gaussian clusters around random unit-norm centers. Row `i` belongs
/// to class `i % k`.
pub fn generate_synthetic(classes: usize, dim: usize, n: usize, cluster_spread: f64, seed: u64) -> Result<Dataset> {
    if classes == 0 || dim == 0 || n == 0 {
        return Err(NnError::InvalidArgument("classes, dim and n must be at least 1".into()));
    }
    if !(cluster_spread >= 0.0 && cluster_spread.is_finite()) {
        return Err(NnError::InvalidArgument(format!("cluster spread {cluster_spread} must be finite and ≥ 0")));
    }
    let mut rng = stream(seed);
    let mut centers = Vec::with_capacity(classes * dim);
    for _ in 0..classes {
        let c: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        centers.extend(c.iter().map(|v| v / norm));
    }
    let class_ids: Vec<usize> = (0..n).map(|i| i % classes).collect();
    let mut inputs = Vec::with_capacity(n * dim);
    for &c in &class_ids {
        for j in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            inputs.push(centers[c * dim + j] + cluster_spread * z);
        }
    }
    Dataset::new(inputs, dim, class_ids, classes, format!("synthetic(k={classes},d={dim},n={n},spread={cluster_spread})"))
}

/// Uniform sample of `n` rows without replacement, in random order.
pub fn subsample(ds: &Dataset, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 || n > ds.len() {
        return Err(NnError::InvalidArgument(format!("subsample size {n} outside 1..={}", ds.len())));
    }
    let rows = index::sample(&mut stream(seed), ds.len(), n).into_vec();
    Ok(ds.select(&rows, format!("{}|sub{n}", ds.name)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelNoise {
    /// New label uniform over all classes; may equal the old one.
    #[default]
    Uniform,
    /// New label uniform over the other `k − 1` classes.
    ExcludeTrue,
}

pub fn corrupt_labels(ds: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    corrupt_labels_with(ds, fraction, seed, LabelNoise::Uniform)
}

/// Resamples the labels of a uniformly chosen `⌊fraction·n⌋` rows.
pub fn corrupt_labels_with(ds: &Dataset, fraction: f64, seed: u64, mode: LabelNoise) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(NnError::InvalidArgument(format!("noise fraction {fraction} outside [0, 1]")));
    }
    if mode == LabelNoise::ExcludeTrue && ds.classes < 2 {
        return Err(NnError::InvalidArgument("excluding the true class needs at least two classes".into()));
    }
    let count = (fraction * ds.len() as f64).floor() as usize;
    let mut rng = stream(seed);
    let mut rows = index::sample(&mut rng, ds.len(), count).into_vec();
    rows.sort_unstable();
    let mut out = ds.clone();
    for r in rows {
        let old = out.class_ids[r];
        let new = match mode {
            LabelNoise::Uniform => rng.random_range(0..ds.classes),
            LabelNoise::ExcludeTrue => {
                let c = rng.random_range(0..ds.classes - 1);
                if c >= old {
                    c + 1
                } else {
                    c
                }
            }
        };
        out.class_ids[r] = new;
        out.labels[r * ds.classes + old] = 0.0;
        out.labels[r * ds.classes + new] = 1.0;
    }
    out.name = format!("{}|noise{fraction}", ds.name);
    Ok(out)
}
