//! Single-hidden-layer sigmoid network trained by full-batch backpropagation
//! with momentum on a mean-squared-error loss.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Soft one-hot encoding: the target class gets `TARGET_ON`, others `TARGET_OFF`.
pub const TARGET_ON: f64 = 0.9;
pub const TARGET_OFF: f64 = 0.1;

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Dense layer, `weights` row-major `outputs × inputs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Layer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Layer {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    fn activate(&self, x: &[f64], macs: &mut u64) -> Vec<f64> {
        *macs += (self.inputs * self.outputs) as u64;
        self.weights
            .chunks(self.inputs)
            .zip(&self.biases)
            .map(|(row, b)| sigmoid(row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b))
            .collect()
    }

    pub fn row(&self, o: usize) -> &[f64] {
        &self.weights[o * self.inputs..(o + 1) * self.inputs]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub hidden: Layer,
    pub output: Layer,
}

/// Per-layer activations from a forward pass.
#[derive(Clone, Debug, PartialEq)]
pub struct Activations {
    pub hidden: Vec<f64>,
    pub output: Vec<f64>,
}

/// Gradients with the same layout as [`Network`].
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub hidden: Layer,
    pub output: Layer,
}

impl Gradients {
    fn zeros_like(net: &Network) -> Self {
        Gradients {
            hidden: Layer::zeros(net.hidden.inputs, net.hidden.outputs),
            output: Layer::zeros(net.output.inputs, net.output.outputs),
        }
    }

    fn params_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [
            &mut self.hidden.weights,
            &mut self.hidden.biases,
            &mut self.output.weights,
            &mut self.output.biases,
        ]
    }
}

impl Network {
    pub fn layer_sizes(&self) -> [usize; 3] {
        [self.hidden.inputs, self.hidden.outputs, self.output.outputs]
    }

    /// Builds a network from explicit parameters, checking shapes and finiteness.
    pub fn from_parts(hidden: Layer, output: Layer) -> Result<Self> {
        for (name, l) in [("hidden", &hidden), ("output", &output)] {
            if l.inputs == 0 || l.outputs == 0 {
                return Err(Error::param(format!("{name} layer has an empty dimension")));
            }
            if l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(Error::param(format!("{name} layer parameter shapes are inconsistent")));
            }
            if l.weights.iter().chain(&l.biases).any(|v| !v.is_finite()) {
                return Err(Error::param(format!("{name} layer holds non-finite parameters")));
            }
        }
        if hidden.outputs != output.inputs {
            return Err(Error::param("hidden width does not match output layer fan-in"));
        }
        Ok(Network { hidden, output })
    }

    fn params_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [
            &mut self.hidden.weights,
            &mut self.hidden.biases,
            &mut self.output.weights,
            &mut self.output.biases,
        ]
    }
}

/// Xavier-uniform weights from a ChaCha8 stream seeded with `seed`; zero biases.
///
/// Each weight is `(2u − 1)·√(6/(fan_in+fan_out))` with `u = rng.random::<f64>()`,
/// drawn hidden layer first, row by row.
pub fn init_network(layer_sizes: [usize; 3], seed: u64) -> Result<Network> {
    if layer_sizes.contains(&0) {
        return Err(Error::param(format!(
            "layer sizes must be positive, got {layer_sizes:?}"
        )));
    }
    let [d, h, c] = layer_sizes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layer = |inputs: usize, outputs: usize| {
        let bound = (6.0 / (inputs + outputs) as f64).sqrt();
        let mut l = Layer::zeros(inputs, outputs);
        for w in &mut l.weights {
            *w = (2.0 * rng.random::<f64>() - 1.0) * bound;
        }
        l
    };
    let hidden = layer(d, h);
    let output = layer(h, c);
    Ok(Network { hidden, output })
}

fn check_input(net: &Network, x: &[f64]) -> Result<()> {
    if x.len() != net.hidden.inputs {
        return Err(Error::param(format!(
            "input length {} does not match network input size {}",
            x.len(),
            net.hidden.inputs
        )));
    }
    Ok(())
}

fn forward_counted(net: &Network, x: &[f64], macs: &mut u64) -> Activations {
    let hidden = net.hidden.activate(x, macs);
    let output = net.output.activate(&hidden, macs);
    Activations { hidden, output }
}

pub fn forward(net: &Network, x: &[f64]) -> Result<Activations> {
    check_input(net, x)?;
    Ok(forward_counted(net, x, &mut 0))
}

/// Mean squared error `(1/C) Σ (o_i − t_i)²`.
pub fn mse(output: &[f64], target: &[f64]) -> f64 {
    output.iter().zip(target).map(|(o, t)| (o - t) * (o - t)).sum::<f64>() / output.len() as f64
}

/// Adds `scale · ∂E/∂θ` for one example into `grads`; returns the example's loss.
fn accumulate_gradients(
    net: &Network,
    x: &[f64],
    target: &[f64],
    scale: f64,
    grads: &mut Gradients,
    macs: &mut u64,
) -> f64 {
    let act = forward_counted(net, x, macs);
    let c = net.output.outputs as f64;
    let delta_out: Vec<f64> = act
        .output
        .iter()
        .zip(target)
        .map(|(&o, &t)| 2.0 * (o - t) / c * o * (1.0 - o))
        .collect();

    let h = net.hidden.outputs;
    let mut delta_hidden = vec![0.0; h];
    for (k, &dk) in delta_out.iter().enumerate() {
        let row = net.output.row(k);
        for j in 0..h {
            delta_hidden[j] += row[j] * dk;
        }
        let grow = &mut grads.output.weights[k * h..(k + 1) * h];
        for (g, &a) in grow.iter_mut().zip(&act.hidden) {
            *g += scale * dk * a;
        }
        grads.output.biases[k] += scale * dk;
    }
    *macs += 2 * (h * net.output.outputs) as u64;
    for (dj, &a) in delta_hidden.iter_mut().zip(&act.hidden) {
        *dj *= a * (1.0 - a);
    }

    let d = net.hidden.inputs;
    for (j, &dj) in delta_hidden.iter().enumerate() {
        let grow = &mut grads.hidden.weights[j * d..(j + 1) * d];
        for (g, &xi) in grow.iter_mut().zip(x) {
            *g += scale * dj * xi;
        }
        grads.hidden.biases[j] += scale * dj;
    }
    *macs += (d * h) as u64;
    mse(&act.output, target)
}

/// Exact gradient of `E = (1/C) Σ (o_i − t_i)²` for a single example.
pub fn compute_gradients(net: &Network, x: &[f64], target: &[f64]) -> Result<Gradients> {
    check_input(net, x)?;
    if target.len() != net.output.outputs {
        return Err(Error::param(format!(
            "target length {} does not match output size {}",
            target.len(),
            net.output.outputs
        )));
    }
    let mut grads = Gradients::zeros_like(net);
    accumulate_gradients(net, x, target, 1.0, &mut grads, &mut 0);
    Ok(grads)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub error_goal: f64,
    pub max_epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            momentum: 0.9,
            error_goal: 1e-3,
            max_epochs: 5000,
            seed: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::param("learning rate must be a non-negative number"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::param("momentum must lie in [0, 1)"));
        }
        if self.error_goal.is_nan() || self.error_goal <= 0.0 {
            return Err(Error::param("error goal must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainRecord {
    pub epoch: usize,
    pub mse: f64,
    /// Wall-clock seconds since training started.
    pub wall_time: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub network: Network,
    pub history: Vec<TrainRecord>,
    pub converged: bool,
    /// Multiply-accumulates spent in forward and backward passes.
    pub macs: u64,
}

impl TrainOutcome {
    pub fn final_mse(&self) -> f64 {
        self.history.last().map(|r| r.mse).unwrap_or(f64::NAN)
    }
}

/// Target vector for `label` under the soft one-hot encoding. A single-output
/// network encodes label 1 as `TARGET_ON` and label 0 as `TARGET_OFF`.
pub fn encode_target(label: usize, classes: usize) -> Vec<f64> {
    if classes == 1 {
        return vec![if label == 1 { TARGET_ON } else { TARGET_OFF }];
    }
    (0..classes)
        .map(|c| if c == label { TARGET_ON } else { TARGET_OFF })
        .collect()
}

/// Full-batch gradient descent with momentum: `Δw_t = −η ∇E + μ Δw_{t−1}`.
///
/// `E` is the mean over examples of the per-example MSE. Each epoch records
/// the loss at the current weights; training stops once it drops below the
/// goal or after `max_epochs` updates.
pub fn train(net: Network, data: &[(Vec<f64>, usize)], cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    let classes = net.output.outputs;
    let label_space = if classes == 1 { 2 } else { classes };
    if data.is_empty() {
        return Err(Error::param("training set is empty"));
    }
    let mut seen = vec![false; label_space];
    for (x, label) in data {
        check_input(&net, x)?;
        if *label >= label_space {
            return Err(Error::param(format!("label {label} outside 0..{label_space}")));
        }
        seen[*label] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::param(format!("class {missing} has no training examples")));
    }

    let targets: Vec<Vec<f64>> = data.iter().map(|(_, l)| encode_target(*l, classes)).collect();
    let scale = 1.0 / data.len() as f64;
    let mut net = net;
    let mut velocity = Gradients::zeros_like(&net);
    let mut history = Vec::new();
    let mut macs = 0u64;
    let mut converged = false;
    let start = Instant::now();

    for epoch in 1..=cfg.max_epochs {
        let mut grads = Gradients::zeros_like(&net);
        let mut loss = 0.0;
        for ((x, _), t) in data.iter().zip(&targets) {
            loss += accumulate_gradients(&net, x, t, scale, &mut grads, &mut macs);
        }
        loss *= scale;
        history.push(TrainRecord {
            epoch,
            mse: loss,
            wall_time: start.elapsed().as_secs_f64(),
        });
        if loss < cfg.error_goal {
            converged = true;
            break;
        }
        for ((p, v), g) in net
            .params_mut()
            .into_iter()
            .zip(velocity.params_mut())
            .zip(grads.params_mut())
        {
            for ((pi, vi), gi) in p.iter_mut().zip(v.iter_mut()).zip(g.iter()) {
                *vi = cfg.momentum * *vi - cfg.learning_rate * gi;
                *pi += *vi;
            }
        }
    }
    Ok(TrainOutcome {
        network: net,
        history,
        converged,
        macs,
    })
}

/// Multiply-accumulates per epoch for `samples` examples, as counted by [`train`].
pub fn macs_per_epoch(layer_sizes: [usize; 3], samples: usize) -> u64 {
    let [d, h, c] = layer_sizes;
    (samples * (2 * d * h + 3 * h * c)) as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: usize,
    pub confidence: f64,
    pub output_vector: Vec<f64>,
    pub rejected: bool,
}

/// Decodes network outputs into a class.
///
/// With several outputs the label is the argmax (lowest index on ties) and the
/// confidence is the winning output. A single output is a binary decision:
/// label 1 iff `o ≥ 0.5`, confidence is the position of `o` between the two
/// soft targets, clamped to `[0, 1]`.
pub fn decode(output: &[f64], reject_below: f64) -> Prediction {
    let (label, confidence) = if output.len() == 1 {
        let o = output[0];
        let span = TARGET_ON - TARGET_OFF;
        if o >= 0.5 {
            (1, ((o - TARGET_OFF) / span).clamp(0.0, 1.0))
        } else {
            (0, ((TARGET_ON - o) / span).clamp(0.0, 1.0))
        }
    } else {
        let mut best = 0;
        for (i, &o) in output.iter().enumerate() {
            if o > output[best] {
                best = i;
            }
        }
        (best, output[best])
    };
    Prediction {
        label,
        confidence,
        output_vector: output.to_vec(),
        rejected: confidence < reject_below,
    }
}

pub fn predict(net: &Network, x: &[f64], reject_below: f64) -> Result<Prediction> {
    Ok(decode(&forward(net, x)?.output, reject_below))
}
