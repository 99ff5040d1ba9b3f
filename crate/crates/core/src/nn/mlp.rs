use rand::Rng;
use serde::{Deserialize, Serialize};

use super::NnError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    /// Linear hidden layers; only used to check gradients against closed forms.
    Identity,
}

impl Activation {
    #[inline]
    fn apply<T: Scalar>(self, x: T) -> T {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation's output.
    #[inline]
    fn derivative_from_output<T: Scalar>(self, y: T) -> T {
        match self {
            Activation::Tanh => T::one() - y * y,
            Activation::Identity => T::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub layer_sizes: Vec<usize>,
    pub hidden: Activation,
}

impl NetworkSpec {
    pub fn new(layer_sizes: &[usize]) -> Self {
        Self { layer_sizes: layer_sizes.to_vec(), hidden: Activation::Tanh }
    }

    pub fn validate(&self) -> Result<(), NnError> {
        if self.layer_sizes.len() < 2 || self.layer_sizes.contains(&0) {
            return Err(NnError::InvalidSpec(format!("bad layer sizes {:?}", self.layer_sizes)));
        }
        Ok(())
    }

    pub fn parameter_count(&self) -> usize {
        self.layer_sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }
}

/// Dense layer: `weights` is `outputs × inputs`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Layer<T> {
    pub(crate) inputs: usize,
    pub(crate) outputs: usize,
    pub(crate) weights: Vec<T>,
    pub(crate) biases: Vec<T>,
}

/// Multilayer perceptron with a shared hidden activation and a linear output.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T> {
    pub(crate) layers: Vec<Layer<T>>,
    hidden: Activation,
}

/// Activations retained from a batched forward pass.
#[derive(Debug, Clone)]
pub struct Tape<T> {
    batch: usize,
    /// `activations[k]` is the input to layer k, `batch × inputs_k`; the last
    /// entry is the network output.
    activations: Vec<Vec<T>>,
}

impl<T: Scalar> Tape<T> {
    pub fn output(&self) -> &[T] {
        self.activations.last().expect("tape has at least the input")
    }

    pub fn batch(&self) -> usize {
        self.batch
    }
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    // Eight independent accumulators let the compiler vectorise; the
    // summation order is fixed, so results stay deterministic.
    let mut acc = [T::zero(); 8];
    let (ca, ra) = (a.chunks_exact(8), a.chunks_exact(8).remainder());
    let cb = b.chunks_exact(8);
    let rb = cb.remainder();
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = T::zero();
    for (x, y) in ra.iter().zip(rb) {
        tail += *x * *y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

#[inline]
fn axpy<T: Scalar>(y: &mut [T], alpha: T, x: &[T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

impl<T: Scalar> Mlp<T> {
    pub fn zeros(spec: &NetworkSpec) -> Result<Self, NnError> {
        spec.validate()?;
        let layers = spec
            .layer_sizes
            .windows(2)
            .map(|w| Layer {
                inputs: w[0],
                outputs: w[1],
                weights: vec![T::zero(); w[0] * w[1]],
                biases: vec![T::zero(); w[1]],
            })
            .collect();
        Ok(Self { layers, hidden: spec.hidden })
    }

    /// Weights uniform in ±sqrt(3 / fan_in) (unit-variance pre-activations
    /// for unit-variance inputs), biases zero.
    pub fn init<R: Rng + ?Sized>(spec: &NetworkSpec, rng: &mut R) -> Result<Self, NnError> {
        let mut net = Self::zeros(spec)?;
        for layer in &mut net.layers {
            let limit = (3.0 / layer.inputs as f64).sqrt();
            for w in &mut layer.weights {
                *w = T::lit(rng.random_range(-limit..limit));
            }
        }
        Ok(net)
    }

    pub fn spec(&self) -> NetworkSpec {
        let mut sizes = vec![self.layers[0].inputs];
        sizes.extend(self.layers.iter().map(|l| l.outputs));
        NetworkSpec { layer_sizes: sizes, hidden: self.hidden }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").outputs
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    /// Parameter buffers in storage order: per layer, weights then biases.
    pub fn param_slices(&self) -> Vec<&[T]> {
        self.layers.iter().flat_map(|l| [l.weights.as_slice(), l.biases.as_slice()]).collect()
    }

    pub fn param_slices_mut(&mut self) -> Vec<&mut [T]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.biases.as_mut_slice()])
            .collect()
    }

    /// Same shape as `self`, all zeros; used as a gradient accumulator.
    pub fn zeros_like(&self) -> Self {
        Self::zeros(&self.spec()).expect("valid spec")
    }

    pub fn is_finite(&self) -> bool {
        self.param_slices().iter().all(|s| s.iter().all(|v| v.is_finite()))
    }

    pub fn forward(&self, input: &[T]) -> Result<Vec<T>, NnError> {
        Ok(self.forward_batch(input, 1)?.output().to_vec())
    }

    /// Forward pass over `batch` row-major inputs.
    pub fn forward_batch(&self, inputs: &[T], batch: usize) -> Result<Tape<T>, NnError> {
        let expected = batch * self.input_dim();
        if inputs.len() != expected {
            return Err(NnError::DimensionMismatch { expected, got: inputs.len() });
        }
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(inputs.to_vec());
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let x = activations.last().expect("pushed");
            let mut y = vec![T::zero(); batch * layer.outputs];
            for n in 0..batch {
                let xin = &x[n * layer.inputs..(n + 1) * layer.inputs];
                let yout = &mut y[n * layer.outputs..(n + 1) * layer.outputs];
                for (o, out) in yout.iter_mut().enumerate() {
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    let z = layer.biases[o] + dot(row, xin);
                    *out = if k == last { z } else { self.hidden.apply(z) };
                }
            }
            activations.push(y);
        }
        Ok(Tape { batch, activations })
    }

    /// Gradients of `Σ_n out_grad[n] · f(x_n)` with respect to every parameter,
    /// accumulated into `grads` (same shape as `self`).
    pub fn backward(&self, tape: &Tape<T>, out_grad: &[T], grads: &mut Mlp<T>) -> Result<(), NnError> {
        let batch = tape.batch;
        if out_grad.len() != batch * self.output_dim() {
            return Err(NnError::DimensionMismatch { expected: batch * self.output_dim(), got: out_grad.len() });
        }
        if grads.spec() != self.spec() {
            return Err(NnError::ShapeMismatch);
        }
        let mut delta = out_grad.to_vec();
        for k in (0..self.layers.len()).rev() {
            let layer = &self.layers[k];
            let g = &mut grads.layers[k];
            let x = &tape.activations[k];
            let need_input_grad = k > 0;
            let mut dx = if need_input_grad { vec![T::zero(); batch * layer.inputs] } else { Vec::new() };
            for n in 0..batch {
                let d = &delta[n * layer.outputs..(n + 1) * layer.outputs];
                let xin = &x[n * layer.inputs..(n + 1) * layer.inputs];
                for (o, &dout) in d.iter().enumerate() {
                    if dout == T::zero() {
                        continue;
                    }
                    g.biases[o] += dout;
                    axpy(&mut g.weights[o * layer.inputs..(o + 1) * layer.inputs], dout, xin);
                    if need_input_grad {
                        let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                        axpy(&mut dx[n * layer.inputs..(n + 1) * layer.inputs], dout, row);
                    }
                }
            }
            if need_input_grad {
                // Input to layer k is the activated output of layer k-1.
                for (di, &yi) in dx.iter_mut().zip(x.iter()) {
                    *di *= self.hidden.derivative_from_output(yi);
                }
                delta = dx;
            }
        }
        Ok(())
    }

    /// Converts every parameter to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Mlp<U> {
        Mlp {
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    inputs: l.inputs,
                    outputs: l.outputs,
                    weights: l.weights.iter().map(|w| U::lit(w.as_f64())).collect(),
                    biases: l.biases.iter().map(|b| U::lit(b.as_f64())).collect(),
                })
                .collect(),
            hidden: self.hidden,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Stream};

    fn random_net(sizes: &[usize], hidden: Activation, seed: u64) -> Mlp<f64> {
        let spec = NetworkSpec { layer_sizes: sizes.to_vec(), hidden };
        let mut rng = substream(seed, Stream::Init, &[]);
        let mut net = Mlp::init(&spec, &mut rng).unwrap();
        for s in net.param_slices_mut() {
            for v in s.iter_mut() {
                *v += rng.random_range(-0.3..0.3);
            }
        }
        net
    }

    #[test]
    fn zero_net_outputs_zero() {
        let net = Mlp::<f64>::zeros(&NetworkSpec::new(&[3, 4, 2])).unwrap();
        assert_eq!(net.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn toy_single_unit() {
        let mut net = Mlp::<f64>::zeros(&NetworkSpec::new(&[1, 1, 1])).unwrap();
        net.layers[0].weights[0] = 1.0;
        net.layers[1].weights[0] = 1.0;
        let y = net.forward(&[0.5]).unwrap()[0];
        assert!((y - 0.4621).abs() < 1e-4);
        assert_eq!(y, 0.5f64.tanh());
    }

    #[test]
    fn dimension_mismatch() {
        let net = Mlp::<f32>::zeros(&NetworkSpec::new(&[3, 2])).unwrap();
        assert!(matches!(net.forward(&[1.0]), Err(NnError::DimensionMismatch { expected: 3, got: 1 })));
    }

    #[test]
    fn zero_output_gradient_gives_zero_gradients() {
        let net = random_net(&[3, 5, 2], Activation::Tanh, 1);
        let tape = net.forward_batch(&[0.1, 0.2, 0.3], 1).unwrap();
        let mut g = net.zeros_like();
        net.backward(&tape, &[0.0, 0.0], &mut g).unwrap();
        assert!(g.param_slices().iter().all(|s| s.iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn linear_net_matches_outer_product() {
        // Single layer: d(c·(Wx+b))/dW = c xᵀ, d/db = c.
        let net = random_net(&[3, 2], Activation::Identity, 2);
        let x = [0.5, -1.0, 2.0];
        let c = [0.7, -0.3];
        let tape = net.forward_batch(&x, 1).unwrap();
        let mut g = net.zeros_like();
        net.backward(&tape, &c, &mut g).unwrap();
        for o in 0..2 {
            for i in 0..3 {
                assert_eq!(g.layers[0].weights[o * 3 + i], c[o] * x[i]);
            }
            assert_eq!(g.layers[0].biases[o], c[o]);
        }
    }

    #[test]
    fn deep_linear_net_matches_closed_form() {
        // f = W2 (W1 x + b1) + b2, so dL/dW1 = (W2ᵀ c) xᵀ and dL/dW2 = c (W1 x + b1)ᵀ.
        let net = random_net(&[2, 3, 2], Activation::Identity, 3);
        let x = [0.4, -0.9];
        let c = [1.5, -0.5];
        let tape = net.forward_batch(&x, 1).unwrap();
        let mut g = net.zeros_like();
        net.backward(&tape, &c, &mut g).unwrap();
        let (l1, l2) = (&net.layers[0], &net.layers[1]);
        let h: Vec<f64> = (0..3).map(|j| l1.biases[j] + l1.weights[j * 2] * x[0] + l1.weights[j * 2 + 1] * x[1]).collect();
        for j in 0..3 {
            let back = l2.weights[j] * c[0] + l2.weights[3 + j] * c[1];
            for i in 0..2 {
                assert!((g.layers[0].weights[j * 2 + i] - back * x[i]).abs() < 1e-12);
            }
            for o in 0..2 {
                assert!((g.layers[1].weights[o * 3 + j] - c[o] * h[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn batch_equals_sum_of_singles() {
        let net = random_net(&[3, 4, 2], Activation::Tanh, 4);
        let xs = [0.1, 0.2, 0.3, -0.5, 0.4, 0.9];
        let cs = [1.0, 0.5, -0.2, 0.3];
        let mut gb = net.zeros_like();
        let tape = net.forward_batch(&xs, 2).unwrap();
        net.backward(&tape, &cs, &mut gb).unwrap();
        let mut gs = net.zeros_like();
        for n in 0..2 {
            let t = net.forward_batch(&xs[n * 3..n * 3 + 3], 1).unwrap();
            net.backward(&t, &cs[n * 2..n * 2 + 2], &mut gs).unwrap();
        }
        for (a, b) in gb.param_slices().iter().zip(gs.param_slices()) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
