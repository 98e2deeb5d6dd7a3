use crate::error::{Error, Result};
use crate::nn::{DenseLayer, DenseModel};
use crate::scalar::{axpy, dot, Real};

/// Per-parameter gradients, laid out like the model's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients<T> {
    pub layers: Vec<DenseLayer<T>>,
}

impl<T: Real> Gradients<T> {
    pub fn zeros_like(model: &DenseModel<T>) -> Self {
        Self {
            layers: model.layers().iter().map(|l| DenseLayer::zeros(l.inputs, l.outputs)).collect(),
        }
    }

    fn clear(&mut self) {
        for l in &mut self.layers {
            l.weights.iter_mut().for_each(|w| *w = T::zero());
            l.biases.iter_mut().for_each(|b| *b = T::zero());
        }
    }

    /// Flattened in declaration order: each layer's weights then biases.
    pub fn flat(&self) -> Vec<T> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
            .collect()
    }
}

/// Scratch buffers reused across samples and batches.
#[derive(Debug, Clone)]
pub struct Workspace<T> {
    /// Post-activation outputs of each layer.
    acts: Vec<Vec<T>>,
    deltas: Vec<Vec<T>>,
    grads: Gradients<T>,
}

impl<T: Real> Workspace<T> {
    pub fn new(model: &DenseModel<T>) -> Self {
        Self {
            acts: model.layers().iter().map(|l| vec![T::zero(); l.outputs]).collect(),
            deltas: model.layers().iter().map(|l| vec![T::zero(); l.outputs]).collect(),
            grads: Gradients::zeros_like(model),
        }
    }

    pub fn gradients(&self) -> &Gradients<T> {
        &self.grads
    }
}

/// Mean-squared-error loss over the batch and its exact gradient with
/// respect to every weight and bias. ReLU's derivative at 0 is taken as 0.
/// Samples are reduced in batch order, so results are reproducible.
pub fn backprop_gradients<T: Real>(model: &DenseModel<T>, batch: &[(&[T], T)]) -> Result<(T, Gradients<T>)> {
    let mut ws = Workspace::new(model);
    let loss = backprop_into(model, batch, &mut ws)?;
    Ok((loss, ws.grads))
}

pub(crate) fn backprop_into<T: Real>(model: &DenseModel<T>, batch: &[(&[T], T)], ws: &mut Workspace<T>) -> Result<T> {
    if batch.is_empty() {
        return Err(Error::config("empty batch"));
    }
    ws.grads.clear();
    let layers = model.layers();
    let last = layers.len() - 1;
    let scale = T::lit(2.0) / T::lit(batch.len() as f64);
    let mut loss = T::zero();

    for &(x, target) in batch {
        if x.len() != model.input_dim() {
            return Err(Error::Shape {
                expected: model.input_dim(),
                actual: x.len(),
            });
        }
        // forward
        for i in 0..layers.len() {
            let (done, rest) = ws.acts.split_at_mut(i);
            let input = if i == 0 { x } else { done[i - 1].as_slice() };
            let out = &mut rest[0];
            let l = &layers[i];
            for j in 0..l.outputs {
                let z = dot(l.row(j), input) + l.biases[j];
                out[j] = if i < last && z <= T::zero() { T::zero() } else { z };
            }
        }
        let y = ws.acts[last][0];
        if !y.is_finite() {
            return Err(Error::Numeric(format!("non-finite network output {y}")));
        }
        let r = y - target;
        loss += r * r;

        // backward
        ws.deltas[last][0] = scale * r;
        for i in (0..layers.len()).rev() {
            let l = &layers[i];
            let input = if i == 0 { x } else { ws.acts[i - 1].as_slice() };
            let g = &mut ws.grads.layers[i];
            for j in 0..l.outputs {
                let d = ws.deltas[i][j];
                if d == T::zero() {
                    continue;
                }
                g.biases[j] += d;
                axpy(d, input, &mut g.weights[j * l.inputs..(j + 1) * l.inputs]);
            }
            if i > 0 {
                let (prev, cur) = ws.deltas.split_at_mut(i);
                let back = &mut prev[i - 1];
                back.iter_mut().for_each(|v| *v = T::zero());
                for j in 0..l.outputs {
                    let d = cur[0][j];
                    if d != T::zero() {
                        axpy(d, l.row(j), back);
                    }
                }
                // through the ReLU of layer i - 1
                for (b, a) in back.iter_mut().zip(&ws.acts[i - 1]) {
                    if *a <= T::zero() {
                        *b = T::zero();
                    }
                }
            }
        }
    }
    Ok(loss / T::lit(batch.len() as f64))
}

/// Mean squared error of `model` over `(input, target)` pairs.
pub fn mse<T: Real>(model: &DenseModel<T>, data: &[(&[T], T)]) -> Result<T> {
    if data.is_empty() {
        return Err(Error::config("empty evaluation set"));
    }
    let mut s = T::zero();
    for &(x, t) in data {
        let r = model.forward(x)? - t;
        s += r * r;
    }
    Ok(s / T::lit(data.len() as f64))
}
