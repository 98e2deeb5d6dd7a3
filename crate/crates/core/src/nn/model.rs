use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{dot, Real};
use crate::signal::NormalizationBounds;

/// Hidden widths of the deployed network.
pub const HIDDEN_DIMS: [usize; 3] = [256, 128, 32];

/// Default layer dimensions: 4 x 32 resampled channel points + 3 features,
/// three hidden layers, one output in watts.
pub const DEFAULT_DIMS: [usize; 5] = [131, 256, 128, 32, 1];

/// Input width that reproduces the published 70,337-parameter count.
pub const COMPAT_DIMS: [usize; 5] = [129, 256, 128, 32, 1];

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 {
        return Err(Error::config(format!("need at least 2 layer dims, got {}", dims.len())));
    }
    if dims.contains(&0) {
        return Err(Error::config("layer dims must be positive"));
    }
    Ok(())
}

/// Trainable parameters: weights plus biases of every dense layer.
pub fn param_count(dims: &[usize]) -> Result<usize> {
    check_dims(dims)?;
    Ok(dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum())
}

/// Neurons across all layers, input layer included.
pub fn neuron_count(dims: &[usize]) -> Result<usize> {
    check_dims(dims)?;
    Ok(dims.iter().sum())
}

/// One fully connected layer; `weights` is row-major `(outputs, inputs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<T>,
    pub biases: Vec<T>,
}

impl<T: Real> DenseLayer<T> {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![T::zero(); inputs * outputs],
            biases: vec![T::zero(); outputs],
        }
    }

    pub fn row(&self, j: usize) -> &[T] {
        &self.weights[j * self.inputs..(j + 1) * self.inputs]
    }

    /// `out = W x + b`, optionally followed by ReLU.
    pub fn apply(&self, x: &[T], relu: bool, out: &mut Vec<T>) {
        out.clear();
        out.extend((0..self.outputs).map(|j| {
            let z = dot(self.row(j), x) + self.biases[j];
            if relu && z < T::zero() {
                T::zero()
            } else {
                z
            }
        }));
    }
}

/// Fully connected regression network: ReLU on hidden layers, identity
/// output interpreted in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseModel<T> {
    dims: Vec<usize>,
    layers: Vec<DenseLayer<T>>,
    bounds: NormalizationBounds,
}

impl<T: Real> DenseModel<T> {
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            layers: dims.windows(2).map(|w| DenseLayer::zeros(w[0], w[1])).collect(),
            bounds: NormalizationBounds::default(),
        })
    }

    /// He-uniform weights (`U(-sqrt(6/fan_in), sqrt(6/fan_in))`), zero biases.
    pub fn he_uniform<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        let mut m = Self::zeros(dims)?;
        for layer in &mut m.layers {
            let limit = (6.0 / layer.inputs as f64).sqrt();
            for w in &mut layer.weights {
                *w = T::lit(rng.gen_range(-limit..limit));
            }
        }
        Ok(m)
    }

    /// Assembles a model from explicit layers; shapes must chain.
    pub fn from_layers(layers: Vec<DenseLayer<T>>, bounds: NormalizationBounds) -> Result<Self> {
        let mut dims = Vec::with_capacity(layers.len() + 1);
        for (i, l) in layers.iter().enumerate() {
            if l.weights.len() != l.inputs * l.outputs {
                return Err(Error::Shape {
                    expected: l.inputs * l.outputs,
                    actual: l.weights.len(),
                });
            }
            if l.biases.len() != l.outputs {
                return Err(Error::Shape {
                    expected: l.outputs,
                    actual: l.biases.len(),
                });
            }
            if i == 0 {
                dims.push(l.inputs);
            } else if dims[i] != l.inputs {
                return Err(Error::Shape {
                    expected: dims[i],
                    actual: l.inputs,
                });
            }
            dims.push(l.outputs);
        }
        check_dims(&dims)?;
        Ok(Self { dims, layers, bounds })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn layers(&self) -> &[DenseLayer<T>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [DenseLayer<T>] {
        &mut self.layers
    }

    pub fn bounds(&self) -> &NormalizationBounds {
        &self.bounds
    }

    pub fn set_bounds(&mut self, bounds: NormalizationBounds) {
        self.bounds = bounds;
    }

    pub fn with_bounds(mut self, bounds: NormalizationBounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    fn check_input(&self, input: &[T]) -> Result<()> {
        if input.len() != self.dims[0] {
            return Err(Error::Shape {
                expected: self.dims[0],
                actual: input.len(),
            });
        }
        Ok(())
    }

    /// Full-precision forward pass; returns the output in watts.
    pub fn forward(&self, input: &[T]) -> Result<T> {
        self.check_input(input)?;
        let mut a = input.to_vec();
        let mut b = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.apply(&a, i < last, &mut b);
            std::mem::swap(&mut a, &mut b);
        }
        Ok(a[0])
    }

    /// Outputs of every layer (post-activation), input excluded.
    pub fn activations(&self, input: &[T]) -> Result<Vec<Vec<T>>> {
        self.check_input(input)?;
        let last = self.layers.len() - 1;
        let mut outs: Vec<Vec<T>> = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut o = Vec::new();
            layer.apply(outs.last().map_or(input, |v| v.as_slice()), i < last, &mut o);
            outs.push(o);
        }
        Ok(outs)
    }

    pub fn cast<U: Real>(&self) -> DenseModel<U> {
        let conv = |v: &[T]| v.iter().map(|x| U::lit(x.as_f64())).collect::<Vec<U>>();
        DenseModel {
            dims: self.dims.clone(),
            layers: self
                .layers
                .iter()
                .map(|l| DenseLayer {
                    inputs: l.inputs,
                    outputs: l.outputs,
                    weights: conv(&l.weights),
                    biases: conv(&l.biases),
                })
                .collect(),
            bounds: self.bounds,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counts() {
        assert_eq!(param_count(&COMPAT_DIMS).unwrap(), 70_337);
        assert_eq!(neuron_count(&COMPAT_DIMS).unwrap(), 546);
        assert_eq!(param_count(&[1, 1]).unwrap(), 2);
        // 131*256+256 + 256*128+128 + 128*32+32 + 32+1
        assert_eq!(param_count(&DEFAULT_DIMS).unwrap(), 33_792 + 32_896 + 4_128 + 33);
        assert_eq!(param_count(&DEFAULT_DIMS).unwrap(), 70_849);
        assert!(matches!(param_count(&[5]), Err(Error::Config(_))));
        assert!(param_count(&[3, 0, 1]).is_err());
    }

    #[test]
    fn bias_passthrough() {
        let mut m = DenseModel::<f32>::zeros(&DEFAULT_DIMS).unwrap();
        m.layers_mut().last_mut().unwrap().biases[0] = 150.0;
        assert_eq!(m.forward(&[0.3; 131]).unwrap(), 150.0);
        assert_eq!(m.forward(&[0.9; 131]).unwrap(), 150.0);
    }

    #[test]
    fn one_by_one() {
        let l = DenseLayer {
            inputs: 1,
            outputs: 1,
            weights: vec![2.0f64],
            biases: vec![1.0],
        };
        let m = DenseModel::from_layers(vec![l], NormalizationBounds::default()).unwrap();
        assert_eq!(m.forward(&[3.0]).unwrap(), 7.0);
    }

    #[test]
    fn shape_mismatch() {
        let m = DenseModel::<f32>::zeros(&[4, 3, 1]).unwrap();
        assert!(matches!(m.forward(&[1.0; 5]), Err(Error::Shape { expected: 4, actual: 5 })));
        let bad = vec![DenseLayer::<f32>::zeros(4, 3), DenseLayer::zeros(2, 1)];
        assert!(DenseModel::from_layers(bad, NormalizationBounds::default()).is_err());
    }

    #[test]
    fn he_uniform_within_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = DenseModel::<f32>::he_uniform(&DEFAULT_DIMS, &mut rng).unwrap();
        for l in m.layers() {
            let lim = (6.0 / l.inputs as f64).sqrt() as f32;
            assert!(l.weights.iter().all(|w| w.abs() <= lim));
            assert!(l.biases.iter().all(|b| *b == 0.0));
        }
        assert_eq!(m.param_count(), 70_849);
    }
}
