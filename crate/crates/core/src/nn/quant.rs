//! Post-training 8-bit quantization and the integer forward pass.
//!
//! Weights are per-tensor symmetric int8 (`scale = max|w| / 127`, zero-point
//! 0). Activations entering each layer are per-tensor asymmetric uint8 with
//! ranges taken from a calibration set. Biases are int32 at `s_w * s_x`.
//! Each layer accumulates `sum w_q * (x_q - zp)` + bias in int32, then
//! requantizes into the next layer's uint8 domain by multiplying with the
//! real multiplier `s_w * s_x / s_next` (in f64) and rounding half away from
//! zero. ReLU is fused as a lower clamp at the next zero-point.

use crate::error::{Error, Result};
use crate::scalar::{round_half_away, Real};
use crate::signal::NormalizationBounds;

use super::model::DenseModel;

/// Affine map `real = scale * (q - zero_point)` for uint8 activations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationQuant {
    pub scale: f32,
    pub zero_point: u8,
}

impl ActivationQuant {
    /// Range widened to include 0. Degenerate (empty) ranges map to scale 1,
    /// zero-point 0.
    pub fn from_range(min: f64, max: f64) -> Self {
        let lo = min.min(0.0);
        let hi = max.max(0.0);
        let span = hi - lo;
        if !(span > 0.0) || !span.is_finite() {
            return Self {
                scale: 1.0,
                zero_point: 0,
            };
        }
        let scale = (span / 255.0) as f32;
        let zp = round_half_away(-lo / scale as f64).clamp(0.0, 255.0) as u8;
        Self { scale, zero_point: zp }
    }

    pub fn quantize(&self, x: f64) -> u8 {
        (round_half_away(x / self.scale as f64) + self.zero_point as f64).clamp(0.0, 255.0) as u8
    }

    pub fn dequantize(&self, q: u8) -> f32 {
        ((q as i32 - self.zero_point as i32) as f64 * self.scale as f64) as f32
    }
}

/// Symmetric int8 quantization of one tensor. Returns `(values, scale)`.
pub fn quantize_weights<T: Real>(w: &[T]) -> (Vec<i8>, f32) {
    let max_abs = w.iter().fold(0.0f64, |m, x| m.max(x.as_f64().abs()));
    if !(max_abs > 0.0) {
        return (vec![0; w.len()], 1.0);
    }
    let q = w
        .iter()
        .map(|x| round_half_away(x.as_f64() / max_abs * 127.0).clamp(-127.0, 127.0) as i8)
        .collect();
    (q, (max_abs / 127.0) as f32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantLayer {
    pub inputs: usize,
    pub outputs: usize,
    /// Row-major `(outputs, inputs)`, each in `[-127, 127]`.
    pub weights: Vec<i8>,
    pub weight_scale: f32,
    /// Domain of this layer's input activations.
    pub input: ActivationQuant,
    /// At scale `weight_scale * input.scale`.
    pub biases: Vec<i32>,
}

impl QuantLayer {
    pub fn row(&self, j: usize) -> &[i8] {
        &self.weights[j * self.inputs..(j + 1) * self.inputs]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedModel {
    dims: Vec<usize>,
    layers: Vec<QuantLayer>,
    output: ActivationQuant,
    bounds: NormalizationBounds,
    /// Per-layer requantization multipliers, derived from the scales.
    multipliers: Vec<f64>,
}

/// `s_w * s_x / s_next`, evaluated in f64 from the stored f32 scales.
pub fn requant_multiplier(weight_scale: f32, input_scale: f32, next_scale: f32) -> f64 {
    (weight_scale as f64 * input_scale as f64) / next_scale as f64
}

/// Integer accumulator to the next uint8 domain.
#[inline]
pub fn requantize(acc: i32, multiplier: f64, zero_point: u8, relu: bool) -> u8 {
    let lo = if relu { zero_point as i64 } else { 0 };
    let v = round_half_away(acc as f64 * multiplier) as i64 + zero_point as i64;
    v.clamp(lo, 255) as u8
}

impl QuantizedModel {
    pub fn from_parts(layers: Vec<QuantLayer>, output: ActivationQuant, bounds: NormalizationBounds) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::config("quantized model needs at least one layer"));
        }
        let mut dims = vec![layers[0].inputs];
        for l in &layers {
            if l.inputs != *dims.last().unwrap() {
                return Err(Error::Shape {
                    expected: *dims.last().unwrap(),
                    actual: l.inputs,
                });
            }
            if l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(Error::Shape {
                    expected: l.inputs * l.outputs,
                    actual: l.weights.len(),
                });
            }
            if l.weights.contains(&i8::MIN) {
                return Err(Error::config("int8 weights must lie in [-127, 127]"));
            }
            dims.push(l.outputs);
        }
        let multipliers = (0..layers.len())
            .map(|i| {
                let next = layers.get(i + 1).map_or(output.scale, |n| n.input.scale);
                requant_multiplier(layers[i].weight_scale, layers[i].input.scale, next)
            })
            .collect();
        Ok(Self {
            dims,
            layers,
            output,
            bounds,
            multipliers,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn layers(&self) -> &[QuantLayer] {
        &self.layers
    }

    pub fn output(&self) -> ActivationQuant {
        self.output
    }

    pub fn bounds(&self) -> &NormalizationBounds {
        &self.bounds
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    /// Maps a real-valued input onto layer 0's uint8 domain.
    pub fn quantize_input<T: Real>(&self, input: &[T]) -> Result<Vec<u8>> {
        if input.len() != self.dims[0] {
            return Err(Error::Shape {
                expected: self.dims[0],
                actual: input.len(),
            });
        }
        let q = self.layers[0].input;
        Ok(input.iter().map(|x| q.quantize(x.as_f64())).collect())
    }

    /// Integer-only pass from quantized input to the quantized output code.
    pub fn forward_quantized(&self, x: &[u8]) -> Result<u8> {
        if x.len() != self.dims[0] {
            return Err(Error::Shape {
                expected: self.dims[0],
                actual: x.len(),
            });
        }
        let mut a: Vec<u8> = x.to_vec();
        let mut centered: Vec<i32> = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let zp = layer.input.zero_point as i32;
            centered.clear();
            centered.extend(a.iter().map(|&q| q as i32 - zp));
            let (next_zp, relu) = match self.layers.get(i + 1) {
                Some(n) => (n.input.zero_point, true),
                None => (self.output.zero_point, false),
            };
            debug_assert_eq!(relu, i < last);
            let m = self.multipliers[i];
            a = (0..layer.outputs)
                .map(|j| {
                    let acc = layer
                        .row(j)
                        .iter()
                        .zip(&centered)
                        .fold(layer.biases[j], |s, (&w, &c)| s.wrapping_add(w as i32 * c));
                    requantize(acc, m, next_zp, relu)
                })
                .collect();
        }
        Ok(a[0])
    }

    pub fn dequantize_output(&self, q: u8) -> f32 {
        self.output.dequantize(q)
    }

    /// Quantize input, integer layers, dequantize to watts.
    pub fn forward<T: Real>(&self, input: &[T]) -> Result<f32> {
        let x = self.quantize_input(input)?;
        Ok(self.dequantize_output(self.forward_quantized(&x)?))
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }
}

/// Per-tensor post-training quantization calibrated by min/max over a full
/// float forward pass of every calibration input, followed by a correction of
/// the output bias for the mean int8 vs float error on the same inputs.
pub fn quantize_model<T: Real, I: AsRef<[T]>>(model: &DenseModel<T>, calibration: &[I]) -> Result<QuantizedModel> {
    if calibration.is_empty() {
        return Err(Error::Calibration("calibration set is empty".into()));
    }
    let n_layers = model.layers().len();
    // ranges[0] is the network input, ranges[i + 1] the output of layer i.
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); n_layers + 1];
    let widen = |r: &mut (f64, f64), v: &[T]| {
        for x in v {
            let x = x.as_f64();
            r.0 = r.0.min(x);
            r.1 = r.1.max(x);
        }
    };
    for sample in calibration {
        let x = sample.as_ref();
        widen(&mut ranges[0], x);
        for (i, act) in model.activations(x)?.iter().enumerate() {
            widen(&mut ranges[i + 1], act);
        }
    }
    if ranges.iter().any(|(lo, hi)| !lo.is_finite() || !hi.is_finite()) {
        return Err(Error::Calibration("non-finite activation during calibration".into()));
    }

    let mut layers = Vec::with_capacity(n_layers);
    for (i, l) in model.layers().iter().enumerate() {
        let input = ActivationQuant::from_range(ranges[i].0, ranges[i].1);
        let (weights, weight_scale) = quantize_weights(&l.weights);
        let bias_scale = weight_scale as f64 * input.scale as f64;
        let biases = l
            .biases
            .iter()
            .map(|b| round_half_away(b.as_f64() / bias_scale).clamp(i32::MIN as f64, i32::MAX as f64) as i32)
            .collect();
        layers.push(QuantLayer {
            inputs: l.inputs,
            outputs: l.outputs,
            weights,
            weight_scale,
            input,
            biases,
        });
    }
    let output = ActivationQuant::from_range(ranges[n_layers].0, ranges[n_layers].1);
    let bounds = *model.bounds();
    let draft = QuantizedModel::from_parts(layers.clone(), output, bounds)?;

    // Weight rounding shifts the output by a near-constant amount. Measure the
    // mean shift over the calibration set and cancel it in the last bias.
    let mut shift = 0.0;
    for sample in calibration {
        let x = sample.as_ref();
        shift += draft.forward(x)? as f64 - model.forward(x)?.as_f64();
    }
    shift /= calibration.len() as f64;
    let last = layers.last_mut().expect("at least one layer");
    let step = round_half_away(shift / (last.weight_scale as f64 * last.input.scale as f64));
    for b in &mut last.biases {
        *b = (*b as f64 - step).clamp(i32::MIN as f64, i32::MAX as f64) as i32;
    }
    QuantizedModel::from_parts(layers, output, bounds)
}
