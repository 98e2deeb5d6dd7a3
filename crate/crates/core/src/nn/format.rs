//! Binary model file.
//!
//! ```text
//! "PWM1"                      magic
//! u16   version               (1)
//! u8    dtype                 0 = f32, 1 = int8-affine
//! u8    layer count L
//! u32 x (L + 1)               layer dims
//! (f32 lo, f32 hi) x 7        normalization bounds: force, accel_x, accel_z,
//!                             gyro_y, cadence, amplitude, offset
//! per layer, in order:
//!   f32:   weights f32 x (out*in) row-major, biases f32 x out
//!   int8:  weight scale f32, input scale f32, input zero-point u8,
//!          weights i8 x (out*in) row-major, biases i32 x out
//! int8 only: output scale f32, output zero-point u8
//! u32   CRC32 of all preceding bytes
//! ```
//! All multi-byte values little-endian.

use std::fs;
use std::path::Path;

use crate::error::{Error, FormatError, Result};
use crate::scalar::Real;
use crate::signal::{Bounds, NormalizationBounds};

use super::model::{DenseLayer, DenseModel};
use super::quant::{ActivationQuant, QuantLayer, QuantizedModel};

pub const MAGIC: [u8; 4] = *b"PWM1";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum DType {
    F32 = 0,
    Int8Affine = 1,
}

/// Either kind of model read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFile {
    Float(DenseModel<f32>),
    Quantized(QuantizedModel),
}

impl ModelFile {
    pub fn dtype(&self) -> DType {
        match self {
            ModelFile::Float(_) => DType::F32,
            ModelFile::Quantized(_) => DType::Int8Affine,
        }
    }

    pub fn dims(&self) -> &[usize] {
        match self {
            ModelFile::Float(m) => m.dims(),
            ModelFile::Quantized(m) => m.dims(),
        }
    }

    pub fn bounds(&self) -> &NormalizationBounds {
        match self {
            ModelFile::Float(m) => m.bounds(),
            ModelFile::Quantized(m) => m.bounds(),
        }
    }
}

fn header(out: &mut Vec<u8>, dtype: DType, dims: &[usize], bounds: &NormalizationBounds) {
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(dtype as u8);
    out.push((dims.len() - 1) as u8);
    for &d in dims {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for b in bounds.to_array() {
        out.extend_from_slice(&(b.lo as f32).to_le_bytes());
        out.extend_from_slice(&(b.hi as f32).to_le_bytes());
    }
}

fn seal(mut out: Vec<u8>) -> Vec<u8> {
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// Serializes a float model. Weights are written as f32 whatever `T` is.
pub fn serialize_dense<T: Real>(model: &DenseModel<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + 4 * model.param_count());
    header(&mut out, DType::F32, model.dims(), model.bounds());
    for l in model.layers() {
        for w in l.weights.iter().chain(&l.biases) {
            out.extend_from_slice(&w.as_f32().to_le_bytes());
        }
    }
    seal(out)
}

pub fn serialize_quantized(model: &QuantizedModel) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + model.param_count() + 3 * model.dims().iter().sum::<usize>());
    header(&mut out, DType::Int8Affine, model.dims(), model.bounds());
    for l in model.layers() {
        out.extend_from_slice(&l.weight_scale.to_le_bytes());
        out.extend_from_slice(&l.input.scale.to_le_bytes());
        out.push(l.input.zero_point);
        out.extend(l.weights.iter().map(|&w| w as u8));
        for b in &l.biases {
            out.extend_from_slice(&b.to_le_bytes());
        }
    }
    out.extend_from_slice(&model.output().scale.to_le_bytes());
    out.push(model.output().zero_point);
    seal(out)
}

pub fn serialize_model(model: &ModelFile) -> Vec<u8> {
    match model {
        ModelFile::Float(m) => serialize_dense(m),
        ModelFile::Quantized(m) => serialize_quantized(m),
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        if self.buf.len() - self.pos < n {
            return Err(FormatError::Truncated {
                offset: self.pos,
                needed: n - (self.buf.len() - self.pos),
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], FormatError> {
        Ok(self.take(N)?.try_into().unwrap())
    }

    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn i32(&mut self) -> Result<i32, FormatError> {
        Ok(i32::from_le_bytes(self.array()?))
    }

    fn f32(&mut self) -> Result<f32, FormatError> {
        Ok(f32::from_le_bytes(self.array()?))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f32>, FormatError> {
        let raw = self.take(n.checked_mul(4).ok_or(FormatError::Header("tensor too large".into()))?)?;
        Ok(raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

/// Parses either model kind, checking magic, version, structure and CRC.
pub fn deserialize_model(bytes: &[u8]) -> Result<ModelFile> {
    let mut c = Cursor { buf: bytes, pos: 0 };
    let magic: [u8; 4] = c.array()?;
    if magic != MAGIC {
        return Err(FormatError::BadMagic(magic).into());
    }
    let version = c.u16()?;
    if version != VERSION {
        return Err(FormatError::Version(version).into());
    }
    let dtype = match c.u8()? {
        0 => DType::F32,
        1 => DType::Int8Affine,
        t => return Err(FormatError::DType(t).into()),
    };
    let n_layers = c.u8()? as usize;
    if n_layers == 0 {
        return Err(FormatError::Header("zero layers".into()).into());
    }
    let mut dims = Vec::with_capacity(n_layers + 1);
    for _ in 0..=n_layers {
        let d = c.u32()? as usize;
        if d == 0 {
            return Err(FormatError::Header("zero-width layer".into()).into());
        }
        dims.push(d);
    }
    let mut b = [Bounds::new(0.0, 1.0); 7];
    for slot in &mut b {
        let lo = c.f32()? as f64;
        let hi = c.f32()? as f64;
        *slot = Bounds::new(lo, hi);
    }
    let bounds = NormalizationBounds::from_array(b);

    let model = match dtype {
        DType::F32 => {
            let mut layers = Vec::with_capacity(n_layers);
            for w in dims.windows(2) {
                let weights = c.f32s(w[0] * w[1])?;
                let biases = c.f32s(w[1])?;
                layers.push(DenseLayer {
                    inputs: w[0],
                    outputs: w[1],
                    weights,
                    biases,
                });
            }
            finish(&mut c)?;
            ModelFile::Float(DenseModel::from_layers(layers, bounds)?)
        }
        DType::Int8Affine => {
            let mut layers = Vec::with_capacity(n_layers);
            for w in dims.windows(2) {
                let weight_scale = c.f32()?;
                let scale = c.f32()?;
                let zero_point = c.u8()?;
                let weights = c.take(w[0] * w[1])?.iter().map(|&v| v as i8).collect();
                let mut biases = Vec::with_capacity(w[1]);
                for _ in 0..w[1] {
                    biases.push(c.i32()?);
                }
                layers.push(QuantLayer {
                    inputs: w[0],
                    outputs: w[1],
                    weights,
                    weight_scale,
                    input: ActivationQuant { scale, zero_point },
                    biases,
                });
            }
            let output = ActivationQuant {
                scale: c.f32()?,
                zero_point: c.u8()?,
            };
            finish(&mut c)?;
            ModelFile::Quantized(QuantizedModel::from_parts(layers, output, bounds)?)
        }
    };
    Ok(model)
}

fn finish(c: &mut Cursor<'_>) -> Result<(), FormatError> {
    let body_end = c.pos;
    let stored = c.u32()?;
    let computed = crc32fast::hash(&c.buf[..body_end]);
    if stored != computed {
        return Err(FormatError::Checksum { stored, computed });
    }
    if c.pos != c.buf.len() {
        return Err(FormatError::Trailing(c.buf.len() - c.pos));
    }
    Ok(())
}

pub fn save_model(path: &Path, model: &ModelFile) -> Result<()> {
    fs::write(path, serialize_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    deserialize_model(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::model::{COMPAT_DIMS, DEFAULT_DIMS};
    use crate::nn::quant::quantize_model;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_model(dims: &[usize], seed: u64) -> DenseModel<f32> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DenseModel::he_uniform(dims, &mut rng).unwrap();
        for l in m.layers_mut() {
            for b in &mut l.biases {
                *b = rng.gen_range(-1.0..1.0);
            }
        }
        m
    }

    fn calib(dim: usize, n: usize, seed: u64) -> Vec<Vec<f32>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect()).collect()
    }

    #[test]
    fn float_round_trip_is_bit_exact() {
        let m = random_model(&[7, 5, 3, 1], 1);
        let bytes = serialize_dense(&m);
        assert_eq!(&bytes[..4], b"PWM1");
        assert_eq!(deserialize_model(&bytes).unwrap(), ModelFile::Float(m));
    }

    #[test]
    fn quantized_round_trip_is_bit_exact() {
        let m = random_model(&[7, 5, 3, 1], 2);
        let q = quantize_model(&m, &calib(7, 20, 3)).unwrap();
        let bytes = serialize_quantized(&q);
        assert_eq!(deserialize_model(&bytes).unwrap(), ModelFile::Quantized(q));
    }

    #[test]
    fn distinct_parse_errors() {
        let m = random_model(&[4, 3, 1], 4);
        let good = serialize_dense(&m);

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(deserialize_model(&bad), Err(Error::Format(FormatError::BadMagic(_)))));

        assert!(matches!(
            deserialize_model(&good[..good.len() - 6]),
            Err(Error::Format(FormatError::Truncated { .. }))
        ));
        assert!(matches!(deserialize_model(&good[..2]), Err(Error::Format(FormatError::Truncated { .. }))));

        let mut flipped = good.clone();
        let mid = good.len() / 2;
        flipped[mid] ^= 0x40;
        assert!(matches!(deserialize_model(&flipped), Err(Error::Format(FormatError::Checksum { .. }))));

        let mut long = good.clone();
        long.push(0);
        assert!(matches!(deserialize_model(&long), Err(Error::Format(FormatError::Trailing(1)))));
    }

    #[test]
    fn header_layout() {
        let m = DenseModel::<f32>::zeros(&DEFAULT_DIMS).unwrap();
        let bytes = serialize_dense(&m);
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
        assert_eq!(bytes[6], 0);
        assert_eq!(bytes[7], 4);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 131);
        // header 8 + dims 20 + bounds 56, params, crc 4
        assert_eq!(bytes.len(), 8 + 20 + 56 + 4 * 70_849 + 4);
    }

    #[test]
    fn reference_sized_footprints() {
        let m = random_model(&COMPAT_DIMS, 5);
        let f = serialize_dense(&m).len();
        let q = serialize_quantized(&quantize_model(&m, &calib(129, 8, 6)).unwrap()).len();
        assert!((f as f64 / 270_500.0 - 1.0).abs() <= 0.10, "{f}");
        assert!((q as f64 / 71_900.0 - 1.0).abs() <= 0.10, "{q}");
        assert!(f as f64 / q as f64 >= 3.5);
        assert!((q as f64) <= 0.30 * f as f64);
    }
}
