//! The dense power-estimation network: float forward pass, post-training
//! int8 quantization with an integer forward pass, and the model file format.

mod format;
mod model;
mod quant;

pub use format::{
    deserialize_model, load_model, save_model, serialize_dense, serialize_model, serialize_quantized, DType, ModelFile,
    MAGIC, VERSION,
};
pub use model::{neuron_count, param_count, DenseLayer, DenseModel, COMPAT_DIMS, DEFAULT_DIMS, HIDDEN_DIMS};
pub use quant::{
    quantize_model, quantize_weights, requant_multiplier, requantize, ActivationQuant, QuantLayer, QuantizedModel,
};
