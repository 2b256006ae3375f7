//! A frozen, randomly initialized LSTM encoder-decoder used purely as a
//! reconstruction function. No training happens anywhere in this crate.

use ndarray::{Array1, Array2, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default hidden state width.
pub const DEFAULT_HIDDEN_SIZE: usize = 64;

/// Default weight standard deviation: variance 0.02, i.e. N(0, 0.02).
pub fn default_weight_sigma() -> f64 {
    0.02_f64.sqrt()
}

/// Configuration of the untrained model: one encoder LSTM layer, one decoder
/// LSTM layer, and a linear read-out. All weights are drawn i.i.d. from
/// N(0, sigma^2); all biases are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomModelConfig {
    pub hidden_size: usize,
    /// Standard deviation (not variance) of the weight distribution.
    pub weight_sigma: f64,
    pub seed: u64,
}

impl RandomModelConfig {
    pub fn new(hidden_size: usize, weight_sigma: f64, seed: u64) -> Result<Self> {
        if hidden_size == 0 {
            return Err(Error::invalid_param("hidden_size", "must be positive"));
        }
        if weight_sigma <= 0.0 || !weight_sigma.is_finite() {
            return Err(Error::invalid_param(
                "weight_sigma",
                "must be positive and finite",
            ));
        }
        Ok(Self {
            hidden_size,
            weight_sigma,
            seed,
        })
    }

    /// Default architecture: hidden size [`DEFAULT_HIDDEN_SIZE`], weight
    /// scale [`default_weight_sigma`].
    pub fn default_with_seed(seed: u64) -> Self {
        Self {
            hidden_size: DEFAULT_HIDDEN_SIZE,
            weight_sigma: default_weight_sigma(),
            seed,
        }
    }
}

/// Frozen weights of the encoder-decoder. Gate rows in every `w_ih`/`w_hh`
/// are stacked in the order input, forget, candidate, output.
pub struct RandomEncoderDecoder {
    hidden: usize,
    enc_w_ih: Array2<f64>, // [4H x N]
    enc_w_hh: Array2<f64>, // [4H x H]
    dec_w_ih: Array2<f64>, // [4H x N]
    dec_w_hh: Array2<f64>, // [4H x H]
    readout: Array2<f64>,  // [N x H]
}

impl RandomEncoderDecoder {
    /// Draw all weights once, in a fixed documented order (encoder
    /// input-to-hidden, encoder hidden-to-hidden, decoder input-to-hidden,
    /// decoder hidden-to-hidden, read-out; each row-major), so the model is a
    /// pure function of `(config, input_width)`.
    pub fn init(config: &RandomModelConfig, input_width: usize) -> Result<Self> {
        if input_width == 0 {
            return Err(Error::invalid_param("input_width", "must be positive"));
        }
        let h = config.hidden_size;
        let dist = Normal::new(0.0, config.weight_sigma)
            .map_err(|e| Error::invalid_param("weight_sigma", e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut draw = |rows: usize, cols: usize| {
            Array2::from_shape_simple_fn((rows, cols), || dist.sample(&mut rng))
        };
        Ok(Self {
            hidden: h,
            enc_w_ih: draw(4 * h, input_width),
            enc_w_hh: draw(4 * h, h),
            dec_w_ih: draw(4 * h, input_width),
            dec_w_hh: draw(4 * h, h),
            readout: draw(input_width, h),
        })
    }

    /// Encode a window, then autoregressively decode `tau` steps from the
    /// encoder's final state (first decoder input is the zero vector, then
    /// each previous read-out), producing the reconstruction in forward
    /// order.
    pub fn reconstruct(&self, window: ArrayView2<'_, f64>) -> Array2<f64> {
        let tau = window.nrows();
        let width = window.ncols();
        let mut h = Array1::zeros(self.hidden);
        let mut c = Array1::zeros(self.hidden);
        for row in window.outer_iter() {
            lstm_step(
                &self.enc_w_ih,
                &self.enc_w_hh,
                &row.to_owned(),
                &mut h,
                &mut c,
            );
        }
        let mut output = Array2::zeros((tau, width));
        let mut previous = Array1::zeros(width);
        for t in 0..tau {
            lstm_step(&self.dec_w_ih, &self.dec_w_hh, &previous, &mut h, &mut c);
            previous = self.readout.dot(&h);
            output.row_mut(t).assign(&previous);
        }
        output
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// One LSTM cell update with zero biases. `gates` rows are ordered
/// input / forget / candidate / output.
fn lstm_step(
    w_ih: &Array2<f64>,
    w_hh: &Array2<f64>,
    x: &Array1<f64>,
    h: &mut Array1<f64>,
    c: &mut Array1<f64>,
) {
    let hidden = h.len();
    let gates = w_ih.dot(x) + w_hh.dot(h as &Array1<f64>);
    for j in 0..hidden {
        let i_gate = sigmoid(gates[j]);
        let f_gate = sigmoid(gates[hidden + j]);
        let g_cand = gates[2 * hidden + j].tanh();
        let o_gate = sigmoid(gates[3 * hidden + j]);
        c[j] = f_gate * c[j] + i_gate * g_cand;
        h[j] = o_gate * c[j].tanh();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn same_seed_same_reconstruction() {
        let config = RandomModelConfig::new(8, 0.2, 99).unwrap();
        let window = array![[0.1, 0.4], [0.2, 0.3], [0.9, 0.0]];
        let a = RandomEncoderDecoder::init(&config, 2)
            .unwrap()
            .reconstruct(window.view());
        let b = RandomEncoderDecoder::init(&config, 2)
            .unwrap()
            .reconstruct(window.view());
        assert_eq!(a, b);
    }

    #[test]
    fn different_seed_different_reconstruction() {
        let window = array![[0.1], [0.7]];
        let a = RandomEncoderDecoder::init(&RandomModelConfig::new(8, 0.2, 1).unwrap(), 1)
            .unwrap()
            .reconstruct(window.view());
        let b = RandomEncoderDecoder::init(&RandomModelConfig::new(8, 0.2, 2).unwrap(), 1)
            .unwrap()
            .reconstruct(window.view());
        assert_ne!(a, b);
    }

    #[test]
    fn vanishing_sigma_reconstructs_near_zero() {
        let config = RandomModelConfig::new(16, 1e-9, 5).unwrap();
        let window = array![[0.5, -0.5], [1.0, 2.0], [0.0, 0.3], [0.2, 0.1]];
        let rec = RandomEncoderDecoder::init(&config, 2)
            .unwrap()
            .reconstruct(window.view());
        assert!(
            rec.iter().all(|&v| v.abs() < 1e-8),
            "read-out shrinks with sigma"
        );
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(RandomModelConfig::new(0, 0.1, 1).is_err());
        assert!(RandomModelConfig::new(8, 0.0, 1).is_err());
        assert!(RandomModelConfig::new(8, -0.5, 1).is_err());
        assert!(RandomModelConfig::new(8, f64::NAN, 1).is_err());
    }
}
