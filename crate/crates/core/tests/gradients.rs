use pedalpower::nn::{DenseLayer, DenseModel};
use pedalpower::signal::NormalizationBounds;
use pedalpower::train::{backprop_gradients, mse};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_net(rng: &mut ChaCha8Rng) -> DenseModel<f64> {
    let depth = rng.gen_range(1..=3);
    let mut dims = vec![rng.gen_range(2..=6)];
    for _ in 0..depth {
        dims.push(rng.gen_range(2..=7));
    }
    dims.push(1);
    let layers = dims
        .windows(2)
        .map(|w| DenseLayer {
            inputs: w[0],
            outputs: w[1],
            weights: (0..w[0] * w[1]).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            biases: (0..w[1]).map(|_| rng.gen_range(-0.5..0.5)).collect(),
        })
        .collect();
    DenseModel::from_layers(layers, NormalizationBounds::default()).unwrap()
}

fn param_mut(model: &mut DenseModel<f64>, mut k: usize) -> &mut f64 {
    for l in model.layers_mut() {
        if k < l.weights.len() {
            return &mut l.weights[k];
        }
        k -= l.weights.len();
        if k < l.biases.len() {
            return &mut l.biases[k];
        }
        k -= l.biases.len();
    }
    panic!("parameter index out of range");
}

// Central differences of the batch MSE, compared parameter by parameter.
#[test]
fn backprop_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h = 1e-4;
    let mut checked = 0;
    let mut nets = 0;
    while nets < 24 {
        let model = random_net(&mut rng);
        let n_in = model.input_dim();
        let xs: Vec<Vec<f64>> = (0..6).map(|_| (0..n_in).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let ys: Vec<f64> = (0..6).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let batch: Vec<(&[f64], f64)> = xs.iter().map(|x| x.as_slice()).zip(ys.iter().copied()).collect();

        // A pre-activation within h of zero makes the loss non-differentiable
        // inside the stencil; such nets are skipped.
        let near_kink = xs.iter().any(|x| {
            let mut a = x.clone();
            let mut out = Vec::new();
            model.layers().iter().enumerate().any(|(i, l)| {
                l.apply(&a, false, &mut out);
                let kink = i + 1 < model.layers().len() && out.iter().any(|z| z.abs() < 1e-3);
                a = out.iter().map(|z| z.max(0.0)).collect();
                kink
            })
        });
        if near_kink {
            continue;
        }

        let (_, grads) = backprop_gradients(&model, &batch).unwrap();
        let analytic = grads.flat();
        for (k, g) in analytic.iter().enumerate() {
            let mut plus = model.clone();
            *param_mut(&mut plus, k) += h;
            let mut minus = model.clone();
            *param_mut(&mut minus, k) -= h;
            let fd = (mse(&plus, &batch).unwrap() - mse(&minus, &batch).unwrap()) / (2.0 * h);
            let rel = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-6);
            assert!(rel <= 1e-4, "net {nets} param {k}: backprop {g} vs fd {fd} (rel {rel:e})");
            checked += 1;
        }
        nets += 1;
    }
    assert!(checked > 500);
}

#[test]
fn loss_is_the_mean_of_squared_errors() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let model = random_net(&mut rng);
    let xs: Vec<Vec<f64>> = (0..5).map(|_| (0..model.input_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let ys = [0.5, -1.0, 2.0, 0.0, 1.5];
    let batch: Vec<(&[f64], f64)> = xs.iter().map(|x| x.as_slice()).zip(ys).collect();
    let expected = batch.iter().map(|(x, y)| (model.forward(x).unwrap() - y).powi(2)).sum::<f64>() / 5.0;
    let (loss, _) = backprop_gradients(&model, &batch).unwrap();
    assert!((loss - expected).abs() < 1e-12);
    assert!((mse(&model, &batch).unwrap() - expected).abs() < 1e-12);
}
