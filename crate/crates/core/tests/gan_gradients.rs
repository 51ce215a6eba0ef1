mod common;

use qgan_core::data::{chunk_patches, ImageDataset};
use qgan_core::gan::{
    bce_critic, bce_losses, generate, generate_with_cache, generator_backward, generator_step_gradient,
    train_epoch, wgan_gp_critic, wgan_gp_losses, Discriminator, Generator, GeneratorConfig, LatentNoise, LossKind,
    PatchGanConfig, PatchGanGenerator, PatchGenerator, TrainConfig, TrainState, LEAKY_SLOPE,
};
use qgan_core::linalg::Matrix;
use qgan_core::params::{zeros_like, ParamSet};
use qgan_core::qlstm::HiddenMode;
use qgan_core::rng::substream;

use common::{assert_rel_close, param_diff, rand_vec, rng};

fn small_config(mode: HiddenMode) -> GeneratorConfig {
    GeneratorConfig {
        n_qubits: 2,
        reps: 2,
        layers: 2,
        hidden_mode: mode,
        steps: 2,
        patch_dim: 4,
    }
}

fn weighted_image(g: &Generator, z: &LatentNoise, w: &[f64]) -> f64 {
    generate(g, z).unwrap().iter().zip(w).map(|(a, b)| a * b).sum()
}

#[test]
fn generator_end_to_end_gradient_matches_finite_differences() {
    let mut r = rng(31);
    for mode in [HiddenMode::Probabilities, HiddenMode::PauliZ] {
        let g = Generator::init(small_config(mode), &mut substream(1, "init", 0)).unwrap();
        let z = g.sample_noise(&mut substream(1, "noise", 0));
        let w = rand_vec(&mut r, 8, -1.0, 1.0);
        let (_, cache) = generate_with_cache(&g, &z).unwrap();
        let d = vec![w[..4].to_vec(), w[4..].to_vec()];
        let grads = generator_backward(&g, &cache, &d).unwrap();
        let fd = param_diff(&g, 1e-5, |p| weighted_image(p, &z, &w));
        assert_rel_close("generator", &grads.to_flat(), &fd, 1e-4);
    }
}

#[test]
fn patch_averaged_gradient_is_mean_of_per_patch_gradients() {
    let mut r = rng(32);
    let cfg = GeneratorConfig {
        steps: 4,
        ..small_config(HiddenMode::Probabilities)
    };
    let g = Generator::init(cfg, &mut substream(2, "init", 0)).unwrap();
    let z = g.sample_noise(&mut substream(2, "noise", 0));
    let (_, cache) = generate_with_cache(&g, &z).unwrap();
    let d: Vec<Vec<f64>> = (0..4).map(|_| rand_vec(&mut r, 4, -1.0, 1.0)).collect();

    let mut explicit = zeros_like(&g);
    for t in 0..4 {
        let mut only_t = vec![vec![0.0; 4]; 4];
        only_t[t] = d[t].clone();
        explicit.add_scaled(&generator_backward(&g, &cache, &only_t).unwrap(), 1.0).unwrap();
    }
    explicit.scale(0.25);
    let averaged = g.patch_averaged_gradient(&cache, &d).unwrap();
    assert_eq!(averaged.to_flat(), explicit.to_flat());

    // Linearity: one backward pass over all patches, divided by T.
    let mut full = generator_backward(&g, &cache, &d).unwrap();
    full.scale(0.25);
    assert_rel_close("single pass", &full.to_flat(), &averaged.to_flat(), 1e-12);
}

#[test]
fn single_image_step_gradient_is_mean_over_four_patches() {
    let cfg = GeneratorConfig {
        steps: 4,
        ..small_config(HiddenMode::Probabilities)
    };
    let g = Generator::init(cfg, &mut substream(3, "init", 0)).unwrap();
    let disc = Discriminator::init(4, &mut substream(3, "init", 1));
    let z = g.sample_noise(&mut substream(3, "noise", 0));
    let (step, _) = generator_step_gradient(&g, &disc, LossKind::WassersteinGp, std::slice::from_ref(&z)).unwrap();

    let (image, cache) = generate_with_cache(&g, &z).unwrap();
    let mut sum = zeros_like(&g);
    for t in 0..4 {
        let (_, dcache) = disc.forward(&image[t * 4..(t + 1) * 4]).unwrap();
        let mut scratch = zeros_like(&disc);
        let mut d = vec![vec![0.0; 4]; 4];
        d[t] = disc.backward(&dcache, -1.0, &mut scratch).unwrap();
        sum.add_scaled(&generator_backward(&g, &cache, &d).unwrap(), 1.0).unwrap();
    }
    sum.scale(1.0 / 4.0);
    assert_eq!(step.to_flat(), sum.to_flat());
}

#[test]
fn generator_loss_gradient_matches_finite_differences() {
    let g = Generator::init(small_config(HiddenMode::Probabilities), &mut substream(4, "init", 0)).unwrap();
    let disc = Discriminator::init(4, &mut substream(4, "init", 1));
    let mut nr = substream(4, "noise", 0);
    let noise: Vec<LatentNoise> = (0..3).map(|_| g.sample_noise(&mut nr)).collect();
    for loss in [LossKind::WassersteinGp, LossKind::Bce] {
        let (grad, _) = generator_step_gradient(&g, &disc, loss, &noise).unwrap();
        let fd = param_diff(&g, 1e-5, |p| generator_step_gradient(p, &disc, loss, &noise).unwrap().1);
        assert_rel_close("generator loss", &grad.to_flat(), &fd, 1e-4);
    }
}

fn leaky(z: f64) -> f64 {
    if z > 0.0 {
        z
    } else {
        LEAKY_SLOPE * z
    }
}

fn oracle_score(d: &Discriminator, x: &[f64]) -> f64 {
    let h1: Vec<f64> = (0..d.b1.len())
        .map(|i| leaky((0..x.len()).map(|j| d.w1[(i, j)] * x[j]).sum::<f64>() + d.b1[i]))
        .collect();
    let h2: Vec<f64> = (0..d.b2.len())
        .map(|i| leaky((0..h1.len()).map(|j| d.w2[(i, j)] * h1[j]).sum::<f64>() + d.b2[i]))
        .collect();
    (0..h2.len()).map(|i| d.w3[i] * h2[i]).sum::<f64>() + d.b3[0]
}

#[test]
fn discriminator_matches_straight_line_oracle() {
    let mut r = rng(33);
    for (pd, d) in [
        (5, Discriminator::init_with_widths(5, 4, 3, &mut substream(5, "init", 0))),
        (16, Discriminator::init(16, &mut substream(5, "init", 1))),
    ] {
        for _ in 0..5 {
            let x = rand_vec(&mut r, pd, 0.0, 1.0);
            assert!((d.score(&x).unwrap() - oracle_score(&d, &x)).abs() < 1e-13);
        }
    }
}

fn batch(r: &mut qgan_core::rng::StreamRng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_vec(rows, cols, rand_vec(r, rows * cols, 0.0, 1.0)).unwrap()
}

#[test]
fn wgan_gp_critic_gradient_matches_finite_differences() {
    let mut r = rng(34);
    for (pd, h1, h2, lambda) in [(4, 6, 5, 10.0), (16, 64, 16, 10.0), (3, 4, 4, 0.0)] {
        let d = Discriminator::init_with_widths(pd, h1, h2, &mut substream(6, "init", pd as u64));
        let real = batch(&mut r, 5, pd);
        let fake = batch(&mut r, 5, pd);
        let eps = rand_vec(&mut r, 5, 0.0, 1.0);
        let (l, grads) = wgan_gp_critic(&d, &real, &fake, lambda, &eps).unwrap();
        assert_eq!(l, wgan_gp_losses(&d, &real, &fake, lambda, &eps).unwrap());
        let fd = param_diff(&d, 1e-5, |p| wgan_gp_losses(p, &real, &fake, lambda, &eps).unwrap().disc_loss);
        assert_rel_close("critic", &grads.to_flat(), &fd, 1e-4);
    }
}

#[test]
fn penalty_gradient_agrees_with_coarse_fallback_step() {
    let mut r = rng(35);
    let d = Discriminator::init_with_widths(4, 8, 6, &mut substream(7, "init", 0));
    let x = rand_vec(&mut r, 4, 0.0, 1.0);
    let mut grads = zeros_like(&d);
    d.penalty_and_gradient(&x, 1.0, &mut grads).unwrap();
    let penalty = |p: &Discriminator| {
        let n: f64 = p.input_gradient(&x).unwrap().iter().map(|v| v * v).sum::<f64>().sqrt();
        (n - 1.0) * (n - 1.0)
    };
    let fd = param_diff(&d, 1e-4, penalty);
    assert_rel_close("penalty", &grads.to_flat(), &fd, 1e-4);
}

#[test]
fn bce_critic_gradient_matches_finite_differences() {
    let mut r = rng(36);
    let d = Discriminator::init_with_widths(4, 6, 5, &mut substream(8, "init", 0));
    let real = batch(&mut r, 4, 4);
    let fake = batch(&mut r, 3, 4);
    let (_, grads) = bce_critic(&d, &real, &fake).unwrap();
    let loss = |p: &Discriminator| {
        let rs: Vec<f64> = (0..4).map(|i| p.score(real.row(i)).unwrap()).collect();
        let fs: Vec<f64> = (0..3).map(|i| p.score(fake.row(i)).unwrap()).collect();
        bce_losses(&rs, &fs).unwrap().disc_loss
    };
    let fd = param_diff(&d, 1e-5, loss);
    assert_rel_close("bce critic", &grads.to_flat(), &fd, 1e-5);
}

#[test]
fn bce_random_scores_match_direct_formula() {
    let mut r = rng(37);
    let real = rand_vec(&mut r, 6, -4.0, 4.0);
    let fake = rand_vec(&mut r, 5, -4.0, 4.0);
    let s = |x: f64| 1.0 / (1.0 + (-x).exp());
    let dl = -real.iter().map(|&x| s(x).ln()).sum::<f64>() / 6.0 - fake.iter().map(|&x| (1.0 - s(x)).ln()).sum::<f64>() / 5.0;
    let gl = -fake.iter().map(|&x| s(x).ln()).sum::<f64>() / 5.0;
    let l = bce_losses(&real, &fake).unwrap();
    assert!((l.disc_loss - dl).abs() < 1e-12 && (l.gen_loss - gl).abs() < 1e-12);
}

#[test]
fn generator_descends_against_fixed_critic() {
    let g = Generator::init(small_config(HiddenMode::Probabilities), &mut substream(9, "init", 0)).unwrap();
    let d = Discriminator::init(4, &mut substream(9, "init", 1));
    let mut nr = substream(9, "noise", 0);
    let noise: Vec<LatentNoise> = (0..4).map(|_| g.sample_noise(&mut nr)).collect();
    let (grad, before) = generator_step_gradient(&g, &d, LossKind::WassersteinGp, &noise).unwrap();
    let mut stepped = g.clone();
    stepped.add_scaled(&grad, -1e-3).unwrap();
    let (_, after) = generator_step_gradient(&stepped, &d, LossKind::WassersteinGp, &noise).unwrap();
    assert!(after < before, "{after} !< {before}");
}

#[test]
fn patchgan_gradient_matches_finite_differences() {
    let mut r = rng(38);
    let cfg = PatchGanConfig {
        n_qubits: 3,
        reps: 1,
        subgenerators: 3,
        patch_pixels: 6,
    };
    let g = PatchGanGenerator::init(cfg, &mut substream(10, "init", 0)).unwrap();
    let z = g.sample_noise(&mut substream(10, "noise", 0));
    let d: Vec<Vec<f64>> = (0..3).map(|_| rand_vec(&mut r, 6, -1.0, 1.0)).collect();
    let (_, cache) = g.forward(&z).unwrap();
    let grads = g.patch_averaged_gradient(&cache, &d).unwrap();
    let loss = |p: &PatchGanGenerator| {
        let img = p.forward(&z).unwrap().0;
        d.iter().flatten().zip(&img).map(|(a, b)| a * b).sum::<f64>() / 3.0
    };
    let fd = param_diff(&g, 1e-5, loss);
    assert_rel_close("patchgan", &grads.to_flat(), &fd, 1e-5);
}

fn tiny_dataset() -> ImageDataset {
    let mut r = rng(39);
    let images = Matrix::from_vec(6, 16, rand_vec(&mut r, 96, 0.0, 1.0)).unwrap();
    ImageDataset::new(images, vec![0; 6], 4, 4).unwrap()
}

#[test]
fn zero_learning_rate_leaves_parameters_bit_identical() {
    let data = chunk_patches(&tiny_dataset(), 8).unwrap();
    let cfg = GeneratorConfig {
        patch_dim: 8,
        ..small_config(HiddenMode::Probabilities)
    };
    for loss in [LossKind::WassersteinGp, LossKind::Bce] {
        let g = Generator::init(cfg, &mut substream(11, "init", 0)).unwrap();
        let d = Discriminator::init(8, &mut substream(11, "init", 1));
        let mut state = TrainState::new(g.clone(), d.clone(), 0.0).unwrap();
        let tc = TrainConfig {
            learning_rate: 0.0,
            batch_size: 4,
            critic_steps: 2,
            ..TrainConfig::new(loss, 5)
        };
        let m = train_epoch(&mut state, &data, &tc).unwrap();
        assert_eq!(m.epoch, 1);
        assert_eq!(state.generator, g);
        assert_eq!(state.discriminator, d);
        assert_eq!(state.disc_opt.t, 4);
        assert_eq!(state.gen_opt.t, 2);
    }
}

#[test]
fn epochs_are_reproducible_and_resumable() {
    let data = chunk_patches(&tiny_dataset(), 8).unwrap();
    let cfg = GeneratorConfig {
        patch_dim: 8,
        ..small_config(HiddenMode::Probabilities)
    };
    let fresh = || {
        TrainState::new(
            Generator::init(cfg, &mut substream(12, "init", 0)).unwrap(),
            Discriminator::init(8, &mut substream(12, "init", 1)),
            1e-2,
        )
        .unwrap()
    };
    let tc = TrainConfig {
        learning_rate: 1e-2,
        batch_size: 4,
        ..TrainConfig::new(LossKind::WassersteinGp, 3)
    };
    let mut a = fresh();
    let ma: Vec<_> = (0..2).map(|_| train_epoch(&mut a, &data, &tc).unwrap()).collect();

    let mut b = fresh();
    train_epoch(&mut b, &data, &tc).unwrap();
    let mut resumed = b.clone();
    let mb = train_epoch(&mut resumed, &data, &tc).unwrap();
    assert_eq!(ma[1], mb);
    assert_eq!(a, resumed);
    assert_ne!(a.generator, fresh().generator);
}

#[test]
fn patchgan_baseline_trains() {
    let data = chunk_patches(&tiny_dataset(), 4).unwrap();
    let cfg = PatchGanConfig {
        n_qubits: 2,
        reps: 1,
        subgenerators: 4,
        patch_pixels: 4,
    };
    let g = PatchGanGenerator::init(cfg, &mut substream(13, "init", 0)).unwrap();
    let mut state = TrainState::new(g.clone(), Discriminator::init(4, &mut substream(13, "init", 1)), 1e-2).unwrap();
    let tc = TrainConfig {
        learning_rate: 1e-2,
        batch_size: 3,
        ..TrainConfig::new(LossKind::Bce, 1)
    };
    let m = train_epoch(&mut state, &data, &tc).unwrap();
    assert!(m.gen_loss.is_finite() && m.disc_loss.is_finite());
    assert_eq!(m.penalty, 0.0);
    assert_ne!(state.generator, g);
}

#[test]
fn training_rejects_mismatched_layout() {
    let data = chunk_patches(&tiny_dataset(), 4).unwrap();
    let g = Generator::init(small_config(HiddenMode::PauliZ), &mut substream(14, "init", 0)).unwrap();
    let mut state = TrainState::new(g, Discriminator::init(4, &mut substream(14, "init", 1)), 1e-3).unwrap();
    let tc = TrainConfig::new(LossKind::WassersteinGp, 0);
    assert!(train_epoch(&mut state, &data, &tc).is_err());
}
