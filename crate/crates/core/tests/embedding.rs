use orlicz_core::embedding::*;
use orlicz_core::matrix::Matrix;
use orlicz_core::montecarlo::McConfig;
use orlicz_core::orlicz::{lp_norm, nested_norm, normalize_by_linearization, NormalizeMode, OrliczFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn m17() -> OrliczFunction {
    normalize_by_linearization(&OrliczFunction::power(1.7).unwrap(), NormalizeMode::Default).unwrap()
}

fn cfg() -> McConfig {
    McConfig::new(2024).with_replicates(40_000)
}

fn agree(a: &orlicz_core::montecarlo::McEstimate, b: &orlicz_core::montecarlo::McEstimate) -> bool {
    (a.estimate - b.estimate).abs() <= 4.0 * (a.dispersion + b.dispersion)
}

#[test]
fn sign_flips_leave_estimate_unchanged() {
    let m = m17();
    let laws = EmbeddingLaws::new(&m, 1.5).unwrap();
    let a = Matrix::standard_normal(4, &mut ChaCha8Rng::seed_from_u64(1));
    let flipped = a.map(|i, j, v| if (i + 2 * j) % 3 == 0 { -v } else { v });
    let x = psi_l1_norm_with(&a, &laws, &cfg()).unwrap();
    let y = psi_l1_norm_with(&flipped, &laws, &cfg()).unwrap();
    assert!(agree(&x, &y), "{x:?} vs {y:?}");
}

#[test]
fn permutations_leave_ratio_unchanged() {
    let m = m17();
    let laws = EmbeddingLaws::new(&m, 1.5).unwrap();
    let a = Matrix::standard_normal(4, &mut ChaCha8Rng::seed_from_u64(2));
    let b = a.permute_rows(&[2, 0, 3, 1]).permute_cols(&[1, 3, 0, 2]);
    let na = nested_norm(&m, a.row_iter(), 1.5).unwrap();
    let nb = nested_norm(&m, b.row_iter(), 1.5).unwrap();
    assert!((na - nb).abs() <= 1e-12 * na);
    let x = psi_l1_norm_with(&a, &laws, &cfg()).unwrap();
    let y = psi_l1_norm_with(&b, &laws, &cfg()).unwrap();
    assert!(agree(&x, &y), "{x:?} vs {y:?}");
}

#[test]
fn scaling_is_exact_with_paired_seeds() {
    let m = m17();
    let laws = EmbeddingLaws::new(&m, 1.5).unwrap();
    let a = Matrix::standard_normal(3, &mut ChaCha8Rng::seed_from_u64(3));
    for lambda in [0.25, 8.0] {
        let x = psi_l1_norm_with(&a, &laws, &cfg()).unwrap();
        let y = psi_l1_norm_with(&a.scaled(lambda), &laws, &cfg()).unwrap();
        assert!((y.estimate - lambda * x.estimate).abs() <= 1e-12 * y.estimate);
        let nx = nested_norm(&m, a.row_iter(), 1.5).unwrap();
        let ny = nested_norm(&m, a.scaled(lambda).row_iter(), 1.5).unwrap();
        assert!((ny - lambda * nx).abs() <= 1e-10 * ny);
    }
}

#[test]
fn single_entry_position_does_not_matter() {
    let m = m17();
    let laws = EmbeddingLaws::new(&m, 1.5).unwrap();
    let a = psi_l1_norm_with(&Matrix::single_entry(3, 0, 0, 1.0), &laws, &cfg()).unwrap();
    let b = psi_l1_norm_with(&Matrix::single_entry(3, 2, 1, 1.0), &laws, &cfg()).unwrap();
    assert!(agree(&a, &b), "{a:?} vs {b:?}");
}

#[test]
fn khintchine_sandwich() {
    // for fixed c, E_r |Σ c_k r_k| lies in [‖c‖₂/√2, ‖c‖₂]
    let m = m17();
    let laws = EmbeddingLaws::new(&m, 1.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = Matrix::standard_normal(3, &mut rng);
    for _ in 0..20 {
        let xi: Vec<f64> = (0..3).map(|_| laws.xi.sample(&mut rng)).collect();
        let x: Vec<f64> = (0..3).map(|_| laws.x.sample(&mut rng)).collect();
        let c: Vec<f64> = a.map(|i, j, v| v * xi[i] * x[j]).entries().to_vec();
        let norm = lp_norm(&c, 2.0);
        let draws = 20_000;
        let vals: Vec<f64> = (0..draws)
            .map(|_| c.iter().map(|ck| if rng.random::<bool>() { *ck } else { -ck }).sum::<f64>().abs())
            .collect();
        let mean = vals.iter().sum::<f64>() / draws as f64;
        let se = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws * (draws - 1)) as f64).sqrt();
        assert!(mean >= norm / 2f64.sqrt() - 4.0 * se && mean <= norm + 4.0 * se, "{mean} vs {norm}");
    }
}

#[test]
fn sweep_is_bounded_and_reproducible() {
    let m = m17();
    let c = McConfig::new(9).with_replicates(5_000);
    let rep = distortion_sweep(&m, 1.5, &[2, 4], 5, &c).unwrap();
    assert_eq!(rep, distortion_sweep(&m, 1.5, &[2, 4], 5, &c).unwrap());
    for r in &rep.rows {
        assert!(r.min_ratio > 0.0 && r.min_ratio <= r.max_ratio);
    }
    assert!(rep.stability < 4.0);
}

#[test]
fn rejects_functions_that_are_not_two_concave() {
    let m = normalize_by_linearization(&OrliczFunction::power(2.4).unwrap(), NormalizeMode::Default).unwrap();
    assert!(distortion_sweep(&m, 1.5, &[2], 1, &McConfig::new(1).with_replicates(10)).is_err());
}
