use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use skeleton_ot::geometry::{canonicalize, weight_w, SimplexPoint};
use skeleton_ot::oracle::{permute, permuted_indices};
use skeleton_ot::{source_measure, target_measure, DualGrid, ProblemConfig, SimplexGrid};

fn config() -> impl Strategy<Value = ProblemConfig> {
    (1u32..=3)
        .prop_flat_map(|m| (Just(m), m + 1..=6, prop::collection::vec(1u32..=4, m as usize + 1)))
        .prop_map(|(m, n, d)| ProblemConfig::new(n, m, d).unwrap())
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent_and_shift_invariant(cfg in config(), raw in prop::collection::vec(0.0f64..1.0, 4), shift in -3.0f64..3.0) {
        let m1 = cfg.degrees.len();
        // scale into Δ^∨: Σ d_i p_i >= -1 once the max is subtracted
        let dsum: f64 = cfg.degrees.iter().map(|&d| d as f64).sum();
        let q: Vec<f64> = raw[..m1].iter().map(|v| -v / dsum + shift).collect();
        let p = canonicalize(&q, &cfg).unwrap();
        prop_assert_eq!(p.coords().iter().copied().fold(f64::NEG_INFINITY, f64::max), 0.0);
        let again = canonicalize(p.coords(), &cfg).unwrap();
        prop_assert_eq!(again.coords(), p.coords());
        let w = weight_w(&p, &cfg);
        prop_assert!((0.0..=1.0).contains(&w));
    }

    #[test]
    fn pairing_splits_into_reduced_part(cfg in config(), raw in prop::collection::vec(0.01f64..1.0, 4), hat in prop::collection::vec(0.0f64..1.0, 4)) {
        let m1 = cfg.degrees.len();
        let total: f64 = raw[..m1].iter().sum();
        let x = SimplexPoint::new(raw[..m1].iter().map(|v| v / total).collect()).unwrap();
        let dsum: f64 = cfg.degrees.iter().map(|&d| d as f64).sum();
        let q: Vec<f64> = hat[..m1].iter().map(|v| -v / dsum).collect();
        let p = canonicalize(&q, &cfg).unwrap();
        let reduced: f64 = x.reduced().iter().zip(p.reduced()).map(|(a, b)| a * b).sum();
        prop_assert!((p.pair(x.coords()) - (p.p0() + reduced)).abs() < 1e-12);
    }

    #[test]
    fn measures_have_unit_mass(cfg in config(), n in 2u32..8) {
        let grid = SimplexGrid::new(cfg.dim(), n);
        let mu = source_measure(&grid).unwrap();
        let nu = target_measure(&DualGrid::new(&cfg, n), &cfg).unwrap();
        prop_assert!((mu.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((nu.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(mu.weights.iter().chain(&nu.weights).all(|&w| w >= 0.0));
    }
}

#[test]
fn measures_respect_degree_symmetry() {
    let cfg = ProblemConfig::new(3, 2, vec![1, 1, 1]).unwrap();
    let grid = SimplexGrid::new(2, 12);
    let mu = source_measure(&grid).unwrap();
    let dual = DualGrid::new(&cfg, 6);
    let nu = target_measure(&dual, &cfg).unwrap();
    let sigma = [1, 2, 0];
    let xs: Vec<&[f64]> = grid.points.iter().map(|p| p.coords()).collect();
    for (i, j) in permuted_indices(&xs, &sigma).into_iter().enumerate() {
        assert!((mu.weights[i] - mu.weights[j.unwrap()]).abs() < 1e-15);
    }
    let ps: Vec<&[f64]> = dual.points.iter().map(|p| p.coords()).collect();
    for (i, j) in permuted_indices(&ps, &sigma).into_iter().enumerate() {
        let j = j.unwrap_or_else(|| panic!("{:?} has no image", permute(ps[i], &sigma)));
        assert!((nu.weights[i] - nu.weights[j]).abs() < 1e-12);
    }
}

/// Monte Carlo volume of `Δ̄^∨` in reduced coordinates equals the sum of the
/// cell volumes `(Σ d_i) / (m! Π d_i)` measured in each cell's own
/// coordinates, i.e. the reduction is unimodular on every cell.
#[test]
fn reduced_coordinates_preserve_cell_volume() {
    let mut rng = StdRng::seed_from_u64(3);
    for (m, d) in [(1u32, vec![1u32, 2]), (2, vec![1, 1, 1]), (2, vec![2, 1, 3])] {
        let cfg = ProblemConfig::new(m + 1, m, d.clone()).unwrap();
        let r = 1.0 / *d.iter().min().unwrap() as f64;
        let samples = 200_000;
        let mut inside = 0usize;
        for _ in 0..samples {
            let mut q = vec![0.0];
            q.extend((0..m).map(|_| rng.gen_range(-r..r)));
            if canonicalize(&q, &cfg).is_ok() {
                inside += 1;
            }
        }
        let volume = inside as f64 / samples as f64 * (2.0 * r).powi(m as i32);
        let dsum: f64 = d.iter().map(|&v| v as f64).sum();
        let dprod: f64 = d.iter().map(|&v| v as f64).product();
        let fact: f64 = (1..=m).map(|v| v as f64).product();
        let expected = dsum / (dprod * fact);
        assert!((volume - expected).abs() / expected < 0.02, "{d:?}: {volume} vs {expected}");
    }
}
