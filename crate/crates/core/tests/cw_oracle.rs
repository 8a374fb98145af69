mod common;

use qmagic::linalg::{max_coherent, random_mixed, random_pure, strange, DensityMatrix, Seed};
use qmagic::monotones::{cw_coherence, striation_marginals};

fn pinned(i: u64) -> DensityMatrix {
    if i.is_multiple_of(2) {
        DensityMatrix::from_pure(&random_pure(3, Seed(8000 + i)).unwrap())
    } else {
        random_mixed(3, 1 + (i as usize / 2) % 3, Seed(8000 + i)).unwrap()
    }
}

#[test]
fn line_sums_agree_with_library_marginals() {
    for i in 0..10 {
        let rho = pinned(i);
        let mut ours: Vec<f64> = common::qutrit_line_sums(&rho).iter().map(|v| v / 4.0).collect();
        let mut lib = striation_marginals(&rho).unwrap();
        // Same multiset of lines; the order within a striation may differ.
        ours.sort_by(f64::total_cmp);
        lib.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&lib) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn exact_optimizer_matches_dense_grid_on_pinned_states() {
    for i in 0..20 {
        let rho = pinned(i);
        let exact = cw_coherence(&rho).unwrap();
        let (grid, _, _) = common::cw_dense_grid(&rho);
        assert!((exact.value - grid).abs() < 1e-4, "state {i}: exact {} grid {grid}", exact.value);
        // The grid can only find feasible points, so it never beats the optimum.
        assert!(grid >= exact.value - 1e-12, "state {i}");
    }
}

#[test]
fn pinned_values_of_named_states() {
    let c = cw_coherence(&DensityMatrix::from_pure(&max_coherent())).unwrap();
    assert!((c.value - 5.0 / 9.0).abs() < 1e-12);
    let (grid, _, _) = common::cw_dense_grid(&DensityMatrix::from_pure(&max_coherent()));
    assert!((grid - 5.0 / 9.0).abs() < 1e-6);
    let s = cw_coherence(&DensityMatrix::from_pure(&strange())).unwrap();
    assert!((s.value - 0.5).abs() < 1e-12);
}
