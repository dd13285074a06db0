mod common;

use approx::assert_abs_diff_eq;
use polar_fault_core::bounds::fer_bounds_from;
use polar_fault_core::bounds::compute_statistics;
use polar_fault_core::construction::select_info_set;
use polar_fault_core::{CodeSpec, ErasureProb, FaultProb, InfoSet};

fn spec(n: u32, p: f64, delta: f64, protected_levels: u32) -> CodeSpec {
    CodeSpec::new(
        n,
        0,
        ErasureProb::new(p).unwrap(),
        FaultProb::new(delta).unwrap(),
        protected_levels,
    )
    .unwrap()
}

/// Cases small enough to enumerate: (n, protected_levels).
const CASES: [(u32, u32); 7] = [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2), (3, 2), (3, 3)];

#[test]
fn z_table_matches_enumeration() {
    for (n, np) in CASES {
        for (p, delta) in [(0.3, 0.0), (0.5, 0.25), (0.8, 0.1)] {
            let exact = common::enumerate(n, p, delta, n - np.min(n));
            let z = spec(n, p, delta, np).z_table().unwrap();
            for (i, (&got, &want)) in z.values().iter().zip(&exact.z).enumerate() {
                assert_abs_diff_eq!(got, want, epsilon = 1e-12);
                assert!(got >= 0.0, "n={n} i={i}");
            }
        }
    }
}

#[test]
fn covariance_matches_enumeration() {
    for (n, np) in CASES {
        for (p, delta) in [(0.3, 0.0), (0.5, 0.25), (0.6, 0.05)] {
            let exact = common::enumerate(n, p, delta, n - np.min(n));
            let stats = compute_statistics(&spec(n, p, delta, np), 13).unwrap();
            for i in 0..1 << n {
                for j in 0..1 << n {
                    assert_abs_diff_eq!(
                        stats.covariance.get(i, j),
                        exact.covariance(i, j),
                        epsilon = 1e-10
                    );
                }
            }
        }
    }
}

#[test]
fn bounds_sandwich_exact_fer() {
    for (n, np) in CASES {
        for (p, delta) in [(0.2, 0.0), (0.5, 0.01), (0.5, 0.2), (0.9, 0.3)] {
            let exact = common::enumerate(n, p, delta, n - np.min(n));
            let stats = compute_statistics(&spec(n, p, delta, np), 13).unwrap();
            for k in 0..=1usize << n {
                let info = select_info_set(&stats.z, k).unwrap();
                let b = fer_bounds_from(&stats, &info).unwrap();
                let fer = exact.union_probability(info.indices());
                assert!(
                    b.lower <= fer + 1e-12 && fer <= b.upper + 1e-12,
                    "n={n} np={np} p={p} delta={delta} k={k}: {b:?} vs {fer}"
                );
            }
        }
    }
}

#[test]
fn exact_fer_for_arbitrary_sets() {
    // Any subset, not only the constructed ones, must be bracketed.
    let exact = common::enumerate(2, 0.4, 0.1, 2);
    let stats = compute_statistics(&spec(2, 0.4, 0.1, 0), 13).unwrap();
    for mask in 0u32..16 {
        let indices: Vec<usize> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
        let info = InfoSet::new(2, indices).unwrap();
        let b = fer_bounds_from(&stats, &info).unwrap();
        let fer = exact.union_probability(info.indices());
        assert!(b.lower <= fer + 1e-12 && fer <= b.upper + 1e-12, "{mask:04b}");
    }
}
