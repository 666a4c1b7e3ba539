mod common;

use common::*;
use dagiso::barrier::{barrier_gradient, barrier_value, is_feasible, FeasiblePoint, Violation};
use dagiso::ipm::value_bound;
use dagiso::oracles::dense_hessian;
use proptest::prelude::*;

fn shifted(point: &FeasiblePoint, i: usize, h: f64) -> FeasiblePoint {
    let mut z = point.to_vec();
    z[i] += h;
    FeasiblePoint::from_slice(&z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gradient_matches_central_differences(seed in any::<u64>(), n in 1usize..8, pi in 0usize..4) {
        let p = [1.0, 1.5, 2.0, 4.0][pi];
        let mut r = rng(seed);
        let inst = random_instance(n, 2 * n, p, &mut r);
        let k = value_bound(&inst);
        let pt = random_point(&inst, &mut r);
        prop_assert!(is_feasible(&inst, k, &pt).feasible);
        let g = barrier_gradient(&inst, k, &pt).unwrap();
        let h = 1e-6;
        for i in 0..2 * n {
            let fd = (barrier_value(&inst, k, &shifted(&pt, i, h)).unwrap()
                - barrier_value(&inst, k, &shifted(&pt, i, -h)).unwrap())
                / (2.0 * h);
            prop_assert!((fd - g[i]).abs() <= 1e-4 * (1.0 + g[i].abs()), "coord {}: {} vs {}", i, fd, g[i]);
        }
    }

    #[test]
    fn hessian_matches_gradient_differences(seed in any::<u64>(), n in 1usize..7, pi in 0usize..4) {
        let p = [1.0, 1.5, 2.0, 4.0][pi];
        let mut r = rng(seed);
        let inst = random_instance(n, 2 * n, p, &mut r);
        let k = value_bound(&inst);
        let pt = random_point(&inst, &mut r);
        let hess = dense_hessian(&inst, k, &pt).unwrap();
        let h = 1e-6;
        for j in 0..2 * n {
            let gp = barrier_gradient(&inst, k, &shifted(&pt, j, h)).unwrap();
            let gm = barrier_gradient(&inst, k, &shifted(&pt, j, -h)).unwrap();
            for i in 0..2 * n {
                let fd = (gp[i] - gm[i]) / (2.0 * h);
                prop_assert!((fd - hess[(i, j)]).abs() <= 1e-3 * (1.0 + hess[(i, j)].abs()),
                    "entry ({}, {}): {} vs {}", i, j, fd, hess[(i, j)]);
            }
        }
        prop_assert!(hess.cholesky().is_some());
    }
}

#[test]
fn violations_are_listed() {
    let mut r = rng(7);
    let inst = random_instance(4, 5, 2.0, &mut r);
    let k = value_bound(&inst);
    let mut pt = random_point(&inst, &mut r);
    pt.t[0] = -1.0;
    let e = *inst.dag().edge(0);
    pt.x[e.head] = pt.x[e.tail];
    let f = is_feasible(&inst, k, &pt);
    assert!(!f.feasible);
    assert!(f.violations.iter().any(|v| matches!(v, Violation::Epigraph { vertex: 0, .. })));
    assert!(f.violations.iter().any(|v| matches!(v, Violation::Edge { index: 0, .. })));
    assert!(barrier_value(&inst, k, &pt).is_err());
    let big = FeasiblePoint::new(vec![0.5; 4], vec![1e9; 4]);
    assert!(is_feasible(&inst, k, &big)
        .violations
        .iter()
        .any(|v| matches!(v, Violation::ValueBound { .. })));
}
