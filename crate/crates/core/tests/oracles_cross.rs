mod common;

use common::*;
use dagiso::oracles::{active_set_oracle, pava_oracle};
use dagiso::{Dag, IsoInstance};
use rand::Rng;

#[test]
fn active_set_agrees_with_pava_on_paths() {
    let mut r = rng(51);
    for n in 1..=8 {
        for _ in 0..10 {
            let y: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
            let w: Vec<f64> = (0..n).map(|_| r.random_range(0.5..2.0)).collect();
            let dag = Dag::path(n);
            let inst = IsoInstance::new(dag.clone(), y.clone(), w.clone(), 2.0).unwrap();
            let a = active_set_oracle(&inst).unwrap();
            let b = pava_oracle(&dag, &y, &w).unwrap();
            let a_raw = a.value * inst.objective_scale();
            assert!((a_raw - b.value).abs() <= 1e-9 * (1.0 + b.value));
            let xa = inst.to_raw_x(&a.x);
            for v in 0..n {
                assert!((xa[v] - b.x[v]).abs() <= 1e-6);
            }
        }
    }
}

#[test]
fn active_set_rejects_large_inputs() {
    let mut r = rng(52);
    let inst = random_instance(12, 20, 2.0, &mut r);
    assert!(active_set_oracle(&inst).is_err());
}
