//! Seeded random generators shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slhkit::adiabatic::ScaledSlhFamily;
use slhkit::matrix::{c, CMatrix, C64};
use slhkit::operators::hermitian_function;
use slhkit::reduction::BlockPartition;
use slhkit::SlhModel;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut impl Rng) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex(rng))
}

pub fn hermitian(rng: &mut impl Rng, m: usize) -> CMatrix {
    let x = matrix(rng, m, m);
    (&x + &x.dagger()).scale_real(0.5)
}

pub fn unitary(rng: &mut impl Rng, m: usize) -> CMatrix {
    let h = hermitian(rng, m);
    hermitian_function(&h, |x| C64::from_polar(1.0, 3.0 * x))
}

pub fn model(rng: &mut impl Rng, n: usize, m: usize) -> SlhModel {
    SlhModel::new(unitary(rng, n * m), matrix(rng, n * m, m), hermitian(rng, m)).expect("random model is valid")
}

/// Model with `n ≤ max_n`, `m ≤ max_m`, both at least 1.
pub fn model_upto(rng: &mut impl Rng, max_n: usize, max_m: usize) -> SlhModel {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    model(rng, n, m)
}

/// Random point of the open right half-plane.
pub fn right_half_plane(rng: &mut impl Rng) -> C64 {
    c(rng.gen_range(0.05..3.0), rng.gen_range(-4.0..4.0))
}

/// Random family satisfying the structural assumptions, with the slow
/// space spread over random indices rather than a leading block.
pub fn family(rng: &mut impl Rng, n: usize, m: usize, n_slow: usize) -> ScaledSlhFamily {
    assert!(n_slow >= 1 && n_slow < m);
    let mut idx: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        idx.swap(i, rng.gen_range(0..=i));
    }
    let mut slow: Vec<usize> = idx[..n_slow].to_vec();
    slow.sort_unstable();
    let p = BlockPartition::new(m, slow).unwrap();
    let pf = p.fast_projector();
    let l1 = &matrix(rng, n * m, m) * &pf;
    let h1_raw = hermitian(rng, m);
    let ps1 = p.slow_projector();
    let h1 = &h1_raw - &(&(&ps1 * &h1_raw) * &ps1);
    let h2 = &(&pf * &hermitian(rng, m)) * &pf;
    ScaledSlhFamily::new(unitary(rng, n * m), matrix(rng, n * m, m), l1, hermitian(rng, m), h1, h2, p)
        .expect("random family is valid")
}

pub fn family_upto(rng: &mut impl Rng, max_n: usize, max_m: usize) -> ScaledSlhFamily {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(2..=max_m);
    let n_slow = rng.gen_range(1..m);
    family(rng, n, m, n_slow)
}
