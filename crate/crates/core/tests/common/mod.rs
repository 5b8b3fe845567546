#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qangle::{SingleModeState, TwoModeState};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn amp(rng: &mut StdRng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_single(rng: &mut StdRng, n_max: u32) -> SingleModeState {
    SingleModeState::from_amplitudes((0..=n_max).map(|_| amp(rng)).collect()).unwrap()
}

pub fn random_real_single(rng: &mut StdRng, n_max: u32) -> SingleModeState {
    SingleModeState::from_real(&(0..=n_max).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()).unwrap()
}

/// Random two-mode state on `n_s + n_a <= n_max`.
pub fn random_two(rng: &mut StdRng, n_max: u32) -> TwoModeState {
    TwoModeState::from_fn(n_max, 0.0, |_, _| amp(rng)).unwrap()
}

/// Random state on the `n_s n_a = 0` subspace with `|m| <= m_max`.
pub fn random_h_prime(rng: &mut StdRng, m_max: u32) -> TwoModeState {
    let mut map = BTreeMap::new();
    map.insert((0, 0), amp(rng));
    for n in 1..=m_max {
        map.insert((n, 0), amp(rng));
        map.insert((0, n), amp(rng));
    }
    TwoModeState::from_amplitudes(map, m_max).unwrap()
}

/// Dense `<psi| op |psi>` with `op` given by its matrix elements on `0..dim`.
pub fn dense_expect(state: &SingleModeState, dim: usize, op: impl Fn(usize, usize) -> f64) -> C64 {
    let m = nalgebra::DMatrix::<C64>::from_fn(dim, dim, |r, c| C64::new(op(r, c), 0.0));
    let psi = nalgebra::DVector::from_iterator(dim, (0..dim).map(|n| state.amplitude(n)));
    psi.dotc(&(m * &psi))
}

/// `<chi^2>` and `<rho^2>` of `a`-quadratures from explicit matrices with enough padding.
pub fn dense_quadrature_squares(state: &SingleModeState) -> (f64, f64) {
    let dim = state.n_max() as usize + 3;
    let a = nalgebra::DMatrix::<C64>::from_fn(dim, dim, |r, c| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            C64::default()
        }
    });
    let ad = a.adjoint();
    let chi = (&a + &ad) * C64::new(0.5, 0.0);
    let rho = (&a - &ad) * C64::new(0.0, -0.5);
    let psi = nalgebra::DVector::from_iterator(dim, (0..dim).map(|n| state.amplitude(n)));
    let e = |m: &nalgebra::DMatrix<C64>| psi.dotc(&(m * &psi)).re;
    (e(&(&chi * &chi)), e(&(&rho * &rho)))
}

/// Mean of `a` from the matrix as well, for variances.
pub fn dense_mean_a(state: &SingleModeState) -> C64 {
    dense_expect(state, state.n_max() as usize + 2, |r, c| if c == r + 1 { (c as f64).sqrt() } else { 0.0 })
}
