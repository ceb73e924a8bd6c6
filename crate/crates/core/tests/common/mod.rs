#![allow(dead_code)]

use num_complex::Complex64;
use pconc::qmath::{hermitian_eig, CMatrix};
use pconc::BipartiteKet;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_c(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state of a `da × db` system.
pub fn random_ket(rng: &mut impl Rng, da: usize, db: usize) -> BipartiteKet {
    let amps = (0..da * db).map(|_| gaussian_c(rng)).collect();
    BipartiteKet::normalized(da, db, amps).unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| gaussian_c(rng));
    (&g + &g.adjoint()).scale_re(0.5)
}

/// `exp(iH)` for a random Hermitian `H`.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let eig = hermitian_eig(&random_hermitian(rng, n)).unwrap();
    let v = &eig.vectors;
    let phases = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, eig.values[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    &(v * &phases) * &v.adjoint()
}

/// Matrix sending `|j⟩` to `|perm[j]⟩`.
pub fn permutation_matrix(perm: &[usize]) -> CMatrix {
    let n = perm.len();
    CMatrix::from_fn(n, n, |i, j| if perm[j] == i { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Product of the three two-level concurrences of the SPDC qutrit.
pub fn spdc_closed_form(a: f64, b: f64) -> f64 {
    let c1 = 2.0 * a / (1.0 + a * a);
    let c2 = 2.0 * b / (1.0 + b * b);
    let c3 = if a == 0.0 && b == 0.0 { 0.0 } else { 2.0 * a * b / (a * a + b * b) };
    c1 * c2 * c3
}
