//! Seeded randomness and random quantum objects.

use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::linalg::{Matrix, C64};
use super::register::RegisterShape;
use super::state::{DensityMatrix, StateVector, UnitaryMatrix};

/// The generator used for every experiment; reproducible from a `u64` seed.
pub type ExperimentRng = ChaCha20Rng;

pub fn seeded(seed: u64) -> ExperimentRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independent child stream, e.g. one per trial.
pub fn fork<R: RngCore + ?Sized>(rng: &mut R) -> ExperimentRng {
    ChaCha20Rng::seed_from_u64(rng.next_u64())
}

/// Standard normal deviate (Box-Muller).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(shape: RegisterShape, rng: &mut R) -> StateVector {
    let amps: Vec<C64> = (0..shape.total_dim()).map(|_| complex_gaussian(rng)).collect();
    StateVector::normalized(shape, amps).expect("gaussian vector is nonzero")
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(shape: RegisterShape, rng: &mut R) -> UnitaryMatrix {
    let n = shape.total_dim();
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|_| (0..n).map(|_| complex_gaussian(rng)).collect())
        .collect();
    // modified Gram-Schmidt; the positive diagonal of R makes the result Haar
    for j in 0..n {
        for i in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let qi = &done[i];
            let proj: C64 = qi.iter().zip(rest[0].iter()).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in rest[0].iter_mut().zip(qi) {
                *x -= proj * a;
            }
        }
        let norm = libm::sqrt(cols[j].iter().map(|x| x.norm_sqr()).sum::<f64>());
        for x in &mut cols[j] {
            *x /= norm;
        }
    }
    let mat = Matrix::from_fn(n, n, |r, c| cols[c][r]);
    UnitaryMatrix::new_unchecked(shape, mat).expect("dimension matches shape")
}

/// Random mixed state `G G^dagger / Tr` from a square Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(shape: RegisterShape, rng: &mut R) -> DensityMatrix {
    let n = shape.total_dim();
    let g = Matrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let mut m = g.mul(&g.adjoint());
    let tr = m.trace().re;
    m = m.scale(C64::new(1.0 / tr, 0.0));
    DensityMatrix::new(shape, m).expect("dimension matches shape")
}

/// Uniform vector over F_q^len.
pub fn random_digits<R: Rng + ?Sized>(len: usize, q: u32, rng: &mut R) -> Vec<u32> {
    (0..len).map(|_| rng.gen_range(0..q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = (0..4).map(|_| seeded(7).next_u64()).collect();
        assert!(a.iter().all(|&x| x == a[0]));
        assert_ne!(seeded(7).next_u64(), seeded(8).next_u64());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded(11);
        let u = random_unitary(RegisterShape::new(alloc::vec![5, 5]).unwrap(), &mut rng);
        assert!(u.matrix().unitarity_defect() < 1e-10);
    }

    #[test]
    fn random_density_is_a_state() {
        let mut rng = seeded(2);
        let rho = random_density(RegisterShape::qubits(2).unwrap(), &mut rng);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(rho.matrix().is_hermitian(1e-12));
        assert!(rho.matrix().hermitian_eigenvalues()[0] > -1e-12);
    }
}
