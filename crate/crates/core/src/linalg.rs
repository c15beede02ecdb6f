//! Dense Hermitian linear algebra used by the Fock-space layer.
//!
//! The one solver contract: sorted real eigenvalues, orthonormal eigenvectors,
//! backward error at most `1e-10 * ‖A‖`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector for `values[j]`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Builds `V f(Λ) V†`.
    pub fn map<F>(&self, f: F) -> CMatrix
    where
        F: Fn(f64) -> Complex64,
    {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let fj = f(v);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// `‖A V − V Λ‖_max`, the residual of the decomposition against `a`.
    pub fn residual(&self, a: &CMatrix) -> f64 {
        let av = a * &self.vectors;
        let mut worst = 0.0f64;
        for (j, &v) in self.values.iter().enumerate() {
            for i in 0..a.nrows() {
                worst = worst.max((av[(i, j)] - self.vectors[(i, j)] * v).norm());
            }
        }
        worst
    }
}

/// Hermitian part `(A + A†)/2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub fn hermitian_eigen(a: &CMatrix) -> HermitianEigen {
    assert!(a.is_square(), "eigen-decomposition needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEigen { values, vectors }
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = hermitian_part(a)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `exp(G)` for anti-Hermitian `G`, through the Hermitian matrix `H = iG`.
pub fn expm_antihermitian(g: &CMatrix) -> CMatrix {
    let h = g.map(|z| z * I);
    // G = -iH, so exp(G) = V exp(-iΛ) V†
    hermitian_eigen(&h).map(|lambda| Complex64::from_polar(1.0, -lambda))
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a).iter().map(|v| v.abs()).sum()
}

/// Principal square root of a positive semidefinite matrix; tiny negative
/// eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(a: &CMatrix) -> CMatrix {
    hermitian_eigen(a).map(|v| Complex64::new(v.max(0.0).sqrt(), 0.0))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest absolute entry.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// Real part of the trace.
pub fn trace_re(a: &CMatrix) -> f64 {
    a.diagonal().iter().map(|z| z.re).sum()
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        hermitian_part(&a)
    }

    #[test]
    fn eigen_contract_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 5, 17, 40] {
            let a = random_hermitian(n, &mut rng);
            let eig = hermitian_eigen(&a);
            let norm = hermitian_norm(&a).max(1e-300);
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            assert!(eig.residual(&a) <= 1e-10 * norm, "n = {n}");
            let gram = eig.vectors.adjoint() * &eig.vectors;
            let defect = max_abs(&(gram - CMatrix::identity(n, n)));
            assert!(defect < 1e-12, "orthonormality defect {defect}");
        }
    }

    #[test]
    fn exp_of_antihermitian_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(12, &mut rng);
        let g = h.map(|z| z * I);
        let u = expm_antihermitian(&g);
        let defect = max_abs(&(u.adjoint() * &u - CMatrix::identity(12, 12)));
        assert!(defect < 1e-12);
    }

    #[test]
    fn exp_matches_taylor_series_for_small_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(6, &mut rng).scale(0.1);
        let g = h.map(|z| z * I);
        let mut series = CMatrix::identity(6, 6);
        let mut term = CMatrix::identity(6, 6);
        for k in 1..30 {
            term = &term * &g / Complex64::new(k as f64, 0.0);
            series += &term;
        }
        assert!(max_abs(&(expm_antihermitian(&g) - series)) < 1e-13);
    }

    #[test]
    fn sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = random_hermitian(8, &mut rng);
        let psd = &b * b.adjoint();
        let root = psd_sqrt(&psd);
        assert!(max_abs(&(&root * &root - &psd)) < 1e-11);
    }
}
