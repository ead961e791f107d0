//! Dense eigendecomposition used as the reference oracle.
//!
//! Eigenvalues come from a complex Schur form A = QTQ*; eigenvectors from
//! back substitution on T.

use nalgebra::Schur;

use crate::linalg::{fix_phase, frobenius_norm, normalized, CMatrix, CVector, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: C64,
    /// Unit eigenvector with the phase rule applied.
    pub v: CVector,
}

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

/// All n eigenpairs of a square matrix, in Schur order.
pub fn eigenpairs(a: &CMatrix) -> Vec<EigenPair> {
    let n = a.nrows();
    let (q, t) = match Schur::try_new(a.clone(), SCHUR_EPS, SCHUR_MAX_ITER) {
        Some(s) => s.unpack(),
        None => Schur::new(a.clone()).unpack(),
    };
    let scale = frobenius_norm(&t).max(f64::MIN_POSITIVE);
    let floor = f64::EPSILON * scale;
    (0..n)
        .map(|i| {
            let lambda = t[(i, i)];
            let mut y = CVector::zeros(n);
            y[i] = C64::new(1.0, 0.0);
            for j in (0..i).rev() {
                let mut s = C64::new(0.0, 0.0);
                for k in j + 1..=i {
                    s += t[(j, k)] * y[k];
                }
                let mut d = t[(j, j)] - lambda;
                if d.norm() < floor {
                    d = C64::new(floor, 0.0);
                }
                y[j] = -s / d;
            }
            let v = normalized(&(&q * y)).expect("eigenvector is nonzero");
            EigenPair {
                lambda,
                v: fix_phase(&v),
            }
        })
        .collect()
}

/// Eigenvalues only.
pub fn eigenvalues(a: &CMatrix) -> Vec<C64> {
    let t = match Schur::try_new(a.clone(), SCHUR_EPS, SCHUR_MAX_ITER) {
        Some(s) => s.unpack().1,
        None => Schur::new(a.clone()).unpack().1,
    };
    (0..a.nrows()).map(|i| t[(i, i)]).collect()
}

/// Smallest distance from `lambda` to the other eigenvalues, where the
/// eigenvalue at index `skip` is excluded.
pub fn spectral_gap(values: &[C64], skip: usize) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, z)| (z - values[skip]).norm())
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real, shifted, vector_norm};

    #[test]
    fn diagonal_spectrum() {
        let a =
            CMatrix::from_diagonal(&CVector::from_vec(vec![real(2.0), real(-1.0), c(0.0, 3.0)]));
        let mut got: Vec<C64> = eigenpairs(&a).iter().map(|p| p.lambda).collect();
        got.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        let want = [real(-1.0), c(0.0, 3.0), real(2.0)];
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).norm() < 1e-14);
        }
    }

    #[test]
    fn rotation_has_conjugate_pair() {
        let a = CMatrix::from_row_slice(2, 2, &[real(0.0), real(-1.0), real(1.0), real(0.0)]);
        let pairs = eigenpairs(&a);
        for p in &pairs {
            assert!((p.lambda.norm() - 1.0).abs() < 1e-14);
            assert!(p.lambda.re.abs() < 1e-14);
            assert!(vector_norm(&(shifted(&a, p.lambda) * &p.v)) < 1e-14);
        }
    }

    #[test]
    fn residuals_are_small_on_upper_triangular_input() {
        let a = CMatrix::from_row_slice(
            3,
            3,
            &[
                real(1.0),
                real(2.0),
                real(3.0),
                real(0.0),
                real(4.0),
                real(5.0),
                real(0.0),
                real(0.0),
                real(6.0),
            ],
        );
        for p in eigenpairs(&a) {
            assert!(vector_norm(&(shifted(&a, p.lambda) * &p.v)) < 1e-13);
        }
        assert_eq!(spectral_gap(&[real(1.0), real(4.0), real(6.0)], 1), 2.0);
    }
}
