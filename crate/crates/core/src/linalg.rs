//! Dense kernels over complex matrices: norms, SVD quantities, orthonormal
//! complements, the projected restriction and the bordered Newton system.
//!
//! Real inputs are complex matrices with zero imaginary parts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Relative threshold below which a matrix counts as numerically singular.
pub const SINGULAR_RTOL: f64 = 1e-12;
/// Absolute threshold used when the reference scale is zero.
pub const SINGULAR_ATOL: f64 = 1e-300;
/// Relative margin under which two moduli are treated as tied for the phase rule.
const PHASE_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Smallest field containing every entry of the matrix.
    pub fn of_matrix(m: &CMatrix) -> Field {
        if m.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Hermitian product, linear in the first argument.
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    y.dotc(x)
}

/// Frobenius Hermitian product of two matrices, linear in the first argument.
pub fn matrix_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vector_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// λI − A.
pub fn shifted(a: &CMatrix, lambda: C64) -> CMatrix {
    let mut m = -a.clone();
    for i in 0..a.nrows().min(a.ncols()) {
        m[(i, i)] += lambda;
    }
    m
}

/// Full singular value decomposition with singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    /// Left singular vectors as columns.
    pub left: CMatrix,
    /// Right singular vectors as columns (V, not V*).
    pub right: CMatrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    pub fn reconstruct(&self) -> CMatrix {
        let k = self.singular_values.len();
        let mut us = self.left.columns(0, k).into_owned();
        for (j, s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.right.columns(0, k).adjoint()
    }
}

pub fn svd(m: &CMatrix) -> Svd {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Svd {
            singular_values: Vec::new(),
            left: CMatrix::zeros(m.nrows(), 0),
            right: CMatrix::zeros(m.ncols(), 0),
        };
    }
    let fm = faer::Mat::<C64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    match fm.thin_svd() {
        Ok(dec) => {
            let (u, vr, s) = (dec.U(), dec.V(), dec.S().column_vector());
            Svd {
                singular_values: (0..k).map(|i| s[i].re).collect(),
                left: CMatrix::from_fn(m.nrows(), k, |r, j| u[(r, j)]),
                right: CMatrix::from_fn(m.ncols(), k, |r, j| vr[(r, j)]),
            }
        }
        Err(_) => svd_fallback(m, k),
    }
}

fn svd_fallback(m: &CMatrix, k: usize) -> Svd {
    let dec = m.clone().svd(true, true);
    let u = dec.u.expect("left vectors requested");
    let vt = dec.v_t.expect("right vectors requested");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| dec.singular_values[j].total_cmp(&dec.singular_values[i]));
    Svd {
        singular_values: order.iter().map(|&i| dec.singular_values[i]).collect(),
        left: CMatrix::from_fn(m.nrows(), k, |r, j| u[(r, order[j])]),
        right: CMatrix::from_fn(m.ncols(), k, |r, j| vt[(order[j], r)].conj()),
    }
}

pub fn operator_norm(m: &CMatrix) -> f64 {
    svd(m).sigma_max()
}

pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    svd(m).sigma_min()
}

/// Singularity test against a reference scale: `sigma_min ≤ 1e-12·scale`,
/// or `sigma_min ≤ 1e-300` when the scale vanishes.
pub fn is_singular_at_scale(sigma_min: f64, scale: f64) -> bool {
    if scale == 0.0 {
        sigma_min <= SINGULAR_ATOL
    } else {
        sigma_min <= SINGULAR_RTOL * scale
    }
}

pub fn is_numerically_singular(s: &Svd) -> bool {
    is_singular_at_scale(s.sigma_min(), s.sigma_max())
}

/// Rotates `v` so that its largest-modulus entry is real and positive
/// (lowest index wins a tie).
pub fn fix_phase(v: &CVector) -> CVector {
    let mut best: Option<(usize, f64)> = None;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        match best {
            Some((_, bm)) if m <= bm * (1.0 + PHASE_TIE) => {}
            _ if m > 0.0 => best = Some((i, m)),
            _ => {}
        }
    }
    match best {
        Some((i, m)) => {
            let rot = v[i].conj() / m;
            v.map(|z| z * rot)
        }
        None => v.clone(),
    }
}

pub fn normalized(v: &CVector) -> Result<CVector> {
    let n = vector_norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(v.map(|z| z / n))
}

/// Columns form an orthonormal basis of the Hermitian complement of `v`.
///
/// Built from the Householder reflector that maps v/‖v‖ to a multiple of e₁,
/// so the result depends only on `v`.
pub fn orthonormal_complement_basis(v: &CVector) -> Result<CMatrix> {
    let n = v.len();
    let x = normalized(v)?;
    let r = x[0].norm();
    let phase = if r > 0.0 {
        x[0] / r
    } else {
        C64::new(1.0, 0.0)
    };
    let mut w = x;
    w[0] += phase;
    let wn2 = w.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut h = CMatrix::identity(n, n);
    h -= (&w * w.adjoint()) * C64::new(2.0 / wn2, 0.0);
    Ok(h.columns(1, n - 1).into_owned())
}

/// B*(λI−A)B with B the complement basis of `v`.
pub fn projected_restriction(a: &CMatrix, lambda: C64, v: &CVector) -> Result<CMatrix> {
    check_square(a, v.len())?;
    let b = orthonormal_complement_basis(v)?;
    Ok(restrict(&shifted(a, lambda), &b))
}

pub(crate) fn restrict(m: &CMatrix, b: &CMatrix) -> CMatrix {
    b.adjoint() * m * b
}

pub(crate) fn check_square(a: &CMatrix, n: usize) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if a.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: n,
        });
    }
    Ok(())
}

/// Solves λ̇·v + (λI−A)·v̇ = w with v̇ ⟂ v.
///
/// The unknown v̇ is parametrized as B·y with B the complement basis, which
/// is the bordered system [[v, λI−A],[0, v*]] restricted to K × v^⊥.
pub fn bordered_solve(
    a: &CMatrix,
    lambda: C64,
    v: &CVector,
    w: &CVector,
) -> Result<(C64, CVector)> {
    check_square(a, v.len())?;
    check_square(a, w.len())?;
    let n = v.len();
    let b = orthonormal_complement_basis(v)?;
    let mut m = CMatrix::zeros(n, n);
    m.set_column(0, v);
    m.columns_mut(1, n - 1)
        .copy_from(&(shifted(a, lambda) * &b));
    let s = svd(&m);
    if is_numerically_singular(&s) {
        return Err(Error::NotInvertible);
    }
    let sol = m.lu().solve(w).ok_or(Error::NotInvertible)?;
    let y = sol.rows(1, n - 1).into_owned();
    Ok((sol[0], b * y))
}

/// Unit u with M*u ≈ 0, the left singular vector of the smallest singular value.
pub fn left_null_vector(m: &CMatrix) -> Result<CVector> {
    let s = svd(m);
    let scale = s.sigma_max().max(frobenius_norm(m));
    if !is_singular_at_scale(s.sigma_min(), scale) {
        return Err(Error::NoNullVector);
    }
    Ok(fix_phase(&last_left_vector(&s)))
}

/// Left singular vector for σ_min, without any rank test.
pub fn smallest_left_singular_vector(m: &CMatrix) -> CVector {
    fix_phase(&last_left_vector(&svd(m)))
}

fn last_left_vector(s: &Svd) -> CVector {
    let k = s.singular_values.len();
    s.left.column(k - 1).into_owned()
}

pub fn is_real_vector(v: &CVector) -> bool {
    v.iter().all(|z| z.im == 0.0)
}

pub fn is_real_matrix(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Positively oriented orthonormal frame (v, v₂, …, v_n) of Rⁿ as columns.
pub fn oriented_frame(v: &CVector) -> Result<DMatrix<f64>> {
    if !is_real_vector(v) {
        return Err(Error::Unsupported);
    }
    let n = v.len();
    let x = normalized(v)?.map(|z| z.re);
    let mut cols: Vec<DVector<f64>> = vec![x];
    for i in 0..n {
        if cols.len() == n {
            break;
        }
        let mut e = DVector::<f64>::zeros(n);
        e[i] = 1.0;
        for q in &cols {
            let p = q.dot(&e);
            e.axpy(-p, q, 1.0);
        }
        for q in &cols {
            let p = q.dot(&e);
            e.axpy(-p, q, 1.0);
        }
        let norm = e.norm();
        if norm > 1e-8 {
            cols.push(e / norm);
        }
    }
    let mut frame = DMatrix::from_columns(&cols);
    if frame.determinant() < 0.0 {
        let mut last = frame.column_mut(n - 1);
        last.neg_mut();
    }
    Ok(frame)
}

/// det(v, Lv₂, …, Lv_n) for `l` written in the frame returned by
/// [`oriented_frame`].
pub fn orientation_det(v: &CVector, l: &CMatrix) -> Result<f64> {
    if !is_real_vector(v) || !is_real_matrix(l) {
        return Err(Error::Unsupported);
    }
    let n = v.len();
    if l.nrows() != n - 1 || l.ncols() != n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: l.nrows(),
        });
    }
    let frame = oriented_frame(v)?;
    let rest = frame.columns(1, n - 1).into_owned();
    let lr = l.map(|z| z.re);
    let mut m = DMatrix::<f64>::zeros(n, n);
    m.set_column(0, &frame.column(0));
    m.columns_mut(1, n - 1).copy_from(&(&rest * lr));
    Ok(m.determinant())
}

/// Projected restriction of (A, λ, v) written in the oriented frame of `v`.
pub fn oriented_restriction(a: &CMatrix, lambda: C64, v: &CVector) -> Result<CMatrix> {
    check_square(a, v.len())?;
    let frame = oriented_frame(v)?;
    let n = v.len();
    let b = frame.columns(1, n - 1).map(real);
    Ok(restrict(&shifted(a, lambda), &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(n: usize, rows: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(
            n,
            rows.len() / n,
            &rows.iter().map(|&x| real(x)).collect::<Vec<_>>(),
        )
    }

    fn e(n: usize, i: usize) -> CVector {
        let mut v = CVector::zeros(n);
        v[i] = real(1.0);
        v
    }

    fn cmat_strategy(n: usize) -> impl Strategy<Value = CMatrix> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
            .prop_map(move |xs| CMatrix::from_iterator(n, n, xs.into_iter().map(|(a, b)| c(a, b))))
    }

    fn cvec_strategy(n: usize) -> impl Strategy<Value = CVector> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
            .prop_map(move |xs| CVector::from_iterator(n, xs.into_iter().map(|(a, b)| c(a, b))))
            .prop_filter("nonzero", |v| vector_norm(v) > 1e-3)
    }

    #[test]
    fn frobenius_examples() {
        assert!((frobenius_norm(&CMatrix::identity(3, 3)) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(frobenius_norm(&CMatrix::zeros(2, 2)), 0.0);
        assert!((frobenius_norm(&mat(2, &[1.0, 1.0, 1.0, 1.0])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&mat(2, &[1.0, 0.0, 0.0, -1.0])) - 1.0).abs() < 1e-14);
        assert_eq!(operator_norm(&CMatrix::zeros(2, 2)), 0.0);
        assert!((operator_norm(&mat(2, &[0.0, 2.0, 0.0, 0.0])) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn smallest_singular_value_examples() {
        assert!((smallest_singular_value(&CMatrix::identity(3, 3)) - 1.0).abs() < 1e-14);
        assert!(smallest_singular_value(&mat(2, &[1.0, 0.0, 0.0, 0.0])).abs() < 1e-15);
        let expect = ((3.0 - 5f64.sqrt()) / 2.0).sqrt();
        assert!((smallest_singular_value(&mat(2, &[1.0, 1.0, 0.0, 1.0])) - expect).abs() < 1e-14);
    }

    #[test]
    fn complement_of_e1_spans_the_rest() {
        let b = orthonormal_complement_basis(&e(3, 0)).unwrap();
        assert_eq!(b.ncols(), 2);
        for j in 0..2 {
            assert!(b[(0, j)].norm() < 1e-15);
        }
        let g = b.adjoint() * &b;
        assert!((g - CMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn complement_of_diagonal_vector() {
        let v = CVector::from_vec(vec![real(0.5f64.sqrt()), real(0.5f64.sqrt())]);
        let b = orthonormal_complement_basis(&v).unwrap();
        assert_eq!(b.ncols(), 1);
        assert!((b.adjoint() * &v)[0].norm() < 1e-15);
        assert!((vector_norm(&b.column(0).into_owned()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn complement_rejects_zero() {
        assert_eq!(
            orthonormal_complement_basis(&CVector::zeros(3)),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn projected_restriction_examples() {
        let a = mat(2, &[1.0, 0.0, 0.0, -1.0]);
        let p = projected_restriction(&a, real(1.0), &e(2, 0)).unwrap();
        assert!((p[(0, 0)] - real(2.0)).norm() < 1e-15);

        let lam = c(0.3, -0.2);
        let a = CMatrix::identity(3, 3) * lam;
        assert!(projected_restriction(&a, lam, &e(3, 1)).unwrap().norm() < 1e-15);

        let d = [c(0.5, 0.1), c(-1.0, 0.0), c(0.0, 2.0)];
        let a = CMatrix::from_diagonal(&CVector::from_row_slice(&[c(0.7, 0.0), d[0], d[1], d[2]]));
        let p = projected_restriction(&a, c(0.7, 0.0), &e(4, 0)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j {
                    c(0.7, 0.0) - d[i]
                } else {
                    C64::new(0.0, 0.0)
                };
                assert!((p[(i, j)] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bordered_solve_examples() {
        let a = mat(2, &[2.0, 0.0, 0.0, 1.0]);
        let (ld, vd) = bordered_solve(&a, real(2.0), &e(2, 0), &CVector::zeros(2)).unwrap();
        assert_eq!(ld.norm(), 0.0);
        assert_eq!(vector_norm(&vd), 0.0);

        let (ld, vd) = bordered_solve(&a, real(2.0), &e(2, 0), &e(2, 1)).unwrap();
        assert!(ld.norm() < 1e-15);
        assert!((vd - e(2, 1)).norm() < 1e-15);
    }

    #[test]
    fn bordered_solve_singular() {
        let a = CMatrix::zeros(3, 3);
        assert_eq!(
            bordered_solve(&a, real(0.0), &e(3, 0), &e(3, 1)),
            Err(Error::NotInvertible)
        );
    }

    #[test]
    fn left_null_vector_examples() {
        let u = left_null_vector(&mat(2, &[0.0, 0.0, 0.0, 1.0])).unwrap();
        assert!((u - e(2, 0)).norm() < 1e-15);
        let u = left_null_vector(&mat(2, &[0.0, 1.0, 0.0, 0.0])).unwrap();
        assert!((u - e(2, 1)).norm() < 1e-15);
        assert_eq!(
            left_null_vector(&CMatrix::identity(2, 2)),
            Err(Error::NoNullVector)
        );
    }

    #[test]
    fn phase_rule_picks_lowest_index_on_ties() {
        let v = CVector::from_vec(vec![c(0.0, 1.0), c(-1.0, 0.0)]);
        let w = fix_phase(&v);
        assert!((w[0] - real(1.0)).norm() < 1e-15);
        assert!((w[1] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn orientation_examples() {
        let l = CMatrix::identity(2, 2);
        assert!((orientation_det(&e(3, 0), &l).unwrap() - 1.0).abs() < 1e-15);
        let l = mat(2, &[-1.0, 0.0, 0.0, 1.0]);
        assert!((orientation_det(&e(3, 0), &l).unwrap() + 1.0).abs() < 1e-15);
        let v = CVector::from_vec(vec![c(0.0, 1.0), real(0.0), real(0.0)]);
        assert_eq!(orientation_det(&v, &l), Err(Error::Unsupported));
    }

    #[test]
    fn oriented_frame_is_special_orthogonal() {
        let v = CVector::from_vec(vec![real(0.3), real(-0.4), real(0.2), real(0.8)]);
        let f = oriented_frame(&v).unwrap();
        assert!((f.transpose() * &f - DMatrix::<f64>::identity(4, 4)).norm() < 1e-13);
        assert!((f.determinant() - 1.0).abs() < 1e-13);
        let x = normalized(&v).unwrap().map(|z| z.re);
        assert!((f.column(0) - x).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn svd_reconstructs_and_sorts(m in cmat_strategy(4)) {
            let s = svd(&m);
            prop_assert!((s.reconstruct() - &m).norm() <= 1e-12 * frobenius_norm(&m).max(1e-300));
            prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(*s.singular_values.last().unwrap() >= 0.0);
        }

        #[test]
        fn inverse_norm_times_sigma_min_is_one(m in cmat_strategy(3)) {
            let smin = smallest_singular_value(&m);
            prop_assume!(smin > 1e-6);
            let inv = m.clone().try_inverse().unwrap();
            prop_assert!((operator_norm(&inv) * smin - 1.0).abs() < 1e-10);
        }

        #[test]
        fn complement_basis_is_orthonormal(v in cvec_strategy(5)) {
            let b = orthonormal_complement_basis(&v).unwrap();
            prop_assert!((b.adjoint() * &v).norm() < 1e-14 * vector_norm(&v));
            prop_assert!((b.adjoint() * &b - CMatrix::identity(4, 4)).norm() < 1e-14);
            prop_assert_eq!(orthonormal_complement_basis(&v).unwrap(), b);
        }

        #[test]
        fn restriction_is_basis_covariant(a in cmat_strategy(4), v in cvec_strategy(4), g in cmat_strategy(3), lr in -1.0f64..1.0) {
            let lam = real(lr);
            let b = orthonormal_complement_basis(&v).unwrap();
            let q = g.qr().q();
            let b2 = &b * q;
            let p1 = projected_restriction(&a, lam, &v).unwrap();
            let p2 = restrict(&shifted(&a, lam), &b2);
            let s1 = svd(&p1).singular_values;
            let s2 = svd(&p2).singular_values;
            for (x, y) in s1.iter().zip(&s2) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn bordered_solve_matches_dense_lu(a in cmat_strategy(4), v in cvec_strategy(4), w in cvec_strategy(4), lr in -1.0f64..1.0, li in -1.0f64..1.0) {
            let lam = c(lr, li);
            let n = 4;
            let mut m = CMatrix::zeros(n + 1, n + 1);
            for i in 0..n {
                m[(i, 0)] = v[i];
                m[(n, i + 1)] = v[i].conj();
            }
            m.view_mut((0, 1), (n, n)).copy_from(&shifted(&a, lam));
            prop_assume!(smallest_singular_value(&m) > 1e-4);
            let mut rhs = CVector::zeros(n + 1);
            rhs.rows_mut(0, n).copy_from(&w);
            let oracle = m.lu().solve(&rhs).unwrap();
            let (ld, vd) = bordered_solve(&a, lam, &v, &w).unwrap();
            prop_assert!((ld - oracle[0]).norm() < 1e-10);
            prop_assert!((&vd - oracle.rows(1, n)).norm() < 1e-10);
            prop_assert!(inner(&vd, &v).norm() < 1e-14 * vector_norm(&vd).max(1.0));
            let resid = v * ld + shifted(&a, lam) * &vd - &w;
            prop_assert!(vector_norm(&resid) <= 1e-10 * vector_norm(&w));
        }
    }
}
