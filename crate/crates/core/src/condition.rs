//! Condition operator and condition numbers of eigentriples, distance to the
//! ill-posed fiber, and the constants governing how μ varies along V.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_norm, inner, is_singular_at_scale, matrix_inner, orthonormal_complement_basis, real,
    restrict, shifted, smallest_left_singular_vector, svd, vector_norm, CMatrix, CVector, C64,
};
use crate::projective::EigenTriple;

/// (1 + √5)·2√2, the Lipschitz-type constant of the sensitivity estimates.
pub const ALPHA: f64 = (1.0 + 2.236_067_977_499_79) * 2.0 * SQRT_2;
/// Relative tolerance for ⟨Ḃ, A⟩_F = 0.
pub const ORTHOGONALITY_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub well_posed: bool,
    pub mu_lambda: Option<f64>,
    pub mu_v: Option<f64>,
    pub mu: Option<f64>,
    #[serde(serialize_with = "crate::io::ser_vector")]
    pub left_eigenvector: CVector,
    pub dist_to_illposed_fiber_affine: f64,
}

/// Singular values of the projected restriction and the scale used to judge them.
struct Restriction {
    m: CMatrix,
    basis: CMatrix,
    sigma_min: f64,
    scale: f64,
}

fn restriction(t: &EigenTriple) -> Result<Restriction> {
    let basis = orthonormal_complement_basis(&t.v)?;
    let m = restrict(&shifted(&t.a, t.lambda), &basis);
    let s = svd(&m);
    let scale = s.sigma_max().max(frobenius_norm(&t.a));
    Ok(Restriction {
        m,
        basis,
        sigma_min: s.sigma_min(),
        scale,
    })
}

/// True iff the projected restriction is numerically invertible.
///
/// The reference scale is max(σ_max, ‖A‖_F): for n = 2 the restriction is
/// 1×1 and its own σ_max carries no information about the problem scale.
pub fn is_well_posed(t: &EigenTriple) -> bool {
    match restriction(t) {
        Ok(r) => !is_singular_at_scale(r.sigma_min, r.scale),
        Err(_) => false,
    }
}

fn well_posed_restriction(t: &EigenTriple) -> Result<Restriction> {
    let r = restriction(t)?;
    if is_singular_at_scale(r.sigma_min, r.scale) {
        return Err(Error::IllPosed);
    }
    Ok(r)
}

/// ‖A‖_F / σ_min(projected restriction).
pub fn mu_v(t: &EigenTriple) -> Result<f64> {
    let r = well_posed_restriction(t)?;
    Ok(frobenius_norm(&t.a) / r.sigma_min)
}

/// Left eigenvector for λ: the left singular vector of λI − A for σ_min.
pub fn left_eigenvector(t: &EigenTriple) -> CVector {
    smallest_left_singular_vector(&shifted(&t.a, t.lambda))
}

/// (1+|λ|²/‖A‖_F²)^{-1}·(1 + ‖v‖²‖u‖²/|⟨v,u⟩|²)^{1/2}.
pub fn mu_lambda(t: &EigenTriple) -> Result<f64> {
    well_posed_restriction(t)?;
    let u = left_eigenvector(t);
    let vu = inner(&t.v, &u).norm();
    if vu == 0.0 {
        return Err(Error::IllPosed);
    }
    let q = (vector_norm(&t.v) * vector_norm(&u) / vu).powi(2);
    Ok((1.0 + q).sqrt() / (1.0 + lambda_ratio(t)))
}

/// max(1, μ_v).
pub fn mu(t: &EigenTriple) -> Result<f64> {
    Ok(mu_v(t)?.max(1.0))
}

/// |λ|²/‖A‖_F².
pub fn lambda_ratio(t: &EigenTriple) -> f64 {
    t.lambda.norm_sqr() / frobenius_norm(&t.a).powi(2)
}

pub fn condition_report(t: &EigenTriple) -> ConditionReport {
    let well_posed = is_well_posed(t);
    let fiber = t
        .normalize()
        .ok()
        .and_then(|n| restriction(&n).ok())
        .map_or(0.0, |r| r.sigma_min);
    ConditionReport {
        well_posed,
        mu_lambda: mu_lambda(t).ok(),
        mu_v: mu_v(t).ok(),
        mu: mu(t).ok(),
        left_eigenvector: left_eigenvector(t),
        dist_to_illposed_fiber_affine: fiber,
    }
}

/// Tangent of the solution map in the direction Ḃ ⟂ A.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub a_dot: CMatrix,
    pub lambda_dot: C64,
    pub v_dot: CVector,
}

/// Image (Ȧ, λ̇, v̇) of Ḃ under the condition operator at t.
pub fn condition_operator(t: &EigenTriple, b_dot: &CMatrix) -> Result<Tangent> {
    let r = well_posed_restriction(t)?;
    if b_dot.shape() != t.a.shape() {
        return Err(Error::DimensionMismatch {
            expected: t.a.nrows(),
            found: b_dot.nrows(),
        });
    }
    let na = frobenius_norm(&t.a);
    if matrix_inner(b_dot, &t.a).norm() > ORTHOGONALITY_RTOL * frobenius_norm(b_dot).max(na) * na {
        return Err(Error::NotOrthogonal);
    }
    let u = left_eigenvector(t);
    let bv = b_dot * &t.v;
    let lambda_dot = inner(&bv, &u) / (inner(&t.v, &u) * (1.0 + lambda_ratio(t)));
    let a_dot = b_dot - &t.a * (lambda_dot * t.lambda.conj() / (na * na));
    let rhs = r.basis.adjoint() * &bv;
    let y = r.m.clone().lu().solve(&rhs).ok_or(Error::IllPosed)?;
    Ok(Tangent {
        a_dot,
        lambda_dot,
        v_dot: &r.basis * y,
    })
}

/// Hermitian projection of a matrix direction onto A^⊥.
pub fn project_onto_complement(a: &CMatrix, dir: &CMatrix) -> CMatrix {
    let na2 = frobenius_norm(a).powi(2);
    dir - a * (matrix_inner(dir, a) / na2)
}

/// σ_min of the projected restriction at the normalized representative.
pub fn dist_to_illposed_fiber(t: &EigenTriple) -> Result<f64> {
    let n = t.normalize()?;
    Ok(well_posed_restriction(&n)?.sigma_min)
}

/// (B, λ, v) with B = A plus the Eckart–Young correction that makes the
/// projected restriction singular. Bv = λv is preserved.
pub fn nearest_illposed_candidate(t: &EigenTriple) -> Result<EigenTriple> {
    let r = well_posed_restriction(t)?;
    let s = svd(&r.m);
    let k = s.singular_values.len() - 1;
    let ul = s.left.column(k).into_owned();
    let vr = s.right.column(k).into_owned();
    let corr = (&ul * vr.adjoint()) * real(s.singular_values[k]);
    let b = &t.a + &r.basis * corr * r.basis.adjoint();
    EigenTriple::new_unchecked(b, t.lambda, t.v.clone())
}

/// C_ε = arctan(ε/(√2 + α(1+ε)))/(1+ε).
pub fn sensitivity_constant(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::OutOfRange(format!(
            "epsilon = {epsilon} must be positive"
        )));
    }
    Ok((epsilon / (SQRT_2 + ALPHA * (1.0 + epsilon))).atan() / (1.0 + epsilon))
}

/// μ_v(A+αI, λ+α, v) = (‖A+αI‖_F/‖A‖_F)·μ_v(A, λ, v).
pub fn mu_translation(t: &EigenTriple, alpha: C64) -> Result<f64> {
    let shifted_a = shifted(&(-&t.a), alpha);
    Ok(frobenius_norm(&shifted_a) / frobenius_norm(&t.a) * mu_v(t)?)
}

/// The shift −tr(A)/n minimizing ‖A + αI‖_F.
pub fn optimal_translation(a: &CMatrix) -> C64 {
    -a.trace() / real(a.nrows() as f64)
}

/// ‖(DF_A(λ,v)|_{K×v⊥})^{-1}‖ = 1/σ_min([v | (λI−A)B]).
pub fn newton_inverse_norm(t: &EigenTriple) -> Result<f64> {
    let n = t.dim();
    let basis = orthonormal_complement_basis(&t.v)?;
    let mut m = CMatrix::zeros(n, n);
    m.set_column(0, &t.v);
    m.columns_mut(1, n - 1)
        .copy_from(&(shifted(&t.a, t.lambda) * basis));
    let s = svd(&m).sigma_min();
    if s == 0.0 {
        return Err(Error::NotInvertible);
    }
    Ok(1.0 / s)
}

/// ‖(Π_{v⊥}|_{v′⊥})^{-1}‖ computed from the two complement bases.
pub fn complement_projection_inverse_norm(v: &CVector, v2: &CVector) -> Result<f64> {
    let b = orthonormal_complement_basis(v)?;
    let b2 = orthonormal_complement_basis(v2)?;
    let s = svd(&(b.adjoint() * b2)).sigma_min();
    if s == 0.0 {
        return Err(Error::NotInvertible);
    }
    Ok(1.0 / s)
}

/// D²F_A(λ,v)(λ̇,v̇)(η̇,u̇) = λ̇u̇ + η̇v̇.
pub fn second_derivative(
    lambda_dot: C64,
    v_dot: &CVector,
    eta_dot: C64,
    u_dot: &CVector,
) -> CVector {
    u_dot * lambda_dot + v_dot * eta_dot
}

/// Upper bound (1+√2 d)μ_v/(1−αμ_v d) on μ_v at a point at tangent distance
/// d; `None` outside the radius 1/(α μ_v).
pub fn mu_v_perturbation_bound(mu_v: f64, d_t2: f64) -> Option<f64> {
    let den = 1.0 - ALPHA * mu_v * d_t2;
    (den > 0.0).then(|| (1.0 + SQRT_2 * d_t2) * mu_v / den)
}
