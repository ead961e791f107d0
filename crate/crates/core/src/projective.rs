//! Eigentriples, projective distances and the comparison bounds between them.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use crate::error::{Error, Result};
use crate::linalg::{
    check_square, fix_phase, frobenius_norm, normalized, shifted, vector_norm, CMatrix, CVector,
    Field, C64,
};

/// Residual tolerance for membership in the solution variety, relative to ‖A‖_F·‖v‖.
pub const RESIDUAL_RTOL: f64 = 1e-10;
/// Tolerance for "‖A‖_F = 1" checks.
pub const NORMALIZED_TOL: f64 = 1e-12;

/// A point (A, λ, v) of the solution variety.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenTriple {
    pub a: CMatrix,
    pub lambda: C64,
    pub v: CVector,
    pub field: Field,
}

impl EigenTriple {
    /// Validates shape, nonzero representatives and the residual invariant.
    pub fn new(a: CMatrix, lambda: C64, v: CVector) -> Result<Self> {
        let t = Self::new_unchecked(a, lambda, v)?;
        let res = t.relative_residual();
        if !(res <= RESIDUAL_RTOL) {
            return Err(Error::NotOnVariety { residual: res });
        }
        Ok(t)
    }

    /// Shape and nonzero checks only; for points near, but not on, the variety.
    pub fn new_unchecked(a: CMatrix, lambda: C64, v: CVector) -> Result<Self> {
        check_square(&a, v.len())?;
        if v.len() < 2 {
            return Err(Error::OutOfRange("dimension must be at least 2".into()));
        }
        if frobenius_norm(&a) == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        if vector_norm(&v) == 0.0 {
            return Err(Error::ZeroVector);
        }
        let is_real =
            a.iter().all(|z| z.im == 0.0) && lambda.im == 0.0 && v.iter().all(|z| z.im == 0.0);
        let field = if is_real { Field::Real } else { Field::Complex };
        Ok(Self {
            a,
            lambda,
            v,
            field,
        })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn residual(&self) -> f64 {
        vector_norm(&(shifted(&self.a, self.lambda) * &self.v))
    }

    pub fn relative_residual(&self) -> f64 {
        self.residual() / (frobenius_norm(&self.a) * vector_norm(&self.v))
    }

    pub fn is_normalized(&self) -> bool {
        (frobenius_norm(&self.a) - 1.0).abs() <= NORMALIZED_TOL
            && (vector_norm(&self.v) - 1.0).abs() <= NORMALIZED_TOL
    }

    /// Representative with ‖A‖_F = 1, ‖v‖ = 1 and the phase rule applied to v.
    pub fn normalize(&self) -> Result<Self> {
        let s = frobenius_norm(&self.a);
        if s == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let v = fix_phase(&normalized(&self.v)?);
        Ok(Self {
            a: self.a.map(|z| z / s),
            lambda: self.lambda / s,
            v,
            field: self.field,
        })
    }

    /// (UAU*, λ, Uv) for unitary U.
    pub fn act(&self, u: &CMatrix) -> Self {
        let field = if self.field == Field::Real && u.iter().all(|z| z.im == 0.0) {
            Field::Real
        } else {
            Field::Complex
        };
        Self {
            a: u * &self.a * u.adjoint(),
            lambda: self.lambda,
            v: u * &self.v,
            field,
        }
    }

    /// The pair (A, λ) flattened into K^{n²+1}.
    pub fn pair_vector(&self) -> CVector {
        pair_vector(&self.a, self.lambda)
    }
}

pub fn pair_vector(a: &CMatrix, lambda: C64) -> CVector {
    let mut out = CVector::zeros(a.len() + 1);
    out.rows_mut(0, a.len()).copy_from_slice(a.as_slice());
    out[a.len()] = lambda;
    out
}

/// (cos, sin) of the projective angle between the classes of x and y.
fn angle_parts(x: &[C64], y: &[C64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ny = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ZeroVector);
    }
    let p: C64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a / nx) * (b / ny).conj())
        .sum();
    let sin2: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b / ny - a / nx * p.conj()).norm_sqr())
        .sum();
    Ok((p.norm().min(1.0), sin2.sqrt().min(1.0)))
}

/// Projective angle in [0, π/2].
///
/// Evaluated as atan2(sin, cos) so that small angles keep full relative accuracy.
pub fn dist_p(x: &[C64], y: &[C64]) -> Result<f64> {
    let (cos, sin) = angle_parts(x, y)?;
    Ok(sin.atan2(cos).min(FRAC_PI_2))
}

/// Tangent of the projective angle.
pub fn dist_t(x: &[C64], y: &[C64]) -> Result<f64> {
    let (cos, sin) = angle_parts(x, y)?;
    if cos <= f64::EPSILON * sin {
        return Err(Error::Infinite);
    }
    Ok(sin / cos)
}

pub fn dist_p_vec(x: &CVector, y: &CVector) -> Result<f64> {
    dist_p(x.as_slice(), y.as_slice())
}

/// Angle between the classes of two matrices.
pub fn dist_p_mat(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    dist_p(a.as_slice(), b.as_slice())
}

/// Product distance on P(K^{n×n}×K)×P(K^n).
pub fn dist_p2(t1: &EigenTriple, t2: &EigenTriple) -> Result<f64> {
    let dpair = dist_p(t1.pair_vector().as_slice(), t2.pair_vector().as_slice())?;
    let dvec = dist_p_vec(&t1.v, &t2.v)?;
    Ok(dpair.hypot(dvec))
}

/// Product of tangent distances, (d_T(pair)² + d_T(v)²)^{1/2}.
pub fn dist_t2(t1: &EigenTriple, t2: &EigenTriple) -> Result<f64> {
    let dpair = dist_t(t1.pair_vector().as_slice(), t2.pair_vector().as_slice())?;
    let dvec = dist_t(t1.v.as_slice(), t2.v.as_slice())?;
    Ok(dpair.hypot(dvec))
}

/// (|λ₀−λ|² + d_P(v₀,v)²)^{1/2}, meaningful for ‖A‖_F = 1.
pub fn affine_distance(lambda0: C64, v0: &CVector, lambda: C64, v: &CVector) -> Result<f64> {
    Ok((lambda0 - lambda).norm().hypot(dist_p_vec(v0, v)?))
}

/// tan(θ)/θ, the factor in d_P ≤ d_T ≤ (tan θ/θ)·d_P for d_P ≤ θ.
pub fn dist_ratio_bound(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::OutOfRange(format!(
            "theta = {theta} not in (0, pi/2)"
        )));
    }
    Ok(theta.tan() / theta)
}

/// β_c = (1 − c²/2)^{-1/2} for 0 ≤ c < √2.
pub fn beta(c: f64) -> Result<f64> {
    if !(0.0..SQRT_2).contains(&c) {
        return Err(Error::OutOfRange(format!("c = {c} not in [0, sqrt 2)")));
    }
    Ok((1.0 - c * c / 2.0).powf(-0.5))
}

/// R_θ = (√2 / cos(θ + π/4)³)^{1/2} for 0 ≤ θ < π/4.
pub fn r_theta(theta: f64) -> Result<f64> {
    if !(0.0..FRAC_PI_4).contains(&theta) {
        return Err(Error::OutOfRange(format!(
            "theta = {theta} not in [0, pi/4)"
        )));
    }
    Ok((SQRT_2 / (theta + FRAC_PI_4).cos().powi(3)).sqrt())
}

/// (β_c, R_θ) with c = |λ − λ′|.
pub fn lambda_distance_bounds(lambda: C64, lambda2: C64, theta: f64) -> Result<(f64, f64)> {
    Ok((beta((lambda - lambda2).norm())?, r_theta(theta)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real};
    use crate::random::{
        point_at_angle, random_triple, random_unit_vector, random_unitary, TrialRng,
    };
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn e(n: usize, i: usize) -> CVector {
        let mut v = CVector::zeros(n);
        v[i] = real(1.0);
        v
    }

    #[test]
    fn dist_p_examples() {
        let x = e(2, 0);
        assert!((dist_p_vec(&x, &e(2, 1)).unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(dist_p_vec(&x, &(&x * real(2.0))).unwrap(), 0.0);
        let y = (e(2, 0) + e(2, 1)) * real(0.5f64.sqrt());
        assert!((dist_p_vec(&x, &y).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!(matches!(
            dist_p_vec(&x, &e(3, 0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dist_p_is_accurate_for_tiny_angles() {
        let x = e(2, 0);
        let y = CVector::from_vec(vec![real(1.0), real(1e-12)]);
        assert!((dist_p_vec(&x, &y).unwrap() - 1e-12).abs() < 1e-24);
    }

    #[test]
    fn dist_t_examples() {
        let x = e(2, 0);
        assert_eq!(dist_t(x.as_slice(), x.as_slice()).unwrap(), 0.0);
        let y = e(2, 0) + e(2, 1);
        assert!((dist_t(x.as_slice(), y.as_slice()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            dist_t(x.as_slice(), e(2, 1).as_slice()),
            Err(Error::Infinite)
        );
    }

    #[test]
    fn dist_t_equals_affine_norm_on_orthogonal_offsets() {
        let w = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8), real(0.0)]);
        let d = CVector::from_vec(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.3, -0.1)]);
        let wp = &w - &d;
        let expect = vector_norm(&d) / vector_norm(&w);
        assert!((dist_t(w.as_slice(), wp.as_slice()).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn ratio_bound_examples() {
        assert!((dist_ratio_bound(1e-8).unwrap() - 1.0).abs() < 1e-12);
        assert!((dist_ratio_bound(PI / 4.0).unwrap() - 4.0 / PI).abs() < 1e-15);
        assert!(dist_ratio_bound(0.0).is_err());
        assert!(dist_ratio_bound(PI / 2.0).is_err());
    }

    #[test]
    fn bound_constant_examples() {
        assert_eq!(beta(0.0).unwrap(), 1.0);
        assert!((r_theta(0.0).unwrap() - 2.0).abs() < 1e-14);
        assert!(beta(1.5).is_err());
        assert!(r_theta(PI / 4.0).is_err());
    }

    #[test]
    fn dist_p2_examples() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![real(1.0), real(-1.0)]));
        let t = EigenTriple::new(a.clone(), real(1.0), e(2, 0)).unwrap();
        assert!(dist_p2(&t, &t).unwrap() < 1e-15);
        let s = EigenTriple::new_unchecked(a.clone(), real(1.0), e(2, 1)).unwrap();
        assert!((dist_p2(&t, &s).unwrap() - PI / 2.0).abs() < 1e-15);

        // Both factors at angle π/4.
        let b = CMatrix::from_element(2, 2, real(0.0));
        let t1 = EigenTriple::new_unchecked(b.clone(), real(1.0), e(2, 0));
        assert_eq!(t1, Err(Error::ZeroMatrix));
        let a1 = CMatrix::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(0.0)]);
        let t1 = EigenTriple::new_unchecked(a1.clone(), real(0.0), e(2, 0)).unwrap();
        let t2 = EigenTriple::new_unchecked(a1, real(1.0), e(2, 0) + e(2, 1)).unwrap();
        assert!((dist_p2(&t1, &t2).unwrap() - PI / (2.0 * SQRT_2)).abs() < 1e-15);
    }

    #[test]
    fn normalize_examples() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![real(3.0), real(4.0)]));
        let t = EigenTriple::new(a, real(3.0), e(2, 0) * c(0.0, 2.0)).unwrap();
        let n = t.normalize().unwrap();
        assert!((frobenius_norm(&n.a) - 1.0).abs() < 1e-15);
        assert!(n.is_normalized());
        assert!(dist_p2(&t, &n).unwrap() < 1e-15);
        assert_eq!(n.normalize().unwrap(), n);
        assert!(n.relative_residual() <= RESIDUAL_RTOL);
        assert!((n.v[0] - real(1.0)).norm() < 1e-15);
    }

    #[test]
    fn triple_rejects_off_variety_points() {
        let a = CMatrix::identity(2, 2);
        assert!(matches!(
            EigenTriple::new(a, real(2.0), e(2, 0)),
            Err(Error::NotOnVariety { .. })
        ));
    }

    /// min over scalar multiples ŷ of ‖x − ŷ‖/‖x‖, sampled over phases.
    fn sin_oracle(x: &CVector, y: &CVector) -> f64 {
        let nx = vector_norm(x);
        let ny2 = vector_norm(y).powi(2);
        let mut best = f64::INFINITY;
        let steps = 20_000;
        for k in 0..steps {
            let phi = 2.0 * PI * k as f64 / steps as f64;
            let yr = y * C64::from_polar(1.0, phi);
            let r = crate::linalg::inner(x, &yr).re.max(0.0) / ny2;
            best = best.min(vector_norm(&(x - &yr * real(r))) / nx);
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn triangle_inequality(seed in any::<u64>()) {
            let mut rng = TrialRng::new(seed);
            let n = 4;
            let x = random_unit_vector(&mut rng, n, Field::Complex);
            let y = random_unit_vector(&mut rng, n, Field::Complex);
            let z = random_unit_vector(&mut rng, n, Field::Complex);
            let dxy = dist_p_vec(&x, &y).unwrap();
            let dyz = dist_p_vec(&y, &z).unwrap();
            let dxz = dist_p_vec(&x, &z).unwrap();
            prop_assert!(dxz <= dxy + dyz + 1e-12);
            prop_assert!((dxy - dist_p_vec(&y, &x).unwrap()).abs() < 1e-15);

            let t1 = random_triple(&mut rng, n, Field::Complex);
            let t2 = random_triple(&mut rng, n, Field::Complex);
            let t3 = random_triple(&mut rng, n, Field::Complex);
            let d12 = dist_p2(&t1, &t2).unwrap();
            let d23 = dist_p2(&t2, &t3).unwrap();
            let d13 = dist_p2(&t1, &t3).unwrap();
            prop_assert!(d13 <= d12 + d23 + 1e-12);
        }

        #[test]
        fn unitary_invariance_of_dist_p2(seed in any::<u64>()) {
            let mut rng = TrialRng::new(seed);
            let n = 5;
            let t1 = random_triple(&mut rng, n, Field::Complex);
            let t2 = random_triple(&mut rng, n, Field::Complex);
            let u = random_unitary(&mut rng, n, Field::Complex);
            let d = dist_p2(&t1, &t2).unwrap();
            let du = dist_p2(&t1.act(&u), &t2.act(&u)).unwrap();
            prop_assert!((d - du).abs() < 1e-10);
        }

        #[test]
        fn sine_of_angle_is_relative_distance_to_line(seed in any::<u64>()) {
            let mut rng = TrialRng::new(seed);
            let x = random_unit_vector(&mut rng, 3, Field::Complex) * real(2.5);
            let y = random_unit_vector(&mut rng, 3, Field::Complex);
            let s = dist_p_vec(&x, &y).unwrap().sin();
            prop_assert!((s - sin_oracle(&x, &y)).abs() < 1e-6);
        }

        #[test]
        fn ratio_bound_brackets_tangent_distance(seed in any::<u64>(), theta in 0.01f64..1.5) {
            let mut rng = TrialRng::new(seed);
            let x = random_unit_vector(&mut rng, 4, Field::Complex);
            let angle = theta * rng.uniform();
            let y = point_at_angle(&mut rng, &x, angle, Field::Complex) * rng.unit_phase();
            let dp = dist_p_vec(&x, &y).unwrap();
            prop_assert!(dp <= theta + 1e-15);
            let dt = dist_t(x.as_slice(), y.as_slice()).unwrap();
            prop_assert!(dp <= dt + 1e-15);
            prop_assert!(dt <= dist_ratio_bound(theta).unwrap() * dp + 1e-12);
        }
    }
}
