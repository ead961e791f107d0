//! The Newton map on K × P(Kⁿ) for a fixed matrix, its iterates and the
//! certification of approximate solutions.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use serde::Serialize;

use crate::condition::mu;
use crate::error::{Error, Result};
use crate::linalg::{
    bordered_solve, fix_phase, frobenius_norm, inner, is_singular_at_scale, normalized,
    orthonormal_complement_basis, restrict, shifted, svd, CMatrix, CVector, C64,
};
use crate::projective::{
    affine_distance, beta, dist_p, dist_p_vec, pair_vector, r_theta, EigenTriple, NORMALIZED_TOL,
};

/// Radius constant of the projective attraction basin c₀/μ.
pub const GAMMA_C0: f64 = 0.0739;
/// Radius constant of the affine attraction basin c₀/μ (‖A‖_F = 1).
pub const GAMMA_C0_AFFINE: f64 = 0.288;
/// Additive slack in the certification inequalities.
pub const CERTIFY_SLACK: f64 = 1e-13;
/// Default number of Newton steps checked by the certification.
pub const DEFAULT_K_CHECK: usize = 4;

/// One step (λ − λ̇, v − v̇) of the Newton map, without renormalization.
///
/// v̇ solves the projected system on v^⊥ and
/// λ̇ = ⟨(λI−A)(v−v̇), v⟩/⟨v,v⟩.
pub fn newton_step(a: &CMatrix, lambda: C64, v: &CVector) -> Result<(C64, CVector)> {
    let basis = orthonormal_complement_basis(v)?;
    let sh = shifted(a, lambda);
    let m = restrict(&sh, &basis);
    let s = svd(&m);
    if is_singular_at_scale(s.sigma_min(), s.sigma_max().max(frobenius_norm(a))) {
        return Err(Error::NotInvertible);
    }
    let rhs = basis.adjoint() * (&sh * v);
    let y = m.lu().solve(&rhs).ok_or(Error::NotInvertible)?;
    let v_dot = basis * y;
    let v_new = v - &v_dot;
    let lambda_dot = inner(&(&sh * &v_new), v) / inner(v, v);
    Ok((lambda - lambda_dot, v_new))
}

/// The same step through the bordered system with right-hand side (λI−A)v.
pub fn newton_step_bordered(a: &CMatrix, lambda: C64, v: &CVector) -> Result<(C64, CVector)> {
    let w = shifted(a, lambda) * v;
    let (ld, vd) = bordered_solve(a, lambda, v, &w)?;
    Ok((lambda - ld, v - vd))
}

/// Newton step followed by ‖v‖ = 1 and the phase rule.
pub fn newton_map(a: &CMatrix, lambda: C64, v: &CVector) -> Result<(C64, CVector)> {
    let (l, w) = newton_step(a, lambda, v)?;
    Ok((l, fix_phase(&normalized(&w)?)))
}

/// d_P2 between (A, λ, v) and a target triple.
pub fn distance_to(a: &CMatrix, lambda: C64, v: &CVector, target: &EigenTriple) -> Result<f64> {
    let dp = dist_p(
        pair_vector(a, lambda).as_slice(),
        target.pair_vector().as_slice(),
    )?;
    Ok(dp.hypot(dist_p_vec(v, &target.v)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct NewtonIterate {
    #[serde(serialize_with = "crate::io::ser_scalar")]
    pub lambda: C64,
    #[serde(serialize_with = "crate::io::ser_vector")]
    pub v: CVector,
}

#[derive(Debug, Clone, Serialize)]
pub struct NewtonTrace {
    /// Start followed by one entry per defined step.
    pub iterates: Vec<NewtonIterate>,
    /// d_P2 of each iterate to the reference, when one was given.
    pub distances_to_target: Vec<f64>,
    /// One flag per attempted step.
    pub defined: Vec<bool>,
    /// Index (1-based) of the first step at which the map was undefined.
    pub undefined_at: Option<usize>,
}

pub fn newton_iterate(
    a: &CMatrix,
    lambda0: C64,
    v0: &CVector,
    k_max: usize,
    reference: Option<&EigenTriple>,
) -> Result<NewtonTrace> {
    let mut lambda = lambda0;
    let mut v = fix_phase(&normalized(v0)?);
    let mut trace = NewtonTrace {
        iterates: vec![NewtonIterate {
            lambda,
            v: v.clone(),
        }],
        distances_to_target: Vec::new(),
        defined: Vec::new(),
        undefined_at: None,
    };
    if let Some(r) = reference {
        trace
            .distances_to_target
            .push(distance_to(a, lambda, &v, r)?);
    }
    for k in 1..=k_max {
        match newton_map(a, lambda, &v) {
            Ok((l, w)) => {
                lambda = l;
                v = w;
                trace.defined.push(true);
                trace.iterates.push(NewtonIterate {
                    lambda,
                    v: v.clone(),
                });
                if let Some(r) = reference {
                    trace
                        .distances_to_target
                        .push(distance_to(a, lambda, &v, r)?);
                }
            }
            Err(_) => {
                trace.defined.push(false);
                trace.undefined_at = Some(k);
                break;
            }
        }
    }
    Ok(trace)
}

/// (1/2)^{2^k − 1}.
pub fn halving_factor(k: usize) -> f64 {
    0.5f64.powi((1i32 << k.min(30)) - 1)
}

/// True iff the first `k_check` Newton iterates contract towards the target
/// at the rate (1/2)^{2^k−1} in d_P2.
pub fn certify_approximate_solution(
    a: &CMatrix,
    lambda0: C64,
    v0: &CVector,
    target: &EigenTriple,
    k_check: usize,
) -> bool {
    certify_with(a, lambda0, v0, k_check, |l, v| distance_to(a, l, v, target))
}

/// Same check in the affine distance (|λ−λ*|² + d_P(v,v*)²)^{1/2}; assumes
/// A and the target share the representative ‖A‖_F = 1.
pub fn certify_affine(
    a: &CMatrix,
    lambda0: C64,
    v0: &CVector,
    target: &EigenTriple,
    k_check: usize,
) -> bool {
    certify_with(a, lambda0, v0, k_check, |l, v| {
        affine_distance(l, v, target.lambda, &target.v)
    })
}

fn certify_with<F>(a: &CMatrix, lambda0: C64, v0: &CVector, k_check: usize, dist: F) -> bool
where
    F: Fn(C64, &CVector) -> Result<f64>,
{
    let Ok(d0) = dist(lambda0, v0) else {
        return false;
    };
    let mut lambda = lambda0;
    let Ok(mut v) = normalized(v0) else {
        return false;
    };
    for k in 1..=k_check {
        match newton_map(a, lambda, &v) {
            Ok((l, w)) => {
                lambda = l;
                v = w;
            }
            Err(_) => return false,
        }
        match dist(lambda, &v) {
            Ok(d) if d <= halving_factor(k) * d0 + CERTIFY_SLACK => {}
            _ => return false,
        }
    }
    true
}

/// c₀/μ with c₀ = 0.0739.
pub fn gamma_radius(t: &EigenTriple) -> Result<f64> {
    Ok(GAMMA_C0 / mu(t)?)
}

/// c₀/μ with c₀ = 0.288, for normalized representatives.
pub fn gamma_radius_affine(t: &EigenTriple) -> Result<f64> {
    if (frobenius_norm(&t.a) - 1.0).abs() > NORMALIZED_TOL {
        return Err(Error::NotNormalized);
    }
    Ok(GAMMA_C0_AFFINE / mu(t)?)
}

/// Prefactor 2tan(c)/(1−√2c) of the affine one-step estimate, 0 ≤ c < 1/√2.
pub fn affine_contraction_factor(c: f64) -> Result<f64> {
    if !(c >= 0.0 && c * SQRT_2 < 1.0) {
        return Err(Error::OutOfRange(format!("c = {c} not in [0, 1/sqrt 2)")));
    }
    Ok(2.0 * c.tan() / (1.0 - SQRT_2 * c))
}

/// Prefactor R_c·β_{cR_c}·2tan(cR_c)/(1−√2cR_c) of the projective estimate;
/// the radius constant c is admissible when this is at most 1.
pub fn projective_contraction_factor(c: f64) -> Result<f64> {
    let r = r_theta(c)?;
    let cr = c * r;
    Ok(r * beta(cr)? * affine_contraction_factor(cr)?)
}

/// The θ₀ ∈ (0, π/4) with R_θ₀·θ₀ = 1/(2√2), by bisection.
pub fn theta0() -> f64 {
    let target = 1.0 / (2.0 * SQRT_2);
    let f = |th: f64| {
        r_theta(th)
            .map(|r| r * th - target)
            .unwrap_or(f64::INFINITY)
    };
    let (mut lo, mut hi) = (0.0, FRAC_PI_4 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigenpairs;
    use crate::linalg::{c, real, vector_norm, Field};
    use crate::projective::dist_p2;
    use crate::random::{point_at_angle, random_matrix, random_triple, random_vector, TrialRng};
    use proptest::prelude::*;

    fn e(n: usize, i: usize) -> CVector {
        let mut v = CVector::zeros(n);
        v[i] = real(1.0);
        v
    }

    fn wilkinson(eps: f64) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[real(1.0), real(eps), real(1.0), real(1.0)])
    }

    #[test]
    fn exact_triple_is_fixed() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![real(2.0), real(1.0)]));
        let (l, v) = newton_step(&a, real(2.0), &e(2, 0)).unwrap();
        assert!((l - real(2.0)).norm() < 1e-15);
        assert!((v - e(2, 0)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_hand_computation() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![real(2.0), real(1.0)]));
        let (l, v) = newton_step(&a, real(2.1), &e(2, 0)).unwrap();
        assert!((l - real(2.0)).norm() < 1e-14);
        assert!((v - e(2, 0)).norm() < 1e-15);
    }

    #[test]
    fn undefined_step_is_reported() {
        let a = CMatrix::identity(3, 3);
        assert_eq!(
            newton_step(&a, real(1.0), &e(3, 0)),
            Err(Error::NotInvertible)
        );
        let trace = newton_iterate(&a, real(1.0), &e(3, 0), 3, None).unwrap();
        assert_eq!(trace.undefined_at, Some(1));
        assert_eq!(trace.iterates.len(), 1);
        assert!(!certify_approximate_solution(
            &a,
            real(1.0),
            &e(3, 0),
            &EigenTriple::new(a.clone(), real(1.0), e(3, 0)).unwrap(),
            2
        ));
    }

    #[test]
    fn wilkinson_start_converges() {
        let a = wilkinson(0.25);
        let target = EigenTriple::new(
            a.clone(),
            real(1.5),
            CVector::from_vec(vec![real(0.5), real(1.0)]),
        )
        .unwrap();
        let oracle = eigenpairs(&a);
        assert!(oracle.iter().any(|p| (p.lambda - real(1.5)).norm() < 1e-14));
        let v0 = CVector::from_vec(vec![c(0.5 + 1e-3, -1e-3), real(1.0)]);
        let trace = newton_iterate(&a, c(1.5 + 1e-3, 1e-3), &v0, 6, Some(&target)).unwrap();
        let d = &trace.distances_to_target;
        for k in 0..3 {
            assert!(d[k + 1] < d[k]);
        }
        let last = trace.iterates.last().unwrap();
        assert!(vector_norm(&(shifted(&a, last.lambda) * &last.v)) < 1e-12);
    }

    #[test]
    fn start_equal_to_target_is_certified() {
        let mut rng = TrialRng::new(5);
        let t = random_triple(&mut rng, 4, Field::Complex);
        assert!(certify_approximate_solution(&t.a, t.lambda, &t.v, &t, 4));
    }

    #[test]
    fn radius_examples() {
        let t = EigenTriple::new(
            CMatrix::from_diagonal(&CVector::from_vec(vec![real(1.0), real(-1.0)])),
            real(1.0),
            e(2, 0),
        )
        .unwrap();
        assert!((gamma_radius(&t).unwrap() - GAMMA_C0).abs() < 1e-15);
        assert_eq!(gamma_radius_affine(&t), Err(Error::NotNormalized));
        assert!(
            (gamma_radius_affine(&t.normalize().unwrap()).unwrap() - GAMMA_C0_AFFINE).abs() < 1e-15
        );
        let r4 = crate::tracker::starting_roots_of_unity(4, 1).unwrap();
        assert!((gamma_radius(&r4).unwrap() - GAMMA_C0 / SQRT_2).abs() < 1e-14);
        assert!(GAMMA_C0_AFFINE > GAMMA_C0);
    }

    #[test]
    fn constants_are_admissible() {
        assert!(projective_contraction_factor(GAMMA_C0).unwrap() <= 1.0);
        assert!(affine_contraction_factor(GAMMA_C0_AFFINE).unwrap() <= 1.0);
        assert!((theta0() - 0.1389).abs() < 1e-3);
        assert!(GAMMA_C0 <= theta0());
    }

    #[test]
    fn far_start_on_ill_conditioned_triple_usually_fails() {
        let mut rng = TrialRng::new(9);
        let a =
            CMatrix::from_diagonal(&CVector::from_vec(vec![real(1.0), real(0.995), real(-0.5)]));
        let t = EigenTriple::new(a, real(1.0), e(3, 0))
            .unwrap()
            .normalize()
            .unwrap();
        assert!(mu(&t).unwrap() >= 100.0);
        let failures = (0..20)
            .filter(|_| {
                let v0 = point_at_angle(&mut rng, &t.v, FRAC_PI_4, Field::Complex);
                let lambda0 = t.lambda + rng.unit_phase() * 0.02;
                !certify_approximate_solution(&t.a, lambda0, &v0, &t, 4)
            })
            .count();
        assert!(failures > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn projected_and_bordered_steps_agree(seed in any::<u64>()) {
            let mut rng = TrialRng::new(seed);
            let n = rng.range(2, 7);
            let a = random_matrix(&mut rng, n, Field::Complex);
            let v = random_vector(&mut rng, n, Field::Complex);
            let l = rng.scalar(Field::Complex);
            let (l1, v1) = newton_step(&a, l, &v).unwrap();
            let (l2, v2) = newton_step_bordered(&a, l, &v).unwrap();
            let scale = 1.0 + l1.norm() + vector_norm(&v1);
            prop_assert!((l1 - l2).norm() < 1e-10 * scale);
            prop_assert!(vector_norm(&(&v1 - &v2)) < 1e-10 * scale);
        }

        #[test]
        fn scaling_equivariance(seed in any::<u64>()) {
            let mut rng = TrialRng::new(seed);
            let n = rng.range(2, 6);
            let a = random_matrix(&mut rng, n, Field::Complex);
            let v = random_vector(&mut rng, n, Field::Complex);
            let l = rng.scalar(Field::Complex);
            let alpha = rng.scalar(Field::Complex) * 3.0;
            let b = rng.scalar(Field::Complex) * 3.0;
            let (l1, v1) = newton_step(&a, l, &v).unwrap();
            let (l2, v2) = newton_step(&(&a * alpha), l * alpha, &(&v * b)).unwrap();
            prop_assert!((l2 - l1 * alpha).norm() < 1e-10 * (1.0 + (l1 * alpha).norm()));
            prop_assert!(vector_norm(&(&v2 - &v1 * b)) < 1e-10 * vector_norm(&(&v1 * b)));
        }

        #[test]
        fn exact_triples_are_fixed_points(seed in any::<u64>()) {
            let mut rng = TrialRng::new(seed);
            let n = rng.range(2, 8);
            let t = random_triple(&mut rng, n, Field::Complex);
            let (l, v) = newton_map(&t.a, t.lambda, &t.v).unwrap();
            let out = EigenTriple::new_unchecked(t.a.clone(), l, v).unwrap();
            prop_assert!(out.residual() <= 1e-12);
            prop_assert!(dist_p2(&t, &out).unwrap() < 1e-12);
        }

        #[test]
        fn quadratic_regime(seed in any::<u64>()) {
            let mut rng = TrialRng::new(seed);
            let n = rng.range(2, 6);
            let t = random_triple(&mut rng, n, Field::Complex);
            let m = mu(&t).unwrap();
            let v0 = point_at_angle(&mut rng, &t.v, 0.5 * GAMMA_C0 / m, Field::Complex);
            let trace = newton_iterate(&t.a, t.lambda, &v0, 4, Some(&t)).unwrap();
            let d = &trace.distances_to_target;
            for k in 0..d.len() - 1 {
                if d[k] > 1e-6 {
                    prop_assert!(d[k + 1] <= 2.0 * m * d[k] * d[k] + 1e-14);
                }
            }
        }
    }
}
