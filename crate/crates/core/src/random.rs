//! Seeded generators for matrices, unitaries and eigentriples.
//!
//! Each trial gets its own stream derived from (seed, trial index), so
//! ensembles give the same result whatever order the trials run in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::condition::is_well_posed;
use crate::eigen::eigenpairs;
use crate::linalg::{
    c, fix_phase, frobenius_norm, inner, normalized, real, CMatrix, CVector, Field, C64,
};
use crate::projective::EigenTriple;

/// Seed used when neither a flag nor the environment provides one.
pub const DEFAULT_SEED: u64 = 20_240_917;

pub struct TrialRng(ChaCha8Rng);

impl TrialRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Independent stream for trial `index` of an ensemble.
    pub fn for_trial(seed: u64, index: u64) -> Self {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(index + 1);
        Self(r)
    }

    pub fn normal(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.0.random_range(lo..=hi_inclusive)
    }

    pub fn scalar(&mut self, field: Field) -> C64 {
        match field {
            Field::Real => real(self.normal()),
            Field::Complex => c(self.normal(), self.normal()) / 2f64.sqrt(),
        }
    }

    pub fn unit_phase(&mut self) -> C64 {
        C64::from_polar(1.0, 2.0 * std::f64::consts::PI * self.uniform())
    }
}

/// Gaussian matrix with independent entries.
pub fn random_matrix(rng: &mut TrialRng, n: usize, field: Field) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| rng.scalar(field))
}

/// Gaussian matrix scaled to ‖A‖_F = 1.
pub fn random_normalized_matrix(rng: &mut TrialRng, n: usize, field: Field) -> CMatrix {
    let a = random_matrix(rng, n, field);
    let s = frobenius_norm(&a);
    a.map(|z| z / s)
}

pub fn random_vector(rng: &mut TrialRng, n: usize, field: Field) -> CVector {
    CVector::from_fn(n, |_, _| rng.scalar(field))
}

pub fn random_unit_vector(rng: &mut TrialRng, n: usize, field: Field) -> CVector {
    loop {
        if let Ok(v) = normalized(&random_vector(rng, n, field)) {
            return v;
        }
    }
}

/// Unit vector orthogonal to `v`.
pub fn random_unit_orthogonal(rng: &mut TrialRng, v: &CVector, field: Field) -> CVector {
    let x = normalized(v).expect("nonzero vector");
    loop {
        let w = random_vector(rng, v.len(), field);
        let w = &w - &x * inner(&w, &x);
        if let Ok(w) = normalized(&w) {
            return w;
        }
    }
}

/// Haar-distributed unitary (orthogonal in the real field) via QR with the
/// diagonal of R made positive.
pub fn random_unitary(rng: &mut TrialRng, n: usize, field: Field) -> CMatrix {
    let g = random_matrix(rng, n, field);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let ph = d / d.norm();
            q.column_mut(j).iter_mut().for_each(|z| *z *= ph);
        }
    }
    q
}

/// Real orthogonal matrix with determinant one.
pub fn random_special_orthogonal(rng: &mut TrialRng, n: usize) -> CMatrix {
    let mut q = random_unitary(rng, n, Field::Real);
    if q.map(|z| z.re).determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Skew-Hermitian matrix (skew-symmetric in the real field).
pub fn random_skew_hermitian(rng: &mut TrialRng, n: usize, field: Field) -> CMatrix {
    let g = random_matrix(rng, n, field);
    (&g - g.adjoint()) * real(0.5)
}

/// Normal matrix U·diag(d)·U* with Gaussian eigenvalues.
pub fn random_normal_matrix(rng: &mut TrialRng, n: usize) -> (CMatrix, Vec<C64>, CMatrix) {
    let d: Vec<C64> = (0..n).map(|_| rng.scalar(Field::Complex)).collect();
    let u = random_unitary(rng, n, Field::Complex);
    let a = &u * CMatrix::from_diagonal(&CVector::from_vec(d.clone())) * u.adjoint();
    (a, d, u)
}

/// Normalized well-posed eigentriple of a Gaussian matrix, eigenpair chosen
/// uniformly. In the real field only real eigenvalues are eligible.
pub fn random_triple(rng: &mut TrialRng, n: usize, field: Field) -> EigenTriple {
    loop {
        let a = random_normalized_matrix(rng, n, field);
        if let Some(t) = random_eigentriple_of(rng, &a, field) {
            return t;
        }
    }
}

/// A random well-posed eigentriple of `a`, if one exists in the given field.
pub fn random_eigentriple_of(rng: &mut TrialRng, a: &CMatrix, field: Field) -> Option<EigenTriple> {
    let mut pairs = eigenpairs(a);
    if field == Field::Real {
        pairs.retain(|p| p.lambda.im.abs() <= 1e-10 * frobenius_norm(a));
        for p in pairs.iter_mut() {
            p.lambda = real(p.lambda.re);
            p.v = fix_phase(&normalized(&p.v.map(|z| real(z.re))).ok()?);
        }
    }
    if pairs.is_empty() {
        return None;
    }
    let pick = rng.range(0, pairs.len() - 1);
    let p = pairs.swap_remove(pick);
    let t = EigenTriple::new(a.clone(), p.lambda, p.v)
        .ok()?
        .normalize()
        .ok()?;
    is_well_posed(&t).then_some(t)
}

/// cos(θ)·x̂ + sin(θ)·ŵ for a random unit ŵ ⟂ x: a point at projective angle θ from x.
pub fn point_at_angle(rng: &mut TrialRng, x: &CVector, theta: f64, field: Field) -> CVector {
    let xh = normalized(x).expect("nonzero vector");
    let w = random_unit_orthogonal(rng, &xh, field);
    xh * real(theta.cos()) + w * real(theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vector_norm;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = TrialRng::for_trial(7, 3).normal();
        let b = TrialRng::for_trial(7, 3).normal();
        let c = TrialRng::for_trial(7, 4).normal();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = TrialRng::new(1);
        for field in [Field::Real, Field::Complex] {
            let u = random_unitary(&mut rng, 5, field);
            assert!((u.adjoint() * &u - CMatrix::identity(5, 5)).norm() < 1e-13);
        }
        let q = random_special_orthogonal(&mut rng, 4);
        assert!((q.map(|z| z.re).determinant() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn random_triples_are_normalized_and_on_the_variety() {
        let mut rng = TrialRng::new(2);
        for n in 2..=6 {
            for field in [Field::Real, Field::Complex] {
                let t = random_triple(&mut rng, n, field);
                assert!(t.is_normalized());
                assert!(t.relative_residual() < 1e-13);
                assert_eq!(t.field, field);
            }
        }
    }

    #[test]
    fn point_at_angle_has_requested_angle() {
        let mut rng = TrialRng::new(3);
        let x = random_unit_vector(&mut rng, 4, Field::Complex);
        let y = point_at_angle(&mut rng, &x, 0.3, Field::Complex);
        assert!((vector_norm(&y) - 1.0).abs() < 1e-15);
        let d = crate::projective::dist_p_vec(&x, &y).unwrap();
        assert!((d - 0.3).abs() < 1e-14);
    }
}
