//! Matrix paths, their lifted eigenpaths, condition length, the adaptive mesh
//! and the predictor–corrector driver.

use std::f64::consts::PI;

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::Serialize;

use crate::condition::{
    condition_operator, is_well_posed, mu, project_onto_complement, sensitivity_constant,
};
use crate::eigen::{eigenpairs, EigenPair};
use crate::error::{Error, Result};
use crate::linalg::{
    c, frobenius_norm, inner, matrix_inner, real, vector_norm, CMatrix, CVector, C64,
};
use crate::newton::{certify_approximate_solution, newton_map, DEFAULT_K_CHECK};
use crate::projective::{dist_p2, EigenTriple};

/// ε of the sensitivity estimate used by default.
pub const DEFAULT_EPSILON: f64 = 0.1640;
/// Constant C of the step-count bound K ≤ C·ℓ_μ + 1.
pub const COMPLEXITY_CONSTANT: f64 = 100.0;
/// Continued eigenvalues closer than this (relative to ‖A‖_F) count as a collision.
pub const COLLISION_RTOL: f64 = 1e-8;
/// Consecutive lifted samples must be closer than this in d_P2.
pub const CONTINUITY_BOUND: f64 = PI / 8.0;

#[derive(Debug, Clone)]
pub enum MatrixPath {
    /// (1−t)·A0 + t·A1.
    Linear { a0: CMatrix, a1: CMatrix },
    /// e^{tS}·A·e^{−tS} for skew-Hermitian S = −i·Q·diag(d)·Q*.
    UnitaryOrbit {
        a: CMatrix,
        generator: CMatrix,
        basis: CMatrix,
        freqs: Vec<f64>,
        real: bool,
    },
    /// Piecewise-linear interpolation of a sample table over [0, 1].
    Sampled { ts: Vec<f64>, mats: Vec<CMatrix> },
}

impl MatrixPath {
    pub fn linear(a0: CMatrix, a1: CMatrix) -> Result<Self> {
        square_same(&a0, &a1)?;
        Ok(Self::Linear { a0, a1 })
    }

    pub fn unitary_orbit(a: CMatrix, generator: CMatrix) -> Result<Self> {
        square_same(&a, &generator)?;
        let scale = frobenius_norm(&generator).max(1.0);
        if frobenius_norm(&(&generator + generator.adjoint())) > 1e-12 * scale {
            return Err(Error::Input("generator must be skew-Hermitian".into()));
        }
        // iS is Hermitian; symmetrize to remove rounding before decomposing.
        let h = (&generator * c(0.0, 1.0) + (&generator * c(0.0, 1.0)).adjoint()) * real(0.5);
        let eig = SymmetricEigen::new(h);
        let is_real = a.iter().chain(generator.iter()).all(|z| z.im == 0.0);
        Ok(Self::UnitaryOrbit {
            a,
            generator,
            basis: eig.eigenvectors,
            freqs: eig.eigenvalues.iter().copied().collect(),
            real: is_real,
        })
    }

    pub fn sampled(ts: Vec<f64>, mats: Vec<CMatrix>) -> Result<Self> {
        if ts.len() < 2 || ts.len() != mats.len() {
            return Err(Error::Input(
                "sampled path needs matching ts and As, at least two".into(),
            ));
        }
        if ts[0] != 0.0 || *ts.last().unwrap() != 1.0 || ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("ts must increase strictly from 0 to 1".into()));
        }
        for m in &mats[1..] {
            square_same(&mats[0], m)?;
        }
        Ok(Self::Sampled { ts, mats })
    }

    /// Constant path at A.
    pub fn constant(a: CMatrix) -> Self {
        Self::Linear {
            a0: a.clone(),
            a1: a,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Linear { a0, .. } => a0.nrows(),
            Self::UnitaryOrbit { a, .. } => a.nrows(),
            Self::Sampled { mats, .. } => mats[0].nrows(),
        }
    }

    fn orbit_unitary(basis: &CMatrix, freqs: &[f64], t: f64) -> CMatrix {
        let mut scaled = basis.clone();
        for (j, d) in freqs.iter().enumerate() {
            let ph = C64::from_polar(1.0, -t * d);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= ph);
        }
        scaled * basis.adjoint()
    }

    /// A(t) before normalization.
    pub fn raw(&self, t: f64) -> CMatrix {
        match self {
            Self::Linear { a0, a1 } => a0 * real(1.0 - t) + a1 * real(t),
            Self::UnitaryOrbit {
                a,
                basis,
                freqs,
                real: is_real,
                ..
            } => {
                let u = Self::orbit_unitary(basis, freqs, t);
                let m = &u * a * u.adjoint();
                if *is_real {
                    m.map(|z| real(z.re))
                } else {
                    m
                }
            }
            Self::Sampled { ts, mats } => {
                let t = t.clamp(0.0, 1.0);
                let i = match ts.iter().position(|&s| s >= t) {
                    Some(0) => return mats[0].clone(),
                    Some(i) => i,
                    None => return mats[mats.len() - 1].clone(),
                };
                let w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
                &mats[i - 1] * real(1.0 - w) + &mats[i] * real(w)
            }
        }
    }

    /// dA/dt before normalization; centered differences for sampled paths.
    pub fn raw_derivative(&self, t: f64) -> CMatrix {
        match self {
            Self::Linear { a0, a1 } => a1 - a0,
            Self::UnitaryOrbit { generator, .. } => {
                let m = self.raw(t);
                generator * &m - &m * generator
            }
            Self::Sampled { ts, .. } => {
                let i = ts
                    .iter()
                    .position(|&s| s > t)
                    .unwrap_or(ts.len() - 1)
                    .max(1);
                let h = ts[i] - ts[i - 1];
                let lo = (t - h).max(0.0);
                let hi = (t + h).min(1.0);
                (self.raw(hi) - self.raw(lo)) * real(1.0 / (hi - lo))
            }
        }
    }

    /// A(t) with ‖A(t)‖_F = 1.
    pub fn matrix_at(&self, t: f64) -> Result<CMatrix> {
        let m = self.raw(t);
        let s = frobenius_norm(&m);
        if s == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        Ok(m.map(|z| z / s))
    }

    /// Velocity of the normalized path projected onto A(t)^⊥.
    pub fn tangent_at(&self, t: f64) -> Result<CMatrix> {
        let m = self.raw(t);
        let s = frobenius_norm(&m);
        if s == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let a = m.map(|z| z / s);
        let d = self.raw_derivative(t).map(|z| z / s);
        Ok(project_onto_complement(&a, &d))
    }
}

fn square_same(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if !a.is_square() || a.shape() != b.shape() || a.nrows() < 2 {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

/// ‖Γ̇‖ at t for the matrix velocity `a_dot`, via the condition operator.
pub fn path_speed(t: &EigenTriple, a_dot: &CMatrix) -> Result<f64> {
    let b_dot = project_onto_complement(&t.a, a_dot);
    let tan = condition_operator(t, &b_dot)?;
    let na2 = frobenius_norm(&t.a).powi(2);
    let pair = (frobenius_norm(&tan.a_dot).powi(2) + tan.lambda_dot.norm_sqr())
        / (na2 + t.lambda.norm_sqr());
    let vec = (vector_norm(&tan.v_dot) / vector_norm(&t.v)).powi(2);
    Ok((pair + vec).sqrt())
}

#[derive(Debug, Clone)]
pub struct PathSample {
    pub t: f64,
    pub triple: EigenTriple,
    pub mu: f64,
    pub speed: f64,
}

/// Reference lift Γ of a matrix path on a uniform grid with an even number
/// of intervals.
#[derive(Debug, Clone)]
pub struct LiftedPath {
    pub path: MatrixPath,
    pub samples: Vec<PathSample>,
    spectra: Vec<Vec<EigenPair>>,
}

/// Expresses `start` on the representative A(0)/‖A(0)‖_F of the path.
fn start_on_path(path: &MatrixPath, start: &EigenTriple) -> Result<EigenTriple> {
    let a0 = path.matrix_at(0.0)?;
    let s = start.normalize()?;
    let ph = matrix_inner(&a0, &s.a);
    if (ph.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::Input("start triple does not lie over A(0)".into()));
    }
    let t = EigenTriple::new_unchecked(a0, s.lambda * ph, s.v)?;
    if t.relative_residual() > crate::projective::RESIDUAL_RTOL {
        return Err(Error::NotOnVariety {
            residual: t.relative_residual(),
        });
    }
    Ok(t)
}

fn grid_point(i: usize, intervals: usize) -> f64 {
    i as f64 / intervals as f64
}

/// Index of the eigenpair continuing `prev`: largest overlap, then nearest λ.
fn match_pair(pairs: &[EigenPair], prev_v: &CVector, prev_lambda: C64) -> usize {
    let overlaps: Vec<f64> = pairs.iter().map(|p| inner(&p.v, prev_v).norm()).collect();
    let best = overlaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..pairs.len())
        .filter(|&j| overlaps[j] >= best - 1e-8)
        .min_by(|&i, &j| {
            (pairs[i].lambda - prev_lambda)
                .norm()
                .total_cmp(&(pairs[j].lambda - prev_lambda).norm())
        })
        .expect("nonempty spectrum")
}

fn collides(pairs: &[EigenPair], j: usize) -> bool {
    pairs
        .iter()
        .enumerate()
        .any(|(k, p)| k != j && (p.lambda - pairs[j].lambda).norm() < COLLISION_RTOL)
}

fn sample_from(path: &MatrixPath, t: f64, triple: EigenTriple) -> Result<PathSample> {
    if !is_well_posed(&triple) {
        return Err(Error::PathLeavesW { t });
    }
    let m = mu(&triple).map_err(|_| Error::PathLeavesW { t })?;
    let speed = path_speed(&triple, &path.tangent_at(t)?).map_err(|_| Error::PathLeavesW { t })?;
    Ok(PathSample {
        t,
        triple,
        mu: m,
        speed,
    })
}

/// Lifts `path` through `start` on a grid of at least `grid` intervals,
/// doubling until consecutive samples are within the continuity bound.
pub fn lift_path(path: &MatrixPath, start: &EigenTriple, grid: usize) -> Result<LiftedPath> {
    let intervals = grid.max(2).div_ceil(2) * 2;
    let spectra: Vec<Vec<EigenPair>> = (0..=intervals)
        .into_par_iter()
        .map(|i| {
            let t = grid_point(i, intervals);
            path.matrix_at(t).map(|a| eigenpairs(&a))
        })
        .collect::<Result<_>>()?;
    let mut lifted = LiftedPath::assemble(path, start, spectra)?;
    while !lifted.is_continuous()? {
        if lifted.intervals() >= MAX_INTERVALS {
            return Err(Error::PathLeavesW {
                t: lifted.worst_jump()?.0,
            });
        }
        lifted = lifted.refined()?;
    }
    Ok(lifted)
}

/// Grid size beyond which refinement gives up.
pub const MAX_INTERVALS: usize = 1 << 17;

impl LiftedPath {
    fn assemble(
        path: &MatrixPath,
        start: &EigenTriple,
        spectra: Vec<Vec<EigenPair>>,
    ) -> Result<Self> {
        let intervals = spectra.len() - 1;
        let first = start_on_path(path, start)?;
        let mut chosen: Vec<EigenTriple> = Vec::with_capacity(intervals + 1);
        chosen.push(first);
        for (i, pairs) in spectra.iter().enumerate().skip(1) {
            let t = grid_point(i, intervals);
            let prev = chosen.last().unwrap();
            let j = match_pair(pairs, &prev.v, prev.lambda);
            if collides(pairs, j) {
                return Err(Error::PathLeavesW { t });
            }
            let a = path.matrix_at(t)?;
            chosen.push(EigenTriple::new_unchecked(
                a,
                pairs[j].lambda,
                pairs[j].v.clone(),
            )?);
        }
        let samples = chosen
            .into_par_iter()
            .enumerate()
            .map(|(i, tr)| sample_from(path, grid_point(i, intervals), tr))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            path: path.clone(),
            samples,
            spectra,
        })
    }

    pub fn intervals(&self) -> usize {
        self.samples.len() - 1
    }

    fn worst_jump(&self) -> Result<(f64, f64)> {
        let mut worst = (0.0, 0.0);
        for w in self.samples.windows(2) {
            let d = dist_p2(&w[0].triple, &w[1].triple)?;
            if d > worst.1 {
                worst = (w[0].t, d);
            }
        }
        Ok(worst)
    }

    fn is_continuous(&self) -> Result<bool> {
        Ok(self.worst_jump()?.1 < CONTINUITY_BOUND)
    }

    /// Same lift on a grid with twice as many intervals.
    pub fn refined(&self) -> Result<Self> {
        let n = self.intervals();
        let fresh: Vec<Vec<EigenPair>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let t = grid_point(2 * i + 1, 2 * n);
                self.path.matrix_at(t).map(|a| eigenpairs(&a))
            })
            .collect::<Result<_>>()?;
        let mut spectra = Vec::with_capacity(2 * n + 1);
        for i in 0..n {
            spectra.push(self.spectra[i].clone());
            spectra.push(fresh[i].clone());
        }
        spectra.push(self.spectra[n].clone());
        Self::assemble(&self.path, &self.samples[0].triple, spectra)
    }

    /// Composite Simpson estimate of ∫ speed·μ dt on the current grid.
    pub fn simpson_length(&self) -> f64 {
        simpson(
            &self
                .samples
                .iter()
                .map(|s| s.speed * s.mu)
                .collect::<Vec<_>>(),
        )
    }

    /// Composite trapezoid estimate of ∫ speed·μ dt on the current grid.
    pub fn trapezoid_length(&self) -> f64 {
        let f: Vec<f64> = self.samples.iter().map(|s| s.speed * s.mu).collect();
        let h = 1.0 / (f.len() - 1) as f64;
        h * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[f.len() - 1]))
    }

    /// Refines until successive Simpson estimates agree to `rel_tol`.
    pub fn converged(self, rel_tol: f64) -> Result<Self> {
        let mut cur = self;
        loop {
            let next = cur.refined()?;
            let (a, b) = (cur.simpson_length(), next.simpson_length());
            if (a - b).abs() <= rel_tol * b.abs() || (a == 0.0 && b == 0.0) {
                return Ok(next);
            }
            if next.intervals() >= MAX_INTERVALS {
                return Err(Error::OutOfRange(
                    "condition length quadrature did not converge".into(),
                ));
            }
            cur = next;
        }
    }

    /// Γ(t) from a dense eigendecomposition at t, matched to the grid sample
    /// at or below t.
    pub fn triple_at(&self, t: f64) -> Result<EigenTriple> {
        let n = self.intervals();
        let pos = t.clamp(0.0, 1.0) * n as f64;
        let i = (pos.floor() as usize).min(n);
        if pos == i as f64 {
            return Ok(self.samples[i].triple.clone());
        }
        let a = self.path.matrix_at(t)?;
        let pairs = eigenpairs(&a);
        let prev = &self.samples[i].triple;
        let j = match_pair(&pairs, &prev.v, prev.lambda);
        if collides(&pairs, j) {
            return Err(Error::PathLeavesW { t });
        }
        EigenTriple::new_unchecked(a, pairs[j].lambda, pairs[j].v.clone())
    }

    /// Cumulative ∫₀ᵗ speed, integrating the piecewise-quadratic interpolant
    /// of the speed over the Simpson panels.
    pub fn arc_length(&self, t: f64) -> f64 {
        let n = self.intervals();
        let h = 1.0 / n as f64;
        let t = t.clamp(0.0, 1.0);
        let panel = ((t / (2.0 * h)).floor() as usize).min(n / 2 - 1);
        let mut acc = 0.0;
        for p in 0..panel {
            let (s0, s1, s2) = self.panel_speeds(p);
            acc += h / 3.0 * (s0 + 4.0 * s1 + s2);
        }
        let (s0, s1, s2) = self.panel_speeds(panel);
        let x = t - 2.0 * h * panel as f64;
        acc + s0 * x
            + (-3.0 * s0 + 4.0 * s1 - s2) * x * x / (4.0 * h)
            + (s0 - 2.0 * s1 + s2) * x.powi(3) / (6.0 * h * h)
    }

    fn panel_speeds(&self, p: usize) -> (f64, f64, f64) {
        let s = &self.samples;
        (s[2 * p].speed, s[2 * p + 1].speed, s[2 * p + 2].speed)
    }
}

fn simpson(f: &[f64]) -> f64 {
    let n = f.len() - 1;
    let h = 1.0 / n as f64;
    let mut acc = f[0] + f[n];
    for (i, y) in f.iter().enumerate().take(n).skip(1) {
        acc += if i % 2 == 1 { 4.0 * y } else { 2.0 * y };
    }
    acc * h / 3.0
}

/// Condition length ℓ_μ = ∫ ‖Γ̇‖·μ(Γ) dt, refined to a relative accuracy of 1e-6.
pub fn condition_length(lifted: &LiftedPath) -> Result<f64> {
    Ok(lifted.clone().converged(QUADRATURE_RTOL)?.simpson_length())
}

/// Relative agreement required between successive quadrature estimates.
pub const QUADRATURE_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct TrackerConfig {
    pub epsilon: f64,
    /// Overrides the sensitivity constant derived from ε.
    pub c_eps: Option<f64>,
    /// Initial number of grid intervals for the lift.
    pub grid: usize,
    pub quadrature_rtol: f64,
    pub k_check: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            c_eps: None,
            grid: 64,
            quadrature_rtol: QUADRATURE_RTOL,
            k_check: DEFAULT_K_CHECK,
        }
    }
}

impl TrackerConfig {
    pub fn c_eps(&self) -> Result<f64> {
        match self.c_eps {
            Some(c) if c > 0.0 => Ok(c),
            Some(c) => Err(Error::OutOfRange(format!("c_eps = {c} must be positive"))),
            None => sensitivity_constant(self.epsilon),
        }
    }

    /// (1+ε)/C_ε, the constant of the sharper step-count bound.
    pub fn step_constant(&self) -> Result<f64> {
        Ok((1.0 + self.epsilon) / self.c_eps()?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Mesh {
    pub ts: Vec<f64>,
    /// μ(Γ(t_k)) for k = 0..K−1.
    pub mus: Vec<f64>,
    /// Largest |μ(Γ(t_{k−1}))·∫speed − C_ε| over the interior steps.
    pub max_residual: f64,
}

impl Mesh {
    pub fn steps(&self) -> usize {
        self.ts.len() - 1
    }
}

/// Mesh with μ(Γ(t_{k−1}))·∫_{t_{k−1}}^{t_k} ‖Γ̇‖ = C_ε, closing at t = 1 once
/// the remaining weighted length is at most C_ε.
pub fn build_mesh(lifted: &LiftedPath, cfg: &TrackerConfig) -> Result<Mesh> {
    let c_eps = cfg.c_eps()?;
    let total = lifted.arc_length(1.0);
    let mut ts = vec![0.0];
    let mut mus = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut t_prev = 0.0;
    let mut mu_prev = lifted.samples[0].mu;
    loop {
        mus.push(mu_prev);
        let s_prev = lifted.arc_length(t_prev);
        let step = c_eps / mu_prev;
        if total - s_prev <= step {
            ts.push(1.0);
            break;
        }
        let target = s_prev + step;
        let (mut lo, mut hi) = (t_prev, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if lifted.arc_length(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = hi;
        max_residual = max_residual.max((mu_prev * (lifted.arc_length(t) - s_prev) - c_eps).abs());
        ts.push(t);
        t_prev = t;
        mu_prev = mu(&lifted.triple_at(t)?).map_err(|_| Error::PathLeavesW { t })?;
    }
    Ok(Mesh {
        ts,
        mus,
        max_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TrackedPoint {
    pub t: f64,
    #[serde(serialize_with = "crate::io::ser_scalar")]
    pub lambda: C64,
    #[serde(serialize_with = "crate::io::ser_vector")]
    pub v: CVector,
    /// μ of the reference triple Γ(t).
    pub mu: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrackerRun {
    pub mesh: Vec<f64>,
    pub triples: Vec<TrackedPoint>,
    #[serde(rename = "K")]
    pub k: usize,
    pub ell_mu: f64,
    pub epsilon: f64,
    pub c_eps: f64,
    pub all_certified: bool,
    /// K ≤ 100·ℓ_μ + 1.
    pub bound_satisfied: bool,
    /// K ≤ (1+ε)/C_ε·ℓ_μ + 1.
    pub sharp_bound_satisfied: bool,
    pub mesh_residual: f64,
    #[serde(skip)]
    pub references: Vec<EigenTriple>,
}

/// Follows the lift of `path` through `start` with one Newton step per mesh
/// point, certifying every iterate against the reference lift.
pub fn track(path: &MatrixPath, start: &EigenTriple, cfg: &TrackerConfig) -> Result<TrackerRun> {
    let lifted = lift_path(path, start, cfg.grid)?.converged(cfg.quadrature_rtol)?;
    let ell_mu = lifted.simpson_length();
    let mesh = build_mesh(&lifted, cfg)?;
    let references = mesh
        .ts
        .par_iter()
        .map(|&t| lifted.triple_at(t))
        .collect::<Result<Vec<_>>>()?;
    let mut lambda = lifted.samples[0].triple.lambda;
    let mut v = lifted.samples[0].triple.v.clone();
    let mut iterates = Vec::with_capacity(mesh.ts.len());
    iterates.push((lambda, v.clone()));
    for (k, &t) in mesh.ts.iter().enumerate().skip(1) {
        let a = path.matrix_at(t)?;
        let (l, w) = newton_map(&a, lambda, &v).map_err(|_| Error::StepNotDefined { step: k })?;
        lambda = l;
        v = w;
        iterates.push((lambda, v.clone()));
    }
    let triples = mesh
        .ts
        .par_iter()
        .zip(iterates.par_iter())
        .zip(references.par_iter())
        .map(|((&t, (l, v)), r)| {
            let certified = certify_approximate_solution(&r.a, *l, v, r, cfg.k_check);
            Ok(TrackedPoint {
                t,
                lambda: *l,
                v: v.clone(),
                mu: mu(r).map_err(|_| Error::PathLeavesW { t })?,
                certified,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let k = mesh.steps();
    let c_eps = cfg.c_eps()?;
    Ok(TrackerRun {
        all_certified: triples.iter().all(|p| p.certified),
        bound_satisfied: (k as f64) <= COMPLEXITY_CONSTANT * ell_mu + 1.0,
        sharp_bound_satisfied: (k as f64) <= cfg.step_constant()? * ell_mu + 1.0,
        mesh: mesh.ts,
        triples,
        k,
        ell_mu,
        epsilon: cfg.epsilon,
        c_eps,
        mesh_residual: mesh.max_residual,
        references,
    })
}

/// Normalized (vv*, ‖v‖², v).
pub fn starting_rank_one(v: &CVector) -> Result<EigenTriple> {
    let nv2 = vector_norm(v).powi(2);
    if nv2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    EigenTriple::new(v * v.adjoint(), real(nv2), v.clone())?.normalize()
}

/// Normalized (diag(1, ζ, …, ζ^{n−1}), ζ^j, e_{j+1}) with ζ = e^{2πi/n}.
pub fn starting_roots_of_unity(n: usize, j: usize) -> Result<EigenTriple> {
    if n < 2 || j >= n {
        return Err(Error::OutOfRange(format!(
            "need n >= 2 and j < n, got n = {n}, j = {j}"
        )));
    }
    let root = |k: usize| -> C64 {
        match (2 * k) % (2 * n) {
            0 => real(1.0),
            r if r == n => real(-1.0),
            _ => C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64),
        }
    };
    let d = CMatrix::from_diagonal(&CVector::from_fn(n, |k, _| root(k)));
    let mut e = CVector::zeros(n);
    e[j] = real(1.0);
    EigenTriple::new(d, root(j), e)?.normalize()
}

/// Normalized eigentriple number `index` of A(0), eigenvalues ordered by
/// real part and then imaginary part.
pub fn start_by_index(path: &MatrixPath, index: usize) -> Result<EigenTriple> {
    let a = path.matrix_at(0.0)?;
    let mut pairs = eigenpairs(&a);
    if index >= pairs.len() {
        return Err(Error::OutOfRange(format!(
            "start index {index} but the matrix has {} eigenvalues",
            pairs.len()
        )));
    }
    pairs.sort_by(|p, q| {
        p.lambda
            .re
            .total_cmp(&q.lambda.re)
            .then(p.lambda.im.total_cmp(&q.lambda.im))
    });
    let p = pairs.swap_remove(index);
    EigenTriple::new(a, p.lambda, p.v)?.normalize()
}

/// (A(0), a₁₁, e₁) with A(0) the matrix A with its first column zeroed below
/// the diagonal; the flag reports well-posedness, which is not guaranteed.
pub fn starting_projection(a: &CMatrix) -> Result<(EigenTriple, bool)> {
    let mut a0 = a.clone();
    for i in 1..a.nrows() {
        a0[(i, 0)] = real(0.0);
    }
    let mut e = CVector::zeros(a.nrows());
    e[0] = real(1.0);
    let t = EigenTriple::new(a0.clone(), a0[(0, 0)], e)?.normalize()?;
    let ok = is_well_posed(&t);
    Ok((t, ok))
}
