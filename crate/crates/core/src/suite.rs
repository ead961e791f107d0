//! Seeded verification suites: closed-form examples, constants, the Newton
//! basin, path-following complexity and the supporting inequalities.
//!
//! Every randomized check draws trial `i` from its own stream, so results do
//! not depend on the number of worker threads.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::condition::{
    complement_projection_inverse_norm, is_well_posed, lambda_ratio, mu, mu_lambda, mu_v,
    nearest_illposed_candidate, newton_inverse_norm, project_onto_complement, second_derivative,
    sensitivity_constant, ALPHA,
};
use crate::eigen::eigenpairs;
use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_norm, orientation_det, oriented_restriction, projected_restriction, real,
    smallest_singular_value, vector_norm, CMatrix, CVector, Field, C64,
};
use crate::newton::{
    affine_contraction_factor, certify_affine, certify_approximate_solution, distance_to,
    newton_iterate, newton_map, projective_contraction_factor, theta0, DEFAULT_K_CHECK, GAMMA_C0,
    GAMMA_C0_AFFINE,
};
use crate::projective::{
    beta, dist_p, dist_p2, dist_p_vec, dist_t, pair_vector, r_theta, EigenTriple,
};
use crate::random::{
    point_at_angle, random_matrix, random_normal_matrix, random_normalized_matrix,
    random_special_orthogonal, random_triple, random_unit_vector, random_unitary, TrialRng,
};
use crate::tracker::{
    starting_roots_of_unity, track, MatrixPath, TrackerConfig, COMPLEXITY_CONSTANT, DEFAULT_EPSILON,
};

/// Relative tolerance for the exact closed forms.
pub const CLOSED_FORM_RTOL: f64 = 1e-12;
/// Relative tolerance for closed forms that go through a left singular vector.
pub const SVD_CLOSED_FORM_RTOL: f64 = 1e-10;
/// Relative tolerance for identities checked on random samples.
pub const IDENTITY_RTOL: f64 = 1e-10;
/// Slack in the sin-bound for the nearest ill-posed candidate.
pub const CANDIDATE_SLACK: f64 = 1e-8;
/// Distances below this are at the rounding floor and excluded from ratio checks.
pub const DISTANCE_FLOOR: f64 = 1e-6;
/// Sensitivity is checked on pairs within this fraction of C_ε/μ.
pub const SENSITIVITY_FRACTION: f64 = 0.5;
/// Starts for the Newton basin are placed at this fraction of the radius.
pub const START_FRACTION: f64 = 0.9;
pub const STARTS_PER_TRIPLE: usize = 4;
/// d_{k+1} ≤ QUADRATIC_FACTOR·μ·d_k² inside the basin.
pub const QUADRATIC_FACTOR: f64 = 4.0;

pub const DEFAULT_TRIALS: usize = 200;
pub const GAMMA_TRIALS: usize = 500;
pub const MAIN_THEOREM_TRIALS: usize = 50;
pub const ROOT_COUNT_TRIALS: usize = 100;
pub const SENSITIVITY_EPSILONS: [f64; 3] = [0.1, DEFAULT_EPSILON, 0.5];

/// Outcome of one named check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub tolerance: f64,
    pub samples: usize,
    pub violations: usize,
    /// Largest value of the per-sample statistic described in `detail`.
    pub worst: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub computed: Option<f64>,
    pub detail: String,
}

impl Check {
    fn value(name: impl Into<String>, expected: f64, computed: f64, tol: f64) -> Self {
        let err = rel(computed, expected);
        let passed = err <= tol;
        Self {
            name: name.into(),
            passed,
            tolerance: tol,
            samples: 1,
            violations: usize::from(!passed),
            worst: err,
            expected: Some(expected),
            computed: Some(computed),
            detail: "relative error".into(),
        }
    }

    fn bound(
        name: impl Into<String>,
        passed: bool,
        computed: f64,
        limit: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed,
            tolerance: 0.0,
            samples: 1,
            violations: usize::from(!passed),
            worst: computed,
            expected: Some(limit),
            computed: Some(computed),
            detail: detail.into(),
        }
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Self {
            name: name.into(),
            passed: false,
            tolerance: 0.0,
            samples: 0,
            violations: 1,
            worst: f64::NAN,
            expected: None,
            computed: None,
            detail: err.to_string(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{mark} {}", self.name)?;
        if let (Some(e), Some(c)) = (self.expected, self.computed) {
            write!(f, ": expected {e:.12e}, computed {c:.12e}")?;
        } else {
            write!(f, ": {}/{} violations", self.violations, self.samples)?;
        }
        write!(f, " ({} {:.3e}", self.detail, self.worst)?;
        if self.tolerance > 0.0 {
            write!(f, ", tol {:.0e}", self.tolerance)?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Constants,
    Examples,
    Gamma,
    MainTheorem,
    Appendix,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "all",
        "constants",
        "examples",
        "gamma",
        "main-theorem",
        "appendix",
    ];

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::Constants,
                Suite::Examples,
                Suite::Gamma,
                Suite::MainTheorem,
                Suite::Appendix,
            ],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "constants" => Ok(Suite::Constants),
            "examples" => Ok(Suite::Examples),
            "gamma" => Ok(Suite::Gamma),
            "main-theorem" => Ok(Suite::MainTheorem),
            "appendix" => Ok(Suite::Appendix),
            other => Err(Error::Input(format!(
                "unknown suite '{other}', expected one of {}",
                Suite::NAMES.join(", ")
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = Suite::NAMES
            .iter()
            .position(|n| n.parse::<Suite>().ok() == Some(*self))
            .unwrap_or(0);
        f.write_str(Suite::NAMES[i])
    }
}

/// Runs a suite; `trials` overrides every per-check default.
pub fn run_suite(suite: Suite, seed: u64, trials: Option<usize>) -> Vec<SuiteReport> {
    let pick = |default: usize| trials.unwrap_or(default);
    suite
        .parts()
        .into_iter()
        .map(|part| {
            let checks = match part {
                Suite::Constants => constants(),
                Suite::Examples => {
                    let mut v = closed_forms();
                    v.push(roots_of_unity());
                    v
                }
                Suite::Gamma => {
                    let g = gamma_theorem(seed, pick(GAMMA_TRIALS));
                    vec![g.projective, g.affine, g.quadratic]
                }
                Suite::MainTheorem => vec![main_theorem(seed, pick(MAIN_THEOREM_TRIALS))],
                Suite::Appendix => {
                    let n = pick(DEFAULT_TRIALS);
                    let mut v = vec![normal_matrices(seed, n), operator_sandwich(seed, n)];
                    v.extend(distance_identity(seed, n));
                    v.extend(sensitivity(seed, n));
                    v.extend(invariance(seed, n));
                    v.push(root_count(seed, pick(ROOT_COUNT_TRIALS)));
                    v
                }
                Suite::All => unreachable!("expanded by parts"),
            };
            SuiteReport {
                suite: part,
                seed,
                checks,
            }
        })
        .collect()
}

fn rel(computed: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        computed.abs()
    } else {
        ((computed - expected) / expected).abs()
    }
}

/// Per-trial verdict and statistic.
struct Outcome {
    ok: bool,
    value: f64,
    samples: usize,
}

impl Outcome {
    fn one(ok: bool, value: f64) -> Self {
        Self {
            ok,
            value,
            samples: 1,
        }
    }
}

fn salted(seed: u64, salt: u64) -> u64 {
    seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs `trials` independent trials in parallel and reduces them in index order.
fn tally<F>(name: &str, tol: f64, detail: &str, seed: u64, salt: u64, trials: usize, f: F) -> Check
where
    F: Fn(&mut TrialRng) -> Vec<Outcome> + Sync,
{
    let seed = salted(seed, salt);
    let per_trial: Vec<Vec<Outcome>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| f(&mut TrialRng::for_trial(seed, i)))
        .collect();
    let mut samples = 0;
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for o in per_trial.iter().flatten() {
        samples += o.samples;
        violations += usize::from(!o.ok);
        worst = if o.value.is_nan() {
            f64::NAN
        } else {
            worst.max(o.value)
        };
    }
    Check {
        name: name.into(),
        passed: violations == 0 && samples > 0,
        tolerance: tol,
        samples,
        violations,
        worst,
        expected: None,
        computed: None,
        detail: detail.into(),
    }
}

fn diag(d: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(d.len(), d.iter().map(|&x| real(x))))
}

fn basis_vector(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = real(1.0);
    v
}

fn value_or_fail(name: String, expected: f64, got: Result<f64>, tol: f64) -> Check {
    match got {
        Ok(x) => Check::value(name, expected, x, tol),
        Err(e) => Check::failed(name, &e),
    }
}

/// `x` agrees with `stated` in its first `digits` decimals.
fn truncates_to(x: f64, stated: f64, digits: i32) -> bool {
    let scale = 10f64.powi(digits);
    (x * scale).floor() == (stated * scale).round()
}

/// The constants of the Newton basin, the sensitivity step and the
/// complexity bound, re-derived from their defining formulas.
pub fn constants() -> Vec<Check> {
    let mut out = Vec::new();
    let proj = projective_contraction_factor(GAMMA_C0).unwrap_or(f64::INFINITY);
    out.push(Check::bound(
        "c0 = 0.0739 contracts (projective)",
        proj <= 1.0,
        proj,
        1.0,
        "contraction factor",
    ));
    let aff = affine_contraction_factor(GAMMA_C0_AFFINE).unwrap_or(f64::INFINITY);
    out.push(Check::bound(
        "c0 = 0.288 contracts (affine)",
        aff <= 1.0,
        aff,
        1.0,
        "contraction factor",
    ));
    let th = theta0();
    out.push(Check::bound(
        "theta0 = 0.1389 to four digits",
        truncates_to(th, 0.1389, 4),
        th,
        0.1389,
        "theta0",
    ));
    out.push(Check::bound(
        "c0 <= theta0",
        GAMMA_C0 <= th,
        GAMMA_C0,
        th,
        "c0",
    ));
    out.push(Check::value(
        "alpha = (1+sqrt 5)2 sqrt 2",
        (1.0 + 5f64.sqrt()) * 2.0 * SQRT_2,
        ALPHA,
        1e-15,
    ));
    let rederived = (DEFAULT_EPSILON / (SQRT_2 + ALPHA * (1.0 + DEFAULT_EPSILON))).atan()
        / (1.0 + DEFAULT_EPSILON);
    let ce = sensitivity_constant(DEFAULT_EPSILON).unwrap_or(f64::NAN);
    out.push(Check::value(
        "C_eps re-derived at eps = 0.1640",
        rederived,
        ce,
        1e-15,
    ));
    out.push(Check::bound(
        "C_eps = 0.01167 to five digits",
        truncates_to(ce, 0.01167, 5),
        ce,
        0.01167,
        "C_eps",
    ));
    let step = (1.0 + DEFAULT_EPSILON) / ce;
    out.push(Check::bound(
        "(1+eps)/C_eps <= C = 100",
        step <= COMPLEXITY_CONSTANT,
        step,
        COMPLEXITY_CONSTANT,
        "step constant",
    ));
    out
}

fn wilkinson(eps: f64) -> Result<EigenTriple> {
    let s = eps.sqrt();
    let a = CMatrix::from_row_slice(2, 2, &[real(1.0), real(eps), real(1.0), real(1.0)]);
    EigenTriple::new(
        a,
        real(1.0 + s),
        CVector::from_vec(vec![real(s), real(1.0)]),
    )
}

fn upper_example(eps: f64) -> Result<EigenTriple> {
    let a = CMatrix::from_row_slice(2, 2, &[real(1.0), real(1.0 / eps), real(0.0), real(2.0)]);
    EigenTriple::new(a, real(1.0), basis_vector(2, 0))
}

/// Closed-form condition numbers of the small worked examples.
pub fn closed_forms() -> Vec<Check> {
    let mut out = Vec::new();
    let ex_a = EigenTriple::new(diag(&[1.0, -1.0]), real(1.0), basis_vector(2, 0));
    out.push(value_or_fail(
        "(a) mu_v(diag(1,-1), 1, e1)".into(),
        FRAC_1_SQRT_2,
        ex_a.and_then(|t| mu_v(&t)),
        CLOSED_FORM_RTOL,
    ));
    let ex_b = EigenTriple::new(diag(&[1.0, 0.0]), real(1.0), basis_vector(2, 0));
    out.push(value_or_fail(
        "(b) mu_lambda(e1e1*, 1, e1)".into(),
        FRAC_1_SQRT_2,
        ex_b.clone().and_then(|t| mu_lambda(&t)),
        CLOSED_FORM_RTOL,
    ));
    out.push(value_or_fail(
        "(b) mu_v(e1e1*, 1, e1)".into(),
        1.0,
        ex_b.and_then(|t| mu_v(&t)),
        CLOSED_FORM_RTOL,
    ));
    for eps in [0.5, 0.1, 0.01] {
        let t = EigenTriple::new(diag(&[1.0, 1.0 - eps]), real(1.0), basis_vector(2, 0));
        out.push(value_or_fail(
            format!("(c) mu_v(diag(1,1-e), 1, e1), e = {eps}"),
            (1.0 + (1.0 - eps) * (1.0 - eps)).sqrt() / eps,
            t.and_then(|t| mu_v(&t)),
            CLOSED_FORM_RTOL,
        ));
    }
    for eps in [0.25, 0.04] {
        let t = wilkinson(eps);
        out.push(value_or_fail(
            format!("(d) Wilkinson mu_v, e = {eps}"),
            (3.0 + eps * eps).sqrt() / (2.0 * eps.sqrt()),
            t.clone().and_then(|t| mu_v(&t)),
            SVD_CLOSED_FORM_RTOL,
        ));
        out.push(value_or_fail(
            format!("(d) Wilkinson mu_lambda, e = {eps}"),
            (1.0 + 6.0 * eps + eps * eps).sqrt() / (4.0 * eps.sqrt()),
            t.and_then(|t| mu_lambda(&t)),
            SVD_CLOSED_FORM_RTOL,
        ));
    }
    for eps in [0.1, 0.01] {
        let floor = 1.0 / (2.0 * eps);
        match upper_example(eps).and_then(|t| Ok((mu_lambda(&t)?, mu_v(&t)?))) {
            Ok((ml, mv)) => {
                out.push(Check::bound(
                    format!("(e) mu_lambda > 1/(2e), e = {eps}"),
                    ml > floor,
                    ml,
                    floor,
                    "mu_lambda",
                ));
                out.push(Check::bound(
                    format!("(e) mu_v > 1/(2e), e = {eps}"),
                    mv > floor,
                    mv,
                    floor,
                    "mu_v",
                ));
            }
            Err(e) => out.push(Check::failed(format!("(e) e = {eps}"), &e)),
        }
    }
    out
}

/// Wilkinson μ_λ from the defining formula with the (1+|λ|²/‖A‖²)⁻¹ factor:
/// √(1+6ε+ε²)/(2√ε(1+|λ|²/‖A‖_F²)).
pub fn wilkinson_mu_lambda(eps: f64) -> f64 {
    let lam = 1.0 + eps.sqrt();
    let r = lam * lam / (3.0 + eps * eps);
    (1.0 + 6.0 * eps + eps * eps).sqrt() / (2.0 * eps.sqrt() * (1.0 + r))
}

/// μ_v = √n/(2 sin(π/n)) and μ = max(1, μ_v) at every eigentriple of the
/// normalized roots-of-unity diagonal, n = 2..10.
pub fn roots_of_unity() -> Check {
    let mut samples = 0;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for n in 2..=10usize {
        let want = (n as f64).sqrt() / (2.0 * (PI / n as f64).sin());
        for j in 0..n {
            samples += 1;
            let got = starting_roots_of_unity(n, j).and_then(|t| Ok((mu_v(&t)?, mu(&t)?)));
            let err = match got {
                Ok((mv, m)) => rel(mv, want).max(rel(m, want.max(1.0))),
                Err(_) => f64::INFINITY,
            };
            worst = worst.max(err);
            violations += usize::from(!(err <= CLOSED_FORM_RTOL));
        }
    }
    Check {
        name: "roots of unity mu_v = sqrt(n)/(2 sin(pi/n)), n = 2..10".into(),
        passed: violations == 0,
        tolerance: CLOSED_FORM_RTOL,
        samples,
        violations,
        worst,
        expected: None,
        computed: None,
        detail: "max relative error".into(),
    }
}

/// μ_v = ‖A‖_F / min gap and μ_λ ≤ √2 for unitarily conjugated diagonals.
pub fn normal_matrices(seed: u64, trials: usize) -> Check {
    tally(
        "normal matrices: mu_v = |A|_F / gap, mu_lambda <= sqrt 2",
        IDENTITY_RTOL,
        "max relative error",
        seed,
        3,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let (a, d, u) = random_normal_matrix(rng, n);
            let j = rng.range(0, n - 1);
            let gap = (0..n)
                .filter(|&i| i != j)
                .map(|i| (d[i] - d[j]).norm())
                .fold(f64::INFINITY, f64::min);
            let want = frobenius_norm(&a) / gap;
            let t = EigenTriple::new(a, d[j], u.column(j).into_owned());
            let out = t.and_then(|t| Ok((mu_v(&t)?, mu_lambda(&t)?)));
            vec![match out {
                Ok((mv, ml)) => {
                    let err = rel(mv, want);
                    Outcome::one(err <= IDENTITY_RTOL && ml <= SQRT_2 + IDENTITY_RTOL, err)
                }
                Err(_) => Outcome::one(false, f64::INFINITY),
            }]
        },
    )
}

/// μ ≤ ‖(DF|_{K×v⊥})⁻¹‖ ≤ 2μ at normalized representatives.
pub fn operator_sandwich(seed: u64, trials: usize) -> Check {
    tally(
        "operator sandwich mu <= |DF^-1| <= 2 mu",
        IDENTITY_RTOL,
        "max |DF^-1|/mu",
        seed,
        4,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let t = random_triple(rng, n, Field::Complex);
            vec![match (mu(&t), newton_inverse_norm(&t)) {
                (Ok(m), Ok(g)) => {
                    Outcome::one(m < g + IDENTITY_RTOL && g < 2.0 * m + IDENTITY_RTOL, g / m)
                }
                _ => Outcome::one(false, f64::INFINITY),
            }]
        },
    )
}

/// μ_v·σ_min(projected restriction) = ‖A‖_F, and the nearest ill-posed
/// candidate is ill-posed and within the sin-bound.
pub fn distance_identity(seed: u64, trials: usize) -> Vec<Check> {
    let identity = tally(
        "distance identity mu_v * sigma_min = |A|_F",
        IDENTITY_RTOL,
        "max relative error",
        seed,
        5,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let t = random_triple(rng, n, Field::Complex);
            // A projectively equivalent, unnormalized representative.
            let s = rng.unit_phase() * rng.normal().exp();
            let scaled =
                EigenTriple::new_unchecked(&t.a * s, t.lambda * s, &t.v * (rng.unit_phase() * 3.0));
            let got = scaled.and_then(|t| {
                let sm = smallest_singular_value(&projected_restriction(&t.a, t.lambda, &t.v)?);
                Ok((mu_v(&t)? * sm, frobenius_norm(&t.a)))
            });
            vec![match got {
                Ok((lhs, rhs)) => {
                    let err = rel(lhs, rhs);
                    Outcome::one(err <= IDENTITY_RTOL, err)
                }
                Err(_) => Outcome::one(false, f64::INFINITY),
            }]
        },
    );
    let candidate = tally(
        "nearest ill-posed candidate: singular and within sin-bound",
        CANDIDATE_SLACK,
        "max sin(d) - bound",
        seed,
        6,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let t = random_triple(rng, n, Field::Complex);
            let got = nearest_illposed_candidate(&t).and_then(|p| {
                let sm = smallest_singular_value(&projected_restriction(&p.a, p.lambda, &p.v)?);
                let bound = (1.0 + lambda_ratio(&t)).powf(-0.5) / mu_v(&t)?;
                Ok((sm, dist_p2(&t, &p)?.sin() - bound))
            });
            vec![match got {
                Ok((sm, excess)) => Outcome::one(sm <= 1e-10 && excess <= CANDIDATE_SLACK, excess),
                Err(_) => Outcome::one(false, f64::INFINITY),
            }]
        },
    );
    vec![identity, candidate]
}

/// A triple on the variety near `t`: A moves along a direction in A^⊥ and
/// (λ, v) follows by Newton's method. Kept only if d_P2 ≤ radius.
fn perturbed_triple(rng: &mut TrialRng, t: &EigenTriple, radius: f64) -> Option<EigenTriple> {
    let n = t.dim();
    let dir = project_onto_complement(&t.a, &random_matrix(rng, n, Field::Complex));
    let dir = &dir / real(frobenius_norm(&dir));
    let mut step = radius * (0.05 + 0.95 * rng.uniform());
    for _ in 0..40 {
        let a2 = &t.a + &dir * real(step);
        let (mut l, mut v) = (t.lambda, t.v.clone());
        for _ in 0..12 {
            match newton_map(&a2, l, &v) {
                Ok((l2, v2)) => (l, v) = (l2, v2),
                Err(_) => break,
            }
        }
        if let Ok(t2) = EigenTriple::new(a2, l, v).and_then(|x| x.normalize()) {
            if is_well_posed(&t2) && dist_p2(t, &t2).is_ok_and(|d| d <= radius) {
                return Some(t2);
            }
        }
        step /= 2.0;
    }
    None
}

/// μ(t)/(1+ε) ≤ μ(t′) ≤ (1+ε)μ(t) for d_P2(t,t′) ≤ fraction·C_ε/μ(t).
pub fn sensitivity(seed: u64, trials: usize) -> Vec<Check> {
    SENSITIVITY_EPSILONS
        .iter()
        .enumerate()
        .map(|(k, &eps)| {
            let ce = sensitivity_constant(eps).unwrap_or(f64::NAN);
            tally(
                &format!("sensitivity two-sided (1+e) bound, e = {eps}"),
                eps,
                "max mu ratio",
                seed,
                7 + k as u64,
                trials,
                move |rng| {
                    let n = rng.range(2, 8);
                    let t = random_triple(rng, n, Field::Complex);
                    let Ok(m) = mu(&t) else {
                        return vec![Outcome::one(false, f64::INFINITY)];
                    };
                    let radius = SENSITIVITY_FRACTION * ce / m;
                    vec![match perturbed_triple(rng, &t, radius).map(|t2| mu(&t2)) {
                        Some(Ok(m2)) => {
                            let ratio = (m2 / m).max(m / m2);
                            Outcome::one(ratio <= 1.0 + eps, ratio)
                        }
                        _ => Outcome::one(false, f64::INFINITY),
                    }]
                },
            )
        })
        .collect()
}

/// λ₀ on a random complex ray from λ with d_P((A,λ₀),(A,λ)) = target.
fn lambda_at_pair_distance(
    rng: &mut TrialRng,
    a: &CMatrix,
    lambda: C64,
    target: f64,
) -> Result<C64> {
    let dir = rng.unit_phase();
    let base = pair_vector(a, lambda);
    let f = |s: f64| dist_p(pair_vector(a, lambda + dir * s).as_slice(), base.as_slice());
    let mut hi = target.max(1e-300);
    while f(hi)? < target {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::OutOfRange("pair distance unreachable".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-17 * hi {
            break;
        }
    }
    Ok(lambda + dir * (0.5 * (lo + hi)))
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaReport {
    pub projective: Check,
    pub affine: Check,
    pub quadratic: Check,
}

/// Random starts at START_FRACTION of the basin radius certify in both the
/// projective and affine settings; traces contract quadratically.
pub fn gamma_theorem(seed: u64, trials: usize) -> GammaReport {
    struct Trial {
        projective: Vec<Outcome>,
        affine: Vec<Outcome>,
        quadratic: Vec<Outcome>,
    }
    let salt = salted(seed, 11);
    let per_trial: Vec<Trial> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let rng = &mut TrialRng::for_trial(salt, i);
            let n = rng.range(2, 8);
            let t = random_triple(rng, n, Field::Complex);
            let mut out = Trial {
                projective: Vec::new(),
                affine: Vec::new(),
                quadratic: Vec::new(),
            };
            let Ok(m) = mu(&t) else {
                out.projective.push(Outcome::one(false, f64::INFINITY));
                return out;
            };
            for _ in 0..STARTS_PER_TRIPLE {
                let r = START_FRACTION * GAMMA_C0 / m;
                let phi = FRAC_PI_2 * rng.uniform();
                let start = lambda_at_pair_distance(rng, &t.a, t.lambda, r * phi.cos()).map(|l0| {
                    let v0 =
                        point_at_angle(rng, &t.v, r * phi.sin(), Field::Complex) * rng.unit_phase();
                    (l0, v0)
                });
                let Ok((l0, v0)) = start else {
                    out.projective.push(Outcome::one(false, f64::INFINITY));
                    continue;
                };
                let d0 = distance_to(&t.a, l0, &v0, &t).unwrap_or(f64::INFINITY);
                let ok = certify_approximate_solution(&t.a, l0, &v0, &t, DEFAULT_K_CHECK);
                out.projective.push(Outcome::one(ok, d0 * m / GAMMA_C0));
                out.quadratic.extend(quadratic_outcomes(&t, m, l0, &v0));

                let ra = START_FRACTION * GAMMA_C0_AFFINE / m;
                let phi = FRAC_PI_2 * rng.uniform();
                let l0 = t.lambda + rng.unit_phase() * (ra * phi.cos());
                let v0 =
                    point_at_angle(rng, &t.v, ra * phi.sin(), Field::Complex) * rng.unit_phase();
                let ok = certify_affine(&t.a, l0, &v0, &t, DEFAULT_K_CHECK);
                out.affine.push(Outcome::one(ok, ra * m / GAMMA_C0_AFFINE));
                out.quadratic.extend(quadratic_outcomes(&t, m, l0, &v0));
            }
            out
        })
        .collect();
    let reduce = |name: &str, tol: f64, detail: &str, pick: &dyn Fn(&Trial) -> &Vec<Outcome>| {
        let mut samples = 0;
        let mut violations = 0;
        let mut worst = f64::NEG_INFINITY;
        for o in per_trial.iter().flat_map(|t| pick(t).iter()) {
            samples += o.samples;
            violations += usize::from(!o.ok);
            worst = worst.max(o.value);
        }
        Check {
            name: name.into(),
            passed: violations == 0 && samples > 0,
            tolerance: tol,
            samples,
            violations,
            worst,
            expected: None,
            computed: None,
            detail: detail.into(),
        }
    };
    GammaReport {
        projective: reduce(
            "Newton basin c0 = 0.0739 (projective), starts at 0.9 c0/mu",
            0.0,
            "max start distance in units of c0/mu",
            &|t| &t.projective,
        ),
        affine: reduce(
            "Newton basin c0 = 0.288 (affine), starts at 0.9 c0/mu",
            0.0,
            "max start distance in units of c0/mu",
            &|t| &t.affine,
        ),
        quadratic: reduce(
            "quadratic convergence d_{k+1} <= 4 mu d_k^2",
            QUADRATIC_FACTOR,
            "max d_{k+1}/(mu d_k^2)",
            &|t| &t.quadratic,
        ),
    }
}

fn quadratic_outcomes(t: &EigenTriple, m: f64, l0: C64, v0: &CVector) -> Vec<Outcome> {
    let Ok(trace) = newton_iterate(&t.a, l0, v0, DEFAULT_K_CHECK, Some(t)) else {
        return vec![Outcome::one(false, f64::INFINITY)];
    };
    let d = &trace.distances_to_target;
    d.windows(2)
        .filter(|w| w[0] <= GAMMA_C0 / m && w[0] >= DISTANCE_FLOOR)
        .map(|w| {
            let ratio = w[1] / (m * w[0] * w[0]);
            Outcome::one(ratio <= QUADRATIC_FACTOR, ratio)
        })
        .collect()
}

/// Linear homotopies from the roots-of-unity diagonal to random complex
/// matrices: every mesh point certified and K within both step bounds.
pub fn main_theorem(seed: u64, trials: usize) -> Check {
    const DIMS: [usize; 3] = [4, 6, 8];
    const REDRAWS: usize = 20;
    tally(
        "main theorem K <= 100 l_mu + 1, all mesh points certified",
        0.0,
        "max K/(100 l_mu + 1)",
        seed,
        13,
        trials,
        |rng| {
            let n = DIMS[rng.range(0, DIMS.len() - 1)];
            let cfg = TrackerConfig::default();
            for _ in 0..REDRAWS {
                let j = rng.range(0, n - 1);
                let Ok(start) = starting_roots_of_unity(n, j).and_then(|t| t.normalize()) else {
                    return vec![Outcome::one(false, f64::INFINITY)];
                };
                let target = random_normalized_matrix(rng, n, Field::Complex);
                let Ok(path) = MatrixPath::linear(start.a.clone(), target) else {
                    return vec![Outcome::one(false, f64::INFINITY)];
                };
                match track(&path, &start, &cfg) {
                    Ok(run) => {
                        let ok =
                            run.all_certified && run.bound_satisfied && run.sharp_bound_satisfied;
                        let ratio = run.k as f64 / (COMPLEXITY_CONSTANT * run.ell_mu + 1.0);
                        return vec![Outcome::one(ok, ratio)];
                    }
                    Err(Error::PathLeavesW { .. }) => continue,
                    Err(_) => return vec![Outcome::one(false, f64::INFINITY)],
                }
            }
            vec![Outcome::one(false, f64::INFINITY)]
        },
    )
}

/// D(A, λ, v): the determinant of the projected restriction in an oriented
/// frame of v (real field).
pub fn orientation_discriminant(t: &EigenTriple) -> Result<f64> {
    orientation_det(&t.v, &oriented_restriction(&t.a, t.lambda, &t.v)?)
}

/// Unitary invariance, Newton scaling, the orientation discriminant and the
/// comparison inequalities between distances and norms.
pub fn invariance(seed: u64, trials: usize) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(tally(
        "unitary invariance of mu_lambda, mu_v, mu, d_P2",
        IDENTITY_RTOL,
        "max relative change",
        seed,
        21,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let t = random_triple(rng, n, Field::Complex);
            let t2 = random_triple(rng, n, Field::Complex);
            let u = random_unitary(rng, n, Field::Complex);
            let (s, s2) = (t.act(&u), t2.act(&u));
            let got = (|| -> Result<f64> {
                let e = [
                    rel(mu_lambda(&s)?, mu_lambda(&t)?),
                    rel(mu_v(&s)?, mu_v(&t)?),
                    rel(mu(&s)?, mu(&t)?),
                    (dist_p2(&s, &s2)? - dist_p2(&t, &t2)?).abs(),
                ];
                Ok(e.into_iter().fold(0.0, f64::max))
            })();
            vec![match got {
                Ok(e) => Outcome::one(e <= IDENTITY_RTOL, e),
                Err(_) => Outcome::one(false, f64::INFINITY),
            }]
        },
    ));
    out.push(tally(
        "Newton map commutes with scaling of (A, lambda) and v",
        IDENTITY_RTOL,
        "max discrepancy",
        seed,
        22,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let t = random_triple(rng, n, Field::Complex);
            let l0 = t.lambda + rng.unit_phase() * (0.01 * rng.uniform());
            let angle = 0.05 * rng.uniform();
            let v0 = point_at_angle(rng, &t.v, angle, Field::Complex);
            let s = rng.unit_phase() * rng.normal().exp();
            let cv = rng.unit_phase() * rng.normal().exp();
            let got = (|| -> Result<f64> {
                let (l1, v1) = newton_map(&t.a, l0, &v0)?;
                let (l2, v2) = newton_map(&(&t.a * s), l0 * s, &(&v0 * cv))?;
                let dl = (l2 / s - l1).norm() / l1.norm().max(1.0);
                Ok(dl.max(dist_p_vec(&v1, &v2)?))
            })();
            vec![match got {
                Ok(e) => Outcome::one(e <= IDENTITY_RTOL, e),
                Err(_) => Outcome::one(false, f64::INFINITY),
            }]
        },
    ));
    out.push(tally(
        "D(UAU^-1, lambda, Uv) = D(A, lambda, v) for U in SO(n)",
        IDENTITY_RTOL,
        "max relative change",
        seed,
        23,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let t = random_triple(rng, n, Field::Real);
            let q = random_special_orthogonal(rng, n);
            let got = (|| -> Result<f64> {
                let d0 = orientation_discriminant(&t)?;
                let d1 = orientation_discriminant(&t.act(&q))?;
                Ok(rel(d1, d0))
            })();
            vec![match got {
                Ok(e) => Outcome::one(e <= IDENTITY_RTOL, e),
                Err(_) => Outcome::one(false, f64::INFINITY),
            }]
        },
    ));
    out.push(tally(
        "D(aA, a lambda, bv) = a^(n-1) D(A, lambda, v)",
        IDENTITY_RTOL,
        "max relative error",
        seed,
        24,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let t = random_triple(rng, n, Field::Real);
            let a = rng.normal().signum() * (0.5 + rng.uniform());
            let b = rng.normal().signum() * (0.5 + 2.0 * rng.uniform());
            let got = (|| -> Result<f64> {
                let d0 = orientation_discriminant(&t)?;
                let s = EigenTriple::new_unchecked(&t.a * real(a), t.lambda * a, &t.v * real(b))?;
                Ok(rel(
                    orientation_discriminant(&s)?,
                    a.powi(n as i32 - 1) * d0,
                ))
            })();
            vec![match got {
                Ok(e) => Outcome::one(e <= IDENTITY_RTOL, e),
                Err(_) => Outcome::one(false, f64::INFINITY),
            }]
        },
    ));
    out.push(tally(
        "complement projection inverse norm = 1/cos d_P(v, v')",
        IDENTITY_RTOL,
        "max relative error",
        seed,
        25,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let v = random_unit_vector(rng, n, Field::Complex);
            let theta = 1.4 * rng.uniform();
            let w = point_at_angle(rng, &v, theta, Field::Complex) * rng.unit_phase();
            let got = (|| -> Result<f64> {
                let want = 1.0 / dist_p_vec(&v, &w)?.cos();
                Ok(rel(complement_projection_inverse_norm(&v, &w)?, want))
            })();
            vec![match got {
                Ok(e) => Outcome::one(e <= IDENTITY_RTOL, e),
                Err(_) => Outcome::one(false, f64::INFINITY),
            }]
        },
    ));
    out.push(tally(
        "second derivative norm at most 1",
        0.0,
        "max |D2F(x)(y)|/(|x||y|)",
        seed,
        26,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let ld = rng.scalar(Field::Complex);
            let ed = rng.scalar(Field::Complex);
            let vd = crate::random::random_vector(rng, n, Field::Complex);
            let ud = crate::random::random_vector(rng, n, Field::Complex);
            let lhs = vector_norm(&second_derivative(ld, &vd, ed, &ud));
            let nx = ld.norm().hypot(vector_norm(&vd));
            let ny = ed.norm().hypot(vector_norm(&ud));
            let ratio = lhs / (nx * ny);
            vec![Outcome::one(ratio <= 1.0 + 1e-14, ratio)]
        },
    ));
    out.push(tally(
        "d_P2 <= beta_c (|dl|^2 + d_P(v,v')^2)^(1/2)",
        0.0,
        "max d_P2 / bound",
        seed,
        27,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let t = random_triple(rng, n, Field::Complex);
            let cdist = 1.4 * rng.uniform();
            let l2 = t.lambda + rng.unit_phase() * cdist;
            let angle = FRAC_PI_2 * rng.uniform();
            let v2 = point_at_angle(rng, &t.v, angle, Field::Complex);
            let got = (|| -> Result<f64> {
                let s = EigenTriple::new_unchecked(t.a.clone(), l2, v2.clone())?;
                let bound = beta(cdist)? * cdist.hypot(dist_p_vec(&t.v, &v2)?);
                Ok(dist_p2(&t, &s)? / bound)
            })();
            vec![match got {
                Ok(r) => Outcome::one(r <= 1.0 + 1e-12, r),
                Err(_) => Outcome::one(false, f64::INFINITY),
            }]
        },
    ));
    out.push(tally(
        "(|dl|^2 + d_T(v,v')^2)^(1/2) <= R_theta d_P2 when d_P2 < theta",
        0.0,
        "max lhs / (R_theta d_P2)",
        seed,
        28,
        trials,
        |rng| {
            let n = rng.range(2, 8);
            let t = random_triple(rng, n, Field::Complex);
            let theta = FRAC_PI_4 * (0.02 + 0.97 * rng.uniform());
            for _ in 0..100 {
                let l2 = t.lambda + rng.unit_phase() * (theta * rng.uniform());
                let angle = theta * rng.uniform();
                let v2 = point_at_angle(rng, &t.v, angle, Field::Complex);
                let got = (|| -> Result<Option<f64>> {
                    let s = EigenTriple::new_unchecked(t.a.clone(), l2, v2.clone())?;
                    let d = dist_p2(&t, &s)?;
                    if d >= theta || d == 0.0 {
                        return Ok(None);
                    }
                    let lhs = (t.lambda - l2)
                        .norm()
                        .hypot(dist_t(t.v.as_slice(), v2.as_slice())?);
                    Ok(Some(lhs / (r_theta(theta)? * d)))
                })();
                match got {
                    Ok(Some(r)) => return vec![Outcome::one(r <= 1.0 + 1e-12, r)],
                    Ok(None) => continue,
                    Err(_) => return vec![Outcome::one(false, f64::INFINITY)],
                }
            }
            vec![Outcome::one(false, f64::INFINITY)]
        },
    ));
    out
}

/// The dense eigensolver finds n distinct, well-posed eigentriples of a
/// random complex matrix.
pub fn root_count(seed: u64, trials: usize) -> Check {
    tally(
        "generic root count: n well-posed eigentriples",
        0.0,
        "max missing triples",
        seed,
        31,
        trials,
        |rng| {
            let n = rng.range(2, 6);
            let a = random_matrix(rng, n, Field::Complex);
            let pairs = eigenpairs(&a);
            let good = pairs
                .iter()
                .filter(|p| {
                    EigenTriple::new(a.clone(), p.lambda, p.v.clone())
                        .is_ok_and(|t| is_well_posed(&t))
                })
                .count();
            let distinct = pairs.iter().enumerate().all(|(i, p)| {
                pairs[..i]
                    .iter()
                    .all(|q| (p.lambda - q.lambda).norm() > 1e-8 * frobenius_norm(&a))
            });
            let ok = pairs.len() == n && good == n && distinct;
            vec![Outcome::one(ok, (n - good.min(n)) as f64)]
        },
    )
}
