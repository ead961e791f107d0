//! Input files for the worked examples.

use serde::Serialize;
use serde_json::{json, Value};

use eigenpath::io::{MatrixLiteral, PathLiteral, TripleLiteral};
use eigenpath::random::{random_normalized_matrix, TrialRng};
use eigenpath::{starting_roots_of_unity, CMatrix, CVector, EigenTriple, Field, C64};

fn real_matrix(n: usize, rows: &[f64]) -> CMatrix {
    CMatrix::from_row_slice(
        n,
        n,
        &rows.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>(),
    )
}

fn real_vector(xs: &[f64]) -> CVector {
    CVector::from_iterator(xs.len(), xs.iter().map(|&x| C64::new(x, 0.0)))
}

fn triple(a: CMatrix, lambda: f64, v: &[f64]) -> Value {
    let t = EigenTriple::new(a, C64::new(lambda, 0.0), real_vector(v))
        .expect("example is an eigentriple");
    to_value(&TripleLiteral::from_triple(&t))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("literal serializes")
}

fn path(p: PathLiteral) -> Value {
    to_value(&p)
}

/// (file name, contents) for every example; the random path uses `seed`.
pub fn example_files(seed: u64) -> Vec<(String, Value)> {
    let mut out = Vec::new();
    out.push((
        "a.json".into(),
        triple(real_matrix(2, &[1.0, 0.0, 0.0, -1.0]), 1.0, &[1.0, 0.0]),
    ));
    out.push((
        "b.json".into(),
        triple(real_matrix(2, &[1.0, 0.0, 0.0, 0.0]), 1.0, &[1.0, 0.0]),
    ));
    out.push((
        "c.json".into(),
        triple(real_matrix(2, &[1.0, 0.0, 0.0, 0.9]), 1.0, &[1.0, 0.0]),
    ));
    let eps: f64 = 0.04;
    out.push((
        "d.json".into(),
        triple(
            real_matrix(2, &[1.0, eps, 1.0, 1.0]),
            1.0 + eps.sqrt(),
            &[eps.sqrt(), 1.0],
        ),
    ));
    out.push((
        "e.json".into(),
        triple(real_matrix(2, &[1.0, 10.0, 0.0, 2.0]), 1.0, &[1.0, 0.0]),
    ));
    out.push((
        "ill-posed.json".into(),
        triple(
            real_matrix(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            0.0,
            &[0.0, 1.0, 0.0],
        ),
    ));

    let eps: f64 = 0.25;
    let w = real_matrix(2, &[1.0, eps, 1.0, 1.0]);
    out.push((
        "newton-wilkinson.json".into(),
        json!({
            "A": MatrixLiteral::from_matrix(&w),
            "lambda": [1.0 + eps.sqrt() + 0.01, 0.0],
            "v": [[eps.sqrt() + 0.02, 0.0], [1.0, 0.0]],
            "target": { "lambda": [1.0 + eps.sqrt(), 0.0], "v": [[eps.sqrt(), 0.0], [1.0, 0.0]] },
        }),
    ));

    let d = real_matrix(2, &[1.0, 0.0, 0.0, 0.5]);
    out.push((
        "path-constant.json".into(),
        path(PathLiteral::Linear {
            a0: MatrixLiteral::from_matrix(&d),
            a1: MatrixLiteral::from_matrix(&d),
        }),
    ));
    out.push((
        "path-collision.json".into(),
        path(PathLiteral::Linear {
            a0: MatrixLiteral::from_matrix(&real_matrix(2, &[2.0, 0.0, 0.0, 0.0])),
            a1: MatrixLiteral::from_matrix(&real_matrix(2, &[0.0, 0.0, 0.0, 2.0])),
        }),
    ));
    out.push((
        "path-orbit.json".into(),
        path(PathLiteral::UnitaryOrbit {
            a: MatrixLiteral::from_matrix(&real_matrix(2, &[1.0, 1.0, 0.0, -1.0])),
            generator: MatrixLiteral::from_matrix(&real_matrix(2, &[0.0, 1.0, -1.0, 0.0])),
        }),
    ));
    let n = 6;
    let start = starting_roots_of_unity(n, 0).expect("valid index");
    let mut rng = TrialRng::new(seed);
    let target = random_normalized_matrix(&mut rng, n, Field::Complex);
    out.push((
        "path-random.json".into(),
        path(PathLiteral::Linear {
            a0: MatrixLiteral::from_matrix(&start.a),
            a1: MatrixLiteral::from_matrix(&target),
        }),
    ));
    out
}
