//! Closed-form Rindler expansions of the Unruh vacua and their excitations,
//! transcribed term by term, shared by the golden-state and acceptance suites.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rindler_fock::fock::{OccupationKey, SparseState};
use rindler_fock::rindler::{
    apply_unruh_creation, build_unruh_vacuum, FieldSpec, SqueezeParameter, UnruhWeights,
};

pub fn sample_points() -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    (0..5).map(|_| rng.random_range(0.0..FRAC_PI_4)).collect()
}

pub fn weights() -> UnruhWeights {
    UnruhWeights::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap()
}

/// Expands the four-slot Dirac shorthand: `0`, `↑`, `↓`, `p` per slot.
fn dirac_digits(slots: &str) -> String {
    slots
        .chars()
        .map(|c| match c {
            '0' => "00",
            '↑' => "10",
            '↓' => "01",
            'p' => "11",
            _ => panic!("bad slot {c}"),
        })
        .collect()
}

fn expected(field: &FieldSpec, terms: &[(Complex64, String)]) -> SparseState {
    SparseState::from_terms(
        field.rindler_ordering(),
        terms
            .iter()
            .map(|(a, d)| (OccupationKey::from_digits(d).unwrap(), *a)),
    )
    .unwrap()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(built, expected)` pair for one state at one `r`.
pub type Case = (SparseState, SparseState);

pub fn grassmann_vacuum(r: f64) -> Case {
    let f = FieldSpec::grassmann();
    let (s, c) = r.sin_cos();
    let want = expected(
        &f,
        &[
            (re(c * c), "0000".into()),
            (re(-s * c), "0011".into()),
            (re(s * c), "1100".into()),
            (re(-s * s), "1111".into()),
        ],
    );
    (build_unruh_vacuum(&f, SqueezeParameter::new(r).unwrap()), want)
}

pub fn grassmann_excitation(r: f64) -> Case {
    let f = FieldSpec::grassmann();
    let q = weights();
    let (s, c) = r.sin_cos();
    let sq = SqueezeParameter::new(r).unwrap();
    let want = expected(
        &f,
        &[
            (q.q_r * c, "1000".into()),
            (-q.q_r * s, "1011".into()),
            (q.q_l * s, "1101".into()),
            (q.q_l * c, "0001".into()),
        ],
    );
    let got = apply_unruh_creation(&f, None, q, sq, &build_unruh_vacuum(&f, sq)).unwrap();
    (got, want)
}

pub fn dirac_vacuum(r: f64) -> Case {
    let f = FieldSpec::dirac();
    let (s, c) = r.sin_cos();
    let t = |a: f64, k: &str| (re(a), dirac_digits(k));
    let want = expected(
        &f,
        &[
            t(c.powi(4), "0000"),
            t(-c.powi(3) * s, "00↑↓"),
            t(-c.powi(3) * s, "00↓↑"),
            t(c * c * s * s, "00pp"),
            t(c.powi(3) * s, "↑↓00"),
            t(c.powi(3) * s, "↓↑00"),
            t(-s * s * c * c, "↑↓↑↓"),
            t(-s * s * c * c, "↑↓↓↑"),
            t(-s * s * c * c, "↓↑↑↓"),
            t(-s * s * c * c, "↓↑↓↑"),
            t(c * s.powi(3), "↑↓pp"),
            t(c * s.powi(3), "↓↑pp"),
            t(s.powi(4), "pppp"),
            t(-c * s.powi(3), "pp↑↓"),
            t(-c * s.powi(3), "pp↓↑"),
            t(c * c * s * s, "pp00"),
        ],
    );
    (build_unruh_vacuum(&f, SqueezeParameter::new(r).unwrap()), want)
}

fn dirac_excitation_terms(q: UnruhWeights, r: f64, up: bool) -> Vec<(Complex64, String)> {
    let (s, c) = r.sin_cos();
    let sg = if up { 1.0 } else { -1.0 };
    let sym = if up { "↑" } else { "↓" };
    let k = |pattern: &str| dirac_digits(&pattern.replace('σ', sym));
    vec![
        (q.q_l * c.powi(3), k("000σ")),
        (q.q_l * (c * c * s), k("↑↓0σ")),
        (q.q_l * (c * c * s), k("↓↑0σ")),
        (q.q_l * (c * s * s), k("pp0σ")),
        (q.q_l * (sg * c * c * s), k("00σp")),
        (q.q_l * (sg * c * s * s), k("↑↓σp")),
        (q.q_l * (sg * c * s * s), k("↓↑σp")),
        (q.q_l * (sg * s.powi(3)), k("ppσp")),
        (q.q_r * c.powi(3), k("σ000")),
        (q.q_r * (-c * c * s), k("σ0↑↓")),
        (q.q_r * (-c * c * s), k("σ0↓↑")),
        (q.q_r * (c * s * s), k("σ0pp")),
        (q.q_r * (sg * c * c * s), k("pσ00")),
        (q.q_r * (sg * s.powi(3)), k("pσpp")),
        (q.q_r * (-sg * c * s * s), k("pσ↑↓")),
        (q.q_r * (-sg * c * s * s), k("pσ↓↑")),
    ]
}

pub fn dirac_excitation(r: f64, up: bool) -> Case {
    let f = FieldSpec::dirac();
    let q = weights();
    let sq = SqueezeParameter::new(r).unwrap();
    let sigma = if up { Some(1) } else { Some(-1) };
    let got = apply_unruh_creation(&f, sigma, q, sq, &build_unruh_vacuum(&f, sq)).unwrap();
    (got, expected(&f, &dirac_excitation_terms(q, r, up)))
}

pub fn dirac_pair(r: f64) -> Case {
    let f = FieldSpec::dirac();
    let q = weights();
    let (s, c) = r.sin_cos();
    let sq = SqueezeParameter::new(r).unwrap();
    let (rr, ll, rl) = (q.q_r * q.q_r, q.q_l * q.q_l, q.q_r * q.q_l);
    let t = |a: Complex64, k: &str| (a, dirac_digits(k));
    let want = expected(
        &f,
        &[
            t(rr * (c * c), "p000"),
            t(rr * (-s * c), "p0↑↓"),
            t(rr * (-s * c), "p0↓↑"),
            t(rr * (s * s), "p0pp"),
            t(ll * (c * c), "000p"),
            t(ll * (s * c), "↑↓0p"),
            t(ll * (s * c), "↓↑0p"),
            t(ll * (s * s), "pp0p"),
            t(rl * (c * c), "↑00↓"),
            t(rl * (-c * s), "↑0↓p"),
            t(rl * (s * c), "p↑0↓"),
            t(rl * (-s * s), "p↑↓p"),
            t(rl * (-c * c), "↓00↑"),
            t(rl * (-c * s), "↓0↑p"),
            t(rl * (s * c), "p↓0↑"),
            t(rl * (s * s), "p↓↑p"),
        ],
    );
    let vac = build_unruh_vacuum(&f, sq);
    let down = apply_unruh_creation(&f, Some(-1), q, sq, &vac).unwrap();
    let got = apply_unruh_creation(&f, Some(1), q, sq, &down).unwrap();
    (got, want)
}

/// Every golden case at every sample point, labelled.
pub fn all_cases() -> Vec<(String, Case)> {
    let mut out = Vec::new();
    for r in sample_points() {
        out.push((format!("grassmann vacuum r={r:.4}"), grassmann_vacuum(r)));
        out.push((format!("grassmann excitation r={r:.4}"), grassmann_excitation(r)));
        out.push((format!("dirac vacuum r={r:.4}"), dirac_vacuum(r)));
        out.push((format!("dirac ↑ r={r:.4}"), dirac_excitation(r, true)));
        out.push((format!("dirac ↓ r={r:.4}"), dirac_excitation(r, false)));
        out.push((format!("dirac pair r={r:.4}"), dirac_pair(r)));
    }
    out
}

pub fn deviation((got, want): &Case) -> f64 {
    got.max_abs_diff(want).unwrap()
}
