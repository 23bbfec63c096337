//! Named built-in configurations and seeded random instance generators
//! shared by the verification suite, the tests, and the CLI.

use num::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::eta::ProbabilityVector;
use crate::linalg::{Int, Rat};
use crate::projective::{Configuration, ProjectivePoint};
use crate::Result;

/// The `n+1` coordinate points of `RP^n`.
pub fn coordinate_simplex(n: usize) -> Configuration {
    let points = (0..=n)
        .map(|i| {
            let entries: Vec<i64> = (0..=n).map(|j| i64::from(i == j)).collect();
            ProjectivePoint::from_i64(&entries).expect("unit vector")
        })
        .collect();
    Configuration::new(n, points).expect("distinct coordinate points")
}

/// Three collinear points plus an apex: full span with one fat line flat.
pub fn three_point_line() -> Configuration {
    Configuration::from_rows(2, &[&[1, 0, 0], &[1, 1, 0], &[1, 2, 0], &[0, 0, 1]])
        .expect("fixture rows")
}

/// Resolves a built-in configuration name: `E1`..`E5`, `simplex-1` through
/// `simplex-4`, `three-point-line`.
pub fn named(name: &str) -> Option<Configuration> {
    let lower = name.to_ascii_lowercase();
    if let Some(n) = lower.strip_prefix('e').and_then(|s| s.parse::<usize>().ok()) {
        if (1..=5).contains(&n) {
            return Configuration::generate_en(n).ok();
        }
        return None;
    }
    if let Some(d) = lower
        .strip_prefix("simplex-")
        .and_then(|s| s.parse::<usize>().ok())
    {
        if (1..=4).contains(&d) {
            return Some(coordinate_simplex(d));
        }
        return None;
    }
    if lower == "three-point-line" {
        return Some(three_point_line());
    }
    None
}

pub const BUILTIN_NAMES: &[&str] = &[
    "E1",
    "E2",
    "E3",
    "E4",
    "E5",
    "simplex-1",
    "simplex-2",
    "simplex-3",
    "simplex-4",
    "three-point-line",
];

/// The desk-scale fixture corpus: the first three cubes, the coordinate
/// simplexes up to dimension 4, and the three-point-line fixture.
pub fn corpus() -> Vec<(String, Configuration)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push((
            format!("E{n}"),
            Configuration::generate_en(n).expect("cube"),
        ));
    }
    for d in 1..=4 {
        out.push((format!("simplex-{d}"), coordinate_simplex(d)));
    }
    out.push(("three-point-line".into(), three_point_line()));
    out
}

/// A random configuration with distinct canonical points and small
/// coordinates (degeneracies are intentionally likely).
pub fn random_configuration(
    rng: &mut ChaCha8Rng,
    dims: std::ops::RangeInclusive<usize>,
    max_points: usize,
    require_full_span: bool,
) -> Configuration {
    loop {
        let dim = rng.gen_range(dims.clone());
        let lo = if require_full_span { dim + 1 } else { 1 };
        let count = rng.gen_range(lo..=max_points.max(lo));
        let mut points: Vec<ProjectivePoint> = Vec::new();
        let mut attempts = 0;
        while points.len() < count && attempts < 200 {
            attempts += 1;
            let entries: Vec<i64> = (0..=dim).map(|_| rng.gen_range(-3i64..=3)).collect();
            if entries.iter().all(|&x| x == 0) {
                continue;
            }
            let p = ProjectivePoint::from_i64(&entries).expect("nonzero");
            if !points.contains(&p) {
                points.push(p);
            }
        }
        if points.len() < count {
            continue;
        }
        let config = Configuration::new(dim, points).expect("distinct points");
        if !require_full_span || config.has_full_span() {
            return config;
        }
    }
}

/// A random point outside the configuration.
pub fn random_point_outside(rng: &mut ChaCha8Rng, h: &Configuration) -> ProjectivePoint {
    loop {
        let entries: Vec<i64> = (0..=h.ambient_dim())
            .map(|_| rng.gen_range(-5i64..=5))
            .collect();
        if entries.iter().all(|&x| x == 0) {
            continue;
        }
        let p = ProjectivePoint::from_i64(&entries).expect("nonzero");
        if !h.contains(&p) {
            return p;
        }
    }
}

/// A direction in the span of two configuration points but outside the
/// configuration, which forces those two projections to collide.
pub fn collision_direction(h: &Configuration, i: usize, j: usize) -> Option<ProjectivePoint> {
    let a = h.point(i).rep().entries();
    let b = h.point(j).rep().entries();
    let sum: Vec<Int> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    let p = ProjectivePoint::from_int(&crate::linalg::IntVector::new(sum).ok()?).ok()?;
    (!h.contains(&p)).then_some(p)
}

/// Mass vectors for the flag-formula agreement test: uniform, all mass on
/// one point, a random positive vector, a vector with a negative entry, and
/// a two-point mix. All sum to one exactly.
pub fn probability_vectors(rng: &mut ChaCha8Rng, len: usize) -> Result<Vec<ProbabilityVector>> {
    let mut out = vec![
        ProbabilityVector::uniform(len),
        ProbabilityVector::indicator(len, 0),
    ];
    // random positive rationals a_i / sum
    let weights: Vec<i64> = (0..len).map(|_| rng.gen_range(1i64..=9)).collect();
    let total: i64 = weights.iter().sum();
    out.push(ProbabilityVector::new(
        weights
            .iter()
            .map(|&w| Rat::new(Int::from(w), Int::from(total)))
            .collect(),
    )?);
    // one negative entry: p_0 = -1/2, the rest split 3/2
    if len >= 2 {
        let mut p = vec![Rat::new(Int::from(-1), Int::from(2))];
        let rest: Vec<i64> = (1..len).map(|_| rng.gen_range(1i64..=9)).collect();
        let rest_total: i64 = rest.iter().sum();
        for w in &rest {
            p.push(Rat::new(Int::from(3 * w), Int::from(2 * rest_total)));
        }
        out.push(ProbabilityVector::new(p)?);
    }
    // a two-point mix
    if len >= 2 {
        let mut p = vec![Rat::zero(); len];
        p[0] = Rat::new(Int::one(), Int::from(3));
        p[len - 1] = Rat::new(Int::from(2), Int::from(3));
        out.push(ProbabilityVector::new(p)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn named_lookup() {
        assert_eq!(named("E2").unwrap().len(), 4);
        assert_eq!(named("e3").unwrap().len(), 8);
        assert_eq!(named("simplex-3").unwrap().len(), 4);
        assert_eq!(named("three-point-line").unwrap().len(), 4);
        assert!(named("E9").is_none());
        assert!(named("nonsense").is_none());
        for name in BUILTIN_NAMES {
            assert!(named(name).is_some(), "{name}");
        }
    }

    #[test]
    fn corpus_members_are_valid() {
        for (name, c) in corpus() {
            assert!(c.len() >= 2, "{name}");
            assert!(c.has_full_span(), "{name} must span for the agreement suite");
        }
    }

    #[test]
    fn random_configurations_are_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let ca = random_configuration(&mut a, 1..=4, 10, true);
            let cb = random_configuration(&mut b, 1..=4, 10, true);
            assert_eq!(ca, cb);
            assert!(ca.has_full_span());
            assert!(ca.len() <= 10);
        }
    }

    #[test]
    fn probability_vectors_include_a_negative_entry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ps = probability_vectors(&mut rng, 5).unwrap();
        assert_eq!(ps.len(), 5);
        assert!(ps
            .iter()
            .any(|p| p.entries().iter().any(|x| x < &Rat::zero())));
    }
}
