//! Statistics of the +-1 cube configuration: dependent-tuple fractions,
//! span-membership spectra under verified projections, exact and
//! Monte-Carlo Bernoulli singularity counts, and threshold-function counts
//! with their bounds.
//!
//! Hot loops run on plain machine integers: cube coordinates are +-1 and the
//! matrices stay tiny, so fraction-free elimination never leaves i64 range
//! (entries are bounded by minors of the input). Everything user-facing is
//! reported as an exact rational.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::eta;
use crate::lattice;
use crate::linalg::{Int, Rat, Subspace};
use crate::projective::{binomial, Configuration, ProjectorDescription};
use crate::{par, Error, Result};

// ---------------------------------------------------------------------------
// small exact integer linear algebra on +-1-bred matrices

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Echelon span of small integer rows; entries stay bounded because every
/// reduced row is divided by its content.
#[derive(Debug, Clone, Default)]
struct SmallSpan {
    rows: Vec<Vec<i64>>,
    pivots: Vec<usize>,
}

impl SmallSpan {
    fn reduce(&self, row: &[i64]) -> Vec<i64> {
        let mut work = row.to_vec();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if work[p] == 0 {
                continue;
            }
            let a = r[p];
            let b = work[p];
            for (w, rv) in work.iter_mut().zip(r) {
                *w = w.checked_mul(a).and_then(|x| x.checked_sub(rv.checked_mul(b).expect("i64 span product")))
                    .expect("i64 span reduction");
            }
            let g = work.iter().fold(0i64, |acc, &x| gcd_i64(acc, x));
            if g > 1 {
                for w in work.iter_mut() {
                    *w /= g;
                }
            }
        }
        work
    }

    fn insert(&mut self, row: &[i64]) -> bool {
        let reduced = self.reduce(row);
        let Some(pivot) = reduced.iter().position(|&x| x != 0) else {
            return false;
        };
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.rows.insert(at, reduced);
        self.pivots.insert(at, pivot);
        true
    }

    fn contains(&self, row: &[i64]) -> bool {
        self.reduce(row).iter().all(|&x| x == 0)
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

fn rank_small(rows: &[&[i64]]) -> usize {
    let mut s = SmallSpan::default();
    for r in rows {
        s.insert(r);
    }
    s.dim()
}

/// Bareiss determinant; intermediate entries are minors of the input, so
/// i64 is ample for the +-1 matrices used here (size at most ~14).
fn det_small(mut a: Vec<i64>, n: usize) -> i64 {
    if n == 0 {
        return 1;
    }
    let mut sign = 1i64;
    let mut prev = 1i64;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| a[r * n + k] != 0) else {
                return 0;
            };
            for c in 0..n {
                a.swap(k * n + c, swap * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i * n + j] = (a[i * n + j] * a[k * n + k] - a[i * n + k] * a[k * n + j]) / prev;
            }
            a[i * n + k] = 0;
        }
        prev = a[k * n + k];
    }
    sign * a[(n - 1) * n + (n - 1)]
}

/// The cube rows as plain machine integers: (1, b_1, ..., b_n) in the same
/// order as the configuration generator.
fn en_rows_i64(n: usize) -> Vec<Vec<i64>> {
    (0u64..(1 << n))
        .map(|mask| {
            let mut row = Vec::with_capacity(n + 1);
            row.push(1i64);
            for i in 0..n {
                row.push(if mask >> (n - 1 - i) & 1 == 0 { 1 } else { -1 });
            }
            row
        })
        .collect()
}

fn falling_factorial(base: u128, count: u32) -> u128 {
    (0..count as u128).map(|i| base - i).product()
}

// ---------------------------------------------------------------------------
// dependent-tuple fractions

/// One exact dependent-fraction value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaValue {
    pub n: usize,
    pub k: usize,
    pub dependent_subsets: u64,
    pub total_subsets: u128,
    pub value: Rat,
}

/// Number of dependent `k`-subsets of the cube configuration.
pub fn dependent_subsets_en(n: usize, k: usize) -> Result<u64> {
    if k < 1 || k > n + 1 {
        return Err(Error::Precondition(format!(
            "subset size {k} outside 1..={}",
            n + 1
        )));
    }
    let rows = en_rows_i64(n);
    if k == 1 {
        return Ok(0);
    }
    let combos: Vec<Vec<usize>> = (0..rows.len()).combinations(k).collect();
    Ok(par::sum_u64(combos.len(), |i| {
        let sel: Vec<&[i64]> = combos[i].iter().map(|&j| rows[j].as_slice()).collect();
        u64::from(rank_small(&sel) < k)
    }))
}

/// The dependent fraction of ordered `k`-tuples of distinct cube points,
/// computed exhaustively over subsets (the fraction is order-free).
pub fn delta_exhaustive(n: usize, k: usize) -> Result<DeltaValue> {
    let dependent = dependent_subsets_en(n, k)?;
    let subsets = binomial(1u64 << n, k as u64);
    Ok(DeltaValue {
        n,
        k,
        dependent_subsets: dependent,
        total_subsets: subsets,
        value: Rat::new(Int::from(dependent), Int::from(subsets)),
    })
}

/// A seeded Monte-Carlo estimate with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

fn wilson(hits: u64, samples: u64) -> (f64, f64, f64) {
    let z = 1.96f64;
    let nf = samples as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = p + z2 / (2.0 * nf);
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    (p, (center - half) / denom, (center + half) / denom)
}

const MC_BATCH: u64 = 1 << 14;

fn mc_batches<F>(samples: u64, seed: u64, per_sample: F) -> u64
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> bool + Sync + Send,
{
    use rand::SeedableRng;
    // fixed batch -> stream mapping keeps the count identical for any
    // worker count
    par::chunked_sum_u64(samples, MC_BATCH, |range| {
        let batch = range.start / MC_BATCH;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(batch);
        range.map(|_| u64::from(per_sample(&mut rng))).sum()
    })
}

/// Monte-Carlo estimate of the dependent fraction of ordered `k`-tuples.
pub fn delta_mc(n: usize, k: usize, samples: u64, seed: u64) -> Result<McEstimate> {
    use rand::Rng;
    if k < 1 || k > n + 1 {
        return Err(Error::Precondition(format!(
            "subset size {k} outside 1..={}",
            n + 1
        )));
    }
    if samples == 0 {
        return Err(Error::Precondition("at least one sample".into()));
    }
    let rows = en_rows_i64(n);
    let count = rows.len();
    let hits = mc_batches(samples, seed, |rng| {
        let mut picked: Vec<usize> = Vec::with_capacity(k);
        while picked.len() < k {
            let c = rng.gen_range(0..count);
            if !picked.contains(&c) {
                picked.push(c);
            }
        }
        let sel: Vec<&[i64]> = picked.iter().map(|&j| rows[j].as_slice()).collect();
        rank_small(&sel) < k
    });
    let (estimate, ci_low, ci_high) = wilson(hits, samples);
    Ok(McEstimate {
        samples,
        hits,
        estimate,
        ci_low,
        ci_high,
        seed,
    })
}

/// The exact dependent fractions for `k = 1..=n+1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaTable {
    pub n: usize,
    /// `k` -> exact fraction as a `num/den` string.
    pub delta: BTreeMap<usize, String>,
    pub mode: String,
}

pub fn delta_table(n: usize) -> Result<DeltaTable> {
    let mut delta = BTreeMap::new();
    let mut last = Rat::zero();
    for k in 1..=n + 1 {
        let v = delta_exhaustive(n, k)?;
        assert!(v.value >= last, "dependent fraction is monotone in k");
        last = v.value.clone();
        delta.insert(k, v.value.to_string());
    }
    Ok(DeltaTable {
        n,
        delta,
        mode: "exhaustive".into(),
    })
}

// ---------------------------------------------------------------------------
// span-membership spectrum under a verified projector

/// The spectrum of independent `k`-subsets of the projected cube, classified
/// by how many extra projected points their span captures, together with the
/// increment this forces between consecutive dependent fractions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaSpectrum {
    pub n: usize,
    pub k: usize,
    pub independent_subsets: u64,
    /// `m` -> exact fraction of independent subsets with `m` extra points.
    pub gamma: BTreeMap<u64, String>,
    /// Increment computed from the spectrum.
    pub epsilon: String,
    /// The same increment as a difference of dependent fractions.
    pub epsilon_from_delta: String,
    pub identity_projector: bool,
}

/// Computes the spectrum on the image of the cube under the given projector
/// (which must project onto a `(k+1)`-dimensional subspace). The increment
/// identity against the dependent fractions is verified exactly, as is the
/// agreement between projected and source-space membership counts.
pub fn gamma_spectrum(
    n: usize,
    k: usize,
    projector: &ProjectorDescription,
) -> Result<GammaSpectrum> {
    if k < 1 || k > n {
        return Err(Error::Precondition(format!("k = {k} outside 1..={n}")));
    }
    if projector.k != k + 1 {
        return Err(Error::Precondition(format!(
            "projector targets dimension {}, spectrum needs {}",
            projector.k,
            k + 1
        )));
    }
    let t = 1u64 << n;
    let rows = en_rows_i64(n);
    let combos: Vec<Vec<usize>> = (0..rows.len()).combinations(k).collect();

    // per-subset: None for dependent, Some(m) with m extra span members
    let classified: Vec<Option<u64>> = if projector.is_identity() {
        par::map_collect(&combos, |subset| {
            let mut span = SmallSpan::default();
            if subset.iter().filter(|&&i| span.insert(&rows[i])).count() < k {
                return None;
            }
            let members = rows.iter().filter(|r| span.contains(r)).count() as u64;
            Some(members - k as u64)
        })
    } else {
        let en = Configuration::generate_en(n)?;
        let image = projector.image_configuration(&en)?;
        if image.len() != en.len() {
            return Err(Error::Precondition(
                "projector merges cube points; chain verification failed".into(),
            ));
        }
        par::map_collect(&combos, |subset| {
            let mut span = Subspace::zero(k + 1);
            if subset
                .iter()
                .filter(|&&i| span.insert_point(image.point(i).rep()))
                .count()
                < k
            {
                return None;
            }
            let members = image
                .points()
                .iter()
                .filter(|p| span.contains_point(p.rep()))
                .count() as u64;
            // source-space cross-check: extra members are exactly the cube
            // points landing in the span of the chosen ones
            let mut src = SmallSpan::default();
            for &i in subset {
                src.insert(&rows[i]);
            }
            let src_members = rows.iter().filter(|r| src.contains(r)).count() as u64;
            assert_eq!(
                members, src_members,
                "projected span membership disagrees with source space"
            );
            Some(members - k as u64)
        })
    };

    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut independent: u64 = 0;
    for m in classified.into_iter().flatten() {
        independent += 1;
        *counts.entry(m).or_insert(0) += 1;
    }
    if k >= 1 {
        let m_cap = (1u64 << (k - 1)).saturating_sub(k as u64);
        for &m in counts.keys() {
            assert!(m <= m_cap, "membership excess {m} above cap {m_cap}");
        }
    }

    let delta_k = delta_exhaustive(n, k)?.value;
    let delta_k1 = delta_exhaustive(n, k + 1)?.value;
    // epsilon from the spectrum: (1 - delta_k) * sum_m gamma^m * m / (2^n - k)
    let mut weighted = Rat::zero();
    for (&m, &c) in &counts {
        weighted += Rat::new(Int::from(m * c), Int::from(independent));
    }
    let epsilon = (Rat::one() - delta_k.clone()) * weighted
        / Rat::from(Int::from(t - k as u64));
    let epsilon_from_delta = delta_k1 - delta_k;
    if epsilon != epsilon_from_delta {
        return Err(Error::Precondition(format!(
            "spectrum increment {epsilon} disagrees with dependent-fraction difference {epsilon_from_delta}"
        )));
    }
    let gamma: BTreeMap<u64, String> = counts
        .iter()
        .map(|(&m, &c)| {
            (
                m,
                Rat::new(Int::from(c), Int::from(independent)).to_string(),
            )
        })
        .collect();
    // the fractions sum to one by construction of the tallies
    Ok(GammaSpectrum {
        n,
        k,
        independent_subsets: independent,
        gamma,
        epsilon: epsilon.to_string(),
        epsilon_from_delta: epsilon_from_delta.to_string(),
        identity_projector: projector.is_identity(),
    })
}

/// Report-only comparison of the dependent-fraction increment against
/// `(k-1)/2^n`; the underlying statement is asymptotic, so small-`n`
/// violations are informative rather than failures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma3Report {
    pub n: usize,
    pub k: usize,
    pub increment: String,
    pub bound: String,
    pub within_bound: bool,
}

pub fn check_lemma3(n: usize, k: usize) -> Result<Lemma3Report> {
    let delta_k = delta_exhaustive(n, k)?.value;
    let delta_k1 = delta_exhaustive(n, k + 1)?.value;
    let increment = delta_k1 - delta_k;
    let bound = Rat::new(Int::from(k as i64 - 1), Int::from(1i64 << n));
    Ok(Lemma3Report {
        n,
        k,
        increment: increment.to_string(),
        bound: bound.to_string(),
        within_bound: increment <= bound,
    })
}

/// The vanishing window of the top spectrum: no independent `n`-subset of
/// the cube may capture `m` extra points for `m` strictly between
/// `2^{n-1} - 3n/2` and `2^{n-1} - n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoGapReport {
    pub n: usize,
    pub window: Vec<u64>,
    pub holds: bool,
}

pub fn check_lo_gap(n: usize) -> Result<LoGapReport> {
    if !(4..=5).contains(&n) {
        return Err(Error::Precondition(
            "vanishing window checked exhaustively only for n = 4, 5".into(),
        ));
    }
    let chain = crate::projective::projection_chain(n, 0)?;
    let spectrum = gamma_spectrum(n, n, &chain[0])?;
    let window: Vec<u64> = (0..=(1u64 << (n - 1)))
        .filter(|&m| 2 * m > (1u64 << n) - 3 * n as u64 && m < (1u64 << (n - 1)) - n as u64)
        .collect();
    let holds = window.iter().all(|m| !spectrum.gamma.contains_key(m));
    Ok(LoGapReport { n, window, holds })
}

// ---------------------------------------------------------------------------
// Bernoulli singularity

/// Exact or sampled singularity statistics of random sign matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularityReport {
    pub n: usize,
    pub mode: String,
    pub singular_count: Option<u128>,
    pub total: Option<u128>,
    /// Exact probability as a `num/den` string (exact modes only).
    pub probability: Option<String>,
    pub mc: Option<McEstimate>,
    /// Probability over `(n-1)^2 2^{1-n}`, exact when available.
    pub asym_ratio_exact: Option<String>,
    pub asym_ratio: f64,
}

fn asym_reference(n: usize) -> Rat {
    // (n-1)^2 * 2^(1-n)
    let sq = Int::from(((n - 1) * (n - 1)) as i64);
    Rat::new(sq * Int::from(2), Int::from(1i128 << n))
}

/// Counts singular matrices over all `2^{n*n}` sign patterns.
pub fn singular_exact_raw(n: usize) -> Result<u128> {
    if n == 0 || n > 5 {
        return Err(Error::Budget {
            what: "matrix size for full enumeration",
            limit: 5,
        });
    }
    let bits = (n * n) as u32;
    let total = 1u64 << bits;
    let count = par::chunked_sum_u64(total, 1 << 16, |range| {
        let mut local = 0u64;
        let mut mat = vec![0i64; n * n];
        for pattern in range {
            for (t, m) in mat.iter_mut().enumerate() {
                *m = if pattern >> t & 1 == 0 { 1 } else { -1 };
            }
            if det_small(mat.clone(), n) == 0 {
                local += 1;
            }
        }
        local
    });
    Ok(count as u128)
}

/// Counts singular matrices through the sign-and-order reduction: rows are
/// normalized to leading entry +1 (a factor of `2^n`) and distinct-row
/// tuples are counted through subsets (a factor of `n!`), leaving one rank
/// test per subset of the halved row set.
pub fn singular_exact_reduced(n: usize) -> Result<u128> {
    if n == 0 || n > 6 {
        return Err(Error::Budget {
            what: "matrix size for reduced enumeration",
            limit: 6,
        });
    }
    if n == 1 {
        return Ok(0);
    }
    let rows_half: u128 = 1 << (n - 1);
    let with_repeat = rows_half.pow(n as u32) - falling_factorial(rows_half, n as u32);
    let dependent = dependent_subsets_en(n - 1, n)? as u128;
    let n_factorial: u128 = (1..=n as u128).product();
    let tuples = with_repeat + dependent * n_factorial;
    Ok(tuples << n)
}

/// Exact singularity statistics: full enumeration through size 5, the
/// sign-and-order reduction at size 6.
pub fn singular_exact(n: usize) -> Result<SingularityReport> {
    let (mode, count) = if n <= 5 {
        ("exact-full", singular_exact_raw(n)?)
    } else {
        ("exact-reduced", singular_exact_reduced(n)?)
    };
    let total: u128 = 1 << (n * n);
    let p = Rat::new(Int::from(count), Int::from(total));
    let ratio = if n >= 2 {
        p.clone() / asym_reference(n)
    } else {
        Rat::zero()
    };
    Ok(SingularityReport {
        n,
        mode: mode.into(),
        singular_count: Some(count),
        total: Some(total),
        probability: Some(p.to_string()),
        mc: None,
        asym_ratio_exact: Some(ratio.to_string()),
        asym_ratio: rat_to_f64(&ratio),
    })
}

fn rat_to_f64(r: &Rat) -> f64 {
    let num = r.numer();
    let den = r.denom();
    bigint_to_f64(num) / bigint_to_f64(den)
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

/// Seed-deterministic Monte-Carlo singularity estimate.
pub fn singular_mc(n: usize, samples: u64, seed: u64) -> Result<SingularityReport> {
    use rand::Rng;
    if n == 0 || n > 14 {
        return Err(Error::Precondition("matrix size outside 1..=14".into()));
    }
    if samples < 10_000 {
        return Err(Error::Precondition("at least 10^4 samples".into()));
    }
    let hits = mc_batches(samples, seed, |rng| {
        let mut mat = vec![0i64; n * n];
        let mut word: u64 = 0;
        let mut left = 0u32;
        for m in mat.iter_mut() {
            if left == 0 {
                word = rng.gen::<u64>();
                left = 64;
            }
            *m = if word & 1 == 0 { 1 } else { -1 };
            word >>= 1;
            left -= 1;
        }
        det_small(mat, n) == 0
    });
    let (estimate, ci_low, ci_high) = wilson(hits, samples);
    let reference = rat_to_f64(&asym_reference(n));
    Ok(SingularityReport {
        n,
        mode: "mc".into(),
        singular_count: None,
        total: None,
        probability: None,
        mc: Some(McEstimate {
            samples,
            hits,
            estimate,
            ci_low,
            ci_high,
            seed,
        }),
        asym_ratio_exact: None,
        asym_ratio: estimate / reference,
    })
}

/// Tuples of `n+1` cube rows containing a repeated row, in closed form.
pub fn two_close_rows_count(n: usize) -> Result<u128> {
    if n == 0 || n > 5 {
        return Err(Error::Budget {
            what: "cube dimension for row-tuple counts",
            limit: 5,
        });
    }
    let rows: u128 = 1 << n;
    Ok(rows.pow(n as u32 + 1) - falling_factorial(rows, n as u32 + 1))
}

/// The same count by direct enumeration (small `n` only).
pub fn two_close_rows_enumerate(n: usize) -> Result<u128> {
    if n == 0 || n > 3 {
        return Err(Error::Budget {
            what: "cube dimension for direct tuple enumeration",
            limit: 3,
        });
    }
    let count = 1u64 << n;
    let total = (count as u128).pow(n as u32 + 1);
    let mut with_repeat = 0u128;
    let mut tuple = vec![0u64; n + 1];
    for flat in 0..total {
        let mut x = flat;
        for t in tuple.iter_mut() {
            *t = (x % count as u128) as u64;
            x /= count as u128;
        }
        let mut sorted = tuple.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            with_repeat += 1;
        }
    }
    Ok(with_repeat)
}

/// Dependent `(n+1)`-tuples (with repetition allowed) of cube rows, by
/// direct determinant enumeration.
pub fn singular_tuples_enumerate(n: usize) -> Result<u128> {
    if n == 0 || n > 4 {
        return Err(Error::Budget {
            what: "cube dimension for dependent tuple enumeration",
            limit: 4,
        });
    }
    let rows = en_rows_i64(n);
    let count = rows.len() as u64;
    let size = n + 1;
    let total: u64 = count.pow(size as u32);
    let singular = par::chunked_sum_u64(total, 1 << 14, |range| {
        let mut local = 0u64;
        for flat in range {
            let mut mat = Vec::with_capacity(size * size);
            let mut x = flat;
            for _ in 0..size {
                let r = (x % count) as usize;
                x /= count;
                mat.extend_from_slice(&rows[r]);
            }
            if det_small(mat, size) == 0 {
                local += 1;
            }
        }
        local
    });
    Ok(singular as u128)
}

// ---------------------------------------------------------------------------
// threshold functions

/// Feasibility of a homogeneous system of strict/non-strict inequalities
/// `c . x > 0` (or `>= 0`), decided exactly by Fourier-Motzkin elimination.
/// Strictness flags ride along so a derived `0 > 0` is the only failure.
fn fourier_motzkin_feasible(mut rows: Vec<(Vec<Int>, bool)>) -> bool {
    fn push_row(rows: &mut Vec<(Vec<Int>, bool)>, mut row: Vec<Int>, strict: bool) -> bool {
        if row.iter().all(Zero::is_zero) {
            // 0 > 0 is the contradiction; 0 >= 0 is vacuous
            return !strict;
        }
        let g = row.iter().fold(Int::zero(), |acc, x| num::Integer::gcd(&acc, x));
        if !g.is_one() {
            for x in row.iter_mut() {
                *x = &*x / &g;
            }
        }
        if !rows.iter().any(|(r, s)| *s == strict && r == &row) {
            rows.push((row, strict));
        }
        true
    }

    let Some(first) = rows.first() else {
        return true;
    };
    let nvars = first.0.len();
    let mut alive: Vec<usize> = (0..nvars).collect();
    while !alive.is_empty() {
        // eliminate the variable with the fewest pos*neg combinations
        let (slot, &var) = alive
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| {
                let pos = rows.iter().filter(|(r, _)| r[v].is_positive()).count();
                let neg = rows.iter().filter(|(r, _)| r[v].is_negative()).count();
                pos * neg
            })
            .expect("nonempty variable list");
        alive.remove(slot);
        let (mut pos, mut neg, mut zero): (Vec<_>, Vec<_>, Vec<_>) = (vec![], vec![], vec![]);
        for row in rows.drain(..) {
            if row.0[var].is_positive() {
                pos.push(row);
            } else if row.0[var].is_negative() {
                neg.push(row);
            } else {
                zero.push(row);
            }
        }
        let mut next = Vec::with_capacity(zero.len() + pos.len() * neg.len());
        for row in zero {
            if !push_row(&mut next, row.0, row.1) {
                return false;
            }
        }
        for (p, ps) in &pos {
            for (q, qs) in &neg {
                let a = -q[var].clone(); // positive
                let b = p[var].clone(); // positive
                let combined: Vec<Int> = p
                    .iter()
                    .zip(q)
                    .map(|(pi, qi)| pi * &a + qi * &b)
                    .collect();
                if !push_row(&mut next, combined, *ps || *qs) {
                    return false;
                }
            }
        }
        rows = next;
    }
    true
}

/// Whether a sign pattern over the cube inputs is realized by a strict
/// linear threshold. The function is given as a bitmask over the cube rows
/// in generator order (bit = output +1).
fn is_threshold_function(n: usize, truth: u64) -> bool {
    let rows = en_rows_i64(n);
    let system: Vec<(Vec<Int>, bool)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let sign: i64 = if truth >> i & 1 == 1 { 1 } else { -1 };
            (r.iter().map(|&x| Int::from(sign * x)).collect(), true)
        })
        .collect();
    fourier_motzkin_feasible(system)
}

/// Counts strictly separable sign functions on the cube by testing all
/// `2^(2^n)` of them; the independent oracle for the chamber counts.
pub fn count_threshold_functions_bruteforce(n: usize) -> Result<u64> {
    if n == 0 || n > 3 {
        return Err(Error::Budget {
            what: "inputs for the separability oracle",
            limit: 3,
        });
    }
    let functions: u64 = 1 << (1 << n);
    Ok(par::chunked_sum_u64(functions, 1 << 10, |range| {
        range.filter(|&f| is_threshold_function(n, f)).count() as u64
    }))
}

/// Threshold-function count and its bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub count: u64,
    pub zaslavsky: u64,
    pub deletion_restriction: u64,
    pub function_enumeration: Option<u64>,
    pub agree: bool,
    pub schlafli_upper: u128,
    pub upper_holds: bool,
    pub eta_star: Option<u64>,
    pub eta_lower_holds: Option<bool>,
    /// count / (2 * C(2^n - 1, n)) as an exact rational string.
    pub asymptotic_ratio: String,
}

/// The Schlafli bound `2 * sum_{i<=n} C(2^n - 1, i)`.
pub fn schlafli_upper(n: usize) -> u128 {
    2 * (0..=n as u64)
        .map(|i| binomial((1u64 << n) - 1, i))
        .sum::<u128>()
}

/// Counts threshold functions as chambers of the cube arrangement, checked
/// against deletion-restriction and (for small `n`) against the separability
/// oracle over all sign functions.
pub fn threshold_count(n: usize) -> Result<ThresholdReport> {
    if n == 0 || n > 5 {
        return Err(Error::Budget {
            what: "cube dimension for chamber counting",
            limit: 5,
        });
    }
    let en = Configuration::generate_en(n)?;
    let zaslavsky = lattice::chambers_zaslavsky(&en)?;
    let deletion_restriction = lattice::chambers_deletion_restriction(&en)?;
    let function_enumeration = if n <= 3 {
        Some(count_threshold_functions_bruteforce(n)?)
    } else {
        None
    };
    let agree = zaslavsky == deletion_restriction
        && function_enumeration.map_or(true, |f| f == zaslavsky);
    let upper = schlafli_upper(n);
    let ratio = Rat::new(
        Int::from(zaslavsky),
        Int::from(2 * binomial((1u64 << n) - 1, n as u64)),
    );
    Ok(ThresholdReport {
        n,
        count: zaslavsky,
        zaslavsky,
        deletion_restriction,
        function_enumeration,
        agree,
        schlafli_upper: upper,
        upper_holds: (zaslavsky as u128) <= upper,
        eta_star: None,
        eta_lower_holds: None,
        asymptotic_ratio: ratio.to_string(),
    })
}

/// Extends the threshold report with the supermodular-invariant lower bound
/// `2 * eta <= count <= Schlafli`.
pub fn bounds_report(n: usize) -> Result<ThresholdReport> {
    let mut report = threshold_count(n)?;
    let en = Configuration::generate_en(n)?;
    let eta = eta::eta_star(&en)?;
    report.eta_star = Some(eta);
    report.eta_lower_holds = Some(2 * eta <= report.count);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::projection_chain;

    #[test]
    fn small_det_matches_known_values() {
        assert_eq!(det_small(vec![1, 1, 1, -1], 2), -2);
        assert_eq!(det_small(vec![1, 1, 1, 1], 2), 0);
        let id4: Vec<i64> = (0..16).map(|t| i64::from(t % 5 == 0)).collect();
        assert_eq!(det_small(id4, 4), 1);
    }

    #[test]
    fn delta_trivial_and_derived_values() {
        assert_eq!(delta_exhaustive(2, 1).unwrap().value, Rat::zero());
        // every distinct triple of the 2-cube is independent
        assert_eq!(delta_exhaustive(2, 3).unwrap().value, Rat::zero());
        // the 3-cube has exactly 12 coplanar quadruples out of C(8,4) = 70
        let d34 = delta_exhaustive(3, 4).unwrap();
        assert_eq!(d34.dependent_subsets, 12);
        assert_eq!(d34.value, Rat::new(Int::from(6), Int::from(35)));
    }

    #[test]
    fn delta_mc_brackets_exact_value() {
        let exact = delta_exhaustive(3, 4).unwrap().value;
        let exact_f = rat_to_f64(&exact);
        let mc = delta_mc(3, 4, 40_000, 7).unwrap();
        assert!(mc.ci_low <= exact_f && exact_f <= mc.ci_high, "{mc:?}");
        // determinism
        let mc2 = delta_mc(3, 4, 40_000, 7).unwrap();
        assert_eq!(mc.hits, mc2.hits);
    }

    #[test]
    fn delta_table_is_monotone() {
        let t = delta_table(3).unwrap();
        assert_eq!(t.delta[&1], "0");
        assert_eq!(t.delta[&4], "6/35");
    }

    #[test]
    fn gamma_spectrum_identity_cases() {
        let chain2 = projection_chain(2, 1).unwrap();
        // k = n = 2 on the 2-cube: every pair spans a plane with only
        // itself, so the spectrum is concentrated at zero excess
        let g = gamma_spectrum(2, 2, &chain2[0]).unwrap();
        assert_eq!(g.gamma.len(), 1);
        assert_eq!(g.gamma[&0], "1");
        assert_eq!(g.epsilon, "0");

        // k = 1: lines through single points hold only that point
        let g1 = gamma_spectrum(2, 1, chain2.iter().find(|p| p.k == 2).unwrap()).unwrap();
        assert_eq!(g1.gamma.len(), 1);
        assert_eq!(g1.gamma[&0], "1");
    }

    #[test]
    fn gamma_spectrum_on_chain_projection_matches_source() {
        // n = 3, k = 2: a genuine projection onto a 3-dimensional subspace;
        // the in-code assertion compares projected and source memberships
        let chain = projection_chain(3, 5).unwrap();
        let proj = chain.iter().find(|p| p.k == 3).unwrap();
        let g = gamma_spectrum(3, 2, proj).unwrap();
        assert!(!g.identity_projector);
        assert_eq!(g.epsilon, g.epsilon_from_delta);
        let total: f64 = g
            .gamma
            .values()
            .map(|s| {
                let r: Rat = s.parse::<Rat>().unwrap();
                rat_to_f64(&r)
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_spectrum_e3_top() {
        let chain = projection_chain(3, 0).unwrap();
        let g = gamma_spectrum(3, 3, &chain[0]).unwrap();
        // 12 of the 70 quadruple... triples: C(8,3)=56 subsets, all
        // independent (no three cube points are collinear), classified by
        // plane membership: the 12 four-point planes contribute m=1 triples
        assert_eq!(g.independent_subsets, 56);
        let m1: Rat = g.gamma[&1].parse().unwrap();
        assert_eq!(m1, Rat::new(Int::from(48), Int::from(56)));
        assert_eq!(g.epsilon_from_delta, g.epsilon);
    }

    #[test]
    fn lemma3_report_small_cases() {
        let r = check_lemma3(2, 2).unwrap();
        assert_eq!(r.increment, "0");
        assert!(r.within_bound);
        let r34 = check_lemma3(3, 3).unwrap();
        // increment = delta_{3,4} - delta_{3,3} = 6/35, bound (k-1)/2^n = 1/4
        assert_eq!(r34.increment, "6/35");
        assert_eq!(r34.bound, "1/4");
        assert!(r34.within_bound);
    }

    #[test]
    fn lo_gap_window_at_n4() {
        let r = check_lo_gap(4).unwrap();
        assert_eq!(r.window, vec![3]);
        assert!(r.holds);
    }

    #[test]
    fn singular_exact_tiny_sizes() {
        assert_eq!(singular_exact_raw(1).unwrap(), 0);
        assert_eq!(singular_exact_raw(2).unwrap(), 8);
        assert_eq!(singular_exact_raw(3).unwrap(), 320);
        assert_eq!(singular_exact_reduced(2).unwrap(), 8);
        assert_eq!(singular_exact_reduced(3).unwrap(), 320);
    }

    #[test]
    fn reduced_matches_raw_at_n4() {
        assert_eq!(
            singular_exact_reduced(4).unwrap(),
            singular_exact_raw(4).unwrap()
        );
    }

    #[test]
    fn tuple_decomposition_matches_direct_enumeration() {
        for n in 1..=3usize {
            let direct = singular_tuples_enumerate(n).unwrap();
            let repeat = two_close_rows_count(n).unwrap();
            let dependent = dependent_subsets_en(n, n + 1).unwrap() as u128;
            let fact: u128 = (1..=(n + 1) as u128).product();
            assert_eq!(direct, repeat + dependent * fact, "n = {n}");
        }
    }

    #[test]
    fn repeat_row_closed_form_matches_enumeration() {
        assert_eq!(two_close_rows_count(1).unwrap(), 2);
        assert_eq!(two_close_rows_count(2).unwrap(), 40);
        for n in 1..=3 {
            assert_eq!(
                two_close_rows_count(n).unwrap(),
                two_close_rows_enumerate(n).unwrap()
            );
        }
    }

    #[test]
    fn mc_estimate_brackets_exact_singularity() {
        let mc = singular_mc(2, 100_000, 3).unwrap();
        let est = mc.mc.unwrap();
        assert!(est.ci_low <= 0.5 && 0.5 <= est.ci_high, "{est:?}");
        let rerun = singular_mc(2, 100_000, 3).unwrap();
        assert_eq!(est.hits, rerun.mc.unwrap().hits, "seeded reruns are bit-identical");
    }

    #[test]
    fn threshold_counts_small_n() {
        let t1 = threshold_count(1).unwrap();
        assert_eq!(t1.count, 4);
        assert_eq!(t1.function_enumeration, Some(4));
        assert!(t1.agree);
        assert_eq!(t1.schlafli_upper, 4);

        let t2 = threshold_count(2).unwrap();
        assert_eq!(t2.count, 14);
        assert_eq!(t2.function_enumeration, Some(14));
        assert!(t2.agree);
        assert_eq!(t2.schlafli_upper, 14, "the bound is tight at n = 2");
    }

    #[test]
    fn threshold_count_n3() {
        let t3 = threshold_count(3).unwrap();
        assert_eq!(t3.count, 104);
        assert_eq!(t3.function_enumeration, Some(104));
        assert!(t3.agree);
        assert_eq!(t3.schlafli_upper, 128);
    }

    #[test]
    fn bounds_report_small_n() {
        let b1 = bounds_report(1).unwrap();
        assert_eq!(b1.eta_star, Some(1));
        assert_eq!(b1.eta_lower_holds, Some(true));
        let b2 = bounds_report(2).unwrap();
        assert_eq!(b2.eta_star, Some(3));
        assert_eq!(b2.eta_lower_holds, Some(true));
        assert!(b2.upper_holds);
    }

    #[test]
    fn fourier_motzkin_sanity() {
        // x > 0 and -x > 0 is infeasible
        let bad = vec![
            (vec![Int::from(1)], true),
            (vec![Int::from(-1)], true),
        ];
        assert!(!fourier_motzkin_feasible(bad));
        // x > 0, y > 0, x + y > 0
        let good = vec![
            (vec![Int::from(1), Int::from(0)], true),
            (vec![Int::from(0), Int::from(1)], true),
            (vec![Int::from(1), Int::from(1)], true),
        ];
        assert!(fourier_motzkin_feasible(good));
    }
}
