//! Projective points, ordered configurations, the cube configuration `E_n`,
//! orthogonal projection of configurations, and generic-direction sampling.
//!
//! A point of real projective space is stored by its canonical integer
//! representative: content 1, first nonzero entry positive. Equality of
//! points is therefore plain equality of representatives.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use num::{Integer, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::linalg::{Int, IntVector, Rat, RatVector, Subspace};
use crate::{Error, Limits, Result};

/// A point of `RP^n`: the line through a canonical integer representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint {
    rep: IntVector,
}

impl ProjectivePoint {
    /// Canonicalizes an integer vector: divide by the gcd of the entries and
    /// fix the sign of the first nonzero entry positive. Idempotent.
    pub fn from_int(v: &IntVector) -> Result<Self> {
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        let g = v
            .entries()
            .iter()
            .fold(Int::zero(), |acc, x| acc.gcd(x));
        let mut entries: Vec<Int> = v.entries().iter().map(|x| x / &g).collect();
        let lead_negative = entries
            .iter()
            .find(|x| !x.is_zero())
            .map(Signed::is_negative)
            .unwrap_or(false);
        if lead_negative {
            for x in entries.iter_mut() {
                *x = -&*x;
            }
        }
        Ok(ProjectivePoint {
            rep: IntVector::new(entries)?,
        })
    }

    /// Clears denominators first, then canonicalizes.
    pub fn from_rat(v: &RatVector) -> Result<Self> {
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        Self::from_int(&v.primitive_integer()?)
    }

    pub fn from_i64(entries: &[i64]) -> Result<Self> {
        Self::from_int(&IntVector::from_i64(entries))
    }

    pub fn rep(&self) -> &IntVector {
        &self.rep
    }

    /// Dimension of the projective space the point lives in.
    pub fn ambient_dim(&self) -> usize {
        self.rep.len() - 1
    }
}

impl std::fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let coords: Vec<String> = self.rep.entries().iter().map(|x| x.to_string()).collect();
        write!(f, "({})", coords.join(", "))
    }
}

/// An ordered finite set of distinct projective points; the list order is
/// the order `pi` used by every order-sensitive construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    ambient_dim: usize,
    points: Vec<ProjectivePoint>,
}

impl Configuration {
    pub fn new(ambient_dim: usize, points: Vec<ProjectivePoint>) -> Result<Self> {
        let mut seen: HashSet<&IntVector> = HashSet::new();
        for p in &points {
            if p.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch(format!(
                    "point {p} in RP^{} inside a configuration in RP^{ambient_dim}",
                    p.ambient_dim()
                )));
            }
            if !seen.insert(p.rep()) {
                return Err(Error::InvalidInput(format!("duplicate point {p}")));
            }
        }
        Ok(Configuration {
            ambient_dim,
            points,
        })
    }

    pub fn from_rows(ambient_dim: usize, rows: &[&[i64]]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| ProjectivePoint::from_i64(r))
            .collect::<Result<Vec<_>>>()?;
        Configuration::new(ambient_dim, points)
    }

    /// The cube configuration: all `2^n` points `(1, b_1, ..., b_n)` with
    /// `b_i = +-1`, listed with `+1` before `-1` in each coordinate.
    pub fn generate_en(n: usize) -> Result<Self> {
        Self::generate_en_limited(n, &Limits::default())
    }

    pub fn generate_en_limited(n: usize, limits: &Limits) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("E_n requires n >= 1".into()));
        }
        if n > limits.en_cap {
            return Err(Error::Budget {
                what: "cube dimension",
                limit: limits.en_cap as u64,
            });
        }
        let mut points = Vec::with_capacity(1 << n);
        for mask in 0u64..(1 << n) {
            let mut rep = Vec::with_capacity(n + 1);
            rep.push(Int::one());
            for i in 0..n {
                let bit = mask >> (n - 1 - i) & 1;
                rep.push(if bit == 0 { Int::one() } else { -Int::one() });
            }
            points.push(ProjectivePoint {
                rep: IntVector::new(rep)?,
            });
        }
        Configuration::new(n, points)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &ProjectivePoint {
        &self.points[i]
    }

    pub fn contains(&self, p: &ProjectivePoint) -> bool {
        self.points.iter().any(|q| q == p)
    }

    pub fn position_of(&self, p: &ProjectivePoint) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    pub fn span(&self) -> Subspace {
        Subspace::from_points(self.ambient_dim + 1, self.points.iter().map(|p| p.rep()))
    }

    pub fn span_rank(&self) -> usize {
        self.span().dim()
    }

    pub fn has_full_span(&self) -> bool {
        self.span_rank() == self.ambient_dim + 1
    }

    /// Rank of the points selected by `indices`.
    pub fn rank_of(&self, indices: &[usize]) -> usize {
        let mut s = Subspace::zero(self.ambient_dim + 1);
        for &i in indices {
            s.insert_point(self.points[i].rep());
        }
        s.dim()
    }

    pub fn with_appended(&self, p: ProjectivePoint) -> Result<Self> {
        let mut points = self.points.clone();
        points.push(p);
        Configuration::new(self.ambient_dim, points)
    }

    pub fn without_last(&self) -> Self {
        let mut points = self.points.clone();
        points.pop();
        Configuration {
            ambient_dim: self.ambient_dim,
            points,
        }
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        Configuration::new(self.ambient_dim, points)
    }

    pub fn permuted(&self, order: &Order) -> Result<Self> {
        let points = (0..self.len())
            .map(|pos| self.points[order.point_at(pos)].clone())
            .collect();
        Configuration::new(self.ambient_dim, points)
    }

    /// Hex digest of the canonical content (dimension plus representatives),
    /// used as a cache key.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_text());
        let out = hasher.finalize();
        let mut s = String::with_capacity(64);
        for b in out {
            let _ = write!(s, "{b:02x}");
        }
        s
    }

    /// Text format: a `dim N` header, one point per line, `#` comments.
    pub fn to_text(&self) -> String {
        let mut s = format!("dim {}\n", self.ambient_dim);
        for p in &self.points {
            let coords: Vec<String> = p.rep().entries().iter().map(|x| x.to_string()).collect();
            s.push_str(&coords.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty configuration file".into()))?;
        let dim: usize = header
            .strip_prefix("dim")
            .map(str::trim)
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| Error::InvalidInput(format!("expected `dim N` header, got `{header}`")))?;
        let mut points = Vec::new();
        for line in lines {
            let entries = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<Int>()
                        .map_err(|_| Error::InvalidInput(format!("bad integer `{tok}`")))
                })
                .collect::<Result<Vec<Int>>>()?;
            if entries.len() != dim + 1 {
                return Err(Error::InvalidInput(format!(
                    "point `{line}` has {} coordinates, expected {}",
                    entries.len(),
                    dim + 1
                )));
            }
            points.push(ProjectivePoint::from_int(&IntVector::new(entries)?)?);
        }
        Configuration::new(dim, points)
    }
}

/// An order `pi` on the points of a configuration: `perm[pos] = point index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Order {
    perm: Vec<usize>,
    inv: Vec<usize>,
}

impl Order {
    pub fn identity(len: usize) -> Self {
        Order {
            perm: (0..len).collect(),
            inv: (0..len).collect(),
        }
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let len = perm.len();
        let mut inv = vec![usize::MAX; len];
        for (pos, &p) in perm.iter().enumerate() {
            if p >= len || inv[p] != usize::MAX {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
            inv[p] = pos;
        }
        Ok(Order { perm, inv })
    }

    pub fn random(len: usize, rng: &mut impl Rng) -> Self {
        let mut perm: Vec<usize> = (0..len).collect();
        // Fisher-Yates
        for i in (1..len).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        Order::from_perm(perm).expect("shuffled identity is a permutation")
    }

    /// Identity order with the given point moved to the front.
    pub fn with_first(len: usize, first: usize) -> Self {
        let mut perm = vec![first];
        perm.extend((0..len).filter(|&i| i != first));
        Order::from_perm(perm).expect("valid permutation")
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Point index at the given order position (0-based).
    pub fn point_at(&self, pos: usize) -> usize {
        self.perm[pos]
    }

    /// Order position of the given point index.
    pub fn position_of(&self, point: usize) -> usize {
        self.inv[point]
    }
}

/// Result of projecting a configuration off a direction: the image one
/// dimension down, the preimage classes, and the minimal source index of
/// every class (all indices 0-based, classes listed by increasing minimum).
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub image: Configuration,
    pub preimage_classes: Vec<Vec<usize>>,
    pub min_index: Vec<usize>,
}

/// Projects every point of `h` off the line `u` and re-expresses the images
/// in an integer basis of the hyperplane orthogonal to `u` (the kernel-
/// elimination chart that drops the leading nonzero coordinate of `u`).
/// Projectively equal images are merged into preimage classes; the image is
/// ordered by the minimal source index of each class.
pub fn project_config(h: &Configuration, u: &ProjectivePoint) -> Result<ProjectionResult> {
    if u.ambient_dim() != h.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "direction in RP^{} against configuration in RP^{}",
            u.ambient_dim(),
            h.ambient_dim()
        )));
    }
    if h.contains(u) {
        return Err(Error::Precondition(
            "projection direction must lie outside the configuration".into(),
        ));
    }
    if h.ambient_dim() == 0 {
        return Err(Error::Precondition(
            "cannot project a configuration in RP^0".into(),
        ));
    }
    let drop = u
        .rep()
        .entries()
        .iter()
        .position(|x| !x.is_zero())
        .expect("canonical representative is nonzero");

    let mut classes: Vec<(ProjectivePoint, Vec<usize>)> = Vec::new();
    let mut by_point: BTreeMap<ProjectivePoint, usize> = BTreeMap::new();
    for (i, p) in h.points().iter().enumerate() {
        // (u.u) p - (p.u) u is the projection scaled into Z^{d+1}; dropping
        // the coordinate `drop` is a linear chart on the hyperplane.
        let scaled = crate::linalg::project_off_scaled(p.rep(), u.rep())?;
        assert!(
            !scaled.is_zero(),
            "source point projectively equal to the direction"
        );
        let coords: Vec<Int> = scaled
            .entries()
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != drop)
            .map(|(_, x)| x.clone())
            .collect();
        let image = ProjectivePoint::from_int(&IntVector::new(coords)?)?;
        match by_point.get(&image) {
            Some(&slot) => classes[slot].1.push(i),
            None => {
                by_point.insert(image.clone(), classes.len());
                classes.push((image, vec![i]));
            }
        }
    }
    classes.sort_by_key(|(_, members)| members[0]);
    let min_index: Vec<usize> = classes.iter().map(|(_, m)| m[0]).collect();
    debug_assert!(min_index.windows(2).all(|w| w[0] < w[1]));
    let preimage_classes: Vec<Vec<usize>> = classes.iter().map(|(_, m)| m.clone()).collect();
    let image = Configuration::new(
        h.ambient_dim() - 1,
        classes.into_iter().map(|(p, _)| p).collect(),
    )?;
    Ok(ProjectionResult {
        image,
        preimage_classes,
        min_index,
    })
}

/// How a sampled direction or subspace was checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerificationMode {
    Exhaustive,
    Probabilistic { samples: u64 },
}

#[derive(Debug, Clone)]
pub struct GenericPoint {
    pub point: ProjectivePoint,
    pub verification: VerificationMode,
}

fn random_int_vector(rng: &mut ChaCha8Rng, len: usize, bound: i64) -> IntVector {
    loop {
        let entries: Vec<i64> = (0..len).map(|_| rng.gen_range(-bound..=bound)).collect();
        if entries.iter().any(|&x| x != 0) {
            return IntVector::from_i64(&entries);
        }
    }
}

/// Checks `u` against spans of `subset_size`-subsets of `h`; exhaustive when
/// the subset count fits the budget, sampled otherwise.
fn verify_generic(
    h: &Configuration,
    u: &ProjectivePoint,
    subset_size: usize,
    rng: &mut ChaCha8Rng,
    limits: &Limits,
) -> Option<VerificationMode> {
    use itertools::Itertools;
    let count = binomial(h.len() as u64, subset_size as u64);
    if count <= limits.genericity_exhaustive_cap as u128 {
        for subset in (0..h.len()).combinations(subset_size) {
            let mut s = Subspace::zero(h.ambient_dim() + 1);
            for &i in &subset {
                s.insert_point(h.point(i).rep());
            }
            if s.contains_point(u.rep()) {
                return None;
            }
        }
        Some(VerificationMode::Exhaustive)
    } else {
        for _ in 0..limits.genericity_samples {
            let mut picked: Vec<usize> = Vec::with_capacity(subset_size);
            while picked.len() < subset_size {
                let c = rng.gen_range(0..h.len());
                if !picked.contains(&c) {
                    picked.push(c);
                }
            }
            let mut s = Subspace::zero(h.ambient_dim() + 1);
            for &i in &picked {
                s.insert_point(h.point(i).rep());
            }
            if s.contains_point(u.rep()) {
                return None;
            }
        }
        Some(VerificationMode::Probabilistic {
            samples: limits.genericity_samples,
        })
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Samples a direction outside `h` that avoids every hyperplane spanned by
/// `n` points of `h`. Deterministic in the seed.
pub fn sample_generic_point(h: &Configuration, seed: u64) -> Result<GenericPoint> {
    sample_generic_point_limited(h, seed, &Limits::default())
}

pub fn sample_generic_point_limited(
    h: &Configuration,
    seed: u64,
    limits: &Limits,
) -> Result<GenericPoint> {
    let n = h.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound: i64 = 1i64 << (n + 4).min(40);
    let subset_size = n.min(h.len());
    const MAX_ATTEMPTS: u32 = 256;
    for _ in 0..MAX_ATTEMPTS {
        let u = ProjectivePoint::from_int(&random_int_vector(&mut rng, n + 1, bound))?;
        if h.contains(&u) {
            continue;
        }
        if subset_size == 0 {
            return Ok(GenericPoint {
                point: u,
                verification: VerificationMode::Exhaustive,
            });
        }
        if let Some(verification) = verify_generic(h, &u, subset_size, &mut rng, limits) {
            return Ok(GenericPoint {
                point: u,
                verification,
            });
        }
    }
    Err(Error::Genericity(MAX_ATTEMPTS))
}

/// An exact orthogonal projector onto a `k`-dimensional subspace `V_k`,
/// with the data needed to re-express images in coordinates of `V_k`.
#[derive(Debug, Clone)]
pub struct ProjectorDescription {
    pub k: usize,
    pub ambient: usize,
    pub basis: Vec<IntVector>,
    gram_adjugate: Vec<Vec<Int>>,
    gram_det: Int,
    pub verification: VerificationMode,
}

impl ProjectorDescription {
    fn identity(dim: usize) -> Self {
        let basis: Vec<IntVector> = (0..dim)
            .map(|i| {
                IntVector::new(
                    (0..dim)
                        .map(|j| if i == j { Int::one() } else { Int::zero() })
                        .collect(),
                )
                .expect("unit vector")
            })
            .collect();
        let gram_adjugate = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { Int::one() } else { Int::zero() })
                    .collect()
            })
            .collect();
        ProjectorDescription {
            k: dim,
            ambient: dim,
            basis,
            gram_adjugate,
            gram_det: Int::one(),
            verification: VerificationMode::Exhaustive,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.k == self.ambient
    }

    /// Coordinates of the projected vector in the basis of `V_k`, scaled by
    /// `det(Gram)`: `adj(G) B^T w`. Spanned line is what matters downstream.
    pub fn coords(&self, w: &IntVector) -> Result<IntVector> {
        let bt: Vec<Int> = self
            .basis
            .iter()
            .map(|b| b.dot(w))
            .collect::<Result<Vec<_>>>()?;
        let entries: Vec<Int> = self
            .gram_adjugate
            .iter()
            .map(|row| row.iter().zip(&bt).map(|(a, b)| a * b).sum())
            .collect();
        Ok(IntVector::new(entries)?)
    }

    /// The projector matrix `B (B^T B)^{-1} B^T` with exact rational entries.
    pub fn matrix(&self) -> Vec<Vec<Rat>> {
        let d = self.ambient;
        let mut m = vec![vec![Rat::zero(); d]; d];
        for (bi, rowadj) in self.basis.iter().zip(&self.gram_adjugate) {
            for (bj, adj) in self.basis.iter().zip(rowadj) {
                // contribution of basis pair (i, j): b_i adj_ij b_j^T / det
                for r in 0..d {
                    for c in 0..d {
                        let num = &bi.entries()[r] * adj * &bj.entries()[c];
                        m[r][c] += Rat::new(num, self.gram_det.clone());
                    }
                }
            }
        }
        m
    }

    /// Image of a configuration under the projector, expressed in `V_k`
    /// coordinates as a configuration in `RP^{k-1}`. Errors if two source
    /// points collide, which a verified projector rules out.
    pub fn image_configuration(&self, h: &Configuration) -> Result<Configuration> {
        let points = h
            .points()
            .iter()
            .map(|p| ProjectivePoint::from_int(&self.coords(p.rep())?))
            .collect::<Result<Vec<_>>>()?;
        Configuration::new(self.k - 1, points)
    }
}

fn det_bigint(m: &[Vec<Int>]) -> Int {
    // Bareiss fraction-free elimination.
    let n = m.len();
    if n == 0 {
        return Int::one();
    }
    let mut a: Vec<Vec<Int>> = m.to_vec();
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return Int::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = &num / &prev;
            }
            a[i][k] = Int::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

fn adjugate(m: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![Int::one()]];
    }
    let minor = |r: usize, c: usize| -> Int {
        let sub: Vec<Vec<Int>> = (0..n)
            .filter(|&i| i != r)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != c)
                    .map(|j| m[i][j].clone())
                    .collect()
            })
            .collect();
        det_bigint(&sub)
    };
    let mut adj = vec![vec![Int::zero(); n]; n];
    for r in 0..n {
        for c in 0..n {
            let cof = minor(r, c);
            adj[c][r] = if (r + c) % 2 == 0 { cof } else { -cof };
        }
    }
    adj
}

/// Builds, for `k = n+1` down to `2`, an exact orthogonal projector onto a
/// random `k`-dimensional subspace under which linearly independent
/// `k`-subsets of `E_n` stay independent. The top projector is the
/// identity. Deterministic in the seed.
pub fn projection_chain(n: usize, seed: u64) -> Result<Vec<ProjectorDescription>> {
    projection_chain_limited(n, seed, &Limits::default())
}

pub fn projection_chain_limited(
    n: usize,
    seed: u64,
    limits: &Limits,
) -> Result<Vec<ProjectorDescription>> {
    if n == 0 {
        return Err(Error::Precondition("projection chain requires n >= 1".into()));
    }
    let en = Configuration::generate_en_limited(n, limits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![ProjectorDescription::identity(n + 1)];
    for k in (2..=n).rev() {
        out.push(sample_projector(&en, k, &mut rng, limits)?);
    }
    Ok(out)
}

/// Projector for one level of the chain; callers that only need a single
/// `k` can use this directly through [`projection_chain`]'s output.
fn sample_projector(
    en: &Configuration,
    k: usize,
    rng: &mut ChaCha8Rng,
    limits: &Limits,
) -> Result<ProjectorDescription> {
    use itertools::Itertools;
    let dim = en.ambient_dim() + 1;
    let bound: i64 = 1i64 << (en.ambient_dim() + 4).min(40);
    const MAX_ATTEMPTS: u32 = 128;
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let basis: Vec<IntVector> = (0..k).map(|_| random_int_vector(rng, dim, bound)).collect();
        let mut s = Subspace::zero(dim);
        if basis.iter().filter(|b| s.insert_point(b)).count() != k {
            continue;
        }
        // rank(P S) = rank(B^T S) because the Gram matrix is invertible,
        // so independence preservation reduces to k x k integer ranks.
        let bt_coords: Vec<Vec<Int>> = en
            .points()
            .iter()
            .map(|p| {
                basis
                    .iter()
                    .map(|b| b.dot(p.rep()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let count = binomial(en.len() as u64, k as u64);
        let check = |subset: &[usize]| -> bool {
            if en.rank_of(subset) < k {
                return true; // dependent sets may project anywhere
            }
            let mut s = Subspace::zero(k);
            subset
                .iter()
                .filter(|&&i| s.insert(&bt_coords[i]))
                .count()
                == k
        };
        let verification = if count <= limits.genericity_exhaustive_cap as u128 {
            for subset in (0..en.len()).combinations(k) {
                if !check(&subset) {
                    continue 'attempt;
                }
            }
            VerificationMode::Exhaustive
        } else {
            for _ in 0..limits.genericity_samples {
                let mut picked: Vec<usize> = Vec::with_capacity(k);
                while picked.len() < k {
                    let c = rng.gen_range(0..en.len());
                    if !picked.contains(&c) {
                        picked.push(c);
                    }
                }
                if !check(&picked) {
                    continue 'attempt;
                }
            }
            VerificationMode::Probabilistic {
                samples: limits.genericity_samples,
            }
        };
        let gram: Vec<Vec<Int>> = basis
            .iter()
            .map(|a| {
                basis
                    .iter()
                    .map(|b| a.dot(b))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let gram_det = det_bigint(&gram);
        assert!(!gram_det.is_zero(), "independent basis has nonzero Gram determinant");
        let gram_adjugate = adjugate(&gram);
        return Ok(ProjectorDescription {
            k,
            ambient: dim,
            basis,
            gram_adjugate,
            gram_det,
            verification,
        });
    }
    Err(Error::Genericity(MAX_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonicalize_examples() {
        let p = ProjectivePoint::from_i64(&[2, -4]).unwrap();
        assert_eq!(p.rep(), &IntVector::from_i64(&[1, -2]));

        let q = ProjectivePoint::from_i64(&[-1, 2]).unwrap();
        assert_eq!(q.rep(), &IntVector::from_i64(&[1, -2]));

        let r = RatVector::new(vec![
            Rat::new(Int::from(2), Int::from(3)),
            Rat::new(Int::from(4), Int::from(3)),
        ])
        .unwrap();
        let pr = ProjectivePoint::from_rat(&r).unwrap();
        assert_eq!(pr.rep(), &IntVector::from_i64(&[1, 2]));

        assert!(matches!(
            ProjectivePoint::from_i64(&[0, 0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn en_generation() {
        let e1 = Configuration::generate_en(1).unwrap();
        assert_eq!(e1.len(), 2);
        assert_eq!(e1.point(0).rep(), &IntVector::from_i64(&[1, 1]));
        assert_eq!(e1.point(1).rep(), &IntVector::from_i64(&[1, -1]));

        let e2 = Configuration::generate_en(2).unwrap();
        assert_eq!(e2.len(), 4);
        assert_eq!(e2.span_rank(), 3);

        let e3 = Configuration::generate_en(3).unwrap();
        assert_eq!(e3.len(), 8);
        for n in 1..=5 {
            let en = Configuration::generate_en(n).unwrap();
            assert_eq!(en.len(), 1 << n);
            assert_eq!(en.span_rank(), n + 1);
        }
    }

    #[test]
    fn project_e1_collapses_to_one_point() {
        let e1 = Configuration::generate_en(1).unwrap();
        let u = ProjectivePoint::from_i64(&[0, 1]).unwrap();
        let r = project_config(&e1, &u).unwrap();
        assert_eq!(r.image.len(), 1);
        assert_eq!(r.preimage_classes, vec![vec![0, 1]]);
        assert_eq!(r.min_index, vec![0]);
        assert_eq!(r.image.ambient_dim(), 0);
    }

    #[test]
    fn project_coordinate_points_preserves_order() {
        let h = Configuration::from_rows(2, &[&[1, 0, 0], &[0, 1, 0]]).unwrap();
        let u = ProjectivePoint::from_i64(&[0, 0, 1]).unwrap();
        let r = project_config(&h, &u).unwrap();
        assert_eq!(r.image.len(), 2);
        assert_eq!(r.min_index, vec![0, 1]);
    }

    #[test]
    fn project_e2_generic_direction_keeps_four_points() {
        let e2 = Configuration::generate_en(2).unwrap();
        let u = ProjectivePoint::from_i64(&[5, 3, 1]).unwrap();
        let r = project_config(&e2, &u).unwrap();
        assert_eq!(r.image.len(), 4);
        let union: usize = r.preimage_classes.iter().map(Vec::len).sum();
        assert_eq!(union, 4);
    }

    #[test]
    fn project_rejects_member_direction() {
        let e2 = Configuration::generate_en(2).unwrap();
        let u = e2.point(0).clone();
        assert!(matches!(
            project_config(&e2, &u),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn generic_point_avoids_spanned_hyperplanes() {
        let e2 = Configuration::generate_en(2).unwrap();
        let g = sample_generic_point(&e2, 7).unwrap();
        assert!(matches!(g.verification, VerificationMode::Exhaustive));
        use itertools::Itertools;
        for pair in (0..4).combinations(2) {
            let mut s = Subspace::zero(3);
            for &i in &pair {
                s.insert_point(e2.point(i).rep());
            }
            assert!(!s.contains_point(g.point.rep()));
        }
        // deterministic in the seed
        let g2 = sample_generic_point(&e2, 7).unwrap();
        assert_eq!(g.point, g2.point);
    }

    #[test]
    fn chain_identity_level_is_en_itself() {
        let chain = projection_chain(2, 3).unwrap();
        assert_eq!(chain[0].k, 3);
        assert!(chain[0].is_identity());
        let e2 = Configuration::generate_en(2).unwrap();
        let img = chain[0].image_configuration(&e2).unwrap();
        assert_eq!(img, e2);
    }

    #[test]
    fn chain_preserves_independent_subsets() {
        use itertools::Itertools;
        for n in [2usize, 3] {
            let en = Configuration::generate_en(n).unwrap();
            let chain = projection_chain(n, 5).unwrap();
            for proj in &chain {
                let img = proj.image_configuration(&en).unwrap();
                assert_eq!(img.len(), en.len());
                for subset in (0..en.len()).combinations(proj.k) {
                    if en.rank_of(&subset) == proj.k {
                        assert_eq!(img.rank_of(&subset), proj.k, "n={n} k={}", proj.k);
                    }
                }
            }
        }
    }

    #[test]
    fn projector_matrix_is_idempotent_and_symmetric() {
        let chain = projection_chain(3, 11).unwrap();
        let p = chain
            .iter()
            .find(|d| d.k == 2)
            .expect("chain has a k=2 level");
        let m = p.matrix();
        let d = m.len();
        for r in 0..d {
            for c in 0..d {
                assert_eq!(m[r][c], m[c][r]);
                let mut acc = Rat::zero();
                for t in 0..d {
                    acc += &m[r][t] * &m[t][c];
                }
                assert_eq!(acc, m[r][c], "projector squares to itself");
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let e2 = Configuration::generate_en(2).unwrap();
        let text = e2.to_text();
        let back = Configuration::parse_text(&text).unwrap();
        assert_eq!(back, e2);
        let commented = format!("# cube\n{text}");
        assert_eq!(Configuration::parse_text(&commented).unwrap(), e2);
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent_and_scale_invariant(
            v in proptest::collection::vec(-30i64..=30, 1..6),
            num in 1i64..=7,
            den in 1i64..=7,
            neg in proptest::bool::ANY,
        ) {
            prop_assume!(v.iter().any(|&x| x != 0));
            let p = ProjectivePoint::from_i64(&v).unwrap();
            let again = ProjectivePoint::from_int(p.rep()).unwrap();
            prop_assert_eq!(&again, &p);

            let sign = if neg { -1 } else { 1 };
            let scaled = RatVector::new(
                v.iter()
                    .map(|&x| Rat::new(Int::from(x * num * sign), Int::from(den)))
                    .collect()
            ).unwrap();
            prop_assert_eq!(ProjectivePoint::from_rat(&scaled).unwrap(), p);
        }
    }
}
