//! The supermodular invariant of a point configuration, computed by three
//! independent algorithms, together with the identities and inequalities
//! that tie it to projections, to the relative-homology basis count, and to
//! combinatorial flags.
//!
//! The three routes: enumeration of the order-minimal tuples, the GF(2)
//! homology rank one degree below the top, and the flag-average formula,
//! which sums `(1 - sum of hyperplane masses) / W[H]` over all ordered
//! independent tuples of top length and lands on the same integer for every
//! mass vector summing to one.

use std::collections::BTreeSet;

use itertools::Itertools;
use num::{One, Zero};

use crate::homology;
use crate::linalg::{Int, Rat, Subspace};
use crate::projective::{project_config, Configuration, Order, ProjectivePoint};
use crate::{par, Error, Limits, Result};

/// Classification of an ordered tuple of distinct points: independent
/// exactly when its rank equals its length.
pub fn tuple_is_independent(h: &Configuration, indices: &[usize]) -> bool {
    h.rank_of(indices) == indices.len()
}

/// The tuple of span-membership counts `(q_s, ..., q_1)` of an ordered
/// independent tuple: `q_l` counts configuration points inside the span of
/// the last `l` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagProfile {
    q: Vec<u64>,
}

impl FlagProfile {
    fn new(q: Vec<u64>) -> Self {
        let s = q.len();
        debug_assert_eq!(*q.last().expect("nonempty profile"), 1);
        debug_assert!(q.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(q.iter().enumerate().all(|(i, &v)| v >= (s - i) as u64));
        FlagProfile { q }
    }

    /// `(q_s, ..., q_1)`, top span first.
    pub fn q(&self) -> &[u64] {
        &self.q
    }

    /// `q_l` for `1 <= l <= s`.
    pub fn q_at(&self, l: usize) -> u64 {
        self.q[self.q.len() - l]
    }

    /// The product `W[H] = q_s * ... * q_1`.
    pub fn product(&self) -> Int {
        self.q.iter().fold(Int::one(), |acc, &v| acc * Int::from(v))
    }
}

/// Computes the flag profile of an ordered independent tuple.
pub fn flag_profile(h: &Configuration, tuple: &[usize]) -> Result<FlagProfile> {
    if tuple.is_empty() {
        return Err(Error::Precondition("empty tuple has no flag".into()));
    }
    if !tuple_is_independent(h, tuple) {
        return Err(Error::Precondition(
            "flag profile of a degenerate tuple".into(),
        ));
    }
    let mut span = Subspace::zero(h.ambient_dim() + 1);
    let mut q_rev = Vec::with_capacity(tuple.len());
    for &i in tuple.iter().rev() {
        span.insert_point(h.point(i).rep());
        let count = h
            .points()
            .iter()
            .filter(|p| span.contains_point(p.rep()))
            .count() as u64;
        q_rev.push(count);
    }
    q_rev.reverse();
    Ok(FlagProfile::new(q_rev))
}

/// An exact mass vector over the points; entries may be negative but must
/// sum to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityVector {
    p: Vec<Rat>,
}

impl ProbabilityVector {
    pub fn new(p: Vec<Rat>) -> Result<Self> {
        let sum: Rat = p.iter().sum();
        if !sum.is_one() {
            return Err(Error::Precondition(format!(
                "mass vector sums to {sum}, not 1"
            )));
        }
        Ok(ProbabilityVector { p })
    }

    pub fn uniform(len: usize) -> Self {
        let share = Rat::new(Int::one(), Int::from(len as i64));
        ProbabilityVector {
            p: vec![share; len],
        }
    }

    /// All mass on a single point.
    pub fn indicator(len: usize, at: usize) -> Self {
        let mut p = vec![Rat::zero(); len];
        p[at] = Rat::one();
        ProbabilityVector { p }
    }

    pub fn entries(&self) -> &[Rat] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Whether an ordered tuple of point indices satisfies the order-minimality
/// condition: positions strictly increase and never touch the first one,
/// and each entry is the order-minimal configuration point inside the span
/// of the tuple from that entry on.
pub fn satisfies_eta(h: &Configuration, order: &Order, tuple: &[usize]) -> Result<bool> {
    let n = h.ambient_dim();
    if tuple.len() != n {
        return Err(Error::Precondition(format!(
            "tuple length {} differs from ambient dimension {n}",
            tuple.len()
        )));
    }
    let positions: Vec<usize> = tuple.iter().map(|&i| order.position_of(i)).collect();
    if positions.is_empty() {
        return Ok(true);
    }
    if positions[0] == 0 || positions.windows(2).any(|w| w[0] >= w[1]) {
        return Ok(false);
    }
    let mut span = Subspace::zero(n + 1);
    for l in (0..n).rev() {
        span.insert_point(h.point(tuple[l]).rep());
        for pos in 0..positions[l] {
            if span.contains_point(h.point(order.point_at(pos)).rep()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn dfs_order_count(
    reps: &[&crate::linalg::IntVector],
    span: &Subspace,
    lowest: usize,
    remaining: usize,
) -> u64 {
    if remaining == 0 {
        return 1;
    }
    let mut total = 0;
    // next entry sits strictly left of everything chosen so far and no
    // earlier point may fall into the grown span
    for pos in (1..lowest).rev() {
        let mut grown = span.clone();
        grown.insert_point(reps[pos]);
        if (0..pos).any(|q| grown.contains_point(reps[q])) {
            continue;
        }
        total += dfs_order_count(reps, &grown, pos, remaining - 1);
    }
    total
}

/// The invariant by order enumeration: the number of tuples satisfying the
/// order-minimality condition. Independent of the chosen order.
pub fn eta_star_via_order(h: &Configuration, order: &Order) -> Result<u64> {
    let n = h.ambient_dim();
    if order.len() != h.len() {
        return Err(Error::DimensionMismatch(
            "order length differs from configuration".into(),
        ));
    }
    if n == 0 {
        return Ok(u64::from(!h.is_empty()));
    }
    if !h.has_full_span() {
        return Ok(0);
    }
    let reps: Vec<&crate::linalg::IntVector> = (0..h.len())
        .map(|pos| h.point(order.point_at(pos)).rep())
        .collect();
    let t = h.len();
    // parallel split on the rightmost entry
    Ok(par::sum_u64(t, |last| {
        if last == 0 {
            return 0;
        }
        let mut span = Subspace::zero(n + 1);
        span.insert_point(reps[last]);
        if (0..last).any(|q| span.contains_point(reps[q])) {
            return 0;
        }
        dfs_order_count(&reps, &span, last, n - 1)
    }))
}

/// The invariant with the identity order.
pub fn eta_star(h: &Configuration) -> Result<u64> {
    eta_star_via_order(h, &Order::identity(h.len()))
}

/// The invariant as the GF(2) homology rank one degree below the top; a
/// deficient span gives 0.
pub fn eta_star_via_homology(h: &Configuration) -> Result<u64> {
    let n = h.ambient_dim();
    if n == 0 {
        return Ok(u64::from(!h.is_empty()));
    }
    if !h.has_full_span() {
        return Ok(0);
    }
    Ok(homology::homology_rank(h, n - 1)? as u64)
}

fn flags_dfs(
    h: &Configuration,
    span: &Subspace,
    used: u32,
    depth: usize,
    product: &Int,
    totals: &mut [Rat],
    ps: &[&ProbabilityVector],
) {
    let n = h.ambient_dim();
    if depth == n {
        let mut member_mask: u32 = 0;
        for (j, p) in h.points().iter().enumerate() {
            if span.contains_point(p.rep()) {
                member_mask |= 1 << j;
            }
        }
        for (total, p) in totals.iter_mut().zip(ps) {
            let mass: Rat = (0..h.len())
                .filter(|&j| member_mask >> j & 1 == 1)
                .map(|j| p.entries()[j].clone())
                .sum();
            *total += (Rat::one() - mass) / Rat::from(product.clone());
        }
        return;
    }
    for i in 0..h.len() {
        if used >> i & 1 == 1 || span.contains_point(h.point(i).rep()) {
            continue;
        }
        let mut grown = span.clone();
        grown.insert_point(h.point(i).rep());
        let members = h
            .points()
            .iter()
            .filter(|p| grown.contains_point(p.rep()))
            .count() as i64;
        let grown_product = product * Int::from(members);
        flags_dfs(
            h,
            &grown,
            used | 1 << i,
            depth + 1,
            &grown_product,
            totals,
            ps,
        );
    }
}

/// The flag-average formula evaluated at several mass vectors in one pass
/// over the ordered independent tuples. Requires a full span.
pub fn eta_star_via_flags_multi(h: &Configuration, ps: &[&ProbabilityVector]) -> Result<Vec<Rat>> {
    let n = h.ambient_dim();
    if !h.has_full_span() {
        return Err(Error::DeficientSpan);
    }
    if h.len() > 32 {
        return Err(Error::Budget {
            what: "points for tuple masks",
            limit: 32,
        });
    }
    for p in ps {
        if p.len() != h.len() {
            return Err(Error::DimensionMismatch(
                "mass vector length differs from configuration".into(),
            ));
        }
    }
    if n == 0 {
        // only the empty tuple: empty product, empty span holds no points
        return Ok(vec![Rat::one(); ps.len()]);
    }
    // parallel split on the last tuple entry, sequential DFS below
    let partials = par::map_range(h.len(), |i| {
        let mut span = Subspace::zero(n + 1);
        span.insert_point(h.point(i).rep());
        let members = h
            .points()
            .iter()
            .filter(|p| span.contains_point(p.rep()))
            .count() as i64;
        let mut totals = vec![Rat::zero(); ps.len()];
        flags_dfs(h, &span, 1 << i, 1, &Int::from(members), &mut totals, ps);
        totals
    });
    let mut totals = vec![Rat::zero(); ps.len()];
    for part in partials {
        for (t, x) in totals.iter_mut().zip(part) {
            *t += x;
        }
    }
    Ok(totals)
}

/// The flag-average formula at a single mass vector.
pub fn eta_star_via_flags(h: &Configuration, p: &ProbabilityVector) -> Result<Rat> {
    Ok(eta_star_via_flags_multi(h, &[p])?.pop().expect("one total"))
}

/// Outcome of one supermodularity test on a configuration and two outside
/// points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupermodularCheck {
    pub eta_h: u64,
    pub eta_hu: u64,
    pub eta_hv: u64,
    pub eta_huv: u64,
    pub holds: bool,
}

/// Verifies the supermodular inequality
/// `eta(H + u) - eta(H) <= eta(H + u + v) - eta(H + v)`.
pub fn check_supermodular(
    h: &Configuration,
    u: &ProjectivePoint,
    v: &ProjectivePoint,
) -> Result<SupermodularCheck> {
    if u == v {
        return Err(Error::Precondition("the two outside points coincide".into()));
    }
    if h.contains(u) || h.contains(v) {
        return Err(Error::Precondition(
            "supermodularity test points must lie outside the configuration".into(),
        ));
    }
    let eta_h = eta_star(h)?;
    let eta_hu = eta_star(&h.with_appended(u.clone())?)?;
    let eta_hv = eta_star(&h.with_appended(v.clone())?)?;
    let eta_huv = eta_star(&h.with_appended(u.clone())?.with_appended(v.clone())?)?;
    Ok(SupermodularCheck {
        eta_h,
        eta_hu,
        eta_hv,
        eta_huv,
        holds: eta_hu - eta_h <= eta_huv - eta_hv,
    })
}

/// Outcome of one projection-recursion test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionRecursionCheck {
    pub eta_extended: u64,
    pub eta_h: u64,
    pub eta_projected: u64,
    pub holds: bool,
}

/// Verifies `eta_n(H + u) = eta_n(H) + eta_{n-1}(H projected off u)`.
pub fn check_projection_recursion(
    h: &Configuration,
    u: &ProjectivePoint,
) -> Result<ProjectionRecursionCheck> {
    if h.contains(u) {
        return Err(Error::Precondition(
            "recursion direction must lie outside the configuration".into(),
        ));
    }
    let eta_extended = eta_star(&h.with_appended(u.clone())?)?;
    let eta_h = eta_star(h)?;
    let eta_projected = eta_star(&project_config(h, u)?.image)?;
    Ok(ProjectionRecursionCheck {
        eta_extended,
        eta_h,
        eta_projected,
        holds: eta_extended == eta_h + eta_projected,
    })
}

/// Number of `n`-subsets of the configuration that span the whole space
/// together with `w`; each such subset contributes exactly one.
pub fn binom_eta_sum(h: &Configuration, w: &ProjectivePoint) -> Result<u64> {
    let n = h.ambient_dim();
    if w.ambient_dim() != n {
        return Err(Error::DimensionMismatch(
            "external point dimension differs from configuration".into(),
        ));
    }
    if h.len() < n {
        return Ok(0);
    }
    let combos: Vec<Vec<usize>> = (0..h.len()).combinations(n).collect();
    Ok(par::sum_u64(combos.len(), |i| {
        let mut span = Subspace::zero(n + 1);
        span.insert_point(w.rep());
        for &j in &combos[i] {
            span.insert_point(h.point(j).rep());
        }
        u64::from(span.dim() == n + 1)
    }))
}

fn sorted_positions(order: &Order, u: &[usize]) -> Vec<usize> {
    let mut positions: Vec<usize> = u.iter().map(|&i| order.position_of(i)).collect();
    positions.sort_unstable();
    positions
}

fn check_suffix_closure(h: &Configuration, order: &Order, positions: &[usize], s: usize) -> bool {
    // span of the s order-largest elements avoids every point strictly
    // below the smallest of them
    let len = positions.len();
    let mut span = Subspace::zero(h.ambient_dim() + 1);
    for &p in &positions[len - s..] {
        span.insert_point(h.point(order.point_at(p)).rep());
    }
    let cutoff = positions[len - s];
    !(0..cutoff).any(|pos| span.contains_point(h.point(order.point_at(pos)).rep()))
}

fn validate_subset_tuple(h: &Configuration, order: &Order, u: &[usize]) -> Result<Vec<usize>> {
    if u.is_empty() {
        return Err(Error::Precondition("empty subset".into()));
    }
    if !tuple_is_independent(h, u) {
        return Err(Error::Precondition("subset must be independent".into()));
    }
    Ok(sorted_positions(order, u))
}

/// Whether a subset is order-closed: every suffix span (in the order)
/// avoids all strictly smaller points.
pub fn is_pi_closed(h: &Configuration, order: &Order, u: &[usize]) -> Result<bool> {
    let positions = validate_subset_tuple(h, order, u)?;
    Ok((1..=positions.len()).all(|s| check_suffix_closure(h, order, &positions, s)))
}

/// Whether a subset is an order-boundary subset: all proper suffixes are
/// closed but the full span captures a strictly smaller point.
pub fn is_pi_boundary(h: &Configuration, order: &Order, u: &[usize]) -> Result<bool> {
    let positions = validate_subset_tuple(h, order, u)?;
    let len = positions.len();
    Ok((1..len).all(|s| check_suffix_closure(h, order, &positions, s))
        && !check_suffix_closure(h, order, &positions, len))
}

/// All order-boundary subsets of the given size whose span avoids the
/// order-minimal point, as sorted position tuples.
fn boundary_subsets(h: &Configuration, order: &Order, size: usize) -> Vec<Vec<usize>> {
    let n = h.ambient_dim();
    let w_rep = h.point(order.point_at(0)).rep();
    (1..h.len())
        .combinations(size)
        .filter(|positions| {
            let mut span = Subspace::zero(n + 1);
            for &p in positions {
                span.insert_point(h.point(order.point_at(p)).rep());
            }
            if span.dim() != size || span.contains_point(w_rep) {
                return false;
            }
            (1..size).all(|s| check_suffix_closure(h, order, positions, s))
                && !check_suffix_closure(h, order, positions, size)
        })
        .collect()
}

/// Outcome of the boundary-partition check: the deletion-map image of the
/// hyperplane tuples decomposes as the disjoint union over order-boundary
/// subsets of their tail classes.
#[derive(Debug, Clone)]
pub struct PartitionCheck {
    pub image_size: usize,
    pub class_sizes: Vec<usize>,
    pub injective: bool,
    pub disjoint: bool,
    pub covers: bool,
}

impl PartitionCheck {
    pub fn holds(&self) -> bool {
        self.injective && self.disjoint && self.covers
    }
}

/// Verifies the partition of the deletion-map image by order-boundary
/// tails. The order must place the designated point first.
pub fn check_boundary_partition(h: &Configuration, order: &Order) -> Result<PartitionCheck> {
    let n = h.ambient_dim();
    if !h.has_full_span() {
        return Err(Error::DeficientSpan);
    }
    let all_cpi = homology::enumerate_cpi(h, order)?;
    let images_all: Vec<Vec<usize>> = all_cpi
        .iter()
        .map(|t| homology::t_hat(h, order, &t.positions))
        .collect::<Result<Vec<_>>>()?;
    let injective = images_all.iter().collect::<BTreeSet<_>>().len() == images_all.len();

    let nonzero = homology::cpi_nonzero(h, order)?;
    let lhs: BTreeSet<Vec<usize>> = nonzero
        .iter()
        .map(|t| homology::t_hat(h, order, &t.positions))
        .collect::<Result<_>>()?;

    let mut classes: Vec<BTreeSet<Vec<usize>>> = Vec::new();
    if n >= 2 {
        for k in 0..=n - 2 {
            let size = n - k;
            for u in boundary_subsets(h, order, size) {
                let class: BTreeSet<Vec<usize>> = nonzero
                    .iter()
                    .filter(|t| t.positions[k + 1..] == u[..])
                    .map(|t| homology::t_hat(h, order, &t.positions))
                    .collect::<Result<_>>()?;
                classes.push(class);
            }
        }
    }
    let mut union: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut disjoint = true;
    for class in &classes {
        for x in class {
            if !union.insert(x.clone()) {
                disjoint = false;
            }
        }
    }
    Ok(PartitionCheck {
        image_size: lhs.len(),
        class_sizes: classes.iter().map(BTreeSet::len).collect(),
        injective,
        disjoint,
        covers: union == lhs,
    })
}

fn factorial(k: i64) -> Int {
    (1..=k).fold(Int::one(), |acc, i| acc * Int::from(i))
}

fn binom_int(a: i64, b: i64) -> Int {
    if b < 0 || a < b {
        return Int::zero();
    }
    let b = b.min(a - b);
    let mut num = Int::one();
    for i in 0..b {
        num *= Int::from(a - i);
    }
    num / factorial(b)
}

fn ordered_tuples_avoiding(
    h: &Configuration,
    len: usize,
    exclude_span_of: &ProjectivePoint,
) -> Vec<Vec<usize>> {
    // ordered independent tuples whose span avoids the designated point
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, Subspace)> =
        vec![(Vec::new(), Subspace::zero(h.ambient_dim() + 1))];
    while let Some((tuple, span)) = stack.pop() {
        if tuple.len() == len {
            if !span.contains_point(exclude_span_of.rep()) {
                out.push(tuple);
            }
            continue;
        }
        for i in 0..h.len() {
            if tuple.contains(&i) || span.contains_point(h.point(i).rep()) {
                continue;
            }
            let mut grown = span.clone();
            grown.insert_point(h.point(i).rep());
            let mut next = tuple.clone();
            next.push(i);
            stack.push((next, grown));
        }
    }
    out.sort();
    out
}

/// The exact factorial-ratio upper bound for the relative homology rank:
/// the double sum over ordered independent tuples avoiding `w` plus the
/// degenerate-extension count of `w`. Exact rational arithmetic throughout;
/// empty inner ranges contribute zero.
pub fn thmc1_rhs(h: &Configuration, w: usize) -> Result<Rat> {
    thmc1_rhs_limited(h, w, &Limits::default())
}

pub fn thmc1_rhs_limited(h: &Configuration, w: usize, limits: &Limits) -> Result<Rat> {
    let n = h.ambient_dim();
    let t = h.len() as i64;
    if w >= h.len() {
        return Err(Error::Precondition(
            "designated point outside configuration".into(),
        ));
    }
    if !h.has_full_span() {
        return Err(Error::DeficientSpan);
    }
    if h.len() > limits.factorial_point_cap {
        return Err(Error::Budget {
            what: "points for exact factorial sums",
            limit: limits.factorial_point_cap as u64,
        });
    }
    let mut total = Rat::zero();
    if n >= 2 {
        let w_point = h.point(w).clone();
        for k in 0..=(n - 2) as i64 {
            let len = n as i64 - k;
            let tuples = ordered_tuples_avoiding(h, len as usize, &w_point);
            let terms = par::map_collect(&tuples, |tuple| {
                let profile = flag_profile(h, tuple).expect("enumerated tuples are independent");
                let q_top = profile.q_at(len as usize) as i64;
                let q_sub = profile.q_at(len as usize - 1) as i64;
                let tail_product: Int = (1..len)
                    .map(|l| Int::from(profile.q_at(l as usize) as i64))
                    .product();
                let b = q_top - q_sub - 1;
                let mut inner = Int::zero();
                for d in (k + 3)..=(t - q_sub) {
                    let a = (binom_int(t - q_sub - 2, b) - binom_int(t - q_sub - d, b))
                        * factorial(b);
                    if a.is_zero() {
                        continue;
                    }
                    // (T-d)! / (T - q_sub - d)! as a rising product
                    let ratio: Int = ((t - q_sub - d + 1)..=(t - d)).map(Int::from).product();
                    inner += ratio * factorial(t - q_top - 1) * a * binom_int(d - 2, k);
                }
                Rat::new(inner, tail_product)
            });
            for term in terms {
                total += term;
            }
        }
    }
    total /= Rat::from(factorial(t - 1));
    total += Rat::from(Int::from(homology::enumerate_dpi(h, w)? as i64));
    Ok(total)
}

/// Outcome of one symmetrized-flag test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymFlagCheck {
    pub k: usize,
    pub m: u64,
    pub sym: Rat,
    pub bound: Rat,
    pub holds: bool,
}

/// Sums `1 / W_sigma[H]` over all reorderings of an independent tuple and
/// compares with `k / (k + m)`, where `k + m` is the point count of the
/// tuple's span.
pub fn symmetrized_flag_bound(h: &Configuration, tuple: &[usize]) -> Result<SymFlagCheck> {
    let k = tuple.len();
    if !tuple_is_independent(h, tuple) {
        return Err(Error::Precondition(
            "symmetrization of a degenerate tuple".into(),
        ));
    }
    let profile = flag_profile(h, tuple)?;
    let q_k = profile.q_at(k);
    let m = q_k - k as u64;
    let mut sym = Rat::zero();
    for perm in tuple.iter().copied().permutations(k) {
        let p = flag_profile(h, &perm)?;
        sym += Rat::new(Int::one(), p.product());
    }
    let bound = Rat::new(Int::from(k as i64), Int::from(q_k as i64));
    let holds = sym <= bound;
    Ok(SymFlagCheck {
        k,
        m,
        sym,
        bound,
        holds,
    })
}
