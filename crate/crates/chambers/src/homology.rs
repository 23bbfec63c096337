//! The degeneracy complex of a configuration and its GF(2) homology.
//!
//! A subset of the points is a simplex exactly when its span is a proper
//! subspace, so every subset of size at most `n` is a simplex and bigger
//! subsets are simplices precisely when they are rank-deficient. The module
//! computes reduced homology ranks, the three ranks tied together by the
//! homology exact sequence of the pair (complex, codimension-one skeleton),
//! and the combinatorial tuple sets that index relative homology bases.

use std::collections::HashMap;
use std::io::Write;

use itertools::Itertools;

use crate::linalg::{Gf2Matrix, Subspace};
use crate::projective::{Configuration, Order};
use crate::{par, Error, Limits, Result};

/// Memoized "is this subset a simplex" tests for one configuration.
///
/// Requires a full span: for a deficient configuration the whole power set
/// is simplicial and callers take the contractible short-circuit instead.
pub struct DegeneracyOracle<'a> {
    config: &'a Configuration,
    memo: std::cell::RefCell<HashMap<u32, bool>>,
}

impl<'a> DegeneracyOracle<'a> {
    pub fn new(config: &'a Configuration) -> Result<Self> {
        if config.len() > 32 {
            return Err(Error::Budget {
                what: "points for simplex bitmasks",
                limit: 32,
            });
        }
        if !config.has_full_span() {
            return Err(Error::DeficientSpan);
        }
        Ok(DegeneracyOracle {
            config,
            memo: std::cell::RefCell::new(HashMap::new()),
        })
    }

    pub fn is_simplex(&self, indices: &[usize]) -> bool {
        let n = self.config.ambient_dim();
        if indices.len() <= n {
            return true;
        }
        let mask = indices.iter().fold(0u32, |m, &i| m | 1 << i);
        if let Some(&v) = self.memo.borrow().get(&mask) {
            return v;
        }
        let v = self.config.rank_of(indices) <= n;
        self.memo.borrow_mut().insert(mask, v);
        v
    }
}

/// Spec-level entry point; errors on a deficient span, in which case the
/// whole power set is simplicial and homology vanishes.
pub fn is_simplex(h: &Configuration, indices: &[usize]) -> Result<bool> {
    let oracle = DegeneracyOracle::new(h)?;
    Ok(oracle.is_simplex(indices))
}

fn mask_of(indices: &[usize]) -> u32 {
    indices.iter().fold(0u32, |m, &i| m | 1 << i)
}

/// All simplices with `size` vertices, as bitmasks in lexicographic order
/// of their sorted index tuples.
fn simplices_of_size(h: &Configuration, size: usize, limits: &Limits) -> Result<Vec<u32>> {
    let t = h.len();
    let n = h.ambient_dim();
    if size == 0 || size > t {
        return Ok(Vec::new());
    }
    let total = crate::projective::binomial(t as u64, size as u64);
    if total > limits.simplex_cap as u128 {
        return Err(Error::Budget {
            what: "simplices per degree",
            limit: limits.simplex_cap as u64,
        });
    }
    let combos: Vec<Vec<usize>> = (0..t).combinations(size).collect();
    if size <= n {
        return Ok(combos.iter().map(|c| mask_of(c)).collect());
    }
    let flags = par::map_collect(&combos, |c| h.rank_of(c) <= n);
    Ok(combos
        .iter()
        .zip(flags)
        .filter(|(_, keep)| *keep)
        .map(|(c, _)| mask_of(c))
        .collect())
}

fn facets(mask: u32) -> impl Iterator<Item = u32> {
    let bits: Vec<u32> = (0..32).filter(|&b| mask >> b & 1 == 1).collect();
    bits.into_iter().map(move |b| mask & !(1 << b))
}

/// Boundary matrix from `upper` (columns) into `lower` (rows) over GF(2).
fn boundary_matrix(upper: &[u32], lower: &[u32]) -> Gf2Matrix {
    let index: HashMap<u32, usize> = lower.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut mat = Gf2Matrix::zero(lower.len(), upper.len());
    for (col, &simplex) in upper.iter().enumerate() {
        for facet in facets(simplex) {
            let row = index[&facet];
            mat.flip(row, col);
        }
    }
    mat
}

fn boundary_rank(upper: &[u32], lower: &[u32]) -> usize {
    if upper.is_empty() || lower.is_empty() {
        return 0;
    }
    boundary_matrix(upper, lower).rank()
}

/// Reduced GF(2) homology rank of the degeneracy complex in degree `d`.
/// A deficient span short-circuits to 0 (the complex is a full simplex).
pub fn homology_rank(h: &Configuration, d: usize) -> Result<usize> {
    homology_rank_limited(h, d, &Limits::default())
}

pub fn homology_rank_limited(h: &Configuration, d: usize, limits: &Limits) -> Result<usize> {
    let n = h.ambient_dim();
    if d > n {
        return Err(Error::Precondition(format!(
            "degree {d} above ambient dimension {n}"
        )));
    }
    if h.len() > 32 {
        return Err(Error::Budget {
            what: "points for simplex bitmasks",
            limit: 32,
        });
    }
    if !h.has_full_span() {
        return Ok(0);
    }
    let here = simplices_of_size(h, d + 1, limits)?;
    let above = simplices_of_size(h, d + 2, limits)?;
    let rank_down = if d == 0 {
        // reduced augmentation: every vertex maps to the empty simplex
        usize::from(!here.is_empty())
    } else {
        let below = simplices_of_size(h, d, limits)?;
        boundary_rank(&here, &below)
    };
    let nullity = here.len() - rank_down;
    Ok(nullity - boundary_rank(&above, &here))
}

/// The three ranks of the homology exact sequence of the pair
/// `(K, K_{n-1})`, each computed independently:
/// the skeleton rank from the kernel of the degree-`n-1` boundary, the
/// absolute rank from that kernel modulo degree-`n` boundaries, and the
/// relative rank from the degree-`n` chains modulo degree-`n+1` boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelativeRankReport {
    pub rank_rel: usize,
    pub rank_skel: usize,
    pub rank_abs: usize,
}

impl RelativeRankReport {
    /// Exactness of the pair sequence.
    pub fn exact(&self) -> bool {
        self.rank_skel == self.rank_rel + self.rank_abs
    }
}

pub fn relative_ranks(h: &Configuration) -> Result<RelativeRankReport> {
    relative_ranks_limited(h, &Limits::default())
}

pub fn relative_ranks_limited(h: &Configuration, limits: &Limits) -> Result<RelativeRankReport> {
    let n = h.ambient_dim();
    if !h.has_full_span() {
        return Err(Error::DeficientSpan);
    }
    if h.len() > 32 {
        return Err(Error::Budget {
            what: "points for simplex bitmasks",
            limit: 32,
        });
    }
    let size_n = simplices_of_size(h, n, limits)?; // degree n-1: complete
    let size_n1 = simplices_of_size(h, n + 1, limits)?; // degree n: degenerate tuples
    let size_n2 = simplices_of_size(h, n + 2, limits)?; // degree n+1

    let rank_down = if n == 1 {
        usize::from(!size_n.is_empty())
    } else {
        let below = simplices_of_size(h, n - 1, limits)?;
        boundary_rank(&size_n, &below)
    };
    let skel_kernel = size_n.len() - rank_down;
    let rank_n = boundary_rank(&size_n1, &size_n);
    let rank_n1 = boundary_rank(&size_n2, &size_n1);
    Ok(RelativeRankReport {
        rank_rel: size_n1.len() - rank_n1,
        rank_skel: skel_kernel,
        rank_abs: skel_kernel - rank_n,
    })
}

/// Writes one boundary matrix in a sparse triplet text format:
/// a header line `boundary <d> <rows> <cols>`, then one `row col` pair per
/// GF(2) one, rows indexing (d-1)-simplices and columns d-simplices in
/// lexicographic order.
pub fn write_boundary_triplets<W: Write>(
    h: &Configuration,
    d: usize,
    out: &mut W,
) -> Result<()> {
    let limits = Limits::default();
    let upper = simplices_of_size(h, d + 1, &limits)?;
    let lower = if d == 0 {
        Vec::new()
    } else {
        simplices_of_size(h, d, &limits)?
    };
    writeln!(out, "boundary {} {} {}", d, lower.len(), upper.len())?;
    if d == 0 {
        return Ok(());
    }
    let mat = boundary_matrix(&upper, &lower);
    for r in 0..mat.nrows() {
        for c in 0..mat.ncols() {
            if mat.get(r, c) {
                writeln!(out, "{r} {c}")?;
            }
        }
    }
    Ok(())
}

/// One degenerate tuple of the relative basis: the order positions of its
/// entries (strictly increasing) and the position index `t` removed by the
/// deletion map.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CpiTuple {
    /// Order positions, strictly increasing, length `n + 1`.
    pub positions: Vec<usize>,
    /// Index into `positions` of the entry the deletion map removes.
    pub t_index: usize,
    /// Dimension of the span of the tuple.
    pub span_dim: usize,
    /// Whether the order-minimal configuration point lies in the span.
    pub contains_first: bool,
}

/// Analyzes one increasing tuple of order positions; returns the tuple data
/// when it belongs to the degenerate basis set.
fn analyze_tuple(h: &Configuration, order: &Order, positions: &[usize]) -> Option<CpiTuple> {
    let n = h.ambient_dim();
    debug_assert_eq!(positions.len(), n + 1);
    let ambient = n + 1;
    // suffix_spans[j] = span of the points at positions[j..]
    let mut suffix_spans: Vec<Subspace> = vec![Subspace::zero(ambient); n + 2];
    for j in (0..=n).rev() {
        let mut s = suffix_spans[j + 1].clone();
        s.insert_point(h.point(order.point_at(positions[j])).rep());
        suffix_spans[j] = s;
    }
    if suffix_spans[0].dim() == n + 1 {
        return None; // independent tuple
    }
    // t(Delta): last entry index lying in the span of the later entries
    let t_index = (0..n)
        .rev()
        .find(|&idx| {
            suffix_spans[idx + 1].contains_point(h.point(order.point_at(positions[idx])).rep())
        })
        .expect("a degenerate tuple has a dependent entry");
    // the order-maximal configuration point that lies, strictly before some
    // tail, inside that tail's span
    let mut w_max: Option<usize> = None;
    for pos in (0..order.len()).rev() {
        let idx0 = (0..n).find(|&idx| positions[idx + 1] > pos);
        let Some(idx0) = idx0 else { continue };
        if suffix_spans[idx0 + 1].contains_point(h.point(order.point_at(pos)).rep()) {
            w_max = Some(pos);
            break;
        }
    }
    let w_max = w_max.expect("degenerate tuples always have a maximal witness");
    if positions[t_index] != w_max {
        return None;
    }
    let contains_first = suffix_spans[0].contains_point(h.point(order.point_at(0)).rep());
    Some(CpiTuple {
        positions: positions.to_vec(),
        t_index,
        span_dim: suffix_spans[0].dim(),
        contains_first,
    })
}

/// Enumerates the degenerate-tuple basis of the relative homology group for
/// the given order: increasing dependent `(n+1)`-tuples whose dependent
/// entry is the order-maximal witness of the tail spans.
pub fn enumerate_cpi(h: &Configuration, order: &Order) -> Result<Vec<CpiTuple>> {
    let n = h.ambient_dim();
    if !h.has_full_span() {
        return Err(Error::DeficientSpan);
    }
    if order.len() != h.len() {
        return Err(Error::DimensionMismatch(
            "order length differs from configuration".into(),
        ));
    }
    if h.len() < n + 1 {
        return Ok(Vec::new());
    }
    let combos: Vec<Vec<usize>> = (0..h.len()).combinations(n + 1).collect();
    let found = par::map_collect(&combos, |c| analyze_tuple(h, order, c));
    Ok(found.into_iter().flatten().collect())
}

/// The tuples of `enumerate_cpi` whose span is a hyperplane avoiding the
/// order-minimal point.
pub fn cpi_nonzero(h: &Configuration, order: &Order) -> Result<Vec<CpiTuple>> {
    let n = h.ambient_dim();
    Ok(enumerate_cpi(h, order)?
        .into_iter()
        .filter(|t| t.span_dim == n && !t.contains_first)
        .collect())
}

/// Deletion map on a basis tuple: drops the dependent entry. Errors when
/// the tuple is not in the basis set for this order.
pub fn t_hat(h: &Configuration, order: &Order, positions: &[usize]) -> Result<Vec<usize>> {
    let n = h.ambient_dim();
    if positions.len() != n + 1 || positions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(
            "tuple must be strictly increasing of length n+1".into(),
        ));
    }
    let Some(info) = analyze_tuple(h, order, positions) else {
        return Err(Error::Precondition(
            "tuple is not in the degenerate basis set".into(),
        ));
    };
    Ok(info
        .positions
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != info.t_index)
        .map(|(_, &p)| p)
        .collect())
}

/// Number of `n`-subsets of the other points that become dependent together
/// with the designated point.
pub fn enumerate_dpi(h: &Configuration, w: usize) -> Result<u64> {
    let n = h.ambient_dim();
    if w >= h.len() {
        return Err(Error::Precondition(
            "designated point outside configuration".into(),
        ));
    }
    if !h.has_full_span() {
        return Err(Error::DeficientSpan);
    }
    let others: Vec<usize> = (0..h.len()).filter(|&i| i != w).collect();
    if others.len() < n {
        return Ok(0);
    }
    let combos: Vec<Vec<usize>> = others.into_iter().combinations(n).collect();
    Ok(par::sum_u64(combos.len(), |i| {
        let mut indices = combos[i].clone();
        indices.push(w);
        u64::from(h.rank_of(&indices) <= n)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::ProjectivePoint;
    use rand::SeedableRng;

    fn coordinate_simplex(n: usize) -> Configuration {
        let rows: Vec<Vec<i64>> = (0..=n)
            .map(|i| (0..=n).map(|j| i64::from(i == j)).collect())
            .collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        Configuration::from_rows(n, &refs).unwrap()
    }

    #[test]
    fn simplex_oracle_basics() {
        let e2 = Configuration::generate_en(2).unwrap();
        assert!(is_simplex(&e2, &[0]).unwrap());
        assert!(is_simplex(&e2, &[0, 1]).unwrap(), "pairs have rank 2 < 3");
        assert!(!is_simplex(&e2, &[0, 1, 2]).unwrap(), "independent triple");
        let simplex = coordinate_simplex(2);
        assert!(!is_simplex(&simplex, &[0, 1, 2]).unwrap());
    }

    #[test]
    fn h0_of_points_on_a_line_counts_components() {
        for m in 2..=5usize {
            let rows: Vec<Vec<i64>> = (0..m).map(|i| vec![1, i as i64]).collect();
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let h = Configuration::from_rows(1, &refs).unwrap();
            assert_eq!(homology_rank(&h, 0).unwrap(), m - 1);
        }
    }

    #[test]
    fn e2_degree_one_rank_matches_moebius() {
        let e2 = Configuration::generate_en(2).unwrap();
        assert_eq!(homology_rank(&e2, 1).unwrap(), 3);
        assert_eq!(crate::lattice::moebius_top_abs(&e2).unwrap(), 3);
    }

    #[test]
    fn boundary_of_simplex_has_rank_one_at_the_top() {
        for n in 2..=4usize {
            let h = coordinate_simplex(n);
            assert_eq!(homology_rank(&h, n - 1).unwrap(), 1);
        }
    }

    #[test]
    fn deficient_span_short_circuits_to_zero() {
        let h = Configuration::from_rows(2, &[&[1, 0, 0], &[1, 1, 0], &[1, 2, 0]]).unwrap();
        assert_eq!(homology_rank(&h, 1).unwrap(), 0);
        assert!(matches!(
            DegeneracyOracle::new(&h),
            Err(Error::DeficientSpan)
        ));
    }

    #[test]
    fn relative_ranks_of_independent_points() {
        for n in 1..=4usize {
            let h = coordinate_simplex(n);
            let r = relative_ranks(&h).unwrap();
            assert_eq!(r.rank_rel, 0);
            assert_eq!(r.rank_abs, 1);
            assert_eq!(r.rank_skel, 1);
            assert!(r.exact());
        }
    }

    #[test]
    fn relative_ranks_exact_on_cubes() {
        for n in 2..=3usize {
            let en = Configuration::generate_en(n).unwrap();
            let r = relative_ranks(&en).unwrap();
            assert!(r.exact(), "{r:?}");
            assert_eq!(
                r.rank_abs,
                homology_rank(&en, n - 1).unwrap(),
                "absolute rank is the complex homology"
            );
            // the complete codimension-one skeleton of a simplex
            assert_eq!(
                r.rank_skel as u128,
                crate::projective::binomial(en.len() as u64 - 1, n as u64)
            );
        }
    }

    #[test]
    fn cpi_empty_for_independent_points_and_matches_relative_rank() {
        let h = coordinate_simplex(3);
        let order = Order::identity(h.len());
        assert!(enumerate_cpi(&h, &order).unwrap().is_empty());

        let e2 = Configuration::generate_en(2).unwrap();
        let order = Order::identity(4);
        let cpi = enumerate_cpi(&e2, &order).unwrap();
        let rel = relative_ranks(&e2).unwrap();
        assert_eq!(cpi.len(), rel.rank_rel);
    }

    #[test]
    fn cpi_cardinality_is_order_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        // 4 points in RP^2 with exactly 3 collinear
        let h = Configuration::from_rows(2, &[&[1, 0, 0], &[1, 1, 0], &[1, 2, 0], &[0, 0, 1]])
            .unwrap();
        let rel = relative_ranks(&h).unwrap();
        let base = enumerate_cpi(&h, &Order::identity(4)).unwrap().len();
        assert_eq!(base, rel.rank_rel);
        for _ in 0..20 {
            let order = Order::random(4, &mut rng);
            assert_eq!(enumerate_cpi(&h, &order).unwrap().len(), base);
        }
    }

    #[test]
    fn t_hat_drops_the_dependent_entry_injectively() {
        let e3 = Configuration::generate_en(3).unwrap();
        let order = Order::identity(8);
        let cpi = enumerate_cpi(&e3, &order).unwrap();
        assert!(!cpi.is_empty());
        let mut images: Vec<Vec<usize>> = Vec::new();
        for tuple in &cpi {
            let img = t_hat(&e3, &order, &tuple.positions).unwrap();
            assert_eq!(img.len(), 3);
            assert!(!images.contains(&img), "deletion map must be injective");
            images.push(img);
        }
        // an independent tuple is rejected
        assert!(t_hat(&e3, &order, &[0, 1, 2, 4]).is_err());
    }

    #[test]
    fn nonzero_cpi_images_are_independent() {
        let e3 = Configuration::generate_en(3).unwrap();
        let order = Order::identity(8);
        for tuple in cpi_nonzero(&e3, &order).unwrap() {
            let img = t_hat(&e3, &order, &tuple.positions).unwrap();
            let indices: Vec<usize> = img.iter().map(|&p| order.point_at(p)).collect();
            assert_eq!(e3.rank_of(&indices), 3);
        }
    }

    #[test]
    fn dpi_counts_degenerate_extensions() {
        let simplex = coordinate_simplex(3);
        assert_eq!(enumerate_dpi(&simplex, 0).unwrap(), 0);

        let e2 = Configuration::generate_en(2).unwrap();
        // every plane of E_2 holds exactly two of the points, so adding any
        // point to a disjoint pair always reaches rank 3
        assert_eq!(enumerate_dpi(&e2, 0).unwrap(), 0);

        let line = Configuration::from_rows(2, &[&[1, 0, 0], &[1, 1, 0], &[1, 2, 0], &[0, 0, 1]])
            .unwrap();
        // w on the 3-point line: the other two line points form a degenerate
        // pair with w
        assert_eq!(enumerate_dpi(&line, 0).unwrap(), 1);
    }

    #[test]
    fn triplet_dump_has_header_and_entries() {
        let e2 = Configuration::generate_en(2).unwrap();
        let mut buf = Vec::new();
        write_boundary_triplets(&e2, 1, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "boundary 1 4 6");
        // each pair column has exactly two ones
        assert_eq!(lines.count(), 12);
    }

    #[test]
    fn random_configurations_satisfy_exactness() {
        use rand::Rng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut tested = 0;
        while tested < 25 {
            let dim = rng.gen_range(1..=3usize);
            let count = rng.gen_range(dim + 1..=7usize);
            let mut points = Vec::new();
            while points.len() < count {
                let entries: Vec<i64> = (0..=dim).map(|_| rng.gen_range(-2i64..=2)).collect();
                if entries.iter().all(|&x| x == 0) {
                    continue;
                }
                let p = ProjectivePoint::from_i64(&entries).unwrap();
                if !points.contains(&p) {
                    points.push(p);
                }
            }
            let h = Configuration::new(dim, points).unwrap();
            if !h.has_full_span() {
                continue;
            }
            let r = relative_ranks(&h).unwrap();
            assert!(r.exact(), "{}: {r:?}", h.to_text());
            let order = Order::identity(h.len());
            assert_eq!(enumerate_cpi(&h, &order).unwrap().len(), r.rank_rel);
            tested += 1;
        }
    }
}
