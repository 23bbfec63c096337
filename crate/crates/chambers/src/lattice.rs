//! The intersection poset of subspaces spanned by subsets of a
//! configuration, its Moebius function, and chamber counts of the induced
//! central hyperplane arrangement.
//!
//! Chambers are counted two independent ways: the Moebius-sum formula over
//! the lattice, and the deletion-restriction recursion, which never looks at
//! the lattice at all.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::linalg::{Int, Subspace};
use crate::projective::{project_config, Configuration};
use crate::{par, Error, Limits, Result};

/// A flat: the span of a subset of the configuration, identified by its
/// canonical reduced echelon basis. `members` indexes every configuration
/// point inside the span, so flat containment is member-set containment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flat {
    pub dim: usize,
    pub basis: Vec<Vec<Int>>,
    pub members: Vec<usize>,
}

impl Flat {
    fn member_mask(&self) -> u64 {
        self.members.iter().fold(0u64, |m, &i| m | 1 << i)
    }
}

/// The graded intersection lattice of a configuration, with Moebius values
/// computed from the bottom.
#[derive(Debug, Clone)]
pub struct IntersectionLattice {
    pub flats: Vec<Flat>,
    pub moebius: Vec<i128>,
    pub bottom: usize,
    pub top: usize,
}

impl IntersectionLattice {
    /// Sum of |mu(0, t)| over all flats: the chamber count.
    pub fn chamber_count(&self) -> u64 {
        self.moebius.iter().map(|m| m.unsigned_abs() as u64).sum()
    }

    pub fn moebius_top_abs(&self) -> u64 {
        self.moebius[self.top].unsigned_abs() as u64
    }

    /// Flats of the given dimension, in construction order.
    pub fn flats_of_dim(&self, dim: usize) -> impl Iterator<Item = &Flat> {
        self.flats.iter().filter(move |f| f.dim == dim)
    }
}

/// Builds the lattice by closure: start from the zero flat and repeatedly
/// join frontier flats with configuration points, deduplicating by the
/// canonical basis.
pub fn build_lattice(h: &Configuration) -> Result<IntersectionLattice> {
    build_lattice_limited(h, &Limits::default())
}

pub fn build_lattice_limited(h: &Configuration, limits: &Limits) -> Result<IntersectionLattice> {
    if h.is_empty() {
        return Err(Error::Precondition("lattice of an empty configuration".into()));
    }
    if h.len() > 64 {
        return Err(Error::Budget {
            what: "configuration points for lattice membership masks",
            limit: 64,
        });
    }
    let ambient = h.ambient_dim() + 1;
    let bottom = Flat {
        dim: 0,
        basis: Vec::new(),
        members: Vec::new(),
    };
    let mut flats: Vec<Flat> = vec![bottom];
    let mut seen: HashMap<Vec<Vec<Int>>, usize> = HashMap::new();
    seen.insert(Vec::new(), 0);
    let mut frontier: Vec<usize> = vec![0];

    while !frontier.is_empty() {
        // Joins of one frontier batch are independent; dedupe afterwards in
        // a fixed order so the construction is deterministic.
        let batch: Vec<Option<(Vec<Vec<Int>>, Flat)>> = {
            let flats_ref = &flats;
            let pairs: Vec<(usize, usize)> = frontier
                .iter()
                .flat_map(|&fi| (0..h.len()).map(move |p| (fi, p)))
                .collect();
            par::map_collect(&pairs, |&(fi, p)| {
                let flat = &flats_ref[fi];
                if flat.members.binary_search(&p).is_ok() {
                    return None;
                }
                let mut span = Subspace::zero(ambient);
                for row in &flat.basis {
                    span.insert(row);
                }
                if !span.insert_point(h.point(p).rep()) {
                    // p is in the span without being a member: impossible,
                    // members list everything inside the span.
                    unreachable!("non-member point inside flat span");
                }
                let basis = span.canonical_basis();
                let members: Vec<usize> = (0..h.len())
                    .filter(|&i| span.contains_point(h.point(i).rep()))
                    .collect();
                Some((
                    basis.clone(),
                    Flat {
                        dim: span.dim(),
                        basis,
                        members,
                    },
                ))
            })
        };
        let mut next = Vec::new();
        for item in batch.into_iter().flatten() {
            let (key, flat) = item;
            if seen.contains_key(&key) {
                continue;
            }
            if flats.len() >= limits.flat_cap {
                return Err(Error::Budget {
                    what: "flats in intersection lattice",
                    limit: limits.flat_cap as u64,
                });
            }
            seen.insert(key, flats.len());
            next.push(flats.len());
            flats.push(flat);
        }
        frontier = next;
    }

    flats.sort_by(|a, b| (a.dim, &a.members).cmp(&(b.dim, &b.members)));
    let top = flats
        .iter()
        .enumerate()
        .max_by_key(|(_, f)| f.dim)
        .map(|(i, _)| i)
        .expect("nonempty lattice");

    let moebius = moebius_from_bottom(&flats);
    Ok(IntersectionLattice {
        flats,
        moebius,
        bottom: 0,
        top,
    })
}

/// mu(0, t) by the defining recursion: mu(0,0) = 1 and the values below any
/// flat sum to zero. Containment of flats is containment of member sets.
fn moebius_from_bottom(flats: &[Flat]) -> Vec<i128> {
    let masks: Vec<u64> = flats.iter().map(Flat::member_mask).collect();
    let mut moebius = vec![0i128; flats.len()];
    for t in 0..flats.len() {
        if flats[t].dim == 0 {
            moebius[t] = 1;
            continue;
        }
        let mut acc: i128 = 0;
        for s in 0..flats.len() {
            if s != t && flats[s].dim < flats[t].dim && masks[s] & masks[t] == masks[s] {
                acc += moebius[s];
            }
        }
        moebius[t] = -acc;
    }
    moebius
}

/// Chamber count by Zaslavsky's Moebius sum.
pub fn chambers_zaslavsky(h: &Configuration) -> Result<u64> {
    Ok(build_lattice(h)?.chamber_count())
}

/// |mu(0, 1)| of the lattice; requires a full span.
pub fn moebius_top_abs(h: &Configuration) -> Result<u64> {
    if !h.has_full_span() {
        return Err(Error::DeficientSpan);
    }
    Ok(build_lattice(h)?.moebius_top_abs())
}

/// Chamber count by the deletion-restriction recursion
/// `r(A) = r(A minus h) + r(A restricted to h)`, deleting the last point.
/// An empty arrangement has one chamber. Independent of the lattice code.
pub fn chambers_deletion_restriction(h: &Configuration) -> Result<u64> {
    let mut memo: HashMap<(usize, Vec<Vec<Int>>), u64> = HashMap::new();
    dr_count(h, &mut memo)
}

fn dr_count(
    h: &Configuration,
    memo: &mut HashMap<(usize, Vec<Vec<Int>>), u64>,
) -> Result<u64> {
    if h.is_empty() {
        return Ok(1);
    }
    if h.ambient_dim() == 0 {
        // The only hyperplane of R^1 is the origin: two chambers.
        return Ok(2);
    }
    let key = {
        let mut reps: Vec<Vec<Int>> = h
            .points()
            .iter()
            .map(|p| p.rep().entries().to_vec())
            .collect();
        reps.sort();
        (h.ambient_dim(), reps)
    };
    if let Some(&v) = memo.get(&key) {
        return Ok(v);
    }
    let last = h.point(h.len() - 1).clone();
    let deleted = h.without_last();
    let mut total = dr_count(&deleted, memo)?;
    if deleted.is_empty() {
        // restriction of a single hyperplane: an empty arrangement one
        // dimension down
        total += 1;
    } else {
        let restricted = project_config(&deleted, &last)?;
        total += dr_count(&restricted.image, memo)?;
    }
    memo.insert(key, total);
    Ok(total)
}

/// Serializable form of a lattice, cached by configuration content hash.
#[derive(Debug, Serialize, Deserialize)]
pub struct LatticeCacheFile {
    pub schema_version: u32,
    pub code_version: String,
    pub configuration_hash: String,
    pub flats: Vec<FlatRecord>,
    pub chamber_count: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FlatRecord {
    pub dim: usize,
    pub basis: Vec<Vec<String>>,
    pub members: Vec<usize>,
    pub moebius: i128,
}

pub const LATTICE_SCHEMA_VERSION: u32 = 1;

impl LatticeCacheFile {
    pub fn from_lattice(h: &Configuration, lattice: &IntersectionLattice) -> Self {
        LatticeCacheFile {
            schema_version: LATTICE_SCHEMA_VERSION,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            configuration_hash: h.content_hash(),
            flats: lattice
                .flats
                .iter()
                .zip(&lattice.moebius)
                .map(|(f, &m)| FlatRecord {
                    dim: f.dim,
                    basis: f
                        .basis
                        .iter()
                        .map(|row| row.iter().map(|x| x.to_string()).collect())
                        .collect(),
                    members: f.members.clone(),
                    moebius: m,
                })
                .collect(),
            chamber_count: lattice.chamber_count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::Order;
    use rand::{Rng, SeedableRng};

    fn config(dim: usize, rows: &[&[i64]]) -> Configuration {
        Configuration::from_rows(dim, rows).unwrap()
    }

    #[test]
    fn two_lines_in_the_plane() {
        let h = config(1, &[&[1, 0], &[0, 1]]);
        let l = build_lattice(&h).unwrap();
        assert_eq!(l.flats.len(), 4);
        let mus: Vec<i128> = l.moebius.clone();
        assert_eq!(mus.iter().filter(|&&m| m == 1).count(), 2);
        assert_eq!(mus.iter().filter(|&&m| m == -1).count(), 2);
        assert_eq!(l.chamber_count(), 4);
        assert_eq!(chambers_deletion_restriction(&h).unwrap(), 4);
    }

    #[test]
    fn single_point_lattice() {
        let h = config(1, &[&[1, 0]]);
        let l = build_lattice(&h).unwrap();
        assert_eq!(l.flats.len(), 2);
        assert_eq!(l.moebius, vec![1, -1]);
        assert_eq!(chambers_deletion_restriction(&h).unwrap(), 2);
    }

    #[test]
    fn e2_lattice_structure() {
        let e2 = Configuration::generate_en(2).unwrap();
        let l = build_lattice(&e2).unwrap();
        assert_eq!(l.flats.len(), 12, "1 bottom + 4 lines + 6 planes + top");
        for f in l.flats_of_dim(2) {
            assert_eq!(f.members.len(), 2, "every plane holds exactly 2 points");
        }
        // mu: bottom 1, lines -1, planes +1, top -3
        for (f, &m) in l.flats.iter().zip(&l.moebius) {
            let expected = match f.dim {
                0 => 1,
                1 => -1,
                2 => 1,
                3 => -3,
                _ => unreachable!(),
            };
            assert_eq!(m, expected);
        }
        assert_eq!(l.chamber_count(), 14);
        assert_eq!(l.moebius_top_abs(), 3);
        assert_eq!(chambers_deletion_restriction(&e2).unwrap(), 14);
    }

    #[test]
    fn three_collinear_points_share_a_plane() {
        let h = config(2, &[&[1, 0, 0], &[1, 1, 0], &[1, 2, 0]]);
        let l = build_lattice(&h).unwrap();
        let planes: Vec<&Flat> = l.flats_of_dim(2).collect();
        assert_eq!(planes.len(), 1);
        assert_eq!(planes[0].members, vec![0, 1, 2]);
    }

    #[test]
    fn coordinate_arrangement_counts_orthants() {
        for n in 1..=4usize {
            let rows: Vec<Vec<i64>> = (0..=n - 1)
                .chain(std::iter::once(n))
                .map(|i| {
                    (0..=n)
                        .map(|j| if i == j { 1 } else { 0 })
                        .collect::<Vec<i64>>()
                })
                .collect();
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let h = config(n, &refs);
            assert_eq!(chambers_zaslavsky(&h).unwrap(), 1 << (n + 1));
            assert_eq!(chambers_deletion_restriction(&h).unwrap(), 1 << (n + 1));
            assert_eq!(moebius_top_abs(&h).unwrap(), 1);
        }
    }

    #[test]
    fn moebius_alternates_in_sign() {
        let e3 = Configuration::generate_en(3).unwrap();
        let l = build_lattice(&e3).unwrap();
        for (f, &m) in l.flats.iter().zip(&l.moebius) {
            assert!(m != 0);
            assert_eq!(m.signum(), if f.dim % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn moebius_sums_vanish_below_every_flat() {
        let e2 = Configuration::generate_en(2).unwrap();
        let l = build_lattice(&e2).unwrap();
        let masks: Vec<u64> = l.flats.iter().map(Flat::member_mask).collect();
        for t in 0..l.flats.len() {
            if l.flats[t].dim == 0 {
                continue;
            }
            let sum: i128 = (0..l.flats.len())
                .filter(|&s| {
                    masks[s] & masks[t] == masks[s]
                        && (l.flats[s].dim < l.flats[t].dim || s == t)
                })
                .map(|s| l.moebius[s])
                .sum();
            assert_eq!(sum, 0);
        }
    }

    #[test]
    fn chamber_count_invariant_under_permutation_and_scaling() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let h = config(2, &[&[1, 0, 0], &[1, 1, 0], &[1, 2, 0], &[0, 0, 1], &[1, 1, 1]]);
        let base = chambers_zaslavsky(&h).unwrap();
        for _ in 0..5 {
            let order = Order::random(h.len(), &mut rng);
            let permuted = h.permuted(&order).unwrap();
            assert_eq!(chambers_zaslavsky(&permuted).unwrap(), base);
            assert_eq!(chambers_deletion_restriction(&permuted).unwrap(), base);
        }
        // scaling any representative is a no-op after canonicalization
        let scaled = config(2, &[&[-3, 0, 0], &[2, 2, 0], &[1, 2, 0], &[0, 0, -7], &[4, 4, 4]]);
        assert_eq!(chambers_zaslavsky(&scaled).unwrap(), base);
    }

    #[test]
    fn oracles_agree_on_random_configurations() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(97);
        for trial in 0..40 {
            let dim = rng.gen_range(1..=3usize);
            let count = rng.gen_range(1..=7usize);
            let mut points = Vec::new();
            while points.len() < count {
                let entries: Vec<i64> =
                    (0..=dim).map(|_| rng.gen_range(-2i64..=2)).collect();
                if entries.iter().all(|&x| x == 0) {
                    continue;
                }
                let p = crate::projective::ProjectivePoint::from_i64(&entries).unwrap();
                if !points.contains(&p) {
                    points.push(p);
                }
            }
            let h = Configuration::new(dim, points).unwrap();
            assert_eq!(
                chambers_zaslavsky(&h).unwrap(),
                chambers_deletion_restriction(&h).unwrap(),
                "trial {trial}: {}",
                h.to_text()
            );
        }
    }
}
