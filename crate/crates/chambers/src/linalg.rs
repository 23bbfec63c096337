//! Exact linear algebra over the rationals and over GF(2).
//!
//! Rational-span questions (rank, membership, projection) are all answered
//! through [`Subspace`], a fraction-free integer echelon form: incoming rows
//! are scaled to integers, reduced with two-multiplier elimination, and kept
//! gcd-reduced with a positive pivot. Intermediate coefficients therefore
//! stay integral and small instead of accumulating rational denominators.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Integer vector of fixed length (coordinates in the ambient space).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(Vec<Int>);

impl IntVector {
    pub fn new(entries: Vec<Int>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("empty vector".into()));
        }
        Ok(IntVector(entries))
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&x| Int::from(x)).collect())
    }

    pub fn entries(&self) -> &[Int] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVector) -> Result<Int> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "dot of lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b)
            .sum::<Int>())
    }

    pub fn scaled(&self, c: &Int) -> IntVector {
        IntVector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn to_rat(&self) -> RatVector {
        RatVector(self.0.iter().map(|x| Rat::from(x.clone())).collect())
    }
}

impl From<Vec<Int>> for IntVector {
    fn from(v: Vec<Int>) -> Self {
        IntVector(v)
    }
}

/// Rational vector; `BigRational` keeps entries reduced with a positive
/// denominator, so equality is syntactic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatVector(Vec<Rat>);

impl RatVector {
    pub fn new(entries: Vec<Rat>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("empty vector".into()));
        }
        Ok(RatVector(entries))
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        RatVector(entries.iter().map(|&x| Rat::from(Int::from(x))).collect())
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Clears denominators and divides by the content, yielding a primitive
    /// integer vector spanning the same line.
    pub fn primitive_integer(&self) -> Result<IntVector> {
        let lcm = self
            .0
            .iter()
            .fold(Int::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<Int> = self.0.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
        let g = ints
            .iter()
            .fold(Int::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            return Err(Error::ZeroVector);
        }
        Ok(IntVector(ints.into_iter().map(|x| x / &g).collect()))
    }
}

impl From<Vec<Rat>> for RatVector {
    fn from(v: Vec<Rat>) -> Self {
        RatVector(v)
    }
}

fn normalize_row(row: &mut [Int]) {
    let g = row.iter().fold(Int::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in row.iter_mut() {
        *x = &*x / &g;
    }
}

/// A linear subspace of `Q^ambient`, stored as a fraction-free integer
/// echelon basis: strictly increasing pivot columns, each row gcd-reduced
/// with a positive pivot entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vec<Int>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the echelon; the remainder is zero exactly when
    /// the input lies in the subspace.
    fn reduce(&self, row: &[Int]) -> Vec<Int> {
        let mut work = row.to_vec();
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            if work[p].is_zero() {
                continue;
            }
            let a = r[p].clone();
            let b = work[p].clone();
            for (w, rv) in work.iter_mut().zip(r) {
                *w = &*w * &a - rv * &b;
            }
            normalize_row(&mut work);
        }
        work
    }

    /// Inserts a vector; returns true when the dimension grew.
    pub fn insert(&mut self, row: &[Int]) -> bool {
        assert_eq!(row.len(), self.ambient, "subspace insert length");
        let mut reduced = self.reduce(row);
        let Some(pivot) = reduced.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        normalize_row(&mut reduced);
        if reduced[pivot].is_negative() {
            for x in reduced.iter_mut() {
                *x = -&*x;
            }
        }
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.rows.insert(at, reduced);
        self.pivots.insert(at, pivot);
        true
    }

    pub fn insert_point(&mut self, v: &IntVector) -> bool {
        self.insert(v.entries())
    }

    pub fn contains(&self, row: &[Int]) -> bool {
        self.reduce(row).iter().all(Zero::is_zero)
    }

    pub fn contains_point(&self, v: &IntVector) -> bool {
        self.contains(v.entries())
    }

    pub fn from_points<'a>(ambient: usize, points: impl IntoIterator<Item = &'a IntVector>) -> Self {
        let mut s = Subspace::zero(ambient);
        for p in points {
            s.insert_point(p);
        }
        s
    }

    /// Canonical reduced echelon basis: pivot entries cleared above, every
    /// row primitive with positive pivot. Two subspaces are equal exactly
    /// when these bases are equal.
    pub fn canonical_basis(&self) -> Vec<Vec<Int>> {
        let mut rows = self.rows.clone();
        for i in (0..rows.len()).rev() {
            let p = self.pivots[i];
            let (above, below) = rows.split_at_mut(i);
            let pivot_row = &below[0];
            let a = pivot_row[p].clone();
            for r in above.iter_mut() {
                if r[p].is_zero() {
                    continue;
                }
                let b = r[p].clone();
                for (x, pv) in r.iter_mut().zip(pivot_row) {
                    *x = &*x * &a - pv * &b;
                }
                normalize_row(r);
            }
        }
        for (r, &p) in rows.iter_mut().zip(&self.pivots) {
            if r[p].is_negative() {
                for x in r.iter_mut() {
                    *x = -&*x;
                }
            }
        }
        rows
    }
}

/// Exact rank of a set of rational rows; the empty list has rank 0.
pub fn rank_rational(rows: &[RatVector]) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Ok(0);
    };
    let ambient = first.len();
    let mut s = Subspace::zero(ambient);
    for r in rows {
        if r.len() != ambient {
            return Err(Error::DimensionMismatch(format!(
                "row lengths {} and {}",
                ambient,
                r.len()
            )));
        }
        let ints: Vec<Int> = clear_denominators(r);
        s.insert(&ints);
    }
    Ok(s.dim())
}

fn clear_denominators(r: &RatVector) -> Vec<Int> {
    let lcm = r
        .entries()
        .iter()
        .fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    r.entries()
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// Membership of `v` in the span of `basis`: rank does not grow.
pub fn in_span(v: &RatVector, basis: &[RatVector]) -> Result<bool> {
    let ambient = v.len();
    let mut s = Subspace::zero(ambient);
    for b in basis {
        if b.len() != ambient {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} vs basis row length {}",
                ambient,
                b.len()
            )));
        }
        s.insert(&clear_denominators(b));
    }
    Ok(s.contains(&clear_denominators(v)))
}

/// Orthogonal projection of `v` off the line spanned by `w`:
/// `v - ((v.w)/(w.w)) w`. The result is orthogonal to `w` exactly.
pub fn project_off(v: &IntVector, w: &IntVector) -> Result<RatVector> {
    if w.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let vw = v.dot(w)?;
    let ww = w.dot(w)?;
    let coeff = Rat::new(vw, ww);
    Ok(RatVector(
        v.entries()
            .iter()
            .zip(w.entries())
            .map(|(vi, wi)| Rat::from(vi.clone()) - &coeff * Rat::from(wi.clone()))
            .collect(),
    ))
}

/// Scaled integer form of the projection: `(w.w) v - (v.w) w`, which spans
/// the same line as `project_off(v, w)` but stays in `Z^d`.
pub fn project_off_scaled(v: &IntVector, w: &IntVector) -> Result<IntVector> {
    if w.is_zero() {
        return Err(Error::ZeroDirection);
    }
    let vw = v.dot(w)?;
    let ww = w.dot(w)?;
    Ok(IntVector(
        v.entries()
            .iter()
            .zip(w.entries())
            .map(|(vi, wi)| vi * &ww - wi * &vw)
            .collect(),
    ))
}

/// Dense bit matrix over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    nrows: usize,
    ncols: usize,
    words_per_row: usize,
    rows: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        let words_per_row = ncols.div_ceil(64).max(1);
        Gf2Matrix {
            nrows,
            ncols,
            words_per_row,
            rows: vec![0; nrows * words_per_row],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(r < self.nrows && c < self.ncols);
        let w = r * self.words_per_row + c / 64;
        let mask = 1u64 << (c % 64);
        if bit {
            self.rows[w] |= mask;
        } else {
            self.rows[w] &= !mask;
        }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        let w = r * self.words_per_row + c / 64;
        self.rows[w] >> (c % 64) & 1 == 1
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        let w = r * self.words_per_row + c / 64;
        self.rows[w] ^= 1u64 << (c % 64);
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zero(self.ncols, self.nrows);
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Rank over GF(2) by bitwise row elimination.
    pub fn rank(&self) -> usize {
        let w = self.words_per_row;
        let mut pivot_rows: Vec<(usize, Vec<u64>)> = Vec::new();
        for chunk in self.rows.chunks(w) {
            let mut row = chunk.to_vec();
            for (p, prow) in &pivot_rows {
                if row[p / 64] >> (p % 64) & 1 == 1 {
                    for (a, b) in row.iter_mut().zip(prow) {
                        *a ^= b;
                    }
                }
            }
            if let Some(p) = first_set_bit(&row) {
                pivot_rows.push((p, row));
            }
        }
        pivot_rows.len()
    }
}

fn first_set_bit(words: &[u64]) -> Option<usize> {
    for (i, &w) in words.iter().enumerate() {
        if w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

/// Rank convenience wrapper matching the other free functions.
pub fn gf2_rank(m: &Gf2Matrix) -> usize {
    m.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rv(rows: &[&[i64]]) -> Vec<RatVector> {
        rows.iter().map(|r| RatVector::from_i64(r)).collect()
    }

    #[test]
    fn rank_identity_and_proportional_rows() {
        assert_eq!(
            rank_rational(&rv(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap(),
            3
        );
        assert_eq!(rank_rational(&rv(&[&[1, 1], &[2, 2]])).unwrap(), 1);
        assert_eq!(rank_rational(&[]).unwrap(), 0);
    }

    #[test]
    fn rank_of_e2_rows_is_three() {
        let rows = rv(&[&[1, 1, 1], &[1, 1, -1], &[1, -1, 1], &[1, -1, -1]]);
        assert_eq!(rank_rational(&rows).unwrap(), 3);
    }

    #[test]
    fn rank_rejects_ragged_rows() {
        let rows = vec![RatVector::from_i64(&[1, 0]), RatVector::from_i64(&[1])];
        assert!(matches!(
            rank_rational(&rows),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn in_span_examples() {
        let zero = RatVector::from_i64(&[0, 0]);
        let e1 = RatVector::from_i64(&[1, 0]);
        assert!(in_span(&zero, &[e1.clone()]).unwrap());
        assert!(!in_span(&RatVector::from_i64(&[1, 1]), &[e1]).unwrap());
        // (1,-1,-1) = -1*(1,1,1) + 2*(1,0,0)
        let v = RatVector::from_i64(&[1, -1, -1]);
        let basis = rv(&[&[1, 1, 1], &[1, 0, 0]]);
        assert!(in_span(&v, &basis).unwrap());
    }

    /// Independent oracle: decide membership by solving the linear system
    /// with dense rational Gaussian elimination.
    fn in_span_by_solving(v: &RatVector, basis: &[RatVector]) -> bool {
        let m = v.len();
        let k = basis.len();
        if k == 0 {
            return v.is_zero();
        }
        // Augmented system: columns are the basis vectors, rhs is v.
        let mut a: Vec<Vec<Rat>> = (0..m)
            .map(|i| {
                let mut row: Vec<Rat> = basis.iter().map(|b| b.entries()[i].clone()).collect();
                row.push(v.entries()[i].clone());
                row
            })
            .collect();
        let mut row = 0;
        for col in 0..k {
            let Some(p) = (row..m).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(row, p);
            let inv = a[row][col].clone();
            for r in 0..m {
                if r == row || a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] / &inv;
                for c in col..=k {
                    let sub = &factor * &a[row][c];
                    a[r][c] = &a[r][c] - &sub;
                }
            }
            row += 1;
        }
        // Consistent iff no row reduces to (0 .. 0 | nonzero).
        a.iter()
            .all(|r| !r[..k].iter().all(Zero::is_zero) || r[k].is_zero())
    }

    #[test]
    fn in_span_matches_explicit_solver_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let dim = rng.gen_range(1..=6);
            let k = rng.gen_range(0..=dim + 1);
            let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
                RatVector::from_i64(
                    &(0..dim)
                        .map(|_| rng.gen_range(-3i64..=3))
                        .collect::<Vec<_>>(),
                )
            };
            let basis: Vec<RatVector> = (0..k).map(|_| sample(&mut rng)).collect();
            let v = sample(&mut rng);
            assert_eq!(
                in_span(&v, &basis).unwrap(),
                in_span_by_solving(&v, &basis),
                "v={v:?} basis={basis:?}"
            );
        }
    }

    #[test]
    fn project_off_examples() {
        let v = IntVector::from_i64(&[1, 1]);
        let w = IntVector::from_i64(&[1, 0]);
        assert_eq!(project_off(&v, &w).unwrap(), RatVector::from_i64(&[0, 1]));

        let w2 = IntVector::from_i64(&[2, 3]);
        assert!(project_off(&w2, &w2).unwrap().is_zero());

        let v3 = IntVector::from_i64(&[1, 1, 1]);
        let w3 = IntVector::from_i64(&[1, 1, -1]);
        let expected = RatVector::new(vec![
            Rat::new(Int::from(2), Int::from(3)),
            Rat::new(Int::from(2), Int::from(3)),
            Rat::new(Int::from(4), Int::from(3)),
        ])
        .unwrap();
        assert_eq!(project_off(&v3, &w3).unwrap(), expected);

        assert!(matches!(
            project_off(&v, &IntVector::from_i64(&[0, 0])),
            Err(Error::ZeroDirection)
        ));
    }

    #[test]
    fn gf2_rank_examples() {
        let z = Gf2Matrix::zero(3, 4);
        assert_eq!(z.rank(), 0);

        let mut id = Gf2Matrix::zero(4, 4);
        for i in 0..4 {
            id.set(i, i, true);
        }
        assert_eq!(id.rank(), 4);

        // rows 1100, 0110, 1010: third is the XOR of the first two
        let mut m = Gf2Matrix::zero(3, 4);
        for (r, bits) in [[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 0]].iter().enumerate() {
            for (c, &b) in bits.iter().enumerate() {
                if b == 1 {
                    m.set(r, c, true);
                }
            }
        }
        assert_eq!(m.rank(), 2);
    }

    proptest! {
        #[test]
        fn rank_invariant_under_permutation_and_scaling(
            rows in proptest::collection::vec(
                proptest::collection::vec(-4i64..=4, 4), 0..6),
            scale_num in 1i64..=5,
            swap in (0usize..6, 0usize..6),
        ) {
            let base: Vec<RatVector> = rows.iter().map(|r| RatVector::from_i64(r)).collect();
            let r0 = rank_rational(&base).unwrap();

            let mut permuted = base.clone();
            if !permuted.is_empty() {
                let (i, j) = (swap.0 % permuted.len(), swap.1 % permuted.len());
                permuted.swap(i, j);
            }
            prop_assert_eq!(rank_rational(&permuted).unwrap(), r0);

            let mut scaled = base;
            if let Some(first) = scaled.first_mut() {
                let c = Rat::new(Int::from(scale_num), Int::from(3));
                *first = RatVector::new(
                    first.entries().iter().map(|x| x * &c).collect()
                ).unwrap();
            }
            prop_assert_eq!(rank_rational(&scaled).unwrap(), r0);
        }

        #[test]
        fn projection_is_orthogonal_exactly(
            (v, w) in (1usize..6).prop_flat_map(|dim| (
                proptest::collection::vec(-20i64..=20, dim),
                proptest::collection::vec(-20i64..=20, dim),
            )),
        ) {
            prop_assume!(w.iter().any(|&x| x != 0));
            let vi = IntVector::from_i64(&v);
            let wi = IntVector::from_i64(&w);
            let p = project_off(&vi, &wi).unwrap();
            let dot: Rat = p.entries().iter()
                .zip(wi.entries())
                .map(|(a, b)| a * Rat::from(b.clone()))
                .sum();
            prop_assert!(dot.is_zero());

            let scaled = project_off_scaled(&vi, &wi).unwrap();
            prop_assert!(scaled.dot(&wi).unwrap().is_zero());
        }

        #[test]
        fn gf2_rank_bounds_and_transpose(
            bits in proptest::collection::vec(proptest::bool::ANY, 1..=72),
            ncols in 1usize..=9,
        ) {
            let nrows = bits.len().div_ceil(ncols);
            let mut m = Gf2Matrix::zero(nrows, ncols);
            for (i, &b) in bits.iter().enumerate() {
                if b {
                    m.set(i / ncols, i % ncols, true);
                }
            }
            let r = m.rank();
            prop_assert!(r <= nrows.min(ncols));
            prop_assert_eq!(r, m.transpose().rank());
        }
    }
}
