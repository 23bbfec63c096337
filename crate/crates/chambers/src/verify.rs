//! The cross-validation suite: every module invariant exercised at least
//! once, on the fixture corpus plus seeded random instances, with one
//! machine-readable check result per invariant.
//!
//! Identical options produce a byte-identical report; nothing here iterates
//! a hash map into the output.

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{rank_rational, Gf2Matrix, Int, IntVector, Rat, RatVector};
use crate::projective::{
    binomial, project_config, projection_chain, Configuration, Order, ProjectivePoint,
};
use crate::report::{CheckResult, VerifyReport, REPORT_SCHEMA_VERSION};
use crate::{ensembles, eta, fixtures, homology, lattice, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    Quick,
    Full,
}

impl VerifyLevel {
    fn name(self) -> &'static str {
        match self {
            VerifyLevel::Quick => "quick",
            VerifyLevel::Full => "full",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub level: VerifyLevel,
    pub seed: u64,
    pub deterministic: bool,
}

struct Suite {
    checks: Vec<CheckResult>,
    level: VerifyLevel,
}

impl Suite {
    fn add(&mut self, name: &str, instance: &str, values: Vec<(String, String)>, pass: bool) {
        self.checks.push(CheckResult {
            name: name.to_string(),
            instance: instance.to_string(),
            values,
            pass,
        });
    }

    fn scale(&self, quick: usize, full: usize) -> usize {
        match self.level {
            VerifyLevel::Quick => quick,
            VerifyLevel::Full => full,
        }
    }
}

fn kv(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

/// Dense rational Gaussian elimination used as the independent membership
/// oracle; kept free of the echelon code it checks.
fn in_span_by_solving(v: &RatVector, basis: &[RatVector]) -> bool {
    let m = v.len();
    let k = basis.len();
    if k == 0 {
        return v.is_zero();
    }
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
    a.iter()
        .all(|r| !r[..k].iter().all(Zero::is_zero) || r[k].is_zero())
}

fn random_rat_vector(rng: &mut ChaCha8Rng, dim: usize) -> RatVector {
    RatVector::from_i64(&(0..dim).map(|_| rng.gen_range(-3i64..=3)).collect::<Vec<_>>())
}

fn check_linalg(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    let trials = suite.scale(40, 150);
    let mut pass = true;
    for _ in 0..trials {
        let dim = rng.gen_range(1..=5);
        let count = rng.gen_range(0..=6);
        let rows: Vec<RatVector> = (0..count).map(|_| random_rat_vector(rng, dim)).collect();
        let r0 = rank_rational(&rows)?;
        let mut permuted = rows.clone();
        if permuted.len() >= 2 {
            let i = rng.gen_range(0..permuted.len());
            let j = rng.gen_range(0..permuted.len());
            permuted.swap(i, j);
        }
        let mut scaled = rows.clone();
        if let Some(first) = scaled.first_mut() {
            let c = Rat::new(Int::from(rng.gen_range(1i64..=5)), Int::from(2));
            *first = RatVector::new(first.entries().iter().map(|x| x * &c).collect())?;
        }
        pass &= rank_rational(&permuted)? == r0 && rank_rational(&scaled)? == r0;
    }
    suite.add(
        "linalg-rank-invariance",
        &format!("{trials} random row sets"),
        vec![],
        pass,
    );

    let mut ortho = true;
    for _ in 0..trials {
        let dim = rng.gen_range(1..=5);
        let v = IntVector::from_i64(&(0..dim).map(|_| rng.gen_range(-9i64..=9)).collect::<Vec<_>>());
        let mut wv: Vec<i64> = (0..dim).map(|_| rng.gen_range(-9i64..=9)).collect();
        if wv.iter().all(|&x| x == 0) {
            wv[0] = 1;
        }
        let w = IntVector::from_i64(&wv);
        let p = crate::linalg::project_off(&v, &w)?;
        let dot: Rat = p
            .entries()
            .iter()
            .zip(w.entries())
            .map(|(a, b)| a * Rat::from(b.clone()))
            .sum();
        ortho &= dot.is_zero();
    }
    suite.add(
        "linalg-projection-orthogonal",
        &format!("{trials} random pairs"),
        vec![],
        ortho,
    );

    let mut gf2 = true;
    for _ in 0..trials {
        let rows = rng.gen_range(1..=8);
        let cols = rng.gen_range(1..=8);
        let mut m = Gf2Matrix::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if rng.gen_bool(0.5) {
                    m.set(r, c, true);
                }
            }
        }
        let rank = m.rank();
        gf2 &= rank <= rows.min(cols) && rank == m.transpose().rank();
    }
    suite.add(
        "linalg-gf2-rank-transpose",
        &format!("{trials} random bit matrices"),
        vec![],
        gf2,
    );

    let solver_trials = suite.scale(80, 300);
    let mut agree = true;
    for _ in 0..solver_trials {
        let dim = rng.gen_range(1..=6);
        let k = rng.gen_range(0..=dim + 1);
        let basis: Vec<RatVector> = (0..k).map(|_| random_rat_vector(rng, dim)).collect();
        let v = random_rat_vector(rng, dim);
        agree &= crate::linalg::in_span(&v, &basis)? == in_span_by_solving(&v, &basis);
    }
    suite.add(
        "linalg-span-vs-solver",
        &format!("{solver_trials} random systems, dim <= 6"),
        vec![],
        agree,
    );
    Ok(())
}

fn check_projective(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    let trials = suite.scale(40, 150);
    let mut canon = true;
    for _ in 0..trials {
        let dim = rng.gen_range(1..=5);
        let mut entries: Vec<i64> = (0..dim).map(|_| rng.gen_range(-20i64..=20)).collect();
        if entries.iter().all(|&x| x == 0) {
            entries[0] = 3;
        }
        let p = ProjectivePoint::from_i64(&entries)?;
        let again = ProjectivePoint::from_int(p.rep())?;
        let scale = rng.gen_range(1i64..=6) * if rng.gen_bool(0.5) { -1 } else { 1 };
        let scaled: Vec<i64> = entries.iter().map(|&x| x * scale).collect();
        canon &= again == p && ProjectivePoint::from_i64(&scaled)? == p;
    }
    suite.add(
        "projective-canonicalize",
        &format!("{trials} random vectors"),
        vec![],
        canon,
    );

    let mut cube = true;
    for n in 1..=5usize {
        let en = Configuration::generate_en(n)?;
        cube &= en.len() == 1 << n && en.span_rank() == n + 1;
    }
    suite.add("projective-cube-generator", "n = 1..5", vec![], cube);

    let proj_trials = suite.scale(15, 40);
    let mut proj = true;
    for _ in 0..proj_trials {
        let h = fixtures::random_configuration(rng, 1..=4, 8, false);
        if h.ambient_dim() == 0 {
            continue;
        }
        let u = fixtures::random_point_outside(rng, &h);
        let r = project_config(&h, &u)?;
        let mut seen: Vec<usize> = r.preimage_classes.concat();
        seen.sort_unstable();
        proj &= r.image.ambient_dim() == h.ambient_dim() - 1
            && seen == (0..h.len()).collect::<Vec<_>>()
            && r.min_index.windows(2).all(|w| w[0] < w[1]);
    }
    suite.add(
        "projective-projection-classes",
        &format!("{proj_trials} random (H, u)"),
        vec![],
        proj,
    );

    // a direction clear of all spanned hyperplanes keeps the image size;
    // meaningless below dimension 2, where every pair spans the whole space
    let mut generic = true;
    for (name, h) in fixtures::corpus() {
        if h.ambient_dim() < 2 {
            continue;
        }
        let g = crate::projective::sample_generic_point(&h, 11)?;
        let r = project_config(&h, &g.point)?;
        generic &= r.image.len() == h.len();
        if !generic {
            suite.add("projective-generic-projection", &name, vec![], false);
            return Ok(());
        }
    }
    suite.add(
        "projective-generic-projection",
        "fixture corpus",
        vec![],
        generic,
    );
    Ok(())
}

fn check_lattice(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut agree = true;
    let mut bridge = true;
    let mut alternation = true;
    for (name, h) in fixtures::corpus() {
        let l = lattice::build_lattice(&h)?;
        let z = l.chamber_count();
        let dr = lattice::chambers_deletion_restriction(&h)?;
        agree &= z == dr;
        for (f, &m) in l.flats.iter().zip(&l.moebius) {
            alternation &= m != 0 && (m > 0) == (f.dim % 2 == 0);
        }
        if h.has_full_span() {
            bridge &= l.moebius_top_abs() == eta::eta_star_via_homology(&h)?;
        }
        if !agree || !bridge {
            suite.add("lattice-oracle-agreement", &name, vec![], false);
            return Ok(());
        }
    }
    let trials = suite.scale(10, 40);
    for _ in 0..trials {
        let h = fixtures::random_configuration(rng, 1..=4, 12, false);
        let z = lattice::chambers_zaslavsky(&h)?;
        agree &= z == lattice::chambers_deletion_restriction(&h)?;
        if h.has_full_span() {
            bridge &= lattice::moebius_top_abs(&h)? == eta::eta_star_via_homology(&h)?;
        }
    }
    suite.add(
        "lattice-oracle-agreement",
        &format!("fixtures + {trials} random configurations (<= 12 points, dim <= 4)"),
        vec![],
        agree,
    );
    suite.add("lattice-moebius-alternation", "fixture corpus", vec![], alternation);
    suite.add(
        "lattice-homology-bridge",
        &format!("fixtures + {trials} random configurations"),
        vec![],
        bridge,
    );

    // permutation and scaling invariance of the chamber count
    let h = fixtures::three_point_line();
    let base = lattice::chambers_zaslavsky(&h)?;
    let mut invariant = true;
    for _ in 0..5 {
        let order = Order::random(h.len(), rng);
        invariant &= lattice::chambers_zaslavsky(&h.permuted(&order)?)? == base;
    }
    suite.add(
        "lattice-permutation-invariance",
        "three-point-line, 5 shuffles",
        vec![kv("chambers", base)],
        invariant,
    );
    Ok(())
}

fn check_homology(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut exact = true;
    let mut cpi_matches = true;
    let mut corollary = true;
    let mut remc1 = true;
    let mut skel_formula = true;
    for (name, h) in fixtures::corpus() {
        let rel = homology::relative_ranks(&h)?;
        exact &= rel.exact();
        skel_formula &=
            rel.rank_skel as u128 == binomial(h.len() as u64 - 1, h.ambient_dim() as u64);
        let order = Order::identity(h.len());
        let cpi = homology::enumerate_cpi(&h, &order)?;
        cpi_matches &= cpi.len() == rel.rank_rel;
        for w in 0..h.len() {
            let worder = Order::with_first(h.len(), w);
            let nonzero = homology::cpi_nonzero(&h, &worder)?.len() as u64;
            let d = homology::enumerate_dpi(&h, w)?;
            let all = homology::enumerate_cpi(&h, &worder)?.len() as u64;
            corollary &= all <= nonzero + d;
            let t = h.len() as u64 - 1;
            let sum = eta::binom_eta_sum(&h, h.point(w))?;
            remc1 &= d as u128 == binomial(t, h.ambient_dim() as u64) - sum as u128;
        }
        if !(exact && cpi_matches && corollary && remc1) {
            suite.add("homology-suite", &name, vec![], false);
            return Ok(());
        }
    }
    let trials = suite.scale(8, 25);
    for _ in 0..trials {
        let h = fixtures::random_configuration(rng, 1..=4, 9, true);
        let rel = homology::relative_ranks(&h)?;
        exact &= rel.exact();
        let orders = suite.scale(5, 20);
        let base = homology::enumerate_cpi(&h, &Order::identity(h.len()))?.len();
        cpi_matches &= base == rel.rank_rel;
        for _ in 0..orders {
            let order = Order::random(h.len(), rng);
            cpi_matches &= homology::enumerate_cpi(&h, &order)?.len() == base;
        }
    }
    suite.add(
        "homology-exactness",
        &format!("fixtures + {trials} random full-span configurations"),
        vec![],
        exact,
    );
    suite.add(
        "homology-skeleton-rank-formula",
        "fixture corpus",
        vec![],
        skel_formula,
    );
    suite.add(
        "homology-cpi-order-invariance",
        &format!("fixtures + {trials} random configurations, up to 20 orders each"),
        vec![],
        cpi_matches,
    );
    suite.add("homology-corollary-bound", "fixtures, every w", vec![], corollary);
    suite.add("homology-remainder-identity", "fixtures, every w", vec![], remc1);
    Ok(())
}

fn check_eta(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    // three-way agreement on the corpus and random full-span configurations
    let mut agree = true;
    let mut integer_valued = true;
    let mut items: Vec<(String, Configuration)> = fixtures::corpus();
    let randoms = suite.scale(15, 100);
    for i in 0..randoms {
        items.push((
            format!("random-{i}"),
            fixtures::random_configuration(rng, 1..=4, 10, true),
        ));
    }
    for (name, h) in &items {
        let by_order = eta::eta_star(h)?;
        let by_homology = eta::eta_star_via_homology(h)?;
        let ps = fixtures::probability_vectors(rng, h.len())?;
        let refs: Vec<&eta::ProbabilityVector> = ps.iter().collect();
        let by_flags = eta::eta_star_via_flags_multi(h, &refs)?;
        for f in &by_flags {
            integer_valued &= f.denom().is_one();
            agree &= *f == Rat::from(Int::from(by_order));
        }
        agree &= by_order == by_homology;
        if !agree {
            suite.add("eta-three-way-agreement", name, vec![
                kv("order", by_order),
                kv("homology", by_homology),
            ], false);
            return Ok(());
        }
    }
    suite.add(
        "eta-three-way-agreement",
        &format!("fixtures + {randoms} random configurations, 5 mass vectors each"),
        vec![],
        agree,
    );
    suite.add(
        "eta-flags-integer-valued",
        "same corpus",
        vec![],
        integer_valued,
    );

    // order invariance across random orders
    let mut order_invariant = true;
    let order_configs = suite.scale(3, 8);
    for (name, h) in items.iter().take(order_configs) {
        let base = eta::eta_star(h)?;
        for _ in 0..20 {
            let order = Order::random(h.len(), rng);
            order_invariant &= eta::eta_star_via_order(h, &order)? == base;
        }
        let _ = name;
    }
    suite.add(
        "eta-order-invariance",
        &format!("{order_configs} configurations, 20 random orders each"),
        vec![],
        order_invariant,
    );

    // supermodularity sweep
    let sm_trials = suite.scale(40, 200);
    let mut supermodular = true;
    for _ in 0..sm_trials {
        let h = fixtures::random_configuration(rng, 1..=3, 7, false);
        let u = fixtures::random_point_outside(rng, &h);
        let mut v = fixtures::random_point_outside(rng, &h);
        while v == u {
            v = fixtures::random_point_outside(rng, &h);
        }
        supermodular &= eta::check_supermodular(&h, &u, &v)?.holds;
    }
    suite.add(
        "eta-supermodularity",
        &format!("{sm_trials} random (H, u, v)"),
        vec![],
        supermodular,
    );

    // projection recursion, every fifth instance forced into a collision
    let pr_trials = suite.scale(25, 100);
    let mut recursion = true;
    for i in 0..pr_trials {
        let h = fixtures::random_configuration(rng, 1..=3, 8, false);
        let u = if i % 5 == 0 && h.len() >= 2 {
            fixtures::collision_direction(&h, 0, 1)
                .unwrap_or_else(|| fixtures::random_point_outside(rng, &h))
        } else {
            fixtures::random_point_outside(rng, &h)
        };
        recursion &= eta::check_projection_recursion(&h, &u)?.holds;
    }
    suite.add(
        "eta-projection-recursion",
        &format!("{pr_trials} random (H, u) including collision directions"),
        vec![],
        recursion,
    );

    // subset-sum upper bound
    let mut binom_bound = true;
    for (_, h) in &items {
        let w = fixtures::random_point_outside(rng, h);
        let sum = eta::binom_eta_sum(h, &w)?;
        let extended = eta::eta_star(&h.with_appended(w.clone())?)?;
        binom_bound &= extended <= sum;
    }
    suite.add(
        "eta-binomial-bound",
        "corpus, one external point each",
        vec![],
        binom_bound,
    );

    // boundary partition on at least 20 instances including the 3-cube
    let mut partition = true;
    let mut partition_instances = 0usize;
    for (_, h) in items.iter().filter(|(_, h)| h.ambient_dim() >= 2) {
        if partition_instances >= suite.scale(8, 20) {
            break;
        }
        let order = Order::identity(h.len());
        partition &= eta::check_boundary_partition(h, &order)?.holds();
        partition_instances += 1;
    }
    let e3 = Configuration::generate_en(3)?;
    partition &= eta::check_boundary_partition(&e3, &Order::identity(8))?.holds();
    partition_instances += 1;
    suite.add(
        "eta-boundary-partition",
        &format!("{partition_instances} instances including E3"),
        vec![],
        partition,
    );

    // boundary singletons never exist
    let mut singleton = true;
    for (_, h) in fixtures::corpus() {
        let order = Order::identity(h.len());
        for i in 1..h.len() {
            singleton &= !eta::is_pi_boundary(&h, &order, &[order.point_at(i)])?;
        }
    }
    suite.add("eta-boundary-singletons-empty", "fixture corpus", vec![], singleton);

    // exact factorial-ratio bound
    let mut factorial_bound = true;
    for (_, h) in items.iter().filter(|(_, h)| h.len() <= 10) {
        for &w in &[0, h.len() - 1] {
            let rhs = eta::thmc1_rhs(h, w)?;
            let rel = homology::relative_ranks(h)?;
            factorial_bound &= Rat::from(Int::from(rel.rank_rel as i64)) <= rhs;
        }
    }
    suite.add(
        "eta-relative-rank-bound",
        "corpus configurations with <= 10 points, two designated points each",
        vec![],
        factorial_bound,
    );

    // symmetrized flags
    let sym_trials = suite.scale(30, 100);
    let mut sym = true;
    for _ in 0..sym_trials {
        let h = fixtures::random_configuration(rng, 1..=4, 9, true);
        let k = rng.gen_range(1..=h.ambient_dim().min(3));
        // draw a random independent k-tuple
        let mut tuple: Vec<usize> = Vec::new();
        let mut guard = 0;
        while tuple.len() < k && guard < 100 {
            guard += 1;
            let c = rng.gen_range(0..h.len());
            if !tuple.contains(&c) {
                tuple.push(c);
                if !eta::tuple_is_independent(&h, &tuple) {
                    tuple.pop();
                }
            }
        }
        if tuple.len() < k {
            continue;
        }
        sym &= eta::symmetrized_flag_bound(&h, &tuple)?.holds;
    }
    suite.add(
        "eta-symmetrized-flag-bound",
        &format!("{sym_trials} random tuples"),
        vec![],
        sym,
    );
    Ok(())
}

fn check_ensembles(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    // telescoping of the dependent fractions through the spectrum, with the
    // in-function cross-checks (projected vs source membership, increment
    // two ways)
    let mut telescoping = true;
    let full_n4 = matches!(suite.level, VerifyLevel::Full);
    for n in 1..=3usize {
        let chain = projection_chain(n, rng.gen())?;
        for k in 1..=n {
            let proj = chain
                .iter()
                .find(|p| p.k == k + 1)
                .expect("chain covers k+1");
            let g = ensembles::gamma_spectrum(n, k, proj)?;
            telescoping &= g.epsilon == g.epsilon_from_delta;
        }
    }
    if full_n4 {
        let chain = projection_chain(4, rng.gen())?;
        for k in 1..=4usize {
            let proj = chain.iter().find(|p| p.k == k + 1).expect("chain");
            let g = ensembles::gamma_spectrum(4, k, proj)?;
            telescoping &= g.epsilon == g.epsilon_from_delta;
        }
    }
    suite.add(
        "ensembles-delta-telescoping",
        if full_n4 { "n <= 3 all k, n = 4 k <= 4" } else { "n <= 3 all k" },
        vec![],
        telescoping,
    );

    // the tuple decomposition against direct enumeration and raw matrices
    let mut decomposition = true;
    for n in 1..=3usize {
        let direct = ensembles::singular_tuples_enumerate(n)?;
        let repeat = ensembles::two_close_rows_count(n)?;
        let dependent = ensembles::dependent_subsets_en(n, n + 1)? as u128;
        let fact: u128 = (1..=(n + 1) as u128).product();
        decomposition &= direct == repeat + dependent * fact;
        // raw matrix enumeration one size up
        let raw = ensembles::singular_exact_raw(n + 1)?;
        decomposition &= raw == direct << (n + 1);
    }
    suite.add(
        "ensembles-singular-decomposition",
        "tuple spaces n <= 3 against raw matrix enumeration",
        vec![],
        decomposition,
    );

    // frozen exact singularity counts
    let goldens: &[(usize, u128)] = &[(1, 0), (2, 8), (3, 320), (4, 43264)];
    let mut golden_ok = true;
    let mut golden_values = Vec::new();
    for &(n, expected) in goldens {
        let got = ensembles::singular_exact_raw(n)?;
        golden_values.push(kv(&format!("count_{n}"), got));
        golden_ok &= got == expected;
    }
    suite.add(
        "ensembles-singularity-goldens",
        "brute force n = 1..4",
        golden_values,
        golden_ok,
    );

    // exact probabilities, monotone from n = 4 on (the small sizes rise:
    // the two-row collision term peaks there)
    let mut probs: Vec<(usize, Rat)> = Vec::new();
    let max_exact = suite.scale(5, 6);
    for n in 2..=max_exact {
        let count = ensembles::singular_exact_reduced(n)?;
        probs.push((
            n,
            Rat::new(Int::from(count), Int::from(1u128 << (n * n))),
        ));
    }
    let mut monotone = true;
    let mut values = Vec::new();
    for (n, p) in &probs {
        values.push(kv(&format!("p_{n}"), p));
    }
    for w in probs.windows(2) {
        if w[0].0 >= 4 {
            monotone &= w[0].1 >= w[1].1;
        }
    }
    suite.add(
        "ensembles-singularity-monotone",
        &format!("exact probabilities n = 2..{max_exact}, decreasing from n = 4"),
        values,
        monotone,
    );

    // the vanishing window of the top spectrum
    let lo_ns: &[usize] = match suite.level {
        VerifyLevel::Quick => &[4],
        VerifyLevel::Full => &[4, 5],
    };
    let mut lo = true;
    for &n in lo_ns {
        lo &= ensembles::check_lo_gap(n)?.holds;
    }
    suite.add(
        "ensembles-membership-vanishing-window",
        &format!("n in {lo_ns:?}"),
        vec![],
        lo,
    );

    // threshold counts with all oracles and both bounds
    let mut threshold = true;
    let mut tvals = Vec::new();
    let max_threshold = suite.scale(3, 4);
    for n in 1..=max_threshold {
        let bounds = ensembles::bounds_report(n)?;
        threshold &= bounds.agree
            && bounds.upper_holds
            && bounds.eta_lower_holds == Some(true);
        tvals.push(kv(&format!("count_{n}"), bounds.count));
        tvals.push(kv(&format!("eta_{n}"), bounds.eta_star.unwrap_or(0)));
    }
    suite.add(
        "ensembles-threshold-bounds",
        &format!("n = 1..{max_threshold}"),
        tvals,
        threshold,
    );

    // report-only increment comparison
    let mut lemma_vals = Vec::new();
    for &(n, k) in &[(2usize, 2usize), (3, 2), (3, 3)] {
        let r = ensembles::check_lemma3(n, k)?;
        lemma_vals.push(kv(
            &format!("n{n}k{k}"),
            format!("{} vs {} ({})", r.increment, r.bound, r.within_bound),
        ));
    }
    suite.add(
        "ensembles-increment-report",
        "report-only: the bound is asymptotic",
        lemma_vals,
        true,
    );

    // Monte-Carlo determinism and calibration
    let samples = suite.scale(50_000, 200_000) as u64;
    let mc1 = ensembles::singular_mc(2, samples, 77)?;
    let mc2 = ensembles::singular_mc(2, samples, 77)?;
    let est = mc1.mc.expect("mc stats");
    let calibrated = est.ci_low <= 0.5 && 0.5 <= est.ci_high;
    let deterministic = est.hits == mc2.mc.expect("mc stats").hits;
    let d1 = ensembles::delta_mc(3, 4, samples, 13)?;
    let d2 = ensembles::delta_mc(3, 4, samples, 13)?;
    suite.add(
        "ensembles-mc-determinism",
        &format!("{samples} samples, repeated runs"),
        vec![kv("hits", est.hits), kv("estimate", est.estimate)],
        calibrated && deterministic && d1.hits == d2.hits,
    );

    // ratio trend toward the reference curve
    let (mc_samples, mc_hi) = match suite.level {
        VerifyLevel::Quick => (200_000u64, 8usize),
        VerifyLevel::Full => (10_000_000, 10),
    };
    let mut ratios: Vec<(usize, f64, f64, f64)> = Vec::new();
    for n in 4..=6usize {
        let exact = ensembles::singular_exact_reduced(n)?;
        let p = exact as f64 / 2f64.powi((n * n) as i32);
        let reference = (n as f64 - 1.0).powi(2) * 2f64.powi(1 - n as i32);
        let r = p / reference;
        ratios.push((n, r, r, r));
    }
    for n in 7..=mc_hi {
        let mc = ensembles::singular_mc(n, mc_samples, 101 + n as u64)?;
        let est = mc.mc.expect("mc stats");
        let reference = (n as f64 - 1.0).powi(2) * 2f64.powi(1 - n as i32);
        ratios.push((
            n,
            est.estimate / reference,
            est.ci_low / reference,
            est.ci_high / reference,
        ));
    }
    let mut trend = true;
    for w in ratios.windows(2) {
        // monotone toward 1 within confidence: the next upper bound must
        // not drop below the previous lower bound
        trend &= w[1].3 >= w[0].2;
    }
    trend &= ratios.last().expect("ratios").1 > ratios.first().expect("ratios").1;
    let ratio_values: Vec<(String, String)> = ratios
        .iter()
        .map(|(n, r, _, _)| kv(&format!("ratio_{n}"), format!("{r:.4}")))
        .collect();
    suite.add(
        "ensembles-asymptotic-ratio-trend",
        &format!("exact n = 4..6, sampled to n = {mc_hi} ({mc_samples} samples)"),
        ratio_values,
        trend,
    );
    Ok(())
}

/// Runs the whole suite. The report is byte-identical for identical
/// options; runtime is attached only in non-deterministic mode.
pub fn run(opts: &VerifyOptions) -> Result<VerifyReport> {
    let started = std::time::Instant::now();
    let mut suite = Suite {
        checks: Vec::new(),
        level: opts.level,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    check_linalg(&mut suite, &mut rng)?;
    check_projective(&mut suite, &mut rng)?;
    check_lattice(&mut suite, &mut rng)?;
    check_homology(&mut suite, &mut rng)?;
    check_eta(&mut suite, &mut rng)?;
    check_ensembles(&mut suite, &mut rng)?;
    let passed = suite.checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        schema_version: REPORT_SCHEMA_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        level: opts.level.name().to_string(),
        seed: opts.seed,
        deterministic: opts.deterministic,
        checks: suite.checks,
        passed,
        runtime_ms: if opts.deterministic {
            None
        } else {
            Some(started.elapsed().as_millis() as u64)
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes_and_reruns_identically() {
        let opts = VerifyOptions {
            level: VerifyLevel::Quick,
            seed: 7,
            deterministic: true,
        };
        let a = run(&opts).unwrap();
        assert!(
            a.passed,
            "failing checks: {:?}",
            a.failures().map(|c| &c.name).collect::<Vec<_>>()
        );
        let b = run(&opts).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }
}
