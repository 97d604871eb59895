//! Executable forms of the two probabilistic reductions: random-translation
//! amplification and random-projection flattening, with statistical
//! verification of their expectation identities.  Every randomized object
//! embeds its seed.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::Point;
use crate::gf::{next_point, FieldElement, FieldSpec};
use crate::linalg::{Matrix, PivotRule};
use crate::maximal::{compensated_sum, sorted_power_sum, PointFunction};
use crate::rng::{trial_rng, Rng};
use crate::{Error, Result};

/// How translations are selected: one uniform sample, or the best of R
/// resamples by |Omega|, for runs that want translations achieving the
/// expected coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslationMode {
    Sampled,
    BestOf(u32),
}

impl Default for TranslationMode {
    fn default() -> Self {
        TranslationMode::BestOf(16)
    }
}

/// An amplified instance: translations u_1..u_M in F^(n-1), the amplified
/// function f_M(v) = (sum_m f(v - u_m)^n)^(1/n), and the translated anchor
/// set Omega = {w_j + u_m}.
#[derive(Debug, Clone)]
pub struct AmplifiedInstance {
    pub translations: Vec<Point>,
    pub f_m: PointFunction,
    pub omega: BTreeSet<Point>,
    pub seed: u64,
    /// Relative error of the norm identity ||f_M||_n^n = M ||f||_n^n.
    pub norm_identity_rel_err: f64,
}

fn sample_translations(field: &FieldSpec, dim: usize, m: u64, rng: &mut Rng) -> Vec<Point> {
    (0..m)
        .map(|_| (0..dim).map(|_| FieldElement(rng.random_range(0..field.q()))).collect())
        .collect()
}

fn build_omega(anchors: &[Point], translations: &[Point], field: &FieldSpec) -> BTreeSet<Point> {
    let mut omega = BTreeSet::new();
    for u in translations {
        for w in anchors {
            let shifted: Point = w.iter().zip(u).map(|(&a, &b)| field.add(a, b)).collect();
            omega.insert(shifted);
        }
    }
    omega
}

/// Amplify f by M random translations of F^(n-1); verifies the norm
/// identity and pointwise domination before returning.
pub fn amplify(
    f: &PointFunction,
    anchors: &[Point],
    m: u64,
    seed: u64,
    mode: TranslationMode,
) -> Result<AmplifiedInstance> {
    if m < 1 {
        return Err(Error::BadParameters("M must be >= 1".into()));
    }
    let field = f.field().clone();
    let n = f.n();
    let dim = n - 1;
    for (i, w) in anchors.iter().enumerate() {
        if w.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: w.len() });
        }
        if anchors[..i].contains(w) {
            return Err(Error::BadParameters(format!("anchor {i} repeats")));
        }
    }
    let translations = match mode {
        TranslationMode::Sampled => {
            let mut rng = trial_rng(seed, 0);
            sample_translations(&field, dim, m, &mut rng)
        }
        TranslationMode::BestOf(r) => {
            let mut best: Option<(usize, Vec<Point>)> = None;
            for attempt in 0..r.max(1) {
                let mut rng = trial_rng(seed, attempt as u64);
                let cand = sample_translations(&field, dim, m, &mut rng);
                let size = build_omega(anchors, &cand, &field).len();
                if best.as_ref().is_none_or(|(s, _)| size > *s) {
                    best = Some((size, cand));
                }
            }
            best.expect("at least one attempt").1
        }
    };
    let omega = build_omega(anchors, &translations, &field);

    // f_M(v)^n accumulated exactly as a sum of translated n-th powers
    let nf = n as f64;
    let mut power_sums: BTreeMap<Point, Vec<f64>> = BTreeMap::new();
    for u in &translations {
        for (p, v) in f.support() {
            // translations live in the hyperplane: last coordinate unshifted
            let mut shifted = p.clone();
            for (i, &b) in u.iter().enumerate() {
                shifted[i] = field.add(p[i], b);
            }
            power_sums.entry(shifted).or_default().push(v.powf(nf));
        }
    }
    let mut values = BTreeMap::new();
    for (p, powers) in &power_sums {
        values.insert(p.clone(), sorted_power_sum(powers.clone()).powf(1.0 / nf));
    }
    let f_m = PointFunction::new(field.clone(), n, values)?;

    // norm identity in the n-th power scale
    let lhs = sorted_power_sum(power_sums.values().map(|v| sorted_power_sum(v.clone())).collect());
    let rhs = m as f64 * f.lp_norm(nf)?.powf(nf);
    let rel_err = if rhs == 0.0 { 0.0 } else { (lhs - rhs).abs() / rhs };
    assert!(rel_err <= 1e-12, "amplification norm identity violated: rel err {rel_err}");

    // pointwise domination f_M(v) >= f(v - u_m)
    for u in &translations {
        for (p, v) in f.support() {
            let mut shifted: Point = p.clone();
            for (i, (&a, &b)) in p[..dim].iter().zip(u).enumerate() {
                shifted[i] = field.add(a, b);
            }
            let fm = f_m.get(&shifted);
            assert!(
                fm.powf(nf) >= v.powf(nf) * (1.0 - 1e-12),
                "pointwise domination violated at {shifted:?}"
            );
        }
    }
    Ok(AmplifiedInstance { translations, f_m, omega, seed, norm_identity_rel_err: rel_err })
}

/// Exact expected |Omega| under uniform i.i.d. translations: each point of
/// F^(n-1) is covered with probability 1 - (1 - J/q^(n-1))^M.
pub fn expected_omega_size(field: &FieldSpec, n: usize, j: usize, m: u64) -> f64 {
    let total = (field.q() as f64).powi(n as i32 - 1);
    total * (1.0 - (1.0 - j as f64 / total).powi(m as i32))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChosenM {
    pub m: u64,
    /// Set when the floor was zero and the value was clamped to 1.
    pub clamped: bool,
}

/// M = floor(lambda^n / (K_0 ||f||_n)^n), clamped to at least 1.
pub fn choose_m(lambda: f64, f: &PointFunction, k0: f64) -> Result<ChosenM> {
    let n = f.n() as f64;
    let norm = f.lp_norm(n)?;
    if norm == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let ratio = lambda / (k0 * norm);
    let floor = ratio.powf(n).floor();
    if floor < 1.0 {
        Ok(ChosenM { m: 1, clamped: true })
    } else {
        Ok(ChosenM { m: floor as u64, clamped: false })
    }
}

/// A surjective linear map T: F^(N-1) -> F^(n-1) together with its
/// extension T_hat: F^N -> F^n fixing the last coordinate.
#[derive(Debug, Clone, Serialize)]
pub struct FlatProjection {
    pub matrix: Vec<Vec<FieldElement>>,
    pub source_dim: usize,
    pub target_dim: usize,
    pub seed: u64,
    /// Set when the rejection loop was exhausted and the deterministic
    /// full-rank fallback was used.
    pub fallback_used: bool,
}

impl FlatProjection {
    pub fn apply(&self, w: &[FieldElement], field: &FieldSpec) -> Point {
        debug_assert_eq!(w.len(), self.source_dim - 1);
        self.matrix
            .iter()
            .map(|row| {
                let mut acc = FieldElement::ZERO;
                for (&c, &x) in row.iter().zip(w) {
                    acc = field.add(acc, field.mul(c, x));
                }
                acc
            })
            .collect()
    }

    /// T_hat(w, v_N) = (T w, v_N).
    pub fn apply_hat(&self, v: &[FieldElement], field: &FieldSpec) -> Point {
        debug_assert_eq!(v.len(), self.source_dim);
        let mut out = self.apply(&v[..self.source_dim - 1], field);
        out.push(v[self.source_dim - 1]);
        out
    }

    pub fn rank(&self, field: &FieldSpec) -> usize {
        Matrix::from_rows(self.matrix.clone()).rank(field, PivotRule::Forward)
    }
}

/// Sample T uniformly from (n-1) x (N-1) matrices, rejecting until rank
/// n - 1; after 64 attempts fall back to [I | 0] with a report flag.
pub fn random_flat_projection(
    field: &FieldSpec,
    big_n: usize,
    n: usize,
    seed: u64,
) -> Result<FlatProjection> {
    if !(n >= 2 && big_n >= n) {
        return Err(Error::BadParameters(format!("need N >= n >= 2, got N={big_n}, n={n}")));
    }
    let rows = n - 1;
    let cols = big_n - 1;
    let mut rng = trial_rng(seed, 0);
    for _ in 0..64 {
        let matrix: Vec<Vec<FieldElement>> = (0..rows)
            .map(|_| (0..cols).map(|_| FieldElement(rng.random_range(0..field.q()))).collect())
            .collect();
        let proj = FlatProjection {
            matrix,
            source_dim: big_n,
            target_dim: n,
            seed,
            fallback_used: false,
        };
        if proj.rank(field) == rows {
            return Ok(proj);
        }
    }
    let matrix: Vec<Vec<FieldElement>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { field.one() } else { FieldElement::ZERO })
                .collect()
        })
        .collect();
    Ok(FlatProjection { matrix, source_dim: big_n, target_dim: n, seed, fallback_used: true })
}

/// The norm-preserving pushforward f_T(x) = (sum_{T_hat(v) = x} |f(v)|^n)^(1/n);
/// the l^n norm identity is verified before returning.
pub fn pushforward_power(f: &PointFunction, proj: &FlatProjection) -> Result<PointFunction> {
    let field = f.field().clone();
    if f.n() != proj.source_dim {
        return Err(Error::DimensionMismatch { expected: proj.source_dim, got: f.n() });
    }
    let n = proj.target_dim as f64;
    let mut power_sums: BTreeMap<Point, Vec<f64>> = BTreeMap::new();
    for (v, val) in f.support() {
        let x = proj.apply_hat(v, &field);
        power_sums.entry(x).or_default().push(val.powf(n));
    }
    let mut values = BTreeMap::new();
    for (x, powers) in &power_sums {
        values.insert(x.clone(), sorted_power_sum(powers.clone()).powf(1.0 / n));
    }
    let f_t = PointFunction::new(field, proj.target_dim, values)?;
    let lhs = f_t.lp_norm(n)?;
    let rhs_powers: Vec<f64> = f.support().map(|(_, v)| v.powf(n)).collect();
    let rhs = sorted_power_sum(rhs_powers).powf(1.0 / n);
    let rel = if rhs == 0.0 { 0.0 } else { (lhs - rhs).abs() / rhs };
    assert!(rel <= 1e-12, "pushforward norm identity violated: rel err {rel}");
    Ok(f_t)
}

/// The fiberwise supremum g_T(y) = sup {g(w) : T(w) = y}, zero on empty
/// fibers; total on F^(n-1).
pub fn pushforward_sup(
    g: &BTreeMap<Point, f64>,
    proj: &FlatProjection,
    field: &FieldSpec,
) -> BTreeMap<Point, f64> {
    let mut out: BTreeMap<Point, f64> = BTreeMap::new();
    let mut y = vec![FieldElement::ZERO; proj.target_dim - 1];
    loop {
        out.insert(y.clone(), 0.0);
        if proj.target_dim == 1 || !next_point(&mut y, field.q()) {
            break;
        }
    }
    for (w, &v) in g {
        let y = proj.apply(w, field);
        let slot = out.get_mut(&y).expect("target grid is total");
        if v > *slot {
            *slot = v;
        }
    }
    out
}

/// Monte Carlo collision statistics for a point set Omega in F^(N-1) under
/// random surjective maps to F^(n-1).
#[derive(Debug, Clone, Serialize)]
pub struct CollisionStats {
    pub seed: u64,
    pub trials: u64,
    /// Mean over trials of |{(w, w') in Omega^2, w != w' : T w = T w'}|.
    pub mean_collisions: f64,
    /// The heuristic comparison scale |Omega|^2 q^(1-n).
    pub heuristic_bound: f64,
    /// Exact E[collisions] = |Omega| (|Omega| - 1) P(T z = 0) for z != 0.
    pub exact_expected_collisions: f64,
    /// Exact per-pair collision probability under full-rank T.
    pub pair_collision_prob: f64,
    /// Empirical P(|T(Omega)| >= c |Omega| min(1, q^(n-1)/|Omega|)).
    pub image_threshold_c: f64,
    pub image_large_prob: f64,
}

/// Number of full-rank r x c matrices over F_q.
fn full_rank_count(q: u64, r: usize, c: usize) -> f64 {
    if r > c {
        return 0.0;
    }
    let mut acc = 1.0f64;
    for i in 0..r {
        acc *= (q as f64).powi(c as i32) - (q as f64).powi(i as i32);
    }
    acc
}

/// Exact probability that a uniformly random full-rank (n-1) x (N-1) matrix
/// kills a fixed nonzero vector.
pub fn exact_kernel_probability(q: u64, big_n: usize, n: usize) -> f64 {
    full_rank_count(q, n - 1, big_n - 2) / full_rank_count(q, n - 1, big_n - 1)
}

pub fn collision_stats(
    omega: &BTreeSet<Point>,
    field: &FieldSpec,
    big_n: usize,
    n: usize,
    trials: u64,
    seed: u64,
    image_threshold_c: f64,
) -> Result<CollisionStats> {
    if trials < 1 {
        return Err(Error::BadParameters("trials must be >= 1".into()));
    }
    let omega_vec: Vec<&Point> = omega.iter().collect();
    let size = omega_vec.len() as f64;
    let qf = field.q() as f64;
    let image_floor = image_threshold_c * size * (qf.powi(n as i32 - 1) / size).min(1.0);
    let per_trial: Vec<(u64, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let proj = random_flat_projection(field, big_n, n, seed.wrapping_add(t * 0x9e3779b9))
                .expect("projection parameters validated");
            let images: Vec<Point> =
                omega_vec.iter().map(|w| proj.apply(w, field)).collect();
            let mut collisions = 0u64;
            for (i, a) in images.iter().enumerate() {
                for (j, b) in images.iter().enumerate() {
                    if i != j && a == b {
                        collisions += 1;
                    }
                }
            }
            let distinct: BTreeSet<&Point> = images.iter().collect();
            (collisions, distinct.len() as f64 >= image_floor)
        })
        .collect();
    let mean_collisions =
        compensated_sum(per_trial.iter().map(|&(c, _)| c as f64)) / trials as f64;
    let image_large_prob =
        per_trial.iter().filter(|&&(_, big)| big).count() as f64 / trials as f64;
    let pair_prob = exact_kernel_probability(field.q(), big_n, n);
    Ok(CollisionStats {
        seed,
        trials,
        mean_collisions,
        heuristic_bound: size * size * qf.powi(1 - n as i32),
        exact_expected_collisions: size * (size - 1.0) * pair_prob,
        pair_collision_prob: pair_prob,
        image_threshold_c,
        image_large_prob,
    })
}
