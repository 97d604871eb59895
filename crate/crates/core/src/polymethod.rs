//! The polynomial method with multiplicities: constraint assembly, kernel
//! solving over F_q, and certificate generation for Kakeya and k-plane
//! Kakeya lower bounds.
//!
//! Certificates are machine-checkable: a witness polynomial is re-verified
//! against every Hasse vanishing condition independently of the solver, and
//! a full-rank claim is re-verified by a second elimination pass with a
//! different pivot rule.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::geometry::{enum_directions, enum_kplanes, Direction, Line, Point, Subspace};
use crate::gf::{next_point, FieldElement, FieldSpec, Monomial, MultivariatePolynomial};
use crate::linalg::{Matrix, PivotRule};
use crate::{Caps, Error, Result};

/// Internal ceiling on polynomial degrees in constraint systems.
const DEGREE_CAP: u64 = 4096;

/// Integer multiplicities on points of F^n, clamped to q.
#[derive(Debug, Clone)]
pub struct MultiplicityFunction {
    n: usize,
    values: BTreeMap<Point, u32>,
}

impl MultiplicityFunction {
    pub fn new(n: usize, values: BTreeMap<Point, u32>, field: &FieldSpec) -> Self {
        let clamp = field.q().min(u32::MAX as u64) as u32;
        let values = values
            .into_iter()
            .filter(|(_, m)| *m > 0)
            .map(|(p, m)| {
                debug_assert_eq!(p.len(), n);
                (p, m.min(clamp))
            })
            .collect();
        MultiplicityFunction { n, values }
    }

    /// No clamp: the Schwartz-Zippel lemma with multiplicities quantifies
    /// over arbitrary orders, including m > q.
    pub fn unclamped(n: usize, values: BTreeMap<Point, u32>) -> Self {
        let values = values.into_iter().filter(|(_, m)| *m > 0).collect();
        MultiplicityFunction { n, values }
    }

    /// Multiplicity 1 on every point of the set.
    pub fn indicator(n: usize, points: &BTreeSet<Point>, field: &FieldSpec) -> Self {
        Self::new(n, points.iter().map(|p| (p.clone(), 1)).collect(), field)
    }

    /// Constant multiplicity m on every point of F^k.
    pub fn constant_on_space(k: usize, m: u32, field: &FieldSpec) -> Self {
        let mut values = BTreeMap::new();
        let mut point = vec![FieldElement::ZERO; k];
        loop {
            values.insert(point.clone(), m);
            if !next_point(&mut point, field.q()) {
                break;
            }
        }
        Self::unclamped(k, values)
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &BTreeMap<Point, u32> {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    WitnessPoly,
    KernelTrivial,
}

/// Outcome of a vanishing-system solve.
///
/// `witness_poly`: a verified nonzero polynomial of degree <= D meeting all
/// multiplicity conditions.  `kernel_trivial`: the constraint matrix has
/// full column rank, re-verified under a second pivot rule.
#[derive(Debug, Clone)]
pub struct VanishingCertificate {
    pub kind: CertificateKind,
    pub degree_bound: u64,
    pub constraint_count: usize,
    pub dim_pd: usize,
    pub rank: usize,
    pub witness: Option<MultivariatePolynomial>,
    pub hasse_checks_passed: bool,
    pub second_pass_rank: usize,
}

impl Serialize for VanishingCertificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Verification {
            hasse_checks_passed: bool,
            second_pass_rank: usize,
        }
        let n = if self.witness.is_some() { 7 } else { 6 };
        let mut s = serializer.serialize_struct("VanishingCertificate", n)?;
        s.serialize_field("kind", &self.kind)?;
        s.serialize_field("D", &self.degree_bound)?;
        s.serialize_field("rows", &self.constraint_count)?;
        s.serialize_field("cols", &self.dim_pd)?;
        s.serialize_field("rank", &self.rank)?;
        if let Some(w) = &self.witness {
            s.serialize_field("witness", &w.to_text())?;
        }
        s.serialize_field(
            "verification",
            &Verification {
                hasse_checks_passed: self.hasse_checks_passed,
                second_pass_rank: self.second_pass_rank,
            },
        )?;
        s.end()
    }
}

/// dim P_D = C(n + D, D), exact.
pub fn monomial_count(n: usize, degree_bound: u64) -> BigUint {
    num_integer::binomial(BigUint::from(n as u64 + degree_bound), BigUint::from(degree_bound))
}

/// Exponent vectors with |e| <= D in graded-lex order.
pub fn monomials_upto(n_vars: usize, degree_bound: u64) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n_vars];
    for d in 0..=degree_bound {
        emit_of_degree(&mut cur, 0, d as u32, &mut out);
    }
    out
}

fn emit_of_degree(cur: &mut Vec<u32>, idx: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if idx == cur.len() - 1 {
        cur[idx] = remaining;
        out.push(cur.clone());
        return;
    }
    for v in (0..=remaining).rev() {
        cur[idx] = v;
        emit_of_degree(cur, idx + 1, remaining - v, out);
    }
    cur[idx] = 0;
}

/// The assembled vanishing system: one row per Hasse condition (point in
/// lex order, exponent in graded-lex order with |e| < mult), one column per
/// monomial of degree <= D in graded-lex order.
pub struct ConstraintSystem {
    pub matrix: Matrix,
    pub columns: Vec<Monomial>,
    pub rows: Vec<(Point, Monomial)>,
}

pub fn constraint_matrix(
    mult: &MultiplicityFunction,
    degree_bound: u64,
    field: &FieldSpec,
    caps: &Caps,
) -> Result<ConstraintSystem> {
    if degree_bound > DEGREE_CAP {
        return Err(Error::DegreeTooLarge(degree_bound));
    }
    let n = mult.n_vars();
    let columns = monomials_upto(n, degree_bound);
    let mut rows = Vec::new();
    for (point, &m) in mult.values() {
        for e in monomials_upto(n, (m - 1) as u64) {
            rows.push((point.clone(), e));
        }
    }
    caps.check_matrix(rows.len() as u128 * columns.len() as u128)?;
    let mut matrix = Matrix::zeros(rows.len(), columns.len());
    let p = field.p();
    for (i, (point, e)) in rows.iter().enumerate() {
        for (j, a) in columns.iter().enumerate() {
            if a.iter().zip(e).any(|(&ai, &ei)| ai < ei) {
                continue;
            }
            // Hasse coefficient of the monomial x^a at `point`, order e
            let mut entry = field.one();
            for idx in 0..n {
                let binom = crate::gf::binomial_mod_p(a[idx] as u64, e[idx] as u64, p);
                if binom == 0 {
                    entry = FieldElement::ZERO;
                    break;
                }
                entry = field.mul(entry, field.from_int(binom));
                entry = field.mul(entry, field.pow(point[idx], (a[idx] - e[idx]) as u64));
            }
            matrix.set(i, j, entry);
        }
    }
    Ok(ConstraintSystem { matrix, columns, rows })
}

/// Solve the vanishing system; returns a verified certificate either way.
pub fn find_vanishing_poly(
    mult: &MultiplicityFunction,
    degree_bound: u64,
    field: &FieldSpec,
    caps: &Caps,
) -> Result<VanishingCertificate> {
    let system = constraint_matrix(mult, degree_bound, field, caps)?;
    let n = mult.n_vars();
    let rank = system.matrix.rank(field, PivotRule::Forward);
    let second_pass_rank = system.matrix.rank(field, PivotRule::Reverse);
    assert_eq!(rank, second_pass_rank, "pivot rules disagree on rank");
    match system.matrix.kernel_vector(field) {
        Some(v) => {
            let witness = MultivariatePolynomial::from_terms(
                n,
                system.columns.iter().cloned().zip(v.iter().copied()),
                field,
            );
            assert!(!witness.is_zero(), "kernel vector decoded to the zero polynomial");
            assert!(witness.degree().unwrap_or(0) <= degree_bound);
            let hasse_checks_passed = verify_witness(&witness, mult, field)?;
            assert!(hasse_checks_passed, "solver produced an unverifiable witness");
            Ok(VanishingCertificate {
                kind: CertificateKind::WitnessPoly,
                degree_bound,
                constraint_count: system.rows.len(),
                dim_pd: system.columns.len(),
                rank,
                witness: Some(witness),
                hasse_checks_passed,
                second_pass_rank,
            })
        }
        None => Ok(VanishingCertificate {
            kind: CertificateKind::KernelTrivial,
            degree_bound,
            constraint_count: system.rows.len(),
            dim_pd: system.columns.len(),
            rank,
            witness: None,
            hasse_checks_passed: true,
            second_pass_rank,
        }),
    }
}

/// Re-check every Hasse vanishing condition on a candidate witness,
/// independently of the elimination that produced it.
pub fn verify_witness(
    witness: &MultivariatePolynomial,
    mult: &MultiplicityFunction,
    field: &FieldSpec,
) -> Result<bool> {
    for (point, &m) in mult.values() {
        for e in monomials_upto(mult.n_vars(), (m - 1) as u64) {
            if !witness.hasse_coefficient(point, &e, field)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The Dvir obstruction at D = q - 1: a Kakeya set admits no nonzero
/// polynomial of degree <= q - 1 vanishing on it, so `kernel_trivial` is the
/// expected outcome on Kakeya input; a witness certifies the set is small.
pub fn dvir_check(
    points: &BTreeSet<Point>,
    n: usize,
    field: &FieldSpec,
    caps: &Caps,
) -> Result<VanishingCertificate> {
    let mult = MultiplicityFunction::indicator(n, points, field);
    find_vanishing_poly(&mult, field.q() - 1, field, caps)
}

/// Diagnostics extracted from a witness polynomial on input that was
/// claimed to be Kakeya: the x_n factorization, the leading form, and the
/// first direction with no fully covered line.
#[derive(Debug, Clone, Serialize)]
pub struct KakeyaRefutation {
    pub xn_exponent: u32,
    pub cofactor: String,
    pub leading_form: String,
    pub missing_direction: Option<Direction>,
}

pub fn refute_kakeya_claim(
    points: &BTreeSet<Point>,
    n: usize,
    witness: &MultivariatePolynomial,
    field: &FieldSpec,
    caps: &Caps,
) -> Result<KakeyaRefutation> {
    let (j, q) = witness.factor_out_var(n - 1)?;
    let leading = q.leading_form();
    let (_, missing) = kakeya_line_check(points, n, field, caps)?;
    Ok(KakeyaRefutation {
        xn_exponent: j,
        cofactor: q.to_text(),
        leading_form: leading.to_text(),
        missing_direction: missing,
    })
}

/// True iff every direction has a line fully contained in E; otherwise the
/// first missing direction in canonical order is returned.
pub fn kakeya_line_check(
    points: &BTreeSet<Point>,
    n: usize,
    field: &FieldSpec,
    caps: &Caps,
) -> Result<(bool, Option<Direction>)> {
    for dir in enum_directions(field, n, caps)? {
        if !direction_covered(points, &dir, field) {
            return Ok((false, Some(dir)));
        }
    }
    Ok((true, None))
}

fn direction_covered(points: &BTreeSet<Point>, dir: &Direction, field: &FieldSpec) -> bool {
    let n = dir.dim();
    let lead = dir.lead();
    let mut rest = vec![FieldElement::ZERO; n - 1];
    loop {
        let mut base = Vec::with_capacity(n);
        base.extend_from_slice(&rest[..lead]);
        base.push(FieldElement::ZERO);
        base.extend_from_slice(&rest[lead..]);
        let line = Line::new(&base, dir.clone(), field);
        if line.points(field).iter().all(|p| points.contains(p)) {
            return true;
        }
        if n == 1 || !next_point(&mut rest, field.q()) {
            break;
        }
    }
    false
}

/// Small Kakeya set built from tangent lines to a parabola; for n = 2 the
/// set is {(s, y) : s^2 - y is a square} together with the vertical axis,
/// of size q(q+1)/2 + (q-1)/2.  Higher dimensions take the product with
/// F_q^(n-2).  Requires odd characteristic.
pub fn build_small_kakeya(field: &FieldSpec, n: usize, caps: &Caps) -> Result<BTreeSet<Point>> {
    if field.p() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if n < 2 {
        return Err(Error::BadParameters("the construction needs n >= 2".into()));
    }
    caps.check_enum((field.q() as u128).pow(n as u32))?;
    let squares: BTreeSet<FieldElement> =
        field.elements().map(|t| field.mul(t, t)).collect();
    let mut planar: BTreeSet<Point> = BTreeSet::new();
    for s in field.elements() {
        for y in field.elements() {
            if squares.contains(&field.sub(field.mul(s, s), y)) {
                planar.insert(vec![s, y]);
            }
        }
    }
    for y in field.elements() {
        planar.insert(vec![FieldElement::ZERO, y]);
    }
    let mut out = BTreeSet::new();
    if n == 2 {
        out = planar;
    } else {
        let mut tail = vec![FieldElement::ZERO; n - 2];
        loop {
            for p in &planar {
                let mut full = p.clone();
                full.extend_from_slice(&tail);
                out.insert(full);
            }
            if !next_point(&mut tail, field.q()) {
                break;
            }
        }
    }
    let (ok, missing) = kakeya_line_check(&out, n, field, caps)?;
    if !ok {
        // the construction is proven; a miss here is an arithmetic bug
        panic!("small Kakeya construction missed direction {:?}", missing);
    }
    Ok(out)
}

/// The multiplicity Schwartz-Zippel lemma as a certificate: no nonzero
/// polynomial of degree < mq on F^k vanishes to order m at every point.
/// A witness here is a failure of the lemma and fails the suite.
pub fn multiplicity_sz_check(
    k: usize,
    m: u32,
    field: &FieldSpec,
    caps: &Caps,
) -> Result<VanishingCertificate> {
    let mult = MultiplicityFunction::constant_on_space(k, m, field);
    find_vanishing_poly(&mult, m as u64 * field.q() - 1, field, caps)
}

/// Product of one canonical representative of every projective class of
/// affine-linear forms on F^k with nonzero linear part (one form per affine
/// hyperplane).  Degree (q^(k+1) - q)/(q - 1); vanishing order at every
/// point of F^k at least (q^k - 1)/(q - 1).  Both are re-verified.
pub struct LinearFormsProduct {
    pub poly: MultivariatePolynomial,
    pub degree: u64,
    pub min_vanishing_order: u64,
}

pub fn linear_forms_product(k: usize, field: &FieldSpec, caps: &Caps) -> Result<LinearFormsProduct> {
    if k < 1 {
        return Err(Error::BadParameters("k must be >= 1".into()));
    }
    let q = field.q();
    let expected_degree = (q.pow(k as u32 + 1) - q) / (q - 1);
    if expected_degree > DEGREE_CAP {
        return Err(Error::DegreeTooLarge(expected_degree));
    }
    let mut product = MultivariatePolynomial::constant(k, field.one());
    for dir in enum_directions(field, k + 1, caps)? {
        let rep = dir.rep();
        // classes with zero linear part contribute no hyperplane
        if rep[..k].iter().all(|c| c.is_zero()) {
            continue;
        }
        let mut form = MultivariatePolynomial::constant(k, rep[k]);
        for (i, &c) in rep[..k].iter().enumerate() {
            let mut e = vec![0u32; k];
            e[i] = 1;
            form = form.add(&MultivariatePolynomial::monomial(k, e, c), field);
        }
        product = product.mul(&form, field);
    }
    let degree = product.degree().expect("product of linear forms is nonzero");
    assert_eq!(degree, expected_degree, "linear-form class count is off");
    // re-verify the vanishing order at every point
    let claimed_order = (q.pow(k as u32) - 1) / (q - 1);
    let orders = monomials_upto(k, claimed_order - 1);
    let mut point = vec![FieldElement::ZERO; k];
    loop {
        for e in &orders {
            assert!(
                product.hasse_coefficient(&point, e, field)?.is_zero(),
                "product fails to vanish to order {} at {:?}",
                claimed_order,
                point
            );
        }
        if !next_point(&mut point, q) {
            break;
        }
    }
    Ok(LinearFormsProduct { poly: product, degree, min_vanishing_order: claimed_order })
}

/// Result of testing a homogeneous form against all projective
/// (k-1)-planes.
#[derive(Debug, Clone, Serialize)]
pub struct PlaneCheck {
    pub vanishes_on_all: bool,
    /// When the form vanishes on every plane: whether deg Q meets the
    /// lower bound (q^(k+1) - 1)/(q - 1).  A `false` here refutes the
    /// lemma and fails the suite.
    pub degree_bound_ok: Option<bool>,
    pub degree_lower_bound: u64,
}

pub fn leading_form_plane_check(
    q_poly: &MultivariatePolynomial,
    k: usize,
    field: &FieldSpec,
    caps: &Caps,
) -> Result<PlaneCheck> {
    if !q_poly.is_homogeneous() || q_poly.is_zero() {
        return Err(Error::NotHomogeneous);
    }
    let n = q_poly.n_vars();
    let q = field.q();
    let bound = (q.pow(k as u32 + 1) - 1) / (q - 1);
    for plane in enum_kplanes(field, n, k, true, caps)? {
        // substitute x = sum_j s_j b_j symbolically
        let basis = plane.subspace.basis();
        let rows: Vec<Vec<FieldElement>> =
            (0..n).map(|i| basis.iter().map(|b| b[i]).collect()).collect();
        let restricted = q_poly.compose_linear(&rows, field)?;
        if !restricted.is_zero() {
            return Ok(PlaneCheck {
                vanishes_on_all: false,
                degree_bound_ok: None,
                degree_lower_bound: bound,
            });
        }
    }
    let ok = q_poly.degree().unwrap_or(0) >= bound;
    Ok(PlaneCheck { vanishes_on_all: true, degree_bound_ok: Some(ok), degree_lower_bound: bound })
}

/// The k-plane Kakeya lower bound with m = q^(k-1): the exact binomial
/// ratio C(q^k + n - 1, n) / C(q^(k-1) + n - 1, n) and the closed form
/// q^n (1 - q^(1-k))^C(n,2), both as exact rationals.
#[derive(Debug, Clone)]
pub struct KPlaneBound {
    pub binomial_form: BigRational,
    pub closed_form: BigRational,
    /// The binomial arithmetic spelled out, for the certificate chain.
    pub chain: Vec<String>,
}

impl KPlaneBound {
    pub fn closed_form_f64(&self) -> f64 {
        rational_to_f64(&self.closed_form)
    }

    pub fn binomial_form_f64(&self) -> f64 {
        rational_to_f64(&self.binomial_form)
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn kplane_bound(n: usize, k: usize, field: &FieldSpec) -> Result<KPlaneBound> {
    if !(2 <= k && k < n) {
        return Err(Error::BadParameters(format!("need 2 <= k < n, got k={k}, n={n}")));
    }
    let q = field.q();
    let m = BigUint::from(q).pow(k as u32 - 1);
    let mq = BigUint::from(q).pow(k as u32);
    let top = num_integer::binomial(mq.clone() + BigUint::from(n as u64 - 1), BigUint::from(n as u64));
    let bot = num_integer::binomial(m.clone() + BigUint::from(n as u64 - 1), BigUint::from(n as u64));
    let binomial_form = BigRational::new(top.clone().into(), bot.clone().into());
    // q^n ((q^(k-1) - 1)/q^(k-1))^C(n,2)
    let pairs = (n * (n - 1) / 2) as u32;
    let qn = BigRational::from_integer(BigUint::from(q).pow(n as u32).into());
    let one_minus = BigRational::new(
        (m.clone() - BigUint::one()).into(),
        m.clone().into(),
    );
    let mut closed_form = qn;
    for _ in 0..pairs {
        closed_form *= one_minus.clone();
    }
    let chain = vec![
        format!("m = q^(k-1) = {}", m),
        format!("C(q^k + n - 1, n) = C({} + {} - 1, {}) = {}", mq, n, n, top),
        format!("C(q^(k-1) + n - 1, n) = C({} + {} - 1, {}) = {}", m, n, n, bot),
        format!("binomial form = {}/{}", top, bot),
        format!("closed form = q^n (1 - q^(1-k))^C(n,2) = {}", closed_form),
    ];
    Ok(KPlaneBound { binomial_form, closed_form, chain })
}

/// True iff every k-subspace of F^n has some coset fully inside E.
pub fn kplane_kakeya_check(
    points: &BTreeSet<Point>,
    n: usize,
    k: usize,
    field: &FieldSpec,
    caps: &Caps,
) -> Result<(bool, Option<Subspace>)> {
    for plane in enum_kplanes(field, n, k, true, caps)? {
        let sub = plane.subspace;
        let span = sub.points(field);
        let mut covered = false;
        for offset in sub.coset_reps(field) {
            if span.iter().all(|p| {
                let shifted: Point =
                    p.iter().zip(&offset).map(|(&a, &b)| field.add(a, b)).collect();
                points.contains(&shifted)
            }) {
                covered = true;
                break;
            }
        }
        if !covered {
            return Ok((false, Some(sub)));
        }
    }
    Ok((true, None))
}

/// A k-plane Kakeya set: a small planar Kakeya set embedded in the first
/// n - k + 1 coordinates, together with every point whose trailing k - 1
/// coordinates are not all zero.
pub fn build_kplane_kakeya(
    field: &FieldSpec,
    n: usize,
    k: usize,
    caps: &Caps,
) -> Result<BTreeSet<Point>> {
    if !(2 <= k && k < n) {
        return Err(Error::BadParameters(format!("need 2 <= k < n, got k={k}, n={n}")));
    }
    let slice_dim = n - k + 1;
    let small = build_small_kakeya(field, slice_dim, caps)?;
    caps.check_enum((field.q() as u128).pow(n as u32))?;
    let mut out: BTreeSet<Point> = BTreeSet::new();
    let mut point = vec![FieldElement::ZERO; n];
    loop {
        if point[slice_dim..].iter().any(|c| !c.is_zero()) {
            out.insert(point.clone());
        }
        if !next_point(&mut point, field.q()) {
            break;
        }
    }
    for p in &small {
        let mut full = p.clone();
        full.resize(n, FieldElement::ZERO);
        out.insert(full);
    }
    Ok(out)
}

/// Dimension-count size bound for Kakeya sets: |E| >= C(q - 1 + n, n).
pub fn dimension_count_bound(n: usize, q: u64) -> BigUint {
    num_integer::binomial(BigUint::from(q - 1 + n as u64), BigUint::from(n as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::new(p, 1, None).unwrap()
    }

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn monomial_count_examples() {
        assert_eq!(monomial_count(2, 2), BigUint::from(6u32));
        assert_eq!(monomial_count(2, 3), BigUint::from(10u32));
        assert_eq!(monomial_count(5, 0), BigUint::from(1u32));
        for n in 1..5 {
            for d in 0..6 {
                assert_eq!(
                    monomial_count(n, d).to_usize().unwrap(),
                    monomials_upto(n, d).len()
                );
            }
        }
    }

    #[test]
    fn constraint_matrix_row_counts() {
        let f3 = f(3);
        // one point with multiplicity 2 in two variables: C(3, 2) = 3 rows
        let mult = MultiplicityFunction::new(
            2,
            [(vec![FieldElement(1), FieldElement(2)], 2u32)].into_iter().collect(),
            &f3,
        );
        let sys = constraint_matrix(&mult, 2, &f3, &caps()).unwrap();
        assert_eq!(sys.rows.len(), 3);
        assert_eq!(sys.columns.len(), 6);
        // multiplicity 1 at k points gives k pure evaluation rows
        let pts: BTreeSet<Point> = [
            vec![FieldElement(0), FieldElement(0)],
            vec![FieldElement(1), FieldElement(1)],
            vec![FieldElement(2), FieldElement(0)],
        ]
        .into_iter()
        .collect();
        let mult1 = MultiplicityFunction::indicator(2, &pts, &f3);
        let sys1 = constraint_matrix(&mult1, 2, &f3, &caps()).unwrap();
        assert_eq!(sys1.rows.len(), 3);
        assert!(sys1.rows.iter().all(|(_, e)| e.iter().all(|&x| x == 0)));
    }

    #[test]
    fn kernel_vectors_satisfy_vanishing_conditions() {
        use rand::{Rng, SeedableRng};
        let f5 = f(5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let mut values = BTreeMap::new();
            for _ in 0..rng.random_range(1..4) {
                let p = vec![
                    f5.element(rng.random_range(0..5)),
                    f5.element(rng.random_range(0..5)),
                ];
                values.insert(p, rng.random_range(1..3u32));
            }
            let mult = MultiplicityFunction::new(2, values, &f5);
            let cert = find_vanishing_poly(&mult, 3, &f5, &caps()).unwrap();
            if let Some(w) = &cert.witness {
                assert!(verify_witness(w, &mult, &f5).unwrap());
            }
        }
    }

    #[test]
    fn find_vanishing_poly_examples() {
        let f3 = f(3);
        // multiplicity 1 on all 9 points, D = 2: no witness can exist
        let all: BTreeSet<Point> = crate::gf::enum_points(&f3, 2).into_iter().collect();
        let cert = find_vanishing_poly(
            &MultiplicityFunction::indicator(2, &all, &f3),
            2,
            &f3,
            &caps(),
        )
        .unwrap();
        assert_eq!(cert.kind, CertificateKind::KernelTrivial);
        assert_eq!(cert.rank, 6);
        assert_eq!(cert.second_pass_rank, 6);

        // 5 points, D = 2: dimension count guarantees a witness
        let five: BTreeSet<Point> = all.into_iter().take(5).collect();
        let cert5 = find_vanishing_poly(
            &MultiplicityFunction::indicator(2, &five, &f3),
            2,
            &f3,
            &caps(),
        )
        .unwrap();
        assert_eq!(cert5.kind, CertificateKind::WitnessPoly);
        assert!(cert5.hasse_checks_passed);

        // multiplicity 2 at the origin, D = 1: no nonzero linear form
        // vanishes to order 2
        let mult2 = MultiplicityFunction::new(
            2,
            [(vec![FieldElement(0), FieldElement(0)], 2u32)].into_iter().collect(),
            &f3,
        );
        let cert2 = find_vanishing_poly(&mult2, 1, &f3, &caps()).unwrap();
        assert_eq!(cert2.kind, CertificateKind::KernelTrivial);
        assert_eq!(cert2.rank, 3);
    }

    #[test]
    fn kakeya_line_check_examples() {
        let f3 = f(3);
        let all: BTreeSet<Point> = crate::gf::enum_points(&f3, 2).into_iter().collect();
        assert!(kakeya_line_check(&all, 2, &f3, &caps()).unwrap().0);
        let empty = BTreeSet::new();
        let (ok, missing) = kakeya_line_check(&empty, 2, &f3, &caps()).unwrap();
        assert!(!ok);
        assert!(missing.is_some());
        // F_3^2 minus the origin still covers every direction
        let mut dented = all.clone();
        dented.remove(&vec![FieldElement(0), FieldElement(0)]);
        assert!(kakeya_line_check(&dented, 2, &f3, &caps()).unwrap().0);
    }

    #[test]
    fn small_kakeya_sizes_and_checks() {
        for q in [3u64, 5, 7] {
            let fq = f(q);
            let e = build_small_kakeya(&fq, 2, &caps()).unwrap();
            let expected = (q * (q + 1) / 2 + (q - 1) / 2) as usize;
            assert_eq!(e.len(), expected);
        }
        let f5 = f(5);
        assert_eq!(build_small_kakeya(&f5, 2, &caps()).unwrap().len(), 17);
        assert!(matches!(
            build_small_kakeya(&FieldSpec::new(2, 2, None).unwrap(), 2, &caps()),
            Err(Error::EvenCharacteristic)
        ));
        // product construction stays Kakeya in dimension 3
        let f3 = f(3);
        let e3 = build_small_kakeya(&f3, 3, &caps()).unwrap();
        assert!(kakeya_line_check(&e3, 3, &f3, &caps()).unwrap().0);
    }

    #[test]
    fn dvir_check_examples() {
        let f3 = f(3);
        let all: BTreeSet<Point> = crate::gf::enum_points(&f3, 2).into_iter().collect();
        let cert = dvir_check(&all, 2, &f3, &caps()).unwrap();
        assert_eq!(cert.kind, CertificateKind::KernelTrivial);
        // a single line is small: a witness exists for q >= 3
        let line: BTreeSet<Point> =
            (0..3).map(|t| vec![FieldElement(t), FieldElement(0)]).collect();
        let cert_line = dvir_check(&line, 2, &f3, &caps()).unwrap();
        assert_eq!(cert_line.kind, CertificateKind::WitnessPoly);
        let refutation =
            refute_kakeya_claim(&line, 2, cert_line.witness.as_ref().unwrap(), &f3, &caps())
                .unwrap();
        assert!(refutation.missing_direction.is_some());
    }

    #[test]
    fn multiplicity_sz_examples() {
        let f3 = f(3);
        // k=1, m=1, q=3: degree <= 2 vanishing at 3 points
        let c = multiplicity_sz_check(1, 1, &f3, &caps()).unwrap();
        assert_eq!(c.kind, CertificateKind::KernelTrivial);
        // k=2, m=1, q=2
        let f2 = f(2);
        let c2 = multiplicity_sz_check(2, 1, &f2, &caps()).unwrap();
        assert_eq!(c2.kind, CertificateKind::KernelTrivial);
        assert_eq!(c2.dim_pd, 3);
        assert_eq!(c2.constraint_count, 4);
        // k=1, m=2, q=3: 6 constraints on the 6-dimensional space
        let c3 = multiplicity_sz_check(1, 2, &f3, &caps()).unwrap();
        assert_eq!(c3.kind, CertificateKind::KernelTrivial);
        assert_eq!(c3.dim_pd, 6);
        assert_eq!(c3.rank, 6);
    }

    #[test]
    fn linear_forms_product_examples() {
        let f3 = f(3);
        let prod = linear_forms_product(1, &f3, &caps()).unwrap();
        // x(x-1)(x-2) = x^3 - x over F_3
        assert_eq!(prod.degree, 3);
        assert_eq!(prod.min_vanishing_order, 1);
        let expect = MultivariatePolynomial::from_terms(
            1,
            [(vec![3], f3.one()), (vec![1], f3.neg(f3.one()))],
            &f3,
        );
        assert_eq!(prod.poly, expect);
        for v in f3.elements() {
            assert!(prod.poly.eval(&[v], &f3).unwrap().is_zero());
        }
        // class count check for k = 2: degree (q^3 - q)/(q - 1) = 12
        let prod2 = linear_forms_product(2, &f3, &caps()).unwrap();
        assert_eq!(prod2.degree, 12);
        assert_eq!(prod2.min_vanishing_order, 4);
    }

    #[test]
    fn extension_field_paths() {
        // F_4 = F_2[x]/(x^2 + x + 1)
        let f4 = FieldSpec::new(2, 2, Some(vec![1, 1, 1])).unwrap();
        // product of the 4 affine forms x + c is x^4 - x = x^4 + x
        let prod = linear_forms_product(1, &f4, &caps()).unwrap();
        assert_eq!(prod.degree, 4);
        for v in f4.elements() {
            assert!(prod.poly.eval(&[v], &f4).unwrap().is_zero());
        }
        // the full plane over F_4 certifies trivially at D = q - 1 = 3
        let all: BTreeSet<Point> = crate::gf::enum_points(&f4, 2).into_iter().collect();
        let cert = dvir_check(&all, 2, &f4, &caps()).unwrap();
        assert_eq!(cert.kind, CertificateKind::KernelTrivial);
        assert_eq!(cert.rank, 10); // C(5, 2)
        assert!(kakeya_line_check(&all, 2, &f4, &caps()).unwrap().0);
        // multiplicity lemma over the extension field
        let c = multiplicity_sz_check(1, 2, &f4, &caps()).unwrap();
        assert_eq!(c.kind, CertificateKind::KernelTrivial);
    }

    #[test]
    fn leading_form_plane_check_examples() {
        let f2 = f(2);
        // xy(x+y) over F_2 vanishes on every point of P^1, degree 3 boundary
        let x = MultivariatePolynomial::variable(2, 0, &f2);
        let y = MultivariatePolynomial::variable(2, 1, &f2);
        let xpy = x.add(&y, &f2);
        let q = x.mul(&y, &f2).mul(&xpy, &f2);
        let check = leading_form_plane_check(&q, 1, &f2, &caps()).unwrap();
        assert!(check.vanishes_on_all);
        assert_eq!(check.degree_lower_bound, 3);
        assert_eq!(check.degree_bound_ok, Some(true));
        // x alone does not vanish at [1:0]
        let check_x = leading_form_plane_check(&x, 1, &f2, &caps()).unwrap();
        assert!(!check_x.vanishes_on_all);
        // non-homogeneous rejected
        let bad = x.add(&MultivariatePolynomial::constant(2, f2.one()), &f2);
        assert!(matches!(
            leading_form_plane_check(&bad, 1, &f2, &caps()),
            Err(Error::NotHomogeneous)
        ));
    }

    #[test]
    fn plane_checker_agrees_with_pointwise_oracle() {
        use rand::{Rng, SeedableRng};
        let f2 = f(2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..30 {
            // random homogeneous form of degree 2 in 3 variables
            let d = 2u32;
            let mut q = MultivariatePolynomial::zero(3);
            for e in monomials_upto(3, d as u64) {
                if e.iter().sum::<u32>() == d && rng.random_range(0..2) == 1 {
                    q = q.add(&MultivariatePolynomial::monomial(3, e, f2.one()), &f2);
                }
            }
            if q.is_zero() {
                continue;
            }
            let fast = leading_form_plane_check(&q, 2, &f2, &caps()).unwrap();
            // oracle: evaluate on all points of each plane
            let mut all_vanish = true;
            for plane in enum_kplanes(&f2, 3, 2, true, &caps()).unwrap() {
                for p in plane.subspace.points(&f2) {
                    if !q.eval(&p, &f2).unwrap().is_zero() {
                        all_vanish = false;
                    }
                }
            }
            // symbolic vanishing implies pointwise vanishing; over F_2 with
            // degree 2 < q^... the two can differ in general, so only check
            // the forward direction
            if fast.vanishes_on_all {
                assert!(all_vanish);
            }
        }
    }

    #[test]
    fn kplane_bound_examples() {
        let f4 = FieldSpec::new(2, 2, None).unwrap();
        let b = kplane_bound(3, 2, &f4).unwrap();
        assert_eq!(b.closed_form, BigRational::from_integer(27.into()));
        // C(18, 3)/C(6, 3) = 816/20
        assert_eq!(
            b.binomial_form,
            BigRational::new(816.into(), 20.into())
        );
        let f2 = f(2);
        let b2 = kplane_bound(3, 2, &f2).unwrap();
        assert_eq!(b2.binomial_form, BigRational::from_integer(5.into()));
        assert!(kplane_bound(3, 1, &f2).is_err());
    }

    #[test]
    fn kplane_bound_monotone_in_q() {
        let mut prev = BigRational::from_integer(0.into());
        for q in [2u64, 3, 5, 7] {
            let b = kplane_bound(3, 2, &f(q)).unwrap();
            assert!(b.binomial_form > prev);
            prev = b.binomial_form;
        }
    }

    #[test]
    fn kplane_kakeya_check_examples() {
        let f2 = f(2);
        let all: BTreeSet<Point> = crate::gf::enum_points(&f2, 3).into_iter().collect();
        assert!(kplane_kakeya_check(&all, 3, 2, &f2, &caps()).unwrap().0);
        // one fixed 2-plane covers only its own subspace direction
        let planes = enum_kplanes(&f2, 3, 2, true, &caps()).unwrap();
        let single: BTreeSet<Point> = planes[0].points(&f2).into_iter().collect();
        let (ok, missing) = kplane_kakeya_check(&single, 3, 2, &f2, &caps()).unwrap();
        assert!(!ok);
        assert!(missing.is_some());
    }

    #[test]
    fn certificate_json_contract() {
        let f3 = f(3);
        let all: BTreeSet<Point> = crate::gf::enum_points(&f3, 2).into_iter().collect();
        let cert = dvir_check(&all, 2, &f3, &caps()).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["kind"], "kernel_trivial");
        assert_eq!(json["D"], 2);
        assert!(json["verification"]["second_pass_rank"].is_u64());
        assert!(json.get("witness").is_none());
    }
}
