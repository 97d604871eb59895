//! Enumeration and incidence for the averaging objects: directions, lines,
//! k-planes, parametric curves, and varieties cut out by explicit
//! polynomials.
//!
//! All enumerators are exhaustive, duplicate-free, and deterministic;
//! canonical forms make equality of geometric objects equality of values.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::gf::{next_point, FieldElement, FieldSpec, MultivariatePolynomial, UniPolynomial};
use crate::{Caps, Error, Result};

pub type Point = Vec<FieldElement>;

/// A point of P^(n-1)(F): a nonzero vector scaled so its first nonzero
/// coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction {
    rep: Vec<FieldElement>,
}

impl Direction {
    pub fn new(v: &[FieldElement], field: &FieldSpec) -> Result<Direction> {
        let lead = v.iter().position(|c| !c.is_zero()).ok_or(Error::DegenerateDirection)?;
        let inv = field.inv(v[lead])?;
        let rep = v.iter().map(|&c| field.mul(c, inv)).collect();
        Ok(Direction { rep })
    }

    pub fn rep(&self) -> &[FieldElement] {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    /// Index of the leading 1.
    pub fn lead(&self) -> usize {
        self.rep.iter().position(|c| !c.is_zero()).expect("directions are nonzero")
    }
}

/// Exhaustive direction list in lexicographic order of canonical
/// representatives; count is (q^n - 1)/(q - 1).
pub fn enum_directions(field: &FieldSpec, n: usize, caps: &Caps) -> Result<Vec<Direction>> {
    if n < 1 {
        return Err(Error::BadParameters("n must be >= 1".into()));
    }
    let q = field.q() as u128;
    let count = (q.pow(n as u32) - 1) / (q - 1);
    caps.check_enum(count)?;
    let mut out = Vec::with_capacity(count as usize);
    for lead in (0..n).rev() {
        let tail_len = n - lead - 1;
        let mut tail = vec![FieldElement::ZERO; tail_len];
        loop {
            let mut rep = vec![FieldElement::ZERO; n];
            rep[lead] = field.one();
            rep[lead + 1..].copy_from_slice(&tail);
            out.push(Direction { rep });
            if tail_len == 0 || !next_point(&mut tail, field.q()) {
                break;
            }
        }
    }
    Ok(out)
}

/// A point of P^n(F) under the affine-chart convention:
/// P^n(F) = F^n (finite chart) plus P^(n-1)(F) (the hyperplane at
/// infinity), with an explicit chart tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "chart", rename_all = "snake_case")]
pub enum ProjPoint {
    Affine { coords: Point },
    Infinity { direction: Direction },
}

impl ProjPoint {
    /// From homogeneous coordinates [x_1 : ... : x_{n+1}], last coordinate
    /// the chart divider.
    pub fn from_homogeneous(coords: &[FieldElement], field: &FieldSpec) -> Result<ProjPoint> {
        let (last, head) = coords.split_last().ok_or(Error::DegenerateDirection)?;
        if last.is_zero() {
            Ok(ProjPoint::Infinity { direction: Direction::new(head, field)? })
        } else {
            let inv = field.inv(*last)?;
            Ok(ProjPoint::Affine {
                coords: head.iter().map(|&c| field.mul(c, inv)).collect(),
            })
        }
    }
}

/// All points of P^n(F) through the chart decomposition; count is
/// (q^(n+1) - 1)/(q - 1).
pub fn enum_proj_points(field: &FieldSpec, n: usize, caps: &Caps) -> Result<Vec<ProjPoint>> {
    let q = field.q() as u128;
    let count = (q.pow(n as u32 + 1) - 1) / (q - 1);
    caps.check_enum(count)?;
    let mut out: Vec<ProjPoint> = Vec::with_capacity(count as usize);
    let mut p = vec![FieldElement::ZERO; n];
    loop {
        out.push(ProjPoint::Affine { coords: p.clone() });
        if !next_point(&mut p, field.q()) {
            break;
        }
    }
    for direction in enum_directions(field, n, caps)? {
        out.push(ProjPoint::Infinity { direction });
    }
    Ok(out)
}

/// A line {base + t dir : t in F}, base canonicalized to the unique point
/// whose coordinate at the direction's leading index is zero (the
/// lexicographically least point of the line).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Line {
    pub base: Point,
    pub dir: Direction,
}

impl Line {
    pub fn new(base: &[FieldElement], dir: Direction, field: &FieldSpec) -> Line {
        let lead = dir.lead();
        let t = field.neg(base[lead]);
        let canonical: Point = base
            .iter()
            .zip(dir.rep())
            .map(|(&b, &d)| field.add(b, field.mul(t, d)))
            .collect();
        Line { base: canonical, dir }
    }

    pub fn points(&self, field: &FieldSpec) -> Vec<Point> {
        field
            .elements()
            .map(|t| {
                self.base
                    .iter()
                    .zip(self.dir.rep())
                    .map(|(&b, &d)| field.add(b, field.mul(t, d)))
                    .collect()
            })
            .collect()
    }

    pub fn contains(&self, p: &[FieldElement], field: &FieldSpec) -> bool {
        let lead = self.dir.lead();
        // solve for the parameter via the leading coordinate
        let t = field.sub(p[lead], self.base[lead]);
        self.base
            .iter()
            .zip(self.dir.rep())
            .zip(p)
            .all(|((&b, &d), &x)| field.add(b, field.mul(t, d)) == x)
    }

    /// The same line as a degree-1 parametric curve.
    pub fn as_curve(&self, _field: &FieldSpec) -> ParametricCurve {
        let comps = self
            .base
            .iter()
            .zip(self.dir.rep())
            .map(|(&b, &d)| UniPolynomial::from_coeffs(vec![b, d]))
            .collect();
        ParametricCurve::new(comps).expect("a line is never constant")
    }
}

/// All lines of F^n: for each direction, one line per point of the
/// transversal hyperplane {x_lead = 0}.
pub fn enum_lines(field: &FieldSpec, n: usize, caps: &Caps) -> Result<Vec<Line>> {
    let q = field.q() as u128;
    let count = q.pow(n as u32 - 1) * ((q.pow(n as u32) - 1) / (q - 1));
    caps.check_enum(count)?;
    let dirs = enum_directions(field, n, caps)?;
    let mut out = Vec::with_capacity(count as usize);
    for dir in dirs {
        for base in transversal_points(field, n, dir.lead()) {
            out.push(Line { base, dir: dir.clone() });
        }
    }
    Ok(out)
}

/// Points of {x_i = 0} in lexicographic order.
fn transversal_points(field: &FieldSpec, n: usize, fixed: usize) -> Vec<Point> {
    let mut out = Vec::new();
    let mut rest = vec![FieldElement::ZERO; n - 1];
    loop {
        let mut p = Vec::with_capacity(n);
        p.extend_from_slice(&rest[..fixed]);
        p.push(FieldElement::ZERO);
        p.extend_from_slice(&rest[fixed..]);
        out.push(p);
        if n == 1 || !next_point(&mut rest, field.q()) {
            break;
        }
    }
    out
}

/// A k-dimensional linear subspace of F^n in reduced echelon form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Subspace {
    basis: Vec<Vec<FieldElement>>,
    pivots: Vec<usize>,
}

impl Subspace {
    /// Canonicalize spanning vectors; zero rows are dropped.
    pub fn from_spanning(vectors: &[Point], field: &FieldSpec) -> Subspace {
        let m = crate::linalg::Matrix::from_rows(vectors.to_vec());
        let (rref, pivots) = m.rref(field);
        let basis = (0..pivots.len()).map(|i| rref.row(i).to_vec()).collect();
        Subspace { basis, pivots }
    }

    pub fn basis(&self) -> &[Vec<FieldElement>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.first().map_or(0, |r| r.len())
    }

    /// All q^k points of the subspace.
    pub fn points(&self, field: &FieldSpec) -> Vec<Point> {
        let k = self.dim();
        let n = self.ambient_dim();
        let mut out = Vec::new();
        let mut coeffs = vec![FieldElement::ZERO; k];
        loop {
            let mut p = vec![FieldElement::ZERO; n];
            for (c, row) in coeffs.iter().zip(&self.basis) {
                for (pi, &ri) in p.iter_mut().zip(row) {
                    *pi = field.add(*pi, field.mul(*c, ri));
                }
            }
            out.push(p);
            if k == 0 || !next_point(&mut coeffs, field.q()) {
                break;
            }
        }
        out
    }

    /// Canonical coset representative: subtract basis multiples until the
    /// pivot coordinates vanish.
    pub fn canonical_offset(&self, offset: &[FieldElement], field: &FieldSpec) -> Point {
        let mut v = offset.to_vec();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = v[pc];
            if c.is_zero() {
                continue;
            }
            for (vi, &ri) in v.iter_mut().zip(row) {
                *vi = field.sub(*vi, field.mul(c, ri));
            }
        }
        v
    }

    /// All q^(n-k) canonical coset representatives, lexicographic over the
    /// non-pivot coordinates.
    pub fn coset_reps(&self, field: &FieldSpec) -> Vec<Point> {
        let n = self.ambient_dim();
        let free: Vec<usize> = (0..n).filter(|c| !self.pivots.contains(c)).collect();
        let mut out = Vec::new();
        let mut vals = vec![FieldElement::ZERO; free.len()];
        loop {
            let mut p = vec![FieldElement::ZERO; n];
            for (&col, &v) in free.iter().zip(&vals) {
                p[col] = v;
            }
            out.push(p);
            if free.is_empty() || !next_point(&mut vals, field.q()) {
                break;
            }
        }
        out
    }

    pub fn contains(&self, p: &[FieldElement], field: &FieldSpec) -> bool {
        self.canonical_offset(p, field).iter().all(|c| c.is_zero())
    }
}

/// An affine k-plane: subspace plus canonical coset representative.
/// Serializes as {"echelon_basis", "offset"}.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KPlane {
    pub subspace: Subspace,
    pub offset: Point,
}

impl Serialize for KPlane {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("KPlane", 2)?;
        s.serialize_field("echelon_basis", self.subspace.basis())?;
        s.serialize_field("offset", &self.offset)?;
        s.end()
    }
}

impl KPlane {
    pub fn new(subspace: Subspace, offset: &[FieldElement], field: &FieldSpec) -> KPlane {
        let offset = subspace.canonical_offset(offset, field);
        KPlane { subspace, offset }
    }

    pub fn points(&self, field: &FieldSpec) -> Vec<Point> {
        self.subspace
            .points(field)
            .into_iter()
            .map(|p| p.iter().zip(&self.offset).map(|(&a, &b)| field.add(a, b)).collect())
            .collect()
    }
}

/// Gaussian binomial [n choose k]_q, exact.
pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::ZERO;
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 1..=k {
        num *= q.pow((n - k + i) as u32) - BigUint::one();
        den *= q.pow(i as u32) - BigUint::one();
    }
    num / den
}

/// All k-subspaces of F^n in reduced echelon form, ordered by pivot-column
/// combination then free entries; with `through_origin = false`, every coset
/// of every subspace.
pub fn enum_kplanes(
    field: &FieldSpec,
    n: usize,
    k: usize,
    through_origin: bool,
    caps: &Caps,
) -> Result<Vec<KPlane>> {
    if k < 1 || k > n {
        return Err(Error::BadParameters(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let gb = gaussian_binomial(field.q(), n, k);
    let limit = BigUint::from(caps.enum_cap);
    if gb > limit {
        return Err(Error::EnumerationTooLarge { size: u128::MAX, cap: caps.enum_cap });
    }
    if !through_origin {
        let cosets = (field.q() as u128).pow((n - k) as u32);
        let total = gb.clone() * BigUint::from(cosets);
        if total > limit {
            return Err(Error::EnumerationTooLarge { size: u128::MAX, cap: caps.enum_cap });
        }
    }
    let mut out = Vec::new();
    for pivots in combinations(n, k) {
        // free cells: (row i, col j) with j > pivots[i], j not a pivot
        let mut free_cells = Vec::new();
        for (i, &p) in pivots.iter().enumerate() {
            for j in (p + 1)..n {
                if !pivots.contains(&j) {
                    free_cells.push((i, j));
                }
            }
        }
        let mut vals = vec![FieldElement::ZERO; free_cells.len()];
        loop {
            let mut basis = vec![vec![FieldElement::ZERO; n]; k];
            for (i, &p) in pivots.iter().enumerate() {
                basis[i][p] = field.one();
            }
            for (&(i, j), &v) in free_cells.iter().zip(&vals) {
                basis[i][j] = v;
            }
            let sub = Subspace { basis, pivots: pivots.clone() };
            if through_origin {
                out.push(KPlane { offset: vec![FieldElement::ZERO; n], subspace: sub });
            } else {
                for offset in sub.coset_reps(field) {
                    out.push(KPlane { subspace: sub.clone(), offset });
                }
            }
            if free_cells.is_empty() || !next_point(&mut vals, field.q()) {
                break;
            }
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// A polynomial map t -> (g_1(t), ..., g_n(t)) from the affine line,
/// not all components constant.  `degree` is the maximal component degree,
/// an upper bound for the geometric degree of the image closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParametricCurve {
    components: Vec<UniPolynomial>,
    degree: u32,
}

impl ParametricCurve {
    pub fn new(components: Vec<UniPolynomial>) -> Result<ParametricCurve> {
        if components.iter().all(|c| c.is_constant()) {
            return Err(Error::BadParameters("all curve components are constant".into()));
        }
        let degree = components.iter().filter_map(|c| c.degree()).max().unwrap_or(0) as u32;
        Ok(ParametricCurve { components, degree })
    }

    pub fn components(&self) -> &[UniPolynomial] {
        &self.components
    }

    pub fn ambient_dim(&self) -> usize {
        self.components.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn eval(&self, t: FieldElement, field: &FieldSpec) -> Point {
        self.components.iter().map(|c| c.eval(t, field)).collect()
    }

    /// Deduplicated image plus the fiber-size map used in Bezout
    /// accounting.
    pub fn points(&self, field: &FieldSpec) -> (BTreeSet<Point>, BTreeMap<Point, usize>) {
        let mut fibers: BTreeMap<Point, usize> = BTreeMap::new();
        for t in field.elements() {
            *fibers.entry(self.eval(t, field)).or_insert(0) += 1;
        }
        (fibers.keys().cloned().collect(), fibers)
    }

    pub fn contains_point(&self, p: &[FieldElement], field: &FieldSpec) -> bool {
        field.elements().any(|t| self.eval(t, field) == p)
    }

    /// Geometric containment in a variety: the composition with every
    /// defining polynomial is the identically-zero univariate polynomial,
    /// not merely zero on every F-point.
    pub fn in_variety(&self, variety: &Variety, field: &FieldSpec) -> Result<bool> {
        for poly in variety.defining_polys() {
            if poly.n_vars() != self.ambient_dim() {
                return Err(Error::DimensionMismatch {
                    expected: poly.n_vars(),
                    got: self.ambient_dim(),
                });
            }
            if !poly.compose_univariate(&self.components, field)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Componentwise composition with a linear map given as an n x N
    /// matrix; the output degree never exceeds the input degree.
    pub fn project(&self, matrix: &[Vec<FieldElement>], field: &FieldSpec) -> Result<ParametricCurve> {
        let n_cols = matrix.first().map_or(0, |r| r.len());
        if n_cols != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), got: n_cols });
        }
        let components: Vec<UniPolynomial> = matrix
            .iter()
            .map(|row| {
                let mut acc = UniPolynomial::zero();
                for (&c, comp) in row.iter().zip(&self.components) {
                    acc = acc.add(&comp.scale(c, field), field);
                }
                acc
            })
            .collect();
        if components.iter().all(|c| c.is_constant()) {
            return Err(Error::BadParameters("projected curve is constant".into()));
        }
        let degree = components.iter().filter_map(|c| c.degree()).max().unwrap_or(0) as u32;
        debug_assert!(degree <= self.degree);
        Ok(ParametricCurve { components, degree })
    }

    /// Number of F-roots of Q restricted to the curve, counted with
    /// multiplicity; errors if the curve lies in {Q = 0}.
    pub fn bezout_count(&self, q_poly: &MultivariatePolynomial, field: &FieldSpec) -> Result<u64> {
        let comp = q_poly.compose_univariate(&self.components, field)?;
        if comp.is_zero() {
            return Err(Error::CurveContained);
        }
        let mut count = 0u64;
        for t in field.elements() {
            count += comp.root_multiplicity(t, field) as u64;
        }
        debug_assert!(count <= comp.degree().unwrap_or(0) as u64);
        Ok(count)
    }
}

impl Serialize for ParametricCurve {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ParametricCurve", 2)?;
        let comps: Vec<String> = self.components.iter().map(|c| c.to_text()).collect();
        s.serialize_field("components", &comps)?;
        s.serialize_field("degree", &self.degree)?;
        s.end()
    }
}

/// An algebraic set with user-declared dimension and degree; the declared
/// data is validated against the point-count bound d (q+1)^dim at
/// construction.
#[derive(Debug, Clone)]
pub struct Variety {
    defining_polys: Vec<MultivariatePolynomial>,
    declared_dim: usize,
    declared_degree: u64,
    points: BTreeSet<Point>,
}

impl Variety {
    pub fn new(
        defining_polys: Vec<MultivariatePolynomial>,
        declared_dim: usize,
        declared_degree: u64,
        field: &FieldSpec,
        caps: &Caps,
    ) -> Result<Variety> {
        let n = defining_polys
            .first()
            .map(|p| p.n_vars())
            .ok_or(Error::BadParameters("a variety needs at least one defining polynomial".into()))?;
        if defining_polys.iter().any(|p| p.n_vars() != n) {
            return Err(Error::BadParameters("defining polynomials disagree on dimension".into()));
        }
        caps.check_enum((field.q() as u128).pow(n as u32))?;
        let mut points = BTreeSet::new();
        let mut point = vec![FieldElement::ZERO; n];
        loop {
            if defining_polys.iter().all(|p| p.eval(&point, field).unwrap().is_zero()) {
                points.insert(point.clone());
            }
            if !next_point(&mut point, field.q()) {
                break;
            }
        }
        let bound = (declared_degree as u128) * ((field.q() + 1) as u128).pow(declared_dim as u32);
        if points.len() as u128 > bound {
            return Err(Error::BadParameters(format!(
                "declared (dim {}, degree {}) admits at most {} points, found {}",
                declared_dim,
                declared_degree,
                bound,
                points.len()
            )));
        }
        Ok(Variety { defining_polys, declared_dim, declared_degree, points })
    }

    /// The hyperplane {x_n = 0} in F^n.
    pub fn hyperplane_last_coord(field: &FieldSpec, n: usize, caps: &Caps) -> Result<Variety> {
        let xn = MultivariatePolynomial::variable(n, n - 1, field);
        Variety::new(vec![xn], n - 1, 1, field, caps)
    }

    pub fn defining_polys(&self) -> &[MultivariatePolynomial] {
        &self.defining_polys
    }

    pub fn declared_dim(&self) -> usize {
        self.declared_dim
    }

    pub fn declared_degree(&self) -> u64 {
        self.declared_degree
    }

    pub fn points(&self) -> &BTreeSet<Point> {
        &self.points
    }

    pub fn ambient_dim(&self) -> usize {
        self.defining_polys[0].n_vars()
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        self.points.contains(p)
    }
}

/// A linear form a x + b y + c on F^2 with (a, b) != 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearForm2 {
    pub x_coeff: FieldElement,
    pub y_coeff: FieldElement,
    pub constant: FieldElement,
}

impl LinearForm2 {
    pub fn new(x_coeff: FieldElement, y_coeff: FieldElement, constant: FieldElement) -> Result<Self> {
        if x_coeff.is_zero() && y_coeff.is_zero() {
            return Err(Error::DegenerateDirection);
        }
        Ok(LinearForm2 { x_coeff, y_coeff, constant })
    }

    /// Direction of the line {form = 0}: (b, -a) up to scalars.
    pub fn line_direction(&self, field: &FieldSpec) -> Direction {
        Direction::new(&[self.y_coeff, field.neg(self.x_coeff)], field)
            .expect("linear part is nonzero")
    }
}

/// An affine conic a x^2 + b xy + c y^2 + d x + e y + g = 0, stored as the
/// canonically scaled coefficient 6-tuple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Conic {
    pub coeffs: [FieldElement; 6],
    pub degenerate: bool,
}

impl Conic {
    pub fn eval(&self, x: FieldElement, y: FieldElement, field: &FieldSpec) -> FieldElement {
        let [a, b, c, d, e, g] = self.coeffs;
        let mut acc = field.mul(field.mul(a, x), x);
        acc = field.add(acc, field.mul(field.mul(b, x), y));
        acc = field.add(acc, field.mul(field.mul(c, y), y));
        acc = field.add(acc, field.mul(d, x));
        acc = field.add(acc, field.mul(e, y));
        field.add(acc, g)
    }

    pub fn points(&self, field: &FieldSpec) -> BTreeSet<Point> {
        let mut out = BTreeSet::new();
        for x in field.elements() {
            for y in field.elements() {
                if self.eval(x, y, field).is_zero() {
                    out.insert(vec![x, y]);
                }
            }
        }
        out
    }

    /// Value of the homogenized conic at a point [x : y : 0] of the line at
    /// infinity: the quadratic part at the direction's representative.
    pub fn at_infinity(&self, dir: &Direction, field: &FieldSpec) -> FieldElement {
        let [a, b, c, ..] = self.coeffs;
        let (x, y) = (dir.rep()[0], dir.rep()[1]);
        let mut acc = field.mul(field.mul(a, x), x);
        acc = field.add(acc, field.mul(field.mul(b, x), y));
        field.add(acc, field.mul(field.mul(c, y), y))
    }
}

/// All conics of the form l * l' + D = 0 over linear forms l' and constants
/// D, deduplicated up to scalar.  A member is degenerate (splits into lines
/// over the closure) exactly when the linear parts of l and l' are
/// proportional, or when D = 0.
pub fn conics_with_asymptote(
    ell: &LinearForm2,
    include_degenerate: bool,
    field: &FieldSpec,
    _caps: &Caps,
) -> Result<Vec<Conic>> {
    if field.q() > 16 {
        return Err(Error::EnumerationTooLarge { size: field.q() as u128, cap: 16 });
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m2 in field.elements() {
        for n2 in field.elements() {
            if m2.is_zero() && n2.is_zero() {
                continue;
            }
            for p2 in field.elements() {
                for dd in field.elements() {
                    // (m1 x + n1 y + c1)(m2 x + n2 y + p2) + D
                    let (m1, n1, c1) = (ell.x_coeff, ell.y_coeff, ell.constant);
                    let a = field.mul(m1, m2);
                    let b = field.add(field.mul(m1, n2), field.mul(n1, m2));
                    let c = field.mul(n1, n2);
                    let d = field.add(field.mul(m1, p2), field.mul(c1, m2));
                    let e = field.add(field.mul(n1, p2), field.mul(c1, n2));
                    let g = field.add(field.mul(c1, p2), dd);
                    let raw = [a, b, c, d, e, g];
                    // proportional linear parts: m1 n2 = n1 m2
                    let proportional = field.mul(m1, n2) == field.mul(n1, m2);
                    let degenerate = proportional || dd.is_zero();
                    if degenerate && !include_degenerate {
                        continue;
                    }
                    let scaled = scale_to_canonical(&raw, field)?;
                    if seen.insert(scaled) {
                        out.push(Conic { coeffs: scaled, degenerate });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn scale_to_canonical(coeffs: &[FieldElement; 6], field: &FieldSpec) -> Result<[FieldElement; 6]> {
    let lead = coeffs.iter().find(|c| !c.is_zero()).copied().ok_or(Error::ZeroPolynomial)?;
    let inv = field.inv(lead)?;
    let mut out = [FieldElement::ZERO; 6];
    for (o, &c) in out.iter_mut().zip(coeffs) {
        *o = field.mul(c, inv);
    }
    Ok(out)
}
