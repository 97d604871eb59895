//! Every maximal operator of the laboratory and the associated norms:
//! direction-indexed suprema over lines, anchored curve suprema, Nikodym
//! variants, the k-plane operator, plain and normalized-mixed l^p norms,
//! and ratio reports that empirically test the inequalities.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::path::Path;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{
    enum_directions, enum_kplanes, enum_lines, Direction, KPlane, Line, ParametricCurve, Point,
    Subspace, Variety,
};
use crate::gf::{next_point, FieldElement, FieldSpec};
use crate::rng::{trial_rng, Rng};
use crate::{Caps, Error, Result};

/// A finitely supported map from points of F^n to non-negative reals.
/// Absolute values are taken on construction; zeros are not stored.
#[derive(Debug, Clone)]
pub struct PointFunction {
    field: FieldSpec,
    n: usize,
    values: BTreeMap<Point, f64>,
}

impl PointFunction {
    pub fn new(field: FieldSpec, n: usize, values: BTreeMap<Point, f64>) -> Result<PointFunction> {
        for (p, v) in &values {
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: p.len() });
            }
            if !v.is_finite() {
                return Err(Error::BadParameters("point-function values must be finite".into()));
            }
            if p.iter().any(|c| c.index() >= field.q()) {
                return Err(Error::Parse(format!("coordinate out of range for q = {}", field.q())));
            }
        }
        let values = values
            .into_iter()
            .map(|(p, v)| (p, v.abs()))
            .filter(|(_, v)| *v != 0.0)
            .collect();
        Ok(PointFunction { field, n, values })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: &Point) -> f64 {
        self.values.get(p).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Point, f64)> {
        self.values.iter().map(|(p, &v)| (p, v))
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Unnormalized l^p norm over F^n (the support carries the mass).
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        let vals: Vec<f64> = self.values.values().copied().collect();
        lp_norm(&vals, p, false)
    }

    /// f(x) = 1 at a single point.
    pub fn indicator_point(field: &FieldSpec, point: Point) -> Result<PointFunction> {
        let n = point.len();
        PointFunction::new(field.clone(), n, [(point, 1.0)].into_iter().collect())
    }

    /// Indicator of the x_1-axis.
    pub fn indicator_line(field: &FieldSpec, n: usize) -> Result<PointFunction> {
        let mut values = BTreeMap::new();
        for t in field.elements() {
            let mut p = vec![FieldElement::ZERO; n];
            p[0] = t;
            values.insert(p, 1.0);
        }
        PointFunction::new(field.clone(), n, values)
    }

    /// Constant 1 on all of F^n.
    pub fn indicator_space(field: &FieldSpec, n: usize) -> Result<PointFunction> {
        let mut values = BTreeMap::new();
        let mut p = vec![FieldElement::ZERO; n];
        loop {
            values.insert(p.clone(), 1.0);
            if !next_point(&mut p, field.q()) {
                break;
            }
        }
        PointFunction::new(field.clone(), n, values)
    }

    /// Seeded random function: each point of F^n enters the support with
    /// probability `density`, with value uniform in (0, 1].
    pub fn random(field: &FieldSpec, n: usize, density: f64, rng: &mut Rng) -> PointFunction {
        let mut values = BTreeMap::new();
        let mut p = vec![FieldElement::ZERO; n];
        loop {
            if rng.random::<f64>() < density {
                values.insert(p.clone(), 1.0 - rng.random::<f64>());
            }
            if !next_point(&mut p, field.q()) {
                break;
            }
        }
        PointFunction { field: field.clone(), n, values }
    }

    /// Text format: header "p m n", then rows "x1 ... xn value" with
    /// coordinates as coefficient-vector integers.
    pub fn read_text(reader: impl BufRead, caps: &Caps) -> Result<PointFunction> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty point-function file".into()))??;
        let head: Vec<u64> = header
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|e| Error::Parse(format!("header: {e}"))))
            .collect::<Result<_>>()?;
        let [p, m, n] = head[..] else {
            return Err(Error::Parse("header must be \"p m n\"".into()));
        };
        let field = FieldSpec::new(p, m as usize, None)?;
        let n = n as usize;
        caps.check_enum((field.q() as u128).pow(n as u32))?;
        let mut values = BTreeMap::new();
        for line in lines {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            if tokens.len() != n + 1 {
                return Err(Error::Parse(format!(
                    "expected {} coordinates and a value, got {} tokens",
                    n,
                    tokens.len()
                )));
            }
            let mut point = Vec::with_capacity(n);
            for t in &tokens[..n] {
                let idx: u64 = t.parse().map_err(|e| Error::Parse(format!("coordinate: {e}")))?;
                if idx >= field.q() {
                    return Err(Error::Parse(format!("coordinate {idx} >= q = {}", field.q())));
                }
                point.push(FieldElement(idx));
            }
            let value: f64 =
                tokens[n].parse().map_err(|e| Error::Parse(format!("value: {e}")))?;
            values.insert(point, value);
        }
        PointFunction::new(field, n, values)
    }

    pub fn write_text(&self, mut writer: impl Write) -> Result<()> {
        writeln!(writer, "{} {} {}", self.field.p(), self.field.m(), self.n)?;
        for (p, v) in &self.values {
            let coords: Vec<String> = p.iter().map(|c| c.index().to_string()).collect();
            writeln!(writer, "{} {}", coords.join(" "), v)?;
        }
        Ok(())
    }

    pub fn read_path(path: &Path, caps: &Caps) -> Result<PointFunction> {
        let file = std::fs::File::open(path)?;
        let reader = std::io::BufReader::new(file);
        if path.extension().is_some_and(|e| e == "json") {
            let parsed: PointFunctionFile =
                serde_json::from_reader(reader).map_err(|e| Error::Parse(e.to_string()))?;
            parsed.into_point_function(caps)
        } else {
            Self::read_text(reader, caps)
        }
    }
}

/// JSON form of a point function: {"p", "m", "n", "values": [[[x...], v]]}.
#[derive(Debug, Serialize, Deserialize)]
pub struct PointFunctionFile {
    pub p: u64,
    pub m: usize,
    pub n: usize,
    pub values: Vec<(Vec<u64>, f64)>,
}

impl PointFunctionFile {
    pub fn into_point_function(self, caps: &Caps) -> Result<PointFunction> {
        let field = FieldSpec::new(self.p, self.m, None)?;
        caps.check_enum((field.q() as u128).pow(self.n as u32))?;
        let values = self
            .values
            .into_iter()
            .map(|(coords, v)| (coords.into_iter().map(FieldElement).collect::<Point>(), v))
            .collect();
        PointFunction::new(field, self.n, values)
    }

    pub fn from_point_function(f: &PointFunction) -> PointFunctionFile {
        PointFunctionFile {
            p: f.field.p(),
            m: f.field.m(),
            n: f.n,
            values: f
                .values
                .iter()
                .map(|(p, &v)| (p.iter().map(|c| c.index()).collect(), v))
                .collect(),
        }
    }
}

/// Neumaier compensated summation.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Compensated sum over the values in ascending order; bit-stable under
/// permutation of the inputs.
pub fn sorted_power_sum(mut powers: Vec<f64>) -> f64 {
    powers.sort_by(f64::total_cmp);
    compensated_sum(powers)
}

/// l^p norm of a value list; `normalized` divides the p-th power sum by the
/// number of entries before the final root (needed for mixed norms).
/// Summation is sorted, so the norm is independent of value order.
pub fn lp_norm(values: &[f64], p: f64, normalized: bool) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::BadExponent(p));
    }
    if values.is_empty() {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0f64, |a, &b| a.max(b.abs())));
    }
    let mut sum = sorted_power_sum(values.iter().map(|v| v.abs().powf(p)).collect());
    if normalized {
        sum /= values.len() as f64;
    }
    Ok(sum.powf(1.0 / p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    Directions,
    HyperplanePoints,
    VarietyPoints,
    AmbientPoints,
    Grassmannian,
}

/// The geometric object achieving a supremum.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxWitness {
    Line(Line),
    Curve(ParametricCurve),
    Coset(KPlane),
}

/// Values of a maximal operator over its domain, with the achieving object
/// per domain element.  Re-evaluating a witness reproduces the stored value
/// bit-exactly.
#[derive(Debug, Clone)]
pub struct MaximalResult<K: Ord> {
    pub domain_tag: DomainTag,
    pub values: BTreeMap<K, f64>,
    pub witnesses: BTreeMap<K, MaxWitness>,
}

impl<K: Ord + Serialize> MaximalResult<K> {
    pub fn value_list(&self) -> Vec<f64> {
        self.values.values().copied().collect()
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(&self.value_list(), p, false)
    }

    pub fn witness_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .values
            .iter()
            .map(|(k, v)| {
                serde_json::json!({
                    "domain": k,
                    "value": v,
                    "witness": self.witnesses.get(k),
                })
            })
            .collect();
        serde_json::Value::Array(entries)
    }
}

/// Sum of f over the q points of a line, in parameter order (bit-exact on
/// re-evaluation of the witness).
pub fn line_sum(f: &PointFunction, line: &Line) -> f64 {
    let field = f.field();
    let mut sum = 0.0;
    for t in field.elements() {
        let p: Point = line
            .base
            .iter()
            .zip(line.dir.rep())
            .map(|(&b, &d)| field.add(b, field.mul(t, d)))
            .collect();
        sum += f.get(&p);
    }
    sum
}

/// For each direction, the exact supremum over all q^(n-1) lines with that
/// direction of the sum of f along the line; ties go to the first line in
/// canonical order.
pub fn kakeya_maximal(f: &PointFunction, caps: &Caps) -> Result<MaximalResult<Direction>> {
    let field = f.field();
    let n = f.n();
    caps.check_enum((field.q() as u128).pow(n as u32))?;
    let dirs = enum_directions(field, n, caps)?;
    let per_dir: Vec<(Direction, f64, Line)> = dirs
        .into_par_iter()
        .map(|dir| {
            let mut best = f64::NEG_INFINITY;
            let mut witness = None;
            for base in transversal(field, n, dir.lead()) {
                let line = Line::new(&base, dir.clone(), field);
                let s = line_sum(f, &line);
                if s > best {
                    best = s;
                    witness = Some(line);
                }
            }
            (dir, best, witness.expect("at least one line per direction"))
        })
        .collect();
    let mut values = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    for (dir, v, line) in per_dir {
        values.insert(dir.clone(), v);
        witnesses.insert(dir, MaxWitness::Line(line));
    }
    Ok(MaximalResult { domain_tag: DomainTag::Directions, values, witnesses })
}

fn transversal(field: &FieldSpec, n: usize, fixed: usize) -> Vec<Point> {
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

/// All lines of F^n as degree-1 parametric curves, canonical order.
pub fn all_lines_family(field: &FieldSpec, n: usize, caps: &Caps) -> Result<Vec<ParametricCurve>> {
    Ok(enum_lines(field, n, caps)?.iter().map(|l| l.as_curve(field)).collect())
}

/// Sum of f over the distinct F-points of a curve, optionally excluding the
/// hyperplane {x_n = 0}; deterministic point order.
fn curve_sum(f: &PointFunction, curve: &ParametricCurve, exclude_hyperplane: bool) -> f64 {
    let (pts, _) = curve.points(f.field());
    let mut sum = 0.0;
    for p in &pts {
        if exclude_hyperplane && p[p.len() - 1].is_zero() {
            continue;
        }
        sum += f.get(p);
    }
    sum
}

/// The anchored curve maximal function over F^(n-1): for each w, the sup
/// over family members through (w, 0) of the sum of f over the curve's
/// points off the hyperplane {x_n = 0}.  Empty suprema are zero.
pub fn curve_maximal(
    f: &PointFunction,
    family: &[ParametricCurve],
) -> Result<MaximalResult<Point>> {
    let field = f.field();
    let n = f.n();
    for c in family {
        if c.ambient_dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: c.ambient_dim() });
        }
    }
    // anchor index: w -> curves through (w, 0), in family order
    let curve_data: Vec<(BTreeSet<Point>, f64)> = family
        .par_iter()
        .map(|c| {
            let (pts, _) = c.points(field);
            let sum = curve_sum(f, c, true);
            (pts, sum)
        })
        .collect();
    let mut values: BTreeMap<Point, f64> = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    let mut w = vec![FieldElement::ZERO; n - 1];
    loop {
        values.insert(w.clone(), 0.0);
        if n == 1 || !next_point(&mut w, field.q()) {
            break;
        }
    }
    for (idx, (pts, sum)) in curve_data.iter().enumerate() {
        for p in pts {
            if !p[n - 1].is_zero() {
                continue;
            }
            let anchor: Point = p[..n - 1].to_vec();
            let best = values.get_mut(&anchor).expect("anchor grid is total");
            if *sum > *best {
                *best = *sum;
                witnesses.insert(anchor, MaxWitness::Curve(family[idx].clone()));
            }
        }
    }
    Ok(MaximalResult { domain_tag: DomainTag::HyperplanePoints, values, witnesses })
}

/// Per-anchor curve suprema over the points of a variety (or an arbitrary
/// anchor subset of an ambient variety's F-points), with the full sum over
/// each curve's F-points.  Each curve must pass through its anchor and must
/// not lie in the ambient algebraic set.
pub fn variety_maximal(
    f: &PointFunction,
    anchors: &BTreeSet<Point>,
    families: &BTreeMap<Point, Vec<ParametricCurve>>,
    ambient: &Variety,
) -> Result<MaximalResult<Point>> {
    let field = f.field();
    let mut values = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    for anchor in anchors {
        let mut best = 0.0f64;
        let mut witness = None;
        if let Some(family) = families.get(anchor) {
            for (idx, curve) in family.iter().enumerate() {
                if !curve.contains_point(anchor, field) {
                    return Err(Error::AnchorMissing { index: idx });
                }
                if curve.in_variety(ambient, field)? {
                    return Err(Error::ContainmentViolation { index: idx });
                }
                let s = curve_sum(f, curve, false);
                if s > best {
                    best = s;
                    witness = Some(MaxWitness::Curve(curve.clone()));
                }
            }
        }
        values.insert(anchor.clone(), best);
        if let Some(w) = witness {
            witnesses.insert(anchor.clone(), w);
        }
    }
    Ok(MaximalResult { domain_tag: DomainTag::VarietyPoints, values, witnesses })
}

/// The Nikodym maximal function: per point of F^n, the sup over family
/// curves through the point of the full sum of f along the curve.  No
/// hyperplane exclusion and no containment condition.
pub fn nikodym_maximal(
    f: &PointFunction,
    family: &[ParametricCurve],
) -> Result<MaximalResult<Point>> {
    let field = f.field();
    let n = f.n();
    for c in family {
        if c.ambient_dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: c.ambient_dim() });
        }
    }
    let curve_data: Vec<(BTreeSet<Point>, f64)> = family
        .par_iter()
        .map(|c| {
            let (pts, _) = c.points(field);
            let sum = curve_sum(f, c, false);
            (pts, sum)
        })
        .collect();
    let mut values: BTreeMap<Point, f64> = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    let mut x = vec![FieldElement::ZERO; n];
    loop {
        values.insert(x.clone(), 0.0);
        if !next_point(&mut x, field.q()) {
            break;
        }
    }
    for (idx, (pts, sum)) in curve_data.iter().enumerate() {
        for p in pts {
            let best = values.get_mut(p).expect("domain grid is total");
            if *sum > *best {
                *best = *sum;
                witnesses.insert(p.clone(), MaxWitness::Curve(family[idx].clone()));
            }
        }
    }
    Ok(MaximalResult { domain_tag: DomainTag::AmbientPoints, values, witnesses })
}

/// The k-plane maximal operator T_{n,k}: for each k-subspace, the maximum
/// over its q^(n-k) cosets of the sum of f over the coset.
pub fn kplane_maximal(f: &PointFunction, k: usize, caps: &Caps) -> Result<MaximalResult<Subspace>> {
    let field = f.field();
    let n = f.n();
    let planes = enum_kplanes(field, n, k, true, caps)?;
    let per_plane: Vec<(Subspace, f64, KPlane)> = planes
        .into_par_iter()
        .map(|plane| {
            let sub = plane.subspace;
            let span = sub.points(field);
            let mut best = f64::NEG_INFINITY;
            let mut witness = None;
            for offset in sub.coset_reps(field) {
                let mut sum = 0.0;
                for p in &span {
                    let shifted: Point =
                        p.iter().zip(&offset).map(|(&a, &b)| field.add(a, b)).collect();
                    sum += f.get(&shifted);
                }
                if sum > best {
                    best = sum;
                    witness = Some(KPlane { subspace: sub.clone(), offset });
                }
            }
            (sub, best, witness.expect("at least one coset"))
        })
        .collect();
    let mut values = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    for (sub, v, w) in per_plane {
        values.insert(sub.clone(), v);
        witnesses.insert(sub, MaxWitness::Coset(w));
    }
    Ok(MaximalResult { domain_tag: DomainTag::Grassmannian, values, witnesses })
}

/// Re-evaluate a stored witness; used to confirm witness validity.
pub fn evaluate_witness(f: &PointFunction, witness: &MaxWitness, domain: &DomainTag) -> f64 {
    match witness {
        MaxWitness::Line(line) => line_sum(f, line),
        MaxWitness::Curve(curve) => {
            curve_sum(f, curve, matches!(domain, DomainTag::HyperplanePoints))
        }
        MaxWitness::Coset(plane) => {
            let field = f.field();
            let span = plane.subspace.points(field);
            let mut sum = 0.0;
            for p in &span {
                let shifted: Point =
                    p.iter().zip(&plane.offset).map(|(&a, &b)| field.add(a, b)).collect();
                sum += f.get(&shifted);
            }
            sum
        }
    }
}

/// Rule for picking the complementary subspace in the mixed-norm recursion:
/// drop the basis vector at the line's first (default) or last pivot
/// coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplementRule {
    FirstPivot,
    LastPivot,
}

/// The recursive normalized mixed norm over Gr(F^n, k).
///
/// For k = 1 this is the normalized l^(q_1) norm over lines; for k > 1 the
/// outer normalized l^(q_1) runs over lines pi of the current space, and the
/// inner norm over Gr(pi^c, k-1) of sigma -> g(pi + sigma) recurses with the
/// remaining exponents.
pub fn mixed_norm(
    g: &BTreeMap<Subspace, f64>,
    field: &FieldSpec,
    n: usize,
    exponents: &[f64],
    rule: ComplementRule,
    caps: &Caps,
) -> Result<f64> {
    if exponents.is_empty() {
        return Err(Error::BadParameters("mixed norm needs at least one exponent".into()));
    }
    for &e in exponents {
        if e.is_nan() || e < 1.0 {
            return Err(Error::BadExponent(e));
        }
    }
    let std_basis: Vec<Point> = (0..n)
        .map(|i| {
            let mut v = vec![FieldElement::ZERO; n];
            v[i] = field.one();
            v
        })
        .collect();
    mixed_norm_rec(g, field, &std_basis, &[], exponents, rule, caps)
}

fn mixed_norm_rec(
    g: &BTreeMap<Subspace, f64>,
    field: &FieldSpec,
    basis: &[Point],
    chosen: &[Point],
    exponents: &[f64],
    rule: ComplementRule,
    caps: &Caps,
) -> Result<f64> {
    let dim = basis.len();
    let q1 = exponents[0];
    let dirs = enum_directions(field, dim, caps)?;
    let mut acc: Vec<f64> = Vec::with_capacity(dirs.len());
    for d in &dirs {
        // the line's spanning vector in ambient coordinates
        let mut v = vec![FieldElement::ZERO; basis[0].len()];
        for (c, b) in d.rep().iter().zip(basis) {
            for (vi, &bi) in v.iter_mut().zip(b) {
                *vi = field.add(*vi, field.mul(*c, bi));
            }
        }
        let inner = if exponents.len() == 1 {
            let mut spanning: Vec<Point> = chosen.to_vec();
            spanning.push(v);
            let key = Subspace::from_spanning(&spanning, field);
            g.get(&key).copied().unwrap_or(0.0)
        } else {
            let drop_idx = match rule {
                ComplementRule::FirstPivot => d.lead(),
                ComplementRule::LastPivot => {
                    d.rep().iter().rposition(|c| !c.is_zero()).expect("nonzero direction")
                }
            };
            let sub_basis: Vec<Point> = basis
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop_idx)
                .map(|(_, b)| b.clone())
                .collect();
            let mut sub_chosen = chosen.to_vec();
            sub_chosen.push(v);
            mixed_norm_rec(g, field, &sub_basis, &sub_chosen, &exponents[1..], rule, caps)?
        };
        acc.push(inner);
    }
    lp_norm(&acc, q1, true)
}

/// The mixed-norm exponents of the k-plane estimate:
/// q_i = (n - i)(n - i + 1)/(n - k) for i = 1..k.
pub fn mixedq_exponents(n: usize, k: usize) -> Result<Vec<f64>> {
    if k < 1 || k >= n {
        return Err(Error::BadParameters(format!("need 1 <= k < n, got k={k}, n={n}")));
    }
    Ok((1..=k)
        .map(|i| ((n - i) * (n - i + 1)) as f64 / (n - k) as f64)
        .collect())
}

/// Which inequality a ratio report tests, with its exponent parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum TheoremSpec {
    /// Kakeya maximal over lines: l^n(P^(n-1)) vs q^((n-1)/n) ||f||_n.
    Exp,
    /// Interpolated exponents: l^q vs q_field^((n-1)/q) ||f||_p.
    Shoop { p: f64, q: f64 },
    /// Curve maximal over a variety (flat default: hyperplane + lines).
    Kakeq,
    /// Nikodym over lines: l^n(F^n) vs q_field ||f||_n.
    Nikodym,
    /// Restricted anchor set W on the hyperplane:
    /// max(|W|, q^(n-1))^(1/n) scale.
    RestrictedW,
    /// k-plane conjectural estimate: l^q(Gr) vs |Gr|^(1/q) ||f||_p.
    KplaneConj { k: usize, p: f64, q: f64 },
    /// k-plane mixed-norm estimate with auto-derived exponents.
    MixedQ { k: usize },
}

impl TheoremSpec {
    pub fn label(&self) -> String {
        match self {
            TheoremSpec::Exp => "exp".into(),
            TheoremSpec::Shoop { p, q } => format!("shoop(p={p},q={q})"),
            TheoremSpec::Kakeq => "kakeq".into(),
            TheoremSpec::Nikodym => "nikodym".into(),
            TheoremSpec::RestrictedW => "restricted_W".into(),
            TheoremSpec::KplaneConj { k, p, q } => format!("kplane_conj(k={k},p={p},q={q})"),
            TheoremSpec::MixedQ { k } => format!("mixedq(k={k})"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleStats {
    pub trials: u64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub seed: u64,
}

/// Outcome of one inequality test: the left-hand norm, the theorem's
/// right-hand scale, and their ratio (the empirical constant).
#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub theorem: String,
    pub lhs: f64,
    pub rhs_scale: f64,
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<serde_json::Value>,
}

fn make_report(theorem: &TheoremSpec, lhs: f64, rhs_scale: f64) -> Result<RatioReport> {
    if rhs_scale.is_nan() || rhs_scale <= 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(RatioReport {
        theorem: theorem.label(),
        lhs,
        rhs_scale,
        ratio: lhs / rhs_scale,
        seed: None,
        ensemble: None,
        witnesses: None,
    })
}

/// Compute the ratio report for one function under one theorem tag.
pub fn ratio_report(f: &PointFunction, theorem: &TheoremSpec, caps: &Caps) -> Result<RatioReport> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let field = f.field();
    let n = f.n();
    let qf = field.q() as f64;
    match theorem {
        TheoremSpec::Exp => {
            let result = kakeya_maximal(f, caps)?;
            let lhs = result.lp_norm(n as f64)?;
            let rhs = qf.powf((n as f64 - 1.0) / n as f64) * f.lp_norm(n as f64)?;
            make_report(theorem, lhs, rhs)
        }
        TheoremSpec::Shoop { p, q } => {
            check_shoop_region(n, *p, *q)?;
            let result = kakeya_maximal(f, caps)?;
            let lhs = result.lp_norm(*q)?;
            let rhs = qf.powf((n as f64 - 1.0) / q) * f.lp_norm(*p)?;
            make_report(theorem, lhs, rhs)
        }
        TheoremSpec::Kakeq => {
            let (result, _) = flat_kakeq_maximal(f, caps)?;
            let lhs = result.lp_norm(n as f64)?;
            let rhs = qf.powf((n as f64 - 1.0) / n as f64) * f.lp_norm(n as f64)?;
            make_report(theorem, lhs, rhs)
        }
        TheoremSpec::Nikodym => {
            let family = all_lines_family(field, n, caps)?;
            let result = nikodym_maximal(f, &family)?;
            let lhs = result.lp_norm(n as f64)?;
            let rhs = qf * f.lp_norm(n as f64)?;
            make_report(theorem, lhs, rhs)
        }
        TheoremSpec::RestrictedW => {
            let (result, w_size) = restricted_hyperplane_maximal(f, caps)?;
            let lhs = result.lp_norm(n as f64)?;
            let scale = (w_size as f64).max(qf.powi(n as i32 - 1)).powf(1.0 / n as f64);
            let rhs = scale * f.lp_norm(n as f64)?;
            make_report(theorem, lhs, rhs)
        }
        TheoremSpec::KplaneConj { k, p, q } => {
            check_kplane_region(n, *k, *p, *q)?;
            let result = kplane_maximal(f, *k, caps)?;
            let lhs = result.lp_norm(*q)?;
            let gr = result.values.len() as f64;
            let rhs = gr.powf(1.0 / q) * f.lp_norm(*p)?;
            make_report(theorem, lhs, rhs)
        }
        TheoremSpec::MixedQ { k } => {
            let exps = mixedq_exponents(n, *k)?;
            let result = kplane_maximal(f, *k, caps)?;
            let lhs = mixed_norm(&result.values, field, n, &exps, ComplementRule::FirstPivot, caps)?;
            let rhs = f.lp_norm(n as f64 / *k as f64)?;
            make_report(theorem, lhs, rhs)
        }
    }
}

/// Admissible region of the interpolated estimate: 1 <= p <= n and
/// 1 <= q <= (n-1) p/(p-1), the latter unbounded at p = 1.
pub fn check_shoop_region(n: usize, p: f64, q: f64) -> Result<()> {
    if !(1.0..=n as f64).contains(&p) {
        return Err(Error::ExponentOutOfRange {
            p,
            q,
            detail: format!("need 1 <= p <= n = {n}"),
        });
    }
    if q < 1.0 {
        return Err(Error::ExponentOutOfRange { p, q, detail: "need q >= 1".into() });
    }
    if p > 1.0 {
        let qmax = (n as f64 - 1.0) * p / (p - 1.0);
        if q > qmax + 1e-12 {
            return Err(Error::ExponentOutOfRange {
                p,
                q,
                detail: format!("need q <= (n-1)p/(p-1) = {qmax}"),
            });
        }
    }
    Ok(())
}

/// Admissible region of the k-plane conjecture: 1 <= p <= n/k and
/// q <= (n-k) p/(p-1).
pub fn check_kplane_region(n: usize, k: usize, p: f64, q: f64) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::BadParameters(format!("need 1 <= k <= n, got k={k}")));
    }
    let pmax = n as f64 / k as f64;
    if !(1.0..=pmax).contains(&p) {
        return Err(Error::ExponentOutOfRange {
            p,
            q,
            detail: format!("need 1 <= p <= n/k = {pmax}"),
        });
    }
    if q < 1.0 {
        return Err(Error::ExponentOutOfRange { p, q, detail: "need q >= 1".into() });
    }
    if p > 1.0 {
        let qmax = (n - k) as f64 * p / (p - 1.0);
        if q > qmax + 1e-12 {
            return Err(Error::ExponentOutOfRange {
                p,
                q,
                detail: format!("need q <= (n-k)p/(p-1) = {qmax}"),
            });
        }
    }
    Ok(())
}

/// The flat instance of the variety estimate: W the hyperplane {x_n = 0},
/// anchored families of all lines through each (w, 0) not lying in W.
pub fn flat_kakeq_maximal(
    f: &PointFunction,
    caps: &Caps,
) -> Result<(MaximalResult<Point>, Variety)> {
    let field = f.field();
    let n = f.n();
    let hyperplane = Variety::hyperplane_last_coord(field, n, caps)?;
    let lines = enum_lines(field, n, caps)?;
    let mut families: BTreeMap<Point, Vec<ParametricCurve>> = BTreeMap::new();
    for anchor in hyperplane.points() {
        families.insert(anchor.clone(), Vec::new());
    }
    for line in &lines {
        // lines inside the hyperplane are excluded by the theorem
        if line.dir.rep()[n - 1].is_zero() && line.base[n - 1].is_zero() {
            continue;
        }
        for p in line.points(field) {
            if p[n - 1].is_zero() {
                if let Some(fam) = families.get_mut(&p) {
                    fam.push(line.as_curve(field));
                }
            }
        }
    }
    let anchors: BTreeSet<Point> = hyperplane.points().clone();
    let result = variety_maximal(f, &anchors, &families, &hyperplane)?;
    Ok((result, hyperplane))
}

/// Restricted-W variant on the hyperplane: anchors are the hyperplane
/// points where f is positive (all of them if none are).  Returns the
/// result and |W|.
pub fn restricted_hyperplane_maximal(
    f: &PointFunction,
    caps: &Caps,
) -> Result<(MaximalResult<Point>, usize)> {
    let field = f.field();
    let n = f.n();
    let hyperplane = Variety::hyperplane_last_coord(field, n, caps)?;
    let supported: BTreeSet<Point> = f
        .support()
        .map(|(p, _)| p.clone())
        .filter(|p| hyperplane.contains_point(p))
        .collect();
    let anchors = if supported.is_empty() { hyperplane.points().clone() } else { supported };
    let lines = enum_lines(field, n, caps)?;
    let mut families: BTreeMap<Point, Vec<ParametricCurve>> = BTreeMap::new();
    for anchor in &anchors {
        families.insert(anchor.clone(), Vec::new());
    }
    for line in &lines {
        if line.dir.rep()[n - 1].is_zero() && line.base[n - 1].is_zero() {
            continue;
        }
        for p in line.points(field) {
            if let Some(fam) = families.get_mut(&p) {
                fam.push(line.as_curve(field));
            }
        }
    }
    let w_size = anchors.len();
    let result = variety_maximal(f, &anchors, &families, &hyperplane)?;
    Ok((result, w_size))
}

/// Run a seeded ensemble of random functions under one theorem; returns
/// per-trial ratios and the summary statistics.
pub fn ensemble_ratios(
    field: &FieldSpec,
    n: usize,
    theorem: &TheoremSpec,
    trials: u64,
    seed: u64,
    density: f64,
    caps: &Caps,
) -> Result<(Vec<(u64, f64)>, EnsembleStats)> {
    if trials < 1 {
        return Err(Error::BadParameters("trials must be >= 1".into()));
    }
    let rows: Vec<(u64, f64)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mut f = PointFunction::random(field, n, density, &mut rng);
            let mut attempts = 0;
            while f.is_zero() && attempts < 64 {
                f = PointFunction::random(field, n, density, &mut rng);
                attempts += 1;
            }
            if f.is_zero() {
                f = PointFunction::indicator_point(field, vec![FieldElement::ZERO; n])
                    .expect("indicator construction");
            }
            let report = ratio_report(&f, theorem, caps)?;
            Ok((trial, report.ratio))
        })
        .collect::<Result<_>>()?;
    let max_ratio = rows.iter().fold(f64::NEG_INFINITY, |a, &(_, r)| a.max(r));
    let mean_ratio = compensated_sum(rows.iter().map(|&(_, r)| r)) / rows.len() as f64;
    Ok((rows, EnsembleStats { trials, max_ratio, mean_ratio, seed }))
}

/// Lower-bound check for a Kakeya-type set configuration: verifies the
/// lambda hypothesis |E ∩ gamma_j(F)| >= lambda per anchored curve and
/// reports the empirical constant C = (J lambda^n / (|E| q^(n-1)))^(1/n).
#[derive(Debug, Clone, Serialize)]
pub struct KakeyaSetReport {
    pub curve_count: usize,
    pub lambda: u64,
    pub set_size: usize,
    pub empirical_constant: f64,
}

pub fn kakeya_set_report(
    set: &BTreeSet<Point>,
    anchored_curves: &[(Point, ParametricCurve)],
    lambda: u64,
    ambient: Option<&Variety>,
    field: &FieldSpec,
    n: usize,
) -> Result<KakeyaSetReport> {
    let mut seen_anchors = BTreeSet::new();
    for (idx, (anchor, curve)) in anchored_curves.iter().enumerate() {
        if !seen_anchors.insert(anchor.clone()) {
            return Err(Error::BadParameters(format!("anchor {idx} repeats")));
        }
        if !curve.contains_point(anchor, field) {
            return Err(Error::AnchorMissing { index: idx });
        }
        if let Some(u) = ambient {
            if curve.in_variety(u, field)? {
                return Err(Error::ContainmentViolation { index: idx });
            }
        }
        let (pts, _) = curve.points(field);
        let got = pts.iter().filter(|p| set.contains(*p)).count();
        if (got as u64) < lambda {
            return Err(Error::IntersectionTooSmall { index: idx, got, need: lambda });
        }
    }
    let j = anchored_curves.len();
    let qf = field.q() as f64;
    let c_hat = ((j as f64) * (lambda as f64).powi(n as i32)
        / ((set.len() as f64) * qf.powi(n as i32 - 1)))
    .powf(1.0 / n as f64);
    Ok(KakeyaSetReport {
        curve_count: j,
        lambda,
        set_size: set.len(),
        empirical_constant: c_hat,
    })
}
