//! Exact arithmetic for finite fields F_{p^m} and multivariate polynomials
//! over them, including Hasse derivatives and hyperplane factor extraction.
//!
//! Elements are stored as canonical indices: the coefficient vector
//! (c_0, ..., c_{m-1}) of the residue class packs to c_0 + c_1 p + ... +
//! c_{m-1} p^{m-1}.  Equality of elements is equality of indices.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Caps, Error, Result};

/// One element of a finite field, identified by its packed coefficient index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(pub u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    pub fn index(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Discrete log / antilog tables, built for q <= 2^16.
#[derive(Debug, Clone)]
struct LogTables {
    /// exp[i] = g^i for 0 <= i < q-1, then repeated once so that
    /// exp[log a + log b] needs no reduction.
    exp: Vec<u64>,
    /// log[e] for e != 0; log[0] is unused.
    log: Vec<u64>,
}

/// Exact arithmetic context for F_{p^m}.
///
/// `modulus` is the monic irreducible of degree m used for reduction,
/// stored as its coefficient list (constant term first, length m+1).
#[derive(Debug, Clone)]
pub struct FieldSpec {
    p: u64,
    m: usize,
    modulus: Vec<u64>,
    q: u64,
    tables: Option<LogTables>,
}

const TABLE_LIMIT: u64 = 1 << 16;
const FIELD_LIMIT: u64 = 1 << 32;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Dense univariate polynomial over F_p, little-endian coefficients.
/// Used only for modulus validation and the default-modulus search.
fn fp_poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    debug_assert!(b[db] == 1, "divisor must be monic");
    let mut r: Vec<u64> = a.to_vec();
    while r.len() > db {
        let lead = *r.last().unwrap() % p;
        let dr = r.len() - 1;
        if lead != 0 {
            for i in 0..=db {
                let idx = dr - db + i;
                let sub = (lead * b[i]) % p;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        while r.len() > 1 && *r.last().unwrap() % p == 0 {
            r.pop();
        }
        if r.iter().all(|&c| c % p == 0) {
            return vec![0];
        }
    }
    r.iter().map(|&c| c % p).collect()
}

fn fp_poly_is_zero(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Trial division of a monic degree-m polynomial by all monic polynomials
/// of degree 1..=m/2 over F_p.
fn is_irreducible_mod_p(poly: &[u64], p: u64) -> bool {
    let m = poly.len() - 1;
    if m == 1 {
        return true;
    }
    for deg in 1..=(m / 2) {
        // monic divisors: deg coefficients run over F_p
        let mut counter = vec![0u64; deg];
        loop {
            let mut divisor = counter.clone();
            divisor.push(1);
            let rem = fp_poly_rem(poly, &divisor, p);
            if fp_poly_is_zero(&rem) {
                return false;
            }
            // advance base-p odometer
            let mut i = 0;
            loop {
                if i == deg {
                    break;
                }
                counter[i] += 1;
                if counter[i] < p {
                    break;
                }
                counter[i] = 0;
                i += 1;
            }
            if i == deg {
                break;
            }
        }
    }
    true
}

/// First monic irreducible of degree m over F_p in lexicographic order of
/// the coefficient list (c_0, c_1, ..., c_{m-1}).
fn default_modulus(p: u64, m: usize) -> Vec<u64> {
    if m == 1 {
        return vec![0, 1];
    }
    let mut counter = vec![0u64; m];
    loop {
        let mut candidate = counter.clone();
        candidate.push(1);
        if is_irreducible_mod_p(&candidate, p) {
            return candidate;
        }
        let mut i = m;
        for j in 0..m {
            counter[j] += 1;
            if counter[j] < p {
                i = j;
                break;
            }
            counter[j] = 0;
        }
        if i == m {
            unreachable!("an irreducible of every degree exists over F_p");
        }
    }
}

/// Construct a validated field; `field_make` in the operation map.
pub fn field_make(p: u64, m: usize, modulus: Option<Vec<u64>>) -> Result<FieldSpec> {
    FieldSpec::new(p, m, modulus)
}

impl FieldSpec {
    pub fn new(p: u64, m: usize, modulus: Option<Vec<u64>>) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if m < 1 {
            return Err(Error::BadParameters("extension degree must be >= 1".into()));
        }
        let q = (p as u128).checked_pow(m as u32).filter(|&q| q <= FIELD_LIMIT as u128).ok_or(
            Error::BadParameters(format!("field size p^m = {}^{} exceeds 2^32", p, m)),
        )? as u64;
        let modulus = match modulus {
            Some(raw) => {
                let reduced: Vec<u64> = raw.iter().map(|&c| c % p).collect();
                if reduced.len() != m + 1 || reduced[m] != 1 {
                    return Err(Error::ReducibleModulus {
                        p,
                        detail: format!("expected a monic coefficient list of degree {}", m),
                    });
                }
                if !is_irreducible_mod_p(&reduced, p) {
                    return Err(Error::ReducibleModulus {
                        p,
                        detail: "trial division found a proper factor".into(),
                    });
                }
                reduced
            }
            None => default_modulus(p, m),
        };
        let mut field = FieldSpec { p, m, modulus, q, tables: None };
        if q <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn element(&self, index: u64) -> FieldElement {
        debug_assert!(index < self.q);
        FieldElement(index % self.q)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// Embed an integer via the prime subfield.
    pub fn from_int(&self, n: u64) -> FieldElement {
        FieldElement(n % self.p)
    }

    /// Canonical coefficient vector (c_0, ..., c_{m-1}).
    pub fn coeffs(&self, a: FieldElement) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.m);
        let mut idx = a.0;
        for _ in 0..self.m {
            v.push(idx % self.p);
            idx /= self.p;
        }
        v
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        debug_assert!(coeffs.len() <= self.m);
        let mut idx = 0u64;
        for &c in coeffs.iter().rev() {
            idx = idx * self.p + (c % self.p);
        }
        FieldElement(idx)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.m == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let (mut ai, mut bi) = (a.0, b.0);
        let mut out = 0u64;
        let mut shift = 1u64;
        for _ in 0..self.m {
            out += ((ai + bi) % self.p) * shift;
            ai /= self.p;
            bi /= self.p;
            shift *= self.p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.m == 1 {
            return FieldElement((self.p - a.0) % self.p);
        }
        let mut ai = a.0;
        let mut out = 0u64;
        let mut shift = 1u64;
        for _ in 0..self.m {
            out += ((self.p - ai % self.p) % self.p) * shift;
            ai /= self.p;
            shift *= self.p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    /// Schoolbook product of coefficient vectors reduced by the modulus.
    fn raw_mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.m == 1 {
            return FieldElement((a.0 * b.0) % self.p);
        }
        let av = self.coeffs(a);
        let bv = self.coeffs(b);
        let mut prod = vec![0u64; 2 * self.m - 1];
        for (i, &ac) in av.iter().enumerate() {
            if ac == 0 {
                continue;
            }
            for (j, &bc) in bv.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ac * bc) % self.p;
            }
        }
        // reduce by the monic modulus
        for d in (self.m..prod.len()).rev() {
            let lead = prod[d];
            if lead == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..self.m {
                let sub = (lead * self.modulus[i]) % self.p;
                prod[d - self.m + i] = (prod[d - self.m + i] + self.p - sub) % self.p;
            }
        }
        self.from_coeffs(&prod[..self.m])
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement(0);
        }
        match &self.tables {
            Some(t) => FieldElement(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => self.raw_mul(a, b),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match &self.tables {
            Some(t) => {
                let l = t.log[a.0 as usize];
                Ok(FieldElement(t.exp[((self.q - 1 - l) % (self.q - 1)) as usize]))
            }
            // a^(q-2) by square and multiply
            None => Ok(self.pow(a, self.q - 2)),
        }
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement(1);
        }
        if a.is_zero() {
            return FieldElement(0);
        }
        let e = e % (self.q - 1);
        if e == 0 {
            return FieldElement(1);
        }
        if let Some(t) = &self.tables {
            let l = (t.log[a.0 as usize] as u128 * e as u128) % (self.q - 1) as u128;
            return FieldElement(t.exp[l as usize]);
        }
        let mut base = a;
        let mut acc = FieldElement(1);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn build_tables(&self) -> LogTables {
        let order = self.q - 1;
        let factors = distinct_prime_factors(order);
        let generator = (1..self.q)
            .map(FieldElement)
            .find(|&g| {
                factors.iter().all(|&f| {
                    let mut acc = FieldElement(1);
                    for _ in 0..order / f {
                        acc = self.raw_mul(acc, g);
                    }
                    acc.0 != 1
                })
            })
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u64; 2 * order as usize];
        let mut log = vec![0u64; self.q as usize];
        let mut acc = FieldElement(1);
        for i in 0..order {
            exp[i as usize] = acc.0;
            exp[(i + order) as usize] = acc.0;
            log[acc.0 as usize] = i;
            acc = self.raw_mul(acc, generator);
        }
        LogTables { exp, log }
    }
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// C(a, b) mod p via Lucas' theorem.
pub fn binomial_mod_p(a: u64, b: u64, p: u64) -> u64 {
    if b > a {
        return 0;
    }
    let (mut a, mut b) = (a, b);
    let mut acc = 1u64;
    while b > 0 || a > 0 {
        let (ad, bd) = (a % p, b % p);
        if bd > ad {
            return 0;
        }
        acc = (acc * small_binomial_mod_p(ad, bd, p)) % p;
        a /= p;
        b /= p;
    }
    acc
}

fn small_binomial_mod_p(a: u64, b: u64, p: u64) -> u64 {
    // a, b < p; multiplicative formula with modular inverses
    let b = b.min(a - b.min(a));
    let mut num = 1u64;
    let mut den = 1u64;
    for j in 0..b {
        num = (num * ((a - j) % p)) % p;
        den = (den * ((j + 1) % p)) % p;
    }
    if den == 0 {
        // cannot happen for a, b < p
        unreachable!()
    }
    (num * mod_inverse(den, p)) % p
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p
    let mut base = a % p;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

pub type Monomial = Vec<u32>;

/// Graded-lexicographic comparison of exponent vectors.
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    let da: u64 = a.iter().map(|&x| x as u64).sum();
    let db: u64 = b.iter().map(|&x| x as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Sparse multivariate polynomial over a finite field.
///
/// Only nonzero coefficients are stored; the zero polynomial has an empty
/// term map and reports degree `None` (the "-inf" marker).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultivariatePolynomial {
    n_vars: usize,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl MultivariatePolynomial {
    pub fn zero(n_vars: usize) -> Self {
        MultivariatePolynomial { n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: FieldElement) -> Self {
        let mut p = Self::zero(n_vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; n_vars], c);
        }
        p
    }

    pub fn monomial(n_vars: usize, exponents: Monomial, c: FieldElement) -> Self {
        debug_assert_eq!(exponents.len(), n_vars);
        let mut p = Self::zero(n_vars);
        if !c.is_zero() {
            p.terms.insert(exponents, c);
        }
        p
    }

    /// x_i as a polynomial.
    pub fn variable(n_vars: usize, i: usize, field: &FieldSpec) -> Self {
        let mut e = vec![0u32; n_vars];
        e[i] = 1;
        Self::monomial(n_vars, e, field.one())
    }

    pub fn from_terms(n_vars: usize, terms: impl IntoIterator<Item = (Monomial, FieldElement)>, field: &FieldSpec) -> Self {
        let mut p = Self::zero(n_vars);
        for (e, c) in terms {
            p.add_term(&e, c, field);
        }
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, FieldElement)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> FieldElement {
        self.terms.get(exponents).copied().unwrap_or(FieldElement::ZERO)
    }

    /// Max total degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(|e| e.iter().map(|&x| x as u64).sum()).max()
    }

    pub fn degree_in_var(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    fn add_term(&mut self, exponents: &[u32], c: FieldElement, field: &FieldSpec) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(exponents) {
            Some(existing) => {
                let s = field.add(*existing, c);
                if s.is_zero() {
                    self.terms.remove(exponents);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(exponents.to_vec(), c);
            }
        }
    }

    pub fn add(&self, other: &Self, field: &FieldSpec) -> Self {
        debug_assert_eq!(self.n_vars, other.n_vars);
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c, field);
        }
        out
    }

    pub fn neg(&self, field: &FieldSpec) -> Self {
        let mut out = Self::zero(self.n_vars);
        for (e, c) in self.terms() {
            out.terms.insert(e.clone(), field.neg(c));
        }
        out
    }

    pub fn sub(&self, other: &Self, field: &FieldSpec) -> Self {
        self.add(&other.neg(field), field)
    }

    pub fn scale(&self, c: FieldElement, field: &FieldSpec) -> Self {
        let mut out = Self::zero(self.n_vars);
        if c.is_zero() {
            return out;
        }
        for (e, t) in self.terms() {
            out.terms.insert(e.clone(), field.mul(t, c));
        }
        out
    }

    pub fn mul(&self, other: &Self, field: &FieldSpec) -> Self {
        debug_assert_eq!(self.n_vars, other.n_vars);
        let mut out = Self::zero(self.n_vars);
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let e: Monomial = ea.iter().zip(eb).map(|(&x, &y)| x + y).collect();
                out.add_term(&e, field.mul(ca, cb), field);
            }
        }
        out
    }

    pub fn pow(&self, e: u32, field: &FieldSpec) -> Self {
        let mut acc = Self::constant(self.n_vars, field.one());
        for _ in 0..e {
            acc = acc.mul(self, field);
        }
        acc
    }

    /// Exact value at a point of F^n.
    pub fn eval(&self, point: &[FieldElement], field: &FieldSpec) -> Result<FieldElement> {
        if point.len() != self.n_vars {
            return Err(Error::DimensionMismatch { expected: self.n_vars, got: point.len() });
        }
        let mut acc = FieldElement::ZERO;
        for (e, c) in self.terms() {
            let mut term = c;
            for (i, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    term = field.mul(term, field.pow(point[i], exp as u64));
                }
            }
            acc = field.add(acc, term);
        }
        Ok(acc)
    }

    /// Coefficient of (x - v)^e in the expansion of the polynomial at v:
    /// the Hasse derivative of multi-order e, evaluated at v.  The
    /// polynomial vanishes to order >= k at v iff this is zero for all
    /// |e| < k.
    pub fn hasse_coefficient(
        &self,
        point: &[FieldElement],
        e: &[u32],
        field: &FieldSpec,
    ) -> Result<FieldElement> {
        if point.len() != self.n_vars || e.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: point.len().max(e.len()),
            });
        }
        let p = field.p();
        let mut acc = FieldElement::ZERO;
        for (a, c) in self.terms() {
            if a.iter().zip(e).any(|(&ai, &ei)| ai < ei) {
                continue;
            }
            let mut term = c;
            for i in 0..self.n_vars {
                let binom = binomial_mod_p(a[i] as u64, e[i] as u64, p);
                if binom == 0 {
                    term = FieldElement::ZERO;
                    break;
                }
                term = field.mul(term, field.from_int(binom));
                term = field.mul(term, field.pow(point[i], (a[i] - e[i]) as u64));
            }
            acc = field.add(acc, term);
        }
        Ok(acc)
    }

    /// Factor P = x_var^j * Q with Q not divisible by x_var, j maximal.
    pub fn factor_out_var(&self, var: usize) -> Result<(u32, Self)> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let j = self.terms.keys().map(|e| e[var]).min().unwrap();
        let mut q = Self::zero(self.n_vars);
        for (e, c) in self.terms() {
            let mut e2 = e.clone();
            e2[var] -= j;
            q.terms.insert(e2, c);
        }
        Ok((j, q))
    }

    /// Exact number of zeros in F^n; checks the Schwartz-Zippel bound
    /// d * q^(n-1) as an internal invariant.
    pub fn zero_count(&self, field: &FieldSpec, caps: &Caps) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let size = (field.q() as u128).checked_pow(self.n_vars as u32).unwrap_or(u128::MAX);
        caps.check_enum(size)?;
        let mut count = 0u64;
        let mut point = vec![FieldElement::ZERO; self.n_vars];
        loop {
            if self.eval(&point, field)?.is_zero() {
                count += 1;
            }
            if !next_point(&mut point, field.q()) {
                break;
            }
        }
        let d = self.degree().unwrap();
        let bound = d.saturating_mul(field.q().pow(self.n_vars as u32 - 1));
        assert!(
            count <= bound,
            "Schwartz-Zippel violated: {} zeros of a degree-{} polynomial over F_{}^{}",
            count,
            d,
            field.q(),
            self.n_vars
        );
        Ok(count)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().map(|&x| x as u64).sum::<u64>());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    /// Terms of maximal total degree, as a homogeneous polynomial.
    pub fn leading_form(&self) -> Self {
        let d = match self.degree() {
            None => return Self::zero(self.n_vars),
            Some(d) => d,
        };
        let mut out = Self::zero(self.n_vars);
        for (e, c) in self.terms() {
            if e.iter().map(|&x| x as u64).sum::<u64>() == d {
                out.terms.insert(e.clone(), c);
            }
        }
        out
    }

    /// Substitute univariate polynomials for the variables, yielding the
    /// univariate composition P(g_1(t), ..., g_n(t)).
    pub fn compose_univariate(
        &self,
        components: &[UniPolynomial],
        field: &FieldSpec,
    ) -> Result<UniPolynomial> {
        if components.len() != self.n_vars {
            return Err(Error::DimensionMismatch { expected: self.n_vars, got: components.len() });
        }
        let mut acc = UniPolynomial::zero();
        for (e, c) in self.terms() {
            let mut term = UniPolynomial::constant(c);
            for (i, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    term = term.mul(&components[i], field);
                }
            }
            acc = acc.add(&term, field);
        }
        Ok(acc)
    }

    /// Substitute linear forms for the variables: x_i -> sum_j M[i][j] s_j.
    /// Used for restricting homogeneous forms to subspaces.
    pub fn compose_linear(&self, rows: &[Vec<FieldElement>], field: &FieldSpec) -> Result<Self> {
        if rows.len() != self.n_vars {
            return Err(Error::DimensionMismatch { expected: self.n_vars, got: rows.len() });
        }
        let s_vars = rows.first().map_or(0, |r| r.len());
        let forms: Vec<MultivariatePolynomial> = rows
            .iter()
            .map(|row| {
                let mut f = Self::zero(s_vars);
                for (j, &c) in row.iter().enumerate() {
                    if !c.is_zero() {
                        let mut e = vec![0u32; s_vars];
                        e[j] = 1;
                        f.add_term(&e, c, field);
                    }
                }
                f
            })
            .collect();
        let mut acc = Self::zero(s_vars);
        for (e, c) in self.terms() {
            let mut term = Self::constant(s_vars, c);
            for (i, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    term = term.mul(&forms[i], field);
                }
            }
            acc = acc.add(&term, field);
        }
        Ok(acc)
    }

    /// Text form "c*x1^a1*...*xn^an + ...", terms in graded-lex order
    /// (leading term first); coefficients as element indices.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Monomial, FieldElement)> = self.terms().collect();
        terms.sort_by(|a, b| grlex_cmp(b.0, a.0));
        let mut parts = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            let mut s = format!("{}", c.0);
            for (i, &exp) in e.iter().enumerate() {
                if exp == 1 {
                    s.push_str(&format!("*x{}", i + 1));
                } else if exp > 1 {
                    s.push_str(&format!("*x{}^{}", i + 1, exp));
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

impl fmt::Display for MultivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Advance a point of F^n in lexicographic order; false when wrapped.
pub fn next_point(point: &mut [FieldElement], q: u64) -> bool {
    for i in (0..point.len()).rev() {
        if point[i].0 + 1 < q {
            point[i] = FieldElement(point[i].0 + 1);
            for v in point[i + 1..].iter_mut() {
                *v = FieldElement(0);
            }
            return true;
        }
    }
    false
}

/// All points of F^n in lexicographic order.
pub fn enum_points(field: &FieldSpec, n: usize) -> Vec<Vec<FieldElement>> {
    let mut out = Vec::new();
    let mut point = vec![FieldElement::ZERO; n];
    loop {
        out.push(point.clone());
        if !next_point(&mut point, field.q()) {
            break;
        }
    }
    out
}

/// Dense univariate polynomial over F_q, little-endian coefficients with
/// trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPolynomial {
    coeffs: Vec<FieldElement>,
}

impl UniPolynomial {
    pub fn zero() -> Self {
        UniPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            UniPolynomial { coeffs: vec![c] }
        }
    }

    pub fn from_coeffs(coeffs: Vec<FieldElement>) -> Self {
        let mut p = UniPolynomial { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coefficient(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, other: &Self, field: &FieldSpec) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(field.add(self.coefficient(i), other.coefficient(i)));
        }
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self, field: &FieldSpec) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            coeffs.push(field.sub(self.coefficient(i), other.coefficient(i)));
        }
        Self::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &Self, field: &FieldSpec) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = field.add(coeffs[i + j], field.mul(a, b));
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: FieldElement, field: &FieldSpec) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn eval(&self, t: FieldElement, field: &FieldSpec) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = field.add(field.mul(acc, t), c);
        }
        acc
    }

    /// Synthetic division by (t - a); returns (quotient, remainder).
    pub fn div_linear(&self, a: FieldElement, field: &FieldSpec) -> (Self, FieldElement) {
        if self.is_zero() {
            return (Self::zero(), FieldElement::ZERO);
        }
        let mut quotient = vec![FieldElement::ZERO; self.coeffs.len() - 1];
        let mut carry = FieldElement::ZERO;
        for i in (0..self.coeffs.len()).rev() {
            let v = field.add(self.coeffs[i], field.mul(carry, a));
            if i == 0 {
                return (Self::from_coeffs(quotient), v);
            }
            quotient[i - 1] = v;
            carry = v;
        }
        unreachable!()
    }

    /// Multiplicity of a as a root (0 if not a root).
    pub fn root_multiplicity(&self, a: FieldElement, field: &FieldSpec) -> usize {
        let mut mult = 0;
        let mut cur = self.clone();
        loop {
            if cur.is_zero() {
                return mult;
            }
            let (quot, rem) = cur.div_linear(a, field);
            if !rem.is_zero() {
                return mult;
            }
            mult += 1;
            cur = quot;
        }
    }

    /// t as a polynomial.
    pub fn identity(field: &FieldSpec) -> Self {
        UniPolynomial { coeffs: vec![FieldElement::ZERO, field.one()] }
    }

    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            match i {
                0 => parts.push(format!("{}", c.0)),
                1 => parts.push(format!("{}*t", c.0)),
                _ => parts.push(format!("{}*t^{}", c.0, i)),
            }
        }
        parts.join(" + ")
    }
}

impl fmt::Display for UniPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::new(p, 1, None).unwrap()
    }

    #[test]
    fn field_make_prime_and_extension() {
        let f3 = FieldSpec::new(3, 1, None).unwrap();
        assert_eq!(f3.q(), 3);
        // F_4 with x^2 + x + 1
        let f4 = FieldSpec::new(2, 2, Some(vec![1, 1, 1])).unwrap();
        assert_eq!(f4.q(), 4);
        assert!(matches!(FieldSpec::new(4, 1, None), Err(Error::NonPrime(4))));
        // x^2 + 1 = (x+1)^2 over F_2 is reducible
        assert!(matches!(
            FieldSpec::new(2, 2, Some(vec![1, 0, 1])),
            Err(Error::ReducibleModulus { .. })
        ));
    }

    #[test]
    fn arithmetic_examples() {
        let f5 = f(5);
        assert_eq!(f5.mul(FieldElement(3), FieldElement(4)), FieldElement(2));
        let f4 = FieldSpec::new(2, 2, Some(vec![1, 1, 1])).unwrap();
        // x * x = x + 1 under x^2 = x + 1
        let x = f4.from_coeffs(&[0, 1]);
        assert_eq!(f4.mul(x, x), f4.from_coeffs(&[1, 1]));
        let f7 = f(7);
        assert_eq!(f7.pow(FieldElement(3), 6), FieldElement(1));
        assert!(matches!(f7.div(FieldElement(1), FieldElement(0)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn field_axioms_random_triples() {
        // associativity, distributivity, inverses over seeded samples
        use rand::{Rng, SeedableRng};
        for field in [f(3), f(7), FieldSpec::new(2, 4, None).unwrap(), FieldSpec::new(3, 2, None).unwrap()] {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
            for _ in 0..10_000 {
                let a = field.element(rng.random_range(0..field.q()));
                let b = field.element(rng.random_range(0..field.q()));
                let c = field.element(rng.random_range(0..field.q()));
                assert_eq!(field.mul(field.mul(a, b), c), field.mul(a, field.mul(b, c)));
                assert_eq!(field.add(field.add(a, b), c), field.add(a, field.add(b, c)));
                assert_eq!(
                    field.mul(a, field.add(b, c)),
                    field.add(field.mul(a, b), field.mul(a, c))
                );
                if !a.is_zero() {
                    assert_eq!(field.mul(a, field.inv(a).unwrap()), field.one());
                }
            }
        }
    }

    #[test]
    fn default_modulus_is_deterministic() {
        let a = FieldSpec::new(2, 3, None).unwrap();
        let b = FieldSpec::new(2, 3, None).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        // first irreducible cubic over F_2 in lex order of (c0,c1,c2): x^3 + x + 1
        assert_eq!(a.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn poly_eval_examples() {
        let f3 = f(3);
        // x^2 + y at (1, 2) over F_3
        let p = MultivariatePolynomial::from_terms(
            2,
            [(vec![2, 0], f3.one()), (vec![0, 1], f3.one())],
            &f3,
        );
        assert_eq!(p.eval(&[FieldElement(1), FieldElement(2)], &f3).unwrap(), FieldElement(0));
        let z = MultivariatePolynomial::zero(2);
        assert_eq!(z.eval(&[FieldElement(2), FieldElement(2)], &f3).unwrap(), FieldElement(0));
        // xy + 1 at (2, 1)
        let p2 = MultivariatePolynomial::from_terms(
            2,
            [(vec![1, 1], f3.one()), (vec![0, 0], f3.one())],
            &f3,
        );
        assert_eq!(p2.eval(&[FieldElement(2), FieldElement(1)], &f3).unwrap(), FieldElement(0));
        assert!(p2.eval(&[FieldElement(1)], &f3).is_err());
    }

    #[test]
    fn hasse_coefficient_examples() {
        let f3 = f(3);
        // (x - 1)^2 = x^2 - 2x + 1 = x^2 + x + 1 over F_3
        let p = MultivariatePolynomial::from_terms(
            1,
            [(vec![2], f3.one()), (vec![1], f3.one()), (vec![0], f3.one())],
            &f3,
        );
        let v = [FieldElement(1)];
        assert_eq!(p.hasse_coefficient(&v, &[0], &f3).unwrap(), FieldElement(0));
        assert_eq!(p.hasse_coefficient(&v, &[1], &f3).unwrap(), FieldElement(0));
        assert_eq!(p.hasse_coefficient(&v, &[2], &f3).unwrap(), FieldElement(1));

        // x^p over F_p: classical derivative vanishes, Hasse coefficient of
        // order p is 1
        for p_char in [2u64, 3, 5] {
            let fp = f(p_char);
            let xp = MultivariatePolynomial::monomial(1, vec![p_char as u32], fp.one());
            let zero = [FieldElement(0)];
            assert_eq!(xp.hasse_coefficient(&zero, &[1], &fp).unwrap(), FieldElement(0));
            assert_eq!(
                xp.hasse_coefficient(&zero, &[p_char as u32], &fp).unwrap(),
                FieldElement(1)
            );
        }
    }

    /// Oracle: shift x -> x + v by repeated multiplication (no binomials),
    /// then read off the stored coefficient.
    fn hasse_via_shift(
        p: &MultivariatePolynomial,
        v: &[FieldElement],
        e: &[u32],
        field: &FieldSpec,
    ) -> FieldElement {
        let n = p.n_vars();
        let mut shifted = MultivariatePolynomial::zero(n);
        for (a, c) in p.terms() {
            let mut term = MultivariatePolynomial::constant(n, c);
            for i in 0..n {
                let xi_plus_vi = MultivariatePolynomial::variable(n, i, field)
                    .add(&MultivariatePolynomial::constant(n, v[i]), field);
                for _ in 0..a[i] {
                    term = term.mul(&xi_plus_vi, field);
                }
            }
            shifted = shifted.add(&term, field);
        }
        shifted.coefficient(e)
    }

    #[test]
    fn hasse_matches_shift_oracle_on_random_polys() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for field in [f(3), f(5), FieldSpec::new(2, 2, None).unwrap()] {
            for _ in 0..25 {
                let n = 2;
                let mut p = MultivariatePolynomial::zero(n);
                for _ in 0..rng.random_range(1..6) {
                    let e: Monomial = (0..n).map(|_| rng.random_range(0..5u32)).collect();
                    let c = field.element(rng.random_range(0..field.q()));
                    p = p.add(&MultivariatePolynomial::monomial(n, e, c), &field);
                }
                let v: Vec<FieldElement> =
                    (0..n).map(|_| field.element(rng.random_range(0..field.q()))).collect();
                for e0 in 0..4u32 {
                    for e1 in 0..4u32 {
                        let e = [e0, e1];
                        assert_eq!(
                            p.hasse_coefficient(&v, &e, &field).unwrap(),
                            hasse_via_shift(&p, &v, &e, &field),
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn hasse_at_origin_reads_stored_coefficient() {
        let f5 = f(5);
        let p = MultivariatePolynomial::from_terms(
            2,
            [(vec![2, 1], FieldElement(3)), (vec![0, 4], FieldElement(2))],
            &f5,
        );
        let origin = [FieldElement(0), FieldElement(0)];
        assert_eq!(p.hasse_coefficient(&origin, &[2, 1], &f5).unwrap(), FieldElement(3));
        assert_eq!(p.hasse_coefficient(&origin, &[0, 4], &f5).unwrap(), FieldElement(2));
        assert_eq!(p.hasse_coefficient(&origin, &[1, 1], &f5).unwrap(), FieldElement(0));
    }

    #[test]
    fn factor_out_examples() {
        let f3 = f(3);
        // x2^2 * (x1 + 1)
        let x1p1 = MultivariatePolynomial::from_terms(
            2,
            [(vec![1, 0], f3.one()), (vec![0, 0], f3.one())],
            &f3,
        );
        let p = x1p1.mul(&MultivariatePolynomial::monomial(2, vec![0, 2], f3.one()), &f3);
        let (j, q) = p.factor_out_var(1).unwrap();
        assert_eq!(j, 2);
        assert_eq!(q, x1p1);
        let (j0, q0) = x1p1.factor_out_var(1).unwrap();
        assert_eq!(j0, 0);
        assert_eq!(q0, x1p1);
        assert!(MultivariatePolynomial::zero(2).factor_out_var(0).is_err());
    }

    #[test]
    fn factor_out_round_trip_random() {
        use rand::{Rng, SeedableRng};
        let f5 = f(5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut p = MultivariatePolynomial::zero(2);
            for _ in 0..rng.random_range(1..5) {
                let e: Monomial = (0..2).map(|_| rng.random_range(0..4u32)).collect();
                p = p.add(
                    &MultivariatePolynomial::monomial(2, e, f5.element(rng.random_range(1..5))),
                    &f5,
                );
            }
            if p.is_zero() {
                continue;
            }
            let var = rng.random_range(0..2);
            let (j, q) = p.factor_out_var(var).unwrap();
            let mut e = vec![0u32; 2];
            e[var] = j;
            let back = q.mul(&MultivariatePolynomial::monomial(2, e, f5.one()), &f5);
            assert_eq!(back, p);
        }
    }

    #[test]
    fn zero_count_examples() {
        let f3 = f(3);
        let caps = Caps::default();
        let p = MultivariatePolynomial::from_terms(
            2,
            [(vec![2, 0], f3.one()), (vec![0, 1], f3.one())],
            &f3,
        );
        assert_eq!(p.zero_count(&f3, &caps).unwrap(), 3);
        // x1 over F_q^n has q^(n-1) zeros
        let x1 = MultivariatePolynomial::variable(3, 0, &f3);
        assert_eq!(x1.zero_count(&f3, &caps).unwrap(), 9);
        let c = MultivariatePolynomial::constant(2, FieldElement(2));
        assert_eq!(c.zero_count(&f3, &caps).unwrap(), 0);
    }

    #[test]
    fn schwartz_zippel_bound_random() {
        use rand::{Rng, SeedableRng};
        let caps = Caps::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for field in [f(3), f(5)] {
            for _ in 0..40 {
                let n = rng.random_range(1..4usize);
                let mut p = MultivariatePolynomial::zero(n);
                for _ in 0..rng.random_range(1..6) {
                    let e: Monomial = (0..n).map(|_| rng.random_range(0..4u32)).collect();
                    let c = field.element(rng.random_range(0..field.q()));
                    p = p.add(&MultivariatePolynomial::monomial(n, e, c), &field);
                }
                if p.is_zero() {
                    continue;
                }
                // zero_count asserts the bound internally
                p.zero_count(&field, &caps).unwrap();
            }
        }
    }

    #[test]
    fn unipoly_division_and_multiplicity() {
        let f5 = f(5);
        // t^2 has root 0 with multiplicity 2
        let t2 = UniPolynomial::from_coeffs(vec![FieldElement(0), FieldElement(0), f5.one()]);
        assert_eq!(t2.root_multiplicity(FieldElement(0), &f5), 2);
        assert_eq!(t2.root_multiplicity(FieldElement(1), &f5), 0);
        // (t - 1)(t - 2) over F_5
        let p = UniPolynomial::from_coeffs(vec![FieldElement(2), FieldElement(2), f5.one()]);
        assert_eq!(p.eval(FieldElement(1), &f5), FieldElement(0));
        assert_eq!(p.eval(FieldElement(2), &f5), FieldElement(0));
        assert_eq!(p.root_multiplicity(FieldElement(1), &f5), 1);
    }

    #[test]
    fn poly_text_form_graded_lex() {
        let f3 = f(3);
        let p = MultivariatePolynomial::from_terms(
            2,
            [(vec![0, 0], f3.one()), (vec![1, 1], FieldElement(2)), (vec![2, 0], f3.one())],
            &f3,
        );
        assert_eq!(p.to_text(), "1*x1^2 + 2*x1*x2 + 1");
    }
}
