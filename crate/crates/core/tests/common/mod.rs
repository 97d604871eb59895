#![allow(dead_code)]

//! Shared oracles for the integration suites: independent, brute-force
//! evaluation paths the production code is checked against.

use std::collections::{BTreeMap, BTreeSet};

use kakeya_core::geometry::{enum_kplanes, Point, Subspace};
use kakeya_core::gf::{next_point, FieldElement, FieldSpec};
use kakeya_core::maximal::lp_norm;
use kakeya_core::Caps;

/// Nested-sum evaluation of the k = 2 normalized mixed norm, written
/// directly from the recursive definition with explicit loops and
/// brute-force subspace construction.
pub fn mixed_norm_oracle_k2(
    g: &BTreeMap<Subspace, f64>,
    field: &FieldSpec,
    n: usize,
    q1: f64,
    q2: f64,
) -> f64 {
    let caps = Caps::default();
    let lines = enum_kplanes(field, n, 1, true, &caps).unwrap();
    let mut outer = Vec::new();
    for line in &lines {
        let pi = &line.subspace;
        let pivot = pi.pivots()[0];
        let comp_basis: Vec<Point> = (0..n)
            .filter(|&i| i != pivot)
            .map(|i| {
                let mut v = vec![FieldElement::ZERO; n];
                v[i] = field.one();
                v
            })
            .collect();
        let mut inner_keys = BTreeSet::new();
        let mut coeffs = vec![FieldElement::ZERO; comp_basis.len()];
        loop {
            if coeffs.iter().any(|c| !c.is_zero()) {
                let mut v = vec![FieldElement::ZERO; n];
                for (c, b) in coeffs.iter().zip(&comp_basis) {
                    for (vi, &bi) in v.iter_mut().zip(b) {
                        *vi = field.add(*vi, field.mul(*c, bi));
                    }
                }
                let span = vec![pi.basis()[0].clone(), v];
                inner_keys.insert(Subspace::from_spanning(&span, field));
            }
            if !next_point(&mut coeffs, field.q()) {
                break;
            }
        }
        let inner_vals: Vec<f64> =
            inner_keys.iter().map(|k| g.get(k).copied().unwrap_or(0.0)).collect();
        outer.push(lp_norm(&inner_vals, q2, true).unwrap());
    }
    lp_norm(&outer, q1, true).unwrap()
}

/// Binomial coefficient by Pascal's triangle over u128; independent of the
/// big-integer multiplicative route used in production.
pub fn binomial_pascal(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut row: Vec<u128> = vec![1];
    for _ in 0..n {
        let mut next = vec![1u128];
        for w in row.windows(2) {
            next.push(w[0] + w[1]);
        }
        next.push(1);
        row = next;
    }
    row[k as usize]
}

/// All points of F^n.
pub fn all_points(field: &FieldSpec, n: usize) -> Vec<Point> {
    let mut out = Vec::new();
    let mut p = vec![FieldElement::ZERO; n];
    loop {
        out.push(p.clone());
        if !next_point(&mut p, field.q()) {
            break;
        }
    }
    out
}
