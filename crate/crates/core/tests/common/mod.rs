#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use vlineq_core::{LatticeElement, ScalarField};

pub fn real_vec(dim: usize, mag: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-mag..mag, dim)
}

pub fn positive_vec(dim: usize, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0..hi], dim)
}

pub fn complex_vec(dim: usize, mag: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-mag..mag, -mag..mag).prop_map(|(a, b)| Complex64::new(a, b)), dim)
}

pub fn real(v: &[f64]) -> LatticeElement {
    LatticeElement::real(v).unwrap()
}

pub fn element(field: ScalarField, v: Vec<Complex64>) -> LatticeElement {
    let v = match field {
        ScalarField::Real => v.into_iter().map(|z| Complex64::new(z.re, 0.0)).collect(),
        ScalarField::Complex => v,
    };
    LatticeElement::new(field, v).unwrap()
}

pub fn field() -> impl Strategy<Value = ScalarField> {
    prop_oneof![Just(ScalarField::Real), Just(ScalarField::Complex)]
}

/// Allowance for comparing two grid runs whose optima agree up to rounding.
pub fn ulps(x: f64) -> f64 {
    16.0 * f64::EPSILON * (1.0 + x.abs())
}

pub fn assert_close(a: &LatticeElement, b: &LatticeElement, tol: f64) {
    let d = a.max_abs_diff(b).unwrap();
    assert!(d <= tol, "difference {d} exceeds {tol}: {a:?} vs {b:?}");
}
