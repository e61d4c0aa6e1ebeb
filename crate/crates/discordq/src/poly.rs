//! Sparse multivariate polynomials with complex coefficients.
//!
//! Exponent vectors are short `u8` slices (arity 4 for phase-space states,
//! arity 10 after the five-point assembly). Terms live in a `BTreeMap` so
//! iteration — and therefore floating-point summation order — is
//! deterministic.

use num_complex::Complex64;
use std::collections::BTreeMap;

/// Coefficients with modulus below this are dropped.
const PRUNE_EPS: f64 = 1e-300;

/// A sparse polynomial in `arity` real variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoly {
    arity: usize,
    terms: BTreeMap<Vec<u8>, Complex64>,
}

impl SparsePoly {
    /// The zero polynomial in `arity` variables.
    pub fn zero(arity: usize) -> Self {
        Self { arity, terms: BTreeMap::new() }
    }

    /// The constant polynomial `value`.
    pub fn constant(arity: usize, value: Complex64) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(&vec![0u8; arity], value);
        p
    }

    /// The constant polynomial 1.
    pub fn one(arity: usize) -> Self {
        Self::constant(arity, Complex64::new(1.0, 0.0))
    }

    /// The monomial `coeff · x_idx`.
    pub fn variable(arity: usize, idx: usize, coeff: Complex64) -> Self {
        assert!(idx < arity);
        let mut e = vec![0u8; arity];
        e[idx] = 1;
        let mut p = Self::zero(arity);
        p.add_term(&e, coeff);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs.
    pub fn from_terms(arity: usize, terms: &[(&[u8], Complex64)]) -> Self {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            p.add_term(e, *c);
        }
        p
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates terms in lexicographic exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], Complex64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Adds `coeff · x^expo`, merging with an existing term and pruning.
    pub fn add_term(&mut self, expo: &[u8], coeff: Complex64) {
        assert_eq!(expo.len(), self.arity, "exponent arity mismatch");
        let entry = self.terms.entry(expo.to_vec()).or_insert(Complex64::new(0.0, 0.0));
        *entry += coeff;
        if entry.re.abs() < PRUNE_EPS && entry.im.abs() < PRUNE_EPS {
            self.terms.remove(expo);
        }
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        out
    }

    /// `self · k`.
    pub fn scale(&self, k: Complex64) -> Self {
        let mut out = Self::zero(self.arity);
        for (e, c) in self.terms() {
            out.add_term(e, c * k);
        }
        out
    }

    /// `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut out = Self::zero(self.arity);
        let mut expo = vec![0u8; self.arity];
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                for i in 0..self.arity {
                    expo[i] = ea[i]
                        .checked_add(eb[i])
                        .expect("exponent overflow in polynomial product");
                }
                out.add_term(&expo, ca * cb);
            }
        }
        out
    }

    /// Evaluates at a real point.
    pub fn eval(&self, point: &[f64]) -> Complex64 {
        assert_eq!(point.len(), self.arity);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in self.terms() {
            let mut m = 1.0;
            for (x, &p) in point.iter().zip(e.iter()) {
                m *= x.powi(p as i32);
            }
            acc += c * m;
        }
        acc
    }

    /// Largest |Im coefficient| — used to enforce realness invariants.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Drops imaginary parts below `tol` (absolute).
    pub fn realified(&self, tol: f64) -> Self {
        let mut out = Self::zero(self.arity);
        for (e, c) in self.terms() {
            let im = if c.im.abs() < tol { 0.0 } else { c.im };
            out.add_term(e, Complex64::new(c.re, im));
        }
        out
    }

    /// Substitutes each variable by a linear form over a new variable set:
    /// variable `i` becomes `Σ coeff · y_idx` over `map[i]`. Returns the
    /// expanded polynomial in `out_arity` variables.
    pub fn compose_linear(&self, out_arity: usize, map: &[Vec<(usize, f64)>]) -> Self {
        assert_eq!(map.len(), self.arity, "substitution map arity mismatch");
        let mut out = Self::zero(out_arity);
        for (expo, coeff) in self.terms() {
            let mut term = Self::constant(out_arity, coeff);
            for (var, &e) in expo.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut lin = Self::zero(out_arity);
                for &(idx, c) in &map[var] {
                    lin.add_term(
                        &unit_expo(out_arity, idx),
                        Complex64::new(c, 0.0),
                    );
                }
                for _ in 0..e {
                    term = term.mul(&lin);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

fn unit_expo(arity: usize, idx: usize) -> Vec<u8> {
    let mut e = vec![0u8; arity];
    e[idx] = 1;
    e
}
