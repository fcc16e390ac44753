//! Sparse multivariate polynomials with complex coefficients.
//!
//! Coefficients of the invariant forms are dyadic rationals at desk scale, so
//! construction and algebra stay exact in f64; only evaluation rounds.

use num_complex::Complex64;
use std::collections::BTreeMap;

/// Monomial: sorted list of (variable index, exponent), exponents ≥ 1.
pub type Monomial = Vec<(u16, u8)>;

/// Sparse polynomial ℂ[v₀, …, v_{m−1}].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Complex64>,
}

fn is_zero(c: Complex64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut p = Poly::default();
        if !is_zero(c) {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn one() -> Self {
        Poly::constant(Complex64::new(1.0, 0.0))
    }

    pub fn var(v: u16) -> Self {
        let mut p = Poly::default();
        p.terms.insert(vec![(v, 1)], Complex64::new(1.0, 0.0));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Monomial, c: Complex64) {
        if is_zero(c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                // Drop exact cancellations so zero forms stay structurally zero.
                if is_zero(v) {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -*c;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        if is_zero(s) {
            return Poly::zero();
        }
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(merge_monomials(ma, mb), ca * cb);
            }
        }
        out
    }

    pub fn conj(&self) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.conj());
        }
        out
    }

    /// Partial derivative with respect to variable v.
    pub fn diff(&self, v: u16) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            if let Some(pos) = m.iter().position(|&(w, _)| w == v) {
                let (_, e) = m[pos];
                let mut reduced = m.clone();
                if e == 1 {
                    reduced.remove(pos);
                } else {
                    reduced[pos].1 = e - 1;
                }
                out.add_term(reduced, c * e as f64);
            }
        }
        out
    }

    /// Variables actually appearing in the polynomial.
    pub fn variables(&self) -> Vec<u16> {
        let mut vars: Vec<u16> = self
            .terms
            .keys()
            .flat_map(|m| m.iter().map(|&(v, _)| v))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn eval(&self, values: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut factor = 1.0;
            for &(v, e) in m {
                factor *= values[v as usize].powi(e as i32);
            }
            acc += c * factor;
        }
        acc
    }
}

fn merge_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: Monomial = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
