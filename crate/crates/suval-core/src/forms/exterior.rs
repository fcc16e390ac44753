//! Differential forms on ℂⁿ × ℂⁿ with polynomial coefficients.
//!
//! Generators are the 4n coordinate one-forms in the fixed layout
//! dx₁, dy₁, …, dx_n, dy_n (indices 0..2n) followed by
//! dξ₁, dη₁, …, dξ_n, dη_n (indices 2n..4n). A wedge monomial is a bitmask
//! over the generators, kept in ascending order with the sign normalized away.

use num_complex::Complex64;
use std::collections::BTreeMap;

use super::poly::Poly;
use super::FormsError;

/// Maximum supported complex dimension (4n generator bits must fit in u64).
pub const MAX_N: usize = 12;

/// Sign picked up when wedging the ascending monomials `a` and `b` into one
/// ascending monomial: (−1)^{#inversions}. Assumes a ∩ b = ∅.
fn merge_sign(a: u64, b: u64) -> f64 {
    let mut inversions = 0u32;
    let mut bits = b;
    while bits != 0 {
        let g = bits.trailing_zeros();
        // Generators of `a` strictly above g must hop over it.
        inversions += (a >> (g + 1)).count_ones();
        bits &= bits - 1;
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Homogeneous differential form with polynomial coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyForm {
    n: usize,
    degree: usize,
    terms: BTreeMap<u64, Poly>,
}

impl PolyForm {
    pub fn zero(n: usize, degree: usize) -> Self {
        assert!(n >= 1 && n <= MAX_N, "complex dimension out of range");
        PolyForm {
            n,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Constant 0-form.
    pub fn scalar(n: usize, c: Complex64) -> Self {
        let mut f = PolyForm::zero(n, 0);
        f.add_term(0, Poly::constant(c));
        f
    }

    /// 0-form with the given coefficient polynomial.
    pub fn from_poly(n: usize, p: Poly) -> Self {
        let mut f = PolyForm::zero(n, 0);
        f.add_term(0, p);
        f
    }

    /// Coordinate one-form for generator index g (0..4n).
    pub fn generator(n: usize, g: usize) -> Self {
        assert!(g < 4 * n);
        let mut f = PolyForm::zero(n, 1);
        f.add_term(1u64 << g, Poly::one());
        f
    }

    pub fn complex_dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, mask: u64, p: Poly) {
        debug_assert_eq!(mask.count_ones() as usize, self.degree);
        if p.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mask) {
            Entry::Vacant(e) => {
                e.insert(p);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().add(&p);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        assert_eq!(self.n, other.n);
        assert_eq!(
            self.degree, other.degree,
            "sum of forms of different degree"
        );
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.add_term(*m, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyForm) -> PolyForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyForm {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> PolyForm {
        let mut out = PolyForm::zero(self.n, self.degree);
        if s.re == 0.0 && s.im == 0.0 {
            return out;
        }
        for (m, p) in &self.terms {
            out.terms.insert(*m, p.scale(s));
        }
        out
    }

    /// Coefficient-wise complex conjugation (the generators are real).
    pub fn conj(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.n, self.degree);
        for (m, p) in &self.terms {
            out.terms.insert(*m, p.conj());
        }
        out
    }

    /// Graded-commutative wedge product.
    pub fn wedge(&self, other: &PolyForm) -> Result<PolyForm, FormsError> {
        if self.n != other.n {
            return Err(FormsError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut out = PolyForm::zero(self.n, self.degree + other.degree);
        for (ma, pa) in &self.terms {
            for (mb, pb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let sign = merge_sign(*ma, *mb);
                out.add_term(ma | mb, pa.mul(pb).scale(Complex64::new(sign, 0.0)));
            }
        }
        Ok(out)
    }

    /// Exterior derivative: d(p · dM) = Σ_v ∂p/∂v · dv ∧ dM.
    pub fn ext_d(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.n, self.degree + 1);
        for (mask, p) in &self.terms {
            for v in p.variables() {
                let gen = 1u64 << v;
                if gen & mask != 0 {
                    continue;
                }
                let dp = p.diff(v);
                let sign = merge_sign(gen, *mask);
                out.add_term(gen | mask, dp.scale(Complex64::new(sign, 0.0)));
            }
        }
        out
    }

    /// Interior product with a vector field whose components are polynomials
    /// (indexed by generator).
    pub fn interior_product(&self, field: &[Poly]) -> PolyForm {
        assert_eq!(field.len(), 4 * self.n);
        assert!(self.degree >= 1);
        let mut out = PolyForm::zero(self.n, self.degree - 1);
        for (mask, p) in &self.terms {
            let mut bits = *mask;
            let mut position = 0u32;
            while bits != 0 {
                let g = bits.trailing_zeros();
                let comp = &field[g as usize];
                if !comp.is_zero() {
                    let sign = if position % 2 == 0 { 1.0 } else { -1.0 };
                    out.add_term(
                        mask & !(1u64 << g),
                        p.mul(comp).scale(Complex64::new(sign, 0.0)),
                    );
                }
                bits &= bits - 1;
                position += 1;
            }
        }
        out
    }

    /// Multilinear antisymmetric evaluation on `degree` tangent vectors
    /// (real 4n-vectors), at the point with variable values `vars`.
    pub fn eval(&self, vars: &[f64], vectors: &[Vec<f64>]) -> Result<Complex64, FormsError> {
        if vectors.len() != self.degree {
            return Err(FormsError::ArityMismatch {
                expected: self.degree,
                got: vectors.len(),
            });
        }
        let d = self.degree;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mat = vec![0.0_f64; d * d];
        for (mask, p) in &self.terms {
            let coeff = p.eval(vars);
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            // Rows: generators of the mask ascending; columns: vectors.
            let mut bits = *mask;
            let mut r = 0;
            while bits != 0 {
                let g = bits.trailing_zeros() as usize;
                for (c, vec) in vectors.iter().enumerate() {
                    mat[r * d + c] = vec[g];
                }
                bits &= bits - 1;
                r += 1;
            }
            acc += coeff * det_in_place(&mut mat, d);
        }
        Ok(acc)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u64, &Poly)> {
        self.terms.iter()
    }
}

/// Determinant by Gaussian elimination with partial pivoting; clobbers `m`.
fn det_in_place(m: &mut [f64], d: usize) -> f64 {
    if d == 0 {
        return 1.0;
    }
    let mut det = 1.0;
    for k in 0..d {
        let mut piv = k;
        let mut best = m[k * d + k].abs();
        for r in k + 1..d {
            let v = m[r * d + k].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != k {
            for c in 0..d {
                m.swap(piv * d + c, k * d + c);
            }
            det = -det;
        }
        let pivot = m[k * d + k];
        det *= pivot;
        for r in k + 1..d {
            let f = m[r * d + k] / pivot;
            if f == 0.0 {
                continue;
            }
            for c in k..d {
                m[r * d + c] -= f * m[k * d + c];
            }
        }
    }
    det
}
