//! Truncated operator matrices with Grassmann entries.
//!
//! A vector is `Σ_j c_j e_j` with coefficients on the left and basis parities `p_j`.
//! The matrix `A` acts by `(Av)_i = Σ_j A_ij ι^{p_i⊕p_j}(c_j)`, which makes products
//! compose as `(AB)_ik = Σ_j A_ij ι^{p_i⊕p_j}(B_jk)`.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grassmann::GrassmannElement;
use crate::scalar::{Rational, Scalar};
use crate::superseries::VectorFieldCoeffs;

use super::symbols::{Family, GeneratorSymbol};
use super::uea::{monomial_is_odd, monomial_mode2, monomial_to_string, Monomial, UEAElement};
use super::verma::{VermaModule, VermaVector};

type G<S> = GrassmannElement<S>;

#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannMatrix<S: Scalar> {
    n_gen: u8,
    odd: Vec<bool>,
    entries: Vec<G<S>>,
}

impl<S: Scalar> GrassmannMatrix<S> {
    pub fn zero(n_gen: u8, odd: Vec<bool>) -> Self {
        let d = odd.len();
        GrassmannMatrix { n_gen, odd, entries: vec![G::zero(n_gen); d * d] }
    }

    pub fn identity(n_gen: u8, odd: Vec<bool>) -> Self {
        let mut m = Self::zero(n_gen, odd);
        let d = m.dim();
        for i in 0..d {
            m.entries[i * d + i] = G::one(n_gen);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.odd.len()
    }
    pub fn num_generators(&self) -> u8 {
        self.n_gen
    }
    pub fn basis_parities(&self) -> &[bool] {
        &self.odd
    }
    pub fn get(&self, i: usize, j: usize) -> &G<S> {
        &self.entries[i * self.dim() + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: G<S>) {
        let d = self.dim();
        self.entries[i * d + j] = v;
    }
    pub fn column(&self, j: usize) -> Vec<G<S>> {
        (0..self.dim()).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n_gen != other.n_gen {
            return Err(Error::GeneratorMismatch { left: self.n_gen, right: other.n_gen });
        }
        if self.odd != other.odd {
            return Err(Error::Usage("matrices over different bases".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(GrassmannMatrix { n_gen: self.n_gen, odd: self.odd.clone(), entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(GrassmannMatrix { n_gen: self.n_gen, odd: self.odd.clone(), entries })
    }

    pub fn scale(&self, s: &S) -> Self {
        GrassmannMatrix { n_gen: self.n_gen, odd: self.odd.clone(), entries: self.entries.iter().map(|e| e.scale(s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let d = self.dim();
        let mut out = Self::zero(self.n_gen, self.odd.clone());
        for i in 0..d {
            for j in 0..d {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                let flip = self.odd[i] != self.odd[j];
                for k in 0..d {
                    let b = other.get(j, k);
                    if b.is_zero() {
                        continue;
                    }
                    let b = if flip { b.involution() } else { b.clone() };
                    let idx = i * d + k;
                    out.entries[idx] = &out.entries[idx] + &(a * &b);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[G<S>]) -> Result<Vec<G<S>>> {
        let d = self.dim();
        if v.len() != d {
            return Err(Error::Usage(format!("vector length {} does not match dimension {d}", v.len())));
        }
        let mut out = vec![G::zero(self.n_gen); d];
        for i in 0..d {
            for j in 0..d {
                let a = self.get(i, j);
                if a.is_zero() || v[j].is_zero() {
                    continue;
                }
                let c = if self.odd[i] != self.odd[j] { v[j].involution() } else { v[j].clone() };
                out[i] = &out[i] + &(a * &c);
            }
        }
        Ok(out)
    }

    /// `exp(self)` by the power series; requires nilpotency within `dim + 1` powers.
    pub fn exp_nilpotent(&self) -> Result<Self> {
        let mut out = Self::identity(self.n_gen, self.odd.clone());
        let mut term = out.clone();
        for k in 1..=self.dim() + 1 {
            term = term.mul(self)?.scale(&S::from_ratio(1, k as i64));
            if term.is_zero() {
                return Ok(out);
            }
            out = out.add(&term)?;
        }
        Err(Error::NonConvergent("matrix is not nilpotent on the truncated space".into()))
    }

    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> GrassmannMatrix<T> {
        GrassmannMatrix { n_gen: self.n_gen, odd: self.odd.clone(), entries: self.entries.iter().map(|e| e.map_scalars(f)).collect() }
    }

    /// Whether every nonzero entry maps a basis vector to a strictly higher level.
    pub fn strictly_raising(&self, levels: &[i32]) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| self.get(i, j).is_zero() || levels[i] > levels[j]))
    }

    /// Entry `(i, j)` vanishes whenever level `i` is below level `j`.
    pub fn level_triangular(&self, levels: &[i32]) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| self.get(i, j).is_zero() || levels[i] >= levels[j]))
    }
}

/// The PBW basis of a truncated module with lookup tables.
#[derive(Clone, Debug)]
pub struct TruncatedBasis {
    pub level2_max: i32,
    pub monomials: Vec<Monomial>,
    pub index: HashMap<Monomial, usize>,
}

impl TruncatedBasis {
    pub fn new(module: &VermaModule, level2_max: i32) -> Self {
        let monomials = module.basis(level2_max);
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        TruncatedBasis { level2_max, monomials, index }
    }
    pub fn len(&self) -> usize {
        self.monomials.len()
    }
    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
    pub fn parities(&self) -> Vec<bool> {
        self.monomials.iter().map(|m| monomial_is_odd(m)).collect()
    }
    /// Twice the level of each basis vector.
    pub fn levels2(&self) -> Vec<i32> {
        self.monomials.iter().map(|m| -monomial_mode2(m)).collect()
    }
    pub fn labels(&self) -> Vec<String> {
        self.monomials.iter().map(|m| monomial_to_string(m)).collect()
    }

    /// Coefficient column of a vector; components above the cutoff are dropped.
    pub fn coords(&self, v: &VermaVector) -> Vec<G<Rational>> {
        let mut out = vec![G::zero(v.num_generators()); self.len()];
        for (m, c) in v.terms() {
            if let Some(&i) = self.index.get(m) {
                out[i] = c.clone();
            }
        }
        out
    }

    pub fn vector(&self, module: &VermaModule, coords: &[G<Rational>]) -> VermaVector {
        let n = coords.first().map(|c| c.num_generators()).unwrap_or(0);
        let mut v = VermaVector::zero(module.algebra(), n);
        for (m, c) in self.monomials.iter().zip(coords) {
            v.insert(m.clone(), c.clone());
        }
        v
    }
}

/// Matrix of a UEA element on the truncated basis (rational backend).
pub fn operator_matrix(module: &VermaModule, x: &UEAElement, basis: &TruncatedBasis) -> Result<GrassmannMatrix<Rational>> {
    let n = x.num_generators();
    let mut out = GrassmannMatrix::zero(n, basis.parities());
    for (word, q) in x.terms() {
        for (j, m) in basis.monomials.iter().enumerate() {
            for (img, k) in module.act_monomial(word, m)? {
                if let Some(&i) = basis.index.get(&img) {
                    let v = out.get(i, j) + &q.scale(&k);
                    out.set(i, j, v);
                }
            }
        }
    }
    Ok(out)
}

/// The generator attached to each vector-field coefficient family.
pub fn vector_field_element(v: &VectorFieldCoeffs<Rational>, algebra: super::Algebra) -> Result<UEAElement> {
    v.validate()?;
    let n = v.n_zeta;
    let mut z = UEAElement::zero(algebra, n);
    let mut push = |family: Family, map: &std::collections::BTreeMap<i64, G<Rational>>, odd: bool| -> Result<()> {
        for (j, c) in map {
            let mode2 = if odd { 2 * *j as i32 + 1 } else { 2 * *j as i32 };
            let g = GeneratorSymbol { family, mode2 };
            z = z.add(&UEAElement::monomial(algebra, vec![g], c.clone())?)?;
        }
        Ok(())
    };
    push(Family::L, &v.a, false)?;
    push(Family::G, &v.m, true)?;
    push(Family::J, &v.b, false)?;
    push(Family::Gp, &v.mp, true)?;
    push(Family::Gm, &v.mm, true)?;
    Ok(z)
}

/// `exp(−Σ(A_j L_j + M_j G_{j+1/2} + …))` on the level-`≤ level2_max/2` basis.
pub fn q_matrix(v: &VectorFieldCoeffs<Rational>, module: &VermaModule, level2_max: i32) -> Result<GrassmannMatrix<Rational>> {
    let z = vector_field_element(v, module.algebra())?.neg();
    if z.terms().keys().any(|m| m.iter().any(|g| g.mode2 >= 0)) {
        return Err(Error::Usage("q_matrix needs strictly negative modes".into()));
    }
    let basis = TruncatedBasis::new(module, level2_max);
    operator_matrix(module, &z, &basis)?.exp_nilpotent()
}

pub fn matrix_to_json<S: Scalar>(m: &GrassmannMatrix<S>, labels: &[String]) -> Value {
    let rows: Vec<Value> = (0..m.dim())
        .map(|i| Value::Array((0..m.dim()).map(|j| m.get(i, j).to_json()).collect()))
        .collect();
    json!({ "basis": labels, "generators": m.num_generators(), "entries": rows })
}
