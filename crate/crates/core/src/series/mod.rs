//! Multivariate power series truncated at a total degree.
//!
//! Coefficients live in a dense vector indexed by a [`MonomialBasis`] that is
//! shared between all series with the same number of variables and degree cap.
//! The basis lists monomials in graded order (all of degree 0, then 1, ...),
//! which is what the degree-by-degree recurrences in this crate rely on.

mod calculus;
mod compose;
mod json;
mod transcendental;

pub use compose::{revert, PowerTable, SubstitutionPlan};
pub use json::{series_from_json, series_to_json};

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::ring::CoeffRing;

/// Monomials of total degree at most `degree` in `nvars` variables.
#[derive(Debug)]
pub struct MonomialBasis {
    nvars: usize,
    degree: u32,
    monos: Vec<Vec<u32>>,
    degrees: Vec<u32>,
    index: HashMap<Vec<u32>, usize>,
    offsets: Vec<usize>,
    mul_table: Vec<Vec<(u32, u32)>>,
    up: Vec<Vec<Option<u32>>>,
}

impl MonomialBasis {
    fn build(nvars: usize, degree: u32) -> Self {
        let mut monos = Vec::new();
        let mut offsets = Vec::with_capacity(degree as usize + 2);
        for d in 0..=degree {
            offsets.push(monos.len());
            push_of_degree(nvars, d, &mut Vec::new(), &mut monos);
        }
        offsets.push(monos.len());
        let degrees: Vec<u32> = monos.iter().map(|m| m.iter().sum()).collect();
        let index: HashMap<Vec<u32>, usize> = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();

        let mut mul_table = vec![Vec::new(); monos.len()];
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                // graded order: every later j has at least this degree
                if degrees[i] + degrees[j] > degree {
                    break;
                }
                let sum: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                mul_table[index[&sum]].push((i as u32, j as u32));
            }
        }

        let up = (0..nvars)
            .map(|v| {
                monos
                    .iter()
                    .map(|m| {
                        let mut s = m.clone();
                        s[v] += 1;
                        index.get(&s).map(|&k| k as u32)
                    })
                    .collect()
            })
            .collect();

        Self {
            nvars,
            degree,
            monos,
            degrees,
            index,
            offsets,
            mul_table,
            up,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn len(&self) -> usize {
        self.monos.len()
    }
    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }
    pub fn monomial(&self, i: usize) -> &[u32] {
        &self.monos[i]
    }
    pub fn monomial_degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }
    pub fn index_of(&self, exp: &[u32]) -> Option<usize> {
        self.index.get(exp).copied()
    }
    /// Index range of the monomials of total degree `d`.
    pub fn degree_range(&self, d: u32) -> std::ops::Range<usize> {
        if d > self.degree {
            return self.len()..self.len();
        }
        self.offsets[d as usize]..self.offsets[d as usize + 1]
    }
    pub fn mul_table(&self) -> &[Vec<(u32, u32)>] {
        &self.mul_table
    }
    /// Index of monomial `i` times `t_var`, if still inside the cap.
    pub fn shift_up(&self, var: usize, i: usize) -> Option<usize> {
        self.up[var][i].map(|k| k as usize)
    }
}

fn push_of_degree(nvars: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == nvars {
        prefix.push(d);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for first in (0..=d).rev() {
        prefix.push(first);
        push_of_degree(nvars, d - first, prefix, out);
        prefix.pop();
    }
}

/// Shared basis for `(nvars, degree)`.
pub fn basis(nvars: usize, degree: u32) -> Arc<MonomialBasis> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<MonomialBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.lock().unwrap().get(&(nvars, degree)) {
        return b.clone();
    }
    let built = Arc::new(MonomialBasis::build(nvars, degree));
    cache
        .lock()
        .unwrap()
        .entry((nvars, degree))
        .or_insert(built)
        .clone()
}

/// A power series truncated at total degree `D`.
#[derive(Clone)]
pub struct Series<R: CoeffRing> {
    ring: R,
    basis: Arc<MonomialBasis>,
    coeffs: Vec<R::Elem>,
}

impl<R: CoeffRing> Series<R> {
    pub fn zero(ring: &R, nvars: usize, degree: u32) -> Self {
        let basis = basis(nvars, degree);
        let coeffs = vec![ring.zero(); basis.len()];
        Self {
            ring: ring.clone(),
            basis,
            coeffs,
        }
    }

    pub fn constant(ring: &R, nvars: usize, degree: u32, c: R::Elem) -> Self {
        let mut s = Self::zero(ring, nvars, degree);
        s.coeffs[0] = c;
        s
    }

    pub fn one(ring: &R, nvars: usize, degree: u32) -> Self {
        Self::constant(ring, nvars, degree, ring.one())
    }

    /// The coordinate `t_j` (zero when `degree == 0`).
    pub fn var(ring: &R, nvars: usize, degree: u32, j: usize) -> Self {
        let mut e = vec![0; nvars];
        e[j] = 1;
        Self::monomial(ring, nvars, degree, &e, ring.one())
    }

    pub fn monomial(ring: &R, nvars: usize, degree: u32, exp: &[u32], c: R::Elem) -> Self {
        let mut s = Self::zero(ring, nvars, degree);
        s.set(exp, c);
        s
    }

    pub fn from_coeffs(ring: &R, basis: Arc<MonomialBasis>, coeffs: Vec<R::Elem>) -> Self {
        assert_eq!(basis.len(), coeffs.len(), "coefficient vector length");
        Self {
            ring: ring.clone(),
            basis,
            coeffs,
        }
    }

    /// Univariate series from its coefficient list `c_0, c_1, ...` (extra terms dropped).
    pub fn univariate(ring: &R, degree: u32, coeffs: &[R::Elem]) -> Self {
        let mut s = Self::zero(ring, 1, degree);
        for (k, c) in coeffs.iter().enumerate().take(degree as usize + 1) {
            s.coeffs[k] = c.clone();
        }
        s
    }

    pub fn zero_like(&self) -> Self {
        Self {
            ring: self.ring.clone(),
            basis: self.basis.clone(),
            coeffs: vec![self.ring.zero(); self.basis.len()],
        }
    }
    pub fn constant_like(&self, c: R::Elem) -> Self {
        let mut s = self.zero_like();
        s.coeffs[0] = c;
        s
    }
    pub fn one_like(&self) -> Self {
        self.constant_like(self.ring.one())
    }
    pub fn var_like(&self, j: usize) -> Self {
        Self::var(&self.ring, self.nvars(), self.degree(), j)
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }
    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }
    pub fn nvars(&self) -> usize {
        self.basis.nvars
    }
    pub fn degree(&self) -> u32 {
        self.basis.degree
    }
    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<R::Elem> {
        self.coeffs
    }

    /// Coefficient of `t^exp`; zero above the cap.
    pub fn coeff(&self, exp: &[u32]) -> R::Elem {
        match self.basis.index_of(exp) {
            Some(i) => self.coeffs[i].clone(),
            None => self.ring.zero(),
        }
    }
    pub fn coeff_at(&self, i: usize) -> &R::Elem {
        &self.coeffs[i]
    }
    /// Sets the coefficient of `t^exp`; ignored above the cap.
    pub fn set(&mut self, exp: &[u32], c: R::Elem) {
        assert_eq!(exp.len(), self.nvars(), "exponent arity");
        if let Some(i) = self.basis.index_of(exp) {
            self.coeffs[i] = c;
        }
    }
    pub fn set_at(&mut self, i: usize, c: R::Elem) {
        self.coeffs[i] = c;
    }
    pub fn constant_term(&self) -> &R::Elem {
        &self.coeffs[0]
    }
    /// Univariate coefficient of `t^k`.
    pub fn coeff1(&self, k: u32) -> R::Elem {
        self.coeff(&[k])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.coeffs
            .iter()
            .position(|c| !self.ring.is_zero(c))
            .map(|i| self.basis.degrees[i])
    }

    /// Smallest coefficient valuation together with its exponent.
    pub fn min_valuation(&self) -> Option<(i64, Vec<u32>)> {
        let mut best: Option<(i64, Vec<u32>)> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if let Some(v) = self.ring.valuation(c) {
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, self.basis.monos[i].clone()));
                }
            }
        }
        best
    }

    pub fn check_budget(&self) -> Result<()> {
        self.coeffs
            .iter()
            .try_for_each(|c| self.ring.check_budget(c))
    }

    fn same_shape(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.basis, &other.basis),
            "series shapes differ: ({}, {}) vs ({}, {})",
            self.nvars(),
            self.degree(),
            other.nvars(),
            other.degree()
        );
    }

    pub fn map_coeffs(&self, f: impl Fn(&R::Elem) -> R::Elem) -> Self {
        Self {
            ring: self.ring.clone(),
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Maps each coefficient together with its exponent.
    pub fn map_terms(&self, f: impl Fn(&[u32], &R::Elem) -> R::Elem) -> Self {
        Self {
            ring: self.ring.clone(),
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| f(&self.basis.monos[i], c))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_shape(other);
        let r = &self.ring;
        Self {
            ring: r.clone(),
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| r.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_shape(other);
        let r = &self.ring;
        Self {
            ring: r.clone(),
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| r.sub(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| self.ring.neg(c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_shape(other);
        let coeffs = self
            .ring
            .convolve(self.basis.mul_table(), &self.coeffs, &other.coeffs);
        Self {
            ring: self.ring.clone(),
            basis: self.basis.clone(),
            coeffs,
        }
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        if self.ring.is_zero(c) {
            return self.zero_like();
        }
        self.map_coeffs(|a| self.ring.mul(a, c))
    }
    pub fn mul_int(&self, k: i64) -> Self {
        self.map_coeffs(|a| self.ring.mul_int(a, k))
    }
    pub fn div_int(&self, k: i64) -> Self {
        self.map_coeffs(|a| self.ring.div_int(a, k))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = self.one_like();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Drops every term of total degree above `d`.
    pub fn truncate(&self, d: u32) -> Self {
        let z = self.ring.zero();
        self.map_terms(|e, c| {
            if e.iter().sum::<u32>() > d {
                z.clone()
            } else {
                c.clone()
            }
        })
    }

    /// The same series re-expressed with a different degree cap.
    pub fn recap(&self, degree: u32) -> Self {
        let mut out = Self::zero(&self.ring, self.nvars(), degree);
        for (i, c) in self.coeffs.iter().enumerate() {
            if let Some(j) = out.basis.index_of(&self.basis.monos[i]) {
                out.coeffs[j] = c.clone();
            }
        }
        out
    }

    /// Coefficients of `self - other` that miss zero at precision `prec`,
    /// restricted to total degree at most `max_degree`. Returns the worst
    /// deficit and the first exponent (in graded order) attaining a nonzero one.
    pub fn mismatch(&self, other: &Self, prec: i64, max_degree: u32) -> Option<(i64, Vec<u32>)> {
        self.same_shape(other);
        let mut worst: Option<(i64, Vec<u32>)> = None;
        let end = self.basis.degree_range(max_degree.min(self.degree())).end;
        for i in 0..end {
            let d = self.ring.defect(&self.ring.sub(&self.coeffs[i], &other.coeffs[i]), prec);
            if d > 0 && worst.as_ref().is_none_or(|(w, _)| d > *w) {
                worst = Some((d, self.basis.monos[i].clone()));
            }
        }
        worst
    }

    /// Whether the two series agree at precision `prec` up to `max_degree`.
    pub fn agrees(&self, other: &Self, prec: i64, max_degree: u32) -> bool {
        self.mismatch(other, prec, max_degree).is_none()
    }

    /// Rewrites the coefficients in another ring through `f`.
    pub fn convert<S: CoeffRing>(&self, ring: &S, f: impl Fn(&R::Elem) -> S::Elem) -> Series<S> {
        Series {
            ring: ring.clone(),
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Nonzero terms as `(exponent, coefficient)` pairs in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &R::Elem)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.ring.is_zero(c))
            .map(|(i, c)| (self.basis.monos[i].as_slice(), c))
    }

    pub(crate) fn shape_error(&self, other: &Self) -> Result<()> {
        if self.nvars() != other.nvars() || self.degree() != other.degree() {
            return Err(Error::Shape(format!(
                "series with ({}, {}) and ({}, {}) variables/degree",
                self.nvars(),
                self.degree(),
                other.nvars(),
                other.degree()
            )));
        }
        Ok(())
    }
}

impl<R: CoeffRing> PartialEq for Series<R> {
    fn eq(&self, other: &Self) -> bool {
        self.nvars() == other.nvars()
            && self.degree() == other.degree()
            && self.coeffs == other.coeffs
    }
}

impl<R: CoeffRing> fmt::Debug for Series<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[n={}, D={}](", self.nvars(), self.degree())?;
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*t^{:?}", self.ring.format(c), e)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl<R: CoeffRing> $tr<&Series<R>> for &Series<R> {
            type Output = Series<R>;
            fn $m(self, rhs: &Series<R>) -> Series<R> {
                Series::$m(self, rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl<R: CoeffRing> Neg for &Series<R> {
    type Output = Series<R>;
    fn neg(self) -> Series<R> {
        Series::neg(self)
    }
}
