//! Dense matrices of truncated series.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::ring::CoeffRing;
use crate::series::{series_from_json, series_to_json, Series, SubstitutionPlan};

/// First entry where two matrices disagree, with the largest deficit seen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryMismatch {
    pub row: usize,
    pub col: usize,
    pub exponent: Vec<u32>,
    pub deficit: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix<R: CoeffRing> {
    rows: usize,
    cols: usize,
    entries: Vec<Series<R>>,
}

impl<R: CoeffRing> SeriesMatrix<R> {
    pub fn new(rows: usize, cols: usize, entries: Vec<Series<R>>) -> Self {
        assert_eq!(entries.len(), rows * cols, "matrix entry count");
        Self {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Series<R>) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(rows, cols, entries)
    }

    pub fn zeros(ring: &R, nvars: usize, degree: u32, rows: usize, cols: usize) -> Self {
        let z = Series::zero(ring, nvars, degree);
        Self::new(rows, cols, vec![z; rows * cols])
    }

    pub fn identity(ring: &R, nvars: usize, degree: u32, n: usize) -> Self {
        let z = Series::zero(ring, nvars, degree);
        let one = z.one_like();
        Self::from_fn(n, n, |i, j| if i == j { one.clone() } else { z.clone() })
    }

    /// Constant matrix from scalar rows.
    pub fn from_scalars(ring: &R, nvars: usize, degree: u32, m: &[Vec<R::Elem>]) -> Self {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |i, j| Series::constant(ring, nvars, degree, m[i][j].clone()))
    }

    pub fn diagonal(ring: &R, nvars: usize, degree: u32, diag: &[R::Elem]) -> Self {
        let z = Series::zero(ring, nvars, degree);
        Self::from_fn(diag.len(), diag.len(), |i, j| {
            if i == j {
                z.constant_like(diag[i].clone())
            } else {
                z.clone()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn entries(&self) -> &[Series<R>] {
        &self.entries
    }
    pub fn get(&self, i: usize, j: usize) -> &Series<R> {
        &self.entries[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, s: Series<R>) {
        self.entries[i * self.cols + j] = s;
    }
    pub fn column(&self, j: usize) -> Vec<Series<R>> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn row(&self, i: usize) -> Vec<Series<R>> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    fn template(&self) -> &Series<R> {
        self.entries.first().expect("empty matrix has no series shape")
    }
    pub fn ring(&self) -> &R {
        self.template().ring()
    }
    pub fn nvars(&self) -> usize {
        self.template().nvars()
    }
    pub fn degree(&self) -> u32 {
        self.template().degree()
    }

    pub fn map(&self, f: impl Fn(&Series<R>) -> Series<R> + Sync + Send) -> Self {
        Self::new(self.rows, self.cols, par::map(Exec::current(), &self.entries, f))
    }

    pub fn try_map(&self, f: impl Fn(&Series<R>) -> Result<Series<R>> + Sync + Send) -> Result<Self> {
        let entries = par::map(Exec::current(), &self.entries, f)
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(self.rows, self.cols, entries))
    }

    fn zip(&self, other: &Self, f: impl Fn(&Series<R>, &Series<R>) -> Series<R>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shapes");
        Self::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, Series::add)
    }
    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, Series::sub)
    }
    pub fn neg(&self) -> Self {
        self.map(Series::neg)
    }
    pub fn scale(&self, c: &R::Elem) -> Self {
        self.map(|s| s.scale(c))
    }
    /// Multiplies every entry by the same series.
    pub fn scale_series(&self, f: &Series<R>) -> Self {
        self.map(|s| s.mul(f))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shapes");
        let (n, m, k) = (self.rows, other.cols, self.cols);
        if n * m == 0 {
            return Self::new(n, m, Vec::new());
        }
        let zero = if k > 0 {
            self.entries[0].zero_like()
        } else {
            panic!("cannot infer series shape of an empty product")
        };
        let entries = par::map_range(Exec::current(), n * m, |idx| {
            let (i, j) = (idx / m, idx % m);
            let mut acc = zero.clone();
            for l in 0..k {
                let a = self.get(i, l);
                let b = other.get(l, j);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
            acc
        });
        Self::new(n, m, entries)
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Series<R>]) -> Vec<Series<R>> {
        assert_eq!(self.cols, v.len(), "matrix-vector shapes");
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for (j, vj) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !vj.is_zero() {
                        acc = acc.add(&a.mul(vj));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn derivative(&self, j: usize) -> Self {
        self.map(|s| s.derivative(j))
    }

    pub fn substitute_with(&self, plan: &SubstitutionPlan<R>) -> Self {
        self.map(|s| plan.apply(s))
    }

    pub fn substitute(&self, images: &[Series<R>]) -> Result<Self> {
        if images.is_empty() {
            return Ok(self.clone());
        }
        let plan = SubstitutionPlan::new(self.degree(), images)?;
        Ok(self.substitute_with(&plan))
    }

    /// Constant terms as scalars.
    pub fn constant_scalars(&self) -> Vec<Vec<R::Elem>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).constant_term().clone())
                    .collect()
            })
            .collect()
    }

    /// The matrix evaluated at `t = 0`, as constant series.
    pub fn at_zero(&self) -> Self {
        self.map(|s| s.constant_like(s.constant_term().clone()))
    }

    pub fn recap(&self, degree: u32) -> Self {
        self.map(|s| s.recap(degree))
    }

    pub fn truncate(&self, degree: u32) -> Self {
        self.map(|s| s.truncate(degree))
    }

    pub fn check_budget(&self) -> Result<()> {
        self.entries.iter().try_for_each(Series::check_budget)
    }

    /// Inverse by Gauss-Jordan elimination; pivots need nonzero constant
    /// terms, chosen with the smallest valuation.
    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let ring = self.ring().clone();
        let mut a = self.clone();
        let mut inv = Self::identity(&ring, self.nvars(), self.degree(), n);
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&r| !ring.is_zero(a.get(r, col).constant_term()))
                .min_by_key(|&r| ring.valuation(a.get(r, col).constant_term()).unwrap_or(0))
                .ok_or(Error::InvertNonUnit)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let pinv = a.get(col, col).invert_field()?;
            for j in 0..n {
                let x = a.get(col, j).mul(&pinv);
                a.set(col, j, x);
                let y = inv.get(col, j).mul(&pinv);
                inv.set(col, j, y);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let x = a.get(r, j).sub(&f.mul(a.get(col, j)));
                    a.set(r, j, x);
                    let y = inv.get(r, j).sub(&f.mul(inv.get(col, j)));
                    inv.set(r, j, y);
                }
            }
        }
        inv.check_budget()?;
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Worst disagreement with `other` at precision `prec` up to `max_degree`,
    /// located at the first entry (row-major) attaining it.
    pub fn mismatch(&self, other: &Self, prec: i64, max_degree: u32) -> Option<EntryMismatch> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shapes");
        let mut worst: Option<EntryMismatch> = None;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if let Some((d, e)) = self.get(i, j).mismatch(other.get(i, j), prec, max_degree) {
                    if worst.as_ref().is_none_or(|w| d > w.deficit) {
                        worst = Some(EntryMismatch {
                            row: i,
                            col: j,
                            exponent: e,
                            deficit: d,
                        });
                    }
                }
            }
        }
        worst
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows)
            .map(|i| Value::Array((0..self.cols).map(|j| series_to_json(self.get(i, j))).collect()))
            .collect();
        json!({"rows": self.rows, "cols": self.cols, "entries": rows})
    }

    pub fn from_json(ring: &R, v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Malformed(format!("matrix: {m}"));
        let rows = v["rows"].as_u64().ok_or_else(|| bad("missing rows"))? as usize;
        let cols = v["cols"].as_u64().ok_or_else(|| bad("missing cols"))? as usize;
        let data = v["entries"].as_array().ok_or_else(|| bad("missing entries"))?;
        if data.len() != rows {
            return Err(bad("row count"));
        }
        let mut entries = Vec::with_capacity(rows * cols);
        for r in data {
            let r = r.as_array().ok_or_else(|| bad("row is not an array"))?;
            if r.len() != cols {
                return Err(bad("column count"));
            }
            for e in r {
                entries.push(series_from_json(ring, e)?);
            }
        }
        if let Some(first) = entries.first() {
            if entries.iter().any(|e| first.shape_error(e).is_err()) {
                return Err(bad("entries have different shapes"));
            }
        }
        Ok(Self::new(rows, cols, entries))
    }
}

/// Inverse of a square scalar matrix over the fraction field, or `None` if singular.
pub fn invert_scalars<R: CoeffRing>(ring: &R, m: &[Vec<R::Elem>]) -> Option<Vec<Vec<R::Elem>>> {
    let n = m.len();
    let mut a: Vec<Vec<R::Elem>> = m.to_vec();
    let mut inv: Vec<Vec<R::Elem>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !ring.is_zero(&a[r][col]))
            .min_by_key(|&r| ring.valuation(&a[r][col]).unwrap_or(0))?;
        a.swap(pivot, col);
        inv.swap(pivot, col);
        let pinv = ring.inv(&a[col][col])?;
        for j in 0..n {
            a[col][j] = ring.mul(&a[col][j], &pinv);
            inv[col][j] = ring.mul(&inv[col][j], &pinv);
        }
        for r in 0..n {
            if r == col || ring.is_zero(&a[r][col]) {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                a[r][j] = ring.sub(&a[r][j], &ring.mul(&f, &a[col][j]));
                inv[r][j] = ring.sub(&inv[r][j], &ring.mul(&f, &inv[col][j]));
            }
        }
    }
    Some(inv)
}

/// Product of scalar matrices.
pub fn mul_scalars<R: CoeffRing>(ring: &R, a: &[Vec<R::Elem>], b: &[Vec<R::Elem>]) -> Vec<Vec<R::Elem>> {
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    let mut acc = ring.zero();
                    for l in 0..k {
                        if !ring.is_zero(&row[l]) && !ring.is_zero(&b[l][j]) {
                            acc = ring.add(&acc, &ring.mul(&row[l], &b[l][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}
