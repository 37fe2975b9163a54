use super::Series;
use crate::error::{Error, Result};
use crate::ring::CoeffRing;

impl<R: CoeffRing> Series<R> {
    /// Multiplicative inverse; the constant term must be a unit of the integral ring.
    pub fn invert(&self) -> Result<Self> {
        if !self.ring().is_unit(self.constant_term()) {
            return Err(Error::InvertNonUnit);
        }
        self.invert_field()
    }

    /// Inverse whenever the constant term is nonzero, allowing p-adic
    /// denominators. Used for pivots during matrix elimination.
    pub fn invert_field(&self) -> Result<Self> {
        let r = self.ring().clone();
        let c0inv = r.inv(self.constant_term()).ok_or(Error::InvertNonUnit)?;
        let b = self.basis().clone();
        let a = self.coeffs();
        let nz: Vec<bool> = a.iter().map(|x| !r.is_zero(x)).collect();
        let mut out = vec![r.zero(); b.len()];
        out[0] = c0inv.clone();
        let neg_c0inv = r.neg(&c0inv);
        for k in 1..b.len() {
            let mut acc = r.zero();
            for &(i, j) in &b.mul_table()[k] {
                let (i, j) = (i as usize, j as usize);
                if i == 0 || !nz[i] {
                    continue;
                }
                acc = r.add(&acc, &r.mul(&a[i], &out[j]));
            }
            let v = r.mul(&acc, &neg_c0inv);
            r.check_budget(&v)?;
            out[k] = v;
        }
        Ok(Self::from_coeffs(&r, b, out))
    }

    /// `self / other` with a unit denominator.
    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.invert()?))
    }

    /// Exponential. The constant term must lie in the domain of the scalar exp
    /// (p-adic: positive valuation; rationals: zero).
    pub fn exp(&self) -> Result<Self> {
        let r = self.ring().clone();
        let c = r.exp_const(self.constant_term())?;
        let b = self.basis().clone();
        let a = self.coeffs();
        // With E = exp(a - a(0)) the degree operator gives d E_d = sum_k k a_k E_(d-k).
        let weighted: Vec<R::Elem> = a
            .iter()
            .enumerate()
            .map(|(i, x)| r.mul_int(x, b.monomial_degree(i) as i64))
            .collect();
        let nz: Vec<bool> = weighted.iter().map(|x| !r.is_zero(x)).collect();
        let mut e = vec![r.zero(); b.len()];
        e[0] = r.one();
        for k in 1..b.len() {
            let mut acc = r.zero();
            for &(i, j) in &b.mul_table()[k] {
                let (i, j) = (i as usize, j as usize);
                if i == 0 || !nz[i] {
                    continue;
                }
                acc = r.add(&acc, &r.mul(&weighted[i], &e[j]));
            }
            let v = r.div_int(&acc, b.monomial_degree(k) as i64);
            r.check_budget(&v)?;
            e[k] = v;
        }
        Ok(Self::from_coeffs(&r, b, e).scale(&c))
    }

    /// Logarithm. The constant term must be `1 mod p` (rationals: exactly 1).
    pub fn log(&self) -> Result<Self> {
        let r = self.ring().clone();
        let c = self.constant_term().clone();
        let lc = r.log_const(&c)?;
        let cinv = r.inv(&c).ok_or(Error::LogDomain)?;
        let w = self.scale(&cinv);
        let quotient = w.euler().mul(&w.invert()?);
        let b = self.basis().clone();
        let mut out = quotient.map_terms(|e, x| {
            let d = e.iter().sum::<u32>();
            if d == 0 {
                r.zero()
            } else {
                r.div_int(x, d as i64)
            }
        });
        out.check_budget()?;
        out.set_at(0, lc);
        debug_assert_eq!(out.basis().len(), b.len());
        Ok(out)
    }
}
