use super::Series;
use crate::error::Result;
use crate::ring::CoeffRing;

impl<R: CoeffRing> Series<R> {
    /// `d/dt_j`. The top-degree coefficients of the result are unknown and set to zero.
    pub fn derivative(&self, j: usize) -> Self {
        let b = self.basis().clone();
        let r = self.ring().clone();
        let mut out = self.zero_like();
        for i in 0..b.len() {
            if let Some(k) = b.shift_up(j, i) {
                let c = self.coeff_at(k);
                if !r.is_zero(c) {
                    let mult = b.monomial(k)[j] as i64;
                    out.set_at(i, r.mul_int(c, mult));
                }
            }
        }
        out
    }

    /// `t_j d/dt_j`.
    pub fn theta(&self, j: usize) -> Self {
        let r = self.ring().clone();
        self.map_terms(|e, c| r.mul_int(c, e[j] as i64))
    }

    /// Total degree operator `sum_j t_j d/dt_j`.
    pub fn euler(&self) -> Self {
        let r = self.ring().clone();
        self.map_terms(|e, c| r.mul_int(c, e.iter().sum::<u32>() as i64))
    }

    /// Antiderivative in `t_j` with no terms free of `t_j`. Terms pushed past
    /// the cap are dropped; fails if a quotient leaves the denominator budget.
    pub fn integrate(&self, j: usize) -> Result<Self> {
        let b = self.basis().clone();
        let r = self.ring().clone();
        let mut out = self.zero_like();
        for i in 0..b.len() {
            let c = self.coeff_at(i);
            if r.is_zero(c) {
                continue;
            }
            if let Some(k) = b.shift_up(j, i) {
                let q = r.div_int(c, b.monomial(k)[j] as i64);
                r.check_budget(&q)?;
                out.set_at(k, q);
            }
        }
        Ok(out)
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        let mut out = self.zero_like();
        for i in self.basis().degree_range(d) {
            out.set_at(i, self.coeff_at(i).clone());
        }
        out
    }

    /// Gradient `(d/dt_1, ..., d/dt_n)`.
    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars()).map(|j| self.derivative(j)).collect()
    }
}
