use super::{Connection, PMatrix};
use crate::error::{Error, Result};

/// The unique `T` with `d_j T = T A_j` and `T(0) = t0`, built degree by degree
/// from the Euler identity `d T_d = sum_j t_j (T A_j)_(d-1)`. The result is then
/// checked against every `d_j T = T A_j` up to degree `D - 1`; a mismatch means
/// the connection is not integrable.
pub fn solve_t(conn: &Connection, t0: &PMatrix, prec: i64) -> Result<PMatrix> {
    let degree = t0.degree();
    let n = conn.nvars();
    let mut t = t0.at_zero();
    if n == 0 {
        return Ok(t);
    }
    for d in 1..=degree {
        let mut step = t.map(|s| s.zero_like());
        for j in 0..n {
            let prod = t.mul(conn.part(j));
            let shifted = prod.map(|s| s.homogeneous(d - 1).mul(&s.var_like(j)));
            step = step.add(&shifted);
        }
        t = t.add(&step.map(|s| s.div_int(d as i64)));
        t.check_budget()?;
    }
    let check_deg = degree.saturating_sub(1);
    for j in 0..n {
        let lhs = t.derivative(j);
        let rhs = t.mul(conn.part(j));
        if let Some(m) = lhs.mismatch(&rhs, prec, check_deg) {
            return Err(Error::NotIntegrable {
                row: m.row,
                col: m.col,
                exponent: m.exponent,
            });
        }
    }
    Ok(t)
}
