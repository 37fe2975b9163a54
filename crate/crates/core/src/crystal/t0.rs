use crate::error::{Error, Result};
use crate::matrix::mul_scalars;
use crate::padic::{Padic, PadicRing};
use crate::ring::CoeffRing;
use crate::verdict::{Location, Verdict};

/// `P^-m X P^m` for `P = diag(p^e_i)`.
fn conjugate(ring: &PadicRing, x: &[Vec<Padic>], exps: &[u32], m: i64) -> Vec<Vec<Padic>> {
    x.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, c)| {
                    let shift = m * (exps[j] as i64 - exps[i] as i64);
                    ring.mul(c, &ring.p_pow(shift))
                })
                .collect()
        })
        .collect()
}

/// Convergent product `... F_3 F_2 F_1` with `F_m = P^-m L0 P^m`, truncated
/// once `F_m - I` vanishes at the working precision.
///
/// `L0` must be upper triangular with unit diagonal, integral, and zero inside
/// each diagonal block of `P`.
pub fn t0_product(ring: &PadicRing, l0: &[Vec<Padic>], exps: &[u32]) -> Result<Vec<Vec<Padic>>> {
    let n = l0.len();
    if exps.len() != n || l0.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("L0 and P must be square of the same size".into()));
    }
    for i in 0..n {
        for j in 0..n {
            let c = &l0[i][j];
            let ok = if i == j {
                *c == ring.one()
            } else if j < i || exps[i] == exps[j] {
                ring.is_zero(c)
            } else {
                ring.valuation(c).is_none_or(|v| v >= 0)
            };
            if !ok {
                return Err(Error::NotUnipotent(format!("L0 entry ({i},{j})")));
            }
        }
    }
    let mut t: Vec<Vec<Padic>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
        .collect();
    for m in 1..=ring.context().digits() as i64 {
        let f = conjugate(ring, l0, exps, m);
        t = mul_scalars(ring, &f, &t);
    }
    Ok(t)
}

/// `T0 = P^-1 T0 L0 P` modulo `p^prec`.
pub fn check_t0_fixed_point(
    ring: &PadicRing,
    t0: &[Vec<Padic>],
    l0: &[Vec<Padic>],
    exps: &[u32],
    prec: i64,
) -> Verdict {
    let rhs = conjugate(ring, &mul_scalars(ring, t0, l0), exps, 1);
    let mut worst: Option<(i64, Location)> = None;
    for (i, (a, b)) in t0.iter().zip(&rhs).enumerate() {
        for (j, (x, y)) in a.iter().zip(b).enumerate() {
            let d = ring.defect(&ring.sub(x, y), prec);
            if d > 0 && worst.as_ref().is_none_or(|(w, _)| d > *w) {
                let loc = Location {
                    component: Some("T0".into()),
                    row: Some(i),
                    col: Some(j),
                    ..Location::default()
                };
                worst = Some((d, loc));
            }
        }
    }
    match worst {
        None => Verdict::pass("t0_fixed_point"),
        Some((d, loc)) => Verdict::fail("t0_fixed_point", d, Some(loc)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::residue_u64;

    #[test]
    fn identity_and_closed_form() {
        let r = PadicRing::new(5, 3, 2).unwrap();
        let id = vec![vec![r.one(), r.zero()], vec![r.zero(), r.one()]];
        assert_eq!(t0_product(&r, &id, &[0, 1]).unwrap(), id);
        let l0 = vec![vec![r.one(), r.one()], vec![r.zero(), r.one()]];
        let t0 = t0_product(&r, &l0, &[0, 1]).unwrap();
        // 5 + 25 + 125 + ... = 30 mod 125
        assert_eq!(residue_u64(&r, &t0[0][1], 3), Some(30));
        assert!(check_t0_fixed_point(&r, &t0, &l0, &[0, 1], 3).pass);
        let mut bad = t0.clone();
        bad[0][1] = r.add(&bad[0][1], &r.p_pow(2));
        assert!(!check_t0_fixed_point(&r, &bad, &l0, &[0, 1], 3).pass);
    }

    #[test]
    fn rejects_non_unipotent() {
        let r = PadicRing::new(5, 3, 2).unwrap();
        let l0 = vec![vec![r.one(), r.one()], vec![r.one(), r.one()]];
        assert!(t0_product(&r, &l0, &[0, 1]).is_err());
        let same_block = vec![vec![r.one(), r.one()], vec![r.zero(), r.one()]];
        assert!(t0_product(&r, &same_block, &[1, 1]).is_err());
    }
}
