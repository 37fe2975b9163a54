use super::{block_indices, valuation_scan, Connection, FrobeniusLift, PMatrix, PSeries};
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic::{Padic, PadicRing};
use crate::ring::CoeffRing;
use crate::verdict::{Location, Verdict};

/// Divisibility in matrix form: column `j` of `M_phi` is divisible by `p^e_j`,
/// i.e. `M_phi P^-1` is integral. Locations are zero-based.
pub fn check_divisibility(m_phi: &PMatrix, exps: &[u32]) -> Verdict {
    match valuation_scan(m_phi, |_, j| exps[j] as i64) {
        None => Verdict::pass("divisibility"),
        Some((d, mut loc)) => {
            loc.component = Some("M_phi P^-1".into());
            Verdict::fail("divisibility", d, Some(loc))
        }
    }
}

/// Exponents of the p-adic elementary divisors of an integral matrix,
/// computed modulo `p^prec` (full pivoting on the smallest valuation, ties in
/// row-major order). Fails when the rank drops at that precision.
pub fn newton_hodge_profile(ring: &PadicRing, m0: &[Vec<Padic>], prec: u32) -> Result<Vec<u32>> {
    let n = m0.len();
    if m0.iter().any(|r| r.len() != n) {
        return Err(Error::Shape("elementary divisors of a non-square matrix".into()));
    }
    let mut a: Vec<Vec<Padic>> = m0.to_vec();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, c) in row.iter().enumerate().skip(k) {
                if let Some(v) = ring.valuation(c) {
                    if v < prec as i64 && best.is_none_or(|(b, _, _)| v < b) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, i, j) = best.ok_or(Error::SingularModPM(prec))?;
        if v < 0 {
            return Err(Error::Malformed("elementary divisors need an integral matrix".into()));
        }
        a.swap(k, i);
        for row in a.iter_mut() {
            row.swap(k, j);
        }
        let pinv = ring.inv(&a[k][k]).expect("nonzero pivot");
        for i in k + 1..n {
            let f = ring.mul(&a[i][k], &pinv);
            if ring.is_zero(&f) {
                continue;
            }
            for j in k..n {
                let x = ring.sub(&a[i][j], &ring.mul(&f, &a[k][j]));
                a[i][j] = x;
            }
        }
        for j in k + 1..n {
            a[k][j] = ring.zero();
        }
        out.push(v as u32);
    }
    out.sort_unstable();
    Ok(out)
}

/// The elementary divisors of `M_phi(0)` are `p^e` for the exponents of `P`.
pub fn check_newton_hodge(m_phi: &PMatrix, exps: &[u32], prec: i64) -> Verdict {
    const NAME: &str = "newton_hodge";
    let mut expected = exps.to_vec();
    expected.sort_unstable();
    match newton_hodge_profile(m_phi.ring(), &m_phi.constant_scalars(), prec as u32) {
        Ok(found) if found == expected => Verdict::pass(NAME),
        Ok(found) => Verdict::fail(NAME, 0, Some(Location::component("M_phi(0)")))
            .with_detail(format!("elementary divisor exponents {found:?}, expected {expected:?}")),
        Err(e) => Verdict::error(NAME, &e),
    }
}

/// The connection only moves Hodge blocks upward: `A_j` is strictly upper
/// block triangular.
pub fn check_transversality(conn: &Connection, hodge: &[usize]) -> Verdict {
    let blocks = block_indices(hodge);
    for (k, a) in conn.parts().iter().enumerate() {
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if blocks[i] >= blocks[j] && !a.get(i, j).is_zero() {
                    let loc = Location {
                        component: Some(format!("A_{k}")),
                        row: Some(i),
                        col: Some(j),
                        ..Location::default()
                    };
                    return Verdict::fail("connection_shape", 0, Some(loc));
                }
            }
        }
    }
    Verdict::pass("connection_shape")
}

/// Finite stand-in for topological nilpotence: the matrix of `D_j^(p+1)` has
/// coefficients divisible by `p` in the degrees it still determines
/// (at most `D - p - 1`). Vacuous when `D <= p`.
pub fn check_nilpotence_proxy(conn: &Connection) -> Verdict {
    const NAME: &str = "nilpotence_proxy";
    if conn.nvars() == 0 {
        return Verdict::pass(NAME);
    }
    let a0 = conn.part(0);
    let ring = a0.ring().clone();
    let steps = ring.p() as u32 + 1;
    let degree = a0.degree();
    if degree < steps {
        return Verdict::pass(NAME).with_detail("vacuous at this degree");
    }
    let keep = degree - steps;
    let mut parts = Vec::new();
    for j in 0..conn.nvars() {
        let mut x = SeriesMatrix::identity(&ring, a0.nvars(), degree, conn.rank());
        for _ in 0..steps {
            x = conn.apply(j, &x);
        }
        let x = x.truncate(keep);
        parts.push(match valuation_scan(&x, |_, _| 1) {
            None => Verdict::pass(NAME),
            Some((d, mut loc)) => {
                loc.component = Some(format!("D_{j}^{steps}"));
                Verdict::fail(NAME, d, Some(loc))
            }
        });
    }
    Verdict::all(NAME, parts)
}

/// Flat, Frobenius-fixed section: checks `M_phi phi(e) = e` for the first lift,
/// then `d_j e + A_j e = 0` (degree `D - 1`), then fixedness under the other lifts.
pub fn flat_fixed_section_check(
    conn: &Connection,
    frobenius: &[(&FrobeniusLift, &PMatrix)],
    e: &[PSeries],
    prec: i64,
) -> Verdict {
    const NAME: &str = "flat_section";
    let run = || -> Result<Verdict> {
        if e.iter().all(PSeries::is_zero) {
            return Ok(Verdict::pass(NAME));
        }
        let degree = e[0].degree();
        let column = SeriesMatrix::new(e.len(), 1, e.to_vec());
        let fixed = |(lift, m): &(&FrobeniusLift, &PMatrix), label: &str| -> Result<Verdict> {
            let image = m.mul(&lift.apply_matrix(&column)?);
            Ok(Verdict::from_mismatch(NAME, label, image.mismatch(&column, prec, degree)))
        };
        let mut parts = Vec::new();
        if let Some(first) = frobenius.first() {
            parts.push(fixed(first, "F(phi)")?);
        }
        for j in 0..conn.nvars() {
            let de = conn.apply(j, &column);
            let zero = de.map(|s| s.zero_like());
            parts.push(Verdict::from_mismatch(
                NAME,
                &format!("nabla_{j}"),
                de.mismatch(&zero, prec, degree.saturating_sub(1)),
            ));
        }
        for (k, lift) in frobenius.iter().enumerate().skip(1) {
            parts.push(fixed(lift, &format!("F(psi_{k})"))?);
        }
        Ok(Verdict::all(NAME, parts))
    };
    run().unwrap_or_else(|err| Verdict::error(NAME, &err))
}
