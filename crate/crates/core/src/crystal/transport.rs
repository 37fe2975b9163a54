use super::{Connection, FrobeniusLift, PMatrix};
use crate::error::Result;
use crate::matrix::SeriesMatrix;
use crate::ring::CoeffRing;
use crate::series::basis;
use crate::verdict::Verdict;

/// Frobenius matrix for `psi` from the one for `phi` by Taylor expansion:
///
/// `M_psi = M_phi * sum_m prod_j (psi(t_j) - phi(t_j))^(m_j) / m_j! * phi(B_m)`
///
/// where `B_0 = I` and `B_(m + e_j) = D_j B_m`. The sum runs over multi-indices
/// of total degree at most `D`; when the differences have constant terms the
/// terms whose valuation bound already exceeds the working precision are skipped.
pub fn taylor_transport(
    conn: &Connection,
    phi: &FrobeniusLift,
    psi: &FrobeniusLift,
    m_phi: &PMatrix,
) -> Result<PMatrix> {
    let n = conn.nvars();
    if n == 0 {
        return Ok(m_phi.clone());
    }
    let ring = m_phi.ring().clone();
    let degree = m_phi.degree();
    let p = ring.p() as i64;
    let digits = ring.context().digits() as i64;

    let delta: Vec<_> = psi
        .images()
        .iter()
        .zip(phi.images())
        .map(|(a, b)| a.sub(b))
        .collect();
    let has_constant = delta.iter().any(|d| !ring.is_zero(d.constant_term()));
    // Divided powers delta_j^k / k!.
    let divided: Vec<Vec<_>> = delta
        .iter()
        .map(|d| {
            let mut pows = vec![d.one_like()];
            for k in 1..=degree as i64 {
                let next = pows[k as usize - 1].mul(d).div_int(k);
                pows.push(next);
            }
            pows
        })
        .collect();

    let idx = basis(n, degree);
    let plan = phi.plan(degree)?;
    let identity = SeriesMatrix::identity(&ring, n, degree, conn.rank());
    let mut b: Vec<PMatrix> = Vec::with_capacity(idx.len());
    let mut acc = identity.map(|s| s.zero_like());
    for k in 0..idx.len() {
        let m = idx.monomial(k).to_vec();
        let bm = match m.iter().position(|&e| e > 0) {
            None => identity.clone(),
            Some(j) => {
                let mut parent = m.clone();
                parent[j] -= 1;
                conn.apply(j, &b[idx.index_of(&parent).expect("graded parent")])
            }
        };
        let total = idx.monomial_degree(k) as i64;
        // v_p(prod delta^m / m!) >= |m| - v_p(m!) >= |m| - (|m| - 1) / (p - 1)
        let negligible = has_constant && total - (total - 1).max(0) / (p - 1) >= digits;
        if !negligible {
            let mut coef = delta[0].one_like();
            for (j, &e) in m.iter().enumerate() {
                if e > 0 {
                    coef = coef.mul(&divided[j][e as usize]);
                }
            }
            if !coef.is_zero() {
                let pulled = match &plan {
                    Some(pl) => bm.substitute_with(pl),
                    None => bm.clone(),
                };
                acc = acc.add(&pulled.scale_series(&coef));
            }
        }
        b.push(bm);
    }
    let out = m_phi.mul(&acc);
    out.check_budget()?;
    Ok(out)
}
/// Agreement of [`taylor_transport`] from `phi` with the directly computed
/// `m_psi`, modulo `p^prec` in every degree.
pub fn check_change_of_lift(
    conn: &Connection,
    phi: &FrobeniusLift,
    psi: &FrobeniusLift,
    m_phi: &PMatrix,
    m_psi: &PMatrix,
    prec: i64,
) -> Verdict {
    const NAME: &str = "change_of_lift";
    match taylor_transport(conn, phi, psi, m_phi) {
        Ok(m) => Verdict::from_mismatch(NAME, "Taylor vs direct", m.mismatch(m_psi, prec, m.degree())),
        Err(e) => Verdict::error(NAME, &e),
    }
}

