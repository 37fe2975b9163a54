use super::{b_matrix, CY3Crystal, PrepotentialData};
use crate::crystal::{frobenius_matrix, FrobeniusLift, PMatrix, PSeries};
use crate::error::{Error, Result};
use crate::ring::CoeffRing;
use crate::series::revert;
use crate::verdict::{Location, Verdict};

/// `q_i = exp(tau_i)`, the inverse chart `t(q)` centred at `q(0)`, and the
/// canonical lift `phi_can` written in the `t` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalCoords {
    pub q: Vec<PSeries>,
    /// `t_of_q[j](s)` with `t_j = t_of_q[j](q - q(0))`.
    pub t_of_q: Vec<PSeries>,
    pub phi_can: FrobeniusLift,
}

fn integrality(what: String, s: &PSeries) -> Result<()> {
    match s.min_valuation() {
        Some((v, exponent)) if v < 0 => Err(Error::NotIntegral {
            what,
            exponent,
            valuation: v,
        }),
        _ => Ok(()),
    }
}

/// Builds the canonical coordinates. `phi_can` is the unique lift with
/// `q_i(phi_can(t)) = q_i(t)^p`, i.e. `phi_can(t) = t_of_q(q^p - q(0))`.
pub fn canonical_coordinates(data: &PrepotentialData) -> Result<CanonicalCoords> {
    let ring = data.z.ring().clone();
    let h = data.h();
    let p = ring.p() as u32;
    let mut q = Vec::with_capacity(h);
    for (i, tau) in data.tau23.iter().enumerate() {
        let qi = tau.exp()?;
        integrality(format!("q_{i}"), &qi)?;
        let shifted = ring.sub(qi.constant_term(), &ring.one());
        if ring.valuation(&shifted).is_some_and(|v| v < 1) {
            return Err(Error::NotIntegral {
                what: format!("(q_{i}(0) - 1) / p"),
                exponent: vec![0; h],
                valuation: ring.valuation(&shifted).unwrap_or(0) - 1,
            });
        }
        q.push(qi);
    }
    let centred: Vec<PSeries> = q
        .iter()
        .map(|qi| qi.sub(&qi.constant_like(qi.constant_term().clone())))
        .collect();
    let t_of_q = revert(&centred)?;
    let images: Vec<PSeries> = q
        .iter()
        .map(|qi| qi.pow(p).sub(&qi.constant_like(qi.constant_term().clone())))
        .collect();
    let phi_images = t_of_q
        .iter()
        .map(|g| g.substitute(&images))
        .collect::<Result<Vec<_>>>()?;
    let phi_can = FrobeniusLift::new(&ring, phi_images)?;
    Ok(CanonicalCoords { q, t_of_q, phi_can })
}

/// `B(p^-3 phi(Z) - Z, p^-1 phi(tau12) - tau12, p^-2 phi(tau13) - tau13) P`.
pub fn matcanfrob_closed_form(
    cy: &CY3Crystal,
    data: &PrepotentialData,
    coords: &CanonicalCoords,
) -> Result<PMatrix> {
    let ring = cy.ring();
    let phi = &coords.phi_can;
    let twist = |s: &PSeries, k: i64| -> Result<PSeries> {
        Ok(phi.apply(s)?.scale(&ring.p_pow(-k)).sub(s))
    };
    let z = twist(&data.z, 3)?;
    let tau13 = data
        .tau13
        .iter()
        .map(|s| twist(s, 2))
        .collect::<Result<Vec<_>>>()?;
    let tau12 = data
        .tau12
        .iter()
        .map(|row| row.iter().map(|s| twist(s, 1)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let b = b_matrix(ring, cy.h, cy.degree(), &z, &tau12, &tau13);
    let m = b.mul(&cy.inst.p_matrix());
    m.check_budget()?;
    Ok(m)
}

/// `M_{phi_can}` from `T^-1 P phi_can(T)`, cross-checked against the closed form.
pub fn canonical_frobenius_matrix(
    cy: &CY3Crystal,
    data: &PrepotentialData,
    coords: &CanonicalCoords,
) -> Result<PMatrix> {
    let direct = frobenius_matrix(&cy.inst, &coords.phi_can)?;
    let closed = matcanfrob_closed_form(cy, data, coords)?;
    match direct.mismatch(&closed, cy.prec(), cy.degree()) {
        None => Ok(direct),
        Some(m) => Err(Error::MatcanfrobMismatch {
            row: m.row,
            col: m.col,
            exponent: m.exponent,
        }),
    }
}

/// [`canonical_frobenius_matrix`] as a verdict, returning the matrix on success.
pub fn check_matcanfrob(
    cy: &CY3Crystal,
    data: &PrepotentialData,
    coords: &CanonicalCoords,
) -> (Verdict, Option<PMatrix>) {
    const NAME: &str = "matcanfrob";
    let run = || -> Result<(PMatrix, PMatrix)> {
        Ok((
            frobenius_matrix(&cy.inst, &coords.phi_can)?,
            matcanfrob_closed_form(cy, data, coords)?,
        ))
    };
    match run() {
        Err(e) => (Verdict::error(NAME, &e), None),
        Ok((direct, closed)) => {
            let m = direct.mismatch(&closed, cy.prec(), cy.degree());
            let ok = m.is_none();
            let v = Verdict::from_mismatch(NAME, "T^-1 P phi(T) vs B P", m);
            (v, ok.then_some(direct))
        }
    }
}

/// The three integrality statements attached to the canonical Frobenius:
/// `yukinnerproduct` (`<e_last, M e_last> = phi(Z) - p^3 Z`), `yukinteger`
/// (`p^-3 phi(Z) - Z` integral) and `qprops` (`q_i` integral, `q_i(0) = 1 mod p`).
pub fn integrality_verdicts(
    cy: &CY3Crystal,
    data: &PrepotentialData,
    coords: &CanonicalCoords,
    m_can: &PMatrix,
) -> Vec<Verdict> {
    let ring = cy.ring();
    let (prec, deg) = (cy.prec(), cy.degree());
    let last = cy.layout().last();
    let mut out = Vec::new();

    let phi_z = match coords.phi_can.apply(&data.z) {
        Ok(s) => s,
        Err(e) => {
            for name in ["yukinnerproduct", "yukinteger"] {
                out.push(Verdict::error(name, &e));
            }
            return out;
        }
    };
    let pairing = cy.j_matrix().mul(m_can).get(last, last).clone();
    let expected = phi_z.sub(&data.z.scale(&ring.p_pow(3)));
    out.push(match pairing.mismatch(&expected, prec, deg) {
        None => Verdict::pass("yukinnerproduct"),
        Some((d, e)) => Verdict::fail(
            "yukinnerproduct",
            d,
            Some(Location {
                component: Some("<e_last, F e_last>".into()),
                row: Some(last),
                col: Some(last),
                exponent: Some(e),
                index: None,
            }),
        ),
    });

    let twisted = phi_z.scale(&ring.p_pow(-3)).sub(&data.z);
    out.push(match twisted.min_valuation() {
        Some((v, e)) if v < 0 => Verdict::fail(
            "yukinteger",
            -v,
            Some(Location::component("p^-3 phi(Z) - Z").with_exponent(e)),
        ),
        _ => Verdict::pass("yukinteger"),
    });

    let mut parts = Vec::new();
    for (i, qi) in coords.q.iter().enumerate() {
        if let Some((v, e)) = qi.min_valuation() {
            if v < 0 {
                let loc = Location::component(format!("q_{i}")).with_exponent(e);
                parts.push(Verdict::fail("qprops", -v, Some(loc)));
            }
        }
        let shifted = ring.sub(qi.constant_term(), &ring.one());
        if let Some(v) = ring.valuation(&shifted).filter(|&v| v < 1) {
            let loc = Location::component(format!("q_{i}(0) - 1"));
            parts.push(Verdict::fail("qprops", 1 - v, Some(loc)));
        }
    }
    out.push(Verdict::all("qprops", parts));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{residue_u64, PadicRing};
    use crate::series::Series;

    fn data_with_tau(tau: PSeries) -> PrepotentialData {
        let z = tau.zero_like();
        PrepotentialData {
            z: z.clone(),
            tau23: vec![tau],
            tau13: vec![z.clone()],
            tau12: vec![vec![z]],
        }
    }

    #[test]
    fn log_chart_gives_binomial_lift() {
        let r = PadicRing::for_degree(5, 6, 6).unwrap();
        let t = Series::var(&r, 1, 6, 0);
        let one = t.one_like();
        let tau = one.add(&t).log().unwrap();
        let coords = canonical_coordinates(&data_with_tau(tau)).unwrap();
        assert_eq!(coords.q[0], one.add(&t));
        assert_eq!(coords.t_of_q[0], t);
        assert_eq!(coords.phi_can.images()[0], one.add(&t).pow(5).sub(&one));
    }

    #[test]
    fn constant_shift_exponentiates() {
        let r = PadicRing::for_degree(5, 3, 2).unwrap();
        let t = Series::var(&r, 1, 2, 0);
        let tau = t.add(&t.constant_like(r.from_i64(5)));
        let coords = canonical_coordinates(&data_with_tau(tau)).unwrap();
        assert_eq!(residue_u64(&r, coords.q[0].constant_term(), 3), Some(81));
    }

    #[test]
    fn plain_t_is_not_integral() {
        let r = PadicRing::for_degree(5, 6, 6).unwrap();
        let t = Series::var(&r, 1, 6, 0);
        let err = canonical_coordinates(&data_with_tau(t)).unwrap_err();
        assert!(matches!(err, Error::NotIntegral { ref exponent, .. } if exponent[0] >= 5));
    }
}
