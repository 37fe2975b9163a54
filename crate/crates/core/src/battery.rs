//! The full verdict battery on a CY3 crystal, and seeded batteries over many
//! generated instances.

use std::time::{Duration, Instant};

use crate::crystal::{
    check_change_of_lift, check_divisibility, check_horizontality, check_newton_hodge,
    check_nilpotence_proxy, check_transversality, flat_fixed_section_check, frobenius_matrix,
    FrobeniusLift, PSeries,
};
use crate::cy3::{
    canonical_coordinates, check_gradient_relations, check_matcanfrob, check_omega_duality,
    check_pairing, check_riemann, check_stored, check_tau_gradients, check_yukawa,
    integrality_verdicts, omega_layer, picard_fuchs_check, solution_column, synth_cy3,
    yukawa_cubic, CY3Crystal, KodairaSpencer, SynthParams,
};
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::verdict::{Verdict, VerdictSet};

/// Names of the verdicts [`verify_crystal`] reports, in order.
pub const CHECKS: &[&str] = &[
    "riemann_relations",
    "stored_prepotential",
    "integrability",
    "connection_shape",
    "nilpotence_proxy",
    "horizontality",
    "divisibility",
    "newton_hodge",
    "pairing",
    "change_of_lift",
    "flat_section",
    "gradient_relations",
    "tau_gradients",
    "yukawa",
    "matcanfrob",
    "yukinnerproduct",
    "yukinteger",
    "qprops",
    "omega_duality",
    "solution_column",
    "picard_fuchs",
];

fn position(name: &str) -> usize {
    CHECKS.iter().position(|c| *c == name).expect("known check")
}

fn from(name: &str) -> &'static [&'static str] {
    &CHECKS[position(name)..]
}

fn span(first: &str, last: &str) -> &'static [&'static str] {
    &CHECKS[position(first)..=position(last)]
}

/// Runs every check on `cy`. A check that cannot run because an earlier step
/// failed is reported as failed with the blocking error as its detail.
pub fn verify_crystal(cy: &CY3Crystal) -> VerdictSet {
    let mut out = VerdictSet::default();
    let ring = cy.ring().clone();
    let (prec, deg, h) = (cy.prec(), cy.degree(), cy.h);
    let exps = cy.inst.p_exponents();

    let (riemann, data) = check_riemann(cy);
    out.push(riemann);
    out.push(match (&cy.stored, &data) {
        (None, _) => Verdict::pass("stored_prepotential").with_detail("nothing recorded"),
        (Some(s), Some(d)) => check_stored(s, d, prec),
        (Some(_), None) => Verdict::fail("stored_prepotential", 0, None).with_detail("T does not factor"),
    });

    let blocked = |out: &mut VerdictSet, names: &[&str], e: &Error| {
        for n in names {
            out.push(Verdict::error(*n, e));
        }
    };

    let conn = match cy.inst.connection() {
        Ok(c) => c,
        Err(e) => {
            blocked(&mut out, from("integrability"), &e);
            return out;
        }
    };
    out.push(conn.check_integrable(prec));
    out.push(check_transversality(&conn, &cy.inst.hodge_numbers));
    out.push(check_nilpotence_proxy(&conn));

    let phi = FrobeniusLift::standard(&ring, h, deg);
    let psi = FrobeniusLift::shifted(&ring, h, deg);
    let frob = frobenius_matrix(&cy.inst, &phi).and_then(|m| Ok((m, frobenius_matrix(&cy.inst, &psi)?)));
    let (m_phi, m_psi) = match frob {
        Ok(x) => x,
        Err(e) => {
            blocked(&mut out, from("horizontality"), &e);
            return out;
        }
    };
    out.push(check_horizontality(&conn, &phi, &m_phi, prec));
    out.push(check_divisibility(&m_phi, &exps));
    out.push(check_newton_hodge(&m_phi, &exps, prec));
    out.push(check_pairing(cy, &conn, &m_phi));
    out.push(check_change_of_lift(&conn, &phi, &psi, &m_phi, &m_psi, prec));
    out.push(match cy.t().inverse() {
        Ok(tinv) => {
            let e: Vec<PSeries> = tinv.column(0);
            flat_fixed_section_check(&conn, &[(&phi, &m_phi), (&psi, &m_psi)], &e, prec)
        }
        Err(e) => Verdict::error("flat_section", &e),
    });

    let Some(data) = data else {
        let e = Error::Malformed("T does not factor".into());
        blocked(&mut out, from("gradient_relations"), &e);
        return out;
    };
    out.push(check_gradient_relations(&data, prec));
    let ks = match KodairaSpencer::new(&data.tau23) {
        Ok(ks) => ks,
        Err(e) => {
            blocked(&mut out, from("tau_gradients"), &e);
            return out;
        }
    };
    out.push(check_tau_gradients(&data, &ks, prec));
    out.push(check_yukawa(cy, &data, &conn, &ks));

    match canonical_coordinates(&data) {
        Ok(coords) => {
            let (v, m_can) = check_matcanfrob(cy, &data, &coords);
            out.push(v);
            match m_can {
                Some(m) => out.extend(integrality_verdicts(cy, &data, &coords, &m)),
                None => {
                    let e = Error::Malformed("canonical Frobenius matrix unavailable".into());
                    blocked(&mut out, span("yukinnerproduct", "qprops"), &e);
                }
            }
        }
        Err(e) => blocked(&mut out, span("matcanfrob", "qprops"), &e),
    }

    let f = if h >= 1 {
        let t0 = cy.t().get(0, 0).var_like(0);
        t0.add(&t0.one_like())
    } else {
        cy.t().get(0, 0).one_like()
    };
    match omega_layer(cy, &ks, &f, &phi) {
        Ok(omega) => {
            out.push(check_omega_duality(cy, &omega));
            let (column, v) = solution_column(cy, &omega);
            out.push(v);
            let yuk = yukawa_cubic(&data, &ks);
            out.push(picard_fuchs_check(cy, &omega, &ks, &yuk, &column));
        }
        Err(e) => blocked(&mut out, from("omega_duality"), &e),
    }
    out
}

/// Outcome for one generated instance.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub params: SynthParams,
    pub verdicts: Result<VerdictSet>,
    pub elapsed: Duration,
}

impl CaseResult {
    pub fn pass(&self) -> bool {
        self.verdicts.as_ref().is_ok_and(VerdictSet::all_pass)
    }
}

/// Generates and verifies each instance; instances run concurrently under
/// [`Exec::Parallel`].
pub fn run_battery(cases: &[SynthParams], exec: Exec) -> Vec<CaseResult> {
    par::map(exec, cases, |params| {
        let start = Instant::now();
        let verdicts = synth_cy3(params).map(|cy| verify_crystal(&cy));
        CaseResult {
            params: *params,
            verdicts,
            elapsed: start.elapsed(),
        }
    })
}
