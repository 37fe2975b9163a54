//! A verified instance together with every intermediate the checks consume,
//! and a catalogue of single-coefficient mutations, one or more per verdict.

#![allow(dead_code)]

use cy3_core::crystal::{
    check_change_of_lift, check_divisibility, check_horizontality, check_newton_hodge,
    check_nilpotence_proxy, check_t0_fixed_point, check_transversality, flat_fixed_section_check,
    frobenius_matrix, t0_product, Connection, FCrystalInstance, FrobeniusLift, PMatrix, PSeries,
};
use cy3_core::cy3::{
    canonical_coordinates, check_gradient_relations, check_matcanfrob, check_omega_duality,
    check_pairing, check_riemann, check_stored, check_tau_gradients, check_yukawa,
    integrality_verdicts, omega_layer, picard_fuchs_check, solution_column, synth_cy3,
    yukawa_cubic, CY3Crystal, CanonicalCoords, KodairaSpencer, OmegaBasis, PrepotentialData,
    SynthMode, SynthParams,
};
use cy3_core::{CoeffRing, Padic, PadicRing, Verdict};

pub fn params(seed: u64, h: usize, p: u64, mode: SynthMode) -> SynthParams {
    SynthParams {
        seed,
        h,
        p,
        prec: 8,
        degree: 6,
        mode,
    }
}

pub struct Fixture {
    pub cy: CY3Crystal,
    pub conn: Connection,
    pub phi: FrobeniusLift,
    pub psi: FrobeniusLift,
    pub m_phi: PMatrix,
    pub m_psi: PMatrix,
    pub data: PrepotentialData,
    pub ks: KodairaSpencer,
    pub coords: CanonicalCoords,
    pub m_can: PMatrix,
    pub omega: OmegaBasis,
    pub column: Vec<PSeries>,
}

impl Fixture {
    pub fn new(params: SynthParams) -> Self {
        let cy = synth_cy3(&params).unwrap();
        let ring = cy.ring().clone();
        let (h, deg) = (cy.h, cy.degree());
        let conn = cy.inst.connection().unwrap();
        let phi = FrobeniusLift::standard(&ring, h, deg);
        let psi = FrobeniusLift::shifted(&ring, h, deg);
        let m_phi = frobenius_matrix(&cy.inst, &phi).unwrap();
        let m_psi = frobenius_matrix(&cy.inst, &psi).unwrap();
        let (_, data) = check_riemann(&cy);
        let data = data.unwrap();
        let ks = KodairaSpencer::new(&data.tau23).unwrap();
        let coords = canonical_coordinates(&data).unwrap();
        let (_, m_can) = check_matcanfrob(&cy, &data, &coords);
        let f = if h >= 1 {
            let t0 = cy.t().get(0, 0).var_like(0);
            t0.add(&t0.one_like())
        } else {
            cy.t().get(0, 0).one_like()
        };
        let omega = omega_layer(&cy, &ks, &f, &phi).unwrap();
        let (column, _) = solution_column(&cy, &omega);
        Self {
            cy,
            conn,
            phi,
            psi,
            m_phi,
            m_psi,
            data,
            ks,
            coords,
            m_can: m_can.unwrap(),
            omega,
            column,
        }
    }

    pub fn ring(&self) -> &PadicRing {
        self.cy.ring()
    }

    pub fn prec(&self) -> i64 {
        self.cy.prec()
    }

    /// `x` with `c` added to its coefficient at `t^exp`.
    pub fn bump(&self, x: &PSeries, exp: &[u32], c: i64) -> PSeries {
        bump(x, exp, self.ring().from_i64(c))
    }

    pub fn bump_entry(&self, m: &PMatrix, i: usize, j: usize, exp: &[u32], c: i64) -> PMatrix {
        let mut out = m.clone();
        out.set(i, j, self.bump(m.get(i, j), exp, c));
        out
    }

    /// The same crystal with `T` replaced.
    pub fn with_t(&self, t: PMatrix) -> CY3Crystal {
        let inst = FCrystalInstance::new(self.ring().clone(), self.cy.inst.hodge_numbers.clone(), t).unwrap();
        let mut cy = CY3Crystal::new(inst, self.cy.gramm).unwrap();
        cy.stored = self.cy.stored.clone();
        cy
    }
}

pub fn bump(x: &PSeries, exp: &[u32], c: Padic) -> PSeries {
    let mut out = x.clone();
    let v = x.ring().add(&x.coeff(exp), &c);
    out.set(exp, v);
    out
}

fn find<'a>(vs: &'a [Verdict], name: &str) -> Verdict {
    vs.iter().find(|v| v.name == name).cloned().expect("verdict present")
}

/// A targeted perturbation and the verdict it must flip.
pub struct Mutation {
    pub verdict: &'static str,
    pub what: &'static str,
    pub run: fn(&Fixture) -> Verdict,
}

/// Mutations against an `h = 1` fixture. Every entry changes exactly one
/// coefficient of one input to the named check.
pub fn catalogue() -> Vec<Mutation> {
    vec![
        Mutation {
            verdict: "riemann_relations",
            what: "T[0][b1] at t^2 += 1",
            run: |f| {
                let b1 = f.cy.layout().b1(0);
                check_riemann(&f.with_t(f.bump_entry(f.cy.t(), 0, b1, &[2], 1))).0
            },
        },
        Mutation {
            verdict: "stored_prepotential",
            what: "stored Z at t^1 += 1",
            run: |f| {
                let mut stored = f.cy.stored.clone().unwrap();
                stored.z = f.bump(&stored.z, &[1], 1);
                check_stored(&stored, &f.data, f.prec())
            },
        },
        Mutation {
            verdict: "integrability",
            what: "A_0[0][1] at t^0 += 1 on an h = 2 crystal",
            run: |_| {
                let g = Fixture::new(params(7, 2, 5, SynthMode::Generic));
                let mut parts = g.conn.parts().to_vec();
                parts[0] = g.bump_entry(&parts[0], 0, 1, &[0, 0], 1);
                Connection::new(g.conn.rank(), parts).unwrap().check_integrable(g.prec())
            },
        },
        Mutation {
            verdict: "connection_shape",
            what: "A_0[last][0] at t^0 += 1",
            run: |f| {
                let last = f.cy.layout().last();
                let mut parts = f.conn.parts().to_vec();
                parts[0] = f.bump_entry(&parts[0], last, 0, &[0], 1);
                let conn = Connection::new(f.conn.rank(), parts).unwrap();
                check_transversality(&conn, &f.cy.inst.hodge_numbers)
            },
        },
        Mutation {
            verdict: "nilpotence_proxy",
            what: "A_0[0][0] at t^0 += 1 on a degree-8 crystal",
            run: |_| {
                let mut p = params(7, 1, 5, SynthMode::Generic);
                (p.prec, p.degree) = (6, 8);
                let g = Fixture::new(p);
                let mut parts = g.conn.parts().to_vec();
                parts[0] = g.bump_entry(&parts[0], 0, 0, &[0], 1);
                check_nilpotence_proxy(&Connection::new(g.conn.rank(), parts).unwrap())
            },
        },
        Mutation {
            verdict: "horizontality",
            what: "M_phi[0][1] at t^2 += 1",
            run: |f| check_horizontality(&f.conn, &f.phi, &f.bump_entry(&f.m_phi, 0, 1, &[2], 1), f.prec()),
        },
        Mutation {
            verdict: "divisibility",
            what: "M_phi[0][last] at t^0 += 1",
            run: |f| {
                let last = f.cy.layout().last();
                check_divisibility(&f.bump_entry(&f.m_phi, 0, last, &[0], 1), &f.cy.inst.p_exponents())
            },
        },
        Mutation {
            verdict: "newton_hodge",
            what: "M_phi[last][last] at t^0 += 1",
            run: |f| {
                let last = f.cy.layout().last();
                let m = f.bump_entry(&f.m_phi, last, last, &[0], 1);
                check_newton_hodge(&m, &f.cy.inst.p_exponents(), f.prec())
            },
        },
        Mutation {
            verdict: "pairing",
            what: "M_phi[0][0] at t^0 += 1",
            run: |f| check_pairing(&f.cy, &f.conn, &f.bump_entry(&f.m_phi, 0, 0, &[0], 1)),
        },
        Mutation {
            verdict: "pairing",
            what: "antidiagonal sign of J flipped",
            run: |f| {
                let mut cy = f.cy.clone();
                cy.gramm.signs[1] = -cy.gramm.signs[1];
                check_pairing(&cy, &f.conn, &f.m_phi)
            },
        },
        Mutation {
            verdict: "change_of_lift",
            what: "M_psi[0][1] at t^2 += 1",
            run: |f| {
                let m_psi = f.bump_entry(&f.m_psi, 0, 1, &[2], 1);
                check_change_of_lift(&f.conn, &f.phi, &f.psi, &f.m_phi, &m_psi, f.prec())
            },
        },
        Mutation {
            verdict: "flat_section",
            what: "e[0] at t^1 += 1",
            run: |f| {
                let mut e = f.cy.t().inverse().unwrap().column(0);
                e[0] = f.bump(&e[0], &[1], 1);
                flat_fixed_section_check(&f.conn, &[(&f.phi, &f.m_phi), (&f.psi, &f.m_psi)], &e, f.prec())
            },
        },
        Mutation {
            verdict: "gradient_relations",
            what: "tau13 at t^2 += 1",
            run: |f| {
                let mut d = f.data.clone();
                d.tau13[0] = f.bump(&d.tau13[0], &[2], 1);
                check_gradient_relations(&d, f.prec())
            },
        },
        Mutation {
            verdict: "tau_gradients",
            what: "tau12 at t^1 += 1",
            run: |f| {
                let mut d = f.data.clone();
                d.tau12[0][0] = f.bump(&d.tau12[0][0], &[1], 1);
                check_tau_gradients(&d, &f.ks, f.prec())
            },
        },
        Mutation {
            verdict: "yukawa",
            what: "Z at t^3 += 1",
            run: |f| {
                let mut d = f.data.clone();
                d.z = f.bump(&d.z, &[3], 1);
                check_yukawa(&f.cy, &d, &f.conn, &f.ks)
            },
        },
        Mutation {
            verdict: "matcanfrob",
            what: "Z at t^2 += 1",
            run: |f| {
                let mut d = f.data.clone();
                d.z = f.bump(&d.z, &[2], 1);
                check_matcanfrob(&f.cy, &d, &f.coords).0
            },
        },
        Mutation {
            verdict: "yukinnerproduct",
            what: "M_can[0][last] at t^1 += 1",
            run: |f| {
                let last = f.cy.layout().last();
                let m = f.bump_entry(&f.m_can, 0, last, &[1], 1);
                find(&integrality_verdicts(&f.cy, &f.data, &f.coords, &m), "yukinnerproduct")
            },
        },
        Mutation {
            verdict: "yukinteger",
            what: "Z at t^0 += 1",
            run: |f| {
                let mut d = f.data.clone();
                d.z = f.bump(&d.z, &[0], 1);
                find(&integrality_verdicts(&f.cy, &d, &f.coords, &f.m_can), "yukinteger")
            },
        },
        Mutation {
            verdict: "qprops",
            what: "q at t^0 += 1",
            run: |f| {
                let mut c = f.coords.clone();
                c.q[0] = f.bump(&c.q[0], &[0], 1);
                find(&integrality_verdicts(&f.cy, &f.data, &c, &f.m_can), "qprops")
            },
        },
        Mutation {
            verdict: "qprops",
            what: "q at t^2 += 1/p",
            run: |f| {
                let mut c = f.coords.clone();
                c.q[0] = bump(&c.q[0], &[2], f.ring().p_pow(-1));
                find(&integrality_verdicts(&f.cy, &f.data, &c, &f.m_can), "qprops")
            },
        },
        Mutation {
            verdict: "omega_duality",
            what: "S[0][0] at t^1 += 1",
            run: |f| {
                let mut o = f.omega.clone();
                o.s = f.bump_entry(&o.s, 0, 0, &[1], 1);
                check_omega_duality(&f.cy, &o)
            },
        },
        Mutation {
            verdict: "solution_column",
            what: "f at t^2 += 1",
            run: |f| {
                let mut o = f.omega.clone();
                o.f = f.bump(&o.f, &[2], 1);
                solution_column(&f.cy, &o).1
            },
        },
        Mutation {
            verdict: "picard_fuchs",
            what: "solution entry 0 at t^4 += 1",
            run: |f| {
                let mut column = f.column.clone();
                column[0] = f.bump(&column[0], &[4], 1);
                let yuk = yukawa_cubic(&f.data, &f.ks);
                picard_fuchs_check(&f.cy, &f.omega, &f.ks, &yuk, &column)
            },
        },
        Mutation {
            verdict: "t0_fixed_point",
            what: "T0[0][1] += p^2 on the 2x2 closed form",
            run: |f| {
                let r = PadicRing::new(5, 3, 2).unwrap();
                let _ = f;
                let l0 = vec![vec![r.one(), r.one()], vec![r.zero(), r.one()]];
                let mut t0 = t0_product(&r, &l0, &[0, 1]).unwrap();
                t0[0][1] = r.add(&t0[0][1], &r.p_pow(2));
                check_t0_fixed_point(&r, &t0, &l0, &[0, 1], 3)
            },
        },
    ]
}
