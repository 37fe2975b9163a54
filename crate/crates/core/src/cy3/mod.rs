//! Calabi-Yau threefold crystals: Hodge numbers `(1, h, h, 1)`, the
//! symplectic form, the factorization `T = U(tau23) B(Z, tau12, tau13)` and
//! everything derived from the prepotential `Z`.
//!
//! Basis vectors are ordered `0 | 1..=h | h+1..=2h | 2h+1`. The constant Gramm
//! matrix has antidiagonal blocks `(-1, I, -I, 1)`: `J[0][2h+1] = -1`,
//! `J[i][h+i] = 1`, `J[h+i][i] = -1`, `J[2h+1][0] = 1`.

mod canonical;
mod omega;
mod synth;
mod yukawa;

pub use canonical::{
    canonical_coordinates, canonical_frobenius_matrix, check_matcanfrob, integrality_verdicts,
    matcanfrob_closed_form, CanonicalCoords,
};
pub use omega::{check_omega_duality, omega_layer, picard_fuchs_check, solution_column, OmegaBasis};
pub use synth::{cy3_from_zeta, synth_cy3, Chart, SynthMode, SynthParams};
pub use yukawa::{
    check_tau_gradients, check_yukawa, yukawa_cubic, yukawa_pairing, KodairaSpencer, YukawaTensor,
};

use serde_json::{json, Value};

use crate::crystal::{Connection, FCrystalInstance, PMatrix, PSeries};
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic::PadicRing;
use crate::ring::CoeffRing;
use crate::series::{series_from_json, series_to_json, Series};
use crate::verdict::{Location, Verdict};

/// Index arithmetic for the `(1, h, h, 1)` block layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub h: usize,
}

impl Layout {
    pub fn rank(self) -> usize {
        2 * self.h + 2
    }
    pub fn b1(self, i: usize) -> usize {
        1 + i
    }
    pub fn b2(self, i: usize) -> usize {
        1 + self.h + i
    }
    pub fn last(self) -> usize {
        2 * self.h + 1
    }
    pub fn hodge_numbers(self) -> Vec<usize> {
        vec![1, self.h, self.h, 1]
    }
}

/// Signs of the four antidiagonal blocks `(0,last), (b1,b2), (b2,b1), (last,0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gramm {
    pub signs: [i8; 4],
}

impl Gramm {
    pub const STANDARD: Gramm = Gramm { signs: [-1, 1, -1, 1] };

    pub fn is_standard(&self) -> bool {
        *self == Self::STANDARD
    }

    pub fn entries(&self, h: usize) -> Vec<Vec<i64>> {
        let l = Layout { h };
        let mut j = vec![vec![0i64; l.rank()]; l.rank()];
        j[0][l.last()] = self.signs[0] as i64;
        for i in 0..h {
            j[l.b1(i)][l.b2(i)] = self.signs[1] as i64;
            j[l.b2(i)][l.b1(i)] = self.signs[2] as i64;
        }
        j[l.last()][0] = self.signs[3] as i64;
        j
    }

    pub fn matrix(&self, ring: &PadicRing, nvars: usize, degree: u32, h: usize) -> PMatrix {
        let scalars: Vec<Vec<_>> = self
            .entries(h)
            .iter()
            .map(|row| row.iter().map(|&x| ring.from_i64(x)).collect())
            .collect();
        SeriesMatrix::from_scalars(ring, nvars, degree, &scalars)
    }

    pub fn to_json(&self) -> Value {
        json!({ "antidiagonal_signs": self.signs })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let signs = v["antidiagonal_signs"]
            .as_array()
            .filter(|a| a.len() == 4)
            .ok_or_else(|| Error::Malformed("J needs four antidiagonal_signs".into()))?;
        let mut out = [0i8; 4];
        for (o, s) in out.iter_mut().zip(signs) {
            *o = match s.as_i64() {
                Some(1) => 1,
                Some(-1) => -1,
                _ => return Err(Error::Malformed("J signs must be +1 or -1".into())),
            };
        }
        Ok(Self { signs: out })
    }
}

/// The blocks read off from `T`. `tau12[i][j]` is row `i`, column `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrepotentialData {
    pub z: PSeries,
    pub tau23: Vec<PSeries>,
    pub tau13: Vec<PSeries>,
    pub tau12: Vec<Vec<PSeries>>,
}

impl PrepotentialData {
    pub fn h(&self) -> usize {
        self.tau23.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "Z": series_to_json(&self.z),
            "tau23": self.tau23.iter().map(series_to_json).collect::<Vec<_>>(),
            "tau13": self.tau13.iter().map(series_to_json).collect::<Vec<_>>(),
            "tau12": self.tau12.iter()
                .map(|r| r.iter().map(series_to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(ring: &PadicRing, v: &Value, h: usize) -> Result<Self> {
        let list = |key: &str| -> Result<Vec<PSeries>> {
            let arr = v[key]
                .as_array()
                .filter(|a| a.len() == h)
                .ok_or_else(|| Error::Malformed(format!("{key} must list {h} series")))?;
            arr.iter().map(|s| series_from_json(ring, s)).collect()
        };
        let rows = v["tau12"]
            .as_array()
            .filter(|a| a.len() == h)
            .ok_or_else(|| Error::Malformed(format!("tau12 must have {h} rows")))?;
        let tau12 = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .filter(|a| a.len() == h)
                    .ok_or_else(|| Error::Malformed(format!("tau12 rows must have {h} entries")))?
                    .iter()
                    .map(|s| series_from_json(ring, s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            z: series_from_json(ring, &v["Z"])?,
            tau23: list("tau23")?,
            tau13: list("tau13")?,
            tau12,
        })
    }
}

/// An ordinary CY3 crystal: an F-crystal with Hodge numbers `(1, h, h, 1)`
/// and a Gramm matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CY3Crystal {
    pub inst: FCrystalInstance,
    pub h: usize,
    pub gramm: Gramm,
    /// Prepotential blocks recorded alongside `T`, if any.
    pub stored: Option<PrepotentialData>,
    pub seed: Option<u64>,
    pub mode: Option<SynthMode>,
}

impl CY3Crystal {
    pub fn new(inst: FCrystalInstance, gramm: Gramm) -> Result<Self> {
        let rank = inst.rank();
        if rank < 2 || rank % 2 != 0 {
            return Err(Error::Shape(format!("rank {rank} is not of the form 2h + 2")));
        }
        let h = (rank - 2) / 2;
        if inst.hodge_numbers != (Layout { h }).hodge_numbers() {
            return Err(Error::Shape(format!(
                "Hodge numbers {:?} are not (1, {h}, {h}, 1)",
                inst.hodge_numbers
            )));
        }
        if inst.nvars() != h {
            return Err(Error::Shape(format!("{h} parameters expected, T has {}", inst.nvars())));
        }
        Ok(Self {
            inst,
            h,
            gramm,
            stored: None,
            seed: None,
            mode: None,
        })
    }

    pub fn layout(&self) -> Layout {
        Layout { h: self.h }
    }
    pub fn ring(&self) -> &PadicRing {
        &self.inst.ring
    }
    pub fn t(&self) -> &PMatrix {
        &self.inst.t
    }
    pub fn degree(&self) -> u32 {
        self.inst.degree()
    }
    pub fn prec(&self) -> i64 {
        self.inst.prec()
    }
    pub fn j_matrix(&self) -> PMatrix {
        self.gramm.matrix(self.ring(), self.h, self.degree(), self.h)
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.inst.to_json();
        let obj = v.as_object_mut().expect("instance json is an object");
        obj.insert("h".into(), json!(self.h));
        obj.insert("J".into(), self.gramm.to_json());
        if let Some(data) = &self.stored {
            if let Value::Object(extra) = data.to_json() {
                obj.extend(extra);
            }
        }
        if let Some(seed) = self.seed {
            obj.insert("seed".into(), json!(seed));
        }
        if let Some(mode) = self.mode {
            obj.insert("mode".into(), json!(mode.as_str()));
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let inst = FCrystalInstance::from_json(v)?;
        let gramm = Gramm::from_json(&v["J"])?;
        let mut cy = Self::new(inst, gramm)?;
        if let Some(h) = v.get("h") {
            if h.as_u64() != Some(cy.h as u64) {
                return Err(Error::Malformed("h does not match the size of T".into()));
            }
        }
        if v.get("Z").is_some() {
            cy.stored = Some(PrepotentialData::from_json(cy.ring(), v, cy.h)?);
        }
        cy.seed = v.get("seed").and_then(Value::as_u64);
        cy.mode = match v.get("mode").and_then(Value::as_str) {
            None => None,
            Some(s) => Some(SynthMode::parse(s)?),
        };
        Ok(cy)
    }
}

/// `U(x)` with `x` in positions `(0, b1)` (transposed) and `(b2, last)`.
pub fn u_matrix(ring: &PadicRing, nvars: usize, degree: u32, tau23: &[PSeries]) -> PMatrix {
    let l = Layout { h: tau23.len() };
    let mut m = SeriesMatrix::identity(ring, nvars, degree, l.rank());
    for (i, x) in tau23.iter().enumerate() {
        m.set(0, l.b1(i), x.clone());
        m.set(l.b2(i), l.last(), x.clone());
    }
    m
}

/// `B(Z, tau12, tau13)`: `Z` at `(0, last)`, `-tau13*` at `(0, b2)`,
/// `tau12` at `(b1, b2)`, `tau13` at `(b1, last)`.
pub fn b_matrix(
    ring: &PadicRing,
    nvars: usize,
    degree: u32,
    z: &PSeries,
    tau12: &[Vec<PSeries>],
    tau13: &[PSeries],
) -> PMatrix {
    let l = Layout { h: tau13.len() };
    let mut m = SeriesMatrix::identity(ring, nvars, degree, l.rank());
    m.set(0, l.last(), z.clone());
    for i in 0..l.h {
        m.set(0, l.b2(i), tau13[i].neg());
        m.set(l.b1(i), l.last(), tau13[i].clone());
        for j in 0..l.h {
            m.set(l.b1(i), l.b2(j), tau12[i][j].clone());
        }
    }
    m
}

/// `T = U(tau23) B(Z, tau12, tau13)`.
pub fn assemble_t(ring: &PadicRing, nvars: usize, degree: u32, data: &PrepotentialData) -> PMatrix {
    u_matrix(ring, nvars, degree, &data.tau23).mul(&b_matrix(
        ring, nvars, degree, &data.z, &data.tau12, &data.tau13,
    ))
}

fn dot(a: &[PSeries], b: &[PSeries], zero: &PSeries) -> PSeries {
    a.iter().zip(b).fold(zero.clone(), |acc, (x, y)| acc.add(&x.mul(y)))
}

/// Reads `tau23, tau13, tau12` and `Z = tau03 - tau23* tau13` from `T` and
/// checks the Riemann relations `tau01 = tau23*`, `tau12 = tau12*` and
/// `tau02 = tau23* tau12 - tau13*` modulo `p^M`.
pub fn factor_t(cy: &CY3Crystal) -> Result<PrepotentialData> {
    let l = cy.layout();
    let t = cy.t();
    let (prec, deg) = (cy.prec(), cy.degree());
    let zero = t.get(0, 0).zero_like();
    let tau23: Vec<_> = (0..l.h).map(|i| t.get(l.b2(i), l.last()).clone()).collect();
    let tau13: Vec<_> = (0..l.h).map(|i| t.get(l.b1(i), l.last()).clone()).collect();
    let tau12: Vec<Vec<_>> = (0..l.h)
        .map(|i| (0..l.h).map(|j| t.get(l.b1(i), l.b2(j)).clone()).collect())
        .collect();
    let z = t.get(0, l.last()).sub(&dot(&tau23, &tau13, &zero));

    let violation = |relation: &str, row, col, found: &PSeries, expected: &PSeries| -> Result<()> {
        match found.mismatch(expected, prec, deg) {
            None => Ok(()),
            Some((_, exponent)) => Err(Error::RiemannViolation {
                relation: relation.into(),
                row,
                col,
                exponent,
            }),
        }
    };
    for i in 0..l.h {
        violation("tau01 = tau23*", 0, l.b1(i), t.get(0, l.b1(i)), &tau23[i])?;
    }
    for i in 0..l.h {
        for j in i + 1..l.h {
            violation("tau12 = tau12*", l.b1(i), l.b2(j), &tau12[i][j], &tau12[j][i])?;
        }
    }
    for j in 0..l.h {
        let col: Vec<_> = (0..l.h).map(|i| tau12[i][j].clone()).collect();
        let expected = dot(&tau23, &col, &zero).sub(&tau13[j]);
        violation("tau02 = tau23* tau12 - tau13*", 0, l.b2(j), t.get(0, l.b2(j)), &expected)?;
    }
    Ok(PrepotentialData {
        z,
        tau23,
        tau13,
        tau12,
    })
}

/// `factor_t` as a verdict.
pub fn check_riemann(cy: &CY3Crystal) -> (Verdict, Option<PrepotentialData>) {
    const NAME: &str = "riemann_relations";
    match factor_t(cy) {
        Ok(d) => (Verdict::pass(NAME), Some(d)),
        Err(Error::RiemannViolation {
            relation,
            row,
            col,
            exponent,
        }) => {
            let loc = Location {
                component: Some(relation.clone()),
                row: Some(row),
                col: Some(col),
                exponent: Some(exponent),
                index: None,
            };
            (Verdict::fail(NAME, 0, Some(loc)).with_detail(relation), None)
        }
        Err(e) => (Verdict::error(NAME, &e), None),
    }
}

/// Compatibility of the form with the connection, Frobenius and `T`:
/// (i) `A_j* J + J A_j = 0` up to degree `D - 1`, (ii) `M_phi* J M_phi = p^3 J`,
/// (iii) `J` has the standard block form and `T* J T = J`.
pub fn check_pairing(cy: &CY3Crystal, conn: &Connection, m_phi: &PMatrix) -> Verdict {
    const NAME: &str = "pairing";
    let (prec, deg) = (cy.prec(), cy.degree());
    let j = cy.j_matrix();
    let mut parts = Vec::new();
    for (k, a) in conn.parts().iter().enumerate() {
        let lhs = a.transpose().mul(&j).add(&j.mul(a));
        let zero = lhs.map(|s| s.zero_like());
        parts.push(Verdict::from_mismatch(
            "pairing_connection",
            &format!("A_{k}* J + J A_{k}"),
            lhs.mismatch(&zero, prec, deg.saturating_sub(1)),
        ));
    }
    let p3 = cy.ring().p_pow(3);
    let frob = m_phi.transpose().mul(&j).mul(m_phi);
    parts.push(Verdict::from_mismatch(
        "pairing_frobenius",
        "M_phi* J M_phi",
        frob.mismatch(&j.scale(&p3), prec, deg),
    ));
    if !cy.gramm.is_standard() {
        let loc = Location::component("J");
        parts.push(Verdict::fail("pairing_gramm", 0, Some(loc)).with_detail("J is not the standard form"));
    }
    let gram = cy.t().transpose().mul(&j).mul(cy.t());
    parts.push(Verdict::from_mismatch("pairing_gramm", "T* J T", gram.mismatch(&j, prec, deg)));
    Verdict::all(NAME, parts)
}

/// `d tau13 = tau12 d tau23` and `dZ = -2 tau13* d tau23`, coefficientwise in
/// every `dt_j`, up to degree `D - 1`.
pub fn check_gradient_relations(data: &PrepotentialData, prec: i64) -> Verdict {
    const NAME: &str = "gradient_relations";
    let h = data.h();
    let deg = data.z.degree().saturating_sub(1);
    let zero = data.z.zero_like();
    let mut parts = Vec::new();
    for var in 0..data.z.nvars() {
        let d23: Vec<_> = data.tau23.iter().map(|s| s.derivative(var)).collect();
        for i in 0..h {
            let lhs = data.tau13[i].derivative(var);
            let rhs = dot(&data.tau12[i], &d23, &zero);
            if let Some((d, e)) = lhs.mismatch(&rhs, prec, deg) {
                let loc = Location::component(format!("d_{var} tau13")).with_exponent(e);
                parts.push(Verdict::fail(NAME, d, Some(Location { row: Some(i), ..loc })));
            }
        }
        let lhs = data.z.derivative(var);
        let rhs = dot(&data.tau13, &d23, &zero).mul_int(-2);
        if let Some((d, e)) = lhs.mismatch(&rhs, prec, deg) {
            let loc = Location::component(format!("d_{var} Z")).with_exponent(e);
            parts.push(Verdict::fail(NAME, d, Some(loc)));
        }
    }
    Verdict::all(NAME, parts)
}

/// Agreement of the recorded prepotential blocks with those read off `T`.
pub fn check_stored(stored: &PrepotentialData, data: &PrepotentialData, prec: i64) -> Verdict {
    const NAME: &str = "stored_prepotential";
    let deg = data.z.degree();
    let mut pairs: Vec<(String, &Series<PadicRing>, &Series<PadicRing>)> = vec![("Z".into(), &stored.z, &data.z)];
    for i in 0..data.h() {
        pairs.push((format!("tau23[{i}]"), &stored.tau23[i], &data.tau23[i]));
        pairs.push((format!("tau13[{i}]"), &stored.tau13[i], &data.tau13[i]));
        for j in 0..data.h() {
            pairs.push((format!("tau12[{i}][{j}]"), &stored.tau12[i][j], &data.tau12[i][j]));
        }
    }
    for (name, a, b) in pairs {
        if let Some((d, e)) = a.mismatch(b, prec, deg) {
            return Verdict::fail(NAME, d, Some(Location::component(name).with_exponent(e)));
        }
    }
    Verdict::pass(NAME)
}
