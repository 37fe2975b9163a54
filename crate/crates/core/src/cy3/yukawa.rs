use super::{CY3Crystal, PrepotentialData};
use crate::crystal::{newton_hodge_profile, Connection, PMatrix, PSeries};
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::verdict::{Location, Verdict};

/// `Jac[i][j] = d tau_i / d t_j` and its inverse. Derivatives in the flat
/// coordinates are `d/d tau_k = sum_j inv[j][k] d/dt_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct KodairaSpencer {
    pub jac: PMatrix,
    pub inv: PMatrix,
}

impl KodairaSpencer {
    pub fn new(tau23: &[PSeries]) -> Result<Self> {
        let h = tau23.len();
        let jac = SeriesMatrix::from_fn(h, h, |i, j| tau23[i].derivative(j));
        if h > 0 {
            let ring = jac.ring().clone();
            let m0 = jac.constant_scalars();
            match newton_hodge_profile(&ring, &m0, 1) {
                Ok(exps) if exps.iter().all(|&e| e == 0) => {}
                _ => return Err(Error::KodairaSpencerSingular),
            }
        }
        let inv = jac.inverse()?;
        Ok(Self { jac, inv })
    }

    pub fn h(&self) -> usize {
        self.jac.rows()
    }

    pub fn d_tau(&self, k: usize, s: &PSeries) -> PSeries {
        (0..self.h()).fold(s.zero_like(), |acc, j| {
            acc.add(&self.inv.get(j, k).mul(&s.derivative(j)))
        })
    }

    /// `nabla_{d/d tau_k}` on a column: `sum_j inv[j][k] (d_j v + A_j v)`.
    pub fn nabla_tau(&self, conn: &Connection, k: usize, v: &PMatrix) -> PMatrix {
        (0..self.h()).fold(v.map(|s| s.zero_like()), |acc, j| {
            acc.add(&conn.apply(j, v).scale_series(self.inv.get(j, k)))
        })
    }
}

/// A symmetric 3-tensor stored densely, `entries[(i * h + j) * h + k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct YukawaTensor {
    pub h: usize,
    pub entries: Vec<PSeries>,
}

impl YukawaTensor {
    pub fn get(&self, i: usize, j: usize, k: usize) -> &PSeries {
        &self.entries[(i * self.h + j) * self.h + k]
    }

    fn from_fn(h: usize, mut f: impl FnMut(usize, usize, usize) -> PSeries) -> Self {
        let mut entries = Vec::with_capacity(h * h * h);
        for i in 0..h {
            for j in 0..h {
                for k in 0..h {
                    entries.push(f(i, j, k));
                }
            }
        }
        Self { h, entries }
    }
}

/// `Y_ijk = -1/2 d^3 Z / d tau_i d tau_j d tau_k`, reliable up to degree `D - 3`.
pub fn yukawa_cubic(data: &PrepotentialData, ks: &KodairaSpencer) -> YukawaTensor {
    let h = data.h();
    let first: Vec<PSeries> = (0..h).map(|k| ks.d_tau(k, &data.z)).collect();
    let second: Vec<Vec<PSeries>> = (0..h)
        .map(|j| (0..h).map(|k| ks.d_tau(j, &first[k])).collect())
        .collect();
    YukawaTensor::from_fn(h, |i, j, k| ks.d_tau(i, &second[j][k]).div_int(-2))
}

/// `<e_last, nabla_i nabla_j nabla_k e_last>` computed from the connection.
pub fn yukawa_pairing(cy: &CY3Crystal, conn: &Connection, ks: &KodairaSpencer) -> YukawaTensor {
    let l = cy.layout();
    let h = cy.h;
    let ring = cy.ring();
    let mut e = SeriesMatrix::zeros(ring, h, cy.degree(), l.rank(), 1);
    e.set(l.last(), 0, e.get(0, 0).one_like());
    let j = cy.j_matrix();
    let first: Vec<PMatrix> = (0..h).map(|k| ks.nabla_tau(conn, k, &e)).collect();
    let second: Vec<Vec<PMatrix>> = (0..h)
        .map(|a| (0..h).map(|b| ks.nabla_tau(conn, a, &first[b])).collect())
        .collect();
    YukawaTensor::from_fn(h, |a, b, c| {
        let v = ks.nabla_tau(conn, a, &second[b][c]);
        let pairing = j.mul(&v);
        pairing.get(l.last(), 0).clone()
    })
}

/// Both Yukawa routes agree up to degree `D - 3`, and the pairing route is
/// symmetric in its three indices.
pub fn check_yukawa(cy: &CY3Crystal, data: &PrepotentialData, conn: &Connection, ks: &KodairaSpencer) -> Verdict {
    const NAME: &str = "yukawa";
    let h = cy.h;
    let prec = cy.prec();
    let deg = cy.degree().saturating_sub(3);
    let from_z = yukawa_cubic(data, ks);
    let from_nabla = yukawa_pairing(cy, conn, ks);
    let mut parts = Vec::new();
    let loc = |what: &str, i: usize, j: usize, k: usize, e: Vec<u32>| Location {
        component: Some(format!("{what} ({i},{j},{k})")),
        exponent: Some(e),
        ..Location::default()
    };
    for i in 0..h {
        for j in 0..h {
            for k in 0..h {
                let a = from_z.get(i, j, k);
                let b = from_nabla.get(i, j, k);
                if let Some((d, e)) = a.mismatch(b, prec, deg) {
                    parts.push(Verdict::fail(NAME, d, Some(loc("two routes", i, j, k, e))));
                }
                for (x, y, z) in [(j, i, k), (i, k, j)] {
                    if let Some((d, e)) = b.mismatch(from_nabla.get(x, y, z), prec, deg) {
                        parts.push(Verdict::fail(NAME, d, Some(loc("symmetry", i, j, k, e))));
                    }
                }
            }
        }
    }
    Verdict::all(NAME, parts)
}

/// `tau13 = -1/2 grad_tau Z` and `tau12 = -1/2 Hess_tau Z`.
pub fn check_tau_gradients(data: &PrepotentialData, ks: &KodairaSpencer, prec: i64) -> Verdict {
    const NAME: &str = "tau_gradients";
    let h = data.h();
    let deg = data.z.degree();
    let mut parts = Vec::new();
    let grad: Vec<PSeries> = (0..h).map(|i| ks.d_tau(i, &data.z)).collect();
    for i in 0..h {
        let m = data.tau13[i].mismatch(&grad[i].div_int(-2), prec, deg.saturating_sub(1));
        if let Some((d, e)) = m {
            let loc = Location::component("tau13").with_exponent(e).with_index(i as u64);
            parts.push(Verdict::fail(NAME, d, Some(loc)));
        }
        for j in 0..h {
            let hess = ks.d_tau(i, &grad[j]).div_int(-2);
            if let Some((d, e)) = data.tau12[i][j].mismatch(&hess, prec, deg.saturating_sub(2)) {
                let loc = Location {
                    component: Some("tau12".into()),
                    row: Some(i),
                    col: Some(j),
                    exponent: Some(e),
                    index: None,
                };
                parts.push(Verdict::fail(NAME, d, Some(loc)));
            }
        }
    }
    Verdict::all(NAME, parts)
}
