//! F-crystals over `Z_p[[t_1..t_n]]` presented by a unipotent matrix `T`:
//! the connection is `T^-1 dT` and, for a lift `psi`, Frobenius is `T^-1 P psi(T)`.

mod diagnostics;
mod solve;
mod t0;
mod transport;

pub use diagnostics::{
    check_divisibility, check_newton_hodge, check_nilpotence_proxy, check_transversality,
    flat_fixed_section_check, newton_hodge_profile,
};
pub use solve::solve_t;
pub use t0::{check_t0_fixed_point, t0_product};
pub use transport::{check_change_of_lift, taylor_transport};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic::PadicRing;
use crate::ring::CoeffRing;
use crate::series::{Series, SubstitutionPlan};
use crate::verdict::{Location, Verdict};

pub type PSeries = Series<PadicRing>;
pub type PMatrix = SeriesMatrix<PadicRing>;

/// A substitution endomorphism `t_j -> images[j]` reducing to Frobenius mod p.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusLift {
    images: Vec<PSeries>,
}

impl FrobeniusLift {
    /// `t_j -> t_j^p`.
    pub fn standard(ring: &PadicRing, nvars: usize, degree: u32) -> Self {
        let p = ring.p() as u32;
        let images = (0..nvars)
            .map(|j| {
                let mut e = vec![0; nvars];
                e[j] = p;
                Series::monomial(ring, nvars, degree, &e, ring.one())
            })
            .collect();
        Self { images }
    }

    /// `t_j -> t_j^p + p t_j`.
    pub fn shifted(ring: &PadicRing, nvars: usize, degree: u32) -> Self {
        let std = Self::standard(ring, nvars, degree);
        let p = ring.p() as i64;
        let images = std
            .images
            .iter()
            .enumerate()
            .map(|(j, s)| s.add(&Series::var(ring, nvars, degree, j).mul_int(p)))
            .collect();
        Self { images }
    }

    /// Validates integrality and `images[j] = t_j^p mod p`.
    pub fn new(ring: &PadicRing, images: Vec<PSeries>) -> Result<Self> {
        let n = images.len();
        if let Some(first) = images.first() {
            let std = Self::standard(ring, n, first.degree());
            for (j, (img, s)) in images.iter().zip(&std.images).enumerate() {
                if img.nvars() != n {
                    return Err(Error::Shape(format!("lift image {j} has the wrong arity")));
                }
                if let Some((v, e)) = img.sub(s).min_valuation() {
                    if v < 1 {
                        return Err(Error::Malformed(format!(
                            "lift image {j} is not t^p mod p (coefficient of t^{e:?} has valuation {v})"
                        )));
                    }
                }
            }
        }
        Ok(Self { images })
    }

    pub fn images(&self) -> &[PSeries] {
        &self.images
    }
    pub fn nvars(&self) -> usize {
        self.images.len()
    }

    pub fn plan(&self, degree: u32) -> Result<Option<SubstitutionPlan<PadicRing>>> {
        if self.images.is_empty() {
            return Ok(None);
        }
        SubstitutionPlan::new(degree, &self.images).map(Some)
    }

    pub fn apply(&self, s: &PSeries) -> Result<PSeries> {
        s.substitute(&self.images)
    }

    pub fn apply_matrix(&self, m: &PMatrix) -> Result<PMatrix> {
        match self.plan(m.degree())? {
            None => Ok(m.clone()),
            Some(plan) => Ok(m.substitute_with(&plan)),
        }
    }
}

/// `nabla = sum_j A_j dt_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    parts: Vec<PMatrix>,
    rank: usize,
}

impl Connection {
    pub fn new(rank: usize, parts: Vec<PMatrix>) -> Result<Self> {
        if parts.iter().any(|a| a.rows() != rank || a.cols() != rank) {
            return Err(Error::Shape("connection matrices must be rank x rank".into()));
        }
        Ok(Self { parts, rank })
    }

    /// `A_j = T^-1 d_j T`.
    pub fn from_t(t: &PMatrix) -> Result<Self> {
        let tinv = t.inverse()?;
        let parts = (0..t.nvars()).map(|j| tinv.mul(&t.derivative(j))).collect();
        Self::new(t.rows(), parts)
    }

    pub fn parts(&self) -> &[PMatrix] {
        &self.parts
    }
    pub fn part(&self, j: usize) -> &PMatrix {
        &self.parts[j]
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn nvars(&self) -> usize {
        self.parts.len()
    }

    /// `D_j X = d_j X + A_j X` for a matrix (or column) `X`.
    pub fn apply(&self, j: usize, x: &PMatrix) -> PMatrix {
        x.derivative(j).add(&self.parts[j].mul(x))
    }

    /// Zero curvature `d_j A_k - d_k A_j + A_j A_k - A_k A_j = 0` up to degree `D - 1`.
    pub fn check_integrable(&self, prec: i64) -> Verdict {
        let mut parts = Vec::new();
        for j in 0..self.nvars() {
            for k in j + 1..self.nvars() {
                let (aj, ak) = (&self.parts[j], &self.parts[k]);
                let curv = ak
                    .derivative(j)
                    .sub(&aj.derivative(k))
                    .add(&aj.mul(ak))
                    .sub(&ak.mul(aj));
                let zero = curv.map(|s| s.zero_like());
                let d = curv.degree().saturating_sub(1);
                parts.push(Verdict::from_mismatch(
                    "integrability",
                    &format!("curvature({j},{k})"),
                    curv.mismatch(&zero, prec, d),
                ));
            }
        }
        Verdict::all("integrability", parts)
    }
}

/// An F-crystal with Hodge numbers `h^0..h^N`, given by its matrix `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct FCrystalInstance {
    pub ring: PadicRing,
    pub hodge_numbers: Vec<usize>,
    pub t: PMatrix,
}

impl FCrystalInstance {
    pub fn new(ring: PadicRing, hodge_numbers: Vec<usize>, t: PMatrix) -> Result<Self> {
        let rank: usize = hodge_numbers.iter().sum();
        if t.rows() != rank || t.cols() != rank {
            return Err(Error::Shape(format!(
                "T is {}x{} but the Hodge numbers give rank {rank}",
                t.rows(),
                t.cols()
            )));
        }
        let inst = Self {
            ring,
            hodge_numbers,
            t,
        };
        inst.check_unipotent()?;
        Ok(inst)
    }

    pub fn level(&self) -> usize {
        self.hodge_numbers.len().saturating_sub(1)
    }
    pub fn rank(&self) -> usize {
        self.hodge_numbers.iter().sum()
    }
    pub fn nvars(&self) -> usize {
        self.t.nvars()
    }
    pub fn degree(&self) -> u32 {
        self.t.degree()
    }
    pub fn prec(&self) -> i64 {
        self.ring.prec() as i64
    }

    /// Hodge block of each basis vector, which is also its `P` exponent.
    pub fn p_exponents(&self) -> Vec<u32> {
        block_indices(&self.hodge_numbers)
    }

    pub fn p_matrix(&self) -> PMatrix {
        let diag: Vec<_> = self
            .p_exponents()
            .iter()
            .map(|&e| self.ring.p_pow(e as i64))
            .collect();
        SeriesMatrix::diagonal(&self.ring, self.nvars(), self.degree(), &diag)
    }

    pub fn connection(&self) -> Result<Connection> {
        Connection::from_t(&self.t)
    }

    /// Block upper triangular with identity diagonal blocks, and constant term
    /// of block `(i, j)` divisible by `p^(j - i)`.
    pub fn check_unipotent(&self) -> Result<()> {
        let blocks = self.p_exponents();
        let r = &self.ring;
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                let s = self.t.get(i, j);
                let (bi, bj) = (blocks[i], blocks[j]);
                if bi > bj || (bi == bj && i != j) {
                    if !s.is_zero() {
                        return Err(Error::NotUnipotent(format!("entry ({i},{j}) must vanish")));
                    }
                } else if i == j {
                    if s != &s.one_like() {
                        return Err(Error::NotUnipotent(format!("diagonal entry {i} must be 1")));
                    }
                } else {
                    let c = s.constant_term();
                    if let Some(v) = r.valuation(c) {
                        if v < (bj - bi) as i64 {
                            return Err(Error::NotUnipotent(format!(
                                "constant term of entry ({i},{j}) has valuation {v} < {}",
                                bj - bi
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.ring.p(),
            "precision": self.ring.prec(),
            "guard": self.ring.context().guard(),
            "level": self.level(),
            "hodge_numbers": self.hodge_numbers,
            "nvars": self.nvars(),
            "degree": self.degree(),
            "T": self.t.to_json(),
            "P": self.p_exponents(),
        })
    }

    /// Reads `{"p", "precision", "guard"?, "hodge_numbers", "T", ...}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let ring = ring_from_json(v)?;
        let hodge: Vec<usize> = v["hodge_numbers"]
            .as_array()
            .ok_or_else(|| Error::Malformed("missing hodge_numbers".into()))?
            .iter()
            .map(|x| x.as_u64().map(|x| x as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Malformed("hodge_numbers must be integers".into()))?;
        let t = SeriesMatrix::from_json(&ring, &v["T"])?;
        if let Some(p) = v.get("P") {
            let exps: Option<Vec<u32>> = p
                .as_array()
                .map(|a| a.iter().filter_map(|x| x.as_u64().map(|x| x as u32)).collect());
            if exps.as_deref() != Some(block_indices(&hodge).as_slice()) {
                return Err(Error::Malformed("P exponents do not match hodge_numbers".into()));
            }
        }
        Self::new(ring, hodge, t)
    }
}

/// The p-adic ring described by the `p`, `precision` and `guard` keys.
pub fn ring_from_json(v: &Value) -> Result<PadicRing> {
    let p = v["p"]
        .as_u64()
        .ok_or_else(|| Error::Malformed("missing p".into()))?;
    let prec = v["precision"]
        .as_u64()
        .ok_or_else(|| Error::Malformed("missing precision".into()))? as u32;
    let guard = v.get("guard").and_then(Value::as_u64).unwrap_or(0) as u32;
    PadicRing::new(p, prec, guard)
}

/// Block index of each basis vector for the given block sizes.
pub fn block_indices(sizes: &[usize]) -> Vec<u32> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &h)| std::iter::repeat(i as u32).take(h))
        .collect()
}

/// `M_psi = T^-1 P psi(T)`.
pub fn frobenius_matrix(inst: &FCrystalInstance, psi: &FrobeniusLift) -> Result<PMatrix> {
    let tinv = inst.t.inverse()?;
    let psi_t = psi.apply_matrix(&inst.t)?;
    let m = tinv.mul(&inst.p_matrix()).mul(&psi_t);
    m.check_budget()?;
    Ok(m)
}

/// Horizontality of Frobenius: for every `k`,
/// `M_phi * sum_j phi(A_j) d_k phi(t_j) = A_k M_phi + d_k M_phi` up to degree `D - 1`.
pub fn check_horizontality(conn: &Connection, phi: &FrobeniusLift, m_phi: &PMatrix, prec: i64) -> Verdict {
    const NAME: &str = "horizontality";
    let run = || -> Result<Verdict> {
        let phi_a: Vec<PMatrix> = conn
            .parts()
            .iter()
            .map(|a| phi.apply_matrix(a))
            .collect::<Result<_>>()?;
        let d = m_phi.degree().saturating_sub(1);
        let mut parts = Vec::new();
        for k in 0..conn.nvars() {
            let mut pulled = phi_a[0].map(|s| s.zero_like());
            for (j, pa) in phi_a.iter().enumerate() {
                let dk = phi.images()[j].derivative(k);
                pulled = pulled.add(&pa.scale_series(&dk));
            }
            let lhs = m_phi.mul(&pulled);
            let rhs = conn.part(k).mul(m_phi).add(&m_phi.derivative(k));
            parts.push(Verdict::from_mismatch(NAME, &format!("k={k}"), lhs.mismatch(&rhs, prec, d)));
        }
        Ok(Verdict::all(NAME, parts))
    };
    run().unwrap_or_else(|e| Verdict::error(NAME, &e))
}

/// Locates the first entry of `m` with a coefficient below valuation `min_val`.
pub(crate) fn valuation_scan(m: &PMatrix, min_val: impl Fn(usize, usize) -> i64) -> Option<(i64, Location)> {
    let mut worst: Option<(i64, Location)> = None;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if let Some((v, e)) = m.get(i, j).min_valuation() {
                let deficit = min_val(i, j) - v;
                if deficit > 0 && worst.as_ref().is_none_or(|(w, _)| deficit > *w) {
                    let loc = Location {
                        row: Some(i),
                        col: Some(j),
                        exponent: Some(e),
                        ..Location::default()
                    };
                    worst = Some((deficit, loc));
                }
            }
        }
    }
    worst
}
