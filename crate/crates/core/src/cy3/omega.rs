use super::{CY3Crystal, KodairaSpencer, YukawaTensor};
use crate::crystal::{Connection, FrobeniusLift, PMatrix, PSeries};
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic::Padic;
use crate::ring::CoeffRing;
use crate::verdict::{Location, Verdict};

/// The basis `omega = e S` with `S = diag(f^-1, f^-1 Jac^-T, f Jac, f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaBasis {
    pub f: PSeries,
    pub s: PMatrix,
    /// `f = a / f_tilde` with `a = f(0)` and `f_tilde(0) = 1`.
    pub a: Padic,
    pub f_tilde: PSeries,
    /// `(TS)^-1 d(TS)`.
    pub connection: Connection,
    /// `(TS)^-1 P phi(TS)`.
    pub frobenius: PMatrix,
}

pub fn omega_layer(
    cy: &CY3Crystal,
    ks: &KodairaSpencer,
    f: &PSeries,
    phi: &FrobeniusLift,
) -> Result<OmegaBasis> {
    let ring = cy.ring();
    if !ring.is_unit(f.constant_term()) {
        return Err(Error::NotUnit);
    }
    let l = cy.layout();
    let h = cy.h;
    let finv = f.invert()?;
    let mut s = SeriesMatrix::zeros(ring, h, cy.degree(), l.rank(), l.rank());
    s.set(0, 0, finv.clone());
    s.set(l.last(), l.last(), f.clone());
    for i in 0..h {
        for j in 0..h {
            s.set(l.b1(i), l.b1(j), ks.inv.get(j, i).mul(&finv));
            s.set(l.b2(i), l.b2(j), ks.jac.get(i, j).mul(f));
        }
    }
    let ts = cy.t().mul(&s);
    let connection = Connection::from_t(&ts)?;
    let frobenius = ts
        .inverse()?
        .mul(&cy.inst.p_matrix())
        .mul(&phi.apply_matrix(&ts)?);
    frobenius.check_budget()?;
    let a = f.constant_term().clone();
    let f_tilde = finv.scale(&a);
    Ok(OmegaBasis {
        f: f.clone(),
        s,
        a,
        f_tilde,
        connection,
        frobenius,
    })
}

/// `<omega_a, omega_b>` is `J` again: `<check omega_i, omega_j> = delta_ij`
/// and `<check omega_0, omega_0> = -1`.
pub fn check_omega_duality(cy: &CY3Crystal, omega: &OmegaBasis) -> Verdict {
    let j = cy.j_matrix();
    let gram = omega.s.transpose().mul(&j).mul(&omega.s);
    Verdict::from_mismatch("omega_duality", "S* J S", gram.mismatch(&j, cy.prec(), cy.degree()))
}

/// Last column of `TS`: its last entry is `f` and dividing by `f` gives the
/// last column of `T`.
pub fn solution_column(cy: &CY3Crystal, omega: &OmegaBasis) -> (Vec<PSeries>, Verdict) {
    const NAME: &str = "solution_column";
    let l = cy.layout();
    let ts = cy.t().mul(&omega.s);
    let column = ts.column(l.last());
    let (prec, deg) = (cy.prec(), cy.degree());
    let mut parts = Vec::new();
    if let Some((d, e)) = column[l.last()].mismatch(&omega.f, prec, deg) {
        let loc = Location::component("last entry vs f").with_exponent(e);
        parts.push(Verdict::fail(NAME, d, Some(loc)));
    }
    match omega.f.invert() {
        Err(e) => parts.push(Verdict::error(NAME, &e)),
        Ok(finv) => {
            for (i, y) in column.iter().enumerate() {
                if let Some((d, e)) = y.mul(&finv).mismatch(cy.t().get(i, l.last()), prec, deg) {
                    let loc = Location {
                        component: Some("column / f vs T".into()),
                        row: Some(i),
                        col: Some(l.last()),
                        exponent: Some(e),
                        index: None,
                    };
                    parts.push(Verdict::fail(NAME, d, Some(loc)));
                }
            }
        }
    }
    (column, Verdict::all(NAME, parts))
}

/// One-parameter case: `L = D^2 (1/Y) D^2 (1/f)` with `D = d/d tau` and `Y`
/// the Yukawa coupling annihilates every entry of the solution column.
///
/// `Y` may vanish to high order at `t = 0`, so `L` is not applied directly.
/// With `w = D^2 (y/f)`, the identity checked is
/// `Y^3 L(y) = Y^2 w'' - Y Y'' w - 2 Y Y' w' + 2 Y'^2 w = 0`. It is
/// homogeneous of degree 2 in `Y`, so `Y` is replaced by `Y / p^c` with `c`
/// the smallest valuation among its coefficients. The comparison runs modulo
/// `p^(M - c)` up to degree `D - 5`, since `Y = -1/2 Z'''` is only known up to
/// degree `D - 3`.
pub fn picard_fuchs_check(
    cy: &CY3Crystal,
    omega: &OmegaBasis,
    ks: &KodairaSpencer,
    yukawa: &YukawaTensor,
    column: &[PSeries],
) -> Verdict {
    const NAME: &str = "picard_fuchs";
    if cy.h != 1 {
        return Verdict::pass(NAME).with_detail("only checked for h = 1");
    }
    let ring = cy.ring();
    let y = yukawa.get(0, 0, 0);
    let Some((c, _)) = y.min_valuation() else {
        return Verdict::pass(NAME).with_detail("vacuous: Yukawa coupling vanishes");
    };
    let Some(deg) = cy.degree().checked_sub(5) else {
        return Verdict::pass(NAME).with_detail("vacuous at this degree");
    };
    let prec = cy.prec() - c;
    if prec <= 0 {
        return Verdict::pass(NAME).with_detail("vacuous: no digits left after removing the content of Y");
    }
    let run = || -> Result<Vec<Verdict>> {
        let finv = omega.f.invert()?;
        let d = |s: &PSeries| ks.d_tau(0, s);
        let y = y.scale(&ring.p_pow(-c));
        let (y1, y2) = (d(&y), d(&d(&y)));
        let mut out = Vec::new();
        for (i, entry) in column.iter().enumerate() {
            let w = d(&d(&entry.mul(&finv)));
            let (w1, w2) = (d(&w), d(&d(&w)));
            let image = y
                .mul(&y)
                .mul(&w2)
                .sub(&y.mul(&y2).mul(&w))
                .sub(&y.mul(&y1).mul(&w1).mul_int(2))
                .add(&y1.mul(&y1).mul(&w).mul_int(2));
            if let Some((def, e)) = image.mismatch(&image.zero_like(), prec, deg) {
                let loc = Location::component("Y^3 L(y)").with_exponent(e).with_index(i as u64);
                out.push(Verdict::fail(NAME, def, Some(loc)));
            }
        }
        Ok(out)
    };
    match run() {
        Ok(parts) => Verdict::all(NAME, parts),
        Err(e) => Verdict::error(NAME, &e),
    }
}
