//! One-parameter mirror symmetry over the rationals: Frobenius-method
//! solutions of a fourth-order Picard-Fuchs operator at a point of maximally
//! unipotent monodromy, the mirror map, the Yukawa coupling in the canonical
//! coordinate, and instanton numbers.

mod instanton;

pub use instanton::{
    all_integral, divisor_sums, lambert_extract, lambert_series, prepotential_coeffs,
    prepotential_integrality, IntegrityResult,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{CoeffRing, RationalRing};
use crate::series::{PowerTable, Series};

pub type QSeries = Series<RationalRing>;

/// Leading mirror-map coefficients of the quintic at `t^2..t^5`.
pub const QUINTIC_MIRROR_MAP: [i64; 4] = [770, 1014275, 1703916750, 3286569025625];
/// The quintic's `b_1..b_5`.
pub const QUINTIC_B: [i64; 5] = [575, 121850, 63441275, 48493506000, 45861177777525];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kappa {
    pub num: Vec<i64>,
    pub den: Vec<i64>,
}

/// A Picard-Fuchs family `sum_k c_k(t) theta^k` with its coupling data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    /// Coefficient lists of `c_0(t), ..., c_4(t)`.
    pub pf_operator: Vec<Vec<i64>>,
    pub kappa: Kappa,
    pub normalization: i64,
    pub primes: Vec<u64>,
    pub degree: u32,
}

impl FamilySpec {
    pub fn quintic(degree: u32, primes: Vec<u64>) -> Self {
        Self {
            name: "quintic".into(),
            pf_operator: vec![
                vec![0, -120],
                vec![0, -1250],
                vec![0, -4375],
                vec![0, -6250],
                vec![1, -3125],
            ],
            kappa: Kappa {
                num: vec![5],
                den: vec![0, 0, 0, 1, -3125],
            },
            normalization: 5,
            primes,
            degree,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pf_operator.len() != 5 {
            return Err(Error::Malformed("pf_operator needs five polynomials c_0..c_4".into()));
        }
        if self.kappa.den.iter().all(|&c| c == 0) {
            return Err(Error::Malformed("kappa denominator is zero".into()));
        }
        if self.normalization == 0 {
            return Err(Error::Malformed("normalization must be nonzero".into()));
        }
        if self.degree == 0 {
            return Err(Error::Malformed("degree must be at least 1".into()));
        }
        if let Some(p) = self.primes.iter().find(|&&p| !crate::padic::is_prime(p)) {
            return Err(Error::Malformed(format!("{p} is not prime")));
        }
        Ok(())
    }

    /// `P_j(x) = sum_k c_k[j] x^k`, so the operator is `sum_j t^j P_j(theta)`.
    fn theta_polys(&self) -> Vec<[BigInt; 5]> {
        let len = self.pf_operator.iter().map(Vec::len).max().unwrap_or(0);
        (0..len)
            .map(|j| {
                std::array::from_fn(|k| BigInt::from(*self.pf_operator[k].get(j).unwrap_or(&0)))
            })
            .collect()
    }
}

fn eval_poly(c: &[BigInt; 5], x: i64) -> BigInt {
    let x = BigInt::from(x);
    c.iter().rev().fold(BigInt::zero(), |acc, a| acc * &x + a)
}

fn eval_dpoly(c: &[BigInt; 5], x: i64) -> BigInt {
    let x = BigInt::from(x);
    (1..5)
        .rev()
        .fold(BigInt::zero(), |acc, k| acc * &x + &c[k] * BigInt::from(k))
}

/// Holomorphic solution `f0` and the log partner `f1 = f0 log t + g1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusBasis {
    pub f0: QSeries,
    pub g1: QSeries,
}

pub fn frobenius_solutions(spec: &FamilySpec) -> Result<FrobeniusBasis> {
    let polys = spec.theta_polys();
    let lead = polys.first().ok_or(Error::NotMUM)?;
    if lead[..4].iter().any(|c| !c.is_zero()) || lead[4].is_zero() {
        return Err(Error::NotMUM);
    }
    let d = spec.degree as usize;
    let mut a: Vec<BigRational> = vec![BigRational::zero(); d + 1];
    let mut b: Vec<BigRational> = vec![BigRational::zero(); d + 1];
    a[0] = BigRational::one();
    for n in 1..=d {
        let p0 = BigRational::from_integer(eval_poly(lead, n as i64));
        let mut sa = BigRational::zero();
        for (j, pj) in polys.iter().enumerate().take(n + 1).skip(1) {
            sa += &a[n - j] * eval_poly(pj, (n - j) as i64);
        }
        a[n] = -sa / &p0;
        let mut sb = BigRational::zero();
        for (j, pj) in polys.iter().enumerate().take(n + 1) {
            let m = n - j;
            if j > 0 {
                sb += &b[m] * eval_poly(pj, m as i64);
            }
            sb += &a[m] * eval_dpoly(pj, m as i64);
        }
        b[n] = -sb / p0;
    }
    let r = RationalRing;
    Ok(FrobeniusBasis {
        f0: Series::univariate(&r, spec.degree, &a),
        g1: Series::univariate(&r, spec.degree, &b),
    })
}

/// Applies the operator to `f` (and to `f log t + g`, returning the
/// non-log part, when `g` is given). Both must vanish for genuine solutions.
pub fn apply_operator(spec: &FamilySpec, f: &QSeries, g: Option<&QSeries>) -> QSeries {
    let r = RationalRing;
    let d = f.degree();
    let mut out = f.zero_like();
    let poly = |k: usize| {
        let c: Vec<BigRational> = spec.pf_operator[k]
            .iter()
            .map(|&x| r.from_i64(x))
            .collect();
        Series::univariate(&r, d, &c)
    };
    // theta^k of f and of the log sector
    let mut th_f = vec![f.clone()];
    for k in 1..5 {
        let next = th_f[k - 1].theta(0);
        th_f.push(next);
    }
    let th_g = g.map(|g| {
        let mut v = vec![g.clone()];
        for k in 1..5 {
            let next = v[k - 1].theta(0);
            v.push(next);
        }
        v
    });
    for k in 0..5 {
        let ck = poly(k);
        match &th_g {
            None => out = out.add(&ck.mul(&th_f[k])),
            Some(tg) => {
                let mut term = tg[k].clone();
                if k > 0 {
                    term = term.add(&th_f[k - 1].mul_int(k as i64));
                }
                out = out.add(&ck.mul(&term));
            }
        }
    }
    out
}

/// `q(t) = t exp(g1 / f0)` and its compositional inverse.
#[derive(Clone, Debug)]
pub struct MirrorMap {
    pub q_of_t: QSeries,
    pub t_of_q: QSeries,
    table: std::sync::Arc<PowerTable<RationalRing>>,
}

impl MirrorMap {
    /// `y` with `y(q(t)) = target(t)`, i.e. `target` rewritten in `q`.
    pub fn in_q(&self, target: &QSeries) -> Result<QSeries> {
        self.table.solve_composition(target)
    }
}

pub fn mirror_map(basis: &FrobeniusBasis) -> Result<MirrorMap> {
    let ell = basis.g1.div(&basis.f0)?;
    let t = ell.var_like(0);
    let q_of_t = t.mul(&ell.exp()?);
    let table = PowerTable::new(&q_of_t)?;
    let t_of_q = table.solve_composition(&t)?;
    Ok(MirrorMap {
        q_of_t,
        t_of_q,
        table: std::sync::Arc::new(table),
    })
}

/// Yukawa coupling in the canonical coordinate:
/// `Y = kappa(t) t^3 / ((1 + theta ell)^3 f0^2)` rewritten in `q`.
pub fn yukawa_q(spec: &FamilySpec, basis: &FrobeniusBasis, mirror: &MirrorMap) -> Result<QSeries> {
    let r = RationalRing;
    let d = spec.degree;
    let shift = spec.kappa.den.iter().position(|&c| c != 0).expect("validated");
    if shift > 3 {
        return Err(Error::Malformed("kappa has a pole of order above 3 at t = 0".into()));
    }
    let num: Vec<BigRational> = spec.kappa.num.iter().map(|&c| r.from_i64(c)).collect();
    let den: Vec<BigRational> = spec.kappa.den[shift..].iter().map(|&c| r.from_i64(c)).collect();
    let t = Series::var(&r, 1, d, 0);
    let mut lead = Series::univariate(&r, d, &num);
    for _ in shift..3 {
        lead = lead.mul(&t);
    }
    let den = Series::univariate(&r, d, &den);
    let ell = basis.g1.div(&basis.f0)?;
    let jac = ell.theta(0).add(&t.one_like());
    let y_t = lead.div(&den.mul(&jac.pow(3)).mul(&basis.f0.pow(2)))?;
    let y = mirror.in_q(&y_t)?;
    let expected = r.from_i64(spec.normalization);
    if y.constant_term() != &expected {
        return Err(Error::NormalizationMismatch {
            expected: r.format(&expected),
            found: r.format(y.constant_term()),
        });
    }
    Ok(y)
}

/// Everything the pipeline produces for one family.
#[derive(Clone, Debug)]
pub struct MirrorData {
    pub basis: FrobeniusBasis,
    pub mirror: MirrorMap,
    pub yukawa: QSeries,
    pub b: Vec<BigRational>,
    pub z_coeffs: Vec<BigRational>,
}

pub fn run_pipeline(spec: &FamilySpec) -> Result<MirrorData> {
    spec.validate()?;
    let basis = frobenius_solutions(spec)?;
    let mirror = mirror_map(&basis)?;
    let yukawa = yukawa_q(spec, &basis, &mirror)?;
    let b = lambert_extract(&yukawa, spec.normalization)?;
    let z_coeffs = prepotential_coeffs(&b, spec.normalization);
    Ok(MirrorData {
        basis,
        mirror,
        yukawa,
        b,
        z_coeffs,
    })
}
