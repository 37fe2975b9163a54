use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::{assemble_t, factor_t, CY3Crystal, Gramm, Layout, PrepotentialData};
use crate::crystal::{FCrystalInstance, PSeries};
use crate::error::{Error, Result};
use crate::padic::{Padic, PadicRing};
use crate::ring::CoeffRing;
use crate::series::{basis, Series};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SynthMode {
    /// `t_i = q_i - 1`, so `tau_i = log(1 + t_i)`.
    CanonicalChart,
    /// A random integral reparametrization and `q_i(0) != 1`.
    Generic,
}

impl SynthMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CanonicalChart => "canonical_chart",
            Self::Generic => "generic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "canonical_chart" => Ok(Self::CanonicalChart),
            "generic" => Ok(Self::Generic),
            other => Err(Error::Malformed(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthParams {
    pub seed: u64,
    pub h: usize,
    pub p: u64,
    pub prec: u32,
    pub degree: u32,
    pub mode: SynthMode,
}

/// Where the canonical chart sits: constant terms `tau_i(0)` and an optional
/// coordinate change `s = u(t)` (no constant terms, unit Jacobian).
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub offsets: Vec<Padic>,
    pub coords: Option<Vec<PSeries>>,
}

impl Chart {
    pub fn canonical(ring: &PadicRing, h: usize) -> Self {
        Self {
            offsets: vec![ring.zero(); h],
            coords: None,
        }
    }
}

/// The crystal with prepotential `Z = p^3 zeta`, built in the chart `s` with
/// `tau_i = log(1 + s_i) + offsets[i]`, `tau13 = -1/2 grad_tau Z`,
/// `tau12 = -1/2 Hess_tau Z` and `T = U(tau23) B(Z, tau12, tau13)`, then
/// pulled back along `chart.coords`.
pub fn cy3_from_zeta(ring: &PadicRing, h: usize, degree: u32, zeta: &PSeries, chart: &Chart) -> Result<CY3Crystal> {
    if zeta.nvars() != h || zeta.degree() != degree || chart.offsets.len() != h {
        return Err(Error::Shape("zeta and chart must match h and the degree".into()));
    }
    let z = zeta.scale(&ring.p_pow(3));
    let one = z.one_like();
    let s: Vec<PSeries> = (0..h).map(|i| z.var_like(i)).collect();
    let tau23 = s
        .iter()
        .zip(&chart.offsets)
        .map(|(si, c)| Ok(one.add(si).log()?.add(&z.constant_like(c.clone()))))
        .collect::<Result<Vec<_>>>()?;
    let d_tau = |i: usize, x: &PSeries| one.add(&s[i]).mul(&x.derivative(i));
    let grad: Vec<PSeries> = (0..h).map(|i| d_tau(i, &z)).collect();
    let tau13 = grad.iter().map(|g| g.div_int(-2)).collect();
    let tau12 = (0..h)
        .map(|i| (0..h).map(|j| d_tau(i, &grad[j]).div_int(-2)).collect())
        .collect();
    let data = PrepotentialData {
        z,
        tau23,
        tau13,
        tau12,
    };
    let mut t = assemble_t(ring, h, degree, &data);
    if let Some(u) = &chart.coords {
        t = t.substitute(u)?;
    }
    t.check_budget()?;
    let inst = FCrystalInstance::new(ring.clone(), Layout { h }.hodge_numbers(), t)?;
    let mut cy = CY3Crystal::new(inst, Gramm::STANDARD)?;
    cy.stored = Some(factor_t(&cy)?);
    Ok(cy)
}

fn random_residue(rng: &mut Xoshiro256PlusPlus, modulus: u128) -> BigInt {
    BigInt::from(rng.gen_range(0..modulus))
}

fn random_series(ring: &PadicRing, rng: &mut Xoshiro256PlusPlus, modulus: u128, h: usize, degree: u32, min_degree: u32) -> PSeries {
    let b = basis(h, degree);
    let coeffs = (0..b.len())
        .map(|i| {
            if b.monomial_degree(i) < min_degree {
                ring.zero()
            } else {
                ring.from_bigint(&random_residue(rng, modulus))
            }
        })
        .collect();
    Series::from_coeffs(ring, b, coeffs)
}

/// Smallest `v >= 1` such that constant terms of valuation `v` substituted
/// into degree-`D` truncations lose nothing at precision `M`, allowing one
/// extra digit for the `1/k` denominators of `log`.
fn offset_valuation(prec: u32, degree: u32) -> u32 {
    (prec + 2).div_ceil(degree + 1).max(1)
}

/// Deterministic instance generator. `Z = p^3 zeta` with `zeta` a random
/// polynomial of degree `<= D` with coefficients in `[0, p^M)`. Generic mode
/// also draws offsets `tau_i(0) = p^v c_i` and a random coordinate change
/// `u(t) = G t + (higher terms)` with `G` unipotent-times-unipotent.
pub fn synth_cy3(params: &SynthParams) -> Result<CY3Crystal> {
    let SynthParams {
        seed,
        h,
        p,
        prec,
        degree,
        mode,
    } = *params;
    if p <= 3 {
        return Err(Error::Malformed(format!("p = {p} must exceed 3")));
    }
    let ring = PadicRing::for_degree(p, prec, degree)?;
    let modulus = (p as u128)
        .checked_pow(prec)
        .ok_or_else(|| Error::Malformed("p^M does not fit in 128 bits".into()))?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let zeta = random_series(&ring, &mut rng, modulus, h, degree, 0);
    let chart = match mode {
        SynthMode::CanonicalChart => Chart::canonical(&ring, h),
        SynthMode::Generic => {
            let mut lower = vec![vec![ring.zero(); h]; h];
            let mut upper = vec![vec![ring.zero(); h]; h];
            for i in 0..h {
                lower[i][i] = ring.one();
                upper[i][i] = ring.one();
                for j in 0..i {
                    lower[i][j] = ring.from_bigint(&random_residue(&mut rng, modulus));
                    upper[j][i] = ring.from_bigint(&random_residue(&mut rng, modulus));
                }
            }
            let g = crate::matrix::mul_scalars(&ring, &lower, &upper);
            let coords = (0..h)
                .map(|i| {
                    let mut u = random_series(&ring, &mut rng, modulus, h, degree, 2);
                    for (j, gij) in g[i].iter().enumerate() {
                        u = u.add(&u.var_like(j).scale(gij));
                    }
                    u
                })
                .collect();
            let v = offset_valuation(prec, degree) as i64;
            let offsets = (0..h)
                .map(|_| ring.mul(&ring.p_pow(v), &ring.from_bigint(&random_residue(&mut rng, modulus))))
                .collect();
            Chart {
                offsets,
                coords: Some(coords),
            }
        }
    };
    let mut cy = cy3_from_zeta(&ring, h, degree, &zeta, &chart)?;
    cy.seed = Some(seed);
    cy.mode = Some(mode);
    Ok(cy)
}
