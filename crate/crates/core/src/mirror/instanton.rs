use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::QSeries;
use crate::error::{Error, Result};
use crate::ring::{vp_rational, CoeffRing, RationalRing};
use crate::verdict::{Location, Verdict};

/// Instanton numbers `b_1..b_D` from `(Y - Y0) / Y0 = sum_m c_m q^m`, using
/// `c_m = sum_{d | m} b_d d^3`.
pub fn lambert_extract(yukawa: &QSeries, normalization: i64) -> Result<Vec<BigRational>> {
    let r = RationalRing;
    let y0 = r.from_i64(normalization);
    if yukawa.constant_term() != &y0 {
        return Err(Error::NormalizationMismatch {
            expected: r.format(&y0),
            found: r.format(yukawa.constant_term()),
        });
    }
    let d = yukawa.degree() as usize;
    let mut b: Vec<BigRational> = Vec::with_capacity(d);
    for m in 1..=d {
        let mut c = yukawa.coeff1(m as u32) / &y0;
        for k in 1..m {
            if m % k == 0 {
                c -= &b[k - 1] * cube(k);
            }
        }
        b.push(c / cube(m));
    }
    Ok(b)
}

/// Rebuilds `Y0 (1 + sum_m b_m m^3 q^m / (1 - q^m))` to degree `b.len()`.
pub fn lambert_series(b: &[BigRational], normalization: i64) -> QSeries {
    let y0 = BigRational::from_integer(normalization.into());
    let coeffs: Vec<BigRational> = std::iter::once(BigRational::from_integer(1.into()))
        .chain(divisor_sums(b).into_iter())
        .map(|c| c * &y0)
        .collect();
    QSeries::univariate(&RationalRing, b.len() as u32, &coeffs)
}

fn cube(m: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(m).pow(3))
}

/// `S(m) = sum_{d | m} b_d d^3` for `m = 1..b.len()`.
pub fn divisor_sums(b: &[BigRational]) -> Vec<BigRational> {
    let n = b.len();
    let mut s = vec![BigRational::zero(); n];
    for d in 1..=n {
        if b[d - 1].is_zero() {
            continue;
        }
        let term = &b[d - 1] * cube(d);
        for m in (d..=n).step_by(d) {
            s[m - 1] += &term;
        }
    }
    s
}

/// Outcome of the prepotential integrality test at one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegrityResult {
    pub prime: u64,
    pub pass: bool,
    pub first_failure: Option<usize>,
    /// Missing powers of `p` at the first failure.
    pub deficit: i64,
    pub checked_up_to: usize,
}

impl IntegrityResult {
    pub fn verdict(&self) -> Verdict {
        let name = format!("integrality_p{}", self.prime);
        match self.first_failure {
            None => Verdict::pass(name),
            Some(m) => Verdict::fail(
                name,
                self.deficit,
                Some(Location {
                    component: Some("S(m) - S(m/p)".into()),
                    index: Some(m as u64),
                    ..Location::default()
                }),
            ),
        }
    }
}

/// Checks `v_p(norm (S(m) - [p | m] S(m/p))) >= 3 v_p(m)` for `m = 1..m_max`.
pub fn prepotential_integrality(
    b: &[BigRational],
    p: u64,
    m_max: usize,
    normalization: i64,
) -> IntegrityResult {
    let m_max = m_max.min(b.len());
    let s = divisor_sums(&b[..m_max]);
    let norm = BigRational::from_integer(normalization.into());
    let mut first_failure: Option<(usize, i64)> = None;
    for m in 1..=m_max {
        let mut x = s[m - 1].clone();
        let mut vm = 0i64;
        let mut rest = m as u64;
        while rest % p == 0 {
            rest /= p;
            vm += 1;
        }
        if vm > 0 {
            x -= &s[m / p as usize - 1];
        }
        let x = x * &norm;
        if x.is_zero() {
            continue;
        }
        let v = vp_rational(&x, p).expect("nonzero");
        if v < 3 * vm {
            first_failure = Some((m, 3 * vm - v));
            break;
        }
    }
    IntegrityResult {
        prime: p,
        pass: first_failure.is_none(),
        first_failure: first_failure.map(|f| f.0),
        deficit: first_failure.map_or(0, |f| f.1),
        checked_up_to: m_max,
    }
}

/// `z_m = norm S(m) / m^3`, the instanton part of the prepotential, with
/// `theta^3 sum_m z_m q^m = Y - Y0`.
pub fn prepotential_coeffs(b: &[BigRational], normalization: i64) -> Vec<BigRational> {
    let norm = BigRational::from_integer(normalization.into());
    divisor_sums(b)
        .into_iter()
        .enumerate()
        .map(|(i, s)| s * &norm / cube(i + 1))
        .collect()
}

/// True when every `b_m` is an integer.
pub fn all_integral(b: &[BigRational]) -> bool {
    b.iter().all(|x| x.is_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    #[test]
    fn lambert_roundtrip() {
        let b = ints(&[575, 121850, 63441275, 48493506000]);
        let y = lambert_series(&b, 5);
        assert_eq!(lambert_extract(&y, 5).unwrap(), b);
        // Y_1 = 5 * 575 = 2875
        assert_eq!(y.coeff1(1), BigRational::from_integer(2875.into()));
    }

    #[test]
    fn integrality_detects_fraction() {
        let mut b = ints(&[575, 121850, 63441275, 48493506000, 45861177777525]);
        assert!(prepotential_integrality(&b, 5, 5, 5).pass);
        b[0] += BigRational::new(1.into(), 25.into());
        let res = prepotential_integrality(&b, 5, 5, 5);
        assert_eq!(res.first_failure, Some(1));
        assert!(!res.verdict().pass);
    }

    #[test]
    fn prepotential_consistent_with_yukawa() {
        let b = ints(&[575, 121850, 63441275]);
        let z = prepotential_coeffs(&b, 5);
        let y = lambert_series(&b, 5);
        for (i, zm) in z.iter().enumerate() {
            assert_eq!(zm * cube(i + 1), y.coeff1(i as u32 + 1));
        }
    }
}
