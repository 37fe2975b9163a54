//! Coefficient rings for truncated power series.
//!
//! A ring is a small handle (it may carry a precision context) that performs
//! arithmetic on plain element values. Series store the handle once and pass
//! elements through it, so elements themselves stay context free.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arithmetic on coefficient values.
pub trait CoeffRing: Clone + Debug + PartialEq + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem {
        self.from_i64(1)
    }
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul_int(&self, a: &Self::Elem, k: i64) -> Self::Elem {
        self.mul(a, &self.from_i64(k))
    }
    /// Exact division by a nonzero integer.
    fn div_int(&self, a: &Self::Elem, k: i64) -> Self::Elem;

    /// Inverse of an element, or `None` when it is zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Units of the integral subring (p-adic: valuation zero; rationals: nonzero).
    fn is_unit(&self, a: &Self::Elem) -> bool;
    /// Whether `a` may serve as the constant term of a substitution image.
    fn is_topologically_nilpotent(&self, a: &Self::Elem) -> bool;

    fn exp_const(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn log_const(&self, a: &Self::Elem) -> Result<Self::Elem>;

    /// Valuation of a nonzero element; `None` for zero or rings without one.
    fn valuation(&self, a: &Self::Elem) -> Option<i64>;

    /// How far `diff` misses being zero at precision `prec`. Zero means agreement.
    fn defect(&self, diff: &Self::Elem, prec: i64) -> i64;

    /// Smallest admissible valuation, if the ring enforces a denominator budget.
    fn check_budget(&self, _a: &Self::Elem) -> Result<()> {
        Ok(())
    }

    fn format(&self, a: &Self::Elem) -> String;
    fn parse(&self, s: &str) -> Result<Self::Elem>;

    /// `"padic"` or `"rational"`, as written in serialized series.
    fn kind(&self) -> &'static str;
    fn prime(&self) -> Option<u64> {
        None
    }
    fn precision(&self) -> Option<u32> {
        None
    }
    fn guard_digits(&self) -> Option<u32> {
        None
    }

    /// Truncated product given the multiplication table of a monomial basis
    /// (`table[k]` lists the index pairs whose exponents sum to monomial `k`).
    fn convolve(
        &self,
        table: &[Vec<(u32, u32)>],
        a: &[Self::Elem],
        b: &[Self::Elem],
    ) -> Vec<Self::Elem> {
        let az: Vec<bool> = a.iter().map(|x| self.is_zero(x)).collect();
        let bz: Vec<bool> = b.iter().map(|x| self.is_zero(x)).collect();
        table
            .iter()
            .map(|pairs| {
                let mut acc = self.zero();
                for &(i, j) in pairs {
                    let (i, j) = (i as usize, j as usize);
                    if az[i] || bz[j] {
                        continue;
                    }
                    acc = self.add(&acc, &self.mul(&a[i], &b[j]));
                }
                acc
            })
            .collect()
    }
}

/// Exact rationals with arbitrary-precision numerators and denominators.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalRing;

impl CoeffRing for RationalRing {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn mul_int(&self, a: &BigRational, k: i64) -> BigRational {
        a * BigInt::from(k)
    }
    fn div_int(&self, a: &BigRational, k: i64) -> BigRational {
        assert!(k != 0, "division by zero");
        a / BigInt::from(k)
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_unit(&self, a: &BigRational) -> bool {
        !a.is_zero()
    }
    fn is_topologically_nilpotent(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn exp_const(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            Ok(BigRational::one())
        } else {
            Err(Error::ExpDomain)
        }
    }
    fn log_const(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_one() {
            Ok(BigRational::zero())
        } else {
            Err(Error::LogDomain)
        }
    }
    fn valuation(&self, _a: &BigRational) -> Option<i64> {
        None
    }
    fn defect(&self, diff: &BigRational, _prec: i64) -> i64 {
        i64::from(!diff.is_zero())
    }
    fn format(&self, a: &BigRational) -> String {
        format!("{}/{}", a.numer(), a.denom())
    }
    fn parse(&self, s: &str) -> Result<BigRational> {
        parse_rational(s)
    }
    fn kind(&self) -> &'static str {
        "rational"
    }

    // Clears denominators once per operand so the inner loop is integer only.
    fn convolve(
        &self,
        table: &[Vec<(u32, u32)>],
        a: &[BigRational],
        b: &[BigRational],
    ) -> Vec<BigRational> {
        let (an, ad) = clear_denominators(a);
        let (bn, bd) = clear_denominators(b);
        let den = &ad * &bd;
        table
            .iter()
            .map(|pairs| {
                let mut acc = BigInt::zero();
                for &(i, j) in pairs {
                    let (x, y) = (&an[i as usize], &bn[j as usize]);
                    if x.is_zero() || y.is_zero() {
                        continue;
                    }
                    acc += x * y;
                }
                if acc.is_zero() {
                    BigRational::zero()
                } else {
                    BigRational::new(acc, den.clone())
                }
            })
            .collect()
    }
}

fn clear_denominators(xs: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let mut l = BigInt::one();
    for x in xs {
        if !x.is_zero() && !x.denom().is_one() {
            l = l.lcm(x.denom());
        }
    }
    let nums = xs
        .iter()
        .map(|x| {
            if x.is_zero() {
                BigInt::zero()
            } else {
                x.numer() * (&l / x.denom())
            }
        })
        .collect();
    (nums, l)
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a rational; `None` for zero.
pub fn vp_rational(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(vp_int(q.numer(), p) as i64 - vp_int(q.denom(), p) as i64)
}
