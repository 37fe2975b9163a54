//! Capped-relative p-adic numbers.
//!
//! An element is `p^e * u` with `u` a unit residue modulo `p^(M+G)`, where `M`
//! is the reported precision and `G` the guard digits. Zero is `(0, 0)`.
//! Negative `e` is allowed down to the denominator budget `-E`; kernels check
//! the budget at operation boundaries through [`CoeffRing::check_budget`].

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ring::{vp_int, CoeffRing};

/// Prime, precision and guard digits shared by all elements of a ring.
#[derive(Debug)]
pub struct PadicContext {
    p: u64,
    prec: u32,
    guard: u32,
    budget: u32,
    p_big: BigUint,
    pows: Vec<BigUint>,
}

impl PadicContext {
    /// `budget` defaults to `3 + guard` when `None`.
    pub fn new(p: u64, prec: u32, guard: u32, budget: Option<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Malformed(format!("{p} is not prime")));
        }
        if prec == 0 {
            return Err(Error::Malformed("precision must be at least 1".into()));
        }
        let digits = (prec + guard) as usize;
        let p_big = BigUint::from(p);
        let mut pows = Vec::with_capacity(digits + 1);
        pows.push(BigUint::one());
        for k in 1..=digits {
            let next = &pows[k - 1] * &p_big;
            pows.push(next);
        }
        Ok(Self {
            p,
            prec,
            guard,
            budget: budget.unwrap_or(3 + guard),
            p_big,
            pows,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    /// Reported precision `M`.
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn guard(&self) -> u32 {
        self.guard
    }
    /// Denominator budget `E`.
    pub fn budget(&self) -> u32 {
        self.budget
    }
    /// Working digits `M + G`.
    pub fn digits(&self) -> u32 {
        self.prec + self.guard
    }
    fn modulus(&self) -> &BigUint {
        &self.pows[self.pows.len() - 1]
    }
}

/// Guard digits needed so that degree-`degree` integration and exponentials
/// stay exact modulo `p^M`: `D + ceil(D / (p - 1))`.
pub fn default_guard(p: u64, degree: u32) -> u32 {
    let d = degree as u64;
    (d + d.div_ceil(p - 1)) as u32
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `p^e * u`; `u` is zero or prime to `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Padic {
    e: i32,
    u: BigUint,
}

impl Padic {
    pub fn zero() -> Self {
        Padic {
            e: 0,
            u: BigUint::zero(),
        }
    }
    pub fn is_zero(&self) -> bool {
        self.u.is_zero()
    }
    /// Valuation, `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.e as i64)
    }
    pub fn unit(&self) -> &BigUint {
        &self.u
    }
}

/// Ring handle over a shared [`PadicContext`].
#[derive(Clone, Debug)]
pub struct PadicRing {
    ctx: Arc<PadicContext>,
}

impl PartialEq for PadicRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx)
            || (self.ctx.p == other.ctx.p
                && self.ctx.prec == other.ctx.prec
                && self.ctx.guard == other.ctx.guard
                && self.ctx.budget == other.ctx.budget)
    }
}

impl PadicRing {
    pub fn new(p: u64, prec: u32, guard: u32) -> Result<Self> {
        Ok(Self::from_context(PadicContext::new(p, prec, guard, None)?))
    }

    /// Ring with guard digits sized for series truncated at `degree`.
    pub fn for_degree(p: u64, prec: u32, degree: u32) -> Result<Self> {
        if p < 2 {
            return Err(Error::Malformed(format!("{p} is not prime")));
        }
        Self::new(p, prec, default_guard(p, degree))
    }

    pub fn from_context(ctx: PadicContext) -> Self {
        Self { ctx: Arc::new(ctx) }
    }

    pub fn context(&self) -> &PadicContext {
        &self.ctx
    }
    pub fn p(&self) -> u64 {
        self.ctx.p
    }
    pub fn prec(&self) -> u32 {
        self.ctx.prec
    }

    fn normalize(&self, mut e: i64, mut s: BigUint) -> Padic {
        if s.is_zero() {
            return Padic::zero();
        }
        loop {
            let (q, r) = s.div_rem(&self.ctx.p_big);
            if !r.is_zero() {
                break;
            }
            s = q;
            e += 1;
        }
        Padic {
            e: e as i32,
            u: s,
        }
    }

    fn unit_inverse(&self, u: &BigUint) -> BigUint {
        let m = BigInt::from(self.ctx.modulus().clone());
        let ext = BigInt::from(u.clone()).extended_gcd(&m);
        debug_assert!(ext.gcd.is_one());
        ext.x.mod_floor(&m).to_biguint().expect("nonnegative")
    }

    /// `p^k` as an element.
    pub fn p_pow(&self, k: i64) -> Padic {
        Padic {
            e: k as i32,
            u: BigUint::one(),
        }
    }

    /// Builds `p^e * u` from an integer unit part (normalizing if `p | u`).
    pub fn from_parts(&self, e: i64, u: &BigInt) -> Padic {
        let x = self.from_bigint(u);
        if x.is_zero() {
            return x;
        }
        Padic {
            e: (x.e as i64 + e) as i32,
            u: x.u,
        }
    }

    pub fn from_rational(&self, q: &BigRational) -> Padic {
        let n = self.from_bigint(q.numer());
        let d = self.from_bigint(q.denom());
        self.mul(&n, &self.inv(&d).expect("nonzero denominator"))
    }

    /// Value as a rational, reading the unit as an integer in `[0, p^(M+G))`.
    pub fn to_rational(&self, a: &Padic) -> BigRational {
        if a.is_zero() {
            return BigRational::zero();
        }
        let u = BigInt::from(a.u.clone());
        let pe = BigInt::from(self.ctx.p).pow(a.e.unsigned_abs());
        if a.e >= 0 {
            BigRational::from_integer(u * pe)
        } else {
            BigRational::new(u, pe)
        }
    }

    /// Integer representative of `a mod p^prec`, for integral `a`.
    pub fn residue(&self, a: &Padic, prec: u32) -> Option<BigUint> {
        if a.is_zero() || a.e as i64 >= prec as i64 {
            return Some(BigUint::zero());
        }
        if a.e < 0 {
            return None;
        }
        let m = BigUint::from(self.ctx.p).pow(prec);
        let pe = BigUint::from(self.ctx.p).pow(a.e as u32);
        Some((&a.u * pe) % m)
    }

    /// `a` reduced modulo `p^M` for reporting.
    pub fn format_reduced(&self, a: &Padic) -> String {
        let m = self.ctx.prec as i64;
        if a.is_zero() || a.e as i64 >= m {
            return "0".into();
        }
        let keep = ((m - a.e as i64) as u32).min(self.ctx.digits());
        let u = &a.u % &self.ctx.pows[keep as usize];
        format!("{}^{}*{}", self.ctx.p, a.e, u)
    }
}

impl CoeffRing for PadicRing {
    type Elem = Padic;

    fn zero(&self) -> Padic {
        Padic::zero()
    }
    fn one(&self) -> Padic {
        Padic {
            e: 0,
            u: BigUint::one(),
        }
    }
    fn from_i64(&self, n: i64) -> Padic {
        self.from_bigint(&BigInt::from(n))
    }
    fn from_bigint(&self, n: &BigInt) -> Padic {
        if n.is_zero() {
            return Padic::zero();
        }
        let v = vp_int(n, self.ctx.p);
        let mag = n.magnitude() / BigUint::from(self.ctx.p).pow(v);
        let u = mag % self.ctx.modulus();
        let x = Padic { e: v as i32, u };
        if n.sign() == Sign::Minus {
            self.neg(&x)
        } else {
            x
        }
    }
    fn is_zero(&self, a: &Padic) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &Padic, b: &Padic) -> Padic {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        let (lo, hi) = if a.e <= b.e { (a, b) } else { (b, a) };
        let shift = (hi.e - lo.e) as usize;
        if shift >= self.ctx.pows.len() - 1 {
            return lo.clone();
        }
        let s = (&lo.u + &hi.u * &self.ctx.pows[shift]) % self.ctx.modulus();
        self.normalize(lo.e as i64, s)
    }

    fn neg(&self, a: &Padic) -> Padic {
        if a.is_zero() {
            return Padic::zero();
        }
        Padic {
            e: a.e,
            u: self.ctx.modulus() - &a.u,
        }
    }

    fn mul(&self, a: &Padic, b: &Padic) -> Padic {
        if a.is_zero() || b.is_zero() {
            return Padic::zero();
        }
        Padic {
            e: a.e + b.e,
            u: (&a.u * &b.u) % self.ctx.modulus(),
        }
    }

    fn div_int(&self, a: &Padic, k: i64) -> Padic {
        assert!(k != 0, "division by zero");
        let d = self.from_i64(k);
        self.mul(a, &self.inv(&d).expect("nonzero"))
    }

    fn inv(&self, a: &Padic) -> Option<Padic> {
        if a.is_zero() {
            return None;
        }
        Some(Padic {
            e: -a.e,
            u: self.unit_inverse(&a.u),
        })
    }

    fn is_unit(&self, a: &Padic) -> bool {
        !a.is_zero() && a.e == 0
    }

    fn is_topologically_nilpotent(&self, a: &Padic) -> bool {
        a.is_zero() || a.e >= 1
    }

    fn exp_const(&self, x: &Padic) -> Result<Padic> {
        if x.is_zero() {
            return Ok(self.one());
        }
        let v = x.e as i64;
        let p = self.ctx.p as i64;
        if v < 1 || (p == 2 && v < 2) {
            return Err(Error::ExpDomain);
        }
        let n = self.ctx.digits() as i64;
        // v_p(x^m / m!) >= m*v - (m-1)/(p-1); stop once that bound reaches N.
        let bound = |m: i64| m * v - (m - 1) / (p - 1);
        let mut sum = self.one();
        let mut term = self.one();
        let mut m = 1i64;
        while bound(m) < n {
            term = self.div_int(&self.mul(&term, x), m);
            if !term.is_zero() {
                assert!(term.e as i64 >= bound(m), "exp term below valuation bound");
                if p > 3 {
                    assert!(term.e > 0);
                }
            }
            sum = self.add(&sum, &term);
            m += 1;
        }
        Ok(sum)
    }

    fn log_const(&self, y: &Padic) -> Result<Padic> {
        let x = self.sub(y, &self.one());
        if x.is_zero() {
            return Ok(Padic::zero());
        }
        if y.e != 0 || x.e < 1 {
            return Err(Error::LogDomain);
        }
        let v = x.e as i64;
        let n = self.ctx.digits() as i64;
        let p = self.ctx.p as i64;
        let floor_log = |mut k: i64| {
            let mut l = 0;
            while k >= p {
                k /= p;
                l += 1;
            }
            l
        };
        let mut sum = Padic::zero();
        let mut pow = self.one();
        let mut k = 1i64;
        while k * v - floor_log(k) < n {
            pow = self.mul(&pow, &x);
            let term = self.div_int(&pow, if k % 2 == 1 { k } else { -k });
            sum = self.add(&sum, &term);
            k += 1;
        }
        Ok(sum)
    }

    fn valuation(&self, a: &Padic) -> Option<i64> {
        a.valuation()
    }

    fn defect(&self, diff: &Padic, prec: i64) -> i64 {
        match diff.valuation() {
            None => 0,
            Some(v) => (prec - v).max(0),
        }
    }

    fn check_budget(&self, a: &Padic) -> Result<()> {
        if !a.is_zero() && (a.e as i64) < -(self.ctx.budget as i64) {
            return Err(Error::PrecisionExhausted {
                valuation: a.e as i64,
                budget: self.ctx.budget,
            });
        }
        Ok(())
    }

    fn kind(&self) -> &'static str {
        "padic"
    }
    fn prime(&self) -> Option<u64> {
        Some(self.ctx.p)
    }
    fn precision(&self) -> Option<u32> {
        Some(self.ctx.prec)
    }
    fn guard_digits(&self) -> Option<u32> {
        Some(self.ctx.guard)
    }

    fn format(&self, a: &Padic) -> String {
        if a.is_zero() {
            "0".into()
        } else {
            format!("{}^{}*{}", self.ctx.p, a.e, a.u)
        }
    }

    fn parse(&self, s: &str) -> Result<Padic> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid p-adic scalar {s:?}"));
        match s.split_once('*') {
            Some((pe, u)) => {
                let (p, e) = pe.split_once('^').ok_or_else(bad)?;
                let p: u64 = p.trim().parse().map_err(|_| bad())?;
                if p != self.ctx.p {
                    return Err(Error::Parse(format!(
                        "scalar {s:?} uses prime {p}, expected {}",
                        self.ctx.p
                    )));
                }
                let e: i64 = e.trim().parse().map_err(|_| bad())?;
                let u: BigInt = u.trim().parse().map_err(|_| bad())?;
                Ok(self.from_parts(e, &u))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(self.from_bigint(&n))
            }
        }
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "p^{}*{}", self.e, self.u)
        }
    }
}

/// Small integer view of an integral element modulo `p^prec`, for tests and reports.
pub fn residue_u64(ring: &PadicRing, a: &Padic, prec: u32) -> Option<u64> {
    ring.residue(a, prec).and_then(|r| r.to_u64())
}
