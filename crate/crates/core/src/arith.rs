//! Exact integer arithmetic on `u128`: modular arithmetic, primality,
//! factorization and the multiplicative functions built on top of it.
//!
//! Values handed to the fallible operations are confined to
//! `0..=MAX_NATURAL`. The modular primitives themselves are overflow-safe on
//! the whole `u128` range, which is why [`is_prime`] is total.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest value accepted by the fallible operations, 2^127 - 1.
pub const MAX_NATURAL: u128 = (1u128 << 127) - 1;

/// Miller-Rabin bases that are deterministic for every n < 2^64
/// (Sinclair's seven-base set). Above 2^64 the test becomes BPSW: one strong
/// base-2 round followed by a strong Lucas test with Selfridge parameters.
pub const MR_WITNESSES_64: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];

/// Trial division runs over the primes below this bound before Pollard-rho.
const TRIAL_BOUND: u32 = 1 << 12;

/// Brent's rho: product of this many differences between gcds.
const RHO_BATCH: u32 = 128;

/// Brent's rho starting point. The increment runs c = 1, 2, 3, ... on retry.
const RHO_START: u128 = 2;

pub(crate) fn check_range(n: u128) -> Result<u128> {
    if n > MAX_NATURAL {
        Err(Error::OutOfRange(n))
    } else {
        Ok(n)
    }
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `None` when the lcm does not fit.
pub fn lcm(a: u128, b: u128) -> Option<u128> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

/// Floor of the square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

/// ⌈log2 n⌉ for n ≥ 1.
pub fn ceil_log2(n: u128) -> u32 {
    debug_assert!(n >= 1);
    if n <= 1 {
        0
    } else {
        128 - (n - 1).leading_zeros()
    }
}

#[inline]
fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    // a, b < m
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

#[inline]
fn sub_mod(a: u128, b: u128, m: u128) -> u128 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

/// `a * b mod m` for m ≥ 1. Native when the operands fit in 64 bits,
/// shift-and-add otherwise.
#[inline]
pub(crate) fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    let (a, b) = (a % m, b % m);
    if m <= u64::MAX as u128 {
        return a * b % m;
    }
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    let mut result = 0u128;
    let bits = 128 - b.leading_zeros();
    for i in (0..bits).rev() {
        result = add_mod(result, result, m);
        if (b >> i) & 1 == 1 {
            result = add_mod(result, a, m);
        }
    }
    result
}

pub(crate) fn pow_mod_unchecked(base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `base^exponent mod modulus`.
pub fn mod_pow(base: u128, exponent: u128, modulus: u128) -> Result<u128> {
    if modulus == 0 {
        return Err(Error::ZeroModulus);
    }
    check_range(base)?;
    check_range(exponent)?;
    check_range(modulus)?;
    Ok(pow_mod_unchecked(base, exponent, modulus))
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(TRIAL_BOUND))
}

/// Primes strictly below `bound` by plain Eratosthenes.
pub(crate) fn sieve_primes(bound: u32) -> Vec<u32> {
    let bound = bound as usize;
    if bound < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; bound];
    let mut primes = Vec::new();
    for i in 2..bound {
        if composite[i] {
            continue;
        }
        primes.push(i as u32);
        let mut j = i * i;
        while j < bound {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

fn strong_probable_prime(n: u128, base: u128) -> bool {
    let base = base % n;
    if base == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod_unchecked(base, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a / n) for odd n.
fn jacobi(mut a: u128, mut n: u128) -> i32 {
    debug_assert!(n & 1 == 1);
    a %= n;
    let mut sign = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz & 1 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// x / 2 mod n for odd n.
#[inline]
fn half_mod(x: u128, n: u128) -> u128 {
    if x & 1 == 0 {
        x >> 1
    } else {
        (x >> 1) + (n >> 1) + 1
    }
}

/// Strong Lucas probable-prime test with Selfridge's method A parameters
/// (P = 1, Q = (1 - D) / 4). `n` odd, not a perfect square.
fn strong_lucas_probable_prime(n: u128) -> bool {
    let mut d_abs: u128 = 5;
    let mut negative = false;
    loop {
        let d_mod = if negative { n - d_abs % n } else { d_abs % n };
        match jacobi(d_mod, n) {
            -1 => break,
            0 if !d_abs.is_multiple_of(n) => return false,
            _ => {}
        }
        d_abs += 2;
        negative = !negative;
    }
    let d = if negative { n - d_abs % n } else { d_abs % n };
    // Q = (1 - D) / 4 as a residue.
    let q = if negative {
        // D = -d_abs, Q = (1 + d_abs) / 4
        ((1 + d_abs) / 4) % n
    } else {
        // D = d_abs, Q = -(d_abs - 1) / 4
        let v = ((d_abs - 1) / 4) % n;
        if v == 0 {
            0
        } else {
            n - v
        }
    };

    let s = (n + 1).trailing_zeros();
    let k = (n + 1) >> s;

    // Left-to-right binary evaluation of U_k, V_k, Q^k with P = 1.
    let mut u = 0u128;
    let mut v = 2u128;
    let mut qk = 1u128;
    let bits = 128 - k.leading_zeros();
    for i in (0..bits).rev() {
        // doubling
        u = mul_mod(u, v, n);
        v = sub_mod(mul_mod(v, v, n), add_mod(qk, qk, n), n);
        qk = mul_mod(qk, qk, n);
        if (k >> i) & 1 == 1 {
            let nu = half_mod(add_mod(u, v, n), n);
            let nv = half_mod(add_mod(mul_mod(d, u, n), v, n), n);
            u = nu;
            v = nv;
            qk = mul_mod(qk, q, n);
        }
    }
    if u == 0 || v == 0 {
        return true;
    }
    for _ in 1..s {
        v = sub_mod(mul_mod(v, v, n), add_mod(qk, qk, n), n);
        qk = mul_mod(qk, qk, n);
        if v == 0 {
            return true;
        }
    }
    false
}

/// Deterministic below 2^64 (see [`MR_WITNESSES_64`]); BPSW above.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in small_primes().iter().take(16) {
        let p = p as u128;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 53 * 53 {
        return true;
    }
    if n <= u64::MAX as u128 {
        return MR_WITNESSES_64
            .iter()
            .all(|&w| strong_probable_prime(n, w as u128));
    }
    if !strong_probable_prime(n, 2) {
        return false;
    }
    let r = isqrt(n);
    if r * r == n {
        return false;
    }
    strong_lucas_probable_prime(n)
}

/// Brent's variant of Pollard-rho. Returns a nontrivial factor of the odd
/// composite `n`; retries with increasing increments on failure.
fn pollard_brent(n: u128) -> u128 {
    for c in 1u128.. {
        let step = |x: u128| add_mod(mul_mod(x, x, n), c % n, n);
        let mut y = RHO_START % n;
        let mut x = y;
        let mut ys = y;
        let mut g = 1u128;
        let mut q = 1u128;
        let mut r = 1u32;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = step(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..RHO_BATCH.min(r - k) {
                    y = step(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += RHO_BATCH;
            }
            r = r.saturating_mul(2);
        }
        if g == n {
            // batch overshot; replay one step at a time
            loop {
                ys = step(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// An integer together with its canonical prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredInteger {
    value: u128,
    factors: Vec<(u128, u32)>,
}

impl FactoredInteger {
    pub fn one() -> Self {
        FactoredInteger {
            value: 1,
            factors: Vec::new(),
        }
    }

    /// Builds from prime-exponent pairs in any order, merging repeats.
    /// Every base must be prime and the product must stay in range.
    pub fn from_factors<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u128, u32)>,
    {
        let mut factors: Vec<(u128, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        factors.sort_unstable();
        let mut merged: Vec<(u128, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => merged.push((p, e)),
            }
        }
        let mut value = 1u128;
        for &(p, e) in &merged {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            let pe = p
                .checked_pow(e)
                .ok_or_else(|| Error::Overflow(format!("{p}^{e}")))?;
            value = value
                .checked_mul(pe)
                .filter(|&v| v <= MAX_NATURAL)
                .ok_or_else(|| Error::Overflow("product of factors".into()))?;
        }
        Ok(FactoredInteger {
            value,
            factors: merged,
        })
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    /// (prime, exponent) pairs, primes strictly increasing.
    pub fn factors(&self) -> &[(u128, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    pub fn exponent_of(&self, p: u128) -> u32 {
        self.factors
            .binary_search_by(|&(q, _)| q.cmp(&p))
            .map_or(0, |i| self.factors[i].1)
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

fn push_factors(mut n: u128, out: &mut Vec<(u128, u32)>) {
    for &p in small_primes() {
        let p = p as u128;
        if p * p > n {
            break;
        }
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n == 1 {
        return;
    }
    let bound = TRIAL_BOUND as u128;
    if n < bound * bound || is_prime(n) {
        out.push((n, 1));
        return;
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if is_prime(m) {
            out.push((m, 1));
        } else {
            let d = pollard_brent(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
}

/// Canonical factorization: trial division by the primes below 4096, then
/// Brent's rho on whatever composite cofactor remains.
pub fn factorize(n: u128) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::Zero);
    }
    check_range(n)?;
    let mut raw = Vec::new();
    push_factors(n, &mut raw);
    raw.sort_unstable();
    let mut factors: Vec<(u128, u32)> = Vec::with_capacity(raw.len());
    for (p, e) in raw {
        match factors.last_mut() {
            Some(last) if last.0 == p => last.1 += e,
            _ => factors.push((p, e)),
        }
    }
    Ok(FactoredInteger { value: n, factors })
}

pub fn euler_phi(f: &FactoredInteger) -> u128 {
    f.factors
        .iter()
        .map(|&(p, e)| p.pow(e - 1) * (p - 1))
        .product()
}

/// Carmichael's reduced totient: λ(2) = 1, λ(4) = 2, λ(2^k) = 2^(k-2) for
/// k ≥ 3, λ(p^k) = φ(p^k) for odd p, lcm over prime powers.
pub fn carmichael_lambda(f: &FactoredInteger) -> u128 {
    f.factors
        .iter()
        .map(|&(p, e)| match (p, e) {
            (2, 1) => 1,
            (2, 2) => 2,
            (2, k) => 1u128 << (k - 2),
            (p, k) => p.pow(k - 1) * (p - 1),
        })
        // divides φ(n) ≤ n, so the lcm never overflows
        .fold(1, |acc, l| lcm(acc, l).expect("lambda divides phi"))
}

/// Squarefree kernel.
pub fn radical(f: &FactoredInteger) -> u128 {
    f.primes().product()
}

/// Factorization of φ(n), assembled from the prime powers of `f` and the
/// factorizations of each p - 1.
pub fn totient_factorization(f: &FactoredInteger) -> FactoredInteger {
    let mut raw = Vec::new();
    for &(p, e) in &f.factors {
        if e > 1 {
            raw.push((p, e - 1));
        }
        if p > 2 {
            push_factors(p - 1, &mut raw);
        }
    }
    FactoredInteger::from_factors(raw).expect("phi(n) <= n stays in range")
}

/// p-adic valuation, with v_p(0) = +∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(e) => Some(e),
            Valuation::Infinite => None,
        }
    }
}

impl PartialEq<u32> for Valuation {
    fn eq(&self, other: &u32) -> bool {
        *self == Valuation::Finite(*other)
    }
}

impl PartialOrd<u32> for Valuation {
    fn partial_cmp(&self, other: &u32) -> Option<Ordering> {
        Some(self.cmp(&Valuation::Finite(*other)))
    }
}

pub(crate) fn valuation_unchecked(mut n: u128, p: u128) -> Valuation {
    if n == 0 {
        return Valuation::Infinite;
    }
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    Valuation::Finite(e)
}

pub fn valuation(n: u128, p: u128) -> Result<Valuation> {
    check_range(n)?;
    check_range(p)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(valuation_unchecked(n, p))
}
