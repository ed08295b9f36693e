//! Carmichael numbers: three equivalent tests, Chernick's construction and
//! the Fermat base attached to every composite in L_∞.

use serde::Serialize;

use crate::arith::{
    self, carmichael_lambda, check_range, euler_phi, factorize, mod_pow, radical,
    totient_factorization, FactoredInteger, MAX_NATURAL,
};
use crate::error::{Error, Result};
use crate::lehmer::{lehmer_index_factored, LehmerIndex};

/// Korselt: squarefree, and p - 1 | n - 1 for every prime p | n.
/// Primes and 1 are not Carmichael numbers.
pub fn korselt_test(n: u128) -> Result<bool> {
    Ok(korselt_factored(&factorize_nonzero(n)?))
}

pub fn korselt_factored(f: &FactoredInteger) -> bool {
    let n = f.value();
    f.omega() >= 2 && f.is_squarefree() && f.primes().all(|p| (n - 1).is_multiple_of(p - 1))
}

/// λ(n) | n - 1, for composite n.
pub fn lambda_test(n: u128) -> Result<bool> {
    let f = factorize_nonzero(n)?;
    Ok(is_composite(&f) && (n - 1).is_multiple_of(carmichael_lambda(&f)))
}

/// rad(φ(n)) | n - 1 and p - 1 | n - 1 for every prime p | n, for composite
/// n. There is deliberately no squarefree check here.
pub fn radical_korselt_test(n: u128) -> Result<bool> {
    let f = factorize_nonzero(n)?;
    if !is_composite(&f) {
        return Ok(false);
    }
    let rad = radical(&totient_factorization(&f));
    Ok((n - 1).is_multiple_of(rad) && f.primes().all(|p| (n - 1).is_multiple_of(p - 1)))
}

fn factorize_nonzero(n: u128) -> Result<FactoredInteger> {
    if n == 0 {
        return Err(Error::Zero);
    }
    factorize(n)
}

fn is_composite(f: &FactoredInteger) -> bool {
    f.value() > 1 && !f.is_prime()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CarmichaelVerdict {
    #[serde(with = "crate::decimal")]
    pub n: u128,
    pub korselt: bool,
    pub lambda_divides: bool,
    pub radical_korselt: bool,
}

impl CarmichaelVerdict {
    pub fn agree(&self) -> bool {
        self.korselt == self.lambda_divides && self.lambda_divides == self.radical_korselt
    }
}

pub fn carmichael_verdict(n: u128) -> Result<CarmichaelVerdict> {
    Ok(CarmichaelVerdict {
        n,
        korselt: korselt_test(n)?,
        lambda_divides: lambda_test(n)?,
        radical_korselt: radical_korselt_test(n)?,
    })
}

/// U_k(m) = (6m+1)(12m+1)·∏_{i=1}^{k-2} (9·2^i·m + 1) and how it classifies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChernickCandidate {
    pub k: u32,
    #[serde(with = "crate::decimal")]
    pub m: u128,
    #[serde(with = "crate::decimal::seq")]
    pub factors: Vec<u128>,
    #[serde(with = "crate::decimal")]
    pub value: u128,
    pub all_prime: bool,
    /// 2^(k-4) | m; vacuous for k ≤ 4.
    pub divisibility_ok: bool,
    pub is_carmichael: bool,
    /// all_prime, divisibility_ok and m not a power of two (1 counts as 2^0).
    pub index_guaranteed: bool,
    /// Filled in when every factor is prime.
    pub observed_index: Option<LehmerIndex>,
}

fn chernick_factors(k: u32, m: u128) -> Option<Vec<u128>> {
    let linear = |coef: u128| coef.checked_mul(m).and_then(|x| x.checked_add(1));
    let mut factors = vec![linear(6)?, linear(12)?];
    for i in 1..=k - 2 {
        let coef = 1u128.checked_shl(i)?.checked_mul(9)?;
        factors.push(linear(coef)?);
    }
    Some(factors)
}

pub fn chernick(k: u32, m: u128) -> Result<ChernickCandidate> {
    if k < 3 {
        return Err(Error::ChernickOrder(k));
    }
    if m == 0 {
        return Err(Error::Zero);
    }
    let overflow = || Error::Overflow(format!("U_{k}({m})"));
    let factors = chernick_factors(k, m).ok_or_else(overflow)?;
    let value = factors
        .iter()
        .try_fold(1u128, |acc, &f| {
            acc.checked_mul(f).filter(|&v| v <= MAX_NATURAL)
        })
        .ok_or_else(overflow)?;

    let all_prime = factors.iter().all(|&f| arith::is_prime(f));
    let divisibility_ok = k <= 4 || m.trailing_zeros() >= k - 4;
    let index_guaranteed = all_prime && divisibility_ok && !m.is_power_of_two();

    let mut raw = Vec::new();
    for &f in &factors {
        raw.extend_from_slice(factorize(f)?.factors());
    }
    let factored = FactoredInteger::from_factors(raw)?;
    debug_assert_eq!(factored.value(), value);
    let is_carmichael = korselt_factored(&factored);
    let observed_index = all_prime.then(|| lehmer_index_factored(&factored));

    Ok(ChernickCandidate {
        k,
        m,
        factors,
        value,
        all_prime,
        divisibility_ok,
        is_carmichael,
        index_guaranteed,
        observed_index,
    })
}

/// Closed form of φ(U_k(m)) when every factor is prime:
/// 2^((k²-3k+8)/2) · 3^(2k-2) · m^k. `None` on overflow.
pub fn chernick_totient_closed_form(k: u32, m: u128) -> Option<u128> {
    let two = 1u128.checked_shl((k * k - 3 * k + 8) / 2)?;
    let three = 3u128.checked_pow(2 * k - 2)?;
    two.checked_mul(three)?.checked_mul(m.checked_pow(k)?)
}

/// b ≡ 2^(φ(n)/rad(φ(n))) (mod n); n is then a Fermat pseudoprime to base b.
pub fn pseudoprime_base(n: u128) -> Result<u128> {
    let f = factorize_nonzero(n)?;
    if f.is_prime() {
        return Err(Error::PrimeInput(n));
    }
    if n == 1 {
        return Err(Error::NotComposite(n));
    }
    let phi = totient_factorization(&f);
    let rad = radical(&phi);
    if !(n - 1).is_multiple_of(rad) {
        return Err(Error::NotInLinf(n));
    }
    mod_pow(2, phi.value() / rad, n)
}

/// The constructed base can collapse to 1 or n - 1, which every odd n
/// passes trivially.
pub fn is_degenerate_base(n: u128, b: u128) -> bool {
    let b = b % n;
    b <= 1 || b == n - 1
}

/// b^(n-1) ≡ 1 (mod n).
pub fn fermat_test(n: u128, b: u128) -> Result<bool> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "Fermat test needs n >= 2, got {n}"
        )));
    }
    check_range(n)?;
    Ok(mod_pow(b % n, n - 1, n)? == 1)
}

/// φ(n) straight from n, for callers that only hold the value.
pub fn totient(n: u128) -> Result<u128> {
    Ok(euler_phi(&factorize_nonzero(n)?))
}
