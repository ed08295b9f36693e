//! Membership in L_k = { n : φ(n) | (n-1)^k } and in their union L_∞.

use std::fmt;

use serde::Serialize;

use crate::arith::{
    self, check_range, factorize, gcd, mul_mod, radical, totient_factorization,
    valuation_unchecked, FactoredInteger, Valuation, MAX_NATURAL,
};
use crate::error::{Error, Result};

/// Exponents above this are equivalent to asking about L_∞: the index of
/// any n ≤ 2^127 - 1 is at most ⌈log2 φ(n)⌉ ≤ 127.
pub const MAX_K: u32 = 127;

/// Least k with φ(n) | (n-1)^k, or the marker for n outside L_∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LehmerIndex {
    Finite(u32),
    NotInLinf,
}

impl LehmerIndex {
    pub fn finite(self) -> Option<u32> {
        match self {
            LehmerIndex::Finite(k) => Some(k),
            LehmerIndex::NotInLinf => None,
        }
    }

    /// Whether n ∈ L_k, given its index.
    pub fn within(self, k: u32) -> bool {
        matches!(self, LehmerIndex::Finite(j) if j <= k)
    }

    pub fn in_linf(self) -> bool {
        matches!(self, LehmerIndex::Finite(_))
    }
}

impl fmt::Display for LehmerIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LehmerIndex::Finite(k) => write!(f, "{k}"),
            LehmerIndex::NotInLinf => write!(f, "none"),
        }
    }
}

impl Serialize for LehmerIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LehmerIndex::Finite(k) => s.serialize_u32(*k),
            LehmerIndex::NotInLinf => s.serialize_str("none"),
        }
    }
}

fn validate(n: u128) -> Result<()> {
    if n == 0 {
        return Err(Error::Zero);
    }
    check_range(n).map(|_| ())
}

fn validate_k(k: u32) -> Result<u32> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    Ok(k.min(MAX_K))
}

/// Index from the factorizations of n - 1 and φ(n):
/// max over q | φ(n) of ⌈v_q(φ(n)) / v_q(n-1)⌉.
pub(crate) fn index_from_phi(n: u128, phi: &FactoredInteger) -> LehmerIndex {
    let mut k = 1;
    for &(q, e) in phi.factors() {
        match valuation_unchecked(n - 1, q) {
            Valuation::Infinite => {}
            Valuation::Finite(0) => return LehmerIndex::NotInLinf,
            Valuation::Finite(v) => k = k.max(e.div_ceil(v)),
        }
    }
    LehmerIndex::Finite(k)
}

/// The Lehmer index of n, via the factorization of φ(n).
pub fn lehmer_index(n: u128) -> Result<LehmerIndex> {
    validate(n)?;
    let f = factorize(n)?;
    Ok(lehmer_index_factored(&f))
}

pub fn lehmer_index_factored(f: &FactoredInteger) -> LehmerIndex {
    index_from_phi(f.value(), &totient_factorization(f))
}

/// φ(n) | (n-1)^k by comparing valuations prime by prime.
pub fn in_lk(n: u128, k: u32) -> Result<bool> {
    validate(n)?;
    let k = validate_k(k)?;
    let phi = totient_factorization(&factorize(n)?);
    Ok(phi
        .factors()
        .iter()
        .all(|&(q, e)| valuation_unchecked(n - 1, q) >= e.div_ceil(k)))
}

/// φ(n) | (n-1)^k by k-fold multiplication of n - 1 modulo φ(n).
pub fn in_lk_modular(n: u128, k: u32) -> Result<bool> {
    validate(n)?;
    let k = validate_k(k)?;
    let phi = arith::euler_phi(&factorize(n)?);
    let base = (n - 1) % phi;
    let mut acc = 1 % phi;
    for _ in 0..k {
        acc = mul_mod(acc, base, phi);
    }
    Ok(acc == 0)
}

/// rad(φ(n)) | n - 1.
pub fn in_linf(n: u128) -> Result<bool> {
    validate(n)?;
    let rad = radical(&totient_factorization(&factorize(n)?));
    Ok((n - 1).is_multiple_of(rad))
}

/// gcd(n, φ(n)) = 1.
pub fn is_cyclic(n: u128) -> Result<bool> {
    validate(n)?;
    Ok(gcd(n, arith::euler_phi(&factorize(n)?)) == 1)
}

/// p - 1 = 2^a·d·α and q - 1 = 2^b·d·β with d, α, β odd, gcd(α, β) = 1 and
/// a ≤ b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SemiprimeDecomposition {
    #[serde(with = "crate::decimal")]
    pub p: u128,
    #[serde(with = "crate::decimal")]
    pub q: u128,
    pub a: u32,
    pub b: u32,
    #[serde(with = "crate::decimal")]
    pub d: u128,
    #[serde(with = "crate::decimal")]
    pub alpha: u128,
    #[serde(with = "crate::decimal")]
    pub beta: u128,
}

impl SemiprimeDecomposition {
    pub fn n(&self) -> u128 {
        self.p * self.q
    }
}

/// Splits the pair, swapping so that a ≤ b (and p < q when a = b).
pub fn semiprime_decompose(p: u128, q: u128) -> Result<SemiprimeDecomposition> {
    for x in [p, q] {
        check_range(x)?;
        if x % 2 == 0 {
            return Err(Error::EvenPrime(x));
        }
        if !arith::is_prime(x) {
            return Err(Error::NotPrime(x));
        }
    }
    if p == q {
        return Err(Error::EqualPrimes(p));
    }
    if p.checked_mul(q).is_none_or(|n| n > MAX_NATURAL) {
        return Err(Error::Overflow(format!("{p} * {q}")));
    }
    let a = (p - 1).trailing_zeros();
    let b = (q - 1).trailing_zeros();
    let (p, q, a, b) = if (a, p) <= (b, q) {
        (p, q, a, b)
    } else {
        (q, p, b, a)
    };
    let odd_p = (p - 1) >> a;
    let odd_q = (q - 1) >> b;
    let d = gcd(odd_p, odd_q);
    Ok(SemiprimeDecomposition {
        p,
        q,
        a,
        b,
        d,
        alpha: odd_p / d,
        beta: odd_q / d,
    })
}

/// pq ∈ L_k ⇔ a + b ≤ k·a and αβ | d^(k-2), for k ≥ 2.
pub fn semiprime_in_lk(dec: &SemiprimeDecomposition, k: u32) -> Result<bool> {
    if k < 2 {
        return Err(Error::SemiprimeExponent(k));
    }
    let k = k.min(MAX_K);
    if (dec.a + dec.b) as u64 > k as u64 * dec.a as u64 {
        return Ok(false);
    }
    // α and β are coprime, so αβ ≤ (p-1)(q-1) fits
    let ab = factorize(dec.alpha * dec.beta)?;
    let power = (k - 2) as u64;
    Ok(ab
        .factors()
        .iter()
        .all(|&(r, e)| match valuation_unchecked(dec.d, r) {
            Valuation::Finite(v) => e as u64 <= power * v as u64,
            Valuation::Infinite => unreachable!("d is odd, never zero"),
        }))
}

/// Product of the two primes 3·2^N + 1 and 3·2^M + 1 with M - N odd, and
/// its predicted index K = min{ k : kN ≥ M + N }.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyPairResult {
    pub n_exp: u32,
    pub m_exp: u32,
    #[serde(with = "crate::decimal")]
    pub p_n: u128,
    #[serde(with = "crate::decimal")]
    pub p_m: u128,
    #[serde(with = "crate::decimal")]
    pub n: u128,
    pub k: u32,
}

/// 3·2^r + 1, if it fits.
pub fn family_prime_candidate(r: u32) -> Option<u128> {
    1u128
        .checked_shl(r)
        .filter(|&x| r < 126 && x <= MAX_NATURAL / 3)
        .map(|x| 3 * x + 1)
}

pub fn fermat_family_pair(n_exp: u32, m_exp: u32) -> Result<FamilyPairResult> {
    if n_exp == 0 || m_exp == 0 {
        return Err(Error::InvalidArgument(
            "family exponents must be positive".into(),
        ));
    }
    if n_exp == m_exp {
        return Err(Error::SameExponent(n_exp));
    }
    let (n_exp, m_exp) = (n_exp.min(m_exp), n_exp.max(m_exp));
    let mut primes = [0u128; 2];
    for (slot, r) in primes.iter_mut().zip([n_exp, m_exp]) {
        let value =
            family_prime_candidate(r).ok_or_else(|| Error::Overflow(format!("3*2^{r}+1")))?;
        if !arith::is_prime(value) {
            return Err(Error::FamilyNotPrime { exponent: r, value });
        }
        *slot = value;
    }
    let [p_n, p_m] = primes;
    if (m_exp - n_exp) % 2 == 0 {
        return Err(Error::EvenExponentGap { n: n_exp, m: m_exp });
    }
    let n = p_n
        .checked_mul(p_m)
        .filter(|&n| n <= MAX_NATURAL)
        .ok_or_else(|| Error::Overflow(format!("{p_n} * {p_m}")))?;
    let k = 1 + m_exp.div_ceil(n_exp);

    let observed = lehmer_index(n)?;
    if observed != LehmerIndex::Finite(k) {
        return Err(Error::FamilyMismatch {
            n: n_exp,
            m: m_exp,
            predicted: k,
            observed: observed.to_string(),
        });
    }
    Ok(FamilyPairResult {
        n_exp,
        m_exp,
        p_n,
        p_m,
        n,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use LehmerIndex::*;

    #[test]
    fn index_examples() {
        assert_eq!(lehmer_index(15), Ok(Finite(3)));
        assert_eq!(lehmer_index(2821), Ok(Finite(3)));
        assert_eq!(lehmer_index(51), Ok(Finite(5)));
        assert_eq!(lehmer_index(9), Ok(NotInLinf));
        assert_eq!(lehmer_index(1), Ok(Finite(1)));
        assert_eq!(lehmer_index(2), Ok(Finite(1)));
        for p in [3u128, 97, 7919, 1_000_000_007] {
            assert_eq!(lehmer_index(p), Ok(Finite(1)));
        }
        assert_eq!(lehmer_index(0), Err(Error::Zero));
    }

    #[test]
    fn membership_examples() {
        assert_eq!(in_lk(561, 2), Ok(true));
        assert_eq!(in_lk(2821, 2), Ok(false));
        assert_eq!(in_lk(2821, 3), Ok(true));
        for k in [1, 2, 50, 127, 1000] {
            assert_eq!(in_lk(1, k), Ok(true));
            assert_eq!(in_lk_modular(1, k), Ok(true));
        }
        assert!(in_lk(15, 0).is_err());
        // large k collapses to L_∞
        assert_eq!(
            in_lk(2u128.pow(40) + 1, u32::MAX),
            in_linf(2u128.pow(40) + 1)
        );
    }

    #[test]
    fn linf_and_cyclic_examples() {
        assert_eq!(in_linf(15), Ok(true));
        assert_eq!(in_linf(9), Ok(false));
        assert_eq!(in_linf(561), Ok(true));
        assert_eq!(is_cyclic(15), Ok(true));
        assert_eq!(is_cyclic(9), Ok(false));
        assert_eq!(is_cyclic(101), Ok(true));
    }

    #[test]
    fn decomposition_examples() {
        let d = semiprime_decompose(7, 13).unwrap();
        assert_eq!((d.a, d.b, d.d, d.alpha, d.beta), (1, 2, 3, 1, 1));
        let d = semiprime_decompose(3, 5).unwrap();
        assert_eq!((d.a, d.b, d.d, d.alpha, d.beta), (1, 2, 1, 1, 1));
        let d = semiprime_decompose(5, 13).unwrap();
        assert_eq!((d.a, d.b, d.d, d.alpha, d.beta), (2, 2, 1, 1, 3));
        // swapped so that a ≤ b
        let d = semiprime_decompose(13, 7).unwrap();
        assert_eq!((d.p, d.q, d.a, d.b), (7, 13, 1, 2));
    }

    #[test]
    fn decomposition_errors() {
        assert_eq!(semiprime_decompose(7, 7), Err(Error::EqualPrimes(7)));
        assert_eq!(semiprime_decompose(2, 7), Err(Error::EvenPrime(2)));
        assert_eq!(semiprime_decompose(9, 7), Err(Error::NotPrime(9)));
    }

    #[test]
    fn semiprime_criterion_examples() {
        let d = semiprime_decompose(3, 5).unwrap();
        assert_eq!(semiprime_in_lk(&d, 3), Ok(true));
        let d = semiprime_decompose(7, 13).unwrap();
        assert_eq!(semiprime_in_lk(&d, 2), Ok(false));
        let d = semiprime_decompose(5, 13).unwrap();
        for k in 2..=20 {
            assert_eq!(semiprime_in_lk(&d, k), Ok(false));
        }
        assert_eq!(in_linf(65), Ok(false));
        assert_eq!(semiprime_in_lk(&d, 1), Err(Error::SemiprimeExponent(1)));
    }

    #[test]
    fn family_examples() {
        let r = fermat_family_pair(1, 2).unwrap();
        assert_eq!((r.p_n, r.p_m, r.n, r.k), (7, 13, 91, 3));
        let r = fermat_family_pair(2, 5).unwrap();
        assert_eq!((r.p_n, r.p_m, r.n, r.k), (13, 97, 1261, 4));
        // order of the arguments does not matter
        assert_eq!(fermat_family_pair(5, 2).unwrap(), r);
        assert_eq!(
            fermat_family_pair(1, 3),
            Err(Error::FamilyNotPrime {
                exponent: 3,
                value: 25
            })
        );
        assert_eq!(
            fermat_family_pair(1, 5),
            Err(Error::EvenExponentGap { n: 1, m: 5 })
        );
        assert_eq!(fermat_family_pair(4, 4), Err(Error::SameExponent(4)));
    }

    #[test]
    fn cyclic_criterion_to_a_million() {
        for n in 1..=1_000_000u128 {
            let f = factorize(n).unwrap();
            let phi = totient_factorization(&f);
            if (n - 1) % radical(&phi) == 0 {
                assert_eq!(gcd(n, phi.value()), 1, "n = {n}");
                assert!(f.is_squarefree(), "n = {n}");
            }
        }
    }

    #[test]
    fn index_is_bounded_by_log_phi() {
        for n in 2..=100_000u128 {
            let phi = arith::euler_phi(&factorize(n).unwrap());
            let cutoff = arith::ceil_log2(phi).max(1);
            assert_eq!(in_linf(n).unwrap(), in_lk(n, cutoff).unwrap(), "n = {n}");
        }
    }
}
