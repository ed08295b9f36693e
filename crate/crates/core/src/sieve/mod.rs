//! Bulk classification over ranges: segmented totient and Korselt sieves,
//! the C_k(10^j) counting table, enumerations and the α(k) search.
//!
//! Segments are independent and run on a rayon pool; results are always
//! merged in ascending segment order, so output does not depend on the
//! segment size or the number of workers.

pub mod cache;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{self, factorize, isqrt};
use crate::carmichael::korselt_factored;
use crate::error::{Error, Result};
use crate::lehmer::{self, LehmerIndex, MAX_K};

pub const DEFAULT_MAX_LIMIT: u64 = 10_000_000;
/// Reachable with [`SieveConfig::allow_large`]. Needs roughly
/// 16 bytes per value per in-flight segment; the whole range is never held.
pub const LARGE_MAX_LIMIT: u64 = 100_000_000;
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 16;
pub const DEFAULT_MEMORY_MIB: u64 = 1024;
/// Overrides the memory budget, in MiB.
pub const MEMORY_ENV: &str = "KLEHMER_MEMORY_MIB";

// phi + cofactor per value
const TOTIENT_BYTES: u64 = 16;
// + smallest prime factor
const SPF_BYTES: u64 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveConfig {
    pub max_limit: u64,
    pub segment_size: u64,
    /// `None` uses rayon's default thread count.
    pub workers: Option<usize>,
    pub memory_budget_mib: u64,
    pub prime_cache: Option<PathBuf>,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            max_limit: DEFAULT_MAX_LIMIT,
            segment_size: DEFAULT_SEGMENT_SIZE,
            workers: None,
            memory_budget_mib: DEFAULT_MEMORY_MIB,
            prime_cache: None,
        }
    }
}

impl SieveConfig {
    /// Defaults, with the memory budget taken from `KLEHMER_MEMORY_MIB` when set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = SieveConfig::default();
        if let Ok(v) = std::env::var(MEMORY_ENV) {
            cfg.memory_budget_mib = v.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("{MEMORY_ENV} must be an integer, got {v:?}"))
            })?;
        }
        Ok(cfg)
    }

    pub fn allow_large(mut self) -> Self {
        self.max_limit = LARGE_MAX_LIMIT;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_segment_size(mut self, size: u64) -> Self {
        self.segment_size = size;
        self
    }

    pub fn check_limit(&self, limit: u128) -> Result<u64> {
        if limit > self.max_limit as u128 {
            return Err(Error::LimitExceeded {
                limit,
                max: self.max_limit as u128,
            });
        }
        Ok(limit as u64)
    }

    fn concurrency(&self) -> u64 {
        self.workers
            .unwrap_or_else(rayon::current_num_threads)
            .max(1) as u64
    }

    fn check_memory(&self, segment_len: u64, bytes_per_value: u64, concurrent: u64) -> Result<()> {
        let budget = self.memory_budget_mib.saturating_mul(1 << 20);
        let bytes = segment_len
            .saturating_mul(bytes_per_value)
            .saturating_mul(concurrent);
        if bytes > budget {
            return Err(Error::MemoryBudget {
                requested: segment_len,
                bytes,
                budget_mib: self.memory_budget_mib,
                suggested: (budget / (bytes_per_value * concurrent)).max(1),
            });
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.segment_size == 0 {
            return Err(Error::InvalidArgument(
                "segment size must be positive".into(),
            ));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidArgument(
                "worker count must be positive".into(),
            ));
        }
        self.check_memory(
            self.segment_size,
            TOTIENT_BYTES + SPF_BYTES,
            self.concurrency(),
        )
    }

    fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> Result<R> {
        match self.workers {
            None => Ok(op()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::InvalidArgument(e.to_string()))?;
                Ok(pool.install(op))
            }
        }
    }

    /// Primes ≤ √(hi - 1), from the cache file when it covers the bound.
    fn base_primes(&self, hi: u64) -> Result<Vec<u64>> {
        let bound = isqrt(hi.saturating_sub(1) as u128) as u64;
        if let Some(path) = &self.prime_cache {
            if path.exists() {
                let cached = cache::read(path)?;
                if cached.bound >= bound {
                    return Ok(cached
                        .primes
                        .into_iter()
                        .take_while(|&p| p <= bound)
                        .collect());
                }
            }
            let primes = small_primes_upto(bound.max(1 << 12));
            cache::write(
                path,
                &cache::PrimeCache {
                    bound: bound.max(1 << 12),
                    primes: primes.clone(),
                },
            )?;
            return Ok(primes.into_iter().take_while(|&p| p <= bound).collect());
        }
        Ok(small_primes_upto(bound))
    }
}

fn small_primes_upto(bound: u64) -> Vec<u64> {
    arith::sieve_primes(bound as u32 + 1)
        .into_iter()
        .map(u64::from)
        .collect()
}

fn segments(lo: u64, hi: u64, size: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = hi.min(a.saturating_add(size));
        out.push((a, b));
        a = b;
    }
    out
}

#[inline]
fn first_multiple(p: u64, lo: u64) -> u64 {
    lo.div_ceil(p) * p
}

/// Totients (and optionally smallest prime factors) for n in [lo, hi).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveSegment {
    pub lo: u64,
    pub hi: u64,
    pub phi: Vec<u64>,
    pub spf: Option<Vec<u32>>,
}

impl SieveSegment {
    pub fn phi_of(&self, n: u64) -> Option<u64> {
        n.checked_sub(self.lo)
            .and_then(|i| self.phi.get(i as usize).copied())
    }

    pub fn spf_of(&self, n: u64) -> Option<u64> {
        let i = n.checked_sub(self.lo)? as usize;
        self.spf.as_ref()?.get(i).map(|&p| p as u64)
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }
}

fn sieve_segment(lo: u64, hi: u64, primes: &[u64], want_spf: bool) -> SieveSegment {
    let len = (hi - lo) as usize;
    let mut phi: Vec<u64> = (lo..hi).collect();
    let mut rem = phi.clone();
    let mut spf = want_spf.then(|| vec![0u32; len]);
    for &p in primes {
        if p * p >= hi {
            break;
        }
        let mut j = first_multiple(p, lo);
        while j < hi {
            let i = (j - lo) as usize;
            phi[i] -= phi[i] / p;
            let mut r = rem[i] / p;
            while r.is_multiple_of(p) {
                r /= p;
            }
            rem[i] = r;
            if let Some(spf) = spf.as_mut() {
                if spf[i] == 0 {
                    spf[i] = p as u32;
                }
            }
            j += p;
        }
    }
    for i in 0..len {
        let r = rem[i];
        if r > 1 {
            // a single prime above √hi remains
            phi[i] -= phi[i] / r;
            if let Some(spf) = spf.as_mut() {
                if spf[i] == 0 {
                    spf[i] = r as u32;
                }
            }
        }
    }
    SieveSegment { lo, hi, phi, spf }
}

fn check_range_bounds(lo: u64, hi: u64) -> Result<()> {
    if lo == 0 || hi <= lo {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= lo < hi, got [{lo}, {hi})"
        )));
    }
    Ok(())
}

/// Exact totients on [lo, hi) by segmented sieving with primes ≤ √hi.
pub fn totient_sieve(lo: u64, hi: u64, cfg: &SieveConfig) -> Result<SieveSegment> {
    sieve_checked(lo, hi, cfg, false)
}

/// As [`totient_sieve`], also recording smallest prime factors.
pub fn totient_sieve_with_spf(lo: u64, hi: u64, cfg: &SieveConfig) -> Result<SieveSegment> {
    sieve_checked(lo, hi, cfg, true)
}

fn sieve_checked(lo: u64, hi: u64, cfg: &SieveConfig, want_spf: bool) -> Result<SieveSegment> {
    check_range_bounds(lo, hi)?;
    cfg.check_limit(hi as u128 - 1)?;
    let per = TOTIENT_BYTES + if want_spf { SPF_BYTES } else { 0 };
    cfg.check_memory(hi - lo, per, 1)?;
    let primes = cfg.base_primes(hi)?;
    Ok(sieve_segment(lo, hi, &primes, want_spf))
}

/// Lehmer index from n and φ(n) alone: multiply n - 1 into an accumulator
/// modulo φ(n) until it vanishes. No exponent of φ(n) exceeds ⌈log2 φ(n)⌉,
/// so nothing in L_∞ survives that many steps; repeated squaring settles
/// membership before the linear walk.
pub fn bulk_index(n: u64, phi: u64) -> LehmerIndex {
    if phi == 1 {
        return LehmerIndex::Finite(1);
    }
    let m = phi as u128;
    let r = (n as u128 - 1) % m;
    let cutoff = arith::ceil_log2(m);
    let mut x = r;
    let mut reach = 1u32;
    while reach < cutoff && x != 0 {
        x = x * x % m;
        reach *= 2;
    }
    if x != 0 {
        return LehmerIndex::NotInLinf;
    }
    let mut acc = r;
    let mut k = 1;
    while acc != 0 {
        acc = acc * r % m;
        k += 1;
    }
    LehmerIndex::Finite(k)
}

fn classify_segment(seg: &SieveSegment) -> impl Iterator<Item = (u64, LehmerIndex)> + '_ {
    (seg.lo..seg.hi)
        .zip(&seg.phi)
        .map(|(n, &phi)| (n, bulk_index(n, phi)))
}

/// Lehmer index of every n in [lo, hi), computed without factoring.
///
/// `kmax` (at most 127) names the largest k the caller distinguishes; the
/// reported indices are exact regardless.
pub fn classify_range(
    lo: u64,
    hi: u64,
    kmax: u32,
    cfg: &SieveConfig,
) -> Result<Vec<(u64, LehmerIndex)>> {
    if kmax == 0 || kmax > MAX_K {
        return Err(Error::InvalidArgument(format!(
            "kmax must be in 1..=127, got {kmax}"
        )));
    }
    check_range_bounds(lo, hi)?;
    cfg.check_limit(hi as u128 - 1)?;
    cfg.validate()?;
    let primes = cfg.base_primes(hi)?;
    let parts = cfg.install(|| {
        segments(lo, hi, cfg.segment_size)
            .par_iter()
            .map(|&(a, b)| {
                classify_segment(&sieve_segment(a, b, &primes, false)).collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// A k in a counting request: finite, or ∞ for L_∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KBound {
    Finite(u32),
    Infinite,
}

impl KBound {
    pub fn admits(self, idx: LehmerIndex) -> bool {
        match self {
            KBound::Finite(k) => idx.within(k),
            KBound::Infinite => idx.in_linf(),
        }
    }
}

impl fmt::Display for KBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KBound::Finite(k) => write!(f, "{k}"),
            KBound::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for KBound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(KBound::Infinite),
            t => match t.parse::<u32>() {
                Ok(k) if k >= 1 => Ok(KBound::Finite(k)),
                _ => Err(Error::InvalidArgument(format!("bad k value {s:?}"))),
            },
        }
    }
}

impl Serialize for KBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountRow {
    pub x: u64,
    /// One count per entry of [`CountTable::ks`].
    pub counts: Vec<u64>,
}

/// C_k(X) = #{ n ≤ X : n ∈ L_k } at X = 10, 100, ..., limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub limit: u64,
    pub ks: Vec<KBound>,
    pub rows: Vec<CountRow>,
}

impl CountTable {
    pub fn get(&self, k: KBound, x: u64) -> Option<u64> {
        let col = self.ks.iter().position(|&j| j == k)?;
        let row = self.rows.iter().find(|r| r.x == x)?;
        Some(row.counts[col])
    }
}

/// Slot 0 holds NotInLinf; slot k holds index k.
type Histogram = Vec<[u64; MAX_K as usize + 1]>;

fn power_of_ten_exponent(limit: u64) -> Option<u32> {
    let mut x = 1u64;
    for j in 0..20 {
        if x == limit {
            return Some(j);
        }
        x = x.checked_mul(10)?;
    }
    None
}

/// Counts every n ≤ X in L_k, including 1 and the primes.
pub fn count_table(limit: u128, ks: &[KBound], cfg: &SieveConfig) -> Result<CountTable> {
    let limit = cfg.check_limit(limit)?;
    let decades = power_of_ten_exponent(limit)
        .filter(|&j| j >= 1)
        .ok_or(Error::NotPowerOfTen(limit as u128))?;
    let mut ks: Vec<KBound> = ks.to_vec();
    if ks.contains(&KBound::Finite(0)) {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if !ks.contains(&KBound::Infinite) {
        ks.push(KBound::Infinite);
    }
    cfg.validate()?;
    let primes = cfg.base_primes(limit + 1)?;
    let decade_of = |n: u64| -> usize {
        // smallest j with n ≤ 10^j, minus one; n = 1..=10 → 0
        let mut j = 0;
        let mut x = 10u64;
        while n > x {
            x *= 10;
            j += 1;
        }
        j
    };
    let parts: Vec<Histogram> = cfg.install(|| {
        segments(1, limit + 1, cfg.segment_size)
            .par_iter()
            .map(|&(a, b)| {
                let seg = sieve_segment(a, b, &primes, false);
                let mut hist: Histogram = vec![[0u64; MAX_K as usize + 1]; decades as usize];
                for (n, idx) in classify_segment(&seg) {
                    let slot = idx.finite().unwrap_or(0) as usize;
                    hist[decade_of(n)][slot] += 1;
                }
                hist
            })
            .collect()
    })?;
    let mut total: Histogram = vec![[0u64; MAX_K as usize + 1]; decades as usize];
    for h in parts {
        for (t, s) in total.iter_mut().zip(h) {
            for (a, b) in t.iter_mut().zip(s) {
                *a += b;
            }
        }
    }

    let mut rows = Vec::with_capacity(decades as usize);
    let mut running = vec![0u64; ks.len()];
    let mut x = 1u64;
    for bucket in &total {
        x *= 10;
        for (c, &k) in running.iter_mut().zip(&ks) {
            let upto = match k {
                KBound::Finite(k) => k.min(MAX_K) as usize,
                KBound::Infinite => MAX_K as usize,
            };
            *c += bucket[1..=upto].iter().sum::<u64>();
        }
        rows.push(CountRow {
            x,
            counts: running.clone(),
        });
    }
    Ok(CountTable { limit, ks, rows })
}

/// Composite n ≤ limit in L_k, ascending.
pub fn enumerate_lk_composites(limit: u128, k: u32, cfg: &SieveConfig) -> Result<Vec<u64>> {
    let limit = cfg.check_limit(limit)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if limit < 4 {
        return Ok(Vec::new());
    }
    let k = k.min(MAX_K);
    cfg.validate()?;
    let primes = cfg.base_primes(limit + 1)?;
    let parts = cfg.install(|| {
        segments(1, limit + 1, cfg.segment_size)
            .par_iter()
            .map(|&(a, b)| {
                let seg = sieve_segment(a, b, &primes, false);
                // φ(n) = n - 1 exactly for primes
                classify_segment(&seg)
                    .zip(&seg.phi)
                    .filter(|&((n, idx), &phi)| n > 1 && phi != n - 1 && idx.within(k))
                    .map(|((n, _), _)| n)
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// Carmichael numbers in [lo, hi) with their distinct-prime counts.
///
/// Korselt's conditions are checked while sieving: each prime p ≤ √hi
/// hitting n must divide it exactly once and p - 1 must divide n - 1; the
/// cofactor left over, if any, is a single prime and gets the same check.
fn korselt_segment(lo: u64, hi: u64, primes: &[u64]) -> Vec<(u64, u32)> {
    let len = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut ok = vec![true; len];
    let mut omega = vec![0u32; len];
    for &p in primes {
        if p * p >= hi {
            break;
        }
        let mut j = first_multiple(p, lo);
        while j < hi {
            let i = (j - lo) as usize;
            if ok[i] {
                let r = rem[i] / p;
                if r.is_multiple_of(p) || !(j - 1).is_multiple_of(p - 1) {
                    ok[i] = false;
                } else {
                    rem[i] = r;
                    omega[i] += 1;
                }
            }
            j += p;
        }
    }
    let mut out = Vec::new();
    for i in 0..len {
        if !ok[i] {
            continue;
        }
        let n = lo + i as u64;
        let r = rem[i];
        let mut w = omega[i];
        if r > 1 {
            if !(n - 1).is_multiple_of(r - 1) {
                continue;
            }
            w += 1;
        }
        if w >= 2 {
            out.push((n, w));
        }
    }
    out
}

fn carmichael_with_omega(limit: u64, cfg: &SieveConfig) -> Result<Vec<(u64, u32)>> {
    cfg.validate()?;
    let primes = cfg.base_primes(limit + 1)?;
    let parts = cfg.install(|| {
        segments(1, limit + 1, cfg.segment_size)
            .par_iter()
            .map(|&(a, b)| korselt_segment(a, b, &primes))
            .collect::<Vec<_>>()
    })?;
    Ok(parts.into_iter().flatten().collect())
}

/// All Carmichael numbers ≤ limit, ascending.
pub fn enumerate_carmichael(limit: u128, cfg: &SieveConfig) -> Result<Vec<u64>> {
    let limit = cfg.check_limit(limit)?;
    Ok(carmichael_with_omega(limit, cfg)?
        .into_iter()
        .map(|(n, _)| n)
        .collect())
}

/// α(k) = the least Carmichael number outside L_k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlphaRecord {
    pub k: u32,
    #[serde(with = "crate::decimal")]
    pub n: u128,
    pub omega: u32,
    /// n ∈ L_{k+1}
    pub in_next: bool,
    /// Search limit that certified minimality; 0 for a direct check.
    #[serde(with = "crate::decimal")]
    pub bound: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaOutcome {
    Found(AlphaRecord),
    NotFound { bound: u128 },
}

/// Smallest Carmichael n ≤ limit with n ∉ L_k. Segments are processed in
/// ascending batches and the scan stops at the first batch with a hit.
pub fn alpha_search(k: u32, limit: u128, cfg: &SieveConfig) -> Result<AlphaOutcome> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let limit = cfg.check_limit(limit)?;
    cfg.validate()?;
    let primes = cfg.base_primes(limit + 1)?;
    let all = segments(1, limit + 1, cfg.segment_size);
    let batch = (cfg.concurrency() as usize * 4).max(1);
    for chunk in all.chunks(batch) {
        let found = cfg.install(|| {
            chunk
                .par_iter()
                .map(|&(a, b)| korselt_segment(a, b, &primes))
                .collect::<Vec<_>>()
        })?;
        for (n, omega) in found.into_iter().flatten() {
            let n = n as u128;
            if !lehmer::in_lk(n, k)? {
                return Ok(AlphaOutcome::Found(AlphaRecord {
                    k,
                    n,
                    omega,
                    in_next: lehmer::in_lk(n, k.saturating_add(1))?,
                    bound: limit as u128,
                }));
            }
        }
    }
    Ok(AlphaOutcome::NotFound {
        bound: limit as u128,
    })
}

/// Checks a claimed α(k) by factoring it: Carmichael, outside L_k. Says
/// nothing about minimality.
pub fn verify_alpha_entry(k: u32, n: u128) -> Result<AlphaRecord> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    if n == 0 {
        return Err(Error::Zero);
    }
    let f = factorize(n)?;
    if !korselt_factored(&f) {
        return Err(Error::NotCarmichael(n));
    }
    let idx = lehmer::lehmer_index_factored(&f);
    if idx.within(k) {
        return Err(Error::InLk { n, k });
    }
    Ok(AlphaRecord {
        k,
        n,
        omega: f.omega() as u32,
        in_next: idx.within(k.saturating_add(1)),
        bound: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SieveConfig {
        SieveConfig::default()
    }

    #[test]
    fn totient_examples() {
        let s = totient_sieve(1, 11, &cfg()).unwrap();
        assert_eq!(s.phi, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4]);
        assert_eq!(totient_sieve(90, 92, &cfg()).unwrap().phi_of(91), Some(72));
        assert_eq!(totient_sieve(561, 562, &cfg()).unwrap().phi, vec![320]);
    }

    #[test]
    fn totient_errors() {
        assert!(totient_sieve(0, 10, &cfg()).is_err());
        assert!(totient_sieve(10, 10, &cfg()).is_err());
        assert!(matches!(
            totient_sieve(1, DEFAULT_MAX_LIMIT + 2, &cfg()),
            Err(Error::LimitExceeded { .. })
        ));
        let tight = SieveConfig {
            memory_budget_mib: 1,
            ..cfg()
        };
        match totient_sieve(1, 1_000_000, &tight) {
            Err(Error::MemoryBudget { suggested, .. }) => assert_eq!(suggested, (1 << 20) / 16),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn sieve_matches_factorization() {
        let s = totient_sieve_with_spf(1, 100_001, &cfg()).unwrap();
        for n in 1..=100_000u64 {
            let f = factorize(n as u128).unwrap();
            assert_eq!(s.phi_of(n).unwrap() as u128, arith::euler_phi(&f));
            let spf = f.primes().next().unwrap_or(0);
            assert_eq!(s.spf_of(n).unwrap() as u128, spf, "n = {n}");
        }
        // interior segment with its own lo
        let s = totient_sieve(999_000, 1_000_000, &cfg()).unwrap();
        for n in (999_000..1_000_000u64).step_by(37) {
            assert_eq!(
                s.phi_of(n).unwrap() as u128,
                arith::euler_phi(&factorize(n as u128).unwrap())
            );
        }
    }

    #[test]
    fn bulk_index_examples() {
        assert_eq!(bulk_index(1, 1), LehmerIndex::Finite(1));
        assert_eq!(bulk_index(2, 1), LehmerIndex::Finite(1));
        assert_eq!(bulk_index(3, 2), LehmerIndex::Finite(1));
        assert_eq!(bulk_index(15, 8), LehmerIndex::Finite(3));
        assert_eq!(bulk_index(51, 32), LehmerIndex::Finite(5));
        assert_eq!(bulk_index(9, 6), LehmerIndex::NotInLinf);
        assert_eq!(bulk_index(561, 320), LehmerIndex::Finite(2));
    }

    #[test]
    fn classify_examples() {
        let out = classify_range(2, 100, MAX_K, &cfg()).unwrap();
        let composites: Vec<(u64, LehmerIndex)> = out
            .into_iter()
            .filter(|&(n, idx)| idx.in_linf() && !arith::is_prime(n as u128))
            .collect();
        use LehmerIndex::Finite;
        assert_eq!(
            composites,
            vec![
                (15, Finite(3)),
                (51, Finite(5)),
                (85, Finite(3)),
                (91, Finite(3))
            ]
        );
        assert_eq!(
            classify_range(1, 2, 10, &cfg()).unwrap(),
            vec![(1, Finite(1))]
        );
        assert_eq!(
            classify_range(561, 562, 10, &cfg()).unwrap(),
            vec![(561, Finite(2))]
        );
        assert!(classify_range(1, 2, 0, &cfg()).is_err());
        assert!(classify_range(1, 2, 128, &cfg()).is_err());
    }

    #[test]
    fn count_table_small() {
        let t = count_table(100, &[KBound::Finite(2)], &cfg()).unwrap();
        assert_eq!(t.ks, vec![KBound::Finite(2), KBound::Infinite]);
        assert_eq!(t.get(KBound::Finite(2), 10), Some(5));
        assert_eq!(t.get(KBound::Finite(2), 100), Some(26));
        assert_eq!(t.get(KBound::Infinite, 100), Some(30));
        let t = count_table(10_000, &[KBound::Finite(5)], &cfg()).unwrap();
        assert_eq!(t.get(KBound::Finite(5), 10_000), Some(1303));
        assert_eq!(
            count_table(500, &[], &cfg()),
            Err(Error::NotPowerOfTen(500))
        );
        assert_eq!(count_table(1, &[], &cfg()), Err(Error::NotPowerOfTen(1)));
    }

    #[test]
    fn kbound_parsing() {
        assert_eq!("inf".parse::<KBound>(), Ok(KBound::Infinite));
        assert_eq!("7".parse::<KBound>(), Ok(KBound::Finite(7)));
        assert!("0".parse::<KBound>().is_err());
        assert!("x".parse::<KBound>().is_err());
        assert_eq!(KBound::Finite(3).to_string(), "3");
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            enumerate_lk_composites(500, 2, &cfg()).unwrap(),
            Vec::<u64>::new()
        );
        assert_eq!(
            enumerate_lk_composites(100, 3, &cfg()).unwrap(),
            vec![15, 85, 91]
        );
        assert_eq!(
            enumerate_carmichael(3000, &cfg()).unwrap(),
            vec![561, 1105, 1729, 2465, 2821]
        );
        assert!(enumerate_carmichael(500, &cfg()).unwrap().is_empty());
        assert_eq!(
            enumerate_carmichael(10_000, &cfg()).unwrap(),
            vec![561, 1105, 1729, 2465, 2821, 6601, 8911]
        );
    }

    #[test]
    fn korselt_sieve_matches_pointwise_test() {
        let fast = enumerate_carmichael(200_000, &cfg().with_segment_size(7_777)).unwrap();
        let slow: Vec<u64> = (1..=200_000u64)
            .filter(|&n| crate::carmichael::korselt_test(n as u128).unwrap())
            .collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn alpha_examples() {
        let hit = |k, limit| match alpha_search(k, limit, &cfg()).unwrap() {
            AlphaOutcome::Found(r) => (r.n, r.omega),
            AlphaOutcome::NotFound { bound } => panic!("nothing below {bound}"),
        };
        assert_eq!(hit(1, 10_000), (561, 3));
        assert_eq!(hit(2, 10_000), (2821, 3));
        assert_eq!(
            alpha_search(3, 10_000, &cfg()).unwrap(),
            AlphaOutcome::NotFound { bound: 10_000 }
        );
    }

    #[test]
    fn verify_alpha_examples() {
        let r = verify_alpha_entry(4, 41_471_521).unwrap();
        assert_eq!((r.omega, r.in_next, r.bound), (5, true, 0));
        let r = verify_alpha_entry(3, 838_201).unwrap();
        assert!(r.in_next);
        assert_eq!(
            verify_alpha_entry(2, 561),
            Err(Error::InLk { n: 561, k: 2 })
        );
        assert_eq!(verify_alpha_entry(1, 560), Err(Error::NotCarmichael(560)));
    }

    #[test]
    fn prime_cache_is_used_and_written() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("base.bin");
        let c = SieveConfig {
            prime_cache: Some(path.clone()),
            ..cfg()
        };
        let a = enumerate_carmichael(100_000, &c).unwrap();
        assert!(path.exists());
        let cached = cache::read(&path).unwrap();
        assert!(cached.bound >= 316);
        // second run reads the file back
        assert_eq!(enumerate_carmichael(100_000, &c).unwrap(), a);
    }

    #[test]
    fn results_do_not_depend_on_segmentation() {
        let base = classify_range(1, 50_001, MAX_K, &cfg()).unwrap();
        for (seg, workers) in [(1_000, 1), (4_097, 3), (50_000, 2)] {
            let c = cfg().with_segment_size(seg).with_workers(workers);
            assert_eq!(classify_range(1, 50_001, MAX_K, &c).unwrap(), base);
        }
    }
}
