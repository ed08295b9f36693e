use klehmer::arith::{self, factorize, gcd, is_prime, mod_pow};
use klehmer::carmichael::{self, korselt_test};
use klehmer::lehmer::{self, in_lk, in_lk_modular, lehmer_index, semiprime_decompose, LehmerIndex};
use klehmer::sieve::{self, cache, AlphaOutcome, KBound, SieveConfig};
use proptest::prelude::*;

const N: u64 = 100_000;

fn cfg() -> SieveConfig {
    SieveConfig::default()
}

#[test]
fn membership_is_monotone_in_k() {
    for n in 1..=N as u128 {
        let mut prev = false;
        for k in 1..=6 {
            let now = in_lk(n, k).unwrap();
            assert!(!prev || now, "n = {n} in L_{} but not L_{k}", k - 1);
            prev = now;
        }
    }
}

#[test]
fn range_classification_matches_pointwise_index() {
    let got = sieve::classify_range(1, N + 1, 127, &cfg()).unwrap();
    assert_eq!(got.len(), N as usize);
    for (n, idx) in got {
        assert_eq!(idx, lehmer_index(n as u128).unwrap(), "n = {n}");
    }
}

#[test]
fn count_table_matches_classification() {
    let ks: Vec<KBound> = (1..=5)
        .map(KBound::Finite)
        .chain([KBound::Infinite])
        .collect();
    let table = sieve::count_table(N as u128, &ks, &cfg()).unwrap();
    let idx = sieve::classify_range(1, N + 1, 127, &cfg()).unwrap();
    for row in &table.rows {
        for (col, &k) in table.ks.iter().enumerate() {
            let direct = idx
                .iter()
                .filter(|&&(n, i)| n <= row.x && k.admits(i))
                .count() as u64;
            assert_eq!(row.counts[col], direct, "k = {k}, x = {}", row.x);
        }
    }
}

#[test]
fn count_rows_are_monotone() {
    let ks = [2, 3, 4, 5].map(KBound::Finite);
    let table = sieve::count_table(1_000_000, &ks, &cfg()).unwrap();
    assert_eq!(table.ks.last(), Some(&KBound::Infinite));
    for row in &table.rows {
        assert!(
            row.counts.windows(2).all(|w| w[0] <= w[1]),
            "x = {}: {:?}",
            row.x,
            row.counts
        );
    }
    for w in table.rows.windows(2) {
        assert!(w[0].counts.iter().zip(&w[1].counts).all(|(a, b)| a <= b));
    }
}

#[test]
fn carmichael_numbers_lie_in_linf() {
    for n in 2..=N as u128 {
        if korselt_test(n).unwrap() {
            assert!(lehmer::in_linf(n).unwrap(), "n = {n}");
        }
    }
    let cs = sieve::enumerate_carmichael(1_000_000, &cfg()).unwrap();
    assert_eq!(cs.len(), 43);
    for n in cs {
        assert!(lehmer_index(n as u128).unwrap().in_linf(), "n = {n}");
    }
}

#[test]
fn l2_composites_match_pointwise_scan() {
    let listed = sieve::enumerate_lk_composites(N as u128, 2, &cfg()).unwrap();
    let direct: Vec<u64> = (4..=N)
        .filter(|&n| !is_prime(n as u128) && in_lk(n as u128, 2).unwrap())
        .collect();
    assert_eq!(listed, direct);
}

#[test]
fn alpha_search_agrees_with_verification() {
    for k in 1..=3 {
        let AlphaOutcome::Found(rec) = sieve::alpha_search(k, 1_000_000, &cfg()).unwrap() else {
            panic!("alpha({k}) not found");
        };
        let check = sieve::verify_alpha_entry(k, rec.n).unwrap();
        assert_eq!((check.omega, check.in_next), (rec.omega, rec.in_next));
        assert_eq!(check.bound, 0);
        assert_eq!(rec.bound, 1_000_000);
    }
}

#[test]
fn results_do_not_depend_on_workers_or_segments() {
    let base = sieve::classify_range(1, 300_001, 10, &cfg().with_workers(1)).unwrap();
    for (w, seg) in [(2, 4096), (4, 65536), (3, 1 << 17)] {
        let c = cfg().with_workers(w).with_segment_size(seg);
        assert_eq!(sieve::classify_range(1, 300_001, 10, &c).unwrap(), base);
    }
    let a = sieve::enumerate_carmichael(1_000_000, &cfg().with_workers(1)).unwrap();
    let b = sieve::enumerate_carmichael(1_000_000, &cfg().with_workers(4).with_segment_size(5000))
        .unwrap();
    assert_eq!(a, b);
}

fn next_prime(mut n: u128) -> u128 {
    while !is_prime(n) {
        n += 1;
    }
    n
}

fn small_prime() -> impl Strategy<Value = u128> {
    (2u128..2_000_000).prop_map(next_prime)
}

fn wide_prime() -> impl Strategy<Value = u128> {
    (1u128 << 40..1u128 << 60).prop_map(next_prime)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factorization_recomposes(ps in prop::collection::vec(small_prime(), 1..4), big in prop::option::of(wide_prime())) {
        let mut n: u128 = ps.iter().product();
        if let Some(q) = big {
            n *= q;
        }
        let f = factorize(n).unwrap();
        prop_assert_eq!(f.value(), n);
        let recomposed: u128 = f.factors().iter().map(|&(p, e)| p.pow(e)).product();
        prop_assert_eq!(recomposed, n);
        prop_assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
        prop_assert!(f.primes().all(is_prime));
        let mut expected = ps.clone();
        expected.extend(big);
        expected.sort_unstable();
        let mut flat: Vec<u128> = f.factors().iter().flat_map(|&(p, e)| std::iter::repeat_n(p, e as usize)).collect();
        flat.sort_unstable();
        prop_assert_eq!(flat, expected);
    }

    #[test]
    fn mod_pow_splits_exponents(b in 0..=arith::MAX_NATURAL, x in 0u128..1 << 64, y in 0u128..1 << 64, m in 1..=arith::MAX_NATURAL) {
        let lhs = mod_pow(b, x + y, m).unwrap();
        let rhs = mul_mod(mod_pow(b, x, m).unwrap(), mod_pow(b, y, m).unwrap(), m);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fermat_holds_for_primes(p in wide_prime(), b in 2u128..1 << 100) {
        let b = b % p;
        prop_assume!(b != 0);
        prop_assert_eq!(mod_pow(b, p - 1, p).unwrap(), 1);
    }

    #[test]
    fn semiprime_decomposition_recomposes(p in small_prime(), q in small_prime()) {
        prop_assume!(p != q && p > 2 && q > 2);
        let d = semiprime_decompose(p, q).unwrap();
        prop_assert_eq!(d.n(), p * q);
        prop_assert!(d.a <= d.b);
        prop_assert!(d.alpha % 2 == 1 && d.beta % 2 == 1);
        prop_assert_eq!(gcd(d.alpha, d.beta), 1);
        prop_assert_eq!(d.p - 1, (1u128 << d.a) * d.d * d.alpha);
        prop_assert_eq!(d.q - 1, (1u128 << d.b) * d.d * d.beta);
        for k in 2..=6 {
            prop_assert_eq!(lehmer::semiprime_in_lk(&d, k).unwrap(), in_lk(p * q, k).unwrap());
        }
        prop_assert!(!in_lk(p * q, 2).unwrap());
    }

    #[test]
    fn index_matches_definition(n in 2u128..1 << 80) {
        let f = factorize(n).unwrap();
        let idx = lehmer::lehmer_index_factored(&f);
        let phi = arith::euler_phi(&f);
        match idx {
            LehmerIndex::NotInLinf => {
                prop_assert!(!lehmer::in_linf(n).unwrap());
                prop_assert!(!in_lk_modular(n, 127).unwrap());
            }
            LehmerIndex::Finite(k) => {
                prop_assert!(k >= 1);
                prop_assert!(in_lk_modular(n, k).unwrap());
                prop_assert!(k == 1 || !in_lk_modular(n, k - 1).unwrap());
                prop_assert!(k <= arith::ceil_log2(phi).max(1));
            }
        }
        prop_assert_eq!(idx, lehmer_index(n).unwrap());
    }

    #[test]
    fn carmichael_tests_agree(n in 2u128..1 << 40) {
        let v = carmichael::carmichael_verdict(n).unwrap();
        prop_assert!(v.agree());
    }
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    let mut acc = 0u128;
    let mut x = a % m;
    let mut y = b % m;
    while y > 0 {
        if y & 1 == 1 {
            acc = add_mod(acc, x, m);
        }
        x = add_mod(x, x, m);
        y >>= 1;
    }
    acc
}

fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

#[test]
fn prime_cache_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("primes.bin");
    let primes: Vec<u64> = (2..10_000u64).filter(|&p| is_prime(p as u128)).collect();
    let c = cache::PrimeCache {
        bound: 10_000,
        primes,
    };
    cache::write(&path, &c).unwrap();
    assert_eq!(cache::read(&path).unwrap(), c);

    let with_cache = SieveConfig {
        prime_cache: Some(path),
        ..cfg()
    };
    assert_eq!(
        sieve::classify_range(1, 50_001, 8, &with_cache).unwrap(),
        sieve::classify_range(1, 50_001, 8, &cfg()).unwrap()
    );
}
