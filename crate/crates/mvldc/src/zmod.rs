//! Arithmetic mod an odd composite m: factorization, CRT, canonical sets,
//! and vectors over Z_m^h.
//!
//! The canonical set S_m of an odd m = p_1^e_1 · … · p_r^e_r is the set of
//! nonzero residues congruent to 0 or 1 modulo every prime-power factor.
//! It has 2^r - 1 elements, indexed by the binary representation of
//! t ∈ [1, 2^r - 1]: bit i-1 of t gives the residue of s_t mod p_i^e_i,
//! so s_{2^r - 1} = 1 always.

use crate::error::{Error, Result};

/// An odd modulus 3 ≤ m < 2^32 together with its prime-power factorization
/// (at most 4 distinct primes, sorted ascending).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulus {
    m: u64,
    factors: Vec<(u64, u32)>,
}

impl Modulus {
    /// Factor `m` by trial division and check the supported range.
    pub fn factorize(m: u64) -> Result<Modulus> {
        if m < 3 {
            return Err(Error::ModulusTooSmall(m));
        }
        if m % 2 == 0 {
            return Err(Error::EvenModulus(m));
        }
        if m >= 1 << 32 {
            return Err(Error::ModulusTooLarge(m));
        }
        let mut factors = Vec::new();
        let mut rest = m;
        let mut p = 3u64;
        while p * p <= rest {
            if rest % p == 0 {
                let mut e = 0u32;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                factors.push((p, e));
            }
            p += 2;
        }
        if rest > 1 {
            factors.push((rest, 1));
        }
        if factors.len() > 4 {
            return Err(Error::TooManyPrimeFactors {
                m,
                r: factors.len(),
            });
        }
        Ok(Modulus { m, factors })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// (prime, exponent) pairs, ascending by prime.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of distinct prime factors.
    pub fn r(&self) -> usize {
        self.factors.len()
    }

    /// The prime-power components p_i^e_i, ascending.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, e)| p.pow(e)).collect()
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` mod `n` (coprime inputs) by extended Euclid.
fn mod_inverse(a: u64, n: u64) -> Option<u64> {
    let (mut r0, mut r1) = (n as i128, (a % n) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(n as i128) as u64)
}

/// Solve x ≡ r_i (mod n_i) for pairwise coprime n_i; returns the unique
/// solution mod the product.
pub fn crt_solve(congruences: &[(u64, u64)]) -> Result<u64> {
    if congruences.is_empty() {
        return Err(Error::EmptyCrt);
    }
    let (mut x, mut n) = (0u128, 1u128);
    for &(r, ni) in congruences {
        if gcd(n as u64 % ni.max(1), ni) != 1 {
            return Err(Error::NotCoprime(n as u64, ni));
        }
        // lift x from mod n to mod n*ni: x + n * k with k ≡ (r - x)/n (mod ni)
        let ninv = mod_inverse((n % ni as u128) as u64, ni).ok_or(Error::NotCoprime(n as u64, ni))?;
        let diff = ((r as u128 + ni as u128 - x % ni as u128) % ni as u128) as u64;
        let k = (diff as u128 * ninv as u128 % ni as u128) as u64;
        x += n * k as u128;
        n *= ni as u128;
    }
    Ok((x % n) as u64)
}

/// The canonical set S_m, in binary-index order (so the last element is 1)
/// with a sorted copy for membership tests.
#[derive(Debug, Clone)]
pub struct CanonicalSet {
    modulus: Modulus,
    by_index: Vec<u64>,
    sorted: Vec<u64>,
}

/// Membership predicate: s ∈ S_m iff s ≠ 0 and s ≡ 0 or 1 mod every
/// prime-power factor of m.
pub fn is_canonical(modulus: &Modulus, s: u64) -> bool {
    s != 0 && s < modulus.m && modulus.factors.iter().all(|&(p, e)| s % p.pow(e) <= 1)
}

/// Build S_m by CRT from the binary indexing.
pub fn canonical_set(modulus: &Modulus) -> CanonicalSet {
    let pps = modulus.prime_powers();
    let r = pps.len();
    let mut by_index = Vec::with_capacity((1 << r) - 1);
    for t in 1u64..(1 << r) {
        let congruences: Vec<(u64, u64)> = pps
            .iter()
            .enumerate()
            .map(|(i, &pe)| ((t >> i) & 1, pe))
            .collect();
        let s = crt_solve(&congruences).expect("prime powers of one modulus are coprime");
        by_index.push(s);
    }
    let mut sorted = by_index.clone();
    sorted.sort_unstable();
    CanonicalSet {
        modulus: modulus.clone(),
        by_index,
        sorted,
    }
}

impl CanonicalSet {
    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Elements in binary-index order: the element at position t-1 is s_t.
    pub fn by_index(&self) -> &[u64] {
        &self.by_index
    }

    /// Elements in ascending order.
    pub fn sorted(&self) -> &[u64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.by_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_index.is_empty()
    }

    pub fn contains(&self, s: u64) -> bool {
        self.sorted.binary_search(&s).is_ok()
    }
}

/// Split s ∈ S_{m1·m2} ∪ {0} into its components mod m1 and m2, verifying
/// that each lands in S_{m1} ∪ {0} / S_{m2} ∪ {0}.
pub fn split_canonical(s: u64, m1: &Modulus, m2: &Modulus) -> Result<(u64, u64)> {
    if gcd(m1.m, m2.m) != 1 {
        return Err(Error::NotCoprime(m1.m, m2.m));
    }
    let m = m1.m * m2.m;
    if s >= m {
        return Err(Error::NotCanonical { s, m });
    }
    let (s1, s2) = (s % m1.m, s % m2.m);
    let part_ok = |modulus: &Modulus, part: u64| part == 0 || is_canonical(modulus, part);
    if s != 0 && part_ok(m1, s1) && part_ok(m2, s2) {
        Ok((s1, s2))
    } else if s == 0 {
        Ok((0, 0))
    } else {
        Err(Error::NotCanonical { s, m })
    }
}

/// A vector over Z_m^h with reduced coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZVector {
    m: u64,
    coords: Vec<u64>,
}

impl ZVector {
    /// Build from signed coordinates, normalizing into [0, m).
    pub fn new(m: u64, coords: &[i64]) -> ZVector {
        assert!(m >= 1, "modulus must be positive");
        ZVector {
            m,
            coords: coords.iter().map(|&c| c.rem_euclid(m as i64) as u64).collect(),
        }
    }

    /// Build from unsigned coordinates, reducing mod m.
    pub fn from_coords(m: u64, coords: Vec<u64>) -> ZVector {
        assert!(m >= 1, "modulus must be positive");
        ZVector {
            m,
            coords: coords.into_iter().map(|c| c % m).collect(),
        }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn h(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    fn check_compatible(&self, other: &ZVector) -> Result<()> {
        if self.m != other.m {
            return Err(Error::VectorModulusMismatch(self.m, other.m));
        }
        if self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch(self.coords.len(), other.coords.len()));
        }
        Ok(())
    }

    /// self + c · other, componentwise mod m.
    pub fn add_scaled(&self, c: u64, other: &ZVector) -> Result<ZVector> {
        self.check_compatible(other)?;
        let c = c % self.m;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + c * b % self.m) % self.m)
            .collect();
        Ok(ZVector { m: self.m, coords })
    }

    /// Standard inner product mod m.
    pub fn inner_product(&self, other: &ZVector) -> Result<u64> {
        self.check_compatible(other)?;
        Ok(ip_raw(self.m, &self.coords, &other.coords))
    }

    /// Little-endian mixed-radix rank: coordinate 0 is the least significant
    /// digit.
    pub fn rank(&self) -> u64 {
        let mut idx = 0u64;
        for &c in self.coords.iter().rev() {
            idx = idx * self.m + c;
        }
        idx
    }

    /// Inverse of [`ZVector::rank`].
    pub fn from_rank(m: u64, h: usize, mut rank: u64) -> ZVector {
        let mut coords = Vec::with_capacity(h);
        for _ in 0..h {
            coords.push(rank % m);
            rank /= m;
        }
        ZVector { m, coords }
    }
}

/// Inner product on raw reduced slices; callers guarantee equal lengths and
/// coordinates < m < 2^32, so the accumulator cannot overflow.
pub(crate) fn ip_raw(m: u64, a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).fold(0u64, |acc, (&x, &y)| (acc + x * y) % m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorize_known_moduli() {
        assert_eq!(Modulus::factorize(511).unwrap().factors(), &[(7, 1), (73, 1)]);
        assert_eq!(Modulus::factorize(15).unwrap().factors(), &[(3, 1), (5, 1)]);
        assert_eq!(Modulus::factorize(27).unwrap().factors(), &[(3, 3)]);
        assert_eq!(Modulus::factorize(45).unwrap().factors(), &[(3, 2), (5, 1)]);
        assert_eq!(
            Modulus::factorize(1533).unwrap().factors(),
            &[(3, 1), (7, 1), (73, 1)]
        );
        assert_eq!(Modulus::factorize(3).unwrap().factors(), &[(3, 1)]);
    }

    #[test]
    fn factorize_guards() {
        assert!(matches!(Modulus::factorize(1), Err(Error::ModulusTooSmall(1))));
        assert!(matches!(Modulus::factorize(14), Err(Error::EvenModulus(14))));
        assert!(matches!(
            Modulus::factorize(1 << 32 | 1),
            Err(Error::ModulusTooLarge(_))
        ));
        // 3 * 5 * 7 * 11 * 13 = 15015 has five distinct primes
        assert!(matches!(
            Modulus::factorize(15015),
            Err(Error::TooManyPrimeFactors { m: 15015, r: 5 })
        ));
    }

    #[test]
    fn canonical_set_m15() {
        let m = Modulus::factorize(15).unwrap();
        let s = canonical_set(&m);
        // t=1 → 1 mod 3, 0 mod 5 → 10; t=2 → 0 mod 3, 1 mod 5 → 6; t=3 → 1
        assert_eq!(s.by_index(), &[10, 6, 1]);
        assert_eq!(s.sorted(), &[1, 6, 10]);
    }

    #[test]
    fn canonical_set_m511() {
        let m = Modulus::factorize(511).unwrap();
        let s = canonical_set(&m);
        assert_eq!(s.by_index(), &[365, 147, 1]);
        assert_eq!(s.sorted(), &[1, 147, 365]);
    }

    #[test]
    fn canonical_set_m21() {
        let m = Modulus::factorize(21).unwrap();
        let s = canonical_set(&m);
        assert_eq!(s.sorted(), &[1, 7, 15]);
    }

    #[test]
    fn canonical_set_prime_power() {
        // prime powers have r = 1, so S = {1}
        let s = canonical_set(&Modulus::factorize(27).unwrap());
        assert_eq!(s.by_index(), &[1]);
        // m = 45 = 3^2 · 5: residues 0/1 mod 9 and mod 5
        let s = canonical_set(&Modulus::factorize(45).unwrap());
        assert_eq!(s.by_index(), &[10, 36, 1]);
    }

    #[test]
    fn canonical_set_m1533() {
        let s = canonical_set(&Modulus::factorize(1533).unwrap());
        assert_eq!(s.sorted(), &[1, 147, 511, 658, 876, 1023, 1387]);
        assert_eq!(s.len(), 7);
    }

    #[test]
    fn canonical_last_element_is_one() {
        for m in [15u64, 21, 35, 45, 105, 511, 1533] {
            let s = canonical_set(&Modulus::factorize(m).unwrap());
            assert_eq!(*s.by_index().last().unwrap(), 1, "m = {m}");
        }
    }

    #[test]
    fn canonical_set_matches_membership_predicate() {
        // exhaustive cross-check against the definition for every odd m < 10^4
        // with at most 3 distinct prime factors
        for m in (3u64..10_000).step_by(2) {
            let modulus = match Modulus::factorize(m) {
                Ok(md) if md.r() <= 3 => md,
                _ => continue,
            };
            let set = canonical_set(&modulus);
            assert_eq!(set.len(), (1 << modulus.r()) - 1, "m = {m}");
            let brute: Vec<u64> = (1..m).filter(|&s| is_canonical(&modulus, s)).collect();
            assert_eq!(set.sorted(), &brute[..], "m = {m}");
        }
    }

    #[test]
    fn crt_known_values() {
        assert_eq!(crt_solve(&[(0, 7), (1, 73)]).unwrap(), 147);
        assert_eq!(crt_solve(&[(1, 7), (0, 73)]).unwrap(), 365);
        assert_eq!(crt_solve(&[(1, 3), (0, 5)]).unwrap(), 10);
        assert_eq!(crt_solve(&[(2, 3), (3, 5), (2, 7)]).unwrap(), 23);
    }

    #[test]
    fn crt_rejects_non_coprime() {
        assert!(matches!(
            crt_solve(&[(1, 15), (2, 21)]),
            Err(Error::NotCoprime(_, _))
        ));
        assert!(matches!(crt_solve(&[]), Err(Error::EmptyCrt)));
    }

    #[test]
    fn crt_roundtrip() {
        let moduli = [9u64, 5, 7, 11];
        let product: u64 = moduli.iter().product();
        for x in (0..product).step_by(97) {
            let congruences: Vec<(u64, u64)> = moduli.iter().map(|&n| (x % n, n)).collect();
            assert_eq!(crt_solve(&congruences).unwrap(), x);
        }
    }

    #[test]
    fn inner_product_examples() {
        let u = ZVector::new(15, &[1, 2, 1, 3]);
        assert_eq!(u.inner_product(&u).unwrap(), 0); // 1 + 4 + 1 + 9 = 15
        let v = ZVector::new(15, &[2, 0, 1, 1]);
        assert_eq!(u.inner_product(&v).unwrap(), 6); // 2 + 0 + 1 + 3
    }

    #[test]
    fn negative_coordinates_normalize() {
        let v = ZVector::new(15, &[-1, -16, 30]);
        assert_eq!(v.coords(), &[14, 14, 0]);
    }

    #[test]
    fn vector_mismatch_errors() {
        let a = ZVector::new(15, &[1, 2]);
        let b = ZVector::new(15, &[1, 2, 3]);
        let c = ZVector::new(21, &[1, 2]);
        assert!(matches!(a.inner_product(&b), Err(Error::DimensionMismatch(2, 3))));
        assert!(matches!(
            a.inner_product(&c),
            Err(Error::VectorModulusMismatch(15, 21))
        ));
    }

    #[test]
    fn add_scaled_wraps() {
        let v = ZVector::new(15, &[14, 3]);
        let u = ZVector::new(15, &[2, 10]);
        let w = v.add_scaled(7, &u).unwrap();
        // 14 + 14 = 28 ≡ 13, 3 + 70 = 73 ≡ 13
        assert_eq!(w.coords(), &[13, 13]);
    }

    #[test]
    fn rank_roundtrip() {
        // little-endian: (2,1) over m=3 ranks to 2 + 1*3 = 5
        assert_eq!(ZVector::new(3, &[2, 1]).rank(), 5);
        assert_eq!(ZVector::from_rank(3, 2, 5).coords(), &[2, 1]);
        for idx in 0..27u64 {
            assert_eq!(ZVector::from_rank(3, 3, idx).rank(), idx);
        }
    }

    #[test]
    fn split_canonical_m15() {
        let m1 = Modulus::factorize(3).unwrap();
        let m2 = Modulus::factorize(5).unwrap();
        assert_eq!(split_canonical(1, &m1, &m2).unwrap(), (1, 1));
        assert_eq!(split_canonical(6, &m1, &m2).unwrap(), (0, 1));
        assert_eq!(split_canonical(10, &m1, &m2).unwrap(), (1, 0));
        assert_eq!(split_canonical(0, &m1, &m2).unwrap(), (0, 0));
        assert!(matches!(
            split_canonical(2, &m1, &m2),
            Err(Error::NotCanonical { s: 2, m: 15 })
        ));
    }

    #[test]
    fn split_canonical_requires_coprime() {
        let m1 = Modulus::factorize(15).unwrap();
        let m2 = Modulus::factorize(21).unwrap();
        assert!(matches!(
            split_canonical(1, &m1, &m2),
            Err(Error::NotCoprime(15, 21))
        ));
    }

    #[test]
    fn split_and_crt_are_inverse_on_canonical_pairs() {
        // each (s1, s2) ∈ (S_{m1} ∪ {0}) × (S_{m2} ∪ {0}) \ {(0,0)} lifts to
        // an element of S_{m1·m2} and splits back
        for (a, b) in [(3u64, 5u64), (7, 73), (15, 7)] {
            let m1 = Modulus::factorize(a).unwrap();
            let m2 = Modulus::factorize(b).unwrap();
            let m = Modulus::factorize(a * b).unwrap();
            let mut s1s: Vec<u64> = canonical_set(&m1).sorted().to_vec();
            s1s.push(0);
            let mut s2s: Vec<u64> = canonical_set(&m2).sorted().to_vec();
            s2s.push(0);
            let mut lifted = Vec::new();
            for &s1 in &s1s {
                for &s2 in &s2s {
                    if s1 == 0 && s2 == 0 {
                        continue;
                    }
                    let s = crt_solve(&[(s1, a), (s2, b)]).unwrap();
                    assert!(is_canonical(&m, s), "({s1},{s2}) lifts to {s}");
                    assert_eq!(split_canonical(s, &m1, &m2).unwrap(), (s1, s2));
                    lifted.push(s);
                }
            }
            lifted.sort_unstable();
            assert_eq!(lifted, canonical_set(&m).sorted());
        }
    }
}
