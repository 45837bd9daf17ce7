//! Binary field contexts GF(2^t) for 1 ≤ t ≤ 40.
//!
//! Elements are packed-bit polynomials over F_2 in the quotient ring
//! F_2[x]/(modulus_poly): bit i of an element is the coefficient of x^i.
//! Multiplication is shift-xor with per-step reduction; inversion goes
//! through Fermat. A context caches a multiplicative generator and the
//! factorization of 2^t - 1, which makes exact element orders cheap.

use crate::error::{Error, Result};
use crate::zmod::{gcd, Modulus};

/// A field element. Only meaningful together with the [`FieldCtx`] it was
/// produced by; contexts reject out-of-range bit patterns at the boundary
/// and debug-assert them inside the arithmetic.
#[derive(Debug, Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(pub(crate) u64);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

// Addition in characteristic 2 is xor and needs no reduction, so it lives on
// the element type itself.
impl std::ops::Add for Fe {
    type Output = Fe;
    fn add(self, rhs: Fe) -> Fe {
        Fe(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for Fe {
    fn add_assign(&mut self, rhs: Fe) {
        self.0 ^= rhs.0;
    }
}

// ---------------------------------------------------------------------------
// F_2[x] helpers on u64 bit-vectors (bit i = coefficient of x^i)
// ---------------------------------------------------------------------------

/// Degree of a bit-packed F_2[x] polynomial (-1 for the zero polynomial).
pub fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn pdeg(p: u64) -> i32 {
    poly_degree(p)
}

fn pmod(mut a: u128, f: u64) -> u64 {
    let df = pdeg(f);
    while a != 0 {
        let da = 127 - a.leading_zeros() as i32;
        if da < df {
            break;
        }
        a ^= (f as u128) << (da - df);
    }
    a as u64
}

fn pmulmod(a: u64, b: u64, f: u64) -> u64 {
    let mut acc: u128 = 0;
    let mut aa = a as u128;
    let mut bb = b;
    while bb != 0 {
        if bb & 1 == 1 {
            acc ^= aa;
        }
        bb >>= 1;
        aa <<= 1;
    }
    pmod(acc, f)
}

fn pgcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, pmod(a as u128, b));
    }
    a
}

/// x^(2^k) mod f by repeated squaring.
fn frobenius_power(k: u32, f: u64) -> u64 {
    let mut r = pmod(0b10, f);
    for _ in 0..k {
        r = pmulmod(r, r, f);
    }
    r
}

/// Rabin's irreducibility test for f of degree d ≥ 1.
pub fn is_irreducible(f: u64) -> bool {
    let d = pdeg(f);
    if d < 1 {
        return false;
    }
    let x = pmod(0b10, f);
    if frobenius_power(d as u32, f) != x {
        return false;
    }
    // distinct primes dividing d
    let mut rest = d as u64;
    let mut primes = Vec::new();
    let mut q = 2u64;
    while q * q <= rest {
        if rest % q == 0 {
            primes.push(q);
            while rest % q == 0 {
                rest /= q;
            }
        }
        q += 1;
    }
    if rest > 1 {
        primes.push(rest);
    }
    primes
        .iter()
        .all(|&p| pgcd(frobenius_power(d as u32 / p as u32, f) ^ x, f) == 1)
}

/// The irreducible degree-t polynomial with the smallest integer encoding
/// (constant term forced to 1 so x never divides a candidate).
fn smallest_irreducible(t: u32) -> u64 {
    let mut c = (1u64 << t) | 1;
    loop {
        if is_irreducible(c) {
            return c;
        }
        c += 2;
    }
}

/// Default modulus polynomial: x^9+x^4+1 and x^4+x+1 are pinned (they define
/// the bundled constants); every other degree takes the smallest irreducible.
pub fn default_modulus_poly(t: u32) -> u64 {
    match t {
        4 => 0x13,
        9 => 0x211,
        _ => smallest_irreducible(t),
    }
}

// ---------------------------------------------------------------------------
// integer factorization for group orders (n < 2^41)
// ---------------------------------------------------------------------------

fn mulmod_u64(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn powmod_u64(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1 % n;
    a %= n;
    while e != 0 {
        if e & 1 == 1 {
            r = mulmod_u64(r, a, n);
        }
        a = mulmod_u64(a, a, n);
        e >>= 1;
    }
    r
}

fn miller_rabin(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's cycle variant of Pollard rho; returns a nontrivial factor of
/// composite odd n.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod_u64(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Factor n ≥ 1 by trial division to 2^20, then Miller-Rabin / Pollard rho
/// on whatever remains.
pub(crate) fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some((_, e)) => *e += 1,
        None => out.push((p, 1)),
    };
    for p in [2u64, 3, 5] {
        while n % p == 0 {
            push(p, &mut out);
            n /= p;
        }
    }
    let mut p = 7u64;
    while p <= 1 << 20 && p * p <= n {
        while n % p == 0 {
            push(p, &mut out);
            n /= p;
        }
        p += 2;
    }
    let mut stack = Vec::new();
    if n > 1 {
        stack.push(n);
    }
    while let Some(v) = stack.pop() {
        if miller_rabin(v) {
            push(v, &mut out);
        } else {
            let d = pollard_rho(v);
            stack.push(d);
            stack.push(v / d);
        }
    }
    out.sort_unstable();
    out
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Multiplicative order of 2 mod m: the degree of the splitting field of
/// x^m - 1 over F_2. Found by scanning the divisors of the Carmichael
/// function, so it is exact and fast even for large m.
pub fn mult_order_of_2(modulus: &Modulus) -> u64 {
    let m = modulus.m();
    let lambda = modulus
        .factors()
        .iter()
        .fold(1u64, |l, &(p, e)| lcm(l, p.pow(e - 1) * (p - 1)));
    let mut divisors = vec![1u64];
    for &(p, e) in &factor_u64(lambda) {
        let mut next = Vec::with_capacity(divisors.len() * (e as usize + 1));
        for &d in &divisors {
            let mut pp = 1u64;
            for _ in 0..=e {
                next.push(d * pp);
                pp *= p;
            }
        }
        divisors = next;
    }
    divisors.sort_unstable();
    *divisors
        .iter()
        .find(|&&d| powmod_u64(2, d, m) == 1)
        .expect("the order of 2 divides lambda(m)")
}

// ---------------------------------------------------------------------------
// the field context
// ---------------------------------------------------------------------------

/// GF(2^t) with a fixed modulus polynomial, a cached multiplicative
/// generator, and the factorization of 2^t - 1.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    t: u32,
    modulus_poly: u64,
    generator: Fe,
    order_factors: Vec<(u64, u32)>,
}

/// Cap on subgroup enumeration in root searches; keeps find_subfield_copy
/// and find_twist_exponent at desk scale.
const SUBGROUP_CAP: u64 = 1 << 22;

pub fn build_field(t: u32, modulus_poly: Option<u64>) -> Result<FieldCtx> {
    FieldCtx::new(t, modulus_poly)
}

impl FieldCtx {
    pub fn new(t: u32, modulus_poly: Option<u64>) -> Result<FieldCtx> {
        if !(1..=40).contains(&t) {
            return Err(Error::DegreeOutOfRange(t));
        }
        let poly = match modulus_poly {
            Some(p) => {
                if pdeg(p) != t as i32 || !is_irreducible(p) {
                    return Err(Error::NotIrreducible(p));
                }
                p
            }
            None => default_modulus_poly(t),
        };
        let order = (1u64 << t) - 1;
        let order_factors = factor_u64(order.max(1));
        let mut ctx = FieldCtx {
            t,
            modulus_poly: poly,
            generator: Fe(1),
            order_factors: if order == 1 { Vec::new() } else { order_factors },
        };
        if order > 1 {
            ctx.generator = ctx
                .find_generator()
                .expect("every finite field has a generator");
        }
        Ok(ctx)
    }

    fn find_generator(&self) -> Option<Fe> {
        let order = self.order();
        (2..=order).map(Fe).find(|&a| {
            self.order_factors
                .iter()
                .all(|&(q, _)| self.pow(a, order / q) != Fe::ONE)
        })
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn modulus_poly(&self) -> u64 {
        self.modulus_poly
    }

    /// 2^t - 1, the multiplicative group order.
    pub fn order(&self) -> u64 {
        (1u64 << self.t) - 1
    }

    /// The cached multiplicative generator (smallest bit encoding).
    pub fn generator(&self) -> Fe {
        self.generator
    }

    pub fn order_factors(&self) -> &[(u64, u32)] {
        &self.order_factors
    }

    pub fn contains(&self, a: Fe) -> bool {
        self.t == 64 || a.0 >> self.t == 0
    }

    /// Validate an external bit pattern as an element.
    pub fn element_from_bits(&self, bits: u64) -> Result<Fe> {
        let fe = Fe(bits);
        if self.contains(fe) {
            Ok(fe)
        } else {
            Err(Error::CoefficientTooWide { coef: bits, t1: self.t })
        }
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        a + b
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        debug_assert!(self.contains(a) && self.contains(b));
        let top = 1u64 << self.t;
        let (mut acc, mut a, mut b) = (0u64, a.0, b.0);
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus_poly;
            }
        }
        Fe(acc)
    }

    pub fn sq(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    pub fn pow(&self, mut a: Fe, mut e: u64) -> Fe {
        let mut r = Fe::ONE;
        while e != 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.sq(a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.order() - 1))
    }

    /// [1, b, b^2, …, b^(count-1)].
    pub fn power_table(&self, base: Fe, count: usize) -> Vec<Fe> {
        let mut table = Vec::with_capacity(count);
        let mut cur = Fe::ONE;
        for _ in 0..count {
            table.push(cur);
            cur = self.mul(cur, base);
        }
        table
    }

    /// Evaluate an F_2 polynomial (bit-vector) at a field element.
    pub fn eval_f2poly(&self, poly: u64, at: Fe) -> Fe {
        let mut r = Fe::ZERO;
        for bit in (0..=pdeg(poly).max(0)).rev() {
            r = self.mul(r, at);
            if poly >> bit & 1 == 1 {
                r += Fe::ONE;
            }
        }
        r
    }

    /// Exact multiplicative order via the cached factorization of 2^t - 1.
    pub fn element_order(&self, a: Fe) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::ZeroOrder);
        }
        let mut o = self.order();
        for &(p, e) in &self.order_factors {
            for _ in 0..e {
                if o % p == 0 && self.pow(a, o / p) == Fe::ONE {
                    o /= p;
                } else {
                    break;
                }
            }
        }
        Ok(o)
    }

    /// Minimal polynomial of `a` over F_2: the product over the Frobenius
    /// orbit, whose coefficients always collapse to 0/1.
    pub fn minimal_polynomial(&self, a: Fe) -> u64 {
        let mut conjugates = vec![a];
        let mut c = self.sq(a);
        while c != a {
            conjugates.push(c);
            c = self.sq(c);
        }
        let mut coeffs: Vec<Fe> = vec![Fe::ONE];
        for &root in &conjugates {
            let mut next = vec![Fe::ZERO; coeffs.len() + 1];
            for (i, &co) in coeffs.iter().enumerate() {
                next[i + 1] += co;
                next[i] += self.mul(co, root);
            }
            coeffs = next;
        }
        let mut bits = 0u64;
        for (i, &co) in coeffs.iter().enumerate() {
            assert!(co.0 <= 1, "minimal polynomial must have F_2 coefficients");
            bits |= co.0 << i;
        }
        bits
    }

    /// Express `a` as an F_2 combination of 1, gamma, …, gamma^(t1-1).
    /// Returns the coefficient bit-vector, or an error when `a` lies outside
    /// that span.
    pub fn gamma_relative(&self, gamma: Fe, t1: u32, a: Fe) -> Result<u64> {
        let pows = self.power_table(gamma, t1 as usize);
        let mut rows: Vec<u64> = (0..self.t)
            .map(|b| {
                let mut row = 0u64;
                for (j, p) in pows.iter().enumerate() {
                    row |= (p.0 >> b & 1) << j;
                }
                row | (a.0 >> b & 1) << t1
            })
            .collect();
        let mut pivots: Vec<(u32, usize)> = Vec::new();
        let mut next_row = 0usize;
        for col in 0..t1 {
            if let Some(pr) = (next_row..rows.len()).find(|&i| rows[i] >> col & 1 == 1) {
                rows.swap(next_row, pr);
                let pivot = rows[next_row];
                for (i, row) in rows.iter_mut().enumerate() {
                    if i != next_row && *row >> col & 1 == 1 {
                        *row ^= pivot;
                    }
                }
                pivots.push((col, next_row));
                next_row += 1;
            }
        }
        if rows[next_row..].iter().any(|&r| r != 0) {
            return Err(Error::NotInGammaSpan { t1 });
        }
        let mut bits = 0u64;
        for &(col, row) in &pivots {
            bits |= (rows[row] >> t1 & 1) << col;
        }
        Ok(bits)
    }

    /// Instantiate gamma-relative coefficient bits against a concrete root:
    /// sum of root^j over the set bits j.
    pub fn gamma_combine(&self, gamma_pows: &[Fe], bits: u64) -> Fe {
        let mut acc = Fe::ZERO;
        for (j, &p) in gamma_pows.iter().enumerate() {
            if bits >> j & 1 == 1 {
                acc += p;
            }
        }
        acc
    }
}

/// A field element with verified multiplicative order m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderMElement {
    element: Fe,
    m: u64,
}

impl OrderMElement {
    /// Check that `element` has order exactly `modulus.m()` and wrap it.
    pub fn verified(ctx: &FieldCtx, element: Fe, modulus: &Modulus) -> Result<OrderMElement> {
        let m = modulus.m();
        if element.is_zero() {
            return Err(Error::ZeroOrder);
        }
        if ctx.pow(element, m) != Fe::ONE {
            let found = ctx.element_order(element)?;
            return Err(Error::WrongOrder { expected: m, found });
        }
        for &(p, _) in modulus.factors() {
            if ctx.pow(element, m / p) == Fe::ONE {
                let found = ctx.element_order(element)?;
                return Err(Error::WrongOrder { expected: m, found });
            }
        }
        Ok(OrderMElement { element, m })
    }

    pub fn element(&self) -> Fe {
        self.element
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}

/// gamma = g^((2^t - 1)/m) for the cached generator g; errors unless
/// m | 2^t - 1. The order is re-verified before returning.
pub fn find_order_m_element(ctx: &FieldCtx, modulus: &Modulus) -> Result<OrderMElement> {
    let m = modulus.m();
    let order = ctx.order();
    if order % m != 0 {
        return Err(Error::OrderDoesNotDivide { m, t: ctx.t() });
    }
    let gamma = ctx.pow(ctx.generator(), order / m);
    OrderMElement::verified(ctx, gamma, modulus)
}

/// Smallest h ∈ Z*_{m1} with gamma^(h · m/m1) equal to the target, where
/// m = gamma.m() and m1 = target.m(). This is the twist that aligns a
/// product-modulus root with a chosen subfield root.
pub fn find_twist_exponent(
    ctx: &FieldCtx,
    gamma: &OrderMElement,
    target: &OrderMElement,
) -> Result<u64> {
    let m = gamma.m();
    let m1 = target.m();
    if m % m1 != 0 {
        return Err(Error::OrderDoesNotDivide { m: m1, t: ctx.t() });
    }
    let m2 = m / m1;
    if gcd(m1, m2) != 1 {
        return Err(Error::NotCoprime(m1, m2));
    }
    if m1 > SUBGROUP_CAP {
        return Err(Error::SubgroupTooLarge {
            order: m1,
            cap: SUBGROUP_CAP,
        });
    }
    let base = ctx.pow(gamma.element(), m2);
    let mut cur = Fe::ONE;
    for h in 1..=m1 {
        cur = ctx.mul(cur, base);
        if gcd(h, m1) == 1 && cur == target.element() {
            return Ok(h);
        }
    }
    Err(Error::NoTwistExponent { m: m1 })
}

/// Find the smallest-encoded root of an irreducible `minpoly` inside `ctx`.
/// All roots share one multiplicative order d (the order of x in
/// F_2[x]/minpoly), so the search walks the order-d subgroup only.
pub fn find_subfield_copy(ctx: &FieldCtx, minpoly: u64) -> Result<Fe> {
    if minpoly == ctx.modulus_poly() {
        return Ok(Fe(pmod(0b10, minpoly)));
    }
    let d1 = pdeg(minpoly);
    if d1 < 1 || !is_irreducible(minpoly) {
        return Err(Error::NotIrreducible(minpoly));
    }
    let d1 = d1 as u32;
    if ctx.t() % d1 != 0 {
        return Err(Error::DegreeDoesNotDivide {
            poly: minpoly,
            deg: d1,
            t: ctx.t(),
        });
    }
    // multiplicative order of the roots = order of x mod minpoly
    let sub_order = (1u64 << d1) - 1;
    let mut root_order = sub_order.max(1);
    if sub_order > 1 {
        for &(p, e) in &factor_u64(sub_order) {
            for _ in 0..e {
                if root_order % p == 0 {
                    let probe = {
                        // x^(root_order/p) mod minpoly via square-and-multiply
                        let (mut r, mut base, mut ex) = (1u64, pmod(0b10, minpoly), root_order / p);
                        while ex != 0 {
                            if ex & 1 == 1 {
                                r = pmulmod(r, base, minpoly);
                            }
                            base = pmulmod(base, base, minpoly);
                            ex >>= 1;
                        }
                        r
                    };
                    if probe == 1 {
                        root_order /= p;
                        continue;
                    }
                }
                break;
            }
        }
    }
    if root_order > SUBGROUP_CAP {
        return Err(Error::SubgroupTooLarge {
            order: root_order,
            cap: SUBGROUP_CAP,
        });
    }
    if ctx.order() % root_order != 0 {
        return Err(Error::OrderDoesNotDivide {
            m: root_order,
            t: ctx.t(),
        });
    }
    let y = ctx.pow(ctx.generator(), ctx.order() / root_order);
    let mut best: Option<Fe> = None;
    let mut cur = Fe::ONE;
    for h in 1..=root_order {
        cur = ctx.mul(cur, y);
        if gcd(h, root_order) == 1
            && ctx.eval_f2poly(minpoly, cur).is_zero()
            && best.is_none_or(|b| cur < b)
        {
            best = Some(cur);
        }
    }
    // order 1: the only candidate is 1 itself (minpoly x + 1)
    if best.is_none() && root_order == 1 && ctx.eval_f2poly(minpoly, Fe::ONE).is_zero() {
        best = Some(Fe::ONE);
    }
    best.ok_or(Error::NoRootFound(minpoly))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mult_order_of_2_known() {
        let ord = |m: u64| mult_order_of_2(&Modulus::factorize(m).unwrap());
        assert_eq!(ord(511), 9);
        assert_eq!(ord(15), 4);
        assert_eq!(ord(3), 2);
        assert_eq!(ord(7), 3);
        assert_eq!(ord(73), 9);
        assert_eq!(ord(21), 6);
        assert_eq!(ord(35), 12);
        assert_eq!(ord(1533), 18);
    }

    #[test]
    fn mult_order_lcm_property() {
        // ord_2(m1 m2) = lcm(ord_2(m1), ord_2(m2)) for coprime odd m1, m2
        let pairs = [(3u64, 5u64), (7, 73), (511, 3), (15, 7), (9, 35), (21, 5)];
        for (a, b) in pairs {
            let oa = mult_order_of_2(&Modulus::factorize(a).unwrap());
            let ob = mult_order_of_2(&Modulus::factorize(b).unwrap());
            let oab = mult_order_of_2(&Modulus::factorize(a * b).unwrap());
            assert_eq!(oab, lcm(oa, ob), "m1={a} m2={b}");
        }
    }

    #[test]
    fn default_polys() {
        assert_eq!(default_modulus_poly(4), 0x13); // x^4 + x + 1
        assert_eq!(default_modulus_poly(9), 0x211); // x^9 + x^4 + 1
        assert_eq!(default_modulus_poly(2), 0b111);
        assert_eq!(default_modulus_poly(3), 0b1011);
        assert_eq!(default_modulus_poly(18), 0x40009); // x^18 + x^3 + 1
    }

    #[test]
    fn rejects_bad_modulus_polys() {
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2
        assert!(matches!(
            FieldCtx::new(4, Some(0x15)),
            Err(Error::NotIrreducible(0x15))
        ));
        // degree mismatch
        assert!(matches!(
            FieldCtx::new(5, Some(0x13)),
            Err(Error::NotIrreducible(0x13))
        ));
        assert!(matches!(FieldCtx::new(0, None), Err(Error::DegreeOutOfRange(0))));
        assert!(matches!(FieldCtx::new(41, None), Err(Error::DegreeOutOfRange(41))));
    }

    #[test]
    fn f4_arithmetic() {
        let f4 = FieldCtx::new(2, None).unwrap();
        let g = Fe(0b10);
        assert_eq!(f4.mul(g, g), Fe(0b11)); // x^2 = x + 1
        assert_eq!(f4.sq(Fe(0b11)), g); // (x+1)^2 = x^2 + 1 = x
        assert_eq!(f4.mul(g, Fe(0b11)), Fe::ONE); // x(x+1) = x^2 + x = 1
        assert_eq!(f4.inv(g).unwrap(), Fe(0b11));
        assert!(f4.inv(Fe::ZERO).is_err());
    }

    #[test]
    fn f16_x_is_primitive() {
        let f16 = FieldCtx::new(4, None).unwrap();
        assert_eq!(f16.generator(), Fe(2));
        assert_eq!(f16.element_order(Fe(2)).unwrap(), 15);
        // gcd(2,15) = 1 so gamma^2 also has order 15
        assert_eq!(f16.element_order(f16.sq(Fe(2))).unwrap(), 15);
    }

    #[test]
    fn element_order_matches_brute_force() {
        for t in [4u32, 6] {
            let ctx = FieldCtx::new(t, None).unwrap();
            for bits in 1..(1u64 << t) {
                let a = Fe(bits);
                let mut brute = 1u64;
                let mut c = a;
                while c != Fe::ONE {
                    c = ctx.mul(c, a);
                    brute += 1;
                }
                assert_eq!(ctx.element_order(a).unwrap(), brute, "t={t} bits={bits:#x}");
            }
        }
    }

    #[test]
    fn fermat_exhaustive_t4() {
        let ctx = FieldCtx::new(4, None).unwrap();
        for bits in 1..16u64 {
            assert_eq!(ctx.pow(Fe(bits), 15), Fe::ONE);
        }
    }

    #[test]
    fn generator_t18_is_frozen() {
        // x is not primitive mod x^18 + x^3 + 1; the smallest generator is
        // x^3 + x
        let ctx = FieldCtx::new(18, None).unwrap();
        assert_eq!(ctx.generator(), Fe(0xa));
        assert_eq!(ctx.element_order(Fe(0xa)).unwrap(), (1 << 18) - 1);
    }

    #[test]
    fn order_m_elements() {
        let f16 = FieldCtx::new(4, None).unwrap();
        let m15 = Modulus::factorize(15).unwrap();
        let gamma = find_order_m_element(&f16, &m15).unwrap();
        assert_eq!(gamma.element(), Fe(2));

        let m5 = Modulus::factorize(5).unwrap();
        let g5 = find_order_m_element(&f16, &m5).unwrap();
        assert_eq!(f16.element_order(g5.element()).unwrap(), 5);

        // 7 does not divide 15
        let m7 = Modulus::factorize(7).unwrap();
        assert!(matches!(
            find_order_m_element(&f16, &m7),
            Err(Error::OrderDoesNotDivide { m: 7, t: 4 })
        ));

        // g^3 has order 21 in GF(2^6)
        let f64 = FieldCtx::new(6, None).unwrap();
        let m21 = Modulus::factorize(21).unwrap();
        let g21 = find_order_m_element(&f64, &m21).unwrap();
        assert_eq!(g21.element(), f64.pow(f64.generator(), 3));
        assert_eq!(f64.element_order(g21.element()).unwrap(), 21);
    }

    #[test]
    fn verified_rejects_wrong_order() {
        let f16 = FieldCtx::new(4, None).unwrap();
        let m15 = Modulus::factorize(15).unwrap();
        let m5 = Modulus::factorize(5).unwrap();
        let g5 = find_order_m_element(&f16, &m5).unwrap();
        assert!(matches!(
            OrderMElement::verified(&f16, g5.element(), &m15),
            Err(Error::WrongOrder { expected: 15, found: 5 })
        ));
    }

    #[test]
    fn minimal_polynomials() {
        let f512 = FieldCtx::new(9, None).unwrap();
        assert_eq!(f512.minimal_polynomial(Fe(2)), 0x211);
        let f4 = FieldCtx::new(2, None).unwrap();
        assert_eq!(f4.minimal_polynomial(Fe(2)), 0b111);
        assert_eq!(f4.minimal_polynomial(Fe::ONE), 0b11); // x + 1
        assert_eq!(f4.minimal_polynomial(Fe::ZERO), 0b10); // x
        // an order-3 element of GF(2^4) has minimal polynomial x^2 + x + 1
        let f16 = FieldCtx::new(4, None).unwrap();
        let w = f16.pow(f16.generator(), 5);
        assert_eq!(f16.minimal_polynomial(w), 0b111);
    }

    #[test]
    fn subfield_copies_in_gf2_18() {
        let big = FieldCtx::new(18, None).unwrap();
        // the modulus polynomial's own root is x
        assert_eq!(find_subfield_copy(&big, 0x40009).unwrap(), Fe(2));
        // smallest root of x^9 + x^4 + 1 (frozen; verified by evaluation)
        let r = find_subfield_copy(&big, 0x211).unwrap();
        assert_eq!(r, Fe(0xf4e));
        assert!(big.eval_f2poly(0x211, r).is_zero());
        assert_eq!(big.element_order(r).unwrap(), 511);
        // smallest root of x^2 + x + 1 has order 3
        let w = find_subfield_copy(&big, 0b111).unwrap();
        assert_eq!(w, Fe(0x9208));
        assert_eq!(big.element_order(w).unwrap(), 3);
    }

    #[test]
    fn subfield_copy_rejects_bad_degrees() {
        let big = FieldCtx::new(18, None).unwrap();
        // degree 4 does not divide 18
        assert!(matches!(
            find_subfield_copy(&big, 0x13),
            Err(Error::DegreeDoesNotDivide { deg: 4, t: 18, .. })
        ));
        assert!(matches!(
            find_subfield_copy(&big, 0x15),
            Err(Error::NotIrreducible(0x15))
        ));
    }

    #[test]
    fn twist_exponents_in_gf2_18() {
        let big = FieldCtx::new(18, None).unwrap();
        let m1533 = Modulus::factorize(1533).unwrap();
        let gamma = find_order_m_element(&big, &m1533).unwrap();

        let m511 = Modulus::factorize(511).unwrap();
        let g1 = OrderMElement::verified(&big, find_subfield_copy(&big, 0x211).unwrap(), &m511).unwrap();
        let h1 = find_twist_exponent(&big, &gamma, &g1).unwrap();
        assert_eq!(h1, 375);
        assert_eq!(big.pow(gamma.element(), h1 * 3), g1.element());

        let m3 = Modulus::factorize(3).unwrap();
        let g2 = OrderMElement::verified(&big, find_subfield_copy(&big, 0b111).unwrap(), &m3).unwrap();
        let h2 = find_twist_exponent(&big, &gamma, &g2).unwrap();
        assert_eq!(h2, 2);
        assert_eq!(big.pow(gamma.element(), h2 * 511), g2.element());
    }

    #[test]
    fn twist_exponent_requires_dividing_order() {
        let f16 = FieldCtx::new(4, None).unwrap();
        let m15 = Modulus::factorize(15).unwrap();
        let m7 = Modulus::factorize(7).unwrap();
        let gamma = find_order_m_element(&f16, &m15).unwrap();
        // fabricate a "target" with order 5 but claim 7 is impossible via
        // the verified constructor, so check the division guard directly
        let g5 = find_order_m_element(&f16, &Modulus::factorize(5).unwrap()).unwrap();
        assert!(find_twist_exponent(&f16, &g5, &gamma).is_err());
        let _ = m7;
    }

    #[test]
    fn gamma_relative_roundtrip() {
        let f512 = FieldCtx::new(9, None).unwrap();
        let gamma = Fe(2);
        let pows = f512.power_table(gamma, 9);
        for bits in [0u64, 1, 0x1ff, 0x103, 0x14a, 0x48, 0xaa] {
            let elem = f512.gamma_combine(&pows, bits);
            assert_eq!(f512.gamma_relative(gamma, 9, elem).unwrap(), bits);
        }
    }

    #[test]
    fn gamma_relative_detects_out_of_span() {
        // span of 1, w for an order-3 w in GF(2^4) is the F_4 subfield
        let f16 = FieldCtx::new(4, None).unwrap();
        let w = f16.pow(f16.generator(), 5);
        assert!(f16.gamma_relative(w, 2, f16.generator()).is_err());
        // members of the subfield do resolve
        let member = f16.add(w, Fe::ONE);
        let bits = f16.gamma_relative(w, 2, member).unwrap();
        assert_eq!(f16.gamma_combine(&f16.power_table(w, 2), bits), member);
    }

    #[test]
    fn factor_u64_works() {
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(511), vec![(7, 1), (73, 1)]);
        assert_eq!(factor_u64((1 << 18) - 1), vec![(3, 3), (7, 1), (19, 1), (73, 1)]);
        // 2^40 - 1 = 3 · 5^2 · 11 · 17 · 31 · 41 · 61681
        assert_eq!(
            factor_u64((1u64 << 40) - 1),
            vec![(3, 1), (5, 2), (11, 1), (17, 1), (31, 1), (41, 1), (61681, 1)]
        );
    }

    #[test]
    fn eval_f2poly_matches_manual() {
        let f16 = FieldCtx::new(4, None).unwrap();
        let x = Fe(2);
        // x^4 + x + 1 vanishes at x by construction
        assert!(f16.eval_f2poly(0x13, x).is_zero());
        // x^2 + 1 at x: x^2 + 1
        assert_eq!(f16.eval_f2poly(0b101, x), f16.sq(x) + Fe::ONE);
    }
}
