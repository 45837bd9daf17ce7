//! Query-count composition.
//!
//! Two decoding polynomials over coprime odd moduli m₁ and m₂ combine into
//! one over m = m₁m₂ with at most k₁k₂ monomials, living in the field
//! F_{2^t} with t = lcm(t₁,t₂). The recipe: find an order-m element γ in
//! the big field, locate copies γ₁, γ₂ of the sub-polynomials' roots there,
//! solve the twists h₁, h₂ with γ^{h₁m₂} = γ₁ and γ^{h₂m₁} = γ₂, then
//! multiply P₁(x^{h₁m₂})·P₂(x^{h₂m₁}). Vanishing on S_m follows factor by
//! factor because every s ∈ S_m reduces into S_{m₁}∪{0} × S_{m₂}∪{0} with
//! at least one side nonzero.

use serde::Serialize;

use crate::decpoly::{verify_decoding, DecodingPolynomial, Term};
use crate::error::{Error, Result};
use crate::gf2::{
    self, find_order_m_element, find_subfield_copy, find_twist_exponent, Fe, FieldCtx,
    OrderMElement,
};
use crate::ldc::Code;
use crate::mvfam::MatchingFamily;
use crate::zmod::{canonical_set, split_canonical, Modulus};

/// Everything needed to move two sub-polynomials into one big field: the
/// field itself, the order-m element γ, the lifted sub-roots, and the twist
/// exponents aligning them with powers of γ.
#[derive(Debug, Clone)]
pub struct CompositionPlan {
    m1: u64,
    m2: u64,
    t1: u32,
    t2: u32,
    t: u32,
    big_ctx: FieldCtx,
    gamma: OrderMElement,
    gamma1: OrderMElement,
    gamma2: OrderMElement,
    h1: u64,
    h2: u64,
}

/// The sidecar summary that accompanies a composed polynomial on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanSummary {
    pub m1: u64,
    pub m2: u64,
    pub t: u32,
    pub h1: u64,
    pub h2: u64,
    pub gamma_minpoly_big: String,
}

impl CompositionPlan {
    pub fn m(&self) -> u64 {
        self.m1 * self.m2
    }

    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn m2(&self) -> u64 {
        self.m2
    }

    pub fn t1(&self) -> u32 {
        self.t1
    }

    pub fn t2(&self) -> u32 {
        self.t2
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn big_ctx(&self) -> &FieldCtx {
        &self.big_ctx
    }

    pub fn gamma(&self) -> &OrderMElement {
        &self.gamma
    }

    pub fn gamma1(&self) -> Fe {
        self.gamma1.element()
    }

    pub fn gamma2(&self) -> Fe {
        self.gamma2.element()
    }

    pub fn h1(&self) -> u64 {
        self.h1
    }

    pub fn h2(&self) -> u64 {
        self.h2
    }

    pub fn summary(&self) -> PlanSummary {
        PlanSummary {
            m1: self.m1,
            m2: self.m2,
            t: self.t,
            h1: self.h1,
            h2: self.h2,
            gamma_minpoly_big: format!(
                "{:x}",
                self.big_ctx.minimal_polynomial(self.gamma.element())
            ),
        }
    }
}

/// Work out the shared field and the twist exponents for composing `p1`
/// and `p2`. Deterministic: the field takes the smallest irreducible
/// modulus polynomial, γ comes from the smallest generator, and the lifted
/// roots are the smallest-encoded roots of each sub-minpoly.
pub fn plan(p1: &DecodingPolynomial, p2: &DecodingPolynomial) -> Result<CompositionPlan> {
    let (m1, m2) = (p1.m(), p2.m());
    if m1 < 3 || m2 < 3 {
        return Err(Error::TrivialCompositionModulus { m1, m2 });
    }
    let mod1 = Modulus::factorize(m1)?;
    let mod2 = Modulus::factorize(m2)?;
    if gf2::lcm(m1, m2) != m1 * m2 {
        return Err(Error::NotCoprime(m1, m2));
    }
    let modulus = Modulus::factorize(m1 * m2)?;
    let t1 = gf2::mult_order_of_2(&mod1) as u32;
    let t2 = gf2::mult_order_of_2(&mod2) as u32;
    for (p, expect) in [(p1, t1), (p2, t2)] {
        if p.t1() != expect {
            return Err(Error::Format {
                what: "composition input",
                detail: format!(
                    "polynomial for m = {} has field degree {}, expected {}",
                    p.m(),
                    p.t1(),
                    expect
                ),
            });
        }
    }
    let t = gf2::lcm(t1 as u64, t2 as u64) as u32;
    debug_assert_eq!(t as u64, gf2::mult_order_of_2(&modulus));
    let big_ctx = FieldCtx::new(t, None)?;
    let gamma = find_order_m_element(&big_ctx, &modulus)?;
    let gamma1 = OrderMElement::verified(&big_ctx, find_subfield_copy(&big_ctx, p1.gamma_minpoly())?, &mod1)?;
    let gamma2 = OrderMElement::verified(&big_ctx, find_subfield_copy(&big_ctx, p2.gamma_minpoly())?, &mod2)?;
    let h1 = find_twist_exponent(&big_ctx, &gamma, &gamma1)?;
    let h2 = find_twist_exponent(&big_ctx, &gamma, &gamma2)?;
    // replay the plan invariants as direct power checks
    debug_assert_eq!(big_ctx.pow(gamma.element(), h1 * m2), gamma1.element());
    debug_assert_eq!(big_ctx.pow(gamma.element(), h2 * m1), gamma2.element());
    Ok(CompositionPlan {
        m1,
        m2,
        t1,
        t2,
        t,
        big_ctx,
        gamma,
        gamma1,
        gamma2,
        h1,
        h2,
    })
}

/// The raw term arithmetic of composition: substitute x ↦ x^{h₁m₂} into P₁
/// and x ↦ x^{h₂m₁} into P₂ (both instantiated in the big field), multiply,
/// and canonicalize. No vanishing conditions are checked here.
pub fn compose_terms(
    plan: &CompositionPlan,
    p1: &DecodingPolynomial,
    p2: &DecodingPolynomial,
) -> Result<DecodingPolynomial> {
    let ctx = &plan.big_ctx;
    let m = plan.m();
    let g = plan.gamma.element();
    let coefs1 = p1.instantiate(ctx, plan.gamma1.element())?;
    let coefs2 = p2.instantiate(ctx, plan.gamma2.element())?;
    let sub1 = plan.h1 % m * (plan.m2 % m) % m;
    let sub2 = plan.h2 % m * (plan.m1 % m) % m;
    let mut products: Vec<(Fe, u64)> = Vec::with_capacity(coefs1.len() * coefs2.len());
    for (c1, t1) in coefs1.iter().zip(p1.terms()) {
        for (c2, t2) in coefs2.iter().zip(p2.terms()) {
            let exp = (t1.exp % m * sub1 % m + t2.exp % m * sub2 % m) % m;
            products.push((ctx.mul(*c1, *c2), exp));
        }
    }
    // merge like exponents in the field before converting γ-relative
    products.sort_by_key(|&(_, e)| e);
    let mut merged: Vec<(Fe, u64)> = Vec::new();
    for (c, e) in products {
        match merged.last_mut() {
            Some((mc, me)) if *me == e => *mc += c,
            _ => merged.push((c, e)),
        }
    }
    let minpoly = ctx.minimal_polynomial(g);
    let terms = merged
        .into_iter()
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, exp)| {
            Ok(Term {
                coef: ctx.gamma_relative(g, plan.t, c)?,
                exp,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DecodingPolynomial::new(m, plan.t, minpoly, terms)
}

/// Compose two verified decoding polynomials into one for m = m₁m₂ and
/// certify the result: the product must take value 1 at 1, vanish on all of
/// S_m, and do so factor-wise (for every s ∈ S_m at least one sub-
/// polynomial vanishes on its share of s).
pub fn compose_polynomials(
    plan: &CompositionPlan,
    p1: &DecodingPolynomial,
    p2: &DecodingPolynomial,
) -> Result<DecodingPolynomial> {
    let ctx = &plan.big_ctx;
    // the inputs must decode their own canonical sets
    let mod1 = Modulus::factorize(plan.m1)?;
    let mod2 = Modulus::factorize(plan.m2)?;
    for (p, gamma, md) in [(p1, &plan.gamma1, &mod1), (p2, &plan.gamma2, &mod2)] {
        let verdict = verify_decoding(p, canonical_set(md).sorted(), gamma, ctx)?;
        if !verdict.is_valid() {
            return Err(Error::Format {
                what: "composition input",
                detail: format!("polynomial for m = {} fails verification: {verdict:?}", p.m()),
            });
        }
    }
    let composed = compose_terms(plan, p1, p2)?;
    if composed.k() > p1.k() * p2.k() {
        return Err(Error::Format {
            what: "composed polynomial",
            detail: format!(
                "{} terms exceed the k1·k2 = {} bound",
                composed.k(),
                p1.k() * p2.k()
            ),
        });
    }
    let modulus = Modulus::factorize(plan.m())?;
    let s = canonical_set(&modulus);
    let verdict = verify_decoding(&composed, s.sorted(), &plan.gamma, ctx)?;
    if !verdict.is_valid() {
        return Err(Error::Format {
            what: "composed polynomial",
            detail: format!("fails verification: {verdict:?}"),
        });
    }
    factor_vanishing(plan, p1, p2, &s)?;
    Ok(composed)
}

/// For every s ∈ S_m, confirm that P₁ vanishes at γ₁^{s mod m₁} or P₂
/// vanishes at γ₂^{s mod m₂} (with the vanishing side's residue nonzero).
fn factor_vanishing(
    plan: &CompositionPlan,
    p1: &DecodingPolynomial,
    p2: &DecodingPolynomial,
    s: &crate::zmod::CanonicalSet,
) -> Result<()> {
    let ctx = &plan.big_ctx;
    let mod1 = Modulus::factorize(plan.m1)?;
    let mod2 = Modulus::factorize(plan.m2)?;
    let coefs1 = p1.instantiate(ctx, plan.gamma1.element())?;
    let coefs2 = p2.instantiate(ctx, plan.gamma2.element())?;
    let eval = |coefs: &[Fe], terms: &[Term], base: Fe, e: u64, m_sub: u64| -> Fe {
        coefs
            .iter()
            .zip(terms)
            .fold(Fe::ZERO, |acc, (c, t)| {
                acc + ctx.mul(*c, ctx.pow(base, t.exp % m_sub * e % m_sub))
            })
    };
    for &sv in s.sorted() {
        let (s1, s2) = split_canonical(sv, &mod1, &mod2)?;
        let p1_vanishes =
            s1 != 0 && eval(&coefs1, p1.terms(), plan.gamma1.element(), s1, plan.m1).is_zero();
        let p2_vanishes =
            s2 != 0 && eval(&coefs2, p2.terms(), plan.gamma2.element(), s2, plan.m2).is_zero();
        if !p1_vanishes && !p2_vanishes {
            return Err(Error::Format {
                what: "composed polynomial",
                detail: format!("no factor vanishes at s = {sv} (parts {s1}, {s2})"),
            });
        }
    }
    Ok(())
}

/// Compose and build the code over the big field: the composed polynomial,
/// the caller's matching-vector family for m = m₁m₂, and γ from the plan.
pub fn compose_codes(
    plan: &CompositionPlan,
    p1: &DecodingPolynomial,
    p2: &DecodingPolynomial,
    family: MatchingFamily,
) -> Result<Code> {
    let composed = compose_polynomials(plan, p1, p2)?;
    Code::new(family, composed, plan.big_ctx.clone(), plan.gamma.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decpoly::canonical_polynomial;
    use crate::gf2::build_field;
    use crate::par::Parallelism;
    use crate::zmod::ZVector;

    fn canonical_for(m: u64) -> DecodingPolynomial {
        let modulus = Modulus::factorize(m).unwrap();
        let t = gf2::mult_order_of_2(&modulus) as u32;
        let ctx = build_field(t, None).unwrap();
        let gamma = find_order_m_element(&ctx, &modulus).unwrap();
        canonical_polynomial(canonical_set(&modulus).sorted(), &gamma, &ctx).unwrap()
    }

    fn shipped_m511() -> DecodingPolynomial {
        DecodingPolynomial::from_json(crate::M511_POLY_JSON).unwrap()
    }

    #[test]
    fn plan_for_511_times_3() {
        let p = plan(&shipped_m511(), &canonical_for(3)).unwrap();
        assert_eq!((p.m1(), p.m2(), p.m()), (511, 3, 1533));
        assert_eq!(p.t(), 18);
        assert_eq!(p.big_ctx().modulus_poly(), 0x40009);
        // the lifted roots and twists are pinned by the smallest-encoding rule
        assert_eq!(p.gamma1().bits(), 0xf4e);
        assert_eq!(p.gamma2().bits(), 0x9208);
        assert_eq!((p.h1(), p.h2()), (375, 2));
        // replay the invariants
        let g = p.gamma().element();
        assert_eq!(p.big_ctx().pow(g, p.h1() * 3), p.gamma1());
        assert_eq!(p.big_ctx().pow(g, p.h2() * 511), p.gamma2());
        assert_eq!(p.summary().gamma_minpoly_big.len(), 5); // degree-18 minpoly
    }

    #[test]
    fn plan_rejects_bad_pairs() {
        let p3 = canonical_for(3);
        let p15 = canonical_for(15);
        assert!(matches!(plan(&p15, &p3), Err(Error::NotCoprime(15, 3))));
        let fake = DecodingPolynomial::new(
            1,
            2,
            0b111,
            vec![Term { coef: 1, exp: 0 }],
        )
        .unwrap();
        assert!(matches!(
            plan(&p3, &fake),
            Err(Error::TrivialCompositionModulus { m1: 3, m2: 1 })
        ));
    }

    #[test]
    fn composed_1533_polynomial_is_frozen() {
        let p1 = shipped_m511();
        let p2 = canonical_for(3);
        let pl = plan(&p1, &p2).unwrap();
        let c = compose_polynomials(&pl, &p1, &p2).unwrap();
        assert_eq!(c.m(), 1533);
        assert_eq!(c.t1(), 18);
        assert_eq!(c.k(), 6); // k1·k2 = 3·2 with no merging
        let exps: Vec<u64> = c.terms().iter().map(|t| t.exp).collect();
        assert_eq!(exps, vec![0, 563, 725, 1022, 1074, 1236]);
        // and it really decodes S_1533
        let modulus = Modulus::factorize(1533).unwrap();
        let s = canonical_set(&modulus);
        assert_eq!(s.sorted(), &[1, 147, 511, 658, 876, 1023, 1387]);
        let verdict = verify_decoding(&c, s.sorted(), pl.gamma(), pl.big_ctx()).unwrap();
        assert!(verdict.is_valid());
    }

    #[test]
    fn composed_polynomial_roundtrips_through_json() {
        let p1 = shipped_m511();
        let p2 = canonical_for(3);
        let pl = plan(&p1, &p2).unwrap();
        let c = compose_polynomials(&pl, &p1, &p2).unwrap();
        let back = DecodingPolynomial::from_json(&c.to_json()).unwrap();
        assert_eq!(c, back);
        // native field reconstruction agrees with the plan's field
        let (_ctx, gamma) = back.native_ctx().unwrap();
        assert_eq!(gamma.m(), 1533);
    }

    #[test]
    fn compose_3_times_5_gives_a_15_polynomial() {
        let p1 = canonical_for(3);
        let p2 = canonical_for(5);
        let pl = plan(&p1, &p2).unwrap();
        assert_eq!(pl.t(), 4); // lcm(2, 4)
        let c = compose_polynomials(&pl, &p1, &p2).unwrap();
        assert_eq!(c.m(), 15);
        assert!(c.k() <= 4);
    }

    #[test]
    fn trivial_polynomials_compose_to_one() {
        // empty-S polynomials are the constant 1; their product is too
        let ctx3 = build_field(2, None).unwrap();
        let mod3 = Modulus::factorize(3).unwrap();
        let g3 = find_order_m_element(&ctx3, &mod3).unwrap();
        let triv3 = canonical_polynomial(&[], &g3, &ctx3).unwrap();
        let ctx5 = build_field(4, None).unwrap();
        let mod5 = Modulus::factorize(5).unwrap();
        let g5 = find_order_m_element(&ctx5, &mod5).unwrap();
        let triv5 = canonical_polynomial(&[], &g5, &ctx5).unwrap();
        let pl = plan(&triv3, &triv5).unwrap();
        let c = compose_terms(&pl, &triv3, &triv5).unwrap();
        assert_eq!(c.k(), 1);
        assert_eq!(c.terms()[0].exp, 0);
        let coefs = c.instantiate(pl.big_ctx(), pl.gamma().element()).unwrap();
        assert_eq!(coefs, vec![Fe::ONE]);
    }

    #[test]
    fn composed_code_decodes_exactly() {
        let p1 = shipped_m511();
        let p2 = canonical_for(3);
        let pl = plan(&p1, &p2).unwrap();
        let family = MatchingFamily::new(
            1533,
            2,
            vec![ZVector::new(1533, &[21, 567]), ZVector::new(1533, &[1281, 672])],
        )
        .unwrap();
        let code = compose_codes(&pl, &p1, &p2, family).unwrap();
        assert_eq!((code.m(), code.n(), code.k()), (1533, 2, 6));
        assert_eq!(code.len(), 2_350_089);
        // spot-check exact decoding of a random-looking message at a few v
        let x = [Fe(0x2a1b7), Fe(0x1f03c)];
        let w = code.encode(&x, Parallelism::Auto).unwrap();
        for rank in [0u64, 1, 1533, 77_777, 2_350_088] {
            let v = code.deindex(rank).unwrap();
            for i in 0..2 {
                let q = code.decode_queries(i, &v).unwrap();
                let answers: Vec<Fe> = q
                    .positions
                    .iter()
                    .map(|p| w.get(code.index(p).unwrap()).unwrap())
                    .collect();
                assert_eq!(code.decode_combine(i, &v, &answers).unwrap(), x[i]);
            }
        }
    }
}
