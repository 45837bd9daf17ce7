//! S-decoding polynomials.
//!
//! A polynomial P over GF(2^t) is S-decoding for an order-m element gamma if
//! P(1) = 1 and P(gamma^s) = 0 for every s ∈ S. Its monomial count is the
//! query count of the decoder built from it, so the search below looks for
//! polynomials with as few monomials as possible and can certify that none
//! exists below a given count.
//!
//! Coefficients are stored gamma-relative: a bit-vector c encodes
//! Σ_j c_j gamma^j with j < t1 = deg(minpoly(gamma)). That representation
//! survives moving gamma into a bigger field, which is what makes composed
//! polynomials (see [`crate::compose`]) portable.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, Fe, FieldCtx, OrderMElement};
use crate::par::{self, Parallelism};
use crate::zmod::{canonical_set, Modulus};

/// One monomial: gamma-relative coefficient bits and an exponent in [0, m).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub coef: u64,
    pub exp: u64,
}

/// An S-decoding polynomial in canonical form: terms sorted by ascending
/// exponent, exponents reduced mod m, no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct DecodingPolynomial {
    m: u64,
    t1: u32,
    gamma_minpoly: u64,
    terms: Vec<Term>,
}

impl DecodingPolynomial {
    /// Canonicalize `terms` (reduce exponents mod m, merge like terms by
    /// xor, drop zeros, sort) and validate the result.
    pub fn new(m: u64, t1: u32, gamma_minpoly: u64, terms: Vec<Term>) -> Result<DecodingPolynomial> {
        if gf2::poly_degree(gamma_minpoly) != t1 as i32 {
            return Err(Error::NotIrreducible(gamma_minpoly));
        }
        let terms = canonicalize(m, terms)?;
        for t in &terms {
            if t1 < 64 && t.coef >> t1 != 0 {
                return Err(Error::CoefficientTooWide { coef: t.coef, t1 });
            }
        }
        Ok(DecodingPolynomial {
            m,
            t1,
            gamma_minpoly,
            terms,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// Degree of gamma's minimal polynomial; coefficients fit in t1 bits.
    pub fn t1(&self) -> u32 {
        self.t1
    }

    pub fn gamma_minpoly(&self) -> u64 {
        self.gamma_minpoly
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Monomial count = query count of the derived decoder.
    pub fn k(&self) -> usize {
        self.terms.len()
    }

    /// Resolve the coefficients against a concrete root of gamma_minpoly
    /// living in `ctx`.
    pub fn instantiate(&self, ctx: &FieldCtx, root: Fe) -> Result<Vec<Fe>> {
        if !ctx.eval_f2poly(self.gamma_minpoly, root).is_zero() {
            return Err(Error::NotAGammaRoot(self.gamma_minpoly));
        }
        let pows = ctx.power_table(root, self.t1 as usize);
        Ok(self
            .terms
            .iter()
            .map(|t| ctx.gamma_combine(&pows, t.coef))
            .collect())
    }

    /// Build the polynomial's native field F_2[x]/(gamma_minpoly) with
    /// gamma = x, verified to have order m.
    pub fn native_ctx(&self) -> Result<(FieldCtx, OrderMElement)> {
        let ctx = FieldCtx::new(self.t1, Some(self.gamma_minpoly))?;
        let modulus = Modulus::factorize(self.m)?;
        let x = ctx.element_from_bits(0b10)?;
        let gamma = OrderMElement::verified(&ctx, x, &modulus)?;
        Ok((ctx, gamma))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polynomial serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<DecodingPolynomial> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read_file(path: &Path) -> Result<DecodingPolynomial> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_json() + "\n")?)
    }
}

/// Reduce exponents mod m, merge equal exponents by coefficient xor, drop
/// zero coefficients, sort ascending. Errors if nothing survives.
pub fn canonicalize(m: u64, terms: Vec<Term>) -> Result<Vec<Term>> {
    let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
    for t in terms {
        let exp = t.exp % m;
        match merged.iter_mut().find(|u| u.exp == exp) {
            Some(u) => u.coef ^= t.coef,
            None => merged.push(Term { coef: t.coef, exp }),
        }
    }
    merged.retain(|t| t.coef != 0);
    if merged.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    merged.sort_by_key(|t| t.exp);
    Ok(merged)
}

// ---------------------------------------------------------------------------
// JSON wire format
// ---------------------------------------------------------------------------

pub(crate) fn to_hex(v: u64) -> String {
    format!("{v:x}")
}

pub(crate) fn parse_hex(s: &str) -> Result<u64> {
    if s.is_empty() || s.len() > 16 {
        return Err(Error::BadHex(s.to_string()));
    }
    u64::from_str_radix(s, 16).map_err(|_| Error::BadHex(s.to_string()))
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    coef: String,
    exp: u64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    m: u64,
    t1: u32,
    gamma_minpoly: String,
    terms: Vec<TermJson>,
}

impl From<DecodingPolynomial> for PolyJson {
    fn from(p: DecodingPolynomial) -> PolyJson {
        PolyJson {
            m: p.m,
            t1: p.t1,
            gamma_minpoly: to_hex(p.gamma_minpoly),
            terms: p
                .terms
                .iter()
                .map(|t| TermJson {
                    coef: to_hex(t.coef),
                    exp: t.exp,
                })
                .collect(),
        }
    }
}

impl TryFrom<PolyJson> for DecodingPolynomial {
    type Error = Error;
    fn try_from(j: PolyJson) -> Result<DecodingPolynomial> {
        let terms = j
            .terms
            .iter()
            .map(|t| {
                Ok(Term {
                    coef: parse_hex(&t.coef)?,
                    exp: t.exp,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        DecodingPolynomial::new(j.m, j.t1, parse_hex(&j.gamma_minpoly)?, terms)
    }
}

// ---------------------------------------------------------------------------
// verification
// ---------------------------------------------------------------------------

/// Outcome of checking the two decoding conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PolyVerdict {
    Valid,
    /// P(1) ≠ 1; carries the actual value's bits.
    ViolationAtOne { got: u64 },
    /// P(gamma^s) ≠ 0 for this s.
    ViolationAtS { s: u64, got: u64 },
}

impl PolyVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, PolyVerdict::Valid)
    }
}

/// Largest m for which gamma-power evaluation goes through a full table.
const POW_TABLE_CAP: u64 = 1 << 20;

struct Evaluator<'a> {
    ctx: &'a FieldCtx,
    m: u64,
    coefs: Vec<Fe>,
    exps: Vec<u64>,
    gamma: Fe,
    table: Option<Vec<Fe>>,
}

impl<'a> Evaluator<'a> {
    fn new(ctx: &'a FieldCtx, poly: &DecodingPolynomial, gamma: Fe) -> Result<Evaluator<'a>> {
        let coefs = poly.instantiate(ctx, gamma)?;
        let exps: Vec<u64> = poly.terms.iter().map(|t| t.exp).collect();
        let table = (poly.m <= POW_TABLE_CAP).then(|| ctx.power_table(gamma, poly.m as usize));
        Ok(Evaluator {
            ctx,
            m: poly.m,
            coefs,
            exps,
            gamma,
            table,
        })
    }

    fn gamma_pow(&self, e: u64) -> Fe {
        match &self.table {
            Some(t) => t[(e % self.m) as usize],
            None => self.ctx.pow(self.gamma, e % self.m),
        }
    }

    /// P(gamma^s).
    fn at(&self, s: u64) -> Fe {
        let mut acc = Fe::ZERO;
        for (c, &e) in self.coefs.iter().zip(&self.exps) {
            acc += self.ctx.mul(*c, self.gamma_pow(s * e % self.m));
        }
        acc
    }
}

/// Check P(1) = 1 and P(gamma^s) = 0 for every s in `s_list`.
pub fn verify_decoding(
    poly: &DecodingPolynomial,
    s_list: &[u64],
    gamma: &OrderMElement,
    ctx: &FieldCtx,
) -> Result<PolyVerdict> {
    if gamma.m() != poly.m {
        return Err(Error::GammaModulusMismatch {
            gamma_m: gamma.m(),
            poly_m: poly.m,
        });
    }
    let eval = Evaluator::new(ctx, poly, gamma.element())?;
    let at_one = eval.at(0);
    if at_one != Fe::ONE {
        return Ok(PolyVerdict::ViolationAtOne { got: at_one.bits() });
    }
    for &s in s_list {
        let v = eval.at(s);
        if !v.is_zero() {
            return Ok(PolyVerdict::ViolationAtS { s, got: v.bits() });
        }
    }
    Ok(PolyVerdict::Valid)
}

// ---------------------------------------------------------------------------
// canonical construction
// ---------------------------------------------------------------------------

/// The (|S|+1)-monomial polynomial Π_{s∈S}(x - gamma^s) normalized to take
/// value 1 at x = 1. Always exists when 0 ∉ S.
pub fn canonical_polynomial(
    s_list: &[u64],
    gamma: &OrderMElement,
    ctx: &FieldCtx,
) -> Result<DecodingPolynomial> {
    let m = gamma.m();
    if s_list.iter().any(|&s| s % m == 0) {
        return Err(Error::ZeroInS);
    }
    let g = gamma.element();
    let mut coeffs: Vec<Fe> = vec![Fe::ONE];
    for &s in s_list {
        let root = ctx.pow(g, s % m);
        let mut next = vec![Fe::ZERO; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] += ctx.mul(c, root);
        }
        coeffs = next;
    }
    // normalize so P(1) = 1; the value at 1 is nonzero because no root is 1
    let at_one = coeffs.iter().fold(Fe::ZERO, |a, &c| a + c);
    let inv = ctx.inv(at_one)?;
    let gamma_minpoly = ctx.minimal_polynomial(g);
    let t1 = gf2::poly_degree(gamma_minpoly) as u32;
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate() {
        let c = ctx.mul(c, inv);
        if !c.is_zero() {
            terms.push(Term {
                coef: ctx.gamma_relative(g, t1, c)?,
                exp: i as u64,
            });
        }
    }
    let poly = DecodingPolynomial::new(m, t1, gamma_minpoly, terms)?;
    debug_assert!(verify_decoding(&poly, s_list, gamma, ctx)?.is_valid());
    Ok(poly)
}

// ---------------------------------------------------------------------------
// exhaustive minimal-monomial search
// ---------------------------------------------------------------------------

/// Default ceiling on the estimated field-operation count of a search.
pub const DEFAULT_SEARCH_CEILING: u128 = 1 << 34;

/// Proof that the search space was exhausted without a hit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonexistenceCert {
    pub m: u64,
    pub t1: u32,
    pub max_k: usize,
    pub subsets_checked: u64,
    #[serde(with = "u128_dec")]
    pub work_estimate: u128,
}

/// u128 as a decimal string: JSON numbers (and serde's internal buffering
/// for tagged enums) cannot carry the full range.
mod u128_dec {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<u128, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(DecodingPolynomial),
    Nonexistent(NonexistenceCert),
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Estimated field operations: Gaussian elimination on an
/// (|S|+1) × k' system per subset, with a log factor when the modulus is too
/// large for a gamma-power table.
pub fn search_work_estimate(m: u64, s_len: usize, max_k: usize) -> u128 {
    let per_log = if m <= POW_TABLE_CAP { 1 } else { 40 };
    (1..=max_k as u64)
        .map(|k| {
            binomial(m, k)
                .saturating_mul((s_len as u128 + 1) * (k * k) as u128)
                .saturating_mul(per_log)
        })
        .fold(0u128, u128::saturating_add)
}

/// Subset enumeration in colexicographic order: the successor bumps the
/// lowest slot that has room and resets everything below it.
fn colex_next(b: &mut [u64], m: u64) -> bool {
    let k = b.len();
    for i in 0..k {
        let limit = if i + 1 < k { b[i + 1] } else { m };
        if b[i] + 1 < limit {
            b[i] += 1;
            for (j, slot) in b.iter_mut().enumerate().take(i) {
                *slot = j as u64;
            }
            return true;
        }
    }
    false
}

/// Inverse of the colex rank Σ C(b_i, i+1).
fn colex_unrank(mut rank: u64, k: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; k];
    let mut hi = m;
    for i in (1..=k).rev() {
        let mut b = hi - 1;
        while binomial(b, i as u64) > rank as u128 {
            b -= 1;
        }
        out[i - 1] = b;
        rank -= binomial(b, i as u64) as u64;
        hi = b;
    }
    out
}

/// Per-subset outcome ordered by colex rank so parallel merging is
/// deterministic.
enum ChunkOut {
    Nothing,
    Found(u64, Vec<Term>),
    Fail(u64, Error),
}

impl ChunkOut {
    fn rank(&self) -> u64 {
        match self {
            ChunkOut::Nothing => u64::MAX,
            ChunkOut::Found(r, _) | ChunkOut::Fail(r, _) => *r,
        }
    }

    fn merge(self, other: ChunkOut) -> ChunkOut {
        if self.rank() <= other.rank() {
            self
        } else {
            other
        }
    }
}

struct SubsetSolver<'a> {
    ctx: &'a FieldCtx,
    m: u64,
    t1: u32,
    gamma: Fe,
    gamma_pows: Option<Vec<Fe>>,
    s_list: &'a [u64],
}

/// Cap on enumerating the affine solution space of a rank-deficient subset.
const SOLUTION_SPACE_CAP: u128 = 1 << 24;

impl<'a> SubsetSolver<'a> {
    fn gamma_pow(&self, e: u64) -> Fe {
        match &self.gamma_pows {
            Some(t) => t[(e % self.m) as usize],
            None => self.ctx.pow(self.gamma, e % self.m),
        }
    }

    /// All valid coefficient tuples for exponent set `b` form an affine
    /// subspace; return the tuple that the naive nested enumeration
    /// (coefficients in integer order of gamma-relative encodings) would
    /// find first, i.e. the lexicographically smallest all-nonzero solution.
    fn solve(&self, b: &[u64]) -> Result<Option<Vec<Term>>> {
        let ctx = self.ctx;
        let k = b.len();
        // rows: P(1) = 1 plus P(gamma^s) = 0 for each s
        let mut rows: Vec<(Vec<Fe>, Fe)> = Vec::with_capacity(self.s_list.len() + 1);
        rows.push((vec![Fe::ONE; k], Fe::ONE));
        for &s in self.s_list {
            let row = b.iter().map(|&e| self.gamma_pow(s * e % self.m)).collect();
            rows.push((row, Fe::ZERO));
        }
        // Gaussian elimination to reduced row echelon form
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut next_row = 0usize;
        for col in 0..k {
            let Some(pr) = (next_row..rows.len()).find(|&r| !rows[r].0[col].is_zero()) else {
                continue;
            };
            rows.swap(next_row, pr);
            let inv = ctx.inv(rows[next_row].0[col])?;
            for v in &mut rows[next_row].0 {
                *v = ctx.mul(*v, inv);
            }
            rows[next_row].1 = ctx.mul(rows[next_row].1, inv);
            let pivot = rows[next_row].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next_row && !row.0[col].is_zero() {
                    let f = row.0[col];
                    for (v, p) in row.0.iter_mut().zip(&pivot.0) {
                        *v += ctx.mul(f, *p);
                    }
                    row.1 += ctx.mul(f, pivot.1);
                }
            }
            pivot_cols.push(col);
            next_row += 1;
        }
        // consistency: a zero row with nonzero rhs kills the subset
        if rows[next_row..].iter().any(|(r, rhs)| r.iter().all(|v| v.is_zero()) && !rhs.is_zero()) {
            return Ok(None);
        }
        let free_cols: Vec<usize> = (0..k).filter(|c| !pivot_cols.contains(c)).collect();

        let tuple_from = |free_vals: &[Fe]| -> Vec<Fe> {
            let mut out = vec![Fe::ZERO; k];
            for (fc, fv) in free_cols.iter().zip(free_vals) {
                out[*fc] = *fv;
            }
            for (pi, &pc) in pivot_cols.iter().enumerate() {
                let (row, rhs) = &rows[pi];
                let mut v = *rhs;
                for (fc, fv) in free_cols.iter().zip(free_vals) {
                    v += ctx.mul(row[*fc], *fv);
                }
                out[pc] = v;
            }
            out
        };

        // encode a full tuple gamma-relative; any coefficient outside the
        // span of gamma powers cannot be represented (or used) and is skipped
        let encode = |tuple: &[Fe]| -> Option<Vec<u64>> {
            if tuple.iter().any(|v| v.is_zero()) {
                return None;
            }
            tuple
                .iter()
                .map(|&v| ctx.gamma_relative(self.gamma, self.t1, v).ok())
                .collect()
        };

        let best = if free_cols.is_empty() {
            encode(&tuple_from(&[]))
        } else {
            let span: u128 = 1u128 << self.t1;
            let total = span.pow(free_cols.len() as u32);
            if total > SOLUTION_SPACE_CAP {
                return Err(Error::SolutionSpaceTooLarge { size: total });
            }
            let pows = ctx.power_table(self.gamma, self.t1 as usize);
            let mut best: Option<Vec<u64>> = None;
            let mut assignment = vec![0u64; free_cols.len()];
            loop {
                let free_vals: Vec<Fe> =
                    assignment.iter().map(|&bits| ctx.gamma_combine(&pows, bits)).collect();
                if let Some(enc) = encode(&tuple_from(&free_vals)) {
                    if best.as_ref().is_none_or(|b| enc < *b) {
                        best = Some(enc);
                    }
                }
                // odometer over encodings
                let mut i = 0;
                loop {
                    if i == assignment.len() {
                        break;
                    }
                    assignment[i] += 1;
                    if assignment[i] < span as u64 {
                        break;
                    }
                    assignment[i] = 0;
                    i += 1;
                }
                if i == assignment.len() {
                    break;
                }
            }
            best
        };

        Ok(best.map(|encs| {
            encs.iter()
                .zip(b)
                .map(|(&coef, &exp)| Term { coef, exp })
                .collect()
        }))
    }
}

/// Find a valid polynomial with at most `max_k` monomials, preferring fewer
/// monomials and, within a monomial count, the first hit in deterministic
/// order (colex exponent subsets, coefficients by gamma-relative encoding).
/// Certifies nonexistence when the whole space is clean.
pub fn exhaustive_search(
    s_list: &[u64],
    gamma: &OrderMElement,
    ctx: &FieldCtx,
    max_k: usize,
    ceiling: Option<u128>,
    par: Parallelism,
) -> Result<SearchOutcome> {
    let m = gamma.m();
    let ceiling = ceiling.unwrap_or(DEFAULT_SEARCH_CEILING);
    let estimate = search_work_estimate(m, s_list.len(), max_k);
    if estimate > ceiling {
        return Err(Error::SearchSpaceTooLarge { estimate, ceiling });
    }
    let gamma_minpoly = ctx.minimal_polynomial(gamma.element());
    let t1 = gf2::poly_degree(gamma_minpoly) as u32;
    let solver = SubsetSolver {
        ctx,
        m,
        t1,
        gamma: gamma.element(),
        gamma_pows: (m <= POW_TABLE_CAP).then(|| ctx.power_table(gamma.element(), m as usize)),
        s_list,
    };

    let mut subsets_checked = 0u64;
    for k in 1..=max_k {
        let total_wide = binomial(m, k as u64);
        if total_wide > u64::MAX as u128 {
            return Err(Error::SearchSpaceTooLarge { estimate, ceiling });
        }
        let total = total_wide as u64;
        subsets_checked += total;
        const SUBSET_CHUNK: u64 = 1 << 12;
        let nchunks = total.div_ceil(SUBSET_CHUNK);
        let cutoff = AtomicU64::new(u64::MAX);
        let hit = par::map_reduce(
            par,
            nchunks,
            |chunk_range| {
                let mut out = ChunkOut::Nothing;
                for ci in chunk_range {
                    let start = ci * SUBSET_CHUNK;
                    if start >= cutoff.load(Ordering::Relaxed) {
                        continue;
                    }
                    let end = (start + SUBSET_CHUNK).min(total);
                    let mut b = colex_unrank(start, k, m);
                    for rank in start..end {
                        match solver.solve(&b) {
                            Ok(Some(terms)) => {
                                cutoff.fetch_min(rank, Ordering::Relaxed);
                                out = out.merge(ChunkOut::Found(rank, terms));
                                break;
                            }
                            Ok(None) => {}
                            Err(e) => {
                                out = out.merge(ChunkOut::Fail(rank, e));
                                break;
                            }
                        }
                        colex_next(&mut b, m);
                    }
                    if matches!(out, ChunkOut::Found(..) | ChunkOut::Fail(..)) {
                        break;
                    }
                }
                out
            },
            || ChunkOut::Nothing,
            ChunkOut::merge,
        );
        match hit {
            ChunkOut::Found(_, terms) => {
                let poly = DecodingPolynomial::new(m, t1, gamma_minpoly, terms)?;
                debug_assert!(verify_decoding(&poly, s_list, gamma, ctx)?.is_valid());
                return Ok(SearchOutcome::Found(poly));
            }
            ChunkOut::Fail(_, e) => return Err(e),
            ChunkOut::Nothing => {}
        }
    }
    Ok(SearchOutcome::Nonexistent(NonexistenceCert {
        m,
        t1,
        max_k,
        subsets_checked,
        work_estimate: estimate,
    }))
}

// ---------------------------------------------------------------------------
// batch driver
// ---------------------------------------------------------------------------

/// Per-modulus verdict of a batch search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum HuntVerdict {
    Found {
        polynomial: DecodingPolynomial,
    },
    Nonexistent {
        certificate: NonexistenceCert,
    },
    Refused {
        #[serde(with = "u128_dec")]
        estimate: u128,
        #[serde(with = "u128_dec")]
        ceiling: u128,
    },
    Unsupported {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HuntEntry {
    pub m: u64,
    #[serde(flatten)]
    pub verdict: HuntVerdict,
}

/// Run the minimal-monomial search over a list of candidate moduli,
/// skipping entries already present in the checkpoint file and rewriting it
/// after every modulus.
pub fn hunt(
    candidates: &[u64],
    max_k: usize,
    ceiling: Option<u128>,
    checkpoint: Option<&Path>,
    par: Parallelism,
) -> Result<Vec<HuntEntry>> {
    let mut done: Vec<HuntEntry> = match checkpoint {
        Some(p) if p.exists() => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        _ => Vec::new(),
    };
    for &m in candidates {
        if done.iter().any(|e| e.m == m) {
            continue;
        }
        let verdict = hunt_one(m, max_k, ceiling, par);
        done.push(HuntEntry { m, verdict });
        if let Some(p) = checkpoint {
            std::fs::write(p, serde_json::to_string_pretty(&done)?)?;
        }
    }
    Ok(done)
}

fn hunt_one(m: u64, max_k: usize, ceiling: Option<u128>, par: Parallelism) -> HuntVerdict {
    let unsupported = |e: &Error| HuntVerdict::Unsupported { reason: e.to_string() };
    let modulus = match Modulus::factorize(m) {
        Ok(md) => md,
        Err(e) => return unsupported(&e),
    };
    let t = gf2::mult_order_of_2(&modulus);
    let ctx = match FieldCtx::new(t as u32, None) {
        Ok(c) => c,
        Err(e) => return unsupported(&e),
    };
    let gamma = match gf2::find_order_m_element(&ctx, &modulus) {
        Ok(g) => g,
        Err(e) => return unsupported(&e),
    };
    let s = canonical_set(&modulus);
    match exhaustive_search(s.sorted(), &gamma, &ctx, max_k, ceiling, par) {
        Ok(SearchOutcome::Found(polynomial)) => HuntVerdict::Found { polynomial },
        Ok(SearchOutcome::Nonexistent(certificate)) => HuntVerdict::Nonexistent { certificate },
        Err(Error::SearchSpaceTooLarge { estimate, ceiling }) => {
            HuntVerdict::Refused { estimate, ceiling }
        }
        Err(e) => unsupported(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{build_field, find_order_m_element};

    fn setup(m: u64) -> (Modulus, FieldCtx, OrderMElement, Vec<u64>) {
        let modulus = Modulus::factorize(m).unwrap();
        let t = gf2::mult_order_of_2(&modulus) as u32;
        let ctx = build_field(t, None).unwrap();
        let gamma = find_order_m_element(&ctx, &modulus).unwrap();
        let s = canonical_set(&modulus).sorted().to_vec();
        (modulus, ctx, gamma, s)
    }

    #[test]
    fn bundled_m511_polynomial_is_valid() {
        let poly = DecodingPolynomial::from_json(crate::M511_POLY_JSON).unwrap();
        assert_eq!(poly.m(), 511);
        assert_eq!(poly.t1(), 9);
        assert_eq!(poly.gamma_minpoly(), 0x211);
        assert_eq!(poly.k(), 3);
        assert_eq!(
            poly.terms(),
            &[
                Term { coef: 0x103, exp: 0 },
                Term { coef: 0x14a, exp: 12 },
                Term { coef: 0x48, exp: 65 },
            ]
        );
        let (ctx, gamma) = poly.native_ctx().unwrap();
        let verdict = verify_decoding(&poly, &[1, 147, 365], &gamma, &ctx).unwrap();
        assert!(verdict.is_valid());
    }

    #[test]
    fn json_roundtrip() {
        let poly = DecodingPolynomial::from_json(crate::M511_POLY_JSON).unwrap();
        let again = DecodingPolynomial::from_json(&poly.to_json()).unwrap();
        assert_eq!(poly, again);
    }

    #[test]
    fn canonical_m3_matches_hand_computation() {
        let (_, ctx, gamma, s) = setup(3);
        let poly = canonical_polynomial(&s, &gamma, &ctx).unwrap();
        // (x - g)/(1 - g) = g·x + g^2 over F_4
        assert_eq!(
            poly.terms(),
            &[Term { coef: 0b11, exp: 0 }, Term { coef: 0b10, exp: 1 }]
        );
        assert!(verify_decoding(&poly, &s, &gamma, &ctx).unwrap().is_valid());
    }

    #[test]
    fn canonical_m15_matches_hand_computation() {
        let (_, ctx, gamma, s) = setup(15);
        let poly = canonical_polynomial(&s, &gamma, &ctx).unwrap();
        assert_eq!(poly.k(), 4);
        assert_eq!(
            poly.terms(),
            &[
                Term { coef: 0x7, exp: 0 },
                Term { coef: 0x8, exp: 1 },
                Term { coef: 0xb, exp: 2 },
                Term { coef: 0x5, exp: 3 },
            ]
        );
        assert!(verify_decoding(&poly, &s, &gamma, &ctx).unwrap().is_valid());
    }

    #[test]
    fn canonical_m511_has_four_monomials() {
        let (_, ctx, gamma, s) = setup(511);
        let poly = canonical_polynomial(&s, &gamma, &ctx).unwrap();
        assert_eq!(poly.k(), 4);
        assert!(verify_decoding(&poly, &s, &gamma, &ctx).unwrap().is_valid());
    }

    #[test]
    fn canonical_rejects_zero_in_s() {
        let (_, ctx, gamma, _) = setup(15);
        assert!(matches!(
            canonical_polynomial(&[0, 1], &gamma, &ctx),
            Err(Error::ZeroInS)
        ));
    }

    #[test]
    fn verify_detects_violations() {
        let (_, ctx, gamma, s) = setup(15);
        let poly = canonical_polynomial(&s, &gamma, &ctx).unwrap();
        // tamper with the constant coefficient
        let mut terms = poly.terms().to_vec();
        terms[0].coef ^= 1;
        let bad = DecodingPolynomial::new(15, 4, poly.gamma_minpoly(), terms).unwrap();
        assert!(!verify_decoding(&bad, &s, &gamma, &ctx).unwrap().is_valid());
    }

    #[test]
    fn verify_rejects_mismatched_gamma() {
        let (_, ctx, gamma, _) = setup(15);
        let poly = DecodingPolynomial::from_json(crate::M511_POLY_JSON).unwrap();
        assert!(matches!(
            verify_decoding(&poly, &[1], &gamma, &ctx),
            Err(Error::GammaModulusMismatch { gamma_m: 15, poly_m: 511 })
        ));
    }

    #[test]
    fn canonicalize_merges_and_reduces() {
        let terms = vec![
            Term { coef: 0b01, exp: 5 },
            Term { coef: 0b11, exp: 20 }, // 20 ≡ 5 mod 15
            Term { coef: 0b10, exp: 1 },
        ];
        let out = canonicalize(15, terms).unwrap();
        assert_eq!(
            out,
            vec![Term { coef: 0b10, exp: 1 }, Term { coef: 0b10, exp: 5 }]
        );
        // full cancellation errors
        let gone = vec![Term { coef: 1, exp: 2 }, Term { coef: 1, exp: 17 }];
        assert!(matches!(canonicalize(15, gone), Err(Error::EmptyPolynomial)));
    }

    #[test]
    fn colex_enumeration_is_consistent() {
        let m = 7u64;
        let k = 3usize;
        let mut b: Vec<u64> = (0..k as u64).collect();
        let mut rank = 0u64;
        loop {
            assert_eq!(colex_unrank(rank, k, m), b, "rank {rank}");
            rank += 1;
            if !colex_next(&mut b, m) {
                break;
            }
        }
        assert_eq!(rank as u128, binomial(m, k as u64));
    }

    #[test]
    fn search_m3_finds_two_monomials() {
        let (_, ctx, gamma, s) = setup(3);
        let out = exhaustive_search(&s, &gamma, &ctx, 2, None, Parallelism::Sequential).unwrap();
        let SearchOutcome::Found(poly) = out else {
            panic!("expected a polynomial");
        };
        // first colex subset {0,1} already has the unique solution g^2 + g·x
        assert_eq!(
            poly.terms(),
            &[Term { coef: 0b11, exp: 0 }, Term { coef: 0b10, exp: 1 }]
        );
    }

    #[test]
    fn search_m15_certifies_k3_nonexistence() {
        let (_, ctx, gamma, s) = setup(15);
        let out = exhaustive_search(&s, &gamma, &ctx, 3, None, Parallelism::Sequential).unwrap();
        let SearchOutcome::Nonexistent(cert) = out else {
            panic!("no ≤3-monomial polynomial exists for m = 15");
        };
        // C(15,1) + C(15,2) + C(15,3) = 15 + 105 + 455
        assert_eq!(cert.subsets_checked, 575);
        assert_eq!(cert.m, 15);
        assert_eq!(cert.max_k, 3);
    }

    #[test]
    fn search_m15_k4_recovers_canonical() {
        let (_, ctx, gamma, s) = setup(15);
        let out = exhaustive_search(&s, &gamma, &ctx, 4, None, Parallelism::Sequential).unwrap();
        let SearchOutcome::Found(poly) = out else {
            panic!("the canonical polynomial exists at k = 4");
        };
        // {0,1,2,3} is the first colex 4-subset and its system is uniquely
        // solvable, so the search lands exactly on the canonical polynomial
        let canonical = canonical_polynomial(&s, &gamma, &ctx).unwrap();
        assert_eq!(poly, canonical);
    }

    #[test]
    fn search_m511_certifies_k2_nonexistence() {
        let (_, ctx, gamma, s) = setup(511);
        let out = exhaustive_search(&s, &gamma, &ctx, 2, None, Parallelism::Auto).unwrap();
        assert!(matches!(out, SearchOutcome::Nonexistent(_)));
    }

    #[test]
    fn search_is_deterministic_across_parallelism() {
        let (_, ctx, gamma, s) = setup(15);
        let a = exhaustive_search(&s, &gamma, &ctx, 4, None, Parallelism::Sequential).unwrap();
        let b = exhaustive_search(&s, &gamma, &ctx, 4, None, Parallelism::Auto).unwrap();
        let c = exhaustive_search(&s, &gamma, &ctx, 4, None, Parallelism::Threads(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn search_refuses_over_ceiling() {
        let (_, ctx, gamma, s) = setup(511);
        let err = exhaustive_search(&s, &gamma, &ctx, 3, Some(1000), Parallelism::Sequential);
        assert!(matches!(err, Err(Error::SearchSpaceTooLarge { .. })));
    }

    #[test]
    fn search_m511_finds_three_monomials() {
        let (_, ctx, gamma, s) = setup(511);
        let out = exhaustive_search(&s, &gamma, &ctx, 3, None, Parallelism::Auto).unwrap();
        let SearchOutcome::Found(poly) = out else {
            panic!("a 3-monomial polynomial exists for m = 511");
        };
        assert_eq!(poly.k(), 3);
        assert!(verify_decoding(&poly, &s, &gamma, &ctx).unwrap().is_valid());
    }

    #[test]
    fn hunt_batch_with_checkpoint() {
        let dir = std::env::temp_dir().join(format!("mvldc-hunt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let ckpt = dir.join("hunt.json");
        let _ = std::fs::remove_file(&ckpt);
        let entries = hunt(&[15, 9], 3, None, Some(&ckpt), Parallelism::Sequential).unwrap();
        assert_eq!(entries.len(), 2);
        assert!(matches!(entries[0].verdict, HuntVerdict::Nonexistent { .. }));
        // m = 9 is a prime power: S = {1}, and a 2-monomial polynomial exists
        assert!(matches!(entries[1].verdict, HuntVerdict::Found { .. }));
        // a second run loads the checkpoint and returns the same entries
        let again = hunt(&[15, 9], 3, None, Some(&ckpt), Parallelism::Sequential).unwrap();
        assert_eq!(entries, again);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
