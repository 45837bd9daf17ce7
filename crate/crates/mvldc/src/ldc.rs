//! The locally decodable code.
//!
//! A [`Code`] is assembled from a matching-vector family (message length n,
//! codeword length N = m^h) and an S-decoding polynomial with k monomials
//! (query count k). The encoder maps x ∈ F_{2^t}^n to the N-symbol word
//! whose entry at z ∈ Z_m^h is Σ_i x_i·γ^{⟨u_i,z⟩}; the decoder recovers one
//! x_i from k positions along the line v + b·u_i, where the b's are the
//! polynomial's exponents.
//!
//! Everything here is exact: decoder correctness and query smoothness are
//! certified by full enumeration whenever the code is small enough, and the
//! corruption machinery measures empirical failure rates against the kδ
//! union bound.

use std::io::{BufRead, BufReader, BufWriter, Write as _};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::decpoly::{parse_hex, verify_decoding, DecodingPolynomial};
use crate::error::{Error, Result};
use crate::gf2::{Fe, FieldCtx, OrderMElement};
use crate::mvfam::{verify_family, MatchingFamily};
use crate::par::{self, Parallelism};
use crate::zmod::{canonical_set, ip_raw, Modulus, ZVector};

/// Hard cap on materialized codeword length.
pub const MAX_CODEWORD_LEN: u64 = 1 << 26;

/// Largest N for which exactness checks enumerate every v ∈ Z_m^h.
pub const ENUM_GUARD: u64 = 1 << 24;

/// A locally decodable code: family + polynomial + field, with the
/// polynomial's coefficients instantiated at γ and basis codewords cached.
pub struct Code {
    family: MatchingFamily,
    poly: DecodingPolynomial,
    ctx: FieldCtx,
    gamma: OrderMElement,
    coefs: Vec<Fe>,
    exps: Vec<u64>,
    gamma_pows: Vec<Fe>,
    n_pos: u64,
    basis: Vec<OnceLock<Arc<Vec<Fe>>>>,
}

impl std::fmt::Debug for Code {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Code")
            .field("m", &self.m())
            .field("h", &self.h())
            .field("n", &self.n())
            .field("k", &self.k())
            .field("t", &self.ctx.t())
            .field("len", &self.n_pos)
            .finish()
    }
}

impl Code {
    /// Validate all cross-invariants (family matches S_m, polynomial
    /// S-decodes at γ, N within the materialization cap) and precompute the
    /// γ power table.
    pub fn new(
        family: MatchingFamily,
        poly: DecodingPolynomial,
        ctx: FieldCtx,
        gamma: OrderMElement,
    ) -> Result<Code> {
        if poly.m() != family.m() {
            return Err(Error::Format {
                what: "code parameters",
                detail: format!(
                    "family modulus {} differs from polynomial modulus {}",
                    family.m(),
                    poly.m()
                ),
            });
        }
        if gamma.m() != poly.m() {
            return Err(Error::GammaModulusMismatch {
                gamma_m: gamma.m(),
                poly_m: poly.m(),
            });
        }
        let modulus = Modulus::factorize(family.m())?;
        let fam = verify_family(&family)?;
        if !fam.is_valid() {
            return Err(Error::Format {
                what: "matching-vector family",
                detail: format!("{fam:?}"),
            });
        }
        let s = canonical_set(&modulus);
        let pv = verify_decoding(&poly, s.sorted(), &gamma, &ctx)?;
        if !pv.is_valid() {
            return Err(Error::Format {
                what: "decoding polynomial",
                detail: format!("{pv:?}"),
            });
        }
        let m = family.m();
        let n_wide = (m as u128).pow(family.h() as u32);
        if n_wide > MAX_CODEWORD_LEN as u128 {
            return Err(Error::CodeTooLarge {
                n: n_wide.min(u64::MAX as u128) as u64,
                cap: MAX_CODEWORD_LEN,
            });
        }
        let coefs = poly.instantiate(&ctx, gamma.element())?;
        let exps: Vec<u64> = poly.terms().iter().map(|t| t.exp).collect();
        let gamma_pows = ctx.power_table(gamma.element(), m as usize);
        let basis = (0..family.n()).map(|_| OnceLock::new()).collect();
        Ok(Code {
            family,
            poly,
            ctx,
            gamma,
            coefs,
            exps,
            gamma_pows,
            n_pos: n_wide as u64,
            basis,
        })
    }

    /// Build the code in the polynomial's own field F_2[x]/(gamma_minpoly)
    /// with γ = x.
    pub fn with_native_field(family: MatchingFamily, poly: DecodingPolynomial) -> Result<Code> {
        let (ctx, gamma) = poly.native_ctx()?;
        Code::new(family, poly, ctx, gamma)
    }

    pub fn m(&self) -> u64 {
        self.family.m()
    }

    pub fn h(&self) -> usize {
        self.family.h()
    }

    /// Message length.
    pub fn n(&self) -> usize {
        self.family.n()
    }

    /// Queries per decode = polynomial monomial count.
    pub fn k(&self) -> usize {
        self.coefs.len()
    }

    /// Codeword length N = m^h.
    pub fn len(&self) -> u64 {
        self.n_pos
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn family(&self) -> &MatchingFamily {
        &self.family
    }

    pub fn poly(&self) -> &DecodingPolynomial {
        &self.poly
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn gamma(&self) -> &OrderMElement {
        &self.gamma
    }

    /// Position of z in the codeword: little-endian mixed radix Σ z_j·m^j.
    pub fn index(&self, z: &ZVector) -> Result<u64> {
        if z.m() != self.m() {
            return Err(Error::VectorModulusMismatch(z.m(), self.m()));
        }
        if z.h() != self.h() {
            return Err(Error::DimensionMismatch(z.h(), self.h()));
        }
        Ok(z.rank())
    }

    /// Inverse of [`Code::index`].
    pub fn deindex(&self, position: u64) -> Result<ZVector> {
        if position >= self.n_pos {
            return Err(Error::PositionOutOfRange(position));
        }
        Ok(ZVector::from_rank(self.m(), self.h(), position))
    }

    /// The codeword of the basis message e_i, built once and cached. The
    /// sweep walks z in index order, updating ⟨u_i,z⟩ incrementally: one
    /// odometer step at digit c changes the inner product by
    /// u_i[0]+⋯+u_i[c] mod m, wraps included.
    pub fn basis(&self, i: usize, par: Parallelism) -> Result<Arc<Vec<Fe>>> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { i, n: self.n() });
        }
        Ok(Arc::clone(self.basis[i].get_or_init(|| {
            let m = self.m();
            let h = self.h();
            let u = self.family.vectors()[i].coords();
            let mut out = vec![Fe::ZERO; self.n_pos as usize];
            par::fill_chunks(par, &mut out, |start, slice| {
                let mut z = ZVector::from_rank(m, h, start).coords().to_vec();
                let mut ip = ip_raw(m, u, &z);
                for slot in slice.iter_mut() {
                    *slot = self.gamma_pows[ip as usize];
                    for c in 0..h {
                        ip += u[c];
                        if ip >= m {
                            ip -= m;
                        }
                        z[c] += 1;
                        if z[c] < m {
                            break;
                        }
                        z[c] = 0;
                    }
                }
            });
            Arc::new(out)
        })))
    }

    /// Encode x ∈ F_{2^t}^n as Σ_i x_i·C(e_i).
    pub fn encode(&self, x: &[Fe], par: Parallelism) -> Result<Codeword> {
        if x.len() != self.n() {
            return Err(Error::MessageLength {
                expected: self.n(),
                got: x.len(),
            });
        }
        for &xi in x {
            if !self.ctx.contains(xi) {
                return Err(Error::Format {
                    what: "message symbol",
                    detail: format!("{:#x} does not fit in {} bits", xi.bits(), self.ctx.t()),
                });
            }
        }
        let mut symbols = vec![Fe::ZERO; self.n_pos as usize];
        for (i, &xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let b = self.basis(i, par)?;
            par::fill_chunks(par, &mut symbols, |start, slice| {
                let base = &b[start as usize..start as usize + slice.len()];
                if xi == Fe::ONE {
                    for (o, &v) in slice.iter_mut().zip(base) {
                        *o += v;
                    }
                } else {
                    for (o, &v) in slice.iter_mut().zip(base) {
                        *o += self.ctx.mul(xi, v);
                    }
                }
            });
        }
        Ok(Codeword {
            m: self.m(),
            h: self.h(),
            t: self.ctx.t(),
            symbols,
        })
    }

    /// The k query positions v + b_j·u_i for decoding coordinate i from
    /// randomness v, in the polynomial's ascending-exponent order.
    pub fn decode_queries(&self, i: usize, v: &ZVector) -> Result<DecoderQuery> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { i, n: self.n() });
        }
        let u = &self.family.vectors()[i];
        let positions = self
            .exps
            .iter()
            .map(|&b| v.add_scaled(b % self.m(), u))
            .collect::<Result<Vec<_>>>()?;
        Ok(DecoderQuery {
            i,
            v: v.clone(),
            positions,
        })
    }

    /// Recover x_i from the k answers: γ^{−⟨u_i,v⟩}·Σ_j a_j·answers[j].
    pub fn decode_combine(&self, i: usize, v: &ZVector, answers: &[Fe]) -> Result<Fe> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { i, n: self.n() });
        }
        if answers.len() != self.k() {
            return Err(Error::AnswerCount {
                expected: self.k(),
                got: answers.len(),
            });
        }
        let d = self.family.vectors()[i].inner_product(v)?;
        let sum = self
            .coefs
            .iter()
            .zip(answers)
            .fold(Fe::ZERO, |acc, (&a, &y)| acc + self.ctx.mul(a, y));
        let m = self.m();
        Ok(self.ctx.mul(self.gamma_pows[((m - d) % m) as usize], sum))
    }

    /// One full decoder run: sample v uniformly, query, combine.
    pub fn decode(&self, i: usize, word: &Codeword, rng: &mut impl Rng) -> Result<Fe> {
        self.check_word(word)?;
        let v = self.deindex(rng.gen_range(0..self.n_pos))?;
        let q = self.decode_queries(i, &v)?;
        let answers = q
            .positions
            .iter()
            .map(|p| Ok(word.symbols[self.index(p)? as usize]))
            .collect::<Result<Vec<_>>>()?;
        self.decode_combine(i, &v, &answers)
    }

    /// Reject codewords that were not produced by a code with identical
    /// parameters.
    pub fn check_word(&self, word: &Codeword) -> Result<()> {
        if word.m != self.m() || word.h != self.h() || word.t != self.ctx.t() {
            return Err(Error::WordMismatch {
                m: word.m,
                h: word.h as u32,
                t: word.t,
            });
        }
        if word.symbols.len() as u64 != self.n_pos {
            return Err(Error::WordLength {
                expected: self.n_pos,
                got: word.symbols.len() as u64,
            });
        }
        Ok(())
    }

    /// (b_j·u_i[c] mod m) per coordinate — the per-slot position shift.
    fn slot_shifts(&self, i: usize, slot: usize) -> Vec<u64> {
        let m = self.m();
        let b = self.exps[slot] % m;
        self.family.vectors()[i]
            .coords()
            .iter()
            .map(|&uc| b * uc % m)
            .collect()
    }
}

/// One decoder invocation's queries: coordinate, randomness, and the k
/// positions in polynomial term order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderQuery {
    pub i: usize,
    pub v: ZVector,
    pub positions: Vec<ZVector>,
}

// ---------------------------------------------------------------------------
// codewords
// ---------------------------------------------------------------------------

/// N field symbols in index order, tagged with the code parameters they
/// were produced under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    m: u64,
    h: usize,
    t: u32,
    symbols: Vec<Fe>,
}

impl Codeword {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn len(&self) -> u64 {
        self.symbols.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Fe] {
        &self.symbols
    }

    pub fn get(&self, position: u64) -> Result<Fe> {
        self.symbols
            .get(position as usize)
            .copied()
            .ok_or(Error::PositionOutOfRange(position))
    }

    /// Hamming distance in symbols.
    pub fn distance(&self, other: &Codeword) -> Result<u64> {
        if self.symbols.len() != other.symbols.len() {
            return Err(Error::WordLength {
                expected: self.symbols.len() as u64,
                got: other.symbols.len() as u64,
            });
        }
        Ok(self
            .symbols
            .iter()
            .zip(&other.symbols)
            .filter(|(a, b)| a != b)
            .count() as u64)
    }

    /// Write as `mvldc m=<m> h=<h> t=<t>` followed by one lowercase hex
    /// symbol per line, in index order.
    pub fn write_file(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(std::fs::File::create(path)?);
        writeln!(w, "mvldc m={} h={} t={}", self.m, self.h, self.t)?;
        for s in &self.symbols {
            writeln!(w, "{:x}", s.bits())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Codeword> {
        let mut lines = BufReader::new(std::fs::File::open(path)?).lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        let bad = |detail: String| Error::Format {
            what: "codeword file",
            detail,
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [tag, mf, hf, tf] = fields.as_slice() else {
            return Err(bad(format!("header {header:?} is not `mvldc m=_ h=_ t=_`")));
        };
        if *tag != "mvldc" {
            return Err(bad(format!("unknown magic {tag:?}")));
        }
        let field = |s: &str, key: &str| -> Result<u64> {
            s.strip_prefix(key)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad(format!("bad header field {s:?}")))
        };
        let m = field(mf, "m=")?;
        let h = field(hf, "h=")? as usize;
        let t = field(tf, "t=")? as u32;
        let expected = (m as u128).pow(h as u32);
        if t == 0 || t > 63 || expected > MAX_CODEWORD_LEN as u128 {
            return Err(bad(format!("unsupported parameters m={m} h={h} t={t}")));
        }
        let mut symbols = Vec::with_capacity(expected as usize);
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bits = parse_hex(&line)?;
            if bits >> t != 0 {
                return Err(bad(format!("symbol {line:?} does not fit in {t} bits")));
            }
            symbols.push(Fe(bits));
        }
        if symbols.len() as u128 != expected {
            return Err(Error::WordLength {
                expected: expected as u64,
                got: symbols.len() as u64,
            });
        }
        Ok(Codeword {
            m,
            h,
            t,
            symbols,
        })
    }
}

// ---------------------------------------------------------------------------
// smoothness
// ---------------------------------------------------------------------------

/// Positive outcome of a smoothness check. `Exact` certifies, for every
/// query slot, that v ↦ position is a bijection of Z_m^h, and that the
/// decoder is correct for every v on every basis codeword. `Sampled` is the
/// statistical fallback for codes too large to enumerate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SmoothnessVerdict {
    Exact {
        positions: u64,
        slots: usize,
        basis_checked: usize,
    },
    Sampled {
        samples: u64,
        slots: usize,
        max_chi2: f64,
        critical: f64,
        basis_checked: usize,
    },
}

impl SmoothnessVerdict {
    pub fn is_exact(&self) -> bool {
        matches!(self, SmoothnessVerdict::Exact { .. })
    }
}

/// Position queried at slot `slot` when the decoder randomness is the v of
/// rank `rank`: digits of v are shifted per-coordinate and re-ranked.
#[inline]
fn shifted_rank(m: u64, shifts: &[u64], mut rank: u64) -> u64 {
    let mut pos = 0u64;
    let mut pw = 1u64;
    for &s in shifts {
        let d = rank % m;
        rank /= m;
        pos += (d + s) % m * pw;
        pw *= m;
    }
    pos
}

/// Certify that slot `slot` of decoder i queries each position exactly once
/// as v ranges over all of Z_m^h.
pub(crate) fn slot_bijection_exact(
    code: &Code,
    i: usize,
    slot: usize,
    par: Parallelism,
) -> Result<()> {
    let m = code.m();
    let n = code.len();
    let shifts = code.slot_shifts(i, slot);
    let bits: Vec<AtomicU64> = (0..n.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
    let dup = par::map_reduce(
        par,
        n,
        |range| {
            let mut dup = u64::MAX;
            for r in range {
                let pos = shifted_rank(m, &shifts, r);
                let mask = 1u64 << (pos % 64);
                if bits[(pos / 64) as usize].fetch_or(mask, Ordering::Relaxed) & mask != 0 {
                    dup = dup.min(pos);
                }
            }
            dup
        },
        || u64::MAX,
        u64::min,
    );
    if dup != u64::MAX {
        return Err(Error::Format {
            what: "smoothness certificate",
            detail: format!("slot {slot} of decoder {i} hits position {dup} twice"),
        });
    }
    Ok(())
}

/// Exact decoder correctness: for every v and every basis codeword C(e_l),
/// decoder i returns 1 if l = i and 0 otherwise.
fn basis_correctness_exact(code: &Code, i: usize, par: Parallelism) -> Result<()> {
    let m = code.m();
    let n = code.len();
    let k = code.k();
    let u = code.family.vectors()[i].coords().to_vec();
    let shifts: Vec<Vec<u64>> = (0..k).map(|j| code.slot_shifts(i, j)).collect();
    for l in 0..code.n() {
        let word = code.basis(l, par)?;
        let expected = if l == i { Fe::ONE } else { Fe::ZERO };
        let bad = par::map_reduce(
            par,
            n,
            |range| {
                let mut bad = u64::MAX;
                for r in range {
                    let mut d = 0u64;
                    let mut rr = r;
                    for &uc in &u {
                        d = (d + rr % m * uc) % m;
                        rr /= m;
                    }
                    let mut sum = Fe::ZERO;
                    for (j, sh) in shifts.iter().enumerate() {
                        let pos = shifted_rank(m, sh, r);
                        sum += code.ctx.mul(code.coefs[j], word[pos as usize]);
                    }
                    let got = code
                        .ctx
                        .mul(code.gamma_pows[((m - d) % m) as usize], sum);
                    if got != expected {
                        bad = bad.min(r);
                        break;
                    }
                }
                bad
            },
            || u64::MAX,
            u64::min,
        );
        if bad != u64::MAX {
            return Err(Error::Format {
                what: "smoothness certificate",
                detail: format!("decoder {i} wrong on basis codeword {l} at v rank {bad}"),
            });
        }
    }
    Ok(())
}

const SMOOTH_SAMPLES: u64 = 1 << 20;
const SMOOTH_BUCKETS: u64 = 1 << 12;
const COMBINE_SAMPLES: u64 = 1 << 16;

/// Upper-tail chi-square critical value via the Wilson–Hilferty cube
/// approximation, at significance 0.001.
fn chi2_critical(df: f64) -> f64 {
    let z = 3.090_232_306_167_813; // Φ⁻¹(0.999)
    let a = 2.0 / (9.0 * df);
    df * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Chi-square statistic of slot `slot`'s sampled position distribution
/// against exact uniformity, binned into ≤ 2^12 buckets.
pub(crate) fn slot_chi2_sampled(
    code: &Code,
    i: usize,
    slot: usize,
    seed: u64,
    par: Parallelism,
) -> (f64, f64, u64) {
    let m = code.m();
    let n = code.len();
    let shifts = code.slot_shifts(i, slot);
    let buckets = SMOOTH_BUCKETS.min(n);
    let hist = par::map_reduce(
        par,
        SMOOTH_SAMPLES,
        |range| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream((slot as u64) << 32 | (range.start >> 14));
            let mut hist = vec![0u64; buckets as usize];
            for _ in range {
                let pos = shifted_rank(m, &shifts, rng.gen_range(0..n));
                hist[(pos as u128 * buckets as u128 / n as u128) as usize] += 1;
            }
            hist
        },
        || vec![0u64; buckets as usize],
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );
    // exact per-bucket expectation: bucket b covers positions
    // [⌈bN/B⌉, ⌈(b+1)N/B⌉)
    let mut chi2 = 0.0;
    for (b, &obs) in hist.iter().enumerate() {
        let lo = (b as u128 * n as u128).div_ceil(buckets as u128);
        let hi = ((b as u128 + 1) * n as u128).div_ceil(buckets as u128);
        let exp = SMOOTH_SAMPLES as f64 * (hi - lo) as f64 / n as f64;
        let diff = obs as f64 - exp;
        chi2 += diff * diff / exp;
    }
    (chi2, chi2_critical(buckets as f64 - 1.0), SMOOTH_SAMPLES)
}

/// Sampled decoder correctness on basis codewords.
fn basis_correctness_sampled(code: &Code, i: usize, seed: u64, par: Parallelism) -> Result<()> {
    let n = code.len();
    for l in 0..code.n() {
        let word = code.basis(l, par)?;
        let expected = if l == i { Fe::ONE } else { Fe::ZERO };
        let bad = par::map_reduce(
            par,
            COMBINE_SAMPLES,
            |range| {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                rng.set_stream(0xC0 << 32 | (range.start >> 14));
                let mut bad = 0u64;
                for _ in range {
                    let v = ZVector::from_rank(code.m(), code.h(), rng.gen_range(0..n));
                    let q = code.decode_queries(i, &v).expect("validated index");
                    let answers: Vec<Fe> = q
                        .positions
                        .iter()
                        .map(|p| word[p.rank() as usize])
                        .collect();
                    let got = code
                        .decode_combine(i, &v, &answers)
                        .expect("validated arity");
                    if got != expected {
                        bad += 1;
                    }
                }
                bad
            },
            || 0,
            |a, b| a + b,
        );
        if bad != 0 {
            return Err(Error::Format {
                what: "smoothness certificate",
                detail: format!("decoder {i} wrong on basis codeword {l} in {bad} samples"),
            });
        }
    }
    Ok(())
}

/// Full smoothness check with an explicit enumeration guard: exact when
/// N ≤ guard, otherwise sampled (chi-square per slot at significance 0.001
/// plus sampled decoder correctness).
pub fn verify_smoothness_with_guard(
    code: &Code,
    i: usize,
    seed: u64,
    guard: u64,
    par: Parallelism,
) -> Result<SmoothnessVerdict> {
    if i >= code.n() {
        return Err(Error::IndexOutOfRange { i, n: code.n() });
    }
    if code.len() <= guard {
        for slot in 0..code.k() {
            slot_bijection_exact(code, i, slot, par)?;
        }
        basis_correctness_exact(code, i, par)?;
        return Ok(SmoothnessVerdict::Exact {
            positions: code.len(),
            slots: code.k(),
            basis_checked: code.n(),
        });
    }
    let mut max_chi2: f64 = 0.0;
    let mut critical = 0.0;
    let mut samples = 0;
    for slot in 0..code.k() {
        let (chi2, crit, t) = slot_chi2_sampled(code, i, slot, seed, par);
        if chi2 > crit {
            return Err(Error::Format {
                what: "smoothness certificate",
                detail: format!("slot {slot} chi-square {chi2:.1} exceeds critical {crit:.1}"),
            });
        }
        max_chi2 = max_chi2.max(chi2);
        critical = crit;
        samples = t;
    }
    basis_correctness_sampled(code, i, seed, par)?;
    Ok(SmoothnessVerdict::Sampled {
        samples,
        slots: code.k(),
        max_chi2,
        critical,
        basis_checked: code.n(),
    })
}

/// Smoothness check with the default guard: exact for N ≤ 2^24.
pub fn verify_smoothness(
    code: &Code,
    i: usize,
    seed: u64,
    par: Parallelism,
) -> Result<SmoothnessVerdict> {
    verify_smoothness_with_guard(code, i, seed, ENUM_GUARD, par)
}

/// Exact smoothness or nothing: errors when N exceeds the guard.
pub fn verify_smoothness_exact(code: &Code, i: usize, par: Parallelism) -> Result<SmoothnessVerdict> {
    if code.len() > ENUM_GUARD {
        return Err(Error::EnumerationGuard {
            n: code.len(),
            guard: ENUM_GUARD,
        });
    }
    verify_smoothness_with_guard(code, i, 0, ENUM_GUARD, par)
}

// ---------------------------------------------------------------------------
// corruption and trials
// ---------------------------------------------------------------------------

/// Where the ⌊δN⌋ corrupted positions come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorruptionMode {
    /// Uniformly random positions.
    Uniform,
    /// Caller-chosen positions (at most ⌊δN⌋).
    Adversarial(Vec<u64>),
}

/// Replace symbols at ⌊δN⌋ positions with different values: uniform mode
/// samples the positions, adversarial mode takes them from the caller.
/// Returns the corrupted word and the sorted corrupted positions.
pub fn corrupt(
    word: &Codeword,
    delta: f64,
    mode: &CorruptionMode,
    rng: &mut impl Rng,
) -> Result<(Codeword, Vec<u64>)> {
    if !(0.0..0.5).contains(&delta) {
        return Err(Error::Format {
            what: "corruption fraction",
            detail: format!("delta = {delta} is outside [0, 1/2)"),
        });
    }
    let n = word.len();
    let budget = (delta * n as f64).floor() as u64;
    let mut positions: Vec<u64> = match mode {
        CorruptionMode::Uniform => {
            rand::seq::index::sample(rng, n as usize, budget as usize)
                .into_iter()
                .map(|p| p as u64)
                .collect()
        }
        CorruptionMode::Adversarial(list) => {
            if list.len() as u64 > budget {
                return Err(Error::CorruptionBudget {
                    got: list.len(),
                    max: budget as usize,
                });
            }
            let mut seen = std::collections::HashSet::new();
            for &p in list {
                if p >= n || !seen.insert(p) {
                    return Err(Error::BadCorruptionPosition(p));
                }
            }
            list.clone()
        }
    };
    positions.sort_unstable();
    let mut out = word.clone();
    for &p in &positions {
        // xor with a uniform nonzero delta: uniform over the 2^t−1 symbols
        // different from the current one
        let delta_bits = rng.gen_range(1..1u64 << word.t);
        out.symbols[p as usize] += Fe(delta_bits);
    }
    Ok((out, positions))
}

/// Monte Carlo configuration: corruption fraction, trial count, master
/// seed, and corruption mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub mode: CorruptionMode,
}

/// Empirical decode failure rate against the kδ union bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    /// kδ: each of the k queries is uniform, so it hits a corrupted
    /// position with probability ≤ δ.
    pub kdelta_bound: f64,
    pub corrupted: u64,
}

/// Wilson 95% score interval for f successes in t trials.
fn wilson(f: u64, t: u64) -> (f64, f64) {
    if t == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let (p, tf) = (f as f64 / t as f64, t as f64);
    let denom = 1.0 + z * z / tf;
    let center = (p + z * z / (2.0 * tf)) / denom;
    let half = z * (p * (1.0 - p) / tf + z * z / (4.0 * tf * tf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Corrupt the codeword of x once, then run `cfg.trials` independent
/// decodes of coordinate i and report how often the output differs from
/// x_i. Trial τ uses ChaCha stream τ+1 of the master seed, so the outcome
/// is reproducible and independent of worker count.
pub fn run_trials(
    code: &Code,
    x: &[Fe],
    i: usize,
    cfg: &TrialConfig,
    par: Parallelism,
) -> Result<TrialReport> {
    if i >= code.n() {
        return Err(Error::IndexOutOfRange { i, n: code.n() });
    }
    let word = code.encode(x, par)?;
    let mut corrupt_rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let (corrupted, positions) = corrupt(&word, cfg.delta, &cfg.mode, &mut corrupt_rng)?;
    let truth = x[i];
    let failures = par::map_reduce(
        par,
        cfg.trials,
        |range| {
            let mut fails = 0u64;
            for trial in range {
                let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
                rng.set_stream(trial + 1);
                let got = code
                    .decode(i, &corrupted, &mut rng)
                    .expect("validated inputs");
                if got != truth {
                    fails += 1;
                }
            }
            fails
        },
        || 0,
        |a, b| a + b,
    );
    let rate = failures as f64 / cfg.trials.max(1) as f64;
    let (wilson_low, wilson_high) = wilson(failures, cfg.trials);
    Ok(TrialReport {
        trials: cfg.trials,
        failures,
        rate,
        wilson_low,
        wilson_high,
        kdelta_bound: code.k() as f64 * cfg.delta,
        corrupted: positions.len() as u64,
    })
}
