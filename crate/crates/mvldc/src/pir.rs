//! k-server private information retrieval on top of the smooth decoder.
//!
//! Each of the k servers holds an identical replica of the codeword of the
//! database x ∈ F_{2^t}^n. To fetch x_i the user samples one uniform
//! v ∈ Z_m^h, sends query slot j's position to server j (one position per
//! server), and combines the k answers exactly as the decoder would. Honest
//! servers make retrieval exact for every v; privacy comes from smoothness:
//! each server's received position is uniform over [0, N), hence carries no
//! information about i. Only single-server privacy is claimed — servers do
//! not talk to each other.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decpoly::{parse_hex, to_hex};
use crate::error::{Error, Result};
use crate::gf2::Fe;
use crate::ldc::{self, Code, Codeword};
use crate::par::{self, Parallelism};

/// One simulated server: answers position requests from its replica.
#[derive(Debug, Clone)]
pub struct Server {
    replica: Arc<Codeword>,
}

impl Server {
    /// The message-passing interface: request a position, receive the t-bit
    /// symbol stored there.
    pub fn answer(&self, pos: u64) -> Result<Fe> {
        self.replica.get(pos)
    }

    pub fn replica(&self) -> &Codeword {
        &self.replica
    }
}

/// A running PIR deployment: the code and k identical server replicas of
/// the encoded database.
#[derive(Debug)]
pub struct PirInstance {
    code: Code,
    servers: Vec<Server>,
}

impl PirInstance {
    /// Encode the database and hand a replica of the codeword to each of
    /// the k servers (k = decoder query count).
    pub fn new(code: Code, x: &[Fe], par: Parallelism) -> Result<PirInstance> {
        if code.h() == 0 {
            return Err(Error::Format {
                what: "pir instance",
                detail: "matching family dimension h must be at least 1".into(),
            });
        }
        let replica = Arc::new(code.encode(x, par)?);
        let servers = (0..code.k())
            .map(|_| Server {
                replica: Arc::clone(&replica),
            })
            .collect();
        Ok(PirInstance { code, servers })
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    /// Number of servers = decoder query count.
    pub fn k(&self) -> usize {
        self.servers.len()
    }

    /// Database length n in field symbols.
    pub fn n(&self) -> usize {
        self.code.n()
    }

    pub fn servers(&self) -> &[Server] {
        &self.servers
    }
}

mod fe_hex {
    use super::*;
    use serde::Deserializer;

    pub fn serialize<S: serde::Serializer>(fe: &Fe, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_hex(fe.bits()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Fe, D::Error> {
        let s = String::deserialize(d)?;
        parse_hex(&s).map(Fe).map_err(serde::de::Error::custom)
    }
}

/// One server's view of a retrieval: the position it was asked for and the
/// symbol it returned.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PirQuery {
    pub server: usize,
    pub pos: u64,
    #[serde(with = "fe_hex")]
    pub answer: Fe,
}

/// Everything that crossed the wire in one retrieval, with exact bit
/// accounting: upstream k·⌈h·log₂ m⌉ bits (each position as a mixed-radix
/// integer in [0, N)), downstream k·t bits (one field symbol per server).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PirTranscript {
    pub i: usize,
    pub queries: Vec<PirQuery>,
    pub bits_up: u64,
    pub bits_down: u64,
}

impl PirTranscript {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<PirTranscript> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Bits needed to name one codeword position, ⌈log₂ N⌉.
fn position_bits(n_pos: u64) -> u32 {
    64 - (n_pos - 1).leading_zeros()
}

/// Retrieve x_i using the caller's randomness for v.
pub fn retrieve(
    inst: &PirInstance,
    i: usize,
    rng: &mut impl Rng,
) -> Result<(Fe, PirTranscript)> {
    let rank = rng.gen_range(0..inst.code.len());
    retrieve_at(inst, i, rank)
}

/// The deterministic core of `retrieve`: run the protocol with v fixed to
/// the given rank. Exposed so exhaustive v-enumeration can replay it.
pub fn retrieve_at(inst: &PirInstance, i: usize, v_rank: u64) -> Result<(Fe, PirTranscript)> {
    let code = &inst.code;
    let v = code.deindex(v_rank)?;
    let q = code.decode_queries(i, &v)?;
    let mut queries = Vec::with_capacity(inst.k());
    let mut answers = Vec::with_capacity(inst.k());
    for (server, pos_vec) in q.positions.iter().enumerate() {
        let pos = pos_vec.rank();
        let answer = inst.servers[server].answer(pos)?;
        queries.push(PirQuery {
            server,
            pos,
            answer,
        });
        answers.push(answer);
    }
    let value = code.decode_combine(i, &v, &answers)?;
    let k = inst.k() as u64;
    let transcript = PirTranscript {
        i,
        queries,
        bits_up: k * position_bits(code.len()) as u64,
        bits_down: k * code.ctx().t() as u64,
    };
    Ok((value, transcript))
}

/// Replay the full protocol for every index i and every v and confirm each
/// retrieval returns exactly x_i. Returns the number of retrievals checked,
/// n·N.
pub fn verify_retrieval(inst: &PirInstance, x: &[Fe], par: Parallelism) -> Result<u64> {
    let code = &inst.code;
    if x.len() != code.n() {
        return Err(Error::MessageLength {
            expected: code.n(),
            got: x.len(),
        });
    }
    let n_pos = code.len();
    let bad = par::map_reduce(
        par,
        n_pos,
        |range| {
            let mut bad = u64::MAX;
            'outer: for rank in range {
                for (i, &xi) in x.iter().enumerate() {
                    let (value, _) = retrieve_at(inst, i, rank).expect("in-range retrieval");
                    if value != xi {
                        bad = rank * code.n() as u64 + i as u64;
                        break 'outer;
                    }
                }
            }
            bad
        },
        || u64::MAX,
        u64::min,
    );
    if bad != u64::MAX {
        return Err(Error::Format {
            what: "pir retrieval",
            detail: format!(
                "index {} at v rank {} did not return the database symbol",
                bad % code.n() as u64,
                bad / code.n() as u64
            ),
        });
    }
    Ok(n_pos * code.n() as u64)
}

/// How a privacy claim was certified: full enumeration of v, or a sampled
/// chi-square test when N exceeds the enumeration guard (flagged, not
/// exact).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum PrivacyVerdict {
    Exact { positions: u64 },
    Sampled { samples: u64, chi2: f64, critical: f64 },
}

impl PrivacyVerdict {
    pub fn is_exact(&self) -> bool {
        matches!(self, PrivacyVerdict::Exact { .. })
    }
}

/// Certify that server `server`'s received position is uniform over [0, N)
/// when the user retrieves index i. Exact uniformity is index-independent
/// by construction — the same uniform marginal for every i — so a passing
/// certificate for each i also certifies that the distributions coincide.
pub fn verify_privacy(
    inst: &PirInstance,
    i: usize,
    server: usize,
    seed: u64,
    par: Parallelism,
) -> Result<PrivacyVerdict> {
    verify_privacy_with_guard(inst, i, server, seed, ldc::ENUM_GUARD, par)
}

/// `verify_privacy` with an explicit enumeration guard.
pub fn verify_privacy_with_guard(
    inst: &PirInstance,
    i: usize,
    server: usize,
    seed: u64,
    guard: u64,
    par: Parallelism,
) -> Result<PrivacyVerdict> {
    let code = &inst.code;
    if i >= code.n() {
        return Err(Error::IndexOutOfRange { i, n: code.n() });
    }
    if server >= inst.k() {
        return Err(Error::AnswerCount {
            expected: inst.k(),
            got: server,
        });
    }
    if code.len() <= guard {
        ldc::slot_bijection_exact(code, i, server, par)?;
        return Ok(PrivacyVerdict::Exact {
            positions: code.len(),
        });
    }
    let (chi2, critical, samples) = ldc::slot_chi2_sampled(code, i, server, seed, par);
    if chi2 > critical {
        return Err(Error::Format {
            what: "privacy certificate",
            detail: format!(
                "server {server} position distribution for index {i} fails chi-square: {chi2:.2} > {critical:.2}"
            ),
        });
    }
    Ok(PrivacyVerdict::Sampled {
        samples,
        chi2,
        critical,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrivacyEntry {
    pub i: usize,
    pub server: usize,
    #[serde(flatten)]
    pub verdict: PrivacyVerdict,
}

/// Per-(index, server) privacy verdicts for the whole instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrivacyCertificate {
    pub entries: Vec<PrivacyEntry>,
}

impl PrivacyCertificate {
    /// True when every pair was certified by full enumeration.
    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.verdict.is_exact())
    }
}

/// Certify privacy for every (i, server) pair.
pub fn privacy_certificate(
    inst: &PirInstance,
    seed: u64,
    par: Parallelism,
) -> Result<PrivacyCertificate> {
    let mut entries = Vec::with_capacity(inst.n() * inst.k());
    for i in 0..inst.n() {
        for server in 0..inst.k() {
            entries.push(PrivacyEntry {
                i,
                server,
                verdict: verify_privacy(inst, i, server, seed, par)?,
            });
        }
    }
    Ok(PrivacyCertificate { entries })
}

/// The C_k(n) accounting for one retrieval against this instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommunicationReport {
    pub servers: usize,
    pub database_symbols: usize,
    pub symbol_bits: u32,
    pub codeword_positions: u64,
    pub position_bits: u32,
    pub bits_up: u64,
    pub bits_down: u64,
    pub bits_total: u64,
}

pub fn communication_report(inst: &PirInstance) -> CommunicationReport {
    let code = &inst.code;
    let k = inst.k() as u64;
    let position_bits = position_bits(code.len());
    let bits_up = k * position_bits as u64;
    let bits_down = k * code.ctx().t() as u64;
    CommunicationReport {
        servers: inst.k(),
        database_symbols: code.n(),
        symbol_bits: code.ctx().t(),
        codeword_positions: code.len(),
        position_bits,
        bits_up,
        bits_down,
        bits_total: bits_up + bits_down,
    }
}
