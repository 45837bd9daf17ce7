//! Matching-vector families.
//!
//! A family over Z_m^h is a list of vectors u_1, …, u_n with
//! ⟨u_i, u_i⟩ ≡ 0 (mod m) and ⟨u_i, u_j⟩ ∈ S_m for i ≠ j, where S_m is the
//! canonical set of the modulus. The family size n becomes the message
//! length of the code built in [`crate::ldc`], and h controls the codeword
//! length m^h, so the searches here look for the largest n at the smallest h.

use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, Parallelism};
use crate::zmod::{canonical_set, ip_raw, CanonicalSet, Modulus, ZVector};

/// A list of vectors over the same Z_m^h, dimensions validated but the
/// matching conditions not; see [`verify_family`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FamilyJson", into = "FamilyJson")]
pub struct MatchingFamily {
    m: u64,
    h: usize,
    vectors: Vec<ZVector>,
}

impl MatchingFamily {
    pub fn new(m: u64, h: usize, vectors: Vec<ZVector>) -> Result<MatchingFamily> {
        if vectors.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for v in &vectors {
            if v.m() != m {
                return Err(Error::VectorModulusMismatch(v.m(), m));
            }
            if v.h() != h {
                return Err(Error::DimensionMismatch(v.h(), h));
            }
        }
        Ok(MatchingFamily { m, h, vectors })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Number of vectors = message length of the derived code.
    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[ZVector] {
        &self.vectors
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<MatchingFamily> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read_file(path: &Path) -> Result<MatchingFamily> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_json() + "\n")?)
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    m: u64,
    h: usize,
    s: Vec<u64>,
    vectors: Vec<Vec<u64>>,
}

impl From<MatchingFamily> for FamilyJson {
    fn from(f: MatchingFamily) -> FamilyJson {
        let s = Modulus::factorize(f.m)
            .map(|md| canonical_set(&md).sorted().to_vec())
            .unwrap_or_default();
        FamilyJson {
            m: f.m,
            h: f.h,
            s,
            vectors: f.vectors.iter().map(|v| v.coords().to_vec()).collect(),
        }
    }
}

impl TryFrom<FamilyJson> for MatchingFamily {
    type Error = Error;
    fn try_from(j: FamilyJson) -> Result<MatchingFamily> {
        let modulus = Modulus::factorize(j.m)?;
        let expect = canonical_set(&modulus);
        if j.s != expect.sorted() {
            return Err(Error::Format {
                what: "matching-vector family",
                detail: format!("stored S {:?} is not the canonical set of {}", j.s, j.m),
            });
        }
        let vectors = j
            .vectors
            .into_iter()
            .map(|coords| {
                if coords.iter().any(|&c| c >= j.m) {
                    return Err(Error::Format {
                        what: "matching-vector family",
                        detail: "coordinate out of range".into(),
                    });
                }
                Ok(ZVector::from_coords(j.m, coords))
            })
            .collect::<Result<Vec<_>>>()?;
        MatchingFamily::new(j.m, j.h, vectors)
    }
}

// ---------------------------------------------------------------------------
// verification
// ---------------------------------------------------------------------------

/// First violation of the matching conditions, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FamilyVerdict {
    Valid,
    /// ⟨u_i, u_i⟩ ≢ 0.
    SelfNotZero { i: usize, value: u64 },
    /// ⟨u_i, u_j⟩ ∉ S for some i ≠ j.
    CrossNotInS { i: usize, j: usize, value: u64 },
}

impl FamilyVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, FamilyVerdict::Valid)
    }
}

/// Check every self inner product is 0 and every cross inner product lands
/// in the canonical set.
pub fn verify_family(family: &MatchingFamily) -> Result<FamilyVerdict> {
    let modulus = Modulus::factorize(family.m)?;
    let s = canonical_set(&modulus);
    let vs = family.vectors();
    for (i, u) in vs.iter().enumerate() {
        let d = u.inner_product(u)?;
        if d != 0 {
            return Ok(FamilyVerdict::SelfNotZero { i, value: d });
        }
        for (j, v) in vs.iter().enumerate().skip(i + 1) {
            let c = u.inner_product(v)?;
            if !s.contains(c) {
                return Ok(FamilyVerdict::CrossNotInS { i, j, value: c });
            }
        }
    }
    Ok(FamilyVerdict::Valid)
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

/// Cap on the m^h ranks scanned when building the candidate pool.
const POOL_SCAN_CAP: u128 = 1 << 26;

/// Default per-root node budget for the family search.
pub const DEFAULT_FAMILY_BUDGET: u64 = 1 << 22;

/// All nonzero self-orthogonal vectors of Z_m^h in candidate order: ranks
/// are scanned starting at `seed % m^h` and wrapping, so the seed rotates
/// the deterministic order without changing the pool itself.
pub fn self_orthogonal_pool(modulus: &Modulus, h: usize, seed: u64) -> Result<Vec<ZVector>> {
    let m = modulus.m();
    let total = (m as u128).pow(h as u32);
    if total > POOL_SCAN_CAP {
        return Err(Error::SearchSpaceTooLarge {
            estimate: total,
            ceiling: POOL_SCAN_CAP,
        });
    }
    let total = total as u64;
    let start = seed % total;
    let mut pool = Vec::new();
    for i in 0..total {
        let v = ZVector::from_rank(m, h, (start + i) % total);
        if v.coords().iter().all(|&c| c == 0) {
            continue;
        }
        if ip_raw(m, v.coords(), v.coords()) == 0 {
            pool.push(v);
        }
    }
    Ok(pool)
}

/// Outcome of [`search_family`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySearch {
    Found(MatchingFamily),
    /// Every branch was explored; no family of the requested size exists
    /// under the ascending-order normal form (hence none exists at all).
    Exhausted { nodes: u64 },
    /// At least one branch hit its node budget before finishing.
    BudgetExceeded { roots_exceeded: usize, nodes: u64 },
}

/// Per-root depth-first search state.
struct RootScan<'a> {
    pool: &'a [ZVector],
    s: &'a CanonicalSet,
    m: u64,
    n: usize,
}

enum RootOut {
    /// Root index and the full index chain of the family found under it.
    Found(usize, Vec<usize>),
    Clean { nodes: u64 },
    Exceeded { nodes: u64 },
}

impl RootScan<'_> {
    /// Extend `chosen` with indices > its last element. Every candidate
    /// considered costs one node from `budget`; `None` means the subtree is
    /// clean, `Some(chain)` a success. Sets `exceeded` when the budget dies.
    fn extend(
        &self,
        chosen: &mut Vec<usize>,
        budget: &mut u64,
        nodes: &mut u64,
        exceeded: &mut bool,
    ) -> Option<Vec<usize>> {
        if chosen.len() == self.n {
            return Some(chosen.clone());
        }
        let last = *chosen.last().expect("chosen starts with the root");
        for j in last + 1..self.pool.len() {
            if *budget == 0 {
                *exceeded = true;
                return None;
            }
            *budget -= 1;
            *nodes += 1;
            let cand = &self.pool[j];
            let ok = chosen.iter().all(|&i| {
                self.s
                    .contains(ip_raw(self.m, self.pool[i].coords(), cand.coords()))
            });
            if !ok {
                continue;
            }
            chosen.push(j);
            let hit = self.extend(chosen, budget, nodes, exceeded);
            chosen.pop();
            if hit.is_some() || *exceeded {
                return hit;
            }
        }
        None
    }

    fn run(&self, root: usize, budget: u64) -> RootOut {
        let mut chosen = vec![root];
        let mut budget = budget;
        let mut nodes = 0;
        let mut exceeded = false;
        match self.extend(&mut chosen, &mut budget, &mut nodes, &mut exceeded) {
            Some(chain) => RootOut::Found(root, chain),
            None if exceeded => RootOut::Exceeded { nodes },
            None => RootOut::Clean { nodes },
        }
    }
}

/// Search for a matching-vector family of exactly `n` vectors in Z_m^h.
///
/// Candidates are the nonzero self-orthogonal vectors in seed-rotated rank
/// order, and families are enumerated in ascending candidate order, so each
/// unordered family is visited exactly once. Each root candidate gets its
/// own node budget, which keeps the outcome independent of worker count:
/// the result is the success under the smallest root index, or a verdict
/// that the whole forest was exhausted / some branch ran out of budget.
pub fn search_family(
    modulus: &Modulus,
    h: usize,
    n: usize,
    seed: u64,
    budget: Option<u64>,
    par: Parallelism,
) -> Result<FamilySearch> {
    if n == 0 {
        return Err(Error::EmptyFamily);
    }
    let pool = self_orthogonal_pool(modulus, h, seed)?;
    let s = canonical_set(modulus);
    let scan = RootScan {
        pool: &pool,
        s: &s,
        m: modulus.m(),
        n,
    };
    let budget = budget.unwrap_or(DEFAULT_FAMILY_BUDGET);

    struct Acc {
        found: Option<(usize, Vec<usize>)>,
        roots_exceeded: usize,
        nodes: u64,
    }
    let identity = || Acc {
        found: None,
        roots_exceeded: 0,
        nodes: 0,
    };
    let merge = |mut a: Acc, b: Acc| {
        a.found = match (a.found.take(), b.found) {
            (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
            (x, y) => x.or(y),
        };
        a.roots_exceeded += b.roots_exceeded;
        a.nodes += b.nodes;
        a
    };

    let cutoff = AtomicU64::new(u64::MAX);
    let acc = par::map_reduce(
        par,
        pool.len() as u64,
        |range| {
            let mut acc = identity();
            for root in range {
                if root >= cutoff.load(Ordering::Relaxed) {
                    break;
                }
                match scan.run(root as usize, budget) {
                    RootOut::Found(r, chain) => {
                        cutoff.fetch_min(root, Ordering::Relaxed);
                        acc.found = Some((r, chain));
                        break;
                    }
                    RootOut::Clean { nodes } => acc.nodes += nodes,
                    RootOut::Exceeded { nodes } => {
                        acc.roots_exceeded += 1;
                        acc.nodes += nodes;
                    }
                }
            }
            acc
        },
        identity,
        merge,
    );

    if let Some((_, chain)) = acc.found {
        let vectors = chain.iter().map(|&i| pool[i].clone()).collect();
        let family = MatchingFamily::new(modulus.m(), h, vectors)?;
        debug_assert!(verify_family(&family)?.is_valid());
        return Ok(FamilySearch::Found(family));
    }
    if acc.roots_exceeded > 0 {
        return Ok(FamilySearch::BudgetExceeded {
            roots_exceeded: acc.roots_exceeded,
            nodes: acc.nodes,
        });
    }
    Ok(FamilySearch::Exhausted { nodes: acc.nodes })
}

// ---------------------------------------------------------------------------
// set systems
// ---------------------------------------------------------------------------

/// Build a family from a set system over the universe {1, …, h}: each set
/// must have size ≡ 0 mod m and each pairwise intersection size must land
/// in S_m; the vectors are the 0/1 incidence vectors.
pub fn family_from_set_system(
    modulus: &Modulus,
    h: usize,
    sets: &[Vec<usize>],
) -> Result<MatchingFamily> {
    let m = modulus.m();
    let s = canonical_set(modulus);
    let mut incidence: Vec<Vec<u64>> = Vec::with_capacity(sets.len());
    for (index, set) in sets.iter().enumerate() {
        let mut row = vec![0u64; h];
        for &e in set {
            if e == 0 || e > h {
                return Err(Error::ElementOutOfUniverse { index, element: e, h });
            }
            if row[e - 1] == 1 {
                return Err(Error::Format {
                    what: "set system",
                    detail: format!("set {index} lists element {e} twice"),
                });
            }
            row[e - 1] = 1;
        }
        if set.len() as u64 % m != 0 {
            return Err(Error::SetSizeNotZero {
                index,
                size: set.len(),
                m,
            });
        }
        incidence.push(row);
    }
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let inter = incidence[i]
                .iter()
                .zip(&incidence[j])
                .filter(|(a, b)| **a == 1 && **b == 1)
                .count() as u64;
            if !s.contains(inter % m) {
                return Err(Error::IntersectionNotInS {
                    i,
                    j,
                    value: inter % m,
                    m,
                });
            }
        }
    }
    let vectors = incidence
        .into_iter()
        .map(|row| ZVector::from_coords(m, row))
        .collect();
    MatchingFamily::new(m, h, vectors)
}
