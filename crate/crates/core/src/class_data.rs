//! Partition combinatorics and conjugacy-class parameter data.
//!
//! A class function assigns a partition to finitely many monic polynomials
//! (never the polynomial x), weighted by degree so the total matches the
//! matrix size. The per-family validity conditions decide which assignments
//! name actual classes: closure under the dual (or twisted dual) with equal
//! partitions, and the symplectic/orthogonal constraint at `x - 1` and
//! `x + 1`.
//!
//! Pure operations on immutable values; enumeration output is canonically
//! ordered, so concurrent callers see identical lists.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field_tower::FieldSpec;
use crate::polyalg::{dual, is_irreducible, monic_irreducibles, twisted_dual, Poly, PolyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassDataError {
    #[error("partition parts must be positive and weakly decreasing")]
    MalformedPartition,
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid class function: {0}")]
    Invalid(ClassViolation),
}

/// First violated validity condition, in checking order.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassViolation {
    #[error("key {0} is not monic")]
    KeyNotMonic(String),
    #[error("key {0} is constant")]
    KeyConstant(String),
    #[error("key {0} is the polynomial x (or has zero constant term)")]
    KeyDividesX(String),
    #[error("partition assigned to {0} is empty")]
    EmptyPartition(String),
    #[error("total weight {got} does not match the required size {want}")]
    SizeMismatch { got: u32, want: u32 },
    #[error("dual closure fails: partition at {0} differs from its dual partner")]
    DualClosure(String),
    #[error("twisted-dual closure fails: partition at {0} differs from its partner")]
    TwistedDualClosure(String),
    #[error("partition at {0} is not symplectic")]
    NotSymplectic(String),
    #[error("partition at {0} is not orthogonal")]
    NotOrthogonal(String),
    #[error("key {0} is reducible")]
    KeyReducible(String),
}

// ---------------------------------------------------------------------------
// Partitions
// ---------------------------------------------------------------------------

/// Weakly decreasing list of positive integers; the empty partition is
/// allowed and has size 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Partition, ClassDataError> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(ClassDataError::MalformedPartition);
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Partition {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn multiplicity_ok(&self, select_odd: bool) -> bool {
        let mut i = 0;
        while i < self.0.len() {
            let part = self.0[i];
            let mut mult = 0;
            while i < self.0.len() && self.0[i] == part {
                mult += 1;
                i += 1;
            }
            let selected = if select_odd {
                part % 2 == 1
            } else {
                part.is_multiple_of(2)
            };
            if selected && mult % 2 == 1 {
                return false;
            }
        }
        true
    }

    /// Odd parts occur with even multiplicity (Jordan types of symplectic
    /// unipotents).
    pub fn is_symplectic(&self) -> bool {
        self.multiplicity_ok(true)
    }

    /// Even parts occur with even multiplicity (Jordan types of orthogonal
    /// unipotents).
    pub fn is_orthogonal(&self) -> bool {
        self.multiplicity_ok(false)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", ps.join(","))
    }
}

/// All partitions of n, largest part first, in deterministic order.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    fn rec(remaining: u32, max_part: u32, stack: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(stack.clone()));
            return;
        }
        let top = remaining.min(max_part);
        for part in (1..=top).rev() {
            stack.push(part);
            rec(remaining - part, part, stack, out);
            stack.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// Class functions
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "GL")]
    Gl,
    U,
    Sp,
    O,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Gl => write!(f, "GL"),
            GroupKind::U => write!(f, "U"),
            GroupKind::Sp => write!(f, "Sp"),
            GroupKind::O => write!(f, "O"),
        }
    }
}

/// Map from monic polynomials to partitions, with the group family it
/// parameterizes a class of. For Sp the parameter `n` is half the matrix
/// size (the total weight must be `2n`); for the other kinds it is the
/// matrix size itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    pub kind: GroupKind,
    pub n: u32,
    pub field: FieldSpec,
    /// For U only: q with sigma = q-power map on F_{q^2}.
    pub base_q: Option<u64>,
    pub entries: BTreeMap<Poly, Partition>,
}

impl ClassFunction {
    pub fn new(
        kind: GroupKind,
        n: u32,
        field: FieldSpec,
        base_q: Option<u64>,
        entries: BTreeMap<Poly, Partition>,
    ) -> ClassFunction {
        ClassFunction {
            kind,
            n,
            field,
            base_q,
            entries,
        }
    }

    /// Total weight: sum of |partition| * deg(key).
    pub fn total(&self) -> u32 {
        self.entries
            .iter()
            .map(|(f, p)| p.size() * f.deg() as u32)
            .sum()
    }

    pub fn required_total(&self) -> u32 {
        match self.kind {
            GroupKind::Sp => 2 * self.n,
            _ => self.n,
        }
    }

    /// Check every validity condition, reporting the first violation.
    pub fn validate(&self) -> Result<(), ClassViolation> {
        let one = self.field.one();
        let neg_one = self.field.from_int(-1);
        for (key, part) in &self.entries {
            if !key.is_monic() {
                return Err(ClassViolation::KeyNotMonic(key.to_string()));
            }
            if key.degree().unwrap_or(0) == 0 {
                return Err(ClassViolation::KeyConstant(key.to_string()));
            }
            if key.coeff(0).is_zero() {
                return Err(ClassViolation::KeyDividesX(key.to_string()));
            }
            if part.is_empty() {
                return Err(ClassViolation::EmptyPartition(key.to_string()));
            }
        }
        match self.kind {
            GroupKind::Gl => {}
            GroupKind::U => {
                let q = self.base_q.expect("U class function carries base_q");
                for (key, part) in &self.entries {
                    let partner = twisted_dual(key, q).expect("validated keys dualize");
                    if self.entries.get(&partner) != Some(part) {
                        return Err(ClassViolation::TwistedDualClosure(key.to_string()));
                    }
                }
            }
            GroupKind::Sp | GroupKind::O => {
                for (key, part) in &self.entries {
                    let partner = dual(key).expect("validated keys dualize");
                    if self.entries.get(&partner) != Some(part) {
                        return Err(ClassViolation::DualClosure(key.to_string()));
                    }
                }
                let is_sp = self.kind == GroupKind::Sp;
                for pm in [&one, &neg_one] {
                    let key = Poly::linear_from_root(pm);
                    if let Some(part) = self.entries.get(&key) {
                        if is_sp && !part.is_symplectic() {
                            return Err(ClassViolation::NotSymplectic(key.to_string()));
                        }
                        if !is_sp && !part.is_orthogonal() {
                            return Err(ClassViolation::NotOrthogonal(key.to_string()));
                        }
                    }
                }
            }
        }
        let got = self.total();
        let want = self.required_total();
        if got != want {
            return Err(ClassViolation::SizeMismatch { got, want });
        }
        Ok(())
    }

    /// Re-key over a larger field: each key is replaced by its irreducible
    /// factors there, all inheriting the same partition. Over a splitting
    /// field the data becomes an eigenvalue-to-partition map.
    pub fn closure_view(&self, target: &FieldSpec) -> Result<ClassFunction, ClassDataError> {
        let mut entries = BTreeMap::new();
        for (key, part) in &self.entries {
            let lifted = key.embed(target)?;
            let fact = crate::polyalg::factorize(&lifted)?;
            for (factor, mult) in fact.factors {
                debug_assert_eq!(mult, 1, "class keys are separable");
                entries.insert(factor, part.clone());
            }
        }
        Ok(ClassFunction {
            kind: self.kind,
            n: self.n,
            field: target.clone(),
            base_q: self.base_q,
            entries,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(f, p)| {
                serde_json::json!({
                    "poly": f.to_string(),
                    "partition": p.parts(),
                })
            })
            .collect();
        let mut obj = serde_json::json!({
            "kind": self.kind.to_string(),
            "n": self.n,
            "field": self.field.to_string(),
            "entries": entries,
        });
        if let Some(q) = self.base_q {
            obj["base_q"] = serde_json::json!(q);
        }
        obj
    }
}

impl fmt::Display for ClassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}): ", self.kind, self.n)?;
        let items: Vec<String> = self
            .entries
            .iter()
            .map(|(k, p)| format!("{k} -> {p}"))
            .collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// A key orbit: one polynomial fixed by the relevant involution, or a pair
/// swapped by it; partitions are assigned orbit-wise.
#[derive(Clone, Debug)]
struct Orbit {
    keys: Vec<Poly>,
    /// Degree-weight of assigning one unit of partition size to this orbit.
    weight: u32,
    /// Partition constraint applied to the orbit (x +- 1 in Sp/O).
    constraint: Option<GroupKind>,
}

fn collect_orbits(
    kind: GroupKind,
    size: u32,
    field: &FieldSpec,
    base_q: Option<u64>,
    budget: u64,
) -> Result<Vec<Orbit>, ClassDataError> {
    let q = field.order();
    let mut scan_cost: u64 = 0;
    for d in 1..=size {
        scan_cost = scan_cost.saturating_add((q as u128).pow(d) as u64);
    }
    if scan_cost > budget {
        return Err(ClassDataError::BudgetExceeded(format!(
            "scanning {scan_cost} monic polynomials exceeds budget {budget}"
        )));
    }

    let mut irreducibles: Vec<Poly> = Vec::new();
    for d in 1..=size as usize {
        irreducibles.extend(monic_irreducibles(field, d));
    }
    irreducibles.retain(|f| !f.is_x());

    let one = field.one();
    let neg_one = field.from_int(-1);
    let mut seen: BTreeMap<Poly, bool> = BTreeMap::new();
    let mut orbits = Vec::new();
    for f in &irreducibles {
        if seen.contains_key(f) {
            continue;
        }
        let partner = match kind {
            GroupKind::Gl => None,
            GroupKind::U => {
                let bq = base_q.expect("U enumeration needs base_q");
                Some(twisted_dual(f, bq)?)
            }
            GroupKind::Sp | GroupKind::O => Some(dual(f)?),
        };
        let mut keys = vec![f.clone()];
        let mut weight = f.deg() as u32;
        if let Some(g) = partner {
            if g != *f {
                // Dual partner of an irreducible is irreducible of the same
                // degree; fuse the pair.
                seen.insert(g.clone(), true);
                weight += g.deg() as u32;
                keys.push(g);
            }
        }
        seen.insert(f.clone(), true);
        let constraint = match kind {
            GroupKind::Sp | GroupKind::O
                if keys.len() == 1
                    && (keys[0] == Poly::linear_from_root(&one)
                        || keys[0] == Poly::linear_from_root(&neg_one)) =>
            {
                Some(kind)
            }
            _ => None,
        };
        orbits.push(Orbit {
            keys,
            weight,
            constraint,
        });
    }
    orbits.sort_by(|a, b| a.keys[0].cmp(&b.keys[0]));
    Ok(orbits)
}

/// Enumerate all valid class functions for the kind and size, in
/// deterministic order. For GL and U over a finite field this lists exactly
/// the classes of the finite group; for Sp and O it lists the coarser
/// algebraic-group class data (finite classes refine it).
pub fn enumerate_class_functions(
    kind: GroupKind,
    n: u32,
    field: &FieldSpec,
    base_q: Option<u64>,
    budget: u64,
) -> Result<Vec<ClassFunction>, ClassDataError> {
    let size = match kind {
        GroupKind::Sp => 2 * n,
        _ => n,
    };
    let orbits = collect_orbits(kind, size, field, base_q, budget)?;

    fn rec(
        orbits: &[Orbit],
        idx: usize,
        remaining: u32,
        acc: &mut BTreeMap<Poly, Partition>,
        out: &mut Vec<BTreeMap<Poly, Partition>>,
    ) {
        if remaining == 0 {
            out.push(acc.clone());
            return;
        }
        if idx == orbits.len() {
            return;
        }
        // Skip this orbit entirely.
        rec(orbits, idx + 1, remaining, acc, out);
        let orbit = &orbits[idx];
        if orbit.weight == 0 || orbit.weight > remaining {
            return;
        }
        let max_units = remaining / orbit.weight;
        for units in 1..=max_units {
            for part in partitions_of(units) {
                let ok = match orbit.constraint {
                    Some(GroupKind::Sp) => part.is_symplectic(),
                    Some(GroupKind::O) => part.is_orthogonal(),
                    _ => true,
                };
                if !ok {
                    continue;
                }
                for key in &orbit.keys {
                    acc.insert(key.clone(), part.clone());
                }
                rec(orbits, idx + 1, remaining - units * orbit.weight, acc, out);
                for key in &orbit.keys {
                    acc.remove(key);
                }
            }
        }
    }

    let mut raw = Vec::new();
    rec(&orbits, 0, size, &mut BTreeMap::new(), &mut raw);
    let mut out: Vec<ClassFunction> = raw
        .into_iter()
        .map(|entries| ClassFunction::new(kind, n, field.clone(), base_q, entries))
        .collect();
    out.sort_by(|a, b| {
        a.entries
            .iter()
            .collect::<Vec<_>>()
            .cmp(&b.entries.iter().collect::<Vec<_>>())
    });
    debug_assert!(out.iter().all(|cf| cf.validate().is_ok()));
    Ok(out)
}

/// Parse a class-function JSON object produced by `to_json`.
pub fn class_function_from_json(v: &serde_json::Value) -> Result<ClassFunction, ClassDataError> {
    let parse = |msg: &str| ClassDataError::BudgetExceeded(msg.to_string());
    let kind = match v["kind"].as_str() {
        Some("GL") => GroupKind::Gl,
        Some("U") => GroupKind::U,
        Some("Sp") => GroupKind::Sp,
        Some("O") => GroupKind::O,
        _ => return Err(parse("bad kind")),
    };
    let n = v["n"].as_u64().ok_or_else(|| parse("bad n"))? as u32;
    let field = FieldSpec::parse(v["field"].as_str().ok_or_else(|| parse("bad field"))?)
        .map_err(PolyError::Field)?;
    let base_q = v["base_q"].as_u64();
    let mut entries = BTreeMap::new();
    for item in v["entries"]
        .as_array()
        .ok_or_else(|| parse("bad entries"))?
    {
        let poly = Poly::parse(item["poly"].as_str().ok_or_else(|| parse("bad poly"))?)?;
        if !is_irreducible(&poly) {
            return Err(ClassDataError::Invalid(ClassViolation::KeyReducible(
                poly.to_string(),
            )));
        }
        let parts: Vec<u32> = item["partition"]
            .as_array()
            .ok_or_else(|| parse("bad partition"))?
            .iter()
            .map(|x| x.as_u64().unwrap_or(0) as u32)
            .collect();
        entries.insert(poly, Partition::new(parts)?);
    }
    Ok(ClassFunction::new(kind, n, field, base_q, entries))
}

/// Jordan-type helper used by the group-side cross-checks: the partition
/// recording, for each i, the number of Jordan blocks of size >= i is
/// recovered from the rank sequence of powers of a nilpotent matrix. Kept
/// here so partition logic stays in one module.
pub fn partition_from_rank_sequence(n: usize, ranks: &[usize]) -> Partition {
    // ranks[i] = rank(N^{i+1}); blocks of size >= s: rank(N^{s-1}) - rank(N^s).
    let mut counts_ge = Vec::new();
    let mut prev = n;
    for &r in ranks {
        counts_ge.push(prev - r);
        prev = r;
        if r == 0 {
            break;
        }
    }
    let mut parts = Vec::new();
    for s in 0..counts_ge.len() {
        let here = counts_ge[s];
        let next = counts_ge.get(s + 1).copied().unwrap_or(0);
        for _ in 0..(here - next) {
            parts.push((s + 1) as u32);
        }
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Partition::new(parts).expect("rank sequence yields a valid partition")
}
