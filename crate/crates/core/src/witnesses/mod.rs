//! Homomorphism pairs from finite abelian groups into classical groups that
//! are conjugate element-by-element but admit no global conjugator, the
//! deciders certifying both properties, and the lifting constructions that
//! push a pair from a centralizer into a larger group.
//!
//! Per-element checks are independent of one another and certificates live
//! in ordered maps, so verification is deterministic and shareable.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::field_tower::{
    base_q_exponent, embed, extension_step, is_square, make_field, power_map_inverse,
    unitary_sigma, FieldElement, FieldError, FieldSpec,
};
use crate::groups::{is_conjugate_in_group, ConjugacyOutcome, GroupError, GroupFamily, GroupSpec};
use crate::matrixlab::{
    common_zero_column, common_zero_row, form_matrix, hermitian_transport, scan_span,
    simultaneous_intertwiner, symmetric_transport, FormKind, Matrix, MatrixError,
};

mod construct;
mod verify;

pub use construct::{construct_witness, ConstructOptions};
pub use verify::{verify_witness, StabilityReport, VerifiedWitness, VerifyOptions};

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("construction out of coverage: {0}")]
    OutOfCoverage(String),
    #[error("invalid witness data: {0}")]
    Invalid(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

// ---------------------------------------------------------------------------
// Sources and homomorphisms
// ---------------------------------------------------------------------------

/// Finite abelian group given by a list of cyclic moduli.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianSource {
    pub moduli: Vec<u64>,
}

impl AbelianSource {
    pub fn new(moduli: Vec<u64>) -> AbelianSource {
        assert!(moduli.iter().all(|&m| m >= 1));
        AbelianSource { moduli }
    }

    pub fn order(&self) -> u64 {
        self.moduli.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    /// All elements as coordinate tuples, first coordinate most significant.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut cur = vec![0u64; self.moduli.len()];
        loop {
            out.push(cur.clone());
            let mut slot = self.moduli.len();
            loop {
                if slot == 0 {
                    return out;
                }
                slot -= 1;
                cur[slot] += 1;
                if cur[slot] < self.moduli[slot] {
                    break;
                }
                cur[slot] = 0;
            }
        }
    }

    pub fn label(element: &[u64]) -> String {
        let parts: Vec<String> = element.iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// Homomorphism from an abelian source into a classical group, given by one
/// generator image per cyclic factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hom {
    pub source: AbelianSource,
    pub target: GroupSpec,
    pub images: Vec<Matrix>,
}

impl Hom {
    pub fn new(source: AbelianSource, target: GroupSpec, images: Vec<Matrix>) -> Hom {
        assert_eq!(source.rank(), images.len());
        Hom {
            source,
            target,
            images,
        }
    }

    /// Generator orders divide the moduli, images commute pairwise, and all
    /// images are members of the target.
    pub fn validate(&self) -> Result<(), WitnessError> {
        for (i, g) in self.images.iter().enumerate() {
            self.target
                .membership(g)
                .map_err(|e| WitnessError::Invalid(format!("image {i}: {e}")))?;
            if !g.pow(self.source.moduli[i]).is_identity() {
                return Err(WitnessError::Invalid(format!(
                    "image {i} does not satisfy its modulus {}",
                    self.source.moduli[i]
                )));
            }
        }
        for i in 0..self.images.len() {
            for j in i + 1..self.images.len() {
                if self.images[i].mul(&self.images[j]) != self.images[j].mul(&self.images[i]) {
                    return Err(WitnessError::Invalid(format!(
                        "images {i} and {j} do not commute"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, element: &[u64]) -> Matrix {
        let mut acc = self.target.identity();
        for (g, &e) in self.images.iter().zip(element) {
            if e > 0 {
                acc = acc.mul(&g.pow(e));
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Witness pairs and certificates
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElementStatus {
    /// Every source element has a stored, re-checkable conjugator.
    Verified,
    /// Certified non-conjugacy at the named source element.
    Fails { at: Vec<u64>, reason: String },
    /// The search could not decide the named source element.
    Inconclusive { at: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlobalStatus {
    /// A verified global conjugator exists; the pair is NOT a witness.
    Found { conjugator: Matrix },
    /// The intertwiner space (or the whole group) was covered exhaustively
    /// at this level and holds no conjugator.
    Exhausted {
        level: String,
        method: ExhaustionMethod,
        dimension: Option<usize>,
        coverage: u128,
    },
    /// Obstruction derived once and valid at every field level.
    Symbolic { tag: String, detail: String },
    /// Out of budget.
    Unknown { dimension: usize, level: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExhaustionMethod {
    /// The whole coefficient space of the intertwiner basis was scanned.
    SpaceScan,
    /// A line (row or column) vanishes on the entire space, so no member is
    /// invertible; this covers the space without touching each member.
    StructuralZeroLine,
    /// Every group element was tried.
    GroupScan,
}

impl fmt::Display for ExhaustionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExhaustionMethod::SpaceScan => write!(f, "space-scan"),
            ExhaustionMethod::StructuralZeroLine => write!(f, "zero-line"),
            ExhaustionMethod::GroupScan => write!(f, "group-scan"),
        }
    }
}

/// Two homomorphisms with the same source and target plus verification
/// artifacts: per-element conjugators, a global certificate, and the chain
/// of constructions that produced the pair.
#[derive(Clone, Debug)]
pub struct WitnessPair {
    pub phi1: Hom,
    pub phi2: Hom,
    pub element_certificates: BTreeMap<Vec<u64>, Matrix>,
    pub element_status: Option<ElementStatus>,
    pub global_status: Option<GlobalStatus>,
    pub provenance: Vec<String>,
}

impl WitnessPair {
    pub fn new(phi1: Hom, phi2: Hom, provenance: Vec<String>) -> WitnessPair {
        assert_eq!(phi1.source, phi2.source);
        assert_eq!(phi1.target, phi2.target);
        WitnessPair {
            phi1,
            phi2,
            element_certificates: BTreeMap::new(),
            element_status: None,
            global_status: None,
            provenance,
        }
    }

    pub fn target(&self) -> &GroupSpec {
        &self.phi1.target
    }

    pub fn source(&self) -> &AbelianSource {
        &self.phi1.source
    }

    /// The pair with the two homomorphisms exchanged; certificates invert.
    pub fn swapped(&self) -> WitnessPair {
        let mut certs = BTreeMap::new();
        for (h, c) in &self.element_certificates {
            if let Ok(cinv) = c.inverse() {
                certs.insert(h.clone(), cinv);
            }
        }
        WitnessPair {
            phi1: self.phi2.clone(),
            phi2: self.phi1.clone(),
            element_certificates: certs,
            element_status: None,
            global_status: None,
            provenance: self.provenance.clone(),
        }
    }

    /// Exact re-assertion of every stored conjugator: membership and the
    /// conjugation identity, no search involved.
    pub fn recheck_certificates(&self) -> Result<(), WitnessError> {
        for (h, c) in &self.element_certificates {
            if self.target().membership(c).is_err() {
                return Err(WitnessError::Invalid(format!(
                    "certificate at {} is not a group member",
                    AbelianSource::label(h)
                )));
            }
            let x = self.phi1.eval(h);
            let y = self.phi2.eval(h);
            if c.mul(&x) != y.mul(c) {
                return Err(WitnessError::Invalid(format!(
                    "certificate at {} does not conjugate",
                    AbelianSource::label(h)
                )));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Deciders
// ---------------------------------------------------------------------------

/// Decide element-conjugacy for every source element.
///
/// With `use_stored`, a stored certificate that re-checks exactly is kept
/// without a new search (lifted pairs transfer their conjugators this way).
/// Searches record the lexicographically smallest conjugator their strategy
/// finds.
pub fn element_conjugate(
    pair: &WitnessPair,
    budget: u64,
    seed: u64,
    use_stored: bool,
) -> Result<(ElementStatus, BTreeMap<Vec<u64>, Matrix>), WitnessError> {
    pair.phi1.validate()?;
    pair.phi2.validate()?;
    let order = pair.source().order();
    if order > budget {
        return Err(WitnessError::Invalid(format!(
            "source order {order} exceeds the enumeration budget {budget}"
        )));
    }
    let mut certs = BTreeMap::new();
    for h in pair.source().elements() {
        let x = pair.phi1.eval(&h);
        let y = pair.phi2.eval(&h);
        if use_stored {
            if let Some(c) = pair.element_certificates.get(&h) {
                if pair.target().is_member(c) && c.mul(&x) == y.mul(c) {
                    certs.insert(h.clone(), c.clone());
                    continue;
                }
            }
        }
        match is_conjugate_in_group(pair.target(), &x, &y, budget, seed)? {
            ConjugacyOutcome::Found(c) => {
                certs.insert(h.clone(), c);
            }
            ConjugacyOutcome::NotConjugate(ev) => {
                return Ok((
                    ElementStatus::Fails {
                        at: h,
                        reason: format!("{ev:?}"),
                    },
                    certs,
                ));
            }
            ConjugacyOutcome::Unknown(_) => {
                return Ok((ElementStatus::Inconclusive { at: h }, certs));
            }
        }
    }
    Ok((ElementStatus::Verified, certs))
}

/// Decide global conjugacy through the simultaneous intertwiner space of
/// the generator image pairs.
pub fn globally_conjugate(pair: &WitnessPair, budget: u64) -> Result<GlobalStatus, WitnessError> {
    pair.phi1.validate()?;
    pair.phi2.validate()?;
    let target = pair.target();
    let level = target.field.level_label();
    let pairs: Vec<(Matrix, Matrix)> = pair
        .phi1
        .images
        .iter()
        .cloned()
        .zip(pair.phi2.images.iter().cloned())
        .collect();
    let basis = simultaneous_intertwiner(&pairs);
    let dim = basis.len();
    if dim == 0 {
        return Ok(GlobalStatus::Exhausted {
            level,
            method: ExhaustionMethod::SpaceScan,
            dimension: Some(0),
            coverage: 1,
        });
    }
    if common_zero_column(&basis).is_some() || common_zero_row(&basis).is_some() {
        return Ok(GlobalStatus::Exhausted {
            level,
            method: ExhaustionMethod::StructuralZeroLine,
            dimension: Some(dim),
            coverage: span_size(target.field.order(), dim),
        });
    }
    let total = span_size(target.field.order(), dim);
    if total <= budget as u128 {
        let mut best: Option<Matrix> = None;
        scan_span(&basis, |m| {
            if target.is_member(m) && best.as_ref().is_none_or(|b| m < b) {
                best = Some(m.clone());
            }
            false
        });
        return Ok(match best {
            Some(g) => {
                debug_assert!(pair
                    .source()
                    .elements()
                    .iter()
                    .all(|h| g.mul(&pair.phi1.eval(h)) == pair.phi2.eval(h).mul(&g)));
                GlobalStatus::Found { conjugator: g }
            }
            None => GlobalStatus::Exhausted {
                level,
                method: ExhaustionMethod::SpaceScan,
                dimension: Some(dim),
                coverage: total,
            },
        });
    }
    Ok(GlobalStatus::Unknown {
        dimension: dim,
        level,
    })
}

/// Decide global conjugacy by scanning every element of the target group
/// (budget-guarded). Independent of the intertwiner route.
pub fn globally_conjugate_group_scan(
    pair: &WitnessPair,
    budget: u64,
) -> Result<GlobalStatus, WitnessError> {
    let target = pair.target();
    let elements = target.generate(budget)?;
    let level = target.field.level_label();
    let mut best: Option<Matrix> = None;
    for g in &elements {
        let works = pair
            .phi1
            .images
            .iter()
            .zip(&pair.phi2.images)
            .all(|(x, y)| g.mul(x) == y.mul(g));
        if works && best.as_ref().is_none_or(|b| g < b) {
            best = Some(g.clone());
        }
    }
    Ok(match best {
        Some(g) => GlobalStatus::Found { conjugator: g },
        None => GlobalStatus::Exhausted {
            level,
            method: ExhaustionMethod::GroupScan,
            dimension: None,
            coverage: elements.len() as u128,
        },
    })
}

fn span_size(q: u64, dim: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..dim {
        acc = acc.saturating_mul(q as u128);
    }
    acc
}

/// The level-independent obstruction for the two-dimensional unipotent swap
/// family: with images I + aE and I + bE exchanged (a, b nonzero,
/// a^2 != b^2), the two intertwining equations force every candidate to be
/// strictly upper triangular, hence singular, over every extension.
///
/// The derived system is re-checked numerically at the current level before
/// the certificate is issued.
pub fn symbolic_global_obstruction(pair: &WitnessPair) -> Option<GlobalStatus> {
    let target = pair.target();
    if target.n != 2 || pair.phi1.images.len() != 2 {
        return None;
    }
    let spec = &target.field;
    let extract = |m: &Matrix| -> Option<FieldElement> {
        if m[(0, 0)].is_one() && m[(1, 1)].is_one() && m[(1, 0)].is_zero() {
            Some(m[(0, 1)].clone())
        } else {
            None
        }
    };
    let a = extract(&pair.phi1.images[0])?;
    let b = extract(&pair.phi1.images[1])?;
    let b2 = extract(&pair.phi2.images[0])?;
    let a2 = extract(&pair.phi2.images[1])?;
    if a != a2 || b != b2 || a.is_zero() || b.is_zero() {
        return None;
    }
    if a.mul_ref(&a) == b.mul_ref(&b) {
        return None;
    }
    // Machine check of the derived conclusion at this level: the
    // simultaneous space is exactly the strictly-upper-triangular line.
    let pairs: Vec<(Matrix, Matrix)> = pair
        .phi1
        .images
        .iter()
        .cloned()
        .zip(pair.phi2.images.iter().cloned())
        .collect();
    let basis = simultaneous_intertwiner(&pairs);
    if basis.len() != 1 {
        return None;
    }
    let e01 = {
        let mut m = Matrix::zero(spec, 2, 2);
        m.set(0, 1, spec.one());
        m
    };
    if basis[0] != e01 {
        return None;
    }
    Some(GlobalStatus::Symbolic {
        tag: "upper-unipotent-swap".into(),
        detail: format!(
            "the swapped intertwining equations force the (1,0), (1,1) and (0,0) \
             entries of any candidate to vanish (using only a, b nonzero and \
             a^2 != b^2 with a = {a}, b = {b}), so every candidate is strictly \
             upper triangular and singular at every field level"
        ),
    })
}

// ---------------------------------------------------------------------------
// Base witnesses
// ---------------------------------------------------------------------------

fn upper_unipotent(spec: &FieldSpec, c: &FieldElement) -> Matrix {
    let mut m = Matrix::identity(spec, 2);
    m.set(0, 1, c.clone());
    m
}

/// F_p-linear independence of a set of field elements, via the rank of the
/// coordinate matrix over the prime field.
pub fn independent_over_prime_field(xs: &[&FieldElement]) -> bool {
    let spec = xs[0].spec().clone();
    let p = spec.p();
    let k = spec.k();
    let mut rows: Vec<Vec<u64>> = xs.iter().map(|x| x.coeffs().to_vec()).collect();
    let mut rank = 0;
    for col in 0..k {
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = crate::field_tower::pow_mod_u64(rows[rank][col], (p - 2) as u128, p);
        for c in 0..k {
            rows[rank][c] = rows[rank][c] * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] != 0 {
                let f = rows[r][col];
                for c in 0..k {
                    rows[r][c] = (rows[r][c] + (p - f) * rows[rank][c] % p) % p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank == xs.len()
}

/// The two-dimensional unipotent pair: images I + aE and I + bE with the
/// roles of a and b exchanged. Requires a, b independent over the prime
/// field (strictly stronger than a^2 != b^2; dependence with ratio outside
/// {1, -1} breaks element-conjugacy).
pub fn witness_gl2(
    field: &FieldSpec,
    a: &FieldElement,
    b: &FieldElement,
) -> Result<WitnessPair, WitnessError> {
    if a.is_zero() || b.is_zero() {
        return Err(WitnessError::Invalid("a and b must be nonzero".into()));
    }
    if !independent_over_prime_field(&[a, b]) {
        return Err(WitnessError::Invalid(format!(
            "a = {a} and b = {b} must be linearly independent over F_{}",
            field.p()
        )));
    }
    Ok(witness_gl2_unchecked(field, a, b))
}

/// Test hook: the same pair without the independence precondition. Used to
/// demonstrate that the element decider is not vacuous.
#[doc(hidden)]
pub fn witness_gl2_unchecked(field: &FieldSpec, a: &FieldElement, b: &FieldElement) -> WitnessPair {
    let target = GroupSpec::gl(2, field);
    let p = field.p();
    let source = AbelianSource::new(vec![p, p]);
    let phi1 = Hom::new(
        source.clone(),
        target.clone(),
        vec![upper_unipotent(field, a), upper_unipotent(field, b)],
    );
    let phi2 = Hom::new(
        source,
        target,
        vec![upper_unipotent(field, b), upper_unipotent(field, a)],
    );
    WitnessPair::new(phi1, phi2, vec![format!("base:gl2(a={a}, b={b})")])
}

/// The symplectic 2x2 witness: same unipotent pair inside Sp(2) = SL(2),
/// with a a nonzero square outside the prime field.
pub fn witness_sp2(field: &FieldSpec, a: &FieldElement) -> Result<WitnessPair, WitnessError> {
    if a.is_zero() {
        return Err(WitnessError::Invalid("a must be nonzero".into()));
    }
    if a.in_prime_field() {
        return Err(WitnessError::Invalid(
            "a must lie outside the prime field".into(),
        ));
    }
    if !is_square(a) {
        return Err(WitnessError::Invalid(format!(
            "a = {a} is not a square at level {}; extend the field first",
            field.level_label()
        )));
    }
    let target = GroupSpec::symplectic(2, field)?;
    let one = field.one();
    let p = field.p();
    let source = AbelianSource::new(vec![p, p]);
    let phi1 = Hom::new(
        source.clone(),
        target.clone(),
        vec![upper_unipotent(field, &one), upper_unipotent(field, a)],
    );
    let phi2 = Hom::new(
        source,
        target,
        vec![upper_unipotent(field, a), upper_unipotent(field, &one)],
    );
    Ok(WitnessPair::new(
        phi1,
        phi2,
        vec![format!("base:sp2(a={a})")],
    ))
}

/// The special linear 2x2 witness: Sp(2) and SL(2) coincide, so the same
/// matrices retargeted.
pub fn witness_sl2(field: &FieldSpec, a: &FieldElement) -> Result<WitnessPair, WitnessError> {
    let sp = witness_sp2(field, a)?;
    let target = GroupSpec::sl(2, field);
    let phi1 = Hom::new(
        sp.phi1.source.clone(),
        target.clone(),
        sp.phi1.images.clone(),
    );
    let phi2 = Hom::new(sp.phi2.source.clone(), target, sp.phi2.images.clone());
    let mut prov = sp.provenance.clone();
    prov.push("retarget:sl2-equals-sp2".into());
    Ok(WitnessPair::new(phi1, phi2, prov))
}

/// The unitary 4x4 witness at base q = p^m, m >= 2.
///
/// Images are I + c N with N = E_{01} - E_{23} and c in {1, a}; the
/// antidiagonal hermitian form is preserved exactly when sigma fixes c, so
/// a must come from F_q (and lie outside F_p to keep {1, a} independent).
pub fn witness_u4(base_q: u64, a: &FieldElement) -> Result<WitnessPair, WitnessError> {
    let p = a.spec().p();
    let m = base_q_exponent(p, base_q)?;
    if m < 2 {
        return Err(WitnessError::OutOfCoverage(format!(
            "the unitary witness needs base q = p^m with m >= 2 (got q = {base_q}): \
             its coefficients must be sigma-fixed yet outside the prime field"
        )));
    }
    let level = make_field(p, 2 * m)?;
    let a = if a.spec() == &level {
        a.clone()
    } else {
        embed(a, &level)?
    };
    if a.is_zero() {
        return Err(WitnessError::Invalid("a must be nonzero".into()));
    }
    if unitary_sigma(&a, base_q)? != a {
        return Err(WitnessError::Invalid(format!(
            "a = {a} is not fixed by sigma: the images would not preserve the form"
        )));
    }
    if a.in_prime_field() {
        return Err(WitnessError::Invalid(
            "a must lie outside the prime field".into(),
        ));
    }
    let target = GroupSpec::unitary(4, &level, base_q)?;
    let image = |c: &FieldElement| {
        let mut x = Matrix::identity(&level, 4);
        x.set(0, 1, c.clone());
        x.set(2, 3, c.neg_ref());
        x
    };
    let one = level.one();
    let source = AbelianSource::new(vec![p, p]);
    let phi1 = Hom::new(source.clone(), target.clone(), vec![image(&one), image(&a)]);
    let phi2 = Hom::new(source, target, vec![image(&a), image(&one)]);
    Ok(WitnessPair::new(
        phi1,
        phi2,
        vec![format!("base:u4(q={base_q}, a={a})")],
    ))
}

fn block_alpha(spec: &FieldSpec, c: &FieldElement) -> (Matrix, Matrix) {
    // (alpha_c, transpose(alpha_c)^{-1}) as 2x2 blocks.
    let mut top = Matrix::identity(spec, 2);
    top.set(0, 1, c.clone());
    let mut bot = Matrix::identity(spec, 2);
    bot.set(1, 0, c.neg_ref());
    (top, bot)
}

/// The odd orthogonal 5x5 witness for the split form with identity
/// off-blocks: block images diag(alpha_c, 1, transpose(alpha_c)^{-1}).
pub fn witness_o5(field: &FieldSpec, a: &FieldElement) -> Result<WitnessPair, WitnessError> {
    if a.is_zero() {
        return Err(WitnessError::Invalid("a must be nonzero".into()));
    }
    if a.in_prime_field() {
        return Err(WitnessError::Invalid(
            "a must lie outside the prime field".into(),
        ));
    }
    let form = form_matrix(&FormKind::O5SplitIdentity, 5, field, None)?;
    let target = GroupSpec::with_form(GroupFamily::OOdd, 5, field, None, form)?;
    let image = |c: &FieldElement| {
        let (top, bot) = block_alpha(field, c);
        Matrix::block_diagonal(&[top, Matrix::identity(field, 1), bot])
    };
    let one = field.one();
    let p = field.p();
    let source = AbelianSource::new(vec![p, p]);
    let phi1 = Hom::new(source.clone(), target.clone(), vec![image(&one), image(a)]);
    let phi2 = Hom::new(source, target, vec![image(a), image(&one)]);
    Ok(WitnessPair::new(
        phi1,
        phi2,
        vec![format!("base:o5(a={a})")],
    ))
}

/// The even orthogonal 4x4 witness for the form [[0, I], [I, 0]].
pub fn witness_o4(field: &FieldSpec, a: &FieldElement) -> Result<WitnessPair, WitnessError> {
    if a.is_zero() {
        return Err(WitnessError::Invalid("a must be nonzero".into()));
    }
    if a.in_prime_field() {
        return Err(WitnessError::Invalid(
            "a must lie outside the prime field".into(),
        ));
    }
    let form = form_matrix(&FormKind::O4SplitIdentity, 4, field, None)?;
    let target = GroupSpec::with_form(GroupFamily::OEven, 4, field, None, form)?;
    let image = |c: &FieldElement| {
        let (top, bot) = block_alpha(field, c);
        Matrix::block_diagonal(&[top, bot])
    };
    let one = field.one();
    let p = field.p();
    let source = AbelianSource::new(vec![p, p]);
    let phi1 = Hom::new(source.clone(), target.clone(), vec![image(&one), image(a)]);
    let phi2 = Hom::new(source, target, vec![image(a), image(&one)]);
    Ok(WitnessPair::new(
        phi1,
        phi2,
        vec![format!("base:o4(a={a})")],
    ))
}

// ---------------------------------------------------------------------------
// Lifts
// ---------------------------------------------------------------------------

/// How a small group pads into a block of a larger one.
#[derive(Clone, Debug)]
pub enum PadMode {
    /// A -> diag(A, I_k).
    IdentityTail(usize),
    /// A -> diag(A, det(A)^{-1}).
    DetInverseTail,
    /// A -> diag(det(A)^{-1}, 1, A).
    DetInverseHead,
    /// A -> diag(1, A, 1) (insert between the outermost coordinates).
    Border,
}

/// Embedding of the witness target into a centralizer block of the larger
/// group: pad to the right size, then optionally conjugate into position.
#[derive(Clone, Debug)]
pub struct BlockEmbedding {
    pub pad: PadMode,
    pub conjugator: Option<Matrix>,
}

impl BlockEmbedding {
    pub fn apply(&self, m: &Matrix) -> Matrix {
        let spec = m.spec().clone();
        let padded = match &self.pad {
            PadMode::IdentityTail(k) => {
                Matrix::block_diagonal(&[m.clone(), Matrix::identity(&spec, *k)])
            }
            PadMode::DetInverseTail => {
                let d = m.det().inverse().expect("embedding an invertible image");
                Matrix::block_diagonal(&[m.clone(), Matrix::new(&spec, 1, 1, vec![d])])
            }
            PadMode::DetInverseHead => {
                let d = m.det().inverse().expect("embedding an invertible image");
                Matrix::block_diagonal(&[
                    Matrix::new(&spec, 1, 1, vec![d]),
                    Matrix::identity(&spec, 1),
                    m.clone(),
                ])
            }
            PadMode::Border => Matrix::block_diagonal(&[
                Matrix::identity(&spec, 1),
                m.clone(),
                Matrix::identity(&spec, 1),
            ]),
        };
        match &self.conjugator {
            Some(c) => c
                .mul(&padded)
                .mul(&c.inverse().expect("conjugator invertible")),
            None => padded,
        }
    }
}

/// Lift a witness through a centralizer: the source gains a cyclic factor
/// generated by `a`, the images embed block-wise, and stored element
/// conjugators transfer through the embedding (each transferred certificate
/// is re-checked exactly; deciders re-verify the lifted pair on demand).
pub fn lift_via_centralizer(
    pair: &WitnessPair,
    a: &Matrix,
    embedding: &BlockEmbedding,
    target: &GroupSpec,
    order_budget: u64,
) -> Result<WitnessPair, WitnessError> {
    target.membership(a).map_err(GroupError::NonMember)?;
    let m = a
        .multiplicative_order(order_budget)
        .ok_or_else(|| WitnessError::Invalid("order of a exceeds the budget".into()))?;

    let mut embedded_images: Vec<Vec<Matrix>> = Vec::new();
    for hom in [&pair.phi1, &pair.phi2] {
        let mut images = Vec::new();
        for (i, g) in hom.images.iter().enumerate() {
            let ig = embedding.apply(g);
            target.membership(&ig).map_err(|e| {
                WitnessError::Invalid(format!("embedded image {i} not in target: {e}"))
            })?;
            if ig.mul(a) != a.mul(&ig) {
                return Err(WitnessError::Invalid(format!(
                    "a does not centralize embedded image {i}"
                )));
            }
            images.push(ig);
        }
        // Homomorphism check on the generators.
        for i in 0..hom.images.len() {
            for j in 0..hom.images.len() {
                let lhs = embedding.apply(&hom.images[i].mul(&hom.images[j]));
                let rhs = embedding
                    .apply(&hom.images[i])
                    .mul(&embedding.apply(&hom.images[j]));
                if lhs != rhs {
                    return Err(WitnessError::Invalid(
                        "embedding is not a homomorphism on the images".into(),
                    ));
                }
            }
        }
        embedded_images.push(images);
    }
    if !embedding.apply(&pair.target().identity()).is_identity() {
        return Err(WitnessError::Invalid(
            "embedding does not preserve the identity".into(),
        ));
    }

    let mut moduli = pair.source().moduli.clone();
    moduli.push(m);
    let source = AbelianSource::new(moduli);
    let mut images1 = embedded_images.remove(0);
    let mut images2 = embedded_images.remove(0);
    images1.push(a.clone());
    images2.push(a.clone());
    let phi1 = Hom::new(source.clone(), target.clone(), images1);
    let phi2 = Hom::new(source, target.clone(), images2);

    let mut out = WitnessPair::new(phi1, phi2, pair.provenance.clone());
    out.provenance
        .push(format!("lift:centralizer(order={m}, target={target})"));
    // Transfer element certificates: conjugators embed and commute with a.
    for (h_old, c) in &pair.element_certificates {
        let ic = embedding.apply(c);
        for j in 0..m {
            let mut h = h_old.clone();
            h.push(j);
            let x = out.phi1.eval(&h);
            let y = out.phi2.eval(&h);
            if target.is_member(&ic) && ic.mul(&x) == y.mul(&ic) {
                out.element_certificates.insert(h, ic.clone());
            }
        }
    }
    out.phi1.validate()?;
    out.phi2.validate()?;
    Ok(out)
}

/// Scale every generator image into the special linear group by the unique
/// n-th root of its inverse determinant. Requires gcd(n, q - 1) = 1 so the
/// power map is bijective; element conjugators carry over after the same
/// determinant correction, and both decider outcomes are preserved.
pub fn sl_witness_via_det_twist(pair: &WitnessPair) -> Result<WitnessPair, WitnessError> {
    let gl_target = pair.target();
    if gl_target.family != GroupFamily::Gl {
        return Err(WitnessError::Invalid(
            "determinant twist starts from a general linear witness".into(),
        ));
    }
    let n = gl_target.n as u64;
    let field = gl_target.field.clone();
    let order = field.unit_order();
    if crate::field_tower::gcd_u64(n % order, order) != 1
        && crate::field_tower::gcd_u64(n, order) != 1
    {
        return Err(WitnessError::Invalid(format!(
            "power map x -> x^{n} is not bijective on F_{} (gcd with {order} is not 1)",
            field.level_label()
        )));
    }
    let target = GroupSpec::sl(gl_target.n, &field);
    let twist = |m: &Matrix| -> Result<Matrix, WitnessError> {
        let d = m.det();
        let gamma = power_map_inverse(&d.inverse()?, n)?;
        Ok(m.scale(&gamma))
    };
    let mut homs = Vec::new();
    for hom in [&pair.phi1, &pair.phi2] {
        let images: Result<Vec<Matrix>, _> = hom.images.iter().map(&twist).collect();
        homs.push(Hom::new(hom.source.clone(), target.clone(), images?));
    }
    let phi2 = homs.pop().unwrap();
    let phi1 = homs.pop().unwrap();
    let mut out = WitnessPair::new(phi1, phi2, pair.provenance.clone());
    out.provenance.push(format!("twist:det-root(n={n})"));
    // Conjugators transfer after rescaling to determinant one (always
    // possible under the same gcd condition).
    for (h, c) in &pair.element_certificates {
        let d = c.det();
        if d.is_zero() {
            continue;
        }
        if let Ok(gamma) = power_map_inverse(&d.inverse().unwrap(), n) {
            let sc = c.scale(&gamma);
            let x = out.phi1.eval(h);
            let y = out.phi2.eval(h);
            if target.is_member(&sc) && sc.mul(&x) == y.mul(&sc) {
                out.element_certificates.insert(h.clone(), sc);
            }
        }
    }
    out.phi1.validate()?;
    out.phi2.validate()?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Transport between form conventions
// ---------------------------------------------------------------------------

/// Move a witness between two pinned forms of the same family and size.
/// Returns the transported pair; fails when the forms are inequivalent.
pub fn transport_witness(
    pair: &WitnessPair,
    new_target: &GroupSpec,
) -> Result<WitnessPair, WitnessError> {
    let old = pair.target();
    if old.family != new_target.family || old.n != new_target.n || old.field != new_target.field {
        return Err(WitnessError::Invalid(
            "transport keeps the family, size, and field level".into(),
        ));
    }
    let t = match (old.form.as_ref(), new_target.form.as_ref()) {
        (None, None) => return Ok(retarget(pair, new_target)),
        (Some(j1), Some(j2)) => match old.family {
            GroupFamily::U => hermitian_transport(j1, j2, old.base_q.expect("unitary spec")),
            GroupFamily::Sp => {
                return Err(WitnessError::Invalid(
                    "only the standard symplectic form is pinned".into(),
                ))
            }
            _ => symmetric_transport(j1, j2).ok_or_else(|| {
                WitnessError::Invalid(
                    "the two symmetric forms are inequivalent (different discriminant class)"
                        .into(),
                )
            })?,
        },
        _ => {
            return Err(WitnessError::Invalid(
                "either both specs carry forms or neither does".into(),
            ))
        }
    };
    let tinv = t.inverse()?;
    let map = |m: &Matrix| t.mul(m).mul(&tinv);
    let mut out = WitnessPair::new(
        Hom::new(
            pair.phi1.source.clone(),
            new_target.clone(),
            pair.phi1.images.iter().map(&map).collect(),
        ),
        Hom::new(
            pair.phi2.source.clone(),
            new_target.clone(),
            pair.phi2.images.iter().map(&map).collect(),
        ),
        pair.provenance.clone(),
    );
    out.provenance.push(format!(
        "transport:form({} -> {})",
        old.named_form().unwrap_or_else(|| "inline".into()),
        new_target.named_form().unwrap_or_else(|| "inline".into())
    ));
    for (h, c) in &pair.element_certificates {
        out.element_certificates.insert(h.clone(), map(c));
    }
    out.phi1.validate()?;
    out.phi2.validate()?;
    out.recheck_certificates()?;
    Ok(out)
}

fn retarget(pair: &WitnessPair, new_target: &GroupSpec) -> WitnessPair {
    let mut out = WitnessPair::new(
        Hom::new(
            pair.phi1.source.clone(),
            new_target.clone(),
            pair.phi1.images.clone(),
        ),
        Hom::new(
            pair.phi2.source.clone(),
            new_target.clone(),
            pair.phi2.images.clone(),
        ),
        pair.provenance.clone(),
    );
    out.element_certificates = pair.element_certificates.clone();
    out
}

/// Embed a witness one field level up (doubling the degree); the stability
/// re-verification runs the global decider again at the new level.
pub fn embed_witness(pair: &WitnessPair) -> Result<WitnessPair, WitnessError> {
    let old = pair.target();
    let new_field = extension_step(&old.field)?;
    let new_target = match old.family {
        GroupFamily::Gl => GroupSpec::gl(old.n, &new_field),
        GroupFamily::Sl => GroupSpec::sl(old.n, &new_field),
        GroupFamily::U => {
            // One extension step squares the base: U(n, q) -> U(n, q^2).
            let q = old.base_q.expect("unitary spec");
            GroupSpec::with_form(
                GroupFamily::U,
                old.n,
                &new_field,
                Some(q * q),
                old.form.as_ref().unwrap().embed(&new_field)?,
            )?
        }
        _ => GroupSpec::with_form(
            old.family,
            old.n,
            &new_field,
            None,
            old.form.as_ref().unwrap().embed(&new_field)?,
        )?,
    };
    let images1: Result<Vec<_>, _> = pair
        .phi1
        .images
        .iter()
        .map(|m| m.embed(&new_field))
        .collect();
    let images2: Result<Vec<_>, _> = pair
        .phi2
        .images
        .iter()
        .map(|m| m.embed(&new_field))
        .collect();
    let mut out = WitnessPair::new(
        Hom::new(pair.phi1.source.clone(), new_target.clone(), images1?),
        Hom::new(pair.phi2.source.clone(), new_target, images2?),
        pair.provenance.clone(),
    );
    out.provenance
        .push(format!("embed:level({})", new_field.level_label()));
    for (h, c) in &pair.element_certificates {
        out.element_certificates
            .insert(h.clone(), c.embed(&new_field)?);
    }
    Ok(out)
}
