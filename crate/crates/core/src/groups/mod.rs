//! The classical groups as explicit matrix groups: membership with reasons,
//! breadth-first generation of small groups, centralizer spaces, and
//! conjugacy decisions inside the group.
//!
//! Group data is immutable after construction; generation returns a
//! canonically sorted element list, so results are order-independent.

mod conjugacy;

pub use conjugacy::{
    conjugacy_classes, is_conjugate_in_group, ConjugacyOutcome, NonConjugacyEvidence, UnknownReason,
};

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::field_tower::{base_q_exponent, FieldElement, FieldError, FieldSpec};
use crate::matrixlab::{
    form_matrix, intertwiner_space, is_hermitian, is_symmetric, is_zero_diag_alternating, FormKind,
    Matrix, MatrixError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("matrix is not a member: {0}")]
    NonMember(MembershipFailure),
    #[error("budget exceeded: need {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("group closure reached {got} elements, expected {want}")]
    GenerationIncomplete { got: usize, want: u128 },
    #[error("invalid group description: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// First failed membership condition.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MembershipFailure {
    #[error("shape mismatch: expected {want}x{want}, got {r}x{c}")]
    Shape { want: usize, r: usize, c: usize },
    #[error("field level mismatch: expected {want}, got {got}")]
    Level { want: String, got: String },
    #[error("matrix is singular")]
    NotInvertible,
    #[error("determinant is {got}, not 1")]
    DetNotOne { got: String },
    #[error("the sesquilinear form is not preserved")]
    HermitianFormNotPreserved,
    #[error("the bilinear form is not preserved")]
    BilinearFormNotPreserved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupFamily {
    Gl,
    Sl,
    U,
    Sp,
    OOdd,
    OEven,
}

impl GroupFamily {
    pub fn label(&self) -> &'static str {
        match self {
            GroupFamily::Gl => "GL",
            GroupFamily::Sl => "SL",
            GroupFamily::U => "U",
            GroupFamily::Sp => "Sp",
            GroupFamily::OOdd => "Oodd",
            GroupFamily::OEven => "Oeven",
        }
    }

    pub fn parse(s: &str) -> Option<GroupFamily> {
        match s {
            "GL" | "gl" => Some(GroupFamily::Gl),
            "SL" | "sl" => Some(GroupFamily::Sl),
            "U" | "u" => Some(GroupFamily::U),
            "Sp" | "sp" => Some(GroupFamily::Sp),
            "Oodd" | "oodd" | "OOdd" => Some(GroupFamily::OOdd),
            "Oeven" | "oeven" | "OEven" => Some(GroupFamily::OEven),
            _ => None,
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A concrete classical group: family, size, field level, and (except for
/// the linear families) the pinned form matrix. Forms are always explicit;
/// moving a witness between form conventions is a separate, explicit
/// transport operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub family: GroupFamily,
    pub n: usize,
    pub field: FieldSpec,
    /// For U only: q, with the group inside GL(n, q^2).
    pub base_q: Option<u64>,
    pub form: Option<Matrix>,
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            GroupFamily::U => write!(
                f,
                "U({}, q={}) over {}",
                self.n,
                self.base_q.unwrap_or(0),
                self.field
            ),
            _ => write!(f, "{}({}) over {}", self.family, self.n, self.field),
        }
    }
}

impl GroupSpec {
    pub fn gl(n: usize, field: &FieldSpec) -> GroupSpec {
        GroupSpec {
            family: GroupFamily::Gl,
            n,
            field: field.clone(),
            base_q: None,
            form: None,
        }
    }

    pub fn sl(n: usize, field: &FieldSpec) -> GroupSpec {
        GroupSpec {
            family: GroupFamily::Sl,
            n,
            field: field.clone(),
            base_q: None,
            form: None,
        }
    }

    pub fn symplectic(n: usize, field: &FieldSpec) -> Result<GroupSpec, GroupError> {
        let form = form_matrix(&FormKind::Symplectic, n, field, None)?;
        GroupSpec::with_form(GroupFamily::Sp, n, field, None, form)
    }

    pub fn unitary(n: usize, field: &FieldSpec, base_q: u64) -> Result<GroupSpec, GroupError> {
        let form = form_matrix(&FormKind::HermitianAntidiag, n, field, None)?;
        GroupSpec::with_form(GroupFamily::U, n, field, Some(base_q), form)
    }

    pub fn orthogonal_odd(n: usize, field: &FieldSpec) -> Result<GroupSpec, GroupError> {
        let form = form_matrix(&FormKind::OrthOddStandard, n, field, None)?;
        GroupSpec::with_form(GroupFamily::OOdd, n, field, None, form)
    }

    pub fn orthogonal_even(n: usize, field: &FieldSpec) -> Result<GroupSpec, GroupError> {
        let form = form_matrix(&FormKind::OrthEvenStandard, n, field, None)?;
        GroupSpec::with_form(GroupFamily::OEven, n, field, None, form)
    }

    /// Build a spec with an explicit form matrix, validating the form
    /// invariants for the family.
    pub fn with_form(
        family: GroupFamily,
        n: usize,
        field: &FieldSpec,
        base_q: Option<u64>,
        form: Matrix,
    ) -> Result<GroupSpec, GroupError> {
        match family {
            GroupFamily::Gl | GroupFamily::Sl => {
                return Err(GroupError::BadSpec("linear groups carry no form".into()))
            }
            GroupFamily::U => {
                let q = base_q
                    .ok_or_else(|| GroupError::BadSpec("unitary groups need base_q".into()))?;
                let m = base_q_exponent(field.p(), q)?;
                if field.k() != 2 * m {
                    return Err(GroupError::BadSpec(format!(
                        "U needs the field level F_{}^{}, got {}",
                        field.p(),
                        2 * m,
                        field
                    )));
                }
                if !is_hermitian(&form, q) || !form.is_invertible() {
                    return Err(GroupError::BadSpec(
                        "unitary form must be invertible hermitian".into(),
                    ));
                }
            }
            GroupFamily::Sp => {
                if !n.is_multiple_of(2) {
                    return Err(GroupError::BadSpec("Sp needs even size".into()));
                }
                if !is_zero_diag_alternating(&form) || !form.is_invertible() {
                    return Err(GroupError::BadSpec(
                        "symplectic form must be invertible alternating with zero diagonal".into(),
                    ));
                }
            }
            GroupFamily::OOdd | GroupFamily::OEven => {
                let want_odd = family == GroupFamily::OOdd;
                if (n % 2 == 1) != want_odd {
                    return Err(GroupError::BadSpec(format!(
                        "orthogonal family parity mismatch for n = {n}"
                    )));
                }
                if !is_symmetric(&form) || !form.is_invertible() {
                    return Err(GroupError::BadSpec(
                        "orthogonal form must be invertible symmetric".into(),
                    ));
                }
            }
        }
        if form.rows() != n || form.spec() != field {
            return Err(GroupError::BadSpec(
                "form size or field level does not match the group".into(),
            ));
        }
        Ok(GroupSpec {
            family,
            n,
            field: field.clone(),
            base_q,
            form: Some(form),
        })
    }

    pub fn identity(&self) -> Matrix {
        Matrix::identity(&self.field, self.n)
    }

    /// Field size q (for U this is q^2, the level the matrices live at).
    pub fn level_order(&self) -> u64 {
        self.field.order()
    }

    /// Exact group order (saturating); the guard for exhaustive generation.
    pub fn order(&self) -> u128 {
        let q = self.field.order() as u128;
        let n = self.n as u32;
        let sat_pow = |b: u128, e: u32| -> u128 {
            let mut acc: u128 = 1;
            for _ in 0..e {
                acc = acc.saturating_mul(b);
            }
            acc
        };
        match self.family {
            GroupFamily::Gl => {
                let qn = sat_pow(q, n);
                (0..n).fold(1u128, |acc, i| {
                    acc.saturating_mul(qn.saturating_sub(sat_pow(q, i)))
                })
            }
            GroupFamily::Sl => {
                let gl = GroupSpec::gl(self.n, &self.field).order();
                gl / (q - 1)
            }
            GroupFamily::U => {
                // Here the field level is q^2; the formula is in base q.
                let q0 = self.base_q.unwrap() as u128;
                let mut acc = sat_pow(q0, n * (n - 1) / 2);
                for i in 1..=n {
                    let term = if i % 2 == 0 {
                        sat_pow(q0, i) - 1
                    } else {
                        sat_pow(q0, i) + 1
                    };
                    acc = acc.saturating_mul(term);
                }
                acc
            }
            GroupFamily::Sp => {
                let m = (self.n / 2) as u32;
                let mut acc = sat_pow(q, m * m);
                for i in 1..=m {
                    acc = acc.saturating_mul(sat_pow(q, 2 * i) - 1);
                }
                acc
            }
            GroupFamily::OOdd => {
                let m = ((self.n - 1) / 2) as u32;
                let mut acc = 2u128.saturating_mul(sat_pow(q, m * m));
                for i in 1..=m {
                    acc = acc.saturating_mul(sat_pow(q, 2 * i) - 1);
                }
                acc
            }
            GroupFamily::OEven => {
                let m = (self.n / 2) as u32;
                let eps_plus = self.even_orthogonal_is_plus_type();
                let mut acc = 2u128.saturating_mul(sat_pow(q, m * (m - 1)));
                acc = acc.saturating_mul(if eps_plus {
                    sat_pow(q, m) - 1
                } else {
                    sat_pow(q, m) + 1
                });
                for i in 1..m {
                    acc = acc.saturating_mul(sat_pow(q, 2 * i) - 1);
                }
                acc
            }
        }
    }

    /// Witt type of an even orthogonal form: plus iff (-1)^m det(J) is a
    /// square.
    fn even_orthogonal_is_plus_type(&self) -> bool {
        let j = self.form.as_ref().expect("orthogonal spec has a form");
        let m = self.n / 2;
        let mut d = j.det();
        if m % 2 == 1 {
            d = d.neg_ref();
        }
        crate::field_tower::is_square(&d)
    }

    /// Membership test reporting the first failed condition.
    pub fn membership(&self, m: &Matrix) -> Result<(), MembershipFailure> {
        if !m.is_square() || m.rows() != self.n {
            return Err(MembershipFailure::Shape {
                want: self.n,
                r: m.rows(),
                c: m.cols(),
            });
        }
        if m.spec() != &self.field {
            return Err(MembershipFailure::Level {
                want: self.field.to_string(),
                got: m.spec().to_string(),
            });
        }
        match self.family {
            GroupFamily::Gl => {
                if !m.is_invertible() {
                    return Err(MembershipFailure::NotInvertible);
                }
            }
            GroupFamily::Sl => {
                let d = m.det();
                if !d.is_one() {
                    if d.is_zero() {
                        return Err(MembershipFailure::NotInvertible);
                    }
                    return Err(MembershipFailure::DetNotOne { got: d.to_string() });
                }
            }
            GroupFamily::U => {
                let j = self.form.as_ref().unwrap();
                let q = self.base_q.unwrap();
                let ct = m
                    .conj_transpose(q)
                    .expect("level validated at construction");
                if ct.mul(j).mul(m) != *j {
                    return Err(MembershipFailure::HermitianFormNotPreserved);
                }
            }
            GroupFamily::Sp | GroupFamily::OOdd | GroupFamily::OEven => {
                let j = self.form.as_ref().unwrap();
                if m.transpose().mul(j).mul(m) != *j {
                    return Err(MembershipFailure::BilinearFormNotPreserved);
                }
            }
        }
        Ok(())
    }

    pub fn is_member(&self, m: &Matrix) -> bool {
        self.membership(m).is_ok()
    }

    /// Standard generators: transvections adapted to the form (reflections
    /// for the orthogonal and unitary families), plus a torus generator
    /// where the determinant group is bigger than 1.
    pub fn generators(&self) -> Vec<Matrix> {
        let spec = &self.field;
        let n = self.n;
        let mut gens: Vec<Matrix> = Vec::new();
        // F_p-basis of the field: 1, t, ..., t^{k-1}.
        let mut field_basis = Vec::new();
        let t = spec.gen();
        let mut acc = spec.one();
        for _ in 0..spec.k() {
            field_basis.push(acc.clone());
            acc = acc.mul_ref(&t);
        }
        match self.family {
            GroupFamily::Gl | GroupFamily::Sl => {
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        for c in &field_basis {
                            let mut g = Matrix::identity(spec, n);
                            g.set(i, j, c.clone());
                            gens.push(g);
                        }
                    }
                }
                if self.family == GroupFamily::Gl {
                    let mut d = Matrix::identity(spec, n);
                    d.set(0, 0, spec.multiplicative_generator());
                    gens.push(d);
                }
            }
            GroupFamily::Sp => {
                // Symplectic transvections x -> x + c <x, v> v over all
                // projective vectors (first nonzero coordinate 1).
                let j = self.form.as_ref().unwrap();
                for v in projective_vectors(spec, n) {
                    for c in &field_basis {
                        let g = symplectic_transvection(j, &v, c);
                        gens.push(g);
                    }
                }
            }
            GroupFamily::OOdd | GroupFamily::OEven => {
                // Reflections along anisotropic vectors.
                let j = self.form.as_ref().unwrap();
                for v in projective_vectors(spec, n) {
                    let qv = bilinear_value(j, &v, &v);
                    if qv.is_zero() {
                        continue;
                    }
                    gens.push(reflection(j, &v, &qv));
                }
            }
            GroupFamily::U => {
                // Unitary quasi-reflections r_{v, zeta} for anisotropic v and
                // zeta on the norm-one circle.
                let j = self.form.as_ref().unwrap();
                let q = self.base_q.unwrap();
                let circle: Vec<FieldElement> = spec
                    .elements()
                    .filter(|z| {
                        !z.is_zero()
                            && z.mul_ref(&crate::field_tower::unitary_sigma(z, q).unwrap())
                                .is_one()
                            && !z.is_one()
                    })
                    .collect();
                for v in projective_vectors(spec, n) {
                    let qv = sigma_bilinear_value(j, &v, &v, q);
                    if qv.is_zero() {
                        continue;
                    }
                    for zeta in &circle {
                        gens.push(unitary_reflection(j, &v, &qv, zeta, q));
                    }
                }
            }
        }
        for g in &gens {
            debug_assert!(self.is_member(g), "generator fails membership");
        }
        gens
    }

    /// Complete element list by breadth-first closure from the standard
    /// generators, with membership asserted for each element and the final
    /// count checked against the order formula. Canonically sorted.
    pub fn generate(&self, budget: u64) -> Result<Vec<Matrix>, GroupError> {
        let order = self.order();
        if order > budget as u128 {
            return Err(GroupError::BudgetExceeded {
                needed: order,
                budget,
            });
        }
        let gens = self.generators();
        let mut seen: HashSet<Matrix> = HashSet::with_capacity(order as usize);
        let mut queue: VecDeque<Matrix> = VecDeque::new();
        let id = self.identity();
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = x.mul(g);
                if !seen.contains(&y) {
                    if let Err(reason) = self.membership(&y) {
                        return Err(GroupError::NonMember(reason));
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        if seen.len() as u128 != order {
            return Err(GroupError::GenerationIncomplete {
                got: seen.len(),
                want: order,
            });
        }
        let mut out: Vec<Matrix> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    /// JSON description with the form inlined or named.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "family": self.family.label(),
            "n": self.n,
            "field": self.field.to_string(),
        });
        if let Some(q) = self.base_q {
            v["base_q"] = serde_json::json!(q);
        }
        if let Some(form) = &self.form {
            v["form"] = serde_json::json!(self.named_form().unwrap_or_else(|| form.to_string()));
        }
        v
    }

    /// Parse the JSON description; the form may be a named preset or an
    /// inline matrix in the text format.
    pub fn from_json(v: &serde_json::Value) -> Result<GroupSpec, GroupError> {
        let bad = |msg: &str| GroupError::BadSpec(msg.to_string());
        let family = v["family"]
            .as_str()
            .and_then(GroupFamily::parse)
            .ok_or_else(|| bad("missing or unknown family"))?;
        let n = v["n"].as_u64().ok_or_else(|| bad("missing n"))? as usize;
        let field = FieldSpec::parse(v["field"].as_str().ok_or_else(|| bad("missing field"))?)?;
        let base_q = v["base_q"].as_u64();
        match family {
            GroupFamily::Gl => Ok(GroupSpec::gl(n, &field)),
            GroupFamily::Sl => Ok(GroupSpec::sl(n, &field)),
            _ => {
                let form = match v["form"].as_str() {
                    None => match family {
                        GroupFamily::Sp => form_matrix(&FormKind::Symplectic, n, &field, None)?,
                        GroupFamily::U => {
                            form_matrix(&FormKind::HermitianAntidiag, n, &field, None)?
                        }
                        GroupFamily::OOdd => {
                            form_matrix(&FormKind::OrthOddStandard, n, &field, None)?
                        }
                        GroupFamily::OEven => {
                            form_matrix(&FormKind::OrthEvenStandard, n, &field, None)?
                        }
                        _ => unreachable!(),
                    },
                    Some(text) => match FormKind::parse(text) {
                        Some((kind, alpha)) => {
                            let alpha = alpha.map(|a| field.from_int(a));
                            form_matrix(&kind, n, &field, alpha.as_ref())?
                        }
                        None => Matrix::parse(text)?,
                    },
                };
                GroupSpec::with_form(family, n, &field, base_q, form)
            }
        }
    }

    /// Recognize the pinned form as a named preset.
    pub fn named_form(&self) -> Option<String> {
        let form = self.form.as_ref()?;
        let candidates: &[(FormKind, &str)] = &[
            (FormKind::HermitianAntidiag, "herm-antidiag"),
            (FormKind::HermitianIdentity, "herm-identity"),
            (FormKind::Symplectic, "sp-standard"),
            (FormKind::OrthEvenStandard, "o-even-standard"),
            (FormKind::O5SplitIdentity, "o5-split-identity"),
            (FormKind::O4SplitIdentity, "o4-split-identity"),
        ];
        for (kind, name) in candidates {
            if let Ok(m) = form_matrix(kind, self.n, &self.field, None) {
                if &m == form {
                    return Some((*name).to_string());
                }
            }
        }
        // Odd standard with some alpha.
        if self.n % 2 == 1 {
            let alpha = form[(self.n / 2, self.n / 2)].clone();
            if let Ok(m) = form_matrix(
                &FormKind::OrthOddStandard,
                self.n,
                &self.field,
                Some(&alpha),
            ) {
                if &m == form {
                    let a_str = if alpha.is_one() {
                        String::new()
                    } else {
                        format!("({alpha})")
                    };
                    return Some(format!("o-odd-standard{a_str}"));
                }
            }
        }
        None
    }
}

fn bilinear_value(j: &Matrix, v: &[FieldElement], w: &[FieldElement]) -> FieldElement {
    let spec = j.spec().clone();
    let mut acc = spec.zero();
    for (r, vr) in v.iter().enumerate() {
        if vr.is_zero() {
            continue;
        }
        for (c, wc) in w.iter().enumerate() {
            acc = acc.add_ref(&vr.mul_ref(&j[(r, c)]).mul_ref(wc));
        }
    }
    acc
}

fn sigma_bilinear_value(
    j: &Matrix,
    v: &[FieldElement],
    w: &[FieldElement],
    base_q: u64,
) -> FieldElement {
    let spec = j.spec().clone();
    let mut acc = spec.zero();
    for (r, vr) in v.iter().enumerate() {
        if vr.is_zero() {
            continue;
        }
        let sv = crate::field_tower::unitary_sigma(vr, base_q).unwrap();
        for (c, wc) in w.iter().enumerate() {
            acc = acc.add_ref(&sv.mul_ref(&j[(r, c)]).mul_ref(wc));
        }
    }
    acc
}

/// Nonzero vectors with first nonzero coordinate 1, in lexicographic order.
fn projective_vectors(spec: &FieldSpec, n: usize) -> Vec<Vec<FieldElement>> {
    let elements: Vec<FieldElement> = spec.elements().collect();
    let q = elements.len();
    let mut out = Vec::new();
    let total = (q as u128).pow(n as u32);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let v: Vec<FieldElement> = idx.iter().map(|&i| elements[i].clone()).collect();
        if let Some(first) = v.iter().find(|e| !e.is_zero()) {
            if first.is_one() {
                out.push(v);
            }
        }
        // odometer, last coordinate fastest
        let mut slot = n;
        loop {
            if slot == 0 {
                break;
            }
            slot -= 1;
            idx[slot] += 1;
            if idx[slot] < q {
                break;
            }
            idx[slot] = 0;
        }
    }
    out
}

/// x -> x + c <x, v> v, in matrix form I + c v (v^T J).
fn symplectic_transvection(j: &Matrix, v: &[FieldElement], c: &FieldElement) -> Matrix {
    let spec = j.spec().clone();
    let n = v.len();
    // w^T = v^T J
    let mut w = vec![spec.zero(); n];
    for col in 0..n {
        let mut acc = spec.zero();
        for r in 0..n {
            acc = acc.add_ref(&v[r].mul_ref(&j[(r, col)]));
        }
        w[col] = acc;
    }
    let mut g = Matrix::identity(&spec, n);
    for r in 0..n {
        if v[r].is_zero() {
            continue;
        }
        for col in 0..n {
            let add = c.mul_ref(&v[r]).mul_ref(&w[col]);
            let cur = g[(r, col)].clone();
            g.set(r, col, cur.add_ref(&add));
        }
    }
    g
}

/// Reflection along an anisotropic vector: x -> x - 2 B(x,v)/B(v,v) v.
fn reflection(j: &Matrix, v: &[FieldElement], qv: &FieldElement) -> Matrix {
    let spec = j.spec().clone();
    let n = v.len();
    let coef = spec.from_int(2).mul_ref(&qv.inverse().unwrap());
    let mut w = vec![spec.zero(); n];
    for col in 0..n {
        let mut acc = spec.zero();
        for r in 0..n {
            acc = acc.add_ref(&v[r].mul_ref(&j[(r, col)]));
        }
        w[col] = acc;
    }
    let mut g = Matrix::identity(&spec, n);
    for r in 0..n {
        if v[r].is_zero() {
            continue;
        }
        for col in 0..n {
            let sub = coef.mul_ref(&v[r]).mul_ref(&w[col]);
            let cur = g[(r, col)].clone();
            g.set(r, col, cur.sub_ref(&sub));
        }
    }
    g
}

/// Unitary quasi-reflection: x -> x - (1 - zeta) B(v,x)/B(v,v) v, with zeta
/// on the norm-one circle.
fn unitary_reflection(
    j: &Matrix,
    v: &[FieldElement],
    qv: &FieldElement,
    zeta: &FieldElement,
    base_q: u64,
) -> Matrix {
    let spec = j.spec().clone();
    let n = v.len();
    let coef = spec.one().sub_ref(zeta).mul_ref(&qv.inverse().unwrap());
    // w^T = sigma(v)^T J  (so that w . x = B(v, x))
    let mut w = vec![spec.zero(); n];
    for col in 0..n {
        let mut acc = spec.zero();
        for r in 0..n {
            let sv = crate::field_tower::unitary_sigma(&v[r], base_q).unwrap();
            acc = acc.add_ref(&sv.mul_ref(&j[(r, col)]));
        }
        w[col] = acc;
    }
    let mut g = Matrix::identity(&spec, n);
    for r in 0..n {
        if v[r].is_zero() {
            continue;
        }
        for col in 0..n {
            let sub = coef.mul_ref(&v[r]).mul_ref(&w[col]);
            let cur = g[(r, col)].clone();
            g.set(r, col, cur.sub_ref(&sub));
        }
    }
    g
}

// ---------------------------------------------------------------------------
// Centralizers
// ---------------------------------------------------------------------------

/// The commutant of an element together with the induced membership
/// predicate, and the coordinate block decomposition when the element is
/// diagonal.
#[derive(Clone, Debug)]
pub struct CentralizerSpace {
    pub group: GroupSpec,
    pub basis: Vec<Matrix>,
    /// (eigenvalue, coordinate indices) for diagonal elements.
    pub block_decomposition: Option<Vec<(FieldElement, Vec<usize>)>>,
}

impl CentralizerSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Member of the centralizer subgroup: inside the linear span and
    /// inside the ambient group.
    pub fn contains(&self, m: &Matrix) -> bool {
        self.in_span(m) && self.group.is_member(m)
    }

    pub fn in_span(&self, m: &Matrix) -> bool {
        let spec = self.group.field.clone();
        let n = self.group.n;
        let vars = n * n;
        let flatten = |mat: &Matrix, out: &mut Vec<FieldElement>| {
            for r in 0..n {
                for c in 0..n {
                    out.push(mat[(r, c)].clone());
                }
            }
        };
        let mut base_data = Vec::with_capacity(self.basis.len() * vars);
        for b in &self.basis {
            flatten(b, &mut base_data);
        }
        let mut stacked_data = base_data.clone();
        flatten(m, &mut stacked_data);
        let base = Matrix::new(&spec, self.basis.len(), vars, base_data);
        let stacked = Matrix::new(&spec, self.basis.len() + 1, vars, stacked_data);
        base.rank() == stacked.rank()
    }
}

/// Basis of `{ M : M a = a M }` with the induced predicate; for diagonal
/// `a`, also the eigenvalue block structure.
pub fn centralizer_space(spec: &GroupSpec, a: &Matrix) -> Result<CentralizerSpace, GroupError> {
    spec.membership(a).map_err(GroupError::NonMember)?;
    let basis = intertwiner_space(a, a);
    let block_decomposition = if a.is_diagonal() {
        let mut groups: Vec<(FieldElement, Vec<usize>)> = Vec::new();
        for i in 0..a.rows() {
            let v = a[(i, i)].clone();
            match groups.iter_mut().find(|(e, _)| *e == v) {
                Some((_, idxs)) => idxs.push(i),
                None => groups.push((v, vec![i])),
            }
        }
        Some(groups)
    } else {
        None
    };
    Ok(CentralizerSpace {
        group: spec.clone(),
        basis,
        block_decomposition,
    })
}

// ---------------------------------------------------------------------------
// Unipotent structure
// ---------------------------------------------------------------------------

pub fn is_unipotent(m: &Matrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.rows();
    let nil = m.sub(&Matrix::identity(m.spec(), n));
    nil.pow(n as u64).is_zero()
}

/// Jordan type of a unipotent element, from the rank sequence of powers of
/// M - I.
pub fn unipotent_jordan_type(m: &Matrix) -> crate::class_data::Partition {
    assert!(is_unipotent(m), "Jordan type of a unipotent element");
    let n = m.rows();
    let nil = m.sub(&Matrix::identity(m.spec(), n));
    let mut ranks = Vec::new();
    let mut acc = nil.clone();
    for _ in 0..n {
        let r = acc.rank();
        ranks.push(r);
        if r == 0 {
            break;
        }
        acc = acc.mul(&nil);
    }
    crate::class_data::partition_from_rank_sequence(n, &ranks)
}
