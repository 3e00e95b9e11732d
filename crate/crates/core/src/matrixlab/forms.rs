//! Form matrices of the classical groups and constructive equivalences
//! between them.
//!
//! Odd characteristic keeps this elementary: symmetric forms diagonalize by
//! Gram-Schmidt with anisotropic pivots and are classified by dimension and
//! discriminant square class; hermitian forms all normalize to the identity
//! because the norm map of `F_{q^2}/F_q` is onto.

use super::{Matrix, MatrixError};
use crate::field_tower::{is_square, sqrt, unitary_sigma, FieldElement, FieldSpec};

/// The named form presets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormKind {
    HermitianAntidiag,
    HermitianIdentity,
    Symplectic,
    OrthOddStandard,
    OrthEvenStandard,
    /// Odd orthogonal variant with identity off-blocks:
    /// `[[0,0,I],[0,1,0],[I,0,0]]`.
    O5SplitIdentity,
    /// Even orthogonal variant `[[0,I],[I,0]]`.
    O4SplitIdentity,
}

impl FormKind {
    pub fn parse(s: &str) -> Option<(FormKind, Option<i64>)> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("o-odd-standard") {
            let alpha = rest.trim_start_matches('(').trim_end_matches(')').trim();
            let alpha = if alpha.is_empty() {
                1
            } else {
                alpha.parse::<i64>().ok()?
            };
            return Some((FormKind::OrthOddStandard, Some(alpha)));
        }
        let kind = match s {
            "herm-antidiag" => FormKind::HermitianAntidiag,
            "herm-identity" => FormKind::HermitianIdentity,
            "sp-standard" => FormKind::Symplectic,
            "o-even-standard" => FormKind::OrthEvenStandard,
            "o5-split-identity" => FormKind::O5SplitIdentity,
            "o4-split-identity" => FormKind::O4SplitIdentity,
            _ => return None,
        };
        Some((kind, None))
    }
}

fn antidiag_ones(spec: &FieldSpec, l: usize) -> Matrix {
    Matrix::from_fn(spec, l, l, |r, c| {
        if r + c == l - 1 {
            spec.one()
        } else {
            spec.zero()
        }
    })
}

/// The exact form matrix for a preset; always invertible.
pub fn form_matrix(
    kind: &FormKind,
    n: usize,
    spec: &FieldSpec,
    alpha: Option<&FieldElement>,
) -> Result<Matrix, MatrixError> {
    let bad = |msg: &str| MatrixError::Shape(format!("{msg} (kind {kind:?}, n = {n})"));
    let m = match kind {
        FormKind::HermitianAntidiag => antidiag_ones(spec, n),
        FormKind::HermitianIdentity => Matrix::identity(spec, n),
        FormKind::Symplectic => {
            if n == 0 || !n.is_multiple_of(2) {
                return Err(bad("symplectic form needs even positive size"));
            }
            let half = n / 2;
            let lam = antidiag_ones(spec, half);
            let mut out = Matrix::zero(spec, n, n);
            for r in 0..half {
                for c in 0..half {
                    out.set(r, half + c, lam[(r, c)].clone());
                    out.set(half + r, c, lam[(r, c)].neg_ref());
                }
            }
            out
        }
        FormKind::OrthOddStandard => {
            if n.is_multiple_of(2) || n < 1 {
                return Err(bad("odd orthogonal form needs odd size"));
            }
            let a = alpha.cloned().unwrap_or_else(|| spec.one());
            if a.is_zero() {
                return Err(bad("alpha must be a unit"));
            }
            let half = (n - 1) / 2;
            let mut out = Matrix::zero(spec, n, n);
            for i in 0..half {
                out.set(i, n - 1 - i, spec.one());
                out.set(n - 1 - i, i, spec.one());
            }
            out.set(half, half, a);
            out
        }
        FormKind::OrthEvenStandard => {
            if n == 0 || !n.is_multiple_of(2) {
                return Err(bad("even orthogonal form needs even positive size"));
            }
            let half = n / 2;
            let lam = antidiag_ones(spec, half);
            let mut out = Matrix::zero(spec, n, n);
            for r in 0..half {
                for c in 0..half {
                    out.set(r, half + c, lam[(r, c)].clone());
                    out.set(half + r, c, lam[(r, c)].clone());
                }
            }
            out
        }
        FormKind::O5SplitIdentity => {
            if n != 5 {
                return Err(bad("split-identity odd form is 5x5"));
            }
            let mut out = Matrix::zero(spec, 5, 5);
            out.set(0, 3, spec.one());
            out.set(1, 4, spec.one());
            out.set(2, 2, spec.one());
            out.set(3, 0, spec.one());
            out.set(4, 1, spec.one());
            out
        }
        FormKind::O4SplitIdentity => {
            if n != 4 {
                return Err(bad("split-identity even form is 4x4"));
            }
            let mut out = Matrix::zero(spec, 4, 4);
            out.set(0, 2, spec.one());
            out.set(1, 3, spec.one());
            out.set(2, 0, spec.one());
            out.set(3, 1, spec.one());
            out
        }
    };
    debug_assert!(m.is_invertible());
    Ok(m)
}

pub fn is_symmetric(j: &Matrix) -> bool {
    j.is_square() && j.transpose() == *j
}

/// Alternating with zero diagonal (the symplectic condition).
pub fn is_zero_diag_alternating(j: &Matrix) -> bool {
    if !j.is_square() {
        return false;
    }
    let n = j.rows();
    for i in 0..n {
        if !j[(i, i)].is_zero() {
            return false;
        }
        for k in 0..n {
            if j[(i, k)] != j[(k, i)].neg_ref() {
                return false;
            }
        }
    }
    true
}

pub fn is_hermitian(j: &Matrix, base_q: u64) -> bool {
    j.is_square() && j.conj_transpose(base_q).is_ok_and(|ct| ct == *j)
}

fn bilinear(j: &Matrix, v: &[FieldElement], w: &[FieldElement]) -> FieldElement {
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

fn sigma_bilinear(j: &Matrix, v: &[FieldElement], w: &[FieldElement], base_q: u64) -> FieldElement {
    let spec = j.spec().clone();
    let mut acc = spec.zero();
    for (r, vr) in v.iter().enumerate() {
        if vr.is_zero() {
            continue;
        }
        let sv = unitary_sigma(vr, base_q).expect("level checked by caller");
        for (c, wc) in w.iter().enumerate() {
            acc = acc.add_ref(&sv.mul_ref(&j[(r, c)]).mul_ref(wc));
        }
    }
    acc
}

/// Vectors of the standard basis followed by pair sums, a deterministic
/// search order that always contains an anisotropic vector for a
/// nondegenerate symmetric or hermitian form in odd characteristic.
fn candidate_vectors(spec: &FieldSpec, dim: usize) -> Vec<Vec<FieldElement>> {
    let mut out = Vec::new();
    for i in 0..dim {
        let mut v = vec![spec.zero(); dim];
        v[i] = spec.one();
        out.push(v);
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let mut v = vec![spec.zero(); dim];
            v[i] = spec.one();
            v[j] = spec.one();
            out.push(v);
        }
    }
    out
}

fn mat_from_columns(spec: &FieldSpec, cols: &[Vec<FieldElement>]) -> Matrix {
    let n = cols.len();
    Matrix::from_fn(spec, cols[0].len(), n, |r, c| cols[c][r].clone())
}

/// Orthogonal basis for a nondegenerate symmetric form: T with
/// `transpose(T) * J * T` diagonal.
fn symmetric_diagonalize(j: &Matrix) -> (Matrix, Vec<FieldElement>) {
    let spec = j.spec().clone();
    let n = j.rows();
    let mut basis: Vec<Vec<FieldElement>> = Vec::new();
    // Working complement: start from the ambient basis, shrink as we pick.
    let mut current = j.clone();
    let mut coords: Vec<Vec<FieldElement>> = (0..n)
        .map(|i| {
            let mut v = vec![spec.zero(); n];
            v[i] = spec.one();
            v
        })
        .collect();
    while basis.len() < n {
        let dim = coords.len();
        // Express the restricted form in the current coordinates.
        let gram = Matrix::from_fn(&spec, dim, dim, |r, c| bilinear(j, &coords[r], &coords[c]));
        let v_local = candidate_vectors(&spec, dim)
            .into_iter()
            .find(|v| !bilinear(&gram, v, v).is_zero())
            .expect("nondegenerate symmetric form has an anisotropic vector");
        // Back to ambient coordinates.
        let mut v = vec![spec.zero(); n];
        for (idx, c) in v_local.iter().enumerate() {
            for r in 0..n {
                v[r] = v[r].add_ref(&c.mul_ref(&coords[idx][r]));
            }
        }
        let qv = bilinear(j, &v, &v);
        let qv_inv = qv.inverse().expect("anisotropic");
        // New complement: project the previous coordinates off v.
        let mut next = Vec::new();
        for w in &coords {
            let coef = bilinear(j, w, &v).mul_ref(&qv_inv);
            let proj: Vec<FieldElement> = w
                .iter()
                .zip(&v)
                .map(|(wi, vi)| wi.sub_ref(&coef.mul_ref(vi)))
                .collect();
            next.push(proj);
        }
        // Keep an independent subset of the projections.
        let flat = Matrix::from_fn(&spec, next.len(), n, |r, c| next[r][c].clone());
        let (_, pivots) = flat.transpose().rref();
        let keep: Vec<Vec<FieldElement>> = pivots.iter().map(|&i| next[i].clone()).collect();
        basis.push(v);
        coords = keep;
        let _ = &current;
        current = j.clone();
    }
    let t = mat_from_columns(&spec, &basis);
    let d = (0..n).map(|i| bilinear(j, &basis[i], &basis[i])).collect();
    (t, d)
}

/// Smallest x (in element order) with x^2 + y^2 = target for some y; returns
/// (x, y).
fn sum_of_two_squares(spec: &FieldSpec, target: &FieldElement) -> (FieldElement, FieldElement) {
    for x in spec.elements() {
        let rest = target.sub_ref(&x.mul_ref(&x));
        if rest.is_zero() {
            return (x, spec.zero());
        }
        if is_square(&rest) {
            let y = sqrt(&rest).expect("checked square");
            return (x, y);
        }
    }
    unreachable!("every element of a finite field is a sum of two squares")
}

/// Normalize a diagonal symmetric form to diag(1,...,1) or diag(1,...,1,nu):
/// returns (S, count of non-square slots mod 2) with
/// `transpose(S) * diag(d) * S` in normal form.
fn normalize_symmetric_diagonal(spec: &FieldSpec, d: &[FieldElement]) -> (Matrix, bool) {
    let n = d.len();
    let nu = spec.non_square();
    // Step 1: scale each entry to 1 or nu.
    let mut scale = Vec::with_capacity(n);
    let mut entries = Vec::with_capacity(n);
    for di in d {
        if is_square(di) {
            let s = sqrt(di).unwrap().inverse().unwrap();
            scale.push(s);
            entries.push(true); // 1
        } else {
            let ratio = di.mul_ref(&nu.inverse().unwrap());
            let s = sqrt(&ratio).unwrap().inverse().unwrap();
            scale.push(s);
            entries.push(false); // nu
        }
    }
    let mut t = Matrix::diagonal(&scale);
    // Step 2: clear pairs of nu-slots with a rotation by a sum of two squares.
    let inv_nu = nu.inverse().unwrap();
    loop {
        let bad: Vec<usize> = entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| !e)
            .map(|(i, _)| i)
            .collect();
        if bad.len() < 2 {
            break;
        }
        let (i, j) = (bad[0], bad[1]);
        let (x, y) = sum_of_two_squares(spec, &inv_nu);
        // [[x, -y], [y, x]] maps diag(nu, nu) to diag(1, 1).
        let mut rot = Matrix::identity(spec, n);
        rot.set(i, i, x.clone());
        rot.set(j, i, y.clone());
        rot.set(i, j, y.neg_ref());
        rot.set(j, j, x.clone());
        t = t.mul(&rot);
        entries[i] = true;
        entries[j] = true;
    }
    // Step 3: move a trailing nu (if any) to the last slot.
    if let Some(pos) = entries.iter().position(|&e| !e) {
        if pos != n - 1 {
            let mut perm = Matrix::identity(spec, n);
            perm.set(pos, pos, spec.zero());
            perm.set(n - 1, n - 1, spec.zero());
            perm.set(pos, n - 1, spec.one());
            perm.set(n - 1, pos, spec.one());
            t = t.mul(&perm);
        }
    }
    let odd = entries.iter().filter(|&&e| !e).count() == 1;
    (t, odd)
}

/// Invertible T with `transpose(T) * to * T = from`, when the two symmetric
/// forms are equivalent (same dimension and discriminant class).
pub fn symmetric_transport(from: &Matrix, to: &Matrix) -> Option<Matrix> {
    assert!(
        is_symmetric(from) && is_symmetric(to),
        "symmetric forms only"
    );
    assert_eq!(from.rows(), to.rows());
    let spec = from.spec().clone();
    let normalize = |j: &Matrix| {
        let (t, d) = symmetric_diagonalize(j);
        let (s, odd) = normalize_symmetric_diagonal(&spec, &d);
        (t.mul(&s), odd)
    };
    let (s_from, odd_from) = normalize(from);
    let (s_to, odd_to) = normalize(to);
    if odd_from != odd_to {
        return None;
    }
    // transpose(s_x) * x * s_x = N for both; solve for T.
    let t = s_to.mul(&s_from.inverse().ok()?);
    debug_assert_eq!(t.transpose().mul(to).mul(&t), *from);
    Some(t)
}

/// Diagonalize a nondegenerate hermitian form and rescale every slot to 1
/// (norms are onto), yielding T with `conj_transpose(T) * J * T = I`.
fn hermitian_normalize(j: &Matrix, base_q: u64) -> Matrix {
    let spec = j.spec().clone();
    let n = j.rows();
    let mut basis: Vec<Vec<FieldElement>> = Vec::new();
    let mut coords: Vec<Vec<FieldElement>> = (0..n)
        .map(|i| {
            let mut v = vec![spec.zero(); n];
            v[i] = spec.one();
            v
        })
        .collect();
    while basis.len() < n {
        let dim = coords.len();
        let gram = Matrix::from_fn(&spec, dim, dim, |r, c| {
            sigma_bilinear(j, &coords[r], &coords[c], base_q)
        });
        let v_local = candidate_vectors(&spec, dim)
            .into_iter()
            .find(|v| !sigma_bilinear(&gram, v, v, base_q).is_zero())
            .expect("nondegenerate hermitian form has an anisotropic vector");
        let mut v = vec![spec.zero(); n];
        for (idx, c) in v_local.iter().enumerate() {
            for r in 0..n {
                v[r] = v[r].add_ref(&c.mul_ref(&coords[idx][r]));
            }
        }
        let qv = sigma_bilinear(j, &v, &v, base_q);
        let qv_inv = qv.inverse().expect("anisotropic");
        let mut next = Vec::new();
        for w in &coords {
            // w - (B(v, w)/Q(v)) v keeps B(v, .) = 0.
            let coef = sigma_bilinear(j, &v, w, base_q).mul_ref(&qv_inv);
            let proj: Vec<FieldElement> = w
                .iter()
                .zip(&v)
                .map(|(wi, vi)| wi.sub_ref(&coef.mul_ref(vi)))
                .collect();
            next.push(proj);
        }
        let flat = Matrix::from_fn(&spec, next.len(), n, |r, c| next[r][c].clone());
        let (_, pivots) = flat.transpose().rref();
        coords = pivots.iter().map(|&i| next[i].clone()).collect();
        basis.push(v);
    }
    // Scale each basis vector: Q(zv) = z sigma(z) Q(v); norms reach all of
    // F_q*, so pick z with z sigma(z) = Q(v)^{-1}.
    for v in basis.iter_mut() {
        let qv = sigma_bilinear(j, v, v, base_q);
        let want = qv.inverse().unwrap();
        let z = spec
            .elements()
            .find(|z| !z.is_zero() && z.mul_ref(&unitary_sigma(z, base_q).unwrap()) == want)
            .expect("norm map of a quadratic extension is onto");
        for vi in v.iter_mut() {
            *vi = vi.mul_ref(&z);
        }
    }
    mat_from_columns(&spec, &basis)
}

/// Invertible T with `conj_transpose(T) * to * T = from`; always exists for
/// nondegenerate hermitian forms of equal size.
pub fn hermitian_transport(from: &Matrix, to: &Matrix, base_q: u64) -> Matrix {
    assert!(is_hermitian(from, base_q) && is_hermitian(to, base_q));
    assert_eq!(from.rows(), to.rows());
    let s_from = hermitian_normalize(from, base_q);
    let s_to = hermitian_normalize(to, base_q);
    let t = s_to.mul(&s_from.inverse().expect("basis matrix"));
    debug_assert_eq!(t.conj_transpose(base_q).unwrap().mul(to).mul(&t), *from);
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::make_field;

    fn f3() -> FieldSpec {
        make_field(3, 1).unwrap()
    }
    fn f9() -> FieldSpec {
        make_field(3, 2).unwrap()
    }

    #[test]
    fn preset_shapes() {
        let spec = f3();
        // Symplectic 2x2: [[0,1],[-1,0]].
        let j = form_matrix(&FormKind::Symplectic, 2, &spec, None).unwrap();
        assert_eq!(j, Matrix::from_ints(&spec, 2, 2, &[0, 1, -1, 0]));
        assert!(is_zero_diag_alternating(&j));

        // Even orthogonal 4x4: antidiagonal lambda blocks.
        let j = form_matrix(&FormKind::OrthEvenStandard, 4, &spec, None).unwrap();
        assert_eq!(
            j,
            Matrix::from_ints(
                &spec,
                4,
                4,
                &[0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0]
            )
        );
        assert!(is_symmetric(&j));

        // Hermitian antidiagonal 4x4 over F_9.
        let j = form_matrix(&FormKind::HermitianAntidiag, 4, &f9(), None).unwrap();
        assert!(is_hermitian(&j, 3));
        for i in 0..4 {
            assert!(j[(i, 3 - i)].is_one());
        }

        // Odd orthogonal with alpha = 2.
        let a = spec.from_int(2);
        let j = form_matrix(&FormKind::OrthOddStandard, 3, &spec, Some(&a)).unwrap();
        assert_eq!(j[(1, 1)], a);
        assert!(is_symmetric(&j));

        // Split-identity variants.
        let j5 = form_matrix(&FormKind::O5SplitIdentity, 5, &spec, None).unwrap();
        assert!(is_symmetric(&j5) && j5.is_invertible());
        let j4 = form_matrix(&FormKind::O4SplitIdentity, 4, &spec, None).unwrap();
        assert!(is_symmetric(&j4) && j4.is_invertible());

        // Size errors.
        assert!(form_matrix(&FormKind::Symplectic, 3, &spec, None).is_err());
        assert!(form_matrix(&FormKind::O5SplitIdentity, 4, &spec, None).is_err());
        assert!(form_matrix(&FormKind::OrthOddStandard, 3, &spec, Some(&spec.zero())).is_err());
    }

    #[test]
    fn symmetric_transport_between_variants() {
        // The two odd 5x5 conventions are equivalent over F_9 and over F_3
        // when the discriminants match; transport must verify exactly.
        for spec in [f3(), f9()] {
            let a = form_matrix(&FormKind::O5SplitIdentity, 5, &spec, None).unwrap();
            let b = form_matrix(&FormKind::OrthOddStandard, 5, &spec, None).unwrap();
            match symmetric_transport(&a, &b) {
                Some(t) => {
                    assert_eq!(t.transpose().mul(&b).mul(&t), a);
                }
                None => {
                    // Same-dimension symmetric forms differ only by the
                    // discriminant class; patching with the non-square
                    // alpha must then succeed.
                    let nu = spec.non_square();
                    let b2 = form_matrix(&FormKind::OrthOddStandard, 5, &spec, Some(&nu)).unwrap();
                    let t = symmetric_transport(&a, &b2).unwrap();
                    assert_eq!(t.transpose().mul(&b2).mul(&t), a);
                }
            }
        }
    }

    #[test]
    fn even_transport() {
        for spec in [f3(), f9()] {
            let a = form_matrix(&FormKind::O4SplitIdentity, 4, &spec, None).unwrap();
            let b = form_matrix(&FormKind::OrthEvenStandard, 4, &spec, None).unwrap();
            let t = symmetric_transport(&a, &b).expect("both are hyperbolic");
            assert_eq!(t.transpose().mul(&b).mul(&t), a);
        }
    }

    #[test]
    fn hermitian_transport_always_works() {
        let spec = f9();
        for n in [2usize, 3, 4] {
            let a = form_matrix(&FormKind::HermitianAntidiag, n, &spec, None).unwrap();
            let b = form_matrix(&FormKind::HermitianIdentity, n, &spec, None).unwrap();
            let t = hermitian_transport(&a, &b, 3);
            assert_eq!(t.conj_transpose(3).unwrap().mul(&b).mul(&t), a);
        }
    }

    #[test]
    fn form_kind_parsing() {
        assert_eq!(
            FormKind::parse("sp-standard"),
            Some((FormKind::Symplectic, None))
        );
        assert_eq!(
            FormKind::parse("o-odd-standard(2)"),
            Some((FormKind::OrthOddStandard, Some(2)))
        );
        assert_eq!(FormKind::parse("nope"), None);
    }
}
