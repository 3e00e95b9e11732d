//! Witness construction chains: one base pair per family, then centralizer
//! lifts (and for the special linear family, the determinant twist) up to
//! the requested size.

use super::*;
use crate::matrixlab::is_symmetric;

/// Overrides for the construction; defaults pick the lexicographically
/// smallest valid parameters.
#[derive(Clone, Debug, Default)]
pub struct ConstructOptions {
    pub a: Option<FieldElement>,
    pub b: Option<FieldElement>,
}

/// Budget for the element decider run that seeds a base pair with
/// certificates before lifting; lifts transfer these conjugators upward.
const BASE_CERTIFICATE_BUDGET: u64 = 1 << 20;

/// Fill a freshly built base pair with element conjugators so that lifts
/// have certificates to transfer. A pair that fails element-conjugacy (or
/// exceeds the budget) is passed through untouched; the caller's deciders
/// will report it.
fn seed_base_certificates(pair: &mut WitnessPair) {
    if let Ok((ElementStatus::Verified, certs)) =
        element_conjugate(pair, BASE_CERTIFICATE_BUDGET, 0, false)
    {
        pair.element_certificates = certs;
    }
}

/// Lexicographically smallest element outside the prime field.
fn default_non_prime(field: &FieldSpec) -> Result<FieldElement, WitnessError> {
    field
        .elements()
        .find(|x| !x.in_prime_field())
        .ok_or_else(|| {
            WitnessError::OutOfCoverage(format!(
                "no element outside the prime field at level {}; use an extension (k >= 2)",
                field.level_label()
            ))
        })
}

/// Lexicographically smallest nonzero square outside the prime field.
fn default_non_prime_square(field: &FieldSpec) -> Result<FieldElement, WitnessError> {
    field
        .elements()
        .find(|x| !x.in_prime_field() && is_square(x))
        .ok_or_else(|| {
            WitnessError::OutOfCoverage(format!(
                "no square outside the prime field at level {}; use an extension",
                field.level_label()
            ))
        })
}

/// Lexicographically smallest unit with lambda^2 != 1.
fn default_lambda(field: &FieldSpec) -> Result<FieldElement, WitnessError> {
    field
        .elements()
        .find(|x| !x.is_zero() && !x.mul_ref(x).is_one())
        .ok_or_else(|| {
            WitnessError::OutOfCoverage(
                "the field has no unit of order > 2 (it is F_3); extend the field".into(),
            )
        })
}

fn diag_with_tail_minus_one(field: &FieldSpec, n: usize) -> Matrix {
    let mut entries = vec![field.one(); n];
    entries[n - 1] = field.from_int(-1);
    Matrix::diagonal(&entries)
}

/// The general linear chain: the 2x2 base, then one centralizer lift per
/// added coordinate (the new generator is diag(I, -1), of order 2).
fn construct_gl(
    n: usize,
    field: &FieldSpec,
    opts: &ConstructOptions,
) -> Result<WitnessPair, WitnessError> {
    if n < 2 {
        return Err(WitnessError::OutOfCoverage(
            "general linear witnesses start at size 2".into(),
        ));
    }
    let a = match &opts.a {
        Some(a) => a.clone(),
        None => field.one(),
    };
    let b = match &opts.b {
        Some(b) => b.clone(),
        None => default_non_prime(field)?,
    };
    let mut pair = witness_gl2(field, &a, &b)?;
    seed_base_certificates(&mut pair);
    for size in 3..=n {
        let target = GroupSpec::gl(size, field);
        let involution = diag_with_tail_minus_one(field, size);
        let embedding = BlockEmbedding {
            pad: PadMode::IdentityTail(1),
            conjugator: None,
        };
        pair = lift_via_centralizer(&pair, &involution, &embedding, &target, 16)?;
    }
    Ok(pair)
}

/// The special linear chain:
/// size 2 directly (SL(2) = Sp(2)); odd sizes by the centralizer of
/// diag(-I, 1) (its centralizer block is a general linear group one size
/// down); even sizes by the determinant twist when the power map is
/// bijective, otherwise through the centralizer of diag(lambda, 1/lambda, I).
fn construct_sl(
    n: usize,
    field: &FieldSpec,
    opts: &ConstructOptions,
) -> Result<WitnessPair, WitnessError> {
    match n {
        0 | 1 => Err(WitnessError::OutOfCoverage(
            "special linear witnesses start at size 2".into(),
        )),
        2 => {
            let a = match &opts.a {
                Some(a) => a.clone(),
                None => default_non_prime_square(field)?,
            };
            let mut pair = witness_sl2(field, &a)?;
            seed_base_certificates(&mut pair);
            Ok(pair)
        }
        _ if n % 2 == 1 => {
            let inner = construct_gl(n - 1, field, opts)?;
            let target = GroupSpec::sl(n, field);
            // diag(-I_{n-1}, 1) has determinant (-1)^{n-1} = 1 for odd n.
            let mut entries = vec![field.from_int(-1); n];
            entries[n - 1] = field.one();
            let involution = Matrix::diagonal(&entries);
            let embedding = BlockEmbedding {
                pad: PadMode::DetInverseTail,
                conjugator: None,
            };
            lift_via_centralizer(&inner, &involution, &embedding, &target, 16)
        }
        _ => {
            let order = field.unit_order();
            if crate::field_tower::gcd_u64(n as u64 % order, order) == 1
                || crate::field_tower::gcd_u64(n as u64, order) == 1
            {
                let gl = construct_gl(n, field, opts)?;
                sl_witness_via_det_twist(&gl)
            } else {
                let inner = construct_gl(n - 2, field, opts)?;
                let target = GroupSpec::sl(n, field);
                let lambda = default_lambda(field)?;
                let mut entries = vec![field.one(); n];
                entries[0] = lambda.clone();
                entries[1] = lambda.inverse().unwrap();
                let a = Matrix::diagonal(&entries);
                let embedding = BlockEmbedding {
                    pad: PadMode::DetInverseHead,
                    conjugator: None,
                };
                lift_via_centralizer(&inner, &a, &embedding, &target, field.order())
            }
        }
    }
}

/// The symplectic chain: the 2x2 base, then two coordinates per step, with
/// the new generator diag(lambda, I, 1/lambda) acting on a hyperbolic pair
/// around the embedded block.
fn construct_sp(
    n: usize,
    field: &FieldSpec,
    opts: &ConstructOptions,
) -> Result<WitnessPair, WitnessError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(WitnessError::OutOfCoverage(
            "symplectic witnesses need even size >= 2".into(),
        ));
    }
    let a = match &opts.a {
        Some(a) => a.clone(),
        None => default_non_prime_square(field)?,
    };
    let mut pair = witness_sp2(field, &a)?;
    seed_base_certificates(&mut pair);
    let lambda = default_lambda(field)?;
    for size in (4..=n).step_by(2) {
        let target = GroupSpec::symplectic(size, field)?;
        let mut entries = vec![field.one(); size];
        entries[0] = lambda.clone();
        entries[size - 1] = lambda.inverse().unwrap();
        let torus = Matrix::diagonal(&entries);
        let embedding = BlockEmbedding {
            pad: PadMode::Border,
            conjugator: None,
        };
        pair = lift_via_centralizer(&pair, &torus, &embedding, &target, field.order())?;
    }
    Ok(pair)
}

/// Orthogonal chains: the 5x5 (odd) or 4x4 (even) base, then two
/// coordinates per step by splitting off a nondegenerate plane on which the
/// new order-2 generator acts as -1. The split is conjugated into the
/// standard target form; the plane's diagonal form is patched so the
/// discriminant classes match.
fn construct_orthogonal(
    family: GroupFamily,
    n: usize,
    field: &FieldSpec,
    opts: &ConstructOptions,
) -> Result<WitnessPair, WitnessError> {
    let (start, odd) = match family {
        GroupFamily::OOdd => (5usize, true),
        GroupFamily::OEven => (4usize, false),
        _ => unreachable!(),
    };
    if n < start || (n % 2 == 1) != odd {
        return Err(WitnessError::OutOfCoverage(format!(
            "orthogonal witnesses cover odd sizes from 5 and even sizes from 4; \
             size {n} with family {family} is outside"
        )));
    }
    let a = match &opts.a {
        Some(a) => a.clone(),
        None => default_non_prime(field)?,
    };
    let mut pair = if odd {
        witness_o5(field, &a)?
    } else {
        witness_o4(field, &a)?
    };
    seed_base_certificates(&mut pair);
    let mut size = start;
    while size < n {
        size += 2;
        let target_form = if odd {
            form_matrix(&FormKind::OrthOddStandard, size, field, None)?
        } else {
            form_matrix(&FormKind::OrthEvenStandard, size, field, None)?
        };
        let target = GroupSpec::with_form(family, size, field, None, target_form.clone())?;
        let prev_form = pair
            .target()
            .form
            .clone()
            .expect("orthogonal witnesses carry forms");
        // Try both plane discriminants; exactly one matches the target class.
        let nu = field.non_square();
        let mut lifted = None;
        for plane_last in [field.one(), nu] {
            let plane = Matrix::diagonal(&[field.one(), plane_last.clone()]);
            let split = Matrix::block_diagonal(&[prev_form.clone(), plane]);
            debug_assert!(is_symmetric(&split));
            if let Some(t) = crate::matrixlab::symmetric_transport(&split, &target_form) {
                let mut entries = vec![field.one(); size];
                entries[size - 2] = field.from_int(-1);
                entries[size - 1] = field.from_int(-1);
                let involution_split = Matrix::diagonal(&entries);
                let involution = t.mul(&involution_split).mul(&t.inverse()?);
                let embedding = BlockEmbedding {
                    pad: PadMode::IdentityTail(2),
                    conjugator: Some(t),
                };
                lifted = Some(lift_via_centralizer(
                    &pair,
                    &involution,
                    &embedding,
                    &target,
                    16,
                )?);
                break;
            }
        }
        pair = lifted.ok_or_else(|| {
            WitnessError::Invalid(
                "no plane patch makes the split form equivalent to the target".into(),
            )
        })?;
    }
    Ok(pair)
}

/// The unitary chain: the 4x4 base at base q, then one coordinate per step
/// by splitting off a nondegenerate line (new generator -1 on the line),
/// conjugated into the antidiagonal convention.
fn construct_u(
    n: usize,
    field: &FieldSpec,
    base_q: u64,
    opts: &ConstructOptions,
) -> Result<WitnessPair, WitnessError> {
    if n < 4 {
        return Err(WitnessError::OutOfCoverage(format!(
            "unitary witnesses cover sizes from 4; U({n}) is outside (the centralizer \
             reductions only step down from larger groups)"
        )));
    }
    let p = field.p();
    let m = base_q_exponent(p, base_q)?;
    if field.k() != 2 * m {
        return Err(WitnessError::Invalid(format!(
            "unitary witnesses at base q = {base_q} live at level F_{p}^{}",
            2 * m
        )));
    }
    let a = match &opts.a {
        Some(a) => a.clone(),
        None => {
            if m < 2 {
                return Err(WitnessError::OutOfCoverage(format!(
                    "the unitary witness needs base q = p^m with m >= 2 (got q = {base_q})"
                )));
            }
            embed(&make_field(p, m)?.gen(), field)?
        }
    };
    let mut pair = witness_u4(base_q, &a)?;
    seed_base_certificates(&mut pair);
    for size in 5..=n {
        let target_form = form_matrix(&FormKind::HermitianAntidiag, size, field, None)?;
        let target = GroupSpec::with_form(
            GroupFamily::U,
            size,
            field,
            Some(base_q),
            target_form.clone(),
        )?;
        let prev_form = pair.target().form.clone().expect("unitary forms");
        let split = Matrix::block_diagonal(&[prev_form, Matrix::identity(field, 1)]);
        let t = hermitian_transport(&split, &target_form, base_q);
        let mut entries = vec![field.one(); size];
        entries[size - 1] = field.from_int(-1);
        let involution_split = Matrix::diagonal(&entries);
        let involution = t.mul(&involution_split).mul(&t.inverse()?);
        let embedding = BlockEmbedding {
            pad: PadMode::IdentityTail(1),
            conjugator: Some(t),
        };
        pair = lift_via_centralizer(&pair, &involution, &embedding, &target, 16)?;
    }
    Ok(pair)
}

/// Chain the appropriate base witness and lifts for the family and size.
/// The returned pair carries transferred certificates and full provenance;
/// callers re-verify with the deciders.
pub fn construct_witness(
    family: GroupFamily,
    n: usize,
    field: &FieldSpec,
    base_q: Option<u64>,
    opts: &ConstructOptions,
) -> Result<WitnessPair, WitnessError> {
    match family {
        GroupFamily::Gl => construct_gl(n, field, opts),
        GroupFamily::Sl => construct_sl(n, field, opts),
        GroupFamily::Sp => construct_sp(n, field, opts),
        GroupFamily::OOdd | GroupFamily::OEven => construct_orthogonal(family, n, field, opts),
        GroupFamily::U => {
            let q = base_q
                .ok_or_else(|| WitnessError::Invalid("unitary construction needs base_q".into()))?;
            construct_u(n, field, q, opts)
        }
    }
}
