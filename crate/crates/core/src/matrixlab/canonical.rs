//! Similarity invariants from the canonical form of xI - M over F_q[x].
//!
//! The Smith form of the characteristic matrix gives the invariant factors;
//! factoring those (only at the very end) yields, for each irreducible f,
//! the partition of f-exponents across the primary decomposition. That map
//! is a complete similarity invariant, i.e. the class data of the ambient
//! general linear group.

use std::collections::BTreeMap;

use super::{Matrix, MatrixError};
use crate::class_data::{ClassFunction, GroupKind, Partition};
use crate::polyalg::{factorize, Poly};

/// Class data of a square invertible matrix under conjugation by the full
/// linear group: for each monic irreducible divisor of the characteristic
/// polynomial, the partition of its exponents in the invariant factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlInvariant {
    pub data: ClassFunction,
}

impl GlInvariant {
    pub fn entries(&self) -> &BTreeMap<Poly, Partition> {
        &self.data.entries
    }
}

/// Smith normal form over F_q[x]: returns the monic invariant factors
/// d_1 | d_2 | ... (constants dropped).
fn invariant_factors(mut a: Vec<Vec<Poly>>) -> Vec<Poly> {
    let rows = a.len();
    let cols = a[0].len();
    let n = rows.min(cols);
    let mut out = Vec::new();
    for t in 0..n {
        'reduce: loop {
            // Locate a nonzero entry of minimal degree in the submatrix.
            let mut best: Option<(usize, usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if let Some(d) = a[i][j].degree() {
                        if best.is_none_or(|(bd, _, _)| d < bd) {
                            best = Some((d, i, j));
                        }
                    }
                }
            }
            let Some((_, pi, pj)) = best else {
                break 'reduce;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            // Reduce the pivot column.
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let (q, r) = a[i][t].divrem(&a[t][t]);
                for j in t..cols {
                    let s = q.mul(&a[t][j]);
                    a[i][j] = a[i][j].sub(&s);
                }
                debug_assert_eq!(a[i][t], r);
                if !r.is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'reduce;
            }
            // Reduce the pivot row.
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let (q, r) = a[t][j].divrem(&a[t][t]);
                for i in t..rows {
                    let s = q.mul(&a[i][t]);
                    a[i][j] = a[i][j].sub(&s);
                }
                debug_assert_eq!(a[t][j], r);
                if !r.is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'reduce;
            }
            // Pivot must divide every remaining entry; if not, fold the
            // offending row in and restart the reduction.
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !a[i][j].rem(&a[t][t]).is_zero() {
                        for jj in t..cols {
                            let add = a[i][jj].clone();
                            a[t][jj] = a[t][jj].add(&add);
                        }
                        continue 'reduce;
                    }
                }
            }
            break 'reduce;
        }
        if a[t][t].is_zero() {
            break;
        }
        out.push(a[t][t].make_monic());
    }
    out.retain(|d| d.deg() > 0);
    out
}

/// Elementary-divisor data of an invertible matrix.
pub fn elementary_divisors(m: &Matrix) -> Result<GlInvariant, MatrixError> {
    assert!(m.is_square(), "elementary divisors of a square matrix");
    if !m.is_invertible() {
        return Err(MatrixError::Singular);
    }
    let spec = m.spec().clone();
    let n = m.rows();
    // xI - M over F_q[x].
    let x = Poly::x(&spec);
    let mut a = vec![vec![Poly::zero(&spec); n]; n];
    for i in 0..n {
        for j in 0..n {
            let c = Poly::constant(m[(i, j)].neg_ref());
            a[i][j] = if i == j { x.add(&c) } else { c };
        }
    }
    let factors_list = invariant_factors(a);
    debug_assert_eq!(
        factors_list.iter().map(|d| d.deg()).sum::<usize>(),
        n,
        "invariant factor degrees sum to the matrix size"
    );
    // Primary decomposition: factor each invariant factor.
    let mut exponents: BTreeMap<Poly, Vec<u32>> = BTreeMap::new();
    for d in &factors_list {
        let fact = factorize(d).expect("invariant factors are nonzero");
        for (f, e) in fact.factors {
            exponents.entry(f).or_default().push(e);
        }
    }
    let mut entries = BTreeMap::new();
    for (f, mut exps) in exponents {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        entries.insert(f, Partition::new(exps).expect("sorted positive exponents"));
    }
    let data = ClassFunction::new(GroupKind::Gl, n as u32, spec, None, entries);
    debug_assert!(data.validate().is_ok());
    Ok(GlInvariant { data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::{make_field, FieldSpec};

    fn f3() -> FieldSpec {
        make_field(3, 1).unwrap()
    }
    fn f5() -> FieldSpec {
        make_field(5, 1).unwrap()
    }

    fn inv_entries(m: &Matrix) -> Vec<(String, Vec<u32>)> {
        elementary_divisors(m)
            .unwrap()
            .entries()
            .iter()
            .map(|(f, p)| (f.to_string(), p.parts().to_vec()))
            .collect()
    }

    #[test]
    fn identity_and_jordan_examples() {
        // Identity 2x2 over F_3: {x - 1 -> (1, 1)}.
        let id = Matrix::identity(&f3(), 2);
        let inv = elementary_divisors(&id).unwrap();
        let key = Poly::from_ints(&f3(), &[-1, 1]);
        assert_eq!(inv.entries().len(), 1);
        assert_eq!(inv.entries()[&key].parts(), &[1, 1]);

        // Single Jordan block over F_5: {x - 1 -> (2)}.
        let u = Matrix::from_ints(&f5(), 2, 2, &[1, 1, 0, 1]);
        let inv = elementary_divisors(&u).unwrap();
        let key = Poly::from_ints(&f5(), &[-1, 1]);
        assert_eq!(inv.entries()[&key].parts(), &[2]);

        // Companion matrix of x^2 + 1 over F_3: one entry {x^2+1 -> (1)}.
        let c = Matrix::from_ints(&f3(), 2, 2, &[0, -1, 1, 0]);
        let inv = elementary_divisors(&c).unwrap();
        let key = Poly::from_ints(&f3(), &[1, 0, 1]);
        assert_eq!(inv.entries().len(), 1);
        assert_eq!(inv.entries()[&key].parts(), &[1]);
    }

    #[test]
    fn singular_rejected() {
        let z = Matrix::zero(&f3(), 2, 2);
        assert!(matches!(
            elementary_divisors(&z),
            Err(MatrixError::Singular)
        ));
    }

    #[test]
    fn conjugation_invariance_randomized() {
        use rand::Rng;
        use rand::SeedableRng;
        let spec = f3();
        let elems: Vec<_> = spec.elements().collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut rand_mat = |n: usize| {
            Matrix::from_fn(&spec, n, n, |_, _| {
                elems[rng.random_range(0..elems.len())].clone()
            })
        };
        let mut done = 0;
        while done < 100 {
            let m = rand_mat(3);
            let g = rand_mat(3);
            if !m.is_invertible() || !g.is_invertible() {
                continue;
            }
            let conj = g.mul(&m).mul(&g.inverse().unwrap());
            assert_eq!(inv_entries(&m), inv_entries(&conj));
            done += 1;
        }
    }

    #[test]
    fn weights_sum_to_size() {
        use rand::Rng;
        use rand::SeedableRng;
        let spec = f5();
        let elems: Vec<_> = spec.elements().collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 60 {
            let n = rng.random_range(1..=4usize);
            let m = Matrix::from_fn(&spec, n, n, |_, _| {
                elems[rng.random_range(0..elems.len())].clone()
            });
            if !m.is_invertible() {
                continue;
            }
            let inv = elementary_divisors(&m).unwrap();
            assert_eq!(inv.data.total() as usize, n);
            inv.data.validate().unwrap();
            done += 1;
        }
    }
}

#[cfg(test)]
mod complete_invariant_tests {
    use super::*;
    use crate::field_tower::make_field;
    use crate::matrixlab::intertwiner_space;

    /// The invariant separates non-conjugate pairs: for elements of
    /// GL(2, 3), conjugacy decided by exhaustive search over the
    /// intertwiner span agrees with invariant equality on every pair.
    #[test]
    fn invariant_is_complete_on_gl23() {
        let spec = make_field(3, 1).unwrap();
        let elems: Vec<crate::field_tower::FieldElement> = spec.elements().collect();
        let mut group = Vec::new();
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    for d in &elems {
                        let m = Matrix::new(
                            &spec,
                            2,
                            2,
                            vec![a.clone(), b.clone(), c.clone(), d.clone()],
                        );
                        if m.is_invertible() {
                            group.push(m);
                        }
                    }
                }
            }
        }
        assert_eq!(group.len(), 48);
        let invariants: Vec<_> = group
            .iter()
            .map(|m| elementary_divisors(m).unwrap())
            .collect();
        let mut agree = 0;
        let mut differ = 0;
        for (i, x) in group.iter().enumerate() {
            for (j, y) in group.iter().enumerate().skip(i + 1) {
                // Brute-force conjugacy: some invertible intertwiner exists.
                let basis = intertwiner_space(x, y);
                let mut conjugate = false;
                crate::matrixlab::scan_span(&basis, |m| {
                    if m.is_invertible() {
                        conjugate = true;
                        true
                    } else {
                        false
                    }
                });
                assert_eq!(conjugate, invariants[i] == invariants[j], "pair ({i},{j})");
                if conjugate {
                    agree += 1;
                } else {
                    differ += 1;
                }
            }
        }
        assert!(agree > 100 && differ > 100);
    }
}
