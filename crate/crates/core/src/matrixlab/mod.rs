//! Dense exact matrices over the field tower.
//!
//! Arithmetic, determinants and inverses, the similarity invariant computed
//! from elementary divisors, solvers for intertwining (Sylvester-type)
//! spaces, and the form matrices of the classical groups.
//!
//! Matrices are immutable after construction and all operations are pure.

mod canonical;
mod forms;

pub use canonical::{elementary_divisors, GlInvariant};
pub use forms::{
    form_matrix, hermitian_transport, is_hermitian, is_symmetric, is_zero_diag_alternating,
    symmetric_transport, FormKind,
};

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Index;

use thiserror::Error;

use crate::field_tower::{embed, unitary_sigma, FieldElement, FieldError, FieldSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("cannot parse matrix: {0}")]
    Parse(String),
}

/// Row-major dense matrix with all entries at one field level.
#[derive(Clone)]
pub struct Matrix {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.spec == other.spec
            && self.data == other.data
    }
}
impl Eq for Matrix {}

impl Hash for Matrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        for e in &self.data {
            e.hash(state);
        }
    }
}

impl PartialOrd for Matrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Matrix {
    /// Canonical order: shape, then entries in row-major serialized order.
    /// This is the tie-break order for reported conjugators.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rows, self.cols)
            .cmp(&(other.rows, other.cols))
            .then_with(|| self.data.cmp(&other.data))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = FieldElement;
    fn index(&self, (r, c): (usize, usize)) -> &FieldElement {
        assert!(r < self.rows && c < self.cols, "index out of range");
        &self.data[r * self.cols + c]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.rows, self.cols, self.spec)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix({}x{} over {})", self.rows, self.cols, self.spec)
    }
}

impl Matrix {
    pub fn new(spec: &FieldSpec, rows: usize, cols: usize, data: Vec<FieldElement>) -> Matrix {
        assert_eq!(data.len(), rows * cols, "entry count must be rows*cols");
        assert!(
            data.iter().all(|e| e.spec() == spec),
            "all entries must share the field level"
        );
        Matrix {
            spec: spec.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn zero(spec: &FieldSpec, rows: usize, cols: usize) -> Matrix {
        Matrix {
            spec: spec.clone(),
            rows,
            cols,
            data: vec![spec.zero(); rows * cols],
        }
    }

    pub fn identity(spec: &FieldSpec, n: usize) -> Matrix {
        let mut m = Matrix::zero(spec, n, n);
        for i in 0..n {
            m.set(i, i, spec.one());
        }
        m
    }

    pub fn scalar(spec: &FieldSpec, n: usize, c: &FieldElement) -> Matrix {
        let mut m = Matrix::zero(spec, n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn diagonal(entries: &[FieldElement]) -> Matrix {
        let spec = entries[0].spec().clone();
        let n = entries.len();
        let mut m = Matrix::zero(&spec, n, n);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn from_rows(spec: &FieldSpec, rows: Vec<Vec<FieldElement>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        Matrix::new(spec, r, c, rows.into_iter().flatten().collect())
    }

    /// Build from integer entries (row-major), mapped through F_p.
    pub fn from_ints(spec: &FieldSpec, rows: usize, cols: usize, ints: &[i64]) -> Matrix {
        assert_eq!(ints.len(), rows * cols);
        Matrix::new(
            spec,
            rows,
            cols,
            ints.iter().map(|&n| spec.from_int(n)).collect(),
        )
    }

    pub fn from_fn(
        spec: &FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix::new(spec, rows, cols, data)
    }

    pub fn block_diagonal(blocks: &[Matrix]) -> Matrix {
        let spec = blocks[0].spec.clone();
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zero(&spec, n, m);
        let mut ro = 0;
        let mut co = 0;
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(ro + r, co + c, b[(r, c)].clone());
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        out
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        assert!(r < self.rows && c < self.cols);
        assert!(v.spec() == &self.spec, "entry at a different field level");
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (0..self.cols).all(|c| {
                    let e = &self[(r, c)];
                    if r == c {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)].is_zero()))
    }

    fn assert_same_shape(&self, other: &Matrix, op: &str) {
        assert!(
            self.rows == other.rows && self.cols == other.cols && self.spec == other.spec,
            "{op}: incompatible shapes or field levels"
        );
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.assert_same_shape(other, "matrix addition");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.add_ref(b))
            .collect();
        Matrix::new(&self.spec, self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.assert_same_shape(other, "matrix subtraction");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.sub_ref(b))
            .collect();
        Matrix::new(&self.spec, self.rows, self.cols, data)
    }

    pub fn neg(&self) -> Matrix {
        let data = self.data.iter().map(|a| a.neg_ref()).collect();
        Matrix::new(&self.spec, self.rows, self.cols, data)
    }

    pub fn scale(&self, c: &FieldElement) -> Matrix {
        let data = self.data.iter().map(|a| a.mul_ref(c)).collect();
        Matrix::new(&self.spec, self.rows, self.cols, data)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert!(
            self.cols == other.rows && self.spec == other.spec,
            "matrix product: incompatible shapes or field levels"
        );
        let mut out = Matrix::zero(&self.spec, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[r * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other.data[k * other.cols + c];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = &out.data[r * other.cols + c];
                    out.data[r * other.cols + c] = cur.add_ref(&a.mul_ref(b));
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(&self.spec, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.spec, self.cols, self.rows, |r, c| {
            self[(c, r)].clone()
        })
    }

    /// Entrywise sigma followed by transpose.
    pub fn conj_transpose(&self, base_q: u64) -> Result<Matrix, MatrixError> {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(unitary_sigma(&self[(r, c)], base_q)?);
            }
        }
        Ok(Matrix::new(&self.spec, self.cols, self.rows, data))
    }

    /// Entrywise sigma without transposing.
    pub fn map_sigma(&self, base_q: u64) -> Result<Matrix, MatrixError> {
        let data: Result<Vec<_>, _> = self.data.iter().map(|e| unitary_sigma(e, base_q)).collect();
        Ok(Matrix::new(&self.spec, self.rows, self.cols, data?))
    }

    pub fn embed(&self, target: &FieldSpec) -> Result<Matrix, MatrixError> {
        let data: Result<Vec<_>, _> = self.data.iter().map(|e| embed(e, target)).collect();
        Ok(Matrix::new(target, self.rows, self.cols, data?))
    }

    pub fn trace(&self) -> FieldElement {
        assert!(self.is_square());
        let mut acc = self.spec.zero();
        for i in 0..self.rows {
            acc = acc.add_ref(&self[(i, i)]);
        }
        acc
    }

    /// Determinant by fraction-free-in-the-field Gaussian elimination.
    pub fn det(&self) -> FieldElement {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut sign_neg = false;
        let mut det = self.spec.one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * n + col].is_zero());
            let Some(pr) = pivot else {
                return self.spec.zero();
            };
            if pr != col {
                for c in 0..n {
                    a.swap(pr * n + c, col * n + c);
                }
                sign_neg = !sign_neg;
            }
            let pv = a[col * n + col].clone();
            det = det.mul_ref(&pv);
            let pinv = pv.inverse().unwrap();
            for r in col + 1..n {
                let factor = a[r * n + col].mul_ref(&pinv);
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let sub = factor.mul_ref(&a[col * n + c]);
                    a[r * n + c] = a[r * n + c].sub_ref(&sub);
                }
            }
        }
        if sign_neg {
            det.neg_ref()
        } else {
            det
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && !self.det().is_zero()
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(&self.spec, n).data;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * n + col].is_zero());
            let Some(pr) = pivot else {
                return Err(MatrixError::Singular);
            };
            if pr != col {
                for c in 0..n {
                    a.swap(pr * n + c, col * n + c);
                    inv.swap(pr * n + c, col * n + c);
                }
            }
            let pinv = a[col * n + col].inverse().unwrap();
            for c in 0..n {
                a[col * n + c] = a[col * n + c].mul_ref(&pinv);
                inv[col * n + c] = inv[col * n + c].mul_ref(&pinv);
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let factor = a[r * n + col].clone();
                for c in 0..n {
                    let s = factor.mul_ref(&a[col * n + c]);
                    a[r * n + c] = a[r * n + c].sub_ref(&s);
                    let s = factor.mul_ref(&inv[col * n + c]);
                    inv[r * n + c] = inv[r * n + c].sub_ref(&s);
                }
            }
        }
        Ok(Matrix::new(&self.spec, n, n, inv))
    }

    pub fn rank(&self) -> usize {
        let (_, pivots) = self.rref();
        pivots.len()
    }

    /// Reduced row echelon form with the fixed pivot order: leftmost column
    /// first, topmost available row. Returns the echelon matrix and the
    /// pivot column list.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let pr = (row..m.rows).find(|&r| !m[(r, col)].is_zero());
            let Some(pr) = pr else { continue };
            if pr != row {
                for c in 0..m.cols {
                    let i1 = pr * m.cols + c;
                    let i2 = row * m.cols + c;
                    m.data.swap(i1, i2);
                }
            }
            let pinv = m[(row, col)].inverse().unwrap();
            for c in 0..m.cols {
                let v = m[(row, c)].mul_ref(&pinv);
                m.data[row * m.cols + c] = v;
            }
            for r in 0..m.rows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let factor = m[(r, col)].clone();
                for c in 0..m.cols {
                    let s = factor.mul_ref(&m[(row, c)]);
                    m.data[r * m.cols + c] = m.data[r * m.cols + c].sub_ref(&s);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Deterministic echelon-form basis of the right nullspace, as
    /// coordinate vectors.
    pub fn nullspace(&self) -> Vec<Vec<FieldElement>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![self.spec.zero(); self.cols];
            v[free] = self.spec.one();
            for (row_idx, &pc) in pivots.iter().enumerate() {
                v[pc] = r[(row_idx, free)].neg_ref();
            }
            basis.push(v);
        }
        basis
    }

    /// Multiplicative order, bounded by the budget.
    pub fn multiplicative_order(&self, budget: u64) -> Option<u64> {
        assert!(self.is_square());
        let id = Matrix::identity(&self.spec, self.rows);
        let mut acc = self.clone();
        for ord in 1..=budget {
            if acc == id {
                return Some(ord);
            }
            acc = acc.mul(self);
        }
        None
    }

    /// Parse the text format: first line `rows cols <fieldspec>`, then one
    /// line per row of bracketed elements separated by spaces.
    pub fn parse(text: &str) -> Result<Matrix, MatrixError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| MatrixError::Parse("empty matrix text".into()))?;
        let mut it = header.splitn(3, ' ');
        let rows: usize = it
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| MatrixError::Parse("bad row count".into()))?;
        let cols: usize = it
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| MatrixError::Parse("bad column count".into()))?;
        let spec = FieldSpec::parse(
            it.next()
                .ok_or_else(|| MatrixError::Parse("missing field spec".into()))?,
        )?;
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| MatrixError::Parse("missing matrix row".into()))?;
            let row = crate::polyalg::parse_element_list(line, &spec)
                .map_err(|e| MatrixError::Parse(e.to_string()))?;
            if row.len() != cols {
                return Err(MatrixError::Parse(format!(
                    "row has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix::new(&spec, rows, cols, data))
    }
}

// ---------------------------------------------------------------------------
// Intertwiner (Sylvester) spaces
// ---------------------------------------------------------------------------

/// Echelon basis of `{ M : M X = Y M }`.
pub fn intertwiner_space(x: &Matrix, y: &Matrix) -> Vec<Matrix> {
    simultaneous_intertwiner(&[(x.clone(), y.clone())])
}

/// Echelon basis of the intersection `{ M : M X_i = Y_i M for all i }`.
///
/// Unknowns are the n^2 entries of M in row-major order; the linear system
/// is eliminated with the fixed pivot order, so the basis is reproducible.
pub fn simultaneous_intertwiner(pairs: &[(Matrix, Matrix)]) -> Vec<Matrix> {
    assert!(!pairs.is_empty());
    let n = pairs[0].0.rows();
    let spec = pairs[0].0.spec().clone();
    for (x, y) in pairs {
        assert!(
            x.is_square() && y.is_square() && x.rows() == n && y.rows() == n,
            "intertwiner system needs square matrices of equal size"
        );
        assert!(x.spec() == &spec && y.spec() == &spec);
    }
    let vars = n * n;
    let mut rows_data: Vec<FieldElement> = Vec::with_capacity(pairs.len() * vars * vars);
    for (x, y) in pairs {
        // Equation (i, j): sum_k M[i,k] X[k,j] - sum_k Y[i,k] M[k,j] = 0.
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![spec.zero(); vars];
                for k in 0..n {
                    row[i * n + k] = row[i * n + k].add_ref(&x[(k, j)]);
                    row[k * n + j] = row[k * n + j].sub_ref(&y[(i, k)]);
                }
                rows_data.extend(row);
            }
        }
    }
    let system = Matrix::new(&spec, pairs.len() * vars, vars, rows_data);
    system
        .nullspace()
        .into_iter()
        .map(|v| Matrix::new(&spec, n, n, v))
        .collect()
}

/// A column that vanishes identically on the span of the basis, if any.
/// Every member of such a span is singular.
pub fn common_zero_column(basis: &[Matrix]) -> Option<usize> {
    let first = basis.first()?;
    (0..first.cols()).find(|&c| {
        basis
            .iter()
            .all(|m| (0..m.rows()).all(|r| m[(r, c)].is_zero()))
    })
}

/// A row that vanishes identically on the span of the basis, if any.
pub fn common_zero_row(basis: &[Matrix]) -> Option<usize> {
    let first = basis.first()?;
    (0..first.rows()).find(|&r| {
        basis
            .iter()
            .all(|m| (0..m.cols()).all(|c| m[(r, c)].is_zero()))
    })
}

/// Visit every member of the span of `basis` (all q^d coefficient tuples,
/// coefficients in element order, first coefficient most significant).
/// Prefix sums are reused so each step costs one matrix addition. The
/// visitor returns `true` to stop early; the function reports whether the
/// scan was stopped.
pub fn scan_span(basis: &[Matrix], mut visit: impl FnMut(&Matrix) -> bool) -> bool {
    if basis.is_empty() {
        return false;
    }
    let spec = basis[0].spec().clone();
    let elements: Vec<FieldElement> = spec.elements().collect();
    let d = basis.len();
    let (rows, cols) = (basis[0].rows(), basis[0].cols());
    // prefix[j] = sum_{i < j} c_i * B_i for the current counters.
    let mut counters = vec![0usize; d];
    let mut prefix: Vec<Matrix> = Vec::with_capacity(d + 1);
    prefix.push(Matrix::zero(&spec, rows, cols));
    for j in 0..d {
        let term = basis[j].scale(&elements[counters[j]]);
        let next = prefix[j].add(&term);
        prefix.push(next);
    }
    loop {
        if visit(&prefix[d]) {
            return true;
        }
        // Odometer increment with the last coefficient fastest.
        let mut slot = d;
        loop {
            if slot == 0 {
                return false;
            }
            slot -= 1;
            counters[slot] += 1;
            if counters[slot] < elements.len() {
                break;
            }
            counters[slot] = 0;
        }
        for j in slot..d {
            let term = basis[j].scale(&elements[counters[j]]);
            prefix[j + 1] = prefix[j].add(&term);
        }
    }
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
    fn arithmetic_and_inverse() {
        let spec = f3();
        let a = Matrix::from_ints(&spec, 2, 2, &[1, 1, 0, 1]);
        let b = Matrix::from_ints(&spec, 2, 2, &[1, 0, 1, 1]);
        let ab = a.mul(&b);
        assert_eq!(ab, Matrix::from_ints(&spec, 2, 2, &[2, 1, 1, 1]));
        let inv = ab.inverse().unwrap();
        assert!(ab.mul(&inv).is_identity());
        assert_eq!(ab.det(), spec.from_int(1));
        assert_eq!(a.pow(3), Matrix::identity(&spec, 2));
    }

    #[test]
    fn det_rank_nullspace() {
        // Over F_5 the upper 2x2 block has determinant -3 = 2, a unit.
        let spec = make_field(5, 1).unwrap();
        let m = Matrix::from_ints(&spec, 3, 3, &[1, 2, 0, 2, 1, 0, 0, 0, 0]);
        assert!(m.det().is_zero());
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        // The kernel vector is e3.
        assert!(ns[0][0].is_zero() && ns[0][1].is_zero() && ns[0][2].is_one());

        // Over F_3 the second row is twice the first: rank drops to 1.
        let spec3 = f3();
        let m3 = Matrix::from_ints(&spec3, 3, 3, &[1, 2, 0, 2, 1, 0, 0, 0, 0]);
        assert_eq!(m3.rank(), 1);
        assert_eq!(m3.nullspace().len(), 2);
    }

    #[test]
    fn conj_transpose_examples() {
        let spec = f9();
        let t = spec.gen();
        let m = Matrix::new(&spec, 1, 1, vec![t.clone()]);
        let ct = m.conj_transpose(3).unwrap();
        assert_eq!(ct[(0, 0)], t.neg_ref());
        assert_eq!(ct.conj_transpose(3).unwrap(), m);

        // Prime-field entries: plain transpose.
        let spec3 = f3();
        let m = Matrix::from_ints(&spec3, 2, 2, &[1, 2, 0, 1]);
        assert!(m.conj_transpose(3).is_err()); // wrong level for sigma
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn intertwiner_identity_case() {
        let spec = f3();
        let id = Matrix::identity(&spec, 2);
        let basis = intertwiner_space(&id, &id);
        assert_eq!(basis.len(), 4);
    }

    #[test]
    fn intertwiner_unipotent_example() {
        // X = [[1,1],[0,1]], Y = [[1,t],[0,1]] over F_9: the space
        // { M : M X = Y M } is 2-dimensional, of shape [[t s, u], [0, s]].
        let spec = f9();
        let t = spec.gen();
        let x = Matrix::from_ints(&spec, 2, 2, &[1, 1, 0, 1]);
        let mut y = Matrix::identity(&spec, 2);
        y.set(0, 1, t.clone());
        let basis = intertwiner_space(&x, &y);
        assert_eq!(basis.len(), 2);
        for m in &basis {
            assert!(m[(1, 0)].is_zero());
            assert_eq!(m[(0, 0)], t.mul_ref(&m[(1, 1)]));
            assert_eq!(m.mul(&x), y.mul(m));
        }
        // Independent oracle: brute-force over all 6561 matrices.
        let elems: Vec<FieldElement> = spec.elements().collect();
        let mut all = Vec::new();
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
                        if m.mul(&x) == y.mul(&m) {
                            all.push(m);
                        }
                    }
                }
            }
        }
        assert_eq!(all.len(), 81); // q^2 members of a 2-dimensional space
                                   // Every brute-force solution lies in the reported span.
        let mut seen = 0;
        scan_span(&basis, |m| {
            if all.contains(m) {
                seen += 1;
            }
            false
        });
        assert_eq!(seen, 81);
    }

    #[test]
    fn simultaneous_intertwiner_examples() {
        let spec = f9();
        let t = spec.gen();
        let u = |c: &FieldElement| {
            let mut m = Matrix::identity(&spec, 2);
            m.set(0, 1, c.clone());
            m
        };
        let one = spec.one();
        // Single pair agrees with intertwiner_space.
        let single = simultaneous_intertwiner(&[(u(&one), u(&t))]);
        assert_eq!(single, intertwiner_space(&u(&one), &u(&t)));

        // The swapped system: M U(1) = U(t) M and M U(t) = U(1) M forces
        // the strictly-upper-triangular line spanned by [[0,1],[0,0]].
        let basis = simultaneous_intertwiner(&[(u(&one), u(&t)), (u(&t), u(&one))]);
        assert_eq!(basis.len(), 1);
        assert!(basis[0][(0, 0)].is_zero());
        assert!(basis[0][(1, 0)].is_zero());
        assert!(basis[0][(1, 1)].is_zero());
        assert!(basis[0][(0, 1)].is_one());
        // All members are singular.
        let mut all_singular = true;
        scan_span(&basis, |m| {
            if m.is_invertible() {
                all_singular = false;
                true
            } else {
                false
            }
        });
        assert!(all_singular);

        // Identity pairs span everything.
        let id = Matrix::identity(&spec, 2);
        let full = simultaneous_intertwiner(&[(id.clone(), id.clone()), (id.clone(), id)]);
        assert_eq!(full.len(), 4);
    }

    #[test]
    fn zero_column_detection() {
        let spec = f3();
        let b = vec![
            Matrix::from_ints(&spec, 2, 2, &[0, 1, 0, 0]),
            Matrix::from_ints(&spec, 2, 2, &[0, 0, 0, 1]),
        ];
        assert_eq!(common_zero_column(&b), Some(0));
        assert_eq!(common_zero_row(&b), None);
    }

    #[test]
    fn scan_span_counts() {
        let spec = f3();
        let b = vec![
            Matrix::from_ints(&spec, 2, 2, &[1, 0, 0, 0]),
            Matrix::from_ints(&spec, 2, 2, &[0, 0, 0, 1]),
        ];
        let mut n = 0;
        let mut seen = std::collections::HashSet::new();
        scan_span(&b, |m| {
            n += 1;
            seen.insert(m.clone());
            false
        });
        assert_eq!(n, 9);
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn matrix_text_roundtrip() {
        let spec = f9();
        let t = spec.gen();
        let m = Matrix::from_rows(
            &spec,
            vec![
                vec![spec.one(), t.clone()],
                vec![spec.zero(), t.mul_ref(&t)],
            ],
        );
        let s = m.to_string();
        assert_eq!(Matrix::parse(&s).unwrap(), m);
        assert!(Matrix::parse("garbage").is_err());
    }
}
