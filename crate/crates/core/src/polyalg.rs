//! Univariate polynomial algebra over the field tower.
//!
//! Provides exact arithmetic, deterministic (seeded) factorization into
//! monic irreducibles, the dual `f*` and twisted dual, and the three-way
//! type classification of minimal self-reciprocal polynomials that the
//! symplectic/orthogonal class parameterization rests on.
//!
//! Values are immutable and every operation is pure, so everything here is
//! safe to share across threads.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field_tower::{unitary_sigma, FieldElement, FieldError, FieldSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("polynomial must have nonzero constant term")]
    ZeroConstantTerm,
    #[error("polynomial is not minimal self-reciprocal: {0}")]
    NotStarIrreducible(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// Dense univariate polynomial; coefficients low-to-high with no trailing
/// zeros (the zero polynomial has an empty coefficient list).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    spec: FieldSpec,
    coeffs: Vec<FieldElement>,
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "{}@{}", self.spec.zero(), self.spec);
        }
        let cs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}@{}", cs.join(","), self.spec)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    /// Canonical order: degree first, then coefficient tuples low-degree-first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl Poly {
    pub fn new(spec: &FieldSpec, mut coeffs: Vec<FieldElement>) -> Poly {
        assert!(
            coeffs.iter().all(|c| c.spec() == spec),
            "mixed-field polynomial"
        );
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            spec: spec.clone(),
            coeffs,
        }
    }

    pub fn from_ints(spec: &FieldSpec, ints: &[i64]) -> Poly {
        Poly::new(spec, ints.iter().map(|&n| spec.from_int(n)).collect())
    }

    pub fn zero(spec: &FieldSpec) -> Poly {
        Poly {
            spec: spec.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(spec: &FieldSpec) -> Poly {
        Poly::constant(spec.one())
    }

    pub fn constant(c: FieldElement) -> Poly {
        let spec = c.spec().clone();
        Poly::new(&spec, vec![c])
    }

    /// The polynomial x.
    pub fn x(spec: &FieldSpec) -> Poly {
        Poly::new(spec, vec![spec.zero(), spec.one()])
    }

    /// x - root.
    pub fn linear_from_root(root: &FieldElement) -> Poly {
        let spec = root.spec().clone();
        Poly::new(&spec, vec![root.neg_ref(), spec.one()])
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(|| self.spec.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| self.spec.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    /// True for the monomial x.
    pub fn is_x(&self) -> bool {
        self.coeffs.len() == 2 && self.coeffs[0].is_zero() && self.coeffs[1].is_one()
    }

    pub fn make_monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self
            .leading()
            .inverse()
            .expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    pub fn scale(&self, c: &FieldElement) -> Poly {
        Poly::new(
            &self.spec,
            self.coeffs.iter().map(|a| a.mul_ref(c)).collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coeff(i).add_ref(&other.coeff(i)))
            .collect();
        Poly::new(&self.spec, coeffs)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coeff(i).sub_ref(&other.coeff(i)))
            .collect();
        Poly::new(&self.spec, coeffs)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(
            &self.spec,
            self.coeffs.iter().map(|c| c.neg_ref()).collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.spec);
        }
        let mut out = vec![self.spec.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly::new(&self.spec, out)
    }

    /// Euclidean division: self = q * divisor + r with deg r < deg divisor.
    pub fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() || self.coeffs.len() < divisor.coeffs.len() {
            return (Poly::zero(&self.spec), self.clone());
        }
        let lead_inv = divisor.leading().inverse().unwrap();
        let dd = divisor.deg();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![self.spec.zero(); rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            if rem[top].is_zero() {
                continue;
            }
            let c = rem[top].mul_ref(&lead_inv);
            quot[top - dd] = c.clone();
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[top - dd + j] = rem[top - dd + j].sub_ref(&c.mul_ref(dc));
            }
        }
        (Poly::new(&self.spec, quot), Poly::new(&self.spec, rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.divrem(divisor).1
    }

    pub fn div_exact(&self, divisor: &Poly) -> Poly {
        let (q, r) = self.divrem(divisor);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        let mut acc = x.spec().zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(&self.spec);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| c.mul_ref(&self.spec.from_int((i + 1) as i64)))
            .collect();
        Poly::new(&self.spec, coeffs)
    }

    /// self^exp modulo m.
    pub fn powmod(&self, mut exp: u128, m: &Poly) -> Poly {
        let mut acc = Poly::one(&self.spec);
        let mut base = self.rem(m);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            exp >>= 1;
        }
        acc
    }

    /// Apply sigma (the q-power involution) to every coefficient.
    pub fn map_sigma(&self, base_q: u64) -> Result<Poly, PolyError> {
        let coeffs: Result<Vec<_>, _> = self
            .coeffs
            .iter()
            .map(|c| unitary_sigma(c, base_q))
            .collect();
        Ok(Poly::new(&self.spec, coeffs?))
    }

    /// Lift every coefficient into a larger field level.
    pub fn embed(&self, target: &FieldSpec) -> Result<Poly, PolyError> {
        let coeffs: Result<Vec<_>, _> = self
            .coeffs
            .iter()
            .map(|c| crate::field_tower::embed(c, target))
            .collect();
        Ok(Poly::new(target, coeffs?))
    }

    /// Roots in the coefficient field, in element order, with multiplicity.
    pub fn roots(&self) -> Vec<(FieldElement, u32)> {
        let mut out = Vec::new();
        if self.is_zero() {
            return out;
        }
        let mut f = self.clone();
        for x in self.spec.elements() {
            let mut m = 0;
            let lin = Poly::linear_from_root(&x);
            loop {
                let (q, r) = f.divrem(&lin);
                if r.is_zero() {
                    f = q;
                    m += 1;
                } else {
                    break;
                }
            }
            if m > 0 {
                out.push((x, m));
            }
            if f.degree() == Some(0) {
                break;
            }
        }
        out
    }

    /// Parse the `<c0,...,cn>@<fieldspec>` text format.
    pub fn parse(s: &str) -> Result<Poly, PolyError> {
        let (coeff_part, spec_part) = s
            .rsplit_once('@')
            .ok_or_else(|| PolyError::Parse("missing '@fieldspec'".into()))?;
        let spec = FieldSpec::parse(spec_part)?;
        let coeffs = parse_element_list(coeff_part, &spec)?;
        Ok(Poly::new(&spec, coeffs))
    }
}

/// Parse a comma-separated list of bracketed elements, e.g. `[1,0],[2,1]`.
pub fn parse_element_list(s: &str, spec: &FieldSpec) -> Result<Vec<FieldElement>, PolyError> {
    let mut out = Vec::new();
    let s = s.trim();
    let mut rest = s;
    while !rest.is_empty() {
        let start = rest
            .find('[')
            .ok_or_else(|| PolyError::Parse(format!("expected '[' in '{rest}'")))?;
        let end = rest[start..]
            .find(']')
            .map(|e| start + e)
            .ok_or_else(|| PolyError::Parse(format!("unclosed '[' in '{rest}'")))?;
        let body = &rest[start + 1..end];
        let coords: Result<Vec<u64>, _> =
            body.split(',').map(|c| c.trim().parse::<u64>()).collect();
        let coords = coords.map_err(|e| PolyError::Parse(format!("bad element '{body}': {e}")))?;
        out.push(spec.element(coords).map_err(PolyError::Field)?);
        rest = rest[end + 1..].trim_start_matches([',', ' ']);
    }
    if out.is_empty() {
        return Err(PolyError::Parse("empty element list".into()));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Irreducibility and factorization
// ---------------------------------------------------------------------------

/// Rabin test over F_q.
pub fn is_irreducible(f: &Poly) -> bool {
    let Some(n) = f.degree() else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let q = f.spec().order() as u128;
    let f = f.make_monic();
    let x = Poly::x(f.spec());
    let xqn = x.powmod(q.pow(n as u32), &f);
    if xqn != x.rem(&f) {
        return false;
    }
    for (l, _) in crate::field_tower::factor_u64(n as u64) {
        let e = q.pow((n as u64 / l) as u32);
        let t = x.powmod(e, &f).sub(&x);
        if !t.gcd(&f).is_one() {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FieldElement,
    /// Monic irreducible factors with multiplicities, sorted by degree then
    /// by coefficient order.
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn product(&self) -> Poly {
        let mut acc = Poly::constant(self.unit.clone());
        for (f, m) in &self.factors {
            for _ in 0..*m {
                acc = acc.mul(f);
            }
        }
        acc
    }
}

fn fnv1a64(bytes: impl IntoIterator<Item = u64>) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for w in bytes {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Stable seed derived from the polynomial itself, so that the randomized
/// equal-degree splitting is reproducible run to run.
fn canonical_seed(f: &Poly) -> u64 {
    let mut words: Vec<u64> = vec![f.spec().p(), f.spec().k() as u64];
    words.extend(f.spec().modulus().iter().copied());
    for c in f.coeffs() {
        words.extend(c.coeffs().iter().copied());
    }
    fnv1a64(words)
}

/// Coefficient-wise p-th root: for f = h(x^p), recover h.
fn pth_root_poly(f: &Poly) -> Poly {
    let spec = f.spec().clone();
    let p = spec.p() as usize;
    let root_exp = (spec.order() / spec.p()) as u128; // c -> c^(q/p) inverts Frobenius
    let mut coeffs = Vec::new();
    let mut i = 0;
    while i < f.coeffs().len() {
        debug_assert!(i % p == 0 || f.coeff(i).is_zero());
        if i % p == 0 {
            coeffs.push(f.coeff(i).pow(root_exp));
        }
        i += 1;
    }
    Poly::new(&spec, coeffs)
}

/// Squarefree decomposition of a monic polynomial (characteristic-p aware).
fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, u32)> {
    let p = f.spec().p() as u32;
    if f.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let fd = f.derivative();
    if fd.is_zero() {
        let h = pth_root_poly(f);
        return squarefree_decomposition(&h)
            .into_iter()
            .map(|(g, m)| (g, m * p))
            .collect();
    }
    let mut out = Vec::new();
    let mut c = f.gcd(&fd);
    let mut w = f.div_exact(&c);
    let mut i = 1u32;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c);
        let z = w.div_exact(&y);
        if z.degree().unwrap_or(0) > 0 {
            out.push((z, i));
        }
        w = y.clone();
        c = c.div_exact(&y);
        i += 1;
    }
    if c.degree().unwrap_or(0) > 0 {
        let h = pth_root_poly(&c);
        out.extend(
            squarefree_decomposition(&h)
                .into_iter()
                .map(|(g, m)| (g, m * p)),
        );
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let spec = f.spec().clone();
    let q = spec.order() as u128;
    let mut out = Vec::new();
    let mut f = f.clone();
    let x = Poly::x(&spec);
    let mut h = x.clone();
    let mut d = 0usize;
    while f.deg() > 0 {
        d += 1;
        if 2 * d > f.deg() {
            out.push((f.clone(), f.deg()));
            break;
        }
        h = h.powmod(q, &f);
        let g = f.gcd(&h.sub(&x));
        if g.degree().unwrap_or(0) > 0 {
            out.push((g.clone(), d));
            f = f.div_exact(&g);
            h = h.rem(&f);
        }
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting (odd q), deterministic via the
/// seeded stream.
fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    if f.deg() == d {
        return vec![f.clone()];
    }
    let spec = f.spec().clone();
    let q = spec.order();
    let e = ((q as u128).pow(d as u32) - 1) / 2;
    loop {
        // Random polynomial of degree < deg f.
        let coeffs: Vec<FieldElement> = (0..f.deg())
            .map(|_| {
                let idx = rng.random_range(0..q);
                spec.elements().nth(idx as usize).unwrap()
            })
            .collect();
        let a = Poly::new(&spec, coeffs);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let g = a.gcd(f);
        if g.degree().unwrap_or(0) > 0 && g.deg() < f.deg() {
            let rest = f.div_exact(&g);
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&rest, d, rng));
            return out;
        }
        let b = a.powmod(e, f);
        for shift in [b.sub(&Poly::one(&spec)), b.add(&Poly::one(&spec))] {
            let g = shift.gcd(f);
            if g.degree().unwrap_or(0) > 0 && g.deg() < f.deg() {
                let rest = f.div_exact(&g);
                let mut out = equal_degree(&g, d, rng);
                out.extend(equal_degree(&rest, d, rng));
                return out;
            }
        }
    }
}

/// Factor into monic irreducibles. Deterministic: the internal randomization
/// is seeded from a canonical hash of the input.
pub fn factorize(f: &Poly) -> Result<Factorization, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let unit = f.leading();
    let monic = f.make_monic();
    let mut rng = ChaCha8Rng::seed_from_u64(canonical_seed(&monic) ^ 0x7761_6c6c);
    let mut acc: BTreeMap<Poly, u32> = BTreeMap::new();
    for (g, mult) in squarefree_decomposition(&monic) {
        for (h, d) in distinct_degree(&g) {
            for irr in equal_degree(&h, d, &mut rng) {
                *acc.entry(irr.make_monic()).or_insert(0) += mult;
            }
        }
    }
    Ok(Factorization {
        unit,
        factors: acc.into_iter().collect(),
    })
}

// ---------------------------------------------------------------------------
// Duals and the type classification
// ---------------------------------------------------------------------------

fn check_dual_preconditions(f: &Poly) -> Result<(), PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(PolyError::NotMonic);
    }
    if f.coeff(0).is_zero() {
        return Err(PolyError::ZeroConstantTerm);
    }
    Ok(())
}

/// The dual `f*(x) = f(0)^{-1} x^r f(1/x)`: monic, same degree, roots are
/// the inverses of the roots of f.
pub fn dual(f: &Poly) -> Result<Poly, PolyError> {
    check_dual_preconditions(f)?;
    let c0_inv = f.coeff(0).inverse().unwrap();
    let mut rev: Vec<FieldElement> = f.coeffs().iter().rev().cloned().collect();
    for c in rev.iter_mut() {
        *c = c.mul_ref(&c0_inv);
    }
    Ok(Poly::new(f.spec(), rev))
}

/// The twisted dual: apply sigma to the coefficients and invert the roots;
/// an involution on monic polynomials over `F_{q^2}` with nonzero constant
/// term.
pub fn twisted_dual(f: &Poly, base_q: u64) -> Result<Poly, PolyError> {
    check_dual_preconditions(f)?;
    let sf = f.map_sigma(base_q)?;
    dual(&sf)
}

pub fn is_self_reciprocal(f: &Poly) -> Result<bool, PolyError> {
    Ok(dual(f)? == *f)
}

pub fn is_tilde_symmetric(f: &Poly, base_q: u64) -> Result<bool, PolyError> {
    Ok(twisted_dual(f, base_q)? == *f)
}

/// Type of a minimal self-reciprocal polynomial:
/// irreducible of even degree; a product `g g*` with `g` irreducible and
/// `g != g*`; or the linear polynomials `x - 1` and `x + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MilnorType {
    Type1,
    Type2,
    Type3,
}

impl fmt::Display for MilnorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MilnorType::Type1 => write!(f, "type-1"),
            MilnorType::Type2 => write!(f, "type-2"),
            MilnorType::Type3 => write!(f, "type-3"),
        }
    }
}

/// True when f is self-reciprocal and has no proper monic self-reciprocal
/// factor of positive degree.
pub fn is_star_irreducible(f: &Poly) -> Result<bool, PolyError> {
    check_dual_preconditions(f)?;
    if !is_self_reciprocal(f)? {
        return Ok(false);
    }
    let fact = factorize(f)?;
    // Enumerate monic divisors of degree strictly between 0 and deg f.
    let mut divisors = vec![Poly::one(f.spec())];
    for (g, m) in &fact.factors {
        let mut next = Vec::new();
        for d in &divisors {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..*m {
                acc = acc.mul(g);
                next.push(acc.clone());
            }
        }
        divisors = next;
    }
    for d in divisors {
        let deg = d.degree().unwrap_or(0);
        if deg == 0 || deg == f.deg() {
            continue;
        }
        if d.coeff(0).is_zero() {
            continue;
        }
        if is_self_reciprocal(&d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn milnor_type(f: &Poly) -> Result<MilnorType, PolyError> {
    if !is_star_irreducible(f)? {
        return Err(PolyError::NotStarIrreducible(f.to_string()));
    }
    let spec = f.spec().clone();
    if f.deg() == 1 {
        // Self-reciprocal linear polynomials are exactly x - 1 and x + 1.
        debug_assert!(
            *f == Poly::from_ints(&spec, &[-1, 1]) || *f == Poly::from_ints(&spec, &[1, 1])
        );
        return Ok(MilnorType::Type3);
    }
    if is_irreducible(f) {
        debug_assert!(
            f.deg().is_multiple_of(2),
            "irreducible self-reciprocal of odd degree > 1"
        );
        return Ok(MilnorType::Type1);
    }
    let fact = factorize(f)?;
    if fact.factors.len() == 2
        && fact.factors.iter().all(|(_, m)| *m == 1)
        && dual(&fact.factors[0].0)? == fact.factors[1].0
        && fact.factors[0].0 != fact.factors[1].0
    {
        return Ok(MilnorType::Type2);
    }
    Err(PolyError::NotStarIrreducible(format!(
        "unclassifiable minimal self-reciprocal polynomial {f}"
    )))
}

/// All monic irreducible polynomials of the given degree, in canonical order.
pub fn monic_irreducibles(spec: &FieldSpec, degree: usize) -> Vec<Poly> {
    assert!(degree >= 1);
    let q = spec.order();
    let count = (q as u128).pow(degree as u32);
    let elements: Vec<FieldElement> = spec.elements().collect();
    let mut out = Vec::new();
    for idx in 0..count {
        let mut coeffs = Vec::with_capacity(degree + 1);
        let mut v = idx;
        for _ in 0..degree {
            coeffs.push(elements[(v % q as u128) as usize].clone());
            v /= q as u128;
        }
        coeffs.push(spec.one());
        let f = Poly::new(spec, coeffs);
        if is_irreducible(&f) {
            out.push(f);
        }
    }
    out.sort();
    out
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_tower::make_field;

    fn f3() -> FieldSpec {
        make_field(3, 1).unwrap()
    }
    fn f5() -> FieldSpec {
        make_field(5, 1).unwrap()
    }
    fn f9() -> FieldSpec {
        make_field(3, 2).unwrap()
    }

    #[test]
    fn factorize_examples() {
        // x^2 - 1 over F_5 splits as (x+1)(x-1).
        let f = Poly::from_ints(&f5(), &[-1, 0, 1]);
        let fact = factorize(&f).unwrap();
        assert_eq!(
            fact.factors,
            vec![
                (Poly::from_ints(&f5(), &[1, 1]), 1),
                (Poly::from_ints(&f5(), &[4, 1]), 1),
            ]
        );

        // x^2 + 1 over F_3 is irreducible: no root among the 3 candidates.
        let g = Poly::from_ints(&f3(), &[1, 0, 1]);
        assert!(f3().elements().all(|x| !g.eval(&x).is_zero()));
        let fact = factorize(&g).unwrap();
        assert_eq!(fact.factors, vec![(g.clone(), 1)]);
        assert!(is_irreducible(&g));

        // x^3 over F_3.
        let h = Poly::from_ints(&f3(), &[0, 0, 0, 1]);
        let fact = factorize(&h).unwrap();
        assert_eq!(fact.factors, vec![(Poly::x(&f3()), 3)]);
    }

    #[test]
    fn factorize_remultiplies_randomized() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for spec in [f3(), f9(), make_field(5, 2).unwrap()] {
            let elements: Vec<FieldElement> = spec.elements().collect();
            for _ in 0..170 {
                let deg = rng.random_range(1..=6usize);
                let mut coeffs: Vec<FieldElement> = (0..deg)
                    .map(|_| elements[rng.random_range(0..elements.len())].clone())
                    .collect();
                coeffs.push(elements[rng.random_range(1..elements.len())].clone());
                let f = Poly::new(&spec, coeffs);
                if f.is_zero() {
                    continue;
                }
                let fact = factorize(&f).unwrap();
                assert_eq!(fact.product(), f, "refactoring {f}");
                for (g, _) in &fact.factors {
                    assert!(g.is_monic());
                    assert!(is_irreducible(g), "claimed factor {g} not irreducible");
                }
            }
        }
    }

    #[test]
    fn factorize_is_deterministic() {
        let spec = f9();
        // A polynomial with two equal-degree factors, where splitting is random.
        let a = Poly::from_ints(&spec, &[1, 0, 1]); // splits over F_9
        let f1 = factorize(&a).unwrap();
        let f2 = factorize(&a).unwrap();
        assert_eq!(f1, f2);
    }

    #[test]
    fn dual_examples() {
        // x - 1 is self-dual.
        let f = Poly::from_ints(&f5(), &[-1, 1]);
        assert_eq!(dual(&f).unwrap(), f);
        assert!(is_self_reciprocal(&f).unwrap());

        // x - 2 over F_5 dualizes to x + 2 (the root 2 maps to 1/2 = 3).
        let g = Poly::from_ints(&f5(), &[-2, 1]);
        assert_eq!(dual(&g).unwrap(), Poly::from_ints(&f5(), &[2, 1]));
        assert!(!is_self_reciprocal(&g).unwrap());

        // x^2 + 1 over F_3: roots form an inverse pair.
        let h = Poly::from_ints(&f3(), &[1, 0, 1]);
        assert!(is_self_reciprocal(&h).unwrap());

        assert!(dual(&Poly::x(&f5())).is_err());
        assert!(dual(&Poly::from_ints(&f5(), &[1, 2])).is_err());
    }

    #[test]
    fn dual_involution_random() {
        use rand::Rng;
        use rand::SeedableRng;
        let spec = f9();
        let elements: Vec<FieldElement> = spec.elements().collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut tested = 0;
        while tested < 200 {
            let deg = rng.random_range(1..=5usize);
            let mut coeffs: Vec<FieldElement> = (0..deg)
                .map(|_| elements[rng.random_range(0..elements.len())].clone())
                .collect();
            if coeffs[0].is_zero() {
                continue;
            }
            coeffs.push(spec.one());
            let f = Poly::new(&spec, coeffs);
            assert_eq!(dual(&dual(&f).unwrap()).unwrap(), f);
            assert_eq!(twisted_dual(&twisted_dual(&f, 3).unwrap(), 3).unwrap(), f);
            tested += 1;
        }
    }

    #[test]
    fn dual_involution_exhaustive_low_degree() {
        // Degree <= 3 monic with nonzero constant term over F_9.
        let spec = f9();
        let elements: Vec<FieldElement> = spec.elements().collect();
        for deg in 1..=3usize {
            let mut idx = vec![0usize; deg];
            loop {
                let mut coeffs: Vec<FieldElement> =
                    idx.iter().map(|&i| elements[i].clone()).collect();
                coeffs.push(spec.one());
                let f = Poly::new(&spec, coeffs);
                if !f.coeff(0).is_zero() {
                    let d = dual(&f).unwrap();
                    assert_eq!(d.deg(), f.deg());
                    assert_eq!(dual(&d).unwrap(), f);
                    let td = twisted_dual(&f, 3).unwrap();
                    assert_eq!(td.deg(), f.deg());
                    assert_eq!(twisted_dual(&td, 3).unwrap(), f);
                }
                // odometer
                let mut slot = 0;
                loop {
                    if slot == deg {
                        break;
                    }
                    idx[slot] += 1;
                    if idx[slot] < elements.len() {
                        break;
                    }
                    idx[slot] = 0;
                    slot += 1;
                }
                if slot == deg {
                    break;
                }
            }
        }
    }

    #[test]
    fn twisted_dual_examples() {
        let spec = f9();
        let one = Poly::from_ints(&spec, &[-1, 1]);
        assert_eq!(twisted_dual(&one, 3).unwrap(), one);

        // x - t: sigma(t)^{-1} = (-t)^{-1} = t, so the polynomial is fixed.
        let t = spec.gen();
        let f = Poly::linear_from_root(&t);
        assert_eq!(twisted_dual(&f, 3).unwrap(), f);
        assert!(is_tilde_symmetric(&f, 3).unwrap());

        // x - (1+t) is moved: sigma(1+t)^{-1} = (1-t)^{-1}.
        let a = spec.element(vec![1, 1]).unwrap();
        let g = Poly::linear_from_root(&a);
        let sigma_a_inv = unitary_sigma(&a, 3).unwrap().inverse().unwrap();
        assert_eq!(
            twisted_dual(&g, 3).unwrap(),
            Poly::linear_from_root(&sigma_a_inv)
        );
    }

    #[test]
    fn milnor_examples() {
        // x + 1 over F_5.
        assert_eq!(
            milnor_type(&Poly::from_ints(&f5(), &[1, 1])).unwrap(),
            MilnorType::Type3
        );
        // x^2 + 1 over F_3: irreducible, self-reciprocal, even degree.
        assert_eq!(
            milnor_type(&Poly::from_ints(&f3(), &[1, 0, 1])).unwrap(),
            MilnorType::Type1
        );
        // x^2 - 4 = (x-2)(x+2) over F_5 with dual(x-2) = x+2.
        assert_eq!(
            milnor_type(&Poly::from_ints(&f5(), &[-4, 0, 1])).unwrap(),
            MilnorType::Type2
        );
        // (x-1)(x+1) has the proper self-reciprocal factor x-1: refused.
        assert!(milnor_type(&Poly::from_ints(&f5(), &[-1, 0, 1])).is_err());
        // x - 2 over F_5 is not self-reciprocal: refused.
        assert!(milnor_type(&Poly::from_ints(&f5(), &[-2, 1])).is_err());
    }

    #[test]
    fn milnor_exhaustive_low_degree() {
        // Every monic polynomial of degree <= 2 with nonzero constant term
        // over F_3 and F_5 is either refused or classified, and the minimal
        // self-reciprocal ones all get exactly one type.
        for spec in [f3(), f5()] {
            let elements: Vec<FieldElement> = spec.elements().collect();
            let mut classified = 0;
            let mut star_irreducible_count = 0;
            let mut polys: Vec<Poly> = Vec::new();
            for c0 in &elements {
                if c0.is_zero() {
                    continue;
                }
                polys.push(Poly::new(&spec, vec![c0.clone(), spec.one()]));
                for c1 in &elements {
                    polys.push(Poly::new(&spec, vec![c0.clone(), c1.clone(), spec.one()]));
                }
            }
            for f in polys {
                let star = is_star_irreducible(&f).unwrap();
                let ty = milnor_type(&f);
                if star {
                    star_irreducible_count += 1;
                    assert!(
                        ty.is_ok(),
                        "{f} is minimal self-reciprocal but unclassified"
                    );
                    classified += 1;
                } else {
                    assert!(ty.is_err(), "{f} should be refused");
                }
            }
            assert_eq!(classified, star_irreducible_count);
            assert!(classified > 0);
        }
    }

    #[test]
    fn milnor_type1_roots_close_under_inversion() {
        // Brute-force cross-check in a splitting field: for irreducible
        // self-reciprocal f of even degree over F_3, the roots in F_9 form
        // a set closed under inversion.
        let spec = f3();
        for f in monic_irreducibles(&spec, 2) {
            if !is_self_reciprocal(&f).unwrap() {
                continue;
            }
            assert_eq!(milnor_type(&f).unwrap(), MilnorType::Type1);
            let up = f.embed(&f9()).unwrap();
            let roots: Vec<FieldElement> = up.roots().into_iter().map(|(r, _)| r).collect();
            assert_eq!(roots.len(), 2);
            for r in &roots {
                assert!(roots.contains(&r.inverse().unwrap()));
            }
        }
    }

    #[test]
    fn poly_text_roundtrip() {
        let spec = f9();
        let f = Poly::new(
            &spec,
            vec![
                spec.element(vec![1, 0]).unwrap(),
                spec.element(vec![2, 1]).unwrap(),
                spec.one(),
            ],
        );
        let s = f.to_string();
        assert_eq!(s, "[1,0],[2,1],[1,0]@p=3;k=2;mod=1,0,1");
        assert_eq!(Poly::parse(&s).unwrap(), f);
    }

    #[test]
    fn monic_irreducible_counts() {
        // Over F_q there are (q^2 - q)/2 monic irreducible quadratics.
        assert_eq!(monic_irreducibles(&f3(), 2).len(), 3);
        assert_eq!(monic_irreducibles(&f5(), 2).len(), 10);
        assert_eq!(monic_irreducibles(&f9(), 2).len(), 36);
        assert_eq!(monic_irreducibles(&f3(), 1).len(), 3);
    }
}
