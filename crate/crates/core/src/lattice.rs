//! Picard lattices of the surfaces in play.
//!
//! A [`SurfaceModel`] is a free lattice with an integral symmetric
//! intersection form, a canonical class and `χ(O_X)`. Standard models use
//! fixed bases: `(H)` for the plane, `(F, S)` for Hirzebruch surfaces and
//! `(H, R_1, …, R_r)` for blow-ups of the plane.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ModelKind {
    ProjectivePlane,
    Hirzebruch {
        d: u32,
    },
    /// Blow-up of the plane in `r ≤ 8` points.
    DelPezzo {
        r: u32,
    },
    Abstract,
}

impl ModelKind {
    /// Short descriptor as accepted by [`ModelKind::parse`].
    pub fn descriptor(&self) -> String {
        match self {
            ModelKind::ProjectivePlane => "P2".into(),
            ModelKind::Hirzebruch { d } => format!("F:{d}"),
            ModelKind::DelPezzo { r } => format!("dP:{r}"),
            ModelKind::Abstract => "abstract".into(),
        }
    }

    /// Parses `P2`, `F:<d>` / `F<d>`, `dP:<r>` / `dP<r>`.
    pub fn parse(s: &str) -> Result<ModelKind> {
        let s = s.trim();
        let param = |rest: &str| -> Result<i64> {
            let rest = rest.strip_prefix(':').unwrap_or(rest);
            rest.parse::<i64>().map_err(|_| Error::Format(format!("bad model parameter in {s:?}")))
        };
        let kind = if s.eq_ignore_ascii_case("p2") {
            ModelKind::ProjectivePlane
        } else if let Some(rest) = s.strip_prefix("dP").or_else(|| s.strip_prefix("dp")) {
            let r = param(rest)?;
            if !(0..=8).contains(&r) {
                return Err(Error::OutOfRange(format!("del Pezzo blow-up count r = {r} not in 0..=8")));
            }
            ModelKind::DelPezzo { r: r as u32 }
        } else if let Some(rest) = s.strip_prefix('F') {
            let d = param(rest)?;
            if d < 0 || d > u32::MAX as i64 {
                return Err(Error::OutOfRange(format!("Hirzebruch parameter d = {d} must be >= 0")));
            }
            ModelKind::Hirzebruch { d: d as u32 }
        } else {
            return Err(Error::Format(format!("unknown model descriptor {s:?}")));
        };
        Ok(kind)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// Coordinates of a divisor class in a model's basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivisorClass {
    coeffs: Vec<i64>,
}

impl DivisorClass {
    pub fn new(coeffs: Vec<i64>) -> Self {
        DivisorClass { coeffs }
    }

    pub fn zero(rank: usize) -> Self {
        DivisorClass::new(vec![0; rank])
    }

    /// The `i`-th basis vector.
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        DivisorClass::new(c)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<i64> {
        self.coeffs
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i64) -> DivisorClass {
        DivisorClass::new(self.coeffs.iter().map(|&c| matrix::mul(c, k)).collect())
    }

    /// Appends a zero coordinate (pull-back along a one-point blow-up).
    pub fn extended(&self) -> DivisorClass {
        let mut c = self.coeffs.clone();
        c.push(0);
        DivisorClass::new(c)
    }

    fn zip_with(&self, other: &DivisorClass, f: fn(i64, i64) -> i64) -> DivisorClass {
        assert_eq!(self.rank(), other.rank(), "divisor classes of different rank");
        DivisorClass::new(self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn max_abs(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl From<Vec<i64>> for DivisorClass {
    fn from(c: Vec<i64>) -> Self {
        DivisorClass::new(c)
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, matrix::add)
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        self.zip_with(rhs, matrix::sub)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass::new(
            self.coeffs.iter().map(|&c| c.checked_neg().expect("integer overflow in lattice arithmetic")).collect(),
        )
    }
}

impl<'a> std::iter::Sum<&'a DivisorClass> for Option<DivisorClass> {
    fn sum<I: Iterator<Item = &'a DivisorClass>>(mut iter: I) -> Self {
        let first = iter.next()?.clone();
        Some(iter.fold(first, |acc, d| &acc + d))
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

/// A Picard lattice with intersection form and canonical class.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SurfaceModel {
    kind: ModelKind,
    basis: Vec<String>,
    gram: IntMatrix,
    canonical: DivisorClass,
    chi: i64,
    /// `gram · canonical`, so `D·K` is a plain dot product.
    canonical_form: Vec<i64>,
}

impl SurfaceModel {
    /// The standard model of the given kind.
    pub fn standard(kind: ModelKind) -> Result<SurfaceModel> {
        let (basis, gram, canonical) = match kind {
            ModelKind::ProjectivePlane => (vec!["H".to_string()], IntMatrix::identity(1), vec![-3]),
            ModelKind::Hirzebruch { d } => (
                vec!["F".to_string(), "S".to_string()],
                IntMatrix::new(2, 2, vec![0, 1, 1, d as i64]),
                vec![d as i64 - 2, -2],
            ),
            ModelKind::DelPezzo { r } => {
                if r > 8 {
                    return Err(Error::OutOfRange(format!("del Pezzo blow-up count r = {r} not in 0..=8")));
                }
                let r = r as usize;
                let mut basis = vec!["H".to_string()];
                basis.extend((1..=r).map(|i| format!("R{i}")));
                let mut diag = vec![-1; r + 1];
                diag[0] = 1;
                let mut k = vec![1; r + 1];
                k[0] = -3;
                (basis, IntMatrix::diagonal(&diag), k)
            }
            ModelKind::Abstract => {
                return Err(Error::OutOfRange(
                    "abstract models have no standard form; use SurfaceModel::from_gram".into(),
                ))
            }
        };
        let model = SurfaceModel::assemble(kind, basis, gram, DivisorClass::new(canonical), 1);
        debug_assert!(model.check_standard_invariants().is_ok());
        Ok(model)
    }

    /// An abstract model from an intersection matrix. The form must be
    /// symmetric and non-degenerate; `chi` is `χ(O_X)`.
    pub fn from_gram(basis: Vec<String>, gram: IntMatrix, canonical: DivisorClass, chi: i64) -> Result<SurfaceModel> {
        if !gram.is_square() || gram.rows() == 0 {
            return Err(Error::InvalidLattice("gram matrix must be square and nonempty".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::InvalidLattice("gram matrix is not symmetric".into()));
        }
        if gram.det() == 0 {
            return Err(Error::InvalidLattice(
                "degenerate intersection form (quotient by numerical equivalence first)".into(),
            ));
        }
        let rank = gram.rows();
        if canonical.rank() != rank {
            return Err(Error::DimensionMismatch { expected: rank, got: canonical.rank() });
        }
        if basis.len() != rank {
            return Err(Error::DimensionMismatch { expected: rank, got: basis.len() });
        }
        Ok(SurfaceModel::assemble(ModelKind::Abstract, basis, gram, canonical, chi))
    }

    /// Abstract model with basis labels `e1, e2, …` and `χ(O_X) = 1`.
    pub fn abstract_unlabelled(gram: IntMatrix, canonical: DivisorClass) -> Result<SurfaceModel> {
        let basis = (1..=gram.rows()).map(|i| format!("e{i}")).collect();
        SurfaceModel::from_gram(basis, gram, canonical, 1)
    }

    pub(crate) fn assemble(
        kind: ModelKind,
        basis: Vec<String>,
        gram: IntMatrix,
        canonical: DivisorClass,
        chi: i64,
    ) -> SurfaceModel {
        let canonical_form = gram.mul_vec(canonical.coeffs());
        SurfaceModel { kind, basis, gram, canonical, chi, canonical_form }
    }

    /// Checks determinant, signature, canonical class and degree against
    /// the documented conventions for standard kinds.
    pub fn check_standard_invariants(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidLattice(format!("{}: {m}", self.kind)));
        if self.kind == ModelKind::Abstract {
            return Ok(());
        }
        if !self.gram.is_symmetric() {
            return fail("gram not symmetric");
        }
        if self.gram.det().abs() != 1 {
            return fail("gram not unimodular");
        }
        if self.gram.inertia() != (1, self.rank() - 1, 0) {
            return fail("signature is not (1, rank-1)");
        }
        if let ModelKind::DelPezzo { .. } = self.kind {
            if !(1..=9).contains(&self.degree()) {
                return fail("degree outside 1..=9");
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    /// `χ(O_X)`.
    pub fn chi(&self) -> i64 {
        self.chi
    }

    pub fn anticanonical(&self) -> DivisorClass {
        -&self.canonical
    }

    pub fn check_rank(&self, d: &DivisorClass) -> Result<()> {
        if d.rank() == self.rank() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.rank(), got: d.rank() })
        }
    }

    /// `D1 · D2`.
    pub fn intersect(&self, d1: &DivisorClass, d2: &DivisorClass) -> Result<i64> {
        self.check_rank(d1)?;
        self.check_rank(d2)?;
        Ok(self.dot(d1, d2))
    }

    /// Intersection without rank checks, for already validated inputs.
    #[inline]
    pub(crate) fn dot(&self, d1: &DivisorClass, d2: &DivisorClass) -> i64 {
        self.gram.bilinear(d1.coeffs(), d2.coeffs())
    }

    #[inline]
    pub(crate) fn square(&self, d: &DivisorClass) -> i64 {
        self.dot(d, d)
    }

    /// `D · K`.
    #[inline]
    pub(crate) fn canonical_degree(&self, d: &DivisorClass) -> i64 {
        matrix::dot(&self.canonical_form, d.coeffs())
    }

    /// `K²`.
    pub fn degree(&self) -> i64 {
        self.dot(&self.canonical, &self.canonical)
    }

    /// Numeric (−1)-class test: `D² = −1` and `D·K = −1`.
    pub fn is_minus_one_class(&self, d: &DivisorClass) -> Result<bool> {
        self.check_rank(d)?;
        Ok(self.square(d) == -1 && self.canonical_degree(d) == -1)
    }

    /// `G·K` as a covector.
    pub fn canonical_covector(&self) -> &[i64] {
        &self.canonical_form
    }

    /// Whether every `x² ` is even.
    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)] % 2 == 0)
    }

    /// Largest `k` with `K·x ∈ kZ` for all `x`.
    pub fn canonical_divisibility(&self) -> i64 {
        self.canonical_form.iter().fold(0i64, |g, &x| num_integer::gcd(g, x))
    }

    /// Lattice-level del Pezzo test: `K² ∈ 1..=9` and the form is
    /// negative definite on `K^⊥`.
    ///
    /// With `K² > 0`, negative definiteness on `K^⊥` is equivalent to the
    /// form having exactly one positive eigenvalue and none zero, since
    /// `Q ⊗ lattice = Q·K ⊕ K^⊥` orthogonally.
    pub fn check_del_pezzo(&self) -> Result<()> {
        if let ModelKind::Hirzebruch { d } = self.kind {
            if d >= 2 {
                return Err(Error::NotDelPezzo(format!("F_{d}: -K is not ample for d >= 2")));
            }
        }
        let deg = self.degree();
        if !(1..=9).contains(&deg) {
            return Err(Error::NotDelPezzo(format!("K^2 = {deg} not in 1..=9")));
        }
        if self.gram.inertia() != (1, self.rank() - 1, 0) {
            return Err(Error::NotDelPezzo("intersection form is not negative definite on K-perp".into()));
        }
        if self.chi != 1 {
            return Err(Error::ChiNotOne(self.chi));
        }
        Ok(())
    }
}

impl fmt::Debug for SurfaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceModel")
            .field("kind", &self.kind)
            .field("basis", &self.basis)
            .field("gram", &self.gram)
            .field("canonical", &self.canonical)
            .field("chi", &self.chi)
            .finish()
    }
}

/// Shorthand for [`SurfaceModel::standard`].
pub fn make_model(kind: ModelKind) -> Result<SurfaceModel> {
    SurfaceModel::standard(kind)
}
