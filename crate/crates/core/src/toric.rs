//! Toric systems and collections of line bundles.
//!
//! A toric system `A_1, …, A_n` (n ≥ 3) satisfies
//! `A_i·A_{i+1} = A_n·A_1 = 1`, `A_i·A_j = 0` for all other pairs, and
//! `A_1 + … + A_n = −K`. The differences of a numerically exceptional
//! collection of line bundles form one, and every toric system comes back
//! from a collection, uniquely up to a common twist.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::numerics;

/// The first axiom a candidate sequence fails. Indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    TooShort { length: usize },
    Rank { index: usize, expected: usize, got: usize },
    Adjacent { i: usize, j: usize, product: i64 },
    NonAdjacent { i: usize, j: usize, product: i64 },
    Sum { sum: DivisorClass, anticanonical: DivisorClass },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::TooShort { length } => write!(f, "length {length} < 3"),
            AxiomViolation::Rank { index, expected, got } => {
                write!(f, "A_{index} has rank {got}, model rank is {expected}")
            }
            AxiomViolation::Adjacent { i, j, product } => {
                write!(f, "A_{i}.A_{j} = {product}, expected 1")
            }
            AxiomViolation::NonAdjacent { i, j, product } => {
                write!(f, "A_{i}.A_{j} = {product}, expected 0")
            }
            AxiomViolation::Sum { sum, anticanonical } => {
                write!(f, "sum {sum} differs from -K = {anticanonical}")
            }
        }
    }
}

/// Whether positions `i < j` (0-based) of a cyclic sequence of length `n`
/// are neighbours.
#[inline]
pub(crate) fn cyclically_adjacent(i: usize, j: usize, n: usize) -> bool {
    j == i + 1 || (i == 0 && j == n - 1)
}

pub(crate) fn check_axioms(model: &SurfaceModel, divisors: &[DivisorClass]) -> Result<(), AxiomViolation> {
    let n = divisors.len();
    if n < 3 {
        return Err(AxiomViolation::TooShort { length: n });
    }
    for (idx, d) in divisors.iter().enumerate() {
        if d.rank() != model.rank() {
            return Err(AxiomViolation::Rank { index: idx + 1, expected: model.rank(), got: d.rank() });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let product = model.dot(&divisors[i], &divisors[j]);
            if cyclically_adjacent(i, j, n) {
                if product != 1 {
                    return Err(AxiomViolation::Adjacent { i: i + 1, j: j + 1, product });
                }
            } else if product != 0 {
                return Err(AxiomViolation::NonAdjacent { i: i + 1, j: j + 1, product });
            }
        }
    }
    let sum: DivisorClass = divisors.iter().sum::<Option<DivisorClass>>().expect("nonempty");
    let anticanonical = model.anticanonical();
    if sum != anticanonical {
        return Err(AxiomViolation::Sum { sum, anticanonical });
    }
    Ok(())
}

/// A validated toric system.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ToricSystem {
    model: Arc<SurfaceModel>,
    divisors: Vec<DivisorClass>,
}

impl ToricSystem {
    /// Validates the axioms eagerly and reports the first violation.
    pub fn new(model: Arc<SurfaceModel>, divisors: Vec<DivisorClass>) -> Result<ToricSystem> {
        check_axioms(&model, &divisors).map_err(Error::Axiom)?;
        Ok(ToricSystem { model, divisors })
    }

    pub(crate) fn new_unchecked(model: Arc<SurfaceModel>, divisors: Vec<DivisorClass>) -> ToricSystem {
        debug_assert!(check_axioms(&model, &divisors).is_ok());
        ToricSystem { model, divisors }
    }

    pub fn model(&self) -> &SurfaceModel {
        &self.model
    }

    pub fn shared_model(&self) -> &Arc<SurfaceModel> {
        &self.model
    }

    pub fn divisors(&self) -> &[DivisorClass] {
        &self.divisors
    }

    pub fn len(&self) -> usize {
        self.divisors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divisors.is_empty()
    }

    /// `A_i²` for each entry.
    pub fn self_intersections(&self) -> Vec<i64> {
        self.divisors.iter().map(|a| self.model.square(a)).collect()
    }

    /// `A_{k+1}, …, A_n, A_1, …, A_k`; `k` is taken modulo `n`.
    pub fn cyclic_shift(&self, k: isize) -> ToricSystem {
        let n = self.len() as isize;
        let k = k.rem_euclid(n) as usize;
        let mut divisors = self.divisors.clone();
        divisors.rotate_left(k);
        ToricSystem::new_unchecked(self.model.clone(), divisors)
    }

    /// `A_n, …, A_1`.
    pub fn reversed(&self) -> ToricSystem {
        let mut divisors = self.divisors.clone();
        divisors.reverse();
        ToricSystem::new_unchecked(self.model.clone(), divisors)
    }

    /// The `2n` members of the shift/reversal orbit, as `(shift, reversed, system)`.
    pub fn orbit(&self) -> impl Iterator<Item = (usize, bool, ToricSystem)> + '_ {
        let rev = self.reversed();
        let n = self.len();
        (0..2 * n).map(move |t| {
            let (k, r) = (t % n, t >= n);
            let base = if r { &rev } else { self };
            (k, r, base.cyclic_shift(k as isize))
        })
    }

    /// Lexicographically least member of the shift/reversal orbit.
    pub fn canonical_form(&self) -> ToricSystem {
        self.orbit().map(|(_, _, s)| s).min_by(|a, b| a.divisors.cmp(&b.divisors)).expect("nonempty orbit")
    }

    /// `n = ρ + 2`.
    pub fn is_maximal_length(&self) -> bool {
        self.len() == self.model.rank() + 2
    }

    /// Every consecutive sum `A_i + … + A_j`, `1 ≤ i ≤ j ≤ n − 1`, is
    /// numerically left-orthogonal, on a model with `χ(O_X) = 1`.
    pub fn is_num_exceptional(&self) -> Result<bool> {
        if self.model.chi() != 1 {
            return Err(Error::ChiNotOne(self.model.chi()));
        }
        let n = self.len();
        for i in 0..n - 1 {
            let mut sum = self.divisors[i].clone();
            for j in i..n - 1 {
                if j > i {
                    sum = &sum + &self.divisors[j];
                }
                if numerics::euler_char_unchecked(&self.model, &-&sum)? != 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `D_{i+1} = D_1 + A_1 + … + A_i`.
    pub fn collection_from(&self, d1: &DivisorClass) -> Result<LineBundleCollection> {
        self.model.check_rank(d1)?;
        let mut divisors = Vec::with_capacity(self.len());
        let mut cur = d1.clone();
        for a in &self.divisors[..self.len() - 1] {
            divisors.push(cur.clone());
            cur = &cur + a;
        }
        divisors.push(cur);
        Ok(LineBundleCollection { model: self.model.clone(), divisors })
    }
}

impl fmt::Debug for ToricSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ToricSystem[{}]{:?}", self.model.kind(), self.divisors)
    }
}

/// An ordered collection `O(D_1), …, O(D_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineBundleCollection {
    model: Arc<SurfaceModel>,
    divisors: Vec<DivisorClass>,
}

impl LineBundleCollection {
    pub fn new(model: Arc<SurfaceModel>, divisors: Vec<DivisorClass>) -> Result<Self> {
        for d in &divisors {
            model.check_rank(d)?;
        }
        Ok(LineBundleCollection { model, divisors })
    }

    pub fn model(&self) -> &SurfaceModel {
        &self.model
    }

    pub fn divisors(&self) -> &[DivisorClass] {
        &self.divisors
    }

    pub fn len(&self) -> usize {
        self.divisors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.divisors.is_empty()
    }

    /// `χ(O_X) = 1` and `D_j − D_i` numerically left-orthogonal for all `i < j`.
    pub fn is_num_exceptional(&self) -> Result<bool> {
        Ok(self.first_failure()?.is_none())
    }

    fn first_failure(&self) -> Result<Option<Error>> {
        if self.model.chi() != 1 {
            return Ok(Some(Error::ChiNotOne(self.model.chi())));
        }
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                let diff = &self.divisors[j] - &self.divisors[i];
                let chi = numerics::euler_char_unchecked(&self.model, &-&diff)?;
                if chi != 0 {
                    return Ok(Some(Error::NotExceptional { i: i + 1, j: j + 1, chi }));
                }
            }
        }
        Ok(None)
    }

    /// `A_i = D_{i+1} − D_i` for `i < n`, `A_n = −K − (A_1 + … + A_{n−1})`.
    pub fn differences(&self) -> Result<ToricSystem> {
        let n = self.len();
        if n < 3 {
            return Err(Error::Axiom(AxiomViolation::TooShort { length: n }));
        }
        if let Some(e) = self.first_failure()? {
            return Err(e);
        }
        let mut divisors: Vec<DivisorClass> = self.divisors.windows(2).map(|w| &w[1] - &w[0]).collect();
        let partial = &self.divisors[n - 1] - &self.divisors[0];
        divisors.push(&self.model.anticanonical() - &partial);
        // Differences of a numerically exceptional collection always satisfy
        // the axioms; a failure here is a bug, not bad input.
        ToricSystem::new(self.model.clone(), divisors)
            .map_err(|e| Error::Invariant(format!("differences are not a toric system: {e}")))
    }

    /// `D_i` for any integer `i`, extended by `D_{i+n} = D_i − K`.
    pub fn helix_extension(&self, i: i64) -> DivisorClass {
        let n = self.len() as i64;
        assert!(n > 0, "helix of an empty collection");
        let q = (i - 1).div_euclid(n);
        let r = (i - 1).rem_euclid(n) as usize;
        &self.divisors[r] - &self.model.canonical().scale(q)
    }

    /// `(D_{k+1}, …, D_{k+n})` from the helix.
    pub fn helix_window(&self, k: i64) -> LineBundleCollection {
        let n = self.len() as i64;
        LineBundleCollection {
            model: self.model.clone(),
            divisors: (k + 1..=k + n).map(|i| self.helix_extension(i)).collect(),
        }
    }

    /// The same collection twisted by `O(D)`.
    pub fn twisted(&self, d: &DivisorClass) -> Result<LineBundleCollection> {
        self.model.check_rank(d)?;
        Ok(LineBundleCollection { model: self.model.clone(), divisors: self.divisors.iter().map(|x| x + d).collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_model, ModelKind};
    use proptest::prelude::*;

    fn model(kind: ModelKind) -> Arc<SurfaceModel> {
        Arc::new(make_model(kind).unwrap())
    }

    fn dv(c: &[i64]) -> DivisorClass {
        DivisorClass::new(c.to_vec())
    }

    fn dvs(rows: &[&[i64]]) -> Vec<DivisorClass> {
        rows.iter().map(|r| dv(r)).collect()
    }

    /// (S−F, S, S−F, 2F−S) on F_2, in (F, S) coordinates.
    fn f2_system() -> ToricSystem {
        let m = model(ModelKind::Hirzebruch { d: 2 });
        ToricSystem::new(m, dvs(&[&[-1, 1], &[0, 1], &[-1, 1], &[2, -1]])).unwrap()
    }

    #[test]
    fn plane_collection_differences() {
        let p2 = model(ModelKind::ProjectivePlane);
        let c = LineBundleCollection::new(p2.clone(), dvs(&[&[0], &[1], &[2]])).unwrap();
        assert!(c.is_num_exceptional().unwrap());
        let s = c.differences().unwrap();
        assert_eq!(s.divisors(), dvs(&[&[1], &[1], &[1]]).as_slice());
        assert!(s.is_maximal_length());
        assert!(s.is_num_exceptional().unwrap());
        // and back
        assert_eq!(s.collection_from(&dv(&[0])).unwrap(), c);
    }

    #[test]
    fn hirzebruch_f2_collection() {
        let f2 = model(ModelKind::Hirzebruch { d: 2 });
        // (0, S−F, 2S−F, 3S−2F)
        let c = LineBundleCollection::new(f2, dvs(&[&[0, 0], &[-1, 1], &[-1, 2], &[-2, 3]])).unwrap();
        let s = c.differences().unwrap();
        assert_eq!(s, f2_system());
        assert!(s.is_num_exceptional().unwrap());
        assert!(s.cyclic_shift(1).is_num_exceptional().unwrap());
    }

    #[test]
    fn non_exceptional_collection_is_rejected() {
        let p2 = model(ModelKind::ProjectivePlane);
        let c = LineBundleCollection::new(p2.clone(), dvs(&[&[0], &[3], &[4]])).unwrap();
        assert!(!c.is_num_exceptional().unwrap());
        assert!(matches!(c.differences(), Err(Error::NotExceptional { i: 1, j: 2, .. })));
        let short = LineBundleCollection::new(p2, dvs(&[&[0], &[1]])).unwrap();
        assert!(matches!(short.differences(), Err(Error::Axiom(AxiomViolation::TooShort { length: 2 }))));
    }

    #[test]
    fn small_collections() {
        let p2 = model(ModelKind::ProjectivePlane);
        // χ(−2H) = 0, so (O, O(2)) passes the numerical test
        let c = LineBundleCollection::new(p2.clone(), dvs(&[&[0], &[2]])).unwrap();
        assert!(c.is_num_exceptional().unwrap());
        let c = LineBundleCollection::new(p2.clone(), dvs(&[&[0], &[3]])).unwrap();
        assert!(!c.is_num_exceptional().unwrap());
        let single = LineBundleCollection::new(p2, dvs(&[&[5]])).unwrap();
        assert!(single.is_num_exceptional().unwrap());
        let abs = Arc::new(
            SurfaceModel::from_gram(vec!["e".into()], crate::matrix::IntMatrix::identity(1), dv(&[-3]), 2).unwrap(),
        );
        let single = LineBundleCollection::new(abs, dvs(&[&[0]])).unwrap();
        assert!(!single.is_num_exceptional().unwrap());
    }

    #[test]
    fn eager_validation_reports_first_violation() {
        let p2 = model(ModelKind::ProjectivePlane);
        let e = ToricSystem::new(p2.clone(), dvs(&[&[1], &[2], &[0]])).unwrap_err();
        assert!(matches!(e, Error::Axiom(AxiomViolation::Adjacent { i: 1, j: 2, product: 2 })));
        let dp1 = model(ModelKind::DelPezzo { r: 1 });
        // (E, H−E, H, H): E·H = 0 where the cyclic pair (1, 4) needs 1
        let e = ToricSystem::new(dp1.clone(), dvs(&[&[0, 1], &[1, -1], &[1, 0], &[1, 0]])).unwrap_err();
        assert!(matches!(e, Error::Axiom(AxiomViolation::Adjacent { i: 1, j: 4, product: 0 })));
        // (E, H−E, H−E, E): A_1·A_3 = 1 where 0 is needed
        let e = ToricSystem::new(dp1.clone(), dvs(&[&[0, 1], &[1, -1], &[1, -1], &[0, 1]])).unwrap_err();
        assert!(matches!(e, Error::Axiom(AxiomViolation::NonAdjacent { i: 1, j: 3, product: 1 })));
        // (E, H−E, H, H−2E): intersections fine, sum is 3H − 2E ≠ 3H − E
        let e = ToricSystem::new(dp1, dvs(&[&[0, 1], &[1, -1], &[1, 0], &[1, -2]])).unwrap_err();
        assert!(matches!(e, Error::Axiom(AxiomViolation::Adjacent { .. }) | Error::Axiom(AxiomViolation::Sum { .. })));
        let e = ToricSystem::new(p2, dvs(&[&[1], &[1]])).unwrap_err();
        assert!(matches!(e, Error::Axiom(AxiomViolation::TooShort { length: 2 })));
    }

    #[test]
    fn shifts_and_reversal() {
        let s = f2_system();
        assert_eq!(s.cyclic_shift(4), s);
        assert_eq!(s.cyclic_shift(-1), s.cyclic_shift(3));
        assert_eq!(s.reversed().reversed(), s);
        let shifted = s.cyclic_shift(1);
        ToricSystem::new(shifted.shared_model().clone(), shifted.divisors().to_vec()).unwrap();
        assert_eq!(s.canonical_form(), s.cyclic_shift(3).reversed().canonical_form());
        let c = s.canonical_form();
        assert_eq!(c.canonical_form(), c);
    }

    #[test]
    fn helix_extension_values() {
        let p2 = model(ModelKind::ProjectivePlane);
        let c = LineBundleCollection::new(p2, dvs(&[&[0], &[1], &[2]])).unwrap();
        assert_eq!(c.helix_extension(4), dv(&[3]));
        assert_eq!(c.helix_extension(0), dv(&[-1])); // D_3 + K
        assert_eq!(c.helix_extension(-3), dv(&[-4])); // D_0 + K
    }

    #[test]
    fn maximal_length() {
        assert!(f2_system().is_maximal_length());
    }

    #[test]
    fn chi_must_be_one() {
        let abs = Arc::new(
            SurfaceModel::from_gram(vec!["e".into()], crate::matrix::IntMatrix::identity(1), dv(&[-3]), 2).unwrap(),
        );
        let s = ToricSystem::new(abs, dvs(&[&[1], &[1], &[1]])).unwrap();
        assert!(matches!(s.is_num_exceptional(), Err(Error::ChiNotOne(2))));
    }

    proptest! {
        #[test]
        fn helix_windows_are_shifts(k in -12i64..12, twist in proptest::collection::vec(-4i64..4, 2)) {
            let s = f2_system();
            let c = s.collection_from(&DivisorClass::new(twist)).unwrap();
            let w = c.helix_window(k);
            prop_assert!(w.is_num_exceptional().unwrap());
            prop_assert_eq!(w.differences().unwrap(), s.cyclic_shift(k as isize));
        }

        #[test]
        fn twist_does_not_change_differences(t in proptest::collection::vec(-10i64..10, 2)) {
            let s = f2_system();
            let c = s.collection_from(&DivisorClass::zero(2)).unwrap();
            let twisted = c.twisted(&DivisorClass::new(t.clone())).unwrap();
            prop_assert_eq!(twisted.differences().unwrap(), s.clone());
            prop_assert_eq!(s.collection_from(&DivisorClass::new(t)).unwrap(), twisted);
        }
    }
}
