//! One-point blow-ups, the three augmentation patterns, and their inverse.
//!
//! For a toric system `A'_1, …, A'_n` on `X'` and the blow-up `X → X'` with
//! exceptional class `E` (writing `A_i` for pull-backs):
//!
//! ```text
//! Front:      E, A_1−E, A_2, …, A_{n−1}, A_n−E
//! Middle(m):  A_1, …, A_{m−2}, A_{m−1}−E, E, A_m−E, A_{m+1}, …, A_n    (2 ≤ m ≤ n)
//! Back:       A_1−E, A_2, …, A_{n−1}, A_n−E, E
//! ```
//!
//! `E` lands at position 1, `m` and `n + 1` respectively, so a position in
//! the augmented system determines the variant. Blowing down reverses this:
//! drop `E` and add it back to its two cyclic neighbours.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, ModelKind, SurfaceModel};
use crate::matrix::{functional_kernel, IntMatrix};
use crate::toric::ToricSystem;

/// The model of a one-point blow-up, with the pull-back embedding implicit:
/// old coordinates followed by the coefficient of `E`.
#[derive(Clone, Debug)]
pub struct BlowUp {
    pub model: SurfaceModel,
    pub exceptional: DivisorClass,
}

impl BlowUp {
    pub fn pullback(&self, d: &DivisorClass) -> DivisorClass {
        debug_assert_eq!(d.rank() + 1, self.model.rank());
        d.extended()
    }
}

/// Extends the form by an orthogonal generator `E` with `E² = −1` and sets
/// `K' = p*K + E`.
pub fn blow_up_model(model: &SurfaceModel) -> BlowUp {
    let n = model.rank();
    let mut gram = IntMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = model.gram()[(i, j)];
        }
    }
    gram[(n, n)] = -1;
    let mut k = model.canonical().coeffs().to_vec();
    k.push(1);
    let (kind, label) = match model.kind() {
        ModelKind::ProjectivePlane => (ModelKind::DelPezzo { r: 1 }, "R1".to_string()),
        ModelKind::DelPezzo { r } if r < 8 => (ModelKind::DelPezzo { r: r + 1 }, format!("R{}", r + 1)),
        _ => (ModelKind::Abstract, format!("E{}", n + 1)),
    };
    let mut basis = model.basis().to_vec();
    basis.push(label);
    let blown = SurfaceModel::assemble(kind, basis, gram, DivisorClass::new(k), model.chi());
    BlowUp { model: blown, exceptional: DivisorClass::unit(n + 1, n) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Front,
    Middle,
    Back,
}

/// Which augmentation pattern to apply. `m` is only meaningful for
/// [`Variant::Middle`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AugmentationStep {
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl AugmentationStep {
    pub const FRONT: AugmentationStep = AugmentationStep { variant: Variant::Front, m: None };
    pub const BACK: AugmentationStep = AugmentationStep { variant: Variant::Back, m: None };

    pub fn middle(m: usize) -> AugmentationStep {
        AugmentationStep { variant: Variant::Middle, m: Some(m) }
    }

    /// The step whose exceptional class sits at 1-based `position` of an
    /// augmented system of length `augmented_len`.
    pub fn at_position(position: usize, augmented_len: usize) -> Result<AugmentationStep> {
        if position == 0 || position > augmented_len {
            return Err(Error::IndexOutOfRange { index: position, max: augmented_len });
        }
        Ok(if position == 1 {
            AugmentationStep::FRONT
        } else if position == augmented_len {
            AugmentationStep::BACK
        } else {
            AugmentationStep::middle(position)
        })
    }

    /// Validates the step against a system of length `n` (before augmenting).
    pub fn check(&self, n: usize) -> Result<()> {
        match (self.variant, self.m) {
            (Variant::Middle, Some(m)) if (2..=n).contains(&m) => Ok(()),
            (Variant::Middle, Some(m)) => Err(Error::IndexOutOfRange { index: m, max: n }),
            (Variant::Middle, None) => Err(Error::OutOfRange("middle augmentation needs m".into())),
            (_, None) => Ok(()),
            (_, Some(_)) => Err(Error::OutOfRange("front/back augmentations take no m".into())),
        }
    }

    /// 1-based position of `E` in the augmented system, given the original length.
    pub fn exceptional_index(&self, n: usize) -> usize {
        match self.variant {
            Variant::Front => 1,
            Variant::Middle => self.m.expect("middle step without m"),
            Variant::Back => n + 1,
        }
    }
}

impl fmt::Display for AugmentationStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.variant, self.m) {
            (Variant::Middle, Some(m)) => write!(f, "middle(m={m})"),
            (Variant::Front, _) => f.write_str("front"),
            (Variant::Back, _) => f.write_str("back"),
            (Variant::Middle, None) => f.write_str("middle(?)"),
        }
    }
}

/// Applies an augmentation; the result lives on [`blow_up_model`] of the
/// system's model.
pub fn augment(system: &ToricSystem, step: AugmentationStep) -> Result<ToricSystem> {
    let n = system.len();
    step.check(n)?;
    let blow = blow_up_model(system.model());
    let e = blow.exceptional.clone();
    let pulled: Vec<DivisorClass> = system.divisors().iter().map(|a| blow.pullback(a)).collect();
    let pos = step.exceptional_index(n) - 1;
    let mut divisors = pulled;
    divisors.insert(pos, e.clone());
    // neighbours of E, cyclically, lose one E
    let len = n + 1;
    for nb in [(pos + len - 1) % len, (pos + 1) % len] {
        divisors[nb] = &divisors[nb] - &e;
    }
    ToricSystem::new(Arc::new(blow.model), divisors)
        .map_err(|err| Error::Invariant(format!("augmentation is not a toric system: {err}")))
}

/// Result of blowing down a (−1)-entry of a toric system.
#[derive(Clone, Debug)]
pub struct Blowdown {
    /// The system on `E^⊥`, an abstract model.
    pub system: ToricSystem,
    pub exceptional: DivisorClass,
    /// Columns: a basis of `E^⊥` in the original coordinates.
    pub embedding: IntMatrix,
    /// The augmentation that rebuilds the original system.
    pub step: AugmentationStep,
}

impl Blowdown {
    /// `[embedding | E]`: sends coordinates on the blow-up of `E^⊥` to the
    /// original model. It is an isometry onto the original lattice.
    pub fn lift_matrix(&self) -> IntMatrix {
        let mut cols: Vec<Vec<i64>> = (0..self.embedding.cols()).map(|j| self.embedding.column(j)).collect();
        cols.push(self.exceptional.coeffs().to_vec());
        let refs: Vec<&[i64]> = cols.iter().map(Vec::as_slice).collect();
        IntMatrix::from_columns(&refs)
    }
}

/// Blows down the (−1)-entry at 1-based position `m`.
///
/// The neighbours `A_{m−1} + E` and `A_{m+1} + E` and every other entry
/// are orthogonal to `E`, hence pull-backs from `E^⊥`, whose canonical
/// class is `K − E`.
pub fn extract_blowdown(system: &ToricSystem, m: usize) -> Result<Blowdown> {
    let n = system.len();
    if n < 4 {
        return Err(Error::OutOfRange(format!("cannot blow down a system of length {n} < 4")));
    }
    if m == 0 || m > n {
        return Err(Error::IndexOutOfRange { index: m, max: n });
    }
    let model = system.model();
    let pos = m - 1;
    let e = system.divisors()[pos].clone();
    if !model.is_minus_one_class(&e)? {
        return Err(Error::NotMinusOneClass {
            index: m,
            self_intersection: model.square(&e),
            canonical_degree: model.canonical_degree(&e),
        });
    }
    let covector = model.gram().mul_vec(e.coeffs());
    let kernel =
        functional_kernel(&covector).ok_or_else(|| Error::Invariant("(-1)-class with zero covector".into()))?;
    if kernel.content != 1 {
        return Err(Error::Invariant("E.x does not take the value 1".into()));
    }
    let to_kernel = |d: &DivisorClass| -> Result<DivisorClass> {
        if model.dot(d, &e) != 0 {
            return Err(Error::Invariant(format!("{d} is not orthogonal to E = {e}")));
        }
        let c = DivisorClass::new(kernel.coordinates.mul_vec(d.coeffs()));
        debug_assert_eq!(kernel.basis.mul_vec(c.coeffs()), d.coeffs());
        Ok(c)
    };

    let prev = (pos + n - 1) % n;
    let next = (pos + 1) % n;
    let mut divisors = Vec::with_capacity(n - 1);
    for (i, a) in system.divisors().iter().enumerate() {
        if i == pos {
            continue;
        }
        let lifted = if i == prev || i == next { a + &e } else { a.clone() };
        divisors.push(to_kernel(&lifted)?);
    }

    let gram = kernel.basis.transpose().mul(model.gram()).mul(&kernel.basis);
    let canonical = to_kernel(&(model.canonical() - &e))?;
    let basis = (1..n - 2).map(|i| format!("e{i}")).collect();
    let down = SurfaceModel::from_gram(basis, gram, canonical, model.chi())?;
    let down_system = ToricSystem::new(Arc::new(down), divisors)
        .map_err(|err| Error::Invariant(format!("blow-down is not a toric system: {err}")))?;
    Ok(Blowdown {
        system: down_system,
        exceptional: e,
        embedding: kernel.basis,
        step: AugmentationStep::at_position(m, n)?,
    })
}

/// Maps a system on the blow-up of `E^⊥` back to the original model.
pub fn lift(blowdown: &Blowdown, original: &Arc<SurfaceModel>, system: &ToricSystem) -> Result<ToricSystem> {
    let lift = blowdown.lift_matrix();
    let divisors = system.divisors().iter().map(|d| DivisorClass::new(lift.mul_vec(d.coeffs()))).collect();
    ToricSystem::new(original.clone(), divisors)
}
