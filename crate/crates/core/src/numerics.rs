//! Riemann–Roch Euler characteristics and the Euler pairing on the
//! numerical Grothendieck group.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::matrix::{self, IntMatrix};

/// `χ(D) = D·(D − K)/2 + χ(O_X)`.
pub fn euler_char(model: &SurfaceModel, d: &DivisorClass) -> Result<i64> {
    model.check_rank(d)?;
    euler_char_unchecked(model, d)
}

pub(crate) fn euler_char_unchecked(model: &SurfaceModel, d: &DivisorClass) -> Result<i64> {
    let twice = matrix::sub(model.square(d), model.canonical_degree(d));
    if twice % 2 != 0 {
        return Err(Error::Parity(twice));
    }
    Ok(matrix::add(twice / 2, model.chi()))
}

/// `χ(−D) = 0`.
pub fn is_num_left_orthogonal(model: &SurfaceModel, d: &DivisorClass) -> Result<bool> {
    model.check_rank(d)?;
    Ok(euler_char_unchecked(model, &-d)? == 0)
}

/// A class in the numerical Grothendieck group, recorded by its Chern
/// character. The degree-two part is stored doubled.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NumK0Class {
    pub rk: i64,
    pub c1: DivisorClass,
    /// `2·ch₂`.
    pub ch2x2: i64,
}

impl NumK0Class {
    /// `[O(D)]`: rank 1, `ch₁ = D`, `ch₂ = D²/2`.
    pub fn line_bundle(model: &SurfaceModel, d: &DivisorClass) -> NumK0Class {
        NumK0Class { rk: 1, c1: d.clone(), ch2x2: model.square(d) }
    }

    pub fn structure_sheaf(model: &SurfaceModel) -> NumK0Class {
        NumK0Class::line_bundle(model, &DivisorClass::zero(model.rank()))
    }

    /// The point-like class `(0, 0, ch₂ = −1)`.
    pub fn point(model: &SurfaceModel) -> NumK0Class {
        NumK0Class { rk: 0, c1: DivisorClass::zero(model.rank()), ch2x2: -2 }
    }

    pub fn add(&self, other: &NumK0Class) -> NumK0Class {
        NumK0Class {
            rk: matrix::add(self.rk, other.rk),
            c1: &self.c1 + &other.c1,
            ch2x2: matrix::add(self.ch2x2, other.ch2x2),
        }
    }

    pub fn sub(&self, other: &NumK0Class) -> NumK0Class {
        NumK0Class {
            rk: matrix::sub(self.rk, other.rk),
            c1: &self.c1 - &other.c1,
            ch2x2: matrix::sub(self.ch2x2, other.ch2x2),
        }
    }
}

/// `χ(x, y) = e f χ(O_X) − ch₁(x)·ch₁(y) − ½ K·(e ch₁(y) − f ch₁(x)) + f ch₂(x) + e ch₂(y)`
/// with `e = rk x`, `f = rk y`.
///
/// On line bundles this gives `χ(O(D₁), O(D₂)) = χ(D₂ − D₁)`.
pub fn euler_pairing(model: &SurfaceModel, x: &NumK0Class, y: &NumK0Class) -> Result<i64> {
    model.check_rank(&x.c1)?;
    model.check_rank(&y.c1)?;
    use matrix::{add, mul, sub};
    let (e, f) = (x.rk, y.rk);
    let twisted = sub(mul(e, model.canonical_degree(&y.c1)), mul(f, model.canonical_degree(&x.c1)));
    let twice = [
        mul(mul(2, mul(e, f)), model.chi()),
        -mul(2, model.dot(&x.c1, &y.c1)),
        -twisted,
        mul(f, x.ch2x2),
        mul(e, y.ch2x2),
    ]
    .into_iter()
    .fold(0i64, add);
    if twice % 2 != 0 {
        return Err(Error::NonIntegralPairing(twice));
    }
    Ok(twice / 2)
}

/// The basis `[O_X]`, `[O(e_i)] − [O_X]` (i = 1..ρ), point class used by
/// [`pairing_gram`].
pub fn pairing_basis(model: &SurfaceModel) -> Vec<NumK0Class> {
    let n = model.rank();
    let o = NumK0Class::structure_sheaf(model);
    let mut basis = vec![o.clone()];
    for i in 0..n {
        basis.push(NumK0Class::line_bundle(model, &DivisorClass::unit(n, i)).sub(&o));
    }
    basis.push(NumK0Class::point(model));
    basis
}

/// Gram matrix of the Euler pairing on [`pairing_basis`]: size `ρ + 2`.
pub fn pairing_gram(model: &SurfaceModel) -> Result<IntMatrix> {
    let basis = pairing_basis(model);
    let n = basis.len();
    let mut g = IntMatrix::zeros(n, n);
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate() {
            g[(i, j)] = euler_pairing(model, x, y)?;
        }
    }
    Ok(g)
}
