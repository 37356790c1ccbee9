//! Enumeration of (−1)-classes on del Pezzo lattices.
//!
//! Let `k = K² > 0` and suppose the form has signature `(1, ρ−1)`. Writing
//! `x = tK + y` with `y ∈ K^⊥ ⊗ Q` and `t = x·K / k`, the form
//!
//! ```text
//!     N(x) = 2 (x·K)² − k x²  =  k (t² k − y²)
//! ```
//!
//! is positive definite, because `y² < 0` unless `y = 0`. Its matrix is
//! `N = 2 w wᵀ − k G` with `w = G K`, an integer matrix. Every (−1)-class
//! has `N(x) = 2 + k` exactly, so the classes lie on one ellipsoid shell.
//!
//! The coordinate box containing that ellipsoid is
//! `|x_i| ≤ ⌊√((k + 2) · (N⁻¹)_{ii})⌋`, returned by
//! [`minus_one_search_box`]. The search itself walks the ellipsoid with an
//! exact `Uᵀ D U` decomposition of `N` (Fincke–Pohst), so it never visits
//! the whole box.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::matrix::{IntMatrix, Q};

fn approx(q: &Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn ellipsoid(model: &SurfaceModel) -> Result<(IntMatrix, i64)> {
    let k = model.degree();
    if k <= 0 {
        return Err(Error::NotDelPezzo(format!("K^2 = {k} <= 0: the (-1)-classes are not a finite set")));
    }
    if model.gram().inertia() != (1, model.rank() - 1, 0) {
        return Err(Error::NotDelPezzo("form is not negative definite on K-perp".into()));
    }
    let n = model.rank();
    let w = model.canonical_covector();
    let g = model.gram();
    let mut form = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            form[(i, j)] = 2 * w[i] * w[j] - k * g[(i, j)];
        }
    }
    Ok((form, k + 2))
}

fn check_model(model: &SurfaceModel) -> Result<()> {
    if let crate::lattice::ModelKind::Hirzebruch { d } = model.kind() {
        if d >= 2 {
            return Err(Error::NotDelPezzo(format!("F_{d} is not a del Pezzo surface")));
        }
    }
    Ok(())
}

/// Per-coordinate bound of the box that provably contains every (−1)-class.
pub fn minus_one_search_box(model: &SurfaceModel) -> Result<Vec<i64>> {
    check_model(model)?;
    let (form, target) = ellipsoid(model)?;
    let inv = form.rational_inverse().ok_or_else(|| Error::Invariant("ellipsoid form is singular".into()))?;
    Ok((0..model.rank())
        .map(|i| {
            let bound = inv[i][i] * Q::from_integer(target as i128);
            // largest t with t² ≤ bound
            let mut t = approx(&bound).max(0.0).sqrt().floor() as i64;
            while Q::from_integer(((t + 1) * (t + 1)) as i128) <= bound {
                t += 1;
            }
            while t > 0 && Q::from_integer((t * t) as i128) > bound {
                t -= 1;
            }
            t
        })
        .collect())
}

/// All classes with `D² = D·K = −1`, sorted lexicographically.
pub fn enumerate_minus_one_classes(model: &SurfaceModel) -> Result<Vec<DivisorClass>> {
    check_model(model)?;
    lattice_minus_one_classes(model)
}

/// As [`enumerate_minus_one_classes`] but only checks the lattice
/// conditions, so it also runs on abstract models.
pub(crate) fn lattice_minus_one_classes(model: &SurfaceModel) -> Result<Vec<DivisorClass>> {
    let (form, target) = ellipsoid(model)?;
    let n = model.rank();

    // N = Uᵀ D U, U unit upper triangular.
    let mut a: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| Q::from_integer(form[(i, j)] as i128)).collect()).collect();
    let mut diag = vec![Q::zero(); n];
    let mut upper = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        let d = a[i][i];
        if d <= Q::zero() {
            return Err(Error::Invariant("ellipsoid form is not positive definite".into()));
        }
        diag[i] = d;
        for j in i + 1..n {
            upper[i][j] = a[i][j] / d;
        }
        for r in i + 1..n {
            for c in i + 1..n {
                let v = a[r][i] * a[i][c] / d;
                a[r][c] -= v;
            }
        }
    }

    let mut found = Vec::new();
    let mut x = vec![0i64; n];
    search(n, &diag, &upper, Q::from_integer(target as i128), &mut x, &mut |x: &[i64]| {
        let d = DivisorClass::new(x.to_vec());
        if model.square(&d) == -1 && model.canonical_degree(&d) == -1 {
            found.push(d);
        }
    });
    found.sort();
    Ok(found)
}

/// Fills `x[level-1]`, then recurses to lower indices.
fn search(level: usize, diag: &[Q], upper: &[Vec<Q>], remaining: Q, x: &mut [i64], emit: &mut dyn FnMut(&[i64])) {
    if level == 0 {
        emit(x);
        return;
    }
    let i = level - 1;
    let n = x.len();
    let mut center = Q::zero();
    for j in i + 1..n {
        center -= upper[i][j] * Q::from_integer(x[j] as i128);
    }
    let radius = approx(&(remaining / diag[i])).max(0.0).sqrt();
    let c = approx(&center);
    let lo = (c - radius).floor() as i64 - 1;
    let hi = (c + radius).ceil() as i64 + 1;
    for v in lo..=hi {
        let off = Q::from_integer(v as i128) - center;
        let used = diag[i] * off * off;
        if used > remaining {
            continue;
        }
        x[i] = v;
        search(i, diag, upper, remaining - used, x, emit);
    }
    x[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_model, ModelKind};

    fn dp(r: u32) -> SurfaceModel {
        make_model(ModelKind::DelPezzo { r }).unwrap()
    }

    #[test]
    fn plane_has_none() {
        let p2 = make_model(ModelKind::ProjectivePlane).unwrap();
        assert!(enumerate_minus_one_classes(&p2).unwrap().is_empty());
    }

    #[test]
    fn dp1_has_exactly_r1() {
        assert_eq!(enumerate_minus_one_classes(&dp(1)).unwrap(), vec![DivisorClass::new(vec![0, 1])]);
    }

    #[test]
    fn classes_are_minus_one_and_sorted() {
        for r in 1..=6 {
            let m = dp(r);
            let cls = enumerate_minus_one_classes(&m).unwrap();
            assert!(cls.windows(2).all(|w| w[0] < w[1]));
            for c in &cls {
                assert!(m.is_minus_one_class(c).unwrap());
            }
        }
    }

    #[test]
    fn box_for_dp8() {
        // (k+2)·(N⁻¹)_ii = 51 for H and 9 for each R_i when k = 1.
        assert_eq!(minus_one_search_box(&dp(8)).unwrap(), vec![7, 3, 3, 3, 3, 3, 3, 3, 3]);
    }

    #[test]
    fn hirzebruch_models() {
        let f0 = make_model(ModelKind::Hirzebruch { d: 0 }).unwrap();
        assert!(enumerate_minus_one_classes(&f0).unwrap().is_empty());
        let f1 = make_model(ModelKind::Hirzebruch { d: 1 }).unwrap();
        // B = S − F is the only one
        assert_eq!(enumerate_minus_one_classes(&f1).unwrap(), vec![DivisorClass::new(vec![-1, 1])]);
        let f2 = make_model(ModelKind::Hirzebruch { d: 2 }).unwrap();
        assert!(matches!(enumerate_minus_one_classes(&f2), Err(Error::NotDelPezzo(_))));
    }

    #[test]
    fn rejects_non_del_pezzo_lattice() {
        // K² = 0
        let m =
            SurfaceModel::abstract_unlabelled(IntMatrix::diagonal(&[1, -1]), DivisorClass::new(vec![-1, 1])).unwrap();
        assert!(matches!(enumerate_minus_one_classes(&m), Err(Error::NotDelPezzo(_))));
    }
}
