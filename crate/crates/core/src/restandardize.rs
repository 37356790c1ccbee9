//! Isometries from abstract lattices onto standard models.
//!
//! * rank 1: `⟨1⟩` with `K = ±3` is `P²`.
//! * rank 2: pick the lexicographically largest primitive isotropic `F`
//!   with `K·F = −2`, solve `F·S = 1`, then shift `S` by multiples of `F`
//!   until `S² ∈ {0, 1}`. The result is `F_0` or `F_1`.
//! * rank ≥ 3: split off (−1)-classes one at a time, always taking the
//!   lexicographically smallest class orthogonal to those already chosen,
//!   until `R_1, …, R_r` are found. Then `H = (R_1 + … + R_r − K)/3`.
//!
//! The isometry `P` sends abstract coordinates to standard ones and is
//! checked before it is returned: `Pᵀ G_std P = G` and `P K = K_std`.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, ModelKind, SurfaceModel};
use crate::matrix::IntMatrix;
use crate::minus_one::lattice_minus_one_classes;

#[derive(Clone, Debug)]
pub struct Restandardized {
    pub model: SurfaceModel,
    /// Standard coordinates = `isometry` · abstract coordinates.
    pub isometry: IntMatrix,
}

impl Restandardized {
    pub fn apply(&self, d: &DivisorClass) -> DivisorClass {
        DivisorClass::new(self.isometry.mul_vec(d.coeffs()))
    }
}

fn no_model(model: &SurfaceModel, reason: impl Into<String>) -> Error {
    Error::NoStandardModel {
        reason: reason.into(),
        canonical_square: model.degree(),
        parity: if model.is_even() { "even" } else { "odd" },
        divisibility: model.canonical_divisibility(),
    }
}

/// Finds a standard model isometric to `model`, together with the isometry.
pub fn restandardize(model: &SurfaceModel) -> Result<Restandardized> {
    if model.chi() != 1 {
        return Err(Error::ChiNotOne(model.chi()));
    }
    if model.gram().det().abs() != 1 {
        return Err(no_model(model, "intersection form is not unimodular"));
    }
    if model.gram().inertia() != (1, model.rank() - 1, 0) {
        return Err(no_model(model, "signature is not (1, rank-1)"));
    }
    let (kind, columns) = match model.rank() {
        1 => plane(model)?,
        2 => hirzebruch(model)?,
        _ => del_pezzo(model)?,
    };
    // columns: the standard basis expressed in abstract coordinates
    let refs: Vec<&[i64]> = columns.iter().map(|c| c.coeffs()).collect();
    let change = IntMatrix::from_columns(&refs);
    let isometry = change.inverse().ok_or_else(|| no_model(model, "candidate basis is not unimodular"))?;
    let standard = SurfaceModel::standard(kind)?;
    let pulled = isometry.transpose().mul(standard.gram()).mul(&isometry);
    if &pulled != model.gram() || isometry.mul_vec(model.canonical().coeffs()) != standard.canonical().coeffs() {
        return Err(Error::Invariant(format!("restandardisation to {kind} is not an isometry")));
    }
    Ok(Restandardized { model: standard, isometry })
}

fn plane(model: &SurfaceModel) -> Result<(ModelKind, Vec<DivisorClass>)> {
    let g = model.gram()[(0, 0)];
    let k = model.canonical().coeffs()[0];
    if g != 1 || k.abs() != 3 {
        return Err(no_model(model, "rank one needs H^2 = 1 and K = -3H"));
    }
    Ok((ModelKind::ProjectivePlane, vec![DivisorClass::new(vec![-k / 3])]))
}

fn primitive(a: i64, b: i64) -> [i64; 2] {
    let g = a.gcd(&b);
    [a / g, b / g]
}

fn hirzebruch(model: &SurfaceModel) -> Result<(ModelKind, Vec<DivisorClass>)> {
    if model.degree() != 8 {
        return Err(no_model(model, "rank two needs K^2 = 8"));
    }
    let g = model.gram();
    let (a, b, c) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
    // b² − ac = 1, so the form factors over Z into two isotropic lines.
    let lines = if a == 0 { [[1, 0], primitive(c, -2 * b)] } else { [primitive(b + 1, -a), primitive(b - 1, -a)] };
    let mut fibres: Vec<DivisorClass> = lines
        .iter()
        .flat_map(|v| [DivisorClass::new(v.to_vec()), DivisorClass::new(vec![-v[0], -v[1]])])
        .filter(|f| model.square(f) == 0 && model.canonical_degree(f) == -2)
        .collect();
    fibres.sort();
    let f = fibres.pop().ok_or_else(|| no_model(model, "no isotropic class F with K.F = -2"))?;

    let cov = g.mul_vec(f.coeffs());
    let e = cov[0].extended_gcd(&cov[1]);
    if e.gcd.abs() != 1 {
        return Err(no_model(model, "fibre class is not dual-primitive"));
    }
    let s = DivisorClass::new(vec![e.x * e.gcd, e.y * e.gcd]);
    let t = -model.square(&s).div_euclid(2);
    let s = &s + &f.scale(t);
    let d = model.square(&s);
    debug_assert!(d == 0 || d == 1);
    Ok((ModelKind::Hirzebruch { d: d as u32 }, vec![f, s]))
}

fn del_pezzo(model: &SurfaceModel) -> Result<(ModelKind, Vec<DivisorClass>)> {
    let r = model.rank() - 1;
    if r > 8 || model.degree() != 9 - r as i64 {
        return Err(no_model(model, format!("rank {} needs K^2 = {}", r + 1, 9 - r as i64)));
    }
    let classes = lattice_minus_one_classes(model).map_err(|e| no_model(model, e.to_string()))?;
    let mut frame = Vec::with_capacity(r);
    if !extend_frame(model, &classes, 0, r, &mut frame) {
        return Err(no_model(model, format!("no {r} mutually orthogonal (-1)-classes with integral H")));
    }
    let chosen: Vec<DivisorClass> = frame.iter().map(|&i| classes[i].clone()).collect();
    let h = hyperplane(model, &chosen).expect("checked by extend_frame");
    let mut basis = vec![h];
    basis.extend(chosen);
    Ok((ModelKind::DelPezzo { r: r as u32 }, basis))
}

/// `(R_1 + … + R_r − K)/3` when integral with square one.
fn hyperplane(model: &SurfaceModel, frame: &[DivisorClass]) -> Option<DivisorClass> {
    let sum = frame.iter().sum::<Option<DivisorClass>>()?;
    let num = &sum - model.canonical();
    if num.coeffs().iter().any(|c| c % 3 != 0) {
        return None;
    }
    let h = DivisorClass::new(num.coeffs().iter().map(|c| c / 3).collect());
    (model.square(&h) == 1).then_some(h)
}

fn extend_frame(model: &SurfaceModel, classes: &[DivisorClass], from: usize, r: usize, frame: &mut Vec<usize>) -> bool {
    if frame.len() == r {
        let chosen: Vec<DivisorClass> = frame.iter().map(|&i| classes[i].clone()).collect();
        return hyperplane(model, &chosen).is_some();
    }
    for i in from..classes.len() {
        if frame.iter().all(|&j| model.dot(&classes[i], &classes[j]) == 0) {
            frame.push(i);
            if extend_frame(model, classes, i + 1, r, frame) {
                return true;
            }
            frame.pop();
        }
    }
    false
}
