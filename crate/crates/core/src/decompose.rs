//! Peeling (−1)-entries off a maximal-length toric system until a base
//! system on `P²`, `F_0` or `F_1` remains.
//!
//! Each level blows down the first entry with `A_i² = −1`, restandardises
//! the orthogonal complement of that entry, and records the augmentation
//! that rebuilds the level together with the isometry `[B·P⁻¹ | E]` from
//! the blow-up of the standard model onto the level's model. Replaying a
//! certificate runs these in reverse.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::augmentation::{augment, blow_up_model, extract_blowdown, AugmentationStep};
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, ModelKind, SurfaceModel};
use crate::matrix::IntMatrix;
use crate::restandardize::restandardize;
use crate::toric::ToricSystem;

/// The two shapes of length-4 toric systems on `F_d`, in `(F, S)` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum HirzebruchFamily {
    /// `F, S + aF, F, S + bF` with `a + b = −d`.
    Fsfs { a: i64, b: i64 },
    /// `T, F + aT, T, F − aT` with `T = S − (d/2)F`, `d` even.
    Symmetric { a: i64 },
}

impl fmt::Display for HirzebruchFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HirzebruchFamily::Fsfs { a, b } => write!(f, "FSFS(a={a}, b={b})"),
            HirzebruchFamily::Symmetric { a } => write!(f, "symmetric(a={a})"),
        }
    }
}

impl HirzebruchFamily {
    /// The family representative on the standard `F_d`.
    pub fn system(&self, d: u32) -> Result<ToricSystem> {
        let model = Arc::new(SurfaceModel::standard(ModelKind::Hirzebruch { d })?);
        let dd = d as i64;
        let divisors = match *self {
            HirzebruchFamily::Fsfs { a, b } => {
                if a + b != -dd {
                    return Err(Error::OutOfRange(format!("a + b = {} but -d = {}", a + b, -dd)));
                }
                vec![vec![1, 0], vec![a, 1], vec![1, 0], vec![b, 1]]
            }
            HirzebruchFamily::Symmetric { a } => {
                if dd % 2 != 0 {
                    return Err(Error::OutOfRange(format!("symmetric family needs d even, got {d}")));
                }
                let h = dd / 2;
                // T = (−h, 1)
                vec![vec![-h, 1], vec![1 - a * h, a], vec![-h, 1], vec![1 + a * h, -a]]
            }
        };
        ToricSystem::new(model, divisors.into_iter().map(DivisorClass::new).collect())
    }

    fn matches(system: &ToricSystem, d: i64) -> Option<HirzebruchFamily> {
        let v: Vec<&[i64]> = system.divisors().iter().map(|x| x.coeffs()).collect();
        if v[0] == [1, 0] && v[2] == [1, 0] && v[1][1] == 1 && v[3][1] == 1 && v[1][0] + v[3][0] == -d {
            return Some(HirzebruchFamily::Fsfs { a: v[1][0], b: v[3][0] });
        }
        if d % 2 == 0 {
            let h = d / 2;
            let t = [-h, 1];
            let a = v[1][1];
            if v[0] == t && v[2] == t && v[1] == [1 - a * h, a] && v[3] == [1 + a * h, -a] {
                return Some(HirzebruchFamily::Symmetric { a });
            }
        }
        None
    }
}

/// A family together with the orbit element that equals its representative:
/// the input, reversed if `reversed`, then shifted left by `shift`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HirzebruchClass {
    #[serde(flatten)]
    pub family: HirzebruchFamily,
    pub shift: usize,
    pub reversed: bool,
}

pub fn classify_hirzebruch(system: &ToricSystem) -> Result<HirzebruchClass> {
    let ModelKind::Hirzebruch { d } = system.model().kind() else {
        return Err(Error::OutOfRange(format!("{} is not a Hirzebruch model", system.model().kind())));
    };
    if system.len() != 4 {
        return Err(Error::NotMaximal { length: system.len(), expected: 4 });
    }
    system
        .orbit()
        .find_map(|(shift, reversed, s)| {
            HirzebruchFamily::matches(&s, d as i64).map(|family| HirzebruchClass { family, shift, reversed })
        })
        .ok_or_else(|| Error::Unclassified(format!("{system:?}")))
}

/// `F S F S` systems always are; the symmetric family only for `d = 0` or `a = 0`.
pub fn is_exceptional_family(family: &HirzebruchFamily, d: u32) -> bool {
    match family {
        HirzebruchFamily::Fsfs { .. } => true,
        HirzebruchFamily::Symmetric { a } => d == 0 || *a == 0,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecomposeOptions {
    /// Keep going from `F_1` down to `P²` when the length-4 system has a
    /// (−1)-entry.
    pub continue_to_plane: bool,
}

/// One augmentation of the replay, followed by an isometry onto `model`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateStep {
    pub step: AugmentationStep,
    pub model: SurfaceModel,
    /// Blow-up coordinates to `model` coordinates.
    pub isometry: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionCertificate {
    pub target: ToricSystem,
    pub base_system: ToricSystem,
    pub base_family: Option<HirzebruchClass>,
    /// In replay order, from the base upwards.
    pub steps: Vec<CertificateStep>,
    /// Maps the last replayed model onto the target's model.
    pub frame: IntMatrix,
    /// For each level from the base up to the target, the 1-based
    /// positions of entries with square −1.
    pub minus_one_positions: Vec<Vec<usize>>,
}

impl DecompositionCertificate {
    pub fn base_model(&self) -> &SurfaceModel {
        self.base_system.model()
    }
}

fn minus_one_positions(system: &ToricSystem) -> Vec<usize> {
    system.self_intersections().iter().enumerate().filter(|(_, &a)| a == -1).map(|(i, _)| i + 1).collect()
}

/// Applies `matrix` to every entry and validates the result on `model`.
fn transport(system: &ToricSystem, matrix: &IntMatrix, model: Arc<SurfaceModel>) -> Result<ToricSystem> {
    let divisors = system.divisors().iter().map(|d| DivisorClass::new(matrix.mul_vec(d.coeffs()))).collect();
    ToricSystem::new(model, divisors)
}

fn check_isometry(matrix: &IntMatrix, from: &SurfaceModel, to: &SurfaceModel) -> Result<()> {
    let ok = matrix.rows() == to.rank()
        && matrix.cols() == from.rank()
        && matrix.det().abs() == 1
        && &matrix.transpose().mul(to.gram()).mul(matrix) == from.gram()
        && matrix.mul_vec(from.canonical().coeffs()) == to.canonical().coeffs();
    if ok {
        Ok(())
    } else {
        Err(Error::Replay(format!("matrix {matrix:?} is not an isometry {} -> {}", from.kind(), to.kind())))
    }
}

pub fn decompose(system: &ToricSystem) -> Result<DecompositionCertificate> {
    decompose_with(system, DecomposeOptions::default())
}

pub fn decompose_with(system: &ToricSystem, options: DecomposeOptions) -> Result<DecompositionCertificate> {
    let model = system.model();
    if !system.is_maximal_length() {
        return Err(Error::NotMaximal { length: system.len(), expected: model.rank() + 2 });
    }
    model.check_del_pezzo()?;

    let (mut current, frame) = match model.kind() {
        ModelKind::ProjectivePlane | ModelKind::Hirzebruch { .. } | ModelKind::DelPezzo { r: 2.. } => {
            (system.clone(), IntMatrix::identity(model.rank()))
        }
        _ => {
            let rs = restandardize(model)?;
            let inverse = rs.isometry.inverse().expect("isometries are unimodular");
            (transport(system, &rs.isometry, Arc::new(rs.model))?, inverse)
        }
    };

    let mut steps = Vec::new();
    let mut positions = Vec::new();
    let base_family = loop {
        let pos = minus_one_positions(&current);
        positions.push(pos.clone());
        let n = current.len();
        if n == 3 {
            if current.model().kind() != ModelKind::ProjectivePlane
                || current.divisors().iter().any(|a| a.coeffs() != [1])
            {
                return Err(Error::Invariant(format!("length-3 base is not (H,H,H) on P2: {current:?}")));
            }
            break None;
        }
        if n == 4 {
            let kind = current.model().kind();
            match kind {
                ModelKind::Hirzebruch { d: 0 | 1 } => {}
                _ => return Err(Error::NotDelPezzo(format!("length-4 base lives on {kind}"))),
            }
            let go_on = options.continue_to_plane && kind == (ModelKind::Hirzebruch { d: 1 }) && !pos.is_empty();
            if !go_on {
                break Some(classify_hirzebruch(&current)?);
            }
        }
        let Some(&m) = pos.first() else {
            return Err(Error::NoMinusOneEntry { length: n, witness: current.self_intersections() });
        };
        let down = extract_blowdown(&current, m)?;
        let rs = restandardize(down.system.model())
            .map_err(|e| Error::NotDelPezzo(format!("blow-down at position {m} is not a del Pezzo lattice: {e}")))?;
        let p_inv = rs.isometry.inverse().expect("isometries are unimodular");
        let bp = down.embedding.mul(&p_inv);
        let mut columns: Vec<Vec<i64>> = (0..bp.cols()).map(|j| bp.column(j)).collect();
        columns.push(down.exceptional.coeffs().to_vec());
        let refs: Vec<&[i64]> = columns.iter().map(Vec::as_slice).collect();
        let lift = IntMatrix::from_columns(&refs);
        let next = transport(&down.system, &rs.isometry, Arc::new(rs.model))
            .map_err(|e| Error::Invariant(format!("restandardised blow-down: {e}")))?;
        steps.push(CertificateStep { step: down.step, model: current.model().clone(), isometry: lift });
        current = next;
    };
    steps.reverse();
    positions.reverse();

    let certificate = DecompositionCertificate {
        target: system.clone(),
        base_system: current,
        base_family,
        steps,
        frame,
        minus_one_positions: positions,
    };
    if replay(&certificate)? != *system {
        return Err(Error::Invariant("certificate does not replay to its input".into()));
    }
    Ok(certificate)
}

/// Rebuilds the target system from the base system and the steps.
pub fn replay(certificate: &DecompositionCertificate) -> Result<ToricSystem> {
    let mut system = certificate.base_system.clone();
    for (k, step) in certificate.steps.iter().enumerate() {
        let up = augment(&system, step.step).map_err(|e| Error::Replay(format!("step {}: {e}", k + 1)))?;
        let blown = blow_up_model(system.model()).model;
        check_isometry(&step.isometry, &blown, &step.model)?;
        system = transport(&up, &step.isometry, Arc::new(step.model.clone()))
            .map_err(|e| Error::Replay(format!("step {}: {e}", k + 1)))?;
    }
    let target_model = certificate.target.shared_model();
    check_isometry(&certificate.frame, system.model(), target_model)?;
    transport(&system, &certificate.frame, target_model.clone()).map_err(|e| Error::Replay(format!("frame: {e}")))
}

/// Replays and compares with the recorded target.
pub fn verify(certificate: &DecompositionCertificate) -> Result<()> {
    let rebuilt = replay(certificate)?;
    if rebuilt != certificate.target {
        return Err(Error::Replay(format!(
            "replay gives {:?}, certificate records {:?}",
            rebuilt.divisors(),
            certificate.target.divisors()
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ShadowBase {
    Plane,
    Hirzebruch { d: i64 },
}

/// A contraction chain of self-intersection cycles ending at `(1,1,1)` or
/// at a `(0, d, 0, −d)` cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowChain {
    pub sequences: Vec<Vec<i64>>,
    pub base: ShadowBase,
}

fn hirzebruch_cycle(a: &[i64]) -> Option<i64> {
    (0..4).find_map(|k| {
        let s: Vec<i64> = (0..4).map(|i| a[(i + k) % 4]).collect();
        (s[0] == 0 && s[2] == 0 && s[1] == -s[3]).then_some(s[1].abs())
    })
}

/// Treats `A_i²` as self-intersections of a toric boundary cycle and
/// contracts the first `−1` entry until a minimal cycle remains.
///
/// At every step `Σ a_i = 12 − 3n` must hold; this is the usual identity for
/// the boundary of a smooth complete toric surface.
pub fn toric_shadow_check(system: &ToricSystem) -> Result<ShadowChain> {
    let mut a = system.self_intersections();
    let mut sequences = Vec::new();
    loop {
        let n = a.len() as i64;
        let total: i64 = a.iter().sum();
        if total != 12 - 3 * n {
            return Err(Error::ShadowStuck { sequence: a });
        }
        sequences.push(a.clone());
        if a == [1, 1, 1] {
            return Ok(ShadowChain { sequences, base: ShadowBase::Plane });
        }
        if a.len() == 4 {
            if let Some(d) = hirzebruch_cycle(&a) {
                if d != 1 {
                    return Ok(ShadowChain { sequences, base: ShadowBase::Hirzebruch { d } });
                }
            }
        }
        let Some(i) = a.iter().position(|&x| x == -1).filter(|_| a.len() > 3) else {
            return Err(Error::ShadowStuck { sequence: a });
        };
        let len = a.len();
        a[(i + len - 1) % len] += 1;
        a[(i + 1) % len] += 1;
        a.remove(i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augmentation::augment;

    fn dv(c: &[i64]) -> DivisorClass {
        DivisorClass::new(c.to_vec())
    }

    fn plane_system() -> ToricSystem {
        let p2 = Arc::new(SurfaceModel::standard(ModelKind::ProjectivePlane).unwrap());
        ToricSystem::new(p2, vec![dv(&[1]); 3]).unwrap()
    }

    fn on(kind: ModelKind, rows: &[&[i64]]) -> ToricSystem {
        let m = Arc::new(SurfaceModel::standard(kind).unwrap());
        ToricSystem::new(m, rows.iter().map(|r| dv(r)).collect()).unwrap()
    }

    #[test]
    fn classify_examples() {
        let f0 = on(ModelKind::Hirzebruch { d: 0 }, &[&[1, 0], &[0, 1], &[1, 0], &[0, 1]]);
        let c = classify_hirzebruch(&f0).unwrap();
        assert_eq!(c.family, HirzebruchFamily::Fsfs { a: 0, b: 0 });
        assert_eq!((c.shift, c.reversed), (0, false));

        // (S−F, S, S−F, 2F−S) on F_2
        let f2 = on(ModelKind::Hirzebruch { d: 2 }, &[&[-1, 1], &[0, 1], &[-1, 1], &[2, -1]]);
        let c = classify_hirzebruch(&f2).unwrap();
        assert_eq!(c.family, HirzebruchFamily::Symmetric { a: 1 });
        assert!(!is_exceptional_family(&c.family, 2));
        assert!(is_exceptional_family(&HirzebruchFamily::Symmetric { a: 0 }, 2));

        let f1 = on(ModelKind::Hirzebruch { d: 1 }, &[&[1, 0], &[0, 1], &[1, 0], &[-1, 1]]);
        let c = classify_hirzebruch(&f1).unwrap();
        assert_eq!(c.family, HirzebruchFamily::Fsfs { a: 0, b: -1 });
        assert!(is_exceptional_family(&c.family, 1));
    }

    #[test]
    fn classify_inverts_constructor() {
        for d in 0..=4u32 {
            for a in -4..=4i64 {
                let fam = HirzebruchFamily::Fsfs { a, b: -(d as i64) - a };
                let s = fam.system(d).unwrap();
                let c = classify_hirzebruch(&s).unwrap();
                assert_eq!((c.family, c.shift, c.reversed), (fam, 0, false));
                // (a, b) is only determined up to order on the orbit
                let swapped = HirzebruchFamily::Fsfs { a: -(d as i64) - a, b: a };
                for k in 0..4 {
                    for input in [s.cyclic_shift(k), s.cyclic_shift(k).reversed()] {
                        let c = classify_hirzebruch(&input).unwrap();
                        // the families overlap at (F, T, F, T), i.e. a = b = −d/2
                        let overlap = fam == swapped && c.family == HirzebruchFamily::Symmetric { a: 0 };
                        assert!(c.family == fam || c.family == swapped || overlap, "{:?}", c.family);
                        let aligned = if c.reversed { input.reversed() } else { input };
                        assert_eq!(aligned.cyclic_shift(c.shift as isize), c.family.system(d).unwrap());
                    }
                }
                if d % 2 == 0 && d > 0 {
                    let fam = HirzebruchFamily::Symmetric { a };
                    let c = classify_hirzebruch(&fam.system(d).unwrap()).unwrap();
                    assert_eq!((c.family, c.shift, c.reversed), (fam, 0, false));
                }
            }
        }
        assert!(HirzebruchFamily::Symmetric { a: 1 }.system(3).is_err());
        assert!(HirzebruchFamily::Fsfs { a: 1, b: 1 }.system(0).is_err());
    }

    #[test]
    fn decompose_front_augmentation_of_plane() {
        let s = augment(&plane_system(), AugmentationStep::FRONT).unwrap();
        // continuing to P² gives one front step
        let cert = decompose_with(&s, DecomposeOptions { continue_to_plane: true }).unwrap();
        assert_eq!(cert.base_model().kind(), ModelKind::ProjectivePlane);
        assert_eq!(cert.base_system, plane_system());
        assert_eq!(cert.steps.len(), 1);
        assert_eq!(cert.steps[0].step, AugmentationStep::FRONT);
        verify(&cert).unwrap();

        // by default the recursion stops on F_1
        let cert = decompose(&s).unwrap();
        assert_eq!(cert.base_model().kind(), ModelKind::Hirzebruch { d: 1 });
        assert!(cert.steps.is_empty());
        verify(&cert).unwrap();
    }

    #[test]
    fn decompose_chain_on_dp3() {
        let mut s = plane_system();
        for step in [AugmentationStep::FRONT, AugmentationStep::middle(3), AugmentationStep::BACK] {
            s = augment(&s, step).unwrap();
        }
        assert_eq!(s.model().kind(), ModelKind::DelPezzo { r: 3 });
        let cert = decompose(&s).unwrap();
        assert_eq!(cert.steps.len(), s.len() - 4);
        assert_eq!(cert.minus_one_positions.len(), cert.steps.len() + 1);
        assert_eq!(replay(&cert).unwrap(), s);
        let cert = decompose_with(&s, DecomposeOptions { continue_to_plane: true }).unwrap();
        let base_len = if cert.base_model().kind() == ModelKind::ProjectivePlane { 3 } else { 4 };
        assert_eq!(cert.steps.len(), s.len() - base_len);
        verify(&cert).unwrap();
    }

    #[test]
    fn decompose_rejects_bad_input() {
        let f2 = on(ModelKind::Hirzebruch { d: 2 }, &[&[-1, 1], &[0, 1], &[-1, 1], &[2, -1]]);
        assert!(matches!(decompose(&f2), Err(Error::NotDelPezzo(_))));
        let s = augment(&plane_system(), AugmentationStep::FRONT).unwrap();
        let err = decompose(&s.cyclic_shift(1).reversed()).map(|c| c.target.len());
        assert_eq!(err.unwrap(), 4);
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut s = plane_system();
        for step in [AugmentationStep::FRONT, AugmentationStep::FRONT] {
            s = augment(&s, step).unwrap();
        }
        let mut cert = decompose(&s).unwrap();
        assert_eq!(cert.steps.len(), 1);
        cert.steps[0].step = AugmentationStep::BACK;
        assert!(matches!(verify(&cert), Err(Error::Replay(_))));
    }

    #[test]
    fn shadow_examples() {
        let chain = toric_shadow_check(&plane_system()).unwrap();
        assert_eq!(chain.sequences, vec![vec![1, 1, 1]]);
        assert_eq!(chain.base, ShadowBase::Plane);

        let s = augment(&plane_system(), AugmentationStep::FRONT).unwrap();
        let chain = toric_shadow_check(&s).unwrap();
        assert_eq!(chain.sequences, vec![vec![-1, 0, 1, 0], vec![1, 1, 1]]);

        let f2 = on(ModelKind::Hirzebruch { d: 2 }, &[&[-1, 1], &[0, 1], &[-1, 1], &[2, -1]]);
        let chain = toric_shadow_check(&f2).unwrap();
        assert_eq!(chain.sequences, vec![vec![0, 2, 0, -2]]);
        assert_eq!(chain.base, ShadowBase::Hirzebruch { d: 2 });
    }
}
