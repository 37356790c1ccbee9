//! Independent reference computations. Nothing here calls into the library
//! except to build the values being compared.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use rand::Rng;
use toric_core::{ModelKind, SurfaceModel};

/// Plain gram matrix and canonical class, written down from the textbook
/// presentations.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub gram: Vec<Vec<i64>>,
    pub k: Vec<i64>,
}

impl Lattice {
    pub fn plane() -> Self {
        Lattice { gram: vec![vec![1]], k: vec![-3] }
    }

    /// Basis (F, S) with F² = 0, F·S = 1, S² = d.
    pub fn hirzebruch(d: i64) -> Self {
        Lattice { gram: vec![vec![0, 1], vec![1, d]], k: vec![d - 2, -2] }
    }

    /// Basis (H, R1..Rr).
    pub fn del_pezzo(r: usize) -> Self {
        let n = r + 1;
        let mut gram = vec![vec![0; n]; n];
        gram[0][0] = 1;
        for (i, row) in gram.iter_mut().enumerate().skip(1) {
            row[i] = -1;
        }
        let mut k = vec![1; n];
        k[0] = -3;
        Lattice { gram, k }
    }

    pub fn of(kind: ModelKind) -> Self {
        match kind {
            ModelKind::ProjectivePlane => Self::plane(),
            ModelKind::Hirzebruch { d } => Self::hirzebruch(d as i64),
            ModelKind::DelPezzo { r } => Self::del_pezzo(r as usize),
            ModelKind::Abstract => panic!("no reference lattice"),
        }
    }

    pub fn rank(&self) -> usize {
        self.k.len()
    }

    pub fn dot(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..x.len() {
            for j in 0..y.len() {
                s += x[i] * self.gram[i][j] * y[j];
            }
        }
        s
    }

    /// Riemann–Roch with χ(O) = 1, computed over the rationals.
    pub fn chi(&self, d: &[i64]) -> i64 {
        let twice = self.dot(d, d) - self.dot(d, &self.k);
        assert_eq!(twice % 2, 0, "odd D(D-K) on {d:?}");
        1 + twice / 2
    }

    pub fn n_max(&self) -> usize {
        (12 - self.dot(&self.k, &self.k)) as usize
    }
}

/// The standard models used throughout the suites.
pub fn standard_kinds() -> Vec<ModelKind> {
    let mut v = vec![ModelKind::ProjectivePlane];
    v.extend((0..=2).map(|d| ModelKind::Hirzebruch { d }));
    v.extend((1..=8).map(|r| ModelKind::DelPezzo { r }));
    v
}

pub fn model(kind: ModelKind) -> SurfaceModel {
    SurfaceModel::standard(kind).unwrap()
}

/// Asserts the library's standard model agrees with the reference lattice.
pub fn assert_same_lattice(kind: ModelKind) {
    let m = model(kind);
    let l = Lattice::of(kind);
    assert_eq!(m.gram().to_rows(), l.gram, "{kind:?} gram");
    assert_eq!(m.canonical().coeffs(), &l.k[..], "{kind:?} canonical");
}

pub fn random_vector<R: Rng>(rng: &mut R, rank: usize, bound: i64) -> Vec<i64> {
    (0..rank).map(|_| rng.gen_range(-bound..=bound)).collect()
}

/// All integer vectors with sup-norm ≤ b.
pub fn box_vectors(rank: usize, b: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        let mut next = Vec::new();
        for v in &out {
            for x in -b..=b {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Every ordered length-n tuple of vectors in the box satisfying the
/// toric-system axioms. Only pairwise intersections are used to cut the
/// search.
pub fn toric_tuples(l: &Lattice, b: i64, n: usize) -> BTreeSet<Vec<Vec<i64>>> {
    let boxv = box_vectors(l.rank(), b);
    let minus_k: Vec<i64> = l.k.iter().map(|x| -x).collect();
    let mut out = BTreeSet::new();
    let mut cur: Vec<Vec<i64>> = Vec::new();

    fn expected(n: usize, i: usize, j: usize) -> i64 {
        let (i, j) = (i.min(j), i.max(j));
        if n == 3 || j == i + 1 || (i == 0 && j == n - 1) {
            1
        } else {
            0
        }
    }

    fn rec(
        l: &Lattice,
        boxv: &[Vec<i64>],
        n: usize,
        minus_k: &[i64],
        cur: &mut Vec<Vec<i64>>,
        out: &mut BTreeSet<Vec<Vec<i64>>>,
    ) {
        if cur.len() == n {
            let mut sum = vec![0; l.rank()];
            for v in cur.iter() {
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
            }
            if sum == minus_k {
                out.insert(cur.clone());
            }
            return;
        }
        let k = cur.len();
        for v in boxv {
            if (0..k).all(|j| l.dot(&cur[j], v) == expected(n, j, k)) {
                cur.push(v.clone());
                rec(l, boxv, n, minus_k, cur, out);
                cur.pop();
            }
        }
    }

    rec(l, &boxv, n, &minus_k, &mut cur, &mut out);
    out
}

/// Numerical exceptionality of the collection O, O(A1), O(A1+A2), …,
/// via the reference χ.
pub fn is_exceptional(l: &Lattice, system: &[Vec<i64>]) -> bool {
    let n = system.len();
    let mut partial = vec![vec![0; l.rank()]];
    for a in &system[..n - 1] {
        let last = partial.last().unwrap().clone();
        partial.push(last.iter().zip(a).map(|(x, y)| x + y).collect());
    }
    for i in 0..n {
        for j in i + 1..n {
            let d: Vec<i64> = partial[i].iter().zip(&partial[j]).map(|(x, y)| x - y).collect();
            if l.chi(&d) != 0 {
                return false;
            }
        }
    }
    true
}

/// Brute force over a box on dP(r): all x with x² = x·K = −1. The last
/// coordinate is solved from the linear condition and range-checked.
pub fn minus_one_brute_force(r: usize, bounds: &[i64]) -> BTreeSet<Vec<i64>> {
    let l = Lattice::del_pezzo(r);
    let mut out = BTreeSet::new();
    let mut cur = vec![0i64; r + 1];
    fn rec(l: &Lattice, bounds: &[i64], i: usize, cur: &mut Vec<i64>, out: &mut BTreeSet<Vec<i64>>) {
        let n = cur.len();
        if i == n - 1 {
            // x·K = −3a − Σc = −1
            let partial: i64 = cur[1..n - 1].iter().sum();
            let last = 1 - 3 * cur[0] - partial;
            if last.abs() > bounds[n - 1] {
                return;
            }
            cur[n - 1] = last;
            if l.dot(cur, cur) == -1 && l.dot(cur, &l.k) == -1 {
                out.insert(cur.clone());
            }
            return;
        }
        for x in -bounds[i]..=bounds[i] {
            cur[i] = x;
            rec(l, bounds, i + 1, cur, out);
        }
    }
    if r == 0 {
        return out;
    }
    rec(&l, bounds, 0, &mut cur, &mut out);
    out
}

pub fn coords(system: &toric_core::ToricSystem) -> Vec<Vec<i64>> {
    system.divisors().iter().map(|d| d.coeffs().to_vec()).collect()
}

/// A random standard augmentation: a base system on P², F_0 or F_1, moved
/// around its orbit, followed by `steps` augmentations at random positions.
pub fn random_augmentation<R: Rng>(rng: &mut R, steps: usize) -> toric_core::ToricSystem {
    use toric_core::{augment, AugmentationStep, HirzebruchFamily, ToricSystem};
    let mut s: ToricSystem = match rng.gen_range(0..3) {
        0 => {
            let m = std::sync::Arc::new(model(ModelKind::ProjectivePlane));
            let h = toric_core::DivisorClass::from(vec![1]);
            ToricSystem::new(m, vec![h.clone(), h.clone(), h]).unwrap()
        }
        d => {
            let d = d as u32 - 1;
            let a = rng.gen_range(-3..=3);
            HirzebruchFamily::Fsfs { a, b: -(d as i64) - a }.system(d).unwrap()
        }
    };
    s = s.cyclic_shift(rng.gen_range(0..s.len() as isize));
    if rng.gen_bool(0.5) {
        s = s.reversed();
    }
    for _ in 0..steps {
        let pos = rng.gen_range(1..=s.len() + 1);
        let step = AugmentationStep::at_position(pos, s.len() + 1).unwrap();
        s = augment(&s, step).unwrap();
    }
    s
}
