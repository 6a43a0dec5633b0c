//! Finite model of the fiber-product decomposition
//! `K(ξ) ≅ ⊔_{[γ] ∈ Γ0\Γ/Γξ} (D0 ∩ γDξ)/(Γ0 ∩ γΓξγ⁻¹)` for a free action.

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use serde::Serialize;

use crate::error::{KmError, Result};
use crate::perm::Perm;

#[derive(Clone, Debug)]
pub struct FiniteActionModel {
    /// Group elements as permutations of `D = {0, .., points-1}`; index 0 is the identity.
    gamma: Vec<Perm>,
    index: HashMap<Vec<usize>, usize>,
    gamma0: Vec<usize>,
    gamma_xi: Vec<usize>,
    d0: BTreeSet<usize>,
    d_xi: BTreeSet<usize>,
}

/// Closure of `gens` under composition.
pub fn closure(gens: &[Perm], degree: usize) -> Vec<Perm> {
    let mut elems = vec![Perm::identity(degree)];
    let mut seen: BTreeSet<Vec<usize>> = elems.iter().map(|p| p.images().to_vec()).collect();
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let h = g.compose(&elems[i]);
            if seen.insert(h.images().to_vec()) {
                elems.push(h);
            }
        }
        i += 1;
    }
    elems
}

impl FiniteActionModel {
    /// `gamma` must be a group of permutations of `D`; subgroups are given by element indices.
    pub fn new(gamma: Vec<Perm>, gamma0: Vec<usize>, gamma_xi: Vec<usize>, d0: BTreeSet<usize>, d_xi: BTreeSet<usize>) -> Result<Self> {
        let index: HashMap<Vec<usize>, usize> = gamma.iter().enumerate().map(|(i, p)| (p.images().to_vec(), i)).collect();
        let model = FiniteActionModel { gamma, index, gamma0, gamma_xi, d0, d_xi };
        model.validate()?;
        Ok(model)
    }

    /// `Γ` acting on `Γ × {0..copies}` by left multiplication, where `Γ` is generated by `gens`.
    pub fn left_regular(gens: &[Perm], degree: usize, copies: usize) -> (Vec<Perm>, usize) {
        let abstract_group = closure(gens, degree);
        let order = abstract_group.len();
        let pos: HashMap<Vec<usize>, usize> = abstract_group.iter().enumerate().map(|(i, p)| (p.images().to_vec(), i)).collect();
        let gamma = abstract_group
            .iter()
            .map(|g| {
                let mut images = vec![0; order * copies];
                for (h_idx, h) in abstract_group.iter().enumerate() {
                    let gh = pos[g.compose(h).images()];
                    for t in 0..copies {
                        images[h_idx + order * t] = gh + order * t;
                    }
                }
                Perm::from_images(images).expect("left multiplication is a bijection")
            })
            .collect();
        (gamma, order * copies)
    }

    /// A random free model with `|Γ| <= 24`.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let degree = rng.gen_range(1..=4);
        let ngens = rng.gen_range(1..=2);
        let gens: Vec<Perm> = (0..ngens).map(|_| Perm::random(degree, rng)).collect();
        let copies = rng.gen_range(1..=3);
        let (gamma, points) = FiniteActionModel::left_regular(&gens, degree, copies);
        let index: HashMap<Vec<usize>, usize> = gamma.iter().enumerate().map(|(i, p)| (p.images().to_vec(), i)).collect();
        let subgroup = |rng: &mut R| -> Vec<usize> {
            let k = rng.gen_range(0..=2);
            let gens: Vec<Perm> = (0..k).map(|_| gamma[rng.gen_range(0..gamma.len())].clone()).collect();
            closure(&gens, points).iter().map(|p| index[p.images()]).collect()
        };
        let gamma0 = subgroup(rng);
        let gamma_xi = subgroup(rng);
        let stable_union = |sub: &[usize], rng: &mut R| -> BTreeSet<usize> {
            let mut out = BTreeSet::new();
            let mut done = BTreeSet::new();
            for z in 0..points {
                if done.contains(&z) {
                    continue;
                }
                let orbit: BTreeSet<usize> = sub.iter().map(|&h| gamma[h].apply(z)).collect();
                let keep = rng.gen_bool(0.6);
                for &w in &orbit {
                    done.insert(w);
                    if keep {
                        out.insert(w);
                    }
                }
            }
            out
        };
        let d0 = stable_union(&gamma0, rng);
        let d_xi = stable_union(&gamma_xi, rng);
        FiniteActionModel::new(gamma, gamma0, gamma_xi, d0, d_xi).expect("random model is valid")
    }

    pub fn group_order(&self) -> usize {
        self.gamma.len()
    }

    pub fn points(&self) -> usize {
        self.gamma.first().map_or(0, |p| p.len())
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        self.index[self.gamma[a].compose(&self.gamma[b]).images()]
    }

    fn inv(&self, a: usize) -> usize {
        self.index[self.gamma[a].inverse().images()]
    }

    fn validate(&self) -> Result<()> {
        let n = self.points();
        if self.gamma.is_empty() || !self.gamma[0].is_identity() {
            return Err(KmError::InvalidInput("first group element must be the identity".into()));
        }
        for a in 0..self.gamma.len() {
            if self.gamma[a].len() != n {
                return Err(KmError::InvalidInput("permutations act on different sets".into()));
            }
        }
        for a in 0..self.gamma.len() {
            for b in 0..self.gamma.len() {
                if !self.index.contains_key(self.gamma[a].compose(&self.gamma[b]).images()) {
                    return Err(KmError::InvalidInput("group is not closed".into()));
                }
            }
        }
        for sub in [&self.gamma0, &self.gamma_xi] {
            let set: BTreeSet<usize> = sub.iter().copied().collect();
            if !set.contains(&0) || sub.iter().any(|&a| sub.iter().any(|&b| !set.contains(&self.mul(a, b)))) {
                return Err(KmError::InvalidInput("subgroup is not closed".into()));
            }
        }
        for (sub, set) in [(&self.gamma0, &self.d0), (&self.gamma_xi, &self.d_xi)] {
            if sub.iter().any(|&h| set.iter().any(|&z| !set.contains(&self.gamma[h].apply(z)))) {
                return Err(KmError::InvalidInput("subset is not stable".into()));
            }
        }
        for g in &self.gamma[1..] {
            if (0..n).any(|z| g.apply(z) == z) {
                return Err(KmError::NonFreeAction);
            }
        }
        Ok(())
    }

    fn orbit_id(&self, sub: &[usize], z: usize) -> usize {
        sub.iter().map(|&h| self.gamma[h].apply(z)).min().unwrap_or(z)
    }

    fn full_group(&self) -> Vec<usize> {
        (0..self.gamma.len()).collect()
    }

    /// Images `(Γ0 z, Γξ γ⁻¹z)` of the components of `(D0 ∩ γDξ)/(Γ0 ∩ γΓξγ⁻¹)`;
    /// `None` for a component whose elements disagree.
    fn coset_images(&self, g: usize) -> Vec<Option<(usize, usize)>> {
        let ginv = self.inv(g);
        let xi_set: BTreeSet<usize> = self.gamma_xi.iter().copied().collect();
        let h: Vec<usize> = self.gamma0.iter().copied().filter(|&d| xi_set.contains(&self.mul(ginv, self.mul(d, g)))).collect();
        let s: BTreeSet<usize> = self.d0.iter().copied().filter(|&z| self.d_xi.contains(&self.gamma[ginv].apply(z))).collect();
        let mut done = BTreeSet::new();
        let mut out = Vec::new();
        for &z in &s {
            if done.contains(&z) {
                continue;
            }
            let orbit: BTreeSet<usize> = h.iter().map(|&d| self.gamma[d].apply(z)).collect();
            let images: BTreeSet<(usize, usize)> = orbit
                .iter()
                .map(|&w| (self.orbit_id(&self.gamma0, w), self.orbit_id(&self.gamma_xi, self.gamma[ginv].apply(w))))
                .collect();
            done.extend(orbit);
            out.push(if images.len() == 1 { images.into_iter().next() } else { None });
        }
        out
    }

    pub fn decompose(&self) -> FiberReport {
        let all = self.full_group();
        let k_set: BTreeSet<(usize, usize)> = self
            .d0
            .iter()
            .flat_map(|&z| self.d_xi.iter().map(move |&w| (z, w)))
            .filter(|&(z, w)| self.orbit_id(&all, z) == self.orbit_id(&all, w))
            .map(|(z, w)| (self.orbit_id(&self.gamma0, z), self.orbit_id(&self.gamma_xi, w)))
            .collect();

        let mut assigned = vec![false; self.gamma.len()];
        let mut reps = Vec::new();
        let mut classes = Vec::new();
        for g in 0..self.gamma.len() {
            if assigned[g] {
                continue;
            }
            let class: BTreeSet<usize> = self
                .gamma0
                .iter()
                .flat_map(|&a| self.gamma_xi.iter().map(move |&b| (a, b)))
                .map(|(a, b)| self.mul(a, self.mul(g, b)))
                .collect();
            for &c in &class {
                assigned[c] = true;
            }
            reps.push(g);
            classes.push(class);
        }

        let mut report = FiberReport {
            group_order: self.gamma.len(),
            points: self.points(),
            double_cosets: reps.len(),
            k_size: k_set.len(),
            union_size: 0,
            well_defined: true,
            injective: true,
            surjective: true,
            representative_independent: true,
        };
        let mut image_set = BTreeSet::new();
        for (rep, class) in reps.iter().zip(&classes) {
            let images = self.coset_images(*rep);
            report.union_size += images.len();
            let mut rep_images = BTreeSet::new();
            for im in images {
                match im {
                    Some(p) => {
                        if !image_set.insert(p) {
                            report.injective = false;
                        }
                        rep_images.insert(p);
                    }
                    None => report.well_defined = false,
                }
            }
            for &other in class {
                let alt: BTreeSet<(usize, usize)> = self.coset_images(other).into_iter().flatten().collect();
                if alt != rep_images {
                    report.representative_independent = false;
                }
            }
        }
        report.surjective = image_set == k_set;
        report
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FiberReport {
    pub group_order: usize,
    pub points: usize,
    pub double_cosets: usize,
    pub k_size: usize,
    pub union_size: usize,
    pub well_defined: bool,
    pub injective: bool,
    pub surjective: bool,
    pub representative_independent: bool,
}

impl FiberReport {
    pub fn passed(&self) -> bool {
        self.well_defined && self.injective && self.surjective && self.representative_independent && self.k_size == self.union_size
    }
}

pub fn fiber_product_decomposition(model: &FiniteActionModel) -> FiberReport {
    model.decompose()
}
