//! Forms in `⋀𝔭* ⊗ S(U)`: the Howe operators, `φ⁺_{q,q}` and `φ_KM`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::laguerre::f_ab;
use super::wedge::{sort_sign, uniform_sign, Generator, WedgeWord};
use crate::budget::TermBudget;
use crate::error::{KmError, Result};
use crate::field::{rat, Coefficient, QI2};
use crate::gausspoly::{ExactPG, PolyGaussianJson};
use crate::perm::{perm_tuples, Perm};

/// A finite sum of canonical wedge words tensored with polynomial-Gaussians.
///
/// Keys are sorted generator lists; the normalization sign of a word is pushed
/// into its value, so every stored word has sign `+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct KMForm {
    num_vars: usize,
    components: BTreeMap<Vec<Generator>, ExactPG>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub word: WedgeWord,
    pub value: PolyGaussianJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KMFormJson {
    pub num_vars: usize,
    pub components: Vec<ComponentJson>,
}

/// Which sign multiplies the `(σ, σ')` term of `φ_KM`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignRule {
    /// The sorting sign of `ξ_{σ,σ'}` against `ω ∧ ω̄`, term by term.
    Canonical,
    /// The constant `(-1)^{pq(p-1)/2}` for every term.
    Uniform,
}

impl KMForm {
    pub fn zero(num_vars: usize) -> Self {
        KMForm { num_vars, components: BTreeMap::new() }
    }

    /// `1 ⊗ phi_0`.
    pub fn unit(num_vars: usize) -> Self {
        let mut f = KMForm::zero(num_vars);
        f.components.insert(Vec::new(), ExactPG::gaussian(num_vars));
        f
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn components(&self) -> &BTreeMap<Vec<Generator>, ExactPG> {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// The value attached to a word, with the word's sign taken into account.
    pub fn component(&self, word: &WedgeWord) -> ExactPG {
        match self.components.get(&word.generators) {
            Some(f) if word.sign < 0 => f.neg(),
            Some(f) => f.clone(),
            None => ExactPG::zero(self.num_vars),
        }
    }

    /// Adds `word ⊗ f`.
    pub fn add_term(&mut self, word: &WedgeWord, f: &ExactPG) -> Result<()> {
        if f.num_vars() != self.num_vars {
            return Err(KmError::InvalidInput("component lives on the wrong number of variables".into()));
        }
        let signed = if word.sign < 0 { f.neg() } else { f.clone() };
        match self.components.get_mut(&word.generators) {
            Some(prev) => {
                prev.add_assign(&signed)?;
                if prev.is_zero() {
                    self.components.remove(&word.generators);
                }
            }
            None if !signed.is_zero() => {
                self.components.insert(word.generators.clone(), signed);
            }
            None => {}
        }
        Ok(())
    }

    pub fn scale_by(&self, c: &Coefficient) -> KMForm {
        let mut out = KMForm::zero(self.num_vars);
        for (w, f) in &self.components {
            let g = f.scale_by(c);
            if !g.is_zero() {
                out.components.insert(w.clone(), g);
            }
        }
        out
    }

    /// `sum_j g(j,k) ∧ (Op_j f)` for a single `k`, left-multiplying the generator.
    fn howe_factor(&self, p: u16, k: u16, conjugated: bool, budget: &TermBudget) -> Result<KMForm> {
        let mut out = KMForm::zero(self.num_vars);
        for (gens, f) in &self.components {
            let word = WedgeWord { sign: 1, generators: gens.clone() };
            for j in 1..=p {
                let g = if conjugated { Generator::xi_bar(j, k) } else { Generator::xi(j, k) };
                let Some(w) = WedgeWord::from_generators(vec![g]).unwrap().wedge(&word) else {
                    continue;
                };
                budget.charge(2 * f.term_count() as u128)?;
                // ξ pairs with D̄_j = z̄_j - (1/pi) d/dz_j, ξ̄ with D_j
                let h = f.apply_d((j - 1) as usize, !conjugated)?;
                out.add_term(&w, &h)?;
            }
        }
        Ok(out)
    }

    /// `D⁺ = 2^{-2q} prod_{k=1..q} sum_{j=1..p} ξ_{jk} ⊗ D̄_j`, or its conjugate `D̄⁺`.
    pub fn apply_howe(&self, p: u16, q: u16, conjugated: bool, budget: &TermBudget) -> Result<KMForm> {
        if (p as usize) > self.num_vars {
            return Err(KmError::InvalidInput(format!("need at least {} variables, form has {}", p, self.num_vars)));
        }
        let mut acc = self.clone();
        for k in (1..=q).rev() {
            acc = acc.howe_factor(p, k, conjugated, budget)?;
        }
        let norm = QI2::from_rational(rat(1, 1 << (2 * q as u32)));
        Ok(acc.scale_by(&Coefficient::from_field(norm)))
    }

    /// `α ∧ β` for forms on disjoint variable sets; the result lives on `(x, y)`.
    pub fn wedge_tensor(&self, o: &KMForm) -> KMForm {
        let mut out = KMForm::zero(self.num_vars + o.num_vars);
        for (g1, f1) in &self.components {
            for (g2, f2) in &o.components {
                let w1 = WedgeWord { sign: 1, generators: g1.clone() };
                let w2 = WedgeWord { sign: 1, generators: g2.clone() };
                if let Some(w) = w1.wedge(&w2) {
                    out.add_term(&w, &f1.tensor(f2)).expect("matching variables");
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> KMFormJson {
        KMFormJson {
            num_vars: self.num_vars,
            components: self
                .components
                .iter()
                .map(|(g, f)| ComponentJson { word: WedgeWord { sign: 1, generators: g.clone() }, value: f.to_json() })
                .collect(),
        }
    }

    pub fn from_json(j: &KMFormJson) -> Result<Self> {
        let mut out = KMForm::zero(j.num_vars);
        for c in &j.components {
            let f = ExactPG::from_json(&c.value)?;
            let w = WedgeWord::from_generators(c.word.generators.clone())
                .ok_or_else(|| KmError::Parse("word repeats a generator".into()))?;
            let w = if c.word.sign < 0 { w.negated() } else { w };
            out.add_term(&w, &f)?;
        }
        Ok(out)
    }
}

/// `φ⁺_{q,q} = D⁺ D̄⁺ phi_0` on `U = C^{p+q}`; `q = 0` gives `1 ⊗ phi_0`.
pub fn km_form(p: u16, q: u16, budget: &TermBudget) -> Result<KMForm> {
    if p == 0 {
        return Err(KmError::InvalidInput("p must be at least 1".into()));
    }
    let m = (p + q) as usize;
    let start = KMForm::unit(m);
    if q == 0 {
        return Ok(start);
    }
    start.apply_howe(p, q, true, budget)?.apply_howe(p, q, false, budget)
}

/// The expansion `2^{-4q} sum_{α,α'} B_α ∧ B̄_{α'} ⊗ D̄_α D_{α'} phi_0`, built term by term.
pub fn km_form_expansion(p: u16, q: u16) -> Result<KMForm> {
    if p == 0 {
        return Err(KmError::InvalidInput("p must be at least 1".into()));
    }
    let m = (p + q) as usize;
    let mut out = KMForm::zero(m);
    if q == 0 {
        return Ok(KMForm::unit(m));
    }
    let tuples = multi_indices(p, q);
    let norm = Coefficient::from_field(QI2::from_rational(rat(1, 1i64 << (4 * q as u32))));
    for alpha in &tuples {
        for alpha_p in &tuples {
            let mut gens: Vec<Generator> = alpha.iter().enumerate().map(|(k, &a)| Generator::xi(a, k as u16 + 1)).collect();
            gens.extend(alpha_p.iter().enumerate().map(|(k, &a)| Generator::xi_bar(a, k as u16 + 1)));
            let Some(word) = WedgeWord::from_generators(gens) else {
                continue;
            };
            let mut f = ExactPG::gaussian(m);
            for &a in alpha_p {
                f = f.apply_d(a as usize - 1, false)?;
            }
            for &a in alpha {
                f = f.apply_d(a as usize - 1, true)?;
            }
            out.add_term(&word, &f.scale_by(&norm))?;
        }
    }
    Ok(out)
}

/// All `q`-tuples with entries in `1..=p`, lexicographically.
pub fn multi_indices(p: u16, q: u16) -> Vec<Vec<u16>> {
    let mut out: Vec<Vec<u16>> = vec![Vec::new()];
    for _ in 0..q {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=p).map(move |a| {
                    let mut t = prefix.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// `φ⁺_{q,q} ∧ .. ∧ φ⁺_{q,q}` (`n` factors), factor `i` on the `i`-th block of variables.
pub fn wedge_power(form: &KMForm, n: usize) -> Result<KMForm> {
    if n == 0 {
        return Err(KmError::InvalidInput("wedge power needs n >= 1".into()));
    }
    let mut acc = form.clone();
    for _ in 1..n {
        acc = acc.wedge_tensor(form);
    }
    Ok(acc)
}

/// Index of coordinate `i` (0-based) of block `j` (0-based) in `U^p`, `m = p + q`.
pub fn var_index(m: usize, block: usize, coord: usize) -> usize {
    block * m + coord
}

/// One `(σ, σ')` term: per block `j` and coordinate `i`, the number of `D̄`
/// factors (`a`, from `σ`) and `D` factors (`b`, from `σ'`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermMultiplicities {
    /// `counts[j][i] = (a, b)`.
    pub counts: Vec<Vec<(u16, u16)>>,
}

pub fn term_multiplicities(p: usize, q: usize, sigma: &[Perm], sigma_prime: &[Perm]) -> TermMultiplicities {
    let m = p + q;
    let mut counts = vec![vec![(0u16, 0u16); m]; p];
    for j in 0..p {
        for s in sigma {
            counts[j][s.apply(j)].0 += 1;
        }
        for s in sigma_prime {
            counts[j][s.apply(j)].1 += 1;
        }
    }
    TermMultiplicities { counts }
}

/// `prod_j prod_k D̄^{(j)}_{σ_k(j)} D^{(j)}_{σ'_k(j)} Φ_0`, as a product of `F_{a,b}` factors.
pub fn km_term(p: usize, q: usize, sigma: &[Perm], sigma_prime: &[Perm], cache: &mut FabCache) -> Result<ExactPG> {
    let m = p + q;
    let mult = term_multiplicities(p, q, sigma, sigma_prime);
    let mut factors = Vec::new();
    for (j, row) in mult.counts.iter().enumerate() {
        for (i, &(a, b)) in row.iter().enumerate() {
            if (a, b) != (0, 0) {
                factors.push((var_index(m, j, i), cache.get(a, b)));
            }
        }
    }
    let refs: Vec<(usize, &ExactPG)> = factors.iter().map(|(t, f)| (*t, f)).collect();
    ExactPG::disjoint_product(p * m, &refs)
}

/// Memoized `F_{a,b} phi_0`.
#[derive(Default)]
pub struct FabCache {
    table: BTreeMap<(u16, u16), ExactPG>,
}

impl FabCache {
    pub fn get(&mut self, a: u16, b: u16) -> ExactPG {
        self.table.entry((a, b)).or_insert_with(|| f_ab(a, b)).clone()
    }
}

pub fn term_sign(rule: SignRule, p: usize, q: usize, sigma: &[Perm], sigma_prime: &[Perm]) -> i32 {
    match rule {
        SignRule::Canonical => sort_sign(sigma, sigma_prime),
        SignRule::Uniform => uniform_sign(p, q),
    }
}

/// Number of `(σ, σ')` pairs, `(p!)^{2q}`, saturating.
pub fn pair_count(p: usize, q: usize) -> u128 {
    let fact: u128 = (1..=p as u128).product();
    (0..2 * q).fold(1u128, |acc, _| acc.saturating_mul(fact))
}

/// `φ_KM = sum_{σ,σ' ∈ S_p^q} sign(σ,σ') D_{σ,σ'} Φ_0` on `p (p+q)` variables.
pub fn km_schwartz(p: usize, q: usize, rule: SignRule, budget: &TermBudget) -> Result<ExactPG> {
    if p == 0 || q == 0 {
        return Err(KmError::InvalidInput("p and q must be at least 1".into()));
    }
    budget.require(pair_count(p, q))?;
    let m = p + q;
    let tuples = perm_tuples(p, q);
    let mut cache = FabCache::default();
    let mut total = ExactPG::zero(p * m);
    for sigma in &tuples {
        for sigma_prime in &tuples {
            let term = km_term(p, q, sigma, sigma_prime, &mut cache)?;
            budget.charge(term.term_count() as u128)?;
            let signed = if term_sign(rule, p, q, sigma, sigma_prime) < 0 { term.neg() } else { term };
            total.add_assign(&signed)?;
        }
    }
    Ok(total)
}

/// The `ω ∧ ω̄` coefficient of `φ⁺_{q,q}^{∧p}`.
pub fn top_coefficient(p: u16, q: u16, budget: &TermBudget) -> Result<ExactPG> {
    let form = km_form(p, q, budget)?;
    let power = wedge_power(&form, p as usize)?;
    Ok(power.component(&WedgeWord::top(p, q)))
}
