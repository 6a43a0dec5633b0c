//! Exterior algebra on the generators `ξ_{jk}`, `ξ̄_{jk}` (`1 <= j <= p`, `1 <= k <= q`).
//!
//! The canonical order sorts by `(conjugated, k, j)`, so the sorted word of all
//! generators is `ω ∧ ω̄` with `ω = ξ_{1,1} ∧ ξ_{2,1} ∧ .. ∧ ξ_{p,1} ∧ ξ_{1,2} ∧ .. ∧ ξ_{p,q}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::perm::{sorting_sign, Perm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    pub conj: bool,
    pub k: u16,
    pub j: u16,
}

impl Generator {
    pub fn xi(j: u16, k: u16) -> Self {
        Generator { conj: false, k, j }
    }

    pub fn xi_bar(j: u16, k: u16) -> Self {
        Generator { conj: true, k, j }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bar = if self.conj { "̄" } else { "" };
        write!(f, "ξ{}[{},{}]", bar, self.j, self.k)
    }
}

/// A signed, canonically sorted product of distinct generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WedgeWord {
    pub sign: i8,
    pub generators: Vec<Generator>,
}

impl WedgeWord {
    /// The empty word `1`.
    pub fn one() -> Self {
        WedgeWord { sign: 1, generators: Vec::new() }
    }

    /// Normalizes `g_1 ∧ .. ∧ g_n`; `None` when a generator repeats.
    pub fn from_generators(mut gens: Vec<Generator>) -> Option<Self> {
        let sign = sorting_sign(&gens);
        if sign == 0 {
            return None;
        }
        gens.sort();
        Some(WedgeWord { sign: sign as i8, generators: gens })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn wedge(&self, o: &WedgeWord) -> Option<WedgeWord> {
        let mut gens = self.generators.clone();
        gens.extend_from_slice(&o.generators);
        let mut w = WedgeWord::from_generators(gens)?;
        w.sign *= self.sign * o.sign;
        Some(w)
    }

    pub fn negated(&self) -> Self {
        WedgeWord { sign: -self.sign, generators: self.generators.clone() }
    }

    /// `ω = ξ_{1,1} ∧ .. ∧ ξ_{p,1} ∧ .. ∧ ξ_{p,q}`.
    pub fn omega(p: u16, q: u16) -> Self {
        let gens = (1..=q).flat_map(|k| (1..=p).map(move |j| Generator::xi(j, k))).collect();
        WedgeWord::from_generators(gens).expect("distinct generators")
    }

    /// The top form `ω ∧ ω̄`.
    pub fn top(p: u16, q: u16) -> Self {
        let bar: Vec<_> = (1..=q).flat_map(|k| (1..=p).map(move |j| Generator::xi_bar(j, k))).collect();
        let omega_bar = WedgeWord::from_generators(bar).expect("distinct generators");
        WedgeWord::omega(p, q).wedge(&omega_bar).expect("disjoint words")
    }
}

impl fmt::Display for WedgeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.sign < 0 { "-" } else { "+" })?;
        if self.generators.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join("∧"))
    }
}

/// The unsorted word `ξ_{σ,σ'}`: for each block `j`, `ξ_{σ_1(j),1} ∧ .. ∧ ξ_{σ_q(j),q}`
/// followed by the barred `ξ̄_{σ'_1(j),1} ∧ .. ∧ ξ̄_{σ'_q(j),q}`.
pub fn xi_word(sigma: &[Perm], sigma_prime: &[Perm]) -> Vec<Generator> {
    let p = sigma.first().or(sigma_prime.first()).map_or(0, |s| s.len());
    let mut gens = Vec::with_capacity(2 * p * sigma.len());
    for j in 0..p {
        for (k, s) in sigma.iter().enumerate() {
            gens.push(Generator::xi(s.apply(j) as u16 + 1, k as u16 + 1));
        }
        for (k, s) in sigma_prime.iter().enumerate() {
            gens.push(Generator::xi_bar(s.apply(j) as u16 + 1, k as u16 + 1));
        }
    }
    gens
}

/// The sign relating `ξ_{σ,σ'}` to `ω ∧ ω̄`.
pub fn sort_sign(sigma: &[Perm], sigma_prime: &[Perm]) -> i32 {
    sorting_sign(&xi_word(sigma, sigma_prime))
}

/// `(-1)^{pq(p-1)/2}`.
pub fn uniform_sign(p: usize, q: usize) -> i32 {
    if (p * q * p.saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Closed form of [`sort_sign`]: `(-1)^{pq(p-1)/2} prod_k sgn(σ_k) sgn(σ'_k)`.
pub fn sort_sign_closed_form(sigma: &[Perm], sigma_prime: &[Perm]) -> i32 {
    let p = sigma.first().map_or(0, |s| s.len());
    let chars: i32 = sigma.iter().chain(sigma_prime).map(|s| s.sign()).product();
    uniform_sign(p, sigma.len()) * chars
}
