//! Permutations of `{0, .., n-1}` in one-line notation.

use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// `None` unless `images` is a bijection of `0..len`.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Perm(images))
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        Perm(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `+1` for even permutations, `-1` for odd ones (cycle count parity).
    pub fn sign(&self) -> i32 {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i];
            }
        }
        if (n - cycles).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// All permutations of `0..n` in lexicographic order of their image vectors.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

/// Sign of the permutation that sorts `items`; `0` if two items are equal.
pub fn sorting_sign<T: Ord>(items: &[T]) -> i32 {
    let mut sign = 1;
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            match items[i].cmp(&items[j]) {
                std::cmp::Ordering::Greater => sign = -sign,
                std::cmp::Ordering::Equal => return 0,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    sign
}

/// Every `q`-tuple of elements of `S_p`, in lexicographic order.
pub fn perm_tuples(p: usize, q: usize) -> Vec<Vec<Perm>> {
    let base = Perm::all(p);
    let mut out: Vec<Vec<Perm>> = vec![Vec::new()];
    for _ in 0..q {
        let mut next = Vec::with_capacity(out.len() * base.len());
        for prefix in &out {
            for s in &base {
                let mut t = prefix.clone();
                t.push(s.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}
