//! Grouping of `I_b(L)` by the Gram matrix `β` of the components:
//! `Σ_{ᵗrβr = b} #I_β(L0) = #I_b(L)` for `L = L0 ⊗ O_F`.

use std::collections::{BTreeSet, HashSet};

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::imagquad::E0;
use super::lattice::{HermitianLattice, Vector};
use super::numfield::NumberFieldBasis;
use super::tracelem::{assemble_xi, extended_form, ElementE, XiBasis};
use crate::error::{KmError, Result};
use crate::field::{rat_int, Rational};

#[derive(Clone, Debug, Serialize)]
pub struct BetaCount {
    pub beta: Vec<Vec<String>>,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupingReport {
    pub b: Vec<String>,
    pub totally_positive: bool,
    /// Per-component norm caps derived from the embeddings of `b`.
    pub caps: Vec<String>,
    pub betas: Vec<BetaCount>,
    pub beta_total: usize,
    pub direct_total: usize,
    pub injective: bool,
}

impl GroupingReport {
    pub fn passed(&self) -> bool {
        self.injective && self.beta_total == self.direct_total
    }
}

fn invert_f64(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, p);
        let d = a[col][col];
        for x in a[col].iter_mut() {
            *x /= d;
        }
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col];
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= f * p;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Norm caps `(Σ_k |U^{-1}_{ik}| sqrt λ_k(b))²` on each component `x_i`, rounded up to integers.
fn component_caps(f: &NumberFieldBasis, b: &[Rational]) -> Vec<Rational> {
    let uinv = invert_f64(f.embeddings());
    let lam = f.embed(b);
    uinv.iter()
        .map(|row| {
            let s: f64 = row.iter().zip(&lam).map(|(u, l)| u.abs() * l.max(0.0).sqrt()).sum();
            let cap = (s * s * (1.0 + 1e-9) + 1e-9).ceil();
            rat_int(cap.to_i64().unwrap_or(i64::MAX))
        })
        .collect()
}

fn is_field_element(x: &ElementE, b: &[Rational]) -> bool {
    x.iter().zip(b).all(|(z, c)| z.v.is_zero() && &z.u == c)
}

/// Elements `(p + qω)/den` of norm at most `bound`.
fn bounded_e0(l: &HermitianLattice, den: &num_bigint::BigInt, bound: &Rational) -> Vec<E0> {
    let k = l.field();
    let (t, n) = k.omega_relation();
    let d = den.to_i64().unwrap_or(1);
    let scaled = (bound * rat_int(4 * d * d)).to_integer().to_i64().unwrap_or(0);
    let disc = 4 * n - t * t;
    let qmax = ((scaled as f64) / disc as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for q in -qmax..=qmax {
        let rest = scaled - disc * q * q;
        if rest < 0 {
            continue;
        }
        let s = (rest as f64).sqrt() as i64 + 1;
        // 2p + tq ranges over [-s, s]
        let pmin = Integer::div_floor(&(-s - t * q), &2) - 1;
        let pmax = Integer::div_floor(&(s - t * q), &2) + 1;
        for p in pmin..=pmax {
            let z = E0::new(Rational::new(p.into(), den.clone()), Rational::new(q.into(), den.clone()));
            if &k.norm(&z) <= bound {
                out.push(z);
            }
        }
    }
    out
}

/// Both sides of the grouping identity for `b` (in `r`-coordinates).
pub fn beta_grouping_check(f: &NumberFieldBasis, l: &HermitianLattice, b: &[Rational], bound: &Rational) -> Result<GroupingReport> {
    if !l.is_definite() {
        return Err(KmError::IndefiniteLattice);
    }
    let g = f.degree();
    if b.len() != g {
        return Err(KmError::InvalidInput(format!("b has {} coordinates, field degree is {}", b.len(), g)));
    }
    let totally_positive = b.iter().all(|c| c.is_zero()) || f.is_totally_positive(b);
    let mut report = GroupingReport {
        b: b.iter().map(|c| c.to_string()).collect(),
        totally_positive,
        caps: Vec::new(),
        betas: Vec::new(),
        beta_total: 0,
        direct_total: 0,
        injective: true,
    };
    if !totally_positive {
        return Ok(report);
    }
    let caps = component_caps(f, b);
    report.caps = caps.iter().map(|c| c.to_string()).collect();
    let top = caps.iter().max().cloned().unwrap_or_else(Rational::zero);
    if &top > bound {
        return Err(KmError::CapExceeded { needed: top.to_string(), bound: bound.to_string() });
    }
    let short = l.short_vectors(&top)?;

    // direct side: every x ∈ L0^g within the caps, keeping those with Q(ξ, ξ) = b
    let lists: Vec<Vec<&Vector>> = caps.iter().map(|c| short.iter().filter(|(_, n)| n <= c).map(|(x, _)| x).collect()).collect();
    let mut seen: HashSet<Vec<ElementE>> = HashSet::new();
    let mut idx = vec![0usize; g];
    if lists.iter().all(|v| !v.is_empty()) {
        loop {
            let x: Vec<Vector> = (0..g).map(|i| lists[i][idx[i]].clone()).collect();
            let xi = assemble_xi(f, &x, XiBasis::Integral);
            if is_field_element(&extended_form(f, l, &xi, &xi), b) {
                report.direct_total += 1;
                if !seen.insert(xi) {
                    report.injective = false;
                }
            }
            let mut pos = 0;
            while pos < g {
                idx[pos] += 1;
                if idx[pos] < lists[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == g {
                break;
            }
        }
    }

    // β side: hermitian candidates with realizable diagonals, filtered by ᵗrβr = b
    let norms: BTreeSet<Rational> = short.iter().map(|(_, n)| n.clone()).collect();
    let diag_choices: Vec<Vec<Rational>> = caps.iter().map(|c| norms.iter().filter(|n| *n <= c).cloned().collect()).collect();
    let den = l
        .gram()
        .iter()
        .flatten()
        .fold(num_bigint::BigInt::from(1), |acc, z| acc.lcm(z.u.denom()).lcm(z.v.denom()));
    let rr: Vec<Vec<Vec<Rational>>> =
        (0..g).map(|i| (0..g).map(|j| f.mul(&f.basis_element(i), &f.basis_element(j))).collect()).collect();
    let k = *l.field();
    let mut diag = vec![Rational::zero(); g];
    let mut diag_idx = vec![0usize; g];
    if diag_choices.iter().all(|v| !v.is_empty()) {
        loop {
            for i in 0..g {
                diag[i] = diag_choices[i][diag_idx[i]].clone();
            }
            // off-diagonal entries, upper triangle in row-major order
            let pairs: Vec<(usize, usize)> = (0..g).flat_map(|i| (i + 1..g).map(move |j| (i, j))).collect();
            let options: Vec<Vec<E0>> = pairs.iter().map(|&(i, j)| bounded_e0(l, &den, &(&diag[i] * &diag[j]))).collect();
            let mut off = vec![0usize; pairs.len()];
            loop {
                let mut beta = vec![vec![E0::zero(); g]; g];
                for i in 0..g {
                    beta[i][i] = E0::from_rational(diag[i].clone());
                }
                for (p, &(i, j)) in pairs.iter().enumerate() {
                    beta[i][j] = options[p][off[p]].clone();
                    beta[j][i] = k.conj(&beta[i][j]);
                }
                // ᵗrβr = Σ_ij β_ij r_i r_j
                let mut total = vec![E0::zero(); g];
                for i in 0..g {
                    for j in 0..g {
                        for (c, coef) in rr[i][j].iter().enumerate() {
                            if !coef.is_zero() {
                                total[c] = total[c].add(&beta[i][j].scale(coef));
                            }
                        }
                    }
                }
                if is_field_element(&total, b) {
                    let count = l.enumerate_gram(&beta, bound)?.len();
                    if count > 0 {
                        report.beta_total += count;
                        report.betas.push(BetaCount {
                            beta: beta.iter().map(|row| row.iter().map(|z| z.to_string()).collect()).collect(),
                            count,
                        });
                    }
                }
                let mut pos = 0;
                while pos < off.len() {
                    off[pos] += 1;
                    if off[pos] < options[pos].len() {
                        break;
                    }
                    off[pos] = 0;
                    pos += 1;
                }
                if pos == off.len() || options.iter().any(|o| o.is_empty()) {
                    break;
                }
            }
            let mut pos = 0;
            while pos < g {
                diag_idx[pos] += 1;
                if diag_idx[pos] < diag_choices[pos].len() {
                    break;
                }
                diag_idx[pos] = 0;
                pos += 1;
            }
            if pos == g {
                break;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlat::imagquad::ImagQuad;

    #[test]
    fn rational_field_is_identity_grouping() {
        let f = NumberFieldBasis::rationals();
        let l = HermitianLattice::standard(ImagQuad::gaussian(), 1);
        for b in 0..=10 {
            let r = beta_grouping_check(&f, &l, &[rat_int(b)], &rat_int(20)).unwrap();
            assert!(r.passed());
            assert!(r.betas.len() <= 1);
        }
        let r = beta_grouping_check(&f, &l, &[rat_int(5)], &rat_int(20)).unwrap();
        assert_eq!(r.direct_total, 8);
    }

    #[test]
    fn sqrt2_example() {
        let f = NumberFieldBasis::real_quadratic(2).unwrap();
        let l = HermitianLattice::standard(ImagQuad::gaussian(), 1);
        let r = beta_grouping_check(&f, &l, &[rat_int(2), rat_int(1)], &rat_int(40)).unwrap();
        assert!(r.passed(), "{:?}", r);
        // 2 Re(x1 conj x2) = 1 has no solution in Z[i]
        assert_eq!(r.direct_total, 0);
        // |x1|^2 + 2|x2|^2 = 3 and Re(x1 conj x2) = 1 force x1 = x2 a unit
        let r = beta_grouping_check(&f, &l, &[rat_int(3), rat_int(2)], &rat_int(40)).unwrap();
        assert!(r.passed(), "{:?}", r);
        assert_eq!((r.direct_total, r.betas.len()), (4, 1));
    }

    #[test]
    fn non_totally_positive_is_empty() {
        let f = NumberFieldBasis::real_quadratic(2).unwrap();
        let l = HermitianLattice::standard(ImagQuad::gaussian(), 1);
        let r = beta_grouping_check(&f, &l, &[rat_int(1), rat_int(1)], &rat_int(40)).unwrap();
        assert_eq!((r.beta_total, r.direct_total), (0, 0));
    }

    #[test]
    fn cap_is_enforced() {
        let f = NumberFieldBasis::real_quadratic(2).unwrap();
        let l = HermitianLattice::standard(ImagQuad::gaussian(), 1);
        let r = beta_grouping_check(&f, &l, &[rat_int(20), rat_int(1)], &rat_int(3));
        assert!(matches!(r, Err(KmError::CapExceeded { .. })));
    }
}
