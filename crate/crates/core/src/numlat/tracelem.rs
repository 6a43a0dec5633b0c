//! Arithmetic in `E = E0 F` and the trace identity
//! `tr_{E/E0}(Q(ξ, η) b) = Tr(Q0(x, y) B)`.

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use super::imagquad::{ImagQuad, E0};
use super::lattice::{HermitianLattice, Vector};
use super::numfield::NumberFieldBasis;
use crate::field::{rat_int, Rational};

/// An element `Σ_k z_k r_k` of `E`, with `z_k ∈ E0`.
pub type ElementE = Vec<E0>;

/// Which basis of `F` assembles `ξ = Σ t_i x_i` from the components `x_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum XiBasis {
    /// `t_i = s_i`, the trace-dual basis (the one compatible with `B`).
    Dual,
    /// `t_i = r_i`, the integral basis.
    Integral,
}

pub fn e_mul(f: &NumberFieldBasis, k: &ImagQuad, x: &ElementE, y: &ElementE) -> ElementE {
    let g = f.degree();
    let mut out = vec![E0::zero(); g];
    for i in 0..g {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..g {
            if y[j].is_zero() {
                continue;
            }
            let p = k.mul(&x[i], &y[j]);
            let rr = f.mul(&f.basis_element(i), &f.basis_element(j));
            for (l, c) in rr.iter().enumerate() {
                if !c.is_zero() {
                    out[l] = out[l].add(&p.scale(c));
                }
            }
        }
    }
    out
}

pub fn e_conj(k: &ImagQuad, x: &ElementE) -> ElementE {
    x.iter().map(|c| k.conj(c)).collect()
}

/// `tr_{E/E0}(Σ z_k r_k) = Σ z_k Tr_F(r_k)`.
pub fn e_trace(f: &NumberFieldBasis, x: &ElementE) -> E0 {
    x.iter()
        .enumerate()
        .fold(E0::zero(), |acc, (k, z)| acc.add(&z.scale(&f.trace(&f.basis_element(k)))))
}

fn embed_e0(f: &NumberFieldBasis, z: &E0) -> ElementE {
    let mut v = vec![E0::zero(); f.degree()];
    v[0] = z.clone();
    v
}

fn embed_f(q: &[Rational]) -> ElementE {
    q.iter().map(|c| E0::from_rational(c.clone())).collect()
}

/// `ξ_a = Σ_i t_i x_{i,a}`.
pub fn assemble_xi(f: &NumberFieldBasis, x: &[Vector], basis: XiBasis) -> Vec<ElementE> {
    let g = f.degree();
    let rank = x.first().map_or(0, |v| v.len());
    let t: Vec<Vec<Rational>> = (0..g)
        .map(|i| match basis {
            XiBasis::Dual => f.dual_element(i),
            XiBasis::Integral => f.basis_element(i),
        })
        .collect();
    (0..rank)
        .map(|a| {
            let mut z = vec![E0::zero(); g];
            for (i, ti) in t.iter().enumerate() {
                for (kk, c) in ti.iter().enumerate() {
                    if !c.is_zero() {
                        z[kk] = z[kk].add(&x[i][a].scale(c));
                    }
                }
            }
            z
        })
        .collect()
}

/// The extended form `Q(ξ, η) = Σ ξ_a G_ab conj(η_b)` on `E^n`.
pub fn extended_form(f: &NumberFieldBasis, l: &HermitianLattice, xi: &[ElementE], eta: &[ElementE]) -> ElementE {
    let k = l.field();
    let mut acc = vec![E0::zero(); f.degree()];
    for (a, xa) in xi.iter().enumerate() {
        for (b, yb) in eta.iter().enumerate() {
            let gab = embed_e0(f, &l.gram()[a][b]);
            let term = e_mul(f, k, &e_mul(f, k, xa, &gab), &e_conj(k, yb));
            acc = acc.iter().zip(&term).map(|(p, q)| p.add(q)).collect();
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceIdentity {
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

/// Both sides of the trace identity for `x = (x_1..x_g)`, `y = (y_1..y_g)`, each `x_i ∈ E0^n`.
pub fn trace_identity_check(
    f: &NumberFieldBasis,
    l: &HermitianLattice,
    b: &[Rational],
    x: &[Vector],
    y: &[Vector],
    basis: XiBasis,
) -> TraceIdentity {
    let k = l.field();
    let xi = assemble_xi(f, x, basis);
    let eta = assemble_xi(f, y, basis);
    let q = extended_form(f, l, &xi, &eta);
    let lhs = e_trace(f, &e_mul(f, k, &q, &embed_f(b)));
    let bm = f.mult_matrix(b);
    let g = f.degree();
    let mut rhs = E0::zero();
    for i in 0..g {
        for j in 0..g {
            if !bm[j][i].is_zero() {
                rhs = rhs.add(&l.form(&x[i], &y[j]).scale(&bm[j][i]));
            }
        }
    }
    TraceIdentity { holds: lhs == rhs, lhs: lhs.to_string(), rhs: rhs.to_string() }
}

pub fn random_e0<R: Rng>(rng: &mut R, range: i64) -> E0 {
    E0::new(rat_int(rng.gen_range(-range..=range)), rat_int(rng.gen_range(-range..=range)))
}

/// A random hermitian Gram matrix with small integral entries.
pub fn random_hermitian<R: Rng>(k: ImagQuad, n: usize, rng: &mut R) -> HermitianLattice {
    let mut g = vec![vec![E0::zero(); n]; n];
    for i in 0..n {
        g[i][i] = E0::from_int(rng.gen_range(1..=5));
        for j in i + 1..n {
            g[i][j] = random_e0(rng, 2);
            g[j][i] = k.conj(&g[i][j]);
        }
    }
    HermitianLattice::new(k, g).expect("hermitian by construction")
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub samples: usize,
    pub matches: usize,
    pub first_failure: Option<TraceIdentity>,
}

impl TraceReport {
    pub fn passed(&self) -> bool {
        self.matches == self.samples
    }
}

/// Random `b`, Gram matrices and vectors; counts exact agreements.
pub fn trace_identity_samples<R: Rng>(
    f: &NumberFieldBasis,
    k: ImagQuad,
    samples: usize,
    basis: XiBasis,
    rng: &mut R,
) -> TraceReport {
    let g = f.degree();
    let mut report = TraceReport { samples, matches: 0, first_failure: None };
    for _ in 0..samples {
        let rank = rng.gen_range(1..=2);
        let l = random_hermitian(k, rank, rng);
        let b: Vec<Rational> = (0..g).map(|_| rat_int(rng.gen_range(-4..=4))).collect();
        let mut vecs = || -> Vec<Vector> { (0..g).map(|_| (0..rank).map(|_| random_e0(rng, 3)).collect()).collect() };
        let x = vecs();
        let y = vecs();
        let res = trace_identity_check(f, &l, &b, &x, &y, basis);
        if res.holds {
            report.matches += 1;
        } else if report.first_failure.is_none() {
            report.first_failure = Some(res);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rational_base_field_is_trivial() {
        let f = NumberFieldBasis::rationals();
        let l = HermitianLattice::standard(ImagQuad::gaussian(), 1);
        let x = vec![vec![E0::new(rat_int(2), rat_int(1))]];
        let y = vec![vec![E0::new(rat_int(-1), rat_int(3))]];
        let r = trace_identity_check(&f, &l, &[rat_int(5)], &x, &y, XiBasis::Dual);
        assert!(r.holds);
        assert_eq!(r.lhs, "5-35w");
    }

    #[test]
    fn zero_b_gives_zero() {
        let f = NumberFieldBasis::real_quadratic(2).unwrap();
        let l = HermitianLattice::standard(ImagQuad::gaussian(), 1);
        let x = vec![vec![E0::from_int(1)], vec![E0::from_int(2)]];
        let r = trace_identity_check(&f, &l, &[rat_int(0), rat_int(0)], &x, &x, XiBasis::Dual);
        assert!(r.holds);
        assert_eq!(r.lhs, "0");
    }

    #[test]
    fn dual_assembly_matches_and_integral_does_not() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = NumberFieldBasis::real_quadratic(2).unwrap();
        let dual = trace_identity_samples(&f, ImagQuad::gaussian(), 50, XiBasis::Dual, &mut rng);
        assert!(dual.passed(), "{:?}", dual.first_failure);
        let integral = trace_identity_samples(&f, ImagQuad::gaussian(), 50, XiBasis::Integral, &mut rng);
        assert!(!integral.passed());
    }
}
