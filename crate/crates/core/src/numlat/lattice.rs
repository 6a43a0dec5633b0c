//! Definite hermitian lattices `O_{E0}^n` with a Gram matrix over `E0`, and exact
//! short-vector enumeration.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::imagquad::{ImagQuad, E0};
use crate::error::{KmError, Result};
use crate::field::{parse_rational, rat_int, rat_to_f64, Rational};

pub type Vector = Vec<E0>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub disc: i64,
    pub rank: usize,
    /// Entries `[a, b]` meaning `a + bω`.
    pub gram: Vec<Vec<[serde_json::Value; 2]>>,
}

#[derive(Clone, Debug)]
pub struct HermitianLattice {
    field: ImagQuad,
    gram: Vec<Vec<E0>>,
    definite: bool,
}

fn json_rational(v: &serde_json::Value) -> Result<Rational> {
    let text = match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        other => return Err(KmError::Parse(format!("expected a rational, got {}", other))),
    };
    parse_rational(&text).ok_or_else(|| KmError::Parse(format!("bad rational {:?}", text)))
}

/// Determinant over `E0` by elimination.
fn determinant(k: &ImagQuad, m: &[Vec<E0>]) -> E0 {
    let n = m.len();
    let mut a: Vec<Vec<E0>> = m.to_vec();
    let mut det = E0::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return E0::zero();
        };
        if p != col {
            a.swap(p, col);
            det = det.neg();
        }
        det = k.mul(&det, &a[col][col]);
        let inv = k.inv(&a[col][col]).expect("nonzero pivot");
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = k.mul(&a[r][col], &inv);
            for c in col..n {
                let t = k.mul(&f, &a[col][c]);
                a[r][c] = a[r][c].sub(&t);
            }
        }
    }
    det
}

impl HermitianLattice {
    pub fn new(field: ImagQuad, gram: Vec<Vec<E0>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|row| row.len() != n) {
            return Err(KmError::InvalidInput("Gram matrix must be square and nonempty".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if gram[j][i] != field.conj(&gram[i][j]) {
                    return Err(KmError::InvalidInput("Gram matrix is not hermitian".into()));
                }
            }
        }
        let definite = (1..=n).all(|k| {
            let minor: Vec<Vec<E0>> = gram[..k].iter().map(|row| row[..k].to_vec()).collect();
            let d = determinant(&field, &minor);
            d.is_rational() && d.u.is_positive()
        });
        Ok(HermitianLattice { field, gram, definite })
    }

    /// The rank-`n` lattice with identity Gram matrix.
    pub fn standard(field: ImagQuad, n: usize) -> Self {
        let gram = (0..n).map(|i| (0..n).map(|j| E0::from_int((i == j) as i64)).collect()).collect();
        HermitianLattice::new(field, gram).expect("identity is hermitian")
    }

    pub fn from_json(j: &LatticeJson) -> Result<Self> {
        let field = ImagQuad::new(j.disc)?;
        if j.gram.len() != j.rank {
            return Err(KmError::InvalidInput(format!("rank {} but {} Gram rows", j.rank, j.gram.len())));
        }
        let mut gram = Vec::with_capacity(j.rank);
        for row in &j.gram {
            let mut r = Vec::with_capacity(row.len());
            for [a, b] in row {
                r.push(E0::new(json_rational(a)?, json_rational(b)?));
            }
            gram.push(r);
        }
        HermitianLattice::new(field, gram)
    }

    pub fn field(&self) -> &ImagQuad {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<E0>] {
        &self.gram
    }

    pub fn is_definite(&self) -> bool {
        self.definite
    }

    /// `Q0(x, y) = Σ x_a G_ab conj(y_b)`.
    pub fn form(&self, x: &[E0], y: &[E0]) -> E0 {
        let k = &self.field;
        let mut acc = E0::zero();
        for (a, xa) in x.iter().enumerate() {
            for (b, yb) in y.iter().enumerate() {
                if xa.is_zero() || yb.is_zero() {
                    continue;
                }
                acc = acc.add(&k.mul(&k.mul(xa, &self.gram[a][b]), &k.conj(yb)));
            }
        }
        acc
    }

    pub fn norm(&self, x: &[E0]) -> Rational {
        self.form(x, x).u
    }

    fn coordinate_vector(&self, z: &[i64]) -> Vector {
        z.chunks(2).map(|c| E0::new(rat_int(c[0]), rat_int(c[1]))).collect()
    }

    /// The real quadratic form `z -> Q0(x, x)` on integer coordinates `(u_1, v_1, u_2, ..)`.
    pub fn real_gram(&self) -> Vec<Vec<Rational>> {
        let dim = 2 * self.rank();
        let unit = |k: usize, l: Option<usize>| {
            let mut z = vec![0i64; dim];
            z[k] += 1;
            if let Some(l) = l {
                z[l] += 1;
            }
            self.norm(&self.coordinate_vector(&z))
        };
        let diag: Vec<Rational> = (0..dim).map(|k| unit(k, None)).collect();
        (0..dim)
            .map(|k| {
                (0..dim)
                    .map(|l| if k == l { diag[k].clone() } else { (unit(k, Some(l)) - &diag[k] - &diag[l]) / rat_int(2) })
                    .collect()
            })
            .collect()
    }

    /// All vectors with `Q0(x, x) <= bound`, with their exact norms.
    pub fn short_vectors(&self, bound: &Rational) -> Result<Vec<(Vector, Rational)>> {
        if !self.definite {
            return Err(KmError::IndefiniteLattice);
        }
        if bound.is_negative() {
            return Ok(Vec::new());
        }
        let m = self.real_gram();
        let dim = m.len();
        // q(z) = Σ_i d_i (z_i + Σ_{j>i} mu_ij z_j)^2
        let mut q = m.clone();
        for i in 0..dim {
            for j in i + 1..dim {
                let qij = q[i][j].clone();
                q[j][i] = qij.clone();
                q[i][j] = qij / &q[i][i];
            }
            for k in i + 1..dim {
                for l in k..dim {
                    let t = &q[k][i] * &q[i][l];
                    q[k][l] = &q[k][l] - &t;
                }
            }
        }
        let mut out = Vec::new();
        let mut z = vec![0i64; dim];
        self.descend(&q, dim, bound.clone(), &mut z, &mut out);
        Ok(out)
    }

    fn descend(&self, q: &[Vec<Rational>], level: usize, remaining: Rational, z: &mut Vec<i64>, out: &mut Vec<(Vector, Rational)>) {
        if level == 0 {
            let x = self.coordinate_vector(z);
            let n = self.norm(&x);
            out.push((x, n));
            return;
        }
        let i = level - 1;
        let dim = z.len();
        let mut center = Rational::zero();
        for j in i + 1..dim {
            if z[j] != 0 {
                center -= &q[i][j] * rat_int(z[j]);
            }
        }
        let radius = (rat_to_f64(&remaining) / rat_to_f64(&q[i][i])).max(0.0).sqrt();
        let c = rat_to_f64(&center);
        let lo = (c - radius).floor().to_i64().unwrap_or(0) - 1;
        let hi = (c + radius).ceil().to_i64().unwrap_or(0) + 1;
        for zi in lo..=hi {
            let offset = rat_int(zi) - &center;
            let used = &q[i][i] * &offset * &offset;
            if used <= remaining {
                z[i] = zi;
                self.descend(q, i, &remaining - &used, z, out);
            }
        }
        z[i] = 0;
    }

    /// Number of lattice vectors of each norm up to `bound`.
    pub fn theta_coefficients(&self, bound: &Rational) -> Result<BTreeMap<Rational, usize>> {
        let mut counts = BTreeMap::new();
        for (_, n) in self.short_vectors(bound)? {
            *counts.entry(n).or_insert(0) += 1;
        }
        Ok(counts)
    }

    /// All tuples `(x_1, .., x_k)` of lattice vectors with `Q0(x_i, x_j) = beta_ij`.
    pub fn enumerate_gram(&self, beta: &[Vec<E0>], cap: &Rational) -> Result<Vec<Vec<Vector>>> {
        if !self.definite {
            return Err(KmError::IndefiniteLattice);
        }
        let k = beta.len();
        if beta.iter().any(|row| row.len() != k) {
            return Err(KmError::InvalidInput("target must be square".into()));
        }
        for i in 0..k {
            for j in 0..k {
                if beta[j][i] != self.field.conj(&beta[i][j]) {
                    return Err(KmError::InvalidInput("target is not hermitian".into()));
                }
            }
        }
        let diag: Vec<Rational> = (0..k).map(|i| beta[i][i].u.clone()).collect();
        if diag.iter().any(|d| d.is_negative()) {
            return Ok(Vec::new());
        }
        let top = diag.iter().max().cloned().unwrap_or_else(Rational::zero);
        if &top > cap {
            return Err(KmError::CapExceeded { needed: top.to_string(), bound: cap.to_string() });
        }
        let mut by_norm: BTreeMap<Rational, Vec<Vector>> = BTreeMap::new();
        for (x, n) in self.short_vectors(&top)? {
            by_norm.entry(n).or_default().push(x);
        }
        let candidates: Vec<Vec<Vector>> = diag.iter().map(|d| by_norm.get(d).cloned().unwrap_or_default()).collect();
        let mut out = Vec::new();
        let mut chosen: Vec<Vector> = Vec::with_capacity(k);
        self.extend_tuple(beta, &candidates, &mut chosen, &mut out);
        Ok(out)
    }

    fn extend_tuple(&self, beta: &[Vec<E0>], cands: &[Vec<Vector>], chosen: &mut Vec<Vector>, out: &mut Vec<Vec<Vector>>) {
        let i = chosen.len();
        if i == beta.len() {
            out.push(chosen.clone());
            return;
        }
        for x in &cands[i] {
            if (0..i).all(|j| self.form(x, &chosen[j]) == beta[i][j]) {
                chosen.push(x.clone());
                self.extend_tuple(beta, cands, chosen, out);
                chosen.pop();
            }
        }
    }
}
