//! Totally real number fields given by a monic minimal polynomial, with the
//! power basis as integral basis `{r_i}` and its trace-dual `{s_i}`.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{KmError, Result};
use crate::field::{parse_rational, rat_int, rat_to_f64, Rational};

pub type RatMatrix = Vec<Vec<Rational>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    /// Ascending coefficients of the monic minimal polynomial, as rational strings or numbers.
    pub min_poly: Vec<serde_json::Value>,
}

#[derive(Clone, Debug)]
pub struct NumberFieldBasis {
    degree: usize,
    min_poly: Vec<Rational>,
    /// `structure[i][j][k]`: coefficient of `r_k` in `r_i r_j`.
    structure: Vec<Vec<Vec<Rational>>>,
    trace_form: RatMatrix,
    /// Column `j` holds `s_j` in `r`-coordinates.
    dual: RatMatrix,
    /// `embeddings[k][i] = λ_k(r_i)`, embeddings sorted by the root they send `θ` to.
    embeddings: Vec<Vec<f64>>,
}

pub fn identity(n: usize) -> RatMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

/// Exact inverse by Gauss–Jordan; `None` when singular.
pub fn invert_rational(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| {
            let mut r = row.clone();
            r.extend(id);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = Rational::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&factor * p);
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// All complex roots of a monic polynomial (ascending coefficients) by Durand–Kerner.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    // polish with Newton steps
    let deriv: Vec<f64> = coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect();
    let eval_d = |z: Complex64| deriv.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = eval_d(*r);
            if d.norm() > 0.0 {
                *r -= eval(*r) / d;
            }
        }
    }
    roots
}

impl NumberFieldBasis {
    /// Builds the field from the ascending coefficients of a monic polynomial.
    pub fn from_min_poly(min_poly: Vec<Rational>) -> Result<Self> {
        if min_poly.len() < 2 || !min_poly.last().is_some_and(|c| c.is_one()) {
            return Err(KmError::InvalidInput("minimal polynomial must be monic of degree >= 1".into()));
        }
        let g = min_poly.len() - 1;
        // reduce θ^e for e < 2g - 1 to the power basis
        let mut powers: Vec<Vec<Rational>> = Vec::with_capacity(2 * g);
        for e in 0..2 * g - 1 {
            let v = if e < g {
                let mut v = vec![Rational::zero(); g];
                v[e] = Rational::one();
                v
            } else {
                let prev = &powers[e - 1];
                // θ · prev, with θ^g = -sum c_k θ^k
                let mut v = vec![Rational::zero(); g];
                v[1..g].clone_from_slice(&prev[..g - 1]);
                let top = &prev[g - 1];
                for k in 0..g {
                    v[k] = &v[k] - &(top * &min_poly[k]);
                }
                v
            };
            powers.push(v);
        }
        let structure: Vec<Vec<Vec<Rational>>> =
            (0..g).map(|i| (0..g).map(|j| powers[i + j].clone()).collect()).collect();
        let mut basis = NumberFieldBasis {
            degree: g,
            min_poly,
            structure,
            trace_form: Vec::new(),
            dual: Vec::new(),
            embeddings: Vec::new(),
        };
        basis.trace_form = (0..g)
            .map(|i| (0..g).map(|j| basis.trace(&basis.structure[i][j])).collect())
            .collect();
        basis.dual = invert_rational(&basis.trace_form).ok_or(KmError::SingularTraceForm)?;
        let coeffs: Vec<f64> = basis.min_poly.iter().map(rat_to_f64).collect();
        let mut roots = polynomial_roots(&coeffs);
        if roots.iter().any(|r| r.im.abs() > 1e-9 * (1.0 + r.re.abs())) {
            return Err(KmError::InvalidInput("field is not totally real".into()));
        }
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        basis.embeddings = roots.iter().map(|r| (0..g).map(|i| r.re.powi(i as i32)).collect()).collect();
        Ok(basis)
    }

    pub fn from_json(j: &FieldJson) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(j.min_poly.len());
        for v in &j.min_poly {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                other => return Err(KmError::Parse(format!("bad coefficient {}", other))),
            };
            coeffs.push(parse_rational(&text).ok_or_else(|| KmError::Parse(format!("bad coefficient {:?}", text)))?);
        }
        NumberFieldBasis::from_min_poly(coeffs)
    }

    pub fn rationals() -> Self {
        NumberFieldBasis::from_min_poly(vec![rat_int(0), rat_int(1)]).expect("Q")
    }

    /// `Q(sqrt d)` with basis `{1, sqrt d}`.
    pub fn real_quadratic(d: i64) -> Result<Self> {
        NumberFieldBasis::from_min_poly(vec![rat_int(-d), rat_int(0), rat_int(1)])
    }

    /// `Q(sqrt 5)` with basis `{1, (1 + sqrt 5)/2}`.
    pub fn golden() -> Self {
        NumberFieldBasis::from_min_poly(vec![rat_int(-1), rat_int(-1), rat_int(1)]).expect("Q(sqrt 5)")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn min_poly(&self) -> &[Rational] {
        &self.min_poly
    }

    pub fn trace_form(&self) -> &RatMatrix {
        &self.trace_form
    }

    /// `s_j` in `r`-coordinates.
    pub fn dual_element(&self, j: usize) -> Vec<Rational> {
        self.dual.iter().map(|row| row[j].clone()).collect()
    }

    pub fn dual_matrix(&self) -> &RatMatrix {
        &self.dual
    }

    pub fn basis_element(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.degree];
        v[i] = Rational::one();
        v
    }

    pub fn embeddings(&self) -> &[Vec<f64>] {
        &self.embeddings
    }

    pub fn mul(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let g = self.degree;
        let mut out = vec![Rational::zero(); g];
        for i in 0..g {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..g {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for (k, s) in self.structure[i][j].iter().enumerate() {
                    if !s.is_zero() {
                        out[k] = &out[k] + &(&c * s);
                    }
                }
            }
        }
        out
    }

    /// Trace of multiplication by `x`.
    pub fn trace(&self, x: &[Rational]) -> Rational {
        let mut t = Rational::zero();
        for j in 0..self.degree {
            t += self.mul(x, &self.basis_element(j))[j].clone();
        }
        t
    }

    /// Matrix of `y -> b y` from the basis `{s_j}` (source) to `{r_i}` (target).
    pub fn mult_matrix(&self, b: &[Rational]) -> RatMatrix {
        let g = self.degree;
        let cols: Vec<Vec<Rational>> = (0..g).map(|j| self.mul(b, &self.dual_element(j))).collect();
        (0..g).map(|i| (0..g).map(|j| cols[j][i].clone()).collect()).collect()
    }

    /// `(λ_1(x), .., λ_g(x))`.
    pub fn embed(&self, x: &[Rational]) -> Vec<f64> {
        self.embeddings
            .iter()
            .map(|lam| lam.iter().zip(x).map(|(l, c)| l * rat_to_f64(c)).sum())
            .collect()
    }

    /// Exact for degree at most 2 (trace and norm positive); by embeddings otherwise.
    pub fn is_totally_positive(&self, x: &[Rational]) -> bool {
        match self.degree {
            1 => x[0].is_positive(),
            2 => {
                let tr = self.trace(x);
                // norm = det of multiplication matrix
                let m0 = self.mul(x, &self.basis_element(0));
                let m1 = self.mul(x, &self.basis_element(1));
                let norm = &m0[0] * &m1[1] - &m0[1] * &m1[0];
                tr.is_positive() && norm.is_positive()
            }
            _ => self.embed(x).iter().all(|&v| v > 1e-12),
        }
    }

    pub fn is_integral(&self, x: &[Rational]) -> bool {
        x.iter().all(|c| c.is_integer())
    }
}
