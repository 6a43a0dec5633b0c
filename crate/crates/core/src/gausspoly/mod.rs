//! Polynomials in `z_j, z̄_j` times per-variable Gaussians `exp(-pi c_j |z_j|^2)`.
//!
//! A monomial is stored as an interleaved exponent vector
//! `[a_0, b_0, a_1, b_1, ...]` meaning `prod_j z̄_j^{a_j} z_j^{b_j}`.
//! Terms live in a `BTreeMap`, so iteration order is lexicographic on exponents
//! and structural equality is the mathematical equality of normalized values.

mod json;

pub use json::{coefficient_from_json, coefficient_to_json, field_from_json, field_to_json, GradeJson, PolyGaussianJson, TermJson};

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::error::{KmError, Result};
use crate::field::Coefficient;
use crate::scalar::{Scalar, ScaleValue};

pub type Monomial = Vec<u16>;
pub type Terms<S> = BTreeMap<Monomial, S>;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyGaussian<S: Scalar = Coefficient> {
    num_vars: usize,
    scales: Vec<S::Scale>,
    terms: Terms<S>,
}

pub type ExactPG = PolyGaussian<Coefficient>;
pub type NumericPG = PolyGaussian<Complex64>;

fn accumulate<S: Scalar>(terms: &mut Terms<S>, mono: Monomial, c: S) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&mono) {
        Some(prev) => {
            let sum = prev.add(&c);
            if sum.is_zero() {
                terms.remove(&mono);
            } else {
                *prev = sum;
            }
        }
        None => {
            terms.insert(mono, c);
        }
    }
}

fn mul_terms<S: Scalar>(x: &Terms<S>, y: &Terms<S>) -> Terms<S> {
    let mut out = Terms::new();
    for (mx, cx) in x {
        for (my, cy) in y {
            let mono: Monomial = mx.iter().zip(my).map(|(a, b)| a + b).collect();
            accumulate(&mut out, mono, cx.mul(cy));
        }
    }
    out
}

fn factorial<S: Scalar>(n: u16) -> S {
    let mut acc = S::one();
    for k in 2..=n as i64 {
        acc = acc.mul(&S::from_int(k));
    }
    acc
}

fn scale_pow<V: ScaleValue>(c: &V, e: u32) -> V {
    let mut out = V::one();
    for _ in 0..e {
        out = out.mul(c);
    }
    out
}

impl<S: Scalar> PolyGaussian<S> {
    /// The zero function on `scales.len()` variables with the given Gaussian.
    pub fn zero_with_scales(scales: Vec<S::Scale>) -> Self {
        PolyGaussian { num_vars: scales.len(), scales, terms: Terms::new() }
    }

    pub fn zero(num_vars: usize) -> Self {
        Self::zero_with_scales(vec![S::Scale::one(); num_vars])
    }

    /// The Gaussian `exp(-pi sum c_j |z_j|^2)` itself.
    pub fn gaussian_with_scales(scales: Vec<S::Scale>) -> Self {
        let mut out = Self::zero_with_scales(scales);
        out.terms.insert(vec![0; 2 * out.num_vars], S::one());
        out
    }

    /// The standard Gaussian `phi_0` on `num_vars` variables.
    pub fn gaussian(num_vars: usize) -> Self {
        Self::gaussian_with_scales(vec![S::Scale::one(); num_vars])
    }

    /// `c * prod z̄_j^{a_j} z_j^{b_j} * phi_0` from `(a_j, b_j)` pairs.
    pub fn monomial(exps: &[(u16, u16)], c: S) -> Self {
        let mut out = Self::zero(exps.len());
        let mono = exps.iter().flat_map(|&(a, b)| [a, b]).collect();
        accumulate(&mut out.terms, mono, c);
        out
    }

    pub fn from_terms(scales: Vec<S::Scale>, terms: impl IntoIterator<Item = (Monomial, S)>) -> Result<Self> {
        let mut out = Self::zero_with_scales(scales);
        for (mono, c) in terms {
            if mono.len() != 2 * out.num_vars {
                return Err(KmError::InvalidInput(format!(
                    "monomial has {} exponents, expected {}",
                    mono.len(),
                    2 * out.num_vars
                )));
            }
            accumulate(&mut out.terms, mono, c);
        }
        Ok(out)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn scales(&self) -> &[S::Scale] {
        &self.scales
    }

    pub fn terms(&self) -> &Terms<S> {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exps: &[(u16, u16)]) -> S {
        let mono: Monomial = exps.iter().flat_map(|&(a, b)| [a, b]).collect();
        self.terms.get(&mono).cloned().unwrap_or_else(S::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|&e| e as u32).sum()).max().unwrap_or(0)
    }

    fn check_var(&self, j: usize) -> Result<()> {
        if j >= self.num_vars {
            return Err(KmError::InvalidInput(format!("variable {} out of range for {} variables", j, self.num_vars)));
        }
        Ok(())
    }

    fn check_scales(&self, o: &Self) -> Result<()> {
        if self.num_vars != o.num_vars {
            return Err(KmError::ScaleMismatch(format!("{} vs {} variables", self.num_vars, o.num_vars)));
        }
        if self.scales != o.scales {
            return Err(KmError::ScaleMismatch(format!("{:?} vs {:?}", self.scales, o.scales)));
        }
        Ok(())
    }

    fn require_unit_scale(&self, j: usize) -> Result<()> {
        if !self.scales[j].is_one() {
            return Err(KmError::UnsupportedScale(format!("variable {} has scale {:?}, expected 1", j, self.scales[j])));
        }
        Ok(())
    }

    fn with_terms(&self, terms: Terms<S>) -> Self {
        PolyGaussian { num_vars: self.num_vars, scales: self.scales.clone(), terms }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_scales(o)?;
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            accumulate(&mut terms, m.clone(), c.clone());
        }
        Ok(self.with_terms(terms))
    }

    pub fn add_assign(&mut self, o: &Self) -> Result<()> {
        self.check_scales(o)?;
        for (m, c) in &o.terms {
            accumulate(&mut self.terms, m.clone(), c.clone());
        }
        Ok(())
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.with_terms(self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect())
    }

    pub fn scale_by(&self, c: &S) -> Self {
        let mut terms = Terms::new();
        for (m, v) in &self.terms {
            accumulate(&mut terms, m.clone(), v.mul(c));
        }
        self.with_terms(terms)
    }

    /// Multiplies by `c * prod z̄_j^{a_j} z_j^{b_j}`; the Gaussian is unchanged.
    pub fn mul_poly(&self, exps: &[(u16, u16)], c: &S) -> Result<Self> {
        if exps.len() != self.num_vars {
            return Err(KmError::InvalidInput(format!(
                "monomial has {} variables, function has {}",
                exps.len(),
                self.num_vars
            )));
        }
        let shift: Vec<u16> = exps.iter().flat_map(|&(a, b)| [a, b]).collect();
        let mut terms = Terms::new();
        for (m, v) in &self.terms {
            let mono = m.iter().zip(&shift).map(|(x, y)| x + y).collect();
            accumulate(&mut terms, mono, v.mul(c));
        }
        Ok(self.with_terms(terms))
    }

    /// Multiplies by `z_j` (or `z̄_j` when `conjugated`).
    pub fn mul_var(&self, j: usize, conjugated: bool) -> Result<Self> {
        self.check_var(j)?;
        let slot = 2 * j + usize::from(!conjugated);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m = m.clone();
                m[slot] += 1;
                (m, c.clone())
            })
            .collect();
        Ok(self.with_terms(terms))
    }

    /// Pointwise product on the same variables; the Gaussian scales add.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.num_vars != o.num_vars {
            return Err(KmError::ScaleMismatch(format!("{} vs {} variables", self.num_vars, o.num_vars)));
        }
        let scales = self.scales.iter().zip(&o.scales).map(|(x, y)| x.add(y)).collect();
        Ok(PolyGaussian { num_vars: self.num_vars, scales, terms: mul_terms(&self.terms, &o.terms) })
    }

    /// Multiplies the polynomial parts and keeps the (shared) Gaussian once.
    pub fn mul_poly_part(&self, o: &Self) -> Result<Self> {
        self.check_scales(o)?;
        Ok(self.with_terms(mul_terms(&self.terms, &o.terms)))
    }

    /// Product of one-variable factors placed on distinct variables of a `total`-variable space.
    pub fn disjoint_product(total: usize, factors: &[(usize, &Self)]) -> Result<Self> {
        let mut out = Self::gaussian(total);
        let mut used = vec![false; total];
        for &(target, f) in factors {
            if f.num_vars != 1 || target >= total || std::mem::replace(&mut used[target], true) {
                return Err(KmError::InvalidInput("factors must be one-variable and on distinct targets".into()));
            }
            out.scales[target] = f.scales[0].clone();
            let mut terms = Terms::new();
            for (m, c) in &out.terms {
                for (fm, fc) in &f.terms {
                    let mut mono = m.clone();
                    mono[2 * target] = fm[0];
                    mono[2 * target + 1] = fm[1];
                    accumulate(&mut terms, mono, c.mul(fc));
                }
            }
            out.terms = terms;
        }
        Ok(out)
    }

    /// `f(x) g(y)` on the concatenated variables `(x, y)`.
    pub fn tensor(&self, o: &Self) -> Self {
        let mut scales = self.scales.clone();
        scales.extend(o.scales.iter().cloned());
        let mut terms = Terms::new();
        for (mx, cx) in &self.terms {
            for (my, cy) in &o.terms {
                let mut mono = mx.clone();
                mono.extend_from_slice(my);
                accumulate(&mut terms, mono, cx.mul(cy));
            }
        }
        PolyGaussian { num_vars: self.num_vars + o.num_vars, scales, terms }
    }

    /// Places variable `i` at position `targets[i]` of a space with `total` variables;
    /// the remaining variables carry the standard Gaussian.
    pub fn embed(&self, targets: &[usize], total: usize) -> Result<Self> {
        if targets.len() != self.num_vars || targets.iter().any(|&t| t >= total) {
            return Err(KmError::InvalidInput("embedding targets do not match the variables".into()));
        }
        let mut seen = vec![false; total];
        for &t in targets {
            if std::mem::replace(&mut seen[t], true) {
                return Err(KmError::InvalidInput("embedding targets repeat".into()));
            }
        }
        let mut scales = vec![S::Scale::one(); total];
        for (i, &t) in targets.iter().enumerate() {
            scales[t] = self.scales[i].clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut mono = vec![0u16; 2 * total];
                for (i, &t) in targets.iter().enumerate() {
                    mono[2 * t] = m[2 * i];
                    mono[2 * t + 1] = m[2 * i + 1];
                }
                (mono, c.clone())
            })
            .collect();
        Ok(PolyGaussian { num_vars: total, scales, terms })
    }

    /// `d/dz_j` (or `d/dz̄_j`), differentiating the Gaussian factor as `exp(-pi c z z̄)`.
    pub fn derivative(&self, j: usize, conjugated: bool) -> Result<Self> {
        self.check_var(j)?;
        let pic = S::pi_pow(1).mul(&S::from_scale(&self.scales[j]));
        let (own, other) = if conjugated { (2 * j, 2 * j + 1) } else { (2 * j + 1, 2 * j) };
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            let e = m[own];
            if e > 0 {
                let mut lower = m.clone();
                lower[own] -= 1;
                accumulate(&mut terms, lower, c.mul(&S::from_int(e as i64)));
            }
            let mut raised = m.clone();
            raised[other] += 1;
            accumulate(&mut terms, raised, c.mul(&pic).neg());
        }
        Ok(self.with_terms(terms))
    }

    /// Differentiates the polynomial part only, leaving the Gaussian alone.
    pub fn polynomial_derivative(&self, j: usize, conjugated: bool) -> Result<Self> {
        self.check_var(j)?;
        let own = if conjugated { 2 * j } else { 2 * j + 1 };
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            let e = m[own];
            if e > 0 {
                let mut lower = m.clone();
                lower[own] -= 1;
                accumulate(&mut terms, lower, c.mul(&S::from_int(e as i64)));
            }
        }
        Ok(self.with_terms(terms))
    }

    /// `D_j = z_j - (1/pi) d/dz̄_j`, or `D̄_j = z̄_j - (1/pi) d/dz_j` when `conjugated`.
    ///
    /// Only defined against the standard Gaussian in variable `j`.
    pub fn apply_d(&self, j: usize, conjugated: bool) -> Result<Self> {
        self.check_var(j)?;
        self.require_unit_scale(j)?;
        // at unit scale: D(z̄^a z^b) = 2 z̄^a z^{b+1} - (a/pi) z̄^{a-1} z^b
        let (raise, lower) = if conjugated { (2 * j, 2 * j + 1) } else { (2 * j + 1, 2 * j) };
        let two = S::from_int(2);
        let inv_pi = S::pi_pow(-1);
        let mut terms = Terms::new();
        for (m, c) in &self.terms {
            let mut up = m.clone();
            up[raise] += 1;
            accumulate(&mut terms, up, c.mul(&two));
            let e = m[lower];
            if e > 0 {
                let mut down = m.clone();
                down[lower] -= 1;
                accumulate(&mut terms, down, c.mul(&inv_pi).mul(&S::from_int(e as i64)).neg());
            }
        }
        Ok(self.with_terms(terms))
    }

    fn moment_factor(c: &S::Scale, a: u16) -> Result<S> {
        if !c.re_positive() {
            return Err(KmError::NonIntegrable(format!("scale {:?} has non-positive real part", c)));
        }
        let inv = c.inv().ok_or_else(|| KmError::NonIntegrable("zero scale".into()))?;
        Ok(factorial::<S>(a).mul(&S::from_scale(&scale_pow(&inv, a as u32 + 1))).mul(&S::pi_pow(-(a as i32))))
    }

    /// Integral over C (Lebesgue measure) of a one-variable function, Gaussian included.
    pub fn moment_integral(&self) -> Result<S> {
        if self.num_vars != 1 {
            return Err(KmError::InvalidInput(format!("moment integral needs 1 variable, got {}", self.num_vars)));
        }
        let rest = self.integrate_var(0)?;
        Ok(rest.terms.get(&Vec::new()).cloned().unwrap_or_else(S::zero))
    }

    /// Integrates variable `j` out over C; the result lives on the other variables.
    pub fn integrate_var(&self, j: usize) -> Result<Self> {
        self.check_var(j)?;
        let c = &self.scales[j];
        if !c.re_positive() {
            return Err(KmError::NonIntegrable(format!("scale {:?} has non-positive real part", c)));
        }
        let mut cache: HashMap<u16, S> = HashMap::new();
        let mut terms = Terms::new();
        for (m, v) in &self.terms {
            let (a, b) = (m[2 * j], m[2 * j + 1]);
            if a != b {
                continue;
            }
            let f = match cache.get(&a) {
                Some(f) => f.clone(),
                None => {
                    let f = Self::moment_factor(c, a)?;
                    cache.insert(a, f.clone());
                    f
                }
            };
            let mut mono = m.clone();
            mono.drain(2 * j..2 * j + 2);
            accumulate(&mut terms, mono, v.mul(&f));
        }
        let mut scales = self.scales.clone();
        scales.remove(j);
        Ok(PolyGaussian { num_vars: self.num_vars - 1, scales, terms })
    }

    /// Restricts to `z_j = 0`, dropping the variable.
    pub fn restrict_zero(&self, j: usize) -> Result<Self> {
        self.check_var(j)?;
        let mut terms = Terms::new();
        for (m, v) in &self.terms {
            if m[2 * j] == 0 && m[2 * j + 1] == 0 {
                let mut mono = m.clone();
                mono.drain(2 * j..2 * j + 2);
                accumulate(&mut terms, mono, v.clone());
            }
        }
        let mut scales = self.scales.clone();
        scales.remove(j);
        Ok(PolyGaussian { num_vars: self.num_vars - 1, scales, terms })
    }

    /// Substitutes `z_j -> lambda z_j`.
    pub fn rescale(&self, j: usize, lambda: &S::Scale) -> Result<Self> {
        self.check_var(j)?;
        if lambda.is_zero() {
            return Err(KmError::ZeroScale);
        }
        let lbar = lambda.conj();
        let mut cache: HashMap<(u16, u16), S> = HashMap::new();
        let mut terms = Terms::new();
        for (m, v) in &self.terms {
            let key = (m[2 * j], m[2 * j + 1]);
            let f = cache
                .entry(key)
                .or_insert_with(|| S::from_scale(&scale_pow(&lbar, key.0 as u32).mul(&scale_pow(lambda, key.1 as u32))))
                .clone();
            accumulate(&mut terms, m.clone(), v.mul(&f));
        }
        let mut scales = self.scales.clone();
        scales[j] = scales[j].mul(&lambda.mul(&lbar));
        Ok(PolyGaussian { num_vars: self.num_vars, scales, terms })
    }

    /// Substitutes `z_{vars[i]} = sum_l u[i][l] w_{vars[l]}` for a unitary `u`.
    ///
    /// The Gaussian is invariant because `u` is unitary and the addressed
    /// variables share one scale; only the polynomial part is re-expanded.
    pub fn linear_substitution(&self, vars: &[usize], u: &[Vec<S::Scale>]) -> Result<Self> {
        let r = vars.len();
        for &v in vars {
            self.check_var(v)?;
        }
        if u.len() != r || u.iter().any(|row| row.len() != r) {
            return Err(KmError::InvalidInput("substitution matrix has the wrong shape".into()));
        }
        for l in 0..r {
            for k in 0..r {
                let mut s = S::Scale::zero();
                for row in u {
                    s = s.add(&row[l].conj().mul(&row[k]));
                }
                let target = if l == k { S::Scale::one() } else { S::Scale::zero() };
                if !s.approx_eq(&target) {
                    return Err(KmError::NotUnitary);
                }
            }
        }
        if let Some(&v0) = vars.first() {
            if vars.iter().any(|&v| self.scales[v] != self.scales[v0]) {
                return Err(KmError::ScaleMismatch("substituted variables have different scales".into()));
            }
        }
        let width = 2 * self.num_vars;
        // linear forms z_{vars[i]} and z̄_{vars[i]} in the new variables
        let form = |i: usize, conjugated: bool| -> Terms<S> {
            let mut t = Terms::new();
            for (l, &v) in vars.iter().enumerate() {
                let mut mono = vec![0u16; width];
                let (slot, c) = if conjugated { (2 * v, u[i][l].conj()) } else { (2 * v + 1, u[i][l].clone()) };
                mono[slot] = 1;
                accumulate(&mut t, mono, S::from_scale(&c));
            }
            t
        };
        let mut powers: HashMap<(usize, bool, u16), Terms<S>> = HashMap::new();
        let mut power = |i: usize, conjugated: bool, e: u16| -> Terms<S> {
            if let Some(t) = powers.get(&(i, conjugated, e)) {
                return t.clone();
            }
            let base = form(i, conjugated);
            let mut acc: Terms<S> = BTreeMap::from([(vec![0u16; width], S::one())]);
            for _ in 0..e {
                acc = mul_terms(&acc, &base);
            }
            powers.insert((i, conjugated, e), acc.clone());
            acc
        };
        let mut terms = Terms::new();
        for (m, v) in &self.terms {
            let mut rest = m.clone();
            let mut acc: Terms<S> = BTreeMap::new();
            for &var in vars {
                rest[2 * var] = 0;
                rest[2 * var + 1] = 0;
            }
            acc.insert(rest, v.clone());
            for (i, &var) in vars.iter().enumerate() {
                let (a, b) = (m[2 * var], m[2 * var + 1]);
                if a > 0 {
                    acc = mul_terms(&acc, &power(i, true, a));
                }
                if b > 0 {
                    acc = mul_terms(&acc, &power(i, false, b));
                }
            }
            for (mono, c) in acc {
                accumulate(&mut terms, mono, c);
            }
        }
        Ok(self.with_terms(terms))
    }

    /// `d^a/dw^a d^b/dw̄^b` of the one-variable Gaussian at scale `c`, as a term map in `(a, b)`.
    fn gaussian_derivatives(base: &Self, a: u16, b: u16) -> Result<Terms<S>> {
        let mut g = base.clone();
        for _ in 0..b {
            g = g.derivative(0, true)?;
        }
        for _ in 0..a {
            g = g.derivative(0, false)?;
        }
        Ok(g.terms)
    }

    /// Fourier transform in variable `j` with kernel `exp(2 pi i Re(z w̄))`.
    pub fn fourier_transform(&self, j: usize) -> Result<Self> {
        self.fourier_transform_signed(j, 1)
    }

    /// Fourier transform in variable `j` with kernel `exp(sign * 2 pi i Re(z w̄))`.
    ///
    /// Uses `F(z f) = (sign pi i)^{-1} d/dw̄ F(f)` and `F(z̄ f) = (sign pi i)^{-1} d/dw F(f)`,
    /// starting from `F(exp(-pi c |z|^2)) = c^{-1} exp(-pi |w|^2 / c)`.
    pub fn fourier_transform_signed(&self, j: usize, sign: i8) -> Result<Self> {
        self.check_var(j)?;
        if sign != 1 && sign != -1 {
            return Err(KmError::InvalidInput("fourier sign must be +1 or -1".into()));
        }
        let c = &self.scales[j];
        if S::EXACT && !c.is_one() {
            return Err(KmError::UnsupportedScale(format!(
                "exact fourier transform needs scale 1, variable {} has {:?}",
                j, c
            )));
        }
        if !c.re_positive() {
            return Err(KmError::NonIntegrable(format!("scale {:?} has non-positive real part", c)));
        }
        let cinv = c.inv().ok_or_else(|| KmError::NonIntegrable("zero scale".into()))?;
        let base = PolyGaussian::<S>::gaussian_with_scales(vec![cinv.clone()]).scale_by(&S::from_scale(&cinv));
        let mut cache: HashMap<(u16, u16), Terms<S>> = HashMap::new();
        let mut terms = Terms::new();
        for (m, v) in &self.terms {
            let (a, b) = (m[2 * j], m[2 * j + 1]);
            if let std::collections::hash_map::Entry::Vacant(slot) = cache.entry((a, b)) {
                let n = (a + b) as i64;
                let factor = S::pi_pow(-(n as i32)).mul(&S::i_pow(-n)).mul(&S::from_int(if sign < 0 && n % 2 == 1 {
                    -1
                } else {
                    1
                }));
                let g = Self::gaussian_derivatives(&base, a, b)?;
                let scaled = g.into_iter().map(|(mm, cc)| (mm, cc.mul(&factor))).collect();
                slot.insert(scaled);
            }
            for (gm, gc) in &cache[&(a, b)] {
                let mut mono = m.clone();
                mono[2 * j] = gm[0];
                mono[2 * j + 1] = gm[1];
                accumulate(&mut terms, mono, v.mul(gc));
            }
        }
        let mut scales = self.scales.clone();
        scales[j] = cinv;
        Ok(PolyGaussian { num_vars: self.num_vars, scales, terms })
    }

    /// Point evaluation in floating point.
    pub fn evaluate(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.num_vars, "point has the wrong dimension");
        let mut exponent = Complex64::new(0.0, 0.0);
        for (c, z) in self.scales.iter().zip(point) {
            exponent -= std::f64::consts::PI * c.to_complex() * z.norm_sqr();
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, v) in &self.terms {
            let mut t = v.to_complex();
            for (j, z) in point.iter().enumerate() {
                t *= z.conj().powu(m[2 * j] as u32) * z.powu(m[2 * j + 1] as u32);
            }
            sum += t;
        }
        sum * exponent.exp()
    }

    pub fn to_numeric(&self) -> NumericPG {
        let scales = self.scales.iter().map(|c| c.to_complex()).collect();
        let mut terms = Terms::new();
        for (m, v) in &self.terms {
            accumulate(&mut terms, m.clone(), v.to_complex());
        }
        PolyGaussian { num_vars: self.num_vars, scales, terms }
    }

    /// `min(b - a)` over terms of a one-variable function (`None` when zero).
    pub fn mu_gap(&self) -> Option<i32> {
        self.terms.keys().map(|m| m[1] as i32 - m[0] as i32).min()
    }

    /// `max(b - a)` over terms of a one-variable function (`None` when zero).
    pub fn mu_gap_max(&self) -> Option<i32> {
        self.terms.keys().map(|m| m[1] as i32 - m[0] as i32).max()
    }
}

impl ExactPG {
    /// Largest absolute difference from a numeric function, termwise, after conversion.
    pub fn max_deviation(&self, o: &NumericPG) -> f64 {
        let me = self.to_numeric();
        let mut worst: f64 = 0.0;
        for (m, c) in &me.terms {
            let other = o.terms.get(m).copied().unwrap_or_default();
            worst = worst.max((c - other).norm());
        }
        for (m, c) in &o.terms {
            if !me.terms.contains_key(m) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, rat_int, QI2};

    fn c(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    fn pi(k: i32, n: i64, d: i64) -> Coefficient {
        Coefficient::monomial(QI2::from_rational(rat(n, d)), k)
    }

    #[test]
    fn additive_inverse_vanishes() {
        let phi = ExactPG::gaussian(1);
        assert!(phi.add(&phi.neg()).unwrap().is_zero());
    }

    #[test]
    fn add_rejects_distinct_gaussians() {
        let phi = ExactPG::gaussian(1);
        let half = phi.rescale(0, &QI2::inv_sqrt2()).unwrap();
        assert!(matches!(phi.add(&half), Err(KmError::ScaleMismatch(_))));
    }

    #[test]
    fn mul_poly_shifts_exponents() {
        let phi = ExactPG::gaussian(1);
        let z = phi.mul_poly(&[(0, 1)], &c(1)).unwrap();
        assert_eq!(z.coefficient(&[(0, 1)]), c(1));
        let zz = z.mul_poly(&[(1, 0)], &c(1)).unwrap();
        assert_eq!(zz, ExactPG::monomial(&[(1, 1)], c(1)));
        let i_sqrt2 = Coefficient::from_field(&QI2::i() * &QI2::sqrt2());
        let carried = phi.mul_poly(&[(1, 0)], &i_sqrt2).unwrap();
        assert_eq!(carried.coefficient(&[(1, 0)]).as_field().unwrap().to_tuple()[3], rat_int(1));
    }

    #[test]
    fn derivative_examples() {
        let phi = ExactPG::gaussian(1);
        // d/dz̄ phi_0 = -pi z phi_0
        assert_eq!(phi.derivative(0, true).unwrap(), ExactPG::monomial(&[(0, 1)], pi(1, -1, 1)));
        // d/dz (z phi_0) = (1 - pi |z|^2) phi_0
        let z = ExactPG::monomial(&[(0, 1)], c(1));
        let expected = ExactPG::monomial(&[(0, 0)], c(1)).add(&ExactPG::monomial(&[(1, 1)], pi(1, -1, 1))).unwrap();
        assert_eq!(z.derivative(0, false).unwrap(), expected);
        // the scale enters the chain rule
        let half = ExactPG::gaussian_with_scales(vec![QI2::from_rational(rat(1, 2))]);
        let d = half.derivative(0, true).unwrap();
        assert_eq!(d.coefficient(&[(0, 1)]), pi(1, -1, 2));
        assert_eq!(d.scales()[0], QI2::from_rational(rat(1, 2)));
    }

    #[test]
    fn howe_creation_operator_examples() {
        let phi = ExactPG::gaussian(1);
        assert_eq!(phi.apply_d(0, false).unwrap(), ExactPG::monomial(&[(0, 1)], c(2)));
        let mut f = phi.clone();
        for _ in 0..3 {
            f = f.apply_d(0, false).unwrap();
        }
        assert_eq!(f, ExactPG::monomial(&[(0, 3)], c(8)));
        let f11 = phi.apply_d(0, true).unwrap().apply_d(0, false).unwrap();
        let expected = ExactPG::monomial(&[(1, 1)], c(4)).add(&ExactPG::monomial(&[(0, 0)], pi(-1, -2, 1))).unwrap();
        assert_eq!(f11, expected);
        // doubling
        let doubled = f11.add(&f11).unwrap();
        assert_eq!(doubled.coefficient(&[(1, 1)]), c(8));
        assert_eq!(doubled.coefficient(&[(0, 0)]), pi(-1, -4, 1));
    }

    #[test]
    fn apply_d_matches_its_definition() {
        let f = ExactPG::monomial(&[(2, 1)], c(3)).add(&ExactPG::monomial(&[(0, 2)], pi(-1, 1, 5))).unwrap();
        for conj in [false, true] {
            let direct = f.apply_d(0, conj).unwrap();
            let via = f
                .mul_var(0, conj)
                .unwrap()
                .sub(&f.derivative(0, !conj).unwrap().scale_by(&Coefficient::pi_pow(-1)))
                .unwrap();
            assert_eq!(direct, via);
        }
    }

    #[test]
    fn apply_d_rejects_other_scales() {
        let half = ExactPG::gaussian(1).rescale(0, &QI2::inv_sqrt2()).unwrap();
        assert!(matches!(half.apply_d(0, false), Err(KmError::UnsupportedScale(_))));
    }

    #[test]
    fn moment_examples() {
        assert_eq!(ExactPG::gaussian(1).moment_integral().unwrap(), c(1));
        assert!(ExactPG::monomial(&[(1, 2)], c(1)).moment_integral().unwrap().is_zero());
        assert_eq!(ExactPG::monomial(&[(2, 2)], c(1)).moment_integral().unwrap(), pi(-2, 2, 1));
        let half = ExactPG::gaussian(1).rescale(0, &QI2::inv_sqrt2()).unwrap();
        assert_eq!(half.moment_integral().unwrap(), c(2));
    }

    #[test]
    fn moment_rejects_growing_gaussians() {
        let bad = ExactPG::gaussian_with_scales(vec![QI2::from_int(-1)]);
        assert!(matches!(bad.moment_integral(), Err(KmError::NonIntegrable(_))));
    }

    #[test]
    fn rescale_examples() {
        let phi = ExactPG::gaussian(1);
        let r = phi.rescale(0, &QI2::inv_sqrt2()).unwrap();
        assert_eq!(r.scales()[0], QI2::from_rational(rat(1, 2)));
        let two_z = ExactPG::monomial(&[(0, 1)], c(2)).rescale(0, &QI2::inv_sqrt2()).unwrap();
        assert_eq!(two_z.coefficient(&[(0, 1)]), Coefficient::from_field(QI2::sqrt2()));
        assert!(matches!(phi.rescale(0, &QI2::zero()), Err(KmError::ZeroScale)));
    }

    #[test]
    fn isotropic_splitting_keeps_the_gaussian() {
        let s = QI2::inv_sqrt2();
        let u = vec![vec![s.clone(), s.clone()], vec![s.clone(), -&s]];
        let phi = ExactPG::gaussian(2);
        assert_eq!(phi.linear_substitution(&[0, 1], &u).unwrap(), phi);
        let x1 = ExactPG::monomial(&[(0, 1), (0, 0)], c(1));
        let w = x1.linear_substitution(&[0, 1], &u).unwrap();
        let expected = ExactPG::monomial(&[(0, 1), (0, 0)], Coefficient::from_field(s.clone()))
            .add(&ExactPG::monomial(&[(0, 0), (0, 1)], Coefficient::from_field(s)))
            .unwrap();
        assert_eq!(w, expected);
        let id = vec![vec![QI2::one(), QI2::zero()], vec![QI2::zero(), QI2::one()]];
        assert_eq!(x1.linear_substitution(&[0, 1], &id).unwrap(), x1);
        let bad = vec![vec![QI2::one(), QI2::one()], vec![QI2::zero(), QI2::one()]];
        assert!(matches!(x1.linear_substitution(&[0, 1], &bad), Err(KmError::NotUnitary)));
    }

    #[test]
    fn fourier_examples() {
        let phi = ExactPG::gaussian(1);
        assert_eq!(phi.fourier_transform(0).unwrap(), phi);
        let z = ExactPG::monomial(&[(0, 1)], c(1));
        let fz = z.fourier_transform(0).unwrap();
        assert_eq!(fz, ExactPG::monomial(&[(0, 1)], Coefficient::from_field(QI2::i())));
        assert_eq!(fz.fourier_transform(0).unwrap(), z.neg());
        let z2 = ExactPG::monomial(&[(0, 2)], c(1));
        assert_eq!(z2.fourier_transform(0).unwrap().fourier_transform(0).unwrap(), z2);
        let half = phi.rescale(0, &QI2::inv_sqrt2()).unwrap();
        assert!(matches!(half.fourier_transform(0), Err(KmError::UnsupportedScale(_))));
    }

    #[test]
    fn signed_fourier_transforms_are_inverse() {
        let f = ExactPG::monomial(&[(2, 1)], c(1)).add(&ExactPG::monomial(&[(0, 3)], pi(-1, 2, 3))).unwrap();
        let there = f.fourier_transform_signed(0, 1).unwrap();
        assert_eq!(there.fourier_transform_signed(0, -1).unwrap(), f);
    }

    #[test]
    fn fourier_phase_matches_quadrature() {
        // F(z phi_0)(w) at w = 0.3 + 0.1 i by a midpoint rule on a box
        let w = Complex64::new(0.3, 0.1);
        let n = 400;
        let half_width = 6.0;
        let h = 2.0 * half_width / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for ix in 0..n {
            for iy in 0..n {
                let z = Complex64::new(-half_width + (ix as f64 + 0.5) * h, -half_width + (iy as f64 + 0.5) * h);
                let phase = 2.0 * std::f64::consts::PI * (z * w.conj()).re;
                acc += z * (-std::f64::consts::PI * z.norm_sqr()).exp() * Complex64::from_polar(1.0, phase);
            }
        }
        acc *= h * h;
        let symbolic = ExactPG::monomial(&[(0, 1)], c(1)).fourier_transform(0).unwrap().evaluate(&[w]);
        assert!((acc - symbolic).norm() < 1e-9, "{} vs {}", acc, symbolic);
    }

    #[test]
    fn numeric_fourier_handles_general_scales() {
        let f = NumericPG::gaussian_with_scales(vec![Complex64::new(2.0, 0.5)]);
        let g = f.fourier_transform(0).unwrap();
        assert!((g.scales()[0] - Complex64::new(2.0, 0.5).inv()).norm() < 1e-15);
        let back = g.fourier_transform(0).unwrap();
        let w = Complex64::new(0.2, -0.7);
        assert!((back.evaluate(&[w]) - f.evaluate(&[-w])).norm() < 1e-12);
    }

    #[test]
    fn tensor_and_embed_agree() {
        let z = ExactPG::monomial(&[(0, 1)], c(3));
        let t = z.tensor(&ExactPG::gaussian(1));
        assert_eq!(t, z.embed(&[0], 2).unwrap());
        let moved = z.embed(&[1], 2).unwrap();
        assert_eq!(moved.coefficient(&[(0, 0), (0, 1)]), c(3));
    }

    #[test]
    fn integrate_var_and_restrict_zero() {
        let f = ExactPG::monomial(&[(1, 1), (0, 2)], c(1)).add(&ExactPG::monomial(&[(1, 0), (0, 0)], c(5))).unwrap();
        let g = f.integrate_var(0).unwrap();
        assert_eq!(g, ExactPG::monomial(&[(0, 2)], pi(-1, 1, 1)));
        let h = f.restrict_zero(1).unwrap();
        assert_eq!(h, ExactPG::monomial(&[(1, 0)], c(5)));
    }

    #[test]
    fn product_adds_scales() {
        let phi = ExactPG::gaussian(1);
        let p = phi.mul(&phi).unwrap();
        assert_eq!(p.scales()[0], QI2::from_int(2));
        assert_eq!(p.moment_integral().unwrap(), Coefficient::from_rational(rat(1, 2)));
    }
}
