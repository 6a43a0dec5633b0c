//! The archimedean Weil representation of `U(1,1)^n` on polynomial-Gaussians,
//! Siegel–Weil section values, and assembly of the Fourier coefficients of the
//! generating series.
//!
//! A function on `n` archimedean factors is a polynomial-Gaussian in `n·m`
//! variables, factor `j` occupying the block `j·m .. (j+1)·m`; each variable
//! carries the sign of the hermitian form on its coordinate.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{KmError, Result};
use crate::field::{parse_rational, rat_to_f64, Rational, QI2};
use crate::gausspoly::{ExactPG, NumericPG, PolyGaussian};
use crate::numlat::{trace_identity_check, HermitianLattice, NumberFieldBasis, TraceReport, Vector, XiBasis};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    Identity,
    /// `n(b)`, one real parameter per factor.
    Unipotent(Vec<f64>),
    /// `m(a)`, one nonzero complex scalar per factor.
    Levi(Vec<Complex64>),
    Weyl,
    /// `g_τ = n(u) m(sqrt v)` for `τ = u + iv`.
    GTau(Vec<Complex64>),
}

/// Signature data: `signs[k] = ±1` for variable `k`, grouped into `factors` equal blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilSetting {
    signs: Vec<i8>,
    factors: usize,
}

impl WeilSetting {
    pub fn new(signs: Vec<i8>, factors: usize) -> Result<Self> {
        if factors == 0 || signs.is_empty() || !signs.len().is_multiple_of(factors) {
            return Err(KmError::InvalidInput(format!("{} variables do not split into {} factors", signs.len(), factors)));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(KmError::InvalidInput("signs must be +1 or -1".into()));
        }
        Ok(WeilSetting { signs, factors })
    }

    /// Signature `(p, q)` on every one of `factors` blocks.
    pub fn signature(p: usize, q: usize, factors: usize) -> Self {
        let block: Vec<i8> = std::iter::repeat_n(1, p).chain(std::iter::repeat_n(-1, q)).collect();
        WeilSetting::new(block.repeat(factors), factors).expect("valid signature")
    }

    pub fn definite(m: usize, factors: usize) -> Self {
        WeilSetting::signature(m, 0, factors)
    }

    /// `m`, the dimension of each block.
    pub fn m_dim(&self) -> usize {
        self.signs.len() / self.factors
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn num_vars(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    fn factor_of(&self, var: usize) -> usize {
        var / self.m_dim()
    }

    /// `b_j = Q(ξ, ξ)` on each factor.
    pub fn form_values(&self, xi: &[Complex64]) -> Vec<f64> {
        let mut b = vec![0.0; self.factors];
        for (k, z) in xi.iter().enumerate() {
            b[self.factor_of(k)] += self.signs[k] as f64 * z.norm_sqr();
        }
        b
    }

    fn check(&self, num_vars: usize) -> Result<()> {
        if num_vars != self.num_vars() {
            return Err(KmError::InvalidInput(format!("function has {} variables, setting has {}", num_vars, self.num_vars())));
        }
        Ok(())
    }

    fn check_params(&self, len: usize) -> Result<()> {
        if len != self.factors {
            return Err(KmError::InvalidInput(format!("{} parameters for {} factors", len, self.factors)));
        }
        Ok(())
    }
}

/// `e_*(bτ) = exp(2πi Σ_j b_j τ_j)`.
pub fn e_star(b: &[f64], tau: &[Complex64]) -> Complex64 {
    let s: Complex64 = b.iter().zip(tau).map(|(bj, tj)| tj * *bj).sum();
    (Complex64::new(0.0, 2.0 * PI) * s).exp()
}

fn check_upper_half(tau: &[Complex64]) -> Result<()> {
    match tau.iter().find(|t| t.im.is_nan() || t.im <= 0.0 || !t.re.is_finite()) {
        Some(t) => Err(KmError::DomainError(format!("{} is not in the upper half-plane", t))),
        None => Ok(()),
    }
}

/// `ω(w0)`: the Fourier transform in every variable with the sign of the form.
pub fn weyl<S: Scalar>(f: &PolyGaussian<S>, setting: &WeilSetting) -> Result<PolyGaussian<S>> {
    setting.check(f.num_vars())?;
    let mut out = f.clone();
    for (k, &s) in setting.signs.iter().enumerate() {
        out = out.fourier_transform_signed(k, s)?;
    }
    Ok(out)
}

fn levi(f: &NumericPG, a: &[Complex64], setting: &WeilSetting) -> Result<NumericPG> {
    setting.check_params(a.len())?;
    let m = setting.m_dim() as f64;
    let mut out = f.clone();
    let mut factor = Complex64::new(1.0, 0.0);
    for (j, aj) in a.iter().enumerate() {
        if aj.norm() == 0.0 {
            return Err(KmError::ZeroScale);
        }
        // |a|_E^{m/2} with the normalized absolute value |a|_E = |a|^2
        factor *= aj.norm().powf(m);
        for k in j * setting.m_dim()..(j + 1) * setting.m_dim() {
            out = out.rescale(k, aj)?;
        }
    }
    Ok(out.scale_by(&factor))
}

fn unipotent(f: &NumericPG, b: &[f64], setting: &WeilSetting) -> Result<NumericPG> {
    setting.check_params(b.len())?;
    // ψ(Q(x,x) b) = exp(-π (-2i b s) |x|^2)
    let scales: Vec<Complex64> = (0..setting.num_vars())
        .map(|k| Complex64::new(0.0, -2.0 * b[setting.factor_of(k)] * setting.signs[k] as f64))
        .collect();
    f.mul(&NumericPG::gaussian_with_scales(scales))
}

/// `ω(g) f` in floating point.
pub fn act(g: &GroupElement, f: &NumericPG, setting: &WeilSetting) -> Result<NumericPG> {
    setting.check(f.num_vars())?;
    let out = match g {
        GroupElement::Identity => f.clone(),
        GroupElement::Unipotent(b) => unipotent(f, b, setting)?,
        GroupElement::Levi(a) => levi(f, a, setting)?,
        GroupElement::Weyl => weyl(f, setting)?,
        GroupElement::GTau(tau) => {
            check_upper_half(tau)?;
            setting.check_params(tau.len())?;
            let a: Vec<Complex64> = tau.iter().map(|t| Complex64::new(t.im.sqrt(), 0.0)).collect();
            let u: Vec<f64> = tau.iter().map(|t| t.re).collect();
            unipotent(&levi(f, &a, setting)?, &u, setting)?
        }
    };
    if out.scales().iter().any(|c| c.re.is_nan() || c.re <= 0.0) {
        return Err(KmError::NonIntegrable("resulting Gaussian scale has non-positive real part".into()));
    }
    Ok(out)
}

/// `ω(g) f` exactly, for the identity, `w0`, and `m(a)` with `a ∈ Q(i, sqrt 2)` and even `m`.
pub fn act_exact(g: &GroupElement, a_exact: Option<&[QI2]>, f: &ExactPG, setting: &WeilSetting) -> Result<ExactPG> {
    setting.check(f.num_vars())?;
    match g {
        GroupElement::Identity => Ok(f.clone()),
        GroupElement::Weyl => weyl(f, setting),
        GroupElement::Levi(_) => {
            let a = a_exact.ok_or_else(|| KmError::UnsupportedScale("exact Levi action needs exact parameters".into()))?;
            setting.check_params(a.len())?;
            let m = setting.m_dim();
            if m % 2 == 1 {
                return Err(KmError::UnsupportedScale("|a|^m is irrational in general for odd m".into()));
            }
            let mut out = f.clone();
            let mut factor = QI2::one();
            for (j, aj) in a.iter().enumerate() {
                factor = &factor * &QI2::new(aj.abs2(), crate::field::QSqrt2::zero()).pow(m as u32 / 2);
                for k in j * m..(j + 1) * m {
                    out = out.rescale(k, aj)?;
                }
            }
            Ok(out.scale_by(&crate::field::Coefficient::from_field(factor)))
        }
        _ => Err(KmError::UnsupportedScale("phases of n(b) and g_τ are transcendental; use numeric mode".into())),
    }
}

/// `∏ v_j^{m/2} f(ξ sqrt v) e_*(b u)` with `b_j = Q(ξ, ξ)` on factor `j`.
pub fn g_tau_evaluate(tau: &[Complex64], f: &NumericPG, xi: &[Complex64], setting: &WeilSetting) -> Result<Complex64> {
    check_upper_half(tau)?;
    setting.check(f.num_vars())?;
    setting.check_params(tau.len())?;
    let m = setting.m_dim();
    let scaled: Vec<Complex64> = xi.iter().enumerate().map(|(k, z)| z * tau[k / m].im.sqrt()).collect();
    let prefactor: f64 = tau.iter().map(|t| t.im.powf(m as f64 / 2.0)).product();
    let b = setting.form_values(xi);
    let u: Vec<Complex64> = tau.iter().map(|t| Complex64::new(t.re, 0.0)).collect();
    Ok(f.evaluate(&scaled) * prefactor * e_star(&b, &u))
}

/// `κ = i^{-n} e_*(b·iv)`, the value of `i^{-n} exp(-π tr_{E/F} Q(ξa, ξa))` at `a = sqrt v`.
pub fn kappa(b: &[f64], v: &[f64]) -> Complex64 {
    let n = b.len() as i64;
    let iv: Vec<Complex64> = v.iter().map(|x| Complex64::new(0.0, *x)).collect();
    i_pow_complex(-n) * e_star(b, &iv)
}

fn i_pow_complex(k: i64) -> Complex64 {
    <Complex64 as Scalar>::i_pow(k)
}

/// `|det a(g)|_E^{s - s0} (ω(g) f)(0)` with `s0 = (m - n)/2`.
pub fn siegel_weil_section(f: &NumericPG, s: Complex64, g: &GroupElement, setting: &WeilSetting, n_dim: usize) -> Result<Complex64> {
    let s0 = (setting.m_dim() as f64 - n_dim as f64) / 2.0;
    let det_abs: f64 = match g {
        GroupElement::Identity | GroupElement::Unipotent(_) => 1.0,
        GroupElement::Levi(a) => a.iter().map(|x| x.norm_sqr()).product(),
        GroupElement::GTau(tau) => {
            check_upper_half(tau)?;
            tau.iter().map(|t| t.im).product()
        }
        GroupElement::Weyl => return Err(KmError::DecompositionUnsupported),
    };
    let value = act(g, f, setting)?.evaluate(&vec![Complex64::new(0.0, 0.0); setting.num_vars()]);
    Ok(Complex64::new(det_abs, 0.0).powc(s - s0) * value)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeEntry {
    pub b: Vec<Rational>,
    pub i: usize,
    pub orbit: Option<usize>,
    pub vol: Rational,
    pub mult: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct VolumeEntryJson {
    b: Vec<serde_json::Value>,
    i: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orbit: Option<usize>,
    vol: serde_json::Value,
    mult: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VolumeTable {
    pub entries: Vec<VolumeEntry>,
}

fn value_to_rational(v: &serde_json::Value) -> Result<Rational> {
    let text = match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => n.to_string(),
        other => return Err(KmError::Parse(format!("expected a number, got {}", other))),
    };
    parse_rational(&text).ok_or_else(|| KmError::Parse(format!("bad number {:?}", text)))
}

impl VolumeTable {
    pub fn new(entries: Vec<VolumeEntry>) -> Result<Self> {
        for e in &entries {
            if e.vol.is_negative() {
                return Err(KmError::InvalidInput(format!("negative volume {}", e.vol)));
            }
            if e.mult == 0 {
                return Err(KmError::InvalidInput("multiplicity must be at least 1".into()));
            }
        }
        Ok(VolumeTable { entries })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: Vec<VolumeEntryJson> = serde_json::from_str(text).map_err(|e| KmError::Parse(e.to_string()))?;
        let mut entries = Vec::with_capacity(raw.len());
        for r in raw {
            entries.push(VolumeEntry {
                b: r.b.iter().map(value_to_rational).collect::<Result<_>>()?,
                i: r.i,
                orbit: r.orbit,
                vol: value_to_rational(&r.vol)?,
                mult: r.mult,
            });
        }
        VolumeTable::new(entries)
    }

    pub fn to_json_string(&self) -> String {
        let raw: Vec<VolumeEntryJson> = self
            .entries
            .iter()
            .map(|e| VolumeEntryJson {
                b: e.b.iter().map(|c| serde_json::Value::String(c.to_string())).collect(),
                i: e.i,
                orbit: e.orbit,
                vol: serde_json::Value::String(e.vol.to_string()),
                mult: e.mult,
            })
            .collect();
        serde_json::to_string(&raw).expect("plain data")
    }

    /// `Σ vol · mult` over entries with the given `b`, exactly.
    pub fn weight(&self, b: &[Rational]) -> Rational {
        self.entries
            .iter()
            .filter(|e| e.b == b)
            .map(|e| &e.vol * Rational::from_integer(e.mult.into()))
            .fold(Rational::zero(), |a, x| a + x)
    }

    /// Distinct `b` values in sorted order.
    pub fn b_values(&self) -> Vec<Vec<Rational>> {
        let mut out: Vec<Vec<Rational>> = self.entries.iter().map(|e| e.b.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let entries = self.entries.iter().map(|e| VolumeEntry { vol: &e.vol * c, ..e.clone() }).collect();
        VolumeTable { entries }
    }
}

/// How `b` (given in coordinates) is sent to `(λ_1(b), .., λ_n(b))`.
#[derive(Clone, Copy, Debug)]
pub enum Embedding<'a> {
    /// The coordinates already are the embedding values.
    Direct,
    Field(&'a NumberFieldBasis),
}

impl Embedding<'_> {
    pub fn lambdas(&self, b: &[Rational]) -> Vec<f64> {
        match self {
            Embedding::Direct => b.iter().map(rat_to_f64).collect(),
            Embedding::Field(f) => f.embed(b),
        }
    }
}

/// `i^{ip} ∏_j v_j^{half/2}`, kept symbolic so that products cancel exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prefactor {
    pub i_power: i64,
    pub half_v_power: i64,
}

impl Prefactor {
    /// `i^{-n} ∏ v^{m/2}`, in front of each Fourier coefficient.
    pub fn coefficient(n: usize, m: usize) -> Self {
        Prefactor { i_power: -(n as i64), half_v_power: m as i64 }
    }

    /// `i^n ∏ v^{-m/2}`, relating the generating series to the theta integral.
    pub fn series(n: usize, m: usize) -> Self {
        Prefactor { i_power: n as i64, half_v_power: -(m as i64) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Prefactor { i_power: self.i_power + o.i_power, half_v_power: self.half_v_power + o.half_v_power }
    }

    pub fn is_identity(&self) -> bool {
        self.i_power.rem_euclid(4) == 0 && self.half_v_power == 0
    }

    pub fn evaluate(&self, v: &[f64]) -> Complex64 {
        let vp: f64 = v.iter().map(|x| x.powf(self.half_v_power as f64 / 2.0)).product();
        i_pow_complex(self.i_power) * vp
    }
}

/// `i^{-n} ∏ v_j^{m/2} (Σ vol·mult) e_*(bτ)`.
pub fn assemble_fourier_coefficient(b: &[Rational], table: &VolumeTable, tau: &[Complex64], m: usize, emb: Embedding<'_>) -> Result<Complex64> {
    check_upper_half(tau)?;
    let lam = emb.lambdas(b);
    if lam.len() != tau.len() {
        return Err(KmError::InvalidInput(format!("b has {} embeddings but τ has {} components", lam.len(), tau.len())));
    }
    let v: Vec<f64> = tau.iter().map(|t| t.im).collect();
    let pre = Prefactor::coefficient(tau.len(), m).evaluate(&v);
    Ok(pre * rat_to_f64(&table.weight(b)) * e_star(&lam, tau))
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesTerm {
    pub b: Vec<String>,
    pub weight: String,
    pub value: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesValue {
    pub value: [f64; 2],
    pub prefactor_cancels: bool,
    /// The same sum evaluated without cancelling the prefactors symbolically.
    pub unsimplified: [f64; 2],
    pub terms: Vec<SeriesTerm>,
}

/// `c0 + Σ_b i^n ∏ v^{-m/2} I_b = c0 + Σ_b (Σ vol) e_*(bτ)`.
pub fn generating_series(table: &VolumeTable, tau: &[Complex64], m: usize, c0: Complex64, emb: Embedding<'_>) -> Result<SeriesValue> {
    check_upper_half(tau)?;
    let n = tau.len();
    let v: Vec<f64> = tau.iter().map(|t| t.im).collect();
    let series = Prefactor::series(n, m);
    let cancelled = series.mul(&Prefactor::coefficient(n, m));
    let mut value = c0;
    let mut unsimplified = c0;
    let mut terms = Vec::new();
    for b in table.b_values() {
        let lam = emb.lambdas(&b);
        if lam.len() != n {
            return Err(KmError::InvalidInput(format!("b has {} embeddings but τ has {} components", lam.len(), n)));
        }
        let weight = table.weight(&b);
        let coeff = assemble_fourier_coefficient(&b, table, tau, m, emb)?;
        unsimplified += series.evaluate(&v) * coeff;
        let term = if cancelled.is_identity() {
            e_star(&lam, tau) * rat_to_f64(&weight)
        } else {
            cancelled.evaluate(&v) * rat_to_f64(&weight) * e_star(&lam, tau)
        };
        value += term;
        terms.push(SeriesTerm {
            b: b.iter().map(|c| c.to_string()).collect(),
            weight: weight.to_string(),
            value: [term.re, term.im],
        });
    }
    Ok(SeriesValue {
        value: [value.re, value.im],
        prefactor_cancels: cancelled.is_identity(),
        unsimplified: [unsimplified.re, unsimplified.im],
        terms,
    })
}

/// CSV rows `b_1, .., b_g, abs, arg` of the Fourier coefficients at `τ`.
pub fn q_expansion_csv(table: &VolumeTable, tau: &[Complex64], m: usize, emb: Embedding<'_>) -> Result<String> {
    let bs = table.b_values();
    let width = bs.first().map_or(0, |b| b.len());
    let mut out = String::new();
    let header: Vec<String> = (0..width).map(|k| format!("b{}", k)).chain(["abs".to_string(), "arg".to_string()]).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    let mut rows = BTreeMap::new();
    for b in bs {
        let c = assemble_fourier_coefficient(&b, table, tau, m, emb)?;
        rows.insert(b, c);
    }
    for (b, c) in rows {
        let cells: Vec<String> = b.iter().map(|x| x.to_string()).chain([format!("{:.17e}", c.norm()), format!("{:.17e}", c.arg())]).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Compares `tr_{E/E0}(Q(ξ,ξ) b)` with `Tr(Q0(x,x) B)` on random lattice vectors.
pub fn intertwining_check(b: &[Rational], f: &NumberFieldBasis, l: &HermitianLattice, samples: usize, seed: u64) -> TraceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = f.degree();
    let mut report = TraceReport { samples, matches: 0, first_failure: None };
    for _ in 0..samples {
        let x: Vec<Vector> = (0..g).map(|_| (0..l.rank()).map(|_| crate::numlat::random_e0(&mut rng, 3)).collect()).collect();
        let r = trace_identity_check(f, l, b, &x, &x, XiBasis::Dual);
        if r.holds {
            report.matches += 1;
        } else if report.first_failure.is_none() {
            report.first_failure = Some(r);
        }
    }
    report
}
