//! Isotropic splitting, the Ikeda map as an exact partial Gaussian integral,
//! and certificates for the vanishing of `Ik(φ_KM)`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::budget::TermBudget;
use crate::error::{KmError, Result};
use crate::field::{rat, rat_int, Coefficient, QI2};
use crate::gausspoly::ExactPG;
use crate::howe_km::{f_ab, f_k, km_schwartz, km_term, pair_count, term_multiplicities, FabCache, SignRule};
use crate::perm::perm_tuples;

/// Hyperbolic pairing `u_j <-> u_{m+1-j}` for `j <= r0` inside one block of `m` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitFrame {
    pub m: usize,
    pub r0: usize,
}

impl SplitFrame {
    pub fn new(m: usize, r0: usize) -> Result<Self> {
        if 2 * r0 > m {
            return Err(KmError::InvalidInput(format!("2 r0 = {} exceeds m = {}", 2 * r0, m)));
        }
        Ok(SplitFrame { m, r0 })
    }

    /// 0-based `(e-slot, f-slot)` pairs within a block.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.r0).map(move |j| (j, self.m - 1 - j))
    }

    /// 0-based coordinates of `V'_0` within a block.
    pub fn anisotropic(&self) -> std::ops::Range<usize> {
        self.r0..self.m - self.r0
    }

    /// `(1/sqrt 2) [[1, 1], [1, -1]]`: `z_j = (w_e + w_f)/sqrt 2`, `z_{m+1-j} = (w_e - w_f)/sqrt 2`.
    pub fn split_matrix() -> Vec<Vec<QI2>> {
        let s = QI2::inv_sqrt2();
        vec![vec![s.clone(), s.clone()], vec![s.clone(), -&s]]
    }
}

/// Rewrites block `copy` in the `(e_j, f_j)` coordinates of the frame.
pub fn split_coordinates(f: &ExactPG, frame: &SplitFrame, copy: usize) -> Result<ExactPG> {
    let base = copy * frame.m;
    if base + frame.m > f.num_vars() {
        return Err(KmError::InvalidInput(format!("block {} does not fit in {} variables", copy, f.num_vars())));
    }
    let u = SplitFrame::split_matrix();
    let mut g = f.clone();
    for (e, fs) in frame.pairs() {
        g = g.linear_substitution(&[base + e, base + fs], &u)?;
    }
    Ok(g)
}

/// Applies the partial Fourier transform in the listed variables (dual variables in place).
pub fn partial_fourier(f: &ExactPG, u_block: &[usize]) -> Result<ExactPG> {
    let mut g = f.clone();
    for &v in u_block {
        g = g.fourier_transform(v)?;
    }
    Ok(g)
}

fn e_and_f_slots(frame: &SplitFrame, copies: usize) -> (Vec<usize>, Vec<usize>) {
    let mut es = Vec::new();
    let mut fs = Vec::new();
    for c in 0..copies {
        for (e, f) in frame.pairs() {
            es.push(c * frame.m + e);
            fs.push(c * frame.m + f);
        }
    }
    (es, fs)
}

/// Removes `drop` variables with `op`, highest index first, so lower indices stay valid.
fn remove_vars(f: &ExactPG, drop: &[usize], op: impl Fn(&ExactPG, usize) -> Result<ExactPG>) -> Result<ExactPG> {
    let mut sorted = drop.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut g = f.clone();
    for v in sorted {
        g = op(&g, v)?;
    }
    Ok(g)
}

fn check_blocks(f: &ExactPG, frame: &SplitFrame, copies: usize) -> Result<()> {
    if f.num_vars() != frame.m * copies {
        return Err(KmError::InvalidInput(format!(
            "expected {} blocks of {} variables, got {} variables",
            copies,
            frame.m,
            f.num_vars()
        )));
    }
    Ok(())
}

/// `Ik(f)(x) = ∫ f(y, x, 0) dy`: split each block, set the `f_j` coordinates to
/// zero, then integrate the `e_j` coordinates. The result lives on `V'_0` in
/// every block.
pub fn ikeda_map(f: &ExactPG, frame: &SplitFrame, copies: usize) -> Result<ExactPG> {
    check_blocks(f, frame, copies)?;
    let mut g = f.clone();
    for c in 0..copies {
        g = split_coordinates(&g, frame, c)?;
    }
    let (es, fs) = e_and_f_slots(frame, copies);
    let g = remove_vars(&g, &fs, |h, v| h.restrict_zero(v))?;
    // e-slots shift down by the number of removed f-slots below them
    let shifted: Vec<usize> = es.iter().map(|&e| e - fs.iter().filter(|&&x| x < e).count()).collect();
    remove_vars(&g, &shifted, |h, v| h.integrate_var(v))
}

/// `φ̂(v_0, 0)`: partial Fourier transform in the `e` coordinates, then restriction of
/// both the dual `e` and the `f` coordinates to zero.
pub fn mixed_model_origin(f: &ExactPG, frame: &SplitFrame, copies: usize) -> Result<ExactPG> {
    check_blocks(f, frame, copies)?;
    let mut g = f.clone();
    for c in 0..copies {
        g = split_coordinates(&g, frame, c)?;
    }
    let (es, fs) = e_and_f_slots(frame, copies);
    let hat = partial_fourier(&g, &es)?;
    let mut all = es;
    all.extend(fs);
    remove_vars(&hat, &all, |h, v| h.restrict_zero(v))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankSupportReport {
    pub slice_is_zero: bool,
    pub slice_terms: usize,
}

/// Checks whether `φ̂(v_0, w)` vanishes on the slice `w = 0` (only for one hyperbolic plane).
pub fn rank_support_report(f: &ExactPG, frame: &SplitFrame, copies: usize) -> Result<RankSupportReport> {
    if frame.r0 != 1 {
        return Err(KmError::DomainError(format!("rank support proxy needs r0 = 1, got {}", frame.r0)));
    }
    let slice = mixed_model_origin(f, frame, copies)?;
    Ok(RankSupportReport { slice_is_zero: slice.is_zero(), slice_terms: slice.term_count() })
}

/// `∫ F(z/sqrt 2) e^{-pi |z|^2} dz` for a one-variable `F phi_0` at unit scale.
fn isotropic_line_integral(f: &ExactPG) -> Result<Coefficient> {
    let half = QI2::from_rational(rat(1, 2));
    let g = f.rescale(0, &QI2::inv_sqrt2())?;
    let weight = ExactPG::gaussian_with_scales(vec![half]);
    g.mul(&weight)?.moment_integral()
}

/// The same integral after the substitution `z -> lambda z` (vanishing is preserved).
pub fn isotropic_line_integral_substituted(f: &ExactPG, lambda: &QI2) -> Result<Coefficient> {
    let half = QI2::from_rational(rat(1, 2));
    let g = f.rescale(0, &QI2::inv_sqrt2())?.mul(&ExactPG::gaussian_with_scales(vec![half]))?;
    g.rescale(0, lambda)?.moment_integral()
}

/// `I(F) = ∫ F(z) e^{-2 pi |z|^2} dz`.
pub fn weighted_integral(f: &ExactPG) -> Result<Coefficient> {
    f.mul(&ExactPG::gaussian(1))?.moment_integral()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FkReport {
    pub k: u16,
    pub value: String,
    pub is_zero: bool,
    /// Contribution of `|z|^{2r}` to the integral, for `r = 0..=k`.
    pub contributions: Vec<String>,
    /// Each contribution equals `2^k (-1)^k k!/pi^k * (-1)^r C(k, r)`.
    pub binomial_shape: bool,
    /// `sum_r (-1)^r C(k, r)`.
    pub binomial_sum: i64,
    /// `I(f_k)` with the weight `e^{-2 pi |z|^2}`.
    pub weighted_value: String,
}

fn binomial(n: u64, k: u64) -> num_bigint::BigInt {
    let mut acc = num_bigint::BigInt::from(1);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `∫ f_k(z/sqrt 2) e^{-pi |z|^2} dz`, with its termwise binomial cancellation.
pub fn verify_fk_vanishing(k: u16) -> Result<FkReport> {
    let f = f_k(k);
    let value = isotropic_line_integral(&f)?;
    let half = QI2::from_rational(rat(1, 2));
    let integrand = f.rescale(0, &QI2::inv_sqrt2())?.mul(&ExactPG::gaussian_with_scales(vec![half]))?;
    let mut contributions = Vec::new();
    let mut binomial_shape = true;
    let k_fact: num_bigint::BigInt = (1..=k as u64).map(num_bigint::BigInt::from).product();
    for r in 0..=k {
        let single = ExactPG::monomial(&[(r, r)], integrand.coefficient(&[(r, r)]));
        let contribution = single.moment_integral()?;
        let mut expected = num_rational::BigRational::from_integer(
            num_traits::pow(num_bigint::BigInt::from(2), k as usize) * &k_fact * binomial(k as u64, r as u64),
        );
        if (k + r) % 2 == 1 {
            expected = -expected;
        }
        let expected = Coefficient::monomial(QI2::from_rational(expected), -(k as i32));
        binomial_shape &= contribution == expected;
        contributions.push(contribution.to_string());
    }
    let binomial_sum: i64 =
        (0..=k as u64).map(|r| if r % 2 == 0 { 1 } else { -1 } * i64::try_from(binomial(k as u64, r)).unwrap_or(0)).sum();
    let weighted = weighted_integral(&f)?;
    Ok(FkReport {
        k,
        is_zero: value.is_zero(),
        value: value.to_string(),
        contributions,
        binomial_shape,
        binomial_sum,
        weighted_value: weighted.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FabReport {
    pub a: u16,
    pub b: u16,
    pub value: String,
    pub is_zero: bool,
    pub weighted_is_zero: bool,
    /// `min` and `max` of (z-exponent − z̄-exponent) over the terms of `F_{a,b}`.
    pub gap_min: i32,
    pub gap_max: i32,
}

impl FabReport {
    /// Every monomial of `F_{a,b}` has exponent gap exactly `b - a`.
    pub fn gap_witness(&self) -> bool {
        let d = self.b as i32 - self.a as i32;
        self.gap_min == d && self.gap_max == d
    }
}

pub fn verify_fab_vanishing(a: u16, b: u16) -> Result<FabReport> {
    if a == b {
        return Err(KmError::InvalidInput(format!("F_{{a,b}} vanishing needs a != b, got a = b = {}", a)));
    }
    let f = f_ab(a, b);
    let value = isotropic_line_integral(&f)?;
    let weighted = weighted_integral(&f)?;
    Ok(FabReport {
        a,
        b,
        is_zero: value.is_zero(),
        value: value.to_string(),
        weighted_is_zero: weighted.is_zero(),
        gap_min: f.mu_gap().unwrap_or(0),
        gap_max: f.mu_gap_max().unwrap_or(0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VanishingCase {
    /// `a != b`: the line integral vanishes by the angular argument.
    Case1,
    /// `a = b >= 1`: the line integral of `f_a(z/sqrt 2)` vanishes.
    Case2,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermCertificate {
    pub sigma: Vec<Vec<usize>>,
    pub sigma_prime: Vec<Vec<usize>>,
    pub sign: i32,
    /// 1-based block and isotropic line carrying the vanishing factor.
    pub block: usize,
    pub line: usize,
    pub a: u16,
    pub b: u16,
    pub case: VanishingCase,
    pub line_integral_zero: bool,
    pub term_image_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IkedaReport {
    pub case: (usize, usize),
    pub result: &'static str,
    pub term_count: usize,
    pub case1_count: usize,
    pub case2_count: usize,
    pub unclassified: usize,
    pub certificates: Vec<TermCertificate>,
}

impl IkedaReport {
    pub fn passed(&self) -> bool {
        self.result == "zero"
            && self.unclassified == 0
            && self.certificates.iter().all(|c| c.line_integral_zero && c.term_image_zero)
    }
}

/// Computes `Ik(φ_KM)` for `m = p + q`, `r0 = q`, `p` blocks and certifies every `(σ, σ')` term.
pub fn verify_ikeda_kills(p: usize, q: usize, rule: SignRule, budget: &TermBudget) -> Result<IkedaReport> {
    if p < 2 || q < 1 {
        return Err(KmError::InvalidInput(format!("need p >= 2 and q >= 1, got ({}, {})", p, q)));
    }
    budget.require(pair_count(p, q))?;
    let frame = SplitFrame::new(p + q, q)?;
    let phi = km_schwartz(p, q, rule, budget)?;
    let image = ikeda_map(&phi, &frame, p)?;

    let tuples = perm_tuples(p, q);
    let mut cache = FabCache::default();
    let mut line_cache: BTreeMap<(u16, u16), bool> = BTreeMap::new();
    let mut certificates = Vec::new();
    let mut unclassified = 0;
    for sigma in &tuples {
        for sigma_prime in &tuples {
            let mult = term_multiplicities(p, q, sigma, sigma_prime);
            let witness = (0..p)
                .flat_map(|j| (0..q).map(move |i| (j, i)))
                .find(|&(j, i)| mult.counts[j][i] != (0, 0));
            let Some((j, i)) = witness else {
                unclassified += 1;
                continue;
            };
            let (a, b) = mult.counts[j][i];
            let case = if a != b { VanishingCase::Case1 } else { VanishingCase::Case2 };
            let line_zero = match line_cache.get(&(a, b)) {
                Some(&z) => z,
                None => {
                    let z = isotropic_line_integral(&cache.get(a, b))?.is_zero();
                    line_cache.insert((a, b), z);
                    z
                }
            };
            let term = km_term(p, q, sigma, sigma_prime, &mut cache)?;
            budget.charge(term.term_count() as u128)?;
            let term_zero = ikeda_map(&term, &frame, p)?.is_zero();
            certificates.push(TermCertificate {
                sigma: sigma.iter().map(|s| s.images().iter().map(|x| x + 1).collect()).collect(),
                sigma_prime: sigma_prime.iter().map(|s| s.images().iter().map(|x| x + 1).collect()).collect(),
                sign: crate::howe_km::term_sign(rule, p, q, sigma, sigma_prime),
                block: j + 1,
                line: i + 1,
                a,
                b,
                case,
                line_integral_zero: line_zero,
                term_image_zero: term_zero,
            });
        }
    }
    let case1_count = certificates.iter().filter(|c| c.case == VanishingCase::Case1).count();
    Ok(IkedaReport {
        case: (p, q),
        result: if image.is_zero() { "zero" } else { "nonzero" },
        term_count: certificates.len() + unclassified,
        case1_count,
        case2_count: certificates.len() - case1_count,
        unclassified,
        certificates,
    })
}

/// Exact `n x n` inverse over Q(i, sqrt 2) by Gauss–Jordan elimination.
pub fn invert(m: &[Vec<QI2>]) -> Option<Vec<Vec<QI2>>> {
    let n = m.len();
    let mut a: Vec<Vec<QI2>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { QI2::one() } else { QI2::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].inv()?;
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&factor * p);
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_mul(x: &[Vec<QI2>], y: &[Vec<QI2>]) -> Vec<Vec<QI2>> {
    let n = x.len();
    let k = y.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..k)
                .map(|j| y.iter().enumerate().fold(QI2::zero(), |acc, (l, row)| &acc + &(&x[i][l] * &row[j])))
                .collect()
        })
        .collect()
}

/// A random unitary matrix over Q(i): the Cayley transform `(I - A)(I + A)^{-1}`
/// of a random skew-hermitian `A` with small Gaussian-rational entries.
pub fn random_unitary_qi<R: Rng>(n: usize, rng: &mut R) -> Vec<Vec<QI2>> {
    let mut a = vec![vec![QI2::zero(); n]; n];
    for i in 0..n {
        a[i][i] = QI2::gaussian(rat_int(0), rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)));
        for j in i + 1..n {
            let x = QI2::gaussian(rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)), rat(rng.gen_range(-3..=3), 2));
            a[j][i] = -&x.conj();
            a[i][j] = x;
        }
    }
    let id: Vec<Vec<QI2>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { QI2::one() } else { QI2::zero() }).collect()).collect();
    let minus: Vec<Vec<QI2>> = (0..n).map(|i| (0..n).map(|j| &id[i][j] - &a[i][j]).collect()).collect();
    let plus: Vec<Vec<QI2>> = (0..n).map(|i| (0..n).map(|j| &id[i][j] + &a[i][j]).collect()).collect();
    mat_mul(&minus, &invert(&plus).expect("I + A is invertible for skew-hermitian A"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn split_frame_keeps_gaussian() {
        let frame = SplitFrame::new(2, 1).unwrap();
        let phi = ExactPG::gaussian(2);
        assert_eq!(split_coordinates(&phi, &frame, 0).unwrap(), phi);
        let trivial = SplitFrame::new(3, 0).unwrap();
        let f = ExactPG::monomial(&[(1, 0), (0, 2), (0, 0)], Coefficient::from_int(2));
        assert_eq!(split_coordinates(&f, &trivial, 0).unwrap(), f);
        assert!(SplitFrame::new(3, 2).is_err());
    }

    #[test]
    fn split_f_k_matches_display() {
        // f_k(x_1) Φ_0 becomes f_k((w_1 + w_2)/sqrt 2) Φ_0
        let frame = SplitFrame::new(2, 1).unwrap();
        let fk = f_k(2).embed(&[0], 2).unwrap();
        let split = split_coordinates(&fk, &frame, 0).unwrap();
        let s = QI2::inv_sqrt2();
        let direct = fk.linear_substitution(&[0, 1], &[vec![s.clone(), s.clone()], vec![s.clone(), -&s]]).unwrap();
        assert_eq!(split, direct);
        let w = [num_complex::Complex64::new(0.3, -0.2), num_complex::Complex64::new(-0.1, 0.4)];
        let x1 = (w[0] + w[1]) / std::f64::consts::SQRT_2;
        let x2 = (w[0] - w[1]) / std::f64::consts::SQRT_2;
        assert!((split.evaluate(&w) - fk.evaluate(&[x1, x2])).norm() < 1e-12);
    }

    #[test]
    fn ikeda_examples() {
        let frame = SplitFrame::new(3, 1).unwrap();
        assert_eq!(ikeda_map(&ExactPG::gaussian(3), &frame, 1).unwrap(), ExactPG::gaussian(1));
        let ze = ExactPG::monomial(&[(0, 1), (0, 0), (0, 0)], Coefficient::from_int(1));
        assert!(ikeda_map(&ze, &frame, 1).unwrap().is_zero());
        let p = ExactPG::monomial(&[(0, 0), (2, 1), (0, 0)], Coefficient::from_int(7));
        assert_eq!(ikeda_map(&p, &frame, 1).unwrap(), ExactPG::monomial(&[(2, 1)], Coefficient::from_int(7)));
    }

    #[test]
    fn fk_examples() {
        for k in 1..=4 {
            let r = verify_fk_vanishing(k).unwrap();
            assert!(r.is_zero && r.binomial_shape && r.binomial_sum == 0, "{:?}", r);
        }
        let zero = verify_fk_vanishing(0).unwrap();
        assert!(!zero.is_zero);
        assert_eq!(zero.value, Coefficient::one().to_string());
    }

    #[test]
    fn fab_examples() {
        assert!(verify_fab_vanishing(0, 1).unwrap().is_zero);
        let r = verify_fab_vanishing(2, 5).unwrap();
        assert!(r.is_zero && r.gap_witness() && r.gap_min == 3);
        assert!(matches!(verify_fab_vanishing(1, 1), Err(KmError::InvalidInput(_))));
    }

    #[test]
    fn ikeda_kills_two_one() {
        let r = verify_ikeda_kills(2, 1, SignRule::Canonical, &TermBudget::unlimited()).unwrap();
        assert!(r.passed());
        assert_eq!(r.term_count, 4);
    }

    #[test]
    fn mixed_model_origin_is_the_ikeda_map() {
        let frame = SplitFrame::new(3, 1).unwrap();
        let f = ExactPG::monomial(&[(1, 1), (0, 1), (2, 0)], Coefficient::from_int(3))
            .add(&ExactPG::monomial(&[(0, 0), (1, 0), (0, 0)], Coefficient::from_int(-1)))
            .unwrap();
        assert_eq!(mixed_model_origin(&f, &frame, 1).unwrap(), ikeda_map(&f, &frame, 1).unwrap());
    }

    #[test]
    fn rank_support_examples() {
        let frame = SplitFrame::new(3, 1).unwrap();
        assert!(!rank_support_report(&ExactPG::gaussian(3), &frame, 1).unwrap().slice_is_zero);
        assert!(rank_support_report(&ExactPG::zero(3), &frame, 1).unwrap().slice_is_zero);
        let phi = km_schwartz(2, 1, SignRule::Canonical, &TermBudget::unlimited()).unwrap();
        assert!(rank_support_report(&phi, &frame, 2).unwrap().slice_is_zero);
        let wide = SplitFrame::new(4, 2).unwrap();
        assert!(matches!(rank_support_report(&ExactPG::gaussian(4), &wide, 1), Err(KmError::DomainError(_))));
    }

    #[test]
    fn cayley_matrices_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            let u = random_unitary_qi(n, &mut rng);
            let f = ExactPG::gaussian(n);
            let vars: Vec<usize> = (0..n).collect();
            assert!(f.linear_substitution(&vars, &u).is_ok());
        }
    }
}
