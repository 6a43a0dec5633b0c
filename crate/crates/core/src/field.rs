//! Exact scalars: the field Q(i, sqrt 2) and Laurent polynomials in pi over it.
//!
//! Every constant that shows up in the polynomial-Gaussian calculus is a finite
//! sum `sum_k c_k * pi^k` with `c_k` in Q(i, sqrt 2). Keeping pi as a separate
//! grading keeps all arithmetic exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Shorthand for the rational `n / d`.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // huge numerators/denominators: shift both down before dividing
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// Parses `"3"`, `"-3/4"` or a finite decimal such as `"0.125"` exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{}{}", int_part, frac_part);
    let mut value = BigRational::from_integer(joined.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if neg { -value } else { value })
}

/// `a + b * sqrt(2)` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QSqrt2 {
    pub a: Rational,
    pub b: Rational,
}

impl QSqrt2 {
    pub fn new(a: Rational, b: Rational) -> Self {
        QSqrt2 { a, b }
    }

    pub fn zero() -> Self {
        QSqrt2::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        QSqrt2::new(Rational::one(), Rational::zero())
    }

    pub fn from_rational(a: Rational) -> Self {
        QSqrt2::new(a, Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Galois conjugate `a - b sqrt 2`.
    pub fn galois(&self) -> Self {
        QSqrt2::new(self.a.clone(), -self.b.clone())
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a - rat_int(2) * &self.b * &self.b
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QSqrt2::new(&self.a / &n, -(&self.b / &n)))
    }

    /// Exact sign of the real number `a + b sqrt 2`.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a^2 with 2 b^2
        if self.norm().is_positive() {
            sa
        } else {
            sb
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * std::f64::consts::SQRT_2
    }
}

fn sign_of(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.a + &o.a, &self.b + &o.b)
    }
}

impl Sub for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.a - &o.a, &self.b - &o.b)
    }
}

impl Mul for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(
            &self.a * &o.a + rat_int(2) * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.a.clone(), -self.b.clone())
    }
}

/// An element `re + i * im` of Q(i, sqrt 2), with `re`, `im` in Q(sqrt 2).
///
/// The canonical 4-tuple form is the coordinate vector with respect to the
/// basis `{1, i, sqrt 2, i sqrt 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QI2 {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl QI2 {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        QI2 { re, im }
    }

    pub fn zero() -> Self {
        QI2::new(QSqrt2::zero(), QSqrt2::zero())
    }

    pub fn one() -> Self {
        QI2::from_rational(Rational::one())
    }

    pub fn i() -> Self {
        QI2::new(QSqrt2::zero(), QSqrt2::one())
    }

    pub fn sqrt2() -> Self {
        QI2::new(QSqrt2::new(Rational::zero(), Rational::one()), QSqrt2::zero())
    }

    /// `1 / sqrt 2 = sqrt 2 / 2`.
    pub fn inv_sqrt2() -> Self {
        QI2::new(QSqrt2::new(Rational::zero(), rat(1, 2)), QSqrt2::zero())
    }

    pub fn from_rational(r: Rational) -> Self {
        QI2::new(QSqrt2::from_rational(r), QSqrt2::zero())
    }

    pub fn from_int(n: i64) -> Self {
        QI2::from_rational(rat_int(n))
    }

    /// Gaussian rational `a + b i`.
    pub fn gaussian(a: Rational, b: Rational) -> Self {
        QI2::new(QSqrt2::from_rational(a), QSqrt2::from_rational(b))
    }

    /// Builds the element from its coordinates in the basis `{1, i, sqrt 2, i sqrt 2}`.
    pub fn from_tuple(t: [Rational; 4]) -> Self {
        let [c1, ci, cs, cis] = t;
        QI2::new(QSqrt2::new(c1, cs), QSqrt2::new(ci, cis))
    }

    pub fn to_tuple(&self) -> [Rational; 4] {
        [
            self.re.a.clone(),
            self.im.a.clone(),
            self.re.b.clone(),
            self.im.b.clone(),
        ]
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.b.is_zero() && self.re.a.is_one()
    }

    /// Complex conjugation (fixes sqrt 2).
    pub fn conj(&self) -> Self {
        QI2::new(self.re.clone(), -&self.im)
    }

    /// `|x|^2`, a real element of Q(sqrt 2).
    pub fn abs2(&self) -> QSqrt2 {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.abs2().inv()?;
        let c = self.conj();
        Some(QI2::new(&c.re * &n, &c.im * &n))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = QI2::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn re_positive(&self) -> bool {
        self.re.signum() > 0
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &QI2 {
    type Output = QI2;
    fn add(self, o: &QI2) -> QI2 {
        QI2::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &QI2 {
    type Output = QI2;
    fn sub(self, o: &QI2) -> QI2 {
        QI2::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &QI2 {
    type Output = QI2;
    fn mul(self, o: &QI2) -> QI2 {
        QI2::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }
}

impl Neg for &QI2 {
    type Output = QI2;
    fn neg(self) -> QI2 {
        QI2::new(-&self.re, -&self.im)
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t { $tr::$m(&self, &o) }
        }
    )*};
}

forward_owned!(QSqrt2, Add add, Sub sub, Mul mul);
forward_owned!(QI2, Add add, Sub sub, Mul mul);

impl Neg for QI2 {
    type Output = QI2;
    fn neg(self) -> QI2 {
        -&self
    }
}

impl fmt::Display for QI2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .to_tuple()
            .iter()
            .zip(["", "i", "√2", "i√2"])
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, b)| if b.is_empty() { c.to_string() } else { format!("{}·{}", c, b) })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A finite sum `sum_k c_k pi^k` with `c_k` in Q(i, sqrt 2); zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coefficient {
    grades: BTreeMap<i32, QI2>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient { grades: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Coefficient::from_field(QI2::one())
    }

    pub fn from_field(c: QI2) -> Self {
        Coefficient::monomial(c, 0)
    }

    pub fn from_rational(r: Rational) -> Self {
        Coefficient::from_field(QI2::from_rational(r))
    }

    pub fn from_int(n: i64) -> Self {
        Coefficient::from_rational(rat_int(n))
    }

    /// `c * pi^k`.
    pub fn monomial(c: QI2, k: i32) -> Self {
        let mut grades = BTreeMap::new();
        if !c.is_zero() {
            grades.insert(k, c);
        }
        Coefficient { grades }
    }

    pub fn pi_pow(k: i32) -> Self {
        Coefficient::monomial(QI2::one(), k)
    }

    pub fn is_zero(&self) -> bool {
        self.grades.is_empty()
    }

    /// Iterates `(pi exponent, field element)` pairs in increasing exponent order.
    pub fn grades(&self) -> impl Iterator<Item = (i32, &QI2)> {
        self.grades.iter().map(|(k, c)| (*k, c))
    }

    /// The field element at pi-exponent `k` (zero when absent).
    pub fn grade(&self, k: i32) -> QI2 {
        self.grades.get(&k).cloned().unwrap_or_else(QI2::zero)
    }

    /// `Some(c)` when the value is a pure field element (only the pi^0 grade).
    pub fn as_field(&self) -> Option<QI2> {
        match self.grades.len() {
            0 => Some(QI2::zero()),
            1 => self.grades.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn from_grades(entries: impl IntoIterator<Item = (i32, QI2)>) -> Self {
        let mut out = Coefficient::zero();
        for (k, c) in entries {
            out.add_grade(k, &c);
        }
        out
    }

    fn add_grade(&mut self, k: i32, c: &QI2) {
        if c.is_zero() {
            return;
        }
        let updated = match self.grades.get(&k) {
            Some(prev) => prev + c,
            None => c.clone(),
        };
        if updated.is_zero() {
            self.grades.remove(&k);
        } else {
            self.grades.insert(k, updated);
        }
    }

    pub fn mul_field(&self, c: &QI2) -> Self {
        if c.is_zero() {
            return Coefficient::zero();
        }
        Coefficient {
            grades: self.grades.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn shift_pi(&self, by: i32) -> Self {
        Coefficient {
            grades: self.grades.iter().map(|(k, v)| (k + by, v.clone())).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Coefficient {
            grades: self.grades.iter().map(|(k, v)| (*k, v.conj())).collect(),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.grades
            .iter()
            .map(|(k, v)| v.to_complex() * std::f64::consts::PI.powi(*k))
            .sum()
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        for (k, c) in &o.grades {
            out.add_grade(*k, c);
        }
        out
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        self + &(-o)
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        for (k1, c1) in &self.grades {
            for (k2, c2) in &o.grades {
                out.add_grade(k1 + k2, &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            grades: self.grades.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
}

forward_owned!(Coefficient, Add add, Sub sub, Mul mul);

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.grades.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .grades
            .iter()
            .map(|(k, c)| match k {
                0 => format!("({})", c),
                1 => format!("({})·π", c),
                _ => format!("({})·π^{}", c, k),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_relations_hold() {
        assert_eq!(&QI2::i() * &QI2::i(), QI2::from_int(-1));
        assert_eq!(&QI2::sqrt2() * &QI2::sqrt2(), QI2::from_int(2));
        assert_eq!(&QI2::sqrt2() * &QI2::inv_sqrt2(), QI2::one());
    }

    #[test]
    fn inverse_round_trips() {
        let x = QI2::from_tuple([rat(1, 3), rat(-2, 5), rat(7, 2), rat(1, 1)]);
        assert_eq!(&x * &x.inv().unwrap(), QI2::one());
        assert!(QI2::zero().inv().is_none());
    }

    #[test]
    fn exact_sign_of_quadratic_irrational() {
        // 3 - 2 sqrt 2 > 0, 1 - sqrt 2 < 0
        assert_eq!(QSqrt2::new(rat_int(3), rat_int(-2)).signum(), 1);
        assert_eq!(QSqrt2::new(rat_int(1), rat_int(-1)).signum(), -1);
        assert_eq!(QSqrt2::new(rat_int(-3), rat_int(2)).signum(), -1);
        assert_eq!(QSqrt2::zero().signum(), 0);
    }

    #[test]
    fn coefficient_grading_cancels() {
        let a = Coefficient::monomial(QI2::from_int(2), -1);
        let b = Coefficient::monomial(QI2::from_int(-2), -1);
        assert!((&a + &b).is_zero());
        let p = &Coefficient::pi_pow(2) * &Coefficient::pi_pow(-2);
        assert_eq!(p, Coefficient::one());
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_rational("0.125"), Some(rat(1, 8)));
        assert_eq!(parse_rational("-3/4"), Some(rat(-3, 4)));
        assert_eq!(parse_rational("2e-1"), Some(rat(1, 5)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }
}
