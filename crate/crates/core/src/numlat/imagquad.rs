//! Imaginary quadratic fields `E0 = Q(ω)` with `ω² = tω - n`, and elements `u + vω`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{KmError, Result};
use crate::field::{rat_int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImagQuad {
    disc: i64,
    t: i64,
    n: i64,
}

impl ImagQuad {
    /// Field of discriminant `disc < 0` with its standard generator:
    /// `ω = sqrt(disc/4)` if `disc ≡ 0 (4)`, `ω = (1 + sqrt disc)/2` if `disc ≡ 1 (4)`.
    pub fn new(disc: i64) -> Result<Self> {
        if disc >= 0 {
            return Err(KmError::InvalidInput(format!("discriminant {} is not negative", disc)));
        }
        match disc.rem_euclid(4) {
            0 => Ok(ImagQuad { disc, t: 0, n: -disc / 4 }),
            1 => Ok(ImagQuad { disc, t: 1, n: (1 - disc) / 4 }),
            _ => Err(KmError::InvalidInput(format!("{} is not a discriminant", disc))),
        }
    }

    pub fn gaussian() -> Self {
        ImagQuad::new(-4).expect("Q(i)")
    }

    pub fn eisenstein() -> Self {
        ImagQuad::new(-3).expect("Q(sqrt -3)")
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// `(t, n)` with `ω² = tω - n`.
    pub fn omega_relation(&self) -> (i64, i64) {
        (self.t, self.n)
    }

    pub fn mul(&self, x: &E0, y: &E0) -> E0 {
        let vv = &x.v * &y.v;
        E0 {
            u: &x.u * &y.u - &vv * rat_int(self.n),
            v: &x.u * &y.v + &y.u * &x.v + &vv * rat_int(self.t),
        }
    }

    pub fn conj(&self, x: &E0) -> E0 {
        E0 { u: &x.u + &x.v * rat_int(self.t), v: -x.v.clone() }
    }

    /// `N(u + vω) = u² + t u v + n v²`.
    pub fn norm(&self, x: &E0) -> Rational {
        &x.u * &x.u + &x.u * &x.v * rat_int(self.t) + &x.v * &x.v * rat_int(self.n)
    }

    pub fn trace(&self, x: &E0) -> Rational {
        &x.u * rat_int(2) + &x.v * rat_int(self.t)
    }

    pub fn inv(&self, x: &E0) -> Option<E0> {
        let n = self.norm(x);
        if n.is_zero() {
            return None;
        }
        let c = self.conj(x);
        Some(E0 { u: c.u / &n, v: c.v / n })
    }

    /// Unit group of the ring of integers.
    pub fn units(&self) -> Vec<E0> {
        let mut out = vec![E0::from_int(1), E0::from_int(-1)];
        match self.disc {
            -4 => {
                out.push(E0::new(rat_int(0), rat_int(1)));
                out.push(E0::new(rat_int(0), rat_int(-1)));
            }
            -3 => {
                // ±ω, ±ω² = ±(ω - 1)
                for s in [1, -1] {
                    out.push(E0::new(rat_int(0), rat_int(s)));
                    out.push(E0::new(rat_int(-s), rat_int(s)));
                }
            }
            _ => {}
        }
        out
    }

    /// Numeric value of `ω`.
    pub fn omega_complex(&self) -> num_complex::Complex64 {
        let im = ((4 * self.n - self.t * self.t) as f64).sqrt() / 2.0;
        num_complex::Complex64::new(self.t as f64 / 2.0, im)
    }
}

/// `u + vω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct E0 {
    pub u: Rational,
    pub v: Rational,
}

impl E0 {
    pub fn new(u: Rational, v: Rational) -> Self {
        E0 { u, v }
    }

    pub fn zero() -> Self {
        E0 { u: Rational::zero(), v: Rational::zero() }
    }

    pub fn one() -> Self {
        E0 { u: Rational::one(), v: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        E0 { u: rat_int(n), v: Rational::zero() }
    }

    pub fn from_rational(q: Rational) -> Self {
        E0 { u: q, v: Rational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.u.is_integer() && self.v.is_integer()
    }

    pub fn add(&self, o: &E0) -> E0 {
        E0 { u: &self.u + &o.u, v: &self.v + &o.v }
    }

    pub fn sub(&self, o: &E0) -> E0 {
        E0 { u: &self.u - &o.u, v: &self.v - &o.v }
    }

    pub fn neg(&self) -> E0 {
        E0 { u: -self.u.clone(), v: -self.v.clone() }
    }

    pub fn scale(&self, q: &Rational) -> E0 {
        E0 { u: &self.u * q, v: &self.v * q }
    }
}

impl fmt::Display for E0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            write!(f, "{}", self.u)
        } else if self.u.is_zero() {
            write!(f, "{}w", self.v)
        } else if self.v.is_negative() {
            write!(f, "{}-{}w", self.u, -self.v.clone())
        } else {
            write!(f, "{}+{}w", self.u, self.v)
        }
    }
}
