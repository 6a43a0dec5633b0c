//! The two coefficient backends shared by every polynomial-Gaussian.
//!
//! Exact mode stores [`Coefficient`]s with scales in Q(i, sqrt 2); numeric mode
//! stores `Complex64` for both. Algorithms are written once against [`Scalar`].

use std::fmt::Debug;

use num_complex::Complex64;

use crate::field::{rat_int, Coefficient, QI2};

/// Values allowed as a Gaussian scale `c` in `exp(-pi c |z|^2)`, and as substitution factors.
pub trait ScaleValue: Clone + PartialEq + Debug {
    fn one() -> Self;
    fn zero() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_one(&self) -> bool;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn conj(&self) -> Self;
    fn re_positive(&self) -> bool;
    fn to_complex(&self) -> Complex64;
    /// Equality, up to rounding in numeric mode.
    fn approx_eq(&self, o: &Self) -> bool;
}

pub trait Scalar: Clone + PartialEq + Debug {
    type Scale: ScaleValue;
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_int(n: i64) -> Self;
    /// `pi^k`.
    fn pi_pow(k: i32) -> Self;
    fn imag_unit() -> Self;
    fn from_scale(c: &Self::Scale) -> Self;
    fn to_complex(&self) -> Complex64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;

    /// `i^k` for any integer `k`.
    fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::imag_unit(),
            2 => Self::from_int(-1),
            _ => Self::imag_unit().neg(),
        }
    }
}

impl ScaleValue for QI2 {
    fn one() -> Self {
        QI2::one()
    }
    fn zero() -> Self {
        QI2::zero()
    }
    fn from_int(n: i64) -> Self {
        QI2::from_rational(rat_int(n))
    }
    fn is_one(&self) -> bool {
        QI2::is_one(self)
    }
    fn is_zero(&self) -> bool {
        QI2::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Option<Self> {
        QI2::inv(self)
    }
    fn conj(&self) -> Self {
        QI2::conj(self)
    }
    fn re_positive(&self) -> bool {
        QI2::re_positive(self)
    }
    fn to_complex(&self) -> Complex64 {
        QI2::to_complex(self)
    }
    fn approx_eq(&self, o: &Self) -> bool {
        self == o
    }
}

impl ScaleValue for Complex64 {
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn is_one(&self) -> bool {
        *self == Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        *self == Complex64::new(0.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Option<Self> {
        if ScaleValue::is_zero(self) {
            None
        } else {
            Some(self.inv())
        }
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn re_positive(&self) -> bool {
        self.re > 0.0
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn approx_eq(&self, o: &Self) -> bool {
        (self - o).norm() <= 1e-12 * (1.0 + self.norm().max(o.norm()))
    }
}

impl Scalar for Coefficient {
    type Scale = QI2;
    const EXACT: bool = true;

    fn zero() -> Self {
        Coefficient::zero()
    }
    fn one() -> Self {
        Coefficient::one()
    }
    fn is_zero(&self) -> bool {
        Coefficient::is_zero(self)
    }
    fn from_int(n: i64) -> Self {
        Coefficient::from_int(n)
    }
    fn pi_pow(k: i32) -> Self {
        Coefficient::pi_pow(k)
    }
    fn imag_unit() -> Self {
        Coefficient::from_field(QI2::i())
    }
    fn from_scale(c: &QI2) -> Self {
        Coefficient::from_field(c.clone())
    }
    fn to_complex(&self) -> Complex64 {
        Coefficient::to_complex(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Coefficient::conj(self)
    }
}

impl Scalar for Complex64 {
    type Scale = Complex64;
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn pi_pow(k: i32) -> Self {
        Complex64::new(std::f64::consts::PI.powi(k), 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn from_scale(c: &Complex64) -> Self {
        *c
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_powers_cycle() {
        assert_eq!(Coefficient::i_pow(4), Coefficient::one());
        assert_eq!(Coefficient::i_pow(-1), Coefficient::i_pow(3));
        assert_eq!(
            Coefficient::i_pow(1).mul(&Coefficient::i_pow(1)),
            Coefficient::from_int(-1)
        );
        assert_eq!(Complex64::i_pow(-2), Complex64::new(-1.0, 0.0));
    }
}
