//! The one-variable family `F_{a,b}` and the Laguerre polynomials `g_k`.

use crate::error::Result;
use crate::field::{rat, rat_int, Coefficient, QI2};
use crate::gausspoly::ExactPG;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaguerreMode {
    Closed,
    Recursive,
}

/// `F_{a,b}` defined by `D̄^a D^b phi_0 = F_{a,b} phi_0`, returned together with `phi_0`.
pub fn f_ab(a: u16, b: u16) -> ExactPG {
    let mut f = ExactPG::gaussian(1);
    for _ in 0..b {
        f = f.apply_d(0, false).expect("unit scale");
    }
    for _ in 0..a {
        f = f.apply_d(0, true).expect("unit scale");
    }
    f
}

/// `f_k = F_{k,k}`.
pub fn f_k(k: u16) -> ExactPG {
    f_ab(k, k)
}

/// `E = D̄ D` applied through the closed formula
/// `E(f phi_0) = {(4|z|^2 - 2/pi) f - (2/pi)(z̄ f_z̄ + z f_z) + f_{z z̄} / pi^2} phi_0`.
pub fn e_operator_formula(f: &ExactPG) -> Result<ExactPG> {
    let inv_pi = Coefficient::pi_pow(-1);
    let first = f
        .mul_poly(&[(1, 1)], &Coefficient::from_int(4))?
        .sub(&f.scale_by(&inv_pi.mul_field(&QI2::from_int(2))))?;
    let euler = f
        .polynomial_derivative(0, true)?
        .mul_var(0, true)?
        .add(&f.polynomial_derivative(0, false)?.mul_var(0, false)?)?;
    let second = euler.scale_by(&inv_pi.mul_field(&QI2::from_int(-2)));
    let laplace = f.polynomial_derivative(0, false)?.polynomial_derivative(0, true)?.scale_by(&Coefficient::pi_pow(-2));
    first.add(&second)?.add(&laplace)
}

/// `|w|^{2r}` as a one-variable polynomial (standard Gaussian attached).
fn abs_pow(r: u16, c: Coefficient) -> ExactPG {
    ExactPG::monomial(&[(r, r)], c)
}

fn factorial(n: u16) -> num_bigint::BigInt {
    (1..=n as u64).map(num_bigint::BigInt::from).product()
}

/// `g_k(w) = sum_r (-1)^{r+k} (k!)^2 / ((r!)^2 (k-r)!) |w|^{2r}`.
pub fn laguerre_closed(k: u16) -> ExactPG {
    let mut g = ExactPG::zero(1);
    for r in 0..=k {
        let num = factorial(k) * factorial(k);
        let den = factorial(r) * factorial(r) * factorial(k - r);
        let mut c = num_rational::BigRational::new(num, den);
        if (r + k) % 2 == 1 {
            c = -c;
        }
        g.add_assign(&abs_pow(r, Coefficient::from_rational(c))).expect("same scales");
    }
    g
}

/// `g_{k+1} = (|w|^2 - 1) g_k - (w̄ dg/dw̄ + w dg/dw) + d^2 g / dw dw̄`, `g_0 = 1`.
pub fn laguerre_recursive(k: u16) -> ExactPG {
    let mut g = abs_pow(0, Coefficient::one());
    for _ in 0..k {
        let shifted = g.mul_poly(&[(1, 1)], &Coefficient::one()).unwrap().sub(&g).unwrap();
        let euler = g
            .polynomial_derivative(0, true)
            .unwrap()
            .mul_var(0, true)
            .unwrap()
            .add(&g.polynomial_derivative(0, false).unwrap().mul_var(0, false).unwrap())
            .unwrap();
        let laplace = g.polynomial_derivative(0, false).unwrap().polynomial_derivative(0, true).unwrap();
        g = shifted.sub(&euler).unwrap().add(&laplace).unwrap();
    }
    g
}

pub fn laguerre_g(k: u16, mode: LaguerreMode) -> ExactPG {
    match mode {
        LaguerreMode::Closed => laguerre_closed(k),
        LaguerreMode::Recursive => laguerre_recursive(k),
    }
}

/// `f_k(w / sqrt(2 pi)) pi^k / 2^k`, tracking the pi-grading exactly.
///
/// A term `c |z|^{2a}` becomes `c pi^{k-a} / 2^{k+a} |w|^{2a}`; the result is
/// a polynomial with rational coefficients exactly when the normalization holds.
pub fn normalize_f_k(f: &ExactPG, k: u16) -> ExactPG {
    let mut out = ExactPG::zero(1);
    for (m, c) in f.terms() {
        let (a, b) = (m[0], m[1]);
        let factor = QI2::from_rational(rat(1, 1) / num_traits::pow(rat_int(2), (k + a) as usize));
        let term = c.mul_field(&factor).shift_pi(k as i32 - a as i32);
        out.add_assign(&ExactPG::monomial(&[(a, b)], term)).expect("same scales");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ci(n: i64) -> Coefficient {
        Coefficient::from_int(n)
    }

    #[test]
    fn first_family_members() {
        assert_eq!(f_ab(0, 3), ExactPG::monomial(&[(0, 3)], ci(8)));
        let f11 = ExactPG::monomial(&[(1, 1)], ci(4))
            .add(&ExactPG::monomial(&[(0, 0)], Coefficient::monomial(QI2::from_int(-2), -1)))
            .unwrap();
        assert_eq!(f_ab(1, 1), f11);
    }

    #[test]
    fn laguerre_small_cases() {
        assert_eq!(laguerre_closed(0), abs_pow(0, ci(1)));
        let g1 = abs_pow(1, ci(1)).sub(&abs_pow(0, ci(1))).unwrap();
        assert_eq!(laguerre_recursive(1), g1);
        let g2 = abs_pow(2, ci(1)).add(&abs_pow(1, ci(-4))).unwrap().add(&abs_pow(0, ci(2))).unwrap();
        assert_eq!(laguerre_recursive(2), g2);
        assert_eq!(laguerre_closed(2), g2);
    }

    #[test]
    fn e_formula_agrees_with_operators() {
        let mut f = ExactPG::gaussian(1);
        for _ in 0..4 {
            let via_ops = f.apply_d(0, false).unwrap().apply_d(0, true).unwrap();
            assert_eq!(e_operator_formula(&f).unwrap(), via_ops);
            f = via_ops;
        }
        let odd = ExactPG::monomial(&[(2, 5)], ci(3));
        assert_eq!(e_operator_formula(&odd).unwrap(), odd.apply_d(0, false).unwrap().apply_d(0, true).unwrap());
    }

    #[test]
    fn normalization_turns_f_k_into_g_k() {
        for k in 0..=6 {
            assert_eq!(normalize_f_k(&f_k(k), k), laguerre_closed(k), "k = {}", k);
        }
    }
}
