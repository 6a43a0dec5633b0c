use std::collections::BTreeSet;

use kmlab_core::budget::TermBudget;
use kmlab_core::field::{rat, rat_int, Coefficient, QI2};
use kmlab_core::gausspoly::{ExactPG, NumericPG};
use kmlab_core::howe_km::{f_ab, f_k, km_schwartz, sort_sign, sort_sign_closed_form, SignRule};
use kmlab_core::ikeda::{ikeda_map, isotropic_line_integral_substituted, random_unitary_qi, SplitFrame};
use kmlab_core::numlat::{
    trace_identity_check, E0, FiniteActionModel, HermitianLattice, ImagQuad, NumberFieldBasis, XiBasis,
};
use kmlab_core::perm::Perm;
use kmlab_core::weil::{act, assemble_fourier_coefficient, Embedding, GroupElement, VolumeEntry, VolumeTable, WeilSetting};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn coefficient() -> impl Strategy<Value = Coefficient> {
    (-6i64..=6, -6i64..=6, -1i32..=1).prop_map(|(a, b, k)| Coefficient::monomial(QI2::gaussian(rat_int(a), rat_int(b)), k))
}

fn poly(vars: usize, max_deg: u16, terms: usize) -> impl Strategy<Value = ExactPG> {
    prop::collection::vec((prop::collection::vec((0..=max_deg, 0..=max_deg), vars), coefficient()), 1..=terms).prop_map(
        move |ts| {
            let mut f = ExactPG::zero(vars);
            for (mono, c) in ts {
                f.add_assign(&ExactPG::monomial(&mono, c)).unwrap();
            }
            f
        },
    )
}

fn point(vars: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.2f64..1.2, -1.2f64..1.2).prop_map(|(x, y)| Complex64::new(x, y)), vars)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn addition_is_commutative_and_associative(f in poly(2, 3, 4), g in poly(2, 3, 4), h in poly(2, 3, 4)) {
        prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
        prop_assert_eq!(f.add(&g).unwrap().add(&h).unwrap(), f.add(&g.add(&h).unwrap()).unwrap());
        prop_assert!(f.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn mul_poly_distributes(f in poly(2, 3, 4), g in poly(2, 3, 4), c in coefficient()) {
        let lhs = f.add(&g).unwrap().mul_poly(&[(1, 0), (0, 2)], &c).unwrap();
        let rhs = f.mul_poly(&[(1, 0), (0, 2)], &c).unwrap().add(&g.mul_poly(&[(1, 0), (0, 2)], &c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn mixed_derivatives_commute(f in poly(2, 4, 5), j in 0usize..2) {
        let a = f.derivative(j, false).unwrap().derivative(j, true).unwrap();
        let b = f.derivative(j, true).unwrap().derivative(j, false).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn off_diagonal_moments_vanish(a in 0u16..6, d in 1u16..4, c in coefficient(), re in 1i64..4, im in -3i64..=3) {
        let scale = QI2::gaussian(rat(re, 2), rat(im, 2));
        let f = ExactPG::from_terms(vec![scale.clone()], [(vec![a, a + d], c.clone()), (vec![a + d, a], c)]).unwrap();
        prop_assert!(f.moment_integral().unwrap().is_zero());
    }

    #[test]
    fn fourier_squared_is_parity(f in poly(1, 4, 4)) {
        let ff = f.fourier_transform(0).unwrap().fourier_transform(0).unwrap();
        let parity = f.rescale(0, &QI2::from_int(-1)).unwrap();
        prop_assert_eq!(ff, parity);
    }

    #[test]
    fn rescale_round_trip(f in poly(2, 3, 4), a in 1i64..5, b in -3i64..=3, j in 0usize..2) {
        let lambda = QI2::gaussian(rat(a, 2), rat(b, 3));
        let back = f.rescale(j, &lambda).unwrap().rescale(j, &lambda.inv().unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn derivative_matches_central_differences(f in poly(2, 3, 3), p in point(2), j in 0usize..2, conj in any::<bool>()) {
        let numeric = f.to_numeric();
        let d = f.derivative(j, conj).unwrap().to_numeric().evaluate(&p);
        let h = 1e-5;
        let shift = |dz: Complex64| {
            let mut q = p.clone();
            q[j] += dz;
            numeric.evaluate(&q)
        };
        let dx = (shift(Complex64::new(h, 0.0)) - shift(Complex64::new(-h, 0.0))) / (2.0 * h);
        let dy = (shift(Complex64::new(0.0, h)) - shift(Complex64::new(0.0, -h))) / (2.0 * h);
        // d/dz = (d/dx - i d/dy)/2, d/dz̄ = (d/dx + i d/dy)/2
        let i = Complex64::new(0.0, 1.0);
        let fd = if conj { (dx + i * dy) / 2.0 } else { (dx - i * dy) / 2.0 };
        prop_assert!(close(d, fd, 1e-6), "{} vs {}", d, fd);
    }

    #[test]
    fn f_ab_has_constant_gap(a in 0u16..6, b in 0u16..6) {
        let f = f_ab(a, b);
        let d = b as i32 - a as i32;
        prop_assert_eq!(f.mu_gap(), Some(d));
        prop_assert_eq!(f.mu_gap_max(), Some(d));
    }

    #[test]
    fn line_integral_vanishing_is_scale_robust(k in 1u16..7, which in 0usize..3) {
        let lambda = [QI2::inv_sqrt2(), QI2::one(), QI2::sqrt2()][which].clone();
        prop_assert!(isotropic_line_integral_substituted(&f_k(k), &lambda).unwrap().is_zero());
    }

    #[test]
    fn closed_form_sort_sign(seed in any::<u64>(), p in 1usize..5, q in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: Vec<Perm> = (0..q).map(|_| Perm::random(p, &mut rng)).collect();
        let sp: Vec<Perm> = (0..q).map(|_| Perm::random(p, &mut rng)).collect();
        prop_assert_eq!(sort_sign(&s, &sp), sort_sign_closed_form(&s, &sp));
    }

    #[test]
    fn ikeda_map_is_frame_invariant(f in poly(4, 2, 4), seed in any::<u64>()) {
        // V'_0 has dimension 2 inside m = 4 with one hyperbolic plane
        let frame = SplitFrame::new(4, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary_qi(2, &mut rng);
        let moved = f.linear_substitution(&[1, 2], &u).unwrap();
        let lhs = ikeda_map(&moved, &frame, 1).unwrap();
        let rhs = ikeda_map(&f, &frame, 1).unwrap().linear_substitution(&[0, 1], &u).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn trace_dual_is_dual(d in prop::sample::select(vec![2i64, 3, 5, 6, 7])) {
        let f = NumberFieldBasis::real_quadratic(d).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let t = f.trace(&f.mul(&f.basis_element(i), &f.dual_element(j)));
                prop_assert_eq!(t, rat_int((i == j) as i64));
            }
        }
    }

    #[test]
    fn trace_identity_random(b0 in -5i64..=5, b1 in -5i64..=5, xs in prop::collection::vec((-4i64..=4, -4i64..=4), 4), eisenstein in any::<bool>()) {
        let f = NumberFieldBasis::golden();
        let k = if eisenstein { ImagQuad::eisenstein() } else { ImagQuad::gaussian() };
        let l = HermitianLattice::standard(k, 1);
        let e = |(u, v): (i64, i64)| vec![E0::new(rat_int(u), rat_int(v))];
        let x = vec![e(xs[0]), e(xs[1])];
        let y = vec![e(xs[2]), e(xs[3])];
        prop_assert!(trace_identity_check(&f, &l, &[rat_int(b0), rat_int(b1)], &x, &y, XiBasis::Dual).holds);
    }

    #[test]
    fn gram_enumeration_closed_under_units(n1 in 0i64..6, n2 in 0i64..6, u1 in 0usize..4, u2 in 0usize..4) {
        let k = ImagQuad::gaussian();
        let l = HermitianLattice::new(k, vec![vec![E0::from_int(1), E0::zero()], vec![E0::zero(), E0::from_int(2)]]).unwrap();
        let units = k.units();
        let found = l.enumerate_gram(&[vec![E0::from_int(n1 + 2 * n2)]], &rat_int(20)).unwrap();
        let set: BTreeSet<Vec<E0>> = found.iter().map(|t| t[0].clone()).collect();
        for x in &set {
            let moved = vec![k.mul(&units[u1], &x[0]), k.mul(&units[u2], &x[1])];
            prop_assert!(set.contains(&moved));
        }
    }

    #[test]
    fn fiber_models(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = FiniteActionModel::random(&mut rng);
        prop_assert!(m.decompose().passed());
    }

    #[test]
    fn unipotent_group_law(b1 in -2.0f64..2.0, b2 in -2.0f64..2.0, p in point(2)) {
        let s = WeilSetting::signature(1, 1, 1);
        let f = NumericPG::gaussian(2).add(&NumericPG::monomial(&[(0, 1), (1, 0)], Complex64::new(0.5, 0.5))).unwrap();
        let two = act(&GroupElement::Unipotent(vec![b1]), &act(&GroupElement::Unipotent(vec![b2]), &f, &s).unwrap(), &s).unwrap();
        let one = act(&GroupElement::Unipotent(vec![b1 + b2]), &f, &s).unwrap();
        prop_assert!(close(two.evaluate(&p), one.evaluate(&p), 1e-10));
    }

    #[test]
    fn assembly_is_linear(vols in prop::collection::vec((0i64..10, 1u64..4), 1..5), c in 0i64..5, u in -1.0f64..1.0, v in 0.2f64..2.0) {
        let entries: Vec<VolumeEntry> = vols.iter().map(|&(vol, mult)| VolumeEntry { b: vec![rat_int(1)], i: 0, orbit: None, vol: rat_int(vol), mult }).collect();
        let t = VolumeTable::new(entries).unwrap();
        let tau = [Complex64::new(u, v)];
        let base = assemble_fourier_coefficient(&[rat_int(1)], &t, &tau, 3, Embedding::Direct).unwrap();
        let scaled = assemble_fourier_coefficient(&[rat_int(1)], &t.scaled(&rat_int(c)), &tau, 3, Embedding::Direct).unwrap();
        prop_assert!(close(scaled, base * c as f64, 1e-12));
    }
}

/// `φ(k x_1, .., k x_p)` for block-diagonal unitary `k = diag(k_p, k_q)` over Q(i).
fn k_translate(phi: &ExactPG, p: usize, q: usize, seed: u64) -> ExactPG {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kp = random_unitary_qi(p, &mut rng);
    let kq = random_unitary_qi(q, &mut rng);
    let m = p + q;
    let mut k = vec![vec![QI2::zero(); m]; m];
    for i in 0..p {
        for j in 0..p {
            k[i][j] = kp[i][j].clone();
        }
    }
    for i in 0..q {
        for j in 0..q {
            k[p + i][p + j] = kq[i][j].clone();
        }
    }
    let mut out = phi.clone();
    for block in 0..p {
        let vars: Vec<usize> = (block * m..(block + 1) * m).collect();
        out = out.linear_substitution(&vars, &k).unwrap();
    }
    out
}

#[test]
fn km_schwartz_is_k_invariant() {
    let budget = TermBudget::unlimited();
    for (p, q) in [(2, 1), (1, 2)] {
        let phi = km_schwartz(p, q, SignRule::Canonical, &budget).unwrap();
        for seed in 0..3 {
            assert_eq!(k_translate(&phi, p, q, seed), phi, "(p, q) = ({}, {}), seed {}", p, q, seed);
        }
    }
}

#[test]
fn uniform_sign_breaks_k_invariance() {
    let phi = km_schwartz(2, 1, SignRule::Uniform, &TermBudget::unlimited()).unwrap();
    let moved = (0..3).map(|seed| k_translate(&phi, 2, 1, seed));
    assert!(moved.into_iter().any(|g| g != phi));
}
