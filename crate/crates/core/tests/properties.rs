use num_complex::Complex64;
use proptest::prelude::*;

use lowmach_core::acoustic::{apply_group, AcousticPair, PsiNormalization};
use lowmach_core::entropy::functionals::{psi_exact, psi_series};
use lowmach_core::entropy::{convergence_metrics, relative_entropy};
use lowmach_core::resonance::{
    is_resonant, orthogonality_report, OscillationProfile, ResonantForms,
};
use lowmach_core::solvers::{euler_state, euler_step, madelung, nls_step, QhdParams, WaveFunction};
use lowmach_core::spectral::calculus::{
    dealias, differentiate, l2_norm, l2_norm_vector, leray_decompose, project_p, project_q,
    DiffKind, Field,
};
use lowmach_core::spectral::random::{random_scalar, random_solenoidal, random_vector};
use lowmach_core::spectral::{ComplexField, ScalarField, TorusGrid, VectorField};

fn grid() -> impl Strategy<Value = TorusGrid> {
    (1usize..=2, prop::sample::select(vec![8usize, 16, 32]))
        .prop_map(|(d, n)| TorusGrid::new(d, n).unwrap())
}

fn dist(a: &VectorField, b: &VectorField) -> f64 {
    l2_norm_vector(&a.sub(b).unwrap())
}

fn pair(g: TorusGrid, seed: u64, decay: f64) -> AcousticPair {
    AcousticPair::new(
        random_scalar(g, decay, seed),
        random_vector(g, decay, seed + 1),
    )
    .unwrap()
}

fn wave(g: TorusGrid, seed: u64, amp: f64, eps: f64) -> WaveFunction {
    let a = random_scalar(g, 3.0, seed);
    let a = a.scale(amp / a.max_abs().max(1e-300));
    let s = random_scalar(g, 3.0, seed + 1);
    let data = a
        .values()
        .iter()
        .zip(s.values())
        .map(|(&r, &p)| Complex64::from_polar(1.0 + r, p))
        .collect();
    WaveFunction::new(
        ComplexField::new(g, data).unwrap(),
        QhdParams::new(eps, 2.0).unwrap(),
    )
}

fn pythagorean_sign(a: i64, b: i64, signs: [i8; 3]) -> f64 {
    signs[0] as f64 * (a as f64).sqrt() + signs[1] as f64 * (b as f64).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(g in grid(), values in prop::collection::vec(-2.0f64..2.0, 1024)) {
        let f = ScalarField::new(g, values[..g.len()].to_vec()).unwrap();
        let lhs = l2_norm(&f).powi(2);
        let rhs = f.transform().energy() * g.volume();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1e-300));
    }

    #[test]
    fn leray_projectors(g in grid(), s1 in any::<u64>(), s2 in any::<u64>(), decay in 0.0f64..3.0) {
        let u = random_vector(g, decay, s1);
        let w = random_vector(g, decay, s2);
        let (pu, qu) = leray_decompose(&u);
        let (nu, nw) = (l2_norm_vector(&u), l2_norm_vector(&w));
        prop_assert!(pu.inner(&project_q(&w)).unwrap().abs() <= 1e-10 * nu * nw);
        prop_assert!(dist(&pu.add(&qu).unwrap(), &u) <= 1e-12 * nu);
        prop_assert!(dist(&project_p(&pu), &pu) <= 1e-12 * nu);
        prop_assert!(dist(&project_q(&qu), &qu) <= 1e-12 * nu);
    }

    #[test]
    fn derivatives_commute_with_dealiasing(g in grid(), seed in any::<u64>(), decay in 0.0f64..3.0) {
        let f = Field::Scalar(random_scalar(g, decay, seed));
        let v = Field::Vector(random_vector(g, decay, seed));
        for (x, kind) in [(&f, DiffKind::Gradient), (&f, DiffKind::Laplacian), (&v, DiffKind::Divergence)] {
            let a = differentiate(&dealias(x), kind).unwrap();
            let b = dealias(&differentiate(x, kind).unwrap());
            let d = match (a, b) {
                (Field::Scalar(a), Field::Scalar(b)) => l2_norm(&a.sub(&b).unwrap()),
                (Field::Vector(a), Field::Vector(b)) => dist(&a, &b),
                _ => unreachable!(),
            };
            prop_assert!(d <= 1e-10, "{:?}: {}", kind, d);
        }
    }

    #[test]
    fn acoustic_group(g in grid(), seed in any::<u64>(), t1 in -20.0f64..20.0, t2 in -20.0f64..20.0) {
        let u = pair(g, seed, 1.5);
        let one = apply_group(&u, t1);
        let both = apply_group(&one, t2);
        prop_assert!(both.sub(&apply_group(&u, t1 + t2)).unwrap().l2_norm() <= 1e-11 * u.l2_norm());
        for s in [0.0, 1.0, 2.0] {
            let n = u.sobolev_norm(s);
            prop_assert!((one.sobolev_norm(s) - n).abs() <= 1e-11 * n);
        }
        prop_assert!(dist(&project_p(one.vel()), &project_p(u.vel())) <= 1e-12 * u.l2_norm());
    }

    #[test]
    fn forms_are_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let g = TorusGrid::new(2, 16).unwrap();
        let f = ResonantForms::new(g, 2.0, PsiNormalization::Paper).unwrap();
        let v = random_solenoidal(g, 1.5, seed);
        let (x, y, z) = (pair(g, seed + 1, 1.5), pair(g, seed + 3, 1.5), pair(g, seed + 5, 1.5));
        let xy = x.scale(a).add(&y.scale(b)).unwrap();
        let lhs = f.b1_apply(&v, &xy).unwrap();
        let rhs = f.b1_apply(&v, &x).unwrap().scale(a).add(&f.b1_apply(&v, &y).unwrap().scale(b)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().l2_norm() <= 1e-11 * rhs.l2_norm().max(1.0));
        let lhs = f.b2_apply(&xy, &z).unwrap();
        let rhs = f.b2_apply(&x, &z).unwrap().scale(a).add(&f.b2_apply(&y, &z).unwrap().scale(b)).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().l2_norm() <= 1e-11 * rhs.l2_norm().max(1.0));
        let sym = f.b2_apply(&z, &xy).unwrap();
        prop_assert!(sym.sub(&lhs).unwrap().l2_norm() <= 1e-11 * lhs.l2_norm().max(1.0));
    }

    #[test]
    fn orthogonality_pairings(g in grid(), seed in any::<u64>(), gamma in 1.1f64..3.0, c in -2.0f64..2.0) {
        prop_assume!(g.n() <= 16 || g.dim() == 1);
        let f = ResonantForms::new(g, gamma, PsiNormalization::Unit).unwrap();
        let v = if g.dim() == 1 { VectorField::constant(g, &[c]).unwrap() } else { random_solenoidal(g, 1.5, seed) };
        let r = orthogonality_report(&f, &v, &pair(g, seed + 1, 1.5), &pair(g, seed + 3, 1.5), &pair(g, seed + 5, 1.5)).unwrap();
        prop_assert!(r.max_relative() <= 1e-10, "{:?}", r);
    }

    #[test]
    fn resonance_of_pythagorean_family(r in 1i64..12, x in 0i64..6, y in 0i64..6, mask in 0u8..8) {
        // √(r x²) + √(r y²) = √(r (x+y)²) and its sign variants
        let (a, b, c) = (r * x * x, r * y * y, r * (x + y) * (x + y));
        let signs = [0, 1, 2].map(|j| if mask >> j & 1 == 1 { -1i8 } else { 1 });
        let lhs = pythagorean_sign(a, b, signs);
        let expected = (lhs - signs[2] as f64 * (c as f64).sqrt()).abs() < 1e-9;
        prop_assert_eq!(is_resonant(a, b, c, signs).unwrap(), expected);
    }

    #[test]
    fn nls_mass_and_gauge(
        a in 0.0f64..0.3,
        b in 0.0f64..1.0,
        k in prop::array::uniform2(-1i64..=1),
        l in prop::array::uniform2(-1i64..=1),
        theta in -3.0f64..3.0,
        eps in 0.2f64..1.0,
    ) {
        let g = TorusGrid::new(2, 32).unwrap();
        let dot = |k: [i64; 2], x: [f64; 2]| k[0] as f64 * x[0] + k[1] as f64 * x[1];
        let psi = ComplexField::from_fn(g, |x| Complex64::from_polar(1.0 + a * dot(k, x).cos(), b * dot(l, x).sin()));
        let w = nls_step(&WaveFunction::new(psi, QhdParams::new(eps, 2.0).unwrap()), 1e-3).unwrap();
        let next = nls_step(&w, 1e-3).unwrap();
        prop_assert!((next.mass() - w.mass()).abs() <= 1e-12 * w.mass(), "{:e}", (next.mass() - w.mass()).abs() / w.mass());
        let mut shifted = w.clone();
        let rot = Complex64::from_polar(1.0, theta);
        shifted.psi.values_mut().iter_mut().for_each(|c| *c *= rot);
        let (a, b) = (madelung(&w), madelung(&shifted));
        prop_assert!(l2_norm(&a.rho.sub(&b.rho).unwrap()) <= 1e-12);
        prop_assert!(dist(&a.j, &b.j) <= 1e-12);
    }

    #[test]
    fn entropy_structure(seed in any::<u64>(), amp in 0.0f64..0.3, eps in 0.05f64..1.0) {
        let g = TorusGrid::new(2, 16).unwrap();
        let state = madelung(&wave(g, seed, amp, eps));
        let e = euler_state(random_solenoidal(g, 2.0, seed + 9).scale(0.3), 0.0).unwrap();
        let v0 = OscillationProfile::new(pair(g, seed + 11, 2.0).gradient_part().scale(0.1), 0.0);
        let h = relative_entropy(&state, &e, &v0, eps, 2.0, PsiNormalization::Unit).unwrap();
        prop_assert!(h.velocity >= 0.0 && h.pressure >= 0.0 && h.quantum >= 0.0);
        let total = h.velocity + h.pressure + h.quantum;
        prop_assert!((h.total() - total).abs() <= 1e-14 * total.max(1e-300));
        let m = convergence_metrics(&state, &e, &[]).unwrap();
        prop_assert!(m.strong_gap <= (2.0 * h.total()).sqrt() * (1.0 + 1e-12));
    }

    #[test]
    fn entropy_of_unit_density(seed in any::<u64>(), eps in 0.05f64..1.0) {
        let g = TorusGrid::new(2, 16).unwrap();
        let state = madelung(&wave(g, seed, 0.0, eps));
        let e = euler_state(random_solenoidal(g, 2.0, seed + 9).scale(0.3), 0.0).unwrap();
        let h = relative_entropy(&state, &e, &OscillationProfile::zeros(g), eps, 2.0, PsiNormalization::Paper).unwrap();
        let expected = 0.5 * dist(&state.lambda, &e.v).powi(2);
        prop_assert!((h.total() - expected).abs() <= 1e-12 * expected.max(1e-12));
    }

    #[test]
    fn psi_branches_agree(d in 0.5e-4f64..2e-4, above in any::<bool>(), eps in 0.01f64..1.0, gamma in 1.1f64..3.0) {
        let rho = if above { 1.0 + d } else { 1.0 - d };
        let (s, x) = (psi_series(rho, eps, gamma), psi_exact(rho, eps, gamma));
        prop_assert!((s - x).abs() <= 1e-10 * x.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn euler_stays_solenoidal(seed in any::<u64>(), amp in 0.1f64..1.0) {
        let g = TorusGrid::new(2, 32).unwrap();
        let v = random_solenoidal(g, 2.0, seed);
        let mut e = euler_state(v.scale(amp / v.max_abs()), 0.0).unwrap();
        let k0 = e.kinetic_energy();
        for _ in 0..20 {
            e = euler_step(&e, 5e-3).unwrap();
        }
        prop_assert!(e.relative_divergence() <= 1e-10);
        prop_assert!((e.kinetic_energy() - k0).abs() <= 1e-8 * k0);
    }
}
