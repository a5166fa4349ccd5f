use locframe::container::{decode, encode};
use locframe::frames::{gram, WindowSpec};
use locframe::galerkin::{roundtrip_check, schur_certificate, BoundCase, LinearOperator};
use locframe::linalg::dense::{random_cmat, random_cvec, seeded};
use locframe::linalg::{probe_op_norm, seq_space_included, weighted_op_norm};
use locframe::solver::{cg_solve, IterOptions, IterStatus};
use locframe::{CMat, Exponent, FrameSpec, IndexSet, SeqSpaceSpec, SpaceFamily, Weight, WeightFamily, C64};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        Just(Exponent::One),
        Just(Exponent::Two),
        Just(Exponent::Inf),
        (1.1f64..6.0).prop_map(Exponent::Finite),
    ]
}

fn family() -> impl Strategy<Value = SpaceFamily> {
    (exponent(), prop_oneof![Just(0.0), Just(0.5), Just(1.0), Just(-1.0), Just(2.0)])
        .prop_map(|(p, t)| SpaceFamily::polynomial(p, t))
}

fn random_frame() -> impl Strategy<Value = FrameSpec> {
    (2usize..10, 0usize..12, any::<u64>()).prop_map(|(n, extra, seed)| FrameSpec::Random { n, k: n + extra, seed })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frame_bounds_sandwich_energy(spec in random_frame(), seed in any::<u64>()) {
        let f = spec.build().unwrap();
        let b = f.frame_bounds().unwrap();
        let x = random_cvec(f.dim(), &mut seeded(seed));
        let e = f.analysis(&x).unwrap().norm_squared();
        let n2 = x.norm_squared();
        prop_assert!(b.lower * n2 <= e * (1.0 + 1e-10));
        prop_assert!(e <= b.upper * n2 * (1.0 + 1e-10));
    }

    #[test]
    fn canonical_dual_reconstructs(spec in random_frame(), seed in any::<u64>()) {
        let f = spec.build().unwrap();
        let d = f.canonical_dual().unwrap();
        let x = random_cvec(f.dim(), &mut seeded(seed));
        let back = f.synthesis(&d.analysis(&x).unwrap()).unwrap();
        let cond = f.frame_bounds().unwrap();
        prop_assert!((back - &x).norm() <= 1e-9 * (cond.upper / cond.lower) * x.norm());
    }

    #[test]
    fn cross_gram_is_an_orthogonal_projection(spec in random_frame()) {
        let f = spec.build().unwrap();
        let p = gram(&f, &f.canonical_dual().unwrap()).unwrap();
        let scale = f.frame_bounds().unwrap();
        let tol = 1e-9 * scale.upper / scale.lower;
        prop_assert!((&p * &p - &p).norm() <= tol * p.norm().max(1.0));
        prop_assert!((&p - p.adjoint()).norm() <= tol * p.norm().max(1.0));
        // rank equals the ambient dimension
        let trace: f64 = p.diagonal().iter().map(|z| z.re).sum();
        prop_assert!((trace - f.dim() as f64).abs() < 1e-8);
    }

    #[test]
    fn galerkin_roundtrip_on_random_operators(spec in random_frame(), seed in any::<u64>()) {
        let f = spec.build().unwrap();
        let o = LinearOperator::Dense(random_cmat(f.dim(), f.dim(), &mut seeded(seed)));
        let cond = f.frame_bounds().unwrap();
        prop_assert!(roundtrip_check(&o, &f, &f).unwrap().max() <= 1e-9 * (cond.upper / cond.lower).powi(2));
    }

    #[test]
    fn container_is_bit_exact(rows in 0usize..6, cols in 0usize..6, seed in any::<u64>(), special in any::<f64>()) {
        let mut m = random_cmat(rows, cols, &mut seeded(seed));
        if rows * cols > 0 {
            m[(0, 0)] = C64::new(special, -special);
        }
        let back = decode(&encode(&m)).unwrap();
        prop_assert_eq!(back.shape(), m.shape());
        for (a, b) in m.iter().zip(back.iter()) {
            prop_assert_eq!(a.re.to_bits(), b.re.to_bits());
            prop_assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn probes_never_exceed_the_norm(p in exponent(), q in exponent(), t in -1.0f64..2.0, seed in any::<u64>()) {
        let n = 7;
        let ix = IndexSet::centered_line(n);
        let m = random_cmat(n, n, &mut seeded(seed));
        let w = Weight::on(&WeightFamily::Polynomial { t }, &ix).unwrap();
        let from = SeqSpaceSpec::new(p, w.clone());
        let to = SeqSpaceSpec::new(q, w);
        let bound = weighted_op_norm(&m, &from, &to).unwrap().value;
        let probed = probe_op_norm(&m, &from, &to, 16, seed).unwrap();
        prop_assert!(probed <= bound * (1.0 + 1e-10), "{probed} > {bound}");
    }

    #[test]
    fn schur_bounds_dominate_probes(seed in any::<u64>(), t in 0.0f64..1.5, s in 1.0f64..4.0) {
        let n = 10;
        let ix = IndexSet::centered_line(n);
        let r = random_cmat(n, n, &mut seeded(seed));
        let m = CMat::from_fn(n, n, |k, l| r[(k, l)] * (1.0 + k.abs_diff(l) as f64).powf(-s));
        let w = Weight::on(&WeightFamily::Polynomial { t }, &ix).unwrap();
        for case in [BoundCase::InfInf, BoundCase::OneInf, BoundCase::OneP { p: Exponent::Two }, BoundCase::TwoTwo, BoundCase::InfOne] {
            let c = schur_certificate(&m, &w, &w, case).unwrap();
            prop_assert!(c.measure(&m, 8, seed).unwrap() <= c.certified_bound * (1.0 + 1e-8));
        }
    }

    #[test]
    fn inclusion_is_reflexive(a in family()) {
        prop_assert!(seq_space_included(&a, &a).unwrap().included);
    }

    #[test]
    fn inclusion_is_transitive(a in family(), b in family(), c in family()) {
        let ab = seq_space_included(&a, &b).unwrap().included;
        let bc = seq_space_included(&b, &c).unwrap().included;
        if ab && bc {
            prop_assert!(seq_space_included(&a, &c).unwrap().included, "{a:?} ⊆ {b:?} ⊆ {c:?}");
        }
    }

    #[test]
    fn cg_energy_decreases_on_hermitian_positive(n in 2usize..16, seed in any::<u64>()) {
        let r = random_cmat(n, n, &mut seeded(seed));
        let m = r.adjoint() * &r + CMat::identity(n, n);
        let b = random_cvec(n, &mut seeded(seed ^ 1));
        let out = cg_solve(&m, &b, None, &IterOptions::default()).unwrap();
        prop_assert_eq!(out.status, IterStatus::Converged);
        prop_assert!((&m * &out.solution - &b).norm() <= 1e-9 * b.norm());
        for w in out.energy_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
    }
}

#[test]
fn gabor_duals_reconstruct_across_lattices() {
    for (n, a, b) in [(16, 2, 4), (24, 4, 3), (32, 4, 4), (36, 6, 3)] {
        let f = FrameSpec::gabor(n, a, b, WindowSpec::Gaussian).build().unwrap();
        let d = f.canonical_dual().unwrap();
        let x = random_cvec(n, &mut seeded(n as u64));
        let back = d.synthesis(&f.analysis(&x).unwrap()).unwrap();
        assert!((back - &x).norm() <= 1e-10 * x.norm(), "gabor({n},{a},{b})");
    }
}
