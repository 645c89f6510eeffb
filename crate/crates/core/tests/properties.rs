use decoupler_core::channels::random_channel;
use decoupler_core::decoupling::{
    k_sender_from_norms, lhs_samples, two_sender_from_norms, DecouplingExperiment, TermNorms,
};
use decoupler_core::entropy::{hmax, tilde_h2_cond, tilde_hmax_delta};
use decoupler_core::qmac::{control_state, rate_region, uhlmann_isometry};
use decoupler_core::random::{
    ginibre, haar_unitary, random_density, random_hermitian, random_pure, seeded_rng,
};
use decoupler_core::tensor::{
    delta_truncate, pseudo_inverse, purity, schatten_norm, swap_operator, HermitianSpectrum, NegativePower,
    Schatten,
};
use decoupler_core::twirl::{k_inverse, k_matrix, twirl2_single, twirl2_tensor};
use decoupler_core::{MultipartiteOperator, SystemLabel, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn sys(name: &str, d: usize) -> SystemLabel {
    SystemLabel::new(name, d)
}

fn min_eig(m: &DMatrix<C64>) -> f64 {
    HermitianSpectrum::of(m).min()
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn pair_operator(dims: &[usize], seed: u64) -> (MultipartiteOperator, Vec<(String, String)>) {
    let mut layout = Vec::new();
    let mut pairs = Vec::new();
    for (i, &d) in dims.iter().enumerate() {
        let (a, b) = (format!("A{i}"), format!("B{i}"));
        layout.push(sys(&a, d));
        layout.push(sys(&b, d));
        pairs.push((a, b));
    }
    let n = layout.iter().map(SystemLabel::dim).product();
    let m = random_hermitian(n, &mut seeded_rng(seed));
    (MultipartiteOperator::new(layout, m).unwrap(), pairs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_trace_of_product(da in 1usize..4, db in 1usize..4, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let x = MultipartiteOperator::new(vec![sys("X", da)], ginibre(da, da, &mut rng)).unwrap();
        let y = MultipartiteOperator::new(vec![sys("Y", db)], ginibre(db, db, &mut rng)).unwrap();
        let t = x.tensor_product(&y).unwrap().partial_trace(&["Y"]).unwrap().trace();
        prop_assert!((t - x.trace() * y.trace()).norm() <= 1e-10);
    }

    #[test]
    fn collision_ratio_bounds(da in 2usize..4, db in 2usize..4, rank in 1usize..10, scale in 0.1f64..3.0, seed in any::<u64>()) {
        let rho = random_density(vec![sys("A", da), sys("B", db)], rank, &mut seeded_rng(seed)).unwrap().scale(scale);
        let r = purity(&rho) / purity(&rho.partial_trace(&["B"]).unwrap());
        prop_assert!(r >= 1.0 / da as f64 - 1e-12 && r <= da as f64 + 1e-12, "ratio {r}");
    }

    #[test]
    fn weighted_cauchy_schwarz(d in 1usize..5, rank in 1usize..5, scale in 0.1f64..4.0, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let sigma = random_density(vec![sys("A", d)], rank.min(d), &mut rng).unwrap().scale(scale);
        let p = HermitianSpectrum::of(sigma.matrix()).rebuild(|v| if v > 1e-12 { 1.0 } else { 0.0 });
        let m = MultipartiteOperator::new(vec![sys("A", d)], &p * random_hermitian(d, &mut rng) * &p).unwrap();
        let q = pseudo_inverse(&sigma, NegativePower::MinusQuarter).unwrap();
        let x = q.matrix() * m.matrix() * q.matrix();
        let rhs = (sigma.trace().re * (&x * &x).trace().re).sqrt();
        prop_assert!(schatten_norm(&m, Schatten::One) <= rhs + 1e-9);
    }

    #[test]
    fn truncation_is_dominated(d in 1usize..6, rank in 1usize..6, delta in 0.0f64..0.99, seed in any::<u64>()) {
        let rho = random_density(vec![sys("A", d)], rank.min(d), &mut seeded_rng(seed)).unwrap();
        let t = delta_truncate(&rho, delta).unwrap();
        prop_assert!(min_eig(&(rho.matrix() - t.matrix())) >= -1e-10);
        prop_assert!(min_eig(t.matrix()) >= -1e-10);
        prop_assert!(rho.trace().re - t.trace().re <= delta + 1e-12);
    }

    #[test]
    fn pseudo_inverse_is_generalized_inverse(d in 2usize..6, rank in 1usize..6, seed in any::<u64>()) {
        let s = random_density(vec![sys("A", d)], rank.min(d), &mut seeded_rng(seed)).unwrap();
        let inv = pseudo_inverse(&s, NegativePower::MinusOne).unwrap();
        let back = s.matrix() * inv.matrix() * s.matrix();
        prop_assert!((back - s.matrix()).norm() <= 1e-9);
    }

    #[test]
    fn swap_trick(d in 2usize..5, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let (a, b) = (sys("A", d), sys("A'", d));
        let m = MultipartiteOperator::new(vec![a.clone()], ginibre(d, d, &mut rng)).unwrap();
        let n = MultipartiteOperator::new(vec![b.clone()], ginibre(d, d, &mut rng)).unwrap();
        let lhs = m.tensor_product(&n).unwrap().trace_product(&swap_operator(&a, &b).unwrap()).unwrap();
        prop_assert!((lhs - (m.matrix() * n.matrix()).trace()).norm() <= 1e-10);
    }

    #[test]
    fn channels_preserve_trace_and_positivity(d1 in 1usize..4, d2 in 1usize..4, dout in 1usize..5, extra in 0usize..3, r in 1usize..3, seed in any::<u64>()) {
        let din = d1 * d2;
        let ch = random_channel(vec![sys("A1", d1), sys("A2", d2)], sys("E", dout), din.div_ceil(dout) + extra, seed).unwrap();
        let rho = random_density(vec![sys("A1", d1), sys("R", r), sys("A2", d2)], 2, &mut seeded_rng(seed ^ 1)).unwrap();
        let out = ch.apply(&rho).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(min_eig(out.matrix()) >= -1e-10);
        let iso = ch.stinespring_with("Env").unwrap();
        let env = iso.environment().name().to_owned();
        let via = iso.as_channel().unwrap().apply(&rho).unwrap().trace_out(&[env.as_str()]).unwrap();
        prop_assert!(via.max_abs_diff(&out).unwrap() <= 1e-10);
    }

    #[test]
    fn adjoint_identity(d in 1usize..4, dout in 1usize..4, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let ch = random_channel(vec![sys("A", d)], sys("E", dout), d.div_ceil(dout) + 1, seed).unwrap();
        let x = MultipartiteOperator::new(vec![sys("A", d)], ginibre(d, d, &mut rng)).unwrap();
        let y = MultipartiteOperator::new(vec![sys("E", dout)], ginibre(dout, dout, &mut rng)).unwrap();
        let lhs = y.dagger().trace_product(&ch.apply(&x).unwrap()).unwrap();
        let rhs = ch.adjoint_apply(&y).unwrap().dagger().trace_product(&x).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10);
    }

    #[test]
    fn conditional_entropy_is_additive(r1 in 1usize..5, r2 in 1usize..5, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let x = random_density(vec![sys("A1", 2), sys("B1", 2)], r1, &mut rng).unwrap();
        let y = random_density(vec![sys("A2", 2), sys("B2", 2)], r2, &mut rng).unwrap();
        let joint = x.tensor_product(&y).unwrap();
        let h = tilde_h2_cond(&joint, &["B1", "B2"], 0.0).unwrap().value;
        let parts = tilde_h2_cond(&x, &["B1"], 0.0).unwrap().value + tilde_h2_cond(&y, &["B2"], 0.0).unwrap().value;
        prop_assert!((h - parts).abs() <= 1e-9);
    }

    #[test]
    fn conditional_entropy_range(da in 1usize..4, db in 1usize..4, rank in 1usize..10, seed in any::<u64>()) {
        let rho = random_density(vec![sys("A", da), sys("B", db)], rank, &mut seeded_rng(seed)).unwrap();
        let h = tilde_h2_cond(&rho, &["B"], 0.0).unwrap().value;
        let cap = (da as f64).log2() + tilde_hmax_delta(&rho.partial_trace(&["B"]).unwrap(), 0.0).unwrap();
        prop_assert!(h.is_finite() && h.abs() <= cap + 1e-9, "{h} vs {cap}");
    }

    #[test]
    fn hmax_delta_non_increasing(d in 1usize..6, rank in 1usize..6, a in 0.0f64..0.95, b in 0.0f64..0.95, seed in any::<u64>()) {
        let rho = random_density(vec![sys("A", d)], rank.min(d), &mut seeded_rng(seed)).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(tilde_hmax_delta(&rho, hi).unwrap() <= tilde_hmax_delta(&rho, lo).unwrap() + 1e-12);
    }

    #[test]
    fn hmax_within_log_rank(d in 1usize..6, rank in 1usize..6, seed in any::<u64>()) {
        let rho = random_density(vec![sys("A", d)], rank.min(d), &mut seeded_rng(seed)).unwrap();
        let h = hmax(&rho).unwrap();
        prop_assert!(h >= -1e-12 && h <= (rank.min(d) as f64).log2() + 1e-9);
    }

    #[test]
    fn twirl_is_commutant_member(dims in prop::collection::vec(1usize..4, 1..3), seed in any::<u64>()) {
        let (m, pairs) = pair_operator(&dims, seed);
        let tw = twirl2_tensor(&m, &pairs).unwrap();
        let mut rng = seeded_rng(seed ^ 7);
        let w = dims.iter().fold(DMatrix::from_element(1, 1, C64::new(1.0, 0.0)), |acc, &d| {
            let v = haar_unitary(d, &mut rng);
            acc.kronecker(&v).kronecker(&v)
        });
        let t = tw.reconstructed.matrix();
        prop_assert!(max_abs(&(&w * t * w.adjoint() - t)) <= 1e-9);
        let again = twirl2_tensor(&tw.reconstructed, &pairs).unwrap();
        for (a, b) in again.moments.iter().zip(&tw.moments) {
            prop_assert!((a - b).norm() <= 1e-8 * b.norm().max(1.0));
        }
    }

    #[test]
    fn single_pair_agrees(d in 1usize..5, seed in any::<u64>()) {
        let (m, pairs) = pair_operator(&[d], seed);
        let a = twirl2_tensor(&m, &pairs).unwrap().reconstructed;
        let b = twirl2_single(&m).unwrap().reconstructed;
        prop_assert!(a.max_abs_diff(&b).unwrap() <= 1e-10);
    }

    #[test]
    fn k_inverse_is_exact(dims in prop::collection::vec(2usize..7, 1..4)) {
        let n = 1 << dims.len();
        let p = k_matrix(&dims) * k_inverse(&dims);
        prop_assert!((p - DMatrix::<f64>::identity(n, n)).amax() <= 1e-12);
    }

    #[test]
    fn bounds_grow_with_term_norms(d1 in 2usize..5, d2 in 2usize..5, which in 1usize..4, bump in 0.0f64..1.0, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        use rand::Rng;
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| (0..4).map(|_| rng.random_range(0.0..1.0)).collect::<Vec<f64>>();
        let n = TermNorms {
            dims: vec![d1, d2],
            delta: 0.01,
            labels: vec!["00".into(), "01".into(), "10".into(), "11".into()],
            rho: mk(&mut rng),
            omega: mk(&mut rng),
        };
        let mut m = n.clone();
        m.rho[which] += bump;
        prop_assert!(two_sender_from_norms(&m).unwrap().value >= two_sender_from_norms(&n).unwrap().value - 1e-15);
        prop_assert!(k_sender_from_norms(&m).unwrap().value >= k_sender_from_norms(&n).unwrap().value - 1e-15);
    }

    #[test]
    fn trace_distances_are_capped(d1 in 2usize..4, d2 in 2usize..4, dout in 1usize..4, seed in any::<u64>()) {
        let senders = vec![sys("A1", d1), sys("A2", d2)];
        let ch = random_channel(senders.clone(), sys("E", dout), (d1 * d2).div_ceil(dout), seed).unwrap();
        let mut systems = senders;
        systems.push(sys("R", 2));
        let rho = random_density(systems, 3, &mut seeded_rng(seed ^ 3)).unwrap();
        let exp = DecouplingExperiment::new(ch, rho, 0.0, 20, seed).unwrap();
        for v in lhs_samples(&exp).unwrap() {
            prop_assert!((0.0..=2.0 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn region_vertices_are_feasible(seed in any::<u64>(), e_a in 0.0f64..1.5, e_b in 0.0f64..1.5, t in 0.0f64..1.0, delta in 0.0f64..0.2) {
        let mut rng = seeded_rng(seed);
        let ch = random_channel(vec![sys("A'", 2), sys("B'", 2)], sys("C", 2), 4, seed).unwrap();
        let om = random_pure(vec![sys("A''", 2), sys("A'", 2)], &mut rng).unwrap();
        let de = random_pure(vec![sys("B''", 2), sys("B'", 2)], &mut rng).unwrap();
        let cs = control_state(&ch, &om, &de).unwrap();
        let r = rate_region(&cs, delta, e_a, e_b).unwrap();
        for v in &r.vertices {
            prop_assert!(r.plane_slacks(v[0], v[1]).iter().all(|&s| s >= -1e-9));
        }
        let s = rate_region(&cs, delta, e_a + t, e_b).unwrap();
        prop_assert!((s.constraints[0].bound - r.constraints[0].bound).abs() <= 1e-12);
        let point = [0.0, e_a + t, 0.0, e_b];
        let before = r.slacks(&[0.0, e_a, 0.0, e_b]);
        let after = s.slacks(&point);
        prop_assert!((after[0] - before[0] - t).abs() <= 1e-12);
        prop_assert!((before[3] - after[3] - t).abs() <= 1e-12);
    }

    #[test]
    fn uhlmann_isometry_is_partial(dx in 1usize..4, dy in 1usize..5, dz in 1usize..5, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let phi = random_pure(vec![sys("X", dx), sys("Y", dy)], &mut rng).unwrap();
        let psi = random_pure(vec![sys("X", dx), sys("Z", dz)], &mut rng).unwrap();
        let dec = uhlmann_isometry(&phi, &psi, &["X"]).unwrap();
        let p = dec.isometry.adjoint() * &dec.isometry;
        prop_assert!(max_abs(&(&p * &p - &p)) <= 1e-10);
        prop_assert!((dec.overlap(&phi, &psi, &["X"]).unwrap() - dec.fidelity).abs() <= 1e-9);
    }
}
