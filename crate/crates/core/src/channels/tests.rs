use nalgebra::DMatrix;

use super::*;
use crate::random::{random_density, random_hermitian, seeded_rng};
use crate::tensor::{max_entangled, purity, MultipartiteOperator};

fn sys(name: &str, d: usize) -> SystemLabel {
    SystemLabel::new(name, d)
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn identity_leaves_state_alone() {
    let mut rng = seeded_rng(3);
    let rho = random_density(vec![sys("R", 2), sys("A", 3)], 6, &mut rng).unwrap();
    let id = identity(vec![sys("A", 3)], sys("A", 3)).unwrap();
    let out = id.apply(&rho).unwrap();
    assert_eq!(out.names(), vec!["R", "A"]);
    assert!(out.max_abs_diff(&rho).unwrap() < 1e-14);
}

#[test]
fn depolarizing_replaces_sender_by_maximally_mixed() {
    let mut rng = seeded_rng(4);
    let rho = random_density(vec![sys("A", 2), sys("R", 3)], 6, &mut rng).unwrap();
    let ch = depolarizing(vec![sys("A", 2)], sys("A", 2)).unwrap();
    assert_eq!(ch.kraus().len(), 4);
    let out = ch.apply(&rho).unwrap();
    let want = MultipartiteOperator::maximally_mixed(vec![sys("A", 2)])
        .unwrap()
        .tensor_product(&rho.partial_trace(&["R"]).unwrap())
        .unwrap();
    assert!(out.max_abs_diff(&want).unwrap() < 1e-14);
}

#[test]
fn single_projector_kraus_on_mixed_qubit() {
    let mut k = DMatrix::zeros(2, 2);
    k[(0, 0)] = c(1.0);
    let ch = QuantumChannel::new(vec![sys("A", 2)], vec![sys("A", 2)], vec![k]).unwrap();
    assert!(!ch.is_tp());
    let out = ch
        .apply(&MultipartiteOperator::maximally_mixed(vec![sys("A", 2)]).unwrap())
        .unwrap();
    let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.5), c(0.0)]));
    assert!(max_diff(out.matrix(), &want) < 1e-15);
}

#[test]
fn channel_rejects_unknown_or_clashing_systems() {
    let ch = identity(vec![sys("A", 2)], sys("B", 2)).unwrap();
    let rho = MultipartiteOperator::maximally_mixed(vec![sys("X", 2)]).unwrap();
    assert!(matches!(ch.apply(&rho), Err(Error::UnknownSystem(_))));
    let rho = MultipartiteOperator::maximally_mixed(vec![sys("A", 2), sys("B", 2)]).unwrap();
    assert!(matches!(ch.apply(&rho), Err(Error::SystemClash(_))));
    let rho = MultipartiteOperator::maximally_mixed(vec![sys("A", 3)]).unwrap();
    assert!(matches!(ch.apply(&rho), Err(Error::DimensionMismatch(_))));
}

#[test]
fn stinespring_of_identity_and_dephasing() {
    let id = identity(vec![sys("A", 2)], sys("B", 2)).unwrap();
    let v = id.stinespring().unwrap();
    assert_eq!(v.environment().dim(), 1);
    assert!(max_diff(v.matrix(), &DMatrix::identity(2, 2)) < 1e-15);

    let deph = dephasing(vec![sys("A", 2)], sys("B", 2)).unwrap();
    let v = deph.stinespring().unwrap();
    // |i> -> |i>_B |i>_E
    let mut want = DMatrix::zeros(4, 2);
    want[(0, 0)] = c(1.0);
    want[(3, 1)] = c(1.0);
    assert!(max_diff(v.matrix(), &want) < 1e-15);
}

#[test]
fn stinespring_roundtrip_matches_apply() {
    for seed in 0..20 {
        let ch = random_channel(vec![sys("A", 2), sys("B", 2)], sys("C", 2), 3, seed).unwrap();
        let mut rng = seeded_rng(100 + seed);
        let rho = random_density(vec![sys("A", 2), sys("R", 2), sys("B", 2)], 3, &mut rng).unwrap();
        let v = ch.stinespring().unwrap();
        assert!(v.isometry_deviation() < 1e-12);
        let big = v.as_channel().unwrap().apply(&rho).unwrap();
        let via_v = big.trace_out(&["E"]).unwrap();
        let direct = ch.apply(&rho).unwrap();
        let via_v = via_v.reorder(&direct.names()).unwrap();
        assert!(via_v.max_abs_diff(&direct).unwrap() < 1e-12, "seed {seed}");
    }
}

#[test]
fn stinespring_requires_tp() {
    let ch = QuantumChannel::new(vec![sys("A", 2)], vec![sys("B", 2)], vec![DMatrix::zeros(2, 2)]).unwrap();
    assert!(matches!(ch.stinespring(), Err(Error::NotTracePreserving(_))));
    assert!(matches!(ch.complementary(), Err(Error::NotTracePreserving(_))));
}

#[test]
fn complementary_of_identity_is_constant() {
    let id = identity(vec![sys("A", 3)], sys("B", 3)).unwrap();
    let comp = id.complementary().unwrap();
    let mut rng = seeded_rng(5);
    let rho = random_density(vec![sys("A", 3)], 3, &mut rng).unwrap();
    let out = comp.apply(&rho).unwrap();
    assert_eq!(out.side(), 1);
    assert!((out.matrix()[(0, 0)] - c(1.0)).norm() < 1e-14);
}

#[test]
fn complementary_of_dephasing_measures_and_prepares() {
    let deph = dephasing(vec![sys("A", 2)], sys("B", 2)).unwrap();
    let comp = deph.complementary().unwrap();
    let mut rng = seeded_rng(6);
    let rho = random_density(vec![sys("A", 2)], 2, &mut rng).unwrap();
    let out = comp.apply(&rho).unwrap();
    let m = rho.matrix();
    let want = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![m[(0, 0)], m[(1, 1)]]));
    assert!(max_diff(out.matrix(), &want) < 1e-14);
}

#[test]
fn double_complement_recovers_output_spectrum() {
    // amplitude damping is degradable for gamma < 1/2
    let g: f64 = 0.3;
    let mut k0 = DMatrix::zeros(2, 2);
    k0[(0, 0)] = c(1.0);
    k0[(1, 1)] = c((1.0 - g).sqrt());
    let mut k1 = DMatrix::zeros(2, 2);
    k1[(0, 1)] = c(g.sqrt());
    let ch = QuantumChannel::cptp(vec![sys("A", 2)], vec![sys("B", 2)], vec![k0, k1]).unwrap();
    let cc = ch
        .complementary_with("F")
        .unwrap()
        .complementary_with("G")
        .unwrap();
    let mut rng = seeded_rng(9);
    for _ in 0..5 {
        let rho = random_density(vec![sys("A", 2)], 2, &mut rng).unwrap();
        let mut a = crate::tensor::HermitianSpectrum::of(ch.apply(&rho).unwrap().matrix()).values;
        let mut b = crate::tensor::HermitianSpectrum::of(cc.apply(&rho).unwrap().matrix()).values;
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let pad = b.len() - a.len();
        assert!(b[..pad].iter().all(|v| v.abs() < 1e-12));
        for (x, y) in a.iter().zip(&b[pad..]) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn choi_examples() {
    let id = identity(vec![sys("A", 2)], sys("B", 2)).unwrap();
    let choi = id.choi().unwrap();
    assert_eq!(choi.state.names(), vec!["A'", "B"]);
    let phi = max_entangled(&sys("A'", 2), &sys("B", 2)).unwrap().density();
    assert!(choi.state.max_abs_diff(&phi).unwrap() < 1e-15);
    assert!((purity(&choi.state) - 1.0).abs() < 1e-14);

    let dep = depolarizing(vec![sys("A", 2)], sys("E", 3)).unwrap();
    let want = MultipartiteOperator::maximally_mixed(vec![sys("A'", 2), sys("E", 3)]).unwrap();
    assert!(dep.choi().unwrap().state.max_abs_diff(&want).unwrap() < 1e-15);
}

#[test]
fn choi_mirror_marginal_is_maximally_mixed_for_tp() {
    for seed in 0..10 {
        let ch = random_channel(vec![sys("A1", 2), sys("A2", 3)], sys("E", 2), 4, seed).unwrap();
        let choi = ch.choi().unwrap();
        assert!(choi.state.is_psd());
        let m = choi.state.partial_trace(&["A1'", "A2'"]).unwrap();
        let want = MultipartiteOperator::maximally_mixed(vec![sys("A1'", 2), sys("A2'", 3)]).unwrap();
        assert!(m.max_abs_diff(&want).unwrap() < 1e-12);
    }
}

#[test]
fn adjoint_identity_and_unitality() {
    let mut rng = seeded_rng(11);
    let x = MultipartiteOperator::new(vec![sys("B", 3)], random_hermitian(3, &mut rng)).unwrap();
    let id = identity(vec![sys("A", 3)], sys("B", 3)).unwrap();
    let back = id.adjoint_apply(&x).unwrap();
    assert_eq!(back.names(), vec!["A"]);
    assert!(max_diff(back.matrix(), x.matrix()) < 1e-15);

    let ch = random_channel(vec![sys("A", 2)], sys("B", 3), 2, 1).unwrap();
    let one = ch
        .adjoint_apply(&MultipartiteOperator::identity(vec![sys("B", 3)]).unwrap())
        .unwrap();
    assert!(max_diff(one.matrix(), &DMatrix::identity(2, 2)) < 1e-12);
}

#[test]
fn adjoint_defining_identity() {
    let mut rng = seeded_rng(12);
    for seed in 0..10 {
        let ch = random_channel(vec![sys("A", 2), sys("B", 2)], sys("C", 3), 2, seed).unwrap();
        let a = MultipartiteOperator::new(
            vec![sys("C", 3), sys("R", 2)],
            crate::random::ginibre(6, 6, &mut rng),
        )
        .unwrap();
        let b = MultipartiteOperator::new(
            vec![sys("B", 2), sys("R", 2), sys("A", 2)],
            crate::random::ginibre(8, 8, &mut rng),
        )
        .unwrap();
        let lhs = ch.adjoint_apply(&a).unwrap().dagger().trace_product(&b).unwrap();
        let rhs = a.dagger().trace_product(&ch.apply(&b).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }
}

#[test]
fn random_channels_are_tp_and_deterministic() {
    for seed in 0..50 {
        let ch = random_channel(vec![sys("A", 2), sys("B", 2)], sys("C", 2), 2, seed).unwrap();
        assert!(ch.tp_deviation() < 1e-10);
    }
    let a = random_channel(vec![sys("A", 3)], sys("C", 2), 2, 77).unwrap();
    let b = random_channel(vec![sys("A", 3)], sys("C", 2), 2, 77).unwrap();
    assert_eq!(a, b);
    let u = random_channel(vec![sys("A", 3)], sys("C", 3), 1, 5).unwrap();
    assert_eq!(u.kraus().len(), 1);
    let k = &u.kraus()[0];
    assert!(max_diff(&(k.adjoint() * k), &DMatrix::identity(3, 3)) < 1e-12);
    assert!(matches!(
        random_channel(vec![sys("A", 4)], sys("C", 2), 1, 0),
        Err(Error::Infeasible(_))
    ));
}

#[test]
fn projector_compression_full_rank_is_identity() {
    let p = CompressionProjector::coordinate(sys("A", 3), sys("E", 3)).unwrap();
    let ch = projector_compression(&[p]).unwrap();
    assert!(ch.is_tp());
    assert!(max_diff(&ch.kraus()[0], &DMatrix::identity(3, 3)) < 1e-15);
}

#[test]
fn projector_compression_choi_marginal() {
    let mut rng = seeded_rng(13);
    let v1 = crate::random::haar_unitary(4, &mut rng);
    let v2 = crate::random::haar_unitary(3, &mut rng);
    let p1 = CompressionProjector::new(sys("A1", 4), sys("E1", 2), v1.rows(0, 2).into_owned()).unwrap();
    let p2 = CompressionProjector::new(sys("A2", 3), sys("E2", 2), v2.rows(0, 2).into_owned()).unwrap();
    let ch = projector_compression(&[p1, p2]).unwrap();
    assert!(!ch.is_tp());
    let choi = ch.choi().unwrap();
    let want = MultipartiteOperator::maximally_mixed(vec![sys("E1", 2), sys("E2", 2)]).unwrap();
    assert!(choi.output_marginal().unwrap().max_abs_diff(&want).unwrap() < 1e-12);
}

#[test]
fn projector_from_hermitian_projector() {
    let mut p = DMatrix::zeros(3, 3);
    p[(0, 0)] = c(0.5);
    p[(0, 2)] = c(0.5);
    p[(2, 0)] = c(0.5);
    p[(2, 2)] = c(0.5);
    let cp = CompressionProjector::from_projector(sys("A", 3), "E", &p).unwrap();
    assert_eq!(cp.output.dim(), 1);
    assert!(max_diff(&(cp.matrix.adjoint() * &cp.matrix), &p) < 1e-12);
    let mut bad = p.clone();
    bad[(1, 1)] = c(0.5);
    assert!(matches!(
        CompressionProjector::from_projector(sys("A", 3), "E", &bad),
        Err(Error::NotProjector(_))
    ));
}

#[test]
fn json_roundtrip_is_exact() {
    let ch = random_channel(vec![sys("A1", 2), sys("A2", 2)], sys("E", 3), 2, 21).unwrap();
    let s = ch.to_json().unwrap();
    let back = QuantumChannel::from_json(&s).unwrap();
    assert_eq!(back.kraus(), ch.kraus());
    assert_eq!(back.inputs(), ch.inputs());
    assert_eq!(back.to_json().unwrap(), s);
}

#[test]
fn json_rejects_wrong_sizes() {
    let s = r#"{"inputs":[2],"output":2,"kraus":[[[1,0],[0,0],[0,0]]]}"#;
    assert!(matches!(
        QuantumChannel::from_json(s),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn erasure_is_tp() {
    let ch = erasure(vec![sys("A", 2)], sys("E", 3), 0.25).unwrap();
    assert!(ch.is_tp());
    let out = ch
        .apply(&MultipartiteOperator::maximally_mixed(vec![sys("A", 2)]).unwrap())
        .unwrap();
    assert!((out.matrix()[(2, 2)].re - 0.25).abs() < 1e-15);
}
