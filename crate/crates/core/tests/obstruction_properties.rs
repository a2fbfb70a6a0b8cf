use schottky_core::linalg::{self, c};
use schottky_core::obstruction::{
    diagonal_candidate, exclusion_for, seeded_candidate, transplanted_nori, BridgeCase, HarnessVerdict, Violation,
    HARNESS_DEPTH,
};
use schottky_core::projective::dim_or_empty;
use schottky_core::sampling;
use schottky_core::schottky::{chain_contains, RegionRef, Side};
use schottky_core::{
    build_bridge, contradiction_harness, intersect, nori_build, subspace_exclusion_check, CMatrix, ProjMap, ProjPoint,
    ProjSubspace, SchottkyData, Status, SubspaceConfig, Tolerances, Verdict,
};

fn random_subspace(rng: &mut sampling::SampleRng, n: usize, dim: usize) -> ProjSubspace {
    ProjSubspace::from_columns(&sampling::gaussian_matrix(rng, n + 1, dim + 1)).unwrap()
}

fn jordan_lift(blocks: &[(f64, usize)]) -> CMatrix {
    let size: usize = blocks.iter().map(|b| b.1).sum();
    let mut m = CMatrix::zeros(size, size);
    let mut at = 0;
    for &(value, len) in blocks {
        for i in 0..len {
            m[(at + i, at + i)] = c(value, 0.0);
            if i + 1 < len {
                m[(at + i, at + i + 1)] = c(1.0, 0.0);
            }
        }
        at += len;
    }
    m
}

#[test]
fn bridges_of_random_maps_are_connected_and_cover_the_limit_set() {
    let mut rng = sampling::seeded_rng(404);
    let mut reached = 0.0;
    let mut count = 0.0;
    let mut direct = 0;
    for n in [2, 4] {
        for _ in 0..50 {
            let g = ProjMap::random_with_gap(&mut rng, n, 1.05);
            let bridge = build_bridge(&g).unwrap();
            let defects = bridge.attachment_defects().unwrap();
            assert!(defects.iter().all(|&d| d < 1e-9), "{defects:?}");
            assert!(bridge.limit_coverage(20, 3).unwrap() < 1e-8);
            assert!(!bridge.hypothesis_verified);
            reached += bridge.reached_fraction();
            count += 1.0;
            let spread = bridge.moduli.last().unwrap() / bridge.moduli[0];
            for w in bridge.witnesses.iter().filter(|w| w.reached) {
                assert!(w.start_clearance > 1e-12 && w.distance < 1e-4);
                if spread.powi(w.exponent.unsigned_abs() as i32) < 1e6 {
                    let image = g.pow(w.exponent).apply(&w.start).unwrap();
                    assert!(image.fs_distance(&w.target).unwrap() < 2e-4);
                    direct += 1;
                }
            }
        }
    }
    assert!(reached / count >= 0.9, "{}", reached / count);
    assert!(direct > 100, "{direct}");
    println!("reached fraction {:.4}, {direct} witnesses replayed by matrix powers", reached / count);
}

#[test]
fn bridges_of_structured_maps() {
    let conj = sampling::gaussian_matrix(&mut sampling::seeded_rng(8), 5, 5);
    let inv = conj.clone().try_inverse().unwrap();
    let lifts = [
        linalg::real_diagonal(&[2.0, 1.0, 1.0]),
        linalg::real_diagonal(&[2.0, 2.0, 1.0]),
        jordan_lift(&[(3.0, 2), (1.0, 1)]),
        jordan_lift(&[(1.0, 3)]),
        &conj * jordan_lift(&[(4.0, 2), (2.0, 1), (1.0, 2)]) * &inv,
        &conj * linalg::real_diagonal(&[5.0, 3.0, 3.0, 3.0, 0.5]) * &inv,
    ];
    for lift in lifts {
        let g = ProjMap::new(lift).unwrap();
        let bridge = match build_bridge(&g) {
            Ok(b) => b,
            Err(e) => {
                // A single unipotent class has no bridge.
                assert!(g.modulus_decomposition().unwrap().k() < 2, "{e}");
                continue;
            }
        };
        assert!(bridge.is_connected(1e-9).unwrap(), "{:?}", bridge.attachment_defects());
        assert!(bridge.limit_coverage(20, 1).unwrap() < 1e-8);
        let expected = match bridge.pivot {
            1 => BridgeCase::Lowest,
            p if p == bridge.dims.len() => BridgeCase::Highest,
            _ => BridgeCase::Interior,
        };
        assert_eq!(bridge.case, expected);
    }
}

#[test]
fn lines_in_the_plane_always_meet() {
    let mut rng = sampling::seeded_rng(1000);
    for _ in 0..1000 {
        let a = random_subspace(&mut rng, 2, 1);
        let b = random_subspace(&mut rng, 2, 1);
        let common = intersect(&a, &b).unwrap();
        assert!(dim_or_empty(&common) >= 0);
        let p = common.unwrap().sample(&mut rng);
        assert!(a.distance_to(&p).unwrap() < 1e-9 && b.distance_to(&p).unwrap() < 1e-9);
    }
}

/// Any `n`-dimensional subspace of P^{2n} meets its image, so the check
/// always reaches a witness; smaller subspaces are reported as such.
#[test]
fn exclusion_always_forces_an_intersection() {
    let tol = Tolerances::default();
    let mut rng = sampling::seeded_rng(77);
    for (n, seed) in [(2, 1), (2, 3), (4, 5), (4, 7)] {
        let data = transplanted_nori(n, 2, 0.2, seed).unwrap();
        for _ in 0..25 {
            for side in [Side::R, Side::S] {
                let region = RegionRef { generator: 1, side };
                let v = random_subspace(&mut rng, n, n / 2);
                let verdict = exclusion_for(&data, region, &v, 2, &tol).unwrap();
                let w = verdict.witness().expect("dimension count forces a point");
                assert_eq!(w.dim_sum, n);
                assert!(v.distance_to(&w.intersection).unwrap() < 1e-8);
                assert!(w.moved.distance_to(&w.intersection).unwrap() < 1e-8);
                if n > 2 {
                    let small = random_subspace(&mut rng, n, n / 2 - 1);
                    assert!(matches!(
                        exclusion_for(&data, region, &small, 2, &tol).unwrap(),
                        Verdict::NoForcedIntersection { dim_sum, required } if dim_sum == n - 2 && required == n
                    ));
                }
            }
        }
    }
}

fn check_violation(data: &SchottkyData, violation: &Violation) {
    match violation {
        Violation::RegionsMeet { first, second, point, .. } => {
            assert!(data.region(*first).value_at(point) <= 1e-9);
            assert!(data.region(*second).value_at(point) <= 1e-9);
        }
        Violation::MappingBroken { generator, point, image } => {
            let r = data.region(RegionRef { generator: *generator, side: Side::R });
            let s = data.region(RegionRef { generator: *generator, side: Side::S });
            assert!(r.value_at(point) > 0.0 && s.value_at(image) > 0.0);
            assert!(data.generator(*generator, 1).apply(point).unwrap().fs_distance(image).unwrap() < 1e-9);
        }
    }
}

#[test]
fn transplanted_nori_yields_an_explicit_contradiction() {
    for seed in 0..6 {
        let data = transplanted_nori(2, 2, 0.2, seed).unwrap();
        let verdict = subspace_exclusion_check(&data).unwrap();
        let w = verdict.witness().unwrap_or_else(|| panic!("seed {seed}: {verdict:?}"));
        check_violation(&data, &w.violation);
    }
}

fn check_harness_witness(data: &SchottkyData) {
    let report = contradiction_harness(data);
    assert!(report.has_witness(), "{}", report.summary);
    assert_eq!(report.depth, HARNESS_DEPTH);
    match &report.verdict {
        HarnessVerdict::AxiomFailure { check } => assert_eq!(check.status, Status::Fail),
        HarnessVerdict::BridgeInBothChains { generator, r_point, s_point, .. } => {
            assert!(chain_contains(data, *generator, Side::R, HARNESS_DEPTH, r_point).unwrap());
            assert!(chain_contains(data, *generator, Side::S, HARNESS_DEPTH, s_point).unwrap());
            let bridge = report.generators[generator - 1].bridge.as_ref().unwrap();
            assert!(bridge.distance_to(r_point).unwrap() < 1e-8);
            assert!(bridge.distance_to(s_point).unwrap() < 1e-8);
        }
        HarnessVerdict::SubspaceContradiction { witness } => check_violation(data, &witness.violation),
        HarnessVerdict::SideMissed { generator, limit_point, .. } => {
            let bridge = report.generators[generator - 1].bridge.as_ref().unwrap();
            assert!(bridge.distance_to(limit_point).unwrap() < 1e-8);
        }
        other => panic!("no witness: {other:?}"),
    }
}

#[test]
fn harness_finds_witnesses_on_plane_candidates() {
    check_harness_witness(&diagonal_candidate().unwrap());
    for seed in 0..12 {
        check_harness_witness(&seeded_candidate(2, seed).unwrap());
    }
}

#[test]
fn diagonal_candidate_bridge_meets_both_chains() {
    let data = diagonal_candidate().unwrap();
    let report = contradiction_harness(&data);
    assert!(matches!(report.verdict, HarnessVerdict::BridgeInBothChains { generator: 1, .. }), "{}", report.summary);
    let e2 = ProjPoint::basis(2, 1);
    let bridge = report.generators[0].bridge.as_ref().unwrap();
    assert!(bridge.distance_to(&e2).unwrap() < 1e-12);
}

#[test]
fn odd_dimensional_nori_is_not_applicable() {
    let data = nori_build(3, 2, 0.2, &SubspaceConfig::CoordinateDefault).unwrap();
    let report = contradiction_harness(&data);
    assert!(!report.has_witness());
    assert!(matches!(report.verdict, HarnessVerdict::NotApplicable { .. }));
    assert_eq!(report.summary, "not applicable: odd dimension");
    assert_eq!(report.verification.status, Status::Pass);
}
