use std::collections::HashSet;

use rand::seq::IndexedRandom;
use schottky_core::linalg::{self, c};
use schottky_core::sampling;
use schottky_core::schottky::{
    check_words, enumerate_reduced_words, fk_contains, phi_transfer, reduced_word_count, region_image,
    sample_interior_points, verify_schottky_with, Letter, QuadricRegion,
};
use schottky_core::{nori_build, CMatrix, ProjPoint, ReducedWord, SchottkyData, Status, SubspaceConfig, Tolerances};

fn nori(alpha: f64) -> SchottkyData {
    nori_build(3, 2, alpha, &SubspaceConfig::CoordinateDefault).unwrap()
}

/// `{phi_j > t}` written directly from generator `j`'s frame.
fn superlevel(data: &SchottkyData, j: usize, t: f64) -> QuadricRegion {
    let frame = &data.nori().unwrap().frames[j - 1];
    let size = frame.nrows();
    let inv = frame.clone().try_inverse().unwrap();
    let inner = CMatrix::from_fn(size, size, |r, col| {
        if r != col {
            linalg::ZERO
        } else if r < size / 2 {
            c(t - 1.0, 0.0)
        } else {
            c(t, 0.0)
        }
    });
    QuadricRegion::from_form(&(inv.adjoint() * inner * &inv)).unwrap()
}

#[test]
fn nori_groups_pass_every_axiom() {
    for alpha in [0.1, 0.2, 0.3, 0.45] {
        for g in [2, 3] {
            let data = nori_build(3, g, alpha, &SubspaceConfig::CoordinateDefault).unwrap();
            let report = verify_schottky_with(&data, 2000, 7, &Tolerances::default());
            assert_eq!(report.status, Status::Pass, "alpha {alpha}, g {g}: {:?}", report.first_failure());
        }
    }
    let wide = nori_build(5, 2, 0.2, &SubspaceConfig::CoordinateDefault).unwrap();
    assert_eq!(verify_schottky_with(&wide, 2000, 7, &Tolerances::default()).status, Status::Pass);
}

#[test]
fn transfer_formula_matches_region_images() {
    let mut rng = sampling::seeded_rng(2024);
    for alpha in [0.1, 0.2] {
        let data = nori(alpha);
        let params = data.nori().unwrap().clone();
        for j in 1..=2 {
            for t in [0.05, 0.3, 0.6, 0.9] {
                let image = region_image(&superlevel(&data, j, t), data.generator(j, 1)).unwrap();
                let threshold = phi_transfer(t, params.lambda);
                let mut checked = 0;
                for _ in 0..2500 {
                    let p = ProjPoint::random(&mut rng, 3);
                    let phi = params.phi(j, p.lift());
                    if (phi - threshold).abs() < 1e-9 {
                        continue;
                    }
                    assert_eq!(image.contains(&p), phi > threshold, "alpha {alpha}, j {j}, t {t}");
                    checked += 1;
                }
                assert!(checked > 2400);
            }
        }
    }
}

#[test]
fn words_land_in_predicted_regions_and_move_points() {
    let data = nori(0.2);
    let tol = Tolerances::default();
    let points = sample_interior_points(&data, 100, 11, &tol).unwrap();
    let words: Vec<ReducedWord> = enumerate_reduced_words(2, 5).collect();
    let report = check_words(&data, &words, &points, &tol).unwrap();
    assert_eq!(report.words, 484);
    assert_eq!(report.violation_count, 0, "{:?}", report.violations.first());
    let displacement = report.min_displacement.unwrap();
    assert!(displacement > 1e-3, "{displacement}");
}

#[test]
fn word_enumeration_matches_filtered_products() {
    let alphabet: Vec<Letter> =
        (1..=2).flat_map(|g| [Letter::new(g, 1).unwrap(), Letter::new(g, -1).unwrap()]).collect();
    let mut brute: HashSet<Vec<(usize, i8)>> = HashSet::new();
    let mut level: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..=5 {
        let mut next = Vec::new();
        for w in &level {
            if w.windows(2).all(|p| p[1] != p[0].inverse()) {
                brute.insert(w.iter().map(|l| (l.generator, l.sign)).collect());
            }
            for &l in &alphabet {
                let mut longer = w.clone();
                longer.push(l);
                next.push(longer);
            }
        }
        level = next;
    }
    let listed: HashSet<Vec<(usize, i8)>> =
        enumerate_reduced_words(2, 5).map(|w| w.letters().iter().map(|l| (l.generator, l.sign)).collect()).collect();
    assert_eq!(listed, brute);
    assert_eq!(brute.len(), reduced_word_count(2, 5));
    assert_eq!(reduced_word_count(2, 5), 485);
}

/// Points of `F_k` are `u(x)` with `|u| <= k` and `x` interior; a word of
/// length at least `2k + 2` must move all of them out of `F_k`.
#[test]
fn long_words_move_fk_off_itself() {
    let data = nori(0.2);
    let tol = Tolerances::default();
    let interior = sample_interior_points(&data, 12, 5, &tol).unwrap();
    let mut rng = sampling::seeded_rng(99);
    for k in 1..=2 {
        let short: Vec<ReducedWord> = enumerate_reduced_words(2, k).collect();
        let fk: Vec<ProjPoint> =
            short.iter().flat_map(|u| interior.iter().map(|x| u.apply(&data, x).unwrap())).collect();
        for p in &fk {
            assert!(fk_contains(&data, p, k, &tol).unwrap());
        }
        let long: Vec<ReducedWord> = enumerate_reduced_words(2, 2 * k + 3).filter(|w| w.len() >= 2 * k + 2).collect();
        let chosen: Vec<&ReducedWord> = long.choose_multiple(&mut rng, 120).collect();
        for w in chosen {
            for p in &fk {
                let q = w.apply(&data, p).unwrap();
                assert!(!fk_contains(&data, &q, k, &tol).unwrap(), "k {k}, word {w}");
            }
        }
    }
}

#[test]
fn fk_grows_with_k() {
    let data = nori(0.2);
    let tol = Tolerances::default();
    let mut rng = sampling::seeded_rng(31);
    let mut strict = 0;
    for _ in 0..200 {
        let p = ProjPoint::random(&mut rng, 3);
        let flags: Vec<bool> = (0..=4).map(|k| fk_contains(&data, &p, k, &tol).unwrap()).collect();
        assert!(flags.windows(2).all(|w| !w[0] || w[1]), "{flags:?}");
        strict += usize::from(flags[4] && !flags[0]);
    }
    assert!(strict > 0);
}
