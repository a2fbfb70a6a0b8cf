use num_bigint::BigUint;
use num_rational::Ratio;
use schottky_core::asymptotics::{binom, jordan_power, k_index, uniqueness_check, verify_decay, WITNESS_STEP};
use schottky_core::linalg::{c, jordan_block, real_diagonal, real_vector, CMatrix, CVector};
use schottky_core::sampling::{gaussian_vector, seeded_rng, unit_phase};
use schottky_core::{Tolerances, C64};

/// `C(m, l) / C(m, k)` as the product `prod_{j=l}^{k-1} (j+1)/(m-j)`, and the
/// bound `(k/(m-l))^{k-l}`, both exact.
fn ratio_and_bound(m: u64, k: u64, l: u64) -> (Ratio<BigUint>, Ratio<BigUint>) {
    let mut ratio = Ratio::from_integer(BigUint::from(1u32));
    for j in l..k {
        ratio *= Ratio::new(BigUint::from(j + 1), BigUint::from(m - j));
    }
    let base = Ratio::new(BigUint::from(k), BigUint::from(m - l));
    let mut bound = Ratio::from_integer(BigUint::from(1u32));
    for _ in l..k {
        bound *= &base;
    }
    (ratio, bound)
}

/// Exact `C(m, l)` by Pascal's rule, for checking the product form.
fn pascal_row(m: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::from(1u32)];
    for _ in 0..m {
        let mut next = vec![BigUint::from(1u32); row.len() + 1];
        for i in 1..row.len() {
            next[i] = &row[i - 1] + &row[i];
        }
        row = next;
    }
    row
}

/// The bound is strict exactly when `m > k + l` (and `k - l >= 2`), an
/// equality when `m = k + l` or `k = l + 1`, and false below that, so it holds
/// for all large `m` as the limit argument needs.
#[test]
fn binomial_ratio_bound_is_exact() {
    let mut counts = [0usize; 3];
    for m in 2..=1000u64 {
        let k_max = if m <= 40 { m - 1 } else { 12 };
        for k in 1..=k_max {
            for l in 0..k {
                let (ratio, bound) = ratio_and_bound(m, k, l);
                let expected = if k - l == 1 || m == k + l {
                    std::cmp::Ordering::Equal
                } else if m > k + l {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                };
                assert_eq!(ratio.cmp(&bound), expected, "m={m} k={k} l={l}");
                counts[(expected as i8 + 1) as usize] += 1;
                if m >= 2 * k {
                    assert!(ratio <= bound);
                }
            }
        }
    }
    assert!(counts.iter().all(|&c| c > 0), "{counts:?}");
}

#[test]
fn product_form_matches_pascal() {
    for m in [7usize, 30, 100] {
        let row = pascal_row(m);
        for k in 1..m.min(10) {
            for l in 0..k {
                let (ratio, _) = ratio_and_bound(m as u64, k as u64, l as u64);
                assert_eq!(ratio, Ratio::new(row[l].clone(), row[k].clone()));
            }
        }
    }
    assert_eq!(binom(100, 1) / binom(100, 2), 100.0 / 4950.0);
}

fn direct_power(t: &CMatrix, m: u64) -> CMatrix {
    let mut p = CMatrix::identity(t.nrows(), t.ncols());
    for _ in 0..m {
        p = &p * t;
    }
    p
}

#[test]
fn jordan_closed_form_matches_direct_powers() {
    let mut rng = seeded_rng(3);
    for size in 2..=6 {
        for lambda in [c(1.0, 0.0), unit_phase(&mut rng), c(0.9, 0.2), c(-1.05, 0.1)] {
            let block = jordan_block(lambda, size);
            for m in (0..=200).step_by(7).chain([199, 200]) {
                let direct = direct_power(&block, m);
                let closed = jordan_power(lambda, size, m);
                let err = (&closed - &direct).norm() / direct.norm();
                assert!(err < 1e-10, "size={size} lambda={lambda} m={m} err={err}");
            }
        }
    }
}

#[test]
fn decay_tables_reach_threshold() {
    let half = real_diagonal(&[0.5, 0.5, 0.5]);
    let table = verify_decay(&half, c(1.0, 0.0), 0, &real_vector(&[1.0, 0.0, 0.0]), 60).unwrap();
    assert_eq!(table.first_below, Some(27));

    let jordan = jordan_block(c(0.5, 0.0), 2);
    let table = verify_decay(&jordan, c(1.0, 0.0), 1, &real_vector(&[0.0, 1.0]), 200).unwrap();
    assert!(table.first_below.is_some());
    assert!(table.final_norm() < 1e-8);

    let zero = CMatrix::zeros(2, 2);
    let table = verify_decay(&zero, c(1.0, 0.0), 2, &real_vector(&[1.0, 1.0]), 5).unwrap();
    assert!(table.rows.iter().all(|r| r.norm == 0.0));
}

fn assert_unique(v: &CVector, t: &CMatrix, expected: usize) {
    let report = k_index(v, t).unwrap();
    assert_eq!(report.k, expected);
    assert!(report.k < report.max_block);
    assert!(report.residual < 1e-6, "residual {}", report.residual);
    let check = uniqueness_check(v, t, report.k, WITNESS_STEP, &Tolerances::default());
    assert!(check.passed(), "{check:?}");
}

#[test]
fn k_index_is_unique_on_instance_families() {
    let mut rng = seeded_rng(11);
    for size in 2..=5usize {
        let t = jordan_block(unit_phase(&mut rng), size);
        for top in 0..size {
            let mut v = CVector::zeros(size);
            v[0] = c(1.0, 0.0);
            v[top] = c(1.0, 0.5);
            assert_unique(&v, &t, top);
        }
    }
    for size in 2..=5usize {
        let phases: Vec<C64> = (0..size).map(|_| unit_phase(&mut rng)).collect();
        let t = schottky_core::linalg::diagonal(&phases);
        assert_unique(&gaussian_vector(&mut rng, size), &t, 0);
    }
}
