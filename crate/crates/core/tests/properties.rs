mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use quotient_bounds::bounds::{
    canonical_m, duan_zhou_bound, mn_matrix, mn_rho_closed_form, refined_duan_zhou, upper_bound,
    Equality, MnParams,
};
use quotient_bounds::eigen::dense_eigenvalues;
use quotient_bounds::extremal::{
    block_statistics, bound_matrix, canonical_form, construct_a0, enumerate_staircase,
    is_staircase, verify_conjecture, ExtremalParams, SearchOptions,
};
use quotient_bounds::partition::{characteristic_matrix, is_equitable, quotient_matrix};
use quotient_bounds::rooted::{
    is_rooted_matrix, q_transform, rooted_tol, RootedViolation, Rootedness,
};
use quotient_bounds::spectral::{
    rho_r_rooted, spectral_radius_nonneg, Method, PowerOptions,
};
use quotient_bounds::{Matrix, Partition};
use rand::seq::SliceRandom;
use rand::Rng;

fn opts() -> PowerOptions {
    PowerOptions::default()
}

fn to_dense(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.data())
}

#[test]
fn quotient_matches_characteristic_formula() {
    let mut g = rng(11);
    for _ in 0..500 {
        let n = g.gen_range(1..=9);
        let ell = g.gen_range(1..=n);
        let c = random_nonneg(&mut g, n, 5.0, 0.7);
        let p = random_partition(&mut g, n, ell);
        let s = to_dense(&characteristic_matrix(&p));
        let sts = s.transpose() * &s;
        let inv = DMatrix::from_diagonal(&sts.diagonal().map(|x| 1.0 / x));
        let want = inv * s.transpose() * to_dense(&c) * &s;
        let got = quotient_matrix(&c, &p).unwrap();
        for a in 0..ell {
            for b in 0..ell {
                assert!((got[(a, b)] - want[(a, b)]).abs() <= 1e-12, "({a},{b})");
            }
        }
    }
}

#[test]
fn identity_partition_is_equitable() {
    let mut g = rng(12);
    for _ in 0..300 {
        let n = g.gen_range(1..=8);
        let c = random_nonneg(&mut g, n, 5.0, 0.6);
        let chk = is_equitable(&c, &Partition::identity(n), None).unwrap();
        assert!(chk.equitable);
        assert_eq!(chk.quotient, c);
    }
}

#[test]
fn rooted_check_is_sound() {
    let mut g = rng(13);
    let (mut accepted, mut rejected) = (0, 0);
    for _ in 0..2000 {
        let n = g.gen_range(2..=7);
        let cp = if g.gen_bool(0.5) {
            random_dominated_pair(&mut g, n).0
        } else {
            Matrix::from_fn(n, n, |_, _| g.gen_range(-2.0..5.0))
        };
        match is_rooted_matrix(&cp).unwrap() {
            Rootedness::Rooted(cert) => {
                accepted += 1;
                let floor = -rooted_tol(&cp);
                assert!(cert.transformed.data().iter().all(|&x| x >= floor), "{cp:?}");
            }
            Rootedness::NotRooted(v) => {
                rejected += 1;
                assert!(!v.is_empty());
                let r = cp.row_sums();
                for viol in v {
                    match viol {
                        RootedViolation::NegativeBottomEntry { col, .. } => assert!(cp[(n - 1, col - 1)] < 0.0),
                        RootedViolation::ColumnNotRooted { row, col, .. } => {
                            assert!(cp[(row - 1, col - 1)] < cp[(n - 1, col - 1)])
                        }
                        RootedViolation::RowSumNotRooted { row, .. } => assert!(r[row - 1] < r[n - 1]),
                    }
                }
            }
        }
    }
    assert!(accepted > 500 && rejected > 500);
}

#[test]
fn shift_commutes_with_q_transform() {
    let mut g = rng(14);
    for _ in 0..500 {
        let n = g.gen_range(2..=7);
        let cp = Matrix::from_fn(n, n, |_, _| g.gen_range(-5..=5) as f64);
        let d = g.gen_range(-4..=4) as f64;
        let lhs = q_transform(&cp.shift_diagonal(d)).unwrap();
        let rhs = q_transform(&cp).unwrap().shift_diagonal(d);
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn rooted_eigenvector_survives_shift() {
    let mut g = rng(15);
    for _ in 0..500 {
        let n = g.gen_range(2..=7);
        let (cp, _) = random_dominated_pair(&mut g, n);
        let rr = rho_r_rooted(&cp, &opts()).unwrap();
        let (lambda, v) = (rr.value.unwrap(), rr.eigenvector.unwrap());
        let d = g.gen_range(-3.0..3.0);
        let av = cp.shift_diagonal(d).mul_vec(&v).unwrap();
        let scale = 1.0 + cp.max_abs() + d.abs();
        for (x, y) in av.iter().zip(&v) {
            assert!((x - (lambda + d) * y).abs() <= 1e-10 * scale, "{cp:?}");
        }
        let oracle = oracle_rho_r(&cp).unwrap();
        assert!((lambda - oracle).abs() <= 1e-7 * (1.0 + oracle.abs()), "{lambda} vs {oracle}");
    }
}

#[test]
fn positive_bottom_row_gives_positive_eigenvector() {
    let mut g = rng(16);
    for _ in 0..1000 {
        let n = g.gen_range(2..=7);
        let (mut cp, _) = random_dominated_pair(&mut g, n);
        let lift = g.gen_range(0.1..1.0);
        for i in 0..n {
            for j in 0..n - 1 {
                cp[(i, j)] += lift;
            }
        }
        let v = rho_r_rooted(&cp, &opts()).unwrap().eigenvector.unwrap();
        assert!(v.iter().all(|&x| x > 0.0), "{cp:?} -> {v:?}");
        let r = cp.row_sums();
        for i in 0..n - 1 {
            if r[i] > r[n - 1] + 1e-6 {
                assert!(v[i] > v[n - 1], "row {i}: {v:?}");
            }
        }
    }
}

#[test]
fn collatz_wielandt_bracket() {
    let mut g = rng(17);
    for _ in 0..1000 {
        let n = g.gen_range(1..=10);
        let c = random_nonneg(&mut g, n, 5.0, 0.5);
        let res = spectral_radius_nonneg(&c, &opts()).unwrap();
        assert!(res.cw_lower <= res.value && res.value <= res.cw_upper);
        if res.method == Method::Power {
            assert!(res.cw_upper - res.cw_lower <= opts().tol * (res.cw_upper + 1.0).max(1.0));
        }
        let oracle = oracle_spectral_radius(&c);
        assert!((res.value - oracle).abs() <= 1e-7 * (1.0 + oracle), "{} vs {oracle}", res.value);
    }
}

#[test]
fn q_similarity_preserves_spectrum() {
    let mut g = rng(18);
    for _ in 0..500 {
        let n = g.gen_range(2..=8);
        let c = Matrix::from_fn(n, n, |_, _| g.gen_range(-3.0..3.0));
        let mut a: Vec<_> = dense_eigenvalues(&c).unwrap();
        let mut b: Vec<_> = dense_eigenvalues(&q_transform(&c).unwrap()).unwrap();
        assert_eq!(a.len(), n);
        let tol = 1e-7 * (1.0 + c.max_abs());
        while let Some(x) = a.pop() {
            let (k, dist) = b
                .iter()
                .enumerate()
                .map(|(k, y)| (k, (x.re - y.re).hypot(x.im - y.im)))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            assert!(dist <= tol, "unmatched eigenvalue {x:?} in {c:?}");
            b.swap_remove(k);
        }
    }
}

#[test]
fn dense_eigenvalues_match_oracle() {
    let mut g = rng(19);
    for _ in 0..500 {
        let n = g.gen_range(1..=10);
        let c = Matrix::from_fn(n, n, |_, _| g.gen_range(-4.0..4.0));
        let ours = dense_eigenvalues(&c).unwrap();
        let mut theirs = oracle_eigenvalues(&c);
        let tol = 1e-6 * (1.0 + c.max_abs());
        for x in ours {
            let (k, dist) = theirs
                .iter()
                .enumerate()
                .map(|(k, &(re, im))| (k, (x.re - re).hypot(x.im - im)))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            assert!(dist <= tol, "{x:?} in {c:?}");
            theirs.swap_remove(k);
        }
    }
}

#[test]
fn canonical_upper_bound_dominates() {
    let mut g = rng(20);
    let mut checked = 0;
    for _ in 0..5000 {
        let n = g.gen_range(2..=12);
        let ell = g.gen_range(1..=n);
        let c = random_nonneg(&mut g, n, 5.0, 0.7);
        let p = random_partition(&mut g, n, ell);
        let cm = canonical_m(&c, &p).unwrap();
        if !cm.rooted {
            continue;
        }
        checked += 1;
        let rep = upper_bound(&c, &p, &cm.m, &opts()).unwrap();
        let rho = spectral_radius_nonneg(&c, &opts()).unwrap().value;
        assert!(rep.bound >= rho - 1e-8, "bound {} < rho {rho}", rep.bound);
    }
    assert!(checked >= 1000, "only {checked} rooted instances");
}

#[test]
fn equality_diagnosis_is_sound_on_integer_matrices() {
    let mut g = rng(21);
    let (mut eq, mut strict) = (0, 0);
    for _ in 0..3000 {
        let n = g.gen_range(2..=7);
        let ell = g.gen_range(1..=n);
        let c = Matrix::from_fn(n, n, |_, _| g.gen_range(0..=3) as f64);
        if !c.is_irreducible() {
            continue;
        }
        let p = random_partition(&mut g, n, ell);
        let cm = canonical_m(&c, &p).unwrap();
        if !cm.rooted {
            continue;
        }
        let rep = upper_bound(&c, &p, &cm.m, &opts()).unwrap();
        let rho = oracle_spectral_radius(&c);
        match rep.equality {
            Equality::Equality => {
                eq += 1;
                assert!((rho - rep.bound).abs() <= 1e-7, "claimed equality: {rho} vs {}", rep.bound);
            }
            Equality::Strict => {
                strict += 1;
                assert!(rho < rep.bound - 1e-10, "claimed strict: {rho} vs {}", rep.bound);
            }
            Equality::Undetermined => {}
        }
    }
    assert!(eq > 20 && strict > 200, "{eq} equality, {strict} strict");
}

#[test]
fn refined_row_sum_bound_is_valid_and_sharper() {
    let mut g = rng(22);
    for _ in 0..2000 {
        let n = g.gen_range(1..=9);
        let ell = g.gen_range(1..=n);
        let c = random_nonneg(&mut g, n, 5.0, 0.7);
        let dz = duan_zhou_bound(&c, ell).unwrap();
        let rdz = refined_duan_zhou(&c, ell).unwrap();
        let rho = oracle_spectral_radius(&c);
        assert!(rho <= rdz.bound + 1e-8 && rho <= rdz.two_parameter + 1e-8);
        assert!(rdz.bound <= dz.bound + 1e-10 * (1.0 + dz.bound));
        if ell == 1 {
            let r1 = c.row_sums().into_iter().fold(0.0, f64::max);
            assert!((dz.bound - r1).abs() <= 1e-12 * (1.0 + r1));
        }
    }
}

#[test]
fn mn_closed_form_matches_oracle() {
    let mut g = rng(23);
    for _ in 0..100 {
        let n = g.gen_range(2..=8);
        let f2 = g.gen_range(0.0..3.0);
        let f1 = f2 + g.gen_range(0.0..3.0);
        let rn = g.gen_range(0.0..10.0);
        let mut r: Vec<f64> = (0..n - 1).map(|_| rn + g.gen_range(0.0..10.0)).collect();
        r.push(rn);
        let p = MnParams { n, d: g.gen_range(0.0..5.0), f1, f2, r };
        let closed = mn_rho_closed_form(&p).unwrap();
        let oracle = oracle_rho_r(&mn_matrix(&p).unwrap()).unwrap();
        assert!((closed - oracle).abs() <= 1e-8 * (1.0 + closed), "{p:?}: {closed} vs {oracle}");
    }
}

/// Partitions of `e` into at most `n` parts, each at most `n`.
fn bounded_partitions(n: usize, e: usize) -> usize {
    fn count(e: usize, parts: usize, max: usize) -> usize {
        if e == 0 {
            return 1;
        }
        if parts == 0 || max == 0 {
            return 0;
        }
        (1..=max.min(e)).map(|k| count(e - k, parts - 1, k)).sum()
    }
    count(e, n, n)
}

#[test]
fn staircase_enumeration_counts() {
    for n in 1..=7 {
        for e in 0..=n * n {
            let mut count = 0;
            for a in enumerate_staircase(n, e, false).unwrap() {
                count += 1;
                assert_eq!(a.sum() as usize, e);
                assert!(is_staircase(&a, false));
            }
            assert_eq!(count, bounded_partitions(n, e), "n={n} e={e}");
        }
    }
}

#[test]
fn search_never_violates_bound_matrix() {
    let mut checked = 0;
    for n in 3..=6 {
        for zt in [false, true] {
            let cap = if zt { n * n - n } else { n * n };
            for e in 4..=cap.min(24) {
                let p = ExtremalParams::decompose(n, e, zt);
                if p.t < 2 || p.c + 1 > n {
                    continue;
                }
                for a in enumerate_staircase(n, e, zt).unwrap() {
                    let st = block_statistics(&a, p.c, zt).unwrap();
                    let Ok(m) = bound_matrix(&st, zt) else { continue };
                    if !is_rooted_matrix(&m).unwrap().is_rooted() {
                        continue;
                    }
                    let bound = rho_r_rooted(&m, &opts()).unwrap().value.unwrap();
                    let rho = oracle_spectral_radius(&a);
                    assert!(rho <= bound + 1e-8, "{a:?}: {rho} > {bound}");
                    checked += 1;
                }
                let rep = verify_conjecture(n, e, zt, &SearchOptions::default()).unwrap();
                assert_eq!(rep.bound_violations, 0);
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn a0_radius_lies_between_cores() {
    for c in 1..=7usize {
        for zt in [false, true] {
            let tmax = if zt { 2 * c - 1 } else { 2 * c };
            for t in 2..=tmax {
                let a = construct_a0(&ExtremalParams::new(c + 2, c, t, zt).unwrap()).unwrap();
                let rho = oracle_spectral_radius(&a);
                let lo = if zt { c as f64 - 1.0 } else { c as f64 };
                assert!(lo < rho && rho < lo + 1.0, "c={c} t={t} zt={zt}: {rho}");
            }
        }
    }
}

#[test]
fn canonical_form_ignores_relabelling() {
    let mut g = rng(24);
    for n in 3..=6 {
        for e in [n, 2 * n, n * n / 2 + 1] {
            for a in enumerate_staircase(n, e, false).unwrap().take(30) {
                let canon = canonical_form(&a).unwrap();
                for _ in 0..3 {
                    let mut perm: Vec<usize> = (0..n).collect();
                    perm.shuffle(&mut g);
                    let b = a.permute(&perm);
                    assert_eq!(canonical_form(&b).unwrap(), canon);
                    assert_eq!(canonical_form(&b.transpose()).unwrap(), canon);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matrix_text_round_trips(
        (r, c, data) in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), proptest::collection::vec(-1e6f64..1e6, r * c))
        })
    ) {
        let m = Matrix::from_fn(r, c, |i, j| data[i * c + j]);
        let back: Matrix = m.to_text().parse().unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn equitable_quotient_keeps_radius(seed in any::<u64>(), n in 2usize..8) {
        let mut g = rng(seed);
        let ell = g.gen_range(1..=n);
        let p = random_partition(&mut g, n, ell);
        let b = random_nonneg(&mut g, ell, 4.0, 0.8);
        let c = random_equitable(&mut g, &p, &b);
        let chk = is_equitable(&c, &p, None).unwrap();
        prop_assert!(chk.equitable);
        let r1 = spectral_radius_nonneg(&c, &opts()).unwrap().value;
        let r2 = spectral_radius_nonneg(&chk.quotient, &opts()).unwrap().value;
        prop_assert!((r1 - r2).abs() <= 1e-8);
    }
}
