mod support;

use consistency_core::distributions::*;

#[test]
fn normal_matches_series_oracle() {
    for i in -80..=80 {
        let x = i as f64 / 10.0;
        let d = (std_normal_cdf(x) - support::normal_cdf(x)).abs();
        assert!(d < 1e-12, "x = {x}: {d}");
    }
    assert!((std_normal_quantile(0.975).unwrap() - support::normal_quantile(0.975)).abs() < 1e-12);
    assert!((std_normal_quantile(0.975).unwrap() - 1.959963984540054).abs() < 1e-12);
}

#[test]
fn normal_quantile_domain() {
    for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
        assert!(std_normal_quantile(p).is_err(), "{p}");
    }
}

#[test]
fn t_matches_closed_forms() {
    for nu in [1u32, 2, 3, 4, 5, 7, 10, 15, 30] {
        for i in -30..=30 {
            let x = i as f64 / 5.0;
            let d = (student_t_cdf(x, nu as f64).unwrap() - support::t_cdf(x, nu)).abs();
            assert!(d < 1e-12, "nu = {nu}, x = {x}: {d}");
        }
    }
    assert!((student_t_cdf(1.0, 1.0).unwrap() - 0.75).abs() < 1e-15);
}

#[test]
fn t_quantile_inverts_oracle() {
    let q = student_t_quantile(0.975, 10.0).unwrap();
    assert!((support::t_cdf(q, 10) - 0.975).abs() < 1e-12);
    assert!((q - 2.228138851986274).abs() < 1e-9);
}

#[test]
fn t_approaches_normal() {
    for i in -3..=3 {
        let x = i as f64;
        assert!((student_t_cdf(x, 1e6).unwrap() - std_normal_cdf(x)).abs() < 1e-3);
    }
}

#[test]
fn f_matches_binomial_oracle() {
    for (d1, d2) in [(2, 2), (2, 10), (4, 6), (6, 4), (10, 20), (20, 30), (8, 8)] {
        for i in 0..=40 {
            let x = i as f64 / 8.0;
            let d =
                (f_cdf(x, d1 as f64, d2 as f64).unwrap() - support::f_cdf_even(x, d1, d2)).abs();
            assert!(d < 1e-12, "F({d1},{d2}) at {x}: {d}");
        }
    }
}

#[test]
fn f_identities() {
    for d in [1.0, 3.0, 9.0, 29.0] {
        assert!((f_cdf(1.0, d, d).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(f_cdf(0.0, d, 2.0 * d).unwrap(), 0.0);
    }
    for p in [0.01, 0.1, 0.5, 0.9, 0.975] {
        let a = f_quantile(p, 5.0, 12.0).unwrap();
        let b = f_quantile(1.0 - p, 12.0, 5.0).unwrap();
        assert!((a - 1.0 / b).abs() < 1e-9 * a.max(1.0), "{p}");
    }
}

#[test]
fn chi_square_matches_closed_forms() {
    for nu in 1u32..=12 {
        for i in 0..=60 {
            let x = i as f64 / 2.0;
            let d = (chi_square_cdf(x, nu as f64).unwrap() - support::chi2_cdf(x, nu)).abs();
            assert!(d < 1e-12, "nu = {nu}, x = {x}: {d}");
        }
    }
    assert!((chi_square_cdf(2.0 * 2f64.ln(), 2.0).unwrap() - 0.5).abs() < 1e-15);
    let z = std_normal_quantile(0.975).unwrap();
    assert!((chi_square_quantile(0.95, 1.0).unwrap() - z * z).abs() < 1e-9);
}

#[test]
fn quantile_round_trips() {
    let ps = [
        1e-6,
        1e-3,
        0.01,
        0.05,
        0.2,
        0.5,
        0.8,
        0.95,
        0.99,
        0.999,
        1.0 - 1e-6,
    ];
    for &p in &ps {
        assert!((std_normal_cdf(std_normal_quantile(p).unwrap()) - p).abs() < 1e-12);
        for df in [1.0, 2.5, 7.0, 40.0] {
            let t = student_t_quantile(p, df).unwrap();
            assert!(
                (student_t_cdf(t, df).unwrap() - p).abs() < 1e-10,
                "t {p} {df}"
            );
            let c = chi_square_quantile(p, df).unwrap();
            assert!(
                (chi_square_cdf(c, df).unwrap() - p).abs() < 1e-10,
                "chi2 {p} {df}"
            );
            let f = f_quantile(p, df, 2.0 * df + 1.0).unwrap();
            assert!(
                (f_cdf(f, df, 2.0 * df + 1.0).unwrap() - p).abs() < 1e-10,
                "F {p} {df}"
            );
        }
    }
}

#[test]
fn cdfs_are_monotone() {
    let mut prev = [0.0f64; 4];
    for i in 0..=400 {
        let x = i as f64 / 20.0;
        let now = [
            std_normal_cdf(x - 10.0),
            student_t_cdf(x - 10.0, 3.0).unwrap(),
            f_cdf(x, 3.0, 7.0).unwrap(),
            chi_square_cdf(x, 5.0).unwrap(),
        ];
        for (a, b) in prev.iter().zip(&now) {
            assert!(*b >= *a && (0.0..=1.0).contains(b));
        }
        prev = now;
    }
}

#[test]
fn u_pmf_matches_enumeration() {
    for n in 2..=12 {
        for n_a in 1..n {
            let n_b = n - n_a;
            let dp = exact_u_pmf(n_a, n_b).unwrap();
            let bf = support::brute_u_pmf(n_a, n_b);
            assert_eq!(dp.probabilities.len(), bf.len());
            for (a, b) in dp.probabilities.iter().zip(&bf) {
                assert!((a - b).abs() < 1e-12, "({n_a},{n_b})");
            }
        }
    }
    let p = exact_u_pmf(2, 2).unwrap();
    let expect = [1.0, 1.0, 2.0, 1.0, 1.0].map(|c| c / 6.0);
    for (a, b) in p.probabilities.iter().zip(expect) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn t_pmf_matches_enumeration() {
    for n in 1..=15 {
        let dp = exact_t_pmf(n).unwrap();
        let bf = support::brute_t_pmf(n);
        assert_eq!(dp.probabilities.len(), bf.len());
        for (a, b) in dp.probabilities.iter().zip(&bf) {
            assert!((a - b).abs() < 1e-12, "n = {n}");
        }
    }
    assert_eq!(exact_t_pmf(2).unwrap().probabilities, vec![0.25; 4]);
}

#[test]
fn critical_values() {
    assert_eq!(u_critical(3, 3, 0.05).unwrap(), None);
    assert_eq!(u_critical(1, 1, 0.5).unwrap(), None);
    assert_eq!(t_critical(5, 0.05).unwrap(), None);
    // largest u with 2·P(U ≤ u) ≤ α, straight from the enumerated pmf
    for (n_a, n_b) in [(8, 8), (5, 7), (4, 8), (6, 6)] {
        let pmf = support::brute_u_pmf(n_a, n_b);
        let mut cum = 0.0;
        let mut expect = None;
        for (u, p) in pmf.iter().enumerate() {
            cum += p;
            if 2.0 * cum <= 0.05 + 1e-12 {
                expect = Some(u);
            }
        }
        assert_eq!(u_critical(n_a, n_b, 0.05).unwrap(), expect, "({n_a},{n_b})");
    }
}

#[test]
fn caps() {
    assert!(matches!(
        exact_u_pmf(20, 21),
        Err(DistError::CapExceeded { .. })
    ));
    assert!(exact_u_pmf(20, 20).is_ok());
    assert!(matches!(
        exact_t_pmf(61),
        Err(DistError::CapExceeded { .. })
    ));
    assert!(exact_t_pmf(60).is_ok());
    let big = exact_t_pmf_with_cap(100, 100).unwrap();
    assert!((big.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn pmfs_are_symmetric() {
    for (n_a, n_b) in [(3, 9), (10, 10), (7, 13)] {
        let p = exact_u_pmf(n_a, n_b).unwrap();
        let m = n_a * n_b;
        for u in 0..=m {
            assert!((p.pmf(u) - p.pmf(m - u)).abs() < 1e-15);
        }
    }
    let p = exact_t_pmf(25).unwrap();
    let m = 25 * 26 / 2;
    for t in 0..=m {
        assert!((p.pmf(t) - p.pmf(m - t)).abs() < 1e-15);
    }
}
