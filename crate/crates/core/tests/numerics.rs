use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;
use resonance_core::numerics::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

// reference values computed with mpmath at 40 digits
const GAMMA_TABLE: [((f64, f64), (f64, f64)); 5] = [
    ((0.75, 0.5), (0.834_929_965_973_746_8, -0.406_381_880_058_132_4)),
    ((-2.3, 1.7), (0.014_368_574_832_446_983, -0.011_193_978_994_831_532)),
    ((12.5, -30.0), (0.005_167_134_315_048_489, -0.003_402_384_188_227_249)),
    ((0.4, -6.0), (-1.903_480_295_675_918_7e-5, 1.680_450_953_692_094e-4)),
    ((30.0, 40.0), (1.874_199_767_303_780_2e21, -1.510_844_503_332_867_9e21)),
];

#[test]
fn gamma_matches_high_precision_table() {
    for ((sr, si), (gr, gi)) in GAMMA_TABLE {
        let g = gamma_complex(c(sr, si)).unwrap();
        assert!(rel(g, c(gr, gi)) < 1e-12, "Γ({sr}+{si}i) = {g}, rel {:e}", rel(g, c(gr, gi)));
    }
}

#[test]
fn gamma_classical_values() {
    assert!(rel(gamma_complex(c(1.0, 0.0)).unwrap(), c(1.0, 0.0)) < 1e-15);
    assert!(rel(gamma_complex(c(0.5, 0.0)).unwrap(), c(1.772_453_850_905_516, 0.0)) < 1e-14);
}

fn away_from_integers(rng: &mut StdRng) -> Complex64 {
    loop {
        let s = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        if (s.re - s.re.round()).hypot(s.im) >= 0.1 {
            return s;
        }
    }
}

#[test]
fn gamma_reflection_identity() {
    let mut rng = StdRng::seed_from_u64(11);
    let pi = std::f64::consts::PI;
    for _ in 0..200 {
        let s = away_from_integers(&mut rng);
        let lhs = gamma_complex(s).unwrap() * gamma_complex(c(1.0, 0.0) - s).unwrap();
        let rhs = c(pi, 0.0) / (s * pi).sin();
        assert!(rel(lhs, rhs) < 1e-10, "{s}");
    }
}

#[test]
fn gamma_recurrence() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..200 {
        let s = away_from_integers(&mut rng);
        let lhs = gamma_complex(s + 1.0).unwrap();
        let rhs = s * gamma_complex(s).unwrap();
        assert!(rel(lhs, rhs) < 1e-12, "{s}: {:e}", rel(lhs, rhs));
    }
}

#[test]
fn gamma_poles_error() {
    assert!(matches!(gamma_complex(c(-3.0, 0.0)), Err(NumericsError::Pole { .. })));
    assert!(matches!(gamma_complex(c(0.0, 5e-13)), Err(NumericsError::Pole { .. })));
}

#[test]
fn complex_pow_examples() {
    assert!(rel(complex_pow(c(0.0, 1.0), c(1.0, 0.0)).unwrap(), c(0.0, 1.0)) < 1e-15);
    let v = complex_pow(c(0.1, 0.0), c(0.5, 3.7)).unwrap();
    assert!((v.norm() - 0.1f64.sqrt()).abs() < 1e-15);
    let v = complex_pow(c(0.0, 2.0), c(-0.8, 0.0)).unwrap();
    assert!(rel(v, c(0.177_483_656_552_315, -0.546_238_527_888_726_9)) < 1e-14);
    assert!(matches!(complex_pow(c(0.0, 0.0), c(-1.0, 0.0)), Err(NumericsError::Domain(_))));
}

#[test]
fn complex_pow_adds_exponents() {
    let mut rng = StdRng::seed_from_u64(13);
    for _ in 0..200 {
        let b = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let p = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let q = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let lhs = complex_pow(b, p + q).unwrap();
        let rhs = complex_pow(b, p).unwrap() * complex_pow(b, q).unwrap();
        assert!(rel(lhs, rhs) < 1e-12);
    }
}

#[test]
fn newton_known_roots() {
    let r = newton_root(|z| Ok((z * z + 1.0, z * 2.0)), c(0.3, 0.8), 1e-12, 50).unwrap();
    assert!((r.root - c(0.0, 1.0)).norm() < 1e-12);
    let r = newton_root(|z| Ok((z.exp() - 1.0, z.exp())), c(0.1, 0.0), 1e-12, 50).unwrap();
    assert!(r.root.norm() < 1e-12 && r.residual < 1e-12);
}

#[test]
fn newton_reports_failure() {
    let err = newton_root(|z| Ok((z * z + 1.0, z * 2.0)), c(0.5, 0.0), 1e-12, 3).unwrap_err();
    assert!(matches!(err, NumericsError::NoConvergence { .. } | NumericsError::DerivativeVanished { .. }));
    let err = newton_root(|_| Ok((c(1.0, 0.0), c(0.0, 0.0))), c(0.5, 0.0), 1e-12, 10).unwrap_err();
    assert!(matches!(err, NumericsError::DerivativeVanished { .. }));
}

#[test]
fn count_zeros_of_random_products() {
    let mut rng = StdRng::seed_from_u64(14);
    let window = ContourWindow::<f64>::from_bounds(-1.0, 1.0, -1.0, 1.0).unwrap();
    for trial in 0..50 {
        let m = 1 + trial % 6;
        let roots: Vec<Complex64> = (0..m).map(|_| c(rng.gen_range(-0.9..0.9), rng.gen_range(-0.9..0.9))).collect();
        let f = |z: Complex64| Ok(roots.iter().fold(c(1.0, 0.0), |acc, r| acc * (z - r)));
        let n = count_zeros_refined(f, &window, ContourOptions { samples_per_side: 64, threshold: 1e-12 }, 1 << 12).unwrap();
        assert_eq!(n, m as i64);
    }
}

#[test]
fn extrapolation_examples() {
    let samples: Vec<(f64, f64)> = [5.0, 10.0, 15.0, 20.0].iter().map(|&s: &f64| (s, 2.0 + (-s).exp())).collect();
    let e = limit_extrapolate(&samples).unwrap();
    assert!((e.value - 2.0).abs() < 1e-6);
    let slow: Vec<(f64, f64)> = [5.0, 10.0, 15.0, 20.0].iter().map(|&s: &f64| (s, 2.0 + 1.0 / s)).collect();
    match limit_extrapolate(&slow) {
        Err(NumericsError::NotConverging { .. }) => {}
        Ok(e) => assert!(e.error > 1e-3, "slow sequence given a tight error bar {e:?}"),
        Err(other) => panic!("{other}"),
    }
}
