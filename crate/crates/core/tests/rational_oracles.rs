//! Exact-arithmetic oracles: small-degree coefficient identities recomputed
//! over the rationals, independent of the floating implementation.

use hvlab_core::operators::volterra_apply;
use hvlab_core::registry::parse_symbol;
use hvlab_core::series::TaylorSeries;
use num_bigint::BigInt;
use num_rational::BigRational;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rational_differentiate(c: &[BigRational]) -> Vec<BigRational> {
    if c.len() == 1 {
        return vec![q(0, 1)];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(n, a)| a * q(n as i64, 1))
        .collect()
}

fn rational_integrate(c: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![q(0, 1)];
    for (n, a) in c.iter().enumerate() {
        out.push(a / q(n as i64 + 1, 1));
    }
    out
}

fn rational_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![q(0, 1); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let t = x * y;
            out[i + j] += t;
        }
    }
    out
}

#[test]
fn differentiate_then_integrate_is_identity_exactly() {
    // exact rational check of the calculus inverse pair on small cases
    let cases: Vec<Vec<BigRational>> = vec![
        vec![q(3, 2), q(-1, 3), q(7, 5), q(0, 1), q(2, 7)],
        vec![q(1, 1)],
        vec![q(0, 1), q(1, 1), q(1, 2), q(1, 3), q(1, 4), q(1, 5)],
    ];
    for c in cases {
        let back = rational_integrate(&rational_differentiate(&c));
        assert_eq!(back[0], q(0, 1));
        for n in 1..c.len() {
            assert_eq!(back[n], c[n], "coefficient {n} not reproduced exactly");
        }
    }
}

#[test]
fn volterra_log1z_on_one_minus_z_matches_rational_oracle() {
    // T_g (1 - z) for g' the degree-7 geometric truncation, multiply then
    // integrate over Q; the float route must agree to rounding
    let deg = 8usize;
    let gprime: Vec<BigRational> = (0..deg).map(|_| q(1, 1)).collect();
    let f = vec![q(1, 1), q(-1, 1)];
    let product = rational_mul(&f, &gprime);
    let expect = rational_integrate(&product);
    // b_1 = 1 exactly
    assert_eq!(expect[1], q(1, 1));
    // closed form: the product (1-w) * sum w^k telescopes to 1 - w^deg,
    // so b_n = 0 for 2 <= n <= deg and b_{deg+1} = -1/(deg+1)
    for item in expect.iter().take(deg + 1).skip(2) {
        assert_eq!(*item, q(0, 1));
    }
    assert_eq!(expect[deg + 1], q(-1, deg as i64 + 1));

    let g = parse_symbol::<f64>("log1z", deg).unwrap();
    let f64f = TaylorSeries::<f64>::from_real(&[1.0, -1.0]);
    let got = volterra_apply(&g, &f64f);
    for (n, e) in expect.iter().enumerate() {
        let ef: f64 = e.numer().to_string().parse::<f64>().unwrap()
            / e.denom().to_string().parse::<f64>().unwrap();
        assert!(
            (got.coeff(n).re - ef).abs() < 1e-15,
            "coefficient {n}: {} vs {ef}",
            got.coeff(n).re
        );
        assert_eq!(got.coeff(n).im, 0.0);
    }
}

#[test]
fn cesaro_coefficients_of_one_are_unit_fractions_exactly() {
    // rational route: partial sums of the coefficients of the constant
    // function (1, 0, 0, ...) divided by n+1
    let deg = 12usize;
    let constant: Vec<BigRational> = (0..=deg).map(|n| q(i64::from(n == 0), 1)).collect();
    let mut partial = q(0, 1);
    let expect: Vec<BigRational> = constant
        .iter()
        .enumerate()
        .map(|(n, a)| {
            partial += a;
            partial.clone() / q(n as i64 + 1, 1)
        })
        .collect();
    for (n, e) in expect.iter().enumerate() {
        assert_eq!(*e, q(1, n as i64 + 1));
    }
    let c = hvlab_core::operators::cesaro_apply_coeff(&TaylorSeries::<f64>::one(), deg);
    for n in 0..=deg {
        assert!((c.coeff(n).re - 1.0 / (n as f64 + 1.0)).abs() < 1e-16);
    }
}
