//! Algebraic identities of truncated signatures and the shuffle product.

mod common;

use approx::assert_relative_eq;
use proptest::prelude::*;
use sigconform::signature::{chen_product, shuffle_apply, shuffle_words, signature, sig_dim, Word};
use sigconform::Stream;

fn points(d: usize, max_len: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-2.0..2.0f64, d), 2..=max_len)
}

fn dim_order() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3, 1usize..=3)
}

fn stream(pts: &[Vec<f64>]) -> Stream {
    Stream::from_points("s", pts).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol * scale, "{x} vs {y}");
    }
}

fn word_strategy(d: usize, max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=d, 0..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn chen_identity((d, n) in dim_order(), seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let a = common::random_stream(&mut r, "a", 3, d);
        let b = common::random_stream(&mut r, "b", 3, d);
        // translate b so it starts where a ends
        let shift: Vec<f64> = a.point(2).iter().zip(b.point(0)).map(|(x, y)| x - y).collect();
        let mut joined = a.to_points();
        joined.extend(b.to_points().into_iter().skip(1).map(|p| {
            p.iter().zip(&shift).map(|(x, s)| x + s).collect::<Vec<_>>()
        }));
        let whole = signature(&stream(&joined), n).unwrap();
        let product = chen_product(&signature(&a, n).unwrap(), &signature(&b, n).unwrap()).unwrap();
        close(whole.coeffs(), product.coeffs(), 1e-12);
    }

    #[test]
    fn shuffle_pairing_identity(
        (d, n) in (1usize..=3, 1usize..=2),
        pts in points(3, 4),
        seed in any::<u64>(),
    ) {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p[..d].to_vec()).collect();
        let s2 = signature(&stream(&pts), 2 * n).unwrap();
        let s = s2.truncate(n);
        let mut r = common::rng(seed);
        let p = sig_dim(d, n).unwrap();
        let f: Vec<f64> = (0..p).map(|_| common::gauss(&mut r)).collect();
        let g: Vec<f64> = (0..p).map(|_| common::gauss(&mut r)).collect();
        let lhs = s.pair(&f) * s.pair(&g);
        let rhs = s2.pair(&shuffle_apply(&f, &g, d, n).unwrap());
        let scale = lhs.abs().max(s.pair(&f).abs() * s.pair(&g).abs()).max(1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn shuffle_multiplicities(u in word_strategy(3, 3), v in word_strategy(3, 3)) {
        let (wu, wv) = (Word::new(u.clone(), 3).unwrap(), Word::new(v.clone(), 3).unwrap());
        let out = shuffle_words(&wu, &wv);
        let total: u64 = out.values().sum();
        let binom = |n: u64, k: u64| (1..=k).fold(1u64, |acc, i| acc * (n + 1 - i) / i);
        prop_assert_eq!(total, binom((u.len() + v.len()) as u64, u.len() as u64));
        let mut letters: Vec<usize> = u.iter().chain(&v).copied().collect();
        letters.sort();
        for w in out.keys() {
            let mut l = w.letters().to_vec();
            l.sort();
            prop_assert_eq!(&l, &letters);
        }
        // commutative
        prop_assert_eq!(out, shuffle_words(&wv, &wu));
    }

    #[test]
    fn reparameterization_invariance(
        (d, n) in dim_order(),
        pts in points(3, 5),
        fracs in prop::collection::vec(0.0..1.0f64, 1..4),
        dup in 0usize..5,
    ) {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p[..d].to_vec()).collect();
        // subdivide the first segment and repeat a point
        let mut refined = vec![pts[0].clone()];
        let mut fr = fracs.clone();
        fr.sort_by(f64::total_cmp);
        for f in fr {
            refined.push(pts[0].iter().zip(&pts[1]).map(|(a, b)| a + f * (b - a)).collect());
        }
        refined.extend(pts[1..].iter().cloned());
        let k = dup % refined.len();
        refined.insert(k, refined[k].clone());
        let a = signature(&stream(&pts), n).unwrap();
        let b = signature(&stream(&refined), n).unwrap();
        close(b.coeffs(), a.coeffs(), 1e-12);
    }

    #[test]
    fn scaling_grading((d, n) in dim_order(), pts in points(3, 4), lambda in -3.0..3.0f64) {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p[..d].to_vec()).collect();
        let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|x| lambda * x).collect()).collect();
        let a = signature(&stream(&pts), n).unwrap();
        let b = signature(&stream(&scaled), n).unwrap();
        for k in 0..=n {
            let expected: Vec<f64> = a.level(k).iter().map(|c| c * lambda.powi(k as i32)).collect();
            close(b.level(k), &expected, 1e-12);
        }
    }

    #[test]
    fn translation_invariance((d, n) in dim_order(), pts in points(3, 4), shift in -5.0..5.0f64) {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p[..d].to_vec()).collect();
        let moved: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|x| x + shift).collect()).collect();
        close(
            signature(&stream(&moved), n).unwrap().coeffs(),
            signature(&stream(&pts), n).unwrap().coeffs(),
            1e-12,
        );
    }
}

#[test]
fn two_segment_analytic() {
    // (0,0) -> (1,0) -> (1,1)
    let s = signature(&stream(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0]]), 2).unwrap();
    assert_eq!(s.coeffs(), &[1.0, 1.0, 1.0, 0.5, 1.0, 0.0, 0.5]);
    // level 2 antisymmetric part is the signed area: here 1/2
    let area = 0.5 * (s.coeffs()[4] - s.coeffs()[5]);
    assert_relative_eq!(area, 0.5);
}

#[test]
fn quadrature_oracle_small() {
    let pts = vec![vec![0.0, 0.3, -1.0], vec![0.7, -0.2, 0.4], vec![-0.5, 1.1, 0.9]];
    let q = common::signature_by_quadrature(&pts, 3);
    let s = signature(&stream(&pts), 3).unwrap();
    for (a, b) in s.coeffs().iter().zip(&q) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }
}
