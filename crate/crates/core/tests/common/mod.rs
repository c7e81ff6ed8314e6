//! Shared helpers for the integration tests: seeded generators and
//! independent oracles.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sigconform::datasets::VesselRecord;
use sigconform::{Stream, Word};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_rows(rng: &mut impl Rng, m: usize, p: usize) -> Vec<Vec<f64>> {
    (0..m).map(|_| (0..p).map(|_| gauss(rng)).collect()).collect()
}

pub fn random_stream(rng: &mut impl Rng, id: &str, len: usize, d: usize) -> Stream {
    let pts: Vec<Vec<f64>> = (0..len)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    Stream::from_points(id, &pts).unwrap()
}

/// Relative error with an absolute floor for values near zero.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// `sqrt(x^T C^{-1} x)` with `C` the population covariance, by dense
/// inversion.
pub fn mahalanobis_dense(rows: &[Vec<f64>], x: &[f64]) -> f64 {
    let (m, p) = (rows.len(), rows[0].len());
    let mean: Vec<f64> = (0..p).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / m as f64).collect();
    let c = DMatrix::from_fn(p, p, |i, j| {
        rows.iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).sum::<f64>() / m as f64
    });
    let inv = c.try_inverse().expect("full rank");
    let v = DVector::from_column_slice(x);
    (v.transpose() * inv * &v)[(0, 0)].sqrt()
}

/// Pair-counting AUC, O(n^2).
pub fn auc_pairs(scores: &[f64], labels: &[bool]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &a) in scores.iter().enumerate() {
        if !labels[i] {
            continue;
        }
        for (j, &n) in scores.iter().enumerate() {
            if labels[j] {
                continue;
            }
            pairs += 1.0;
            if a > n {
                wins += 1.0;
            } else if a == n {
                wins += 0.5;
            }
        }
    }
    wins / pairs
}

// Gauss-Legendre nodes and weights on [-1, 1], exact for degree <= 9.
const GL_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Iterated integral `∫_{0<t1<..<tk<t} dX^{w1}_{t1} .. dX^{wk}_{tk}` of the
/// piecewise-linear path through `pts` (parameterized by segment index), by
/// nested composite Gauss-Legendre quadrature.
pub fn iterated_integral(pts: &[Vec<f64>], word: &[usize], t: f64) -> f64 {
    let Some((&last, prefix)) = word.split_last() else {
        return 1.0;
    };
    let mut total = 0.0;
    for seg in 0..pts.len() - 1 {
        let a = seg as f64;
        if a >= t {
            break;
        }
        let b = (a + 1.0).min(t);
        let speed = pts[seg + 1][last - 1] - pts[seg][last - 1];
        let half = 0.5 * (b - a);
        for (x, w) in GL_X.iter().zip(GL_W) {
            let s = a + half * (x + 1.0);
            total += w * half * iterated_integral(pts, prefix, s) * speed;
        }
    }
    total
}

/// Signature coefficients of every word up to `order`, in graded order,
/// computed by quadrature.
pub fn signature_by_quadrature(pts: &[Vec<f64>], order: usize) -> Vec<f64> {
    let d = pts[0].len();
    let end = (pts.len() - 1) as f64;
    Word::basis(d, order)
        .unwrap()
        .iter()
        .map(|w| iterated_integral(pts, w.letters(), end))
        .collect()
}

/// Orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal(rng: &mut impl Rng, p: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(p, p, |_, _| gauss(rng));
    g.qr().q()
}

/// Invertible map `U diag(s) V^T` with singular values in `[1, cond]`.
pub fn random_conditioned(rng: &mut impl Rng, p: usize, cond: f64) -> DMatrix<f64> {
    let u = random_orthogonal(rng, p);
    let v = random_orthogonal(rng, p);
    let mut s: Vec<f64> = (0..p).map(|_| cond.powf(rng.random::<f64>())).collect();
    s[0] = 1.0;
    s[p - 1] = cond;
    u * DMatrix::from_diagonal(&DVector::from_vec(s)) * v.transpose()
}

const M_PER_DEG: f64 = 111_195.0;

/// Synthetic vessel: `smooth` tracks are long gentle arcs sampled every
/// minute; the others wander with sharp random turns at irregular times.
pub fn synthetic_vessel(rng: &mut impl Rng, id: usize, smooth: bool) -> VesselRecord {
    let (lat0, lon0) = (29.0 + 0.1 * rng.random::<f64>(), -90.0 + 0.1 * rng.random::<f64>());
    let mut heading: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let base = heading;
    let (mut x, mut y, mut t) = (0.0f64, 0.0f64, 0.0f64);
    let mut pts = Vec::new();
    let mut ts = Vec::new();
    let (steps, length) = if smooth { (90, rng.random_range(120.0..300.0)) } else { (160, rng.random_range(8.0..45.0)) };
    let turn_rate = rng.random_range(-0.01..0.01);
    for _ in 0..steps {
        // a few metres of fix noise
        let (nx, ny) = (3.0 * gauss(rng), 3.0 * gauss(rng));
        pts.push(vec![
            lat0 + (y + ny) / M_PER_DEG,
            lon0 + (x + nx) / (M_PER_DEG * lat0.to_radians().cos()),
        ]);
        ts.push(t);
        let (dt, speed) = if smooth {
            heading += turn_rate;
            (rng.random_range(50.0..70.0), 7.0 + rng.random_range(-0.3..0.3))
        } else {
            if rng.random::<f64>() < 0.4 {
                heading = base + rng.random_range(-1.3..1.3);
            }
            (rng.random_range(20.0..90.0), rng.random_range(2.0..6.0))
        };
        x += heading.sin() * speed * dt;
        y += heading.cos() * speed * dt;
        t += dt;
    }
    let positions = Stream::from_points(format!("v{id}"), &pts)
        .unwrap()
        .with_timestamps(ts)
        .unwrap();
    VesselRecord {
        vessel_id: format!("v{id}"),
        positions,
        length_m: length,
    }
}

pub fn synthetic_fleet(seed: u64, normal: usize, anomalous: usize) -> Vec<VesselRecord> {
    let mut r = rng(seed);
    (0..normal + anomalous)
        .map(|i| synthetic_vessel(&mut r, i, i < normal))
        .collect()
}
