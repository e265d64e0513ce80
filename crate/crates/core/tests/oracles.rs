//! Cross-checks against computations that share no code with the crate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pso_core::hypermatrix::sorted_multi_indices;
use pso_core::pso::Verdict;
use pso_core::{ExactKernel, Hypermatrix64, Kernel64, Pso64, SimplexVector64};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton on P_n.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// ∫_0^1 g over 2^level equal cells, 12 nodes per cell.
fn quad(level: u32, g: impl Fn(f64) -> f64) -> f64 {
    let rule = gauss_legendre(12);
    let cells = 1usize << level;
    let h = 1.0 / cells as f64;
    let mut acc = 0.0;
    for c in 0..cells {
        let mid = (c as f64 + 0.5) * h;
        for &(x, w) in &rule {
            acc += w * 0.5 * h * g(mid + 0.5 * h * x);
        }
    }
    acc
}

fn ex3_a(k: usize, t: f64) -> f64 {
    let h = 2f64.powi(k as i32);
    if t > 0.0 && t < 0.5 / h {
        h
    } else if t > 0.5 / h && t < 1.0 / h {
        -h
    } else {
        0.0
    }
}

fn ex3_f(idx: &[usize], t: f64) -> f64 {
    let mut d = idx.to_vec();
    d.dedup();
    d.iter().map(|&k| ex3_a(k, t) / 2f64.powi(k as i32)).product()
}

fn ex1_a(n: usize, t: f64) -> f64 {
    (t / 2.0).powi(n as i32 - 1)
}

fn ex1_f(idx: &[usize], t: f64, normalize: bool) -> f64 {
    let height = if normalize { 2.0 } else { 1.0 };
    let tents: f64 = idx
        .iter()
        .map(|&n| {
            let s = t * 2f64.powi(n as i32 - 1);
            height * (1.0 - (2.0 * s.fract() - 1.0).abs())
        })
        .sum();
    (2.0 - t) / (2.0 * idx.len() as f64) * tents
}

#[test]
fn quadrature_rule_is_exact_for_polynomials() {
    for deg in 0..=23 {
        let got = quad(0, |t| t.powi(deg));
        assert!((got - 1.0 / (deg + 1) as f64).abs() < 1e-15, "degree {deg}");
    }
}

#[test]
fn ex3_hypermatrix_matches_quadrature() {
    let n = 6;
    let (p, audit) = Kernel64::ex3(3, n).unwrap().compute_hypermatrix().unwrap();
    assert!(audit.is_clean());
    for idx in sorted_multi_indices(3, n) {
        for k in 1..=n {
            let want = quad(n as u32 + 2, |t| ex3_a(k, t) * ex3_f(&idx, t));
            assert!((p.get(&idx, k).unwrap() - want).abs() <= 1e-12, "{idx:?},{k}");
        }
    }
}

#[test]
fn ex1_hypermatrix_matches_quadrature() {
    for (m, n) in [(2, 4), (3, 3)] {
        for normalize in [false, true] {
            let (p, _) = Kernel64::ex1(m, n, normalize).unwrap().compute_hypermatrix().unwrap();
            for idx in sorted_multi_indices(m, n) {
                for k in 1..=n {
                    let want = quad(n as u32 + 1, |t| ex1_a(k, t) * ex1_f(&idx, t, normalize));
                    assert!((p.get(&idx, k).unwrap() - want).abs() <= 1e-12, "{idx:?},{k}");
                }
            }
        }
    }
}

#[test]
fn exact_and_float_pipelines_agree() {
    let (exact, _) = ExactKernel::ex1(2, 3, false).unwrap().compute_hypermatrix().unwrap();
    let (float, _) = Kernel64::ex1(2, 3, false).unwrap().compute_hypermatrix().unwrap();
    for (idx, k, v) in exact.entries() {
        assert!((float.get(idx, k).unwrap() - pso_core::Scalar::approx(v)).abs() <= 1e-15);
    }
}

/// For the ex3 operator the cumulative sums obey `C_n(V x) = C_n(x)^3`.
fn cumulative_inverse(y: &[f64], m: i32) -> Vec<f64> {
    let mut prev = 0.0;
    let mut acc = 0.0;
    y.iter()
        .map(|v| {
            acc += v;
            let c = acc.powf(1.0 / m as f64);
            let x = c - prev;
            prev = c;
            x
        })
        .collect()
}

#[test]
fn ex3_preimage_matches_cumulative_inversion() {
    let (p, _) = Kernel64::ex3(3, 6).unwrap().compute_hypermatrix().unwrap();
    let v = Pso64::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let raw: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let y = SimplexVector64::new(raw.iter().map(|v| v / total).collect()).unwrap();
        let x = v.preimage_on_sphere(&y, &Default::default()).unwrap().x;
        let want = cumulative_inverse(y.coords(), 3);
        for (a, b) in x.coords().iter().zip(&want) {
            assert!((a - b).abs() <= 1e-8);
        }
    }
}

fn no_unit_diagonal_for_first_output() -> Pso64 {
    let rows: [([usize; 2], [f64; 3]); 6] = [
        ([1, 1], [0.5, 0.5, 0.0]),
        ([1, 2], [0.6, 0.4, 0.0]),
        ([1, 3], [0.3, 0.0, 0.7]),
        ([2, 2], [0.0, 1.0, 0.0]),
        ([2, 3], [0.0, 0.0, 1.0]),
        ([3, 3], [0.0, 0.0, 1.0]),
    ];
    let mut p = Hypermatrix64::new(2, 3).unwrap();
    for (idx, row) in rows {
        for (k, v) in row.iter().enumerate() {
            p.insert(&idx, k + 1, *v).unwrap();
        }
    }
    Pso64::new(p).unwrap()
}

#[test]
fn first_vertex_unreachable_by_grid_search() {
    let v = no_unit_diagonal_for_first_output();
    let c = v.surjectivity_certificate();
    assert_eq!(c.verdict, Verdict::CertifiedNotSurjective);
    assert_eq!(c.witness.empty_output, Some(1));
    let e1 = SimplexVector64::basis(1, 3).unwrap();
    let mut best = f64::INFINITY;
    for i in 0..=50 {
        for j in 0..=50 - i {
            let x = SimplexVector64::new(vec![i as f64 * 0.02, j as f64 * 0.02, (50 - i - j) as f64 * 0.02]).unwrap();
            best = best.min(v.apply(&x).unwrap().l1_distance(&e1).unwrap());
        }
    }
    assert!(best >= 0.01, "closest approach {best}");
}
