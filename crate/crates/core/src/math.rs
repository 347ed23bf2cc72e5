//! Numerical building blocks shared by the pricing modules.

use crate::error::{Error, Result};

/// Standard normal cumulative distribution function.
///
/// Evaluated through the complementary error function so that both tails keep
/// full relative precision.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `(1 - exp(-k x)) / k`, continuous through `k = 0` where it equals `x`.
///
/// This is the integral of `exp(-k u)` over `[0, x]`; it shows up in every
/// mean-reverting Gaussian transition.
pub fn decay_integral(k: f64, x: f64) -> f64 {
    let kx = k * x;
    if kx.abs() < 1e-6 {
        x * (1.0 - kx / 2.0 + kx * kx / 6.0)
    } else {
        -(-kx).exp_m1() / k
    }
}

/// Sum in a fixed binary-tree order.
///
/// The result depends only on the slice contents, which keeps Monte Carlo
/// reductions bit-identical regardless of how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

// 16-point Gauss-Legendre nodes on [-1, 1] (positive half) and weights.
const GL_NODES: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL_WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_78,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_09,
];

/// Integrates a smooth (entire) function over `[a, b]`.
///
/// The interval is cut into pieces no longer than `max_piece`, and each piece
/// gets a 16-point Gauss-Legendre rule (exact for polynomials of degree 31).
/// For the exponential-polynomial integrands used here, pieces with
/// `rate * length <= 1` are integrated to rounding precision.
pub fn integrate_smooth<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, max_piece: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let pieces = ((b - a) / max_piece).ceil().max(1.0) as usize;
    let h = (b - a) / pieces as f64;
    let mut total = 0.0;
    for p in 0..pieces {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            s += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += s * half;
    }
    total
}

/// Brent's method on a bracketing interval.
pub fn brent<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Calibration {
            message: format!("no sign change on [{a}, {b}]"),
            residual: fa.abs().min(fb.abs()),
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else {
            b += tol1.copysign(xm);
        }
        fb = f(b);
    }
    Err(Error::Calibration {
        message: format!("root search did not converge in {max_iter} iterations"),
        residual: fb.abs(),
    })
}

/// Solves `A x = b` for a small dense system by Gaussian elimination with
/// partial pivoting. `a` is row-major `n x n`.
pub fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[pivot * n + col].abs() < 1e-300 {
            return Err(Error::numerical("singular linear system"));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            if factor != 0.0 {
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row * n + k] * x[k];
        }
        x[row] = s / a[row * n + row];
    }
    Ok(x)
}

/// Factor `M` with `M Mᵀ = C` for a symmetric positive semi-definite `C`.
///
/// Uses diagonal pivoting so rank-deficient matrices (perfect correlation)
/// factor cleanly; columns beyond the numerical rank are zero. Returns the
/// row-major factor. Fails if `C` has a materially negative direction.
pub fn psd_factor(c: &[f64], n: usize) -> Result<Vec<f64>> {
    const TOL: f64 = 1e-12;
    for i in 0..n {
        for j in 0..n {
            if (c[i * n + j] - c[j * n + i]).abs() > 1e-12 {
                return Err(Error::numerical("matrix is not symmetric"));
            }
        }
    }
    let mut work = c.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    // l holds the factor in permuted coordinates.
    let mut l = vec![0.0; n * n];
    for k in 0..n {
        // choose largest remaining diagonal
        // first index wins ties so an identity input factors to itself
        let mut piv = k;
        for i in k + 1..n {
            if work[perm[i] * n + perm[i]] > work[perm[piv] * n + perm[piv]] {
                piv = i;
            }
        }
        let dmax = work[perm[piv] * n + perm[piv]];
        if dmax < -TOL {
            return Err(Error::numerical("matrix is not positive semi-definite"));
        }
        perm.swap(k, piv);
        for j in 0..k {
            l.swap(k * n + j, piv * n + j);
        }
        if dmax <= TOL {
            // remaining Schur complement must vanish
            for i in k..n {
                for j in k..n {
                    if work[perm[i] * n + perm[j]].abs() > 1e-10 {
                        return Err(Error::numerical("matrix is not positive semi-definite"));
                    }
                }
            }
            break;
        }
        let pk = perm[k];
        let root = dmax.sqrt();
        l[k * n + k] = root;
        for i in k + 1..n {
            l[i * n + k] = work[perm[i] * n + pk] / root;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let (pi, pj) = (perm[i], perm[j]);
                work[pi * n + pj] -= l[i * n + k] * l[j * n + k];
            }
        }
    }
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[perm[i] * n + j] = l[i * n + j];
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_values() {
        assert!((norm_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((norm_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((norm_cdf(-3.0) - 0.001_349_898_031_630_094_6).abs() < 1e-17);
        for &x in &[0.1, 0.7, 2.3, 5.0] {
            assert!((norm_cdf(x) + norm_cdf(-x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn decay_integral_limits() {
        assert_eq!(decay_integral(0.0, 2.5), 2.5);
        let exact = (1.0 - (-0.5f64 * 3.0).exp()) / 0.5;
        assert!((decay_integral(0.5, 3.0) - exact).abs() < 1e-15);
        // series branch agrees with closed form near the switch
        let k = 2e-7;
        let closed = -(-k * 3.0f64).exp_m1() / k;
        assert!((decay_integral(k, 3.0) - closed).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_exponentials() {
        let v = integrate_smooth(|u| (0.7 * u).exp(), 0.0, 5.0, 1.0);
        let exact = ((0.7f64 * 5.0).exp() - 1.0) / 0.7;
        assert!((v - exact).abs() / exact < 1e-14);
    }

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50).is_err());
    }

    #[test]
    fn dense_solve() {
        let x = solve_dense(vec![0.0, 2.0, 1.0, 1.0], vec![4.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    fn reconstruct(m: &[f64], n: usize) -> Vec<f64> {
        let mut c = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                c[i * n + j] = (0..n).map(|k| m[i * n + k] * m[j * n + k]).sum();
            }
        }
        c
    }

    #[test]
    fn psd_factor_handles_full_and_degenerate() {
        let c = vec![1.0, 0.3, -0.2, 0.3, 1.0, 0.5, -0.2, 0.5, 1.0];
        let m = psd_factor(&c, 3).unwrap();
        for (a, b) in reconstruct(&m, 3).iter().zip(&c) {
            assert!((a - b).abs() < 1e-14);
        }
        let deg = vec![1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let m = psd_factor(&deg, 3).unwrap();
        for (a, b) in reconstruct(&m, 3).iter().zip(&deg) {
            assert!((a - b).abs() < 1e-14);
        }
        let bad = vec![1.0, 0.9, 0.9, 0.9, 1.0, -0.9, 0.9, -0.9, 1.0];
        assert!(psd_factor(&bad, 3).is_err());
    }
}
