//! Small dense/matrix-free numeric helpers shared across the toolkit.
//!
//! Vectors are `Vec<Complex64>` at module boundaries; inner products are
//! conjugate-linear in the second argument.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// `<x, y> = sum_i x_i * conj(y_i)`
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm1(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm()).sum()
}

pub fn norm_inf(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `sum_i |x_i|^p` (the p-th power of the lp quasi-norm, 0 < p <= 1).
pub fn lp_pow(x: &[Complex64], p: f64) -> f64 {
    x.iter().map(|v| v.norm().powf(p)).sum()
}

pub fn sub(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn scale(x: &[Complex64], t: f64) -> Vec<Complex64> {
    x.iter().map(|v| v * t).collect()
}

pub fn real_to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

pub fn complex_to_real(x: &[Complex64]) -> Vec<f64> {
    x.iter().map(|v| v.re).collect()
}

/// Deterministic RNG for a (seed, stream) pair. Used so independent trials
/// produce identical draws regardless of evaluation order.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn standard_normal_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Complex standard Gaussian vector (independent N(0,1) real and imaginary parts).
pub fn complex_normal_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Conjugate gradients for a Hermitian positive definite operator given as a
/// closure. Solves `op(x) = b` to relative residual `tol`.
pub fn conjugate_gradient<F>(
    op: F,
    b: &[Complex64],
    tol: f64,
    max_iters: usize,
) -> Result<Vec<Complex64>>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let n = b.len();
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rs_old = dot(&r, &r).re;
    for _ in 0..max_iters {
        if rs_old.sqrt() <= tol * b_norm {
            return Ok(x);
        }
        let ap = op(&p);
        let pap = dot(&p, &ap).re;
        if pap <= 0.0 {
            break;
        }
        let alpha = rs_old / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new = dot(&r, &r).re;
        let beta = rs_new / rs_old;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rs_old = rs_new;
    }
    if rs_old.sqrt() <= tol * b_norm {
        Ok(x)
    } else {
        Err(Error::IterationNotConverged(max_iters))
    }
}

/// Power iteration for the largest eigenvalue of a Hermitian PSD operator.
/// Seeded start so the estimate is deterministic.
pub fn power_iteration<F>(op: F, n: usize, iters: usize, seed: u64) -> f64
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let mut rng = stream_rng(seed, 0x9e37);
    let mut v = complex_normal_vec(&mut rng, n);
    let nv = norm2(&v);
    for vi in v.iter_mut() {
        *vi /= nv;
    }
    let mut lambda = 0.0;
    for _ in 0..iters {
        let w = op(&v);
        lambda = dot(&w, &v).re;
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        for i in 0..v.len() {
            v[i] = w[i] / nw;
        }
    }
    lambda.max(0.0)
}

fn eigen_residual(op: impl Fn(&[Complex64]) -> Vec<Complex64>, v: &[Complex64]) -> (f64, f64) {
    let sv = op(v);
    let lambda = dot(&sv, v).re;
    let mut res = 0.0;
    for (svi, vi) in sv.iter().zip(v) {
        res += (svi - lambda * vi).norm_sqr();
    }
    (lambda, res.sqrt())
}

/// Power iteration certified by the eigenvector residual
/// `||S v - lambda v|| <= tol lambda`; errors when the certificate is not
/// reached within `max_iters`.
pub fn power_iteration_checked<F>(
    op: F,
    n: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let mut rng = stream_rng(seed, 0x9e37);
    let mut v = complex_normal_vec(&mut rng, n);
    let nv = norm2(&v);
    for vi in v.iter_mut() {
        *vi /= nv;
    }
    for _ in 0..max_iters {
        let w = op(&v);
        let nw = norm2(&w);
        if nw == 0.0 {
            return Ok(0.0);
        }
        for i in 0..v.len() {
            v[i] = w[i] / nw;
        }
        let (lambda, res) = eigen_residual(&op, &v);
        if res <= tol * lambda.abs().max(1e-30) {
            return Ok(lambda);
        }
    }
    Err(Error::IterationNotConverged(max_iters))
}

/// Smallest eigenvalue with the same residual certificate, via inverse power
/// iteration (CG solves).
pub fn inverse_power_checked<F>(
    op: F,
    n: usize,
    max_iters: usize,
    tol: f64,
    cg_tol: f64,
    seed: u64,
) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let mut rng = stream_rng(seed, 0x51f1);
    let mut v = complex_normal_vec(&mut rng, n);
    let nv = norm2(&v);
    for vi in v.iter_mut() {
        *vi /= nv;
    }
    for _ in 0..max_iters {
        let w = conjugate_gradient(&op, &v, cg_tol, 100 * n.max(20))?;
        let nw = norm2(&w);
        if nw == 0.0 {
            return Err(Error::IterationNotConverged(max_iters));
        }
        for i in 0..v.len() {
            v[i] = w[i] / nw;
        }
        let (mu, res) = eigen_residual(&op, &v);
        if res <= tol * mu.abs().max(1e-30) {
            return Ok(mu);
        }
    }
    Err(Error::IterationNotConverged(max_iters))
}

/// Smallest eigenvalue of a Hermitian PD operator by inverse power iteration
/// (each step solved with CG).
pub fn inverse_power_iteration<F>(
    op: F,
    n: usize,
    iters: usize,
    cg_tol: f64,
    seed: u64,
) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let mut rng = stream_rng(seed, 0x51f1);
    let mut v = complex_normal_vec(&mut rng, n);
    let nv = norm2(&v);
    for vi in v.iter_mut() {
        *vi /= nv;
    }
    let mut mu = 0.0;
    for _ in 0..iters {
        let w = conjugate_gradient(&op, &v, cg_tol, 50 * n.max(20))?;
        let nw = norm2(&w);
        if nw == 0.0 {
            return Err(Error::IterationNotConverged(iters));
        }
        mu = dot(&w, &v).re;
        for i in 0..v.len() {
            v[i] = w[i] / nw;
        }
    }
    if mu <= 0.0 {
        return Err(Error::IterationNotConverged(iters));
    }
    // Rayleigh quotient of the last iterate gives the eigenvalue of S itself.
    let sv = op(&v);
    Ok(dot(&sv, &v).re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dot_is_conjugate_linear_in_second_argument() {
        let x = vec![c(1.0, 2.0)];
        let y = vec![c(0.0, 1.0)];
        // <x, y> = x * conj(y) = (1+2i)(-i) = 2 - i
        let d = dot(&x, &y);
        assert!((d.re - 2.0).abs() < 1e-15 && (d.im + 1.0).abs() < 1e-15);
    }

    #[test]
    fn cg_solves_diagonal_system() {
        let d = [2.0, 3.0, 5.0];
        let op = |x: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(d.iter()).map(|(v, &di)| v * di).collect()
        };
        let b = vec![c(2.0, 0.0), c(6.0, 3.0), c(10.0, 0.0)];
        let x = conjugate_gradient(op, &b, 1e-14, 100).unwrap();
        assert!((x[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((x[1] - c(2.0, 1.0)).norm() < 1e-12);
        assert!((x[2] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn power_iteration_finds_dominant_eigenvalue() {
        let d = [1.0, 4.0, 9.0];
        let op = |x: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(d.iter()).map(|(v, &di)| v * di).collect()
        };
        let lambda = power_iteration(op, 3, 200, 7);
        assert!((lambda - 9.0).abs() < 1e-8);
        let mu = inverse_power_iteration(op, 3, 60, 1e-12, 7).unwrap();
        assert!((mu - 1.0).abs() < 1e-8);
    }

    #[test]
    fn stream_rng_is_reproducible_and_stream_separated() {
        let a: Vec<f64> = standard_normal_vec(&mut stream_rng(1, 0), 4);
        let b: Vec<f64> = standard_normal_vec(&mut stream_rng(1, 0), 4);
        let c: Vec<f64> = standard_normal_vec(&mut stream_rng(1, 1), 4);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
