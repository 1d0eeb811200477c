//! Simultaneous polynomial root finding (Aberth-Ehrlich iteration).
//!
//! Starting points are spread on circles whose radii come from the upper
//! convex hull of `(i, log|a_i|)`, so roots of very different moduli start
//! near their final scale. Evaluation switches to the reversed polynomial
//! outside the unit disc to avoid overflow.

use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};

/// Iteration limit before giving up.
const MAX_ITERATIONS: usize = 2000;

/// Relative residual `|p(z)| / Σ|a_i||z|^i` every root must meet.
pub const RESIDUAL_TARGET: f64 = 1e-10;

fn cast<F: Float>(x: f64) -> F {
    F::from(x).expect("float cast")
}

/// `(p(z), p'(z))` scaled by `z^-n` when `|z| > 1`; returns the Newton
/// correction `p/p'` and the relative residual.
fn newton_ratio<F: Float>(a: &[F], z: Complex<F>) -> (Complex<F>, F) {
    let n = a.len() - 1;
    let zero = Complex::new(F::zero(), F::zero());
    if z.norm() <= F::one() {
        let mut p = zero;
        let mut dp = zero;
        let mut scale = F::zero();
        let r = z.norm();
        for c in a.iter().rev() {
            dp = dp * z + p;
            p = p * z + Complex::new(*c, F::zero());
            scale = scale * r + c.abs();
        }
        let resid = if scale > F::zero() {
            p.norm() / scale
        } else {
            F::zero()
        };
        (p / dp, resid)
    } else {
        // q(y) = y^n p(1/y), y = 1/z; p/p' = 1 / (n/z - q'(y)/(q(y) z^2))
        let y = z.inv();
        let mut q = zero;
        let mut dq = zero;
        let mut scale = F::zero();
        let r = y.norm();
        for c in a.iter() {
            dq = dq * y + q;
            q = q * y + Complex::new(*c, F::zero());
            scale = scale * r + c.abs();
        }
        let resid = if scale > F::zero() {
            q.norm() / scale
        } else {
            F::zero()
        };
        let nf = F::from(n).expect("degree fits");
        let denom = Complex::new(nf, F::zero()) * y - dq * y * y / q;
        (denom.inv(), resid)
    }
}

fn initial_guesses<F: Float>(a: &[F]) -> Vec<Complex<F>> {
    let n = a.len() - 1;
    let logs: Vec<(usize, F)> = a
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.abs().ln()))
        .collect();
    // upper convex hull, monotone chain
    let mut hull: Vec<(usize, F)> = Vec::new();
    for &pt in &logs {
        while hull.len() >= 2 {
            let (i1, y1) = hull[hull.len() - 2];
            let (i2, y2) = hull[hull.len() - 1];
            let cross =
                (F::from(i2 - i1).unwrap()) * (pt.1 - y1) - (y2 - y1) * F::from(pt.0 - i1).unwrap();
            if cross >= F::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let two_pi = cast::<F>(std::f64::consts::TAU);
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, yi) = w[0];
        let (j, yj) = w[1];
        let count = j - i;
        let radius = ((yi - yj) / F::from(count).unwrap()).exp();
        for k in 0..count {
            let angle = two_pi * F::from(k).unwrap() / F::from(count).unwrap()
                + two_pi * F::from(i).unwrap() / F::from(n).unwrap()
                + cast(0.4);
            out.push(Complex::from_polar(radius, angle));
        }
    }
    out
}

/// All complex roots of `Σ a_i x^i` (ascending coefficients, nonzero leading
/// and constant terms expected but not required).
pub fn polynomial_roots<F: Float>(coeffs: &[F]) -> Result<Vec<Complex<F>>> {
    let mut a = coeffs.to_vec();
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    if a.is_empty() {
        return Err(Error::ConvergenceFailure(
            "zero polynomial has no finite root set".into(),
        ));
    }
    if a.iter().any(|c| !c.is_finite()) {
        return Err(Error::ConvergenceFailure("non-finite coefficient".into()));
    }
    let zeros = a.iter().take_while(|c| c.is_zero()).count();
    let a = a.split_off(zeros);
    let mut roots = vec![Complex::new(F::zero(), F::zero()); zeros];
    let n = a.len() - 1;
    match n {
        0 => return Ok(roots),
        1 => {
            roots.push(Complex::new(-a[0] / a[1], F::zero()));
            return Ok(roots);
        }
        _ => {}
    }
    let mut z = initial_guesses(&a);
    let mut done = vec![false; n];
    let eps = F::epsilon();
    let target = cast::<F>(RESIDUAL_TARGET);
    let mut iterations = 0;
    while done.iter().any(|d| !d) {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            let worst = z
                .iter()
                .map(|&zi| newton_ratio(&a, zi).1)
                .fold(F::zero(), F::max);
            return Err(Error::ConvergenceFailure(format!(
                "Aberth iteration on degree {n} stopped after {MAX_ITERATIONS} iterations; \
                 {} roots unconverged, worst relative residual {:e}",
                done.iter().filter(|d| !**d).count(),
                worst.to_f64().unwrap_or(f64::NAN)
            )));
        }
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, _) = newton_ratio(&a, z[i]);
            let mut s = Complex::new(F::zero(), F::zero());
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    s = s + (z[i] - zj).inv();
                }
            }
            let step = ratio / (Complex::new(F::one(), F::zero()) - ratio * s);
            if !step.re.is_finite() || !step.im.is_finite() {
                done[i] = true;
                continue;
            }
            z[i] = z[i] - step;
            let small = step.norm() <= cast::<F>(4.0) * eps * z[i].norm();
            if small {
                done[i] = true;
            }
        }
    }
    for zi in &z {
        let (_, resid) = newton_ratio(&a, *zi);
        if !(resid < target) {
            return Err(Error::ConvergenceFailure(format!(
                "root {:?} of degree-{n} polynomial has relative residual {:e} after {iterations} iterations",
                (zi.re.to_f64(), zi.im.to_f64()),
                resid.to_f64().unwrap_or(f64::NAN)
            )));
        }
    }
    roots.extend(z);
    Ok(roots)
}

/// Sort by real part then imaginary part, and make conjugate pairs exact.
pub fn canonicalize<F: Float>(roots: &mut [Complex<F>], imag_tol: F) {
    for r in roots.iter_mut() {
        if r.im.abs() <= imag_tol {
            r.im = F::zero();
        }
    }
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex<f64>, b: Complex<f64>, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn quadratic() {
        let mut r = polynomial_roots(&[-1.0, -1.0, 1.0]).unwrap();
        canonicalize(&mut r, 1e-12);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(close(r[0], Complex::new(-1.0 / phi, 0.0), 1e-14));
        assert!(close(r[1], Complex::new(phi, 0.0), 1e-14));
    }

    #[test]
    fn roots_of_unity_and_zero() {
        // x^2 (x^5 - 1)
        let mut c = vec![0.0; 8];
        c[2] = -1.0;
        c[7] = 1.0;
        let r = polynomial_roots(&c).unwrap();
        assert_eq!(r.len(), 7);
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
        for z in r.iter().filter(|z| z.norm() > 0.0) {
            assert!((z.powu(5) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn wide_moduli() {
        // (x - 1e-6)(x - 1)(x - 1e6)
        let a = [-1.0, 1e6 + 1.0 + 1e-6, -(1e6 + 1.0 + 1e-6), 1.0];
        let mut r = polynomial_roots(&a).unwrap();
        canonicalize(&mut r, 1e-9);
        assert!((r[0].re - 1e-6).abs() < 1e-15);
        assert!((r[1].re - 1.0).abs() < 1e-9);
        assert!((r[2].re - 1e6).abs() < 1e-3);
    }

    #[test]
    fn f32_generic() {
        let r = polynomial_roots(&[2.0f32, -3.0, 1.0]);
        // f32 cannot meet the f64 residual target in general; either outcome
        // must be well-formed
        if let Ok(r) = r {
            assert_eq!(r.len(), 2);
        }
    }

    #[test]
    fn degree_sixty() {
        // Wilkinson-free case: x^60 - 2x^30 + 1 has double roots; use x^60 - x - 1
        let mut c = vec![0.0; 61];
        c[0] = -1.0;
        c[1] = -1.0;
        c[60] = 1.0;
        let r = polynomial_roots(&c).unwrap();
        assert_eq!(r.len(), 60);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(polynomial_roots::<f64>(&[0.0, 0.0]).is_err());
    }
}
