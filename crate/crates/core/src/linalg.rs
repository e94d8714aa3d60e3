//! Dense symmetric solves for small least-squares systems.

use crate::scalar::Real;

/// Solves `a x = b` for symmetric positive definite `a` (row-major, k×k)
/// by Cholesky factorisation. Returns `None` when a pivot is not safely
/// positive, i.e. the system is singular to working precision.
pub fn cholesky_solve<T: Real>(a: &[T], b: &[T], k: usize) -> Option<Vec<T>> {
    debug_assert_eq!(a.len(), k * k);
    debug_assert_eq!(b.len(), k);
    let max_diag = (0..k).map(|i| a[i * k + i].abs()).fold(T::zero(), T::max);
    let tol = max_diag * T::epsilon() * T::from_count(k.max(1)) * T::lit(16.0);
    let mut l = vec![T::zero(); k * k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = a[i * k + j];
            for p in 0..j {
                s -= l[i * k + p] * l[j * k + p];
            }
            if i == j {
                // also rejects NaN
                if s.partial_cmp(&tol) != Some(std::cmp::Ordering::Greater) {
                    return None;
                }
                l[i * k + i] = s.sqrt();
            } else {
                l[i * k + j] = s / l[j * k + j];
            }
        }
    }
    // forward then back substitution
    let mut z = vec![T::zero(); k];
    for i in 0..k {
        let mut s = b[i];
        for p in 0..i {
            s -= l[i * k + p] * z[p];
        }
        z[i] = s / l[i * k + i];
    }
    let mut x = vec![T::zero(); k];
    for i in (0..k).rev() {
        let mut s = z[i];
        for p in i + 1..k {
            s -= l[p * k + i] * x[p];
        }
        x[i] = s / l[i * k + i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
