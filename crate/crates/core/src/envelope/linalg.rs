use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const JACOBI_OFF_DIAG_TOL: f64 = 1e-12;

/// Smallest eigenvalue of a symmetric `d x d` matrix stored row-major.
///
/// Closed form in the plane, cyclic Jacobi rotations otherwise.
pub fn lambda_min(h: &[f64], d: usize) -> Result<f64> {
    if h.len() != d * d || d == 0 {
        return Err(Error::InvalidParameter(format!(
            "expected {} entries for a {d}x{d} matrix, got {}",
            d * d,
            h.len()
        )));
    }
    let mut asym = 0.0f64;
    for i in 0..d {
        for j in i + 1..d {
            asym = asym.max((h[i * d + j] - h[j * d + i]).abs());
        }
    }
    if asym > SYMMETRY_TOL {
        return Err(Error::Asymmetric(asym));
    }
    Ok(match d {
        1 => h[0],
        2 => {
            let (a, b, c) = (h[0], h[1], h[3]);
            let mid = 0.5 * (a + c);
            let rad = (0.5 * (a - c)).hypot(b);
            mid - rad
        }
        _ => jacobi_eigenvalues(h, d)
            .into_iter()
            .fold(f64::INFINITY, f64::min),
    })
}

/// Eigenvalues by cyclic Jacobi sweeps until the off-diagonal norm is tiny.
pub fn jacobi_eigenvalues(h: &[f64], d: usize) -> Vec<f64> {
    let mut a = h.to_vec();
    let scale = a.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * d + j] * a[i * d + j])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_OFF_DIAG_TOL * scale {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..d).map(|i| a[i * d + i]).collect()
}

/// `<H z, z>`.
pub fn quadratic_form(h: &[f64], z: &[f64]) -> f64 {
    let d = z.len();
    (0..d)
        .map(|i| z[i] * (0..d).map(|j| h[i * d + j] * z[j]).sum::<f64>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(lambda_min(&[1.0, 0.0, 0.0, 1.0], 2).unwrap(), 1.0);
        assert_eq!(lambda_min(&[2.0, 0.0, 0.0, -3.0], 2).unwrap(), -3.0);
        assert!((lambda_min(&[2.0, 1.0, 1.0, 2.0], 2).unwrap() - 1.0).abs() < 1e-15);
        let id3 = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        assert!((lambda_min(&id3, 3).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(matches!(
            lambda_min(&[1.0, 2.0, 0.0, 1.0], 2),
            Err(Error::Asymmetric(_))
        ));
        assert!(lambda_min(&[1.0, 2.0, 3.0], 2).is_err());
    }

    #[test]
    fn jacobi_matches_closed_form_3x3() {
        // Tridiagonal [2 -1 0; -1 2 -1; 0 -1 2]: eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2).
        let h = [2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
        let mut ev = jacobi_eigenvalues(&h, 3);
        ev.sort_by(f64::total_cmp);
        let s = 2f64.sqrt();
        assert!((ev[0] - (2.0 - s)).abs() < 1e-12);
        assert!((ev[1] - 2.0).abs() < 1e-12);
        assert!((ev[2] - (2.0 + s)).abs() < 1e-12);
    }
}
