//! Restarted GMRES with modified Gram–Schmidt and Givens rotations.
//!
//! Optional Jacobi scaling is applied from the right, so the residual the
//! iteration monitors is the true residual of `A x = b`.

use super::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    /// Krylov dimension before a restart.
    pub restart: usize,
    /// Relative residual target `‖b - Ax‖ / ‖b‖`.
    pub tolerance: f64,
    /// Cap on the total number of Arnoldi steps; `None` means `10 n`.
    pub max_iterations: Option<usize>,
    /// Right diagonal (Jacobi) scaling.
    pub jacobi: bool,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            restart: 30,
            tolerance: 1e-10,
            max_iterations: None,
            jacobi: false,
        }
    }
}

impl GmresOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restart < 1 {
            return Err(Error::InvalidParameter(
                "GMRES restart must be at least 1".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter(
                "GMRES tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn with_jacobi(mut self, jacobi: bool) -> Self {
        self.jacobi = jacobi;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GmresStats {
    /// Total Arnoldi steps over all cycles.
    pub iterations: usize,
    pub restarts: usize,
    /// Recomputed `‖b - Ax‖ / ‖b‖` of the returned iterate.
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn residual(a: &CsrMatrix, b: &[f64], x: &[f64], r: &mut [f64]) -> Result<f64> {
    a.spmv_into(x, r)?;
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    Ok(norm(r))
}

/// Solves `A x = b` from the initial guess `x0`.
///
/// Non-convergence is not an error: the last iterate is returned with
/// `converged == false`. A breakdown of the Arnoldi process that leaves the
/// residual above tolerance is reported as [`Error::Breakdown`].
pub fn gmres(
    a: &CsrMatrix,
    b: &[f64],
    x0: &[f64],
    opts: &GmresOptions,
) -> Result<(Vec<f64>, GmresStats)> {
    opts.validate()?;
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.n_cols(),
        });
    }
    for len in [b.len(), x0.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }

    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            GmresStats {
                converged: true,
                ..Default::default()
            },
        ));
    }
    let max_iterations = opts.max_iterations.unwrap_or(10 * n.max(1));
    let m = opts.restart.min(n.max(1));

    let inv_diag: Option<Vec<f64>> = opts.jacobi.then(|| {
        a.diagonal()
            .into_iter()
            .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
            .collect()
    });
    let precondition = |v: &[f64], out: &mut [f64]| match &inv_diag {
        Some(d) => out
            .iter_mut()
            .zip(v.iter().zip(d))
            .for_each(|(o, (vi, di))| *o = vi * di),
        None => out.copy_from_slice(v),
    };

    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut basis: Vec<Vec<f64>> = vec![vec![0.0; n]; m + 1];
    // Hessenberg matrix stored by column
    let mut h = vec![vec![0.0; m + 1]; m];
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];
    let mut stats = GmresStats::default();

    loop {
        let beta = residual(a, b, &x, &mut r)?;
        stats.residual = beta / b_norm;
        if stats.residual <= opts.tolerance {
            stats.converged = true;
            return Ok((x, stats));
        }
        if stats.iterations >= max_iterations || !beta.is_finite() {
            return Ok((x, stats));
        }

        for (vi, ri) in basis[0].iter_mut().zip(&r) {
            *vi = ri / beta;
        }
        g.iter_mut().for_each(|gi| *gi = 0.0);
        g[0] = beta;

        let mut k = 0;
        let mut breakdown = false;
        for j in 0..m {
            precondition(&basis[j], &mut z);
            a.spmv_into(&z, &mut w)?;
            let w_norm0 = norm(&w);
            for i in 0..=j {
                let hij = dot(&w, &basis[i]);
                h[j][i] = hij;
                for (wk, vk) in w.iter_mut().zip(&basis[i]) {
                    *wk -= hij * vk;
                }
            }
            let h_next = norm(&w);
            h[j][j + 1] = h_next;

            for i in 0..j {
                let (hi, hi1) = (h[j][i], h[j][i + 1]);
                h[j][i] = cs[i] * hi + sn[i] * hi1;
                h[j][i + 1] = -sn[i] * hi + cs[i] * hi1;
            }
            let (hjj, hj1) = (h[j][j], h[j][j + 1]);
            let rho = hjj.hypot(hj1);
            if rho == 0.0 {
                // A z = 0: singular operator on the current direction
                breakdown = true;
                break;
            }
            cs[j] = hjj / rho;
            sn[j] = hj1 / rho;
            h[j][j] = rho;
            h[j][j + 1] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];

            stats.iterations += 1;
            k = j + 1;
            breakdown = h_next <= f64::EPSILON * w_norm0;
            let estimate = g[j + 1].abs() / b_norm;
            if estimate <= opts.tolerance || breakdown || stats.iterations >= max_iterations {
                break;
            }
            for (vk, wk) in basis[j + 1].iter_mut().zip(&w) {
                *vk = wk / h_next;
            }
        }

        // back substitution on the rotated triangle
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|c| h[c][i] * y[c]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        let mut update = vec![0.0; n];
        for (c, yc) in y.iter().enumerate() {
            for (u, v) in update.iter_mut().zip(&basis[c]) {
                *u += yc * v;
            }
        }
        precondition(&update, &mut z);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
        stats.restarts += 1;

        if breakdown {
            let res = residual(a, b, &x, &mut r)? / b_norm;
            stats.residual = res;
            if res <= opts.tolerance {
                stats.converged = true;
                return Ok((x, stats));
            }
            return Err(Error::Breakdown { residual: res });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletMatrix;

    #[test]
    fn identity_in_one_step() {
        let a = CsrMatrix::identity(5);
        let b = [1.0, -2.0, 3.0, 0.5, 7.0];
        let (x, s) = gmres(&a, &b, &[0.0; 5], &GmresOptions::default()).unwrap();
        assert!(s.converged);
        assert_eq!(s.iterations, 1);
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_system() {
        let mut t = TripletMatrix::new(2, 2);
        t.push(0, 0, 2.0);
        t.push(1, 1, 3.0);
        let a = t.to_csr().unwrap();
        let opts = GmresOptions {
            tolerance: 1e-12,
            ..Default::default()
        };
        let (x, s) = gmres(&a, &[2.0, 3.0], &[0.0, 0.0], &opts).unwrap();
        assert!(s.converged);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = CsrMatrix::identity(3);
        let (x, s) = gmres(&a, &[0.0; 3], &[1.0; 3], &GmresOptions::default()).unwrap();
        assert_eq!(x, vec![0.0; 3]);
        assert!(s.converged);
    }

    #[test]
    fn singular_matrix_breaks_down() {
        let mut t = TripletMatrix::new(2, 2);
        t.push(0, 0, 1.0);
        let a = t.to_csr().unwrap();
        let r = gmres(&a, &[1.0, 1.0], &[0.0, 0.0], &GmresOptions::default());
        assert!(matches!(r, Err(Error::Breakdown { .. })));
    }

    #[test]
    fn iteration_cap_is_reported() {
        // 1D Laplacian, capped at 3 Arnoldi steps
        let n = 40;
        let mut t = TripletMatrix::new(n, n);
        for i in 0..n {
            t.push(i, i, 2.0);
            if i > 0 {
                t.push(i, i - 1, -1.0);
            }
            if i + 1 < n {
                t.push(i, i + 1, -1.0);
            }
        }
        let a = t.to_csr().unwrap();
        let opts = GmresOptions {
            max_iterations: Some(3),
            ..Default::default()
        };
        let (_, s) = gmres(&a, &vec![1.0; n], &vec![0.0; n], &opts).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iterations, 3);
    }

    #[test]
    fn bad_options() {
        let a = CsrMatrix::identity(2);
        let opts = GmresOptions {
            restart: 0,
            ..Default::default()
        };
        assert!(gmres(&a, &[1.0, 1.0], &[0.0, 0.0], &opts).is_err());
        assert!(gmres(&a, &[1.0], &[0.0, 0.0], &GmresOptions::default()).is_err());
    }
}
