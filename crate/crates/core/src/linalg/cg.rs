use crate::error::{Error, Result};
use crate::linalg::{dot, CsrMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOptions {
    /// Target relative residual `‖b − Ax‖ / ‖b‖`.
    pub tol: f64,
    /// Defaults to `50 √n`.
    pub max_iter: Option<usize>,
    /// Record `(iteration, relative residual)` pairs.
    pub trace: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: None,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    pub residual: f64,
    pub trace: Vec<(usize, f64)>,
}

/// Jacobi-preconditioned conjugate gradients for SPD `A`, starting from `x`.
pub fn conjugate_gradient(a: &CsrMatrix, b: &[f64], x: &mut [f64], opts: &CgOptions) -> Result<CgOutcome> {
    let n = a.n();
    assert_eq!(b.len(), n);
    assert_eq!(x.len(), n);
    let max_iter = opts
        .max_iter
        .unwrap_or_else(|| ((50.0 * (n as f64).sqrt()).ceil() as usize).max(50));
    let bnorm = dot(b, b).sqrt();
    let mut out = CgOutcome::default();
    if bnorm == 0.0 {
        x.fill(0.0);
        return Ok(out);
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut r = vec![0.0; n];
    a.matvec(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut rel = dot(&r, &r).sqrt() / bnorm;
    if opts.trace {
        out.trace.push((0, rel));
    }
    let mut k = 0;
    while rel > opts.tol && k < max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        let mut rr = 0.0;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] * inv_diag[i];
            rr += r[i] * r[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        k += 1;
        rel = rr.sqrt() / bnorm;
        if opts.trace {
            out.trace.push((k, rel));
        }
    }
    out.iterations = k;
    out.residual = rel;
    if rel > opts.tol {
        return Err(Error::SolverDiverged {
            iterations: k,
            residual: rel,
            target: opts.tol,
        });
    }
    Ok(out)
}

/// Writes a solver trace as `iteration,residual` CSV.
pub fn write_trace<W: std::io::Write>(trace: &[(usize, f64)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "iteration,residual")?;
    for (k, r) in trace {
        writeln!(out, "{k},{r:e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CsrBuilder;

    fn laplacian_1d(n: usize, shift: f64) -> CsrMatrix {
        let mut b = CsrBuilder::with_capacity(n, 3 * n);
        for i in 0..n {
            b.push(i, 2.0 + shift);
            if i > 0 {
                b.push(i - 1, -1.0);
            }
            if i + 1 < n {
                b.push(i + 1, -1.0);
            }
            b.finish_row();
        }
        b.build()
    }

    #[test]
    fn solves_tridiagonal_system() {
        let a = laplacian_1d(200, 0.01);
        let truth: Vec<f64> = (0..200).map(|i| (i as f64 * 0.1).sin()).collect();
        let mut rhs = vec![0.0; 200];
        a.matvec(&truth, &mut rhs);
        let mut x = vec![0.0; 200];
        let out = conjugate_gradient(&a, &rhs, &mut x, &CgOptions { tol: 1e-12, ..Default::default() }).unwrap();
        assert!(out.residual <= 1e-12);
        for (u, v) in x.iter().zip(&truth) {
            assert!((u - v).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let a = laplacian_1d(10, 0.0);
        let mut x = vec![1.0; 10];
        let out = conjugate_gradient(&a, &[0.0; 10], &mut x, &CgOptions::default()).unwrap();
        assert_eq!(out.iterations, 0);
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn iteration_cap_reports_divergence() {
        let a = laplacian_1d(500, 0.0);
        let rhs = vec![1.0; 500];
        let mut x = vec![0.0; 500];
        let err = conjugate_gradient(
            &a,
            &rhs,
            &mut x,
            &CgOptions {
                tol: 1e-12,
                max_iter: Some(3),
                trace: true,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::SolverDiverged { iterations: 3, .. }));
    }

    #[test]
    fn trace_is_recorded() {
        let a = laplacian_1d(20, 0.1);
        let mut x = vec![0.0; 20];
        let out = conjugate_gradient(&a, &[1.0; 20], &mut x, &CgOptions { trace: true, ..Default::default() }).unwrap();
        assert_eq!(out.trace.len(), out.iterations + 1);
        let mut csv = Vec::new();
        write_trace(&out.trace, &mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("iteration,residual\n0,"));
    }
}
