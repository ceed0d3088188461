//! Symmetric tridiagonal eigensolver: Sturm-sequence bisection for selected
//! low eigenvalues, inverse iteration for the eigenvectors.

/// Symmetric tridiagonal matrix: `diag` has length n, `off` length n-1.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length mismatch");
        SymTridiag { diag, off }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    fn scale(&self) -> f64 {
        let mut s = 0.0f64;
        for &d in &self.diag {
            s = s.max(d.abs());
        }
        for &b in &self.off {
            s = s.max(b.abs());
        }
        s.max(1.0)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via LDL^T).
    pub fn sturm_count(&self, x: f64) -> usize {
        let n = self.n();
        let pivmin = self.scale() * f64::EPSILON * f64::EPSILON;
        let mut count = 0usize;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let mut d = q;
            if d.abs() < pivmin {
                d = if d < 0.0 { -pivmin } else { pivmin };
            }
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / d;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k` lowest eigenvalues, ascending, each located by bisection.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let (glo, ghi) = self.gershgorin();
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let (mut lo, mut hi) = (glo, ghi);
            // shrink using previously located eigenvalues
            if let Some(&prev) = out.last() {
                lo = prev;
            }
            // smallest x with count(x) >= j+1
            for _ in 0..200 {
                let tol = 4.0 * f64::EPSILON * (lo.abs().max(hi.abs()) + 1.0);
                if hi - lo <= tol {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if self.sturm_count(mid) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        out
    }

    /// Solve (T - lambda I) x = b by tridiagonal LU with partial pivoting
    /// (gttrf-style, with one fill-in superdiagonal). Near-singular pivots are
    /// nudged, which is exactly what inverse iteration wants.
    fn solve_shifted(&self, lambda: f64, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut d: Vec<f64> = self.diag.iter().map(|&a| a - lambda).collect();
        let mut du: Vec<f64> = self.off.clone();
        let mut dl: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0f64; n.saturating_sub(2)];
        let mut x = b.to_vec();
        let pivmin = self.scale() * 1e-3 * f64::EPSILON * f64::EPSILON;
        let nudge = |p: f64| {
            if p.abs() < pivmin {
                if p < 0.0 {
                    -pivmin
                } else {
                    pivmin
                }
            } else {
                p
            }
        };

        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                // no row interchange
                let m = dl[i] / nudge(d[i]);
                d[i] = nudge(d[i]);
                dl[i] = m; // store multiplier
                d[i + 1] -= m * du[i];
                if i + 2 < n {
                    du2[i] = 0.0;
                }
                x[i + 1] -= m * x[i];
            } else {
                // interchange rows i and i+1
                let m = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = m;
                let t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - m * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -m;
                }
                x.swap(i, i + 1);
                x[i + 1] -= m * x[i];
            }
        }
        d[n - 1] = nudge(d[n - 1]);

        // back substitution
        x[n - 1] /= d[n - 1];
        if n >= 2 {
            x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / nudge(d[n - 2]);
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / nudge(d[i]);
        }
        x
    }

    /// Eigenvector for an already-located eigenvalue, by inverse iteration.
    /// `prev` holds eigenvectors of lower modes for re-orthogonalization when
    /// the spectrum is locally clustered.
    pub fn eigenvector(&self, lambda: f64, prev: &[Vec<f64>], prev_vals: &[f64]) -> Vec<f64> {
        let n = self.n();
        let cluster_tol = 1e-6 * self.scale();
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 2.399_963_229).sin())
            .collect();
        normalize(&mut v);
        for _ in 0..4 {
            let mut w = self.solve_shifted(lambda, &v);
            for (u, &lu) in prev.iter().zip(prev_vals) {
                if (lu - lambda).abs() < cluster_tol {
                    let c = dot(&w, u);
                    for (wi, ui) in w.iter_mut().zip(u) {
                        *wi -= c * ui;
                    }
                }
            }
            normalize(&mut w);
            let drift = 1.0 - dot(&w, &v).abs();
            v = w;
            if drift < 1e-14 {
                break;
            }
        }
        v
    }

    /// The `k` lowest eigenpairs, ascending, vectors Euclidean-normalized.
    pub fn lowest_eigenpairs(&self, k: usize) -> Vec<(f64, Vec<f64>)> {
        let vals = self.lowest_eigenvalues(k);
        let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(k);
        for (j, &lam) in vals.iter().enumerate() {
            let v = self.eigenvector(lam, &vecs[..j], &vals[..j]);
            vecs.push(v);
        }
        vals.into_iter().zip(vecs).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}
