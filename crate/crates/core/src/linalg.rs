//! Small dense and sparse complex linear algebra helpers.

use crate::C64;
use nalgebra::DMatrix;

pub type CMat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian eigendecomposition `h = V diag(w) V^*` with ascending eigenvalues.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let sym = (h + h.adjoint()) * re(0.5);
    let eig = sym.symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let w = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let v = CMat::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, idx[c])]);
    (w, v)
}

/// Row-compressed sparse complex matrix.
#[derive(Debug, Clone)]
pub struct SparseMat {
    pub n: usize,
    pub rows: Vec<Vec<(u32, C64)>>,
}

impl SparseMat {
    /// Keeps entries with modulus above `tol` times the largest entry.
    pub fn from_dense(m: &CMat, tol: f64) -> Self {
        let cut = tol * max_abs(m);
        let rows = (0..m.nrows())
            .map(|r| {
                (0..m.ncols())
                    .filter_map(|c| {
                        let v = m[(r, c)];
                        (v.norm() > cut && v != ZERO).then_some((c as u32, v))
                    })
                    .collect()
            })
            .collect();
        Self { n: m.nrows(), rows }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, rows: vec![Vec::new(); n] }
    }

    pub fn identity(n: usize) -> Self {
        Self { n, rows: (0..n).map(|i| vec![(i as u32, ONE)]).collect() }
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.n, self.n);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[(r, c as usize)] += v;
            }
        }
        m
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMat) -> SparseMat {
        let mut acc = vec![ZERO; self.n];
        let mut touched: Vec<u32> = Vec::new();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                for &(k, a) in row {
                    for &(j, b) in &other.rows[k as usize] {
                        if acc[j as usize] == ZERO {
                            touched.push(j);
                        }
                        acc[j as usize] += a * b;
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                let out: Vec<(u32, C64)> = touched
                    .iter()
                    .filter_map(|&j| {
                        let v = std::mem::replace(&mut acc[j as usize], ZERO);
                        (v != ZERO).then_some((j, v))
                    })
                    .collect();
                touched.clear();
                out
            })
            .collect();
        SparseMat { n: self.n, rows }
    }

    /// `alpha * self + beta * other`.
    pub fn lin_comb(&self, alpha: C64, other: &SparseMat, beta: C64) -> SparseMat {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut out: Vec<(u32, C64)> = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let ca = a.get(i).map(|x| x.0).unwrap_or(u32::MAX);
                    let cb = b.get(j).map(|x| x.0).unwrap_or(u32::MAX);
                    let (c, v) = if ca < cb {
                        i += 1;
                        (ca, alpha * a[i - 1].1)
                    } else if cb < ca {
                        j += 1;
                        (cb, beta * b[j - 1].1)
                    } else {
                        i += 1;
                        j += 1;
                        (ca, alpha * a[i - 1].1 + beta * b[j - 1].1)
                    };
                    if v != ZERO {
                        out.push((c, v));
                    }
                }
                out
            })
            .collect();
        SparseMat { n: self.n, rows }
    }

    pub fn scale(&self, s: C64) -> SparseMat {
        SparseMat { n: self.n, rows: self.rows.iter().map(|r| r.iter().map(|&(c, v)| (c, v * s)).collect()).collect() }
    }
}

/// Matrix exponential of a small real matrix by scaling and squaring.
pub fn expm_real(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.iter().map(|x| x.abs()).sum::<f64>().max(1e-300);
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let b = a / 2f64.powi(s);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut out = term.clone();
    for k in 1..=18 {
        term = &term * &b / k as f64;
        out += &term;
    }
    for _ in 0..s {
        out = &out * &out;
    }
    out
}

/// Matrix exponential of a small complex matrix by scaling and squaring.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = a.iter().map(|x| x.norm()).sum::<f64>().max(1e-300);
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let b = a * re(1.0 / 2f64.powi(s));
    let mut term = CMat::identity(n, n);
    let mut out = term.clone();
    for k in 1..=18 {
        term = &term * &b * re(1.0 / k as f64);
        out += &term;
    }
    for _ in 0..s {
        out = &out * &out;
    }
    out
}
