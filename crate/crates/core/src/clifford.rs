//! Complex Clifford modules in even dimension.
//!
//! Convention: `c(v)^2 = -|v|^2`, so every gamma matrix is skew-adjoint and
//! the Dirac operator `sum_i c(e^i) d_i` is self-adjoint. Forms act through
//! the quantization map, which on an increasing multi-index is the ordered
//! product of gamma matrices.

use crate::error::{Error, Result};
use crate::C64;
use nalgebra::DMatrix;
use std::collections::BTreeMap;

pub type CMat = DMatrix<C64>;

/// A constant-coefficient exterior form on `R^n`, keyed by index bitmask.
///
/// Bit `i` of a mask stands for `dx^{i+1}`; the multi-index is read in
/// increasing order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExteriorForm {
    pub n: usize,
    pub terms: BTreeMap<u16, C64>,
}

impl ExteriorForm {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    /// The one-form `sum_i v_i dx^i`.
    pub fn one_form(v: &[f64]) -> Self {
        let mut f = Self::zero(v.len());
        for (i, &x) in v.iter().enumerate() {
            if x != 0.0 {
                f.terms.insert(1 << i, C64::new(x, 0.0));
            }
        }
        f
    }

    pub fn basis(n: usize, indices: &[usize], coeff: C64) -> Self {
        let mut f = Self::zero(n);
        let (mask, sign) = mask_from_indices(indices);
        if let Some(mask) = mask {
            f.terms.insert(mask, coeff * sign);
        }
        f
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }
}

/// Bitmask and reordering sign of a multi-index; `None` if an index repeats.
pub fn mask_from_indices(indices: &[usize]) -> (Option<u16>, f64) {
    let mut mask = 0u16;
    let mut sign = 1.0;
    for &i in indices {
        let bit = 1u16 << i;
        if mask & bit != 0 {
            return (None, 0.0);
        }
        // moving dx^i past every larger index already present
        if (mask & !((bit << 1) - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        mask |= bit;
    }
    (Some(mask), sign)
}

/// Sign of `dx^A ^ dx^B` relative to `dx^{A|B}`; zero when they overlap.
pub fn wedge_sign(a: u16, b: u16) -> f64 {
    if a & b != 0 {
        return 0.0;
    }
    // count pairs (i in a, j in b) with i > j
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Spinor representation of `Cl(R^n)` with chirality grading.
#[derive(Debug, Clone)]
pub struct SpinorRep {
    pub n: usize,
    pub gamma: Vec<CMat>,
    pub grading: CMat,
    pub str_normalizer: C64,
    products: Vec<CMat>,
}

fn pauli() -> [CMat; 4] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        CMat::from_row_slice(2, 2, &[o, z, z, o]),
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

fn kron_all(factors: &[&CMat]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for f in factors {
        out = out.kronecker(f);
    }
    out
}

/// Build gamma matrices `gamma_{2j-1} = i Z..Z X 1..1`, `gamma_{2j} = i Z..Z Y 1..1`
/// and grading `Z..Z`.
pub fn build_spinor_rep(n: usize) -> Result<SpinorRep> {
    if !n.is_multiple_of(2) || !(2..=8).contains(&n) {
        return Err(Error::UnsupportedDimension(n));
    }
    let m = n / 2;
    let [id, sx, sy, sz] = pauli();
    let i = C64::new(0.0, 1.0);
    let mut gamma = Vec::with_capacity(n);
    for j in 0..m {
        for s in [&sx, &sy] {
            let mut fs: Vec<&CMat> = Vec::with_capacity(m);
            for k in 0..m {
                fs.push(match k.cmp(&j) {
                    std::cmp::Ordering::Less => &sz,
                    std::cmp::Ordering::Equal => s,
                    std::cmp::Ordering::Greater => &id,
                });
            }
            gamma.push(kron_all(&fs) * i);
        }
    }
    let grading = kron_all(&vec![&sz; m]);
    let dim = 1usize << m;
    let products = (0..(1u32 << n))
        .map(|mask| {
            let mut p = CMat::identity(dim, dim);
            for (k, g) in gamma.iter().enumerate() {
                if mask & (1 << k) != 0 {
                    p = &p * g;
                }
            }
            p
        })
        .collect();
    Ok(SpinorRep { n, gamma, grading, str_normalizer: C64::new(1.0, 0.0), products })
}

impl SpinorRep {
    pub fn dim(&self) -> usize {
        self.grading.nrows()
    }

    pub fn with_normalizer(mut self, s: C64) -> Self {
        self.str_normalizer = s;
        self
    }

    /// `c(dx^I)` for an index bitmask `I`.
    pub fn gamma_product(&self, mask: u16) -> &CMat {
        &self.products[mask as usize]
    }

    /// Clifford multiplication by a constant-coefficient form.
    pub fn clifford_mult(&self, form: &ExteriorForm) -> Result<CMat> {
        if form.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: form.n });
        }
        let d = self.dim();
        let mut out = CMat::zeros(d, d);
        for (&mask, &c) in &form.terms {
            if mask as usize >= self.products.len() {
                return Err(Error::InvalidDegree { degree: mask.count_ones() as usize, dim: self.n });
            }
            out += self.gamma_product(mask) * c;
        }
        Ok(out)
    }

    /// `str_normalizer * tr(Gamma M)`.
    pub fn supertrace(&self, m: &CMat) -> Result<C64> {
        let d = self.dim();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: m.nrows() });
        }
        let mut s = C64::new(0.0, 0.0);
        for k in 0..d {
            s += self.grading[(k, k)] * m[(k, k)];
        }
        Ok(self.str_normalizer * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() < tol)
    }

    #[test]
    fn clifford_relations_all_dims() {
        for n in [2, 4, 6, 8] {
            let r = build_spinor_rep(n).unwrap();
            let id = CMat::identity(r.dim(), r.dim());
            assert!(close(&(&r.grading * &r.grading), &id, 1e-14));
            for i in 0..n {
                assert!(close(&r.gamma[i].adjoint(), &(-&r.gamma[i]), 1e-14));
                let ac = &r.grading * &r.gamma[i] + &r.gamma[i] * &r.grading;
                assert!(close(&ac, &CMat::zeros(r.dim(), r.dim()), 1e-14));
                for j in 0..n {
                    let ac = &r.gamma[i] * &r.gamma[j] + &r.gamma[j] * &r.gamma[i];
                    let want = if i == j { &id * C64::new(-2.0, 0.0) } else { CMat::zeros(r.dim(), r.dim()) };
                    assert!(close(&ac, &want, 1e-14), "n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn rejects_odd_and_large() {
        assert!(build_spinor_rep(3).is_err());
        assert!(build_spinor_rep(10).is_err());
        assert!(build_spinor_rep(0).is_err());
    }

    #[test]
    fn orthogonal_decomposable_product() {
        let r = build_spinor_rep(2).unwrap();
        let e12 = ExteriorForm::basis(2, &[0, 1], C64::new(1.0, 0.0));
        let c12 = r.clifford_mult(&e12).unwrap();
        assert!(close(&c12, &(&r.gamma[0] * &r.gamma[1]), 1e-15));
        let e21 = ExteriorForm::basis(2, &[1, 0], C64::new(1.0, 0.0));
        assert!(close(&r.clifford_mult(&e21).unwrap(), &(-c12), 1e-15));
    }

    #[test]
    fn supertrace_basics_n2() {
        let r = build_spinor_rep(2).unwrap();
        assert_eq!(r.supertrace(&CMat::identity(2, 2)).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(r.supertrace(&r.grading.clone()).unwrap(), C64::new(2.0, 0.0));
        // gamma_1 gamma_2 = (i sx)(i sy) = -i sz, so tr(sz * -i sz) = -2i
        let g12 = &r.gamma[0] * &r.gamma[1];
        assert!((r.supertrace(&g12).unwrap() - C64::new(0.0, -2.0)).norm() < 1e-15);
        assert!(r.supertrace(&CMat::identity(3, 3)).is_err());
    }

    #[test]
    fn supertrace_vanishes_below_top_degree() {
        let r = build_spinor_rep(4).unwrap();
        for mask in 0u16..15 {
            let s = r.supertrace(r.gamma_product(mask)).unwrap();
            assert!(s.norm() < 1e-14, "mask {mask}");
        }
        assert!(r.supertrace(r.gamma_product(15)).unwrap().norm() > 1.0);
    }

    #[test]
    fn wedge_sign_matches_reordering() {
        // dx2 ^ dx1 = -dx1 ^ dx2
        assert_eq!(wedge_sign(0b10, 0b01), -1.0);
        assert_eq!(wedge_sign(0b01, 0b10), 1.0);
        assert_eq!(wedge_sign(0b01, 0b01), 0.0);
        assert_eq!(mask_from_indices(&[2, 0, 1]), (Some(0b111), 1.0));
        assert_eq!(mask_from_indices(&[1, 0]), (Some(0b11), -1.0));
    }
}
