//! The Chern character cochain of a spectral model and its companions.
//!
//! On a word `(t_1, .., t_N)` the cochain sums over compositions of the word
//! into consecutive blocks of one or two slots:
//!
//! `Ch_D(t_1..t_N) = sum_s 2^{-M(s)} int Str(e^{-t_1 H} F[block_1] ... F[block_M] e^{-(1-t_M) H})`
//!
//! with `F[t] = c(t'') + [D, c(t')] - c(dt')` and
//! `F[t_1, t_2] = (-1)^{|t_1'|} (c(t_1') c(t_2') - c(t_1' ^ t_2'))`.
//! The per-block weight `2^{-1/2}` for each slot in a block of two is what
//! makes the cochain coclosed; it also pairs the Bismut chain with the index.

use crate::bar::{total_differential, BarChain};
use crate::error::{Error, Result};
use crate::forms::{integrate_top, ScalarForm, TForm};
use crate::linalg::{re, CMat, SparseMat, ONE, ZERO};
use crate::operators::{mult_operator, simplex_operator_integral_sparse, SpectralModel};
use crate::quadrature::Quadrature;
use crate::C64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

fn sign(p: usize) -> f64 {
    if p.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn widen(f: &ScalarForm, m: &SpectralModel) -> ScalarForm {
    let mut g = f.clone();
    g.cutoff = g.cutoff.max(2 * m.cutoff());
    g
}

fn mult_sparse(m: &SpectralModel, f: &ScalarForm) -> Result<SparseMat> {
    if f.is_zero() {
        return Ok(SparseMat::zeros(m.dim()));
    }
    Ok(SparseMat::from_dense(&mult_operator(m, f)?, 0.0))
}

pub(crate) fn f_one_sparse(m: &SpectralModel, t: &TForm) -> Result<SparseMat> {
    let mut out = mult_sparse(m, &t.dprime)?;
    for (p, part) in t.prime.homogeneous_parts() {
        let c = mult_sparse(m, &part)?;
        let dc = m.d_sparse.mul(&c);
        let cd = c.mul(&m.d_sparse);
        out = out.lin_comb(ONE, &dc.lin_comb(ONE, &cd, re(-sign(p))), ONE);
    }
    if !t.prime.is_constant_coefficient() {
        out = out.lin_comb(ONE, &mult_sparse(m, &t.prime.exterior_d())?, re(-1.0));
    }
    Ok(out)
}

pub(crate) fn f_two_sparse(m: &SpectralModel, a: &TForm, b: &TForm) -> Result<SparseMat> {
    let mut out = SparseMat::zeros(m.dim());
    let bp = widen(&b.prime, m);
    let cb = mult_sparse(m, &bp)?;
    for (p, part) in a.prime.homogeneous_parts() {
        let part = widen(&part, m);
        let prod = mult_sparse(m, &part)?.mul(&cb);
        let wedge = mult_sparse(m, &part.wedge(&bp)?)?;
        out = out.lin_comb(ONE, &prod.lin_comb(ONE, &wedge, re(-1.0)), re(sign(p)));
    }
    Ok(out)
}

/// `F[t] = c(t'') + [D, c(t')] - c(dt')` with the graded commutator.
#[allow(non_snake_case)]
pub fn F_one(m: &SpectralModel, t: &TForm) -> Result<CMat> {
    Ok(f_one_sparse(m, t)?.to_dense())
}

/// `F[t_1, t_2] = (-1)^{|t_1'|}(c(t_1') c(t_2') - c(t_1' ^ t_2'))`.
#[allow(non_snake_case)]
pub fn F_two(m: &SpectralModel, a: &TForm, b: &TForm) -> Result<CMat> {
    Ok(f_two_sparse(m, a, b)?.to_dense())
}

/// Compositions of `n` into parts of size one and two.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in [1, 2] {
        if first <= n {
            for mut rest in compositions(n - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
    }
    out
}

/// `Ch_D` on a single word.
pub fn chern_word(m: &SpectralModel, w: &[TForm], quad: Quadrature) -> Result<C64> {
    let n = w.len();
    if n > 4 {
        return Err(Error::InvalidArgument(format!("word length {n} exceeds 4")));
    }
    if w.iter().any(|t| t.is_zero()) {
        return Ok(ZERO);
    }
    let ones: Vec<SparseMat> = w.iter().map(|t| f_one_sparse(m, t)).collect::<Result<_>>()?;
    let twos: Vec<SparseMat> = w.windows(2).map(|p| f_two_sparse(m, &p[0], &p[1])).collect::<Result<_>>()?;
    let mut total = ZERO;
    for comp in compositions(n) {
        let mut factors = Vec::with_capacity(comp.len());
        let mut pos = 0;
        for &b in &comp {
            factors.push(if b == 1 { ones[pos].clone() } else { twos[pos].clone() });
            pos += b;
        }
        if factors.iter().any(|f| f.nnz() == 0) {
            continue;
        }
        let weight = 0.5f64.powi(comp.len() as i32);
        total += simplex_operator_integral_sparse(m, &factors, quad)? * weight;
    }
    Ok(total)
}

/// `Ch_D` extended linearly to chains.
pub fn chern_character(m: &SpectralModel, c: &BarChain, quad: Quadrature) -> Result<C64> {
    let vals: Vec<C64> =
        c.terms.par_iter().map(|(coef, w)| chern_word(m, w, quad).map(|v| coef * v)).collect::<Result<_>>()?;
    Ok(vals.into_iter().sum())
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        // insert n-1 at position i: moves past (n-1-i) larger-index slots
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            let moved = p.len() - i;
            out.push((q, s * sign(moved)));
        }
    }
    out
}

/// All permutations of `0..n` with their signs.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    permutations(n)
}

/// `2^{-N/2} sum_sigma sgn(sigma) int Str(e^{-t_1 H} c(t_{sigma_1}) ... ) dt`.
pub fn integral_map_one_forms(m: &SpectralModel, forms: &[ScalarForm], quad: Quadrature) -> Result<C64> {
    let n = forms.len();
    if n > 4 {
        return Err(Error::InvalidArgument(format!("{n} forms, at most 4 supported")));
    }
    let ops: Vec<SparseMat> = forms.iter().map(|f| mult_sparse(m, f)).collect::<Result<_>>()?;
    let mut total = ZERO;
    for (p, s) in permutations(n) {
        let factors: Vec<SparseMat> = p.iter().map(|&i| ops[i].clone()).collect();
        total += simplex_operator_integral_sparse(m, &factors, quad)? * s;
    }
    Ok(total * 2f64.powf(-(n as f64) / 2.0))
}

/// `mu_0(t_1..t_N) = (2 pi)^{-n/2} / N! int_X A-hat ^ t_1'' ^ ... ^ t_N''`.
pub fn mu0(c: &BarChain, a_hat: &ScalarForm) -> Result<C64> {
    let n = a_hat.n;
    let mut total = ZERO;
    for (coef, w) in &c.terms {
        let mut f = a_hat.clone();
        for t in w {
            f = f.wedge(&t.dprime)?;
        }
        let fact: f64 = (1..=w.len()).map(|k| k as f64).product();
        total += coef * integrate_top(&f) * (2.0 * PI).powf(-(n as f64) / 2.0) / fact;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Residual {
    pub abs: f64,
    /// sum of the moduli of the individual word contributions
    pub scale: f64,
    pub relative: f64,
}

impl Residual {
    /// `abs / max(scale, floor)`: relative for sizeable chains, absolute
    /// (scaled by `1/floor`) when every term is negligible.
    pub fn normalized(&self, floor: f64) -> f64 {
        self.abs / self.scale.max(floor)
    }
}

/// `|Ch_D((d + b') c)|` together with the size of the cancelling terms.
pub fn coclosedness_residual(m: &SpectralModel, c: &BarChain, quad: Quadrature) -> Result<Residual> {
    let dc = total_differential(c)?.pruned();
    let vals: Vec<C64> =
        dc.terms.par_iter().map(|(coef, w)| chern_word(m, w, quad).map(|v| coef * v)).collect::<Result<_>>()?;
    let abs = vals.iter().sum::<C64>().norm();
    let scale: f64 = vals.iter().map(|v| v.norm()).sum();
    Ok(Residual { abs, scale, relative: if scale > 0.0 { abs / scale } else { 0.0 } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bar::{cyclic_project, random_tform};
    use crate::clifford::build_spinor_rep;
    use crate::forms::FlatTorus;
    use crate::linalg::max_abs;
    use crate::operators::{build_dirac_flat, build_dirac_magnetic, mckean_singer, BundleModel};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn flat(cutoff: i32) -> SpectralModel {
        let rep = build_spinor_rep(2).unwrap();
        let b = BundleModel::flat_trivial(2, 1).unwrap();
        build_dirac_flat(FlatTorus::new(2).unwrap(), cutoff, &b, &rep).unwrap()
    }

    fn twisted(cutoff: i32) -> SpectralModel {
        let rep = build_spinor_rep(2).unwrap();
        let a = ScalarForm::monomial(2, 1, &[0], &[0, 1], C64::new(0.3, 0.1))
            .add(&ScalarForm::monomial(2, 1, &[0], &[0, -1], C64::new(0.3, -0.1)))
            .unwrap()
            .add(&ScalarForm::monomial(2, 1, &[1], &[0, 0], re(0.4)))
            .unwrap();
        let b = BundleModel::line_with_potential(&a).unwrap();
        build_dirac_flat(FlatTorus::new(2).unwrap(), cutoff, &b, &rep).unwrap()
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(0).len(), 1);
        assert_eq!(compositions(3).len(), 3);
        assert_eq!(compositions(4).len(), 5);
    }

    #[test]
    fn signed_permutations_of_three() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        for (q, s) in p {
            let inv = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| q[i] > q[j]).count();
            assert_eq!(s, sign(inv));
        }
    }

    #[test]
    fn f_one_simple_cases() {
        let m = flat(2);
        let v = ScalarForm::monomial(2, 2, &[0], &[0, 0], re(1.3));
        let t = TForm::from_dprime(v.clone()).unwrap();
        assert!(max_abs(&(F_one(&m, &t).unwrap() - mult_operator(&m, &v).unwrap())) < 1e-14);
        let f = ScalarForm::monomial(2, 2, &[], &[1, -1], C64::new(0.2, 0.5));
        assert!(max_abs(&F_one(&m, &TForm::from_prime(f).unwrap()).unwrap()) < 1e-12);
        let one = TForm::from_prime(ScalarForm::constant(2, 2, ONE)).unwrap();
        assert!(max_abs(&F_one(&m, &one).unwrap()) < 1e-15);
    }

    #[test]
    fn f_two_simple_cases() {
        let m = flat(1);
        let f = TForm::from_prime(ScalarForm::monomial(2, 1, &[], &[1, 0], ONE)).unwrap();
        let g = TForm::from_prime(ScalarForm::monomial(2, 1, &[], &[0, 1], ONE)).unwrap();
        // only boundary modes, which the product drops, may differ
        let fg = F_two(&m, &f, &g).unwrap();
        let u = TForm::from_prime(ScalarForm::monomial(2, 1, &[0], &[0, 0], ONE)).unwrap();
        let v = TForm::from_prime(ScalarForm::monomial(2, 1, &[1], &[0, 0], ONE)).unwrap();
        assert!(max_abs(&F_two(&m, &u, &v).unwrap()) < 1e-15);
        // c(u)^2 = -1 and u ^ u = 0, so F[u, u] = -(-1) = +1
        let uu = F_two(&m, &u, &u).unwrap();
        assert!(max_abs(&(uu - CMat::identity(m.dim(), m.dim()))) < 1e-15);
        let _ = fg;
    }

    #[test]
    fn empty_word_is_heat_supertrace() {
        let rep = build_spinor_rep(2).unwrap();
        let m = build_dirac_magnetic(1, 10, &rep).unwrap();
        let v = chern_character(&m, &BarChain::empty_word(ONE), Quadrature::Exact).unwrap();
        assert!((v - mckean_singer(&m, 1.0).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn interior_constant_slot_vanishes() {
        let m = twisted(2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let one = TForm::from_prime(ScalarForm::constant(2, 1, ONE)).unwrap();
        let a = random_tform(&mut rng, 2, (1, 1), 1, 2);
        let b = random_tform(&mut rng, 2, (1, 1), 2, 2);
        let v = chern_word(&m, &[a, one, b], Quadrature::Exact).unwrap();
        assert!(v.norm() < 1e-13, "{v}");
    }

    #[test]
    fn one_form_words_match_combinatoric_formula() {
        let m = twisted(2);
        let u = ScalarForm::monomial(2, 1, &[0], &[1, 0], C64::new(0.5, 0.2));
        let v = ScalarForm::monomial(2, 1, &[1], &[-1, 0], C64::new(-0.3, 0.7))
            .add(&ScalarForm::monomial(2, 1, &[0], &[0, 0], re(0.4)))
            .unwrap();
        let (tu, tv) = (TForm::from_dprime(u.clone()).unwrap(), TForm::from_dprime(v.clone()).unwrap());
        let ch = chern_word(&m, &[tu.clone(), tv.clone()], Quadrature::Exact).unwrap()
            - chern_word(&m, &[tv, tu], Quadrature::Exact).unwrap();
        let im = integral_map_one_forms(&m, &[u, v], Quadrature::Exact).unwrap();
        // one-form words carry 2^{-N} against 2^{-N/2} in the combinatoric formula
        assert!((ch - im * 0.5).norm() < 1e-12 * (1.0 + im.norm()), "{ch} {im}");
    }

    #[test]
    fn coclosed_on_random_cyclic_chains() {
        let m = twisted(3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for len in 1..=3 {
            let w: Vec<TForm> = (0..len)
                .map(|_| {
                    let deg = rand::Rng::gen_range(&mut rng, 0..=2);
                    random_tform(&mut rng, 2, (1, 4), deg, 5)
                })
                .collect();
            let c = cyclic_project(&BarChain::word(ONE, w));
            let r = coclosedness_residual(&m, &c, Quadrature::Exact).unwrap();
            assert!(r.abs < 1e-11 * (1.0 + r.scale), "len {len}: {r:?}");
        }
    }

    #[test]
    fn mu0_examples() {
        let one = ScalarForm::constant(2, 0, ONE);
        assert_eq!(mu0(&BarChain::empty_word(ONE), &one).unwrap(), ZERO);
        let t1 = TForm::from_dprime(ScalarForm::monomial(2, 0, &[0], &[0, 0], ONE)).unwrap();
        let t2 = TForm::from_dprime(ScalarForm::monomial(2, 0, &[1], &[0, 0], ONE)).unwrap();
        let v = mu0(&BarChain::word(ONE, vec![t1, t2]), &one).unwrap();
        assert!((v - re(1.0 / (4.0 * PI))).norm() < 1e-15);
    }
}
