//! Finite spectral models of twisted Dirac operators on flat tori.
//!
//! Two realizations are provided. The Fourier model uses plane waves
//! `|k|_inf <= cutoff` tensored with spinors and a trivial bundle carrying a
//! connection potential. The Landau model realizes the Dirac operator of a
//! flux-`k` line bundle on `T^2` through ladder operators. Both keep `D` odd
//! and self-adjoint, so the supertrace of the heat semigroup is exact.

use crate::clifford::SpinorRep;
use crate::error::{Error, Result};
use crate::forms::{FlatTorus, FormMatrix, Mode, ScalarForm};
use crate::linalg::{hermitian_eigen, max_abs, re, CMat, SparseMat, I, ONE, ZERO};
use crate::quadrature::{simplex_exp_integral, simplex_exp_integral_rule, Quadrature, SimplexRule};
use crate::C64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::collections::HashMap;
use std::f64::consts::PI;

/// Hermitian vector bundle with connection over a flat torus.
#[derive(Debug, Clone)]
pub enum BundleModel {
    /// Trivial rank-`r` bundle with `nabla = d + A`, `A` an `r x r` matrix of
    /// one-forms with skew-hermitian values.
    Trivial { base: FlatTorus, potential: FormMatrix },
    /// Line bundle of degree `flux` on `T^2`, optionally twisted further by
    /// the flat constant potential `i (b_1 dx^1 + b_2 dx^2)`.
    MagneticLine { flux: i32, levels: usize, background: [f64; 2] },
}

impl BundleModel {
    pub fn flat_trivial(n: usize, rank: usize) -> Result<Self> {
        let base = FlatTorus::new(n)?;
        Ok(Self::Trivial { base, potential: vec![vec![ScalarForm::zero(n, 0); rank]; rank] })
    }

    /// Rank-one bundle with potential `i a` for a real one-form `a`.
    pub fn line_with_potential(a: &ScalarForm) -> Result<Self> {
        let base = FlatTorus::new(a.n)?;
        if a.degrees().iter().any(|&d| d != 1) {
            return Err(Error::InvalidArgument("potential must be a one-form".into()));
        }
        Ok(Self::Trivial { base, potential: vec![vec![a.scale(I)]] })
    }

    pub fn magnetic(flux: i32, levels: usize) -> Self {
        Self::MagneticLine { flux, levels, background: [0.0, 0.0] }
    }

    pub fn rank(&self) -> usize {
        match self {
            Self::Trivial { potential, .. } => potential.len(),
            Self::MagneticLine { .. } => 1,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Trivial { base, .. } => base.n,
            Self::MagneticLine { .. } => 2,
        }
    }

    /// Canonical text used for hashing.
    pub fn describe(&self) -> String {
        match self {
            Self::Trivial { base, potential } => {
                let mut s = format!("trivial n={} rank={}", base.n, potential.len());
                for (i, row) in potential.iter().enumerate() {
                    for (j, f) in row.iter().enumerate() {
                        for (&(m, k), c) in &f.terms {
                            s.push_str(&format!(" A{i}{j}:{m}:{k:?}:{:e}:{:e}", c.re, c.im));
                        }
                    }
                }
                s
            }
            Self::MagneticLine { flux, levels, background } => {
                format!("magnetic flux={flux} levels={levels} bg={:e},{:e}", background[0], background[1])
            }
        }
    }

    /// Curvature `R = dA + A ^ A` (constant `-2 pi i k dx^1 ^ dx^2` for magnetic bundles).
    pub fn curvature(&self, cutoff: i32) -> Result<FormMatrix> {
        match self {
            Self::Trivial { base, potential } => {
                let n = base.n;
                let r = potential.len();
                let c = cutoff.max(potential_cutoff(potential));
                let aa = crate::forms::form_matrix_mul(potential, potential, n, c)?;
                let mut out = vec![vec![ScalarForm::zero(n, c); r]; r];
                for i in 0..r {
                    for j in 0..r {
                        out[i][j] = potential[i][j].exterior_d().add(&aa[i][j])?;
                    }
                }
                Ok(out)
            }
            Self::MagneticLine { flux, .. } => Ok(vec![vec![ScalarForm::monomial(
                2,
                cutoff,
                &[0, 1],
                &[0, 0],
                C64::new(0.0, -2.0 * PI * *flux as f64),
            )]]),
        }
    }
}

fn potential_cutoff(p: &FormMatrix) -> i32 {
    p.iter()
        .flatten()
        .flat_map(|f| f.terms.keys().map(|(_, k)| k.iter().map(|x| x.abs()).max().unwrap()))
        .max()
        .unwrap_or(0)
}

/// Basis bookkeeping of a spectral model.
#[derive(Debug, Clone)]
pub enum ModelKind {
    /// Plane waves `modes[m]` x spinor x bundle, index `(m * s + a) * r + b`.
    Fourier { torus: FlatTorus, cutoff: i32, rank: usize, modes: Vec<Mode>, mode_index: HashMap<Mode, usize> },
    /// Landau states `(spinor, level, guiding centre)` listed in `states`.
    Landau { flux: i32, levels: usize, states: Vec<(usize, usize, usize)> },
}

/// A truncated Dirac operator with its heat-semigroup data.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    pub kind: ModelKind,
    pub rep: SpinorRep,
    pub d: CMat,
    pub d_sparse: SparseMat,
    /// diagonal of the chirality grading in the model basis
    pub grading: Vec<f64>,
    pub h: CMat,
    pub eigenvalues: Vec<f64>,
    /// `None` when the model basis already diagonalizes `H`
    pub eigenvectors: Option<CMat>,
    /// cluster label of each eigenvalue, equal labels for equal eigenvalues
    pub labels: Vec<u32>,
    pub label_values: Vec<f64>,
    pub hash: String,
    /// largest heat weight `e^{-H}` of a state dropped by the truncation
    pub truncation_error: f64,
    /// true when the potential couples retained modes to dropped ones
    pub truncation_overflow: bool,
}

fn hash_of(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

fn all_modes(n: usize, cutoff: i32) -> Vec<Mode> {
    let side = (2 * cutoff + 1) as usize;
    (0..side.pow(n as u32))
        .map(|mut flat| {
            let mut k = [0i32; 4];
            for kj in k.iter_mut().take(n) {
                *kj = (flat % side) as i32 - cutoff;
                flat /= side;
            }
            k
        })
        .collect()
}

/// Dirac operator `sum_i c(e^i)(d_i + A_i)` on the Fourier model.
pub fn build_dirac_flat(torus: FlatTorus, cutoff: i32, bundle: &BundleModel, rep: &SpinorRep) -> Result<SpectralModel> {
    assemble_flat(torus, cutoff, bundle, rep).map(|a| a.finish(None))
}

fn assemble_flat(torus: FlatTorus, cutoff: i32, bundle: &BundleModel, rep: &SpinorRep) -> Result<Assembled> {
    let potential = match bundle {
        BundleModel::Trivial { base, potential } => {
            if base.n != torus.n {
                return Err(Error::BaseMismatch(base.n, torus.n));
            }
            potential
        }
        BundleModel::MagneticLine { .. } => {
            return Err(Error::Unsupported("magnetic bundles use build_dirac_magnetic".into()))
        }
    };
    if rep.n != torus.n {
        return Err(Error::DimensionMismatch { expected: torus.n, found: rep.n });
    }
    if potential_cutoff(potential) > cutoff {
        return Err(Error::TruncationOverflow(format!(
            "potential has modes up to {} beyond cutoff {cutoff}",
            potential_cutoff(potential)
        )));
    }
    let n = torus.n;
    let r = potential.len();
    let s = rep.dim();
    let modes = all_modes(n, cutoff);
    let mode_index: HashMap<Mode, usize> = modes.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let dim = modes.len() * s * r;
    let idx = |m: usize, a: usize, b: usize| (m * s + a) * r + b;
    let mut d = CMat::zeros(dim, dim);
    let mut overflow = false;
    for (mi, k) in modes.iter().enumerate() {
        for (i, g) in rep.gamma.iter().enumerate() {
            let dk = C64::new(0.0, 2.0 * PI * k[i] as f64);
            for a in 0..s {
                for a2 in 0..s {
                    let gv = g[(a, a2)];
                    if gv == ZERO {
                        continue;
                    }
                    for b in 0..r {
                        d[(idx(mi, a, b), idx(mi, a2, b))] += gv * dk;
                    }
                }
            }
        }
        // potential: A_i[b, b'] e^{2 pi i q.x} maps mode k to k + q
        for (b, row) in potential.iter().enumerate() {
            for (b2, f) in row.iter().enumerate() {
                for (&(mask, q), &c) in &f.terms {
                    let i = mask.trailing_zeros() as usize;
                    let target = [k[0] + q[0], k[1] + q[1], k[2] + q[2], k[3] + q[3]];
                    let Some(&mt) = mode_index.get(&target) else {
                        overflow = true;
                        continue;
                    };
                    let g = &rep.gamma[i];
                    for a in 0..s {
                        for a2 in 0..s {
                            let gv = g[(a, a2)];
                            if gv != ZERO {
                                d[(idx(mt, a, b), idx(mi, a2, b2))] += gv * c;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut grading = Vec::with_capacity(dim);
    for _ in 0..modes.len() {
        for a in 0..s {
            for _ in 0..r {
                grading.push(rep.grading[(a, a)].re);
            }
        }
    }
    let dropped = 2.0 * PI * PI * ((cutoff + 1) as f64).powi(2);
    let kind = ModelKind::Fourier { torus, cutoff, rank: r, modes, mode_index };
    let key = format!("flat cutoff={cutoff} {}", bundle.describe());
    Ok(Assembled {
        kind,
        rep: rep.clone(),
        d,
        grading,
        hash: hash_of(&key),
        truncation_error: (-dropped).exp(),
        truncation_overflow: overflow,
    })
}

/// Landau-level Dirac operator of the flux-`k` line bundle on `T^2`.
///
/// With `B = 2 pi |k|` and ladder operators `a`, `D` couples chirality
/// `sign k` at level `j` to the opposite chirality at level `j - 1` with
/// weight `-sqrt(2 B j)`. The opposite chirality keeps one level fewer so the
/// truncation preserves the pairing of nonzero eigenvalues.
pub fn build_dirac_magnetic(flux: i32, levels: usize, rep: &SpinorRep) -> Result<SpectralModel> {
    build_dirac_magnetic_with(flux, levels, [0.0, 0.0], rep)
}

pub fn build_dirac_magnetic_with(
    flux: i32,
    levels: usize,
    background: [f64; 2],
    rep: &SpinorRep,
) -> Result<SpectralModel> {
    assemble_magnetic(flux, levels, background, rep).map(|a| a.finish(None))
}

fn assemble_magnetic(flux: i32, levels: usize, background: [f64; 2], rep: &SpinorRep) -> Result<Assembled> {
    if flux == 0 {
        return Err(Error::InvalidArgument("flux 0: use build_dirac_flat".into()));
    }
    if levels < 2 {
        return Err(Error::InvalidArgument("need at least two Landau levels".into()));
    }
    if rep.n != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rep.n });
    }
    let g = flux.unsigned_abs() as usize;
    let (hi, lo) = if flux > 0 { (0usize, 1usize) } else { (1, 0) };
    let mut states = Vec::new();
    for spin in 0..2 {
        let nl = if spin == hi { levels } else { levels - 1 };
        for j in 0..nl {
            for c in 0..g {
                states.push((spin, j, c));
            }
        }
    }
    let index: HashMap<(usize, usize, usize), usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let dim = states.len();
    let b = 2.0 * PI * g as f64;
    let mut d = CMat::zeros(dim, dim);
    for j in 1..levels {
        for c in 0..g {
            let w = re(-(2.0 * b * j as f64).sqrt());
            let p = index[&(hi, j, c)];
            let q = index[&(lo, j - 1, c)];
            d[(p, q)] += w;
            d[(q, p)] += w;
        }
    }
    for (i, bg) in background.iter().enumerate() {
        if *bg == 0.0 {
            continue;
        }
        let gm = &rep.gamma[i];
        for (p, &(s1, j, c)) in states.iter().enumerate() {
            for s2 in 0..2 {
                if let Some(&q) = index.get(&(s2, j, c)) {
                    d[(p, q)] += gm[(s1, s2)] * C64::new(0.0, *bg);
                }
            }
        }
    }
    let grading = states.iter().map(|&(s, _, _)| rep.grading[(s, s)].re).collect();
    let dropped = b * (levels - 1) as f64;
    let kind = ModelKind::Landau { flux, levels, states };
    let key = format!("landau levels={levels} flux={flux} bg={:e},{:e}", background[0], background[1]);
    Ok(Assembled {
        kind,
        rep: rep.clone(),
        d,
        grading,
        hash: hash_of(&key),
        truncation_error: (-dropped).exp(),
        truncation_overflow: false,
    })
}

/// Spectral model for a bundle: Fourier for trivial bundles, Landau for magnetic ones.
pub fn build_model(bundle: &BundleModel, cutoff: i32, rep: &SpinorRep) -> Result<SpectralModel> {
    build_model_cached(bundle, cutoff, rep, None)
}

/// As [`build_model`], reusing eigen-data from `cache` when its entry matches.
pub fn build_model_cached(
    bundle: &BundleModel,
    cutoff: i32,
    rep: &SpinorRep,
    cache: Option<&crate::cache::SpectralCache>,
) -> Result<SpectralModel> {
    let a = match bundle {
        BundleModel::Trivial { base, .. } => assemble_flat(*base, cutoff, bundle, rep)?,
        BundleModel::MagneticLine { flux, levels, background } => assemble_magnetic(*flux, *levels, *background, rep)?,
    };
    let Some(cache) = cache else {
        return Ok(a.finish(None));
    };
    let dim = a.d.nrows();
    if let Some(e) = cache.load(&a.hash).filter(|e| e.eigenvalues.len() == dim) {
        return Ok(a.finish(Some((e.eigenvalues, e.eigenvectors))));
    }
    let m = a.finish(None);
    cache.store(&m)?;
    Ok(m)
}

/// A model before diagonalization.
struct Assembled {
    kind: ModelKind,
    rep: SpinorRep,
    d: CMat,
    grading: Vec<f64>,
    hash: String,
    truncation_error: f64,
    truncation_overflow: bool,
}

impl Assembled {
    fn finish(self, eigen: Option<(Vec<f64>, Option<CMat>)>) -> SpectralModel {
        let d = self.d;
        let h = &d * &d * re(0.5);
        let (eigenvalues, eigenvectors) = eigen.unwrap_or_else(|| diagonalize(&h));
        let d_sparse = SparseMat::from_dense(&d, 0.0);
        let mut m = SpectralModel {
            kind: self.kind,
            rep: self.rep,
            d,
            d_sparse,
            grading: self.grading,
            h,
            eigenvalues,
            eigenvectors,
            labels: Vec::new(),
            label_values: Vec::new(),
            hash: self.hash,
            truncation_error: self.truncation_error,
            truncation_overflow: self.truncation_overflow,
        };
        m.relabel();
        m
    }
}

fn diagonalize(h: &CMat) -> (Vec<f64>, Option<CMat>) {
    let dim = h.nrows();
    let scale = max_abs(h).max(1.0);
    let off = (0..dim)
        .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| h[(i, j)].norm())
        .fold(0.0, f64::max);
    if off <= 1e-12 * scale {
        ((0..dim).map(|i| h[(i, i)].re).collect(), None)
    } else {
        let (w, v) = hermitian_eigen(h);
        (w, Some(v))
    }
}

impl SpectralModel {
    pub fn dim(&self) -> usize {
        self.d.nrows()
    }

    /// Replaces the eigen-data, e.g. with values loaded from a cache.
    pub fn set_eigen(&mut self, eigenvalues: Vec<f64>, eigenvectors: Option<CMat>) {
        self.eigenvalues = eigenvalues;
        self.eigenvectors = eigenvectors;
        self.relabel();
    }

    fn relabel(&mut self) {
        let mut order: Vec<usize> = (0..self.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| self.eigenvalues[a].partial_cmp(&self.eigenvalues[b]).unwrap());
        let mut labels = vec![0u32; order.len()];
        let mut values: Vec<f64> = Vec::new();
        for &i in &order {
            let x = self.eigenvalues[i];
            match values.last() {
                Some(&v) if (x - v).abs() <= 1e-9 * (1.0 + v.abs()) => {}
                _ => values.push(x),
            }
            labels[i] = (values.len() - 1) as u32;
        }
        self.labels = labels;
        self.label_values = values;
    }

    pub fn grading_matrix(&self) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(self.dim(), self.grading.iter().map(|&g| re(g))))
    }

    pub fn torus_dim(&self) -> usize {
        match &self.kind {
            ModelKind::Fourier { torus, .. } => torus.n,
            ModelKind::Landau { .. } => 2,
        }
    }

    pub fn cutoff(&self) -> i32 {
        match &self.kind {
            ModelKind::Fourier { cutoff, .. } => *cutoff,
            ModelKind::Landau { .. } => 0,
        }
    }

    /// Eigenbasis representation `V^* M V` (identity map for diagonal models).
    pub fn to_eigenbasis(&self, m: &CMat) -> CMat {
        match &self.eigenvectors {
            Some(v) => v.adjoint() * m * v,
            None => m.clone(),
        }
    }
}

/// `e^{-tH}` through the eigendecomposition.
pub fn heat_semigroup(m: &SpectralModel, t: f64) -> Result<CMat> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    let diag = nalgebra::DVector::from_iterator(m.dim(), m.eigenvalues.iter().map(|&l| re((-t * l).exp())));
    Ok(match &m.eigenvectors {
        Some(v) => v * CMat::from_diagonal(&diag) * v.adjoint(),
        None => CMat::from_diagonal(&diag),
    })
}

/// `str_normalizer * tr(Gamma M)`.
pub fn str_op(m: &SpectralModel, a: &CMat) -> Result<C64> {
    if a.nrows() != m.dim() || a.ncols() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: a.nrows() });
    }
    let s: C64 = (0..m.dim()).map(|i| a[(i, i)] * m.grading[i]).sum();
    Ok(m.rep.str_normalizer * s)
}

/// `Str(e^{-tH})`.
pub fn mckean_singer(m: &SpectralModel, t: f64) -> Result<C64> {
    if t <= 0.0 {
        return Err(Error::InvalidArgument(format!("nonpositive time {t}")));
    }
    let w: Vec<f64> = m.eigenvalues.iter().map(|&l| (-t * l).exp()).collect();
    let s = match &m.eigenvectors {
        None => (0..m.dim()).map(|i| re(w[i] * m.grading[i])).sum(),
        Some(v) => {
            let mut s = ZERO;
            for j in 0..m.dim() {
                let g: f64 = (0..m.dim()).map(|i| v[(i, j)].norm_sqr() * m.grading[i]).sum();
                s += re(g * w[j]);
            }
            s
        }
    };
    Ok(m.rep.str_normalizer * s)
}

/// Pointwise Clifford multiplication `c(theta)` on the model basis.
pub fn mult_operator(m: &SpectralModel, theta: &ScalarForm) -> Result<CMat> {
    let dim = m.dim();
    let mut out = CMat::zeros(dim, dim);
    match &m.kind {
        ModelKind::Fourier { torus, rank, modes, mode_index, .. } => {
            if theta.n != torus.n {
                return Err(Error::BaseMismatch(theta.n, torus.n));
            }
            let s = m.rep.dim();
            let r = *rank;
            for (q, ext) in theta.by_mode() {
                let c = m.rep.clifford_mult(&ext)?;
                for (mi, k) in modes.iter().enumerate() {
                    let target = [k[0] + q[0], k[1] + q[1], k[2] + q[2], k[3] + q[3]];
                    let Some(&mt) = mode_index.get(&target) else { continue };
                    for a in 0..s {
                        for a2 in 0..s {
                            let v = c[(a, a2)];
                            if v == ZERO {
                                continue;
                            }
                            for b in 0..r {
                                out[((mt * s + a) * r + b, (mi * s + a2) * r + b)] += v;
                            }
                        }
                    }
                }
            }
        }
        ModelKind::Landau { states, .. } => {
            if theta.n != 2 {
                return Err(Error::BaseMismatch(theta.n, 2));
            }
            if !theta.is_constant_coefficient() {
                return Err(Error::Unsupported("Landau model accepts constant-coefficient forms only".into()));
            }
            let ext = theta.eval_at(&[0.0, 0.0]);
            let c = m.rep.clifford_mult(&ext)?;
            let index: HashMap<(usize, usize, usize), usize> =
                states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
            for (p, &(s1, j, g)) in states.iter().enumerate() {
                for s2 in 0..2 {
                    let v = c[(s1, s2)];
                    if v == ZERO {
                        continue;
                    }
                    if let Some(&q) = index.get(&(s2, j, g)) {
                        out[(p, q)] += v;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `int_{Delta_N} Str(e^{-t_1 H} F_1 e^{-(t_2 - t_1) H} ... F_N e^{-(1 - t_N) H}) dt`.
///
/// Factors are moved to the eigenbasis of `H`, and the trace is expanded
/// over closed index paths. Amplitudes are grouped by the eigenvalues met
/// along the path; each group multiplies a scalar simplex integral of an
/// exponential, evaluated exactly or by a point rule.
pub fn simplex_operator_integral(m: &SpectralModel, factors: &[CMat], quad: Quadrature) -> Result<C64> {
    for f in factors {
        if f.nrows() != m.dim() || f.ncols() != m.dim() {
            return Err(Error::DimensionMismatch { expected: m.dim(), found: f.nrows() });
        }
    }
    let sparse: Vec<SparseMat> = factors.iter().map(|f| SparseMat::from_dense(f, 0.0)).collect();
    simplex_operator_integral_sparse(m, &sparse, quad)
}

/// Sparse-factor version of [`simplex_operator_integral`].
pub fn simplex_operator_integral_sparse(m: &SpectralModel, factors: &[SparseMat], quad: Quadrature) -> Result<C64> {
    for f in factors {
        if f.n != m.dim() {
            return Err(Error::DimensionMismatch { expected: m.dim(), found: f.n });
        }
    }
    if factors.len() > 4 {
        return Err(Error::InvalidArgument("at most four factors".into()));
    }
    if factors.is_empty() {
        return mckean_singer(m, 1.0);
    }
    let groups = path_groups(m, factors);
    let nseg = factors.len() + 1;
    let rule = match quad {
        Quadrature::Exact => None,
        Quadrature::Gauss(o) => Some(SimplexRule::gauss(factors.len(), o)),
        Quadrature::QuasiMonteCarlo(s) => Some(SimplexRule::quasi_monte_carlo(factors.len(), s)),
    };
    let total: C64 = groups
        .par_iter()
        .map(|(key, amp)| {
            let mu: Vec<f64> = key[..nseg].iter().map(|&l| m.label_values[l as usize]).collect();
            let e = match &rule {
                None => simplex_exp_integral(&mu),
                Some(r) => simplex_exp_integral_rule(&mu, r),
            };
            amp * e
        })
        .sum();
    Ok(m.rep.str_normalizer * total)
}

type PathKey = [u32; 5];

/// Sums `Gamma F_1 ... F_N` amplitudes over closed eigenbasis paths, keyed
/// by the eigenvalue labels of the `N + 1` segments.
fn path_groups(m: &SpectralModel, factors: &[SparseMat]) -> Vec<(PathKey, C64)> {
    let sparse: Vec<SparseMat> = match &m.eigenvectors {
        None => {
            let mut s = factors.to_vec();
            for (i, row) in s[0].rows.iter_mut().enumerate() {
                for e in row.iter_mut() {
                    e.1 *= m.grading[i];
                }
            }
            s
        }
        Some(v) => {
            let mut mats: Vec<CMat> = factors.iter().map(|f| m.to_eigenbasis(&f.to_dense())).collect();
            let g = v.adjoint() * m.grading_matrix() * v;
            mats[0] = g * &mats[0];
            mats.iter().map(|x| SparseMat::from_dense(x, 1e-15)).collect()
        }
    };
    let nf = sparse.len();
    let labels = &m.labels;
    let partial: Vec<HashMap<PathKey, C64>> = (0..m.dim())
        .into_par_iter()
        .map(|start| {
            let mut out: HashMap<PathKey, C64> = HashMap::new();
            let mut key0 = [u32::MAX; 5];
            key0[0] = labels[start];
            let mut frontier: HashMap<(PathKey, u32), C64> = HashMap::new();
            frontier.insert((key0, start as u32), ONE);
            for (step, sm) in sparse.iter().enumerate() {
                let last = step + 1 == nf;
                let mut next: HashMap<(PathKey, u32), C64> = HashMap::new();
                for (&(key, cur), &amp) in &frontier {
                    for &(col, v) in &sm.rows[cur as usize] {
                        if last {
                            if col as usize == start {
                                let mut k = key;
                                k[nf] = labels[start];
                                *out.entry(k).or_insert(ZERO) += amp * v;
                            }
                        } else {
                            let mut k = key;
                            k[step + 1] = labels[col as usize];
                            *next.entry((k, col)).or_insert(ZERO) += amp * v;
                        }
                    }
                }
                frontier = next;
            }
            out
        })
        .collect();
    let mut merged: HashMap<PathKey, C64> = HashMap::new();
    for p in partial {
        for (k, v) in p {
            *merged.entry(k).or_insert(ZERO) += v;
        }
    }
    let mut out: Vec<(PathKey, C64)> = merged.into_iter().collect();
    out.sort_by_key(|a| a.0);
    out
}
