//! Bismut-Chern characters: direct evaluation on loops, bar-chain
//! representatives, and the index and localization pipelines.
//!
//! For `nabla = d + A` with curvature `R`, the chain is the exponential of
//! the slot `-(A + dt ^ R)`. It is split into `alpha = -A` (degree 1) and
//! `beta = -dt ^ R` (degree 3) so that `c_N`, the words with exactly `N`
//! `beta` slots, maps under the iterated integral to the degree-`2N`
//! component. Matrix entries run along index paths closed by the trace.
//! Infinitely many `alpha` insertions are needed in principle; words are
//! truncated at a maximal length.

use std::f64::consts::PI;

use serde::Serialize;

use crate::bar::{growth_from_norms, BarChain, GrowthReport};
use crate::chern::chern_character;
use crate::forms::{chern_weil_ch, integrate_top, FormMatrix, ScalarForm, TForm};
use crate::iterated::{DiscreteLoop, TangentField, DEFAULT_ORDER};
use crate::linalg::{CMat, ONE, ZERO};
use crate::operators::{mckean_singer, BundleModel, ModelKind, SpectralModel};
use crate::quadrature::{Quadrature, SimplexRule};
use crate::{Error, Result, C64};

/// Constant `kappa` in `ch = tr exp(kappa R)` for the localization formula,
/// fixed by requiring the flux-`k` line bundle to have index `k`.
pub const CH_KAPPA: C64 = C64::new(0.0, 1.0);
/// `kappa` for which `ch` is the pullback of the loop-space form to constant loops.
pub const PULLBACK_KAPPA: C64 = C64::new(-1.0, 0.0);
/// Default maximal word length of chain representatives.
pub const DEFAULT_MAX_LEN: usize = 4;
/// Transport integration steps per unit time.
const TRANSPORT_STEPS: usize = 2048;

/// A bundle together with the truncation of its Bismut-Chern character.
#[derive(Debug, Clone)]
pub struct BismutData {
    pub bundle: BundleModel,
    pub n_max: usize,
    pub max_len: usize,
}

/// Potential and curvature entering the chain.
///
/// Magnetic bundles are taken relative to the Landau model of the same flux,
/// so only the flat background `i b.dx` appears.
fn chain_data(b: &BundleModel) -> Result<(FormMatrix, FormMatrix)> {
    match b {
        BundleModel::Trivial { potential, .. } => {
            let c = potential.iter().flatten().map(|f| f.cutoff).max().unwrap_or(0);
            Ok((potential.clone(), b.curvature(2 * c)?))
        }
        BundleModel::MagneticLine { background, .. } => {
            let a = ScalarForm::monomial(2, 0, &[0], &[0, 0], C64::new(0.0, background[0]))
                .add(&ScalarForm::monomial(2, 0, &[1], &[0, 0], C64::new(0.0, background[1])))?;
            Ok((vec![vec![a]], vec![vec![ScalarForm::zero(2, 0)]]))
        }
    }
}

fn combinations(len: usize, k: usize) -> Vec<Vec<bool>> {
    (0u32..1 << len)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..len).map(|i| m & (1 << i) != 0).collect())
        .collect()
}

/// `c_N` truncated to words of length at most `max_len`.
pub fn bismut_chain(b: &BundleModel, n: usize, max_len: usize) -> Result<BarChain> {
    let (a, r) = chain_data(b)?;
    let rank = a.len();
    let neg = C64::new(-1.0, 0.0);
    let alpha: Vec<Vec<Option<TForm>>> = a
        .iter()
        .map(|row| {
            row.iter()
                .map(|f| (!f.is_zero()).then(|| TForm::with_degree(f.scale(neg), ScalarForm::zero(f.n, f.cutoff), 1)))
                .map(Option::transpose)
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let beta: Vec<Vec<Option<TForm>>> = r
        .iter()
        .map(|row| {
            row.iter()
                .map(|f| (!f.is_zero()).then(|| TForm::with_degree(ScalarForm::zero(f.n, f.cutoff), f.scale(neg), 3)))
                .map(Option::transpose)
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let mut chain = BarChain::zero();
    chain.cyclic = true;
    if n == 0 {
        chain.push(C64::new(rank as f64, 0.0), Vec::new());
    }
    for len in n.max(1)..=max_len {
        for kinds in combinations(len, n) {
            for flat in 0..rank.pow(len as u32) {
                let path: Vec<usize> = (0..len).map(|a| (flat / rank.pow(a as u32)) % rank).collect();
                let word: Option<Vec<TForm>> = (0..len)
                    .map(|s| {
                        let (i, j) = (path[s], path[(s + 1) % len]);
                        if kinds[s] {
                            beta[i][j].clone()
                        } else {
                            alpha[i][j].clone()
                        }
                    })
                    .collect();
                if let Some(w) = word {
                    chain.push(ONE, w);
                }
            }
        }
    }
    Ok(chain)
}

/// Connection one-form and curvature of a bundle at a point of the lift.
pub(crate) trait Connection {
    fn rank(&self) -> usize;
    fn potential(&self, x: &[f64], v: &[f64]) -> CMat;
    fn curvature(&self, x: &[f64], u: &[f64], w: &[f64]) -> CMat;
}

fn form_pair(f: &ScalarForm, x: &[f64], u: &[f64], w: &[f64]) -> C64 {
    let e = f.eval_at(x);
    let mut s = ZERO;
    for (&mask, &c) in &e.terms {
        if mask.count_ones() != 2 {
            continue;
        }
        let idx: Vec<usize> = (0..f.n).filter(|i| mask & (1 << i) != 0).collect();
        s += c * (u[idx[0]] * w[idx[1]] - u[idx[1]] * w[idx[0]]);
    }
    s
}

fn form_apply(f: &ScalarForm, x: &[f64], v: &[f64]) -> C64 {
    f.eval_at(x)
        .terms
        .iter()
        .filter(|(m, _)| m.count_ones() == 1)
        .map(|(&m, &c)| c * v[m.trailing_zeros() as usize])
        .sum()
}

struct TrivialConn {
    a: FormMatrix,
    r: FormMatrix,
}

impl Connection for TrivialConn {
    fn rank(&self) -> usize {
        self.a.len()
    }
    fn potential(&self, x: &[f64], v: &[f64]) -> CMat {
        CMat::from_fn(self.rank(), self.rank(), |i, j| form_apply(&self.a[i][j], x, v))
    }
    fn curvature(&self, x: &[f64], u: &[f64], w: &[f64]) -> CMat {
        CMat::from_fn(self.rank(), self.rank(), |i, j| form_pair(&self.r[i][j], x, u, w))
    }
}

/// Flux gauge `A = -i pi k (x dy - y dx) + i b.dx` on the lift.
struct MagneticConn {
    flux: f64,
    background: [f64; 2],
}

impl Connection for MagneticConn {
    fn rank(&self) -> usize {
        1
    }
    fn potential(&self, x: &[f64], v: &[f64]) -> CMat {
        let a = C64::new(
            0.0,
            -PI * self.flux * (x[0] * v[1] - x[1] * v[0]) + self.background[0] * v[0] + self.background[1] * v[1],
        );
        CMat::from_element(1, 1, a)
    }
    fn curvature(&self, _x: &[f64], u: &[f64], w: &[f64]) -> CMat {
        CMat::from_element(1, 1, C64::new(0.0, -2.0 * PI * self.flux * (u[0] * w[1] - u[1] * w[0])))
    }
}

/// The connection of `b` on the lift of the `n`-torus.
pub(crate) fn connection_on(b: &BundleModel, n: usize) -> Result<Box<dyn Connection>> {
    match b {
        BundleModel::Trivial { base, .. } => {
            if base.n != n {
                return Err(Error::BaseMismatch(base.n, n));
            }
            let (a, r) = chain_data(b)?;
            Ok(Box::new(TrivialConn { a, r }))
        }
        BundleModel::MagneticLine { flux, background, .. } => {
            if n != 2 {
                return Err(Error::BaseMismatch(2, n));
            }
            Ok(Box::new(MagneticConn { flux: *flux as f64, background: *background }))
        }
    }
}

fn connection(b: &BundleModel, lp: &DiscreteLoop) -> Result<Box<dyn Connection>> {
    if matches!(b, BundleModel::MagneticLine { .. }) && lp.offset.iter().any(|&w| w != 0) {
        return Err(Error::Unsupported("magnetic transport needs a loop that closes in the lift".into()));
    }
    connection_on(b, lp.n())
}

/// Forward transport `W(t)` with `W' = -W A(gamma')`, `W(0) = 1`, so products
/// run forward in time from left to right.
struct Transport<'a> {
    conn: &'a dyn Connection,
    lp: &'a DiscreteLoop,
    h: f64,
    grid: Vec<CMat>,
}

impl<'a> Transport<'a> {
    fn new(conn: &'a dyn Connection, lp: &'a DiscreteLoop, steps: usize) -> Self {
        let h = 1.0 / steps as f64;
        let mut grid = vec![CMat::identity(conn.rank(), conn.rank())];
        for s in 0..steps {
            let w = grid[s].clone();
            grid.push(Self::step(conn, lp, &w, s as f64 * h, h));
        }
        Self { conn, lp, h, grid }
    }

    fn rhs(conn: &dyn Connection, lp: &DiscreteLoop, w: &CMat, t: f64) -> CMat {
        -(w * conn.potential(&lp.position(t), &lp.velocity(t)))
    }

    fn step(conn: &dyn Connection, lp: &DiscreteLoop, w: &CMat, t: f64, h: f64) -> CMat {
        let k1 = Self::rhs(conn, lp, w, t);
        let k2 = Self::rhs(conn, lp, &(w + &k1 * C64::new(h / 2.0, 0.0)), t + h / 2.0);
        let k3 = Self::rhs(conn, lp, &(w + &k2 * C64::new(h / 2.0, 0.0)), t + h / 2.0);
        let k4 = Self::rhs(conn, lp, &(w + &k3 * C64::new(h, 0.0)), t + h);
        w + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0)
    }

    fn at(&self, t: f64) -> CMat {
        let s = ((t / self.h).floor() as usize).min(self.grid.len() - 1);
        let dt = t - s as f64 * self.h;
        if dt <= 0.0 {
            return self.grid[s].clone();
        }
        Self::step(self.conn, self.lp, &self.grid[s], s as f64 * self.h, dt)
    }

    /// Transport from `s` to `t`, `W(s)^{-1} W(t)`.
    fn between(&self, s: f64, t: f64) -> Result<CMat> {
        let ws = self.at(s).try_inverse().ok_or_else(|| Error::Degenerate("singular transport".into()))?;
        Ok(ws * self.at(t))
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    if n == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            let moved = p.len() - pos;
            out.push((q, if moved % 2 == 0 { s } else { -s }));
        }
    }
    out
}

/// `Ch_N(v_1, ..., v_{2N})` at `gamma`, evaluated directly:
/// `2^{-N} sum_sigma sgn(sigma) int tr(W(0,t_1) R(v_{s2}, v_{s1})(t_1) W(t_1,t_2) ... W(t_N,1))`.
pub fn bismut_form_direct(b: &BundleModel, lp: &DiscreteLoop, tangents: &[TangentField], n: usize) -> Result<C64> {
    bismut_form_direct_with(b, lp, tangents, n, DEFAULT_ORDER)
}

pub fn bismut_form_direct_with(
    b: &BundleModel,
    lp: &DiscreteLoop,
    tangents: &[TangentField],
    n: usize,
    order: usize,
) -> Result<C64> {
    if !lp.smooth_flag {
        return Err(Error::InvalidArgument("direct evaluation needs a smooth loop".into()));
    }
    if tangents.len() != 2 * n {
        return Err(Error::TangentCount { expected: 2 * n, found: tangents.len() });
    }
    let conn = connection(b, lp)?;
    let tr = Transport::new(conn.as_ref(), lp, TRANSPORT_STEPS);
    let perms = permutations(2 * n);
    let rule = SimplexRule::gauss(n, order);
    let mut total = ZERO;
    for (pt, wt) in rule.points.iter().zip(&rule.weights) {
        let xs: Vec<Vec<f64>> = pt.iter().map(|&t| lp.position(t)).collect();
        let vs: Vec<Vec<Vec<f64>>> = pt.iter().map(|&t| tangents.iter().map(|v| v.value(t)).collect()).collect();
        let mut links = Vec::with_capacity(n + 1);
        let mut prev = 0.0;
        for &t in pt.iter().chain(std::iter::once(&1.0)) {
            links.push(tr.between(prev, t)?);
            prev = t;
        }
        let mut acc = ZERO;
        for (sigma, sign) in &perms {
            let mut prod = links[0].clone();
            for a in 0..n {
                let r = conn.curvature(&xs[a], &vs[a][sigma[2 * a + 1]], &vs[a][sigma[2 * a]]);
                prod = prod * r * &links[a + 1];
            }
            acc += prod.trace() * *sign;
        }
        total += acc * *wt;
    }
    Ok(total * 0.5f64.powi(n as i32))
}

/// Outcome of the path-integral index computation.
#[derive(Debug, Clone, Serialize)]
pub struct IndexPathIntegral {
    /// `Ch_D(c_N)` for `N = 0..=n_max`, as `[re, im]`
    pub per_n: Vec<[f64; 2]>,
    pub total: [f64; 2],
    pub growth: GrowthReport,
    /// geometric extrapolation of the omitted `N > n_max` terms
    pub tail_estimate: f64,
}

impl IndexPathIntegral {
    pub fn value(&self) -> C64 {
        C64::new(self.total[0], self.total[1])
    }
}

/// `sum_{N <= n_max} Ch_D(c_N)`, which approximates `Str(e^{-D_E^2/2})`.
///
/// `m` must be the untwisted model: the rank-one Fourier model for trivial
/// bundles, or the Landau model of the same flux without background.
pub fn index_via_pathintegral(m: &SpectralModel, data: &BismutData, quad: Quadrature) -> Result<IndexPathIntegral> {
    match (&data.bundle, &m.kind) {
        (BundleModel::Trivial { base, .. }, ModelKind::Fourier { torus, rank, .. }) => {
            if base.n != torus.n || *rank != 1 {
                return Err(Error::InvalidArgument("chain needs the rank-one model on the same torus".into()));
            }
        }
        (BundleModel::MagneticLine { flux, .. }, ModelKind::Landau { flux: f, .. }) => {
            if flux != f {
                return Err(Error::InvalidArgument(format!("bundle flux {flux} against model flux {f}")));
            }
        }
        _ => return Err(Error::Unsupported("bundle and model kinds differ".into())),
    }
    let mut per_n = Vec::new();
    let mut norms = Vec::new();
    for n in 0..=data.n_max {
        let c = bismut_chain(&data.bundle, n, data.max_len)?;
        norms.push(c.growth_norm());
        per_n.push(chern_character(m, &c, quad)?);
    }
    let total: C64 = per_n.iter().sum();
    let tail_estimate = match per_n.as_slice() {
        [.., a, b] if a.norm() > 0.0 && b.norm() < a.norm() => {
            let q = b.norm() / a.norm();
            b.norm() * q / (1.0 - q)
        }
        [.., b] => b.norm(),
        [] => 0.0,
    };
    Ok(IndexPathIntegral {
        per_n: per_n.iter().map(|z| [z.re, z.im]).collect(),
        total: [total.re, total.im],
        growth: growth_from_norms(&norms),
        tail_estimate,
    })
}

/// The line bundle of degree `flux` twisted by the flat potential `i b.dx`;
/// for `flux = 0` the trivial line with that constant potential.
pub fn flux_bundle(flux: i32, levels: usize, background: [f64; 2]) -> Result<BundleModel> {
    if flux != 0 {
        return Ok(BundleModel::MagneticLine { flux, levels, background });
    }
    let a = ScalarForm::monomial(2, 0, &[0], &[0, 0], C64::new(background[0], 0.0)).add(&ScalarForm::monomial(
        2,
        0,
        &[1],
        &[0, 0],
        C64::new(background[1], 0.0),
    ))?;
    BundleModel::line_with_potential(&a)
}

/// The untwisted model that [`index_via_pathintegral`] pairs the chain of `b` against.
pub fn untwisted_model(
    b: &BundleModel,
    cutoff: i32,
    rep: &crate::clifford::SpinorRep,
    cache: Option<&crate::cache::SpectralCache>,
) -> Result<SpectralModel> {
    let base = match b {
        BundleModel::Trivial { base, .. } => BundleModel::flat_trivial(base.n, 1)?,
        BundleModel::MagneticLine { flux, levels, .. } => BundleModel::magnetic(*flux, *levels),
    };
    crate::operators::build_model_cached(&base, cutoff, rep, cache)
}

/// `Str(e^{-D_E^2/2})` on the twisted model of the bundle.
pub fn twisted_index(b: &BundleModel, cutoff: i32, rep: &crate::clifford::SpinorRep) -> Result<C64> {
    mckean_singer(&crate::operators::build_model(b, cutoff, rep)?, 1.0)
}

/// `(2 pi)^{-n/2} int_X A-hat ^ ch` with `A-hat = 1` on flat tori.
pub fn localization_rhs(b: &BundleModel) -> Result<C64> {
    let n = b.dim();
    let cutoff = match b {
        BundleModel::Trivial { potential, .. } => 2 * potential.iter().flatten().map(|f| f.cutoff).max().unwrap_or(0),
        BundleModel::MagneticLine { .. } => 0,
    };
    let ch = chern_weil_ch(&b.curvature(cutoff)?, CH_KAPPA, n, cutoff)?;
    Ok(integrate_top(&ch) * (2.0 * PI).powf(-(n as f64) / 2.0))
}
