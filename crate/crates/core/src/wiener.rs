//! Wiener measure on loops in flat tori: heat kernels, cylinder-function
//! integrals, Brownian-loop sampling, stochastic parallel transport and the
//! Monte Carlo path integral `I`.
//!
//! The measure is unnormalized: its finite-dimensional marginals are products
//! of heat kernels of `d/dt = Delta / 2`, so its total mass is the loop heat
//! trace `Z = (sum_j e^{-2 pi^2 j^2})^n`. Samples are drawn from `W / Z`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bismut::connection_on;
use crate::clifford::{wedge_sign, SpinorRep};
use crate::forms::{FlatTorus, ScalarForm};
use crate::iterated::DiscreteLoop;
use crate::linalg::{expm, CMat, ZERO};
use crate::operators::BundleModel;
use crate::quadrature::gauss_legendre;
use crate::topdegree::one_form_field;
use crate::{Error, Result, C64};

/// Largest number of integrand evaluations [`cylinder_integral`] accepts.
pub const CYLINDER_BUDGET: u64 = 50_000_000;
/// Allowed drift of `W^* W` from the identity in [`stochastic_parallel_transport`].
pub const UNITARITY_TOL: f64 = 1e-10;
/// Sample counts below this are always reported inconclusive.
pub const MIN_CONCLUSIVE_SAMPLES: usize = 1000;
/// Windings beyond this are never drawn; their probability is below `e^{-72}`.
const MAX_WINDING: i32 = 12;

/// Wrapped Gaussian `sum_m (2 pi t)^{-1/2} e^{-(d + m)^2 / 2t}` on the circle.
pub fn heat_kernel_1d(t: f64, d: f64) -> f64 {
    let d = (d - d.round()).abs();
    // terms with |d + m| > sqrt(80 t) are below e^{-40} of the leading one
    let reach = (80.0 * t).sqrt().ceil() as i64 + 1;
    let norm = (2.0 * PI * t).sqrt();
    (-reach..=reach).map(|m| (-(d + m as f64).powi(2) / (2.0 * t)).exp()).sum::<f64>() / norm
}

/// Heat kernel `p_t(x, y)` of `Delta / 2` on the flat torus.
pub fn heat_kernel(t: f64, x: &[f64], y: &[f64], torus: &FlatTorus) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("heat kernel time {t} must be positive")));
    }
    for p in [x, y] {
        if p.len() != torus.n {
            return Err(Error::DimensionMismatch { expected: torus.n, found: p.len() });
        }
    }
    Ok(x.iter().zip(y).map(|(a, b)| heat_kernel_1d(t, a - b)).product())
}

/// Total mass `Z = p_1(x, x)` of the loop measure.
pub fn loop_space_mass(torus: &FlatTorus) -> f64 {
    heat_kernel_1d(1.0, 0.0).powi(torus.n as i32)
}

/// A function of the loop's positions at the sample times.
pub type PointFunction = Box<dyn Fn(&[Vec<f64>]) -> f64 + Send + Sync>;

/// A loop functional `F(gamma) = f(gamma(t_1), ..., gamma(t_N))`.
pub struct CylinderFunction {
    pub times: Vec<f64>,
    pub f: PointFunction,
}

impl CylinderFunction {
    pub fn new(times: Vec<f64>, f: impl Fn(&[Vec<f64>]) -> f64 + Send + Sync + 'static) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidArgument("cylinder function needs at least one time".into()));
        }
        if times.iter().any(|t| !(0.0..1.0).contains(t)) || times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("times must increase strictly in [0, 1)".into()));
        }
        Ok(Self { times, f: Box::new(f) })
    }

    pub fn eval(&self, points: &[Vec<f64>]) -> f64 {
        (self.f)(points)
    }
}

/// `int f(x_1..x_N) prod_j p_{t_{j+1} - t_j}(x_j, x_{j+1}) dx` with `t_{N+1} = 1 + t_1`
/// and `x_{N+1} = x_1`, by the periodic trapezoid rule with `points` nodes per axis.
///
/// The rule is spectrally accurate once `1 / points` is well below the square
/// root of the smallest time gap.
pub fn cylinder_integral(f: &CylinderFunction, torus: &FlatTorus, points: usize) -> Result<f64> {
    let n = torus.n;
    let slots = f.times.len();
    let cell = (points as u64).checked_pow(n as u32).filter(|_| points > 0);
    let total = cell.and_then(|c| c.checked_pow(slots as u32));
    let (cell, _) = match (cell, total) {
        (Some(c), Some(t)) if t <= CYLINDER_BUDGET => (c as usize, t),
        _ => {
            return Err(Error::InvalidArgument(format!("quadrature budget of {CYLINDER_BUDGET} evaluations exceeded")))
        }
    };
    let nodes: Vec<Vec<f64>> = (0..cell)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let x = (idx % points) as f64 / points as f64;
                    idx /= points;
                    x
                })
                .collect()
        })
        .collect();
    let gaps: Vec<f64> = (0..slots)
        .map(|j| if j + 1 < slots { f.times[j + 1] - f.times[j] } else { 1.0 + f.times[0] - f.times[j] })
        .collect();
    // kernel[j][a * cell + b] = p_{gap_j}(node_a, node_b)
    let kernels: Vec<Vec<f64>> = gaps
        .iter()
        .map(|&g| {
            let k1: Vec<f64> = (0..points).map(|d| heat_kernel_1d(g, d as f64 / points as f64)).collect();
            let mut k = vec![0.0; cell * cell];
            for a in 0..cell {
                for b in 0..cell {
                    let (mut ia, mut ib, mut v) = (a, b, 1.0);
                    for _ in 0..n {
                        v *= k1[(ia % points + points - ib % points) % points];
                        ia /= points;
                        ib /= points;
                    }
                    k[a * cell + b] = v;
                }
            }
            k
        })
        .collect();
    let weight = (1.0 / cell as f64).powi(slots as i32);
    let sum: f64 = (0..cell)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0; slots];
            idx[0] = first;
            let mut acc = 0.0;
            loop {
                let pts: Vec<Vec<f64>> = idx.iter().map(|&i| nodes[i].clone()).collect();
                let mut w = 1.0;
                for j in 0..slots {
                    w *= kernels[j][idx[j] * cell + idx[(j + 1) % slots]];
                }
                if w != 0.0 {
                    acc += w * f.eval(&pts);
                }
                // odometer over slots 1..N
                let mut j = 1;
                while j < slots {
                    idx[j] += 1;
                    if idx[j] < cell {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == slots {
                    break;
                }
            }
            acc
        })
        .sum();
    Ok(sum * weight)
}

/// A Brownian loop sampled at `t_k = k / M`, lifted to `R^n`, with
/// `gamma(1) = gamma(0) + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopSample {
    pub points: Vec<Vec<f64>>,
    pub offset: Vec<i32>,
    /// log-probability of the winding sector under `W / Z`
    pub log_weight: f64,
    pub seed: u64,
    pub stream: u64,
}

impl LoopSample {
    pub fn grid(&self) -> usize {
        self.points.len()
    }

    /// Lifted position at grid index `k`, with `k = M` the closing point.
    pub fn point(&self, k: usize) -> Vec<f64> {
        let m = self.grid();
        let (wraps, k) = (k / m, k % m);
        self.points[k].iter().zip(&self.offset).map(|(x, w)| x + (wraps as i32 * w) as f64).collect()
    }

    pub fn to_loop(&self, torus: FlatTorus) -> Result<DiscreteLoop> {
        DiscreteLoop::from_samples(torus, self.points.clone(), self.offset.clone(), false)
    }
}

fn winding_weights() -> Vec<(i32, f64)> {
    let raw: Vec<(i32, f64)> = (-MAX_WINDING..=MAX_WINDING).map(|w| (w, (-(w * w) as f64 / 2.0).exp())).collect();
    let total: f64 = raw.iter().map(|(_, p)| p).sum();
    raw.into_iter().map(|(w, p)| (w, p / total)).collect()
}

/// Log-probability of the winding vector `m` under `W / Z`.
pub fn winding_log_prob(m: &[i32]) -> f64 {
    let table = winding_weights();
    m.iter().map(|w| table.iter().find(|(v, _)| v == w).map_or(f64::NEG_INFINITY, |(_, p)| p.ln())).sum()
}

/// The RNG for sample `stream` of run `seed`.
pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws a loop from `W / Z`: uniform base point, winding `m` with
/// probability proportional to `e^{-|m|^2 / 2}`, then an exact Brownian
/// bridge from `x` to `x + m` on the grid.
pub fn sample_brownian_loop(torus: &FlatTorus, m: usize, seed: u64, stream: u64) -> Result<LoopSample> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("grid size {m} must be at least 2")));
    }
    let n = torus.n;
    let mut rng = sample_rng(seed, stream);
    let table = winding_weights();
    let mut offset = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let w = table.iter().find(|(_, p)| {
            acc += p;
            u < acc
        });
        offset.push(w.map_or(MAX_WINDING, |(w, _)| *w));
    }
    let base: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
    let sd = (1.0 / m as f64).sqrt();
    let mut walk = vec![vec![0.0; n]; m + 1];
    for k in 1..=m {
        for i in 0..n {
            let z: f64 = rng.sample(StandardNormal);
            walk[k][i] = walk[k - 1][i] + sd * z;
        }
    }
    let points = (0..m)
        .map(|k| {
            let t = k as f64 / m as f64;
            (0..n).map(|i| base[i] + walk[k][i] - t * walk[m][i] + t * offset[i] as f64).collect()
        })
        .collect();
    let log_weight = winding_log_prob(&offset);
    Ok(LoopSample { points, offset, log_weight, seed, stream })
}

/// Holonomy of `b` around the sampled loop: the ordered product of
/// `exp(-A(midpoint) . dx)` over grid steps, running forward in time from
/// left to right. Windings of a magnetic line are closed up with the
/// transition function `phi_m(x) = (-1)^{k m_1 m_2} e^{i pi k (m_1 x_2 - m_2 x_1)}`
/// of the flux gauge.
pub fn stochastic_parallel_transport(b: &BundleModel, s: &LoopSample) -> Result<CMat> {
    let n = s.offset.len();
    let conn = connection_on(b, n)?;
    let m = s.grid();
    let mut w = CMat::identity(conn.rank(), conn.rank());
    for k in 0..m {
        let (p, q) = (s.point(k), s.point(k + 1));
        let mid: Vec<f64> = p.iter().zip(&q).map(|(a, b)| 0.5 * (a + b)).collect();
        let dx: Vec<f64> = p.iter().zip(&q).map(|(a, b)| b - a).collect();
        w *= expm(&(-conn.potential(&mid, &dx)));
    }
    if let BundleModel::MagneticLine { flux, .. } = b {
        let (k, x) = (*flux as f64, &s.points[0]);
        let (m1, m2) = (s.offset[0] as f64, s.offset[1] as f64);
        let sign = if (flux * s.offset[0] * s.offset[1]).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
        let phi = C64::from_polar(sign, PI * k * (m1 * x[1] - m2 * x[0]));
        w /= phi;
    }
    let defect = (w.adjoint() * &w - CMat::identity(w.nrows(), w.nrows())).iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if defect > UNITARITY_TOL {
        return Err(Error::Degenerate(format!("transport drifted from unitary by {defect:e}; grid too coarse")));
    }
    Ok(w)
}

/// `exp(-(1/8) int scal(gamma(t)) dt)` on the grid; identically 1 on flat tori.
pub fn scalar_curvature_weight(torus: &FlatTorus, s: &LoopSample) -> f64 {
    let m = s.grid();
    let integral: f64 = s.points.iter().map(|p| torus.scalar_curvature(p)).sum::<f64>() / m as f64;
    (-integral / 8.0).exp()
}

/// Matrices with coefficients in the Grassmann algebra on `N` generators,
/// stored flat: component `mask` is the `d x d` row-major block at `mask * d * d`.
struct GrassmannAlg {
    d: usize,
    comps: usize,
    /// `(a, b, sign)` for every disjoint pair of masks
    pairs: Vec<(usize, usize, f64)>,
}

impl GrassmannAlg {
    fn new(slots: usize, d: usize) -> Self {
        let comps = 1 << slots;
        let mut pairs = Vec::new();
        for a in 0..comps {
            for b in 0..comps {
                let s = wedge_sign(a as u16, b as u16);
                if s != 0.0 {
                    pairs.push((a, b, s));
                }
            }
        }
        Self { d, comps, pairs }
    }

    fn len(&self) -> usize {
        self.comps * self.d * self.d
    }

    fn identity(&self, out: &mut [C64]) {
        out.fill(ZERO);
        for i in 0..self.d {
            out[i * self.d + i] = C64::new(1.0, 0.0);
        }
    }

    /// `out = x y`
    fn mul(&self, x: &[C64], y: &[C64], out: &mut [C64]) {
        let d = self.d;
        let dd = d * d;
        out.fill(ZERO);
        for &(a, b, s) in &self.pairs {
            let (xa, yb) = (&x[a * dd..(a + 1) * dd], &y[b * dd..(b + 1) * dd]);
            let o = &mut out[(a | b) * dd..((a | b) + 1) * dd];
            for i in 0..d {
                for k in 0..d {
                    let xik = xa[i * d + k] * s;
                    if xik == ZERO {
                        continue;
                    }
                    for j in 0..d {
                        o[i * d + j] += xik * yb[k * d + j];
                    }
                }
            }
        }
    }
}

/// One-form data flattened for the sampling loop: `(component, mode, coefficient)`.
struct ModeTerm {
    component: usize,
    mode: Vec<f64>,
    coeff: C64,
    /// `w_j h e^{-2 pi^2 |k|^2 h u_j (1 - u_j)}` at the Gauss nodes `u_j`
    damping: Vec<f64>,
}

/// Gauss nodes for the step integrals; the phase per step is at most a few radians.
const STEP_NODES: usize = 6;

fn mode_terms(th: &ScalarForm, h: f64, nodes: &(Vec<f64>, Vec<f64>)) -> Vec<ModeTerm> {
    th.terms
        .iter()
        .map(|(&(mask, mode), &coeff)| {
            let mode: Vec<f64> = (0..th.n).map(|i| mode[i] as f64).collect();
            let k2: f64 = mode.iter().map(|k| k * k).sum();
            let damping = nodes
                .0
                .iter()
                .zip(&nodes.1)
                .map(|(&u, &w)| w * h * (-2.0 * PI * PI * k2 * h * u * (1.0 - u)).exp())
                .collect();
            ModeTerm { component: mask.trailing_zeros() as usize, mode, coeff, damping }
        })
        .collect()
}

/// The stochastic top-degree functional: [`crate::topdegree::q_eval`]'s
/// formula on the sampled grid. Each step contributes the ordered exponential
/// of `sum_a xi_a c(theta_a)` integrated over the step, with the Fourier modes
/// replaced by their expectation given the grid points, so the only
/// discretization error comes from products within a single step.
/// Spinor transport is trivial.
pub fn q_tilde(rep: &SpinorRep, s: &LoopSample, thetas: &[ScalarForm]) -> Result<C64> {
    let n = rep.n;
    if s.offset.len() != n || s.points.iter().any(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: s.offset.len() });
    }
    let slots = thetas.len();
    if slots > 4 {
        return Err(Error::InvalidArgument(format!("{slots} slots, at most 4 supported")));
    }
    for th in thetas {
        one_form_field(th, n)?;
    }
    let m = s.grid();
    let h = 1.0 / m as f64;
    let nodes = gauss_legendre(STEP_NODES);
    let terms: Vec<Vec<ModeTerm>> = thetas.iter().map(|th| mode_terms(th, h, &nodes)).collect();
    let d = rep.dim();
    let dd = d * d;
    let gammas: Vec<Vec<C64>> = rep.gamma.iter().map(|g| (0..dd).map(|e| g[(e / d, e % d)]).collect()).collect();
    let alg = GrassmannAlg::new(slots, d);
    let mut state = vec![ZERO; alg.len()];
    alg.identity(&mut state);
    let (mut x, mut power, mut step, mut tmp) =
        (vec![ZERO; alg.len()], vec![ZERO; alg.len()], vec![ZERO; alg.len()], vec![ZERO; alg.len()]);
    let mut v = vec![ZERO; n];
    for k in 0..m {
        let p = &s.points[k];
        let q = s.point(k + 1);
        x.fill(ZERO);
        for (a, ts) in terms.iter().enumerate() {
            v.fill(ZERO);
            for t in ts {
                let kx: f64 = t.mode.iter().zip(p).map(|(k, x)| k * x).sum();
                let kd: f64 = t.mode.iter().zip(p.iter().zip(&q)).map(|(k, (x, y))| k * (y - x)).sum();
                let mut avg = ZERO;
                for (&u, &w) in nodes.0.iter().zip(&t.damping) {
                    avg += C64::from_polar(w, 2.0 * PI * kd * u);
                }
                v[t.component] += t.coeff * C64::from_polar(1.0, 2.0 * PI * kx) * avg;
            }
            let block = &mut x[(1 << a) * dd..((1 << a) + 1) * dd];
            for (vi, g) in v.iter().zip(&gammas) {
                if *vi != ZERO {
                    for (b, ge) in block.iter_mut().zip(g) {
                        *b += vi * ge;
                    }
                }
            }
        }
        // step = exp(x) = sum_j x^j / j!, finite since x is nilpotent
        alg.identity(&mut step);
        alg.identity(&mut power);
        for j in 1..=slots {
            alg.mul(&power, &x, &mut tmp);
            let inv = 1.0 / j as f64;
            for (pw, t) in power.iter_mut().zip(&tmp) {
                *pw = t * inv;
            }
            for (st, pw) in step.iter_mut().zip(&power) {
                *st += pw;
            }
        }
        alg.mul(&state, &step, &mut tmp);
        std::mem::swap(&mut state, &mut tmp);
    }
    let top = CMat::from_row_slice(d, d, &state[((1 << slots) - 1) * dd..(1 << slots) * dd]);
    Ok(rep.supertrace(&top)? * 2f64.powf(-(slots as f64) / 2.0))
}

/// Monte Carlo budget and acceptance threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub samples: usize,
    pub grid: usize,
    pub seed: u64,
    /// standard errors above this mark the estimate inconclusive
    pub max_stderr: f64,
}

impl Default for McOptions {
    fn default() -> Self {
        Self { samples: 100_000, grid: 256, seed: 0, max_stderr: 0.005 }
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean_re: f64,
    pub mean_im: f64,
    pub stderr: f64,
    pub samples: usize,
    pub grid: usize,
    pub seed: u64,
    pub inconclusive: bool,
}

impl McEstimate {
    pub fn mean(&self) -> C64 {
        C64::new(self.mean_re, self.mean_im)
    }

    /// `|estimate - reference| / stderr`, with `floor` guarding deterministic estimators.
    pub fn z_score(&self, reference: C64, floor: f64) -> f64 {
        (self.mean() - reference).norm() / self.stderr.max(floor)
    }
}

fn pairwise_sum(v: &[C64]) -> C64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Mean and standard error of `Z * q_tilde * exp(-(1/8) int scal)` over
/// sampled loops; deterministic given `(seed, samples, grid)`.
pub fn integral_i_mc(
    rep: &SpinorRep,
    torus: &FlatTorus,
    thetas: &[ScalarForm],
    opts: &McOptions,
) -> Result<McEstimate> {
    if rep.n != torus.n {
        return Err(Error::DimensionMismatch { expected: torus.n, found: rep.n });
    }
    if opts.samples < 2 {
        return Err(Error::InvalidArgument("at least two samples are needed".into()));
    }
    let z = loop_space_mass(torus);
    let values: Vec<C64> = (0..opts.samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = sample_brownian_loop(torus, opts.grid, opts.seed, i)?;
            Ok(q_tilde(rep, &s, thetas)? * (z * scalar_curvature_weight(torus, &s)))
        })
        .collect::<Result<_>>()?;
    let count = values.len() as f64;
    let mean = pairwise_sum(&values) / count;
    let dev: Vec<C64> = values.iter().map(|v| C64::new((v - mean).norm_sqr(), 0.0)).collect();
    let stderr = (pairwise_sum(&dev).re / (count * (count - 1.0))).sqrt();
    Ok(McEstimate {
        mean_re: mean.re,
        mean_im: mean.im,
        stderr,
        samples: opts.samples,
        grid: opts.grid,
        seed: opts.seed,
        inconclusive: !(stderr <= opts.max_stderr) || opts.samples < MIN_CONCLUSIVE_SAMPLES,
    })
}

fn one_form_modes(i: usize, modes: &[([i32; 2], C64)]) -> ScalarForm {
    modes.iter().fold(ScalarForm::zero(2, 1), |f, (k, c)| {
        f.add(&ScalarForm::monomial(2, 1, &[i], k, *c)).expect("same torus and cutoff")
    })
}

fn sum_forms(a: ScalarForm, b: ScalarForm) -> ScalarForm {
    a.add(&b).expect("same torus and cutoff")
}

/// The standard `N = 2` comparison panels on `T^2`: two with constant forms
/// and four with Fourier modes of order at most one.
pub fn comparison_panels() -> Vec<(&'static str, Vec<ScalarForm>)> {
    let c = |re: f64, im: f64| C64::new(re, im);
    vec![
        (
            "const-dx-dy",
            vec![one_form_modes(0, &[([0, 0], c(0.8, 0.0))]), one_form_modes(1, &[([0, 0], c(-0.6, 0.0))])],
        ),
        (
            "const-mixed",
            vec![
                sum_forms(one_form_modes(0, &[([0, 0], c(0.5, 0.0))]), one_form_modes(1, &[([0, 0], c(0.3, 0.0))])),
                sum_forms(one_form_modes(0, &[([0, 0], c(-0.2, 0.0))]), one_form_modes(1, &[([0, 0], c(0.7, 0.0))])),
            ],
        ),
        (
            "mode1-cross",
            vec![
                one_form_modes(0, &[([0, 1], c(0.5, 0.0)), ([0, -1], c(0.5, 0.0))]),
                one_form_modes(1, &[([1, 0], c(0.5, 0.0)), ([-1, 0], c(0.5, 0.0))]),
            ],
        ),
        (
            "mode1-offset",
            vec![
                one_form_modes(0, &[([0, 1], c(0.5, 0.0)), ([0, -1], c(0.5, 0.0)), ([0, 0], c(0.4, 0.0))]),
                one_form_modes(1, &[([1, 0], c(0.0, 0.5)), ([-1, 0], c(0.0, -0.5)), ([0, 0], c(0.3, 0.0))]),
            ],
        ),
        (
            "mode1-aligned",
            vec![
                one_form_modes(0, &[([1, 0], c(0.7, 0.0)), ([-1, 0], c(0.7, 0.0))]),
                one_form_modes(1, &[([1, 0], c(0.7, 0.0)), ([-1, 0], c(0.7, 0.0))]),
            ],
        ),
        (
            "mode1-complex",
            vec![
                sum_forms(one_form_modes(0, &[([-1, 0], c(0.5, 0.0))]), one_form_modes(1, &[([0, 0], c(0.2, 0.0))])),
                one_form_modes(1, &[([1, 0], c(0.5, 0.0)), ([1, -1], c(0.0, 0.3))]),
            ],
        ),
    ]
}
