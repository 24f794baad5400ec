//! The extended iterated integral map on sampled smooth loops.
//!
//! A loop is stored by its samples on a uniform grid and evaluated between
//! samples by trigonometric interpolation of the periodic part, so smooth
//! band-limited loops are reproduced exactly. Forms on the loop space are
//! evaluated pointwise on tangent fields, and `d` on the loop space is taken
//! by central differences along the translations `gamma + s v`, which on a
//! flat torus are commuting coordinate directions.

use std::f64::consts::PI;

use crate::bar::{bar_bprime, bar_d, BarChain};
use crate::clifford::ExteriorForm;
use crate::forms::{FlatTorus, TForm};
use crate::quadrature::SimplexRule;
use crate::{Error, Result, C64};

/// Default Gauss points per simplex axis.
pub const DEFAULT_ORDER: usize = 8;

/// A trigonometric interpolant of periodic vector samples.
#[derive(Debug, Clone, PartialEq)]
struct TrigSeries {
    /// `(k, coefficient per coordinate)`, negligible modes dropped
    modes: Vec<(f64, Vec<C64>)>,
}

impl TrigSeries {
    fn fit(samples: &[Vec<f64>], n: usize) -> Self {
        let m = samples.len();
        let half = m as i64 / 2;
        let mut modes = Vec::new();
        let mut biggest: f64 = 0.0;
        for k in -half..=half {
            // split the Nyquist mode evenly between +-m/2 for even m
            let weight = if m.is_multiple_of(2) && k.abs() == half { 0.5 } else { 1.0 };
            if m == 1 && k != 0 {
                continue;
            }
            let c: Vec<C64> = (0..n)
                .map(|i| {
                    samples
                        .iter()
                        .enumerate()
                        .map(|(j, p)| C64::from_polar(p[i], -2.0 * PI * k as f64 * j as f64 / m as f64))
                        .sum::<C64>()
                        * (weight / m as f64)
                })
                .collect();
            biggest = c.iter().fold(biggest, |a, z| a.max(z.norm()));
            modes.push((k as f64, c));
        }
        let floor = 1e-15 * biggest;
        modes.retain(|(_, c)| c.iter().any(|z| z.norm() > floor));
        Self { modes }
    }

    fn value(&self, tau: f64, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (k, c) in &self.modes {
            let e = C64::from_polar(1.0, 2.0 * PI * k * tau);
            for (o, ci) in out.iter_mut().zip(c) {
                *o += (ci * e).re;
            }
        }
        out
    }

    fn derivative(&self, tau: f64, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (k, c) in &self.modes {
            let e = C64::from_polar(2.0 * PI * k, 2.0 * PI * k * tau) * C64::i();
            for (o, ci) in out.iter_mut().zip(c) {
                *o += (ci * e).re;
            }
        }
        out
    }
}

fn uniform_grid(m: usize) -> Vec<f64> {
    (0..m).map(|j| j as f64 / m as f64).collect()
}

/// A loop in the torus, sampled at `grid[j] = j / M` and lifted to `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLoop {
    pub base: FlatTorus,
    pub grid: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    /// winding: `gamma(1) = gamma(0) + offset` in the lift
    pub offset: Vec<i32>,
    /// set for loops whose samples come from a smooth curve
    pub smooth_flag: bool,
    series: TrigSeries,
}

impl DiscreteLoop {
    pub fn from_samples(base: FlatTorus, points: Vec<Vec<f64>>, offset: Vec<i32>, smooth_flag: bool) -> Result<Self> {
        let n = base.n;
        if points.is_empty() {
            return Err(Error::InvalidArgument("loop needs at least one sample".into()));
        }
        if offset.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: offset.len() });
        }
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
        let m = points.len();
        let grid = uniform_grid(m);
        let periodic: Vec<Vec<f64>> = points
            .iter()
            .zip(&grid)
            .map(|(p, t)| p.iter().zip(&offset).map(|(x, w)| x - *w as f64 * t).collect())
            .collect();
        let series = TrigSeries::fit(&periodic, n);
        Ok(Self { base, grid, points, offset, smooth_flag, series })
    }

    /// Samples `f` on `m` points; `f(1) - f(0)` must equal `offset`.
    pub fn from_fn(base: FlatTorus, m: usize, offset: Vec<i32>, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        let points = uniform_grid(m).into_iter().map(f).collect();
        Self::from_samples(base, points, offset, true)
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    pub fn position(&self, tau: f64) -> Vec<f64> {
        let mut x = self.series.value(tau, self.n());
        for (xi, w) in x.iter_mut().zip(&self.offset) {
            *xi += *w as f64 * tau;
        }
        x
    }

    pub fn velocity(&self, tau: f64) -> Vec<f64> {
        let mut v = self.series.derivative(tau, self.n());
        for (vi, w) in v.iter_mut().zip(&self.offset) {
            *vi += *w as f64;
        }
        v
    }
}

/// A vector field along a loop, given by its values on the loop's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField {
    pub vectors: Vec<Vec<f64>>,
    series: TrigSeries,
}

impl TangentField {
    pub fn new(lp: &DiscreteLoop, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if vectors.len() != lp.grid.len() {
            return Err(Error::DimensionMismatch { expected: lp.grid.len(), found: vectors.len() });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != lp.n()) {
            return Err(Error::DimensionMismatch { expected: lp.n(), found: v.len() });
        }
        let series = TrigSeries::fit(&vectors, lp.n());
        Ok(Self { vectors, series })
    }

    pub fn from_fn(lp: &DiscreteLoop, f: impl Fn(f64) -> Vec<f64>) -> Result<Self> {
        Self::new(lp, lp.grid.iter().map(|&t| f(t)).collect())
    }

    pub fn value(&self, tau: f64) -> Vec<f64> {
        self.series.value(tau, self.vectors.first().map_or(0, |v| v.len()))
    }
}

/// A tangent argument: a field or the rotation generator `K = gamma'`.
#[derive(Clone, Copy)]
enum Arg<'a> {
    Field(&'a TangentField),
    Velocity,
}

/// The loop `gamma + s v` (or `gamma` itself).
#[derive(Clone, Copy)]
struct Shifted<'a> {
    lp: &'a DiscreteLoop,
    shift: Option<(&'a TangentField, f64)>,
}

impl Shifted<'_> {
    fn position(&self, tau: f64) -> Vec<f64> {
        let mut x = self.lp.position(tau);
        if let Some((v, s)) = self.shift {
            for (xi, vi) in x.iter_mut().zip(v.value(tau)) {
                *xi += s * vi;
            }
        }
        x
    }

    fn velocity(&self, tau: f64) -> Vec<f64> {
        let mut x = self.lp.velocity(tau);
        if let Some((v, s)) = self.shift {
            let n = x.len();
            for (xi, vi) in x.iter_mut().zip(v.series.derivative(tau, n)) {
                *xi += s * vi;
            }
        }
        x
    }
}

/// `iota_v` of a constant-coefficient form.
pub fn interior(v: &[f64], f: &ExteriorForm) -> ExteriorForm {
    let mut out = ExteriorForm::zero(f.n);
    for (&mask, &c) in &f.terms {
        let mut sign = 1.0;
        for (j, vj) in v.iter().enumerate() {
            if mask & (1 << j) == 0 {
                continue;
            }
            if *vj != 0.0 {
                *out.terms.entry(mask & !(1 << j)).or_default() += c * (sign * vj);
            }
            sign = -sign;
        }
    }
    out
}

/// `f(v_1, ..., v_q)` for a form and vectors given as rows.
fn eval_on(f: &ExteriorForm, vs: &[Vec<f64>]) -> C64 {
    let q = vs.len();
    let mut total = C64::new(0.0, 0.0);
    for (&mask, &c) in &f.terms {
        if mask.count_ones() as usize != q {
            continue;
        }
        let idx: Vec<usize> = (0..f.n).filter(|i| mask & (1 << i) != 0).collect();
        let m = nalgebra::DMatrix::from_fn(q, q, |r, s| vs[r][idx[s]]);
        total += c * m.determinant();
    }
    total
}

/// Possible true degrees `sum (|theta_a| - 1)` of a word on the loop space.
fn word_degrees(w: &[TForm]) -> Vec<usize> {
    let mut acc = vec![0usize];
    for t in w {
        let parts: Vec<usize> = t.homogeneous_parts().iter().filter(|p| p.degree > 0).map(|p| p.degree - 1).collect();
        let mut next: Vec<usize> = acc.iter().flat_map(|a| parts.iter().map(move |q| a + q)).collect();
        next.sort_unstable();
        next.dedup();
        acc = next;
    }
    acc
}

/// The loop-space form of one slot at time `tau`: `iota_K theta' + theta''`.
fn slot_form(t: &TForm, path: &Shifted, tau: f64) -> ExteriorForm {
    let x = path.position(tau);
    let mut w = interior(&path.velocity(tau), &t.prime.eval_at(&x));
    for (m, c) in t.dprime.eval_at(&x).terms {
        *w.terms.entry(m).or_default() += c;
    }
    w
}

/// Sum over ordered assignments of the tangent set to slots with shuffle sign.
fn shuffle_eval(forms: &[ExteriorForm], vecs: &[Vec<Vec<f64>>], remaining: &[usize]) -> C64 {
    let Some((f, rest_forms)) = forms.split_first() else {
        return if remaining.is_empty() { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
    };
    let slot = vecs.len() - forms.len();
    let r = remaining.len();
    let mut total = C64::new(0.0, 0.0);
    let degrees: Vec<usize> = {
        let mut d: Vec<usize> = f.terms.keys().map(|m| m.count_ones() as usize).filter(|&q| q <= r).collect();
        d.sort_unstable();
        d.dedup();
        d
    };
    for q in degrees {
        for pick in 0u32..(1 << r) {
            if pick.count_ones() as usize != q {
                continue;
            }
            let chosen: Vec<usize> = (0..r).filter(|i| pick & (1 << i) != 0).collect();
            let left: Vec<usize> = (0..r).filter(|i| pick & (1 << i) == 0).map(|i| remaining[i]).collect();
            // moving the chosen entries to the front of `remaining`
            let inversions: usize = chosen.iter().enumerate().map(|(pos, &i)| i - pos).sum();
            let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };
            let vs: Vec<Vec<f64>> = chosen.iter().map(|&i| vecs[slot][remaining[i]].clone()).collect();
            let head = eval_on(f, &vs);
            if head == C64::new(0.0, 0.0) {
                continue;
            }
            total += head * sign * shuffle_eval(rest_forms, vecs, &left);
        }
    }
    total
}

fn rho_raw(c: &BarChain, path: Shifted, args: &[Arg], order: usize) -> C64 {
    let k = args.len();
    let mut rules: Vec<Option<SimplexRule>> = Vec::new();
    let mut total = C64::new(0.0, 0.0);
    for (coef, w) in &c.terms {
        if !word_degrees(w).contains(&k) {
            continue;
        }
        let len = w.len();
        if rules.len() <= len {
            rules.resize(len + 1, None);
        }
        let rule = rules[len].get_or_insert_with(|| SimplexRule::gauss(len, order));
        let mut acc = C64::new(0.0, 0.0);
        for (pt, wt) in rule.points.iter().zip(&rule.weights) {
            let forms: Vec<ExteriorForm> = w.iter().zip(pt).map(|(t, &tau)| slot_form(t, &path, tau)).collect();
            let vecs: Vec<Vec<Vec<f64>>> = pt
                .iter()
                .map(|&tau| {
                    args.iter()
                        .map(|a| match a {
                            Arg::Field(v) => v.value(tau),
                            Arg::Velocity => path.velocity(tau),
                        })
                        .collect()
                })
                .collect();
            let remaining: Vec<usize> = (0..k).collect();
            acc += shuffle_eval(&forms, &vecs, &remaining) * *wt;
        }
        total += coef * acc;
    }
    total
}

/// `rho(c)(v_1, ..., v_k)` at `gamma` with the default quadrature order.
pub fn rho_eval(c: &BarChain, lp: &DiscreteLoop, tangents: &[TangentField]) -> Result<C64> {
    rho_eval_with(c, lp, tangents, DEFAULT_ORDER)
}

/// As [`rho_eval`] with `order` Gauss points per simplex axis.
pub fn rho_eval_with(c: &BarChain, lp: &DiscreteLoop, tangents: &[TangentField], order: usize) -> Result<C64> {
    if !lp.smooth_flag {
        return Err(Error::InvalidArgument("rho_eval needs a smooth loop".into()));
    }
    let k = tangents.len();
    // words with a function slot vanish identically and constrain nothing
    let degrees: Vec<Vec<usize>> = c.terms.iter().map(|(_, w)| word_degrees(w)).filter(|d| !d.is_empty()).collect();
    if !degrees.is_empty() && !degrees.iter().any(|d| d.contains(&k)) {
        let expected = degrees.iter().flatten().copied().min().unwrap_or(0);
        return Err(Error::TangentCount { expected, found: k });
    }
    let args: Vec<Arg> = tangents.iter().map(Arg::Field).collect();
    Ok(rho_raw(c, Shifted { lp, shift: None }, &args, order))
}

/// `|d_K rho(c) + rho((d_T - b') c)|` on the given tangents.
///
/// With `rho`, `d_T`, `b'` and `d_K = d + iota_K` as written, Stokes on the
/// simplex gives `d_K rho = rho(-d_T + b')`: slot derivatives enter with a
/// minus sign and collision faces with a plus sign. Conjugating by
/// `J = (-1)^{length}` and the form-degree sign turns this into
/// `d_K rho' = rho'(d_T + b')` for `rho' = (-1)^{N + k} rho`; the residual
/// tests the unconjugated form so that `rho_eval` keeps its plain values.
///
/// `d` on the loop space is the alternating sum of central differences with
/// step `h` along the constant extensions of the tangents.
pub fn chainmap_residual(
    c: &BarChain,
    lp: &DiscreteLoop,
    tangents: &[TangentField],
    h: f64,
    order: usize,
) -> Result<f64> {
    let lhs = equivariant_differential(c, lp, tangents, h, order)?;
    let image = bar_d(c).scale(C64::new(-1.0, 0.0)).add(&bar_bprime(c)?);
    let args: Vec<Arg> = tangents.iter().map(Arg::Field).collect();
    let rhs = rho_raw(&image, Shifted { lp, shift: None }, &args, order);
    Ok((lhs - rhs).norm())
}

/// `(d_K rho(c))(v_1, ..., v_k)` with `d` by central differences of step `h`.
pub fn equivariant_differential(
    c: &BarChain,
    lp: &DiscreteLoop,
    tangents: &[TangentField],
    h: f64,
    order: usize,
) -> Result<C64> {
    if !lp.smooth_flag {
        return Err(Error::InvalidArgument("the loop-space differential needs a smooth loop".into()));
    }
    if h <= 0.0 {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    let k = tangents.len();
    let mut lhs = C64::new(0.0, 0.0);
    for i in 0..k {
        let others: Vec<Arg> =
            tangents.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| Arg::Field(v)).collect();
        let plus = rho_raw(c, Shifted { lp, shift: Some((&tangents[i], h)) }, &others, order);
        let minus = rho_raw(c, Shifted { lp, shift: Some((&tangents[i], -h)) }, &others, order);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        lhs += (plus - minus) * (sign / (2.0 * h));
    }
    let mut with_k = vec![Arg::Velocity];
    with_k.extend(tangents.iter().map(Arg::Field));
    lhs += rho_raw(c, Shifted { lp, shift: None }, &with_k, order);
    Ok(lhs)
}

/// `rho(c)(v_1, ..., v_k)` without the tangent-count check; words of the
/// wrong degree contribute zero.
pub fn rho_eval_lenient(c: &BarChain, lp: &DiscreteLoop, tangents: &[TangentField], order: usize) -> Result<C64> {
    if !lp.smooth_flag {
        return Err(Error::InvalidArgument("rho_eval needs a smooth loop".into()));
    }
    let args: Vec<Arg> = tangents.iter().map(Arg::Field).collect();
    Ok(rho_raw(c, Shifted { lp, shift: None }, &args, order))
}
