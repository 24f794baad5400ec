//! Pfaffians, Berezin top-degree coefficients, the loop-space top-degree
//! functional `q` on smooth loops and the monodromy determinant of `d/dt + A`.

use nalgebra::DMatrix;

use crate::chern::signed_permutations;
use crate::clifford::{ExteriorForm, SpinorRep};
use crate::forms::ScalarForm;
use crate::iterated::DiscreteLoop;
use crate::linalg::{expm, CMat, ZERO};
use crate::quadrature::SimplexRule;
use crate::{Error, Result, C64};

/// Tolerance on `A^T = -A`.
pub const SKEW_TOL: f64 = 1e-12;
/// Distance from 1 below which a monodromy eigenvalue counts as a kernel.
pub const KERNEL_TOL: f64 = 1e-8;
/// Default Gauss points per simplex axis for [`q_eval`].
pub const DEFAULT_Q_ORDER: usize = 12;

fn check_skew(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    if !a.nrows().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("odd dimension {}", a.nrows())));
    }
    let scale = a.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let defect = (a + a.transpose()).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if defect > SKEW_TOL * scale {
        return Err(Error::InvalidArgument(format!("matrix is not skew (defect {defect:e})")));
    }
    Ok(())
}

/// The symplectic form `omega[v, w] = <v, A w>` on `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewForm {
    pub dim: usize,
    pub a: DMatrix<f64>,
}

impl SkewForm {
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        check_skew(&a)?;
        Ok(Self { dim: a.nrows(), a })
    }

    pub fn eval(&self, v: &[f64], w: &[f64]) -> f64 {
        (0..self.dim).flat_map(|i| (0..self.dim).map(move |j| (i, j))).map(|(i, j)| v[i] * self.a[(i, j)] * w[j]).sum()
    }
}

/// Pfaffian by skew Gaussian elimination with partial pivoting
/// (Parlett-Reid), normalized so that `pf([[0, a], [-a, 0]]) = a`.
pub fn pfaffian(a: &DMatrix<f64>) -> Result<f64> {
    check_skew(a)?;
    let n = a.nrows();
    let mut a = a.clone();
    let mut pf = 1.0;
    for k in (0..n.saturating_sub(1)).step_by(2) {
        let kp = (k + 1..n).max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs())).expect("nonempty");
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = a[(k, k + 1)];
        if piv == 0.0 {
            return Ok(0.0);
        }
        pf *= piv;
        // eliminate row/column k against the pivot pair
        let tau: Vec<f64> = (k + 2..n).map(|j| a[(k, j)] / piv).collect();
        let col: Vec<f64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
        for (ii, i) in (k + 2..n).enumerate() {
            for (jj, j) in (k + 2..n).enumerate() {
                a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
            }
        }
    }
    Ok(pf)
}

/// `[e^omega ^ theta_1 ^ ... ^ theta_N]_top` for covectors `theta_a`.
///
/// Equals `pf(A) pf(G)` with `G_ab = <A^{-1} theta_a, theta_b>`; odd `N`
/// and `N > dim` give 0. Singular `A` is reported as degenerate.
pub fn berezin_top(omega: &SkewForm, covectors: &[Vec<f64>]) -> Result<f64> {
    let dim = omega.dim;
    if let Some(v) = covectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    let n = covectors.len();
    if n % 2 == 1 || n > dim {
        return Ok(0.0);
    }
    let pf_a = pfaffian(&omega.a)?;
    if n == 0 {
        return Ok(pf_a);
    }
    let lu = omega.a.clone().lu();
    let solved: Vec<nalgebra::DVector<f64>> = covectors
        .iter()
        .map(|v| lu.solve(&nalgebra::DVector::from_column_slice(v)))
        .collect::<Option<_>>()
        .filter(|_| pf_a.abs() > 0.0)
        .ok_or_else(|| {
            Error::Degenerate("omega is singular; the kernel-splitting variant is not implemented".into())
        })?;
    let g = DMatrix::from_fn(n, n, |a, b| solved[a].iter().zip(&covectors[b]).map(|(x, y)| x * y).sum());
    // exact skewness of G is restored before the Pfaffian
    let g = (&g - g.transpose()) * 0.5;
    Ok(pf_a * pfaffian(&g)?)
}

/// `2^{-N/2} sum_sigma sgn(sigma) int_{Delta_N} str(c(f_{sigma_1}(t_1)) ... c(f_{sigma_N}(t_N))) dt`
/// for covector fields `f_a: [0, 1] -> C^n` along a loop in the flat torus,
/// where spinor transport is the identity.
pub fn q_eval_fields(rep: &SpinorRep, fields: &[&dyn Fn(f64) -> Vec<C64>], order: usize) -> Result<C64> {
    let n = fields.len();
    if n > 4 {
        return Err(Error::InvalidArgument(format!("{n} slots, at most 4 supported")));
    }
    let rule = SimplexRule::gauss(n, order);
    let perms = signed_permutations(n);
    let mut total = ZERO;
    for (t, w) in rule.points.iter().zip(&rule.weights) {
        // c[a][b] = c(f_a(t_b))
        let c: Vec<Vec<CMat>> = fields
            .iter()
            .map(|f| t.iter().map(|&tb| clifford_of(rep, &f(tb))).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let mut sum = CMat::zeros(rep.dim(), rep.dim());
        for (p, s) in &perms {
            let mut prod = CMat::identity(rep.dim(), rep.dim());
            for (b, &a) in p.iter().enumerate() {
                prod *= &c[a][b];
            }
            sum += prod * C64::new(*s, 0.0);
        }
        total += rep.supertrace(&sum)? * *w;
    }
    Ok(total * 2f64.powf(-(n as f64) / 2.0))
}

/// [`q_eval_fields`] for one-forms on the torus evaluated along `lp`.
pub fn q_eval(rep: &SpinorRep, lp: &DiscreteLoop, thetas: &[ScalarForm], order: usize) -> Result<C64> {
    if rep.n != lp.n() {
        return Err(Error::DimensionMismatch { expected: rep.n, found: lp.n() });
    }
    let fields: Vec<Box<dyn Fn(f64) -> Vec<C64> + '_>> = thetas
        .iter()
        .map(|th| one_form_field(th, rep.n).map(|_| Box::new(move |t: f64| covector_at(th, &lp.position(t))) as Box<_>))
        .collect::<Result<_>>()?;
    let refs: Vec<&dyn Fn(f64) -> Vec<C64>> = fields.iter().map(|f| f.as_ref()).collect();
    q_eval_fields(rep, &refs, order)
}

pub(crate) fn one_form_field(th: &ScalarForm, n: usize) -> Result<()> {
    if th.n != n {
        return Err(Error::DimensionMismatch { expected: n, found: th.n });
    }
    if let Some(((m, _), _)) = th.terms.iter().find(|((m, _), _)| m.count_ones() != 1) {
        return Err(Error::InvalidDegree { degree: m.count_ones() as usize, dim: n });
    }
    Ok(())
}

/// Components of a one-form at `x`.
pub(crate) fn covector_at(th: &ScalarForm, x: &[f64]) -> Vec<C64> {
    let e = th.eval_at(x);
    (0..th.n).map(|i| e.terms.get(&(1u16 << i)).copied().unwrap_or(ZERO)).collect()
}

pub(crate) fn clifford_of(rep: &SpinorRep, v: &[C64]) -> Result<CMat> {
    let mut f = ExteriorForm::zero(rep.n);
    for (i, c) in v.iter().enumerate() {
        if *c != ZERO {
            f.terms.insert(1u16 << i, *c);
        }
    }
    rep.clifford_mult(&f)
}

/// Monodromy `U(1)` of `U' = A(t) U`, `U(0) = 1`, by exponential midpoint steps.
pub fn monodromy(a: impl Fn(f64) -> CMat, dim: usize, steps: usize) -> Result<CMat> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive".into()));
    }
    let h = 1.0 / steps as f64;
    let mut u = CMat::identity(dim, dim);
    for j in 0..steps {
        let aj = a((j as f64 + 0.5) * h);
        if aj.nrows() != dim || aj.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: aj.nrows() });
        }
        u = expm(&(aj * C64::new(h, 0.0))) * u;
    }
    Ok(u)
}

/// Experimental: `det(1 - M)` for the monodromy `M` of `A` (see [`monodromy`]),
/// with no exponential prefactor. For constant `A = a` the symmetric
/// Fourier-mode product of `d/dt - a` equals `e^{-tr(a)/2} det(1 - e^a)`.
/// An eigenvalue of `M` within [`KERNEL_TOL`] of 1 is reported as degenerate.
pub fn zeta_det_monodromy(a: impl Fn(f64) -> CMat, dim: usize, steps: usize) -> Result<C64> {
    let m = monodromy(a, dim, steps)?;
    let eig = eigenvalues(m.clone())?;
    if eig.iter().any(|l| (l - C64::new(1.0, 0.0)).norm() < KERNEL_TOL) {
        return Err(Error::Degenerate("monodromy has eigenvalue 1: d/dt + A has a kernel".into()));
    }
    Ok((CMat::identity(dim, dim) - m).determinant())
}

fn eigenvalues(m: CMat) -> Result<Vec<C64>> {
    if m.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite monodromy".into()));
    }
    let n = m.nrows();
    let (_, t) = nalgebra::linalg::Schur::new(m).unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}
