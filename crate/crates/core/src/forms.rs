//! Fourier-truncated differential forms on the flat unit torus.
//!
//! A coefficient is keyed by an index bitmask (bit `i` is `dx^{i+1}`) and a
//! Fourier mode `k`, standing for `c * e^{2 pi i k.x} dx^I`. Products are
//! truncated back to the cutoff `|k|_inf <= cutoff`.

use crate::clifford::{wedge_sign, ExteriorForm};
use crate::error::{Error, Result};
use crate::C64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Fourier mode; entries past the torus dimension are zero.
pub type Mode = [i32; 4];

pub const MAX_DIM: usize = 4;

/// The flat torus `R^n / Z^n` with the identity metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlatTorus {
    pub n: usize,
}

impl FlatTorus {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::UnsupportedDimension(n));
        }
        Ok(Self { n })
    }

    pub fn volume(&self) -> f64 {
        1.0
    }

    pub fn scalar_curvature(&self, _x: &[f64]) -> f64 {
        0.0
    }
}

pub fn mode(k: &[i32]) -> Mode {
    let mut m = [0; 4];
    m[..k.len()].copy_from_slice(k);
    m
}

fn mode_add(a: &Mode, b: &Mode) -> Mode {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn mode_inf(k: &Mode) -> i32 {
    k.iter().map(|x| x.abs()).max().unwrap_or(0)
}

/// A complex differential form with finitely many Fourier modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarForm {
    pub n: usize,
    pub cutoff: i32,
    pub terms: BTreeMap<(u16, Mode), C64>,
}

const ZERO: C64 = C64::new(0.0, 0.0);

impl ScalarForm {
    pub fn zero(n: usize, cutoff: i32) -> Self {
        Self { n, cutoff, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, cutoff: i32, c: C64) -> Self {
        Self::zero(n, cutoff).with_term(0, mode(&[]), c)
    }

    /// The single term `c * e^{2 pi i k.x} dx^I` for an increasing index set.
    pub fn monomial(n: usize, cutoff: i32, indices: &[usize], k: &[i32], c: C64) -> Self {
        let (mask, sign) = crate::clifford::mask_from_indices(indices);
        let f = Self::zero(n, cutoff);
        match mask {
            Some(m) => f.with_term(m, mode(k), c * sign),
            None => f,
        }
    }

    /// Adds a term; modes beyond the cutoff are dropped.
    pub fn with_term(mut self, mask: u16, k: Mode, c: C64) -> Self {
        self.add_term(mask, k, c);
        self
    }

    pub fn add_term(&mut self, mask: u16, k: Mode, c: C64) {
        if mode_inf(&k) > self.cutoff || c == ZERO {
            return;
        }
        let e = self.terms.entry((mask, k)).or_insert(ZERO);
        *e += c;
        if *e == ZERO {
            self.terms.remove(&(mask, k));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| *c == ZERO)
    }

    pub fn check_base(&self, other: &ScalarForm) -> Result<()> {
        if self.n != other.n {
            return Err(Error::BaseMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &ScalarForm) -> Result<ScalarForm> {
        self.check_base(other)?;
        let mut out = self.clone();
        out.cutoff = self.cutoff.max(other.cutoff);
        for (&(m, k), &c) in &other.terms {
            out.add_term(m, k, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ScalarForm) -> Result<ScalarForm> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> ScalarForm {
        let mut out = Self::zero(self.n, self.cutoff);
        for (&(m, k), &c) in &self.terms {
            out.add_term(m, k, c * s);
        }
        out
    }

    /// Exterior product, truncated to the larger of the two cutoffs.
    pub fn wedge(&self, other: &ScalarForm) -> Result<ScalarForm> {
        self.check_base(other)?;
        let mut out = Self::zero(self.n, self.cutoff.max(other.cutoff));
        for (&(ma, ka), &ca) in &self.terms {
            for (&(mb, kb), &cb) in &other.terms {
                let s = wedge_sign(ma, mb);
                if s != 0.0 {
                    out.add_term(ma | mb, mode_add(&ka, &kb), ca * cb * s);
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative: `d(e^{2 pi i k.x}) = 2 pi i k_j e^{2 pi i k.x} dx^j`.
    pub fn exterior_d(&self) -> ScalarForm {
        let mut out = Self::zero(self.n, self.cutoff);
        for (&(m, k), &c) in &self.terms {
            for j in 0..self.n {
                if k[j] == 0 {
                    continue;
                }
                let s = wedge_sign(1 << j, m);
                if s != 0.0 {
                    out.add_term(m | (1 << j), k, c * C64::new(0.0, 2.0 * PI * k[j] as f64) * s);
                }
            }
        }
        out
    }

    /// Degrees present with a nonzero coefficient.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|(m, _)| m.count_ones() as usize).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn degree_part(&self, p: usize) -> ScalarForm {
        let mut out = Self::zero(self.n, self.cutoff);
        for (&(m, k), &c) in &self.terms {
            if m.count_ones() as usize == p {
                out.add_term(m, k, c);
            }
        }
        out
    }

    /// Homogeneous components, one per degree present.
    pub fn homogeneous_parts(&self) -> Vec<(usize, ScalarForm)> {
        self.degrees().into_iter().map(|p| (p, self.degree_part(p))).collect()
    }

    /// Terms grouped by Fourier mode as constant exterior forms.
    pub fn by_mode(&self) -> BTreeMap<Mode, ExteriorForm> {
        let mut out: BTreeMap<Mode, ExteriorForm> = BTreeMap::new();
        for (&(m, k), &c) in &self.terms {
            out.entry(k).or_insert_with(|| ExteriorForm::zero(self.n)).terms.insert(m, c);
        }
        out
    }

    /// Pointwise value at `x` as a constant exterior form.
    pub fn eval_at(&self, x: &[f64]) -> ExteriorForm {
        let mut out = ExteriorForm::zero(self.n);
        for (&(m, k), &c) in &self.terms {
            let phase: f64 = (0..self.n).map(|j| k[j] as f64 * x[j]).sum::<f64>() * 2.0 * PI;
            *out.terms.entry(m).or_insert(ZERO) += c * C64::from_polar(1.0, phase);
        }
        out
    }

    /// Bound on the sup norm: sum of absolute coefficients.
    pub fn sup_norm_bound(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn is_constant_coefficient(&self) -> bool {
        self.terms.keys().all(|(_, k)| *k == [0; 4])
    }

    /// Complex conjugate form (conjugate coefficients, negated modes).
    pub fn conj(&self) -> ScalarForm {
        let mut out = Self::zero(self.n, self.cutoff);
        for (&(m, k), &c) in &self.terms {
            out.add_term(m, [-k[0], -k[1], -k[2], -k[3]], c.conj());
        }
        out
    }
}

/// Integral over the torus: mode-zero coefficient of the top-degree part.
pub fn integrate_top(a: &ScalarForm) -> C64 {
    let top = ((1u32 << a.n) - 1) as u16;
    a.terms.get(&(top, [0; 4])).copied().unwrap_or(ZERO)
}

/// Element `theta' + dt ^ theta''` of the equivariant algebra `Omega_T(X)`.
///
/// `degree` is the nominal degree of the slot. Only its parity enters sign
/// rules; the true degree of `theta''` is `degree - 1` for homogeneous slots.
#[derive(Debug, Clone, PartialEq)]
pub struct TForm {
    pub prime: ScalarForm,
    pub dprime: ScalarForm,
    pub degree: usize,
}

impl TForm {
    /// Infers the degree from the components; fails on inhomogeneous input.
    pub fn new(prime: ScalarForm, dprime: ScalarForm) -> Result<Self> {
        prime.check_base(&dprime)?;
        let dp = prime.degrees();
        let dd = dprime.degrees();
        let degree = match (dp.as_slice(), dd.as_slice()) {
            ([], []) => 0,
            ([p], []) => *p,
            ([], [q]) => q + 1,
            ([p], [q]) if *p == q + 1 => *p,
            _ => return Err(Error::Inhomogeneous(format!("prime degrees {dp:?}, dprime degrees {dd:?}"))),
        };
        Ok(Self { prime, dprime, degree })
    }

    /// A slot with a degree annotation; all components must share its parity.
    pub fn with_degree(prime: ScalarForm, dprime: ScalarForm, degree: usize) -> Result<Self> {
        prime.check_base(&dprime)?;
        let ok = prime.degrees().iter().all(|p| (p + degree).is_multiple_of(2))
            && dprime.degrees().iter().all(|q| (q + 1 + degree).is_multiple_of(2));
        if !ok {
            return Err(Error::Inhomogeneous(format!("components disagree with parity of degree {degree}")));
        }
        Ok(Self { prime, dprime, degree })
    }

    pub fn n(&self) -> usize {
        self.prime.n
    }

    pub fn zero(n: usize, cutoff: i32, degree: usize) -> Self {
        Self { prime: ScalarForm::zero(n, cutoff), dprime: ScalarForm::zero(n, cutoff), degree }
    }

    pub fn from_prime(prime: ScalarForm) -> Result<Self> {
        let z = ScalarForm::zero(prime.n, prime.cutoff);
        Self::new(prime, z)
    }

    pub fn from_dprime(dprime: ScalarForm) -> Result<Self> {
        let z = ScalarForm::zero(dprime.n, dprime.cutoff);
        Self::new(z, dprime)
    }

    pub fn is_zero(&self) -> bool {
        self.prime.is_zero() && self.dprime.is_zero()
    }

    /// True when every component has the degree the annotation implies.
    pub fn is_truly_homogeneous(&self) -> bool {
        self.prime.degrees().iter().all(|&p| p == self.degree)
            && self.dprime.degrees().iter().all(|&q| q + 1 == self.degree)
    }

    pub fn scale(&self, s: C64) -> TForm {
        TForm { prime: self.prime.scale(s), dprime: self.dprime.scale(s), degree: self.degree }
    }

    pub fn add(&self, other: &TForm) -> Result<TForm> {
        if !(self.degree + other.degree).is_multiple_of(2) {
            return Err(Error::Inhomogeneous("sum of slots of different parity".into()));
        }
        Ok(TForm { prime: self.prime.add(&other.prime)?, dprime: self.dprime.add(&other.dprime)?, degree: self.degree })
    }

    /// `d_T = d - iota_{d/dt}`: prime `d theta' - theta''`, dprime `-d theta''`.
    pub fn d_t(&self) -> TForm {
        let prime = self.prime.exterior_d().sub(&self.dprime).expect("same base");
        let dprime = self.dprime.exterior_d().scale(C64::new(-1.0, 0.0));
        TForm { prime, dprime, degree: self.degree + 1 }
    }

    /// Product in `Omega_T(X)`: `a'b' + dt ^ ((-1)^{|a|} a' b'' + a'' b')`.
    pub fn mul(&self, other: &TForm) -> Result<TForm> {
        let sign = if self.degree.is_multiple_of(2) { 1.0 } else { -1.0 };
        let prime = self.prime.wedge(&other.prime)?;
        let dprime =
            self.prime.wedge(&other.dprime)?.scale(C64::new(sign, 0.0)).add(&self.dprime.wedge(&other.prime)?)?;
        Ok(TForm { prime, dprime, degree: self.degree + other.degree })
    }

    /// Components of definite true degree, each annotated with that degree.
    pub fn homogeneous_parts(&self) -> Vec<TForm> {
        let n = self.n();
        let c = self.prime.cutoff.max(self.dprime.cutoff);
        let mut degs: Vec<usize> = self.prime.degrees();
        degs.extend(self.dprime.degrees().into_iter().map(|q| q + 1));
        degs.sort_unstable();
        degs.dedup();
        degs.into_iter()
            .map(|p| TForm {
                prime: self.prime.degree_part(p),
                dprime: if p > 0 { self.dprime.degree_part(p - 1) } else { ScalarForm::zero(n, c) },
                degree: p,
            })
            .collect()
    }

    pub fn sup_norm_bound(&self) -> f64 {
        self.prime.sup_norm_bound() + self.dprime.sup_norm_bound()
    }
}

/// Square matrix of forms, used for connections and curvatures.
pub type FormMatrix = Vec<Vec<ScalarForm>>;

fn check_square(m: &FormMatrix) -> Result<usize> {
    let r = m.len();
    if m.iter().any(|row| row.len() != r) {
        return Err(Error::InvalidArgument("form matrix is not square".into()));
    }
    Ok(r)
}

pub fn form_matrix_mul(a: &FormMatrix, b: &FormMatrix, n: usize, cutoff: i32) -> Result<FormMatrix> {
    let r = check_square(a)?;
    let mut out = vec![vec![ScalarForm::zero(n, cutoff); r]; r];
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                out[i][j] = out[i][j].add(&a[i][k].wedge(&b[k][j])?)?;
            }
        }
    }
    Ok(out)
}

fn form_matrix_trace(a: &FormMatrix, n: usize, cutoff: i32) -> Result<ScalarForm> {
    let mut t = ScalarForm::zero(n, cutoff);
    for (i, row) in a.iter().enumerate() {
        t = t.add(&row[i])?;
    }
    Ok(t)
}

fn truncate_degree(a: &ScalarForm, max: usize) -> ScalarForm {
    let mut out = ScalarForm::zero(a.n, a.cutoff);
    for (&(m, k), &c) in &a.terms {
        if m.count_ones() as usize <= max {
            out.add_term(m, k, c);
        }
    }
    out
}

/// Exponential of an even form, series truncated at the torus dimension.
pub fn form_exp(y: &ScalarForm) -> Result<ScalarForm> {
    let n = y.n;
    let mut out = ScalarForm::constant(n, y.cutoff, C64::new(1.0, 0.0));
    let mut pow = out.clone();
    for j in 1..=n {
        pow = truncate_degree(&pow.wedge(y)?, n).scale(C64::new(1.0 / j as f64, 0.0));
        out = out.add(&pow)?;
    }
    Ok(out)
}

/// Chern-Weil character `tr exp(kappa R)` for a matrix of curvature two-forms.
pub fn chern_weil_ch(r: &FormMatrix, kappa: C64, n: usize, cutoff: i32) -> Result<ScalarForm> {
    let rank = check_square(r)?;
    let x: FormMatrix = r.iter().map(|row| row.iter().map(|f| f.scale(kappa)).collect()).collect();
    let mut out = ScalarForm::constant(n, cutoff, C64::new(rank as f64, 0.0));
    let mut pow = x.clone();
    let mut fact = 1.0;
    for j in 1..=n / 2 {
        fact *= j as f64;
        let t = form_matrix_trace(&pow, n, cutoff)?;
        out = out.add(&truncate_degree(&t, n).scale(C64::new(1.0 / fact, 0.0)))?;
        pow = form_matrix_mul(&pow, &x, n, cutoff)?;
    }
    Ok(out)
}

/// Coefficients of `log((x/2) / sinh(x/2))` in powers `x^2, x^4, x^6, x^8`.
const LOG_AHAT: [f64; 4] = [-1.0 / 24.0, 1.0 / 2880.0, -1.0 / 181440.0, 1.0 / 9676800.0];

/// `det^{1/2}((kappa R/2) / sinh(kappa R/2))` for a skew matrix of two-forms.
pub fn a_hat(r: &FormMatrix, kappa: C64, n: usize, cutoff: i32) -> Result<ScalarForm> {
    let dim = check_square(r)?;
    for i in 0..dim {
        for j in 0..dim {
            if !r[i][j].add(&r[j][i])?.is_zero() {
                return Err(Error::InvalidArgument("curvature is not skew".into()));
            }
        }
    }
    let x: FormMatrix = r.iter().map(|row| row.iter().map(|f| f.scale(kappa)).collect()).collect();
    let x2 = form_matrix_mul(&x, &x, n, cutoff)?;
    let mut pow = x2.clone();
    let mut log = ScalarForm::zero(n, cutoff);
    for (j, c) in LOG_AHAT.iter().enumerate() {
        if 4 * (j + 1) > n {
            break;
        }
        let t = form_matrix_trace(&pow, n, cutoff)?;
        log = log.add(&truncate_degree(&t, n).scale(C64::new(0.5 * c, 0.0)))?;
        pow = form_matrix_mul(&pow, &x2, n, cutoff)?;
    }
    form_exp(&log)
}
