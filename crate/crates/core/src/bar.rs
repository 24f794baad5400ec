//! The bar complex of `Omega_T(X)`: words of equivariant forms with the
//! differentials `d` and `b'`, graded cyclic symmetrization and an
//! entire-growth diagnostic.
//!
//! Signs use `n_k = sum_{i<=k} (|theta_i| - 1)`:
//! `d = sum_k (-1)^{n_{k-1}} (.., d_T theta_k, ..)` and
//! `b' = -sum_k (-1)^{n_k} (.., theta_k theta_{k+1}, ..)`.

use crate::error::Result;
use crate::forms::{Mode, TForm};
use crate::C64;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;

pub type Word = Vec<TForm>;

/// Formal linear combination of words.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BarChain {
    pub terms: Vec<(C64, Word)>,
    pub cyclic: bool,
}

fn parity_sign(p: usize) -> f64 {
    if p.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Parity of `n_k` for every prefix length `k = 0..=N`.
pub fn shift_parities(word: &[TForm]) -> Vec<usize> {
    let mut out = Vec::with_capacity(word.len() + 1);
    let mut acc = 0usize;
    out.push(0);
    for t in word {
        acc = (acc + t.degree + 1) % 2;
        out.push(acc);
    }
    out
}

/// One slot of a fully expanded word: a single monomial in either component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElemSlot {
    pub dprime: bool,
    pub mask: u16,
    pub mode: Mode,
}

impl BarChain {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn empty_word(c: C64) -> Self {
        Self { terms: vec![(c, Vec::new())], cyclic: true }
    }

    pub fn word(c: C64, w: Word) -> Self {
        Self { terms: vec![(c, w)], cyclic: false }
    }

    pub fn push(&mut self, c: C64, w: Word) {
        self.terms.push((c, w));
    }

    pub fn add(&self, other: &BarChain) -> BarChain {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        BarChain { terms, cyclic: self.cyclic && other.cyclic }
    }

    pub fn scale(&self, s: C64) -> BarChain {
        BarChain { terms: self.terms.iter().map(|(c, w)| (c * s, w.clone())).collect(), cyclic: self.cyclic }
    }

    /// Drops terms with zero coefficient or a zero slot.
    pub fn pruned(&self) -> BarChain {
        let terms =
            self.terms.iter().filter(|(c, w)| c.norm() > 0.0 && w.iter().all(|t| !t.is_zero())).cloned().collect();
        BarChain { terms, cyclic: self.cyclic }
    }

    pub fn max_len(&self) -> usize {
        self.terms.iter().map(|(_, w)| w.len()).max().unwrap_or(0)
    }

    /// Terms of a given word length.
    pub fn of_length(&self, n: usize) -> BarChain {
        let terms = self.terms.iter().filter(|(_, w)| w.len() == n).cloned().collect();
        BarChain { terms, cyclic: self.cyclic }
    }

    /// Multilinear expansion into single-monomial slots with like terms collected.
    pub fn expand(&self) -> BTreeMap<Vec<ElemSlot>, C64> {
        let mut out: BTreeMap<Vec<ElemSlot>, C64> = BTreeMap::new();
        for (c, w) in &self.terms {
            let mut partial: Vec<(Vec<ElemSlot>, C64)> = vec![(Vec::new(), *c)];
            for t in w {
                let mut next = Vec::new();
                for (prefix, pc) in &partial {
                    for (dp, f) in [(false, &t.prime), (true, &t.dprime)] {
                        for (&(mask, mode), &v) in &f.terms {
                            let mut p = prefix.clone();
                            p.push(ElemSlot { dprime: dp, mask, mode });
                            next.push((p, pc * v));
                        }
                    }
                }
                partial = next;
            }
            for (k, v) in partial {
                *out.entry(k).or_insert(C64::new(0.0, 0.0)) += v;
            }
        }
        out
    }

    /// Largest coefficient after expansion; zero exactly when the chain vanishes.
    pub fn expanded_max_abs(&self) -> f64 {
        self.expand().values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Growth norm: `sum |c| * prod sup(theta_i)`.
    pub fn growth_norm(&self) -> f64 {
        self.terms.iter().map(|(c, w)| c.norm() * w.iter().map(|t| t.sup_norm_bound()).product::<f64>()).sum()
    }
}

/// Bar differential `d`, applying `d_T` slotwise.
pub fn bar_d(c: &BarChain) -> BarChain {
    let mut out = BarChain { terms: Vec::new(), cyclic: c.cyclic };
    for (coef, w) in &c.terms {
        let par = shift_parities(w);
        for k in 0..w.len() {
            let mut nw = w.clone();
            nw[k] = w[k].d_t();
            out.terms.push((coef * parity_sign(par[k]), nw));
        }
    }
    out
}

/// Bar differential `b'`, multiplying adjacent slots.
pub fn bar_bprime(c: &BarChain) -> Result<BarChain> {
    let mut out = BarChain { terms: Vec::new(), cyclic: false };
    for (coef, w) in &c.terms {
        let par = shift_parities(w);
        for k in 0..w.len().saturating_sub(1) {
            let mut nw: Word = Vec::with_capacity(w.len() - 1);
            nw.extend_from_slice(&w[..k]);
            nw.push(w[k].mul(&w[k + 1])?);
            nw.extend_from_slice(&w[k + 2..]);
            out.terms.push((-coef * parity_sign(par[k + 1]), nw));
        }
    }
    Ok(out)
}

/// Total differential `d + b'`.
pub fn total_differential(c: &BarChain) -> Result<BarChain> {
    Ok(bar_d(c).add(&bar_bprime(c)?))
}

/// Graded cyclic rotation `(t_1..t_N) -> (-1)^{(|t_N|-1) n_{N-1}} (t_N, t_1..t_{N-1})`.
pub fn rotate(w: &[TForm]) -> (f64, Word) {
    let n = w.len();
    if n == 0 {
        return (1.0, Vec::new());
    }
    let par = shift_parities(&w[..n - 1]);
    let sign = parity_sign((w[n - 1].degree + 1) * par[n - 1]);
    let mut nw = Vec::with_capacity(n);
    nw.push(w[n - 1].clone());
    nw.extend_from_slice(&w[..n - 1]);
    (sign, nw)
}

/// Average over graded cyclic rotations; idempotent.
///
/// `d` commutes with this projection. `b'` does not, but `d + b'` maps
/// cyclic chains to cyclic chains.
pub fn cyclic_project(c: &BarChain) -> BarChain {
    let mut out = BarChain { terms: Vec::new(), cyclic: true };
    for (coef, w) in &c.terms {
        let n = w.len().max(1);
        let mut cur = w.clone();
        let mut sign = 1.0;
        for _ in 0..n {
            out.terms.push((coef * sign / n as f64, cur.clone()));
            let (s, nw) = rotate(&cur);
            sign *= s;
            cur = nw;
        }
    }
    out
}

/// `(delta L)[c] = -L[(d + b')c]` for a linear functional given on words.
pub fn apply_codifferential<F>(l: F, c: &BarChain) -> Result<C64>
where
    F: Fn(&[TForm]) -> Result<C64>,
{
    let dc = total_differential(c)?;
    let mut s = C64::new(0.0, 0.0);
    for (coef, w) in &dc.terms {
        s += coef * l(w)?;
    }
    Ok(-s)
}

/// Chain components indexed by word length.
#[derive(Debug, Clone, Default)]
pub struct ChainSequence {
    pub components: Vec<BarChain>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub norms: Vec<f64>,
    /// `norm_N * N!`
    pub factorial_scaled: Vec<f64>,
    /// successive ratios `norm_N / norm_{N-1}` where defined
    pub ratios: Vec<f64>,
    pub super_exponential: bool,
}

/// Flags super-exponential growth of the component norms.
///
/// The successive ratios of an at most exponentially growing sequence stay
/// bounded; the flag is raised when they keep increasing and the last ratio
/// exceeds twice the first.
pub fn growth_diagnostic(s: &ChainSequence) -> GrowthReport {
    let norms: Vec<f64> = s.components.iter().map(|c| c.growth_norm()).collect();
    growth_from_norms(&norms)
}

pub fn growth_from_norms(norms: &[f64]) -> GrowthReport {
    let mut fact = 1.0;
    let factorial_scaled = norms
        .iter()
        .enumerate()
        .map(|(n, x)| {
            if n > 0 {
                fact *= n as f64;
            }
            x * fact
        })
        .collect();
    let ratios: Vec<f64> = norms.windows(2).filter(|p| p[0] > 0.0).map(|p| p[1] / p[0]).collect();
    let increasing = ratios.len() >= 3 && ratios.windows(2).all(|r| r[1] > r[0]);
    let super_exponential = increasing && ratios.last().unwrap() > &(2.0 * ratios[0]);
    GrowthReport { norms: norms.to_vec(), factorial_scaled, ratios, super_exponential }
}

/// Parameters for random chains used in property suites.
#[derive(Debug, Clone, Copy)]
pub struct RandomChainSpec {
    pub n: usize,
    /// largest Fourier mode drawn for a coefficient
    pub mode_range: i32,
    /// cutoff of the generated forms; products stay exact when it is at
    /// least `max_len * mode_range`
    pub cutoff: i32,
    pub max_len: usize,
    pub max_degree: usize,
    pub terms_per_component: usize,
    pub words: usize,
}

impl Default for RandomChainSpec {
    fn default() -> Self {
        Self { n: 2, mode_range: 1, cutoff: 4, max_len: 4, max_degree: 3, terms_per_component: 2, words: 2 }
    }
}

fn random_component<R: Rng>(
    rng: &mut R,
    n: usize,
    (range, cutoff): (i32, i32),
    degree: usize,
    terms: usize,
) -> crate::forms::ScalarForm {
    let mut f = crate::forms::ScalarForm::zero(n, cutoff);
    if degree > n {
        return f;
    }
    let masks: Vec<u16> = (0..(1u16 << n)).filter(|m| m.count_ones() as usize == degree).collect();
    for _ in 0..terms {
        let mask = masks[rng.gen_range(0..masks.len())];
        let mut k = [0i32; 4];
        for kj in k.iter_mut().take(n) {
            *kj = rng.gen_range(-range..=range);
        }
        f.add_term(mask, k, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    f
}

/// Random homogeneous slot of the given degree with modes in `-range..=range`.
pub fn random_tform<R: Rng>(rng: &mut R, n: usize, (range, cutoff): (i32, i32), degree: usize, terms: usize) -> TForm {
    let prime = random_component(rng, n, (range, cutoff), degree, terms);
    let dprime = if degree > 0 {
        random_component(rng, n, (range, cutoff), degree - 1, terms)
    } else {
        crate::forms::ScalarForm::zero(n, cutoff)
    };
    TForm { prime, dprime, degree }
}

/// Random chain with word lengths in `1..=max_len`.
pub fn random_chain<R: Rng>(rng: &mut R, spec: &RandomChainSpec) -> BarChain {
    let mut c = BarChain::zero();
    for _ in 0..spec.words {
        let len = rng.gen_range(1..=spec.max_len);
        let w = (0..len)
            .map(|_| {
                let deg = rng.gen_range(0..=spec.max_degree);
                random_tform(rng, spec.n, (spec.mode_range, spec.cutoff), deg, spec.terms_per_component)
            })
            .collect();
        c.push(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), w);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::ScalarForm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    fn func(k: i32) -> TForm {
        TForm::from_prime(ScalarForm::monomial(2, 2, &[], &[k, 0], one())).unwrap()
    }

    #[test]
    fn d_of_single_word_and_empty() {
        let t = func(1);
        let c = BarChain::word(one(), vec![t.clone()]);
        let dc = bar_d(&c);
        assert_eq!(dc.terms.len(), 1);
        assert_eq!(dc.terms[0].1[0], t.d_t());
        assert_eq!(dc.terms[0].0, one());
        assert!(bar_d(&BarChain::empty_word(one())).terms.is_empty());
    }

    #[test]
    fn bprime_of_two_functions() {
        // n_1 = |f| - 1 = -1 is odd, so b'(f, g) = -(-1)^{n_1} (fg) = +(fg)
        let c = BarChain::word(one(), vec![func(1), func(-1)]);
        let b = bar_bprime(&c).unwrap();
        assert_eq!(b.terms.len(), 1);
        assert_eq!(b.terms[0].0, one());
        assert_eq!(b.terms[0].1[0], func(1).mul(&func(-1)).unwrap());
        assert!(bar_bprime(&BarChain::word(one(), vec![func(1)])).unwrap().terms.is_empty());
    }

    #[test]
    fn rotation_sign_for_two_slots() {
        // degrees (1, 2): n_1 = 0, so (t1, t2) -> +(t2, t1)
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_tform(&mut rng, 2, (1, 1), 1, 1);
        let b = random_tform(&mut rng, 2, (1, 1), 2, 1);
        assert_eq!(rotate(&[a.clone(), b.clone()]).0, 1.0);
        // degrees (2, 2): n_1 = 1 and |t2| - 1 = 1, so the sign is -1
        assert_eq!(rotate(&[b.clone(), b.clone()]).0, -1.0);
        // full rotation returns the word with sign +1
        let w = vec![a.clone(), b.clone(), b.clone()];
        let mut s = 1.0;
        let mut cur = w.clone();
        for _ in 0..3 {
            let (x, nw) = rotate(&cur);
            s *= x;
            cur = nw;
        }
        assert_eq!(cur, w);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn identities_on_random_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let spec = RandomChainSpec::default();
        for _ in 0..30 {
            let c = random_chain(&mut rng, &spec);
            assert!(bar_d(&bar_d(&c)).expanded_max_abs() < 1e-12);
            assert!(bar_bprime(&bar_bprime(&c).unwrap()).unwrap().expanded_max_abs() < 1e-12);
            let dc = total_differential(&c).unwrap();
            assert!(total_differential(&dc).unwrap().expanded_max_abs() < 1e-9);
            let p = cyclic_project(&c);
            assert!(cyclic_project(&p).add(&p.scale(-one())).expanded_max_abs() < 1e-12);
            let dp = total_differential(&p).unwrap();
            assert!(cyclic_project(&dp).add(&dp.scale(-one())).expanded_max_abs() < 1e-12);
            let pd = cyclic_project(&bar_d(&c)).add(&bar_d(&p).scale(-one()));
            assert!(pd.expanded_max_abs() < 1e-12);
        }
    }

    #[test]
    fn growth_flags() {
        assert!(!growth_diagnostic(&ChainSequence { components: vec![BarChain::zero(); 5] }).super_exponential);
        let fact: Vec<f64> = (0..7).map(|n| (1..=n).map(|k| k as f64).product()).collect();
        assert!(growth_from_norms(&fact).super_exponential);
        let decay: Vec<f64> = fact.iter().enumerate().map(|(n, f)| 3f64.powi(n as i32) / f).collect();
        assert!(!growth_from_norms(&decay).super_exponential);
    }

    #[test]
    fn codifferential_of_zero_functional() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = random_chain(&mut rng, &RandomChainSpec::default());
        assert_eq!(apply_codifferential(|_| Ok(C64::new(0.0, 0.0)), &c).unwrap(), C64::new(0.0, 0.0));
    }
}
