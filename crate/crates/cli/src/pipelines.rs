//! The `index`, `props` and `mc-compare` pipelines, each producing a report.

use std::f64::consts::PI;

use anyhow::Result;
use loopint::bar::{
    bar_bprime, bar_d, cyclic_project, random_chain, random_tform, total_differential, BarChain, RandomChainSpec,
};
use loopint::bismut::{
    flux_bundle, index_via_pathintegral, localization_rhs, untwisted_model, BismutData, CH_KAPPA, PULLBACK_KAPPA,
};
use loopint::cache::SpectralCache;
use loopint::chern::{coclosedness_residual, integral_map_one_forms};
use loopint::clifford::build_spinor_rep;
use loopint::config::RunConfig;
use loopint::forms::{FlatTorus, ScalarForm, TForm};
use loopint::iterated::{equivariant_differential, rho_eval_lenient, DiscreteLoop, TangentField};
use loopint::operators::{build_model_cached, mckean_singer, BundleModel};
use loopint::report::{Check, Report};
use loopint::wiener::{comparison_panels, integral_i_mc, McOptions};
use loopint::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Heat times at which the McKean-Singer supertrace is reported.
pub const HEAT_TIMES: [f64; 3] = [0.5, 1.0, 2.0];
/// Tolerance of the exact algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Relative tolerance of the coclosedness residual, and the term scale below
/// which it is judged in absolute terms.
pub const COCLOSED_TOL: f64 = 1e-6;
pub const COCLOSED_SCALE_FLOOR: f64 = 1e-6;
/// Tolerance of the chain-map residual, its finite-difference step and
/// Gauss points per simplex axis.
pub const CHAINMAP_TOL: f64 = 1e-4;
pub const CHAINMAP_STEP: f64 = 1e-3;
pub const CHAINMAP_ORDER: usize = 24;
/// Floor on the standard error when forming z-scores of deterministic estimators.
pub const Z_FLOOR: f64 = 1e-9;

/// Property names accepted by `props --corrupt`.
pub const PROPERTIES: [&str; 8] = [
    "d_squared",
    "bprime_squared",
    "anticommutator",
    "total_squared",
    "cyclic_idempotent",
    "cyclic_preserved",
    "coclosed",
    "chain_map",
];

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// The periodic test potential `lambda (2 cos(2 pi y) dx - 2 sin(2 pi x) dy)`.
pub fn test_potential(lambda: f64) -> Result<BundleModel> {
    let a = ScalarForm::monomial(2, 1, &[0], &[0, 1], C64::new(lambda, 0.0))
        .add(&ScalarForm::monomial(2, 1, &[0], &[0, -1], C64::new(lambda, 0.0)))?
        .add(&ScalarForm::monomial(2, 1, &[1], &[1, 0], C64::new(0.0, lambda)))?
        .add(&ScalarForm::monomial(2, 1, &[1], &[-1, 0], C64::new(0.0, -lambda)))?;
    Ok(BundleModel::line_with_potential(&a)?)
}

pub fn cmd_index(cfg: &RunConfig, cache: Option<&SpectralCache>) -> Result<Report> {
    let mut r = Report::new("index", cfg);
    let rep = build_spinor_rep(2)?;
    let b = flux_bundle(cfg.flux, cfg.levels, cfg.background)?;
    let base = untwisted_model(&b, cfg.lambda, &rep, cache)?;
    let twisted = build_model_cached(&b, cfg.lambda, &rep, cache)?;
    let unit = build_model_cached(&BundleModel::magnetic(1, cfg.levels), cfg.lambda, &rep, cache)?;
    r.fingerprints.insert("untwisted".into(), base.hash.clone());
    r.fingerprints.insert("twisted".into(), twisted.hash.clone());
    r.fingerprints.insert("calibration".into(), unit.hash.clone());

    // one-time calibration: the supertrace of the flux-1 model is the unit index
    let calibration = mckean_singer(&unit, 1.0)?.re;
    let data = BismutData { bundle: b.clone(), n_max: cfg.n_max, max_len: cfg.max_len };
    let path = index_via_pathintegral(&base, &data, cfg.quad)?;
    let loc = localization_rhs(&b)?;
    let mut spectral = Vec::new();
    for t in HEAT_TIMES {
        let v = mckean_singer(&twisted, t)?;
        r.check(Check::within(format!("mckean_singer_t{t}"), v.re / calibration, cfg.flux as f64, cfg.tol_spectral));
        spectral.push((t, pair(v)));
    }
    let ms1 = mckean_singer(&twisted, 1.0)?;
    r.check(Check::within("pathintegral_vs_mckean_singer", path.value().re, ms1.re, cfg.tol_index));
    r.check(Check::within("pathintegral_vs_localization", path.value().re, loc.re, cfg.tol_index));
    r.check(Check::bounded("pathintegral_imaginary_part", path.value().im.abs(), cfg.tol_index));
    r.result("bundle", b.describe());
    r.result("index_via_pathintegral", pair(path.value()));
    r.result("per_n", &path.per_n);
    r.result("growth", &path.growth);
    r.result("tail_estimate", path.tail_estimate);
    r.result("mckean_singer", spectral);
    r.result("localization_rhs", pair(loc));
    r.result(
        "calibration",
        serde_json::json!({
            "str_flux_one": calibration,
            "ch_kappa": pair(CH_KAPPA),
            "pullback_kappa": pair(PULLBACK_KAPPA),
            "a_hat": 1.0,
        }),
    );

    if cfg.potential != 0.0 {
        let pb = test_potential(cfg.potential)?;
        let pbase = untwisted_model(&pb, cfg.lambda, &rep, cache)?;
        let ptw = build_model_cached(&pb, cfg.lambda, &rep, cache)?;
        r.fingerprints.insert("potential_twisted".into(), ptw.hash.clone());
        let pd = BismutData { bundle: pb.clone(), n_max: cfg.n_max, max_len: cfg.max_len };
        let pp = index_via_pathintegral(&pbase, &pd, cfg.quad)?;
        let pms = mckean_singer(&ptw, 1.0)?;
        let ploc = localization_rhs(&pb)?;
        r.check(Check::within("potential_pathintegral_vs_mckean_singer", pp.value().re, pms.re, cfg.tol_index));
        r.check(Check::within("potential_pathintegral_vs_localization", pp.value().re, ploc.re, cfg.tol_index));
        r.result(
            "potential_panel",
            serde_json::json!({
                "amplitude": cfg.potential,
                "per_n": pp.per_n,
                "index_via_pathintegral": pair(pp.value()),
                "mckean_singer": pair(pms),
                "localization_rhs": pair(ploc),
            }),
        );
    }
    Ok(r)
}

fn chain_norm(c: &BarChain) -> f64 {
    c.pruned().expanded_max_abs()
}

fn diff(a: &BarChain, b: &BarChain) -> BarChain {
    a.add(&b.scale(C64::new(-1.0, 0.0)))
}

/// A smooth winding loop and three tangent fields along it.
pub fn test_loop(grid: usize) -> Result<(DiscreteLoop, Vec<TangentField>)> {
    let lp = DiscreteLoop::from_fn(FlatTorus::new(2)?, grid, vec![1, 0], |t| {
        vec![t + 0.1 * (2.0 * PI * t).sin(), 0.3 + 0.2 * (2.0 * PI * t).cos()]
    })?;
    let u = TangentField::from_fn(&lp, |t| vec![(2.0 * PI * t).cos(), 0.5])?;
    let v = TangentField::from_fn(&lp, |t| vec![0.2, (2.0 * PI * t).sin()])?;
    let w = TangentField::from_fn(&lp, |t| vec![(4.0 * PI * t).sin(), 0.7])?;
    Ok((lp, vec![u, v, w]))
}

/// Random cyclic word of length at most `max_len` with slot degrees up to 3.
pub fn random_cyclic_word(rng: &mut ChaCha8Rng, max_len: usize) -> BarChain {
    let len = rng.gen_range(1..=max_len);
    let w: Vec<TForm> = (0..len)
        .map(|_| {
            let deg = rng.gen_range(0..=3);
            random_tform(rng, 2, (1, 6), deg, 2)
        })
        .collect();
    cyclic_project(&BarChain::word(C64::new(1.0, 0.0), w))
}

pub fn cmd_props(cfg: &RunConfig, corrupt: Option<&str>, cache: Option<&SpectralCache>) -> Result<Report> {
    if let Some(p) = corrupt {
        anyhow::ensure!(PROPERTIES.contains(&p), "unknown property '{p}'; expected one of {PROPERTIES:?}");
    }
    let mut r = Report::new("props", cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let spec = RandomChainSpec::default();
    let mut worst = [0.0f64; 6];
    for _ in 0..cfg.cases {
        let c = random_chain(&mut rng, &spec);
        let dc = bar_d(&c);
        let bc = bar_bprime(&c)?;
        // each corruption swaps in a quantity that should not vanish
        let dd = bar_d(&dc);
        let dd = if corrupt == Some("d_squared") { dd.add(&dc) } else { dd };
        worst[0] = worst[0].max(chain_norm(&dd));
        let bb = bar_bprime(&bc)?;
        let bb = if corrupt == Some("bprime_squared") { bb.add(&bc) } else { bb };
        worst[1] = worst[1].max(chain_norm(&bb));
        let sign = if corrupt == Some("anticommutator") { -1.0 } else { 1.0 };
        let anti = bar_d(&bc).add(&bar_bprime(&dc)?.scale(C64::new(sign, 0.0)));
        worst[2] = worst[2].max(chain_norm(&anti));
        let t = total_differential(&c)?;
        let tt = total_differential(&t)?;
        let tt = if corrupt == Some("total_squared") { tt.add(&t) } else { tt };
        worst[3] = worst[3].max(chain_norm(&tt));
        let p = cyclic_project(&c);
        let pp = if corrupt == Some("cyclic_idempotent") { p.scale(C64::new(2.0, 0.0)) } else { cyclic_project(&p) };
        worst[4] = worst[4].max(chain_norm(&diff(&pp, &p)));
        let tp = total_differential(&p)?;
        let ptp = if corrupt == Some("cyclic_preserved") { total_differential(&c)? } else { cyclic_project(&tp) };
        worst[5] = worst[5].max(chain_norm(&diff(&ptp, &tp)));
    }
    for (name, w) in PROPERTIES[..6].iter().zip(worst) {
        r.check(Check::bounded(*name, w, ALGEBRA_TOL));
    }

    let rep = build_spinor_rep(2)?;
    let m = build_model_cached(&BundleModel::flat_trivial(2, 1)?, cfg.lambda.max(3), &rep, cache)?;
    r.fingerprints.insert("flat".into(), m.hash.clone());
    let coclosed_cases = cfg.cases.div_ceil(5);
    let mut worst_rel: f64 = 0.0;
    for _ in 0..coclosed_cases {
        let len = rng.gen_range(1..=3);
        let w: Vec<TForm> = (0..len)
            .map(|_| {
                let deg = rng.gen_range(0..=3);
                random_tform(&mut rng, 2, (1, 4), deg, 3)
            })
            .collect();
        let c = cyclic_project(&BarChain::word(C64::new(1.0, 0.0), w));
        let c = if corrupt == Some("coclosed") { BarChain::word(C64::new(1.0, 0.0), c.terms[0].1.clone()) } else { c };
        let res = coclosedness_residual(&m, &c, cfg.quad)?;
        worst_rel = worst_rel.max(res.normalized(COCLOSED_SCALE_FLOOR));
    }
    r.check(Check::bounded("coclosed", worst_rel, COCLOSED_TOL));

    let (lp, tangents) = test_loop(64)?;
    let mut worst_cm: f64 = 0.0;
    let mut scale_cm: f64 = 0.0;
    for _ in 0..cfg.cases.div_ceil(20) {
        let c = random_cyclic_word(&mut rng, 3);
        for k in 0..=tangents.len() {
            let tg = &tangents[..k];
            let lhs = equivariant_differential(&c, &lp, tg, CHAINMAP_STEP, CHAINMAP_ORDER)?;
            let image = bar_d(&c).scale(C64::new(-1.0, 0.0)).add(&bar_bprime(&c)?);
            // the corrupted variant uses the literal `d_T + b'` on the right
            let image = if corrupt == Some("chain_map") { total_differential(&c)? } else { image };
            let rhs = rho_eval_lenient(&image, &lp, tg, CHAINMAP_ORDER)?;
            worst_cm = worst_cm.max((lhs - rhs).norm());
            scale_cm = scale_cm.max(rhs.norm());
        }
    }
    r.check(Check::bounded("chain_map", worst_cm, CHAINMAP_TOL));
    r.result("chain_map_scale", scale_cm);
    r.result("cases", cfg.cases);
    r.result("coclosed_cases", coclosed_cases);
    r.result("corrupted", corrupt);
    Ok(r)
}

pub fn cmd_mc_compare(cfg: &RunConfig, cache: Option<&SpectralCache>) -> Result<Report> {
    let mut r = Report::new("mc-compare", cfg);
    let rep = build_spinor_rep(2)?;
    let torus = FlatTorus::new(2)?;
    let m = build_model_cached(&BundleModel::flat_trivial(2, 1)?, cfg.lambda.max(3), &rep, cache)?;
    r.fingerprints.insert("flat".into(), m.hash.clone());
    let opts = McOptions { samples: cfg.samples, grid: cfg.grid, seed: cfg.seed, max_stderr: cfg.max_stderr };
    let mut rows = Vec::new();
    for (name, forms) in comparison_panels() {
        let op = integral_map_one_forms(&m, &forms, cfg.quad)?;
        let est = integral_i_mc(&rep, &torus, &forms, &opts)?;
        let z = est.z_score(op, Z_FLOOR);
        let check = Check::bounded(format!("z_{name}"), z, cfg.z_max);
        r.check(if est.inconclusive { check.inconclusive() } else { check });
        rows.push(serde_json::json!({
            "panel": name,
            "operator": pair(op),
            "estimate": est,
            "z": z,
        }));
    }
    r.result("panels", rows);
    Ok(r)
}
