//! One function per subcommand: read params, run, and describe the result.

use serde::Serialize;
use serde_json::{json, Value};

use super::params::Params;
use super::{Command, ExperimentConfig, Outcome, Source, Table};
use crate::adversarial::{
    build_shells, default_shell_count, distinguishing_experiment, sample_dno, sample_dyes,
    shattering_experiment, typicality_check, DistinguishConfig, TypicalityConfig,
};
use crate::convex::lemmas::{check_appendix_lemmas, check_boundary_volume_on_polytopes, LemmaConfig};
use crate::convex::{check_ball_theorem, TargetSet, TargetSpec};
use crate::error::{Error, Result};
use crate::gauss::{gaussian_point, norm, normal_interval_mass, radial_band_mass, LowerBoundParams};
use crate::grid::{build_grid, generate_cover, CoverMode, GridParams, DEFAULT_COVER_CAP};
use crate::one_sided::{verify_certificate, OneSidedConfig, OneSidedTester};
use crate::rng;
use crate::two_sided::{ggr_test, TwoSidedConfig};

/// Largest per-run sample budget the one-sided tester will try to draw.
pub const MAX_SAMPLE_BUDGET: u64 = 1 << 30;

pub(crate) fn keys(command: Command) -> &'static [&'static str] {
    match command {
        Command::TestOneSided => &[
            "target", "n", "eps", "ell", "nprime", "cube_cap", "samples", "runs", "guarded",
        ],
        Command::TestTwoSided => &[
            "target",
            "n",
            "eps",
            "delta",
            "ell",
            "nprime",
            "cube_cap",
            "cover_cap",
            "cover_mode",
            "learn_samples",
            "estimate_samples",
            "two_stage",
            "test_constant",
        ],
        Command::GenDyes => &["n", "halfspaces", "r"],
        Command::GenDno => &["n", "shells", "halfspaces", "r"],
        Command::Distinguish => &[
            "n",
            "q",
            "halfspaces",
            "r",
            "trials",
            "points",
            "typical_attempts",
            "mc_budget",
            "bootstrap",
            "lower_exp",
            "upper_exp",
            "pair_exp",
        ],
        Command::Shatter => &["n", "m", "trials"],
        Command::Typicality => &[
            "n",
            "q",
            "points",
            "halfspaces",
            "r",
            "mc_budget",
            "lower_exp",
            "upper_exp",
            "pair_exp",
        ],
        Command::BoundaryVolume => &["n", "k", "alpha", "polytopes", "samples"],
        Command::BallTheorem => &["target", "h", "samples"],
        Command::AppendixLemmas => &[
            "lemma",
            "n",
            "rho",
            "beta",
            "alpha",
            "width",
            "half_extent",
            "samples",
            "family",
            "points",
        ],
        Command::Cover => &["n", "eps", "ell", "nprime", "cube_cap", "cover_cap", "mode"],
    }
}

pub(crate) fn dispatch(config: &ExperimentConfig) -> Result<Outcome> {
    let mut p = Params::new(config.command.name(), &config.params, keys(config.command));
    let seed = config.seed;
    match config.command {
        Command::TestOneSided => test_one_sided(p, seed),
        Command::TestTwoSided => test_two_sided(p, seed),
        Command::GenDyes => gen_dyes(p, seed),
        Command::GenDno => gen_dno(p, seed),
        Command::Distinguish => distinguish(p, seed),
        Command::Shatter => {
            let n = p.req_usize("n");
            let m = p.req_usize("m");
            let trials = p.u64("trials").unwrap_or(1000);
            p.finish()?;
            let rep = shattering_experiment(n, m, trials, seed)?;
            Ok(Outcome::new(to_value(&rep)))
        }
        Command::Typicality => typicality(p, seed),
        Command::BoundaryVolume => boundary_volume(p, seed),
        Command::BallTheorem => ball_theorem(p, seed),
        Command::AppendixLemmas => appendix_lemmas(config, seed),
        Command::Cover => cover(p),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

/// Parses `target` and checks it against `n` when both are present.
fn target(p: &mut Params, n: Option<usize>) -> Option<(TargetSpec, TargetSet)> {
    let spec: TargetSpec = p.req_json("target")?;
    match spec.build() {
        Ok(t) => {
            if let Some(n) = n {
                if t.dim() != n {
                    p.error(format!("target has dimension {}, but n = {n}", t.dim()));
                }
            }
            Some((spec, t))
        }
        Err(e) => {
            p.error(format!("key \"target\": {e}"));
            None
        }
    }
}

fn grid_overrides(p: &mut Params) -> (Option<f64>, Option<f64>, Option<u64>) {
    (p.f64("ell"), p.f64("nprime"), p.u64("cube_cap"))
}

fn record_grid(out: &mut Outcome, g: &GridParams, cube_cap: Option<u64>) {
    let src = |o: bool| if o { Source::Override } else { Source::Default };
    out.derive("ell", g.ell, src(g.ell_overridden));
    out.derive("n_prime", g.n_prime, src(g.n_prime_overridden));
    out.derive("cube_cap", g.cube_cap, src(cube_cap.is_some()));
}

fn record_lower_bound(out: &mut Outcome, lb: &LowerBoundParams) {
    let src = |o: bool| if o { Source::Override } else { Source::Default };
    out.derive("N", lb.halfspaces, src(lb.halfspaces_overridden));
    out.derive("q", lb.queries, src(lb.queries_overridden));
    out.derive("r", lb.r, src(lb.r_overridden));
    out.derive(
        "alpha",
        lb.alpha,
        if lb.alpha_clamped {
            Source::Clamped
        } else {
            Source::Default
        },
    );
    out.derive("beta", lb.beta, Source::Default);
}

fn test_one_sided(mut p: Params, seed: u64) -> Result<Outcome> {
    let n = p.req_usize("n");
    let eps = p.req_f64("eps");
    let tgt = target(&mut p, Some(n));
    let (ell, nprime, cube_cap) = grid_overrides(&mut p);
    let samples = p.u64("samples");
    let runs = p.usize("runs");
    let guarded = p.bool("guarded").unwrap_or(false);
    p.finish()?;
    let (_, target) = tgt.expect("validated");

    let gp = GridParams::with_overrides(n, eps, ell, nprime, cube_cap)?;
    let grid = build_grid(&gp)?;
    let mut cfg = OneSidedConfig::new(&grid);
    let default_s = cfg.s as u64;
    if samples.is_none() && default_s > MAX_SAMPLE_BUDGET {
        return Err(Error::Infeasible {
            what: "sample budget",
            count: default_s as f64,
            cap: MAX_SAMPLE_BUDGET,
        });
    }
    if let Some(s) = samples {
        cfg.s = s as usize;
    }
    if let Some(r) = runs {
        cfg.runs = r;
    }
    if guarded {
        cfg = cfg.with_guarded_threshold();
    }
    let (covered, ball) = grid.coverage();
    let cubes = grid.len();

    let mut out = Outcome::default();
    record_grid(&mut out, &gp, cube_cap);
    let src = |o: bool| if o { Source::Override } else { Source::Default };
    out.derive("s", cfg.s, src(samples.is_some()));
    out.derive("runs", cfg.runs, src(runs.is_some()));
    out.derive("reject_threshold", cfg.reject_threshold, src(cfg.threshold_overridden));

    let tester = OneSidedTester::new(cfg)?;
    let verdict = tester.run_a_prime(&target, seed)?;
    let check = verdict
        .certificate
        .as_ref()
        .map(|c| verify_certificate(c, &target, &gp));
    out.metrics = json!({
        "verdict": verdict,
        "certificate_check": check,
        "cubes": cubes,
        "grid_mass": covered,
        "ball_mass": ball,
        "boundary_mass_bound": gp.boundary_mass_bound(),
    });
    Ok(out)
}

fn test_two_sided(mut p: Params, seed: u64) -> Result<Outcome> {
    let n = p.req_usize("n");
    let eps = p.req_f64("eps");
    let delta = p.req_f64("delta");
    let tgt = target(&mut p, Some(n));
    let (ell, nprime, cube_cap) = grid_overrides(&mut p);
    let cover_cap = p.u64("cover_cap");
    let cover_mode: Option<CoverMode> = p.json("cover_mode");
    let learn_samples = p.usize("learn_samples");
    let estimate_samples = p.usize("estimate_samples");
    let two_stage = p.bool("two_stage");
    let test_constant = p.f64("test_constant");
    p.finish()?;
    let (_, target) = tgt.expect("validated");

    let gp = GridParams::with_overrides(n, eps, ell, nprime, cube_cap)?;
    let mut cfg = TwoSidedConfig::new(eps, delta);
    cfg.learn.cover_subset_cap = cover_cap.unwrap_or(DEFAULT_COVER_CAP);
    cfg.learn.cover_mode = cover_mode.unwrap_or(CoverMode::Full);
    cfg.learn.learn_samples = learn_samples;
    cfg.learn.estimate_samples = estimate_samples;
    cfg.learn.two_stage = two_stage.unwrap_or(false);
    if let Some(c) = test_constant {
        cfg.test_constant = c;
    }
    let v = ggr_test(&target, &cfg, &gp, seed)?;

    let mut out = Outcome::default();
    record_grid(&mut out, &gp, cube_cap);
    let src = |o: bool| if o { Source::Override } else { Source::Default };
    out.derive("cover_cap", cfg.learn.cover_subset_cap, src(cover_cap.is_some()));
    out.derive("learn_samples", v.learn.learn_samples, src(learn_samples.is_some()));
    out.derive("test_samples", v.test_samples, src(test_constant.is_some()));
    out.derive("threshold", v.threshold, Source::Default);
    out.metrics = json!({
        "decision": v.decision,
        "disagreement": v.disagreement,
        "threshold": v.threshold,
        "test_samples": v.test_samples,
        "learn_samples": v.learn.learn_samples,
        "estimate_samples": v.learn.estimate_samples,
        "candidates_scored": v.learn.candidates_scored,
        "hypothesis_index": v.learn.hypothesis_index,
        "empirical_error": v.learn.empirical_error,
        "hypothesis": v.learn.hypothesis,
    });
    Ok(out)
}

fn lower_bound_overrides(p: &mut Params) -> (Option<usize>, Option<f64>) {
    (p.usize("halfspaces"), p.f64("r"))
}

fn gen_dyes(mut p: Params, seed: u64) -> Result<Outcome> {
    let n = p.req_usize("n");
    let (halfspaces, r) = lower_bound_overrides(&mut p);
    p.finish()?;
    let lb = LowerBoundParams::with_overrides(n, halfspaces, None, r)?;
    let poly = sample_dyes(n, lb.halfspaces, lb.r, seed)?;
    let mut out = Outcome::default();
    record_lower_bound(&mut out, &lb);
    let mut columns = vec!["j".to_string()];
    columns.extend((1..=n).map(|i| format!("y{i}")));
    out.table = Some(Table {
        columns,
        rows: poly
            .normals
            .iter()
            .enumerate()
            .map(|(j, y)| {
                std::iter::once(json!(j))
                    .chain(y.iter().map(|v| json!(v)))
                    .collect()
            })
            .collect(),
    });
    out.metrics = json!({ "polytope": poly });
    Ok(out)
}

fn gen_dno(mut p: Params, seed: u64) -> Result<Outcome> {
    let n = p.req_usize("n");
    let shells = p.usize("shells");
    let (halfspaces, r) = lower_bound_overrides(&mut p);
    p.finish()?;
    let lb = LowerBoundParams::with_overrides(n, halfspaces, None, r)?;
    let m = shells.unwrap_or_else(|| default_shell_count(n));
    let b = build_shells(n, m)?;
    let rho = lb.rho();
    let part = sample_dno(&b, |t| rho.eval(t), seed);
    let mut out = Outcome::default();
    record_lower_bound(&mut out, &lb);
    out.derive(
        "M",
        m,
        if shells.is_some() {
            Source::Override
        } else {
            Source::Default
        },
    );
    out.table = Some(Table {
        columns: ["shell", "t", "mass", "rho", "included"].map(String::from).to_vec(),
        rows: (1..=m)
            .map(|i| {
                vec![
                    json!(i),
                    json!(b.t[i]),
                    json!(b.shell_mass(i)),
                    json!(part.rho_at_boundaries[i - 1]),
                    json!(part.included[i - 1]),
                ]
            })
            .collect(),
    });
    out.metrics = json!({
        "partition": part,
        "is_convex": part.is_convex(),
        "included": part.included.iter().filter(|b| **b).count(),
    });
    Ok(out)
}

fn typicality_exps(p: &mut Params) -> TypicalityConfig {
    let d = TypicalityConfig::default();
    TypicalityConfig {
        lower_exp: p.f64("lower_exp").unwrap_or(d.lower_exp),
        upper_exp: p.f64("upper_exp").unwrap_or(d.upper_exp),
        pair_exp: p.f64("pair_exp").unwrap_or(d.pair_exp),
    }
}

fn distinguish(mut p: Params, seed: u64) -> Result<Outcome> {
    let n = p.req_usize("n");
    let q = p.usize("q");
    let (halfspaces, r) = lower_bound_overrides(&mut p);
    let trials = p.u64("trials");
    let points: Option<Vec<Vec<f64>>> = p.json("points");
    let attempts = p.usize("typical_attempts");
    let mc_budget = p.u64("mc_budget");
    let bootstrap = p.usize("bootstrap");
    let typ = typicality_exps(&mut p);
    p.finish()?;
    let halfspaces = match halfspaces {
        Some(h) => h,
        None => crate::gauss::default_halfspaces(n)?,
    };
    let q = match q {
        Some(q) => q,
        None => crate::gauss::default_queries(n)?,
    };
    let mut cfg = DistinguishConfig::new(n, q, halfspaces, trials.unwrap_or(10_000), seed);
    cfg.r = r;
    cfg.points = points;
    cfg.typicality = typ;
    if let Some(a) = attempts {
        cfg.typical_attempts = a;
    }
    if let Some(m) = mc_budget {
        cfg.mc_budget = m;
    }
    if let Some(b) = bootstrap {
        cfg.bootstrap = b;
    }
    let rep = distinguishing_experiment(&cfg)?;
    let mut out = Outcome::default();
    record_lower_bound(&mut out, &rep.params);
    out.table = Some(Table {
        columns: ["point", "radius", "rho", "frequency", "z_score"].map(String::from).to_vec(),
        rows: rep
            .marginals
            .iter()
            .enumerate()
            .map(|(i, m)| vec![json!(i), json!(m.radius), json!(m.rho), json!(m.frequency), json!(m.z_score)])
            .collect(),
    });
    out.metrics = to_value(&rep);
    Ok(out)
}

fn typicality(mut p: Params, seed: u64) -> Result<Outcome> {
    let n = p.req_usize("n");
    let q = p.usize("q");
    let points: Option<Vec<Vec<f64>>> = p.json("points");
    let (halfspaces, r) = lower_bound_overrides(&mut p);
    let mc_budget = p.u64("mc_budget").unwrap_or(100_000);
    let typ = typicality_exps(&mut p);
    if q.is_some() && points.is_some() {
        p.error("give either q or points, not both");
    }
    p.finish()?;
    let lb = LowerBoundParams::with_overrides(n, halfspaces, q, r)?;
    let points = match points {
        Some(pts) => pts,
        None => {
            let mut s = rng::stream(seed, 0);
            (0..lb.queries).map(|_| gaussian_point(&mut s, n)).collect()
        }
    };
    let rep = typicality_check(
        &points,
        &lb.cap_table(),
        lb.r,
        mc_budget,
        typ,
        rng::split_seed(seed, 1),
    )?;
    let mut out = Outcome::default();
    record_lower_bound(&mut out, &lb);
    out.table = Some(Table {
        columns: ["point", "radius", "fsa"].map(String::from).to_vec(),
        rows: points
            .iter()
            .zip(&rep.fsa)
            .enumerate()
            .map(|(i, (z, f))| vec![json!(i), json!(norm(z)), json!(f)])
            .collect(),
    });
    out.metrics = json!({ "points": points, "report": rep });
    Ok(out)
}

fn boundary_volume(mut p: Params, seed: u64) -> Result<Outcome> {
    let n = p.req_usize("n");
    let k = p.f64("k");
    let alpha = p.f64("alpha");
    let polytopes = p.usize("polytopes").unwrap_or(20);
    let samples = p.u64("samples").unwrap_or(100_000);
    p.finish()?;
    let nf = n as f64;
    let k_v = k.unwrap_or(2.0 * nf.sqrt());
    let alpha_v = alpha.unwrap_or(0.1 * nf.powf(-0.75));
    let rep = check_boundary_volume_on_polytopes(n, k_v, alpha_v, polytopes, samples, seed)?;
    let mut out = Outcome::default();
    let src = |o: bool| if o { Source::Override } else { Source::Default };
    out.derive("K", k_v, src(k.is_some()));
    out.derive("alpha", alpha_v, src(alpha.is_some()));
    out.table = Some(Table {
        columns: ["polytope", "estimate", "std_error", "bound", "within"].map(String::from).to_vec(),
        rows: rep
            .estimates
            .iter()
            .enumerate()
            .map(|(i, e)| {
                vec![json!(i), json!(e.estimate), json!(e.std_error), json!(rep.bound), json!(e.within_bound(n))]
            })
            .collect(),
    });
    out.metrics = to_value(&rep);
    Ok(out)
}

/// `Vol(C_h \ C) / h` where it has a closed form: one halfspace, or a ball
/// centred at the origin.
pub fn ball_theorem_exact(spec: &TargetSpec, h: f64) -> Option<f64> {
    match spec {
        TargetSpec::Halfspaces { normals, offsets } if normals.len() == 1 => {
            let b = offsets[0] / norm(&normals[0]);
            Some(normal_interval_mass(b, b + h) / h)
        }
        TargetSpec::Ball { center, radius } if center.iter().all(|c| *c == 0.0) => {
            Some(radial_band_mass(center.len(), *radius, radius + h) / h)
        }
        _ => None,
    }
}

fn ball_theorem(mut p: Params, seed: u64) -> Result<Outcome> {
    let tgt = target(&mut p, None);
    let h = p.f64("h").unwrap_or(0.01);
    let samples = p.u64("samples").unwrap_or(1_000_000);
    p.finish()?;
    let (spec, target) = tgt.expect("validated");
    if !target.is_convex() {
        return Err(Error::param("ball-theorem needs a convex target"));
    }
    let check = check_ball_theorem(&target, h, samples, seed)?;
    let exact = ball_theorem_exact(&spec, h);
    let mut out = Outcome::default();
    out.derive("h", h, Source::Default);
    out.metrics = json!({
        "check": check,
        "exact_ratio": exact,
        "exact_z": exact.map(|e| (check.ratio - e) / check.std_error.max(f64::MIN_POSITIVE)),
    });
    Ok(out)
}

fn appendix_lemmas(config: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    let lemma = config.params.get("lemma").and_then(Value::as_str).unwrap_or("");
    let allowed: &[&str] = match lemma {
        "no_ball" => &["lemma", "n", "rho", "alpha", "width", "half_extent", "samples"],
        "shrink" => &["lemma", "n", "rho", "alpha", "family", "points"],
        "thicken" => &["lemma", "n", "beta", "alpha", "family", "points"],
        _ => &["lemma"],
    };
    let mut p = Params::new("appendix-lemmas", &config.params, allowed);
    if !matches!(lemma, "no_ball" | "shrink" | "thicken") {
        p.error("key \"lemma\": expected one of no_ball, shrink, thicken");
    }
    p.finish()?;
    let mut obj = serde_json::Map::new();
    for (k, v) in &config.params {
        obj.insert(k.clone(), v.clone());
    }
    obj.insert("seed".into(), json!(seed));
    let cfg: LemmaConfig =
        serde_json::from_value(Value::Object(obj)).map_err(|e| Error::Validation(vec![e.to_string()]))?;
    let rep = check_appendix_lemmas(&cfg)?;
    Ok(Outcome::new(to_value(&rep)))
}

fn cover(mut p: Params) -> Result<Outcome> {
    let n = p.req_usize("n");
    let eps = p.req_f64("eps");
    let (ell, nprime, cube_cap) = grid_overrides(&mut p);
    let cover_cap = p.u64("cover_cap");
    let mode: Option<CoverMode> = p.json("mode");
    p.finish()?;
    let gp = GridParams::with_overrides(n, eps, ell, nprime, cube_cap)?;
    let grid = build_grid(&gp)?;
    let elements = generate_cover(
        &grid,
        cover_cap.unwrap_or(DEFAULT_COVER_CAP),
        mode.unwrap_or(CoverMode::Full),
    )?;
    let mut out = Outcome::default();
    record_grid(&mut out, &gp, cube_cap);
    out.derive(
        "cover_cap",
        cover_cap.unwrap_or(DEFAULT_COVER_CAP),
        if cover_cap.is_some() {
            Source::Override
        } else {
            Source::Default
        },
    );
    out.table = Some(Table {
        columns: ["element", "cubes"].map(String::from).to_vec(),
        rows: elements
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let cubes = match e {
                    TargetSpec::CubeHull { cubes, .. } => cubes
                        .iter()
                        .map(|c| c.iter().map(i64::to_string).collect::<Vec<_>>().join(";"))
                        .collect::<Vec<_>>()
                        .join("|"),
                    _ => String::new(),
                };
                vec![json!(i), json!(cubes)]
            })
            .collect(),
    });
    out.metrics = json!({
        "cubes": grid.len(),
        "elements": elements.len(),
    });
    Ok(out)
}
