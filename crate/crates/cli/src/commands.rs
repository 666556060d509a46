//! Subcommand implementations. Each returns the text for stdout.

use std::fmt::Write as _;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tempograd::automata::{emit_dot, emit_hoa, run_lasso, translate_fragment, EpsPolicy, Ldba};
use tempograd::envs::{AnyEnv, Env, EnvConfig};
use tempograd::ltl::{eval_lasso, parse_ltl, Formula, LassoTrace};
use tempograd::trainer::{
    eval_satisfaction, grad_first, read_snapshot, rollout_discrete, rollout_soft, train,
    write_snapshot, PolicyConfig, Task, TrainConfig,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{csv_string, write_atomic, write_csv};
use crate::svg::{render, Panel, Series};
use crate::trace_file::parse_trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Hoa,
    Dot,
    Csv,
    Svg,
}

pub const SWEEP_COLUMNS: [&str; 6] = ["a", "psat", "ret_discrete", "ret_soft", "grad", "grad_std"];
pub const TRAIN_COLUMNS: [&str; 4] = ["iteration", "mean_return", "grad_norm", "wallclock_s"];

fn parse_formula(text: &str) -> Result<(Formula, Ldba), CliError> {
    let f = parse_ltl(text).map_err(|e| CliError::Validation(e.to_string()))?;
    let a = translate_fragment(&f).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok((f, a))
}

fn out_dir(cfg: &RunConfig, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// State, edge and acceptance counts plus per-state label transitions.
pub fn automaton_stats(a: &Ldba) -> String {
    let edges: usize = a.states.iter().map(|s| s.edges.len()).sum();
    let accepting = (0..a.num_states()).filter(|&q| a.is_accepting(q)).count();
    let live = a.live_states();
    let mut s = String::new();
    let _ = writeln!(s, "aps: {}", a.num_aps());
    let _ = writeln!(s, "states: {}", a.num_states());
    let _ = writeln!(s, "edges: {edges}");
    let _ = writeln!(s, "accepting: {accepting}");
    let _ = writeln!(s, "live states: {}", live.len());
    for q in live {
        let _ = writeln!(s, "  state {q}: {} label transitions", a.label_transitions(q));
    }
    s
}

pub fn translate(
    formula: &str,
    out: Option<&Path>,
    format: Option<Format>,
) -> Result<String, CliError> {
    let (_, a) = parse_formula(formula)?;
    let mut text = automaton_stats(&a);
    let want = |f: Format| format.is_none() || format == Some(f);
    match out {
        Some(dir) => {
            if want(Format::Hoa) {
                let p = dir.join("automaton.hoa");
                write_atomic(&p, emit_hoa(&a).as_bytes())?;
                let _ = writeln!(text, "wrote {}", p.display());
            }
            if want(Format::Dot) {
                let p = dir.join("automaton.dot");
                write_atomic(&p, emit_dot(&a).as_bytes())?;
                let _ = writeln!(text, "wrote {}", p.display());
            }
        }
        None => match format {
            Some(Format::Hoa) => text = emit_hoa(&a),
            Some(Format::Dot) => text = emit_dot(&a),
            _ => {}
        },
    }
    Ok(text)
}

fn verdict(f: &Formula, a: &Ldba, t: &LassoTrace, name: &str) -> Result<bool, CliError> {
    let sem = eval_lasso(&f.root, t).map_err(|e| CliError::Validation(e.to_string()))?;
    let run = run_lasso(a, t, &EpsPolicy::Search);
    if sem != run {
        return Err(CliError::Runtime(format!(
            "{name}: semantics says {} but the automaton says {}",
            word(sem),
            word(run)
        )));
    }
    Ok(sem)
}

fn word(b: bool) -> &'static str {
    if b {
        "satisfied"
    } else {
        "violated"
    }
}

/// Random lasso with prefix length at most 4 and cycle length 1 to 3.
pub fn random_lasso(rng: &mut impl Rng, num_aps: usize) -> LassoTrace {
    let top = 1u32 << num_aps;
    let prefix_len = rng.gen_range(0..=4);
    let cycle_len = rng.gen_range(1..=3);
    let prefix = (0..prefix_len).map(|_| rng.gen_range(0..top)).collect();
    let cycle = (0..cycle_len).map(|_| rng.gen_range(0..top)).collect();
    LassoTrace::new(prefix, cycle)
}

pub fn check(
    formula: &str,
    traces: &[PathBuf],
    random: usize,
    seed: u64,
) -> Result<String, CliError> {
    let (f, a) = parse_formula(formula)?;
    let names = f.ap_names();
    let mut text = String::new();
    for path in traces {
        let body = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let t = parse_trace(&body, &names)?;
        let name = path.display().to_string();
        let _ = writeln!(text, "{name}: {}", word(verdict(&f, &a, &t, &name)?));
    }
    if random > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sat = 0;
        for i in 0..random {
            let t = random_lasso(&mut rng, names.len());
            sat += verdict(&f, &a, &t, &format!("random trace {i}"))? as usize;
        }
        let _ = writeln!(
            text,
            "random: {random} traces agree ({sat} satisfied, {} violated)",
            random - sat
        );
    }
    if traces.is_empty() && random == 0 {
        return Err(CliError::Usage("check: give a trace file or --random N".into()));
    }
    Ok(text)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub a: f64,
    pub psat: f64,
    pub ret_discrete: f64,
    pub ret_soft: f64,
    pub grad: f64,
    pub grad_std: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, v.sqrt())
}

fn starts(env: &AnyEnv, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..n).map(|_| env.initial_state(rng)).collect()
}

/// One row per constant action on the configured grid.
pub fn sweep_rows(cfg: &RunConfig, seed: u64) -> Result<Vec<SweepRow>, CliError> {
    let task = cfg.task()?;
    if task.env.spec().action_dim() != 1 {
        return Err(CliError::Validation(format!(
            "config error at 'env': sweep needs a 1-dimensional action, '{}' has {}",
            task.env.spec().name,
            task.env.spec().action_dim()
        )));
    }
    let train_cfg = &cfg.train;
    let reward = train_cfg.reward()?;
    let mut rows = Vec::new();
    for a in cfg.sweep.grid() {
        // Same seed per grid point so rows differ only through `a`.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let policy = task.make_policy(&PolicyConfig::Constant { init: vec![a] }, seed);
        let est = eval_satisfaction(
            &task,
            &policy,
            train_cfg.eval_episodes,
            train_cfg.eval_horizon,
            &mut rng,
        );
        let s0s = starts(&task.env, train_cfg.rollouts, &mut rng);
        let mut disc = Vec::new();
        let mut soft = Vec::new();
        let mut grads = Vec::new();
        for s0 in &s0s {
            disc.push(rollout_discrete(&task, &policy, s0, &reward, train_cfg.horizon, None).ret);
            let theta = policy.params.clone();
            soft.push(
                rollout_soft(&task, &policy, &theta, s0, &reward, train_cfg.horizon, None)?.ret,
            );
            grads.push(grad_first(&task, &policy, std::slice::from_ref(s0), train_cfg)?.grad[0]);
        }
        let (grad, grad_std) = mean_std(&grads);
        rows.push(SweepRow {
            a,
            psat: est.psat,
            ret_discrete: mean_std(&disc).0,
            ret_soft: mean_std(&soft).0,
            grad,
            grad_std,
        });
    }
    Ok(rows)
}

pub fn sweep_svg(rows: &[SweepRow], band: Option<(f64, f64)>) -> String {
    let pts = |f: fn(&SweepRow) -> f64| rows.iter().map(|r| (r.a, f(r))).collect::<Vec<_>>();
    let line = |label: &str, color, points, dashed| Series {
        label: label.to_string(),
        color,
        points,
        dashed,
    };
    let panel = |title: &str, y: &str, series| Panel {
        title: title.to_string(),
        x_label: "deceleration a".to_string(),
        y_label: y.to_string(),
        series,
        band,
    };
    render(&[
        panel(
            "satisfaction probability",
            "psat",
            vec![line("psat", "black", pts(|r| r.psat), false)],
        ),
        panel(
            "LTL return",
            "return",
            vec![
                line("discrete", "#d62728", pts(|r| r.ret_discrete), false),
                line("differentiable", "#1f77b4", pts(|r| r.ret_soft), true),
            ],
        ),
        panel(
            "return gradient",
            "dG/da",
            vec![
                line("mean", "#1f77b4", pts(|r| r.grad), false),
                line("+1 std", "#7f7f7f", pts(|r| r.grad + r.grad_std), true),
                line("-1 std", "#7f7f7f", pts(|r| r.grad - r.grad_std), true),
            ],
        ),
    ])
}

pub fn sweep(
    cfg: &RunConfig,
    seed: u64,
    out: Option<&Path>,
    format: Option<Format>,
) -> Result<String, CliError> {
    let rows = sweep_rows(cfg, seed)?;
    let dir = out_dir(cfg, out);
    let mut text = csv_string(&SWEEP_COLUMNS, &rows)?;
    if format.is_none() || format == Some(Format::Csv) {
        let p = dir.join("sweep.csv");
        write_csv(&p, &SWEEP_COLUMNS, &rows)?;
        let _ = writeln!(text, "wrote {}", p.display());
    }
    if format.is_none() || format == Some(Format::Svg) {
        let band = matches!(cfg.env, EnvConfig::Parking(_)).then_some((2.5, 5.0));
        let p = dir.join("sweep.svg");
        write_atomic(&p, sweep_svg(&rows, band).as_bytes())?;
        let _ = writeln!(text, "wrote {}", p.display());
    }
    Ok(text)
}

fn with_seed(cfg: &RunConfig, seed: Option<u64>) -> TrainConfig {
    let mut t = cfg.train.clone();
    if let Some(s) = seed {
        t.seed = s;
    }
    t
}

pub fn train_cmd(cfg: &RunConfig, seed: Option<u64>, out: Option<&Path>) -> Result<String, CliError> {
    let train_cfg = with_seed(cfg, seed);
    let task = cfg.task()?;
    let init = task.make_policy(&cfg.policy, train_cfg.seed);
    task.check_policy(&init)?;
    let result = train(&task, init, &train_cfg)?;
    let dir = out_dir(cfg, out);
    let log = dir.join("train_log.csv");
    write_csv(&log, &TRAIN_COLUMNS, &result.log)?;
    let mut snap = Vec::new();
    write_snapshot(&mut snap, &result.final_policy, train_cfg.seed)?;
    let snap_path = dir.join("policy.snap");
    write_atomic(&snap_path, &snap)?;

    let mut text = String::new();
    if let Some(last) = result.log.last() {
        let _ = writeln!(
            text,
            "iterations: {}\nfinal mean return: {:.6}\nbest mean return: {:.6}",
            result.log.len(),
            last.mean_return,
            result.best_return
        );
    }
    if result.final_policy.params.len() <= 8 {
        let _ = writeln!(text, "final params: {:?}", result.final_policy.params);
    }
    let _ = writeln!(text, "wrote {}\nwrote {}", log.display(), snap_path.display());
    Ok(text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub psat: f64,
    pub approximate_episodes: usize,
    pub episodes: usize,
    pub ret_discrete: f64,
    pub ret_soft: f64,
}

pub fn eval_report(
    task: &Task<AnyEnv>,
    policy: &tempograd::trainer::Policy,
    cfg: &TrainConfig,
) -> Result<EvalReport, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let est = eval_satisfaction(task, policy, cfg.eval_episodes, cfg.eval_horizon, &mut rng);
    let reward = cfg.reward()?;
    let s0s = starts(&task.env, cfg.eval_episodes, &mut rng);
    let mut disc = Vec::new();
    let mut soft = Vec::new();
    for s0 in &s0s {
        disc.push(rollout_discrete(task, policy, s0, &reward, cfg.horizon, None).ret);
        soft.push(rollout_soft(task, policy, &policy.params, s0, &reward, cfg.horizon, None)?.ret);
    }
    Ok(EvalReport {
        psat: est.psat,
        approximate_episodes: est.approximate_episodes,
        episodes: est.episodes,
        ret_discrete: mean_std(&disc).0,
        ret_soft: mean_std(&soft).0,
    })
}

pub fn eval_cmd(cfg: &RunConfig, seed: Option<u64>, snapshot: &Path) -> Result<String, CliError> {
    let train_cfg = with_seed(cfg, seed);
    let task = cfg.task()?;
    let file = std::fs::File::open(snapshot)
        .map_err(|e| CliError::Validation(format!("{}: {e}", snapshot.display())))?;
    let (policy, _) = read_snapshot(BufReader::new(file))?;
    task.check_policy(&policy)?;
    let r = eval_report(&task, &policy, &train_cfg)?;
    Ok(format!(
        "psat: {:.6}\napproximate episodes: {}/{}\nmean discrete return: {:.6}\nmean soft return: {:.6}\n",
        r.psat, r.approximate_episodes, r.episodes, r.ret_discrete, r.ret_soft
    ))
}
