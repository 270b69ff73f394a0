use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, Write};

use contact_core::bounds::{
    self, exit_bound, gamma_factor, good_bound, ignite2_bounds, ignite_bounds, infect_bound, lambda2_upper,
    life2_report, life_report, push_bounds, return_report, schedule_lambda, suff_condition, survival_ub,
    transfer_bound, BoundKind, BoundReport, IgniteLevel, ScheduleFamily,
};
use contact_core::chain::{
    drift_profile, drift_profile_csv, hitting_prob_exact, hitting_prob_mc, make_params, return_prob_exact,
    return_prob_mc, supermartingale_min_k, ChainMode,
};
use contact_core::experiments::{load_config, run_experiment, OutputFormat};
use contact_core::graph::{
    complete_graph, cycle_graph, generate_config_model, generate_star, generate_star_chain, max_eigenvalue,
    path_graph, read_edge_list, sample_gw_tree, write_edge_list, DegreeDistribution, Graph, OffspringDistribution,
};
use contact_core::rng::replica_rng;
use contact_core::sim::{
    self as sim, simulate_observed, simulate_star, simulate_star_observed, SimRecord, StarState, StopCondition,
    TrajectorySampler,
};
use contact_core::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{
    BoundsArgs, ChainArgs, ChainModeArg, ChainTask, CurveArgs, EigArgs, ExperimentArgs, ExponentsArgs, Format,
    GenArgs, GraphArgs, GraphKind, Lemma, SimulateArgs,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(io::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        if self.exit_code() == 1 {
            "usage"
        } else {
            "runtime"
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_usage() => 1,
            CliError::Core(_) | CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => e.fmt(f),
            CliError::Io(e) => e.fmt(f),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn need<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required flag --{flag}")))
}

fn seed_or_entropy(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn emit(out: Option<&str>, text: &str) -> Result<()> {
    match out {
        None | Some("-") => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
        Some(path) => std::fs::write(path, text)?,
    }
    Ok(())
}

fn build_graph(args: &GraphArgs, seed: u64) -> Result<(Graph, Value)> {
    if let Some(path) = &args.input {
        let file = File::open(path).map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))?;
        return Ok((read_edge_list(BufReader::new(file))?, json!({ "input": path.display().to_string() })));
    }
    let kind = need(args.graph, "graph")?;
    let mut rng = replica_rng(seed, 0);
    let graph = match kind {
        GraphKind::Star => generate_star(need(args.k, "k")?)?,
        GraphKind::StarChain => generate_star_chain(need(args.k, "k")?, need(args.r, "r")?)?,
        GraphKind::Path => path_graph(need(args.r, "r")?)?,
        GraphKind::Complete => complete_graph(need(args.n, "n")?)?,
        GraphKind::Cycle => cycle_graph(need(args.n, "n")?)?,
        GraphKind::Config => {
            let dist: DegreeDistribution = need(args.dist.as_deref(), "dist")?.parse()?;
            generate_config_model(need(args.n, "n")?, dist, &mut rng)?
        }
        GraphKind::Gw => {
            let offspring: OffspringDistribution = need(args.offspring.as_deref(), "offspring")?.parse()?;
            sample_gw_tree(offspring, need(args.budget, "budget")?, &mut rng)?.graph
        }
    };
    let meta = json!({
        "graph": format!("{kind:?}").to_lowercase(),
        "k": args.k, "r": args.r, "n": args.n, "dist": args.dist,
        "offspring": args.offspring, "budget": args.budget, "seed": seed,
    });
    Ok((graph, meta))
}

pub fn gen(a: GenArgs) -> Result<()> {
    let seed = seed_or_entropy(a.seed);
    let (g, meta) = build_graph(&a.graph, seed)?;
    let mut buf = Vec::new();
    write_edge_list(&g, &mut buf)?;
    let text = String::from_utf8(buf).expect("edge list is UTF-8");
    let (header, body) = text.split_once('\n').unwrap_or((&text, ""));
    emit(a.out.as_deref(), &format!("{header}\n# config: {meta}\n{body}"))
}

pub fn eig(a: EigArgs) -> Result<()> {
    let seed = seed_or_entropy(a.seed);
    let (g, _) = build_graph(&a.graph, seed)?;
    let value = max_eigenvalue(&g, a.tol, a.max_iters)?;
    emit(None, &format!("{value}\n"))
}

fn parse_init(raw: &str, n: usize) -> Result<Vec<usize>> {
    if raw == "all" {
        return Ok((0..n).collect());
    }
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(|_| CliError::Usage(format!("bad vertex {s:?} in --init"))))
        .collect()
}

pub fn simulate(a: SimulateArgs) -> Result<()> {
    let seed = seed_or_entropy(a.seed);
    let mut stops = vec![StopCondition::Extinction];
    if let Some(h) = a.horizon {
        stops.push(StopCondition::TimeHorizon(h));
    }
    if let Some(v) = a.target {
        stops.push(StopCondition::VertexInfected(v));
    }
    if let Some(m) = a.at_least {
        stops.push(StopCondition::InfectedCountAtLeast(m));
    }
    if let Some(m) = a.at_most {
        stops.push(StopCondition::InfectedCountAtMost(m));
    }
    if let Some(m) = a.leaves_at_least {
        stops.push(StopCondition::LeavesAtLeast(m));
    }
    if let Some(m) = a.leaves_at_most {
        stops.push(StopCondition::LeavesAtMost(m));
    }
    let stop = StopCondition::FirstOf(stops);
    if a.replicas == 0 {
        return Err(CliError::Usage("--replicas must be >= 1".into()));
    }

    let (meta, records, trajectory) = if a.reduced {
        if a.graph.graph != Some(GraphKind::Star) {
            return Err(CliError::Usage("--reduced needs --graph star".into()));
        }
        let k = need(a.graph.k, "k")?;
        let start = match &a.start {
            None => StarState::new(0, 1),
            Some(s) => {
                let parts: Vec<usize> = s
                    .split(',')
                    .map(|x| x.trim().parse().map_err(|_| CliError::Usage(format!("bad --start {s:?}"))))
                    .collect::<Result<_>>()?;
                match parts[..] {
                    [i, j] => StarState::new(i, j),
                    _ => return Err(CliError::Usage(format!("--start needs i,j, got {s:?}"))),
                }
            }
        };
        let meta = json!({ "graph": "star", "reduced": true, "k": k, "start": [start.i, start.j] });
        let trajectory = match a.trajectory {
            Some(dt) => {
                let mut sampler = TrajectorySampler::new(dt);
                simulate_star_observed(k, a.lambda, start, &stop, &mut replica_rng(seed, 0), &mut sampler)?;
                Some(sampler.to_csv())
            }
            None => None,
        };
        let records: Vec<_> = (0..a.replicas)
            .into_par_iter()
            .map(|r| simulate_star(k, a.lambda, start, &stop, &mut replica_rng(seed, r)))
            .collect::<std::result::Result<_, Error>>()?;
        (meta, records, trajectory)
    } else {
        if a.leaves_at_least.is_some() || a.leaves_at_most.is_some() {
            return Err(CliError::Usage("leaf stop conditions need --reduced".into()));
        }
        let (g, meta) = build_graph(&a.graph, seed)?;
        let init = parse_init(&a.init, g.n_vertices())?;
        let trajectory = match a.trajectory {
            Some(dt) => {
                let mut sampler = TrajectorySampler::new(dt);
                simulate_observed(&g, a.lambda, &init, &stop, &mut replica_rng(seed, 0), &mut sampler)?;
                Some(sampler.to_csv())
            }
            None => None,
        };
        let records: Vec<_> = (0..a.replicas)
            .into_par_iter()
            .map(|r| sim::simulate(&g, a.lambda, &init, &stop, &mut replica_rng(seed, r)))
            .collect::<std::result::Result<_, Error>>()?;
        let mut meta = meta;
        meta["init"] = json!(a.init);
        (meta, records, trajectory)
    };
    let config = json!({
        "command": "simulate", "lambda": a.lambda, "seed": seed, "replicas": a.replicas,
        "stop": stop, "graph": meta,
    });
    if let Some(csv) = trajectory {
        return emit(a.out.out.as_deref(), &format!("# config: {config}\n{csv}"));
    }
    let records: Vec<SimRecord> = records
        .into_iter()
        .enumerate()
        .map(|(r, outcome)| SimRecord { outcome, seed, replica: r as u64 })
        .collect();
    let text = match a.out.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({ "config": config, "records": records }))
                .expect("records serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = format!("# config: {config}\nseed,replica,stop_reason,stop_time,n_events,final_infected,censored\n");
            for rec in &records {
                let o = &rec.outcome;
                let reason = serde_json::to_value(o.stop_reason).expect("reason serializes");
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    rec.seed,
                    rec.replica,
                    reason.as_str().unwrap_or_default(),
                    o.stop_time,
                    o.n_events,
                    o.final_infected,
                    o.censored
                ));
            }
            s
        }
    };
    emit(a.out.out.as_deref(), &text)
}

pub fn chain(a: ChainArgs) -> Result<()> {
    let mode = match a.mode {
        ChainModeArg::Fixed => ChainMode::FixedP,
        ChainModeArg::Small => ChainMode::SmallLambda { epsilon: need(a.epsilon, "epsilon")? },
    };
    if a.task == ChainTask::MinK {
        let text = match supermartingale_min_k(a.lambda, mode)? {
            Some(k) => format!("{k}\n"),
            None => "none\n".to_string(),
        };
        return emit(a.out.as_deref(), &text);
    }
    let params = make_params(a.lambda, need(a.k, "k")?, mode)?;
    let seed = seed_or_entropy(a.seed);
    let text = match a.task {
        ChainTask::Drift => drift_profile_csv(&drift_profile(&params, params.theta_star)?),
        ChainTask::Hitting => {
            let (start, b) = (need(a.a, "a")?, need(a.b, "b")?);
            let l = a.l.unwrap_or(params.floor_l);
            let exact = hitting_prob_exact(&params, start, b, l)?;
            let bound = exit_bound(start as f64, b as f64, a.lambda).ok();
            let mut s = String::from("a,b,l,exact,exit_bound,mc,mc_std_error,seed\n");
            let (mc, se) = if a.reps > 0 {
                let est = hitting_prob_mc(&params, start, b, l, a.reps, seed)?;
                (est.estimate.to_string(), est.std_error.to_string())
            } else {
                (String::new(), String::new())
            };
            let bound = bound.map(|x| x.to_string()).unwrap_or_default();
            s.push_str(&format!("{start},{b},{l},{exact},{bound},{mc},{se},{seed}\n"));
            s
        }
        ChainTask::Return => {
            let b = need(a.b, "b")?;
            let exact = return_prob_exact(&params, b)?;
            let bound = bounds::return_bound(b as f64, params.l, a.lambda).ok();
            let (mc, se) = if a.reps > 0 {
                let est = return_prob_mc(&params, b, a.reps, seed)?;
                (est.estimate.to_string(), est.std_error.to_string())
            } else {
                (String::new(), String::new())
            };
            let bound = bound.map(|x| x.to_string()).unwrap_or_default();
            format!("b,floor_l,exact,return_bound,mc,mc_std_error,seed\n{b},{},{exact},{bound},{mc},{se},{seed}\n", params.floor_l)
        }
        ChainTask::MinK => unreachable!(),
    };
    emit(a.out.as_deref(), &text)
}

fn single(name: &str, inputs: &[(&str, f64)], value_name: &str, kind: BoundKind, value: f64) -> BoundReport {
    BoundReport::new(name, inputs).with(value_name, kind, value)
}

fn bound_report(a: &BoundsArgs) -> Result<BoundReport> {
    let lambda = || need(a.lambda, "lambda");
    let k = || need(a.k, "k");
    let eps = a.epsilon.unwrap_or(0.0);
    Ok(match a.lemma {
        Lemma::Exit => {
            let (x, b, l) = (need(a.a, "a")?, need(a.b, "b")?, lambda()?);
            single("exit", &[("a", x), ("b", b), ("lambda", l)], "drop_before_cap", BoundKind::ProbabilityUpper, exit_bound(x, b, l)?)
        }
        Lemma::Return => return_report(k()?, lambda()?, need(a.b, "b")?)?,
        Lemma::Life => life_report(k()?, lambda()?, need(a.epsilon, "epsilon")?)?,
        Lemma::Ignite => {
            let level: IgniteLevel = a.level.as_deref().map(str::parse).transpose()?.unwrap_or_default();
            ignite_bounds(k()?, lambda()?, level)?
        }
        Lemma::Good => good_bound(k()?, lambda()?)?,
        Lemma::Survub => {
            let n = need(a.n.or(a.k), "n")?;
            let l = lambda()?;
            single("survub", &[("n", n as f64), ("lambda", l), ("epsilon", eps)], "mean_time", BoundKind::Value, survival_ub(n, l, eps)?)
        }
        Lemma::Transfer => {
            let (r, l) = (need(a.r, "r")?, lambda()?);
            single("transfer", &[("r", r as f64), ("lambda", l), ("epsilon", eps)], "reach_prob", BoundKind::ProbabilityLower, transfer_bound(r, l, eps)?)
        }
        Lemma::Infect => {
            let (r, m, l) = (need(a.r, "r")?, need(a.m, "m")?, lambda()?);
            single(
                "infect",
                &[("r", r as f64), ("m", m as f64), ("lambda", l), ("epsilon", eps)],
                "infect_prob",
                BoundKind::ProbabilityLower,
                infect_bound(r, m, l, eps)?,
            )
        }
        Lemma::Gamma => {
            let (l, ratio) = (lambda()?, a.ratio.unwrap_or(1.0));
            single("gamma", &[("lambda", l), ("ratio", ratio), ("epsilon", eps)], "gamma", BoundKind::Value, gamma_factor(l, ratio, eps)?)
        }
        Lemma::Suff => {
            let (l, p) = (lambda()?, need(a.p, "p")?);
            let s = suff_condition(l, p, eps)?;
            BoundReport::new("suff", &[("lambda", l), ("p", p), ("epsilon", eps)])
                .with("gamma", BoundKind::Value, s.value)
                .with("holds", BoundKind::Value, f64::from(u8::from(s.holds)))
        }
        Lemma::Lambda2 => {
            let p = need(a.p, "p")?;
            let u = lambda2_upper(p, eps, 1e-10)?;
            BoundReport::new("lambda2", &[("p", p), ("epsilon", eps)])
                .with("lambda2_upper", BoundKind::Value, u.value)
                .with("uncapped", BoundKind::Value, u.uncapped)
                .with("capped", BoundKind::Value, f64::from(u8::from(u.capped)))
        }
        Lemma::Life2 => life2_report(k()?, lambda()?, need(a.epsilon, "epsilon")?)?,
        Lemma::Ignite2 => ignite2_bounds(k()?, lambda()?, need(a.epsilon, "epsilon")?)?,
        Lemma::Push => {
            let (n, nu, l) = (need(a.n, "n")?, need(a.nu, "nu")?, lambda()?);
            let p = push_bounds(n, nu, l)?;
            BoundReport::new("push", &[("n", n as f64), ("nu", nu), ("lambda", l)])
                .with("kappa", BoundKind::Value, p.kappa)
                .with("ln_kappa", BoundKind::Value, p.ln_kappa)
                .with("xfer_prob", BoundKind::ProbabilityLower, p.xfer_prob)
        }
        Lemma::Schedule => {
            let n = need(a.n, "n")?;
            let family: ScheduleFamily = need(a.family.as_deref(), "family")?.parse()?;
            let s = schedule_lambda(n, family)?;
            let mut rep = BoundReport::new("schedule", &[("n", n as f64)]).with("lambda", BoundKind::Value, s.lambda);
            if let Some(t) = s.star_threshold {
                rep = rep.with("star_threshold", BoundKind::Value, t);
            }
            rep
        }
    })
}

pub fn bounds(a: BoundsArgs) -> Result<()> {
    let report = bound_report(&a)?;
    let text = match a.format {
        Some(Format::Json) => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        _ => {
            let flag = |v: bool| if v { " (vacuous)" } else { "" };
            if let [only] = &report.values[..] {
                format!("{:.3e}{}\n", only.value, flag(only.vacuous))
            } else {
                report.values.iter().map(|v| format!("{} = {:.3e}{}\n", v.name, v.value, flag(v.vacuous))).collect()
            }
        }
    };
    emit(None, &text)
}

pub fn curve(a: CurveArgs) -> Result<()> {
    let ps = bounds::grid(a.p_min, a.p_max, a.step)?;
    let rows = bounds::lambda2_curve(&ps, a.epsilon, a.tol)?;
    emit(a.out.as_deref(), &bounds::curve_csv(&rows))
}

pub fn exponents(a: ExponentsArgs) -> Result<()> {
    let alphas = bounds::grid(a.alpha_min, a.alpha_max, a.step)?;
    let rows = bounds::critical_exponent_curves(&alphas)?;
    emit(a.out.as_deref(), &bounds::exponents_csv(&rows))
}

/// `--key value` and `--key=value` pairs into config overrides.
fn parse_overrides(rest: &[String]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = rest.iter();
    while let Some(tok) = it.next() {
        let key = tok
            .strip_prefix("--")
            .ok_or_else(|| CliError::Usage(format!("unexpected argument {tok:?}; config keys are passed as --key value")))?;
        match key.split_once('=') {
            Some((k, v)) => out.push((k.to_string(), v.to_string())),
            None => {
                let v = it.next().ok_or_else(|| CliError::Usage(format!("flag --{key} needs a value")))?;
                out.push((key.to_string(), v.clone()));
            }
        }
    }
    Ok(out)
}

pub fn experiment(a: ExperimentArgs) -> Result<()> {
    let (id, rest) = match a.rest.split_first() {
        Some((first, tail)) if !first.starts_with('-') => (Some(first), tail),
        _ => (None, a.rest.as_slice()),
    };
    let mut overrides = parse_overrides(rest)?;
    // Known flags that follow an unknown one land in `rest`.
    let mut config_path = a.config.clone();
    if let Some(i) = overrides.iter().position(|(k, _)| k == "config") {
        config_path = Some(overrides.remove(i).1.into());
    }
    if let Some(id) = id {
        overrides.insert(0, ("experiment".into(), id.clone()));
    }
    if let Some(seed) = a.seed {
        overrides.push(("seed".into(), seed.to_string()));
    }
    if let Some(f) = a.out.format {
        overrides.push(("format".into(), format!("{f:?}").to_lowercase()));
    }
    if let Some(o) = &a.out.out {
        overrides.push(("out".into(), o.clone()));
    }
    let config = load_config(config_path.as_deref(), &overrides)?;
    let format = config.format.unwrap_or(OutputFormat::Csv);
    let out = config.out.clone();
    let output = run_experiment(config)?;
    emit(out.as_deref(), &output.render(format))
}
