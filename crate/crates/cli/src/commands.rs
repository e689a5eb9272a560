use std::fmt::Write as _;
use std::path::Path;

use evosoft::complexity::{bipartite_incidence, build_ctm_table, tokenize, ComplexityReport, CtmTable};
use evosoft::depgraph::{scan_tree, LangProfile};
use evosoft::distfit::{
    empirical_ccdf, fit_dgbd, fit_exponential, fit_powerlaw_mle, fit_weibull, ks_distance, loglik_ratio_exp_vs_powerlaw,
    scan_kmin,
};
use evosoft::eco::{integrate_competition, run_lattice, LatticeParams};
use evosoft::fds::{fixation_fraction, invasion_barrier, run_fds, stasis_fraction, DEFAULT_WINDOW};
use evosoft::growth::{classify_regime, grow_network, meanfield_avg_degree, GrowthParams};
use evosoft::motif::{enumerate_subgraphs, frequency_rank, motif_zscores, rank_csv, sample_subgraphs};
use evosoft::stats::spearman;
use evosoft::temporal::{inter_event_times, inter_event_times_by_entity, pool, weibull_vs_exponential, EventLog};
use evosoft::{CompetitionParams, CompetitionTrajectory, DirectedGraph, FdsParams, PowerLawFit};
use serde_json::{Map, Value};

use crate::args::*;
use crate::error::{CliError, Result};

/// Files to write and the fields of the summary line.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Output {
    pub files: Vec<(String, String)>,
    pub summary: Map<String, Value>,
    /// Seed recorded when the parameters do not carry one.
    pub seed: Option<u64>,
}

impl Output {
    pub fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.insert(key.to_string(), v.into());
    }
}

/// `NaN` and infinities become `null`.
pub(crate) fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Last column of each non-empty, non-`#` line; a first line that does not
/// parse is taken as a header.
pub fn parse_column(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut seen_row = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or("").trim();
        match field.parse::<f64>() {
            Ok(x) if x.is_finite() => out.push(x),
            _ if !seen_row => {}
            _ => {
                return Err(evosoft::Error::Parse { line: i + 1, msg: format!("bad number {field:?}") }.into());
            }
        }
        seen_row = true;
    }
    Ok(out)
}

fn parse_list(flag: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("--{flag}: bad number {t:?}"))))
        .collect()
}

fn read_graph(path: &Path) -> Result<DirectedGraph> {
    Ok(DirectedGraph::from_edge_list(&read_text(path)?)?)
}

pub(crate) fn results_csv(rows: &[(&str, f64)]) -> String {
    let mut s = String::from("quantity,value\n");
    for (k, v) in rows {
        let _ = writeln!(s, "{k},{v}");
    }
    s
}

pub(crate) fn ccdf_csv(samples: &[f64], header: &str) -> Result<String> {
    let mut s = format!("{header}\n");
    for (x, p) in empirical_ccdf(samples)? {
        let _ = writeln!(s, "{x},{p}");
    }
    Ok(s)
}

pub fn grow(a: &GrowArgs) -> Result<Output> {
    let mut params = GrowthParams::new(a.m, a.p, a.q, a.n, a.seed);
    if let Some(n0) = a.n0 {
        params.n0 = n0;
    }
    params.validate()?;
    let (g, traj) = grow_network(&params)?;
    let mut out = Output::default();
    out.file("edges.txt", g.to_edge_list());
    out.file("trajectory.csv", traj.to_csv());
    let (m, n, n0) = (a.m as f64, a.n as f64, params.n0 as f64);
    out.set("nodes", g.node_count());
    out.set("edges", g.edge_count());
    out.set("avg_degree", num(g.average_degree()?));
    out.set("meanfield_avg_degree", num(meanfield_avg_degree(m, a.p, a.q, n, n0, n0 - 1.0)));
    out.set("regime", serde_json::to_value(classify_regime(a.m, a.q)).expect("regime serializes"));
    Ok(out)
}

pub fn degfit(a: &DegfitArgs) -> Result<Output> {
    if a.kmin == Some(0) || a.kmin_max == 0 {
        return Err(evosoft::Error::InvalidParam("k_min must be at least 1".into()).into());
    }
    let g = read_graph(&a.input)?;
    let (din, dout) = g.degrees();
    let k: Vec<f64> = match a.which {
        Which::In => din,
        Which::Out => dout,
    }
    .into_iter()
    .map(|d| d as f64)
    .collect();
    let fit: PowerLawFit = match a.kmin {
        Some(kmin) => fit_powerlaw_mle(&k, f64::from(kmin))?,
        None => {
            let candidates: Vec<f64> = (1..=a.kmin_max).map(f64::from).collect();
            scan_kmin(&k, &candidates, a.min_tail)?
        }
    };
    let tail: Vec<f64> = k.iter().copied().filter(|&x| x >= fit.k_min).collect();
    let ks = ks_distance(&tail, |x| fit.discrete_ccdf(x));
    let llr = loglik_ratio_exp_vs_powerlaw(&k, fit.k_min)?;

    let mut csv = String::from("k,empirical,powerlaw\n");
    for (x, p) in empirical_ccdf(&tail)? {
        let _ = writeln!(csv, "{x},{p},{}", fit.discrete_ccdf(x));
    }
    let mut out = Output::default();
    out.file("ccdf.csv", csv);
    out.set("gamma", num(fit.gamma));
    out.set("stderr", num(fit.stderr));
    out.set("k_min", num(fit.k_min));
    out.set("n_tail", fit.n_tail);
    out.set("ks", num(ks));
    out.set("llr_exp_vs_powerlaw", num(llr));
    Ok(out)
}

pub fn motifs(a: &MotifsArgs) -> Result<Output> {
    let g = read_graph(&a.input)?;
    let census = match a.samples {
        Some(n) => sample_subgraphs(&g, a.k, n, a.seed)?,
        None => enumerate_subgraphs(&g, a.k)?,
    };
    let ranks = frequency_rank(&census)?;
    let mut out = Output::default();
    out.file("ranks.csv", rank_csv(&ranks));
    if a.null > 0 {
        let z = motif_zscores(&g, a.k, a.null, a.seed)?;
        let mut csv = String::from("code,edges,observed,null_mean,null_std,z\n");
        for c in &z.classes {
            let zs = c.z.map_or(String::new(), |v| v.to_string());
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{zs}",
                c.class.code,
                c.class.edge_count(),
                c.observed,
                c.null_mean,
                c.null_std
            );
        }
        out.file("zscores.csv", csv);
    }
    let freq: Vec<f64> = ranks.iter().map(|r| r.frequency).collect();
    let edges: Vec<f64> = ranks.iter().map(|r| f64::from(r.class.edge_count())).collect();
    out.set("k", a.k);
    out.set("classes", ranks.len());
    out.set("subgraphs", census.total);
    out.set("exact", census.exact);
    out.set("spearman_frequency_edges", spearman(&freq, &edges).map_or(Value::Null, num));
    Ok(out)
}

pub fn extract(a: &ExtractArgs) -> Result<Output> {
    let profile = match &a.profile_json {
        Some(p) => serde_json::from_str::<LangProfile>(&read_text(p)?)
            .map_err(|source| CliError::Json { path: p.display().to_string(), source })?,
        None => LangProfile::builtin(&a.profile).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown profile {:?}; built-in profiles: {}",
                a.profile,
                LangProfile::builtin_names().join(", ")
            ))
        })?,
    };
    let rep = scan_tree(&a.root, &profile, a.external)?;
    let mut out = Output::default();
    out.file("edges.txt", rep.graph.to_edge_list());
    out.file("labels.csv", rep.labels_csv());
    out.file("unresolved.csv", rep.unresolved_csv());
    out.set("profile", profile.name.clone());
    out.set("files", rep.labels.len() - rep.external_count);
    out.set("externals", rep.external_count);
    out.set("edges", rep.graph.edge_count());
    out.set("unresolved", rep.unresolved.len());
    out.set("skipped", rep.skipped.len());
    Ok(out)
}

pub fn compete(a: &CompeteArgs) -> Result<Output> {
    let rho0 = parse_list("rho0", &a.rho0)?;
    let mu = match &a.mu {
        Some(s) => parse_list("mu", s)?,
        None => vec![1.0; rho0.len()],
    };
    if a.every == 0 {
        return Err(evosoft::Error::InvalidParam("every must be at least 1".into()).into());
    }
    let params = CompetitionParams { mu, dt: a.dt, steps: a.steps };
    let traj = integrate_competition(&params, &rho0)?;
    let drift = traj
        .states
        .iter()
        .map(|s| (s.rho.iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    let keep = |i: usize| i.is_multiple_of(a.every) || i + 1 == traj.states.len();
    let thinned = CompetitionTrajectory {
        times: traj.times.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, t)| *t).collect(),
        states: traj.states.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, s)| s.clone()).collect(),
    };
    let last = traj.last();
    let winner = (0..last.rho.len()).max_by(|&i, &j| last.rho[i].total_cmp(&last.rho[j])).unwrap_or(0);
    let mut out = Output::default();
    out.file("trajectory.csv", thinned.to_csv());
    out.set("t_end", num(*traj.times.last().unwrap_or(&0.0)));
    out.set("winner", winner);
    out.set("final_rho", last.rho.iter().map(|&x| num(x)).collect::<Vec<_>>());
    out.set("max_simplex_drift", num(drift));
    Ok(out)
}

pub fn lattice(a: &LatticeArgs) -> Result<Output> {
    let params = LatticeParams {
        side: a.side,
        capacity: a.capacity,
        innovation_rate: a.innovation_rate,
        steps: a.steps,
        seed: a.seed,
        initial_languages: a.initial_languages,
    };
    params.validate()?;
    let run = run_lattice(&params)?;
    let mut out = Output::default();
    out.file("diversity.csv", run.diversity_csv());
    out.file("rank.csv", run.rank_csv());
    out.set("final_diversity", run.final_state.diversity());
    out.set("capacity", a.capacity);
    let counts: Vec<f64> = run.rank_popularity.iter().map(|&c| c as f64).collect();
    match fit_dgbd(&counts) {
        Ok(f) => {
            out.set("dgbd_a", num(f.a));
            out.set("dgbd_b", num(f.b));
            out.set("dgbd_r2", num(f.r2));
        }
        Err(e) => log::info!("no DGBD fit: {e}"),
    }
    Ok(out)
}

pub fn fds(a: &FdsArgs) -> Result<Output> {
    let params = FdsParams {
        beta: a.beta,
        j: a.j,
        n: a.n,
        innovation_rate: a.innovation_rate,
        delta_z: a.delta_z,
        generations: a.generations,
        seed: a.seed,
    };
    params.validate()?;
    let run = run_fds(&params)?;
    let mut out = Output::default();
    out.file("trajectory.csv", run.trajectory_csv());
    out.file("events.csv", run.events_csv());
    out.set("barrier", invasion_barrier(a.j, a.beta, a.n).map_or(Value::Null, |b| num(b.value)));
    out.set("punctuations", run.events.len());
    out.set("final_mean_z", num(*run.mean_z.last().unwrap_or(&0.0)));
    let stasis = stasis_fraction(&run.mean_z, DEFAULT_WINDOW, a.delta_z / 2.0);
    out.set("stasis_fraction", stasis.map_or(Value::Null, num));
    if a.fixation_events > 0 {
        out.set("fixation_fraction", num(fixation_fraction(&params, a.fixation_events)?));
    }
    Ok(out)
}

pub fn dgbd(a: &DgbdArgs) -> Result<Output> {
    let mut values = parse_column(&read_text(&a.input)?)?;
    values.sort_by(|x, y| y.total_cmp(x));
    let fit = fit_dgbd(&values)?;
    let mut csv = String::from("rank,observed,predicted\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(csv, "{},{v},{}", i + 1, fit.predict(i + 1));
    }
    let mut out = Output::default();
    out.file("fit.csv", csv);
    out.set("A", num(fit.amplitude));
    out.set("a", num(fit.a));
    out.set("b", num(fit.b));
    out.set("R", fit.max_rank);
    out.set("r2", num(fit.r2));
    Ok(out)
}

pub(crate) fn weibull_samples_output(samples: &[f64]) -> Result<Output> {
    let mut out = Output::default();
    weibull_output(samples, &mut out)?;
    Ok(out)
}

fn weibull_output(samples: &[f64], out: &mut Output) -> Result<()> {
    let cmp = weibull_vs_exponential(samples)?;
    let w = fit_weibull(samples)?;
    let e = fit_exponential(samples)?;
    let mut csv = String::from("t,empirical,weibull,exponential\n");
    for (t, p) in empirical_ccdf(samples)? {
        let _ = writeln!(csv, "{t},{p},{},{}", w.ccdf(t), e.ccdf(t));
    }
    out.file("ccdf.csv", csv);
    if let Value::Object(m) = serde_json::to_value(cmp).expect("comparison serializes") {
        for (k, v) in m {
            out.summary.insert(k, v);
        }
    }
    Ok(())
}

pub fn weibull(a: &WeibullArgs) -> Result<Output> {
    weibull_samples_output(&parse_column(&read_text(&a.input)?)?)
}

pub fn complexity(a: &ComplexityArgs) -> Result<Output> {
    let input = std::fs::read(&a.input).map_err(|e| CliError::io(&a.input, e))?;
    let mut out = Output::default();
    let table = match &a.table {
        Some(p) => CtmTable::from_csv(a.w, a.t, &read_text(p)?)?,
        None => {
            let t = build_ctm_table(a.w, a.t)?;
            out.file("ctm.csv", t.to_csv());
            t
        }
    };
    let report = ComplexityReport::compute(&input, a.mode, &table)?;
    if a.incidence {
        let text = String::from_utf8_lossy(&input);
        let lines = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| tokenize(l.as_bytes(), a.mode))
            .collect::<evosoft::Result<Vec<_>>>()?;
        let inc = bipartite_incidence(&lines)?;
        out.file("incidence.csv", inc.to_csv());
        out.set("symbols", inc.columns.len());
    }
    out.set("bdm_bits", num(report.bdm_bits));
    out.set("lz78_phrases", report.lz78_phrases);
    out.set("ttr", num(report.ttr));
    out.set("input_bytes", input.len());
    Ok(out)
}

pub fn temporal(a: &TemporalArgs) -> Result<Output> {
    let log = EventLog::from_csv(&read_text(&a.input)?)?;
    let mut out = Output::default();
    let mut csv;
    let samples = match a.group_by {
        GroupBy::None => {
            let s = inter_event_times(&log)?;
            csv = String::from("gap\n");
            for g in &s.samples {
                let _ = writeln!(csv, "{g}");
            }
            s
        }
        GroupBy::Entity => {
            let groups = inter_event_times_by_entity(&log)?;
            csv = String::from("entity,gap\n");
            for (k, s) in &groups {
                for g in &s.samples {
                    let _ = writeln!(csv, "{k},{g}");
                }
            }
            out.set("groups", groups.len());
            pool(&groups)
        }
    };
    out.file("gaps.csv", csv);
    out.set("events", log.len());
    out.set("zero_gaps", samples.zero_gaps);
    weibull_output(&samples.samples, &mut out)?;
    Ok(out)
}
