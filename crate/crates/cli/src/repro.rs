//! Named experiments with pinned seeds. Each recipe returns typed results
//! so tests can check them, and renders them as artifacts for the CLI.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use evosoft::complexity::{bdm, build_ctm_table, lz78_phrase_count, tokenize, TokenMode, TokenStream};
use evosoft::distfit::{dgbd, fit_dgbd, loglik_ratio_exp_vs_powerlaw, scan_kmin};
use evosoft::eco::{run_lattice, LatticeParams};
use evosoft::fds::{fixation_fraction, invasion_barrier, run_fds, stasis_fraction, DEFAULT_WINDOW};
use evosoft::growth::{grow_network, meanfield_avg_degree, GrowthParams, GrowthTrajectory};
use evosoft::motif::{enumerate_subgraphs, frequency_rank, RankEntry};
use evosoft::rng::{seeded, substream};
use evosoft::stats::{linear_fit, spearman};
use evosoft::{synth, DgbdFit, DirectedGraph, FdsParams, FdsRun, LineFit, PowerLawFit};
use rand::Rng;
use rayon::prelude::*;

use crate::commands::{ccdf_csv, num, results_csv, Output};
use crate::error::{CliError, Result};

pub const EXPERIMENTS: [&str; 7] =
    ["fig2a", "fig2b", "fig2d", "dgbd-lattice", "fds-punctuation", "weibull-alpha", "imitation-bdm"];

pub fn run(name: &str) -> Result<Output> {
    match name {
        "fig2a" => Ok(fig2a()?.output()),
        "fig2b" => Ok(fig2b()?.output()),
        "fig2d" => Ok(fig2d()?.output()),
        "dgbd-lattice" => Ok(dgbd_lattice()?.output()),
        "fds-punctuation" => Ok(fds_punctuation()?.output()),
        "weibull-alpha" => weibull_alpha(),
        "imitation-bdm" => Ok(imitation_bdm()?.output()),
        other => Err(CliError::Usage(format!("unknown experiment {other:?}; expected one of {}", EXPERIMENTS.join(", ")))),
    }
}

pub const ENSEMBLE_REPLICATES: u64 = 20;
pub const ENSEMBLE_N: usize = 10_000;

/// Growth replicates with seeds `0..replicates`, in seed order.
pub fn ensemble(m: usize, p: f64, q: f64, n: usize, replicates: u64) -> Result<Vec<(DirectedGraph, GrowthTrajectory)>> {
    (0..replicates)
        .into_par_iter()
        .map(|seed| grow_network(&GrowthParams::new(m, p, q, n, seed)))
        .collect::<evosoft::Result<Vec<_>>>()
        .map_err(Into::into)
}

fn to_f64(v: Vec<usize>) -> Vec<f64> {
    v.into_iter().map(|d| d as f64).collect()
}

#[derive(Debug, Clone)]
pub struct Fig2a {
    /// KS-scanned fit of the pooled in-degrees.
    pub pooled_in: PowerLawFit,
    pub per_replicate_in: Vec<PowerLawFit>,
    /// Exponential-over-power-law log-likelihood ratio of out-degrees (k >= 1).
    pub llr_out: Vec<f64>,
    pub in_degrees: Vec<f64>,
    pub out_degrees: Vec<f64>,
}

pub const KMIN_SCAN_MAX: u32 = 50;
pub const KMIN_MIN_TAIL: usize = 100;

fn kmin_candidates() -> Vec<f64> {
    (1..=KMIN_SCAN_MAX).map(f64::from).collect()
}

/// Critical-regime degree statistics: `m = p = q = 1`, 20 replicates of 10⁴ nodes.
pub fn fig2a() -> Result<Fig2a> {
    let runs = ensemble(1, 1.0, 1.0, ENSEMBLE_N, ENSEMBLE_REPLICATES)?;
    let mut in_degrees = Vec::new();
    let mut out_degrees = Vec::new();
    let mut per_replicate_in = Vec::new();
    let mut llr_out = Vec::new();
    for (g, _) in &runs {
        let (din, dout) = g.degrees();
        let (din, dout) = (to_f64(din), to_f64(dout));
        per_replicate_in.push(scan_kmin(&din, &kmin_candidates(), KMIN_MIN_TAIL)?);
        llr_out.push(loglik_ratio_exp_vs_powerlaw(&dout, 1.0)?);
        in_degrees.extend(din);
        out_degrees.extend(dout);
    }
    let pooled_in = scan_kmin(&in_degrees, &kmin_candidates(), KMIN_MIN_TAIL)?;
    Ok(Fig2a { pooled_in, per_replicate_in, llr_out, in_degrees, out_degrees })
}

impl Fig2a {
    pub fn exponential_wins(&self) -> usize {
        self.llr_out.iter().filter(|&&x| x > 0.0).count()
    }

    pub fn output(&self) -> Output {
        let mut out = Output { seed: Some(0), ..Default::default() };
        let mut rep = String::from("seed,gamma_in,k_min_in,llr_out_exp_vs_powerlaw\n");
        for (i, (f, l)) in self.per_replicate_in.iter().zip(&self.llr_out).enumerate() {
            let _ = writeln!(rep, "{i},{},{},{l}", f.gamma, f.k_min);
        }
        out.file("replicates.csv", rep);
        out.file("in_degree_ccdf.csv", ccdf_csv(&self.in_degrees, "k,ccdf").expect("non-empty"));
        out.file("out_degree_ccdf.csv", ccdf_csv(&self.out_degrees, "k,ccdf").expect("non-empty"));
        let f = &self.pooled_in;
        out.file(
            "results.csv",
            results_csv(&[
                ("gamma", f.gamma),
                ("gamma_stderr", f.stderr),
                ("k_min", f.k_min),
                ("n_tail", f.n_tail as f64),
                ("out_exponential_wins", self.exponential_wins() as f64),
                ("replicates", self.llr_out.len() as f64),
            ]),
        );
        out.set("gamma", num(f.gamma));
        out.set("gamma_stderr", num(f.stderr));
        out.set("k_min", num(f.k_min));
        out.set("out_exponential_wins", self.exponential_wins());
        out.set("replicates", self.llr_out.len());
        out
    }
}

#[derive(Debug, Clone)]
pub struct MotifRanking {
    pub label: String,
    pub ranks: Vec<RankEntry>,
    /// Spearman correlation between class frequency and class edge count.
    pub rho: f64,
}

pub const CENSUS_N: usize = 300;
pub const CENSUS_REPLICATES: u64 = 5;

/// Pooled exact 4-node census over growth replicates with seeds `0..replicates`.
pub fn pooled_census(m: usize, p: f64, q: f64, n: usize, replicates: u64) -> Result<MotifRanking> {
    let censuses = ensemble(m, p, q, n, replicates)?
        .par_iter()
        .map(|(g, _)| enumerate_subgraphs(g, 4))
        .collect::<evosoft::Result<Vec<_>>>()?;
    let mut pooled = censuses[0].clone();
    pooled.counts = BTreeMap::new();
    pooled.total = 0;
    for c in censuses {
        for (k, v) in c.counts {
            *pooled.counts.entry(k).or_default() += v;
        }
        pooled.total += c.total;
    }
    let ranks = frequency_rank(&pooled)?;
    let freq: Vec<f64> = ranks.iter().map(|r| r.frequency).collect();
    let edges: Vec<f64> = ranks.iter().map(|r| f64::from(r.class.edge_count())).collect();
    let rho = spearman(&freq, &edges)?;
    Ok(MotifRanking { label: format!("m{m}_p{p}_q{q}"), ranks, rho })
}

#[derive(Debug, Clone)]
pub struct Fig2b {
    /// Critical growth, `m = p = q = 1`.
    pub critical: MotifRanking,
    /// `m = 2, p = q = 0.5`, which populates many more classes.
    pub mixed: MotifRanking,
}

pub fn fig2b() -> Result<Fig2b> {
    Ok(Fig2b {
        critical: pooled_census(1, 1.0, 1.0, CENSUS_N, CENSUS_REPLICATES)?,
        mixed: pooled_census(2, 0.5, 0.5, CENSUS_N, CENSUS_REPLICATES)?,
    })
}

fn ranking_csv(r: &MotifRanking) -> String {
    let mut s = String::from("rank,code,edges,count,frequency\n");
    for e in &r.ranks {
        let _ = writeln!(s, "{},{},{},{},{}", e.rank, e.class.code, e.class.edge_count(), e.count, e.frequency);
    }
    s
}

impl Fig2b {
    pub fn output(&self) -> Output {
        let mut out = Output { seed: Some(0), ..Default::default() };
        out.file("ranks_critical.csv", ranking_csv(&self.critical));
        out.file("ranks_mixed.csv", ranking_csv(&self.mixed));
        out.file(
            "results.csv",
            results_csv(&[
                ("spearman_critical", self.critical.rho),
                ("classes_critical", self.critical.ranks.len() as f64),
                ("spearman_mixed", self.mixed.rho),
                ("classes_mixed", self.mixed.ranks.len() as f64),
            ]),
        );
        out.set("spearman_critical", num(self.critical.rho));
        out.set("classes_critical", self.critical.ranks.len());
        out.set("spearman_mixed", num(self.mixed.rho));
        out.set("classes_mixed", self.mixed.ranks.len());
        out
    }
}

#[derive(Debug, Clone)]
pub struct Fig2d {
    /// `(N, ensemble mean degree, mean-field prediction)`.
    pub points: Vec<(usize, f64, f64)>,
    /// `<K>` against `ln N` over `N in [10², 10⁴]`.
    pub fit: LineFit,
    pub mp: f64,
    /// Final mean degrees of the subcritical replicates.
    pub subcritical: Vec<f64>,
    pub subcritical_plateau: f64,
}

pub const FIT_RANGE: (usize, usize) = (100, 10_000);
pub const SUBCRITICAL: (usize, f64, f64) = (2, 0.4, 0.25);

pub fn fig2d() -> Result<Fig2d> {
    let runs = ensemble(1, 1.0, 1.0, ENSEMBLE_N, ENSEMBLE_REPLICATES)?;
    let first = &runs[0].1.samples;
    let mut points = Vec::with_capacity(first.len());
    for (i, pt) in first.iter().enumerate() {
        let mean = runs.iter().map(|(_, t)| t.samples[i].avg_degree()).sum::<f64>() / runs.len() as f64;
        let n0 = first[0].n as f64;
        let mf = meanfield_avg_degree(1.0, 1.0, 1.0, pt.n as f64, n0, first[0].l as f64);
        points.push((pt.n, mean, mf));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|(n, _, _)| (FIT_RANGE.0..=FIT_RANGE.1).contains(n))
        .map(|&(n, k, _)| ((n as f64).ln(), k))
        .unzip();
    let fit = linear_fit(&x, &y)?;

    let (m, p, q) = SUBCRITICAL;
    let subcritical: Vec<f64> = ensemble(m, p, q, ENSEMBLE_N, ENSEMBLE_REPLICATES)?
        .iter()
        .map(|(g, _)| g.average_degree())
        .collect::<evosoft::Result<_>>()?;
    let mf = m as f64;
    Ok(Fig2d { points, fit, mp: 1.0, subcritical, subcritical_plateau: mf * p / (1.0 - mf * q) })
}

impl Fig2d {
    pub fn subcritical_mean(&self) -> f64 {
        self.subcritical.iter().sum::<f64>() / self.subcritical.len() as f64
    }

    pub fn output(&self) -> Output {
        let mut out = Output { seed: Some(0), ..Default::default() };
        let mut csv = String::from("N,lnN,avg_degree,meanfield\n");
        for &(n, k, mf) in &self.points {
            let _ = writeln!(csv, "{n},{},{k},{mf}", (n as f64).ln());
        }
        out.file("avg_degree_vs_logN.csv", csv);
        let mut sub = String::from("seed,avg_degree\n");
        for (i, k) in self.subcritical.iter().enumerate() {
            let _ = writeln!(sub, "{i},{k}");
        }
        out.file("subcritical.csv", sub);
        out.file(
            "results.csv",
            results_csv(&[
                ("slope", self.fit.slope),
                ("intercept", self.fit.intercept),
                ("r2", self.fit.r2),
                ("mp", self.mp),
                ("subcritical_mean", self.subcritical_mean()),
                ("subcritical_plateau", self.subcritical_plateau),
            ]),
        );
        out.set("slope", num(self.fit.slope));
        out.set("r2", num(self.fit.r2));
        out.set("mp", num(self.mp));
        out.set("subcritical_mean", num(self.subcritical_mean()));
        out.set("subcritical_plateau", num(self.subcritical_plateau));
        out
    }
}

pub const DGBD_TRUE: (f64, f64) = (1.44, 0.46);
pub const DGBD_RANKS: usize = 50;
pub const DGBD_AMPLITUDE: f64 = 1000.0;
pub const DGBD_DRAWS: u64 = 100;
pub const DGBD_NOISE: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct DgbdLattice {
    pub clean: Vec<f64>,
    pub clean_fit: DgbdFit,
    /// `(a, b)` per noisy draw.
    pub noisy: Vec<(f64, f64)>,
    pub lattice_counts: Vec<f64>,
    pub lattice_fit: Option<DgbdFit>,
}

pub fn lattice_params() -> LatticeParams {
    LatticeParams { side: 32, capacity: 3, innovation_rate: 1e-3, steps: 2000, seed: 1, initial_languages: 10 }
}

pub fn dgbd_lattice() -> Result<DgbdLattice> {
    let (a, b) = DGBD_TRUE;
    let clean: Vec<f64> = (1..=DGBD_RANKS).map(|r| dgbd(DGBD_AMPLITUDE, a, b, DGBD_RANKS, r)).collect();
    let clean_fit = fit_dgbd(&clean)?;
    let noisy = (0..DGBD_DRAWS)
        .map(|i| {
            let ys = synth::lognormal_noise(&mut substream(0, i), &clean, DGBD_NOISE);
            fit_dgbd(&ys).map(|f| (f.a, f.b))
        })
        .collect::<evosoft::Result<Vec<_>>>()?;
    let run = run_lattice(&lattice_params())?;
    let lattice_counts: Vec<f64> = run.rank_popularity.iter().map(|&c| c as f64).collect();
    let lattice_fit = fit_dgbd(&lattice_counts).ok();
    Ok(DgbdLattice { clean, clean_fit, noisy, lattice_counts, lattice_fit })
}

impl DgbdLattice {
    pub fn noisy_within(&self, tol: f64) -> usize {
        let (a, b) = DGBD_TRUE;
        self.noisy.iter().filter(|(x, y)| (x - a).abs() < tol && (y - b).abs() < tol).count()
    }

    pub fn output(&self) -> Output {
        let mut out = Output { seed: Some(0), ..Default::default() };
        let mut s = String::from("rank,value,fitted\n");
        for (i, v) in self.clean.iter().enumerate() {
            let _ = writeln!(s, "{},{v},{}", i + 1, self.clean_fit.predict(i + 1));
        }
        out.file("synthetic.csv", s);
        let mut s = String::from("draw,a,b\n");
        for (i, (a, b)) in self.noisy.iter().enumerate() {
            let _ = writeln!(s, "{i},{a},{b}");
        }
        out.file("noisy_fits.csv", s);
        let mut s = String::from("rank,count,fitted\n");
        for (i, c) in self.lattice_counts.iter().enumerate() {
            let fitted = self.lattice_fit.as_ref().map_or(String::new(), |f| f.predict(i + 1).to_string());
            let _ = writeln!(s, "{},{c},{fitted}", i + 1);
        }
        out.file("lattice_rank.csv", s);
        let lat = |f: fn(&DgbdFit) -> f64| self.lattice_fit.as_ref().map_or(f64::NAN, f);
        out.file(
            "results.csv",
            results_csv(&[
                ("synthetic_a", self.clean_fit.a),
                ("synthetic_b", self.clean_fit.b),
                ("noisy_within_0.1", self.noisy_within(0.1) as f64),
                ("noisy_draws", self.noisy.len() as f64),
                ("lattice_a", lat(|f| f.a)),
                ("lattice_b", lat(|f| f.b)),
                ("lattice_r2", lat(|f| f.r2)),
            ]),
        );
        out.set("synthetic_a", num(self.clean_fit.a));
        out.set("synthetic_b", num(self.clean_fit.b));
        out.set("noisy_within_0.1", self.noisy_within(0.1));
        out.set("lattice_a", num(lat(|f| f.a)));
        out.set("lattice_b", num(lat(|f| f.b)));
        out.set("lattice_r2", num(lat(|f| f.r2)));
        out
    }
}

pub const FIXATION_EVENTS: usize = 200;

pub fn barrier_params(delta_z: f64) -> FdsParams {
    FdsParams { beta: 1.0, j: 2.0, n: 100, innovation_rate: 0.0, delta_z, generations: 0, seed: 0 }
}

pub fn gradual_params() -> FdsParams {
    FdsParams { beta: 1.0, j: 0.0, n: 100, innovation_rate: 0.5, delta_z: 0.5, generations: 1000, seed: 0 }
}

pub fn punctuated_params() -> FdsParams {
    FdsParams { beta: 1.0, j: 2.0, n: 100, innovation_rate: 0.05, delta_z: 5.0, generations: 2000, seed: 0 }
}

#[derive(Debug, Clone)]
pub struct FdsPunctuation {
    pub barrier: f64,
    /// `(delta_z, fixation fraction)`.
    pub fixation: Vec<(f64, f64)>,
    pub gradual: FdsRun,
    pub gradual_stasis: f64,
    pub punctuated: FdsRun,
    pub punctuated_stasis: f64,
}

pub fn fds_punctuation() -> Result<FdsPunctuation> {
    let barrier = invasion_barrier(2.0, 1.0, 100)?.value;
    let fixation = [2.0, barrier, 9.2]
        .into_iter()
        .map(|dz| Ok((dz, fixation_fraction(&barrier_params(dz), FIXATION_EVENTS)?)))
        .collect::<Result<Vec<_>>>()?;
    let g = gradual_params();
    let gradual = run_fds(&g)?;
    let gradual_stasis = stasis_fraction(&gradual.mean_z, DEFAULT_WINDOW, g.delta_z / 2.0)?;
    let p = punctuated_params();
    let punctuated = run_fds(&p)?;
    let punctuated_stasis = stasis_fraction(&punctuated.mean_z, DEFAULT_WINDOW, p.delta_z / 2.0)?;
    Ok(FdsPunctuation { barrier, fixation, gradual, gradual_stasis, punctuated, punctuated_stasis })
}

impl FdsPunctuation {
    pub fn fixation_at(&self, dz: f64) -> Option<f64> {
        self.fixation.iter().find(|(d, _)| *d == dz).map(|&(_, f)| f)
    }

    pub fn output(&self) -> Output {
        let mut out = Output { seed: Some(0), ..Default::default() };
        let mut s = String::from("delta_z,fixation_fraction\n");
        for (d, f) in &self.fixation {
            let _ = writeln!(s, "{d},{f}");
        }
        out.file("fixation.csv", s);
        out.file("trajectory_gradual.csv", self.gradual.trajectory_csv());
        out.file("trajectory_punctuated.csv", self.punctuated.trajectory_csv());
        out.file("events_punctuated.csv", self.punctuated.events_csv());
        let mut rows = vec![("barrier", self.barrier)];
        let names = ["fixation_dz2", "fixation_dz_barrier", "fixation_dz9.2"];
        for (name, (_, f)) in names.iter().zip(&self.fixation) {
            rows.push((name, *f));
        }
        rows.push(("stasis_gradual", self.gradual_stasis));
        rows.push(("stasis_punctuated", self.punctuated_stasis));
        rows.push(("punctuations", self.punctuated.events.len() as f64));
        out.file("results.csv", results_csv(&rows));
        for (k, v) in rows {
            out.set(k, num(v));
        }
        out.set("punctuations", self.punctuated.events.len());
        out
    }
}

pub const WEIBULL_SAMPLES: usize = 10_000;
pub const WEIBULL_ALPHA: f64 = 0.6;
pub const WEIBULL_SCALE: f64 = 50.0;

pub fn weibull_samples() -> Vec<f64> {
    synth::stretched_exponential(&mut seeded(0), WEIBULL_SAMPLES, WEIBULL_ALPHA, WEIBULL_SCALE)
}

fn weibull_alpha() -> Result<Output> {
    let xs = weibull_samples();
    let mut out = crate::commands::weibull_samples_output(&xs)?;
    out.seed = Some(0);
    let mut s = String::from("t\n");
    for x in &xs {
        let _ = writeln!(s, "{x}");
    }
    out.file("samples.csv", s);
    let alpha = out.summary.get("alpha").and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
    out.file("results.csv", results_csv(&[("alpha", alpha), ("alpha_true", WEIBULL_ALPHA)]));
    Ok(out)
}

pub const BDM_WIDTH: u32 = 8;
pub const BDM_STEPS: u32 = 8;
pub const BDM_STREAMS: u64 = 100;
pub const BDM_BITS: usize = 1024;

#[derive(Debug, Clone)]
pub struct ImitationBdm {
    /// `(original, duplicated)` per stream.
    pub pairs: Vec<(f64, f64)>,
    pub lz78_aaaaaaaa: usize,
    pub lz78_abababab: usize,
}

/// Random bit stream and the stream made of its first half written twice.
pub fn imitation_pair(index: u64) -> (Vec<bool>, Vec<bool>) {
    let mut rng = substream(0, index);
    let original: Vec<bool> = (0..BDM_BITS).map(|_| rng.random()).collect();
    let half = &original[..BDM_BITS / 2];
    let duplicated = [half, half].concat();
    (original, duplicated)
}

pub fn imitation_bdm() -> Result<ImitationBdm> {
    let table = build_ctm_table(BDM_WIDTH, BDM_STEPS)?;
    let pairs = (0..BDM_STREAMS)
        .map(|i| {
            let (o, d) = imitation_pair(i);
            Ok((
                bdm(&TokenStream::from_bits(&o), BDM_WIDTH, &table)?,
                bdm(&TokenStream::from_bits(&d), BDM_WIDTH, &table)?,
            ))
        })
        .collect::<evosoft::Result<Vec<_>>>()?;
    let lz = |s: &str| tokenize(s.as_bytes(), TokenMode::Bytes).map(|t| lz78_phrase_count(&t));
    Ok(ImitationBdm { pairs, lz78_aaaaaaaa: lz("aaaaaaaa")?, lz78_abababab: lz("abababab")? })
}

impl ImitationBdm {
    pub fn duplicated_lower(&self) -> usize {
        self.pairs.iter().filter(|(o, d)| d < o).count()
    }

    pub fn output(&self) -> Output {
        let mut out = Output { seed: Some(0), ..Default::default() };
        let mut s = String::from("stream,bdm_original,bdm_duplicated\n");
        for (i, (o, d)) in self.pairs.iter().enumerate() {
            let _ = writeln!(s, "{i},{o},{d}");
        }
        out.file("bdm.csv", s);
        let rows = [
            ("duplicated_lower", self.duplicated_lower() as f64),
            ("streams", self.pairs.len() as f64),
            ("lz78_aaaaaaaa", self.lz78_aaaaaaaa as f64),
            ("lz78_abababab", self.lz78_abababab as f64),
        ];
        out.file("results.csv", results_csv(&rows));
        out.set("duplicated_lower", self.duplicated_lower());
        out.set("streams", self.pairs.len());
        out.set("lz78_aaaaaaaa", self.lz78_aaaaaaaa);
        out.set("lz78_abababab", self.lz78_abababab);
        out
    }
}
