//! Cultural evolution under directional and frequency-dependent selection.
//!
//! A variant with trait value `z` held by `n_z` of `N` individuals is copied
//! with probability `Π(z) ∝ e^{βz} (n_z/N)^J`. For `J > 1` a rare novelty pays a
//! conformity penalty that only a large enough step overcomes:
//! `Δz ≥ ((J−1)/β) ln N`.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{seeded, substream};
use crate::scalar::{log_sum_exp, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdsParams<T> {
    pub beta: T,
    #[serde(rename = "J")]
    pub j: T,
    #[serde(rename = "N")]
    pub n: u64,
    pub innovation_rate: f64,
    pub delta_z: T,
    pub generations: usize,
    pub seed: u64,
}

impl<T: Real> FdsParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(invalid("N must be at least 2"));
        }
        if !(self.beta >= T::zero()) || !self.beta.is_finite() {
            return Err(invalid("beta must be finite and non-negative"));
        }
        if !self.j.is_finite() || !self.delta_z.is_finite() {
            return Err(invalid("J and delta_z must be finite"));
        }
        if !(0.0..=1.0).contains(&self.innovation_rate) {
            return Err(invalid("innovation_rate must lie in [0,1]"));
        }
        Ok(())
    }
}

/// Variant counts ordered by trait value; every stored count is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraitPopulation<T> {
    variants: Vec<(T, u64)>,
}

impl<T: Real> TraitPopulation<T> {
    /// Builds a population, merging equal trait values and discarding zero counts.
    pub fn new(mut variants: Vec<(T, u64)>) -> Result<Self> {
        if variants.iter().any(|(z, _)| !z.is_finite()) {
            return Err(invalid("trait values must be finite"));
        }
        variants.retain(|&(_, n)| n > 0);
        if variants.is_empty() {
            return Err(invalid("population is empty"));
        }
        variants.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(T, u64)> = Vec::with_capacity(variants.len());
        for (z, n) in variants {
            match merged.last_mut() {
                Some(last) if last.0 == z => last.1 += n,
                _ => merged.push((z, n)),
            }
        }
        Ok(Self { variants: merged })
    }

    pub fn monomorphic(z: T, n: u64) -> Result<Self> {
        Self::new(vec![(z, n)])
    }

    pub fn variants(&self) -> &[(T, u64)] {
        &self.variants
    }

    pub fn size(&self) -> u64 {
        self.variants.iter().map(|v| v.1).sum()
    }

    pub fn n_variants(&self) -> usize {
        self.variants.len()
    }

    pub fn max_z(&self) -> T {
        self.variants.last().expect("non-empty").0
    }

    pub fn count_of(&self, z: T) -> u64 {
        self.variants.iter().find(|v| v.0 == z).map_or(0, |v| v.1)
    }

    pub fn mean(&self) -> T {
        let n = T::of(self.size() as f64);
        self.variants.iter().map(|&(z, c)| z * T::of(c as f64)).sum::<T>() / n
    }

    /// Converts one uniformly chosen individual to a new variant at `z_new`.
    fn convert_one<R: Rng>(&mut self, z_new: T, rng: &mut R) {
        let mut pick = rng.random_range(0..self.size());
        let mut idx = 0;
        while pick >= self.variants[idx].1 {
            pick -= self.variants[idx].1;
            idx += 1;
        }
        self.variants[idx].1 -= 1;
        if self.variants[idx].1 == 0 {
            self.variants.remove(idx);
        }
        let pos = self.variants.partition_point(|v| v.0 < z_new);
        match self.variants.get_mut(pos) {
            Some(v) if v.0 == z_new => v.1 += 1,
            _ => self.variants.insert(pos, (z_new, 1)),
        }
    }
}

/// Copying probabilities in the population's variant order, evaluated in log
/// space: `ln Π(z) = βz + J ln(n_z/N) − ln Z`.
pub fn selection_prob<T: Real>(pop: &TraitPopulation<T>, beta: T, j: T) -> Result<Vec<T>> {
    let n = T::of(pop.size() as f64);
    let logw: Vec<T> = pop
        .variants
        .iter()
        .map(|&(z, c)| {
            let lp = (T::of(c as f64) / n).ln();
            let freq_term = if j == T::zero() { T::zero() } else { j * lp };
            let fit_term = if beta == T::zero() { T::zero() } else { beta * z };
            fit_term + freq_term
        })
        .collect();
    if logw.iter().any(|w| w.is_nan()) {
        return Err(Error::Numerical("selection weight is NaN".into()));
    }
    let lz = log_sum_exp(&logw);
    if !lz.is_finite() {
        return Err(Error::Numerical("all selection weights vanish or overflow".into()));
    }
    Ok(logw.into_iter().map(|w| (w - lz).exp()).collect())
}

/// One Wright-Fisher generation followed by an optional innovation.
pub fn step_population<T: Real, R: Rng>(pop: &TraitPopulation<T>, params: &FdsParams<T>, rng: &mut R) -> Result<TraitPopulation<T>> {
    let probs = selection_prob(pop, params.beta, params.j)?;
    let n = pop.size();
    let mut next = Vec::with_capacity(pop.variants.len());
    let mut left = n;
    let mut mass = 1.0f64;
    for (i, (&(z, _), p)) in pop.variants.iter().zip(&probs).enumerate() {
        if left == 0 {
            break;
        }
        let draw = if i + 1 == probs.len() {
            left
        } else {
            let q = (p.f64() / mass).clamp(0.0, 1.0);
            Binomial::new(left, q).map_err(|e| Error::Numerical(e.to_string()))?.sample(rng)
        };
        mass -= p.f64();
        left -= draw;
        if draw > 0 {
            next.push((z, draw));
        }
    }
    let mut out = TraitPopulation { variants: next };
    if params.innovation_rate > 0.0 && rng.random::<f64>() < params.innovation_rate {
        let z_new = out.max_z() + params.delta_z;
        out.convert_one(z_new, rng);
    }
    Ok(out)
}

/// `((J−1)/β) ln N`; values `≤ 0` mean no conformity barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvasionBarrier<T> {
    pub value: T,
}

impl<T: Real> InvasionBarrier<T> {
    pub fn is_barrier(&self) -> bool {
        self.value > T::zero()
    }
}

pub fn invasion_barrier<T: Real>(j: T, beta: T, n: u64) -> Result<InvasionBarrier<T>> {
    if n < 2 {
        return Err(invalid("N must be at least 2"));
    }
    if !(beta >= T::zero()) {
        return Err(invalid("beta must be non-negative"));
    }
    if beta == T::zero() {
        if j > T::one() {
            return Err(Error::InvalidParam("barrier undefined (infinite)".into()));
        }
        return Ok(InvasionBarrier { value: T::zero() });
    }
    Ok(InvasionBarrier { value: (j - T::one()) / beta * T::of(n as f64).ln() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PunctuationEvent<T> {
    pub generation: usize,
    pub jump: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdsRun<T> {
    /// Entry `g` describes the population after `g` generations.
    pub mean_z: Vec<T>,
    pub n_variants: Vec<usize>,
    pub events: Vec<PunctuationEvent<T>>,
}

impl<T: Real> FdsRun<T> {
    pub fn trajectory_csv(&self) -> String {
        let mut s = String::from("generation,mean_z,n_variants\n");
        for (g, (m, k)) in self.mean_z.iter().zip(&self.n_variants).enumerate() {
            s.push_str(&format!("{g},{m},{k}\n"));
        }
        s
    }

    pub fn events_csv(&self) -> String {
        let mut s = String::from("generation,jump\n");
        for e in &self.events {
            s.push_str(&format!("{},{}\n", e.generation, e.jump));
        }
        s
    }
}

pub const DEFAULT_WINDOW: usize = 10;

/// Simulates from a monomorphic `z = 0` population and detects punctuations
/// with the default window and threshold `delta_z / 2`.
pub fn run_fds<T: Real>(params: &FdsParams<T>) -> Result<FdsRun<T>> {
    params.validate()?;
    let mut rng = seeded(params.seed);
    let mut pop = TraitPopulation::monomorphic(T::zero(), params.n)?;
    let mut mean_z = Vec::with_capacity(params.generations + 1);
    let mut n_variants = Vec::with_capacity(params.generations + 1);
    mean_z.push(pop.mean());
    n_variants.push(pop.n_variants());
    for _ in 0..params.generations {
        pop = step_population(&pop, params, &mut rng)?;
        mean_z.push(pop.mean());
        n_variants.push(pop.n_variants());
    }
    let events = detect_punctuations(&mean_z, DEFAULT_WINDOW, params.delta_z * T::of(0.5));
    Ok(FdsRun { mean_z, n_variants, events })
}

/// Generations `g` where `mean[g] − mean[g − window]` exceeds `threshold`.
/// After an event the scan resumes one full window later, so a single jump
/// is reported once.
pub fn detect_punctuations<T: Real>(mean: &[T], window: usize, threshold: T) -> Vec<PunctuationEvent<T>> {
    let mut events = Vec::new();
    if window == 0 {
        return events;
    }
    let mut g = window;
    while g < mean.len() {
        let jump = mean[g] - mean[g - window];
        if jump > threshold {
            events.push(PunctuationEvent { generation: g, jump });
            g += window;
        } else {
            g += 1;
        }
    }
    events
}

/// Share of consecutive, non-overlapping windows in which the mean trait
/// gains no more than `threshold`.
pub fn stasis_fraction<T: Real>(mean: &[T], window: usize, threshold: T) -> Result<f64> {
    if window == 0 || mean.len() <= window {
        return Err(Error::InsufficientData("trajectory shorter than one window".into()));
    }
    let windows: Vec<bool> = (window..mean.len())
        .step_by(window)
        .map(|g| mean[g] - mean[g - window] <= threshold)
        .collect();
    Ok(windows.iter().filter(|&&s| s).count() as f64 / windows.len() as f64)
}

/// Outcome of one introduced variant followed until it is lost or fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fate {
    Lost,
    Fixed,
}

/// Introduces a single individual at `delta_z` into a monomorphic `z = 0`
/// resident population and iterates selection without further innovation
/// until one of the two variants is gone.
pub fn follow_introduction<T: Real, R: Rng>(params: &FdsParams<T>, rng: &mut R) -> Result<Fate> {
    params.validate()?;
    let closed = FdsParams { innovation_rate: 0.0, ..*params };
    let mut pop = TraitPopulation::new(vec![(T::zero(), params.n - 1), (params.delta_z, 1)])?;
    if pop.n_variants() == 1 {
        return Ok(Fate::Fixed);
    }
    loop {
        pop = step_population(&pop, &closed, rng)?;
        if pop.n_variants() == 1 {
            return Ok(if pop.max_z() == params.delta_z { Fate::Fixed } else { Fate::Lost });
        }
    }
}

/// Fraction of `events` independent introductions that fix. Event `i` uses
/// substream `i` of `params.seed`, so the result does not depend on threads.
pub fn fixation_fraction<T: Real>(params: &FdsParams<T>, events: usize) -> Result<f64> {
    if events == 0 {
        return Err(invalid("need at least one introduction event"));
    }
    let fates: Result<Vec<Fate>> = (0..events)
        .into_par_iter()
        .map(|i| follow_introduction(params, &mut substream(params.seed, i as u64)))
        .collect();
    Ok(fates?.iter().filter(|&&f| f == Fate::Fixed).count() as f64 / events as f64)
}
