//! Inter-event statistics of modification logs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distfit::{fit_exponential, fit_weibull, ks_distance_continuous};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub timestamp: f64,
    pub entity: Option<String>,
}

/// Events sorted by timestamp; ties keep their input order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EventLog {
    events: Vec<Event>,
}

impl EventLog {
    pub fn new(mut events: Vec<Event>) -> Result<Self> {
        if events.iter().any(|e| !e.timestamp.is_finite()) {
            return Err(invalid("timestamps must be finite"));
        }
        events.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
        Ok(Self { events })
    }

    pub fn from_timestamps(ts: &[f64]) -> Result<Self> {
        Self::new(ts.iter().map(|&timestamp| Event { timestamp, entity: None }).collect())
    }

    /// Parses `timestamp[,entity]` lines; a leading `timestamp` header is allowed.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut events = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
            let line = rec.position().map_or(i + 1, |p| p.line() as usize);
            let first = rec.get(0).unwrap_or("");
            if i == 0 && first.eq_ignore_ascii_case("timestamp") {
                continue;
            }
            if rec.len() > 2 {
                return Err(Error::Parse { line, msg: "expected timestamp[,entity]".into() });
            }
            let timestamp: f64 = first
                .parse()
                .map_err(|_| Error::Parse { line, msg: format!("bad timestamp {first:?}") })?;
            if !timestamp.is_finite() {
                return Err(Error::Parse { line, msg: "timestamp must be finite".into() });
            }
            let entity = rec.get(1).filter(|s| !s.is_empty()).map(str::to_string);
            events.push(Event { timestamp, entity });
        }
        Self::new(events)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InterEventSamples {
    pub samples: Vec<f64>,
    /// Consecutive events with identical timestamps.
    pub zero_gaps: usize,
}

impl InterEventSamples {
    fn from_sorted(ts: impl Iterator<Item = f64>) -> Self {
        let mut out = Self::default();
        let mut prev: Option<f64> = None;
        for t in ts {
            if let Some(p) = prev {
                let d = t - p;
                if d > 0.0 {
                    out.samples.push(d);
                } else {
                    out.zero_gaps += 1;
                }
            }
            prev = Some(t);
        }
        out
    }
}

pub fn inter_event_times(log: &EventLog) -> Result<InterEventSamples> {
    let out = InterEventSamples::from_sorted(log.events.iter().map(|e| e.timestamp));
    if out.samples.is_empty() {
        return Err(Error::InsufficientData("need two events at distinct times".into()));
    }
    Ok(out)
}

/// Gaps within each entity. Events without an entity and entities with
/// fewer than two distinct timestamps contribute nothing; it is an error if
/// no entity yields a gap.
pub fn inter_event_times_by_entity(log: &EventLog) -> Result<BTreeMap<String, InterEventSamples>> {
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for e in &log.events {
        if let Some(k) = &e.entity {
            groups.entry(k.clone()).or_default().push(e.timestamp);
        }
    }
    let out: BTreeMap<String, InterEventSamples> = groups
        .into_iter()
        .map(|(k, ts)| (k, InterEventSamples::from_sorted(ts.into_iter())))
        .filter(|(_, s)| !s.samples.is_empty())
        .collect();
    if out.is_empty() {
        return Err(Error::InsufficientData("no entity has two events at distinct times".into()));
    }
    Ok(out)
}

/// All groups concatenated in key order.
pub fn pool(groups: &BTreeMap<String, InterEventSamples>) -> InterEventSamples {
    let mut out = InterEventSamples::default();
    for g in groups.values() {
        out.samples.extend_from_slice(&g.samples);
        out.zero_gaps += g.zero_gaps;
    }
    out
}

pub const MIN_COMPARISON_SAMPLES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullComparison {
    pub n: usize,
    pub alpha: f64,
    #[serde(rename = "mean_T")]
    pub mean_t: f64,
    pub rate: f64,
    pub ks_weibull: f64,
    pub ks_exponential: f64,
    pub non_poissonian: bool,
}

/// Fits both families; the verdict is non-Poissonian when `α̂ < 0.9` and the
/// stretched exponential is the closer fit.
pub fn weibull_vs_exponential(samples: &[f64]) -> Result<WeibullComparison> {
    if samples.len() < MIN_COMPARISON_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{} samples, need at least {MIN_COMPARISON_SAMPLES}",
            samples.len()
        )));
    }
    let w = fit_weibull(samples)?;
    let e = fit_exponential(samples)?;
    let ks_weibull = ks_distance_continuous(samples, |t| w.ccdf(t));
    let ks_exponential = ks_distance_continuous(samples, |t| e.ccdf(t));
    Ok(WeibullComparison {
        n: samples.len(),
        alpha: w.alpha,
        mean_t: w.mean_t,
        rate: e.rate,
        ks_weibull,
        ks_exponential,
        non_poissonian: w.alpha < 0.9 && ks_weibull < ks_exponential,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::synth;
    use proptest::prelude::*;

    #[test]
    fn gaps_and_ties() {
        let s = inter_event_times(&EventLog::from_timestamps(&[0.0, 10.0, 25.0]).unwrap()).unwrap();
        assert_eq!(s.samples, vec![10.0, 15.0]);
        let s = inter_event_times(&EventLog::from_timestamps(&[5.0, 5.0, 7.0]).unwrap()).unwrap();
        assert_eq!((s.samples, s.zero_gaps), (vec![2.0], 1));
        let s = inter_event_times(&EventLog::from_timestamps(&[7.0, 0.0, 3.0]).unwrap()).unwrap();
        assert_eq!(s.samples, vec![3.0, 4.0]);
        assert!(inter_event_times(&EventLog::from_timestamps(&[1.0]).unwrap()).is_err());
        assert!(inter_event_times(&EventLog::from_timestamps(&[1.0, 1.0]).unwrap()).is_err());
    }

    #[test]
    fn grouped_gaps() {
        let log = EventLog::from_csv("timestamp,entity\n0,A\n1,B\n4,A\n9,B\n12\n").unwrap();
        let g = inter_event_times_by_entity(&log).unwrap();
        assert_eq!(g["A"].samples, vec![4.0]);
        assert_eq!(g["B"].samples, vec![8.0]);
        assert_eq!(pool(&g).samples, vec![4.0, 8.0]);
        let lonely = EventLog::from_csv("0,A\n1,B\n").unwrap();
        assert!(inter_event_times_by_entity(&lonely).is_err());
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(EventLog::from_csv("0\nabc\n"), Err(Error::Parse { line: 2, .. })));
        assert!(EventLog::from_csv("0,a,b\n").is_err());
        assert!(EventLog::from_csv("inf\n").is_err());
        let log = EventLog::from_csv("# exported\n1.5\n 2.25 , x \n").unwrap();
        assert_eq!(log.events()[1], Event { timestamp: 2.25, entity: Some("x".into()) });
    }

    #[test]
    fn stretched_samples_are_non_poissonian() {
        let xs = synth::stretched_exponential(&mut seeded(3), 10_000, 0.6, 50.0);
        let c = weibull_vs_exponential(&xs).unwrap();
        assert!((c.alpha - 0.6).abs() < 0.05, "{c:?}");
        assert!(c.non_poissonian);
    }

    #[test]
    fn exponential_samples_are_poisson_compatible() {
        let xs = synth::exponential(&mut seeded(4), 10_000, 0.2);
        let c = weibull_vs_exponential(&xs).unwrap();
        assert!((c.alpha - 1.0).abs() < 0.05, "{c:?}");
        assert!(!c.non_poissonian);
    }

    #[test]
    fn too_few_samples() {
        let err = weibull_vs_exponential(&[1.0; 10]).unwrap_err();
        assert!(err.to_string().starts_with("insufficient data"), "{err}");
    }

    proptest! {
        #[test]
        fn gaps_sum_to_span(ts in proptest::collection::vec(0u32..1000, 2..60)) {
            let ts: Vec<f64> = ts.into_iter().map(f64::from).collect();
            let log = EventLog::from_timestamps(&ts).unwrap();
            if let Ok(s) = inter_event_times(&log) {
                let span = ts.iter().cloned().fold(f64::MIN, f64::max) - ts.iter().cloned().fold(f64::MAX, f64::min);
                prop_assert_eq!(s.samples.iter().sum::<f64>(), span);
                prop_assert_eq!(s.samples.len() + s.zero_gaps, ts.len() - 1);
            }
        }

        #[test]
        fn verdict_is_scale_free(seed in any::<u64>(), alpha in 0.4f64..1.3, scale in 0.01f64..1000.0) {
            let xs = synth::stretched_exponential(&mut seeded(seed), 300, alpha, 10.0);
            let ys: Vec<f64> = xs.iter().map(|x| x * scale).collect();
            let a = weibull_vs_exponential(&xs).unwrap();
            let b = weibull_vs_exponential(&ys).unwrap();
            prop_assert_eq!(a.non_poissonian, b.non_poissonian);
            prop_assert!((a.alpha - b.alpha).abs() < 1e-9);
        }
    }
}
