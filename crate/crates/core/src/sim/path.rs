//! Simulated trajectories.

use std::io::Write;

use crate::model::DebtorSet;

/// Kind of a recorded event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Default through the direct channel.
    ADefault(usize),
    /// Environment event `T(k)`; `defaulted` marks a default at `T(k)`.
    TEvent { debtor: usize, defaulted: bool },
}

impl EventKind {
    pub fn debtor(self) -> usize {
        match self {
            EventKind::ADefault(k) | EventKind::TEvent { debtor: k, .. } => k,
        }
    }

    fn rank(self) -> u8 {
        match self {
            EventKind::ADefault(_) => 0,
            EventKind::TEvent { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemEvent {
    pub time: f64,
    pub kind: EventKind,
}

/// Environment-only trajectory: `T(k)` per debtor, `∞` when censored at the
/// horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct FPath {
    pub t_times: Vec<f64>,
}

impl FPath {
    pub fn new(t_times: Vec<f64>) -> Self {
        FPath { t_times }
    }

    /// `T(k)`, or `∞` when it did not occur before the horizon.
    #[inline]
    pub fn t(&self, k: usize) -> f64 {
        self.t_times[k]
    }

    pub fn n(&self) -> usize {
        self.t_times.len()
    }

    /// Debtors whose `T` is at or before `t`.
    pub fn occurred_by(&self, t: f64) -> DebtorSet {
        (0..self.n()).filter(|&k| self.t_times[k] <= t).collect()
    }
}

/// Event log of one trajectory, with per-debtor accessors.
///
/// Times not reached before the horizon are reported as `∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemPath {
    events: Vec<SystemEvent>,
    tau_a: Vec<f64>,
    tau_b: Vec<f64>,
    t_times: Vec<f64>,
    thresholds: Option<Vec<f64>>,
}

impl SystemPath {
    /// Builds a path from events in any order; they are sorted by time, then
    /// debtor index, then A before T.
    ///
    /// # Panics
    /// If a debtor has two events of the same kind or defaults twice.
    pub fn from_events(
        n: usize,
        mut events: Vec<SystemEvent>,
        thresholds: Option<Vec<f64>>,
    ) -> Self {
        events.sort_by(|a, b| {
            a.time
                .total_cmp(&b.time)
                .then(a.kind.debtor().cmp(&b.kind.debtor()))
                .then(a.kind.rank().cmp(&b.kind.rank()))
        });
        let mut tau_a = vec![f64::INFINITY; n];
        let mut tau_b = vec![f64::INFINITY; n];
        let mut t_times = vec![f64::INFINITY; n];
        for e in &events {
            match e.kind {
                EventKind::ADefault(k) => {
                    assert!(tau_a[k].is_infinite() && tau_b[k].is_infinite(), "debtor {k} defaults twice");
                    tau_a[k] = e.time;
                }
                EventKind::TEvent { debtor: k, defaulted } => {
                    assert!(t_times[k].is_infinite(), "debtor {k} has two T-events");
                    t_times[k] = e.time;
                    if defaulted {
                        assert!(tau_a[k].is_infinite(), "debtor {k} defaults twice");
                        tau_b[k] = e.time;
                    }
                }
            }
        }
        SystemPath {
            events,
            tau_a,
            tau_b,
            t_times,
            thresholds,
        }
    }

    pub fn n(&self) -> usize {
        self.t_times.len()
    }

    pub fn events(&self) -> &[SystemEvent] {
        &self.events
    }

    pub fn thresholds(&self) -> Option<&[f64]> {
        self.thresholds.as_deref()
    }

    #[inline]
    pub fn tau(&self, k: usize) -> f64 {
        self.tau_a[k].min(self.tau_b[k])
    }

    #[inline]
    pub fn tau_a(&self, k: usize) -> f64 {
        self.tau_a[k]
    }

    #[inline]
    pub fn tau_b(&self, k: usize) -> f64 {
        self.tau_b[k]
    }

    #[inline]
    pub fn t_time(&self, k: usize) -> f64 {
        self.t_times[k]
    }

    /// `τ(k) > t` for every `k ∈ c`.
    pub fn survives(&self, c: DebtorSet, t: f64) -> bool {
        c.iter().all(|k| self.tau(k) > t)
    }

    /// `τᴮ(j) ≤ t` for every `j ∈ d`.
    pub fn b_defaulted(&self, d: DebtorSet, t: f64) -> bool {
        d.iter().all(|j| self.tau_b[j] <= t)
    }

    /// The environment part of the path.
    pub fn f_path(&self) -> FPath {
        FPath::new(self.t_times.clone())
    }
}

/// Writes paths as CSV rows `path_id,time,event_kind,debtor,defaulted`.
pub fn write_paths_csv<'a, W: Write>(
    out: W,
    paths: impl IntoIterator<Item = (u64, &'a SystemPath)>,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["path_id", "time", "event_kind", "debtor", "defaulted"])?;
    for (id, path) in paths {
        for e in path.events() {
            let (kind, defaulted) = match e.kind {
                EventKind::ADefault(_) => ("A", true),
                EventKind::TEvent { defaulted, .. } => ("T", defaulted),
            };
            w.write_record([
                id.to_string(),
                format!("{}", e.time),
                kind.to_string(),
                e.kind.debtor().to_string(),
                u8::from(defaulted).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
