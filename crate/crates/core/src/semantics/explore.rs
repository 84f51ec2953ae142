//! Depth-bounded exploration of the transition graph with lasso detection
//! and per-trace fairness, lock-freedom and liveness verdicts.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::syntax::{Label, LabelSet, PathStep, Process, Value};

use super::eval::Primitives;
use super::label::{sel_of_trace, ProcLabel};
use super::liveness::{is_live_finite, is_live_lasso};
use super::occurrence::{enabled, residual, top_level, Path, Residual};
use super::step::{default_values, step, Derivation};

#[derive(Clone, Debug)]
pub struct ExploreConfig {
    pub max_depth: usize,
    /// Values used to instantiate inputs from the environment.
    pub values: Vec<Value>,
    pub detect_lassos: bool,
    pub max_states: usize,
    pub max_traces: usize,
    /// Requests attached to each selected label, for the liveness verdict.
    pub requests: Option<BTreeMap<Label, LabelSet>>,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        ExploreConfig {
            max_depth: 48,
            values: default_values(),
            detect_lassos: true,
            max_states: 1_000_000,
            max_traces: 100_000,
            requests: None,
        }
    }
}

impl ExploreConfig {
    pub fn with_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn with_values(mut self, values: Vec<Value>) -> Self {
        self.values = values;
        self
    }

    pub fn with_requests(mut self, requests: BTreeMap<Label, LabelSet>) -> Self {
        self.requests = Some(requests);
        self
    }
}

/// A three-valued verdict; `Unknown` is reported for truncated traces and
/// exhausted budgets, never guessed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Verdict::Yes => s.serialize_bool(true),
            Verdict::No => s.serialize_bool(false),
            Verdict::Unknown => s.serialize_none(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum TraceKind {
    /// Ends in a state without transitions.
    Finite,
    /// `prefix · cycle^ω`; the last step returns to position `prefix_len`.
    #[serde(rename_all = "camelCase")]
    Lasso { prefix_len: usize, cycle_len: usize },
    /// Cut off at the depth bound.
    Truncated { depth: usize },
}

/// A path through the explored graph, as state ids and the index of the
/// outgoing edge taken at each step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<u32>,
    pub steps: Vec<u32>,
    pub kind: TraceKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdicts {
    pub terminated: bool,
    pub maximal: Verdict,
    pub fair: Verdict,
    pub lock_free: Verdict,
    pub live: Verdict,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub label: ProcLabel,
    pub target: u32,
    pub derivation: Derivation,
}

#[derive(Default)]
struct Caches {
    top: HashMap<u32, Vec<Path>>,
    enabled: HashMap<u32, Vec<Path>>,
    residual: HashMap<(u32, u32, Path), Residual>,
}

/// The result of [`explore`]: the graph reached from the initial state
/// (state 0) and the traces enumerated in it.
pub struct Exploration {
    pub states: Vec<Process>,
    pub edges: Vec<Vec<Edge>>,
    pub traces: Vec<Trace>,
    /// Set when the state or trace budget cut the search short; the trace
    /// set is then incomplete.
    pub budget_exhausted: bool,
    config: ExploreConfig,
    prims: Primitives,
    caches: RefCell<Caches>,
}

struct Builder<'a> {
    cfg: &'a ExploreConfig,
    prims: &'a Primitives,
    states: Vec<Process>,
    index: HashMap<Process, u32>,
    edges: Vec<Option<Vec<Edge>>>,
    traces: Vec<Trace>,
    exhausted: bool,
}

impl Builder<'_> {
    fn intern(&mut self, p: Process) -> Option<u32> {
        if let Some(&i) = self.index.get(&p) {
            return Some(i);
        }
        if self.states.len() >= self.cfg.max_states {
            self.exhausted = true;
            return None;
        }
        let i = self.states.len() as u32;
        self.index.insert(p.clone(), i);
        self.states.push(p);
        self.edges.push(None);
        Some(i)
    }

    fn expand(&mut self, s: u32) -> Option<usize> {
        if self.edges[s as usize].is_none() {
            let ts = step(&self.states[s as usize], self.prims, &self.cfg.values);
            let mut out = Vec::with_capacity(ts.len());
            for t in ts {
                let target = self.intern(t.target)?;
                out.push(Edge {
                    label: t.label,
                    target,
                    derivation: t.derivation,
                });
            }
            self.edges[s as usize] = Some(out);
        }
        self.edges[s as usize].as_ref().map(Vec::len)
    }

    fn emit(&mut self, trace: Trace) -> bool {
        if self.traces.len() >= self.cfg.max_traces {
            self.exhausted = true;
            return false;
        }
        self.traces.push(trace);
        true
    }

    fn dfs(&mut self, states: &mut Vec<u32>, steps: &mut Vec<u32>) {
        if self.exhausted {
            return;
        }
        let s = *states.last().unwrap();
        let Some(n) = self.expand(s) else { return };
        if n == 0 {
            self.emit(Trace {
                states: states.clone(),
                steps: steps.clone(),
                kind: TraceKind::Finite,
            });
            return;
        }
        if steps.len() >= self.cfg.max_depth {
            self.emit(Trace {
                states: states.clone(),
                steps: steps.clone(),
                kind: TraceKind::Truncated {
                    depth: self.cfg.max_depth,
                },
            });
            return;
        }
        for e in 0..n {
            if self.exhausted {
                return;
            }
            let target = self.edges[s as usize].as_ref().unwrap()[e].target;
            steps.push(e as u32);
            match states.iter().position(|&x| x == target) {
                Some(c) if self.cfg.detect_lassos => {
                    self.emit(Trace {
                        states: states.clone(),
                        steps: steps.clone(),
                        kind: TraceKind::Lasso {
                            prefix_len: c,
                            cycle_len: states.len() - c,
                        },
                    });
                }
                _ => {
                    states.push(target);
                    self.dfs(states, steps);
                    states.pop();
                }
            }
            steps.pop();
        }
    }
}

/// Enumerates the traces of `p` up to `cfg.max_depth` steps. A trace ends
/// when it reaches a state without transitions (finite), revisits a state
/// already on it (a lasso, when enabled), or hits the depth bound.
pub fn explore(p: &Process, cfg: &ExploreConfig, prims: &Primitives) -> Exploration {
    let mut b = Builder {
        cfg,
        prims,
        states: Vec::new(),
        index: HashMap::new(),
        edges: Vec::new(),
        traces: Vec::new(),
        exhausted: false,
    };
    let root = b.intern(p.clone()).expect("state budget of zero");
    b.dfs(&mut vec![root], &mut Vec::new());
    let edges = b.edges.into_iter().map(Option::unwrap_or_default).collect();
    Exploration {
        states: b.states,
        edges,
        traces: b.traces,
        budget_exhausted: b.exhausted,
        config: cfg.clone(),
        prims: prims.clone(),
        caches: RefCell::new(Caches::default()),
    }
}

impl Exploration {
    pub fn config(&self) -> &ExploreConfig {
        &self.config
    }

    pub fn edge(&self, state: u32, idx: u32) -> &Edge {
        &self.edges[state as usize][idx as usize]
    }

    pub fn labels<'a>(&'a self, t: &'a Trace) -> impl Iterator<Item = &'a ProcLabel> + 'a {
        t.states
            .iter()
            .zip(&t.steps)
            .map(move |(&s, &e)| &self.edge(s, e).label)
    }

    pub fn sel(&self, t: &Trace) -> LabelSet {
        sel_of_trace(self.labels(t))
    }

    /// The selections made on the cycle of a lasso; empty for other traces.
    pub fn cycle_sel(&self, t: &Trace) -> LabelSet {
        match t.kind {
            TraceKind::Lasso { prefix_len, .. } => {
                sel_of_trace(self.labels(t).skip(prefix_len))
            }
            _ => LabelSet::new(),
        }
    }

    fn top(&self, s: u32) -> Vec<Path> {
        if let Some(v) = self.caches.borrow().top.get(&s) {
            return v.clone();
        }
        let v = top_level(&self.states[s as usize], &self.prims);
        self.caches.borrow_mut().top.insert(s, v.clone());
        v
    }

    pub fn top_level_at(&self, s: u32) -> Vec<Path> {
        self.top(s)
    }

    pub fn enabled_at(&self, s: u32) -> Vec<Path> {
        if let Some(v) = self.caches.borrow().enabled.get(&s) {
            return v.clone();
        }
        let v: Vec<Path> = enabled(&self.states[s as usize], &self.prims, &self.config.values)
            .into_iter()
            .collect();
        self.caches.borrow_mut().enabled.insert(s, v.clone());
        v
    }

    pub fn residual_along(&self, s: u32, e: u32, occ: &[PathStep]) -> Residual {
        let key = (s, e, occ.to_vec());
        if let Some(r) = self.caches.borrow().residual.get(&key) {
            return r.clone();
        }
        let r = residual(
            &self.states[s as usize],
            &self.edge(s, e).derivation,
            occ,
            &self.prims,
        );
        self.caches.borrow_mut().residual.insert(key, r.clone());
        r
    }

    /// Whether the occurrence `occ` of the state at position `pos` is
    /// executed at some later step of `t`.
    fn eventually_executed(
        &self,
        t: &Trace,
        pos: usize,
        occ: &[PathStep],
        memo: &mut HashMap<(usize, Path), bool>,
    ) -> bool {
        let mut visited: Vec<(usize, Path)> = Vec::new();
        let (mut pos, mut occ) = (pos, occ.to_vec());
        let result = loop {
            if let Some(&r) = memo.get(&(pos, occ.clone())) {
                break r;
            }
            if visited.iter().any(|(p, o)| *p == pos && *o == occ) {
                break false;
            }
            visited.push((pos, occ.clone()));
            if pos >= t.steps.len() {
                break false;
            }
            match self.residual_along(t.states[pos], t.steps[pos], &occ) {
                Residual::Executed => break true,
                Residual::Discarded => break false,
                Residual::Preserved(next) => {
                    occ = next;
                    pos += 1;
                    if let TraceKind::Lasso { prefix_len, .. } = t.kind {
                        if pos == t.steps.len() {
                            pos = prefix_len;
                        }
                    }
                }
            }
        };
        for key in visited {
            memo.insert(key, result);
        }
        result
    }

    fn all_eventually_executed(&self, t: &Trace, occs: impl Fn(u32) -> Vec<Path>) -> bool {
        let mut memo = HashMap::new();
        let positions = match t.kind {
            TraceKind::Lasso { .. } => t.steps.len(),
            _ => t.states.len(),
        };
        (0..positions).all(|pos| {
            occs(t.states[pos])
                .iter()
                .all(|o| self.eventually_executed(t, pos, o, &mut memo))
        })
    }

    pub fn is_fair(&self, t: &Trace) -> Verdict {
        match t.kind {
            TraceKind::Finite => Verdict::Yes,
            TraceKind::Truncated { .. } => Verdict::Unknown,
            TraceKind::Lasso { .. } => {
                Verdict::from_bool(self.all_eventually_executed(t, |s| self.enabled_at(s)))
            }
        }
    }

    pub fn is_maximal(&self, t: &Trace) -> Verdict {
        match t.kind {
            TraceKind::Finite => Verdict::Yes,
            _ => self.is_fair(t),
        }
    }

    pub fn is_lock_free(&self, t: &Trace) -> Verdict {
        match t.kind {
            TraceKind::Truncated { .. } => Verdict::Unknown,
            _ => Verdict::from_bool(self.all_eventually_executed(t, |s| self.top(s))),
        }
    }

    /// Liveness of the selection sequence of `t` against a label-to-requests
    /// table.
    pub fn is_live(&self, t: &Trace, requests: &BTreeMap<Label, LabelSet>) -> Verdict {
        let labels: Vec<&ProcLabel> = self.labels(t).collect();
        let req = |l: &&ProcLabel| {
            l.selected()
                .and_then(|x| requests.get(x))
                .cloned()
                .unwrap_or_default()
        };
        let res = |l: &&ProcLabel| l.sel();
        match t.kind {
            TraceKind::Finite => Verdict::from_bool(is_live_finite(&labels, req, res)),
            TraceKind::Lasso { prefix_len, .. } => Verdict::from_bool(is_live_lasso(
                &labels[..prefix_len],
                &labels[prefix_len..],
                req,
                res,
            )),
            TraceKind::Truncated { .. } => Verdict::Unknown,
        }
    }

    pub fn verdicts(&self, t: &Trace) -> Verdicts {
        Verdicts {
            terminated: t.kind == TraceKind::Finite,
            maximal: self.is_maximal(t),
            fair: self.is_fair(t),
            lock_free: self.is_lock_free(t),
            live: match &self.config.requests {
                Some(r) => self.is_live(t, r),
                None => Verdict::Unknown,
            },
        }
    }

    /// The traces known to be maximal.
    pub fn maximal_traces(&self) -> impl Iterator<Item = &Trace> {
        self.traces.iter().filter(|t| self.is_maximal(t).is_yes())
    }

    /// Whether the exploration covered everything: no truncation and no
    /// exhausted budget.
    pub fn is_complete(&self) -> bool {
        !self.budget_exhausted
            && self
                .traces
                .iter()
                .all(|t| !matches!(t.kind, TraceKind::Truncated { .. }))
    }

    /// Lock-freedom of the process as far as the enumerated lassos and
    /// finite traces can tell: every maximal trace is lock-free.
    pub fn lock_free(&self) -> Verdict {
        if self
            .maximal_traces()
            .any(|t| self.is_lock_free(t) == Verdict::No)
        {
            return Verdict::No;
        }
        if !self.is_complete() {
            return Verdict::Unknown;
        }
        Verdict::Yes
    }

    pub fn to_json(&self) -> TraceSetJson {
        let traces = self
            .traces
            .iter()
            .map(|t| {
                let mut local: Vec<u32> = Vec::new();
                let id = |s: u32, local: &mut Vec<u32>| match local.iter().position(|&x| x == s) {
                    Some(i) => i,
                    None => {
                        local.push(s);
                        local.len() - 1
                    }
                };
                let mut steps = Vec::new();
                for (i, (&s, &e)) in t.states.iter().zip(&t.steps).enumerate() {
                    let edge = self.edge(s, e);
                    let from = id(s, &mut local);
                    let to_state = t.states.get(i + 1).copied().unwrap_or(edge.target);
                    let to = id(to_state, &mut local);
                    steps.push(StepJson {
                        from,
                        label: edge.label.to_string(),
                        to,
                    });
                }
                if t.steps.is_empty() {
                    id(t.states[0], &mut local);
                }
                TraceJson {
                    states: local
                        .iter()
                        .map(|&s| self.states[s as usize].to_string())
                        .collect(),
                    steps,
                    kind: t.kind,
                    verdicts: self.verdicts(t),
                }
            })
            .collect();
        TraceSetJson {
            initial: self.states[0].to_string(),
            state_count: self.states.len(),
            budget_exhausted: self.budget_exhausted,
            traces,
        }
    }

    /// Every state reachable within the explored bound.
    pub fn state_ids(&self) -> impl Iterator<Item = u32> {
        0..self.states.len() as u32
    }

    /// Distinct selection sets over maximal traces, for reporting.
    pub fn maximal_sels(&self) -> BTreeSet<LabelSet> {
        self.maximal_traces().map(|t| self.sel(t)).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepJson {
    pub from: usize,
    pub label: String,
    pub to: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceJson {
    pub states: Vec<String>,
    pub steps: Vec<StepJson>,
    pub kind: TraceKind,
    pub verdicts: Verdicts,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceSetJson {
    pub initial: String,
    pub state_count: usize,
    pub budget_exhausted: bool,
    pub traces: Vec<TraceJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{labels, parse_process};

    fn run(src: &str) -> Exploration {
        explore(
            &parse_process(src).unwrap(),
            &ExploreConfig::default().with_depth(12),
            &Primitives::shopping(),
        )
    }

    #[test]
    fn inactive_process_has_one_empty_trace() {
        let x = run("0");
        assert_eq!(x.traces.len(), 1);
        assert_eq!(x.traces[0].kind, TraceKind::Finite);
        assert!(x.traces[0].steps.is_empty());
        assert_eq!(x.lock_free(), Verdict::Yes);
    }

    #[test]
    fn alternating_loop_is_one_fair_lock_free_lasso() {
        let x = run("rec X. k+<<a.k+<<b.X(k+)");
        assert_eq!(x.traces.len(), 1);
        let t = &x.traces[0];
        assert_eq!(
            t.kind,
            TraceKind::Lasso {
                prefix_len: 0,
                cycle_len: 2
            }
        );
        assert_eq!(x.is_fair(t), Verdict::Yes);
        assert_eq!(x.is_lock_free(t), Verdict::Yes);
        assert_eq!(x.cycle_sel(t), labels(["a", "b"]));
    }

    #[test]
    fn blocked_relay_is_maximal_but_not_lock_free() {
        let x = run("rec X. k+<<a.X(k+) | h+?(x).j-!(x).0 | j+?(y).h-!(y).0");
        assert_eq!(x.traces.len(), 1);
        let t = &x.traces[0];
        assert!(matches!(t.kind, TraceKind::Lasso { .. }));
        assert_eq!(x.is_maximal(t), Verdict::Yes);
        assert_eq!(x.is_lock_free(t), Verdict::No);
        assert_eq!(x.lock_free(), Verdict::No);
    }

    #[test]
    fn starving_a_component_is_unfair() {
        let x = run("rec X. k+<<a.X(k+) | rec Y. h+<<a.Y(h+)");
        assert!(!x.traces.is_empty());
        for t in &x.traces {
            assert_eq!(x.is_fair(t), Verdict::No, "{:?}", t);
        }
    }

    #[test]
    fn deadlocked_finite_trace_is_not_lock_free() {
        let x = run("h+?(x).j-!(x).0 | j+?(y).h-!(y).0");
        assert_eq!(x.traces.len(), 1);
        assert_eq!(x.traces[0].kind, TraceKind::Finite);
        assert_eq!(x.is_lock_free(&x.traces[0]), Verdict::No);
    }

    #[test]
    fn truncation_yields_unknown() {
        let x = explore(
            &parse_process("loop X (i < 5) { k+<<a.X(k+) } then { 0 }").unwrap(),
            &ExploreConfig::default().with_depth(3),
            &Primitives::new(),
        );
        assert_eq!(x.traces.len(), 1);
        assert_eq!(x.traces[0].kind, TraceKind::Truncated { depth: 3 });
        assert_eq!(x.verdicts(&x.traces[0]).lock_free, Verdict::Unknown);
        assert_eq!(x.lock_free(), Verdict::Unknown);
    }

    #[test]
    fn liveness_verdict_uses_the_request_table() {
        let req: BTreeMap<Label, LabelSet> =
            [(Label::new("a"), labels(["b"])), (Label::new("b"), labels(["a"]))]
                .into_iter()
                .collect();
        let p = parse_process("rec X. k+<<a.k+<<b.X(k+)").unwrap();
        let x = explore(&p, &ExploreConfig::default().with_requests(req.clone()), &Primitives::new());
        assert_eq!(x.verdicts(&x.traces[0]).live, Verdict::Yes);
        let q = parse_process("rec X. k+<<a.X(k+)").unwrap();
        let y = explore(&q, &ExploreConfig::default().with_requests(req), &Primitives::new());
        assert_eq!(y.verdicts(&y.traces[0]).live, Verdict::No);
    }

    #[test]
    fn json_shape() {
        let x = run("rec X. k+<<a.X(k+)");
        let v = serde_json::to_value(x.to_json()).unwrap();
        let t = &v["traces"][0];
        assert_eq!(t["kind"]["type"], "lasso");
        assert_eq!(t["steps"][0]["to"], 0);
        assert_eq!(t["verdicts"]["lockFree"], true);
        assert!(t["verdicts"]["live"].is_null());
    }
}
