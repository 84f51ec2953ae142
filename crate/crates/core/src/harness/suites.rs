//! Property suites: each runs a family of metatheoretic properties over the
//! corpus and over generated processes, and reports counts, failures and
//! Unknowns. A suite is a pure function of its configuration.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::semantics::liveness::{is_live_finite, is_live_lasso};
use crate::semantics::{
    default_values, executed, explore, step, ExploreConfig, Exploration, Primitives, ProcLabel,
    Trace, TraceKind, Transition, Verdict,
};
use crate::syntax::{labels, Label, LabelSet, PathStep, Process, SessionType};
use crate::types::{equiv, is_dual, type_traces, responsive, TypeAutomaton, TypeLabel};
use crate::typing::{
    approx_a, check_live, check_live_closed, check_std, env_step, sim, std_of, Derivation,
    EnvLabel, Gamma, LiveCtx, StdCtx, TypeEnv, TypeError,
};

use super::corpus::{corpus, corpus_types, entry_named, CorpusEntry, PrimSet};
use super::gen::{gen_session_type, gen_typed, GenConfig};

pub const SUITES: &[&str] = &[
    "subject-reduction",
    "typing",
    "discharge",
    "liveness",
    "occurrences",
    "decomposition",
    "duality",
    "invariant-probe",
];

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides the number of generated processes of every suite.
    pub count: Option<usize>,
    /// Depth for the bounded checks over the corpus.
    pub depth: usize,
    /// Depth used to certify lock-freedom.
    pub full_depth: usize,
    pub max_states: usize,
    pub gen: GenConfig,
    /// Test hook: forget to remove answered requests in the liveness
    /// subject-reduction check.
    pub mutate_pending_update: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            count: None,
            depth: 12,
            full_depth: 48,
            max_states: 1_000_000,
            gen: GenConfig::default(),
            mutate_pending_update: false,
        }
    }
}

impl SuiteConfig {
    fn count_or(&self, n: usize) -> usize {
        self.count.unwrap_or(n)
    }

    fn gen_seed(&self, i: u64) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i)
    }

    fn explore_config(&self, depth: usize) -> ExploreConfig {
        ExploreConfig {
            max_states: self.max_states,
            ..ExploreConfig::default().with_depth(depth)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub check: String,
    pub subject: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub suite: String,
    pub checks: usize,
    /// Checks run, per property.
    pub by_check: BTreeMap<String, usize>,
    pub failures: Vec<Finding>,
    pub unknowns: Vec<Finding>,
    /// Observations that are not failures, such as conjecture counterexamples.
    pub findings: Vec<Finding>,
    pub stats: BTreeMap<String, u64>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            ..SuiteReport::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, check: &str) {
        self.checks += 1;
        *self.by_check.entry(check.to_string()).or_default() += 1;
    }

    fn fail(&mut self, check: &str, subject: &str, detail: String) {
        self.failures.push(Finding {
            check: check.to_string(),
            subject: subject.to_string(),
            detail,
        });
    }

    fn unknown(&mut self, check: &str, subject: &str, detail: String) {
        self.unknowns.push(Finding {
            check: check.to_string(),
            subject: subject.to_string(),
            detail,
        });
    }

    fn finding(&mut self, check: &str, subject: &str, detail: String) {
        self.findings.push(Finding {
            check: check.to_string(),
            subject: subject.to_string(),
            detail,
        });
    }

    fn stat(&mut self, key: &str, n: u64) {
        *self.stats.entry(key.to_string()).or_default() += n;
    }

    /// Failures of one property.
    pub fn failures_of(&self, check: &str) -> usize {
        self.failures.iter().filter(|f| f.check == check).count()
    }

    pub fn unknowns_of(&self, check: &str) -> usize {
        self.unknowns.iter().filter(|f| f.check == check).count()
    }

    pub fn checks_of(&self, check: &str) -> usize {
        self.by_check.get(check).copied().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "{verdict} {}: {} checks, {} failures, {} unknown",
            self.suite,
            self.checks,
            self.failures.len(),
            self.unknowns.len()
        )?;
        for (check, n) in &self.by_check {
            writeln!(f, "  {check}: {n}")?;
        }
        for (k, v) in &self.stats {
            writeln!(f, "  [{k}] {v}")?;
        }
        for (tag, list) in [
            ("failure", &self.failures),
            ("unknown", &self.unknowns),
            ("finding", &self.findings),
        ] {
            for x in list.iter().take(10) {
                writeln!(f, "  {tag} {} on {}: {}", x.check, x.subject, x.detail)?;
            }
            if list.len() > 10 {
                writeln!(f, "  ... {} more", list.len() - 10)?;
            }
        }
        Ok(())
    }
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Option<SuiteReport> {
    Some(match name {
        "subject-reduction" => run_subject_reduction(cfg.count_or(1000), cfg),
        "typing" => run_typing(cfg),
        "discharge" => run_discharge(cfg),
        "liveness" => run_liveness_suite(cfg),
        "occurrences" => run_occurrences(cfg),
        "decomposition" => run_decomposition(cfg),
        "duality" => run_duality(cfg),
        "invariant-probe" => run_invariant_probe(cfg),
        _ => return None,
    })
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<SuiteReport> {
    SUITES.iter().filter_map(|s| run_suite(s, cfg)).collect()
}

fn closed_live(pending: &LabelSet, p: &Process, env: &TypeEnv) -> Result<Derivation, TypeError> {
    check_live(
        &LiveCtx {
            gamma: Gamma::new(),
            pending: pending.clone(),
        },
        p,
        env,
    )
}

fn next_pending(pending: &LabelSet, d: &EnvLabel, mutate: bool) -> LabelSet {
    let mut out = pending.clone();
    if !mutate {
        let res = d.res();
        out.retain(|l| !res.contains(l));
    }
    out.extend(d.req());
    out
}

/// Where a checked transition leads: the matching environment and, when
/// the source was live-typed, the pending set the target is typed under.
struct Successor {
    delta: EnvLabel,
    env: TypeEnv,
    pending: LabelSet,
    live: bool,
}

/// Checks standard and liveness subject reduction, balance preservation and
/// domain preservation for one transition.
#[allow(clippy::too_many_arguments)]
fn check_transition(
    report: &mut SuiteReport,
    subject: &str,
    p: &Process,
    env: &TypeEnv,
    pending: &LabelSet,
    live: bool,
    t: &Transition,
    mutate: bool,
) -> Option<Successor> {
    let cands: Vec<(EnvLabel, TypeEnv)> = env_step(env)
        .into_iter()
        .filter(|(d, _)| sim(d, &t.label))
        .collect();
    report.check("env-step-domains");
    if cands.iter().any(|(_, e)| e.domain() != env.domain()) {
        report.fail("env-step-domains", subject, format!("{env} changes domain"));
    }
    let context = || {
        format!(
            "{p}\n  --{}--> {}\n  env {env}\n  pending {}",
            t.label,
            t.target,
            crate::syntax::fmt_labels(pending)
        )
    };
    report.check("standard-sr");
    let mut std_errs = Vec::new();
    let std_ok: Vec<usize> = (0..cands.len())
        .filter(|&i| match check_std(&StdCtx::new(), &t.target, &cands[i].1) {
            Ok(()) => true,
            Err(e) => {
                std_errs.push(format!("{}: {e}", cands[i].0));
                false
            }
        })
        .collect();
    if std_ok.is_empty() {
        report.fail(
            "standard-sr",
            subject,
            format!("{}\n  no matching δ types the target: [{}]", context(), std_errs.join("; ")),
        );
        return None;
    }
    if env.balanced() {
        for &i in &std_ok {
            let (d, e) = &cands[i];
            let applies = d.subject().is_none_or(|k| !env.0.contains_key(&k.dual()));
            if applies {
                report.check("balance");
                if !e.balanced() {
                    report.fail("balance", subject, format!("{}\n  via {d} to {e}", context()));
                }
            }
        }
    }
    if !live {
        let (delta, env) = cands[std_ok[0]].clone();
        return Some(Successor {
            delta,
            env,
            pending: LabelSet::new(),
            live: false,
        });
    }
    report.check("liveness-sr");
    let mut errs = Vec::new();
    for &i in &std_ok {
        let (d, e) = &cands[i];
        let l2 = next_pending(pending, d, mutate);
        match closed_live(&l2, &t.target, e) {
            Ok(_) => {
                return Some(Successor {
                    delta: d.clone(),
                    env: e.clone(),
                    pending: l2,
                    live: true,
                })
            }
            Err(err) => errs.push((d.clone(), err)),
        }
    }
    let detail = format!(
        "{}\n  {}",
        context(),
        errs.iter()
            .map(|(d, e)| format!("via {d}: {e}"))
            .collect::<Vec<_>>()
            .join("\n  ")
    );
    if errs.iter().all(|(_, e)| e.is_unsupported()) {
        report.unknown("liveness-sr", subject, detail);
    } else {
        report.fail("liveness-sr", subject, detail);
    }
    let (delta, env) = cands[std_ok[0]].clone();
    Some(Successor {
        delta,
        env,
        pending: LabelSet::new(),
        live: false,
    })
}

/// Subject reduction along random walks of `n` generated processes, and
/// exhaustively over the reachable states of every standard-typed corpus
/// entry.
pub fn run_subject_reduction(n: usize, cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("subject-reduction");
    let values = default_values();
    let prims = Primitives::shopping();
    for i in 0..n as u64 {
        let seed = cfg.gen_seed(i);
        let (mut p, mut env) = gen_typed(&cfg.gen.with_seed(seed));
        let mut live = check_live_closed(&p, &env).is_ok();
        report.stat("generated", 1);
        report.stat("generatedLive", live as u64);
        let mut pending = LabelSet::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
        for k in 0..20 {
            let ts = step(&p, &prims, &values);
            let Some(t) = ts.choose(&mut rng) else { break };
            let subject = format!("gen seed {seed} step {k}");
            let Some(next) = check_transition(
                &mut report,
                &subject,
                &p,
                &env,
                &pending,
                live,
                t,
                cfg.mutate_pending_update,
            ) else {
                break;
            };
            report.stat("steps", 1);
            p = t.target.clone();
            env = next.env;
            pending = next.pending;
            live = next.live;
        }
    }
    for entry in corpus().iter().filter(|e| e.expected.std) {
        exhaustive_sr(&mut report, entry, cfg);
    }
    report
}

/// Every transition of every reachable (state, Δ, L) node of a corpus entry.
fn exhaustive_sr(report: &mut SuiteReport, entry: &CorpusEntry, cfg: &SuiteConfig) {
    const MAX_NODES: usize = 4000;
    let prims = entry.prims.table();
    let values = default_values();
    let p0 = entry.process();
    let env0 = entry.env();
    let live0 = closed_live(&entry.pending, &p0, &env0).is_ok();
    let mut seen: HashSet<(Process, String, LabelSet, bool)> = HashSet::new();
    let mut queue = VecDeque::from([(p0, env0, entry.pending.clone(), live0)]);
    while let Some((p, env, pending, live)) = queue.pop_front() {
        if !seen.insert((p.clone(), env.to_string(), pending.clone(), live)) {
            continue;
        }
        if seen.len() > MAX_NODES {
            report.unknown("exhaustive-sr", entry.name, format!("more than {MAX_NODES} nodes"));
            return;
        }
        for t in step(&p, &prims, &values) {
            if let Some(next) = check_transition(
                report,
                entry.name,
                &p,
                &env,
                &pending,
                live,
                &t,
                cfg.mutate_pending_update,
            ) {
                let _ = next.delta;
                queue.push_back((t.target.clone(), next.env, next.pending, next.live));
            }
        }
    }
    report.stat(&format!("nodes:{}", entry.name), seen.len() as u64);
}

/// Generated pairs that are live-typable, with their derivations; gives up
/// after `100 * n` attempts.
fn generated_live(cfg: &SuiteConfig, n: usize, salt: u64) -> Vec<(u64, Process, TypeEnv, Derivation)> {
    let mut out = Vec::new();
    let mut i = 0u64;
    while out.len() < n && i < 100 * n as u64 + 100 {
        let seed = cfg.gen_seed(i ^ salt.wrapping_mul(0x1_0000_0000));
        i += 1;
        let (p, env) = gen_typed(&cfg.gen.with_seed(seed));
        if let Ok(d) = check_live_closed(&p, &env) {
            out.push((seed, p, env, d));
        }
    }
    out
}

/// Soundness embedding into the standard system, and weakening of L.
pub fn run_typing(cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("typing");
    let mut cases: Vec<(String, Process, TypeEnv, LabelSet)> = corpus()
        .into_iter()
        .map(|e| (e.name.to_string(), e.process(), e.env(), e.pending.clone()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7E);
    let alphabet = cfg.gen.label_alphabet.clone();
    for i in 0..cfg.count_or(300) as u64 {
        let seed = cfg.gen_seed(i);
        let (p, env) = gen_typed(&cfg.gen.with_seed(seed));
        let k = rng.gen_range(0..=alphabet.len());
        let pending: LabelSet = alphabet.choose_multiple(&mut rng, k).cloned().collect();
        cases.push((format!("gen seed {seed}"), p.clone(), env.clone(), LabelSet::new()));
        cases.push((format!("gen seed {seed} pending"), p, env, pending));
    }
    for (subject, p, env, pending) in cases {
        let Ok(_) = closed_live(&pending, &p, &env) else { continue };
        report.stat("liveTyped", 1);
        report.check("soundness-embedding");
        if let Err(e) = check_std(&std_of(&Gamma::new()), &p, &env) {
            report.fail("soundness-embedding", &subject, format!("{p}\n  {e}"));
        }
        let items: Vec<Label> = pending.iter().cloned().collect();
        for mask in 0..(1u32 << items.len()) {
            let sub: LabelSet = items
                .iter()
                .enumerate()
                .filter(|(j, _)| mask & (1 << j) != 0)
                .map(|(_, l)| l.clone())
                .collect();
            report.check("weakening");
            if let Err(e) = closed_live(&sub, &p, &env) {
                report.fail(
                    "weakening",
                    &subject,
                    format!(
                        "{p}\n  typed under {} but not under {}: {e}",
                        crate::syntax::fmt_labels(&pending),
                        crate::syntax::fmt_labels(&sub)
                    ),
                );
            }
        }
    }
    report
}

/// L ∖ M(Γ) ⊆ 𝒜(P) at every judgement of every derivation.
pub fn run_discharge(cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("discharge");
    for e in corpus() {
        if let Ok(d) = closed_live(&e.pending, &e.process(), &e.env()) {
            discharge_derivation(&mut report, e.name, &e.process(), &d);
        }
    }
    let n = cfg.count_or(500);
    let live = generated_live(cfg, n, 1);
    report.stat("generatedLive", live.len() as u64);
    if live.len() < n {
        report.unknown(
            "discharge",
            "generator",
            format!("only {} of {n} live-typable processes found", live.len()),
        );
    }
    for (seed, p, _, d) in &live {
        discharge_derivation(&mut report, &format!("gen seed {seed}"), p, d);
    }
    report
}

fn discharge_derivation(report: &mut SuiteReport, subject: &str, p: &Process, d: &Derivation) {
    for j in &d.judgements {
        let Some(q) = p.subterm(&j.path) else {
            report.fail("discharge", subject, format!("no subterm at {:?}", j.path));
            continue;
        };
        report.check("discharge");
        let left: LabelSet = j.pending.difference(&j.m).cloned().collect();
        let a = approx_a(q);
        if !left.is_subset(&a) {
            report.fail(
                "discharge",
                subject,
                format!(
                    "{} at {}: L∖M = {} not within A = {} for {q}",
                    j.rule,
                    crate::syntax::fmt_path(&j.path),
                    crate::syntax::fmt_labels(&left),
                    crate::syntax::fmt_labels(&a)
                ),
            );
        }
    }
}

/// Pairs a process trace with environment transitions, step by step, the
/// way the liveness theorem does: each δ is the first matching environment
/// move that keeps the target typed (live-typed when `live`). Returns the
/// δ prefix and, for a lasso, a δ cycle.
pub fn pair_trace(
    ex: &Exploration,
    t: &Trace,
    env: &TypeEnv,
    pending: &LabelSet,
    live: bool,
) -> Result<(Vec<EnvLabel>, Vec<EnvLabel>), String> {
    let advance = |pos: usize, env: &TypeEnv, pending: &LabelSet| {
        let edge = ex.edge(t.states[pos], t.steps[pos]);
        let target = &ex.states[edge.target as usize];
        for (d, e) in env_step(env).into_iter().filter(|(d, _)| sim(d, &edge.label)) {
            let l2 = next_pending(pending, &d, false);
            let ok = if live {
                closed_live(&l2, target, &e).is_ok()
            } else {
                check_std(&StdCtx::new(), target, &e).is_ok()
            };
            if ok {
                return Ok((d, e, l2));
            }
        }
        Err(format!("no δ matches {} at step {pos}", edge.label))
    };
    let mut deltas = Vec::new();
    let mut env = env.clone();
    let mut pending = pending.clone();
    let prefix_len = match t.kind {
        TraceKind::Lasso { prefix_len, .. } => prefix_len,
        _ => t.steps.len(),
    };
    for pos in 0..prefix_len {
        let (d, e, l) = advance(pos, &env, &pending)?;
        deltas.push(d);
        env = e;
        pending = l;
    }
    if prefix_len == t.steps.len() {
        return Ok((deltas, Vec::new()));
    }
    let mut starts: Vec<(TypeEnv, LabelSet, usize)> = Vec::new();
    for _ in 0..8 {
        if let Some((_, _, at)) = starts
            .iter()
            .find(|(e, l, _)| e.equiv(&env) && *l == pending)
        {
            let cycle = deltas.split_off(*at);
            return Ok((deltas, cycle));
        }
        starts.push((env.clone(), pending.clone(), deltas.len()));
        for pos in prefix_len..t.steps.len() {
            let (d, e, l) = advance(pos, &env, &pending)?;
            deltas.push(d);
            env = e;
            pending = l;
        }
    }
    Err("environment does not settle into a cycle".to_string())
}

fn delta_live(prefix: &[EnvLabel], cycle: &[EnvLabel]) -> bool {
    if cycle.is_empty() {
        is_live_finite(prefix, EnvLabel::req, EnvLabel::res)
    } else {
        is_live_lasso(prefix, cycle, EnvLabel::req, EnvLabel::res)
    }
}

/// What a lock-freedom certificate found.
pub enum Certificate {
    LockFree(Exploration),
    NotLockFree,
    Unknown(String),
}

pub fn certify(p: &Process, prims: &Primitives, cfg: &SuiteConfig) -> Certificate {
    let ex = explore(p, &cfg.explore_config(cfg.full_depth), prims);
    match ex.lock_free() {
        Verdict::Yes => Certificate::LockFree(ex),
        Verdict::No => Certificate::NotLockFree,
        Verdict::Unknown => Certificate::Unknown(format!(
            "{} states, budget exhausted: {}",
            ex.states.len(),
            ex.budget_exhausted
        )),
    }
}

/// 𝒜(P) ⊆ sel(α) for the maximal traces found at `depth`, for every corpus
/// entry certified lock-free.
pub fn approximation_soundness(report: &mut SuiteReport, depth: usize, cfg: &SuiteConfig) {
    let check = format!("approximation-sound@{depth}");
    for entry in corpus() {
        let p = entry.process();
        let prims = entry.prims.table();
        match certify(&p, &prims, cfg) {
            Certificate::LockFree(_) => {}
            Certificate::NotLockFree => {
                report.stat(&format!("notLockFree:{}", entry.name), 1);
                continue;
            }
            Certificate::Unknown(why) => {
                report.unknown(&check, entry.name, why);
                continue;
            }
        }
        let a = approx_a(&p);
        let ex = explore(&p, &cfg.explore_config(depth), &prims);
        for t in &ex.traces {
            if matches!(t.kind, TraceKind::Truncated { .. }) {
                continue;
            }
            match (ex.is_maximal(t), ex.is_lock_free(t)) {
                (Verdict::Yes, Verdict::Yes) => {}
                (Verdict::No, _) | (_, Verdict::No) => continue,
                _ => {
                    report.unknown(&check, entry.name, "maximality or lock-freedom unknown".into());
                    continue;
                }
            }
            report.check(&check);
            let sel = ex.sel(t);
            if !a.is_subset(&sel) {
                report.fail(
                    &check,
                    entry.name,
                    format!(
                        "A = {} but trace {} selects {}",
                        crate::syntax::fmt_labels(&a),
                        trace_string(&ex, t),
                        crate::syntax::fmt_labels(&sel)
                    ),
                );
            }
        }
    }
}

pub fn trace_string(ex: &Exploration, t: &Trace) -> String {
    let labels: Vec<String> = ex.labels(t).map(|l| l.to_string()).collect();
    match t.kind {
        TraceKind::Lasso { prefix_len, .. } => format!(
            "{} ({})^w",
            labels[..prefix_len].join(" "),
            labels[prefix_len..].join(" ")
        ),
        TraceKind::Truncated { .. } => format!("{} ...", labels.join(" ")),
        TraceKind::Finite => labels.join(" "),
    }
}

/// Discharge of L, 𝒜-soundness and liveness of paired traces for
/// live-typable processes certified lock-free; the liveness theorem's own
/// hypotheses gate every check.
pub fn run_liveness_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("liveness");
    for entry in corpus().iter().filter(|e| e.expected.live) {
        liveness_case(
            &mut report,
            entry.name,
            &entry.process(),
            &entry.env(),
            &entry.pending,
            &entry.prims.table(),
            cfg,
            true,
        );
    }
    let gen_cfg = SuiteConfig {
        max_states: cfg.max_states.min(20_000),
        full_depth: cfg.full_depth.min(32),
        ..cfg.clone()
    };
    for (seed, p, env, _) in generated_live(cfg, cfg.count_or(60), 2) {
        liveness_case(
            &mut report,
            &format!("gen seed {seed}"),
            &p,
            &env,
            &LabelSet::new(),
            &Primitives::shopping(),
            &gen_cfg,
            false,
        );
    }
    approximation_soundness(&mut report, cfg.depth, cfg);
    corpus_liveness_examples(&mut report, cfg);
    negative_fixture(&mut report, cfg);
    report
}

#[allow(clippy::too_many_arguments)]
fn liveness_case(
    report: &mut SuiteReport,
    subject: &str,
    p: &Process,
    env: &TypeEnv,
    pending: &LabelSet,
    prims: &Primitives,
    cfg: &SuiteConfig,
    from_corpus: bool,
) {
    let ex = match certify(p, prims, cfg) {
        Certificate::LockFree(ex) => ex,
        Certificate::NotLockFree => {
            report.stat("gatedNotLockFree", 1);
            return;
        }
        Certificate::Unknown(why) => {
            if from_corpus {
                report.unknown("lock-free-certificate", subject, why);
            }
            report.stat("gatedUnknown", 1);
            return;
        }
    };
    report.stat("certified", 1);
    let a = approx_a(p);
    for t in ex.maximal_traces() {
        let sel = ex.sel(t);
        report.check("discharge-empty");
        if !pending.is_subset(&sel) {
            report.fail(
                "discharge-empty",
                subject,
                format!("{} misses {}", trace_string(&ex, t), crate::syntax::fmt_labels(pending)),
            );
        }
        report.check("approximation-sound");
        if !a.is_subset(&sel) {
            report.fail(
                "approximation-sound",
                subject,
                format!("{} misses part of A = {}", trace_string(&ex, t), crate::syntax::fmt_labels(&a)),
            );
        }
        report.check("typed-trace-live");
        match pair_trace(&ex, t, env, pending, true) {
            Ok((prefix, cycle)) => {
                if !delta_live(&prefix, &cycle) {
                    report.fail(
                        "typed-trace-live",
                        subject,
                        format!("{} pairs with a non-live δ sequence", trace_string(&ex, t)),
                    );
                }
            }
            Err(why) => report.fail("typed-trace-live", subject, format!("{}: {why}", trace_string(&ex, t))),
        }
    }
}

/// D under {SI} always selects SI, and in P(D) every CO is followed by SI.
pub fn corpus_liveness_examples(report: &mut SuiteReport, cfg: &SuiteConfig) {
    let d = entry_named("delivery-d").expect("corpus entry");
    let ex = explore(&d.process(), &cfg.explore_config(cfg.full_depth), &d.prims.table());
    report.check("delivery-selects-si");
    if !ex.is_complete() {
        report.unknown("delivery-selects-si", d.name, "exploration incomplete".into());
    }
    let si = Label::new("SI");
    for t in ex.maximal_traces() {
        report.check("delivery-selects-si");
        if !ex.sel(t).contains(&si) {
            report.fail("delivery-selects-si", d.name, trace_string(&ex, t));
        }
    }
    let pd = entry_named("shopping-d").expect("corpus entry");
    let ex = explore(&pd.process(), &cfg.explore_config(cfg.full_depth), &pd.prims.table());
    report.check("checkout-then-invoice");
    if !ex.is_complete() {
        report.unknown("checkout-then-invoice", pd.name, "exploration incomplete".into());
    }
    for t in ex.maximal_traces() {
        report.check("checkout-then-invoice");
        if !checkout_answered(&ex, t) {
            report.fail("checkout-then-invoice", pd.name, trace_string(&ex, t));
        }
    }
}

/// Every CO selection on `t` is followed by an SI selection.
pub fn checkout_answered(ex: &Exploration, t: &Trace) -> bool {
    let labels: Vec<&ProcLabel> = ex.labels(t).collect();
    let co = Label::new("CO");
    let req = |l: &&ProcLabel| {
        if l.selected() == Some(&co) {
            labels_of(&["SI"])
        } else {
            LabelSet::new()
        }
    };
    let res = |l: &&ProcLabel| l.sel();
    match t.kind {
        TraceKind::Lasso { prefix_len, .. } => {
            is_live_lasso(&labels[..prefix_len], &labels[prefix_len..], req, res)
        }
        _ => is_live_finite(&labels, req, res),
    }
}

fn labels_of(ls: &[&str]) -> LabelSet {
    labels(ls.iter().copied())
}

/// The delivery recursion of P(D₀), with an `update` that never shrinks the
/// cart, reaches a lasso that is not live. Returns that lasso, if found.
pub fn negative_lasso(cfg: &SuiteConfig) -> Option<String> {
    let e = entry_named("shopping-d0-stuck").expect("corpus entry");
    let ex = explore(
        &e.process(),
        &cfg.explore_config(cfg.full_depth).with_values(vec![crate::syntax::Value::Int(1)]),
        &PrimSet::ShoppingStuck.table(),
    );
    let env = e.env();
    let found = ex
        .maximal_traces()
        .filter(|t| matches!(t.kind, TraceKind::Lasso { .. }))
        .find(|t| match pair_trace(&ex, t, &env, &LabelSet::new(), false) {
            Ok((prefix, cycle)) => !delta_live(&prefix, &cycle),
            Err(_) => false,
        })
        .map(|t| trace_string(&ex, t));
    found
}

fn negative_fixture(report: &mut SuiteReport, cfg: &SuiteConfig) {
    report.check("negative-fixture");
    match negative_lasso(cfg) {
        Some(lasso) => report.finding("negative-fixture", "shopping-d0-stuck", format!("not live: {lasso}")),
        None => report.fail(
            "negative-fixture",
            "shopping-d0-stuck",
            "no non-live maximal lasso found".into(),
        ),
    }
}

/// Occurrence properties on every explored state and transition.
pub fn run_occurrences(cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("occurrences");
    let mut cases: Vec<(String, Process, Primitives)> = corpus()
        .into_iter()
        .map(|e| (e.name.to_string(), e.process(), e.prims.table()))
        .collect();
    for i in 0..cfg.count_or(50) as u64 {
        let seed = cfg.gen_seed(i);
        let (p, _) = gen_typed(&cfg.gen.with_seed(seed));
        cases.push((format!("gen seed {seed}"), p, Primitives::shopping()));
    }
    let limits = SuiteConfig {
        max_states: cfg.max_states.min(20_000),
        ..cfg.clone()
    };
    for (subject, p, prims) in cases {
        let ex = explore(&p, &limits.explore_config(cfg.depth), &prims);
        for s in ex.state_ids() {
            let state = &ex.states[s as usize];
            let top: BTreeSet<_> = ex.top_level_at(s).into_iter().collect();
            report.check("enabled-is-top-level");
            for o in ex.enabled_at(s) {
                if !top.contains(&o) {
                    report.fail(
                        "enabled-is-top-level",
                        &subject,
                        format!("{state}: enabled occurrence at {} is not top-level", crate::syntax::fmt_path(&o)),
                    );
                }
            }
            for edge in &ex.edges[s as usize] {
                report.check("transition-executes");
                if executed(state, &edge.derivation, &prims).is_empty() {
                    report.fail(
                        "transition-executes",
                        &subject,
                        format!("{state} --{}--> executes nothing", edge.label),
                    );
                }
                if let Some(k) = edge.label.subject() {
                    report.check("no-co-name");
                    let target = &ex.states[edge.target as usize];
                    if target.free_names().contains(&k.dual()) {
                        report.fail(
                            "no-co-name",
                            &subject,
                            format!("{state} --{}--> {target} mentions {}", edge.label, k.dual()),
                        );
                    }
                }
            }
        }
    }
    report
}

/// Selection sets of every prefix of every explored trace.
fn prefix_sels(ex: &Exploration) -> BTreeSet<LabelSet> {
    let mut out = BTreeSet::new();
    for t in &ex.traces {
        let mut acc = LabelSet::new();
        out.insert(acc.clone());
        for l in ex.labels(t) {
            acc.extend(l.sel());
            out.insert(acc.clone());
        }
    }
    out
}

/// Every finite trace of a parallel composition splits into traces of its
/// components with the same selections.
pub fn run_decomposition(cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("decomposition");
    let mut cases: Vec<(String, Process, Primitives)> = corpus()
        .into_iter()
        .map(|e| (e.name.to_string(), e.process(), e.prims.table()))
        .collect();
    for i in 0..cfg.count_or(40) as u64 {
        let seed = cfg.gen_seed(i);
        let (p, _) = gen_typed(&cfg.gen.with_seed(seed));
        cases.push((format!("gen seed {seed}"), p, Primitives::shopping()));
    }
    let limits = SuiteConfig {
        max_states: cfg.max_states.min(20_000),
        ..cfg.clone()
    };
    let depth = cfg.depth.min(10);
    for (subject, p, prims) in cases {
        let Process::Par(l, r) = &p else { continue };
        let whole = explore(&p, &limits.explore_config(depth), &prims);
        let left = prefix_sels(&explore(l, &limits.explore_config(depth), &prims));
        let right = prefix_sels(&explore(r, &limits.explore_config(depth), &prims));
        report.stat("compositions", 1);
        for t in whole.traces.iter().filter(|t| t.kind == TraceKind::Finite) {
            report.check("decomposition");
            let sel = whole.sel(t);
            let found = left.iter().any(|b| {
                b.is_subset(&sel)
                    && right
                        .iter()
                        .any(|d| d.is_subset(&sel) && b.union(d).count() == sel.len())
            });
            if !found {
                report.fail(
                    "decomposition",
                    &subject,
                    format!("{} has no split of {}", trace_string(&whole, t), crate::syntax::fmt_labels(&sel)),
                );
            }
        }
    }
    report
}

/// Replaces the response set of one randomly chosen choice arm.
pub fn mutate_responses(t: &SessionType, alphabet: &[Label], rng: &mut impl Rng) -> SessionType {
    fn arms(t: &SessionType) -> usize {
        match t {
            SessionType::Branch(a) | SessionType::Select(a) => {
                a.len() + a.iter().map(|x| arms(&x.cont)).sum::<usize>()
            }
            SessionType::Out(c) | SessionType::In(c) | SessionType::Mu(_, c) => arms(c),
            SessionType::Var(_) | SessionType::End => 0,
        }
    }
    fn go(t: &SessionType, target: &mut usize, fresh: &LabelSet) -> SessionType {
        match t {
            SessionType::Branch(a) | SessionType::Select(a) => {
                let new: Vec<_> = a
                    .iter()
                    .map(|arm| {
                        let mut arm = arm.clone();
                        if *target == 0 {
                            arm.responses = fresh.clone();
                        }
                        *target = target.wrapping_sub(1);
                        arm.cont = go(&arm.cont, target, fresh);
                        arm
                    })
                    .collect();
                if matches!(t, SessionType::Branch(_)) {
                    SessionType::Branch(new)
                } else {
                    SessionType::Select(new)
                }
            }
            SessionType::Out(c) => SessionType::Out(Box::new(go(c, target, fresh))),
            SessionType::In(c) => SessionType::In(Box::new(go(c, target, fresh))),
            SessionType::Mu(x, c) => SessionType::Mu(x.clone(), Box::new(go(c, target, fresh))),
            other => other.clone(),
        }
    }
    let n = arms(t);
    if n == 0 {
        return t.clone();
    }
    let mut target = rng.gen_range(0..n);
    let k = rng.gen_range(0..=alphabet.len().min(3));
    let fresh: LabelSet = alphabet.choose_multiple(rng, k).cloned().collect();
    go(t, &mut target, &fresh)
}

/// Syntactic subterms, an upper bound on the states of the automaton.
fn subterm_count(t: &SessionType) -> usize {
    1 + match t {
        SessionType::Branch(a) | SessionType::Select(a) => a.iter().map(|x| subterm_count(&x.cont)).sum(),
        SessionType::Out(c) | SessionType::In(c) | SessionType::Mu(_, c) => subterm_count(c),
        SessionType::Var(_) | SessionType::End => 0,
    }
}

/// Duality, response-insensitivity of duality, automaton determinism and
/// regularity, and responsiveness against a position-by-position replay.
pub fn run_duality(cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("duality");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xD0A1);
    let mut types: Vec<(String, SessionType)> = corpus_types()
        .into_iter()
        .map(|(n, t)| (n.to_string(), t))
        .collect();
    for i in 0..cfg.count_or(500) as u64 {
        let seed = cfg.gen_seed(i);
        types.push((format!("gen seed {seed}"), gen_session_type(&cfg.gen.with_seed(seed))));
    }
    let mut alphabet = cfg.gen.label_alphabet.clone();
    alphabet.extend(["AI", "RI", "CO", "DI", "SI"].map(Label::new));
    for (name, t) in &types {
        let d = t.syntactic_dual();
        report.check("dual-of-dual");
        if !is_dual(t, &d) {
            report.fail("dual-of-dual", name, format!("{t} not dual to {d}"));
        }
        report.check("dual-symmetric");
        if is_dual(t, &d) != is_dual(&d, t) {
            report.fail("dual-symmetric", name, t.to_string());
        }
        report.check("not-self-dual");
        if !matches!(t.unfold(), SessionType::End) && is_dual(t, t) {
            report.fail("not-self-dual", name, t.to_string());
        }
        let m = mutate_responses(&d, &alphabet, &mut rng);
        report.check("dual-ignores-responses");
        if !is_dual(t, &m) {
            report.fail("dual-ignores-responses", name, format!("{t} vs {m}"));
        }
        report.check("equiv-reflexive");
        if !equiv(t, t) {
            report.fail("equiv-reflexive", name, t.to_string());
        }
        let a = TypeAutomaton::build(t);
        report.check("automaton-deterministic");
        if !a.is_deterministic() {
            report.fail("automaton-deterministic", name, t.to_string());
        }
        report.check("automaton-regular");
        if a.len() > subterm_count(t) {
            report.fail(
                "automaton-regular",
                name,
                format!("{} states for {} subterms", a.len(), subterm_count(t)),
            );
        }
        for trace in type_traces(t, 8).terminated {
            report.check("responsive-replay");
            let replay = (0..trace.len()).all(|i| {
                let later: LabelSet = trace[i + 1..].iter().flat_map(TypeLabel::res).collect();
                trace[i].req().is_subset(&later)
            });
            if replay != responsive(&trace) {
                report.fail("responsive-replay", name, format!("{trace:?}"));
            }
        }
    }
    let (td, te) = (
        super::corpus::corpus_type("t_d"),
        super::corpus::corpus_type("t_e"),
    );
    for i in 0..100 {
        let (a, b) = if i % 2 == 0 {
            (mutate_responses(&td, &alphabet, &mut rng), te.clone())
        } else {
            (td.clone(), mutate_responses(&te, &alphabet, &mut rng))
        };
        report.check("duality-mutation");
        if !is_dual(&a, &b) {
            report.fail("duality-mutation", "t_d/t_e", format!("{a} vs {b}"));
        }
    }
    report
}

fn annotate(p: &Process, path: &[PathStep], inv: &LabelSet) -> Process {
    let mut q = p.clone();
    if let Some(Process::Rec { invariant, .. }) = q.subterm_mut(path) {
        *invariant = Some(inv.clone());
    }
    q
}

/// Probes whether the synthesised candidate 𝒜(body) ∪ L is the largest
/// invariant that works. Counterexamples are findings, not failures.
pub fn run_invariant_probe(cfg: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport::new("invariant-probe");
    let n = cfg.count_or(200);
    let mut probed = 0;
    let mut i = 0u64;
    while probed < n && i < 200 * n as u64 + 200 {
        let seed = cfg.gen_seed(i ^ 0x3_0000_0000);
        i += 1;
        let (p, env) = gen_typed(&cfg.gen.with_seed(seed));
        let Ok(d) = check_live_closed(&p, &env) else { continue };
        let Some((path, choice)) = d.invariants().next() else { continue };
        probed += 1;
        let subject = format!("gen seed {seed}");
        let mut universe: LabelSet = cfg.gen.label_alphabet.iter().cloned().collect();
        for (_, t) in env.iter() {
            universe.extend(TypeAutomaton::build(t).edges.iter().flatten().filter_map(|(l, _)| l.sel().cloned()));
        }
        let cand = choice.candidate.clone();
        report.check("candidate-validates");
        if check_live_closed(&annotate(&p, path, &cand), &env).is_ok() {
            report.stat("candidateValidates", 1);
        } else {
            report.stat("candidateFails", 1);
            report.finding(
                "candidate-validates",
                &subject,
                format!("{} rejected; chose {} in {p}", crate::syntax::fmt_labels(&cand), crate::syntax::fmt_labels(&choice.chosen)),
            );
        }
        let extra: Vec<Label> = universe.difference(&cand).cloned().collect();
        let mut bigger_ok = Vec::new();
        for mask in 1..(1u32 << extra.len().min(6)) {
            let mut s = cand.clone();
            s.extend(extra.iter().enumerate().filter(|(j, _)| mask & (1 << j) != 0).map(|(_, l)| l.clone()));
            report.check("no-larger-invariant");
            if check_live_closed(&annotate(&p, path, &s), &env).is_ok() {
                bigger_ok.push(crate::syntax::fmt_labels(&s));
            }
        }
        if bigger_ok.is_empty() {
            report.stat("candidateMaximal", 1);
        } else {
            report.stat("largerInvariantFound", 1);
            report.finding(
                "no-larger-invariant",
                &subject,
                format!(
                    "candidate {} but {} also validate in {p}",
                    crate::syntax::fmt_labels(&cand),
                    bigger_ok.join(", ")
                ),
            );
        }
    }
    report.stat("probed", probed as u64);
    if probed < n {
        report.unknown("invariant-probe", "generator", format!("only {probed} of {n} processes probed"));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            count: Some(20),
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn zero_walks_pass_trivially() {
        let cfg = SuiteConfig {
            count: Some(0),
            ..SuiteConfig::default()
        };
        let r = run_subject_reduction(0, &cfg);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn subject_reduction_small() {
        let r = run_subject_reduction(30, &small());
        assert!(r.passed(), "{r}");
        assert!(r.unknowns.is_empty(), "{r}");
        assert!(r.checks_of("liveness-sr") > 0);
    }

    #[test]
    fn skipping_the_pending_update_is_caught() {
        let cfg = SuiteConfig {
            mutate_pending_update: true,
            ..small()
        };
        let r = run_subject_reduction(30, &cfg);
        assert!(r.failures_of("liveness-sr") > 0, "{r}");
        assert_eq!(r.failures_of("standard-sr"), 0);
    }

    #[test]
    fn every_shopping_step_has_a_delta() {
        let mut r = SuiteReport::new("t");
        exhaustive_sr(&mut r, &entry_named("shopping-d").unwrap(), &SuiteConfig::default());
        assert!(r.passed(), "{r}");
        assert!(r.unknowns.is_empty());
        assert!(r.checks_of("liveness-sr") > 50);
    }

    #[test]
    fn small_suites_pass() {
        for name in ["typing", "discharge", "occurrences", "decomposition", "duality"] {
            let r = run_suite(name, &small()).unwrap();
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn pending_update() {
        let d = EnvLabel::TauSel(Label::new("a"), labels(["b"]));
        assert_eq!(next_pending(&labels(["a", "c"]), &d, false), labels(["b", "c"]));
        assert_eq!(next_pending(&labels(["a", "c"]), &d, true), labels(["a", "b", "c"]));
    }

    #[test]
    fn mutation_touches_only_responses() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = crate::syntax::parse_type("mu t. +{ a[b].t, b.&{ c[a].end } }").unwrap();
        let al = labels(["a", "b", "c"]).into_iter().collect::<Vec<_>>();
        for _ in 0..50 {
            let m = mutate_responses(&t, &al, &mut rng);
            assert!(is_dual(&m, &t.syntactic_dual()));
        }
    }
}
