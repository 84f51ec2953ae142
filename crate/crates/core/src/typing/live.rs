use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::syntax::{fmt_labels, Label, LabelSet, Name, PathStep, Process};

use super::{rules, StdCtx, TypeEnv, TypeError};

/// What Γ records for a process variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Entry {
    /// General recursion: selections accumulated since the `rec`, the
    /// request invariant, and the environment.
    General {
        acc: LabelSet,
        inv: LabelSet,
        env: TypeEnv,
    },
    /// Primitive recursion: the pending responses the continuation discharges.
    Primitive { bound: LabelSet, env: TypeEnv },
}

impl Entry {
    pub fn env(&self) -> &TypeEnv {
        match self {
            Entry::General { env, .. } | Entry::Primitive { env, .. } => env,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Gamma(pub BTreeMap<Name, Entry>);

impl Gamma {
    pub fn new() -> Gamma {
        Gamma::default()
    }

    /// Γ + L: adds `l` to the accumulator of every general entry.
    pub fn plus(&self, l: &LabelSet) -> Gamma {
        let mut out = self.clone();
        for e in out.0.values_mut() {
            if let Entry::General { acc, .. } = e {
                acc.extend(l.iter().cloned());
            }
        }
        out
    }

    pub fn bind(&self, x: &Name, e: Entry) -> Gamma {
        let mut out = self.clone();
        out.0.insert(x.clone(), e);
        out
    }
}

/// M(Γ): the accumulators of general entries and the bounds of primitive ones.
pub fn m_of(g: &Gamma) -> LabelSet {
    g.0.values()
        .flat_map(|e| match e {
            Entry::General { acc, .. } => acc.iter(),
            Entry::Primitive { bound, .. } => bound.iter(),
        })
        .cloned()
        .collect()
}

/// std(Γ): forgets everything but the environments.
pub fn std_of(g: &Gamma) -> StdCtx {
    g.0.iter().map(|(x, e)| (x.clone(), e.env().clone())).collect()
}

/// Γ; L of a judgement.
#[derive(Clone, Debug, Default)]
pub struct LiveCtx {
    pub gamma: Gamma,
    pub pending: LabelSet,
}

/// 𝒜(P): labels every run of P that does not stop at a call is bound to
/// select.
pub fn approx_a(p: &Process) -> LabelSet {
    match p {
        Process::Inact | Process::Call { .. } => LabelSet::new(),
        Process::Send { cont, .. } | Process::Recv { cont, .. } => approx_a(cont),
        Process::Select { label, cont, .. } => {
            let mut a = approx_a(cont);
            a.insert(label.clone());
            a
        }
        Process::Branch { arms, .. } => {
            let mut it = arms.iter().map(|(l, q)| {
                let mut a = approx_a(q);
                a.insert(l.clone());
                a
            });
            let first = it.next().unwrap_or_default();
            it.fold(first, |acc, a| acc.intersection(&a).cloned().collect())
        }
        Process::Par(l, r) => approx_a(l).union(&approx_a(r)).cloned().collect(),
        Process::Rec { body, .. } => approx_a(body),
        Process::Loop { after, .. } => approx_a(after),
        Process::If { then, otherwise, .. } => {
            approx_a(then).intersection(&approx_a(otherwise)).cloned().collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum InvariantSource {
    Annotation,
    Candidate,
    Search,
}

/// How the invariant of a `rec` was found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantChoice {
    pub chosen: LabelSet,
    /// 𝒜(body) ∪ L, tried first when there is no annotation.
    pub candidate: LabelSet,
    pub source: InvariantSource,
}

/// One node of a derivation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Judgement {
    pub rule: &'static str,
    #[serde(serialize_with = "super::path_string")]
    pub path: Vec<PathStep>,
    pub pending: LabelSet,
    /// M(Γ) at this node.
    pub m: LabelSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant: Option<InvariantChoice>,
    /// The L′ chosen for a primitive recursion.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<LabelSet>,
}

/// The successful derivation, judgements in pre-order.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Derivation {
    pub judgements: Vec<Judgement>,
}

impl Derivation {
    pub fn root(&self) -> &Judgement {
        &self.judgements[0]
    }

    pub fn invariants(&self) -> impl Iterator<Item = (&[PathStep], &InvariantChoice)> {
        self.judgements
            .iter()
            .filter_map(|j| j.invariant.as_ref().map(|i| (j.path.as_slice(), i)))
    }
}

/// Largest pending set for which every split over `|` is tried.
const MAX_SPLIT: usize = 10;
/// Largest |candidate ∖ L| for which invariant subsets are searched.
const MAX_SEARCH: usize = 8;
/// Judgements visited before the checker gives up.
const BUDGET: usize = 2_000_000;

/// Γ; L ⊢ P ▹ Δ.
pub fn check_live(ctx: &LiveCtx, p: &Process, env: &TypeEnv) -> Result<Derivation, TypeError> {
    rules::conventions(p)?;
    let checker = Checker { visits: Cell::new(0) };
    let mut path = Vec::new();
    let mut judgements = Vec::new();
    checker.check(&ctx.gamma, &ctx.pending, p, env, &mut path, &mut judgements)?;
    Ok(Derivation { judgements })
}

/// ·; ∅ ⊢ P ▹ Δ.
pub fn check_live_closed(p: &Process, env: &TypeEnv) -> Result<Derivation, TypeError> {
    check_live(&LiveCtx::default(), p, env)
}

/// The invariant the checker settles on for `rec X. body` typed from an
/// empty context.
pub fn synth_invariant(p: &Process, env: &TypeEnv) -> Result<LabelSet, TypeError> {
    if !matches!(p, Process::Rec { .. }) {
        return Err(TypeError::new("E-Rec", &[], "a rec", p.to_string()));
    }
    let d = check_live_closed(p, env)?;
    Ok(d.root().invariant.as_ref().unwrap().chosen.clone())
}

struct Checker {
    visits: Cell<usize>,
}

type Out = Vec<Judgement>;

impl Checker {
    fn check(
        &self,
        g: &Gamma,
        pending: &LabelSet,
        p: &Process,
        env: &TypeEnv,
        path: &mut Vec<PathStep>,
        out: &mut Out,
    ) -> Result<(), TypeError> {
        self.visits.set(self.visits.get() + 1);
        if self.visits.get() > BUDGET {
            return Err(TypeError::new("Unsupported", path, "a derivation within budget", "budget exhausted"));
        }
        let at = out.len();
        let here = path.clone();
        let node = |rule: &'static str| Judgement {
            rule,
            path: here.clone(),
            pending: pending.clone(),
            m: m_of(g),
            invariant: None,
            bound: None,
        };
        match p {
            Process::Send { chan, cont, .. } => {
                let env = rules::out(env, chan, "E-Out", path)?;
                out.push(node("E-Out"));
                self.sub(PathStep::Cont, g, pending, cont, &env, path, out)
            }
            Process::Recv { chan, cont, .. } => {
                let env = rules::inp(env, chan, "E-In", path)?;
                out.push(node("E-In"));
                self.sub(PathStep::Cont, g, pending, cont, &env, path, out)
            }
            Process::Select { chan, label, cont } => {
                let (env, req) = rules::sel(env, chan, label, "E-Sel", path)?;
                out.push(node("E-Sel"));
                let (g, pending) = after_selection(g, pending, label, &req);
                self.sub(PathStep::Cont, &g, &pending, cont, &env, path, out)
            }
            Process::Branch { chan, arms } => {
                let envs = rules::bra(env, chan, arms, "E-Bra", path)?;
                out.push(node("E-Bra"));
                for (i, ((l, q), (env, req))) in arms.iter().zip(envs).enumerate() {
                    let (g, pending) = after_selection(g, pending, l, &req);
                    self.sub(PathStep::Arm(i), &g, &pending, q, &env, path, out)?;
                }
                Ok(())
            }
            Process::Inact => {
                if !pending.is_empty() {
                    return Err(TypeError::new("E-Inact", path, "no pending responses", fmt_labels(pending))
                        .pending(pending.clone()));
                }
                rules::completed(env, "E-Inact", path)?;
                out.push(node("E-Inact"));
                Ok(())
            }
            Process::Par(l, r) => {
                let (el, er) = env.split(&l.free_names());
                out.push(node("E-Par"));
                let mut first_err = None;
                for (l1, l2) in splits(pending, &approx_a(l), &approx_a(r), path)? {
                    let mut tmp = Vec::new();
                    let res = self
                        .sub(PathStep::ParL, g, &l1, l, &el, path, &mut tmp)
                        .and_then(|_| self.sub(PathStep::ParR, g, &l2, r, &er, path, &mut tmp));
                    match res {
                        Ok(()) => {
                            out.extend(tmp);
                            return Ok(());
                        }
                        Err(e) if e.is_unsupported() => return Err(e),
                        Err(e) => {
                            first_err.get_or_insert(e);
                        }
                    }
                }
                out.truncate(at);
                Err(first_err.unwrap())
            }
            Process::Rec { var, invariant, body } => {
                let candidate: LabelSet = approx_a(body).union(pending).cloned().collect();
                let mut first_err = None;
                for (inv, source) in invariant_candidates(invariant.as_ref(), &candidate, pending, path)? {
                    if !pending.is_subset(&inv) {
                        first_err.get_or_insert(
                            TypeError::new("E-Rec", path, "L ⊆ I", format!("L={}, I={}", fmt_labels(pending), fmt_labels(&inv)))
                                .pending(pending.difference(&inv).cloned().collect()),
                        );
                        continue;
                    }
                    let entry = Entry::General {
                        acc: LabelSet::new(),
                        inv: inv.clone(),
                        env: env.clone(),
                    };
                    let mut tmp = Vec::new();
                    match self.sub(PathStep::RecBody, &g.bind(var, entry), &inv, body, env, path, &mut tmp) {
                        Ok(()) => {
                            let mut j = node("E-Rec");
                            j.invariant = Some(InvariantChoice {
                                chosen: inv,
                                candidate,
                                source,
                            });
                            out.push(j);
                            out.extend(tmp);
                            return Ok(());
                        }
                        Err(e) if e.is_unsupported() => return Err(e),
                        Err(e) => {
                            first_err.get_or_insert(e);
                        }
                    }
                }
                Err(first_err.unwrap())
            }
            Process::Loop { var, body, after, .. } => {
                // the least L' ⊇ L the body supports; anything larger only
                // makes the continuation harder
                let mut bound = pending.clone();
                let body_nodes = loop {
                    let entry = Entry::Primitive {
                        bound: bound.clone(),
                        env: env.clone(),
                    };
                    let mut tmp = Vec::new();
                    match self.sub(PathStep::LoopBody, &g.bind(var, entry), &bound, body, env, path, &mut tmp) {
                        Ok(()) => break tmp,
                        Err(e)
                            if e.rule == "E-VarP"
                                && e.var.as_ref() == Some(var)
                                && !e.pending_left.is_subset(&bound) =>
                        {
                            bound.extend(e.pending_left.iter().cloned());
                        }
                        Err(e) => return Err(e),
                    }
                };
                let mut j = node("E-RecP");
                j.bound = Some(bound.clone());
                out.push(j);
                out.extend(body_nodes);
                self.sub(PathStep::LoopAfter, g, &bound, after, env, path, out)
            }
            Process::Call { var, chans } => {
                let with_var = |e: TypeError| TypeError { var: Some(var.clone()), ..e };
                match g.0.get(var) {
                    Some(Entry::General { acc, inv, env: bound }) => {
                        rules::call(env, bound, chans, "E-Var", path).map_err(with_var)?;
                        if !(pending.is_subset(inv) && inv.is_subset(acc)) {
                            let left: LabelSet = pending
                                .difference(inv)
                                .chain(inv.difference(acc))
                                .cloned()
                                .collect();
                            return Err(with_var(
                                TypeError::new(
                                    "E-Var",
                                    path,
                                    "L ⊆ I ⊆ A",
                                    format!(
                                        "L={}, I={}, A={}",
                                        fmt_labels(pending),
                                        fmt_labels(inv),
                                        fmt_labels(acc)
                                    ),
                                )
                                .pending(left),
                            ));
                        }
                        out.push(node("E-Var"));
                        Ok(())
                    }
                    Some(Entry::Primitive { bound, env: benv }) => {
                        rules::call(env, benv, chans, "E-VarP", path).map_err(with_var)?;
                        if !pending.is_subset(bound) {
                            return Err(with_var(
                                TypeError::new(
                                    "E-VarP",
                                    path,
                                    "L ⊆ L'",
                                    format!("L={}, L'={}", fmt_labels(pending), fmt_labels(bound)),
                                )
                                .pending(pending.difference(bound).cloned().collect()),
                            ));
                        }
                        out.push(node("E-VarP"));
                        Ok(())
                    }
                    None => Err(with_var(TypeError::new("E-Var", path, format!("{var} bound"), "unbound"))),
                }
            }
            Process::If { then, otherwise, .. } => {
                out.push(node("E-Cond"));
                self.sub(PathStep::Then, g, pending, then, env, path, out)?;
                self.sub(PathStep::Else, g, pending, otherwise, env, path, out)
            }
        }
        .inspect_err(|_| out.truncate(at))
    }

    #[allow(clippy::too_many_arguments)]
    fn sub(
        &self,
        step: PathStep,
        g: &Gamma,
        pending: &LabelSet,
        p: &Process,
        env: &TypeEnv,
        path: &mut Vec<PathStep>,
        out: &mut Out,
    ) -> Result<(), TypeError> {
        path.push(step);
        let r = self.check(g, pending, p, env, path, out);
        path.pop();
        r
    }
}

fn after_selection(g: &Gamma, pending: &LabelSet, l: &Label, req: &LabelSet) -> (Gamma, LabelSet) {
    let mut next = pending.clone();
    next.remove(l);
    next.extend(req.iter().cloned());
    (g.plus(&[l.clone()].into_iter().collect()), next)
}

/// Splits of L over `P₁ | P₂`: first by what each side is bound to select,
/// then every partition.
fn splits(
    pending: &LabelSet,
    a_left: &LabelSet,
    a_right: &LabelSet,
    path: &[PathStep],
) -> Result<Vec<(LabelSet, LabelSet)>, TypeError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |l1: LabelSet, l2: LabelSet, out: &mut Vec<_>| {
        if seen.insert((l1.clone(), l2.clone())) {
            out.push((l1, l2));
        }
    };
    let left: LabelSet = pending.intersection(a_left).cloned().collect();
    push(left.clone(), pending.difference(&left).cloned().collect(), &mut out);
    let right: LabelSet = pending.intersection(a_right).cloned().collect();
    push(pending.difference(&right).cloned().collect(), right, &mut out);
    let items: Vec<&Label> = pending.iter().collect();
    if items.len() > MAX_SPLIT {
        if out.len() < 2 {
            return Ok(out);
        }
        return Err(TypeError::new(
            "Unsupported",
            path,
            format!("at most {MAX_SPLIT} pending labels at a parallel split"),
            fmt_labels(pending),
        ));
    }
    for mask in 0u32..(1 << items.len()) {
        let (mut l1, mut l2) = (LabelSet::new(), LabelSet::new());
        for (i, l) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                l1.insert((*l).clone());
            } else {
                l2.insert((*l).clone());
            }
        }
        push(l1, l2, &mut out);
    }
    Ok(out)
}

/// Invariants to try for a `rec`: the annotation alone if there is one,
/// otherwise the candidate and then its subsets containing L, largest first.
fn invariant_candidates(
    annotation: Option<&LabelSet>,
    candidate: &LabelSet,
    pending: &LabelSet,
    path: &[PathStep],
) -> Result<Vec<(LabelSet, InvariantSource)>, TypeError> {
    if let Some(a) = annotation {
        return Ok(vec![(a.clone(), InvariantSource::Annotation)]);
    }
    let free: Vec<&Label> = candidate.difference(pending).collect();
    let mut out = vec![(candidate.clone(), InvariantSource::Candidate)];
    if free.len() > MAX_SEARCH {
        // only the candidate is tried; its failure is then reported as is
        let _ = path;
        return Ok(out);
    }
    let mut subsets: Vec<LabelSet> = (0u32..(1 << free.len()) - 1)
        .map(|mask| {
            let mut s = pending.clone();
            for (i, l) in free.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    s.insert((*l).clone());
                }
            }
            s
        })
        .collect();
    subsets.sort_by_key(|s| std::cmp::Reverse(s.len()));
    out.extend(subsets.into_iter().map(|s| (s, InvariantSource::Search)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{labels, parse_process, parse_type, Chan};

    fn env1(k: &str, t: &str) -> TypeEnv {
        TypeEnv::from_entries([(Chan::plus(k), parse_type(t).unwrap())])
    }

    const AB: &str = "mu t. +{ a[b].t, b[a].t }";

    #[test]
    fn alternating_loop() {
        let p = parse_process("rec X. k+<<a.k+<<b.X(k+)").unwrap();
        let d = check_live_closed(&p, &env1("k", AB)).unwrap();
        let inv = d.root().invariant.clone().unwrap();
        assert_eq!(inv.chosen, labels(["a", "b"]));
        assert_eq!(inv.source, InvariantSource::Candidate);
        // the annotated invariant {a} is accepted as well
        let p = parse_process("rec X invariant {a}. k+<<a.k+<<b.X(k+)").unwrap();
        assert!(check_live_closed(&p, &env1("k", AB)).is_ok());
        let rules: Vec<_> = check_live_closed(&p, &env1("k", AB))
            .unwrap()
            .judgements
            .iter()
            .map(|j| (j.rule, j.pending.clone(), j.m.clone()))
            .collect();
        assert_eq!(
            rules,
            vec![
                ("E-Rec", labels([]), labels([])),
                ("E-Sel", labels(["a"]), labels([])),
                ("E-Sel", labels(["b"]), labels(["a"])),
                ("E-Var", labels(["a"]), labels(["a", "b"])),
            ]
        );
    }

    #[test]
    fn request_never_answered() {
        let p = parse_process("rec X. k+<<a.X(k+)").unwrap();
        let e = check_live_closed(&p, &env1("k", AB)).unwrap_err();
        assert_eq!(e.rule, "E-Var");
        assert_eq!(e.pending_left, labels(["b"]));
        // standard typing is unaffected
        assert!(super::super::check_std(&StdCtx::new(), &p, &env1("k", AB)).is_ok());
    }

    #[test]
    fn finite_processes_must_discharge_before_stopping() {
        let t = "+{ a[b].+{ b.end, c.end } }";
        assert!(check_live_closed(&parse_process("k+<<a.k+<<b.0").unwrap(), &env1("k", t)).is_ok());
        let e = check_live_closed(&parse_process("k+<<a.k+<<c.0").unwrap(), &env1("k", t)).unwrap_err();
        assert_eq!(e.rule, "E-Inact");
        assert_eq!(e.pending_left, labels(["b"]));
    }

    #[test]
    fn pending_split_over_parallel() {
        let env = TypeEnv::from_entries([
            (Chan::plus("h"), parse_type("+{ a.end }").unwrap()),
            (Chan::plus("j"), parse_type("+{ b.end }").unwrap()),
        ]);
        let p = parse_process("h+<<a.0 | j+<<b.0").unwrap();
        let ctx = LiveCtx {
            gamma: Gamma::new(),
            pending: labels(["a", "b"]),
        };
        assert!(check_live(&ctx, &p, &env).is_ok());
        let ctx = LiveCtx {
            gamma: Gamma::new(),
            pending: labels(["a", "c"]),
        };
        assert!(check_live(&ctx, &p, &env).is_err());
    }

    #[test]
    fn primitive_recursion_bound() {
        let t = "+{ go[done].mu s.+{ step.s, done.end } }";
        let p = parse_process("k+<<go.loop Y (i < 3) { k+<<step.Y(k+) } then { k+<<done.0 }").unwrap();
        let d = check_live_closed(&p, &env1("k", t)).unwrap();
        let j = d.judgements.iter().find(|j| j.rule == "E-RecP").unwrap();
        assert_eq!(j.bound, Some(labels(["done"])));
        let p = parse_process("k+<<go.loop Y (i < 3) { k+<<step.Y(k+) } then { k+<<step.0 }").unwrap();
        assert!(check_live_closed(&p, &env1("k", "+{ go[done].mu s.+{ step.s, done.end } }")).is_err());
    }

    #[test]
    fn approximation_clauses() {
        assert!(approx_a(&Process::Inact).is_empty());
        assert_eq!(approx_a(&Process::select(Chan::plus("k"), "l", Process::Inact)), labels(["l"]));
        let p = parse_process("k+>>{ a: k+<<c.0, b: k+<<c.k+<<d.0 }").unwrap();
        assert_eq!(approx_a(&p), labels(["c"]));
        let p = parse_process("if x then k+<<a.0 else k+<<b.0").unwrap();
        assert!(approx_a(&p).is_empty());
        let p = parse_process("loop Y (i < 2) { k+<<a.Y(k+) } then { k+<<b.0 }").unwrap();
        assert_eq!(approx_a(&p), labels(["b"]));
    }

    #[test]
    fn gamma_operations() {
        let env = TypeEnv::new();
        let g = Gamma::new()
            .bind(&Name::from("X"), Entry::General { acc: labels(["a", "b"]), inv: labels(["a"]), env: env.clone() })
            .bind(&Name::from("Y"), Entry::Primitive { bound: labels(["c"]), env: env.clone() });
        assert_eq!(m_of(&g), labels(["a", "b", "c"]));
        assert!(m_of(&Gamma::new()).is_empty());
        let g2 = g.plus(&labels(["z"]));
        assert_eq!(m_of(&g2), labels(["a", "b", "c", "z"]));
        assert_eq!(g2.0[&Name::from("Y")], g.0[&Name::from("Y")]);
        let s = std_of(&g);
        assert_eq!(s.len(), 2);
        assert_eq!(s[&Name::from("X")], env);
        let only_x = Gamma::new().bind(&Name::from("X"), Entry::General { acc: LabelSet::new(), inv: labels(["a"]), env });
        assert!(m_of(&only_x).is_empty());
    }
}
