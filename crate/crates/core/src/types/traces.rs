use std::collections::BTreeSet;

use serde::Serialize;

use crate::semantics::liveness;
use crate::syntax::{labels, parse_type, Label, SessionType};

use super::{TypeAutomaton, TypeLabel};

/// An ultimately periodic trace `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Lasso {
    pub prefix: Vec<TypeLabel>,
    pub cycle: Vec<TypeLabel>,
}

impl Lasso {
    pub fn new(prefix: Vec<TypeLabel>, cycle: Vec<TypeLabel>) -> Lasso {
        Lasso { prefix, cycle }.normalized()
    }

    /// Shortest primitive cycle, then the shortest prefix obtained by
    /// rotating the cycle backwards into it. Equal ω-words normalize equally.
    pub fn normalized(mut self) -> Lasso {
        let n = self.cycle.len();
        if let Some(p) = (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.cycle[i] == self.cycle[i - p])) {
            self.cycle.truncate(p);
        }
        while !self.cycle.is_empty() && self.prefix.last() == self.cycle.last() {
            self.prefix.pop();
            self.cycle.rotate_right(1);
        }
        self
    }

    pub fn responsive(&self) -> bool {
        liveness::is_live_lasso(&self.prefix, &self.cycle, TypeLabel::req, TypeLabel::res)
    }
}

impl std::fmt::Display for Lasso {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for l in &self.prefix {
            write!(f, "{l} ")?;
        }
        f.write_str("(")?;
        for (i, l) in self.cycle.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str(")^w")
    }
}

/// A finite trace is responsive when every request is answered later on.
pub fn responsive(trace: &[TypeLabel]) -> bool {
    liveness::is_live_finite(trace, TypeLabel::req, TypeLabel::res)
}

pub fn responsive_lasso(l: &Lasso) -> bool {
    l.responsive()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct TypeTraces {
    /// Every path from the initial state of length at most the depth,
    /// including the empty one.
    pub finite: Vec<Vec<TypeLabel>>,
    /// Paths that reached `end`.
    pub terminated: Vec<Vec<TypeLabel>>,
    pub lassos: Vec<Lasso>,
}

/// Bounded enumeration of Tr(T). Every path of length ≤ `depth` is listed;
/// whenever a path is about to re-enter a state it already visited, each
/// earlier visit closes a lasso.
pub fn type_traces(t: &SessionType, depth: usize) -> TypeTraces {
    let a = TypeAutomaton::build(t);
    let mut out = TypeTraces::default();
    let mut lassos = BTreeSet::new();
    let mut states = vec![a.initial];
    let mut path: Vec<TypeLabel> = Vec::new();
    walk(&a, depth, &mut states, &mut path, &mut out, &mut lassos);
    out.lassos = lassos.into_iter().collect();
    out
}

fn walk(
    a: &TypeAutomaton,
    depth: usize,
    states: &mut Vec<usize>,
    path: &mut Vec<TypeLabel>,
    out: &mut TypeTraces,
    lassos: &mut BTreeSet<Lasso>,
) {
    let here = *states.last().unwrap();
    out.finite.push(path.clone());
    if a.edges[here].is_empty() {
        out.terminated.push(path.clone());
        return;
    }
    for (label, next) in &a.edges[here] {
        for (j, s) in states.iter().enumerate() {
            if s == next {
                let mut cycle = path[j..].to_vec();
                cycle.push(label.clone());
                lassos.insert(Lasso::new(path[..j].to_vec(), cycle));
            }
        }
        if path.len() < depth {
            path.push(label.clone());
            states.push(*next);
            walk(a, depth, states, path, out, lassos);
            states.pop();
            path.pop();
        }
    }
}

/// The trace of `t` whose selection string is `sel`, if any. Communication
/// steps are taken eagerly, including after the last selection.
pub fn find_by_selection(t: &SessionType, sel: &[Label]) -> Option<Vec<TypeLabel>> {
    let a = TypeAutomaton::build(t);
    let mut state = a.initial;
    let mut trace = Vec::new();
    let mut rest = sel.iter();
    let mut want = rest.next();
    loop {
        let out = &a.edges[state];
        if let [(l @ (TypeLabel::Out | TypeLabel::In), next)] = out.as_slice() {
            trace.push(l.clone());
            state = *next;
            if trace.len() > sel.len() * (a.len() + 1) + a.len() {
                // a communication-only cycle; nothing further to select
                return want.is_none().then_some(trace);
            }
            continue;
        }
        let Some(w) = want else {
            return Some(trace);
        };
        let (l, next) = out.iter().find(|(l, _)| l.sel() == Some(w))?;
        trace.push(l.clone());
        state = *next;
        want = rest.next();
    }
}

/// Whether the ω-word of `l` is a trace of the automaton.
pub fn contains_lasso(a: &TypeAutomaton, l: &Lasso) -> bool {
    let mut state = a.initial;
    let step = |state: usize, lab: &TypeLabel| {
        a.edges[state]
            .iter()
            .find(|(m, _)| m == lab)
            .map(|(_, n)| *n)
    };
    for lab in &l.prefix {
        match step(state, lab) {
            Some(n) => state = n,
            None => return false,
        }
    }
    if l.cycle.is_empty() {
        return false;
    }
    // the automaton is deterministic, so after |states| rounds the cycle
    // either failed or returned to a state it had already started from
    let mut starts = BTreeSet::new();
    while starts.insert(state) {
        for lab in &l.cycle {
            match step(state, lab) {
                Some(n) => state = n,
                None => return false,
            }
        }
    }
    true
}

pub const EXPRESSIVITY_WITNESS: &str = "mu t. +{ a[b].t, b[a].t }";

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpressivityReport {
    pub depth: usize,
    pub witness: String,
    /// Smallest k ≤ depth whose aᵏ could not be extended to a responsive
    /// trace; `None` when all could.
    pub first_unextendable: Option<usize>,
    pub a_omega_in_traces: bool,
    pub a_omega_responsive: bool,
    pub b_omega_in_traces: bool,
    pub b_omega_responsive: bool,
    pub separation_holds: bool,
}

/// Every aᵏ extends to the responsive trace aᵏb·(ab)^ω of the witness type,
/// while a^ω is a trace that is not responsive. A standard type with all the
/// aᵏ as traces also has a^ω, so no standard type has exactly these
/// responsive selection traces.
pub fn expressivity_experiment(depth: usize) -> ExpressivityReport {
    let t = parse_type(EXPRESSIVITY_WITNESS).expect("witness parses");
    let a = TypeAutomaton::build(&t);
    let la = TypeLabel::Sel(Label::new("a"), labels(["b"]));
    let lb = TypeLabel::Sel(Label::new("b"), labels(["a"]));
    let first_unextendable = (0..=depth).find(|&k| {
        let mut prefix = vec![la.clone(); k];
        prefix.push(lb.clone());
        let l = Lasso::new(prefix, vec![la.clone(), lb.clone()]);
        !(contains_lasso(&a, &l) && l.responsive())
    });
    let a_omega = Lasso::new(Vec::new(), vec![la.clone()]);
    let b_omega = Lasso::new(Vec::new(), vec![lb.clone()]);
    let listed = type_traces(&t, 1).lassos;
    let a_in = contains_lasso(&a, &a_omega) && listed.contains(&a_omega);
    let b_in = contains_lasso(&a, &b_omega) && listed.contains(&b_omega);
    let (a_resp, b_resp) = (a_omega.responsive(), b_omega.responsive());
    ExpressivityReport {
        depth,
        witness: t.to_string(),
        first_unextendable,
        a_omega_in_traces: a_in,
        a_omega_responsive: a_resp,
        b_omega_in_traces: b_in,
        b_omega_responsive: b_resp,
        separation_holds: first_unextendable.is_none() && a_in && !a_resp,
    }
}
