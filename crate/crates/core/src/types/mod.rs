//! Request-response structure on type labels, the type transition system,
//! coinductive duality and equivalence, and trace analyses.

mod automaton;
mod label;
mod traces;

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};

use crate::syntax::SessionType;

pub use automaton::TypeAutomaton;
pub use label::{selection_string, TypeLabel};
pub use traces::{
    contains_lasso, expressivity_experiment, find_by_selection, responsive, responsive_lasso, type_traces,
    ExpressivityReport, Lasso, TypeTraces, EXPRESSIVITY_WITNESS,
};

/// The transitions of `t`: one per arm of a choice, one for `!`/`?`, none
/// for `end`.
pub fn type_step(t: &SessionType) -> Vec<(TypeLabel, SessionType)> {
    match t.unfold() {
        SessionType::End => Vec::new(),
        SessionType::Out(c) => vec![(TypeLabel::Out, *c)],
        SessionType::In(c) => vec![(TypeLabel::In, *c)],
        SessionType::Branch(arms) => arms
            .into_iter()
            .map(|a| (TypeLabel::Bra(a.label, a.responses), a.cont))
            .collect(),
        SessionType::Select(arms) => arms
            .into_iter()
            .map(|a| (TypeLabel::Sel(a.label, a.responses), a.cont))
            .collect(),
        SessionType::Mu(..) | SessionType::Var(_) => unreachable!("unfold leaves no binder at head"),
    }
}

type Memo = RefCell<HashMap<(SessionType, SessionType), bool>>;

/// Entries kept per memo table before it is flushed.
const MEMO_LIMIT: usize = 4096;

thread_local! {
    // Typing asks the same duality and equivalence questions over and over;
    // building the automata is what costs.
    static DUAL_MEMO: Memo = RefCell::new(HashMap::new());
    static EQUIV_MEMO: Memo = RefCell::new(HashMap::new());
}

fn memo(
    table: &'static std::thread::LocalKey<Memo>,
    t: &SessionType,
    s: &SessionType,
    f: fn(&SessionType, &SessionType) -> bool,
) -> bool {
    let key = (t.clone(), s.clone());
    if let Some(&v) = table.with(|m| m.borrow().get(&key).copied()).as_ref() {
        return v;
    }
    let v = f(t, s);
    table.with(|m| {
        let mut m = m.borrow_mut();
        if m.len() >= MEMO_LIMIT {
            m.clear();
        }
        m.insert(key, v);
    });
    v
}

/// Coinductive duality: `end ⋈ end`, `!.T ⋈ ?.T'`, and a branch is dual to a
/// select whose labels it all offers. Response sets are never compared.
pub fn is_dual(t: &SessionType, s: &SessionType) -> bool {
    memo(&DUAL_MEMO, t, s, dual_uncached)
}

fn dual_uncached(t: &SessionType, s: &SessionType) -> bool {
    let (a, b) = (TypeAutomaton::build(t), TypeAutomaton::build(s));
    let mut assumed: HashSet<(usize, usize)> = HashSet::new();
    let mut todo = vec![(a.initial, b.initial)];
    while let Some((i, j)) = todo.pop() {
        if !assumed.insert((i, j)) {
            continue;
        }
        let (x, y) = (&a.edges[i], &b.edges[j]);
        match (&a.states[i], &b.states[j]) {
            (SessionType::End, SessionType::End) => {}
            (SessionType::Out(_), SessionType::In(_)) | (SessionType::In(_), SessionType::Out(_)) => {
                todo.push((x[0].1, y[0].1))
            }
            (SessionType::Branch(_), SessionType::Select(_)) => {
                for (l, v) in y {
                    match x.iter().find(|(m, _)| m.sel() == l.sel()) {
                        Some((_, u)) => todo.push((*u, *v)),
                        None => return false,
                    }
                }
            }
            (SessionType::Select(_), SessionType::Branch(_)) => {
                for (l, u) in x {
                    match y.iter().find(|(m, _)| m.sel() == l.sel()) {
                        Some((_, v)) => todo.push((*u, *v)),
                        None => return false,
                    }
                }
            }
            _ => return false,
        }
    }
    true
}

/// Coinductive equality of the trees denoted by two types, response sets
/// included; arm order is irrelevant.
pub fn equiv(t: &SessionType, s: &SessionType) -> bool {
    if t == s {
        return true;
    }
    memo(&EQUIV_MEMO, t, s, equiv_uncached)
}

fn equiv_uncached(t: &SessionType, s: &SessionType) -> bool {
    let (a, b) = (TypeAutomaton::build(t), TypeAutomaton::build(s));
    let mut assumed: HashSet<(usize, usize)> = HashSet::new();
    let mut todo = vec![(a.initial, b.initial)];
    while let Some((i, j)) = todo.pop() {
        if !assumed.insert((i, j)) {
            continue;
        }
        let (x, y) = (&a.edges[i], &b.edges[j]);
        let same_head = matches!(
            (&a.states[i], &b.states[j]),
            (SessionType::End, SessionType::End)
                | (SessionType::Out(_), SessionType::Out(_))
                | (SessionType::In(_), SessionType::In(_))
                | (SessionType::Branch(_), SessionType::Branch(_))
                | (SessionType::Select(_), SessionType::Select(_))
        );
        if !same_head || x.len() != y.len() {
            return false;
        }
        for (l, u) in x {
            // Edge labels carry the response sets, so equal labels mean
            // equal arms.
            match y.iter().find(|(m, _)| m == l) {
                Some((_, v)) => todo.push((*u, *v)),
                None => return false,
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{labels, parse_type, Label};

    fn ty(s: &str) -> SessionType {
        parse_type(s).unwrap()
    }

    const T_D: &str = "mu t. ?. mu s. &{ read.!.s, write.t, quit.end }";
    const T_E: &str = "mu t. !. mu s. +{ read.?.s, write[read].t, quit.end }";
    const T_P: &str = "mu t. &{ AI.?.t, RI.?.t, CO[SI].?.mu s. +{ DI.!.s, SI.!.end } }";

    #[test]
    fn steps_of_basic_types() {
        assert!(type_step(&SessionType::End).is_empty());
        assert_eq!(
            type_step(&ty("!.end")),
            vec![(TypeLabel::Out, SessionType::End)]
        );
        let labels_of: Vec<TypeLabel> = type_step(&ty(T_P)).into_iter().map(|(l, _)| l).collect();
        assert_eq!(
            labels_of,
            vec![
                TypeLabel::Bra(Label::new("AI"), labels([])),
                TypeLabel::Bra(Label::new("RI"), labels([])),
                TypeLabel::Bra(Label::new("CO"), labels(["SI"])),
            ]
        );
    }

    #[test]
    fn duality_examples() {
        assert!(is_dual(&SessionType::End, &SessionType::End));
        assert!(is_dual(&ty(T_D), &ty(T_E)));
        assert!(is_dual(&ty(T_E), &ty(T_D)));
        assert!(!is_dual(&ty("!.end"), &ty("!.end")));
        assert!(is_dual(&ty(T_P), &ty(T_P).syntactic_dual()));
    }

    #[test]
    fn select_may_choose_fewer_labels_than_offered() {
        assert!(is_dual(&ty("&{a.end, b.end}"), &ty("+{a.end}")));
        assert!(!is_dual(&ty("&{a.end}"), &ty("+{a.end, b.end}")));
        assert!(is_dual(&ty("+{a.end}"), &ty("&{a.end, b.end}")));
    }

    #[test]
    fn duality_through_differently_unrolled_recursion() {
        assert!(is_dual(
            &ty("mu t. !.!.t"),
            &ty("?. mu s. ?.s")
        ));
        assert!(!is_dual(&ty("mu t. !.?.t"), &ty("mu s. ?.?.s")));
    }

    #[test]
    fn equivalence() {
        assert!(equiv(&ty("mu t. !.t"), &ty("!. mu s. !.!.s")));
        assert!(equiv(&ty("+{a.end, b.end}"), &ty("+{b.end, a.end}")));
        assert!(!equiv(&ty("+{a[b].end}"), &ty("+{a.end}")));
        assert!(!equiv(&ty("!.end"), &ty("?.end")));
        let tp = ty(T_P);
        for (_, next) in type_step(&tp) {
            let _ = equiv(&next, &tp);
        }
    }
}
