//! The labelled transition system on processes.

use crate::syntax::{Chan, Expr, Label, Name, Process, Value};

use super::eval::{eval, guard, loop_count, Env, Primitives};
use super::label::ProcLabel;

/// Which rules built a transition, mirroring the shape of its proof tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Derivation {
    /// Out, In or Sel on the root prefix.
    Prefix,
    /// Bra, taking arm `i`.
    Branch(usize),
    ParL(Box<Derivation>),
    ParR(Box<Derivation>),
    Com {
        left: Box<Derivation>,
        right: Box<Derivation>,
    },
    Rec(Box<Derivation>),
    PrecZero(Box<Derivation>),
    PrecSucc(Box<Derivation>),
    CondT(Box<Derivation>),
    CondF(Box<Derivation>),
}

impl Derivation {
    /// The name of the rule at the root.
    pub fn rule(&self) -> &'static str {
        match self {
            Derivation::Prefix => "S-Prefix",
            Derivation::Branch(_) => "S-Bra",
            Derivation::ParL(_) => "S-ParL",
            Derivation::ParR(_) => "S-ParR",
            Derivation::Com { .. } => "S-Com",
            Derivation::Rec(_) => "S-Rec",
            Derivation::PrecZero(_) => "S-Prec0",
            Derivation::PrecSucc(_) => "S-PrecN",
            Derivation::CondT(_) => "S-CondT",
            Derivation::CondF(_) => "S-CondF",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub label: ProcLabel,
    pub target: Process,
    pub derivation: Derivation,
}

/// Nested unfoldings allowed before a transition is given up on; only
/// unguarded recursion such as `rec X. X(k+)` exhausts it, and such terms
/// have no transitions.
const UNFOLD_FUEL: usize = 64;

enum RawLabel {
    Out(Chan, Value),
    /// An input whose variable is still free in the target.
    In(Chan, Name),
    Sel(Chan, Label),
    Bra(Chan, Label),
    Tau,
    TauSel(Label),
}

impl RawLabel {
    fn subject(&self) -> Option<&Chan> {
        match self {
            RawLabel::Out(k, _) | RawLabel::In(k, _) | RawLabel::Sel(k, _) | RawLabel::Bra(k, _) => {
                Some(k)
            }
            RawLabel::Tau | RawLabel::TauSel(_) => None,
        }
    }
}

struct Raw {
    label: RawLabel,
    target: Process,
    deriv: Derivation,
}

fn wrap(raws: Vec<Raw>, f: impl Fn(Box<Derivation>) -> Derivation) -> Vec<Raw> {
    raws.into_iter()
        .map(|r| Raw {
            label: r.label,
            target: r.target,
            deriv: f(Box::new(r.deriv)),
        })
        .collect()
}

/// One unrolling of a loop with `n + 1` iterations left:
/// the body with the index set to `n` and the loop variable replaced by the
/// loop with `n` iterations.
pub(crate) fn unroll_loop(p: &Process, n: i64) -> Process {
    let Process::Loop {
        var,
        index,
        body,
        after,
        ..
    } = p
    else {
        panic!("unroll_loop on a non-loop")
    };
    let next = Process::Loop {
        var: var.clone(),
        index: index.clone(),
        count: Expr::int(n),
        body: body.clone(),
        after: after.clone(),
    };
    body.subst_value(&Value::Int(n), index).subst_pvar(&next, var)
}

pub(crate) fn unfold_rec(p: &Process) -> Process {
    let Process::Rec { var, body, .. } = p else {
        panic!("unfold_rec on a non-rec")
    };
    body.subst_pvar(p, var)
}

fn raw_steps(p: &Process, prims: &Primitives, fuel: usize) -> Vec<Raw> {
    let env = Env::new();
    match p {
        Process::Send { chan, expr, cont } => {
            if cont.mentions(&chan.dual()) {
                return Vec::new();
            }
            vec![Raw {
                label: RawLabel::Out(chan.clone(), eval(expr, &env, prims)),
                target: (**cont).clone(),
                deriv: Derivation::Prefix,
            }]
        }
        Process::Recv { chan, var, cont } => {
            if cont.mentions(&chan.dual()) {
                return Vec::new();
            }
            vec![Raw {
                label: RawLabel::In(chan.clone(), var.clone()),
                target: (**cont).clone(),
                deriv: Derivation::Prefix,
            }]
        }
        Process::Select { chan, label, cont } => {
            if cont.mentions(&chan.dual()) {
                return Vec::new();
            }
            vec![Raw {
                label: RawLabel::Sel(chan.clone(), label.clone()),
                target: (**cont).clone(),
                deriv: Derivation::Prefix,
            }]
        }
        Process::Branch { chan, arms } => arms
            .iter()
            .enumerate()
            .filter(|(_, (_, q))| !q.mentions(&chan.dual()))
            .map(|(i, (l, q))| Raw {
                label: RawLabel::Bra(chan.clone(), l.clone()),
                target: q.clone(),
                deriv: Derivation::Branch(i),
            })
            .collect(),
        Process::Inact | Process::Call { .. } => Vec::new(),
        Process::Par(l, r) => {
            let ls = raw_steps(l, prims, fuel);
            let rs = raw_steps(r, prims, fuel);
            let mut out = Vec::new();
            for a in &ls {
                for b in &rs {
                    if let Some(c) = communicate(a, b) {
                        out.push(c);
                    }
                }
            }
            for a in &ls {
                if a.label.subject().is_none_or(|k| !r.mentions(&k.dual())) {
                    out.push(Raw {
                        label: clone_raw_label(&a.label),
                        target: Process::par(a.target.clone(), (**r).clone()),
                        deriv: Derivation::ParL(Box::new(a.deriv.clone())),
                    });
                }
            }
            for b in &rs {
                if b.label.subject().is_none_or(|k| !l.mentions(&k.dual())) {
                    out.push(Raw {
                        label: clone_raw_label(&b.label),
                        target: Process::par((**l).clone(), b.target.clone()),
                        deriv: Derivation::ParR(Box::new(b.deriv.clone())),
                    });
                }
            }
            out
        }
        Process::Rec { .. } => {
            if fuel == 0 {
                return Vec::new();
            }
            wrap(raw_steps(&unfold_rec(p), prims, fuel - 1), Derivation::Rec)
        }
        Process::Loop { count, after, .. } => {
            let n = loop_count(count, &env, prims);
            if n == 0 {
                wrap(raw_steps(after, prims, fuel), Derivation::PrecZero)
            } else {
                if fuel == 0 {
                    return Vec::new();
                }
                wrap(
                    raw_steps(&unroll_loop(p, n - 1), prims, fuel - 1),
                    Derivation::PrecSucc,
                )
            }
        }
        Process::If {
            cond,
            then,
            otherwise,
        } => {
            if guard(cond, &env, prims) {
                wrap(raw_steps(then, prims, fuel), Derivation::CondT)
            } else {
                wrap(raw_steps(otherwise, prims, fuel), Derivation::CondF)
            }
        }
    }
}

fn clone_raw_label(l: &RawLabel) -> RawLabel {
    match l {
        RawLabel::Out(k, v) => RawLabel::Out(k.clone(), v.clone()),
        RawLabel::In(k, x) => RawLabel::In(k.clone(), x.clone()),
        RawLabel::Sel(k, l) => RawLabel::Sel(k.clone(), l.clone()),
        RawLabel::Bra(k, l) => RawLabel::Bra(k.clone(), l.clone()),
        RawLabel::Tau => RawLabel::Tau,
        RawLabel::TauSel(l) => RawLabel::TauSel(l.clone()),
    }
}

/// Com1 and Com2, in either orientation; `a` is always the left component.
fn communicate(a: &Raw, b: &Raw) -> Option<Raw> {
    let com = |label, lt: Process, rt: Process| Raw {
        label,
        target: Process::par(lt, rt),
        deriv: Derivation::Com {
            left: Box::new(a.deriv.clone()),
            right: Box::new(b.deriv.clone()),
        },
    };
    match (&a.label, &b.label) {
        (RawLabel::Out(k, v), RawLabel::In(h, x)) if k.is_co_channel_of(h) => Some(com(
            RawLabel::Tau,
            a.target.clone(),
            b.target.subst_value(v, x),
        )),
        (RawLabel::In(h, x), RawLabel::Out(k, v)) if k.is_co_channel_of(h) => Some(com(
            RawLabel::Tau,
            a.target.subst_value(v, x),
            b.target.clone(),
        )),
        (RawLabel::Sel(k, l), RawLabel::Bra(h, m)) | (RawLabel::Bra(h, m), RawLabel::Sel(k, l))
            if k.is_co_channel_of(h) && l == m =>
        {
            Some(com(
                RawLabel::TauSel(l.clone()),
                a.target.clone(),
                b.target.clone(),
            ))
        }
        _ => None,
    }
}

/// All transitions of `p`. Inputs not matched by a communication are
/// instantiated once per value in `values`.
pub fn step(p: &Process, prims: &Primitives, values: &[Value]) -> Vec<Transition> {
    let mut out = Vec::new();
    for r in raw_steps(p, prims, UNFOLD_FUEL) {
        match r.label {
            RawLabel::In(k, x) => {
                for v in values {
                    out.push(Transition {
                        label: ProcLabel::In(k.clone(), v.clone()),
                        target: r.target.subst_value(v, &x),
                        derivation: r.deriv.clone(),
                    });
                }
            }
            other => out.push(Transition {
                label: match other {
                    RawLabel::Out(k, v) => ProcLabel::Out(k, v),
                    RawLabel::Sel(k, l) => ProcLabel::Sel(k, l),
                    RawLabel::Bra(k, l) => ProcLabel::Bra(k, l),
                    RawLabel::Tau => ProcLabel::Tau,
                    RawLabel::TauSel(l) => ProcLabel::TauSel(l),
                    RawLabel::In(..) => unreachable!(),
                },
                target: r.target,
                derivation: r.deriv,
            }),
        }
    }
    out
}

/// The default value domain used to instantiate open inputs.
pub fn default_values() -> Vec<Value> {
    vec![
        Value::Int(0),
        Value::Int(1),
        Value::Int(2),
        Value::Bool(true),
        Value::Bool(false),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_process;

    fn steps(src: &str) -> Vec<(String, String)> {
        let p = parse_process(src).unwrap();
        step(&p, &Primitives::shopping(), &default_values())
            .into_iter()
            .map(|t| (t.label.to_string(), t.target.to_string()))
            .collect()
    }

    #[test]
    fn output_prefix() {
        assert_eq!(steps("k+!(5).0"), vec![("k+!5".into(), "0".into())]);
        assert!(steps("0").is_empty());
    }

    #[test]
    fn co_name_in_continuation_blocks_prefix() {
        assert!(steps("k+!(5).k-<<a.0").is_empty());
        assert!(steps("k+>>{ a: k-<<b.0 }").is_empty());
    }

    #[test]
    fn input_is_instantiated_over_the_domain() {
        let s = steps("k+?(x).h+!(x).0");
        assert_eq!(s.len(), 5);
        assert!(s.contains(&("k+?2".into(), "h+!(2).0".into())));
        assert!(s.contains(&("k+?true".into(), "h+!(true).0".into())));
    }

    #[test]
    fn parallel_blocks_solo_moves_on_shared_sessions() {
        let s = steps("c+!(@v).0 | c-?(x).d+!(x).0");
        assert_eq!(s, vec![("tau".into(), "0 | d+!(@v).0".into())]);
    }

    #[test]
    fn selection_communication() {
        let s = steps("k+<<a.0 | k->>{ a: 0, b: h+<<c.0 }");
        assert_eq!(s, vec![("tau:a".into(), "0 | 0".into())]);
    }

    #[test]
    fn independent_components_interleave() {
        let s = steps("k+<<a.0 | h+<<b.0");
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn recursion_unfolds_once() {
        let s = steps("rec X. k+<<a.k+<<b.X(k+)");
        assert_eq!(
            s,
            vec![("k+<<a".into(), "k+<<b.rec X. k+<<a.k+<<b.X(k+)".into())]
        );
        assert!(steps("rec X. X(k+)").is_empty());
    }

    #[test]
    fn primitive_recursion() {
        assert_eq!(
            steps("loop X (i < 0) { k+!(i).X(k+) } then { k+<<a.0 }"),
            vec![("k+<<a".into(), "0".into())]
        );
        assert_eq!(
            steps("loop X (i < 2) { k+!(i).X(k+) } then { k+<<a.0 }"),
            vec![(
                "k+!1".into(),
                "loop X (i < 1) { k+!(i).X(k+) } then { k+<<a.0 }".into()
            )]
        );
        assert_eq!(
            steps("loop X (i < -4) { k+!(i).X(k+) } then { k+<<a.0 }"),
            vec![("k+<<a".into(), "0".into())]
        );
    }

    #[test]
    fn conditionals() {
        assert_eq!(
            steps("if 1 < 2 then k+<<a.0 else k+<<b.0"),
            vec![("k+<<a".into(), "0".into())]
        );
        assert_eq!(
            steps("if 7 then k+<<a.0 else k+<<b.0"),
            vec![("k+<<b".into(), "0".into())]
        );
    }
}
