//! Prefix occurrences and their residuals across transitions.
//!
//! An occurrence is named by the path from the root to a communication
//! prefix. Residuals are computed from the [`Derivation`] of a transition:
//! a prefix fired by the rule at a leaf is executed, occurrences in untouched
//! parallel components or continuations are preserved (possibly at a new
//! path), and everything else (arms not taken, the idle part of a loop or
//! conditional) is discarded. Occurrences inside a freshly unfolded copy of a
//! recursion are new.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::syntax::{Name, PathStep, Process, Value};

use super::eval::{guard, loop_count, Env, Primitives};
use super::step::{step, unfold_rec, unroll_loop, Derivation};

pub type Path = Vec<PathStep>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Residual {
    Executed,
    Preserved(Path),
    Discarded,
}

/// Every communication prefix of `p`, in pre-order.
pub fn occurrences(p: &Process) -> Vec<Path> {
    p.subterms()
        .into_iter()
        .filter(|(_, q)| q.is_prefix())
        .map(|(path, _)| path)
        .collect()
}

/// Prefixes not nested under another prefix. Recursion bodies count as
/// unguarded; of a conditional only the branch its guard selects does, and
/// of a loop only the body (while iterations remain) or the continuation.
pub fn top_level(p: &Process, prims: &Primitives) -> Vec<Path> {
    fn go(p: &Process, path: &mut Path, env: &mut Env, prims: &Primitives, out: &mut Vec<Path>) {
        let mut descend = |step: PathStep, q: &Process, env: &mut Env, out: &mut Vec<Path>| {
            path.push(step);
            go(q, path, env, prims, out);
            path.pop();
        };
        match p {
            _ if p.is_prefix() => out.push(path.clone()),
            Process::Par(l, r) => {
                descend(PathStep::ParL, l, env, out);
                descend(PathStep::ParR, r, env, out);
            }
            Process::Rec { body, .. } => descend(PathStep::RecBody, body, env, out),
            Process::Loop {
                index,
                count,
                body,
                after,
                ..
            } => {
                let n = loop_count(count, env, prims);
                if n > 0 {
                    let saved = env.insert(index.clone(), Value::Int(n - 1));
                    descend(PathStep::LoopBody, body, env, out);
                    restore(env, index, saved);
                } else {
                    descend(PathStep::LoopAfter, after, env, out);
                }
            }
            Process::If {
                cond,
                then,
                otherwise,
            } => {
                if guard(cond, env, prims) {
                    descend(PathStep::Then, then, env, out)
                } else {
                    descend(PathStep::Else, otherwise, env, out)
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(p, &mut Vec::new(), &mut Env::new(), prims, &mut out);
    out
}

fn restore(env: &mut Env, x: &Name, saved: Option<Value>) {
    match saved {
        Some(v) => {
            env.insert(x.clone(), v);
        }
        None => {
            env.remove(x);
        }
    }
}

fn prepend(step: PathStep, mut path: Path) -> Path {
    path.insert(0, step);
    path
}

/// The unfolded process a `Rec`/`PrecSucc` derivation continues from.
fn unfolding(p: &Process, prims: &Primitives) -> Process {
    match p {
        Process::Rec { .. } => unfold_rec(p),
        Process::Loop { count, .. } => {
            unroll_loop(p, loop_count(count, &Env::new(), prims) - 1)
        }
        _ => panic!("no unfolding for this process"),
    }
}

/// Maps a path in the unfolding of `p` (a `rec` or `loop`) back to `p`. Paths
/// that enter a substituted copy of `p` resolve to the matching position in
/// `p` itself.
fn origin_in_unfolding(p: &Process, path: &[PathStep]) -> Path {
    let (var, body, into) = match p {
        Process::Rec { var, body, .. } => (var, body, PathStep::RecBody),
        Process::Loop { var, body, .. } => (var, body, PathStep::LoopBody),
        _ => unreachable!(),
    };
    let mut node: &Process = body;
    for (i, step) in path.iter().enumerate() {
        match node {
            Process::Call { var: y, .. } if y == var => return path[i..].to_vec(),
            // An inner binder of the same variable stops the substitution.
            Process::Rec { var: y, .. } if y == var => break,
            Process::Loop { var: y, .. } if y == var && *step == PathStep::LoopBody => break,
            _ => {}
        }
        match node.child(*step) {
            Some(c) => node = c,
            None => break,
        }
    }
    if let Process::Call { var: y, .. } = node {
        if y == var {
            return Vec::new();
        }
    }
    prepend(into, path.to_vec())
}

/// Occurrences of `p` consumed by the transition with derivation `d`.
pub fn executed(p: &Process, d: &Derivation, prims: &Primitives) -> Vec<Path> {
    match (d, p) {
        (Derivation::Prefix | Derivation::Branch(_), _) => vec![Vec::new()],
        (Derivation::ParL(d), Process::Par(l, _)) => executed(l, d, prims)
            .into_iter()
            .map(|q| prepend(PathStep::ParL, q))
            .collect(),
        (Derivation::ParR(d), Process::Par(_, r)) => executed(r, d, prims)
            .into_iter()
            .map(|q| prepend(PathStep::ParR, q))
            .collect(),
        (Derivation::Com { left, right }, Process::Par(l, r)) => {
            let mut out: Vec<Path> = executed(l, left, prims)
                .into_iter()
                .map(|q| prepend(PathStep::ParL, q))
                .collect();
            out.extend(
                executed(r, right, prims)
                    .into_iter()
                    .map(|q| prepend(PathStep::ParR, q)),
            );
            out
        }
        (Derivation::Rec(d) | Derivation::PrecSucc(d), _) => {
            let u = unfolding(p, prims);
            executed(&u, d, prims)
                .into_iter()
                .map(|q| origin_in_unfolding(p, &q))
                .collect()
        }
        (Derivation::PrecZero(d), Process::Loop { after, .. }) => executed(after, d, prims)
            .into_iter()
            .map(|q| prepend(PathStep::LoopAfter, q))
            .collect(),
        (Derivation::CondT(d), Process::If { then, .. }) => executed(then, d, prims)
            .into_iter()
            .map(|q| prepend(PathStep::Then, q))
            .collect(),
        (Derivation::CondF(d), Process::If { otherwise, .. }) => executed(otherwise, d, prims)
            .into_iter()
            .map(|q| prepend(PathStep::Else, q))
            .collect(),
        _ => panic!("derivation does not match process"),
    }
}

/// What becomes of the occurrence at `occ` in `p` under derivation `d`.
pub fn residual(p: &Process, d: &Derivation, occ: &[PathStep], prims: &Primitives) -> Residual {
    let map = |r: Residual, step: PathStep| match r {
        Residual::Preserved(q) => Residual::Preserved(prepend(step, q)),
        other => other,
    };
    let (head, rest) = match occ.split_first() {
        Some((h, r)) => (Some(*h), r),
        None => (None, occ),
    };
    match (d, p) {
        (Derivation::Prefix, _) => match head {
            None => Residual::Executed,
            Some(PathStep::Cont) => Residual::Preserved(rest.to_vec()),
            _ => Residual::Discarded,
        },
        (Derivation::Branch(i), _) => match head {
            None => Residual::Executed,
            Some(PathStep::Arm(j)) if j == *i => Residual::Preserved(rest.to_vec()),
            _ => Residual::Discarded,
        },
        (Derivation::ParL(d), Process::Par(l, _)) => match head {
            Some(PathStep::ParL) => map(residual(l, d, rest, prims), PathStep::ParL),
            Some(PathStep::ParR) => Residual::Preserved(occ.to_vec()),
            _ => Residual::Discarded,
        },
        (Derivation::ParR(d), Process::Par(_, r)) => match head {
            Some(PathStep::ParR) => map(residual(r, d, rest, prims), PathStep::ParR),
            Some(PathStep::ParL) => Residual::Preserved(occ.to_vec()),
            _ => Residual::Discarded,
        },
        (Derivation::Com { left, right }, Process::Par(l, r)) => match head {
            Some(PathStep::ParL) => map(residual(l, left, rest, prims), PathStep::ParL),
            Some(PathStep::ParR) => map(residual(r, right, rest, prims), PathStep::ParR),
            _ => Residual::Discarded,
        },
        (Derivation::Rec(d), _) => match head {
            Some(PathStep::RecBody) => residual(&unfolding(p, prims), d, rest, prims),
            _ => Residual::Discarded,
        },
        (Derivation::PrecSucc(d), _) => match head {
            Some(PathStep::LoopBody) => residual(&unfolding(p, prims), d, rest, prims),
            _ => Residual::Discarded,
        },
        (Derivation::PrecZero(d), Process::Loop { after, .. }) => match head {
            Some(PathStep::LoopAfter) => residual(after, d, rest, prims),
            _ => Residual::Discarded,
        },
        (Derivation::CondT(d), Process::If { then, .. }) => match head {
            Some(PathStep::Then) => residual(then, d, rest, prims),
            _ => Residual::Discarded,
        },
        (Derivation::CondF(d), Process::If { otherwise, .. }) => match head {
            Some(PathStep::Else) => residual(otherwise, d, rest, prims),
            _ => Residual::Discarded,
        },
        _ => panic!("derivation does not match process"),
    }
}

/// Occurrences executed by at least one transition of `p`.
pub fn enabled(p: &Process, prims: &Primitives, values: &[Value]) -> BTreeSet<Path> {
    step(p, prims, values)
        .iter()
        .flat_map(|t| executed(p, &t.derivation, prims))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::step::default_values;
    use crate::syntax::parse_process;

    fn prims() -> Primitives {
        Primitives::shopping()
    }

    #[test]
    fn occurrence_counts() {
        assert!(occurrences(&Process::Inact).is_empty());
        let p = parse_process("k+!(5).k+!(6).0").unwrap();
        assert_eq!(occurrences(&p).len(), 2);
        assert_eq!(top_level(&p, &prims()), vec![Vec::<PathStep>::new()]);
    }

    #[test]
    fn communicating_pair_is_enabled_on_both_sides() {
        let p = parse_process("c+!(1).0 | c-?(x).0").unwrap();
        let e = enabled(&p, &prims(), &default_values());
        assert_eq!(
            e,
            [vec![PathStep::ParL], vec![PathStep::ParR]].into_iter().collect()
        );
        let t = top_level(&p, &prims());
        assert!(e.iter().all(|o| t.contains(o)));
    }

    #[test]
    fn residuals_under_parallel() {
        let p = parse_process("k+<<a.k+<<b.0 | h+<<c.0").unwrap();
        let ts = step(&p, &prims(), &default_values());
        let left = ts.iter().find(|t| t.label.to_string() == "k+<<a").unwrap();
        assert_eq!(
            residual(&p, &left.derivation, &[PathStep::ParL], &prims()),
            Residual::Executed
        );
        assert_eq!(
            residual(&p, &left.derivation, &[PathStep::ParR], &prims()),
            Residual::Preserved(vec![PathStep::ParR])
        );
        assert_eq!(
            residual(&p, &left.derivation, &[PathStep::ParL, PathStep::Cont], &prims()),
            Residual::Preserved(vec![PathStep::ParL])
        );
    }

    #[test]
    fn recursion_executes_its_body_prefix() {
        let p = parse_process("rec X. k+<<a.k+<<b.X(k+)").unwrap();
        let ts = step(&p, &prims(), &default_values());
        assert_eq!(
            executed(&p, &ts[0].derivation, &prims()),
            vec![vec![PathStep::RecBody]]
        );
        assert_eq!(
            residual(&p, &ts[0].derivation, &[PathStep::RecBody, PathStep::Cont], &prims()),
            Residual::Preserved(vec![])
        );
    }

    #[test]
    fn loop_body_and_continuation() {
        let running = parse_process("loop X (i < 2) { k+<<a.X(k+) } then { h+<<b.0 }").unwrap();
        assert_eq!(top_level(&running, &prims()), vec![vec![PathStep::LoopBody]]);
        let ts = step(&running, &prims(), &default_values());
        assert_eq!(
            executed(&running, &ts[0].derivation, &prims()),
            vec![vec![PathStep::LoopBody]]
        );
        let done = parse_process("loop X (i < 0) { k+<<a.X(k+) } then { h+<<b.0 }").unwrap();
        assert_eq!(top_level(&done, &prims()), vec![vec![PathStep::LoopAfter]]);
    }

    #[test]
    fn loop_index_is_bound_when_locating_top_level_prefixes() {
        let p = parse_process(
            "loop X (i < 2) { if i = 1 then k+<<a.X(k+) else k+<<b.X(k+) } then { 0 }",
        )
        .unwrap();
        assert_eq!(
            top_level(&p, &prims()),
            vec![vec![PathStep::LoopBody, PathStep::Then]]
        );
        let e = enabled(&p, &prims(), &default_values());
        assert_eq!(e, [vec![PathStep::LoopBody, PathStep::Then]].into_iter().collect());
    }

    #[test]
    fn unfolded_copies_map_back_to_the_original() {
        // The unguarded call puts a copy of the recursion beside the body.
        let p = parse_process("rec X. (k+<<a.0 | X(k+))").unwrap();
        let ts = step(&p, &prims(), &default_values());
        for t in &ts {
            for o in executed(&p, &t.derivation, &prims()) {
                assert!(p.subterm(&o).unwrap().is_prefix(), "{o:?}");
            }
        }
    }
}
