use std::collections::HashMap;
use std::fmt::Write;

use crate::syntax::SessionType;

use super::{type_step, TypeLabel};

/// The finite transition graph of a closed contractive type. States are
/// types with their head unfolded; structurally equal states are shared.
#[derive(Clone, Debug)]
pub struct TypeAutomaton {
    pub states: Vec<SessionType>,
    pub edges: Vec<Vec<(TypeLabel, usize)>>,
    pub initial: usize,
}

impl TypeAutomaton {
    pub fn build(t: &SessionType) -> TypeAutomaton {
        let mut states: Vec<SessionType> = Vec::new();
        let mut index: HashMap<SessionType, usize> = HashMap::new();
        let mut edges: Vec<Vec<(TypeLabel, usize)>> = Vec::new();
        let mut intern = |s: SessionType, states: &mut Vec<SessionType>, edges: &mut Vec<_>| {
            let s = s.unfold();
            if let Some(&i) = index.get(&s) {
                return (i, false);
            }
            index.insert(s.clone(), states.len());
            states.push(s);
            edges.push(Vec::new());
            (states.len() - 1, true)
        };
        let (initial, _) = intern(t.clone(), &mut states, &mut edges);
        let mut todo = vec![initial];
        while let Some(i) = todo.pop() {
            let succ = type_step(&states[i]);
            for (label, next) in succ {
                let (j, fresh) = intern(next, &mut states, &mut edges);
                if fresh {
                    todo.push(j);
                }
                edges[i].push((label, j));
            }
        }
        TypeAutomaton {
            states,
            edges,
            initial,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// No state has two outgoing edges selecting the same label.
    pub fn is_deterministic(&self) -> bool {
        self.edges.iter().all(|out| {
            let sels: Vec<_> = out.iter().filter_map(|(l, _)| l.sel()).collect();
            let mut dedup = sels.clone();
            dedup.sort();
            dedup.dedup();
            dedup.len() == sels.len()
        })
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph type {\n  rankdir=LR;\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if i == self.initial { "doublecircle" } else { "circle" };
            let _ = writeln!(
                out,
                "  s{i} [shape={shape}, tooltip=\"{}\"];",
                s.to_string().replace('"', "'")
            );
        }
        for (i, out_edges) in self.edges.iter().enumerate() {
            for (l, j) in out_edges {
                let _ = writeln!(out, "  s{i} -> s{j} [label=\"{l}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_type;

    #[test]
    fn shopping_types_have_small_automata() {
        let tp = parse_type("mu t. &{ AI.?.t, RI.?.t, CO[SI].?.mu s. +{ DI.!.s, SI.!.end } }")
            .unwrap();
        let a = TypeAutomaton::build(&tp);
        // head, after AI or RI (shared), after CO, the delivery choice,
        // after DI, after SI, end
        assert_eq!(a.len(), 7);
        assert!(a.is_deterministic());
        assert!(a.to_dot().contains("CO{SI}"));
    }

    #[test]
    fn end_is_a_single_state() {
        let a = TypeAutomaton::build(&SessionType::End);
        assert_eq!(a.len(), 1);
        assert!(a.edges[0].is_empty());
    }
}
