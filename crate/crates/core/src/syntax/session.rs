use std::collections::BTreeSet;

use thiserror::Error;

use super::{Label, LabelSet, Name};

/// One arm `l[L].T` of a branch or select type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arm {
    pub label: Label,
    pub responses: LabelSet,
    pub cont: SessionType,
}

impl Arm {
    pub fn new(label: &str, responses: LabelSet, cont: SessionType) -> Arm {
        Arm {
            label: Label::new(label),
            responses,
            cont,
        }
    }
}

/// Session types with response annotations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SessionType {
    Branch(Vec<Arm>),
    Select(Vec<Arm>),
    Out(Box<SessionType>),
    In(Box<SessionType>),
    Mu(Name, Box<SessionType>),
    Var(Name),
    End,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ContractivityError {
    #[error("type variable `{0}` is not guarded by a prefix")]
    NonContractive(Name),
    #[error("type variable `{0}` is unbound")]
    FreeVar(Name),
    #[error("label `{0}` occurs twice in the same choice")]
    DuplicateLabel(Label),
}

impl SessionType {
    pub fn out(cont: SessionType) -> SessionType {
        SessionType::Out(Box::new(cont))
    }

    pub fn inp(cont: SessionType) -> SessionType {
        SessionType::In(Box::new(cont))
    }

    pub fn mu(var: &str, body: SessionType) -> SessionType {
        SessionType::Mu(var.into(), Box::new(body))
    }

    pub fn var(var: &str) -> SessionType {
        SessionType::Var(var.into())
    }

    /// Substitutes `s` for free occurrences of `t`. `s` is assumed closed.
    pub fn subst(&self, t: &str, s: &SessionType) -> SessionType {
        match self {
            SessionType::Var(x) if &**x == t => s.clone(),
            SessionType::Var(_) | SessionType::End => self.clone(),
            SessionType::Mu(x, _) if &**x == t => self.clone(),
            SessionType::Mu(x, b) => SessionType::Mu(x.clone(), Box::new(b.subst(t, s))),
            SessionType::Out(c) => SessionType::out(c.subst(t, s)),
            SessionType::In(c) => SessionType::inp(c.subst(t, s)),
            SessionType::Branch(arms) => SessionType::Branch(subst_arms(arms, t, s)),
            SessionType::Select(arms) => SessionType::Select(subst_arms(arms, t, s)),
        }
    }

    /// Unrolls top-level `mu` binders until the head is a proper constructor.
    pub fn try_unfold(&self) -> Result<SessionType, ContractivityError> {
        // For a contractive type each unrolling removes one leading binder, so
        // more rounds than leading binders means an unguarded variable.
        let mut budget = 0usize;
        let mut probe = self;
        while let SessionType::Mu(_, body) = probe {
            budget += 1;
            probe = body;
        }
        let mut cur = self.clone();
        while let SessionType::Mu(t, body) = &cur {
            if budget == 0 {
                return Err(ContractivityError::NonContractive(t.clone()));
            }
            budget -= 1;
            cur = body.subst(t, &cur);
        }
        match &cur {
            SessionType::Var(t) => Err(ContractivityError::FreeVar(t.clone())),
            _ => Ok(cur),
        }
    }

    /// As [`SessionType::try_unfold`], for types already known to be
    /// contractive and closed.
    pub fn unfold(&self) -> SessionType {
        self.try_unfold()
            .expect("unfold called on a non-contractive or open type")
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        fn go(t: &SessionType, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
            match t {
                SessionType::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                SessionType::End => {}
                SessionType::Mu(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                SessionType::Out(c) | SessionType::In(c) => go(c, bound, out),
                SessionType::Branch(arms) | SessionType::Select(arms) => {
                    arms.iter().for_each(|a| go(&a.cont, bound, out))
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Checks closedness, guardedness of every variable and label
    /// distinctness within each choice.
    pub fn check_well_formed(&self) -> Result<(), ContractivityError> {
        // `unguarded` holds binders crossed since the last prefix.
        fn go(
            t: &SessionType,
            bound: &mut Vec<Name>,
            unguarded: &mut Vec<Name>,
        ) -> Result<(), ContractivityError> {
            match t {
                SessionType::End => Ok(()),
                SessionType::Var(x) => {
                    if !bound.contains(x) {
                        Err(ContractivityError::FreeVar(x.clone()))
                    } else if unguarded.contains(x) {
                        Err(ContractivityError::NonContractive(x.clone()))
                    } else {
                        Ok(())
                    }
                }
                SessionType::Mu(x, b) => {
                    bound.push(x.clone());
                    unguarded.push(x.clone());
                    let r = go(b, bound, unguarded);
                    unguarded.pop();
                    bound.pop();
                    r
                }
                SessionType::Out(c) | SessionType::In(c) => go(c, bound, &mut Vec::new()),
                SessionType::Branch(arms) | SessionType::Select(arms) => {
                    let mut labels = BTreeSet::new();
                    for a in arms {
                        if !labels.insert(&a.label) {
                            return Err(ContractivityError::DuplicateLabel(a.label.clone()));
                        }
                        go(&a.cont, bound, &mut Vec::new())?;
                    }
                    Ok(())
                }
            }
        }
        go(self, &mut Vec::new(), &mut Vec::new())
    }

    /// Swaps branch with select and output with input throughout, keeping
    /// labels and response sets.
    pub fn syntactic_dual(&self) -> SessionType {
        let dual_arms =
            |arms: &[Arm]| -> Vec<Arm> {
                arms.iter()
                    .map(|a| Arm {
                        label: a.label.clone(),
                        responses: a.responses.clone(),
                        cont: a.cont.syntactic_dual(),
                    })
                    .collect()
            };
        match self {
            SessionType::Branch(arms) => SessionType::Select(dual_arms(arms)),
            SessionType::Select(arms) => SessionType::Branch(dual_arms(arms)),
            SessionType::Out(c) => SessionType::inp(c.syntactic_dual()),
            SessionType::In(c) => SessionType::out(c.syntactic_dual()),
            SessionType::Mu(x, b) => SessionType::Mu(x.clone(), Box::new(b.syntactic_dual())),
            SessionType::Var(_) | SessionType::End => self.clone(),
        }
    }

    /// True when no choice carries a non-empty response set.
    pub fn is_standard(&self) -> bool {
        match self {
            SessionType::Branch(arms) | SessionType::Select(arms) => arms
                .iter()
                .all(|a| a.responses.is_empty() && a.cont.is_standard()),
            SessionType::Out(c) | SessionType::In(c) | SessionType::Mu(_, c) => c.is_standard(),
            SessionType::Var(_) | SessionType::End => true,
        }
    }

    /// All labels mentioned, either as choice labels or in response sets.
    pub fn labels(&self) -> LabelSet {
        let mut out = LabelSet::new();
        self.visit_arms(&mut |a| {
            out.insert(a.label.clone());
            out.extend(a.responses.iter().cloned());
        });
        out
    }

    /// Number of choice arms, i.e. response-set positions.
    pub fn arm_count(&self) -> usize {
        let mut n = 0;
        self.visit_arms(&mut |_| n += 1);
        n
    }

    fn visit_arms(&self, f: &mut impl FnMut(&Arm)) {
        match self {
            SessionType::Branch(arms) | SessionType::Select(arms) => {
                for a in arms {
                    f(a);
                    a.cont.visit_arms(f);
                }
            }
            SessionType::Out(c) | SessionType::In(c) | SessionType::Mu(_, c) => c.visit_arms(f),
            SessionType::Var(_) | SessionType::End => {}
        }
    }

    /// Replaces the response set of the `n`-th arm in pre-order.
    pub fn with_responses_at(&self, n: usize, responses: LabelSet) -> SessionType {
        fn go(t: &SessionType, n: &mut usize, responses: &LabelSet) -> SessionType {
            let map_arms = |arms: &[Arm], n: &mut usize| -> Vec<Arm> {
                arms.iter()
                    .map(|a| {
                        let here = *n == 0;
                        *n = n.wrapping_sub(1);
                        Arm {
                            label: a.label.clone(),
                            responses: if here {
                                responses.clone()
                            } else {
                                a.responses.clone()
                            },
                            cont: go(&a.cont, n, responses),
                        }
                    })
                    .collect()
            };
            match t {
                SessionType::Branch(arms) => SessionType::Branch(map_arms(arms, n)),
                SessionType::Select(arms) => SessionType::Select(map_arms(arms, n)),
                SessionType::Out(c) => SessionType::out(go(c, n, responses)),
                SessionType::In(c) => SessionType::inp(go(c, n, responses)),
                SessionType::Mu(x, b) => SessionType::Mu(x.clone(), Box::new(go(b, n, responses))),
                SessionType::Var(_) | SessionType::End => t.clone(),
            }
        }
        let mut n = n;
        go(self, &mut n, &responses)
    }
}

fn subst_arms(arms: &[Arm], t: &str, s: &SessionType) -> Vec<Arm> {
    arms.iter()
        .map(|a| Arm {
            label: a.label.clone(),
            responses: a.responses.clone(),
            cont: a.cont.subst(t, s),
        })
        .collect()
}
