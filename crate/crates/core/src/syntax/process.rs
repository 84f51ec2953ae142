use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{Chan, Label, LabelSet, Name};

/// Runtime data values. `Sym` holds symbolic constructor values produced by
/// uninterpreted primitives (orders, invoices, items).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Sym(Name, Vec<Value>),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

/// Data expressions. `Apply` calls a function from a user-supplied
/// primitive table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Lit(Value),
    Var(Name),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Apply(Name, Vec<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Lit(Value::Int(n))
    }

    pub fn bool(b: bool) -> Expr {
        Expr::Lit(Value::Bool(b))
    }

    pub fn var(x: &str) -> Expr {
        Expr::Var(x.into())
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn subst(&self, v: &Value, x: &str) -> Expr {
        match self {
            Expr::Var(y) if &**y == x => Expr::Lit(v.clone()),
            Expr::Lit(_) | Expr::Var(_) => self.clone(),
            Expr::Unary(op, e) => Expr::Unary(*op, Box::new(e.subst(v, x))),
            Expr::Binary(op, l, r) => {
                Expr::Binary(*op, Box::new(l.subst(v, x)), Box::new(r.subst(v, x)))
            }
            Expr::Apply(f, args) => {
                Expr::Apply(f.clone(), args.iter().map(|a| a.subst(v, x)).collect())
            }
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Unary(_, e) => e.free_vars(out),
            Expr::Binary(_, l, r) => {
                l.free_vars(out);
                r.free_vars(out);
            }
            Expr::Apply(_, args) => args.iter().for_each(|a| a.free_vars(out)),
        }
    }

    /// Calls `f` on every primitive application, innermost last.
    pub fn visit_applications(&self, f: &mut impl FnMut(&str, usize)) {
        match self {
            Expr::Lit(_) | Expr::Var(_) => {}
            Expr::Unary(_, e) => e.visit_applications(f),
            Expr::Binary(_, l, r) => {
                l.visit_applications(f);
                r.visit_applications(f);
            }
            Expr::Apply(name, args) => {
                f(name, args.len());
                args.iter().for_each(|a| a.visit_applications(f));
            }
        }
    }
}

/// Process terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    Send {
        chan: Chan,
        expr: Expr,
        cont: Box<Process>,
    },
    Recv {
        chan: Chan,
        var: Name,
        cont: Box<Process>,
    },
    Select {
        chan: Chan,
        label: Label,
        cont: Box<Process>,
    },
    Branch {
        chan: Chan,
        arms: Vec<(Label, Process)>,
    },
    Inact,
    Par(Box<Process>, Box<Process>),
    /// General recursion, optionally annotated with a request invariant.
    Rec {
        var: Name,
        invariant: Option<LabelSet>,
        body: Box<Process>,
    },
    /// Primitive recursion: runs `body` `count` times, binding the index,
    /// then continues as `after`.
    Loop {
        var: Name,
        index: Name,
        count: Expr,
        body: Box<Process>,
        after: Box<Process>,
    },
    Call {
        var: Name,
        chans: Vec<Chan>,
    },
    If {
        cond: Expr,
        then: Box<Process>,
        otherwise: Box<Process>,
    },
}

/// One step of a path from the root of a process to a subterm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathStep {
    Cont,
    Arm(usize),
    ParL,
    ParR,
    RecBody,
    LoopBody,
    LoopAfter,
    Then,
    Else,
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathStep::Cont => f.write_str("cont"),
            PathStep::Arm(i) => write!(f, "arm{i}"),
            PathStep::ParL => f.write_str("left"),
            PathStep::ParR => f.write_str("right"),
            PathStep::RecBody => f.write_str("rec"),
            PathStep::LoopBody => f.write_str("body"),
            PathStep::LoopAfter => f.write_str("then"),
            PathStep::Then => f.write_str("if"),
            PathStep::Else => f.write_str("else"),
        }
    }
}

impl Serialize for PathStep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Renders a path as `cont/arm1/left`, or `.` for the root.
pub fn fmt_path(path: &[PathStep]) -> String {
    if path.is_empty() {
        return ".".to_string();
    }
    path.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("/")
}

impl Process {
    pub fn send(chan: Chan, expr: Expr, cont: Process) -> Process {
        Process::Send {
            chan,
            expr,
            cont: Box::new(cont),
        }
    }

    pub fn recv(chan: Chan, var: &str, cont: Process) -> Process {
        Process::Recv {
            chan,
            var: var.into(),
            cont: Box::new(cont),
        }
    }

    pub fn select(chan: Chan, label: &str, cont: Process) -> Process {
        Process::Select {
            chan,
            label: Label::new(label),
            cont: Box::new(cont),
        }
    }

    pub fn branch(chan: Chan, arms: Vec<(&str, Process)>) -> Process {
        Process::Branch {
            chan,
            arms: arms.into_iter().map(|(l, p)| (Label::new(l), p)).collect(),
        }
    }

    pub fn par(left: Process, right: Process) -> Process {
        Process::Par(Box::new(left), Box::new(right))
    }

    pub fn rec(var: &str, body: Process) -> Process {
        Process::Rec {
            var: var.into(),
            invariant: None,
            body: Box::new(body),
        }
    }

    pub fn looping(var: &str, index: &str, count: Expr, body: Process, after: Process) -> Process {
        Process::Loop {
            var: var.into(),
            index: index.into(),
            count,
            body: Box::new(body),
            after: Box::new(after),
        }
    }

    pub fn call(var: &str, chans: Vec<Chan>) -> Process {
        Process::Call {
            var: var.into(),
            chans,
        }
    }

    pub fn cond(cond: Expr, then: Process, otherwise: Process) -> Process {
        Process::If {
            cond,
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        }
    }

    /// The subject channel of a communication prefix.
    pub fn prefix_subject(&self) -> Option<&Chan> {
        match self {
            Process::Send { chan, .. }
            | Process::Recv { chan, .. }
            | Process::Select { chan, .. }
            | Process::Branch { chan, .. } => Some(chan),
            _ => None,
        }
    }

    pub fn is_prefix(&self) -> bool {
        self.prefix_subject().is_some()
    }

    /// Free polarised names; a process variable contributes its channel list.
    pub fn free_names(&self) -> BTreeSet<Chan> {
        let mut out = BTreeSet::new();
        self.collect_free_names(&mut out);
        out
    }

    fn collect_free_names(&self, out: &mut BTreeSet<Chan>) {
        match self {
            Process::Send { chan, cont, .. }
            | Process::Recv { chan, cont, .. }
            | Process::Select { chan, cont, .. } => {
                out.insert(chan.clone());
                cont.collect_free_names(out);
            }
            Process::Branch { chan, arms } => {
                out.insert(chan.clone());
                arms.iter().for_each(|(_, p)| p.collect_free_names(out));
            }
            Process::Inact => {}
            Process::Par(l, r) => {
                l.collect_free_names(out);
                r.collect_free_names(out);
            }
            Process::Rec { body, .. } => body.collect_free_names(out),
            Process::Loop { body, after, .. } => {
                body.collect_free_names(out);
                after.collect_free_names(out);
            }
            Process::Call { chans, .. } => out.extend(chans.iter().cloned()),
            Process::If { then, otherwise, .. } => {
                then.collect_free_names(out);
                otherwise.collect_free_names(out);
            }
        }
    }

    /// Whether `chan` occurs free, without materialising the whole set.
    pub fn mentions(&self, chan: &Chan) -> bool {
        match self {
            Process::Send { chan: k, cont, .. }
            | Process::Recv { chan: k, cont, .. }
            | Process::Select { chan: k, cont, .. } => k == chan || cont.mentions(chan),
            Process::Branch { chan: k, arms } => {
                k == chan || arms.iter().any(|(_, p)| p.mentions(chan))
            }
            Process::Inact => false,
            Process::Par(l, r) => l.mentions(chan) || r.mentions(chan),
            Process::Rec { body, .. } => body.mentions(chan),
            Process::Loop { body, after, .. } => body.mentions(chan) || after.mentions(chan),
            Process::Call { chans, .. } => chans.contains(chan),
            Process::If {
                then, otherwise, ..
            } => then.mentions(chan) || otherwise.mentions(chan),
        }
    }

    /// Free data variables.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    fn collect_free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Process::Send { expr, cont, .. } => {
                expr.free_vars(out);
                cont.collect_free_vars(out);
            }
            Process::Recv { var, cont, .. } => {
                let mut inner = BTreeSet::new();
                cont.collect_free_vars(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
            Process::Select { cont, .. } => cont.collect_free_vars(out),
            Process::Branch { arms, .. } => arms.iter().for_each(|(_, p)| p.collect_free_vars(out)),
            Process::Inact | Process::Call { .. } => {}
            Process::Par(l, r) => {
                l.collect_free_vars(out);
                r.collect_free_vars(out);
            }
            Process::Rec { body, .. } => body.collect_free_vars(out),
            Process::Loop {
                index,
                count,
                body,
                after,
                ..
            } => {
                count.free_vars(out);
                let mut inner = BTreeSet::new();
                body.collect_free_vars(&mut inner);
                inner.remove(index);
                out.extend(inner);
                after.collect_free_vars(out);
            }
            Process::If {
                cond,
                then,
                otherwise,
            } => {
                cond.free_vars(out);
                then.collect_free_vars(out);
                otherwise.collect_free_vars(out);
            }
        }
    }

    /// Free process variables.
    pub fn free_pvars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_pvars(&mut out);
        out
    }

    fn collect_free_pvars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Process::Send { cont, .. }
            | Process::Recv { cont, .. }
            | Process::Select { cont, .. } => cont.collect_free_pvars(out),
            Process::Branch { arms, .. } => arms.iter().for_each(|(_, p)| p.collect_free_pvars(out)),
            Process::Inact => {}
            Process::Par(l, r) => {
                l.collect_free_pvars(out);
                r.collect_free_pvars(out);
            }
            Process::Rec { var, body, .. } => {
                let mut inner = BTreeSet::new();
                body.collect_free_pvars(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
            Process::Loop {
                var, body, after, ..
            } => {
                let mut inner = BTreeSet::new();
                body.collect_free_pvars(&mut inner);
                inner.remove(var);
                out.extend(inner);
                after.collect_free_pvars(out);
            }
            Process::Call { var, .. } => {
                out.insert(var.clone());
            }
            Process::If {
                then, otherwise, ..
            } => {
                then.collect_free_pvars(out);
                otherwise.collect_free_pvars(out);
            }
        }
    }

    /// Value substitution `P{v/x}`; only data variables are affected.
    pub fn subst_value(&self, v: &Value, x: &str) -> Process {
        match self {
            Process::Send { chan, expr, cont } => Process::Send {
                chan: chan.clone(),
                expr: expr.subst(v, x),
                cont: Box::new(cont.subst_value(v, x)),
            },
            Process::Recv { chan, var, cont } => Process::Recv {
                chan: chan.clone(),
                var: var.clone(),
                cont: if &**var == x {
                    cont.clone()
                } else {
                    Box::new(cont.subst_value(v, x))
                },
            },
            Process::Select { chan, label, cont } => Process::Select {
                chan: chan.clone(),
                label: label.clone(),
                cont: Box::new(cont.subst_value(v, x)),
            },
            Process::Branch { chan, arms } => Process::Branch {
                chan: chan.clone(),
                arms: arms
                    .iter()
                    .map(|(l, p)| (l.clone(), p.subst_value(v, x)))
                    .collect(),
            },
            Process::Inact | Process::Call { .. } => self.clone(),
            Process::Par(l, r) => Process::Par(
                Box::new(l.subst_value(v, x)),
                Box::new(r.subst_value(v, x)),
            ),
            Process::Rec {
                var,
                invariant,
                body,
            } => Process::Rec {
                var: var.clone(),
                invariant: invariant.clone(),
                body: Box::new(body.subst_value(v, x)),
            },
            Process::Loop {
                var,
                index,
                count,
                body,
                after,
            } => Process::Loop {
                var: var.clone(),
                index: index.clone(),
                count: count.subst(v, x),
                body: if &**index == x {
                    body.clone()
                } else {
                    Box::new(body.subst_value(v, x))
                },
                after: Box::new(after.subst_value(v, x)),
            },
            Process::If {
                cond,
                then,
                otherwise,
            } => Process::If {
                cond: cond.subst(v, x),
                then: Box::new(then.subst_value(v, x)),
                otherwise: Box::new(otherwise.subst_value(v, x)),
            },
        }
    }

    /// Process-variable substitution `P{Q/X}`: every `X(...)` is replaced by
    /// `Q` wholesale; inner binders of `X` shadow.
    pub fn subst_pvar(&self, q: &Process, x: &str) -> Process {
        match self {
            Process::Call { var, .. } if &**var == x => q.clone(),
            Process::Call { .. } | Process::Inact => self.clone(),
            Process::Send { chan, expr, cont } => Process::Send {
                chan: chan.clone(),
                expr: expr.clone(),
                cont: Box::new(cont.subst_pvar(q, x)),
            },
            Process::Recv { chan, var, cont } => Process::Recv {
                chan: chan.clone(),
                var: var.clone(),
                cont: Box::new(cont.subst_pvar(q, x)),
            },
            Process::Select { chan, label, cont } => Process::Select {
                chan: chan.clone(),
                label: label.clone(),
                cont: Box::new(cont.subst_pvar(q, x)),
            },
            Process::Branch { chan, arms } => Process::Branch {
                chan: chan.clone(),
                arms: arms
                    .iter()
                    .map(|(l, p)| (l.clone(), p.subst_pvar(q, x)))
                    .collect(),
            },
            Process::Par(l, r) => Process::Par(
                Box::new(l.subst_pvar(q, x)),
                Box::new(r.subst_pvar(q, x)),
            ),
            Process::Rec {
                var,
                invariant,
                body,
            } => Process::Rec {
                var: var.clone(),
                invariant: invariant.clone(),
                body: if &**var == x {
                    body.clone()
                } else {
                    Box::new(body.subst_pvar(q, x))
                },
            },
            Process::Loop {
                var,
                index,
                count,
                body,
                after,
            } => Process::Loop {
                var: var.clone(),
                index: index.clone(),
                count: count.clone(),
                body: if &**var == x {
                    body.clone()
                } else {
                    Box::new(body.subst_pvar(q, x))
                },
                after: Box::new(after.subst_pvar(q, x)),
            },
            Process::If {
                cond,
                then,
                otherwise,
            } => Process::If {
                cond: cond.clone(),
                then: Box::new(then.subst_pvar(q, x)),
                otherwise: Box::new(otherwise.subst_pvar(q, x)),
            },
        }
    }

    /// The immediate children together with the path step leading to each.
    pub fn children(&self) -> Vec<(PathStep, &Process)> {
        match self {
            Process::Send { cont, .. }
            | Process::Recv { cont, .. }
            | Process::Select { cont, .. } => vec![(PathStep::Cont, &**cont)],
            Process::Branch { arms, .. } => arms
                .iter()
                .enumerate()
                .map(|(i, (_, p))| (PathStep::Arm(i), p))
                .collect(),
            Process::Inact | Process::Call { .. } => Vec::new(),
            Process::Par(l, r) => vec![(PathStep::ParL, &**l), (PathStep::ParR, &**r)],
            Process::Rec { body, .. } => vec![(PathStep::RecBody, &**body)],
            Process::Loop { body, after, .. } => {
                vec![(PathStep::LoopBody, &**body), (PathStep::LoopAfter, &**after)]
            }
            Process::If {
                then, otherwise, ..
            } => vec![(PathStep::Then, &**then), (PathStep::Else, &**otherwise)],
        }
    }

    pub fn child(&self, step: PathStep) -> Option<&Process> {
        match (self, step) {
            (
                Process::Send { cont, .. }
                | Process::Recv { cont, .. }
                | Process::Select { cont, .. },
                PathStep::Cont,
            ) => Some(cont),
            (Process::Branch { arms, .. }, PathStep::Arm(i)) => arms.get(i).map(|(_, p)| p),
            (Process::Par(l, _), PathStep::ParL) => Some(l),
            (Process::Par(_, r), PathStep::ParR) => Some(r),
            (Process::Rec { body, .. }, PathStep::RecBody) => Some(body),
            (Process::Loop { body, .. }, PathStep::LoopBody) => Some(body),
            (Process::Loop { after, .. }, PathStep::LoopAfter) => Some(after),
            (Process::If { then, .. }, PathStep::Then) => Some(then),
            (Process::If { otherwise, .. }, PathStep::Else) => Some(otherwise),
            _ => None,
        }
    }

    pub fn subterm(&self, path: &[PathStep]) -> Option<&Process> {
        path.iter().try_fold(self, |p, step| p.child(*step))
    }

    pub fn child_mut(&mut self, step: PathStep) -> Option<&mut Process> {
        match (self, step) {
            (
                Process::Send { cont, .. }
                | Process::Recv { cont, .. }
                | Process::Select { cont, .. },
                PathStep::Cont,
            ) => Some(cont),
            (Process::Branch { arms, .. }, PathStep::Arm(i)) => arms.get_mut(i).map(|(_, p)| p),
            (Process::Par(l, _), PathStep::ParL) => Some(l),
            (Process::Par(_, r), PathStep::ParR) => Some(r),
            (Process::Rec { body, .. }, PathStep::RecBody) => Some(body),
            (Process::Loop { body, .. }, PathStep::LoopBody) => Some(body),
            (Process::Loop { after, .. }, PathStep::LoopAfter) => Some(after),
            (Process::If { then, .. }, PathStep::Then) => Some(then),
            (Process::If { otherwise, .. }, PathStep::Else) => Some(otherwise),
            _ => None,
        }
    }

    pub fn subterm_mut(&mut self, path: &[PathStep]) -> Option<&mut Process> {
        let mut cur = self;
        for step in path {
            cur = cur.child_mut(*step)?;
        }
        Some(cur)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|(_, p)| p.size()).sum::<usize>()
    }

    /// Every subterm with its path, in pre-order.
    pub fn subterms(&self) -> Vec<(Vec<PathStep>, &Process)> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), self)];
        while let Some((path, p)) = stack.pop() {
            for (step, child) in p.children().into_iter().rev() {
                let mut sub = path.clone();
                sub.push(step);
                stack.push((sub, child));
            }
            out.push((path, p));
        }
        out
    }

    /// A copy with branch arms sorted by label, used as a structural key.
    pub fn normalized(&self) -> Process {
        let mut p = self.clone();
        p.normalize_in_place();
        p
    }

    fn normalize_in_place(&mut self) {
        if let Process::Branch { arms, .. } = self {
            arms.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let steps: Vec<PathStep> = self.children().into_iter().map(|(s, _)| s).collect();
        for step in steps {
            if let Some(child) = self.child_mut(step) {
                child.normalize_in_place();
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ViolationKind {
    /// A parallel composition inside a loop body.
    ParInBody,
    /// An inactive process inside a loop body.
    InactInBody,
    /// A `rec` or nested `loop` inside a loop body.
    NestedRec,
    /// A process variable other than the loop's own occurs free in the body.
    ForeignPVar,
}

/// A breach of the primitive-recursion body conventions, located at the
/// offending `loop`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub at: Vec<PathStep>,
    pub loop_var: Name,
}

/// Checks every `loop X (i < e) { P } then { Q }` in `p`: the body must not
/// contain `0`, `|`, `rec`, or nested loops, and no process variable but `X`
/// may occur free in it. Each kind is reported once per loop, in the order it
/// is first met in a pre-order walk of the body.
pub fn check_conventions(p: &Process) -> Vec<Violation> {
    let mut out = Vec::new();
    for (path, sub) in p.subterms() {
        let Process::Loop { var, body, .. } = sub else {
            continue;
        };
        let mut kinds: Vec<ViolationKind> = Vec::new();
        let push = |k: ViolationKind, kinds: &mut Vec<ViolationKind>| {
            if !kinds.contains(&k) {
                kinds.push(k);
            }
        };
        for (_, node) in body.subterms() {
            match node {
                Process::Par(..) => push(ViolationKind::ParInBody, &mut kinds),
                Process::Inact => push(ViolationKind::InactInBody, &mut kinds),
                Process::Rec { .. } | Process::Loop { .. } => {
                    push(ViolationKind::NestedRec, &mut kinds)
                }
                _ => {}
            }
        }
        if body.free_pvars().iter().any(|y| y != var) {
            push(ViolationKind::ForeignPVar, &mut kinds);
        }
        out.extend(kinds.into_iter().map(|kind| Violation {
            kind,
            at: path.clone(),
            loop_var: var.clone(),
        }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> Chan {
        Chan::plus("k")
    }

    #[test]
    fn free_names_of_basic_terms() {
        assert!(Process::Inact.free_names().is_empty());
        let call = Process::call("X", vec![k(), Chan::minus("h")]);
        assert_eq!(
            call.free_names(),
            [k(), Chan::minus("h")].into_iter().collect()
        );
        let p = Process::send(
            k(),
            Expr::int(5),
            Process::recv(Chan::minus("h"), "x", Process::Inact),
        );
        assert_eq!(p.free_names(), [k(), Chan::minus("h")].into_iter().collect());
    }

    #[test]
    fn value_substitution() {
        let p = Process::send(k(), Expr::var("x"), Process::Inact);
        assert_eq!(
            p.subst_value(&Value::Int(5), "x"),
            Process::send(k(), Expr::int(5), Process::Inact)
        );

        let shadowed = Process::recv(
            k(),
            "x",
            Process::send(k(), Expr::var("x"), Process::Inact),
        );
        assert_eq!(shadowed.subst_value(&Value::Int(7), "x"), shadowed);

        let guarded = Process::cond(
            Expr::binary(BinOp::Eq, Expr::var("x"), Expr::int(0)),
            Process::Inact,
            Process::call("X", vec![k()]),
        );
        assert_eq!(
            guarded.subst_value(&Value::Int(0), "x"),
            Process::cond(
                Expr::binary(BinOp::Eq, Expr::int(0), Expr::int(0)),
                Process::Inact,
                Process::call("X", vec![k()]),
            )
        );
    }

    #[test]
    fn loop_index_shadows_in_body_only() {
        let p = Process::looping(
            "X",
            "i",
            Expr::var("i"),
            Process::send(k(), Expr::var("i"), Process::call("X", vec![k()])),
            Process::send(k(), Expr::var("i"), Process::Inact),
        );
        let q = p.subst_value(&Value::Int(3), "i");
        let Process::Loop {
            count, body, after, ..
        } = q
        else {
            panic!()
        };
        assert_eq!(count, Expr::int(3));
        assert_eq!(
            *body,
            Process::send(k(), Expr::var("i"), Process::call("X", vec![k()]))
        );
        assert_eq!(*after, Process::send(k(), Expr::int(3), Process::Inact));
    }

    #[test]
    fn process_variable_substitution() {
        let q = Process::select(k(), "a", Process::Inact);
        assert_eq!(Process::call("X", vec![k()]).subst_pvar(&q, "X"), q);
        let y = Process::call("Y", vec![k()]);
        assert_eq!(y.subst_pvar(&q, "X"), y);
        let shadow = Process::rec("X", Process::call("X", vec![k()]));
        assert_eq!(shadow.subst_pvar(&q, "X"), shadow);
    }

    #[test]
    fn conventions_accept_a_legal_body() {
        let p = Process::looping(
            "X",
            "i",
            Expr::int(3),
            Process::select(k(), "a", Process::call("X", vec![k()])),
            Process::Inact,
        );
        assert!(check_conventions(&p).is_empty());
    }

    #[test]
    fn conventions_report_par_and_inact() {
        let p = Process::looping(
            "X",
            "i",
            Expr::int(3),
            Process::par(Process::Inact, Process::Inact),
            Process::Inact,
        );
        let kinds: Vec<_> = check_conventions(&p).into_iter().map(|v| v.kind).collect();
        assert_eq!(
            kinds,
            vec![ViolationKind::ParInBody, ViolationKind::InactInBody]
        );
    }

    #[test]
    fn conventions_report_nested_rec_but_not_its_bound_variable() {
        let p = Process::looping(
            "X",
            "i",
            Expr::int(3),
            Process::rec("Y", Process::call("Y", vec![k()])),
            Process::Inact,
        );
        let kinds: Vec<_> = check_conventions(&p).into_iter().map(|v| v.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::NestedRec]);
    }

    #[test]
    fn conventions_report_foreign_variable() {
        let p = Process::rec(
            "Z",
            Process::looping(
                "X",
                "i",
                Expr::int(1),
                Process::select(k(), "a", Process::call("Z", vec![k()])),
                Process::Inact,
            ),
        );
        let v = check_conventions(&p);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::ForeignPVar);
        assert_eq!(v[0].at, vec![PathStep::RecBody]);
    }

    #[test]
    fn subterm_paths_resolve() {
        let p = Process::par(
            Process::select(k(), "a", Process::Inact),
            Process::branch(k().dual(), vec![("a", Process::Inact)]),
        );
        for (path, sub) in p.subterms() {
            assert_eq!(p.subterm(&path), Some(sub));
        }
        assert_eq!(p.size(), 5);
    }
}
