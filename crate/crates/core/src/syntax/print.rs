//! Printers producing text that parses back to the same tree.

use std::fmt;

use super::{fmt_labels, Arm, Expr, Process, SessionType, UnOp, Value};

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Sym(name, args) => {
                write!(f, "@{name}")?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(v) => write!(f, "{v}"),
            Expr::Var(x) => f.write_str(x),
            Expr::Unary(op, e) => {
                f.write_str(match op {
                    UnOp::Neg => "-",
                    UnOp::Not => "!",
                })?;
                // Bare operands only where re-parsing cannot fold them into a literal.
                let bare = matches!(
                    **e,
                    Expr::Var(_) | Expr::Apply(..) | Expr::Lit(Value::Bool(_) | Value::Sym(..))
                );
                if bare {
                    write!(f, "{e}")
                } else {
                    write!(f, "({e})")
                }
            }
            Expr::Binary(op, l, r) => {
                write_operand(f, l)?;
                write!(f, " {} ", op.symbol())?;
                write_operand(f, r)
            }
            Expr::Apply(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    if matches!(e, Expr::Binary(..)) {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Writes a process in a position that only admits a unary process.
fn write_unary(f: &mut fmt::Formatter<'_>, p: &Process) -> fmt::Result {
    if matches!(p, Process::Par(..)) {
        write!(f, "({p})")
    } else {
        write!(f, "{p}")
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Process::Send { chan, expr, cont } => {
                write!(f, "{chan}!({expr}).")?;
                write_unary(f, cont)
            }
            Process::Recv { chan, var, cont } => {
                write!(f, "{chan}?({var}).")?;
                write_unary(f, cont)
            }
            Process::Select { chan, label, cont } => {
                write!(f, "{chan}<<{label}.")?;
                write_unary(f, cont)
            }
            Process::Branch { chan, arms } => {
                write!(f, "{chan}>>{{")?;
                for (i, (l, p)) in arms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, " {l}: {p}")?;
                }
                f.write_str(" }")
            }
            Process::Inact => f.write_str("0"),
            Process::Par(l, r) => {
                write!(f, "{l} | ")?;
                write_unary(f, r)
            }
            Process::Rec {
                var,
                invariant,
                body,
            } => {
                write!(f, "rec {var}")?;
                if let Some(inv) = invariant {
                    write!(f, " invariant {}", fmt_labels(inv))?;
                }
                f.write_str(". ")?;
                write_unary(f, body)
            }
            Process::Loop {
                var,
                index,
                count,
                body,
                after,
            } => write!(
                f,
                "loop {var} ({index} < {count}) {{ {body} }} then {{ {after} }}"
            ),
            Process::Call { var, chans } => {
                write!(f, "{var}(")?;
                for (i, c) in chans.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
            Process::If {
                cond,
                then,
                otherwise,
            } => {
                write!(f, "if {cond} then ")?;
                write_unary(f, then)?;
                f.write_str(" else ")?;
                write_unary(f, otherwise)
            }
        }
    }
}

fn write_arms(f: &mut fmt::Formatter<'_>, arms: &[Arm]) -> fmt::Result {
    f.write_str("{")?;
    for (i, a) in arms.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, " {}", a.label)?;
        if !a.responses.is_empty() {
            let inner: Vec<&str> = a.responses.iter().map(|l| l.as_str()).collect();
            write!(f, "[{}]", inner.join(", "))?;
        }
        write!(f, ".{}", a.cont)?;
    }
    f.write_str(" }")
}

impl fmt::Display for SessionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SessionType::Branch(arms) => {
                f.write_str("&")?;
                write_arms(f, arms)
            }
            SessionType::Select(arms) => {
                f.write_str("+")?;
                write_arms(f, arms)
            }
            SessionType::Out(c) => write!(f, "!.{c}"),
            SessionType::In(c) => write!(f, "?.{c}"),
            SessionType::Mu(t, b) => write!(f, "mu {t}.{b}"),
            SessionType::Var(t) => f.write_str(t),
            SessionType::End => f.write_str("end"),
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::{parse_process, parse_type};

    #[test]
    fn process_round_trip_preserves_grouping() {
        for src in [
            "0",
            "k+<<a.(b+<<c.0 | d+<<e.0)",
            "a+<<x.0 | (b+<<y.0 | c+<<z.0)",
            "if x = 0 then (a+<<x.0 | 0) else 0",
            "k+!(-(3)).k+!(-3).k+!(!(x = 1)).k+!((1 + 2) * 3).0",
            "rec X invariant {a}. k+<<a.X(k+)",
        ] {
            let p = parse_process(src).unwrap();
            let printed = p.to_string();
            assert_eq!(parse_process(&printed).unwrap(), p, "{src} -> {printed}");
        }
    }

    #[test]
    fn type_printing() {
        let t = parse_type("mu t. +{ a[b].t , b[].end }").unwrap();
        assert_eq!(t.to_string(), "mu t.+{ a[b].t, b.end }");
        assert_eq!(parse_type(&t.to_string()).unwrap(), t);
    }
}
