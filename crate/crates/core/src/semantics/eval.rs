//! Total evaluation of data expressions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::syntax::{BinOp, Expr, Name, Process, UnOp, Value};

pub type PrimFn = Arc<dyn Fn(&[Value]) -> Value + Send + Sync>;

/// Variable bindings for [`eval`]. Closed processes evaluate under the empty map.
pub type Env = BTreeMap<Name, Value>;

/// A table of pure functions callable from expressions via `f(e1, ..., en)`.
#[derive(Clone, Default)]
pub struct Primitives {
    table: BTreeMap<Name, (usize, PrimFn)>,
}

impl fmt::Debug for Primitives {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.table.iter().map(|(k, (n, _))| (k, n)))
            .finish()
    }
}

impl Primitives {
    pub fn new() -> Primitives {
        Primitives::default()
    }

    pub fn register(
        &mut self,
        name: &str,
        arity: usize,
        f: impl Fn(&[Value]) -> Value + Send + Sync + 'static,
    ) -> &mut Self {
        self.table.insert(name.into(), (arity, Arc::new(f)));
        self
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.table.get(name).map(|(n, _)| *n)
    }

    /// Helpers for the shopping-cart examples. Orders are modelled as an
    /// item count saturating at 2 so that the state space stays finite.
    pub fn shopping() -> Primitives {
        let count = |v: &Value| v.as_int().unwrap_or(0);
        let mut p = Primitives::new();
        p.register("empty", 0, |_| Value::Int(0))
            .register("add", 2, move |a| Value::Int((count(&a[0]) + 1).min(2)))
            .register("rem", 2, move |a| Value::Int((count(&a[0]) - 1).max(0)))
            .register("n", 1, move |a| Value::Int(count(&a[0])))
            .register("next", 1, |a| a[0].clone())
            .register("update", 1, move |a| Value::Int((count(&a[0]) - 1).max(0)))
            .register("inv", 1, |a| Value::Sym("invoice".into(), vec![a[0].clone()]))
            .register("pickitem", 2, |a| Value::Sym("item".into(), vec![a[1].clone()]));
        p
    }

    /// The cart operations with an `update` that never marks anything as
    /// sent, so a delivery loop guarded by `n(y) > 0` spins forever.
    pub fn shopping_stuck() -> Primitives {
        let mut p = Primitives::shopping();
        p.register("update", 1, |a| a[0].clone());
        p
    }

    /// Applications in `p` whose arity disagrees with the table, as
    /// `(name, expected, found)`.
    pub fn arity_mismatches(&self, p: &Process) -> Vec<(Name, usize, usize)> {
        let mut out = Vec::new();
        for (_, sub) in p.subterms() {
            let mut check = |e: &Expr| {
                e.visit_applications(&mut |f, n| {
                    if let Some(want) = self.arity(f) {
                        if want != n {
                            out.push((Name::from(f), want, n));
                        }
                    }
                })
            };
            match sub {
                Process::Send { expr, .. } => check(expr),
                Process::Loop { count, .. } => check(count),
                Process::If { cond, .. } => check(cond),
                _ => {}
            }
        }
        out
    }
}

fn int(v: Value) -> i64 {
    v.as_int().unwrap_or(0)
}

fn truth(v: Value) -> bool {
    v.as_bool().unwrap_or(false)
}

/// Evaluates `e`. Total: unbound variables are `0`, non-booleans in boolean
/// position are `false`, non-integers in arithmetic are `0`, and calls to
/// unknown functions (or with the wrong arity) build a symbolic value.
pub fn eval(e: &Expr, env: &Env, prims: &Primitives) -> Value {
    match e {
        Expr::Lit(v) => v.clone(),
        Expr::Var(x) => env.get(x).cloned().unwrap_or(Value::Int(0)),
        Expr::Unary(UnOp::Neg, a) => Value::Int(int(eval(a, env, prims)).wrapping_neg()),
        Expr::Unary(UnOp::Not, a) => Value::Bool(!truth(eval(a, env, prims))),
        Expr::Binary(op, l, r) => {
            let (a, b) = (eval(l, env, prims), eval(r, env, prims));
            match op {
                BinOp::Add => Value::Int(int(a).wrapping_add(int(b))),
                BinOp::Sub => Value::Int(int(a).wrapping_sub(int(b))),
                BinOp::Mul => Value::Int(int(a).wrapping_mul(int(b))),
                BinOp::Eq => Value::Bool(a == b),
                BinOp::Ne => Value::Bool(a != b),
                BinOp::Lt => Value::Bool(int(a) < int(b)),
                BinOp::Le => Value::Bool(int(a) <= int(b)),
                BinOp::Gt => Value::Bool(int(a) > int(b)),
                BinOp::Ge => Value::Bool(int(a) >= int(b)),
                BinOp::And => Value::Bool(truth(a) && truth(b)),
                BinOp::Or => Value::Bool(truth(a) || truth(b)),
            }
        }
        Expr::Apply(f, args) => {
            let vals: Vec<Value> = args.iter().map(|a| eval(a, env, prims)).collect();
            match prims.table.get(f) {
                Some((arity, func)) if *arity == vals.len() => func(&vals),
                _ => Value::Sym(f.clone(), vals),
            }
        }
    }
}

/// The iteration count of a `loop`: negative or non-integer counts are `0`.
pub fn loop_count(e: &Expr, env: &Env, prims: &Primitives) -> i64 {
    int(eval(e, env, prims)).max(0)
}

/// A branch guard: anything but `true` selects the `else` branch.
pub fn guard(e: &Expr, env: &Env, prims: &Primitives) -> bool {
    truth(eval(e, env, prims))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_process;

    fn ev(src: &str) -> Value {
        let p = parse_process(&format!("k+!({src}).0")).unwrap();
        let Process::Send { expr, .. } = p else {
            panic!()
        };
        eval(&expr, &Env::new(), &Primitives::shopping())
    }

    #[test]
    fn literals_and_arithmetic() {
        assert_eq!(ev("0"), Value::Int(0));
        assert_eq!(ev("2 + 3"), Value::Int(5));
        assert_eq!(ev("2 * (3 - 5)"), Value::Int(-4));
        assert_eq!(ev("-(4)"), Value::Int(-4));
        assert_eq!(ev("1 < 2 && !(2 <= 1)"), Value::Bool(true));
        assert_eq!(ev("@a(1) = @a(1)"), Value::Bool(true));
        assert_eq!(ev("3 > 2 || false"), Value::Bool(true));
        assert_eq!(ev("1 != 1"), Value::Bool(false));
    }

    #[test]
    fn defaults() {
        assert_eq!(ev("x"), Value::Int(0));
        assert_eq!(ev("true + 1"), Value::Int(1));
        assert_eq!(ev("!5"), Value::Bool(true));
        assert_eq!(
            ev("mystery(1, true)"),
            Value::Sym("mystery".into(), vec![Value::Int(1), Value::Bool(true)])
        );
        assert_eq!(ev("n(1, 2)"), Value::Sym("n".into(), vec![Value::Int(1), Value::Int(2)]));
    }

    #[test]
    fn shopping_helpers() {
        assert_eq!(ev("add(add(add(empty(), 1), 1), 1)"), Value::Int(2));
        assert_eq!(ev("rem(empty(), 1)"), Value::Int(0));
        assert_eq!(ev("n(@order)"), Value::Int(0));
        assert_eq!(
            ev("pickitem(2, 1)"),
            Value::Sym("item".into(), vec![Value::Int(1)])
        );
    }

    #[test]
    fn counts_and_guards() {
        let prims = Primitives::new();
        assert_eq!(loop_count(&Expr::int(-3), &Env::new(), &prims), 0);
        assert_eq!(loop_count(&Expr::bool(true), &Env::new(), &prims), 0);
        assert!(!guard(&Expr::int(1), &Env::new(), &prims));
    }

    #[test]
    fn arity_mismatches_are_reported() {
        let p = parse_process("k+!(add(1)).0").unwrap();
        let bad = Primitives::shopping().arity_mismatches(&p);
        assert_eq!(bad, vec![(Name::from("add"), 2, 1)]);
    }
}
