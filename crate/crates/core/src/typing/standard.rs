use std::collections::BTreeMap;

use crate::syntax::{Name, PathStep, Process};

use super::{rules, TypeEnv, TypeError};

/// Θ: process variables to the environment their recursion is typed under.
pub type StdCtx = BTreeMap<Name, TypeEnv>;

/// Θ ⊢std P ▹ Δ.
pub fn check_std(theta: &StdCtx, p: &Process, env: &TypeEnv) -> Result<(), TypeError> {
    rules::conventions(p)?;
    check(theta, p, env, &mut Vec::new())
}

fn check(theta: &StdCtx, p: &Process, env: &TypeEnv, path: &mut Vec<PathStep>) -> Result<(), TypeError> {
    match p {
        Process::Send { chan, cont, .. } => {
            let env = rules::out(env, chan, "Std-Out", path)?;
            sub(path, PathStep::Cont, theta, cont, &env)
        }
        Process::Recv { chan, cont, .. } => {
            let env = rules::inp(env, chan, "Std-In", path)?;
            sub(path, PathStep::Cont, theta, cont, &env)
        }
        Process::Select { chan, label, cont } => {
            let (env, _) = rules::sel(env, chan, label, "Std-Sel", path)?;
            sub(path, PathStep::Cont, theta, cont, &env)
        }
        Process::Branch { chan, arms } => {
            let envs = rules::bra(env, chan, arms, "Std-Bra", path)?;
            for (i, ((_, q), (env, _))) in arms.iter().zip(envs).enumerate() {
                sub(path, PathStep::Arm(i), theta, q, &env)?;
            }
            Ok(())
        }
        Process::Inact => rules::completed(env, "Std-Inact", path),
        Process::Par(l, r) => {
            let (el, er) = env.split(&l.free_names());
            sub(path, PathStep::ParL, theta, l, &el)?;
            sub(path, PathStep::ParR, theta, r, &er)
        }
        Process::Rec { var, body, .. } => {
            let mut inner = theta.clone();
            inner.insert(var.clone(), env.clone());
            sub(path, PathStep::RecBody, &inner, body, env)
        }
        Process::Loop { var, body, after, .. } => {
            let mut inner = theta.clone();
            inner.insert(var.clone(), env.clone());
            sub(path, PathStep::LoopBody, &inner, body, env)?;
            sub(path, PathStep::LoopAfter, theta, after, env)
        }
        Process::Call { var, chans } => match theta.get(var) {
            Some(bound) => rules::call(env, bound, chans, "Std-Var", path),
            None => Err(TypeError::new("Std-Var", path, format!("{var} bound"), "unbound")),
        },
        Process::If { then, otherwise, .. } => {
            sub(path, PathStep::Then, theta, then, env)?;
            sub(path, PathStep::Else, theta, otherwise, env)
        }
    }
}

fn sub(path: &mut Vec<PathStep>, step: PathStep, theta: &StdCtx, q: &Process, env: &TypeEnv) -> Result<(), TypeError> {
    path.push(step);
    let r = check(theta, q, env, path);
    path.pop();
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_process, parse_type, Chan, SessionType};

    fn env1(k: &str, t: &str) -> TypeEnv {
        TypeEnv::from_entries([(Chan::plus(k), parse_type(t).unwrap())])
    }

    #[test]
    fn inaction_needs_completed_environment() {
        let p = Process::Inact;
        assert!(check_std(&StdCtx::new(), &p, &env1("k", "end")).is_ok());
        let e = check_std(&StdCtx::new(), &p, &env1("k", "!.end")).unwrap_err();
        assert_eq!(e.rule, "Std-Inact");
    }

    #[test]
    fn head_mismatch() {
        let p = parse_process("k+!(5).0").unwrap();
        let e = check_std(&StdCtx::new(), &p, &env1("k", "?.end")).unwrap_err();
        assert_eq!(e.rule, "Std-Out");
        assert!(e.path.is_empty());
    }

    #[test]
    fn recursion_against_unrolled_type() {
        let p = parse_process("rec X. k+<<a.k+<<b.X(k+)").unwrap();
        assert!(check_std(&StdCtx::new(), &p, &env1("k", "mu t. +{ a[b].t, b[a].t }")).is_ok());
        let p = parse_process("rec X. k+!(1).X(k+)").unwrap();
        assert!(check_std(&StdCtx::new(), &p, &env1("k", "mu t. !.!.t")).is_ok());
        let p = parse_process("rec X. k+!(1).k+?(x).X(k+)").unwrap();
        assert!(check_std(&StdCtx::new(), &p, &env1("k", "mu t. !.t")).is_err());
    }

    #[test]
    fn branches_must_cover_the_type() {
        let t = "&{ a.end, b.end }";
        assert!(check_std(&StdCtx::new(), &parse_process("k+>>{ a: 0, b: 0 }").unwrap(), &env1("k", t)).is_ok());
        let e = check_std(&StdCtx::new(), &parse_process("k+>>{ a: 0 }").unwrap(), &env1("k", t)).unwrap_err();
        assert_eq!(e.rule, "Std-Bra");
    }

    #[test]
    fn parallel_splits_by_names() {
        let env = TypeEnv::from_entries([
            (Chan::plus("k"), parse_type("!.end").unwrap()),
            (Chan::minus("k"), parse_type("?.end").unwrap()),
            (Chan::plus("z"), SessionType::End),
        ]);
        let p = parse_process("k+!(1).0 | k-?(x).0").unwrap();
        assert!(check_std(&StdCtx::new(), &p, &env).is_ok());
        let p = parse_process("k+!(1).k-?(x).0 | 0").unwrap();
        assert!(check_std(&StdCtx::new(), &p, &env).is_ok());
        let p = parse_process("k+!(1).0 | k+!(1).0").unwrap();
        assert!(check_std(&StdCtx::new(), &p, &env).is_err());
    }

    #[test]
    fn unbound_variable() {
        let e = check_std(&StdCtx::new(), &parse_process("X(k+)").unwrap(), &env1("k", "end")).unwrap_err();
        assert_eq!(e.rule, "Std-Var");
    }
}
