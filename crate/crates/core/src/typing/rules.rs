//! Judgement steps shared by both typing systems: how a prefix consumes the
//! type of its subject, and when a call matches its recursion's environment.

use crate::syntax::{Chan, Label, LabelSet, PathStep, Process, SessionType, Violation};

use super::{TypeEnv, TypeError};

pub(crate) fn conventions(p: &Process) -> Result<(), TypeError> {
    match crate::syntax::check_conventions(p).first() {
        None => Ok(()),
        Some(Violation { kind, at, loop_var }) => Err(TypeError::new(
            "Conventions",
            at,
            format!("a legal body for loop {loop_var}"),
            format!("{kind:?}"),
        )),
    }
}

fn head(env: &TypeEnv, k: &Chan, rule: &str, path: &[PathStep]) -> Result<SessionType, TypeError> {
    match env.get(k) {
        Some(t) => Ok(t.unfold()),
        None => Err(TypeError::new(rule, path, format!("{k} in the environment"), env.to_string())),
    }
}

fn mismatch(rule: &str, path: &[PathStep], k: &Chan, expected: &str, t: &SessionType) -> TypeError {
    TypeError::new(rule, path, format!("{k}: {expected}"), format!("{k}: {t}"))
}

pub(crate) fn out(env: &TypeEnv, k: &Chan, rule: &str, path: &[PathStep]) -> Result<TypeEnv, TypeError> {
    match head(env, k, rule, path)? {
        SessionType::Out(t) => Ok(env.with(k, *t)),
        t => Err(mismatch(rule, path, k, "!.T", &t)),
    }
}

pub(crate) fn inp(env: &TypeEnv, k: &Chan, rule: &str, path: &[PathStep]) -> Result<TypeEnv, TypeError> {
    match head(env, k, rule, path)? {
        SessionType::In(t) => Ok(env.with(k, *t)),
        t => Err(mismatch(rule, path, k, "?.T", &t)),
    }
}

/// The environment after selecting `l`, and the responses `l` requests.
pub(crate) fn sel(
    env: &TypeEnv,
    k: &Chan,
    l: &Label,
    rule: &str,
    path: &[PathStep],
) -> Result<(TypeEnv, LabelSet), TypeError> {
    match head(env, k, rule, path)? {
        SessionType::Select(arms) => match arms.into_iter().find(|a| &a.label == l) {
            Some(a) => Ok((env.with(k, a.cont), a.responses)),
            None => Err(TypeError::new(
                rule,
                path,
                format!("{k} to offer {l}"),
                env.get(k).unwrap().to_string(),
            )),
        },
        t => Err(mismatch(rule, path, k, "+{...}", &t)),
    }
}

/// Per process arm, the environment and responses of the matching type arm.
/// Process and type must offer exactly the same labels.
pub(crate) fn bra(
    env: &TypeEnv,
    k: &Chan,
    arms: &[(Label, Process)],
    rule: &str,
    path: &[PathStep],
) -> Result<Vec<(TypeEnv, LabelSet)>, TypeError> {
    match head(env, k, rule, path)? {
        SessionType::Branch(tarms) => {
            let offered: LabelSet = arms.iter().map(|(l, _)| l.clone()).collect();
            let typed: LabelSet = tarms.iter().map(|a| a.label.clone()).collect();
            if offered != typed {
                return Err(TypeError::new(
                    rule,
                    path,
                    format!("branches {}", crate::syntax::fmt_labels(&typed)),
                    format!("branches {}", crate::syntax::fmt_labels(&offered)),
                ));
            }
            Ok(arms
                .iter()
                .map(|(l, _)| {
                    let a = tarms.iter().find(|a| &a.label == l).unwrap();
                    (env.with(k, a.cont.clone()), a.responses.clone())
                })
                .collect())
        }
        t => Err(mismatch(rule, path, k, "&{...}", &t)),
    }
}

pub(crate) fn completed(env: &TypeEnv, rule: &str, path: &[PathStep]) -> Result<(), TypeError> {
    if env.completed() {
        Ok(())
    } else {
        Err(TypeError::new(rule, path, "a completed environment", env.to_string()))
    }
}

/// A call `X(k̃)` must find the environment its recursion was typed under.
/// The listed channels must be in that environment, and any it leaves out
/// must already be finished.
pub(crate) fn call(
    env: &TypeEnv,
    bound: &TypeEnv,
    chans: &[Chan],
    rule: &str,
    path: &[PathStep],
) -> Result<(), TypeError> {
    if !env.equiv(bound) {
        return Err(TypeError::new(rule, path, bound.to_string(), env.to_string()));
    }
    let dom = env.domain();
    for k in chans {
        if !dom.contains(k) {
            return Err(TypeError::new(rule, path, format!("{k} in the environment"), env.to_string()));
        }
    }
    for (k, t) in env.iter() {
        if !chans.contains(k) && t.unfold() != SessionType::End {
            return Err(TypeError::new(
                rule,
                path,
                format!("{k} passed to the call"),
                format!("{k}: {t} left out"),
            ));
        }
    }
    Ok(())
}
