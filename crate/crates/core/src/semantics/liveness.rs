//! Request-response liveness of finite and ultimately periodic sequences.
//!
//! A sequence is live when every request made at some position is answered
//! by a response strictly later. For a lasso `prefix · cycle^ω` every label
//! of the cycle recurs forever, so a request in the prefix may be answered
//! later in the prefix or anywhere in the cycle, while a request made in the
//! cycle must be answered somewhere in the cycle.

use crate::syntax::LabelSet;

/// The first position whose requests are not all answered later, if any.
pub fn first_unanswered<T>(
    seq: &[T],
    req: impl Fn(&T) -> LabelSet,
    res: impl Fn(&T) -> LabelSet,
) -> Option<usize> {
    let mut later = LabelSet::new();
    let mut worst = None;
    for (i, a) in seq.iter().enumerate().rev() {
        if !req(a).is_subset(&later) {
            worst = Some(i);
        }
        later.extend(res(a));
    }
    worst
}

pub fn is_live_finite<T>(
    seq: &[T],
    req: impl Fn(&T) -> LabelSet,
    res: impl Fn(&T) -> LabelSet,
) -> bool {
    first_unanswered(seq, req, res).is_none()
}

pub fn is_live_lasso<T>(
    prefix: &[T],
    cycle: &[T],
    req: impl Fn(&T) -> LabelSet,
    res: impl Fn(&T) -> LabelSet,
) -> bool {
    if cycle.is_empty() {
        return is_live_finite(prefix, req, res);
    }
    let recurring: LabelSet = cycle.iter().flat_map(&res).collect();
    if cycle.iter().any(|a| !req(a).is_subset(&recurring)) {
        return false;
    }
    let mut later = recurring;
    for a in prefix.iter().rev() {
        if !req(a).is_subset(&later) {
            return false;
        }
        later.extend(res(a));
    }
    true
}

/// The pending requests after a finite sequence: everything requested and
/// not answered since.
pub fn pending_after<T>(
    seq: &[T],
    req: impl Fn(&T) -> LabelSet,
    res: impl Fn(&T) -> LabelSet,
) -> LabelSet {
    let mut pending = LabelSet::new();
    for a in seq {
        let r = res(a);
        pending.retain(|l| !r.contains(l));
        pending.extend(req(a));
    }
    pending
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::labels;

    type Act = (&'static str, &'static [&'static str]);

    fn req(a: &Act) -> LabelSet {
        labels(a.1.iter().copied())
    }

    fn res(a: &Act) -> LabelSet {
        labels([a.0])
    }

    #[test]
    fn finite_sequences() {
        let empty: [Act; 0] = [];
        assert!(is_live_finite(&empty, req, res));
        let good: [Act; 3] = [("a", &["b"]), ("c", &[]), ("b", &[])];
        assert!(is_live_finite(&good, req, res));
        let bad: [Act; 2] = [("b", &[]), ("a", &["b"])];
        assert!(!is_live_finite(&bad, req, res));
        assert_eq!(first_unanswered(&bad, req, res), Some(1));
        assert_eq!(pending_after(&bad, req, res), labels(["b"]));
    }

    #[test]
    fn self_response_does_not_count() {
        let seq: [Act; 1] = [("a", &["a"])];
        assert!(!is_live_finite(&seq, req, res));
        assert!(is_live_lasso(&[], &seq, req, res));
    }

    #[test]
    fn lassos() {
        let a: Act = ("a", &["b"]);
        let b: Act = ("b", &["a"]);
        assert!(!is_live_lasso(&[], &[a], req, res));
        assert!(is_live_lasso(&[], &[a, b], req, res));
        assert!(is_live_lasso(&[a], &[b, a], req, res));
        let c: Act = ("c", &[]);
        assert!(!is_live_lasso(&[a], &[c], req, res));
        assert!(!is_live_lasso(&[a, b], &[c], req, res));
    }

    #[test]
    fn lasso_agrees_with_unrolling_for_prefix_requests() {
        let a: Act = ("a", &["b"]);
        let b: Act = ("b", &[]);
        let c: Act = ("c", &[]);
        let prefix = [a, c];
        let cycle = [c, b];
        let unrolled: Vec<Act> = prefix
            .iter()
            .chain(cycle.iter().cycle().take(6))
            .copied()
            .collect();
        assert!(is_live_lasso(&prefix, &cycle, req, res));
        assert!(first_unanswered(&unrolled, req, res).is_none_or(|i| i >= prefix.len()));
    }
}
