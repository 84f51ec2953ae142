//! Property tests over generated processes and types.

use proptest::prelude::*;

use livesession::harness::{gen_session_type, gen_typed, GenConfig};
use livesession::syntax::{parse_env_entries, parse_process, parse_type, LabelSet};
use livesession::types::{contains_lasso, equiv, is_dual, type_traces, TypeAutomaton, TypeLabel};
use livesession::typing::{approx_a, check_live, check_std, env_step, Gamma, LiveCtx, StdCtx};

fn cfg(seed: u64) -> GenConfig {
    GenConfig::default().with_seed(seed)
}

fn live(pending: LabelSet) -> LiveCtx {
    LiveCtx {
        gamma: Gamma::new(),
        pending,
    }
}

/// Follows `trace` from the initial state; the automaton is deterministic.
fn accepts(a: &TypeAutomaton, trace: &[TypeLabel]) -> bool {
    let mut s = a.initial;
    for l in trace {
        match a.edges[s].iter().find(|(m, _)| m == l) {
            Some(&(_, next)) => s = next,
            None => return false,
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn process_print_parse_round_trip(seed in any::<u64>()) {
        let (p, env) = gen_typed(&cfg(seed));
        let printed = p.to_string();
        prop_assert_eq!(parse_process(&printed).unwrap(), p);
        let text: String = env.iter().map(|(k, t)| format!("{k} : {t}\n")).collect();
        let entries = parse_env_entries(&text).unwrap();
        prop_assert_eq!(entries.len(), env.len());
        for (k, t) in entries {
            prop_assert_eq!(Some(&t), env.get(&k));
        }
    }

    #[test]
    fn type_print_parse_round_trip(seed in any::<u64>()) {
        let t = gen_session_type(&cfg(seed));
        prop_assert_eq!(parse_type(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn duality_is_symmetric_and_involutive(seed in any::<u64>()) {
        let t = gen_session_type(&cfg(seed));
        let d = t.syntactic_dual();
        prop_assert!(is_dual(&t, &d));
        prop_assert!(is_dual(&d, &t));
        prop_assert!(equiv(&d.syntactic_dual(), &t));
    }

    #[test]
    fn unrolled_lassos_are_finite_traces(seed in any::<u64>(), k in 0usize..4) {
        let t = gen_session_type(&cfg(seed));
        let a = TypeAutomaton::build(&t);
        for l in type_traces(&t, 8).lassos {
            prop_assert!(contains_lasso(&a, &l));
            let mut unrolled = l.prefix.clone();
            for _ in 0..k {
                unrolled.extend(l.cycle.iter().cloned());
            }
            prop_assert!(accepts(&a, &unrolled));
        }
    }

    #[test]
    fn env_steps_preserve_domain_and_balance(seed in any::<u64>()) {
        let (_, env) = gen_typed(&cfg(seed));
        prop_assert!(env.balanced());
        for (d, next) in env_step(&env) {
            prop_assert_eq!(next.domain(), env.domain());
            if let Some(k) = d.subject() {
                prop_assert!(env.domain().contains(k));
            }
            // A synchronisation moves both ends; a lone half breaks duality.
            if d.subject().is_none() {
                prop_assert!(next.balanced());
            }
        }
    }

    #[test]
    fn live_typing_embeds_in_standard_typing(seed in any::<u64>()) {
        let (p, env) = gen_typed(&cfg(seed));
        if check_live(&live(LabelSet::new()), &p, &env).is_ok() {
            prop_assert!(check_std(&StdCtx::new(), &p, &env).is_ok());
        }
    }

    #[test]
    fn weakening_drops_pending_responses(seed in any::<u64>()) {
        let (p, env) = gen_typed(&cfg(seed));
        let a = approx_a(&p);
        if check_live(&live(a.clone()), &p, &env).is_ok() {
            for l in &a {
                let mut fewer = a.clone();
                fewer.remove(l);
                prop_assert!(check_live(&live(fewer), &p, &env).is_ok());
            }
        }
    }
}
