use livesession::harness::suites::{certify, Certificate};
use livesession::harness::{corpus, SuiteConfig};
use livesession::typing::{check_live, check_std, Gamma, LiveCtx, StdCtx};

#[test]
fn typing_expectations_hold() {
    for e in corpus() {
        let (p, env) = (e.process(), e.env());
        assert_eq!(check_std(&StdCtx::new(), &p, &env).is_ok(), e.expected.std, "{}", e.name);
        let ctx = LiveCtx {
            gamma: Gamma::new(),
            pending: e.pending.clone(),
        };
        assert_eq!(check_live(&ctx, &p, &env).is_ok(), e.expected.live, "{}", e.name);
    }
}

#[test]
fn lock_freedom_expectations_hold() {
    let cfg = SuiteConfig::default();
    let mut pinned = 0;
    for e in corpus() {
        let Some(expected) = e.expected.lock_free else { continue };
        pinned += 1;
        let got = match certify(&e.process(), &e.prims.table(), &cfg) {
            Certificate::LockFree(_) => true,
            Certificate::NotLockFree => false,
            Certificate::Unknown(why) => panic!("{}: {why}", e.name),
        };
        assert_eq!(got, expected, "{}", e.name);
    }
    assert!(pinned > 0);
}
