use livesession::syntax::{parse_env_entries, parse_process, parse_type, Chan, Label, LabelSet};
use livesession::types::is_dual;
use livesession::typing::{check_live, check_live_closed, check_std, LiveCtx, StdCtx, TypeEnv};

fn load(proc_file: &str, env_file: &str) -> (livesession::syntax::Process, TypeEnv) {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/");
    let p = std::fs::read_to_string(format!("{dir}{proc_file}")).unwrap();
    let e = std::fs::read_to_string(format!("{dir}{env_file}")).unwrap();
    (
        parse_process(&p).unwrap(),
        TypeEnv::from_entries(parse_env_entries(&e).unwrap()),
    )
}

fn set(ls: &[&str]) -> LabelSet {
    ls.iter().map(|l| Label::new(l)).collect()
}

#[test]
fn both_carts_are_session_typed() {
    for f in ["shopping_d.proc", "shopping_d0.proc"] {
        let (p, env) = load(f, "shopping.env");
        assert!(env.balanced());
        check_std(&StdCtx::new(), &p, &env).unwrap_or_else(|e| panic!("{f}: {e}"));
    }
}

#[test]
fn only_the_bounded_cart_is_live_typed() {
    let (p, env) = load("shopping_d.proc", "shopping.env");
    let d = check_live_closed(&p, &env).unwrap_or_else(|e| panic!("{e}"));
    let invs: Vec<_> = d.invariants().map(|(_, i)| i.chosen.clone()).collect();
    assert!(invs.contains(&set(&["read", "write"])), "{invs:?}");

    let (p, env) = load("shopping_d0.proc", "shopping.env");
    let e = check_live_closed(&p, &env).unwrap_err();
    assert!(e.pending_left.contains(&Label::new("SI")), "{e}");
}

#[test]
fn delivery_discharges_the_invoice() {
    let ctx = LiveCtx {
        pending: set(&["SI"]),
        ..Default::default()
    };
    let (d, env) = load("delivery_d.proc", "delivery.env");
    check_live(&ctx, &d, &env).unwrap_or_else(|e| panic!("{e}"));
    let (d0, env) = load("delivery_d0.proc", "delivery.env");
    assert!(check_std(&StdCtx::new(), &d0, &env).is_ok());
    assert!(check_live(&ctx, &d0, &env).is_err());
    // with nothing pending the recursion is fine
    assert!(check_live(&LiveCtx::default(), &d0, &env).is_ok());
}

#[test]
fn store_types_are_dual_despite_annotation() {
    let td = parse_type("mu t. ?. mu s. &{ read.!.s, write.t, quit.end }").unwrap();
    let te = parse_type("mu t. !. mu s. +{ read.?.s, write[read].t, quit.end }").unwrap();
    assert!(is_dual(&td, &te));
    let (_, env) = load("shopping_d.proc", "shopping.env");
    assert!(is_dual(env.get(&Chan::plus("o")).unwrap(), env.get(&Chan::minus("o")).unwrap()));
}

#[test]
fn reader_examples() {
    for (f, t_live, u_live) in [
        ("reader_p.proc", true, false),
        ("reader_q.proc", true, true),
        ("reader_r.proc", true, true),
    ] {
        let (p, t) = load(f, "reader_t.env");
        let (_, u) = load(f, "reader_u.env");
        assert!(check_std(&StdCtx::new(), &p, &t).is_ok(), "{f}");
        assert!(check_std(&StdCtx::new(), &p, &u).is_ok(), "{f}");
        assert_eq!(check_live_closed(&p, &t).is_ok(), t_live, "{f} under T");
        assert_eq!(check_live_closed(&p, &u).is_ok(), u_live, "{f} under U");
    }
}
