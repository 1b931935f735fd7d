mod common;

use common::{corpus_names, fed, load, pairs};
use tst_core::kinding::{admits_compliant, dual, kind, subtype};
use tst_core::syntax::parse_guard;
use tst_core::verify::compliant;

fn kind_is(name: &str, guard: &str) {
    let k = kind(&load(name)).unwrap();
    let expect = fed(&parse_guard(guard).unwrap(), &k.clocks);
    assert!(k.set.set_eq(&expect), "{}: kind {} expected {}", name, k, guard);
}

#[test]
fn kinds_of_named_terms() {
    kind_is("split_sender", "x>1 && x<=2");
    kind_is("late_receiver", "x<=1");
}

#[test]
fn terms_without_compliant() {
    for name in ["late_sender", "split_sender", "looping_reader", "weather_client_hasty"] {
        assert!(!admits_compliant(&load(name)).unwrap().0, "{}", name);
    }
}

#[test]
fn paired_terms_admit_a_compliant() {
    for (l, r, ok) in pairs() {
        if ok {
            for n in [&l, &r] {
                assert!(admits_compliant(&load(n)).unwrap().0, "{}", n);
            }
        }
    }
}

#[test]
fn duals_are_compliant() {
    for name in corpus_names() {
        let p = load(&name);
        if admits_compliant(&p).unwrap().0 {
            let d = dual(&p).unwrap();
            assert!(compliant(&p, &d).unwrap().compliant, "{}: {}", name, d);
        }
    }
}

#[test]
fn compliants_are_subtypes_of_the_dual() {
    for (l, r, ok) in pairs() {
        if !ok {
            continue;
        }
        let (p, q) = (load(&l), load(&r));
        assert!(subtype(&q, &dual(&p).unwrap()).unwrap(), "{} ⊑ co({})", r, l);
        assert!(subtype(&p, &dual(&q).unwrap()).unwrap(), "{} ⊑ co({})", l, r);
    }
}

#[test]
fn double_dual_is_equivalent() {
    for name in corpus_names() {
        let p = load(&name);
        if !admits_compliant(&p).unwrap().0 {
            continue;
        }
        let dd = dual(&dual(&p).unwrap()).unwrap();
        assert!(subtype(&p, &dd).unwrap(), "{} ⊑ co(co)", name);
        assert!(subtype(&dd, &p).unwrap(), "co(co) ⊑ {}", name);
    }
}

#[test]
fn everything_is_below_a_term_without_compliant() {
    let bottom = load("late_sender");
    for name in corpus_names() {
        assert!(subtype(&load(&name), &bottom).unwrap(), "{}", name);
    }
}

#[test]
fn subtyping_is_reflexive_on_admitting_terms() {
    for name in corpus_names() {
        let p = load(&name);
        if admits_compliant(&p).unwrap().0 {
            assert!(subtype(&p, &p).unwrap(), "{}", name);
        }
    }
}
