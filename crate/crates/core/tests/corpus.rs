mod common;

use common::{corpus_names, load, pairs};
use tst_core::semantics::{oracle_compliant, replay, Configuration};
use tst_core::syntax::make_disjoint;
use tst_core::verify::compliant;

#[test]
fn every_file_parses() {
    let names = corpus_names();
    assert!(names.len() >= 20);
    for name in names {
        load(&name);
    }
}

#[test]
fn verdicts_match_manifest() {
    for (l, r, expect) in pairs() {
        let v = compliant(&load(&l), &load(&r)).unwrap();
        assert_eq!(v.compliant, expect, "{} vs {}", l, r);
    }
}

#[test]
fn compliance_is_symmetric() {
    for (l, r, _) in pairs() {
        let (p, q) = (load(&l), load(&r));
        assert_eq!(compliant(&p, &q).unwrap().compliant, compliant(&q, &p).unwrap().compliant, "{} vs {}", l, r);
    }
}

#[test]
fn region_oracle_agrees() {
    for (l, r, _) in pairs() {
        let (p, q) = (load(&l), load(&r));
        let o = oracle_compliant(&p, &q).unwrap();
        assert_eq!(compliant(&p, &q).unwrap().compliant, o, "{} vs {}", l, r);
    }
}

#[test]
fn counterexamples_end_in_deadlock() {
    for (l, r, expect) in pairs() {
        if expect {
            continue;
        }
        let (p, q) = (load(&l), load(&r));
        let v = compliant(&p, &q).unwrap();
        let trace = v.counterexample.expect("counterexample").trace;
        let (p, q) = make_disjoint(&p, &q);
        let end = replay(&Configuration::initial(&p, &q).unwrap(), &trace).unwrap();
        assert!(end.is_deadlock(), "{} vs {}", l, r);
    }
}
