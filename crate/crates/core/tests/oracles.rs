mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random_pair;
use tst_core::kinding::{admits_compliant, dual};
use tst_core::monitor::monitor_compliant;
use tst_core::semantics::{oracle_compliant, replay, Configuration, ORACLE_LIMIT};
use tst_core::syntax::{make_disjoint, validate};
use tst_core::verify::{check_with, compliant, CheckOptions, SearchOrder};

#[test]
fn random_pairs_agree_with_region_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut verdicts = [0usize; 2];
    for _ in 0..250 {
        let (p, q) = random_pair(&mut rng, 5, 3);
        assert!(validate(&p).is_empty() && validate(&q).is_empty(), "{} / {}", p, q);
        let z = compliant(&p, &q).unwrap();
        let o = oracle_compliant(&p, &q).unwrap();
        assert_eq!(z.compliant, o, "{}  vs  {}", p, q);
        verdicts[z.compliant as usize] += 1;
        if let Some(cx) = &z.counterexample {
            let (p2, q2) = make_disjoint(&p, &q);
            let end = replay(&Configuration::initial(&p2, &q2).unwrap(), &cx.trace).unwrap();
            assert!(end.is_deadlock(), "{}  vs  {}", p, q);
        }
    }
    // both verdicts must be well represented for the comparison to mean anything
    assert!(verdicts[0] >= 40 && verdicts[1] >= 40, "{:?}", verdicts);
}

#[test]
fn random_pairs_agree_with_monitor_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..80 {
        let (p, q) = random_pair(&mut rng, 3, 3);
        let m = monitor_compliant(&p, &q, ORACLE_LIMIT).unwrap();
        assert_eq!(m, compliant(&p, &q).unwrap().compliant, "{}  vs  {}", p, q);
    }
}

#[test]
fn search_settings_do_not_change_verdicts() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..60 {
        let (p, q) = random_pair(&mut rng, 4, 3);
        let base = compliant(&p, &q).unwrap();
        for opts in [
            CheckOptions {
                order: SearchOrder::DepthFirst,
                ..CheckOptions::default()
            },
            CheckOptions {
                jobs: 4,
                ..CheckOptions::default()
            },
        ] {
            let v = check_with(&p, &q, &opts).unwrap();
            assert_eq!(v.compliant, base.compliant, "{}  vs  {}", p, q);
        }
        let par = check_with(&p, &q, &CheckOptions { jobs: 4, ..CheckOptions::default() }).unwrap();
        assert_eq!(par, base, "parallel search must reproduce the sequential result");
    }
}

#[test]
fn random_terms_with_a_compliant_get_a_compliant_dual() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut admitted = 0;
    for _ in 0..150 {
        let (p, q) = random_pair(&mut rng, 4, 3);
        let (ok, _) = admits_compliant(&p).unwrap();
        if compliant(&p, &q).unwrap().compliant {
            assert!(ok, "{} has compliant {} but an empty kind at zero", p, q);
        }
        if ok {
            admitted += 1;
            let d = dual(&p).unwrap();
            assert!(compliant(&p, &d).unwrap().compliant, "{}  vs dual  {}", p, d);
        }
    }
    assert!(admitted >= 30);
}
