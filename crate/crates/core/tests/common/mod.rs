//! Test support shared by the integration tests and the acceptance harness:
//! corpus access, random guards and TSTs, and grid-membership oracles that
//! evaluate guards directly instead of going through zones.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use rand::Rng;

use tst_core::syntax::{parse, Branch, CmpOp, Guard, Polarity, Tst};
use tst_core::zones::{fed_from_guard, ClockMap, Federation, Valuation, Q};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn load(name: &str) -> Tst {
    let path = corpus_dir().join(format!("{}.tst", name));
    let src = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {}", path.display(), e));
    parse(&src).unwrap_or_else(|e| panic!("{}: {}", name, e))
}

pub fn corpus_names() -> Vec<String> {
    let mut out: Vec<String> = fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.ok()?.path();
            (p.extension()? == "tst").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    out.sort();
    out
}

/// `left right compliant?` from the corpus manifest.
pub fn pairs() -> Vec<(String, String, bool)> {
    fs::read_to_string(corpus_dir().join("pairs.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            (f[0].to_string(), f[1].to_string(), f[2] == "compliant")
        })
        .collect()
}

const OPS: [CmpOp; 5] = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Ge, CmpOp::Gt];

pub fn random_atom<R: Rng>(rng: &mut R, clocks: &[&str], max_c: u32) -> Guard {
    let op = OPS[rng.random_range(0..OPS.len())];
    let c = rng.random_range(0..=max_c);
    let x = clocks[rng.random_range(0..clocks.len())];
    if clocks.len() > 1 && rng.random_bool(0.25) {
        let mut y = clocks[rng.random_range(0..clocks.len())];
        while y == x {
            y = clocks[rng.random_range(0..clocks.len())];
        }
        Guard::diag(x, y, op, c)
    } else {
        Guard::atom(x, op, c)
    }
}

/// A random guard with negation, conjunction and disjunction.
pub fn random_guard<R: Rng>(rng: &mut R, clocks: &[&str], max_c: u32, depth: u32) -> Guard {
    if depth == 0 || rng.random_bool(0.3) {
        return if rng.random_bool(0.05) { Guard::True } else { random_atom(rng, clocks, max_c) };
    }
    match rng.random_range(0..4) {
        0 => Guard::not(random_guard(rng, clocks, max_c, depth - 1)),
        1 => Guard::or(random_guard(rng, clocks, max_c, depth - 1), random_guard(rng, clocks, max_c, depth - 1)),
        _ => Guard::and(random_guard(rng, clocks, max_c, depth - 1), random_guard(rng, clocks, max_c, depth - 1)),
    }
}

/// Every valuation whose components are multiples of `1/3` in `[0, d+1]`.
pub fn grid(n: usize, d: u32) -> Vec<Vec<Q>> {
    let steps: Vec<Q> = (0..=3 * (d as i64 + 1)).map(|k| Q::new(k.into(), 3.into())).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                steps.iter().map(move |s| {
                    let mut w = v.clone();
                    w.push(s.clone());
                    w
                })
            })
            .collect();
    }
    out
}

pub fn eval(g: &Guard, clocks: &[&str], v: &[Q]) -> bool {
    g.eval(&|x| clocks.iter().position(|c| *c == x).map(|i| v[i].clone()))
        .expect("guard over known clocks")
}

fn valuation(v: &[Q]) -> Valuation {
    Valuation::from_values(v.to_vec())
}

pub fn fed(g: &Guard, clocks: &ClockMap) -> Federation {
    fed_from_guard(g, clocks).unwrap()
}

/// Checks that `f` agrees with `expect` on the grid.
pub fn agrees(f: &Federation, n: usize, d: u32, expect: &dyn Fn(&[Q]) -> bool) -> Result<(), String> {
    for v in grid(n, d) {
        if f.contains(&valuation(&v)) != expect(&v) {
            let shown: Vec<String> = v.iter().map(|q| q.to_string()).collect();
            return Err(format!("disagree at ({})", shown.join(", ")));
        }
    }
    Ok(())
}

/// `∃δ ≥ 0. ν+δ ⊨ g`, with δ ranging over multiples of `1/6` up to `d+1`.
/// Grid points are multiples of `1/3` and guard constants are integers, so
/// every delay interval of interest contains such a δ.
pub fn past_holds(g: &Guard, clocks: &[&str], v: &[Q], d: u32) -> bool {
    (0..=6 * (d as i64 + 1)).any(|k| {
        let delta = Q::new(k.into(), 6.into());
        let w: Vec<Q> = v.iter().map(|x| x + &delta).collect();
        eval(g, clocks, &w)
    })
}

pub fn reset_holds(g: &Guard, clocks: &[&str], v: &[Q], r: &[usize]) -> bool {
    let w: Vec<Q> = v
        .iter()
        .enumerate()
        .map(|(i, x)| if r.contains(&i) { Q::from_integer(0.into()) } else { x.clone() })
        .collect();
    eval(g, clocks, &w)
}

/// Where `v` lies with respect to every atom `x ∘ c` and `x - y ∘ c` with
/// `c <= d`: two valuations with the same signature are in the same d-region.
/// Values are given in thirds.
pub fn region_signature(thirds: &[i64], d: u32) -> Vec<std::cmp::Ordering> {
    let d = d as i64;
    let mut out = Vec::new();
    for i in 0..thirds.len() {
        for c in -d..=d {
            out.push(thirds[i].cmp(&(3 * c)));
        }
        for j in 0..thirds.len() {
            if i != j {
                for c in -d..=d {
                    out.push((thirds[i] - thirds[j]).cmp(&(3 * c)));
                }
            }
        }
    }
    out
}

fn thirds(v: &[Q]) -> Vec<i64> {
    v.iter()
        .map(|q| {
            let t = q * Q::from_integer(3.into());
            i64::try_from(t.to_integer()).expect("grid value")
        })
        .collect()
}

/// Whether all parts are canonical and `f` is a union of d-regions: its
/// membership is constant on every d-region met by the grid. Canonical DBMs
/// may carry implied bounds above `d` (from `y==4 && x-y>5` closure derives
/// `x>9`), so the check is semantic rather than on stored constants.
pub fn bounded(f: &Federation, n: usize, d: u32) -> Result<(), String> {
    if !f.is_canonical() {
        return Err("non-canonical part".into());
    }
    let mut seen: std::collections::HashMap<Vec<std::cmp::Ordering>, (bool, Vec<Q>)> = Default::default();
    for v in grid(n, d) {
        let m = f.contains(&valuation(&v));
        let sig = region_signature(&thirds(&v), d);
        match seen.get(&sig) {
            Some((m2, w)) if *m2 != m => {
                let a: Vec<String> = v.iter().map(|q| q.to_string()).collect();
                let b: Vec<String> = w.iter().map(|q| q.to_string()).collect();
                return Err(format!("splits the region of ({}) and ({})", a.join(", "), b.join(", ")));
            }
            Some(_) => {}
            None => {
                seen.insert(sig, (m, v));
            }
        }
    }
    Ok(())
}

/// A zone operation checked against the grid oracle.
#[derive(Clone, Copy, Debug)]
pub enum ZoneOp {
    Past,
    InverseReset,
    Union,
    Intersect,
    Subtract,
}

pub const ZONE_OPS: [ZoneOp; 5] = [ZoneOp::Past, ZoneOp::InverseReset, ZoneOp::Union, ZoneOp::Intersect, ZoneOp::Subtract];

/// One randomized check of `op` on two clocks with constants `<= d`.
pub fn check_zone_op<R: Rng>(rng: &mut R, op: ZoneOp, d: u32) -> Result<(), String> {
    let names = ["x", "y"];
    let clocks = ClockMap::from_names(names);
    let g = random_guard(rng, &names, d, 3);
    let h = random_guard(rng, &names, d, 3);
    let (f1, f2) = (fed(&g, &clocks), fed(&h, &clocks));
    let ctx = |e: String| format!("{:?} on `{}` / `{}`: {}", op, g, h, e);
    let out = match op {
        ZoneOp::Past => {
            let out = f1.past();
            agrees(&out, 2, d, &|v| past_holds(&g, &names, v, d)).map_err(ctx)?;
            out
        }
        ZoneOp::InverseReset => {
            let r: Vec<usize> = (0..2).filter(|_| rng.random_bool(0.5)).collect();
            let ids: Vec<usize> = r.iter().map(|i| i + 1).collect();
            let out = f1.inverse_reset(&ids);
            agrees(&out, 2, d, &|v| reset_holds(&g, &names, v, &r)).map_err(ctx)?;
            out
        }
        ZoneOp::Union => {
            let out = f1.union(&f2);
            agrees(&out, 2, d, &|v| eval(&g, &names, v) || eval(&h, &names, v)).map_err(ctx)?;
            out
        }
        ZoneOp::Intersect => {
            let out = f1.intersect(&f2);
            agrees(&out, 2, d, &|v| eval(&g, &names, v) && eval(&h, &names, v)).map_err(ctx)?;
            out
        }
        ZoneOp::Subtract => {
            let out = f1.subtract(&f2);
            agrees(&out, 2, d, &|v| eval(&g, &names, v) && !eval(&h, &names, v)).map_err(ctx)?;
            out
        }
    };
    bounded(&out, 2, d).map_err(|e| format!("{:?} on `{}` / `{}`: {}", op, g, h, e))
}

fn random_branch_guard<R: Rng>(rng: &mut R, clocks: &[&str], max_c: u32) -> Guard {
    match rng.random_range(0..5) {
        0 | 1 => Guard::True,
        2 | 3 => random_atom(rng, clocks, max_c),
        _ => Guard::and(random_atom(rng, clocks, max_c), random_atom(rng, clocks, max_c)),
    }
}

fn random_resets<R: Rng>(rng: &mut R, clocks: &[&str]) -> BTreeSet<String> {
    clocks.iter().filter(|_| rng.random_bool(0.3)).map(|c| c.to_string()).collect()
}

/// A random closed, valid TST with at most `depth` nested prefixes; inside a
/// recursion, leaves may jump back to the binder.
pub fn random_tst<R: Rng>(rng: &mut R, clocks: &[&str], max_c: u32, depth: u32) -> Tst {
    let recursive = rng.random_bool(0.3);
    match random_body(rng, clocks, max_c, depth, recursive) {
        Tst::Var(_) => Tst::Success,
        body if recursive && body != Tst::Success => Tst::rec("X", body),
        body => body,
    }
}

fn random_body<R: Rng>(rng: &mut R, clocks: &[&str], max_c: u32, depth: u32, recursive: bool) -> Tst {
    if depth == 0 || rng.random_bool(0.2) {
        return if recursive && rng.random_bool(0.5) { Tst::var("X") } else { Tst::Success };
    }
    let pol = if rng.random_bool(0.5) { Polarity::Out } else { Polarity::In };
    let n = rng.random_range(1..=2);
    let branches = ["a", "b"][..n]
        .iter()
        .map(|a| Branch {
            action: a.to_string(),
            guard: random_branch_guard(rng, clocks, max_c),
            resets: random_resets(rng, clocks),
            cont: random_body(rng, clocks, max_c, depth - 1, recursive),
        })
        .collect();
    Tst::choice(pol, branches)
}

/// The same shape with opposite polarities, fresh guards on some branches
/// and independent resets; pairs built this way are often compliant.
pub fn mirror<R: Rng>(rng: &mut R, p: &Tst, clocks: &[&str], max_c: u32) -> Tst {
    match p {
        Tst::Success => Tst::Success,
        Tst::Var(x) => Tst::var(x),
        Tst::Rec(x, b) => Tst::rec(x, mirror(rng, b, clocks, max_c)),
        _ => {
            let (pol, bs) = p.branches().expect("choice");
            let out = bs
                .iter()
                .map(|b| Branch {
                    action: b.action.clone(),
                    guard: if rng.random_bool(0.5) {
                        b.guard.rename_clocks(&|c| {
                            let i = ["x", "y"].iter().position(|n| *n == c).unwrap_or(0);
                            clocks[i % clocks.len()].to_string()
                        })
                    } else {
                        random_branch_guard(rng, clocks, max_c)
                    },
                    resets: random_resets(rng, clocks),
                    cont: mirror(rng, &b.cont, clocks, max_c),
                })
                .collect();
            Tst::choice(pol.dual(), out)
        }
    }
}

/// A random pair over `x, y` and `u, v`.
pub fn random_pair<R: Rng>(rng: &mut R, max_c: u32, depth: u32) -> (Tst, Tst) {
    let p = random_tst(rng, &["x", "y"], max_c, depth);
    let q = if rng.random_bool(0.7) {
        mirror(rng, &p, &["u", "v"], max_c)
    } else {
        random_tst(rng, &["u", "v"], max_c, depth)
    };
    (p, q)
}
