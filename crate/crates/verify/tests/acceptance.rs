//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! All comparisons are exact (integers, rationals and booleans; tolerance
//! zero). The index-3/4 subgroup searches are optional and run only with
//! `cargo test --test acceptance -- --deep`.

use std::sync::Arc;
use std::time::Instant;

use coinv_core::fqm::{count_orthogonal_brute_force, orthogonal_group, primary_decompose, FqModule};
use coinv_core::glue::{table2_build, ClassTag};
use coinv_core::irr::{build_irr, hk_untwisted_action, sigma_label_action};
use coinv_core::linalg::rat;
use coinv_verify::cache::Cache;
use coinv_verify::expect::Expectations;
use coinv_verify::pipeline::{run_class, ClassReport, Options, Stage, Topic};
use num_rational::BigRational;
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report_line(n: u32, title: &str, budget: &str, secs: f64, o: &Outcome) {
    let status = if o.pass { "PASS" } else { "FAIL" };
    println!("{status} criterion {n}: {title} [exact; {secs:.1}s, budget {budget}] {}", o.detail);
}

fn topic_outcome(reports: &[ClassReport], topics: &[Topic], classes: &[ClassTag]) -> Outcome {
    let mut failed = Vec::new();
    let mut count = 0;
    for r in reports.iter().filter(|r| classes.contains(&r.class)) {
        for c in r.checks.iter().filter(|c| topics.contains(&c.topic)) {
            count += 1;
            if !c.pass {
                failed.push(format!("{} {}: {} vs {}", r.class.name(), c.label, c.computed, c.expected.as_deref().unwrap_or("-")));
            }
        }
    }
    let pass = failed.is_empty() && count > 0;
    let detail = if pass { format!("{count} checks") } else { format!("{count} checks; failed: {}", failed.join("; ")) };
    Outcome { pass, detail }
}

fn check_pass(r: &ClassReport, id: &str) -> Result<String, String> {
    match r.check(id) {
        Some(c) if c.pass => Ok(format!("{} {}", r.class.name(), c.computed)),
        Some(c) => Err(format!("{} {}: {} vs {}", r.class.name(), c.label, c.computed, c.expected.as_deref().unwrap_or("-"))),
        None => Err(format!("{} has no check {id}", r.class.name())),
    }
}

fn identification(reports: &[ClassReport]) -> Outcome {
    let mut notes = Vec::new();
    let mut errors = Vec::new();
    for r in reports {
        let ids: &[&str] = match r.class {
            ClassTag::C4 | ClassTag::E8 => &["index2_unique", "index2_order"],
            ClassTag::E6 => &["aut_is_o_irr"],
            _ => &[],
        };
        for id in ids {
            match check_pass(r, id) {
                Ok(s) => notes.push(format!("{id} {s}")),
                Err(e) => errors.push(e),
            }
        }
        if let Some(c) = r.check("index2_order_screen") {
            notes.push(format!("{} order-only screen {}", r.class.name(), c.computed));
        }
    }
    Outcome { pass: errors.is_empty(), detail: if errors.is_empty() { notes.join(", ") } else { errors.join("; ") } }
}

/// Indecomposable non-degenerate quadratic modules of order at most 64.
fn blocks() -> Vec<FqModule> {
    let mut out = Vec::new();
    let cyclic = |d: u32, q: BigRational| {
        let b = &q * rat(2, 1);
        FqModule::new(vec![d], &[q], &[vec![b]]).expect("valid cyclic block")
    };
    let primes = [3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61];
    for &p in &primes {
        // A quadratic non-residue mod p.
        let nr = (2..p).find(|&a| (1..p).all(|x| (x * x) % p != a)).expect("non-residue");
        let mut pk = p;
        while pk <= 64 {
            for a in [1, nr] {
                out.push(cyclic(pk, rat(a as i64, pk as i64)));
            }
            pk *= p;
        }
    }
    let mut k = 2u32;
    while k <= 64 {
        let units: &[i64] = if k == 2 { &[1, 3] } else { &[1, 3, 5, 7] };
        for &u in units {
            out.push(cyclic(k, rat(u, 2 * k as i64)));
        }
        k *= 2;
    }
    let mut k = 2i64;
    while k * k <= 64 {
        let z = rat(0, 1);
        let b = rat(1, k);
        out.push(FqModule::new(vec![k as u32; 2], &[z.clone(), z.clone()], &[vec![z.clone(), b.clone()], vec![b.clone(), z.clone()]]).unwrap());
        let q = rat(1, k);
        let d = rat(2, k);
        out.push(FqModule::new(vec![k as u32; 2], &[q.clone(), q], &[vec![d.clone(), b.clone()], vec![b, d]]).unwrap());
        k *= 2;
    }
    out
}

/// Every orthogonal sum of blocks (as a multiset) of order at most 64.
fn small_modules() -> Vec<FqModule> {
    fn rec(bs: &[FqModule], start: usize, acc: Option<FqModule>, out: &mut Vec<FqModule>) {
        for i in start..bs.len() {
            let size = acc.as_ref().map_or(1, FqModule::size) * bs[i].size();
            if size > 64 {
                continue;
            }
            let m = match &acc {
                Some(a) => a.direct_sum(&bs[i]),
                None => bs[i].clone(),
            };
            out.push(m.clone());
            rec(bs, i, Some(m), out);
        }
    }
    let mut out = Vec::new();
    rec(&blocks(), 0, None, &mut out);
    out
}

fn properties() -> Outcome {
    let mut errors = Vec::new();
    let mut notes = Vec::new();

    // Label maps preserve q on their domains, checked pair by pair.
    let mut maps = 0usize;
    for c in [ClassTag::C4, ClassTag::E6, ClassTag::E8] {
        let b = table2_build(c);
        let irr = build_irr(&b).expect("module of irreducibles");
        let lm = &irr.lambda_module;
        for x in 0..lm.size() {
            let alpha = irr.disc.representative(irr.lambda_to_disc[x]);
            let s = sigma_label_action(&irr, &alpha).expect("sigma action");
            maps += 1;
            // The costlier whole-map checks run on generators of the lambda part.
            let is_gen = (0..lm.rank()).any(|k| lm.gen(k) == x);
            if !s.untwisted.preserves_q(&irr.module) || (is_gen && !s.untwisted.is_partial_isomorphism(&irr.module)) {
                errors.push(format!("{c}: sigma for element {x} fails on its domain"));
            }
            if let Some(f) = s.full.as_ref().filter(|_| is_gen) {
                if !f.is_orthogonal(&irr.module) {
                    errors.push(format!("{c}: full sigma map for element {x} is not orthogonal"));
                }
            }
        }
        for k in 0..irr.n as i64 {
            let p = hk_untwisted_action(&irr, &b.gamma, k).expect("h_k action");
            maps += 1;
            if !p.preserves_q(&irr.module) || !p.is_partial_isomorphism(&irr.module) {
                errors.push(format!("{c}: h_{k} fails on its domain"));
            }
        }
    }
    notes.push(format!("{maps} label maps preserve q"));

    // Every module built by the pipeline is non-degenerate.
    let mut built = 0usize;
    for c in ClassTag::ALL {
        let b = table2_build(c);
        let d = b.l.discriminant().expect("discriminant").module;
        let irr = build_irr(&b).expect("module of irreducibles");
        let mut ms = vec![d.clone(), (*irr.module).clone(), irr.lambda_module.clone()];
        for m in [&d, &*irr.module] {
            ms.extend(primary_decompose(m).parts.into_iter().map(|(_, p)| p));
        }
        for m in ms {
            built += 1;
            if !m.is_nondegenerate() {
                errors.push(format!("{c}: a built module of order {} is degenerate", m.size()));
            }
        }
    }
    notes.push(format!("{built} built modules non-degenerate"));

    // Orthogonal group orders against exhaustive counting.
    let mods = small_modules();
    let bad: Vec<String> = mods
        .par_iter()
        .filter_map(|m| {
            let brute = count_orthogonal_brute_force(m) as u128;
            let o = orthogonal_group(Arc::new(m.clone()), 1).ok()?;
            (brute != o.search_order || brute != o.chain_order)
                .then(|| format!("{:?}: brute {brute}, search {}, chain {}", m.factors(), o.search_order, o.chain_order))
        })
        .collect();
    notes.push(format!("{} modules of order <= 64 match brute force", mods.len() - bad.len()));
    errors.extend(bad);

    // Vacuum anomaly of the first twisted sector for 4C.
    let b = table2_build(ClassTag::C4);
    let irr = build_irr(&b).expect("module of irreducibles");
    let rho = coinv_core::irr::vacuum_anomaly(&b, 1).expect("anomaly");
    if rho != rat(3, 4) || !coinv_core::irr::anomaly_matches_sector(&irr, 1, &rho) {
        errors.push(format!("4C: rho_1 = {rho}, expected 3/4 among the sector weights"));
    } else {
        notes.push("4C rho_1 = 3/4 matches a sector weight".into());
    }

    Outcome { pass: errors.is_empty(), detail: if errors.is_empty() { notes.join(", ") } else { errors.join("; ") } }
}

fn deep_tier(exp: &Expectations) -> Outcome {
    let opts = Options { deep: true, ..Options::default() };
    let rs: Vec<Result<ClassReport, String>> = [ClassTag::G6, ClassTag::F10]
        .par_iter()
        .map(|&c| run_class(c, exp.get(c).expect("expectations"), &Cache::disabled(), &opts).map_err(|e| e.to_string()))
        .collect();
    let mut errors = Vec::new();
    let mut notes = Vec::new();
    for r in rs {
        match r {
            Err(e) => errors.push(e),
            Ok(r) => {
                for id in ["deep_unique", "deep_order"] {
                    match check_pass(&r, id) {
                        Ok(s) => notes.push(format!("{id} {s}")),
                        Err(e) => errors.push(e),
                    }
                }
            }
        }
    }
    let mut detail = notes.join(", ");
    if !errors.is_empty() {
        detail = format!("{detail}; failed: {}", errors.join("; "));
    }
    Outcome { pass: errors.is_empty(), detail }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    // Under `cargo test -- --list`, report no tests.
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let deep = args.iter().any(|a| a == "--deep");
    let exp = Expectations::builtin();

    let t = Instant::now();
    let reports: Vec<ClassReport> = ClassTag::ALL
        .par_iter()
        .map(|&c| {
            let opts = Options { upto: Stage::Automorphisms, ..Options::default() };
            run_class(c, exp.get(c).expect("expectations"), &Cache::disabled(), &opts).expect("pipeline run")
        })
        .collect();
    let pipeline_secs = t.elapsed().as_secs_f64();
    let stage_secs = |stage: Stage| -> f64 {
        reports.iter().flat_map(|r| &r.timings).filter(|t| t.stage == stage).map(|t| t.seconds).sum()
    };
    let all = ClassTag::ALL;
    let mut ok = true;
    let mut line = |n, title: &str, budget: &str, secs: f64, o: Outcome| {
        report_line(n, title, budget, secs, &o);
        ok &= o.pass;
    };
    println!("acceptance: class pipelines finished in {pipeline_secs:.1}s (cold cache, classes in parallel)");
    line(1, "lattice facts", "1 min/class", stage_secs(Stage::Lattice), topic_outcome(&reports, &[Topic::LatticeFacts], &all));
    line(2, "O(L) and C(g) orders", "30 min", stage_secs(Stage::Lattice), topic_outcome(&reports, &[Topic::LatticeGroups], &all));
    line(3, "faithfulness and transitivity on isotropic sets", "5 min", stage_secs(Stage::Discriminant), topic_outcome(&reports, &[Topic::OrbitClaims], &all));
    line(4, "discriminant orthogonal groups and indices", "20 min", stage_secs(Stage::Discriminant), topic_outcome(&reports, &[Topic::DiscriminantGroups], &all));
    line(5, "Irr, O(Irr), S_g transitivity, stabilizers, index chain", "2 h", stage_secs(Stage::Irreducibles), topic_outcome(&reports, &[Topic::IrrGroups], &all));
    line(6, "automorphism group for index 1 and 2", "2 h/class", stage_secs(Stage::Automorphisms), identification(&reports));
    let t = Instant::now();
    let props = properties();
    line(7, "property suites", "seconds", t.elapsed().as_secs_f64(), props);
    if deep {
        let t = Instant::now();
        let o = deep_tier(&exp);
        line(8, "index-3 and index-4 subgroup searches", "multi-hour", t.elapsed().as_secs_f64(), o);
    } else {
        println!("SKIP criterion 8: optional tier, run with `cargo test --test acceptance -- --deep`");
    }
    if !ok {
        eprintln!("acceptance: some criteria failed");
        std::process::exit(1);
    }
}
