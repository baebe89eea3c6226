//! Acceptance suite: one test per release criterion, each printing a single
//! pass/fail line (visible with `--nocapture`).

use std::time::Instant;

use gtensor::catalog;
use gtensor::fp;
use gtensor::group::{FiniteGroup, DEFAULT_ORDER_CAP};
use gtensor::harness::{self, SweepOptions};
use gtensor::oracle;
use gtensor::tensor::{self, Strategy};
use gtensor::Limits;

const CAP: usize = DEFAULT_ORDER_CAP;

fn limits() -> Limits {
    Limits::default()
}

fn groups_upto(max_order: usize) -> Vec<(&'static str, FiniteGroup)> {
    catalog::curated_names_upto(max_order, CAP)
        .into_iter()
        .map(|n| (n, catalog::by_name(n, CAP).unwrap()))
        .collect()
}

fn conclude(criterion: usize, label: &str, start: Instant, failures: Vec<String>) {
    let verdict = if failures.is_empty() { "pass" } else { "fail" };
    println!(
        "criterion {criterion:2} [{label}]: {verdict} ({:.1}s)",
        start.elapsed().as_secs_f64()
    );
    assert!(
        failures.is_empty(),
        "criterion {criterion} failed: {failures:?}"
    );
}

fn sweep(claims: &[&str], max_order: usize, n_max: usize) -> harness::SweepOutcome {
    let opts = SweepOptions {
        max_order,
        n_max,
        claims: claims.iter().map(|c| c.to_string()).collect(),
        ..SweepOptions::default()
    };
    harness::run_sweep(&opts, &limits(), std::io::sink()).unwrap()
}

fn sweep_failures(outcome: &harness::SweepOutcome) -> Vec<String> {
    outcome
        .reports
        .iter()
        .filter(|r| r.status == harness::Status::Fail)
        .map(|r| {
            format!(
                "{} on {} (N order {:?}, n {:?}): {:?}",
                r.claim,
                r.instance.group,
                r.instance.n_subgroup.as_ref().and_then(|v| v.get("order").cloned()),
                r.instance.n,
                r.witness
            )
        })
        .collect()
}

#[test]
fn criterion_01_abelian_bilinear_oracle() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (name, g) in groups_upto(16) {
        if !g.is_abelian() {
            continue;
        }
        let inv = g.abelian_invariants();
        let t = tensor::tensor_square(&g, Strategy::Direct, &limits()).unwrap();
        let e = tensor::exterior_square(&g, Strategy::Direct, &limits()).unwrap();
        if t.group.abelian_invariants() != oracle::tensor_invariants(&inv, &inv) {
            failures.push(format!("{name}: tensor square disagrees with oracle"));
        }
        if e.group.abelian_invariants() != oracle::exterior_invariants(&inv) {
            failures.push(format!("{name}: exterior square disagrees with oracle"));
        }
        if t.group.order() as u64 != oracle::tensor_order(&inv, &inv)
            || e.group.order() as u64 != oracle::exterior_order(&inv)
        {
            failures.push(format!("{name}: square order disagrees with oracle"));
        }
    }
    conclude(1, "abelian squares match bilinear oracle", start, failures);
}

#[test]
fn criterion_02_dual_strategy_agreement() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (name, g) in groups_upto(16) {
        let d = tensor::tensor_square(&g, Strategy::Direct, &limits()).unwrap();
        let n = tensor::tensor_square(&g, Strategy::Nu, &limits()).unwrap();
        if d.group.order() != n.group.order() {
            failures.push(format!(
                "{name}: direct order {} vs nu order {}",
                d.group.order(),
                n.group.order()
            ));
        }
        if d.group.abelian_invariants() != n.group.abelian_invariants() {
            failures.push(format!("{name}: strategies disagree on invariants"));
        }
    }
    conclude(2, "direct and nu strategies agree", start, failures);
}

#[test]
fn criterion_03_small_multipliers() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in 1..=12usize {
        let name = format!("C{n}");
        let g = catalog::by_name(&name, CAP).unwrap();
        let m = tensor::schur_multiplier(&g, Strategy::Direct, &limits()).unwrap();
        if m.order != 1 {
            failures.push(format!("{name}: multiplier order {} != 1", m.order));
        }
    }
    for p in [2usize, 3] {
        let name = format!("C{p}xC{p}");
        let g = catalog::by_name(&name, CAP).unwrap();
        let m = tensor::schur_multiplier(&g, Strategy::Direct, &limits()).unwrap();
        let want = oracle::exterior_order(&g.abelian_invariants());
        if m.order as u64 != want || m.order != p {
            failures.push(format!("{name}: multiplier order {} != {p}", m.order));
        }
    }
    conclude(3, "multipliers of cyclic and p x p groups", start, failures);
}

#[test]
fn criterion_04_bracket_image_laws() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (name, g) in groups_upto(16) {
        let tower = tensor::tensor_tower(&g, 3, &limits()).unwrap();
        let lcs = g.lower_central_series(3);
        for k in 2..=3usize {
            let image = tower.levels[k - 2].lambda.image_subgroup(&g);
            if image.elements() != lcs.terms[k - 1].elements() {
                failures.push(format!("{name}: lambda_{k} image differs from gamma_{k}"));
            }
        }
        let etower = tensor::exterior_tower(&g, 3, Strategy::Direct, &limits()).unwrap();
        let derived = g.derived_series(3);
        for k in 2..=3usize {
            let image = etower.levels[k - 2].mu.image_subgroup(&g);
            if image.elements() != derived.terms[k - 1].elements() {
                failures.push(format!("{name}: mu_{k} image differs from Gamma_{k}"));
            }
        }
    }
    conclude(4, "bracket images equal series terms", start, failures);
}

#[test]
fn criterion_05_tensor_square_exactness() {
    let start = Instant::now();
    let outcome = sweep(&["thm1"], 12, 1);
    let mut failures = sweep_failures(&outcome);
    if outcome.skipped > 0 {
        failures.push(format!("{} instances skipped", outcome.skipped));
    }
    if outcome.pass == 0 {
        failures.push("sweep ran no instances".into());
    }
    conclude(5, "kernel equals mixed-pairing closure", start, failures);
}

#[test]
fn criterion_06_induced_surjection_sweeps() {
    let start = Instant::now();
    let outcome = sweep(&["lemma1", "lemma2"], 16, 2);
    let mut failures = sweep_failures(&outcome);
    if outcome.pass == 0 {
        failures.push("sweep ran no instances".into());
    }
    // skips are tolerated only as resource limits; with default limits none
    // are expected on this slice
    if outcome.skipped > 0 {
        failures.push(format!("{} instances skipped under default limits", outcome.skipped));
    }
    conclude(6, "induced surjection sweeps", start, failures);
}

#[test]
fn criterion_07_interchange_and_pairing_identity() {
    let start = Instant::now();
    let outcome = sweep(&["dtech", "bjr"], 12, 1);
    let mut failures = sweep_failures(&outcome);
    if outcome.skipped > 0 {
        failures.push(format!("{} instances skipped", outcome.skipped));
    }
    match outcome.bjr_reading.as_deref() {
        Some("left") | Some("both") => {}
        other => failures.push(format!("no universal conjugation reading: {other:?}")),
    }
    conclude(7, "derivative interchange and pairing identity", start, failures);
}

#[test]
fn criterion_08_property_transfers() {
    let start = Instant::now();
    let outcome = sweep(&["prop1", "prop3"], 16, 2);
    let mut failures = sweep_failures(&outcome);
    if outcome.pass == 0 {
        failures.push("sweep ran no instances".into());
    }
    conclude(8, "p-group/perfect/solvable transfers", start, failures);
}

#[test]
fn criterion_09_a5_stretch() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let a5 = catalog::by_name("A5", CAP).unwrap();
    if !a5.predicates().is_perfect {
        failures.push("A5 not detected perfect".into());
    }
    let t = tensor::tensor_square(&a5, Strategy::Nu, &limits()).unwrap();
    let e = tensor::exterior_square(&a5, Strategy::Nu, &limits()).unwrap();
    if t.group.order() != e.group.order() {
        failures.push(format!(
            "tensor square {} differs from exterior square {}",
            t.group.order(),
            e.group.order()
        ));
    }
    let m = tensor::schur_multiplier(&a5, Strategy::Nu, &limits()).unwrap();
    if e.group.order() != a5.order() * m.order {
        failures.push(format!(
            "exterior square {} != {} * multiplier {}",
            e.group.order(),
            a5.order(),
            m.order
        ));
    }
    if m.order != 2 {
        failures.push(format!("multiplier order {} != 2", m.order));
    }
    conclude(9, "A5 squares and multiplier via nu", start, failures);
}

#[test]
fn criterion_10_presentation_round_trip() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for (name, g) in groups_upto(24) {
        let pres = fp::presentation_of(&g);
        let real = fp::realize_group(&pres, &limits()).unwrap();
        if real.group.order() != g.order() {
            failures.push(format!("{name}: order changed in round trip"));
        }
        if real.group.abelian_invariants() != g.abelian_invariants() {
            failures.push(format!("{name}: invariants changed in round trip"));
        }
    }
    conclude(10, "presentation round trip", start, failures);
}
