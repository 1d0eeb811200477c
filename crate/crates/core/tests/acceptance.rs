//! Exit criteria. Each test prints one `PASS`/`FAIL` line (plus indented
//! detail lines) straight to the process stderr so the lines survive output
//! capture, then asserts.

mod common;

use std::collections::BTreeMap;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{admissible_words, block_growth_entropy, w};
use kneadkit::classify::DEFAULT_ENUMERATION_CAP;
use kneadkit::matrix::Matrix;
use kneadkit::spectral::{entropy, spectrum, KneadingConvention};
use kneadkit::{Comparison, Error, IntPoly, SignedGraph, Word};

fn report(id: u32, title: &str, pass: bool, details: &[String]) {
    let mut err = std::io::stderr().lock();
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(err, "\nacceptance {id} [{verdict}] {title}");
    for d in details {
        let _ = writeln!(err, "    {d}");
    }
}

fn check_time(details: &mut Vec<String>, started: Instant, limit: Duration) -> bool {
    let took = started.elapsed();
    details.push(format!("runtime {took:.2?} (limit {limit:?})"));
    took < limit
}

fn words_up_to(g: &SignedGraph, max_len: usize) -> Vec<Word> {
    (1..=max_len)
        .flat_map(|n| g.enumerate_wn(n, DEFAULT_ENUMERATION_CAP).unwrap())
        .collect()
}

#[test]
fn criterion_1_tunability_audits() {
    let mut pass = true;
    let mut details = Vec::new();
    for (name, expected) in [("unimodal", "1"), ("four-vertex", "3"), ("tree", "3210")] {
        let g = SignedGraph::builtin(name).unwrap();
        let started = Instant::now();
        let report = g.check_tunable(8).unwrap();
        let w_min = report.w_min.as_ref().map(ToString::to_string);
        let ok = report.tunable_up_to == Some(8) && w_min.as_deref() == Some(expected);
        details.push(format!(
            "{name}: w_min = {w_min:?} (expected {expected:?}), tunable up to {:?}, {} words, {} violations",
            report.tunable_up_to,
            report.words_checked,
            report.violations.len()
        ));
        let fast = check_time(&mut details, started, Duration::from_secs(30));
        pass &= ok && fast;
    }
    report(
        1,
        "tunability audits report the expected minimal words",
        pass,
        &details,
    );
    assert!(pass);
}

#[test]
fn criterion_2_concatenation_never_fails_certification() {
    let started = Instant::now();
    let mut details = Vec::new();
    let mut failures = Vec::new();
    for name in ["unimodal", "tree"] {
        let g = SignedGraph::builtin(name).unwrap();
        let bases: Vec<Word> = words_up_to(&g, 8)
            .into_iter()
            .filter(|x| g.is_dominant(x) && g.sign(x) == 1)
            .collect();
        let tails: Vec<Word> = admissible_words(&g, 6)
            .into_iter()
            .filter(|x| kneadkit::classify::is_irreducible(x))
            .collect();
        let mut triples = 0;
        for base in &bases {
            for tail in &tails {
                if g.compare_periodic(tail, base).unwrap() != Comparison::Less {
                    continue;
                }
                for n in (1..).take_while(|n| n * tail.len() < base.len()) {
                    triples += 1;
                    match g.concat_admissible(base, tail, n) {
                        Ok(c) if g.is_admissible_word(&c.word) => {}
                        Ok(c) => failures
                            .push(format!("{name} {base}·{tail}^{n} = {} uncertified", c.word)),
                        Err(e) => failures.push(format!("{name} {base}·{tail}^{n}: {e}")),
                    }
                }
            }
        }
        details.push(format!(
            "{name}: {} dominant bases, {} tails, {triples} triples",
            bases.len(),
            tails.len()
        ));
    }
    details.push(format!("{} failures", failures.len()));
    details.extend(failures.iter().take(5).cloned());
    let fast = check_time(&mut details, started, Duration::from_secs(120));
    let pass = failures.is_empty() && fast;
    report(
        2,
        "dominant·admissible^n concatenations certify",
        pass,
        &details,
    );
    assert!(pass);
}

#[test]
fn criterion_3_dominant_extensions_exist() {
    let started = Instant::now();
    let g = SignedGraph::unimodal();
    let mut details = Vec::new();
    let mut failures = Vec::new();
    let mut by_strategy: BTreeMap<String, usize> = BTreeMap::new();
    let mut runs = 0;
    for word in admissible_words(&g, 7) {
        if !kneadkit::classify::is_irreducible(&word)
            || g.detect_renormalization(&word).unwrap().is_some()
            || g.is_min_power(&word)
        {
            continue;
        }
        for n in 1..=2 {
            runs += 1;
            match g.make_dominant(&word, n, 64) {
                Ok(c) => {
                    let prefix = word.pow(n);
                    if !g.is_dominant(&c.word) || c.word.prefix(prefix.len()) != prefix {
                        failures.push(format!("{word}, n = {n}: {} not certified", c.word));
                    }
                    let kind = serde_json::to_value(&c.strategy).unwrap()["kind"]
                        .as_str()
                        .unwrap()
                        .to_string();
                    *by_strategy.entry(kind).or_default() += 1;
                }
                Err(e @ Error::SearchExhausted { .. }) => {
                    failures.push(format!("{word}, n = {n}: {e}"))
                }
                Err(e) => failures.push(format!("{word}, n = {n}: unexpected {e}")),
            }
        }
    }
    details.push(format!("{runs} runs, strategies {by_strategy:?}"));
    details.push(format!("{} failures", failures.len()));
    details.extend(failures.iter().take(5).cloned());
    let fast = check_time(&mut details, started, Duration::from_secs(120));
    let pass = failures.is_empty() && runs > 0 && fast;
    report(
        3,
        "every eligible word extends to a dominant word within 64 letters",
        pass,
        &details,
    );
    assert!(pass);
}

#[test]
fn criterion_4_kneading_roots_match_eigenvalues() {
    let started = Instant::now();
    let g = SignedGraph::unimodal();
    let mut details = Vec::new();

    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut mismatches = Vec::new();
    for word in admissible_words(&g, 6) {
        let r = g.match_off_circle(&word, 1e-8).unwrap();
        if !r.core_irreducible || r.degenerate {
            continue;
        }
        checked += 1;
        worst = worst.max(r.max_distance);
        if !(r.multiset_sizes_agree() && r.max_distance < 1e-8) {
            mismatches.push(format!("{word}: distance {}", r.max_distance));
        }
    }
    let matching = checked > 0 && mismatches.is_empty();
    details.push(format!(
        "matching: {checked} words with irreducible core, worst distance {worst:.3e}, {} mismatches",
        mismatches.len()
    ));
    details.extend(mismatches.iter().take(5).cloned());
    let (mut full_irreducible, mut unfiltered, mut unfiltered_ok) = (0, 0, 0);
    for word in admissible_words(&g, 6) {
        let r = g.match_off_circle(&word, 1e-8).unwrap();
        full_irreducible += usize::from(r.matrix_irreducible);
        if !r.degenerate {
            unfiltered += 1;
            unfiltered_ok += usize::from(r.multiset_sizes_agree() && r.max_distance < 1e-8);
        }
    }
    details.push(format!(
        "full matrix irreducible for {full_irreducible} words; unfiltered matching {unfiltered_ok}/{unfiltered}"
    ));

    let expected_anchor = IntPoly::new(vec![0.into(), (-1).into(), 1.into()]);
    let anchor = g.kneading_poly(&w("10")).unwrap();
    let anchor_ok = anchor == expected_anchor;
    details.push(format!(
        "anchor F(10) = {} (expected {})",
        anchor.pretty("λ"),
        expected_anchor.pretty("λ")
    ));
    let r = g.match_off_circle(&w("10"), 1e-8).unwrap();
    let empty_ok = r.kneading_roots.is_empty() && r.eigenvalues.is_empty();
    details.push(format!("anchor off-circle sets empty: {empty_ok}"));

    // the other branch convention reproduces the anchor; record how it matches
    let printed = g
        .kneading_poly_with(&w("10"), KneadingConvention::AsPrinted)
        .unwrap();
    let mut printed_misses = 0;
    for word in admissible_words(&g, 6) {
        let f = g
            .kneading_poly_with(&word, KneadingConvention::AsPrinted)
            .unwrap();
        let m = g.markov_matrix(&word).unwrap();
        if !m.core().is_irreducible() || num_traits::Zero::is_zero(&f) {
            continue;
        }
        let roots = kneadkit::spectral::int_poly_roots::<f64>(&f.strip_zero_roots()).unwrap();
        let spec = spectrum::<f64>(&m.entries, 1e-8).unwrap();
        let off = |z: &&num_complex::Complex<f64>| z.norm() > 0.0 && (z.norm() - 1.0).abs() > 1e-8;
        let a: Vec<_> = roots.iter().filter(off).collect();
        let b: Vec<_> = spec.eigenvalues.iter().filter(off).collect();
        let close =
            a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| (*x - *y).norm() < 1e-8));
        if !close {
            printed_misses += 1;
        }
    }
    details.push(format!(
        "as-printed branch: F(10) = {}, {printed_misses} matching failures on the same words",
        printed.pretty("λ")
    ));

    let fast = check_time(&mut details, started, Duration::from_secs(60));
    let pass = matching && anchor_ok && empty_ok && fast;
    report(
        4,
        "off-circle kneading roots match off-circle eigenvalues",
        pass,
        &details,
    );
    assert!(pass);
}

#[test]
fn criterion_5_entropy_is_monotone() {
    let started = Instant::now();
    let g = SignedGraph::unimodal();
    let words = admissible_words(&g, 8);
    let h: Vec<f64> = words
        .iter()
        .map(|x| entropy(&g.markov_matrix(x).unwrap().entries).unwrap())
        .collect();
    let mut pairs = 0;
    let mut violations = Vec::new();
    for (i, u) in words.iter().enumerate() {
        for (j, v) in words.iter().enumerate() {
            if g.compare_periodic(u, v).unwrap().is_le() {
                pairs += 1;
                if h[i] > h[j] + 1e-9 {
                    violations.push(format!("{u} ≤ {v} but {} > {}", h[i], h[j]));
                }
            }
        }
    }
    let mut details = vec![format!(
        "{} words, {pairs} ordered pairs, {} violations",
        words.len(),
        violations.len()
    )];
    details.extend(violations.iter().take(5).cloned());
    let fast = check_time(&mut details, started, Duration::from_secs(120));
    let pass = violations.is_empty() && fast;
    report(
        5,
        "entropy is monotone in the kneading word",
        pass,
        &details,
    );
    assert!(pass);
}

#[test]
fn criterion_6_block_growth_oracle() {
    let started = Instant::now();
    let g = SignedGraph::unimodal();
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    let words = admissible_words(&g, 6);
    for word in &words {
        let ours = entropy(&g.markov_matrix(word).unwrap().entries).unwrap();
        let oracle = block_growth_entropy(&g, word, 14);
        let d = (ours - oracle).abs();
        worst = worst.max(d);
        if d >= 1e-6 {
            bad.push(format!("{word}: matrix {ours} vs blocks {oracle}"));
        }
    }
    let ten = entropy(&g.markov_matrix(&w("10")).unwrap().entries).unwrap();
    let full = entropy(&Matrix::from_rows(g.adjacency_matrix())).unwrap();
    let anchors = ten == 0.0 && (full - 2f64.ln()).abs() < 1e-12;
    let mut details = vec![
        format!("{} words, worst gap {worst:.3e}", words.len()),
        format!(
            "entropy(10) = {ten}, full shift {full} vs log 2 = {}",
            2f64.ln()
        ),
    ];
    details.extend(bad.iter().take(5).cloned());
    let fast = check_time(&mut details, started, Duration::from_secs(60));
    let pass = bad.is_empty() && anchors && fast;
    report(
        6,
        "matrix entropy agrees with block counting",
        pass,
        &details,
    );
    assert!(pass);
}

#[test]
fn criterion_7_persistence() {
    let started = Instant::now();
    let g = SignedGraph::unimodal();
    let words = admissible_words(&g, 7);
    let info: Vec<(Word, f64, bool, bool)> = words
        .iter()
        .map(|x| {
            let m = g.markov_matrix(x).unwrap();
            let h = entropy(&m.entries).unwrap();
            let small = spectrum::<f64>(&m.entries, 1e-8)
                .unwrap()
                .eigenvalues
                .iter()
                .any(|z| z.norm() > 0.0 && z.norm() < 0.95);
            let base = g.detect_renormalization(x).unwrap().is_none() && m.core().is_irreducible();
            (x.clone(), h, base, small)
        })
        .collect();

    let mut details = Vec::new();
    let mut successes = 0;
    let mut attempted = 0;
    // pairs: every eligible (w, v) with v^∞ < w^∞ and a strict entropy gap
    let mut heights_by_v: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (wv, hw, base, _) in info.iter().filter(|t| t.2) {
        let _ = base;
        for (vv, hv, _, small) in &info {
            if !small || hv >= hw || g.compare_periodic(vv, wv).unwrap() != Comparison::Less {
                continue;
            }
            attempted += 1;
            let r = g.run_persistence(wv, vv, 0.05, 12, 64).unwrap();
            if r.success {
                successes += 1;
                heights_by_v.entry(vv.to_string()).or_default().push(*hw);
            } else {
                details.push(format!(
                    "{wv} over {vv}: best {:.3e} after {} steps",
                    r.achieved_epsilon,
                    r.steps.len()
                ));
            }
        }
    }
    details.push(format!("{successes} of {attempted} eligible pairs succeed"));

    // vertical segment: one inside eigenvalue reached at several heights
    let mut best: Option<(String, usize)> = None;
    for (v, hs) in &heights_by_v {
        let mut distinct: Vec<f64> = Vec::new();
        for &h in hs {
            if distinct.iter().all(|&d| (d - h).abs() > 1e-9) {
                distinct.push(h);
            }
        }
        if best.as_ref().is_none_or(|(_, k)| distinct.len() > *k) {
            best = Some((v.clone(), distinct.len()));
        }
    }
    let segment = match &best {
        Some((v, k)) => {
            let m = g.markov_matrix(&w(v)).unwrap();
            let z = spectrum::<f64>(&m.entries, 1e-8)
                .unwrap()
                .inside
                .into_iter()
                .find(|z| z.norm() > 0.0)
                .unwrap();
            details.push(format!(
                "v = {v}: eigenvalue {z:.6} reached at {k} distinct entropies"
            ));
            *k >= 3
        }
        None => false,
    };
    let fast = check_time(&mut details, started, Duration::from_secs(300));
    let pass = successes >= 3 && successes == attempted && segment && fast;
    report(
        7,
        "inside eigenvalues persist at higher entropy",
        pass,
        &details,
    );
    assert!(pass);
}

fn cli(args: &[&str], extra_env: Option<(&str, &str)>) -> (i32, Vec<u8>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kneadkit"));
    cmd.args(args);
    if let Some((k, v)) = extra_env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

#[test]
fn criterion_8_cli_is_deterministic() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["classify", "unimodal", "1001"],
        vec!["order", "unimodal", "101", "1001"],
        vec!["wn", "four-vertex", "4"],
        vec!["tunable", "unimodal", "--max-len", "8"],
        vec!["tunable", "four-vertex", "--max-len", "8"],
        vec!["tunable", "tree", "--max-len", "8"],
        vec!["tune", "unimodal", "1001", "10"],
        vec!["renorm", "unimodal", "10001001"],
        vec!["dominant", "unimodal", "1011010", "--n", "2", "--cap", "64"],
        vec!["concat", "unimodal", "1001", "101", "--n", "1"],
        vec!["bridge", "unimodal", "1001", "101", "--n", "2"],
        vec!["markov", "unimodal", "1001"],
        vec!["spectrum", "unimodal", "10010", "--tol", "1e-8"],
        vec!["zeta", "tree", "310"],
        vec!["kneadpoly", "unimodal", "101"],
        vec!["match", "four-vertex", "302"],
        vec!["teapot", "unimodal", "--max-len", "6"],
        vec![
            "persist", "unimodal", "1001", "101", "--eps", "0.05", "--n-max", "12",
        ],
    ];
    let mut details = Vec::new();
    let mut pass = true;
    for args in &commands {
        let first = cli(args, None);
        let second = cli(args, None);
        let same = first == second && first.0 == 0 && !first.1.is_empty();
        if !same {
            details.push(format!(
                "{}: exit {} / {}, differs",
                args.join(" "),
                first.0,
                second.0
            ));
        }
        pass &= same;
    }
    let paths: Vec<_> = (0..3)
        .map(|k| dir.path().join(format!("cloud{k}.csv")))
        .collect();
    let threads = [
        None,
        Some(("KNEADKIT_THREADS", "1")),
        Some(("KNEADKIT_THREADS", "3")),
    ];
    for (path, env) in paths.iter().zip(threads) {
        let p = path.to_str().unwrap();
        let (code, _) = cli(&["teapot", "unimodal", "--max-len", "10", "--out", p], env);
        pass &= code == 0;
    }
    let bytes: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
    let csv_same = bytes.windows(2).all(|b| b[0] == b[1]) && !bytes[0].is_empty();
    details.push(format!(
        "{} commands run twice; teapot CSV ({} bytes) identical across thread caps: {csv_same}",
        commands.len(),
        bytes[0].len()
    ));
    pass &= csv_same;
    let fast = check_time(&mut details, started, Duration::from_secs(300));
    pass &= fast;
    report(8, "repeated CLI runs are byte-identical", pass, &details);
    assert!(pass);
}
