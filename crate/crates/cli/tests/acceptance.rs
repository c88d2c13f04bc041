//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs every criterion even when an earlier one fails, then exits non-zero
//! if any failed. Oracles are written here independently of the library:
//! brute-force Tai mappings for tree distance, bounded lasso enumeration
//! for satisfiability, and direct counting for the similarity statistics.

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use logion_cli::run;
use logion_core::analysis::{most_general_set, similarity_report, BcCorpus, CorpusEntry};
use logion_core::cases;
use logion_core::files::ResultFile;
use logion_core::ltl::{eval_on_lasso, Formula};
use logion_core::neighborhood::{all_edits, apply_edit, neighbors, reach_script};
use logion_core::objective::recheck_bc;
use logion_core::random::FormulaGen;
use logion_core::sat::{bounded_sat, check_sat, implies, Verdict};
use logion_core::treedist::{formula_distance, normalized_distance, to_parse_tree, LabeledTree};
use logion_core::{parse, run_search, SatLimits, SatSolver, SearchConfig, Specification};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn minepump() -> Specification {
    cases::find("MP").unwrap().spec_file().unwrap().to_specification().unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(started: Instant, limit: Duration) -> Result<(), String> {
    let t = started.elapsed();
    ensure(t < limit, format!("took {:.1}s, limit {:.0}s", t.as_secs_f64(), limit.as_secs_f64()))
}

/// Runs the CLI in-process and returns (exit code, stdout).
fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["logion"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn c1_minepump_goldens() -> Outcome {
    let started = Instant::now();
    let trivial = "!(G(h -> X p) & G(m -> X !p))";
    let mut failures = Vec::new();
    for (phi, want) in [("G(h & m)", true), ("F(h & m)", true), (trivial, false), ("false", false)] {
        let (code, out) = cli(&["check", "MP", phi]);
        let accepted = code == 0 && out.contains("BC: yes");
        if accepted != want {
            let detail: Vec<&str> = out.lines().filter(|l| l.contains(": no")).collect();
            failures.push(format!("{phi}: expected BC={want}, got BC={accepted} [{}]", detail.join("; ")));
        }
    }
    within(started, Duration::from_secs(5))?;
    ensure(failures.is_empty(), failures.join(" | "))?;
    Ok("G(h & m) and F(h & m) accepted; trivial condition and false rejected".into())
}

fn c2_distance_goldens() -> Outcome {
    let (a, b, c) = (f("G(h -> X p)"), f("G(h & m)"), f("F(h & m)"));
    ensure(formula_distance(&a, &b) == 3, format!("δ(a,b) = {}", formula_distance(&a, &b)))?;
    ensure(formula_distance(&b, &c) == 1, format!("δ(b,c) = {}", formula_distance(&b, &c)))?;
    let ab = normalized_distance(&a, &b).as_f64();
    ensure((ab - 0.333).abs() <= 0.0005, format!("Δ(a,b) = {ab}"))?;
    let bc = normalized_distance(&b, &c);
    ensure(bc.num * 8 == bc.den, format!("Δ(b,c) = {}/{}", bc.num, bc.den))?;
    let (_, out) = cli(&["distance", "G(h -> X p)", "G(h & m)"]);
    ensure(out.trim() == "δ=3 Δ=0.333", format!("distance command printed `{}`", out.trim()))?;
    let (_, out) = cli(&["distance", "G(h & m)", "F(h & m)"]);
    ensure(out.trim() == "δ=1 Δ=0.125", format!("distance command printed `{}`", out.trim()))?;
    Ok("δ = 3, 1; Δ = 0.333, 0.125".into())
}

fn c3_neighbor_distance() -> Outcome {
    let started = Instant::now();
    let gen = FormulaGen::new(4, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0usize;
    for _ in 0..1000 {
        let phi = gen.sample(&mut rng);
        let vocab = ["p", "q", "r", "s"].iter().map(|s| s.to_string()).collect();
        for n in neighbors(&phi, &vocab) {
            let d = formula_distance(&phi, &n);
            ensure(d == 1 || d == 2, format!("δ({phi}, {n}) = {d}"))?;
            checked += 1;
        }
    }
    within(started, Duration::from_secs(60))?;
    Ok(format!("1000 formulae, {checked} neighbors, all at distance 1 or 2"))
}

fn c4_reachability() -> Outcome {
    let started = Instant::now();
    let from_gen = FormulaGen::new(3, 8);
    let to_gen = FormulaGen { implications: false, ..FormulaGen::new(3, 8) };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut steps = 0usize;
    for _ in 0..200 {
        let (a, b) = (from_gen.sample(&mut rng), to_gen.sample(&mut rng));
        let vocab = a.variables().union(&b.variables()).cloned().collect();
        let mut cur = a.clone();
        for op in reach_script(&a, &b) {
            ensure(all_edits(&cur, &vocab).contains(&op), format!("{op:?} is not an edit of {cur}"))?;
            cur = apply_edit(&cur, &op).map_err(|e| e.to_string())?;
            steps += 1;
        }
        ensure(cur == b, format!("script from {a} ended at {cur}, wanted {b}"))?;
    }
    within(started, Duration::from_secs(30))?;
    Ok(format!("200 pairs reached in {steps} single edits"))
}

fn c5_sat_differential() -> Outcome {
    let started = Instant::now();
    let gen = FormulaGen::new(3, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut sat, mut unsat) = (0, 0);
    for _ in 0..5000 {
        let phi = gen.sample(&mut rng);
        let vocab = phi.variables();
        let r = check_sat(&phi, &vocab).map_err(|e| format!("{phi}: {e}"))?;
        match r.verdict {
            Verdict::Sat => {
                let w = r.witness.ok_or(format!("{phi}: no witness"))?;
                ensure(eval_on_lasso(&phi, &w, 0), format!("witness {w} fails {phi}"))?;
                sat += 1;
            }
            Verdict::Unsat => {
                ensure(bounded_sat(&phi, &vocab, 4, 4).is_none(), format!("{phi} judged UNSAT but has a model"))?;
                unsat += 1;
            }
        }
    }
    within(started, Duration::from_secs(600))?;
    Ok(format!("5000 formulae ({sat} SAT with valid witnesses, {unsat} UNSAT with no bounded model)"))
}

/// A tree flattened in postorder.
struct Flat {
    labels: Vec<String>,
    /// `anc[i][j]`: node i is a proper ancestor of node j.
    anc: Vec<Vec<bool>>,
}

fn flatten(t: &LabeledTree) -> Flat {
    fn walk(t: &LabeledTree, labels: &mut Vec<String>, spans: &mut Vec<(usize, usize)>) -> usize {
        let first = labels.len();
        for c in &t.children {
            walk(c, labels, spans);
        }
        labels.push(t.label.clone());
        spans.push((first, labels.len() - 1));
        first
    }
    let (mut labels, mut spans) = (Vec::new(), Vec::new());
    walk(t, &mut labels, &mut spans);
    let n = labels.len();
    let anc = (0..n).map(|i| (0..n).map(|j| j >= spans[i].0 && j < i).collect()).collect();
    Flat { labels, anc }
}

/// Minimum unit-cost edit distance over every valid Tai mapping.
fn brute_distance(a: &LabeledTree, b: &LabeledTree) -> usize {
    fn go(i: usize, a: &Flat, b: &Flat, used: &mut Vec<bool>, m: &mut Vec<(usize, usize)>, best: &mut usize) {
        if i == a.labels.len() {
            let relabel = m.iter().filter(|&&(x, y)| a.labels[x] != b.labels[y]).count();
            let cost = relabel + (a.labels.len() - m.len()) + (b.labels.len() - m.len());
            *best = (*best).min(cost);
            return;
        }
        go(i + 1, a, b, used, m, best);
        for j in 0..b.labels.len() {
            // In postorder, "left of" means smaller index and not an ancestor.
            let consistent = !used[j]
                && m.iter().all(|&(x, y)| {
                    a.anc[x][i] == b.anc[y][j]
                        && a.anc[i][x] == b.anc[j][y]
                        && ((x < i && !a.anc[i][x]) == (y < j && !b.anc[j][y]))
                });
            if consistent {
                used[j] = true;
                m.push((i, j));
                go(i + 1, a, b, used, m, best);
                m.pop();
                used[j] = false;
            }
        }
    }
    let (fa, fb) = (flatten(a), flatten(b));
    let mut best = usize::MAX;
    go(0, &fa, &fb, &mut vec![false; fb.labels.len()], &mut Vec::new(), &mut best);
    best
}

fn small_pool() -> Vec<Formula> {
    let mut pool: Vec<Formula> =
        ["G(h -> X p)", "G(h & m)", "F(h & m)", "p U (q R p)", "!X !p", "(p & q) | !q"].iter().map(|s| f(s)).collect();
    let gen = FormulaGen::new(2, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut keys: BTreeSet<String> = pool.iter().map(Formula::canonical_key).collect();
    while pool.len() < 60 {
        let g = gen.sample(&mut rng);
        if keys.insert(g.canonical_key()) {
            pool.push(g);
        }
    }
    pool
}

fn c6_tree_edit_oracle() -> Outcome {
    let started = Instant::now();
    let pool = small_pool();
    ensure(pool.iter().all(|p| p.size() <= 6), "pool holds a tree over six nodes")?;
    let trees: Vec<LabeledTree> = pool.iter().map(to_parse_tree).collect();
    let mut pairs = 0;
    for (i, a) in trees.iter().enumerate() {
        for (j, b) in trees.iter().enumerate() {
            let (zs, bf) = (formula_distance(&pool[i], &pool[j]), brute_distance(a, b));
            ensure(zs == bf, format!("δ({}, {}): Zhang-Shasha {zs}, brute force {bf}", pool[i], pool[j]))?;
            pairs += 1;
        }
    }
    within(started, Duration::from_secs(60))?;
    Ok(format!("{pairs} ordered pairs from a pool of {} formulae agree", pool.len()))
}

fn c7_generality() -> Outcome {
    let (always, eventually) = (f("G(h & m)"), f("F(h & m)"));
    let corpus = BcCorpus {
        entries: vec![CorpusEntry::new(always.clone(), "golden"), CorpusEntry::new(eventually.clone(), "golden")],
        flagged: false,
    };
    let pi = most_general_set(&corpus, &SatSolver::default());
    ensure(
        pi.members == vec![eventually.clone()],
        format!("Π = {:?}", pi.members.iter().map(|m| m.to_string()).collect::<Vec<_>>()),
    )?;
    ensure(implies(&always, &eventually) == Ok(true), "G(h & m) should imply F(h & m)")?;
    ensure(implies(&eventually, &always) == Ok(false), "F(h & m) should not imply G(h & m)")?;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("golden.json");
    let mut result = ResultFile::from_json(&golden_result_json(), "golden").unwrap();
    result.bcs.retain(|b| b.formula == always || b.formula == eventually);
    result.summary.num_bc = result.bcs.len();
    std::fs::write(&path, result.to_json()).unwrap();
    let (code, out) = cli(&["analyze", "--pi", "--no-verify", path.to_str().unwrap()]);
    ensure(code == 0, format!("analyze exited {code}"))?;
    let report: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(report["pi"]["members"] == serde_json::json!(["F (h & m)"]), format!("analyze --pi gave {}", report["pi"]))?;
    Ok("Π{G(h & m), F(h & m)} = {F(h & m)}; implication holds one way only".into())
}

/// A result file listing the two textbook conditions for MinePump.
fn golden_result_json() -> String {
    let spec = cases::find("MP").unwrap().json().unwrap();
    let bc = |phi: &str| {
        serde_json::json!({"formula": phi, "li": true, "min": [true, true], "nt": true, "size": 4,
            "score": 2.75, "run": 0, "iteration": 1, "discovery_ms": 0.0})
    };
    serde_json::json!({
        "spec_name": "MinePump",
        "spec": serde_json::from_str::<serde_json::Value>(spec).unwrap(),
        "config": {"k": 50, "tabu": 4, "seed": 0, "cutoff_ms": 0, "runs": 1},
        "bcs": [bc("G (h & m)"), bc("F (h & m)")],
        "summary": {"num_bc": 2, "t_fbc_ms": 0.0, "s_bbc": 4, "success": true, "successful_runs": 1, "mean_bc_per_run": 2.0}
    })
    .to_string()
}

fn c8_end_to_end() -> Outcome {
    let spec = minepump();
    let cutoff = Duration::from_secs(60);
    // Ten concurrent runs, so each gets the full minute of wall-clock time.
    let traces: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = (0..10u64)
            .map(|seed| {
                let spec = &spec;
                s.spawn(move || run_search(spec, &SearchConfig { seed, cutoff, ..SearchConfig::default() }).1)
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let limits = SatLimits::default();
    let mut lines = Vec::new();
    let (mut total, mut successes) = (0usize, 0usize);
    for (seed, t) in traces.iter().enumerate() {
        let first = t.time_to_first_bc_ms();
        if first.is_some_and(|ms| ms < 60_000.0) {
            successes += 1;
        }
        let bad: Vec<String> = t
            .discoveries
            .iter()
            .filter(|d| !recheck_bc(d.formula(), &spec, &limits))
            .map(|d| d.formula().to_string())
            .collect();
        ensure(bad.is_empty(), format!("seed {seed}: {} BCs fail the re-check, e.g. {}", bad.len(), bad.join(", ")))?;
        total += t.discoveries.len();
        lines.push(format!(
            "seed {seed}: {} BCs, first after {}, smallest {}",
            t.discoveries.len(),
            first.map_or("-".into(), |v| format!("{:.2}s", v / 1000.0)),
            t.smallest_bc().map_or("-".into(), |v| v.to_string())
        ));
    }
    let mean_first: Vec<f64> = traces.iter().filter_map(|t| t.time_to_first_bc_ms()).collect();
    let mean_first = mean_first.iter().sum::<f64>() / mean_first.len().max(1) as f64 / 1000.0;
    let smallest = traces.iter().filter_map(|t| t.smallest_bc()).min();
    for l in &lines {
        context(l);
    }
    context(&format!(
        "this machine: {:.1} BCs/run, T_FBC {mean_first:.2}s, S_BBC {}, success {successes}/10",
        total as f64 / 10.0,
        smallest.map_or("-".into(), |v| v.to_string())
    ));
    context("published (context only): 27112.2 BCs/hour, T_FBC 0.3s, S_BBC 3.0, success 10/10");
    ensure(successes == 10, format!("{successes}/10 runs found a BC within 60s"))?;
    Ok(format!("10/10 runs found BCs ({total} in total), every one re-verified"))
}

struct SimOracle {
    pct_delta: [f64; 3],
    num_delta: [f64; 3],
    pct_norm: [f64; 3],
    num_norm: [f64; 3],
    avg_min: f64,
}

fn brute_similarity(fs: &[Formula]) -> SimOracle {
    let n = fs.len();
    let trees: Vec<LabeledTree> = fs.iter().map(to_parse_tree).collect();
    let d: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| brute_distance(&trees[i], &trees[j])).collect()).collect();
    let mut o =
        SimOracle { pct_delta: [0.0; 3], num_delta: [0.0; 3], pct_norm: [0.0; 3], num_norm: [0.0; 3], avg_min: 0.0 };
    for (t, l) in [1usize, 2, 3].into_iter().enumerate() {
        let sim = |i: usize| (0..n).filter(|&j| j != i && d[i][j] <= l).count();
        o.pct_delta[t] = 100.0 * (0..n).filter(|&i| sim(i) > 0).count() as f64 / n as f64;
        o.num_delta[t] = (0..n).map(sim).sum::<usize>() as f64 / n as f64;
        let k = [0.1, 0.2, 0.3][t];
        let simn = |i: usize| {
            (0..n).filter(|&j| j != i && d[i][j] as f64 / (fs[i].size() + fs[j].size()) as f64 <= k + 1e-12).count()
        };
        o.pct_norm[t] = 100.0 * (0..n).filter(|&i| simn(i) > 0).count() as f64 / n as f64;
        o.num_norm[t] = (0..n).map(simn).sum::<usize>() as f64 / n as f64;
    }
    o.avg_min =
        (0..n).map(|i| (0..n).filter(|&j| j != i).map(|j| d[i][j]).min().unwrap()).sum::<usize>() as f64 / n as f64;
    o
}

fn c9_similarity_oracle() -> Outcome {
    let corpus: Vec<Formula> = [
        "G(h & m)",
        "F(h & m)",
        "F(h & X m)",
        "G(h | m)",
        "F(m & h)",
        "X(h & m)",
        "F h",
        "F(h & !m)",
        "G(h -> X p)",
        "h U (h & m)",
    ]
    .iter()
    .map(|s| f(s))
    .collect();
    let got = similarity_report(&corpus);
    let want = brute_similarity(&corpus);
    let keys = ["1", "2", "3"];
    let nkeys = ["0.1", "0.2", "0.3"];
    for t in 0..3 {
        ensure(got.pct_bc_delta[keys[t]] == want.pct_delta[t], format!("%BC(δ≤{})", keys[t]))?;
        ensure(got.num_sim_delta[keys[t]] == want.num_delta[t], format!("#sim(δ≤{})", keys[t]))?;
        ensure(got.pct_bc_norm[nkeys[t]] == want.pct_norm[t], format!("%BC(Δ≤{})", nkeys[t]))?;
        ensure(got.num_sim_norm[nkeys[t]] == want.num_norm[t], format!("#sim(Δ≤{})", nkeys[t]))?;
    }
    ensure(got.avg_min == Some(want.avg_min), format!("avg_min {:?} vs {}", got.avg_min, want.avg_min))?;

    let gen = FormulaGen::new(3, 15);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for c in 0..50 {
        let n = rng.gen_range(2..=40);
        let fs: Vec<Formula> = (0..n).map(|_| gen.sample(&mut rng)).collect();
        let r = similarity_report(&fs);
        for m in [&r.pct_bc_delta, &r.num_sim_delta, &r.pct_bc_norm, &r.num_sim_norm] {
            let v: Vec<f64> = m.values().copied().collect();
            ensure(v.windows(2).all(|w| w[0] <= w[1]), format!("corpus {c}: not monotone: {v:?}"))?;
        }
    }
    Ok("10-formula corpus matches brute force; monotone on 50 random corpora".into())
}

fn c10_determinism() -> Outcome {
    let spec = minepump();
    let config = SearchConfig {
        seed: 77,
        cutoff: Duration::from_secs(3600),
        max_iterations: Some(80),
        ..SearchConfig::default()
    };
    let mut dumps = Vec::new();
    for _ in 0..2 {
        let (bcs, trace) = run_search(&spec, &config);
        let mut jsonl = Vec::new();
        trace.write_jsonl(&mut jsonl, true).unwrap();
        let keys: Vec<String> = bcs.iter().map(Formula::canonical_key).collect();
        dumps.push((keys, jsonl));
    }
    ensure(dumps[0] == dumps[1], "library runs differ")?;

    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for i in 0..2 {
        let (out, trace) = (dir.path().join(format!("r{i}.json")), dir.path().join(format!("t{i}.jsonl")));
        let (code, _) = cli(&[
            "search",
            "MP",
            "--seed",
            "77",
            "--time",
            "3600",
            "--max-iterations",
            "60",
            "--normalize-times",
            "--out",
            out.to_str().unwrap(),
            "--trace",
            trace.to_str().unwrap(),
        ]);
        ensure(code == 0, format!("search exited {code}"))?;
        let r = ResultFile::load(&out).map_err(|e| e.to_string())?;
        files.push((r.normalized_bcs_json(), std::fs::read(&trace).unwrap()));
    }
    ensure(files[0] == files[1], "command-line runs differ")?;
    Ok(format!("{} BCs and {} trace bytes identical across runs", dumps[0].0.len(), dumps[0].1.len()))
}

fn context(line: &str) {
    let _ = writeln!(std::io::stdout(), "    {line}");
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("MinePump golden BCs", c1_minepump_goldens),
        ("distance goldens", c2_distance_goldens),
        ("neighbors lie at distance 1 or 2", c3_neighbor_distance),
        ("edit scripts reach any target", c4_reachability),
        ("satisfiability differential", c5_sat_differential),
        ("tree edit distance against brute force", c6_tree_edit_oracle),
        ("generality", c7_generality),
        ("end-to-end search on MinePump", c8_end_to_end),
        ("similarity report against brute force", c9_similarity_oracle),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = started.elapsed().as_secs_f64();
        let line = match &outcome {
            Ok(m) => format!("criterion {:>2} PASS  {name} ({secs:.1}s): {m}", i + 1),
            Err(m) => {
                failed += 1;
                format!("criterion {:>2} FAIL  {name} ({secs:.1}s): {m}", i + 1)
            }
        };
        let _ = writeln!(std::io::stdout(), "{line}");
    }
    let _ = writeln!(std::io::stdout(), "{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
