//! One line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};

use common::{apart, fisher_oracle, fs as structures, join, same};
use lexlab::acquisition::{build_frequency_table, threshold_classify, AcquiredClass, PerMil};
use lexlab::avm::{parse_structure, subsumes, unify, UnifyFailure};
use lexlab::evaluation::{fisher_exact_two_tailed, lexical_statistics, ContingencyTable2x2, LexStats};
use lexlab::mother::{GoldClass, PhraseKind};
use lexlab::runner::{run_experiment, ExperimentConfig, ExperimentOutcome};
use proptest::test_runner::{Config, TestCaseError, TestRunner};

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run(kind: PhraseKind, seed: u64, n: u64, dir: &Path) -> ExperimentOutcome {
    let mut cfg = ExperimentConfig::new(seed);
    cfg.acquisition.phrase_kind = kind;
    cfg.exemplar_count = n;
    cfg.output_dir = dir.to_path_buf();
    run_experiment(&cfg).unwrap_or_else(|e| panic!("{kind:?} seed {seed}: {e}"))
}

struct Seeded {
    label: String,
    out: ExperimentOutcome,
}

fn c1() -> Verdict {
    let t = PerMil::whole(2).unwrap();
    let lo = threshold_classify(114, 57_118, t);
    let hi = threshold_classify(115, 57_118, t);
    check(
        lo == AcquiredClass::Content && hi == AcquiredClass::Functional,
        format!("f=114 -> {lo:?}, f=115 -> {hi:?}, cutoff {}", t.cutoff(57_118)),
    )
}

fn c2(tmp: &Path) -> Verdict {
    let small = run(PhraseKind::Sentence, 1, 1_000, &tmp.join("c2-1000"));
    let large = run(PhraseKind::Sentence, 1, 10_000, &tmp.join("c2-10000"));
    let fired = |o: &ExperimentOutcome| o.report.as_ref().is_some_and(|r| r.fired);
    check(!fired(&small) && fired(&large), format!("n=1000 fired={}, n=10000 fired={}", fired(&small), fired(&large)))
}

fn table(s: &Seeded) -> (u64, u64, u64, u64, f64) {
    let f = s.out.bundle.fisher.as_ref().unwrap_or_else(|| panic!("{}: no Fisher report", s.label));
    (f.a, f.b, f.c, f.d, f.p)
}

fn c3(runs: &[Seeded]) -> Verdict {
    let worst = runs.iter().map(|s| table(s).4).fold(0.0, f64::max);
    let detail = runs.iter().map(|s| format!("{} p={:.2e}", s.label, table(s).4)).collect::<Vec<_>>().join(", ");
    check(runs.len() >= 6 && worst < 1e-3, detail)
}

fn c4(runs: &[Seeded]) -> Verdict {
    let detail = runs
        .iter()
        .map(|s| {
            let (_, b, c, _, _) = table(s);
            format!("{} F->C={b} C->F={c}", s.label)
        })
        .collect::<Vec<_>>()
        .join(", ");
    check(runs.iter().all(|s| table(s).1 >= table(s).2), detail)
}

fn c5(runs: &[Seeded]) -> Verdict {
    let counts: Vec<(String, usize, usize)> = runs
        .iter()
        .map(|s| {
            let top = &s.out.bundle.topk;
            let function = top.iter().take(35).filter(|r| r.gold_class == Some(GoldClass::Function)).count();
            (s.label.clone(), function, top.len().min(35))
        })
        .collect();
    let detail = counts.iter().map(|(l, f, n)| format!("{l} {f}/{n}")).collect::<Vec<_>>().join(", ");
    check(counts.iter().all(|&(_, f, n)| n == 35 && f >= 28), detail)
}

fn c6() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for n in 1..=24u64 {
        for a in 0..=n {
            for b in 0..=n - a {
                for c in 0..=n - a - b {
                    let d = n - a - b - c;
                    let got = fisher_exact_two_tailed(&ContingencyTable2x2::new(a, b, c, d)).unwrap().p;
                    worst = worst.max((got - fisher_oracle(a, b, c, d)).abs());
                    checked += 1;
                }
            }
        }
    }
    let p = |a, b, c, d| fisher_exact_two_tailed(&ContingencyTable2x2::new(a, b, c, d)).unwrap().p;
    let worked = [(p(1, 1, 1, 1), 1.0), (p(10, 0, 0, 10), 2.0 / 184_756.0), (p(3, 1, 1, 3), 34.0 / 70.0)];
    let worked_ok = worked.iter().all(|&(got, want)| (got - want).abs() <= 1e-12);
    check(
        worst <= 1e-12 && worked_ok,
        format!("{checked} tables, max |diff| {worst:.1e}, worked values ok={worked_ok}"),
    )
}

fn c7() -> Verdict {
    let mut runner = TestRunner::new(Config { cases: 10_000, failure_persistence: None, ..Config::default() });
    let mut failures = Vec::new();
    let mut prop = |name: &str, result: Result<(), String>| {
        if let Err(e) = result {
            failures.push(format!("{name}: {e}"));
        }
    };
    let fail = |m: String| TestCaseError::fail(m);

    prop(
        "idempotence",
        runner
            .run(&structures(), |a| {
                let u = join(&a, &a).ok_or_else(|| fail(format!("{a} does not unify with itself")))?;
                if same(&u, &a) {
                    Ok(())
                } else {
                    Err(fail(format!("{u} vs {a}")))
                }
            })
            .map_err(|e| e.to_string()),
    );
    prop(
        "commutativity",
        runner
            .run(&(structures(), structures()), |(a, b)| match (unify(&a, &b), unify(&b, &a)) {
                (Ok(x), Ok(y)) if same(&x.structure, &y.structure) => Ok(()),
                (Err(_), Err(_)) => Ok(()),
                _ => Err(fail(format!("{a} / {b}"))),
            })
            .map_err(|e| e.to_string()),
    );
    prop(
        "associativity",
        runner
            .run(&(structures(), structures(), structures()), |(a, b, c)| {
                let (a, b, c) = (apart(&a, "1"), apart(&b, "2"), apart(&c, "3"));
                let left = join(&a, &b).and_then(|ab| join(&ab, &c));
                let right = join(&b, &c).and_then(|bc| join(&a, &bc));
                match (left, right) {
                    (Some(l), Some(r)) if same(&l, &r) => Ok(()),
                    (None, None) => Ok(()),
                    _ => Err(fail(format!("{a} / {b} / {c}"))),
                }
            })
            .map_err(|e| e.to_string()),
    );
    prop(
        "monotonicity",
        runner
            .run(&(structures(), structures()), |(a, b)| {
                let b = apart(&b, "2");
                match join(&a, &b) {
                    Some(u) if !(subsumes(&a, &u) && subsumes(&b, &u)) => Err(fail(format!("{a} / {b}"))),
                    _ => Ok(()),
                }
            })
            .map_err(|e| e.to_string()),
    );
    let clash = unify(&parse_structure("[CAT:det]").unwrap(), &parse_structure("[CAT:n]").unwrap());
    let clash_ok = matches!(&clash, Err(UnifyFailure::Conflict { path }) if path == "CAT");
    if !clash_ok {
        failures.push(format!("[CAT:det] vs [CAT:n] gave {:?}", clash.err()));
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "4 properties x 10000 cases, [CAT:det]/[CAT:n] fails at CAT".into()
        } else {
            failures.join("; ")
        },
    )
}

fn run_cli_twice(tmp: &Path, tag: &str, body: &str) -> Result<[std::path::PathBuf; 2], String> {
    let dirs = [tmp.join(format!("c8-{tag}-a")), tmp.join(format!("c8-{tag}-b"))];
    for dir in &dirs {
        let cfg = dir.with_extension("cfg");
        fs::write(&cfg, format!("{body}output_dir = {}\n", dir.display())).unwrap();
        let o = Command::new(env!("CARGO_BIN_EXE_lexlab")).args(["run", "--config"]).arg(&cfg).output().unwrap();
        if !o.status.success() {
            return Err(format!("run failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
    }
    Ok(dirs)
}

fn differing<'a>(dirs: &[std::path::PathBuf; 2], files: &[&'a str]) -> Vec<&'a str> {
    files.iter().copied().filter(|f| fs::read(dirs[0].join(f)).ok() != fs::read(dirs[1].join(f)).ok()).collect()
}

fn c8(tmp: &Path) -> Verdict {
    let bundle = ["corpus.txt", "frequency.csv", "lexstats.csv", "topk.csv", "boxplot.csv", "fisher.json"];
    let default = run_cli_twice(tmp, "default", "seed = 8\nexemplar_count = 10000\n")?;
    let pinned = run_cli_twice(tmp, "pinned", "seed = 8\nexemplar_count = 10000\ntest_mode = on\n")?;
    let mut differ = differing(&default, &bundle);
    differ.extend(differing(&pinned, &["daughter.jsonl"]));
    check(
        differ.is_empty(),
        if differ.is_empty() {
            format!(
                "corpus and {} report files identical; daughter dump identical with a pinned session",
                bundle.len() - 1
            )
        } else {
            format!("differs: {}", differ.join(", "))
        },
    )
}

fn c9(runs: &[Seeded]) -> Verdict {
    let medians: Vec<(String, f64, f64)> = runs
        .iter()
        .map(|s| {
            let m = |c| s.out.bundle.boxplot(c).map_or(f64::NAN, |b| b.median);
            (s.label.clone(), m("acquired_functional"), m("acquired_content"))
        })
        .collect();
    let detail = medians.iter().map(|(l, f, c)| format!("{l} {f} > {c}")).collect::<Vec<_>>().join(", ");
    check(medians.iter().all(|&(_, f, c)| f > c), detail)
}

fn c10(runs: &[Seeded]) -> Verdict {
    let micro = lexical_statistics(["a", "a", "b"]).unwrap();
    let micro_ok = micro == LexStats { types: 2, tokens: 3, hapax: 1, dis_legomena: 1 };
    let mut bad = Vec::new();
    for s in runs {
        let from_table = LexStats::from_table(&build_frequency_table(&s.out.daughter).unwrap()).unwrap();
        let corpus = fs::read_to_string(s.out.log.config.output_dir.join("corpus.txt")).unwrap();
        let direct =
            lexical_statistics(corpus.lines().filter(|l| !l.starts_with('#')).flat_map(str::split_whitespace)).unwrap();
        if from_table != direct || direct != s.out.bundle.lexstats {
            bad.push(s.label.clone());
        }
    }
    check(
        micro_ok && bad.is_empty(),
        format!("micro corpus {micro:?}, {} corpora consistent, mismatched: {bad:?}", runs.len() - bad.len()),
    )
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for kind in [PhraseKind::Np, PhraseKind::Sentence] {
        for seed in [1, 2, 3] {
            let label = format!("{kind:?}/{seed}").to_lowercase();
            let out = run(kind, seed, 10_000, &tmp.path().join(label.replace('/', "-")));
            runs.push(Seeded { label, out });
        }
    }

    let results: Vec<(&str, Verdict)> = vec![
        ("C1 threshold boundary", c1()),
        ("C2 min-data gate", c2(tmp.path())),
        ("C3 Fisher p < 0.001", c3(&runs)),
        ("C4 error asymmetry", c4(&runs)),
        ("C5 top-35 dominance", c5(&runs)),
        ("C6 Fisher oracle", c6()),
        ("C7 unification algebra", c7()),
        ("C8 determinism", c8(tmp.path())),
        ("C9 boxplot separation", c9(&runs)),
        ("C10 lexstats consistency", c10(&runs)),
    ];
    let mut failed = 0;
    for (name, verdict) in &results {
        match verdict {
            Ok(d) => println!("PASS {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {name}: {d}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
