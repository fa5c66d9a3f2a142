//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints its own PASS/FAIL line; exits nonzero if any fails.

mod common;

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uicrit::family::{sui_profile, ui_profile, wstar_ui_profile, wui_profile};
use uicrit::poussin::{find_thresholds, verify_phi, DEFAULT_SEARCH_CAP};
use uicrit::prob::{capped, excess, expectation, tail_sum};
use uicrit::sublinear::remark::RemarkCounterexample;
use uicrit::sublinear::{
    build_counterexample, check_axioms, check_characterization, scaled_indicator_family, sle_sui_profile, sle_ui_profile,
    sle_wui_profile, CharacterizationConfig,
};
use uicrit::{FamilyOfRVs, Horizons, Integrand, Measure, MeasureSet, RandomVariable, SublinearExpectation};

use common::{brute, random_measures, random_members, random_model, random_weights, FiniteModel};

const SEED: u64 = 20_240_601;
const H: u64 = 4096;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn uicrit(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_uicrit")).args(args).output().expect("run uicrit")
}

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models")
}

fn corpus() -> Vec<FiniteModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..200).map(|_| random_model(&mut rng, 64, 100.0)).collect()
}

/// `sum_{n >= m} P(|X| > n)` counted per atom: `#{n >= m : n < t} = (⌈t⌉ - m)⁺`.
fn series_oracle(m: &FiniteModel, start: u64) -> f64 {
    brute(&m.weights, &m.values, |t| (t.ceil() - start as f64).max(0.0))
}

fn c1_counterexample_ui() -> Outcome {
    let t = Instant::now();
    let levels = [10.0f64, 100.0, 1000.0, 1e6];
    let out = uicrit(&[
        "profile",
        "--plugin",
        "remark-counterexample",
        "--criterion",
        "ui",
        "--levels",
        "10,100,1000,1e6",
    ]);
    if out.status.code() != Some(0) {
        return outcome(false, format!("profile exited {:?}", out.status.code()));
    }
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let values: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let closed_err = values
        .iter()
        .zip(levels)
        .map(|(v, m)| (v - 1.0 / m.ln()).abs())
        .fold(0.0f64, f64::max);

    let plugin = RemarkCounterexample::new(1_000_000).unwrap();
    let x = RandomVariable::identity();
    let mut brute_err = 0.0f64;
    for (v, m) in values.iter().zip(levels) {
        let b = plugin
            .brute_force(&x, &Integrand::TruncatedAbove(m), 2, 1_000_000)
            .unwrap();
        brute_err = brute_err.max((v - b.value).abs());
    }
    let elapsed = t.elapsed();
    outcome(
        values.len() == 4 && closed_err <= 1e-12 && brute_err <= 1e-12 && elapsed < Duration::from_secs(5),
        format!(
            "max |v - 1/ln m| = {closed_err:.1e}, max |v - brute| = {brute_err:.1e}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn c2_counterexample_sui() -> Outcome {
    let t = Instant::now();
    let (e, x) = build_counterexample(1000).unwrap();
    let f = FamilyOfRVs::sublinear(vec![x], e).unwrap();
    let partial = |n: u64| {
        let h = Horizons { atoms: H, series: n };
        sui_profile(&f, &[2], &h).unwrap().points[0].result.value
    };
    let s5 = partial(100_000);
    let s7 = partial(10_000_000);
    let elapsed = t.elapsed();

    // integral comparison: ∫_3^{N+2} dx/(x ln x) <= sum_{j=3}^{N+1} 1/(j ln j) <= 1/(3 ln 3) + ∫_3^{N+1}
    let lnln = |v: f64| v.ln().ln();
    let bounds = |n: f64| (lnln(n + 2.0) - lnln(3.0), 1.0 / (3.0 * 3f64.ln()) + lnln(n + 1.0) - lnln(3.0));
    let (lo7, hi7) = bounds(1e7);
    let (lo5, hi5) = bounds(1e5);
    let oracle_ok = (lo7..=hi7).contains(&s7) && (lo5..=hi5).contains(&s5);
    outcome(
        s7 > 2.0 && s7 - s5 >= 0.1 && oracle_ok && elapsed < Duration::from_secs(30),
        format!(
            "S(1e5) = {s5:.6}, S(1e7) = {s7:.6}, diff = {:.6}, ln ln bracket ok = {oracle_ok}, {:.2}s",
            s7 - s5,
            elapsed.as_secs_f64()
        ),
    )
}

fn c3_sandwich(corpus: &[FiniteModel]) -> Outcome {
    let mut violations = 0;
    let mut oracle_err = 0.0f64;
    let mut checks = 0;
    for m in corpus {
        for start in 1..=110u64 {
            let lo = excess(&m.x, &m.p, start as f64, H).unwrap().value;
            let mid = tail_sum(&m.x, &m.p, start, H, H).unwrap().value;
            let hi = excess(&m.x, &m.p, (start - 1) as f64, H).unwrap().value;
            if !(lo <= mid + 1e-9 && mid <= hi + 1e-9) {
                violations += 1;
            }
            oracle_err = oracle_err.max((mid - series_oracle(m, start)).abs());
            checks += 1;
        }
    }
    outcome(
        violations == 0 && oracle_err <= 1e-9,
        format!("{checks} checks, {violations} violations, max |series - oracle| = {oracle_err:.1e}"),
    )
}

fn c4_mean_bracket(corpus: &[FiniteModel]) -> Outcome {
    let mut violations = 0;
    for m in corpus {
        let s = tail_sum(&m.x, &m.p, 1, H, H).unwrap().value;
        let mean = expectation(&m.x, &m.p, H).unwrap().value;
        if !(s <= mean + 1e-9 && mean <= 1.0 + s + 1e-9) {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{} models, {violations} violations", corpus.len()))
}

fn c5_decomposition(corpus: &[FiniteModel]) -> Outcome {
    let mut violations = 0;
    let mut worst = 0.0f64;
    let mut checks = 0;
    for m in corpus {
        let mean = expectation(&m.x, &m.p, H).unwrap().value;
        for j in 0..=240 {
            let a = f64::from(j) * 0.5;
            let sum = capped(&m.x, &m.p, a, H).unwrap().value + excess(&m.x, &m.p, a, H).unwrap().value;
            let err = (sum - mean).abs();
            worst = worst.max(err);
            if err > 1e-12 {
                violations += 1;
            }
            checks += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{checks} checks, {violations} violations, max error {worst:.1e}"),
    )
}

fn c6_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut violations = 0;
    let mut worst = 0.0f64;
    for i in 0..20 {
        let atoms = rng.gen_range(1..=24);
        let count = rng.gen_range(1..=8);
        let set = MeasureSet::explicit(random_measures(&mut rng, atoms, count)).unwrap();
        match uicrit::sublinear::axiom_report(&SublinearExpectation::new(set), 500, SEED + i, 1e-12) {
            Ok(r) => {
                violations += r.total_violations();
                worst = r.stats.iter().map(|s| s.max_violation).fold(worst, f64::max);
            }
            Err(_) => violations += 1,
        }
    }
    let strict = {
        let set = MeasureSet::explicit(random_measures(&mut rng, 8, 3)).unwrap();
        check_axioms(&SublinearExpectation::new(set), 500, SEED, 1e-12).is_ok()
    };
    outcome(
        violations == 0 && strict,
        format!("20 sets x 500 trials, {violations} violations, max deviation {worst:.1e}"),
    )
}

fn c7_poussin() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let h = Horizons::default();
    let budget = 1.0 - 0.5f64.powi(20);
    let mut failures = Vec::new();
    for i in 0..50 {
        let atoms = rng.gen_range(1..=32);
        let members = rng.gen_range(1..=6);
        let max = rng.gen_range(1.0..1000.0);
        let p = Measure::finite(random_weights(&mut rng, atoms)).unwrap();
        let f = FamilyOfRVs::classical(random_members(&mut rng, atoms, members, max), p).unwrap();
        let ok = find_thresholds(&f, 20, DEFAULT_SEARCH_CAP, &h).and_then(|phi| {
            let r = verify_phi(&f, &phi, &h)?;
            let terms_ok = r
                .terms
                .iter()
                .enumerate()
                .all(|(j, t)| t.hi() < 0.5f64.powi(j as i32 + 1));
            Ok(phi.len() == 20 && r.sup_value.hi() <= budget && terms_ok && r.growth_monotone && r.minimal == Some(true))
        });
        if !matches!(ok, Ok(true)) {
            failures.push(i);
        }
    }
    let elapsed = t.elapsed();
    outcome(
        failures.is_empty() && elapsed < Duration::from_secs(10),
        format!("50 families, K = 20, failures {failures:?}, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn c8_two_conditions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let cfg = CharacterizationConfig::default();
    let mut failures = Vec::new();
    for i in 0..20 {
        let atoms = rng.gen_range(1..=12);
        let (measures, count) = (rng.gen_range(1..=4), rng.gen_range(1..=5));
        let e = SublinearExpectation::new(MeasureSet::explicit(random_measures(&mut rng, atoms, measures)).unwrap());
        let members = random_members(&mut rng, atoms, count, 100.0);
        match check_characterization(&e, &members, &cfg) {
            Ok(r) if r.exhaustive && r.holds() && r.results.iter().all(|x| x.delta.unwrap_or(0.0) > 0.0) => {}
            _ => failures.push(i),
        }
    }
    let depth = 12;
    let (p, scaled) = scaled_indicator_family(depth).unwrap();
    let scaled_cfg = CharacterizationConfig {
        epsilons: vec![0.5],
        dyadic_depth: depth,
        ..CharacterizationConfig::default()
    };
    let r = check_characterization(&SublinearExpectation::singleton(p), &scaled, &scaled_cfg).unwrap();
    let scaled_fails = r.exhaustive && r.sup_mean.is_finite() && r.results[0].delta.is_none();
    outcome(
        failures.is_empty() && scaled_fails,
        format!(
            "UI families failing: {failures:?}; scaled family bounded with no δ at ε = 0.5: {scaled_fails} (worst {:.3})",
            r.results[0].worst_at_finest
        ),
    )
}

fn c9_singleton_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let h = Horizons::default();
    let levels: Vec<f64> = (0..=24).map(|j| f64::from(j) * 4.5).collect();
    let starts: Vec<u64> = (1..=20).map(|j| j * 5).collect();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let atoms = rng.gen_range(1..=64);
        let p = Measure::finite(random_weights(&mut rng, atoms)).unwrap();
        let count = rng.gen_range(1..=5);
        let members = random_members(&mut rng, atoms, count, 100.0);
        let f = FamilyOfRVs::classical(members.clone(), p.clone()).unwrap();
        let e = SublinearExpectation::singleton(p);
        let pairs = [
            (sle_ui_profile(&e, &members, &levels, &h), ui_profile(&f, &levels, &h)),
            (sle_wui_profile(&e, &members, &levels, &h), wui_profile(&f, &levels, &h)),
            (sle_sui_profile(&e, &members, &starts, &h), wstar_ui_profile(&f, &starts, &h)),
        ];
        for (s, c) in pairs {
            for (a, b) in s.unwrap().values().iter().zip(c.unwrap().values()) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    outcome(worst <= 1e-15, format!("50 models, max difference {worst:.1e}"))
}

fn c10_determinism() -> Outcome {
    let mut runs: Vec<Vec<String>> = Vec::new();
    let mut fixtures: Vec<PathBuf> = std::fs::read_dir(models())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    fixtures.sort();
    for path in &fixtures {
        let m = path.to_string_lossy().into_owned();
        let base = |cmd: &str| vec![cmd.to_string(), "--model".to_string(), m.clone()];
        let mut profile = base("profile");
        profile.extend(["--criterion", "ui", "--levels", "0:64:9:lin"].map(String::from));
        let mut diagnose = base("diagnose");
        diagnose.extend(["--format", "csv"].map(String::from));
        let mut phi = base("phi");
        phi.extend(["--k", "4", "--format", "csv"].map(String::from));
        runs.extend([profile, diagnose, phi, base("axioms"), base("sandwich")]);
    }
    let mut differing = Vec::new();
    for args in &runs {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = uicrit(&refs);
        let b = uicrit(&refs);
        if a.stdout != b.stdout || a.stderr != b.stderr || a.status != b.status || a.stdout.is_empty() {
            differing.push(format!("{} {}", args[0], args[2]));
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} commands on {} fixtures, differing: {differing:?}", runs.len(), fixtures.len()),
    )
}

fn main() {
    let corpus = corpus();
    let criteria: Vec<Criterion<'_>> = vec![
        ("counterexample UI profile", Box::new(c1_counterexample_ui)),
        ("counterexample S-UI divergence", Box::new(c2_counterexample_sui)),
        ("sandwich suite", Box::new(|| c3_sandwich(&corpus))),
        ("tail series brackets the mean", Box::new(|| c4_mean_bracket(&corpus))),
        ("capped + excess decomposition", Box::new(|| c5_decomposition(&corpus))),
        ("sublinear axioms", Box::new(c6_axioms)),
        ("de la Vallee Poussin construction", Box::new(c7_poussin)),
        ("two-condition characterization", Box::new(c8_two_conditions)),
        ("singleton-measure reduction", Box::new(c9_singleton_reduction)),
        ("CLI determinism", Box::new(c10_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {tag} {name}: {}", i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
