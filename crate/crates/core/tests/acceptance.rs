//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Tolerances and runtime budgets are pinned below.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rieszlab::experiments::{parse_config, run_scenarios, BuiltinSeries, BUILTIN_SUITE};
use rieszlab::multiplier::{
    h_bound, inclusion_chain_probe, membership, CoefficientRule, MultiplierSequence,
    OperatorSeriesSpec, SeriesFamily,
};
use rieszlab::oracle::exact_h_scalar_exhaustive;
use rieszlab::orlicz_pettis::{antosik_matrix, IntervalPartition};
use rieszlab::space::sample_functionals;
use rieszlab::summability::{cesaro_transform, r_sum, riesz_transform};
use rieszlab::summing::{continuity_witness, tail_decay_profile, CONTINUITY_SLACK};
use rieszlab::{FiniteVector, NormKind, RieszWeights, TruncationSchedule, VerdictKind};

const CESARO_TOL: f64 = 1e-12;
const CESARO_BUDGET: Duration = Duration::from_secs(5);
const REGULARITY_TOL: f64 = 1e-6;
const REGULARITY_BUDGET: Duration = Duration::from_secs(30);
const GRANDI_TOL: f64 = 1e-4;
const GRANDI_BUDGET: Duration = Duration::from_secs(2);
const TAIL_TOL: f64 = 1e-9;
const TAIL_FLOOR: f64 = 0.05;
const GAP_TOL: f64 = 1e-10;
const ANTOSIK_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_vectors(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<FiniteVector> {
    (0..n)
        .map(|_| {
            FiniteVector::new((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
        })
        .collect()
}

fn cesaro_reduction() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = random_vectors(&mut rng, 10_000, 2);
        let r = riesz_transform(&RieszWeights::cesaro(), xs.clone(), 10_000).unwrap();
        let c = cesaro_transform(xs, 10_000).unwrap();
        for (a, b) in r.iter().zip(&c) {
            worst = worst.max(a.distance(b, NormKind::Inf).unwrap());
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= CESARO_TOL && t < CESARO_BUDGET,
        format!(
            "max entry diff {worst:.3e} over 100 sequences, {:.2}s",
            t.as_secs_f64()
        ),
    )
}

/// Every regular family: constant, power and geometric weights. Explicit
/// lists end in zeros and are not regular, so they are not part of this check.
fn regular_families() -> Vec<RieszWeights> {
    vec![
        RieszWeights::cesaro(),
        RieszWeights::Constant(2.5),
        RieszWeights::Power(0.5),
        RieszWeights::Power(1.0),
        RieszWeights::Power(2.0),
        RieszWeights::Geometric(1.01),
        RieszWeights::Geometric(2.0),
    ]
}

fn regularity() -> Outcome {
    let start = Instant::now();
    let sched = TruncationSchedule::default()
        .with_tol(REGULARITY_TOL)
        .unwrap();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for w in regular_families() {
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
            let l: f64 = rng.random_range(-10.0..10.0);
            let c: f64 = rng.random_range(-10.0..10.0);
            let q: f64 = rng.random_range(-0.95..0.95);
            let seq = (1..=sched.final_depth() as i32)
                .map(|n| FiniteVector::scalar(l + c * q.powi(n)).unwrap());
            let v = rieszlab::summability::r_limit(&w, seq, &sched).unwrap();
            let err = v.limit.as_ref().map_or(f64::INFINITY, |x| (x[0] - l).abs());
            worst = worst.max(err);
            if v.kind != VerdictKind::Converged || err > REGULARITY_TOL {
                failures.push(format!("{w} seed {seed}: {} err {err:.2e}", v.kind));
            }
        }
    }
    let t = start.elapsed();
    outcome(
        failures.is_empty() && t < REGULARITY_BUDGET,
        format!(
            "{} families x 100 sequences, worst |limit - L| {worst:.2e}, {} failures{}, {:.2}s",
            regular_families().len(),
            failures.len(),
            failures
                .first()
                .map_or(String::new(), |f| format!(" (first: {f})")),
            t.as_secs_f64()
        ),
    )
}

fn grandi() -> Outcome {
    let start = Instant::now();
    let n_max = 100_000;
    let sched = TruncationSchedule::default().with_tol(GRANDI_TOL).unwrap();
    let terms =
        || (1..=n_max).map(|k| FiniteVector::scalar(if k % 2 == 1 { 1.0 } else { -1.0 }).unwrap());
    let mut details = Vec::new();
    let mut pass = true;
    // closed forms for the means of the partial sums 1, 0, 1, 0, ...; with
    // r_k = k the mean is n/(2(n+1)) at even n and (n+1)/(2n) at odd n
    let cases: [(RieszWeights, fn(f64) -> f64); 2] = [
        (RieszWeights::cesaro(), |n| (n / 2.0).ceil() / n),
        (RieszWeights::Power(1.0), |n| {
            if n % 2.0 == 0.0 {
                n / (2.0 * (n + 1.0))
            } else {
                (n + 1.0) / (2.0 * n)
            }
        }),
    ];
    for (w, closed) in cases {
        let sums: Vec<FiniteVector> = (1..=n_max)
            .map(|k| FiniteVector::scalar((k % 2) as f64).unwrap())
            .collect();
        let means = riesz_transform(&w, sums, n_max).unwrap();
        let oracle_err = means
            .iter()
            .enumerate()
            .map(|(i, m)| (m[0] - closed((i + 1) as f64)).abs())
            .fold(0.0, f64::max);
        let v = r_sum(&w, terms(), &sched).unwrap();
        let err = v
            .limit
            .as_ref()
            .map_or(f64::INFINITY, |l| (l[0] - 0.5).abs());
        pass &= v.kind == VerdictKind::Converged && err <= GRANDI_TOL && oracle_err <= 1e-12;
        details.push(format!(
            "{w}: {} |sum - 1/2| {err:.2e}, closed-form diff {oracle_err:.1e}",
            v.kind
        ));
    }
    let t = start.elapsed();
    pass &= t < GRANDI_BUDGET;
    outcome(
        pass,
        format!("{}; {:.2}s", details.join("; "), t.as_secs_f64()),
    )
}

fn scalar(rule: CoefficientRule) -> OperatorSeriesSpec {
    OperatorSeriesSpec::scalar(rule).unwrap()
}

/// A seeded scenario for the chain check: a built-in series and a multiplier.
fn chain_scenario(rng: &mut ChaCha8Rng) -> (OperatorSeriesSpec, MultiplierSequence) {
    let series = match rng.random_range(0..7) {
        0 => BuiltinSeries::Grandi,
        1 => BuiltinSeries::Ones,
        2 => BuiltinSeries::Harmonic,
        3 => BuiltinSeries::DiagonalGeometric {
            q: rng.random_range(1.5..4.0),
            dim: rng.random_range(1..=3),
        },
        4 => BuiltinSeries::RankOne {
            dim: rng.random_range(1..=8),
        },
        5 => BuiltinSeries::Zero {
            dim: rng.random_range(1..=3),
        },
        _ => BuiltinSeries::Scalar(
            (0..rng.random_range(1..=10))
                .map(|_| rng.random_range(-2.0..2.0))
                .collect(),
        ),
    };
    let x = match rng.random_range(0..6) {
        0 => MultiplierSequence::Ones,
        1 => MultiplierSequence::Phi(
            (0..rng.random_range(1..=5))
                .map(|_| rng.random_range(-2.0..2.0))
                .collect(),
        ),
        2 => MultiplierSequence::SeededNull(rng.random()),
        3 => MultiplierSequence::SeededBounded(rng.random()),
        4 => MultiplierSequence::Periodic(
            (0..rng.random_range(1..=4))
                .map(|_| rng.random_range(-1.0..1.0))
                .collect(),
        ),
        _ => MultiplierSequence::Geometric(rng.random_range(0.3..0.95)),
    };
    (series.spec().unwrap(), x)
}

fn inclusions() -> Outcome {
    let sched = TruncationSchedule::default().with_tol(GRANDI_TOL).unwrap();
    let w = RieszWeights::cesaro();
    let mut pass = true;
    let mut details = Vec::new();

    let grandi = inclusion_chain_probe(
        &scalar(CoefficientRule::Alternating),
        &MultiplierSequence::Ones,
        &w,
        &sched,
    )
    .unwrap();
    let ok = grandi.chain == [false, true, true, true];
    pass &= ok;
    details.push(format!("grandi {:?}", grandi.chain));

    let ones = inclusion_chain_probe(
        &scalar(CoefficientRule::Ones),
        &MultiplierSequence::Ones,
        &w,
        &sched,
    )
    .unwrap();
    pass &= ones.chain == [false; 4];
    details.push(format!("ones {:?}", ones.chain));

    // finitely supported multipliers: every space, and the finite sum itself
    let mut phi_ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..20 {
        let coeffs: Vec<f64> = (0..rng.random_range(1..=6))
            .map(|_| rng.random_range(-3.0..3.0))
            .collect();
        let series = scalar(CoefficientRule::Alternating);
        let exact: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { *c } else { -c })
            .sum();
        let m = membership(&series, &MultiplierSequence::Phi(coeffs), &w, &sched).unwrap();
        for (_, v) in m.iter() {
            let hit = v
                .limit
                .as_ref()
                .is_some_and(|l| (l[0] - exact).abs() <= 1e-12);
            phi_ok &= v.kind == VerdictKind::Converged && hit;
        }
    }
    pass &= phi_ok;
    details.push(format!("phi all-yes with exact sums: {phi_ok}"));

    let families: [(&str, fn(&mut ChaCha8Rng) -> RieszWeights); 3] = [
        ("constant", |r| {
            RieszWeights::Constant(r.random_range(0.5..5.0))
        }),
        ("power", |r| RieszWeights::Power(r.random_range(0.0..3.0))),
        ("geometric", |r| {
            RieszWeights::Geometric(r.random_range(1.01..3.0))
        }),
    ];
    let dump = Path::new(env!("CARGO_TARGET_TMPDIR")).join("chain_counterexamples.jsonl");
    let mut dumps = String::new();
    for (name, draw) in families {
        let mut violations = 0;
        let mut first = None;
        for i in 0..200u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(7_000 + i);
            let (series, x) = chain_scenario(&mut rng);
            let w = draw(&mut rng);
            let r = inclusion_chain_probe(&series, &x, &w, &sched).unwrap();
            if let Some((p, q)) = r.violation {
                violations += 1;
                dumps.push_str(&r.dump());
                dumps.push('\n');
                first.get_or_insert(format!("{x} with {w}: {}>{}", p.label(), q.label()));
            }
        }
        pass &= violations == 0;
        details.push(format!(
            "{name}: {violations}/200 violations{}",
            first.map_or(String::new(), |f| format!(" (first: {f})"))
        ));
    }
    if !dumps.is_empty() {
        fs::write(&dump, dumps).unwrap();
        details.push(format!("counterexamples in {}", dump.display()));
    }
    outcome(pass, details.join("; "))
}

fn h_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for _ in 0..50 {
        let len = rng.random_range(1..=20);
        let coeffs: Vec<f64> = (0..len).map(|_| rng.random_range(-10.0..10.0)).collect();
        let h = h_bound(&scalar(CoefficientRule::List(coeffs.clone())), len, 0, 0).unwrap();
        if h.estimate != exact_h_scalar_exhaustive(&coeffs).unwrap() {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("{mismatches}/50 lists differ from sign enumeration"),
    )
}

fn continuity() -> Outcome {
    let series = OperatorSeriesSpec::new(SeriesFamily::Diagonal {
        rule: CoefficientRule::Geometric(2.0),
        dim: 2,
    })
    .unwrap();
    let sched = TruncationSchedule::default();
    let w = RieszWeights::cesaro();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut members = 0;
    let mut worst_margin = f64::INFINITY;
    let mut violations = 0;
    for i in 0..500u64 {
        let x = match i % 3 {
            0 => MultiplierSequence::SeededBounded(rng.random()),
            1 => MultiplierSequence::SeededNull(rng.random()),
            _ => MultiplierSequence::Phi(
                (0..rng.random_range(1..=8))
                    .map(|_| rng.random_range(-5.0..5.0))
                    .collect(),
            ),
        };
        let Ok(c) = continuity_witness(&series, &x, &w, &sched) else {
            continue;
        };
        members += 1;
        // H_upper = sum |lambda_k| over the scheduled depth
        let h_upper = series.norm_sum(sched.final_depth()).unwrap();
        let margin = h_upper * c.x_sup + CONTINUITY_SLACK - c.lhs;
        worst_margin = worst_margin.min(margin);
        if margin < 0.0 || !c.holds {
            violations += 1;
        }
    }
    outcome(
        members == 500 && violations == 0,
        format!(
            "{members}/500 members, {violations} violations, smallest margin {worst_margin:.3e}"
        ),
    )
}

fn tail_decay() -> Outcome {
    let w = RieszWeights::cesaro();
    let depths = [8, 16, 32];
    let geo = BuiltinSeries::DiagonalGeometric { q: 2.0, dim: 2 }
        .spec()
        .unwrap();
    let t = tail_decay_profile(&geo, &w, &depths, 16, 0).unwrap();
    let err = t
        .depths
        .iter()
        .zip(&t.tail_norms)
        .map(|(&n, v)| (v - 2f64.powi(-(n as i32))).abs())
        .fold(0.0, f64::max);
    let harm = BuiltinSeries::DiagonalHarmonic { dim: 2 }.spec().unwrap();
    let h = tail_decay_profile(&harm, &w, &depths, 16, 0).unwrap();
    let floor = h.tail_norms.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        err <= TAIL_TOL && t.decaying && !h.decaying && floor >= TAIL_FLOOR,
        format!(
            "geometric max |tail - 2^-n| {err:.2e}; harmonic smallest tail {floor:.3}, flagged non-decaying: {}",
            !h.decaying
        ),
    )
}

fn field(line: &str, i: usize) -> &str {
    line.split(',').nth(i).unwrap_or("")
}

fn weak_strong(out: &Path) -> Outcome {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for entry in fs::read_dir(out).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_none_or(|e| e != "csv") {
            continue;
        }
        for line in fs::read_to_string(&p).unwrap().lines().skip(1) {
            let metric = field(line, 2);
            if field(line, 1) == "gap"
                && field(line, 3) == "Converged"
                && (metric == "gap" || metric == "limit_gap")
            {
                checked += 1;
                worst = worst.max(field(line, 4).parse::<f64>().unwrap());
            }
        }
    }
    outcome(
        checked > 0 && worst <= GAP_TOL,
        format!("{checked} converged gap rows, largest gap {worst:.3e}"),
    )
}

fn antosik() -> Outcome {
    let series = BuiltinSeries::DiagonalGeometric { q: 2.0, dim: 2 }
        .spec()
        .unwrap();
    let part = IntervalPartition::pairs(32).unwrap();
    let f = sample_functionals(2, 8, 0, NormKind::Inf).unwrap();
    let r = antosik_matrix(
        &series,
        &MultiplierSequence::Ones,
        &part,
        &f,
        &RieszWeights::cesaro(),
        1e-8,
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for (i, row) in r.matrix.entries.iter().enumerate() {
        let fi = &f[i % f.len()];
        let fe: f64 = fi.coeffs.as_slice().iter().sum();
        for (j, &h) in row.iter().enumerate() {
            let (ti, tj) = ((i + 1) as f64, (j + 1) as f64);
            // T_{2j-1} e + T_{2j} e = 3 * 4^{-j} e
            let closed = fe * 3.0 * 4f64.powi(-((j + 1) as i32)) * tj / ti;
            worst = worst.max((h - closed).abs());
        }
    }
    outcome(
        worst <= ANTOSIK_TOL && r.column_decay,
        format!(
            "max |h_ij - closed form| {worst:.2e}, column decay {}",
            r.column_decay
        ),
    )
}

fn determinism(a: &Path, b: &Path) -> Outcome {
    let mut names: Vec<String> = fs::read_dir(a)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let mut differing = Vec::new();
    for n in &names {
        if fs::read(a.join(n)).unwrap() != fs::read(b.join(n)).ok().unwrap_or_default() {
            differing.push(n.clone());
        }
    }
    let count_b = fs::read_dir(b).unwrap().count();
    outcome(
        differing.is_empty() && count_b == names.len(),
        format!("{} files compared, {} differ", names.len(), differing.len()),
    )
}

fn main() {
    let suite = parse_config(BUILTIN_SUITE).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let (run_a, run_b) = (tmp.path().join("a"), tmp.path().join("b"));
    let summary = run_scenarios(&suite, &run_a).unwrap();
    assert!(summary.ok(), "built-in suite errored: {summary:?}");
    run_scenarios(&suite, &run_b).unwrap();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("Cesaro reduction", Box::new(cesaro_reduction)),
        ("regularity", Box::new(regularity)),
        ("Grandi target", Box::new(grandi)),
        ("inclusion evidence", Box::new(inclusions)),
        ("H-bound exactness", Box::new(h_exactness)),
        ("continuity bound", Box::new(continuity)),
        ("tail decay", Box::new(tail_decay)),
        ("weak/strong collapse", Box::new(|| weak_strong(&run_a))),
        ("Antosik matrix", Box::new(antosik)),
        ("determinism", Box::new(|| determinism(&run_a, &run_b))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {name}: {} ({})",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
