//! Acceptance suite. Prints one PASS/FAIL line per criterion and a
//! summary line. Exits non-zero on a failure only when
//! `ACCEPTANCE_STRICT=1` is set.

#[path = "support/oracle.rs"]
mod oracle;
#[path = "support/random.rs"]
mod random;

use std::process::ExitCode;
use std::time::Instant;

use multigof::adjust::{build_adjustment_curve, NullTable};
use multigof::chisquare::{blended_edges, build_bins, BinningSpec, BinningVariant, MIN_EXPECTED};
use multigof::rng::{self, tag};
use multigof::statistics::{compute_stat_vector, resolve_methods};
use multigof::studies::{
    anova_demo, power_study, type1_study, DataBinning, NullSchedule, PowerCase, PowerConfig,
    Type1Cell, Type1Config, RC_LABEL,
};
use multigof::{AltFamily, AlternativeSpec, Family, MethodId, NullModel, Sample, StatConfig};
use rand::Rng;

const SEED: u64 = 20_240_611;

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

fn size_cells() -> Vec<(&'static str, NullModel)> {
    vec![
        (
            "normal/fixed",
            NullModel::new(Family::Normal, vec![0.0, 1.0], false).unwrap(),
        ),
        (
            "normal/estimated",
            NullModel::new(Family::Normal, vec![0.0, 1.0], true).unwrap(),
        ),
        (
            "uniform/fixed",
            NullModel::new(Family::Uniform, vec![0.0, 1.0], false).unwrap(),
        ),
        (
            "exponential/estimated",
            NullModel::new(Family::Exponential, vec![1.0], true).unwrap(),
        ),
    ]
}

/// Criteria 1 and 2 share one type I error run.
fn size_and_uniformity() -> (Outcome, Outcome) {
    let cells = size_cells();
    let config = Type1Config {
        cells: cells
            .iter()
            .map(|(_, m)| Type1Cell {
                model: m.clone(),
                n: 100,
            })
            .collect(),
        alphas: vec![0.01, 0.05, 0.10],
        b: 1000,
        reps: 1000,
        methods: MethodId::ALL.to_vec(),
        seed: SEED,
        stat: StatConfig::default(),
    };
    let table = match type1_study(&config) {
        Ok(t) => t,
        Err(e) => {
            let o = outcome(false, format!("study failed: {e}"));
            return (o, outcome(false, "no p-values"));
        }
    };
    let bands = [(0.004, 0.018), (0.035, 0.065), (0.082, 0.118)];
    let mut pass1 = true;
    let mut pass2 = true;
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for ((name, _), row) in cells.iter().zip(&table.rows) {
        let ok = row
            .rates
            .iter()
            .zip(bands)
            .all(|(&r, (lo, hi))| (lo..=hi).contains(&r));
        pass1 &= ok;
        d1.push(format!(
            "{name}: {:.1}/{:.1}/{:.1}%",
            100.0 * row.rates[0],
            100.0 * row.rates[1],
            100.0 * row.rates[2]
        ));
        let d = random::ks_uniform(&row.rc_pvalues);
        pass2 &= d < 0.06;
        d2.push(format!("{name}: D={d:.4}"));
    }
    (outcome(pass1, d1.join("; ")), outcome(pass2, d2.join("; ")))
}

fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn oracle_value(m: MethodId, sorted: &[f64], fitted: &NullModel) -> Option<f64> {
    let y: Vec<f64> = sorted.iter().map(|&x| fitted.cdf(x)).collect();
    let m_est = fitted.n_estimated();
    match m {
        MethodId::KS => Some(oracle::ks(&y)),
        MethodId::AD => Some(oracle::ad(&y)),
        MethodId::CdM => Some(oracle::cdm(&y)),
        MethodId::W => Some(oracle::watson(&y)),
        MethodId::ZA => Some(oracle::za(&y)),
        MethodId::ZK => Some(oracle::zk(&y)),
        MethodId::ZC => Some(oracle::zc(&y)),
        MethodId::RGd => oracle::chisquare(sorted, fitted, 5 + m_est, 0.5),
        MethodId::EqualSize => oracle::chisquare(sorted, fitted, 10, 1.0),
        MethodId::EqualProb => oracle::chisquare(sorted, fitted, 10, 0.0),
        MethodId::Ppcc => oracle::ppcc(sorted, fitted),
        MethodId::JB => oracle::jb(sorted),
        MethodId::SW => oracle::sw(sorted),
        MethodId::SNor | MethodId::SUnif | MethodId::SExp => Some(oracle::smooth(&y)),
    }
}

fn oracle_equivalence() -> Outcome {
    let mut worst = (0.0f64, String::new());
    let mut compared = 0usize;
    let mut mismatched = Vec::new();
    for &n in &[5usize, 50, 500] {
        for pair in 0..100u64 {
            let mut s = rng::stream(SEED, &[tag::DATA, 3, n as u64, pair]);
            let model = random::null_model(&mut s);
            let x = random::data_near(&model, n, &mut s);
            let mut sorted = x.clone();
            sorted.sort_by(f64::total_cmp);
            let fitted = match model.fit(&sorted) {
                Ok(f) => f,
                Err(_) => continue,
            };
            let plan = resolve_methods(&model, &MethodId::ALL, n);
            for &m in &plan.enabled {
                let ours = compute_stat_vector(&Sample::Raw(x.clone()), &model, &[m])
                    .ok()
                    .and_then(|v| v.get(m));
                let theirs = oracle_value(m, &sorted, &fitted).filter(|v| v.is_finite());
                match (ours, theirs) {
                    (Some(a), Some(b)) => {
                        compared += 1;
                        let e = relative_error(a, b);
                        if e > worst.0 {
                            worst = (e, format!("{m} n={n} {:?}", model.family()));
                        }
                    }
                    (None, None) => {}
                    (a, b) => mismatched.push(format!("{m} n={n}: {a:?} vs {b:?}")),
                }
            }
        }
    }
    let pass = worst.0 <= 1e-10 && mismatched.is_empty();
    let mut detail = format!(
        "{compared} values, max relative error {:.2e} ({})",
        worst.0, worst.1
    );
    if !mismatched.is_empty() {
        detail += &format!(
            "; {} availability mismatches, e.g. {}",
            mismatched.len(),
            mismatched[0]
        );
    }
    outcome(pass, detail)
}

fn independent_limit() -> Outcome {
    let b = 10_000;
    let methods = vec![
        MethodId::KS,
        MethodId::AD,
        MethodId::CdM,
        MethodId::W,
        MethodId::ZA,
    ];
    let mut s = rng::stream(SEED, &[tag::DATA, 4]);
    let iid: Vec<Vec<f64>> = (0..b)
        .map(|_| (0..5).map(|_| s.random::<f64>()).collect())
        .collect();
    let same: Vec<Vec<f64>> = (0..b).map(|_| vec![s.random::<f64>(); 5]).collect();
    let c_iid =
        build_adjustment_curve(&NullTable::from_rows(methods.clone(), iid).unwrap()).unwrap();
    let c_same = build_adjustment_curve(&NullTable::from_rows(methods, same).unwrap()).unwrap();
    let grid = c_iid.grid();
    let d_iid = grid
        .iter()
        .zip(c_iid.values())
        .map(|(p, v)| (v - (1.0 - (1.0 - p).powi(5))).abs())
        .fold(0.0, f64::max);
    let d_same = grid
        .iter()
        .zip(c_same.values())
        .map(|(p, v)| (v - p).abs())
        .fold(0.0, f64::max);
    outcome(
        d_iid < 0.02 && d_same < 0.02,
        format!("sup |F - (1-(1-p)^5)| = {d_iid:.4}; identical columns sup |F - p| = {d_same:.4}"),
    )
}

fn binning() -> Outcome {
    let mut s = rng::stream(SEED, &[tag::DATA, 5]);
    let mut violations = 0;
    let mut degenerate = 0;
    let mut checked = 0;
    for _ in 0..1000 {
        let model = random::null_model(&mut s);
        let n = s.random_range(10..3000);
        let x = random::data_near(&model, n, &mut s);
        let fitted = match model.fit(&x) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let variant = [
            BinningVariant::RGd,
            BinningVariant::EqualSize,
            BinningVariant::EqualProb,
        ][s.random_range(0..3)];
        let mut spec = BinningSpec::for_variant(variant, &fitted, s.random_range(2..30));
        if s.random_bool(0.3) {
            spec.kappa = s.random::<f64>();
        }
        match build_bins(&fitted, &x, &spec) {
            Ok(bins) => {
                checked += 1;
                if bins
                    .expected(&fitted, n)
                    .iter()
                    .any(|&e| e.is_nan() || e <= MIN_EXPECTED)
                {
                    violations += 1;
                }
            }
            Err(_) => degenerate += 1,
        }
    }
    let mut exact = 0;
    for _ in 0..1000 {
        let a = s.random_range(-10.0..10.0);
        let b = a + s.random_range(0.01..20.0);
        let model = NullModel::new(Family::Uniform, vec![a, b], false).unwrap();
        let spec = BinningSpec {
            variant: BinningVariant::RGd,
            k: s.random_range(2..40),
            kappa: s.random::<f64>(),
        };
        let edges = blended_edges(&model, a, b, &spec, 1000).unwrap();
        let k = spec.k;
        let equal_width: Vec<f64> = (0..=k)
            .map(|j| {
                if j == k {
                    b
                } else {
                    a + (b - a) * (j as f64 / k as f64)
                }
            })
            .collect();
        if edges == equal_width {
            exact += 1;
        }
    }
    outcome(
        violations == 0 && exact == 1000,
        format!(
            "{checked} binnings, {violations} with an expected count <= 5 ({degenerate} rejected as too small); uniform blended = equal-width in {exact}/1000"
        ),
    )
}

fn case(
    name: &str,
    null: NullModel,
    alt: AltFamily,
    params: Vec<f64>,
    grid_params: Vec<usize>,
    grid: Vec<f64>,
) -> PowerCase {
    PowerCase {
        name: name.into(),
        null,
        alternative: AlternativeSpec::new(alt, params).unwrap(),
        grid_params,
        grid,
        n: 1000,
        lambda: None,
        binning: None::<DataBinning>,
        null_schedule: NullSchedule::Fixed,
        methods: MethodId::ALL.to_vec(),
    }
}

fn normal_est() -> NullModel {
    NullModel::new(Family::Normal, vec![0.0, 1.0], true).unwrap()
}

fn uniform() -> NullModel {
    NullModel::new(Family::Uniform, vec![0.0, 1.0], false).unwrap()
}

fn power_spot_checks() -> Outcome {
    let config = PowerConfig {
        b: 1000,
        reps: 500,
        alphas: vec![0.05],
        seed: SEED,
        stat: StatConfig::default(),
    };
    let t3 = case(
        "t3",
        normal_est(),
        AltFamily::StudentT,
        vec![3.0],
        vec![0],
        vec![3.0],
    );
    let beta = case(
        "beta",
        uniform(),
        AltFamily::Beta,
        vec![1.0, 1.5],
        vec![1],
        vec![1.5],
    );
    let same = case(
        "null",
        uniform(),
        AltFamily::Linear,
        vec![0.0],
        vec![0],
        vec![0.0],
    );
    let run = |i: usize, c: &PowerCase| power_study(i, c, &config);
    let (r1, r2, r3) = match (run(0, &t3), run(1, &beta), run(2, &same)) {
        (Ok(a), Ok(b), Ok(c)) => (a, b, c),
        (a, b, c) => {
            return outcome(
                false,
                format!("study failed: {:?} {:?} {:?}", a.err(), b.err(), c.err()),
            )
        }
    };
    let rc1 = r1.curve(0, RC_LABEL).unwrap()[0];
    let rc2 = r2.curve(0, RC_LABEL).unwrap()[0];
    let se = (0.05f64 * 0.95 / 500.0).sqrt();
    let outside: Vec<String> = r3
        .labels
        .iter()
        .zip(&r3.power[0][0])
        .filter(|(_, &p)| (p - 0.05).abs() > 2.0 * se)
        .map(|(l, p)| format!("{l}={p:.3}"))
        .collect();
    let sizes: Vec<String> = r3
        .labels
        .iter()
        .zip(&r3.power[0][0])
        .map(|(l, p)| format!("{l}={:.1}", 100.0 * p))
        .collect();
    outcome(
        rc1 > 0.99 && rc2 > 0.9 && outside.is_empty(),
        format!(
            "RC power t(3) {rc1:.3}, Beta(1,1.5) {rc2:.3}; size under null (%): {}; outside 2 s.e.: {}",
            sizes.join(" "),
            if outside.is_empty() { "none".to_string() } else { outside.join(" ") }
        ),
    )
}

fn dominance() -> Outcome {
    let exp_est = NullModel::new(Family::Exponential, vec![1.0], true).unwrap();
    let cases = [
        case(
            "normal_est_vs_t",
            normal_est(),
            AltFamily::StudentT,
            vec![30.0],
            vec![0],
            vec![30.0, 20.0, 15.0, 10.0, 7.0, 5.0],
        ),
        case(
            "uniform_vs_linear",
            uniform(),
            AltFamily::Linear,
            vec![0.0],
            vec![0],
            vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.3],
        ),
        case(
            "uniform_vs_beta_1q",
            uniform(),
            AltFamily::Beta,
            vec![1.0, 1.0],
            vec![1],
            vec![1.03, 1.06, 1.09, 1.12, 1.15, 1.2],
        ),
        case(
            "uniform_vs_quadratic",
            uniform(),
            AltFamily::Quadratic,
            vec![0.0],
            vec![0],
            vec![0.2, 0.4, 0.6, 0.8, 1.0, 1.2],
        ),
        case(
            "exponential_est_vs_gamma",
            exp_est.clone(),
            AltFamily::Gamma,
            vec![1.0, 1.0],
            vec![0],
            vec![1.05, 1.1, 1.15, 1.2, 1.3, 1.4],
        ),
        case(
            "exponential_est_vs_bump",
            exp_est,
            AltFamily::ExpNormalBump,
            vec![1.0],
            vec![0],
            vec![1.0, 0.8, 0.6, 0.5, 0.4, 0.3],
        ),
    ];
    let config = PowerConfig {
        b: 1000,
        reps: 300,
        alphas: vec![0.05],
        seed: SEED,
        stat: StatConfig::default(),
    };
    let mut pass = true;
    let mut details = Vec::new();
    for (i, c) in cases.iter().enumerate() {
        let r = match power_study(i, c, &config) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("{}: {e}", c.name)),
        };
        let summary = multigof::studies::summarize(std::slice::from_ref(&r), 0.05).unwrap();
        match &summary.cases[0].gap {
            Some(g) => {
                let rc = g.power[RC_LABEL];
                let ok = rc >= g.best_power - 0.15;
                pass &= ok;
                details.push(format!(
                    "{} @{}: RC {:.3} vs {} {:.3}",
                    c.name, g.grid_value, rc, g.best, g.best_power
                ));
            }
            None => details.push(format!("{}: no point above 90%", c.name)),
        }
    }
    outcome(pass, details.join("; "))
}

fn anova() -> Outcome {
    match anova_demo(100, 5, 1000, SEED) {
        Ok(d) => {
            let mean = d.raw.iter().sum::<f64>() / d.raw.len() as f64;
            let ks = random::ks_uniform(&d.adjusted);
            outcome(
                mean < 0.2 && ks < 0.06,
                format!("raw min-p mean {mean:.4}; adjusted KS distance {ks:.4}"),
            )
        }
        Err(e) => outcome(false, format!("demo failed: {e}")),
    }
}

fn report(id: usize, o: &Outcome, secs: f64) -> bool {
    let status = if o.pass { "PASS" } else { "FAIL" };
    println!("criterion {id}: {status} [{secs:.1}s] {}", o.detail);
    o.pass
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let wanted = |id: usize| filter.is_empty() || filter.iter().any(|f| f == &id.to_string());
    let mut failed = Vec::new();

    if wanted(1) || wanted(2) {
        let t = Instant::now();
        let (c1, c2) = size_and_uniformity();
        let secs = t.elapsed().as_secs_f64();
        if !report(1, &c1, secs) {
            failed.push(1);
        }
        if !report(2, &c2, 0.0) {
            failed.push(2);
        }
    }
    let rest: [(usize, fn() -> Outcome); 6] = [
        (3, oracle_equivalence),
        (4, independent_limit),
        (5, binning),
        (6, power_spot_checks),
        (7, dominance),
        (8, anova),
    ];
    for (id, f) in rest {
        if wanted(id) {
            let t = Instant::now();
            let o = f();
            if !report(id, &o, t.elapsed().as_secs_f64()) {
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria PASS");
        return ExitCode::SUCCESS;
    }
    println!("acceptance: FAILED criteria {failed:?}");
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
