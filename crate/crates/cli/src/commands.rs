use std::io::Write;

use serde::Serialize;

use geneuler::gen_euler::{mandel_q, mean, pmf_table, variance, GenEulerParams, SampleStream};
use geneuler::qcalc::q_number;
use geneuler::regime::{cardano_discriminant, classify as regime_at, m_threshold, report, CubicCoeffs, RegimeReport};
use geneuler::strategy::{pgf_methods, regime_classifiers, zeta_solvers};
use geneuler::verify::{run_suites, suites, Level, VerifyConfig};
use geneuler::Error;

use crate::output::{self, f_opt, fmt, fmt_opt, Format, F};
use crate::{CliError, OptState, State};

type Out<'a> = &'a mut dyn Write;

fn lambda_of(lambda: Option<f64>, zmod: Option<f64>) -> Result<Option<f64>, CliError> {
    match (lambda, zmod) {
        (Some(l), None) => Ok(Some(l)),
        (None, Some(r)) if r >= 0.0 => Ok(Some(r * r)),
        (None, Some(r)) => Err(CliError::Usage(format!("--zmod must be non-negative, got {r}"))),
        (None, None) => Ok(None),
        (Some(_), Some(_)) => Err(CliError::Usage("give exactly one of --lambda and --zmod".into())),
    }
}

fn params(s: State) -> Result<GenEulerParams, CliError> {
    let l = lambda_of(s.lambda, s.zmod)?.ok_or_else(|| CliError::Usage("one of --lambda and --zmod is required".into()))?;
    Ok(GenEulerParams::new(s.q, s.m, l)?)
}

#[derive(Serialize)]
struct PmfRow {
    j: usize,
    p: F,
    cumulative: F,
}

#[derive(Serialize)]
struct PmfOut {
    q: F,
    m: u32,
    lambda: F,
    rows: Vec<PmfRow>,
    tail_bound: F,
}

pub fn pmf(out: Out, fmt_: Format, state: State, tol: f64) -> Result<(), CliError> {
    let p = params(state)?;
    let table = pmf_table(&p, tol)?;
    let cum = table.cumulative();
    let probs = table.probs();
    // a point mass is stored with its leading zeros; print only the support
    let first = if p.lambda() == 0.0 { p.m() as usize } else { 0 };
    match fmt_ {
        Format::Csv => {
            let rows = (first..probs.len())
                .map(|j| vec![j.to_string(), fmt(probs[j]), fmt(cum[j])])
                .chain(std::iter::once(vec!["tail_bound".into(), fmt(table.tail_bound()), String::new()]));
            output::csv(out, &["j", "p_j", "cumulative"], rows)?;
        }
        Format::Json => {
            let rows = (first..probs.len()).map(|j| PmfRow { j, p: F(probs[j]), cumulative: F(cum[j]) }).collect();
            let o = PmfOut { q: F(p.q()), m: p.m(), lambda: F(p.lambda()), rows, tail_bound: F(table.tail_bound()) };
            output::json(out, &o)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct MomentsOut {
    q: F,
    m: u32,
    lambda: F,
    mean: F,
    variance: F,
    mandel_q: Option<F>,
    regime: Option<&'static str>,
}

pub fn moments(out: Out, fmt_: Format, state: State) -> Result<(), CliError> {
    let p = params(state)?;
    // the degenerate point m = 0, lambda = 0 has no Mandel Q and no regime
    let mq = match mandel_q(&p) {
        Ok(v) => Some(v),
        Err(Error::DivisionByZero(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let regime = match regime_at(p.lambda(), p.q(), p.m()) {
        Ok(r) => Some(r.as_str()),
        Err(Error::DivisionByZero(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let o = MomentsOut {
        q: F(p.q()),
        m: p.m(),
        lambda: F(p.lambda()),
        mean: F(mean(&p)),
        variance: F(variance(&p)),
        mandel_q: f_opt(mq),
        regime,
    };
    match fmt_ {
        Format::Csv => output::csv(
            out,
            &["q", "m", "lambda", "mean", "variance", "mandel_q", "regime"],
            [vec![
                fmt(o.q.0),
                o.m.to_string(),
                fmt(o.lambda.0),
                fmt(o.mean.0),
                fmt(o.variance.0),
                fmt_opt(mq),
                regime.unwrap_or_default().to_string(),
            ]],
        )?,
        Format::Json => output::json(out, &o)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct IntervalOut {
    lo: F,
    hi: F,
    regime: &'static str,
}

#[derive(Serialize)]
struct ClassifyOut {
    q: F,
    m: u32,
    delta: F,
    delta_small: F,
    cardano_disc: F,
    q0: F,
    m_q: Option<u32>,
    zeta_q: Option<F>,
    lambda_plus: Option<F>,
    lambda_minus: Option<F>,
    z_plus: Option<F>,
    z_minus: Option<F>,
    domain_max: F,
    intervals: Vec<IntervalOut>,
    poissonian_points: Vec<F>,
    lambda: Option<F>,
    classifier: Option<String>,
    regime: Option<&'static str>,
}

impl ClassifyOut {
    fn new(r: &RegimeReport) -> Self {
        Self {
            q: F(r.q),
            m: r.m,
            delta: F(r.delta),
            delta_small: F(r.delta_small),
            cardano_disc: F(r.cardano_disc),
            q0: F(r.q0),
            m_q: r.m_q,
            zeta_q: f_opt(r.zeta_q),
            lambda_plus: f_opt(r.lambda_plus),
            lambda_minus: f_opt(r.lambda_minus),
            z_plus: f_opt(r.z_plus),
            z_minus: f_opt(r.z_minus),
            domain_max: F(r.domain_max),
            intervals: r.intervals.iter().map(|i| IntervalOut { lo: F(i.lo), hi: F(i.hi), regime: i.regime.as_str() }).collect(),
            poissonian_points: r.poissonian_points.iter().copied().map(F).collect(),
            lambda: None,
            classifier: None,
            regime: None,
        }
    }

    /// Flattened `key,value` pairs for CSV.
    fn pairs(&self) -> Vec<Vec<String>> {
        let mut v = vec![
            ("q", fmt(self.q.0)),
            ("m", self.m.to_string()),
            ("delta", fmt(self.delta.0)),
            ("delta_small", fmt(self.delta_small.0)),
            ("cardano_disc", fmt(self.cardano_disc.0)),
            ("q0", fmt(self.q0.0)),
            ("m_q", self.m_q.map(|m| m.to_string()).unwrap_or_default()),
            ("zeta_q", fmt_opt(self.zeta_q.map(|f| f.0))),
            ("lambda_plus", fmt_opt(self.lambda_plus.map(|f| f.0))),
            ("lambda_minus", fmt_opt(self.lambda_minus.map(|f| f.0))),
            ("z_plus", fmt_opt(self.z_plus.map(|f| f.0))),
            ("z_minus", fmt_opt(self.z_minus.map(|f| f.0))),
            ("domain_max", fmt(self.domain_max.0)),
        ]
        .into_iter()
        .map(|(k, v)| vec![k.to_string(), v])
        .collect::<Vec<_>>();
        for (i, iv) in self.intervals.iter().enumerate() {
            v.push(vec![format!("interval.{i}.lo"), fmt(iv.lo.0)]);
            v.push(vec![format!("interval.{i}.hi"), fmt(iv.hi.0)]);
            v.push(vec![format!("interval.{i}.regime"), iv.regime.to_string()]);
        }
        for (i, p) in self.poissonian_points.iter().enumerate() {
            v.push(vec![format!("poissonian_point.{i}"), fmt(p.0)]);
        }
        if let (Some(l), Some(c), Some(r)) = (self.lambda, &self.classifier, self.regime) {
            v.push(vec!["lambda".into(), fmt(l.0)]);
            v.push(vec!["classifier".into(), c.clone()]);
            v.push(vec!["regime".into(), r.to_string()]);
        }
        v
    }
}

pub fn classify(out: Out, fmt_: Format, state: OptState, classifier: &str) -> Result<(), CliError> {
    let registry = regime_classifiers();
    let clf = registry.get(classifier)?;
    // validates q and m the same way the distribution does
    GenEulerParams::new(state.q, state.m, 0.0)?;
    let rep = report(state.q, state.m)?;
    let mut o = ClassifyOut::new(&rep);
    if let Some(l) = lambda_of(state.lambda, state.zmod)? {
        GenEulerParams::new(state.q, state.m, l)?;
        o.lambda = Some(F(l));
        o.classifier = Some(classifier.to_string());
        o.regime = Some(clf.classify(l, state.q, state.m)?.as_str());
    }
    match fmt_ {
        Format::Csv => output::csv(out, &["field", "value"], o.pairs())?,
        Format::Json => output::json(out, &o)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct PhaseRow {
    q: F,
    delta_tilde: F,
    zeta_q: Option<F>,
    m_q: Option<u32>,
}

/// Residual bound every emitted root must meet.
const ZETA_RECHECK: f64 = 1e-9;

pub fn phase_diagram(out: Out, fmt_: Format, q_min: f64, q_max: f64, steps: u32, solver: &str) -> Result<(), CliError> {
    if !(0.05..=0.999).contains(&q_min) || !(0.05..=0.999).contains(&q_max) || q_min > q_max {
        return Err(CliError::Usage(format!("q range [{q_min}, {q_max}] must lie within [0.05, 0.999]")));
    }
    if !(1..=1_000_000).contains(&steps) {
        return Err(CliError::Usage(format!("steps must be in 1..=1000000, got {steps}")));
    }
    let registry = zeta_solvers();
    let solver = registry.get(solver)?;
    let mut rows = Vec::with_capacity(steps as usize);
    for i in 0..steps {
        let q = if steps == 1 { q_min } else { q_min + (q_max - q_min) * f64::from(i) / f64::from(steps - 1) };
        // outside (0, q) the root exists only as a cubic root, not as zeta_q
        let zeta = match solver.solve(q) {
            Ok(z) => Some(z),
            Err(Error::Domain(_)) | Err(Error::RootNotInInterval { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        if let Some(z) = zeta {
            let r = CubicCoeffs::new(q)?.eval(z).abs();
            if !(r < ZETA_RECHECK) {
                return Err(CliError::Usage(format!("root residual {r:e} at q={q} exceeds {ZETA_RECHECK:e}")));
            }
        }
        rows.push(PhaseRow { q: F(q), delta_tilde: F(cardano_discriminant(q)?), zeta_q: f_opt(zeta), m_q: m_threshold(q)? });
    }
    match fmt_ {
        Format::Csv => output::csv(
            out,
            &["q", "delta_tilde", "zeta_q", "m_q"],
            rows.iter().map(|r| {
                vec![fmt(r.q.0), fmt(r.delta_tilde.0), fmt_opt(r.zeta_q.map(|f| f.0)), r.m_q.map(|m| m.to_string()).unwrap_or_default()]
            }),
        )?,
        Format::Json => output::json(out, &rows)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct SampleSummary {
    /// Sample mean of `[X]_q`, the quantity whose expectation is `lambda + [m]_q`.
    empirical_mean: F,
    expected_mean: F,
    std_error: F,
}

#[derive(Serialize)]
struct SampleOut {
    q: F,
    m: u32,
    lambda: F,
    n: usize,
    seed: u64,
    draws: Vec<u32>,
    summary: SampleSummary,
}

pub fn sample(out: Out, fmt_: Format, state: State, n: usize, seed: u64) -> Result<(), CliError> {
    let p = params(state)?;
    let draws = SampleStream::new(p, seed)?.sample(n);
    let nf = n.max(1) as f64;
    let total = draws.iter().map(|&j| q_number(f64::from(j), p.q())).sum::<Result<f64, Error>>()?;
    let summary = SampleSummary {
        empirical_mean: F(total / nf),
        expected_mean: F(mean(&p)),
        std_error: F((variance(&p) / nf).sqrt()),
    };
    match fmt_ {
        Format::Csv => {
            let rows = draws
                .iter()
                .enumerate()
                .map(|(i, j)| vec![i.to_string(), j.to_string()])
                .chain([
                    vec!["empirical_mean".into(), fmt(summary.empirical_mean.0)],
                    vec!["expected_mean".into(), fmt(summary.expected_mean.0)],
                    vec!["std_error".into(), fmt(summary.std_error.0)],
                ]);
            output::csv(out, &["index", "j"], rows)?;
        }
        Format::Json => {
            let o = SampleOut { q: F(p.q()), m: p.m(), lambda: F(p.lambda()), n, seed, draws, summary };
            output::json(out, &o)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PgfRow {
    t: F,
    value: F,
}

pub fn pgf(out: Out, fmt_: Format, state: State, ts: &[f64], method: &str) -> Result<(), CliError> {
    let p = params(state)?;
    let registry = pgf_methods();
    let m = registry.get(method)?;
    let rows = ts.iter().map(|&t| Ok(PgfRow { t: F(t), value: F(m.eval(t, &p)?) })).collect::<Result<Vec<_>, Error>>()?;
    match fmt_ {
        Format::Csv => output::csv(out, &["t", "value"], rows.iter().map(|r| vec![fmt(r.t.0), fmt(r.value.0)]))?,
        Format::Json => output::json(out, &rows)?,
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum LevelArg {
    Quick,
    Full,
}

#[derive(Serialize)]
struct PropertyOut {
    name: &'static str,
    points: usize,
    max_residual: Option<F>,
    tolerance: F,
    passed: bool,
    worst: String,
}

#[derive(Serialize)]
struct SuiteOut {
    name: &'static str,
    passed: bool,
    points: usize,
    properties: Vec<PropertyOut>,
}

#[derive(Serialize)]
struct VerifyOut {
    level: &'static str,
    passed: bool,
    suites: Vec<SuiteOut>,
}

pub fn verify(out: Out, fmt_: Format, level: LevelArg, only: &[String], perturbation: f64) -> Result<(), CliError> {
    let registry = suites();
    let names: Vec<&'static str> = if only.is_empty() {
        registry.names()
    } else {
        only.iter()
            .map(|s| registry.names().into_iter().find(|n| n == s).ok_or_else(|| {
                CliError::Usage(format!("unknown suite {s}, expected one of {}", registry.names().join(", ")))
            }))
            .collect::<Result<_, _>>()?
    };
    let (level, level_name) = match level {
        LevelArg::Quick => (Level::Quick, "quick"),
        LevelArg::Full => (Level::Full, "full"),
    };
    let cfg = VerifyConfig { level, perturbation };
    let reports = run_suites(&registry, &names, &cfg)?;
    let o = VerifyOut {
        level: level_name,
        passed: reports.iter().all(|r| r.passed()),
        suites: reports
            .iter()
            .map(|r| SuiteOut {
                name: r.name,
                passed: r.passed(),
                points: r.points(),
                properties: r
                    .properties
                    .iter()
                    .map(|p| PropertyOut {
                        name: p.name,
                        points: p.points,
                        max_residual: Some(F(p.max_residual)).filter(|f| f.0.is_finite()),
                        tolerance: F(p.tolerance),
                        passed: p.passed(),
                        worst: p.worst.clone(),
                    })
                    .collect(),
            })
            .collect(),
    };
    match fmt_ {
        Format::Csv => {
            let rows = reports.iter().flat_map(|r| {
                r.properties.iter().map(move |p| {
                    vec![
                        r.name.to_string(),
                        p.name.to_string(),
                        p.points.to_string(),
                        fmt(p.max_residual),
                        fmt(p.tolerance),
                        p.passed().to_string(),
                        p.worst.clone(),
                    ]
                })
            });
            output::csv(out, &["suite", "property", "points", "max_residual", "tolerance", "passed", "worst"], rows)?;
        }
        Format::Json => output::json(out, &o)?,
    }
    match reports.iter().find_map(|r| r.first_failure().map(|p| (r.name, p))) {
        None => Ok(()),
        Some((suite, p)) => Err(CliError::Verify(format!(
            "verification failed: {suite}/{}: max residual {:e} > {:e} at {}",
            p.name, p.max_residual, p.tolerance, p.worst
        ))),
    }
}
