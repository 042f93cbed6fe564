//! Named experiments: parameter schema plus the computation behind each.

use std::path::Path;

use clap::ValueEnum;
use pathlab::bell::{
    self, chsh_exact, chsh_sampled, run_local_model, scan_correlation, write_trial_log, ChshResult,
    ChshSettings, ConstantModel, LocalModel, SawtoothModel, ScanSource,
};
use pathlab::interferometer::{
    correlation, factored_amplitude, joint_amplitude, joint_distribution, DetectorOutcome,
    InterferometerConfig,
};
use pathlab::ring::{
    eq10_diagnostic, spectral_propagator, spectral_propagator_adaptive, total_propagator,
    total_propagator_adaptive, AnglePoint, RingParams,
};
use pathlab::spin::{classify_homotopy, read_path_file, spin_pair_diagnostic};

use crate::output::{Cell, Report};
use crate::params::{Kind, Resolved, Spec};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    RingPropagator,
    #[value(name = "eq10-check")]
    Eq10Check,
    Interferometer,
    Chsh,
    RppTrials,
    SpinClassify,
    SpinPair,
    CorrelationScan,
}

const fn spec(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Spec {
    Spec {
        name,
        kind,
        default: Some(default),
        help,
    }
}

const MASS: Spec = spec("mass", Kind::Real, "1", "particle mass");
const HBAR: Spec = spec("hbar", Kind::Real, "1", "reduced Planck constant");
const RADIUS: Spec = spec("radius", Kind::Real, "1", "ring radius");
const TIME: Spec = spec("time", Kind::Real, "1", "propagation time");
const EPSILON: Spec = spec(
    "epsilon",
    Kind::Real,
    "0.05",
    "contour regulator, t(1 - i epsilon)",
);
const THETA: Spec = spec("theta", Kind::Real, "0", "source angle");
const PAIR_N_MAX: Spec = spec(
    "n_max",
    Kind::Truncation,
    "32",
    "winding bound of the pair sum",
);
const TRIALS: Spec = spec("trials", Kind::Count, "1000000", "trials per setting pair");

/// Matches the library's default continuity tolerance.
const DEFAULT_TOLERANCE: &str = "0.5";

const SOURCES: &[&str] = &["exact", "sampled", "sawtooth", "constant"];
const SCAN_SOURCES: &[&str] = &["exact", "sawtooth", "constant"];

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::RingPropagator => "ring-propagator",
            Experiment::Eq10Check => "eq10-check",
            Experiment::Interferometer => "interferometer",
            Experiment::Chsh => "chsh",
            Experiment::RppTrials => "rpp-trials",
            Experiment::SpinClassify => "spin-classify",
            Experiment::SpinPair => "spin-pair",
            Experiment::CorrelationScan => "correlation-scan",
        }
    }

    pub fn schema(self) -> Vec<Spec> {
        match self {
            Experiment::RingPropagator => vec![
                THETA,
                spec(
                    "alpha",
                    Kind::Grid,
                    "0.5",
                    "target angle or start:stop:step",
                ),
                TIME,
                EPSILON,
                MASS,
                HBAR,
                RADIUS,
                spec(
                    "n_max",
                    Kind::Truncation,
                    "auto",
                    "bound of both sums, or auto",
                ),
            ],
            Experiment::Eq10Check => vec![
                THETA,
                spec(
                    "beta",
                    Kind::Real,
                    "0.2",
                    "second angle, theta <= beta <= alpha < pi",
                ),
                spec("alpha", Kind::Grid, "0.7", "first angle or start:stop:step"),
                TIME,
                EPSILON,
                MASS,
                HBAR,
                RADIUS,
                PAIR_N_MAX,
            ],
            Experiment::Interferometer => vec![
                spec("alpha", Kind::Real, "0", "upper phase shifter"),
                spec("beta", Kind::Real, "0", "upper phase shifter on b'"),
                spec("r1", Kind::Real, "1", "upper path magnitude"),
                spec("r2", Kind::Real, "1", "lower path magnitude"),
                spec("theta_u", Kind::Real, "0", "upper path phase"),
                spec("theta_l", Kind::Real, "0", "lower path phase"),
            ],
            Experiment::Chsh => vec![
                spec("a", Kind::Real, "0", "first left setting"),
                spec("a_prime", Kind::Real, "pi/2", "second left setting"),
                spec("b", Kind::Real, "pi/4", "first right setting"),
                spec("b_prime", Kind::Real, "3pi/4", "second right setting"),
                spec(
                    "source",
                    Kind::Choice(SOURCES),
                    "exact",
                    "exact, sampled, sawtooth or constant",
                ),
                TRIALS,
            ],
            Experiment::RppTrials => vec![
                spec("alpha", Kind::Real, "0", "upper phase shifter"),
                spec("beta", Kind::Real, "0", "upper phase shifter on b'"),
                spec("trials", Kind::Count, "10000", "number of trials"),
                Spec {
                    name: "log",
                    kind: Kind::Path,
                    default: None,
                    help: "per-trial log file",
                },
            ],
            Experiment::SpinClassify => vec![
                Spec {
                    name: "path",
                    kind: Kind::Path,
                    default: None,
                    help: "sample file, one `axis_x,axis_y,axis_z,angle` per line (required)",
                },
                spec(
                    "tolerance",
                    Kind::Real,
                    DEFAULT_TOLERANCE,
                    "largest rotation distance between samples",
                ),
            ],
            Experiment::SpinPair => vec![
                THETA,
                spec("alpha", Kind::Real, "0.7", "first measurement angle"),
                spec("beta", Kind::Real, "0.2", "second measurement angle"),
                TIME,
                EPSILON,
                MASS,
                HBAR,
                RADIUS,
                PAIR_N_MAX,
            ],
            Experiment::CorrelationScan => vec![
                spec("alpha", Kind::Real, "0", "left setting"),
                spec(
                    "delta",
                    Kind::Grid,
                    "0:pi:pi/4",
                    "alpha - beta, value or start:stop:step",
                ),
                spec(
                    "source",
                    Kind::Choice(SCAN_SOURCES),
                    "exact",
                    "exact, sawtooth or constant",
                ),
                spec("trials", Kind::Count, "100000", "trials per grid point"),
            ],
        }
    }

    pub fn run(self, params: &Resolved, seed: u64) -> Result<Run, CliError> {
        match self {
            Experiment::RingPropagator => ring_propagator(params),
            Experiment::Eq10Check => eq10_check(params),
            Experiment::Interferometer => interferometer(params),
            Experiment::Chsh => chsh(params, seed),
            Experiment::RppTrials => rpp_trials(params, seed),
            Experiment::SpinClassify => spin_classify(params),
            Experiment::SpinPair => spin_pair(params),
            Experiment::CorrelationScan => correlation_scan(params, seed),
        }
    }
}

pub struct SideFile {
    pub param: &'static str,
    pub path: String,
    pub contents: Vec<u8>,
}

pub struct Run {
    pub report: Report,
    pub side_file: Option<SideFile>,
}

impl From<Report> for Run {
    fn from(report: Report) -> Self {
        Run {
            report,
            side_file: None,
        }
    }
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

fn ring_params(p: &Resolved) -> RingParams {
    RingParams {
        mass: p.real("mass"),
        hbar: p.real("hbar"),
        radius: p.real("radius"),
        time: p.real("time"),
        epsilon: p.real("epsilon"),
    }
}

fn ring_propagator(p: &Resolved) -> Result<Run, CliError> {
    let params = ring_params(p);
    let theta = AnglePoint::new(p.real("theta"));
    let mut rows = Vec::new();
    for &alpha in p.grid("alpha") {
        let target = AnglePoint::new(alpha);
        let (winding, spectral) = match p.truncation("n_max") {
            None => (
                total_propagator_adaptive(&params, theta, target),
                spectral_propagator_adaptive(&params, theta, target),
            ),
            Some(n) => (
                total_propagator(&params, theta, target, n),
                spectral_propagator(&params, theta, target, n),
            ),
        };
        let (w, s) = (winding.map_err(compute)?, spectral.map_err(compute)?);
        rows.push(vec![
            alpha.into(),
            w.value.re.into(),
            w.value.im.into(),
            Cell::Int(w.bound.into()),
            s.value.re.into(),
            s.value.im.into(),
            Cell::Int(s.bound.into()),
            (w.value - s.value).norm().into(),
        ]);
    }
    Ok(Report {
        summary: Vec::new(),
        columns: vec![
            "alpha",
            "winding_re",
            "winding_im",
            "winding_bound",
            "spectral_re",
            "spectral_im",
            "spectral_bound",
            "difference",
        ],
        rows,
    }
    .into())
}

fn eq10_columns() -> Vec<&'static str> {
    vec![
        "lhs_re",
        "lhs_im",
        "rhs_re",
        "rhs_im",
        "ratio_re",
        "ratio_im",
        "modulus_discrepancy",
        "phase_discrepancy",
        "tail_bound",
    ]
}

fn eq10_cells(r: &pathlab::ring::Eq10Report) -> Vec<Cell> {
    vec![
        r.lhs.re.into(),
        r.lhs.im.into(),
        r.rhs.re.into(),
        r.rhs.im.into(),
        r.ratio.re.into(),
        r.ratio.im.into(),
        r.modulus_discrepancy.into(),
        r.phase_discrepancy.into(),
        r.tail_bound.into(),
    ]
}

fn pair_n_max(p: &Resolved) -> Result<u32, CliError> {
    p.truncation("n_max").ok_or_else(|| {
        CliError::Usage("parameter `n_max`: the pair sum needs an explicit bound".into())
    })
}

fn eq10_check(p: &Resolved) -> Result<Run, CliError> {
    let params = ring_params(p);
    let n_max = pair_n_max(p)?;
    let (theta, beta) = (
        AnglePoint::new(p.real("theta")),
        AnglePoint::new(p.real("beta")),
    );
    let mut rows = Vec::new();
    for &alpha in p.grid("alpha") {
        let r = eq10_diagnostic(&params, theta, AnglePoint::new(alpha), beta, n_max)
            .map_err(compute)?;
        let mut row = vec![Cell::Real(alpha)];
        row.extend(eq10_cells(&r));
        rows.push(row);
    }
    let mut columns = vec!["alpha"];
    columns.extend(eq10_columns());
    Ok(Report {
        summary: Vec::new(),
        columns,
        rows,
    }
    .into())
}

fn interferometer(p: &Resolved) -> Result<Run, CliError> {
    let config = InterferometerConfig::new(
        p.real("alpha"),
        p.real("beta"),
        p.real("r1"),
        p.real("r2"),
        p.real("theta_u"),
        p.real("theta_l"),
    )
    .map_err(compute)?;
    let dist = joint_distribution(&config);
    let rows = DetectorOutcome::ALL
        .iter()
        .map(|&o| {
            let joint = joint_amplitude(&config, o);
            let factored = factored_amplitude(&config, o);
            vec![
                o.as_str().into(),
                joint.re.into(),
                joint.im.into(),
                factored.re.into(),
                factored.im.into(),
                dist.get(o).into(),
            ]
        })
        .collect();
    let correlation = if config.is_balanced() {
        Cell::Real(correlation(&config).map_err(compute)?)
    } else {
        Cell::Missing
    };
    Ok(Report {
        summary: vec![
            ("coincidence", dist.coincidence().into()),
            ("correlation", correlation),
            ("balanced", Cell::Bool(config.is_balanced())),
        ],
        columns: vec![
            "outcome",
            "joint_re",
            "joint_im",
            "factored_re",
            "factored_im",
            "probability",
        ],
        rows,
    }
    .into())
}

const PAIR_NAMES: [&str; 4] = ["ab", "ab'", "a'b", "a'b'"];

fn chsh_report(settings: &ChshSettings, result: &ChshResult) -> Report {
    let rows = settings
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, &(alpha, beta))| {
            vec![
                PAIR_NAMES[i].into(),
                alpha.into(),
                beta.into(),
                result.correlations[i].into(),
                result.correlation_errors[i].into(),
            ]
        })
        .collect();
    Report {
        summary: vec![
            ("s", result.s.into()),
            ("standard_error", result.standard_error.into()),
            (
                "trials_per_pair",
                result
                    .trials_per_pair
                    .map_or(Cell::Missing, |n| Cell::Int(n as i64)),
            ),
        ],
        columns: vec!["pair", "alpha", "beta", "correlation", "standard_error"],
        rows,
    }
}

fn local<M: LocalModel>(
    model: &M,
    settings: &ChshSettings,
    trials: u64,
    seed: u64,
) -> Result<ChshResult, CliError> {
    run_local_model(model, settings, trials, seed).map_err(compute)
}

fn chsh(p: &Resolved, seed: u64) -> Result<Run, CliError> {
    let settings = ChshSettings {
        a: p.real("a"),
        a_prime: p.real("a_prime"),
        b: p.real("b"),
        b_prime: p.real("b_prime"),
    };
    let trials = p.count("trials");
    let result = match p.choice("source") {
        "exact" => chsh_exact(&settings).map_err(compute)?,
        "sampled" => chsh_sampled(&settings, trials, seed).map_err(compute)?,
        "sawtooth" => local(&SawtoothModel, &settings, trials, seed)?,
        _ => local(&ConstantModel, &settings, trials, seed)?,
    };
    Ok(chsh_report(&settings, &result).into())
}

fn rpp_trials(p: &Resolved, seed: u64) -> Result<Run, CliError> {
    let config =
        InterferometerConfig::balanced(p.real("alpha"), p.real("beta")).map_err(compute)?;
    let trials = p.count("trials");
    let exact = joint_distribution(&config);
    let (empirical, records) = bell::run_rpp_trials(&config, trials, seed).map_err(compute)?;
    let rows = DetectorOutcome::ALL
        .iter()
        .map(|&o| {
            let count = records.iter().filter(|r| r.outcome == o).count();
            vec![
                o.as_str().into(),
                Cell::Int(count as i64),
                empirical.get(o).into(),
                exact.get(o).into(),
            ]
        })
        .collect();
    let a_pairs = records
        .iter()
        .filter(|r| r.chosen_path == bell::LinkedPaths::AAPrime)
        .count();
    let report = Report {
        summary: vec![
            ("trials", Cell::Int(trials as i64)),
            ("aa_pairs", Cell::Int(a_pairs as i64)),
            ("correlation", empirical.expectation().into()),
        ],
        columns: vec!["outcome", "count", "frequency", "probability"],
        rows,
    };
    match p.path("log") {
        None => Ok(report.into()),
        Some(path) => {
            let mut contents = Vec::new();
            write_trial_log(&records, &mut contents).map_err(compute)?;
            Ok(Run {
                report,
                side_file: Some(SideFile {
                    param: "log",
                    path: path.to_string(),
                    contents,
                }),
            })
        }
    }
}

fn spin_classify(p: &Resolved) -> Result<Run, CliError> {
    let file = p
        .path("path")
        .ok_or_else(|| CliError::Usage("parameter `path` is required".into()))?;
    let path = read_path_file(Path::new(file), p.real("tolerance")).map_err(compute)?;
    let class = classify_homotopy(&path).map_err(compute)?;
    Ok(Report {
        summary: vec![("class", class.as_str().into())],
        columns: vec!["samples", "class"],
        rows: vec![vec![
            Cell::Int(path.samples().len() as i64),
            class.as_str().into(),
        ]],
    }
    .into())
}

fn spin_pair(p: &Resolved) -> Result<Run, CliError> {
    let params = ring_params(p);
    let n_max = pair_n_max(p)?;
    let r = spin_pair_diagnostic(
        AnglePoint::new(p.real("theta")),
        AnglePoint::new(p.real("alpha")),
        AnglePoint::new(p.real("beta")),
        &params,
        n_max,
    )
    .map_err(compute)?;
    let mut row = vec![
        r.theta.into(),
        r.alpha.into(),
        r.beta.into(),
        Cell::Int(r.classes.into()),
    ];
    row.extend(eq10_cells(&r.ring));
    row.push(r.singlet.into());
    let mut columns = vec!["theta", "alpha", "beta", "classes"];
    columns.extend(eq10_columns());
    columns.push("singlet");
    Ok(Report {
        summary: Vec::new(),
        columns,
        rows: vec![row],
    }
    .into())
}

fn correlation_scan(p: &Resolved, seed: u64) -> Result<Run, CliError> {
    let alpha = p.real("alpha");
    let betas: Vec<f64> = p.grid("delta").iter().map(|d| alpha - d).collect();
    let trials = p.count("trials");
    let rows = match p.choice("source") {
        "exact" => {
            scan_correlation::<SawtoothModel>(ScanSource::Exact, alpha, &betas, trials, seed)
        }
        "sawtooth" => scan_correlation(
            ScanSource::Model(&SawtoothModel),
            alpha,
            &betas,
            trials,
            seed,
        ),
        _ => scan_correlation(
            ScanSource::Model(&ConstantModel),
            alpha,
            &betas,
            trials,
            seed,
        ),
    }
    .map_err(compute)?;
    let rows = rows
        .iter()
        .zip(&betas)
        .map(|(row, &beta)| {
            vec![
                row.delta.into(),
                beta.into(),
                row.correlation.into(),
                row.standard_error.map_or(Cell::Missing, Cell::Real),
                row.delta.cos().into(),
            ]
        })
        .collect();
    Ok(Report {
        summary: Vec::new(),
        columns: vec!["delta", "beta", "correlation", "standard_error", "quantum"],
        rows,
    }
    .into())
}
