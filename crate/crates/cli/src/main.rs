//! `qlra-kit`: command-line front end for the quantum-like representation
//! toolkit.
//!
//! Exit status: 0 on success, 1 when the data is infeasible (the report is
//! still written), 2 on usage, I/O or schema errors.

mod text;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qlra_core::engine::{born_verify_with, run_qlra, unitarity_defect, AmplitudeModel, FeasibilityReport, Mode, QlraOptions};
use qlra_core::interference::{
    boundedness_check, ftp_with_interference, interference_coefficients, lambda_normalization_residual,
    sorkin_residual, InterferenceTable,
};
use qlra_core::oracle::{
    ansatz_family, generate, mub_instance, uniform_example, AnsatzParams, MubParams, QuantumInstance,
};
use qlra_core::phase_solver::{solve_all, PhaseSolution};
use qlra_core::prob_model::{check_double_stochastic, validate, ProbabilityData, ValidationOutcome};
use qlra_core::slit::{simulate, SlitExperimentPlan};
use qlra_core::json;

#[derive(Parser, Debug)]
#[command(name = "qlra-kit", version, about = "Quantum-like representation of trichotomous probability data")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Numerical tolerance for every check.
    #[arg(long, default_value_t = 1e-9, global = true, value_parser = positive)]
    tol: f64,

    /// Output path; `-` is standard output.
    #[arg(short, long, default_value = "-", global = true)]
    output: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check normalization and range constraints of a probability document.
    Validate {
        /// Input document; `-` is standard input.
        input: PathBuf,
        /// Also require the rows of `cond` to sum to one.
        #[arg(long)]
        double_stochastic: bool,
    },
    /// Print the interference coefficients.
    Lambdas { input: PathBuf },
    /// Print Sorkin residuals, total probabilities and coefficient normalization.
    Sorkin { input: PathBuf },
    /// Solve for the sub-amplitude phases.
    Solve {
        input: PathBuf,
        #[command(flatten)]
        gauge: GaugeArg,
        /// Emit every branch instead of the first one.
        #[arg(long)]
        all_branches: bool,
    },
    /// Run the full reconstruction and print the report and amplitude models.
    Qlra {
        input: PathBuf,
        #[command(flatten)]
        gauge: GaugeArg,
        /// Reproduce only the b-observable.
        #[arg(long)]
        single_observable: bool,
    },
    /// Generate exact probability data from a quantum instance.
    Forward(ForwardArgs),
    /// Sample the measurement contexts of a triple-slit experiment.
    Simulate(SimulateArgs),
    /// Reconstruct the amplitudes of the uniform example with μ = ±1/√2.
    Example1,
}

#[derive(Args, Debug)]
struct GaugeArg {
    /// Phase anchors of the three rows, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, default_value = "0,0,0")]
    gauge: Vec<f64>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").args(["mub", "instance", "ansatz"])))]
struct ForwardArgs {
    /// Seed of the random instance (used when no other source is given).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Equal-weight state `(1, e^{iγ₁}, e^{iγ₂})/√3` against the unbiased basis.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, value_name = "G1,G2")]
    mub: Option<Vec<f64>>,
    /// Instance document `{"psi": {re, im}, "u": {re, im}}`.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Closed-form family with ratios x, y and `λ_13 = v`.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, value_name = "X,Y,V")]
    ansatz: Option<Vec<f64>>,
    /// Root sign in the `λ_12` formula of the ansatz family.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true, requires = "ansatz")]
    sign_12: i8,
    /// Fix the `λ_23` branch sign of the ansatz family.
    #[arg(long, allow_hyphen_values = true, requires = "ansatz")]
    sign_23: Option<i8>,
    /// Also write the generating instance to this path.
    #[arg(long, conflicts_with = "ansatz")]
    emit_instance: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").args(["mub", "random", "instance"]).required(true)))]
struct SimulateArgs {
    #[arg(long)]
    seed: u64,
    /// Detections per context.
    #[arg(long)]
    samples: u64,
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true, value_name = "G1,G2")]
    mub: Option<Vec<f64>>,
    /// Random instance drawn from the seed.
    #[arg(long)]
    random: bool,
    #[arg(long)]
    instance: Option<PathBuf>,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("tolerance must be positive, got {v}"))
    }
}

/// Failure that maps to exit status 2.
#[derive(Debug)]
struct Fatal(String);

impl From<qlra_core::Error> for Fatal {
    fn from(e: qlra_core::Error) -> Self {
        Fatal(e.to_string())
    }
}

type Outcome = Result<bool, Fatal>;

fn read_input(path: &Path) -> Result<String, Fatal> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Fatal(format!("reading standard input: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Fatal(format!("reading {}: {e}", path.display())))
    }
}

fn load_data(path: &Path) -> Result<ProbabilityData, Fatal> {
    Ok(ProbabilityData::load(&read_input(path)?)?)
}

fn load_instance(path: &Path) -> Result<QuantumInstance, Fatal> {
    Ok(QuantumInstance::load(&read_input(path)?)?)
}

fn write_to(path: &Path, content: &str) -> Result<(), Fatal> {
    if path == Path::new("-") {
        let mut out = io::stdout().lock();
        out.write_all(content.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| Fatal(format!("writing standard output: {e}")))
    } else {
        fs::write(path, content).map_err(|e| Fatal(format!("writing {}: {e}", path.display())))
    }
}

struct Ctx {
    format: Format,
    tol: f64,
    output: PathBuf,
}

impl Ctx {
    fn emit<T: Serialize>(&self, doc: &T, text: impl FnOnce() -> String) -> Result<(), Fatal> {
        let mut s = match self.format {
            Format::Json => json::to_string(doc),
            Format::Text => text(),
        };
        if !s.ends_with('\n') {
            s.push('\n');
        }
        write_to(&self.output, &s)
    }
}

fn gauge(arg: &GaugeArg) -> Result<[f64; 3], Fatal> {
    <[f64; 3]>::try_from(arg.gauge.as_slice())
        .map_err(|_| Fatal(format!("--gauge needs three angles, got {}", arg.gauge.len())))
}

fn pair_of(values: &[f64], flag: &str) -> Result<[f64; 2], Fatal> {
    <[f64; 2]>::try_from(values).map_err(|_| Fatal(format!("{flag} needs two values, got {}", values.len())))
}

#[derive(Serialize)]
struct SorkinDoc {
    residuals: [f64; 3],
    total_probability: [Option<f64>; 3],
    lambda_normalization: std::collections::BTreeMap<String, f64>,
    passed: bool,
}

#[derive(Serialize)]
struct LambdaDoc<'a> {
    #[serde(flatten)]
    table: &'a InterferenceTable,
    bounded: ValidationOutcome,
}

#[derive(Serialize)]
struct QlraDoc<'a> {
    report: &'a FeasibilityReport,
    feasible: bool,
    models: &'a [AmplitudeModel],
}

#[derive(Serialize)]
struct ExampleModel<'a> {
    #[serde(flatten)]
    model: &'a AmplitudeModel,
    psi_norm_sqr: [f64; 3],
    unitarity_defect: f64,
}

#[derive(Serialize)]
struct ExampleCase<'a> {
    mu: f64,
    lambda: &'a InterferenceTable,
    models: Vec<ExampleModel<'a>>,
    two_observable_feasible: bool,
}

#[derive(Serialize)]
struct ExampleDoc<'a> {
    cases: Vec<ExampleCase<'a>>,
    psi_matches_p_b: bool,
}

fn cmd_validate(ctx: &Ctx, input: &Path, double_stochastic: bool) -> Outcome {
    let data = load_data(input)?;
    let mut outcome = validate(&data, ctx.tol);
    if double_stochastic {
        outcome = outcome.merge(check_double_stochastic(&data, ctx.tol));
    }
    ctx.emit(&outcome, || text::validation(&outcome))?;
    Ok(outcome.passed())
}

fn cmd_lambdas(ctx: &Ctx, input: &Path) -> Outcome {
    let data = load_data(input)?;
    let table = interference_coefficients(&data);
    let bounded = boundedness_check(&table, ctx.tol);
    let ok = bounded.passed();
    let doc = LambdaDoc {
        table: &table,
        bounded,
    };
    ctx.emit(&doc, || text::lambdas(&table, &doc.bounded))?;
    Ok(ok)
}

fn cmd_sorkin(ctx: &Ctx, input: &Path) -> Outcome {
    let data = load_data(input)?;
    let table = interference_coefficients(&data);
    let residuals = sorkin_residual(&data);
    let doc = SorkinDoc {
        residuals,
        total_probability: std::array::from_fn(|l| ftp_with_interference(&data, &table, l).ok()),
        lambda_normalization: lambda_normalization_residual(&data, &table)
            .into_iter()
            .map(|(p, r)| (p.key().to_string(), r))
            .collect(),
        passed: residuals.iter().all(|r| r.abs() <= ctx.tol),
    };
    ctx.emit(&doc, || {
        text::sorkin(&doc.residuals, &doc.total_probability, &doc.lambda_normalization, doc.passed)
    })?;
    Ok(doc.passed)
}

fn cmd_solve(ctx: &Ctx, input: &Path, g: [f64; 3], all: bool) -> Outcome {
    let data = load_data(input)?;
    let table = interference_coefficients(&data);
    match solve_all(&table, g, ctx.tol) {
        Ok(mut sols) => {
            if !all {
                sols.truncate(1);
            }
            ctx.emit(&sols, || text::solutions(&sols))?;
            Ok(true)
        }
        Err(e @ (qlra_core::Error::InconsistentRow { .. } | qlra_core::Error::LambdaOutOfRange { .. })) => {
            eprintln!("qlra-kit: {e}");
            let empty: Vec<PhaseSolution> = Vec::new();
            ctx.emit(&empty, || text::solutions(&empty))?;
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_qlra(ctx: &Ctx, input: &Path, g: [f64; 3], single: bool) -> Outcome {
    let data = load_data(input)?;
    let opts = QlraOptions {
        tol: ctx.tol,
        mode: if single { Mode::SingleObservable } else { Mode::TwoObservable },
        gauge: g,
    };
    let (report, models) = run_qlra(&data, &opts);
    let feasible = report.feasible();
    for d in &report.diagnostics {
        eprintln!("qlra-kit: {d}");
    }
    let doc = QlraDoc {
        report: &report,
        feasible,
        models: &models,
    };
    ctx.emit(&doc, || text::qlra(&report, &models))?;
    Ok(feasible)
}

fn cmd_forward(ctx: &Ctx, args: &ForwardArgs) -> Outcome {
    let data = if let Some(v) = &args.ansatz {
        let [x, y, v] = <[f64; 3]>::try_from(v.as_slice())
            .map_err(|_| Fatal(format!("--ansatz needs three values, got {}", v.len())))?;
        let params = AnsatzParams {
            x,
            y,
            v,
            sign_12: args.sign_12,
            sign_23: args.sign_23,
        };
        ansatz_family(&params)?.1
    } else {
        let instance = if let Some(g) = &args.mub {
            let [gamma1, gamma2] = pair_of(g, "--mub")?;
            mub_instance(MubParams { gamma1, gamma2 })
        } else if let Some(path) = &args.instance {
            load_instance(path)?
        } else {
            QuantumInstance::from_seed(args.seed)
        };
        if let Some(path) = &args.emit_instance {
            write_to(path, &(instance.save() + "\n"))?;
        }
        generate(&instance)?
    };
    ctx.emit(&data, || text::data(&data))?;
    Ok(true)
}

fn cmd_simulate(ctx: &Ctx, args: &SimulateArgs) -> Outcome {
    let instance = if let Some(g) = &args.mub {
        let [gamma1, gamma2] = pair_of(g, "--mub")?;
        mub_instance(MubParams { gamma1, gamma2 })
    } else if let Some(path) = &args.instance {
        load_instance(path)?
    } else {
        QuantumInstance::from_seed(args.seed)
    };
    let plan = SlitExperimentPlan {
        instance,
        samples_per_context: args.samples,
        seed: args.seed,
    };
    let freq = simulate(&plan)?;
    ctx.emit(&freq, || text::data(&freq.frequencies))?;
    Ok(true)
}

fn cmd_example1(ctx: &Ctx) -> Outcome {
    let mu = std::f64::consts::FRAC_1_SQRT_2;
    let opts = QlraOptions {
        tol: ctx.tol,
        mode: Mode::SingleObservable,
        gauge: [0.0; 3],
    };
    let mut prepared = Vec::new();
    for m in [mu, -mu] {
        let (table, data) = uniform_example(m)?;
        let (_, models) = run_qlra(&data, &opts);
        let (two, _) = run_qlra(&data, &QlraOptions::with_tol(ctx.tol));
        prepared.push((m, table, data, models, two.feasible()));
    }
    let mut all_ok = true;
    let cases: Vec<ExampleCase> = prepared
        .iter()
        .map(|(m, table, data, models, two)| {
            all_ok &= !models.is_empty()
                && models
                    .iter()
                    .all(|model| born_verify_with(model, data, ctx.tol, Mode::SingleObservable).passed());
            ExampleCase {
                mu: *m,
                lambda: table,
                models: models
                    .iter()
                    .map(|model| ExampleModel {
                        model,
                        psi_norm_sqr: model.psi.map(|z| z.norm_sqr()),
                        unitarity_defect: unitarity_defect(model),
                    })
                    .collect(),
                two_observable_feasible: *two,
            }
        })
        .collect();
    let doc = ExampleDoc {
        cases,
        psi_matches_p_b: all_ok,
    };
    ctx.emit(&doc, || text::example(&prepared.iter().map(|p| (p.0, p.3.as_slice(), p.4)).collect::<Vec<_>>()))?;
    Ok(all_ok)
}

fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx {
        format: cli.format,
        tol: cli.tol,
        output: cli.output.clone(),
    };
    match &cli.command {
        Command::Validate {
            input,
            double_stochastic,
        } => cmd_validate(&ctx, input, *double_stochastic),
        Command::Lambdas { input } => cmd_lambdas(&ctx, input),
        Command::Sorkin { input } => cmd_sorkin(&ctx, input),
        Command::Solve {
            input,
            gauge: g,
            all_branches,
        } => cmd_solve(&ctx, input, gauge(g)?, *all_branches),
        Command::Qlra {
            input,
            gauge: g,
            single_observable,
        } => cmd_qlra(&ctx, input, gauge(g)?, *single_observable),
        Command::Forward(args) => cmd_forward(&ctx, args),
        Command::Simulate(args) => cmd_simulate(&ctx, args),
        Command::Example1 => cmd_example1(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fatal(msg)) => {
            eprintln!("qlra-kit: {msg}");
            ExitCode::from(2)
        }
    }
}
