//! The `gridopt` command line.
//!
//! ```text
//! gridopt <subcommand> --case <file>... [--slack <bus>] [--formulation angle|ptdf]
//!         [--obj-scale <k>] [--fd-check <eps>] [--out <path>] [--format json|csv] [--jobs <n>]
//! ```
//!
//! Exit codes: 0 ok, 1 infeasible or unbounded, 2 input error, 3 numerical error.
//! With several `--case` files, `--out` names a directory and the worst exit
//! code wins.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::acval::{self, ValidationReport};
use crate::dcopf::{self, DispatchResult, Formulation, Report, SolveOptions, Status};
use crate::dense::{fmt_sig6, Matrix};
use crate::dispatch::{self, MeritOrderResult};
use crate::error::Error;
use crate::matrices::{build_b_bus, build_b_line, build_ptdf, build_x_bus, build_y_bus, SlackChoice};
use crate::netmodel::{parse_case, validate_network, BusId, Network, Severity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "gridopt", version, about = "DC optimal power flow, LMPs, PTDFs and AC checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit B_bus, B_line, X_bus and Y_bus.
    Matrices(RunArgs),
    /// Emit the PTDF matrix.
    Ptdf(RunArgs),
    /// Copperplate economic dispatch.
    Ed {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Method::Merit)]
        method: Method,
    },
    /// DC optimal power flow with LMPs.
    Dcopf(RunArgs),
    /// AC evaluation of a dispatch at its voltage angles.
    Validate {
        #[command(flatten)]
        run: RunArgs,
        /// Dispatch report (JSON, angle formulation). Solved from the case when omitted.
        #[arg(long)]
        dispatch: Option<PathBuf>,
    },
    /// Merit-order supply curve as `cum_capacity_mw,price`.
    Curve(RunArgs),
    /// Samples of (δ, sin δ) over [−π/2, π/2].
    Sine {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Case file (JSON). Repeat to process several cases.
    #[arg(long = "case", required = true)]
    cases: Vec<PathBuf>,
    /// Slack bus id, overriding the case.
    #[arg(long)]
    slack: Option<u32>,
    #[arg(long, value_enum, default_value_t = FormulationArg::Angle)]
    formulation: FormulationArg,
    /// Factor applied to costs inside the solver only.
    #[arg(long = "obj-scale", default_value_t = 1.0)]
    obj_scale: f64,
    /// Check each LMP by re-solving with demand raised by this many p.u.
    #[arg(long = "fd-check")]
    fd_check: Option<f64>,
    /// Output file; a directory when several cases are given.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Cases processed concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormulationArg {
    Angle,
    Ptdf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Merit,
    Lp,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Task {
    Matrices,
    Ptdf,
    Ed(Method),
    Dcopf,
    Validate,
    Curve,
}

impl Task {
    fn default_format(self) -> Format {
        match self {
            Task::Matrices | Task::Ptdf | Task::Curve => Format::Csv,
            Task::Ed(_) | Task::Dcopf | Task::Validate => Format::Json,
        }
    }
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Singular { .. } | Error::Numerical(_) | Error::UnbalancedInjections(_) => EXIT_NUMERICAL,
            Error::InsufficientCapacity { .. } => EXIT_INFEASIBLE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// A rendered report and the exit code it carries.
struct Output {
    /// `(file suffix, contents)`; more than one only for `matrices` written to a directory.
    parts: Vec<(String, String)>,
    code: i32,
}

impl Output {
    fn single(text: String, code: i32) -> Self {
        Output {
            parts: vec![(String::new(), text)],
            code,
        }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (run, task, dispatch) = match cli.command {
        Command::Sine { out } => return emit_one(out.as_deref(), &acval::sine_samples_csv()),
        Command::Matrices(r) => (r, Task::Matrices, None),
        Command::Ptdf(r) => (r, Task::Ptdf, None),
        Command::Ed { run, method } => (run, Task::Ed(method), None),
        Command::Dcopf(r) => (r, Task::Dcopf, None),
        Command::Validate { run, dispatch } => (run, Task::Validate, dispatch),
        Command::Curve(r) => (r, Task::Curve, None),
    };
    if !(run.obj_scale.is_finite() && run.obj_scale > 0.0) {
        eprintln!("error: --obj-scale must be positive");
        return EXIT_INPUT;
    }
    if run.jobs == 0 {
        eprintln!("error: --jobs must be at least 1");
        return EXIT_INPUT;
    }
    if run.cases.len() > 1 && dispatch.is_some() {
        eprintln!("error: --dispatch takes a single --case");
        return EXIT_INPUT;
    }
    let format = run.format.unwrap_or(task.default_format());

    let results = process_all(&run, task, format, dispatch.as_deref());
    let multi = run.cases.len() > 1;
    let mut worst = EXIT_OK;
    for (case, res) in run.cases.iter().zip(results) {
        let code = match res {
            Ok(out) => {
                let written = write_output(&run, case, multi, format, &out);
                match written {
                    Ok(()) => out.code,
                    Err(f) => report_failure(case, f),
                }
            }
            Err(f) => report_failure(case, f),
        };
        worst = worst.max(code);
    }
    worst
}

fn report_failure(case: &Path, f: Failure) -> i32 {
    eprintln!("error: {}: {}", case.display(), f.message);
    f.code
}

fn process_all(run: &RunArgs, task: Task, format: Format, dispatch: Option<&Path>) -> Vec<Result<Output, Failure>> {
    let jobs = run.jobs.min(run.cases.len()).max(1);
    if jobs == 1 {
        return run.cases.iter().map(|c| process_case(run, task, format, c, dispatch)).collect();
    }
    let mut slots: Vec<Option<Result<Output, Failure>>> = (0..run.cases.len()).map(|_| None).collect();
    let chunk = run.cases.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        for (cases, out) in run.cases.chunks(chunk).zip(slots.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (c, slot) in cases.iter().zip(out.iter_mut()) {
                    *slot = Some(process_case(run, task, format, c, dispatch));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("every case processed")).collect()
}

fn load_case(path: &Path) -> Result<Network, Failure> {
    let text = fs::read_to_string(path).map_err(|e| input_error(format!("cannot read case: {e}")))?;
    let net = parse_case(&text)?;
    if let Some(d) = validate_network(&net).into_iter().find(|d| d.severity == Severity::Error) {
        return Err(input_error(d.message));
    }
    Ok(net)
}

fn options(run: &RunArgs) -> SolveOptions {
    SolveOptions {
        slack: run.slack.map(BusId),
        obj_scale: run.obj_scale,
    }
}

fn slack_choice(net: &Network, run: &RunArgs) -> Result<SlackChoice, Failure> {
    Ok(match run.slack {
        Some(b) => SlackChoice::new(net, BusId(b))?,
        None => SlackChoice::from_case(net)?,
    })
}

fn status_code(s: Status) -> i32 {
    match s {
        Status::Optimal => EXIT_OK,
        Status::Infeasible | Status::Unbounded => EXIT_INFEASIBLE,
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn process_case(run: &RunArgs, task: Task, format: Format, case: &Path, dispatch: Option<&Path>) -> Result<Output, Failure> {
    let net = load_case(case)?;
    let pu = net.per_unit();
    match task {
        Task::Matrices => matrices_output(&pu, run, format),
        Task::Ptdf => {
            let slack = slack_choice(&pu, run)?;
            let p = build_ptdf(&pu, slack)?;
            let text = match format {
                Format::Csv => p.matrix.to_csv(),
                Format::Json => to_json(&MatrixDoc {
                    version: crate::VERSION,
                    slack: slack.bus,
                    rows: pu.line_keys(),
                    cols: bus_labels(&pu),
                    values: rows_of(&p.matrix),
                }),
            };
            Ok(Output::single(text, EXIT_OK))
        }
        Task::Ed(Method::Merit) => {
            let m = dispatch::merit_order(&net, None)?;
            Ok(Output::single(merit_output(&net, &m, format), EXIT_OK))
        }
        Task::Ed(Method::Lp) => {
            let r = dispatch::economic_dispatch_lp_with(&net, &options(run))?;
            dispatch_output(&net, &r, run, format)
        }
        Task::Dcopf => {
            let formulation = match run.formulation {
                FormulationArg::Angle => Formulation::Angle,
                FormulationArg::Ptdf => Formulation::Ptdf,
            };
            let r = dcopf::resolve(&net, formulation, &options(run))?;
            dispatch_output(&net, &r, run, format)
        }
        Task::Validate => {
            let theta = match dispatch {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| input_error(format!("cannot read dispatch: {e}")))?;
                    let report: Report =
                        serde_json::from_str(&text).map_err(|e| input_error(format!("bad dispatch report: {e}")))?;
                    report.theta_rad.ok_or(Error::MissingAngles)?
                }
                None => {
                    let r = dcopf::solve_dcopf_angle_with(&net, &options(run))?;
                    if !r.is_optimal() {
                        return Err(Failure {
                            code: EXIT_INFEASIBLE,
                            message: format!("dispatch is {:?}", r.status).to_lowercase(),
                        });
                    }
                    r.theta.expect("angle formulation has angles")
                }
            };
            let rep = acval::validate_angles(&net, &theta)?;
            Ok(Output::single(validation_output(&rep, format), EXIT_OK))
        }
        Task::Curve => {
            let pts = dispatch::supply_curve(&net);
            let text = match format {
                Format::Csv => dispatch::curve_csv(&pts),
                Format::Json => to_json(&CurveDoc {
                    version: crate::VERSION,
                    points: pts.iter().map(|&(q, p)| [q, p]).collect(),
                }),
            };
            Ok(Output::single(text, EXIT_OK))
        }
    }
}

#[derive(Serialize)]
struct MatrixDoc {
    version: &'static str,
    slack: BusId,
    rows: Vec<String>,
    cols: Vec<String>,
    values: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct MatricesDoc {
    version: &'static str,
    slack: BusId,
    buses: Vec<String>,
    lines: Vec<String>,
    b_bus: Vec<Vec<f64>>,
    b_line: Vec<Vec<f64>>,
    x_bus: Vec<Vec<f64>>,
    y_bus_re: Vec<Vec<f64>>,
    y_bus_im: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct CurveDoc {
    version: &'static str,
    points: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct MeritDoc {
    version: &'static str,
    method: &'static str,
    demand_mw: f64,
    order: Vec<usize>,
    breakpoints_mw: Vec<f64>,
    dispatch: Vec<dcopf::GenReport>,
    smp: f64,
    marginal_gen: Option<usize>,
    total_cost_per_h: f64,
    breakpoint_degenerate: bool,
}

fn bus_labels(net: &Network) -> Vec<String> {
    net.bus_ids().iter().map(|b| b.to_string()).collect()
}

fn rows_of(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn matrices_output(net: &Network, run: &RunArgs, format: Format) -> Result<Output, Failure> {
    let slack = slack_choice(net, run)?;
    let b_bus = build_b_bus(net);
    let b_line = build_b_line(net);
    let x_bus = build_x_bus(&b_bus, slack)?;
    let y_bus = build_y_bus(net);
    let buses = bus_labels(net);
    let y_re = y_bus.map(|z| z.re).with_labels(buses.clone(), buses.clone())?;
    let y_im = y_bus.map(|z| z.im).with_labels(buses.clone(), buses.clone())?;
    let parts = match format {
        Format::Json => vec![(
            String::new(),
            to_json(&MatricesDoc {
                version: crate::VERSION,
                slack: slack.bus,
                buses,
                lines: net.line_keys(),
                b_bus: rows_of(&b_bus),
                b_line: rows_of(&b_line),
                x_bus: rows_of(&x_bus),
                y_bus_re: rows_of(&y_re),
                y_bus_im: rows_of(&y_im),
            }),
        )],
        Format::Csv => vec![
            ("b_bus".into(), b_bus.to_csv()),
            ("b_line".into(), b_line.to_csv()),
            ("x_bus".into(), x_bus.to_csv()),
            ("y_bus_re".into(), y_re.to_csv()),
            ("y_bus_im".into(), y_im.to_csv()),
        ],
    };
    Ok(Output { parts, code: EXIT_OK })
}

fn gen_reports(net: &Network, p_mw: &[f64]) -> Vec<dcopf::GenReport> {
    net.generators
        .iter()
        .zip(p_mw)
        .enumerate()
        .map(|(k, (g, &p))| dcopf::GenReport {
            gen: k + 1,
            bus: g.bus,
            p_mw: p,
        })
        .collect()
}

fn merit_output(net: &Network, m: &MeritOrderResult, format: Format) -> String {
    match format {
        Format::Json => to_json(&MeritDoc {
            version: crate::VERSION,
            method: "merit",
            demand_mw: m.demand_mw,
            order: m.order.iter().map(|g| g + 1).collect(),
            breakpoints_mw: m.breakpoints.clone(),
            dispatch: gen_reports(net, &m.dispatch),
            smp: m.smp,
            marginal_gen: m.marginal_gen.map(|g| g + 1),
            total_cost_per_h: m.total_cost,
            breakpoint_degenerate: m.breakpoint_degenerate,
        }),
        Format::Csv => {
            let mut s = String::from("item,id,value\n");
            for (k, p) in m.dispatch.iter().enumerate() {
                let _ = writeln!(s, "p_mw,{},{}", k + 1, fmt_sig6(*p));
            }
            let _ = writeln!(s, "smp,,{}", fmt_sig6(m.smp));
            let _ = writeln!(s, "objective_per_h,,{}", fmt_sig6(m.total_cost));
            s
        }
    }
}

fn dispatch_output(net: &Network, r: &DispatchResult, run: &RunArgs, format: Format) -> Result<Output, Failure> {
    let mut report = r.report();
    let code = status_code(r.status);
    if let Some(eps) = run.fd_check {
        if r.is_optimal() {
            let checks = dcopf::verify_lmp_fd(net, r, eps)?;
            if checks.iter().any(|c| !c.pass) {
                report.warnings.push("fd_check: some prices disagree with the finite difference".into());
            }
            report.fd_check = Some(checks);
        } else if eps <= 0.0 {
            return Err(input_error("eps must be positive"));
        }
    }
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut s = String::from("item,id,value\n");
            let _ = writeln!(s, "status,,{}", serde_json::to_value(report.status).expect("status").as_str().unwrap_or(""));
            let _ = writeln!(s, "slack,,{}", report.slack);
            if let Some(obj) = report.objective_per_h {
                let _ = writeln!(s, "objective_per_h,,{}", fmt_sig6(obj));
            }
            for g in &report.dispatch {
                let _ = writeln!(s, "p_mw,{},{}", g.gen, fmt_sig6(g.p_mw));
            }
            for f in &report.flows {
                let _ = writeln!(s, "flow_mw,{},{}", f.line, fmt_sig6(f.p_mw));
            }
            for l in &report.lmp {
                let _ = writeln!(s, "lmp,{},{}", l.bus, fmt_sig6(l.price));
            }
            if let Some(theta) = &report.theta_rad {
                for (b, t) in r.buses.iter().zip(theta) {
                    let _ = writeln!(s, "theta_rad,{},{}", b, fmt_sig6(*t));
                }
            }
            s
        }
    };
    Ok(Output::single(text, code))
}

fn validation_output(rep: &ValidationReport, format: Format) -> String {
    match format {
        Format::Json => to_json(rep),
        Format::Csv => {
            let mut s = String::from("line,angle_diff_rad,dc_pu,sine_pu,gap_pu,apparent_pu,limit_pu,hidden_overload\n");
            for l in &rep.lines {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    l.line,
                    fmt_sig6(l.angle_diff_rad),
                    fmt_sig6(l.dc_pu),
                    fmt_sig6(l.sine_pu),
                    fmt_sig6(l.gap_pu),
                    fmt_sig6(l.apparent_pu),
                    l.limit_pu.map(fmt_sig6).unwrap_or_default(),
                    l.hidden_overload
                );
            }
            s
        }
    }
}

fn emit_one(out: Option<&Path>, text: &str) -> i32 {
    match out {
        None => {
            print!("{text}");
            EXIT_OK
        }
        Some(p) => match fs::write(p, text) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", p.display());
                EXIT_INPUT
            }
        },
    }
}

fn write_output(run: &RunArgs, case: &Path, multi: bool, format: Format, out: &Output) -> Result<(), Failure> {
    let io = |p: &Path, e: std::io::Error| input_error(format!("cannot write {}: {e}", p.display()));
    let split = out.parts.len() > 1;
    let Some(target) = &run.out else {
        let mut s = String::new();
        for (name, text) in &out.parts {
            if split {
                let _ = writeln!(s, "# {name}");
            }
            s.push_str(text);
        }
        print!("{s}");
        return Ok(());
    };
    // Several cases or several parts: `--out` is a directory.
    if multi || split {
        fs::create_dir_all(target).map_err(|e| io(target, e))?;
        let stem = case.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "case".into());
        for (name, text) in &out.parts {
            let file = match (multi, name.is_empty()) {
                (true, true) => format!("{stem}.{}", format.ext()),
                (true, false) => format!("{stem}_{name}.{}", format.ext()),
                (false, _) => format!("{name}.{}", format.ext()),
            };
            let p = target.join(file);
            fs::write(&p, text).map_err(|e| io(&p, e))?;
        }
        return Ok(());
    }
    fs::write(target, &out.parts[0].1).map_err(|e| io(target, e))
}
