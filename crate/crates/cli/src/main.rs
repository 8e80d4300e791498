//! Command line front end: parse function/space/experiment specs, run one
//! operation, and write the report artifacts (JSON and plot-ready CSV).
//!
//! Specs are JSON, inline or via @path.  Exit codes: 0 success (divergent
//! and inconclusive verdicts are results, not failures), 2 invalid spec,
//! 3 tolerance not met, 4 violated hypothesis or degenerate input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use disclab::{
    corollary1_construction, corollary2_experiment, jensen_check, locate_zeros, space_norm,
    superpose, theorem1_witness, theorem2_probe, theorem4_check, zero_stats, DiscFunction,
    EntireFunction, EntireSpec, Error, FunctionSpec, GrowthModel, MembershipOutcome, ProbeReport,
    Result, SpaceSpec, Weight, ZeroList,
};

#[derive(Parser)]
#[command(name = "disclab", version, about = "Numerical laboratory for analytic function spaces on the unit disc")]
struct Cli {
    #[command(flatten)]
    run: RunOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunOpts {
    /// Numerical tolerance for quadrature and scans.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for randomized sample families.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: machine parallelism; 1 for byte reproducibility).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Artifact format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    fn json(self) -> bool {
        self != Format::Csv
    }
    fn csv(self) -> bool {
        self != Format::Json
    }
}

#[derive(Subcommand)]
enum Command {
    /// Norm or membership verdict of a function in a space.
    Norm {
        /// Space spec, e.g. '{"kind":"bergman","p":2,"alpha":0}'.
        #[arg(long)]
        space: String,
        /// Function spec, e.g. '{"kind":"taylor","coeffs":[[0,0],[1,0]]}'.
        #[arg(long = "fn")]
        function: String,
    },
    /// Locate zeros inside |z| <= rmax, tabulate statistics and growth fits.
    Zeros {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, default_value_t = 0.9)]
        rmax: f64,
    },
    /// Residual of the Jensen identity at radius r.
    Jensen {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, default_value_t = 0.75)]
        r: f64,
    },
    /// Order and type of an entire function from its coefficients.
    Order {
        /// Entire spec, e.g. '{"kind":"cossqrt"}'.
        #[arg(long)]
        entire: String,
        #[arg(long, default_value_t = 256)]
        nmax: usize,
    },
    /// Evaluate the weighted superposition w * phi(f) on a radial grid.
    Superpose {
        #[arg(long)]
        entire: String,
        #[arg(long)]
        w: String,
        #[arg(long = "fn")]
        function: String,
        /// Deepest grid level; radii are 1 - 2^-j for j up to this.
        #[arg(long, default_value_t = 12)]
        levels: u32,
    },
    /// Run a named experiment and write its probe report.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
}

#[derive(Subcommand)]
enum Experiment {
    /// Bloch-image divergence witness for the exponential symbol.
    Theorem1 {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        c: f64,
        #[arg(long, default_value_t = 12)]
        jmax: u32,
    },
    /// Boundedness probe with explicit proof constants.
    Theorem2 {
        #[arg(long)]
        entire: String,
        /// Operator weight w (a function spec).
        #[arg(long)]
        w: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        /// Bloch norm cap for the sample family.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 20)]
        family: usize,
    },
    /// Pointwise derivative-symbol bound check.
    Theorem4 {
        #[arg(long)]
        entire: String,
        /// Weight spec, e.g. '{"kind":"power","gamma":1}'.
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 10)]
        family: usize,
        /// Also check the weighted-derivative variant.
        #[arg(long)]
        deriv: bool,
    },
    /// Lacunary construction of a weighted-sup function with non-Blaschke zeros.
    Corollary1 {
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long, default_value_t = std::f64::consts::E)]
        c: f64,
    },
    /// Log-weight companion: membership constants plus the divergence witness.
    Corollary2 {
        #[arg(long, default_value_t = 12)]
        jmax: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.run.threads {
        // A failure here means a pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli.run, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(opts: &RunOpts, command: Command) -> Result<()> {
    if !(opts.tol > 1e-14 && opts.tol < 1e-2) {
        return Err(Error::InvalidSpec(format!(
            "tol must lie in (1e-14, 1e-2), got {}",
            opts.tol
        )));
    }
    fs::create_dir_all(&opts.out)
        .map_err(|e| Error::InvalidSpec(format!("cannot create {}: {e}", opts.out.display())))?;
    match command {
        Command::Norm { space, function } => cmd_norm(opts, &space, &function),
        Command::Zeros { function, rmax } => cmd_zeros(opts, &function, rmax),
        Command::Jensen { function, r } => cmd_jensen(opts, &function, r),
        Command::Order { entire, nmax } => cmd_order(opts, &entire, nmax),
        Command::Superpose { entire, w, function, levels } => {
            cmd_superpose(opts, &entire, &w, &function, levels)
        }
        Command::Experiment { which } => cmd_experiment(opts, which),
    }
}

fn spec_text(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Error::InvalidSpec(format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn parse_spec<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T> {
    let text = spec_text(arg)?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidSpec(format!("{what} spec: {e}")))
}

fn parse_function(arg: &str) -> Result<(Value, DiscFunction)> {
    let spec: FunctionSpec = parse_spec(arg, "function")?;
    let f = spec.build()?;
    Ok((serde_json::to_value(&spec).expect("spec serializes"), f))
}

fn parse_entire(arg: &str) -> Result<(Value, EntireFunction)> {
    let spec: EntireSpec = parse_spec(arg, "entire function")?;
    let phi = spec.build()?;
    Ok((serde_json::to_value(&spec).expect("spec serializes"), phi))
}

fn parse_weight(arg: &str) -> Result<Weight> {
    let w: Weight = parse_spec(arg, "weight")?;
    w.validate()?;
    Ok(w)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::write(dir.join(name), text)
        .map_err(|e| Error::InvalidSpec(format!("cannot write {name}: {e}")))
}

fn write_json(dir: &Path, name: &str, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidSpec(format!("cannot serialize {name}: {e}")))?;
    text.push('\n');
    write_text(dir, name, &text)
}

fn fmt_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_from_rows(rows: &[Value], columns: &[&str]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = columns.iter().map(|c| fmt_cell(&row[*c])).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn rows_of_kind<'a>(report: &'a ProbeReport, kind: &str) -> Vec<Value> {
    report
        .samples
        .iter()
        .filter(|s| s["kind"] == kind)
        .cloned()
        .collect()
}

fn cmd_norm(opts: &RunOpts, space: &str, function: &str) -> Result<()> {
    let space: SpaceSpec = parse_spec(space, "space")?;
    space.validate()?;
    let (fn_spec, f) = parse_function(function)?;
    let verdict = space_norm(&f, &space, opts.tol)?;
    let summary = json!({
        "command": "norm",
        "space": space,
        "function": fn_spec,
        "verdict": verdict,
    });
    if opts.format.json() {
        write_json(&opts.out, "norm.json", &summary)?;
    }
    if opts.format.csv() {
        match &verdict.outcome {
            MembershipOutcome::Finite { value, error_estimate } => {
                write_text(
                    &opts.out,
                    "norm.csv",
                    &format!("value,error_estimate\n{value},{error_estimate}\n"),
                )?;
            }
            MembershipOutcome::Divergent { witness, .. }
            | MembershipOutcome::Inconclusive { witness } => {
                let mut text = String::from("level,radius,value\n");
                for s in witness {
                    text.push_str(&format!("{},{},{}\n", s.level, s.radius, s.value));
                }
                write_text(&opts.out, "norm_witness.csv", &text)?;
            }
        }
    }
    match &verdict.outcome {
        MembershipOutcome::Finite { value, error_estimate } => {
            println!("norm: finite value={value} error={error_estimate}");
        }
        MembershipOutcome::Divergent { growth_ratio, .. } => {
            println!("norm: divergent growth_ratio={growth_ratio}");
        }
        MembershipOutcome::Inconclusive { .. } => println!("norm: inconclusive"),
    }
    Ok(())
}

fn fit_or_null(zl: &ZeroList, model: GrowthModel) -> Value {
    match zero_stats(zl, model) {
        Ok(stats) => json!({
            "exponent": stats.fitted_exponent,
            "residual_band": stats.fitted_band,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn cmd_zeros(opts: &RunOpts, function: &str, rmax: f64) -> Result<()> {
    let (fn_spec, f) = parse_function(function)?;
    let zl = locate_zeros(&f, rmax, opts.tol)?;
    let summary = json!({
        "command": "zeros",
        "function": fn_spec,
        "rmax": rmax,
        "total": zl.total_count(),
        "entries": zl.entries.len(),
        "complete": zl.complete,
        "provenance": zl.provenance,
        "fits": {
            "power": fit_or_null(&zl, GrowthModel::Power),
            "sqrtlog": fit_or_null(&zl, GrowthModel::SqrtLog),
        },
    });
    if opts.format.json() {
        write_json(&opts.out, "zeros.json", &summary)?;
    }
    if opts.format.csv() {
        write_text(&opts.out, "zeros.csv", &zl.to_csv()?)?;
        if let Ok(stats) = zero_stats(&zl, GrowthModel::Power) {
            write_text(&opts.out, "zero_stats.csv", &stats.to_csv())?;
        }
    }
    println!("zeros: total={} complete={}", zl.total_count(), zl.complete);
    Ok(())
}

fn cmd_jensen(opts: &RunOpts, function: &str, r: f64) -> Result<()> {
    let (fn_spec, f) = parse_function(function)?;
    let residual = jensen_check(&f, r, opts.tol)?;
    let summary = json!({
        "command": "jensen",
        "function": fn_spec,
        "r": r,
        "residual": residual,
    });
    if opts.format.json() {
        write_json(&opts.out, "jensen.json", &summary)?;
    }
    println!("jensen: residual={residual}");
    Ok(())
}

fn cmd_order(opts: &RunOpts, entire: &str, nmax: usize) -> Result<()> {
    let (spec, phi) = parse_entire(entire)?;
    let order = phi.order_estimate(nmax)?;
    let type_ = phi.type_estimate(order, nmax)?;
    let summary = json!({
        "command": "order",
        "entire": spec,
        "nmax": nmax,
        "order": order,
        "type": type_,
    });
    if opts.format.json() {
        write_json(&opts.out, "order.json", &summary)?;
    }
    println!("order: order={order} type={type_}");
    Ok(())
}

const SUPERPOSE_ANGLES: u32 = 16;

fn cmd_superpose(opts: &RunOpts, entire: &str, w: &str, function: &str, levels: u32) -> Result<()> {
    if levels > 40 {
        return Err(Error::InvalidSpec(format!("levels must be at most 40, got {levels}")));
    }
    let (phi_spec, phi) = parse_entire(entire)?;
    let (w_spec, wf) = parse_function(w)?;
    let (fn_spec, f) = parse_function(function)?;
    let s = superpose(&phi, &wf, &f);
    let mut rows = Vec::new();
    let mut max_abs: f64 = 0.0;
    let mut overflowed = 0u32;
    for j in 0..=levels {
        let r = 1.0 - 0.5f64.powi(j as i32);
        for k in 0..SUPERPOSE_ANGLES {
            let t = std::f64::consts::TAU * k as f64 / SUPERPOSE_ANGLES as f64;
            let z = Complex64::from_polar(r, t);
            match s.eval(z) {
                Ok(v) => {
                    max_abs = max_abs.max(v.norm());
                    rows.push(json!({
                        "level": j, "radius": r, "angle": t,
                        "re": v.re, "im": v.im, "abs": v.norm(),
                    }));
                }
                Err(Error::Overflow { .. }) => {
                    overflowed += 1;
                    rows.push(json!({
                        "level": j, "radius": r, "angle": t,
                        "re": Value::Null, "im": Value::Null, "abs": "overflow",
                    }));
                }
                Err(e) => return Err(e),
            }
        }
    }
    let summary = json!({
        "command": "superpose",
        "entire": phi_spec,
        "w": w_spec,
        "function": fn_spec,
        "levels": levels,
        "samples": rows.len(),
        "max_abs": max_abs,
        "overflowed": overflowed,
    });
    if opts.format.json() {
        write_json(&opts.out, "superpose.json", &summary)?;
    }
    if opts.format.csv() {
        let text = csv_from_rows(&rows, &["level", "radius", "angle", "re", "im", "abs"]);
        write_text(&opts.out, "superpose.csv", &text)?;
    }
    println!("superpose: samples={} max_abs={max_abs} overflowed={overflowed}", rows.len());
    Ok(())
}

fn write_report(opts: &RunOpts, name: &str, report: &ProbeReport) -> Result<()> {
    if opts.format.json() {
        let value = serde_json::to_value(report).expect("report serializes");
        write_json(&opts.out, &format!("{name}_report.json"), &value)?;
    }
    Ok(())
}

fn cmd_experiment(opts: &RunOpts, which: Experiment) -> Result<()> {
    match which {
        Experiment::Theorem1 { p, alpha, c, jmax } => {
            let report = theorem1_witness(p, alpha, c, jmax, opts.tol)?;
            write_report(opts, "theorem1", &report)?;
            if opts.format.csv() {
                let sup = rows_of_kind(&report, "seminorm");
                write_text(
                    &opts.out,
                    "theorem1_sup.csv",
                    &csv_from_rows(&sup, &["level", "radius", "sup", "running_sup", "closed_form"]),
                )?;
                let zeros = rows_of_kind(&report, "zero_inheritance");
                write_text(
                    &opts.out,
                    "theorem1_zeros.csv",
                    &csv_from_rows(
                        &zeros,
                        &["root_re", "root_im", "located_re", "located_im", "distance", "residual"],
                    ),
                )?;
            }
            println!("experiment theorem1: verdict={}", report.verdict);
        }
        Experiment::Theorem2 { entire, w, p, alpha, beta, k, family } => {
            let (_, phi) = parse_entire(&entire)?;
            let (_, wf) = parse_function(&w)?;
            let report = theorem2_probe(&phi, &wf, p, alpha, beta, k, family, opts.seed, opts.tol)?;
            write_report(opts, "theorem2", &report)?;
            if opts.format.csv() {
                write_text(
                    &opts.out,
                    "theorem2_samples.csv",
                    &csv_from_rows(
                        &report.samples,
                        &["index", "kind", "bloch_norm", "image_norm", "image_norm_p", "pass"],
                    ),
                )?;
            }
            println!("experiment theorem2: verdict={}", report.verdict);
        }
        Experiment::Theorem4 { entire, weight, family, deriv } => {
            let (_, phi) = parse_entire(&entire)?;
            let v = parse_weight(&weight)?;
            let report = theorem4_check(&phi, &v, family, opts.seed, deriv, opts.tol)?;
            write_report(opts, "theorem4", &report)?;
            if opts.format.csv() {
                let mut columns = vec!["index", "sup_norm", "worst_lhs", "bound", "pass"];
                if deriv {
                    columns.extend(["worst_lhs_deriv", "bound_deriv", "weighted_derivative_norm"]);
                }
                write_text(
                    &opts.out,
                    "theorem4_samples.csv",
                    &csv_from_rows(&report.samples, &columns),
                )?;
            }
            println!("experiment theorem4: verdict={}", report.verdict);
        }
        Experiment::Corollary1 { weight, depth, c } => {
            let v = parse_weight(&weight)?;
            let (_, zl, report) = corollary1_construction(&v, depth, c, opts.tol)?;
            write_report(opts, "corollary1", &report)?;
            if opts.format.json() {
                let value = serde_json::to_value(&zl).expect("zero list serializes");
                write_json(&opts.out, "corollary1_zeros.json", &value)?;
            }
            if opts.format.csv() {
                let cert = rows_of_kind(&report, "certificate");
                write_text(
                    &opts.out,
                    "corollary1_certificate.csv",
                    &csv_from_rows(
                        &cert,
                        &["level", "radius", "weighted_value", "bound", "log_psi", "active", "pass"],
                    ),
                )?;
                let factors = rows_of_kind(&report, "factor");
                write_text(
                    &opts.out,
                    "corollary1_factors.csv",
                    &csv_from_rows(
                        &factors,
                        &["k", "n", "modulus", "blaschke_contribution", "blaschke_partial_sum"],
                    ),
                )?;
            }
            println!("experiment corollary1: verdict={}", report.verdict);
        }
        Experiment::Corollary2 { jmax } => {
            let report = corollary2_experiment(jmax, opts.tol)?;
            write_report(opts, "corollary2", &report)?;
            if opts.format.csv() {
                let sup = rows_of_kind(&report, "seminorm");
                write_text(
                    &opts.out,
                    "corollary2_sup.csv",
                    &csv_from_rows(&sup, &["level", "radius", "sup", "running_sup"]),
                )?;
            }
            println!("experiment corollary2: verdict={}", report.verdict);
        }
    }
    Ok(())
}
