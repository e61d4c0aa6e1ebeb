//! Command-line frontend for the discord marker.
//!
//! Five subcommands: `gaussian` evaluates Q for standard-form covariance
//! parameters, `family` covers the built-in state families (squeezed
//! thermal, photon-number mixture, Gaussian–vacuum mixture, photon-added
//! squeezed thermal), `reduce` brings a covariance-matrix JSON file to
//! standard form, `scan` maps the photon-added family over an (n, r)
//! grid, and `verify` runs the library's cross-evaluator check suite.
//!
//! Output is deterministic: json and csv print floats with 17 significant
//! digits and rows in a fixed order, so identical invocations produce
//! identical bytes. Exit codes: 0 success, 1 failed verification,
//! 2 invalid input, 3 scan finished with failed cells.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use discordq::cv::{standard_form_reduce, validate_covariance};
use discordq::fock::{fock_photon_number_mixed, fock_q, fock_squeezed_thermal, FockState};
use discordq::marker::{
    q_gaussian_closed, q_general, q_mixture_closed, q_photon_added_n0, q_photon_mixed_closed,
    scan_photon_added, ScanRow,
};
use discordq::verify::{run_all, CheckReport, VerifyConfig};
use discordq::wigner::{
    make_gaussian_vacuum_mixture, make_photon_added_squeezed_thermal, make_photon_number_mixed,
    make_squeezed_thermal, normalization, purity, squeezed_thermal_params, wigner_of_gaussian,
    WignerState,
};
use discordq::{CovarianceMatrix, DiscordVerdict, GaussianParams, QReport};

/// Detects nonzero quantum discord of two-mode continuous-variable states
/// through the phase-space marker Q.
#[derive(Parser)]
#[command(name = "discordq", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Q for a Gaussian state with standard-form parameters (a, b, c1, c2).
    Gaussian(GaussianCmd),
    /// Q for a built-in state family.
    Family(FamilyCmd),
    /// Q for a custom state given as a phase-space polynomial JSON file.
    Wigner(WignerCmd),
    /// Reduce a covariance-matrix JSON file to standard form.
    Reduce(ReduceCmd),
    /// Q of the photon-added squeezed thermal family over an (n, r) grid.
    Scan(ScanCmd),
    /// Run the cross-evaluator verification suite.
    Verify(VerifyCmd),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Closed formula for the family, where one exists.
    Closed,
    /// Exact integration of the state's phase-space polynomial form.
    General,
    /// Independent number-basis oracle at finite truncation.
    Fock,
    /// Every method the family supports, with pairwise |Δq|.
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    /// Decision threshold separating the zero verdict from nonzero.
    #[arg(long, default_value_t = 1e-9)]
    threshold: f64,

    /// Output format.
    #[arg(long, value_enum, default_value = "human")]
    output: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct GaussianCmd {
    /// Variance of the first mode (vacuum is 1/4).
    #[arg(long)]
    a: f64,

    /// Variance of the second mode.
    #[arg(long)]
    b: f64,

    /// x1–x2 correlation.
    #[arg(long)]
    c1: f64,

    /// p1–p2 correlation.
    #[arg(long)]
    c2: f64,

    /// Evaluation method.
    #[arg(long, value_enum, default_value = "closed")]
    method: MethodArg,

    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct FamilyCmd {
    #[command(subcommand)]
    family: FamilyKind,
}

#[derive(Subcommand)]
enum FamilyKind {
    /// Two-mode squeezed thermal state with symmetric thermal occupation.
    SqueezedThermal(SqueezedThermalArgs),
    /// k·|00⟩⟨00| + (1−k)·|+1⟩⟨+1| with |+⟩ = (|0⟩+|1⟩)/√2.
    PhotonMixed(PhotonMixedArgs),
    /// k·(squeezed thermal) + (1−k)·|00⟩⟨00|.
    GaussianVacuumMix(MixArgs),
    /// Squeezed thermal state with a photon added to the second mode.
    PhotonAdded(PhotonAddedArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SqueezedThermalArgs {
    /// Mean thermal photon number of each mode.
    #[arg(long)]
    n: f64,

    /// Two-mode squeezing parameter.
    #[arg(long)]
    r: f64,

    /// Evaluation method.
    #[arg(long, value_enum, default_value = "general")]
    method: MethodArg,

    /// Per-mode truncation dimension of the number-basis oracle.
    #[arg(long, default_value_t = 16)]
    fock_dim: usize,

    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct PhotonMixedArgs {
    /// Weight of the |00⟩⟨00| component, in [0, 1].
    #[arg(long)]
    k: f64,

    /// Evaluation method.
    #[arg(long, value_enum, default_value = "general")]
    method: MethodArg,

    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct MixArgs {
    /// Weight of the Gaussian component, in [0, 1].
    #[arg(long)]
    k: f64,

    /// Mean thermal photon number of the Gaussian component.
    #[arg(long)]
    n: f64,

    /// Squeezing parameter of the Gaussian component.
    #[arg(long)]
    r: f64,

    /// Evaluation method (the number-basis oracle is not available here).
    #[arg(long, value_enum, default_value = "general")]
    method: MethodArg,

    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct PhotonAddedArgs {
    /// Mean thermal photon number (the closed form needs n = 0).
    #[arg(long)]
    n: f64,

    /// Squeezing parameter.
    #[arg(long)]
    r: f64,

    /// Evaluation method (the number-basis oracle is not available here).
    #[arg(long, value_enum, default_value = "general")]
    method: MethodArg,

    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct WignerCmd {
    /// State JSON file: {"components":[{"poly":[{"exp":[...],"re":...,"im":...}],
    /// "quad":[[...]],"lin":[...],"logconst":...}]}. Evaluated with the
    /// general integrator.
    #[arg(value_name = "STATE_JSON")]
    file: PathBuf,

    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct ReduceCmd {
    /// Covariance-matrix JSON file: {"V": [[... 4×4 ...]]}.
    #[arg(value_name = "COV_JSON")]
    file: PathBuf,

    /// Output format.
    #[arg(long, value_enum, default_value = "human")]
    output: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanCmd {
    /// Family to scan; only photon-added is supported.
    #[arg(long, default_value = "photon-added")]
    family: String,

    /// Thermal-occupation grid as start:stop:count, endpoints included.
    #[arg(long, default_value = "0:1:11")]
    n: String,

    /// Squeezing grid as start:stop:count, endpoints included.
    #[arg(long, default_value = "0:1:11")]
    r: String,

    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    output: Format,

    /// Write the table to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyCmd {
    /// Per-mode truncation dimension for the number-basis oracle checks.
    #[arg(long, default_value_t = 16)]
    fock_dim: usize,

    /// Decision threshold used by the zero-discord checks.
    #[arg(long, default_value_t = 1e-9)]
    threshold: f64,

    /// Output format (csv is not available for verify).
    #[arg(long, value_enum, default_value = "human")]
    output: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code().clamp(0, 255) as u8;
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Cmd::Gaussian(args) => cmd_gaussian(args),
        Cmd::Family(args) => cmd_family(args),
        Cmd::Wigner(args) => cmd_wigner(args),
        Cmd::Reduce(args) => cmd_reduce(args),
        Cmd::Scan(args) => cmd_scan(args),
        Cmd::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// One evaluated marker value, normalized across closed formulas (no term
/// breakdown) and full reports.
struct Row {
    method: &'static str,
    q: f64,
    term1: Option<f64>,
    term2: Option<f64>,
    tuple_count: Option<usize>,
    imag_residue: Option<f64>,
    fock_dims: Option<(usize, usize)>,
    truncation_deficit: Option<f64>,
    verdict: DiscordVerdict,
}

impl Row {
    fn from_report(report: &QReport, threshold: f64) -> Self {
        Self {
            method: report.method.as_str(),
            q: report.q,
            term1: Some(report.term1),
            term2: Some(report.term2),
            tuple_count: report.meta.tuple_count,
            imag_residue: report.meta.imag_residue,
            fock_dims: report.meta.fock_dims,
            truncation_deficit: report.meta.truncation_deficit,
            verdict: DiscordVerdict::from_q(report.q, threshold),
        }
    }

    fn from_scalar(q: f64, threshold: f64) -> Self {
        Self {
            method: "closed-form",
            q,
            term1: None,
            term2: None,
            tuple_count: None,
            imag_residue: None,
            fock_dims: None,
            truncation_deficit: None,
            verdict: DiscordVerdict::from_q(q, threshold),
        }
    }
}

fn check_threshold(threshold: f64) -> Result<(), String> {
    if !threshold.is_finite() || threshold <= 0.0 {
        return Err(format!("threshold must be positive and finite, got {threshold}"));
    }
    Ok(())
}

fn check_fock_dim(dim: usize) -> Result<(), String> {
    if dim < 4 {
        return Err(format!("fock-dim must be at least 4, got {dim}"));
    }
    Ok(())
}

fn general_row(state: &WignerState, threshold: f64) -> Result<Row, String> {
    Ok(Row::from_report(
        &q_general(state).map_err(|e| e.to_string())?,
        threshold,
    ))
}

fn fock_state_row(state: &FockState, threshold: f64) -> Result<Row, String> {
    Ok(Row::from_report(
        &fock_q(state).map_err(|e| e.to_string())?,
        threshold,
    ))
}

fn closed_gaussian_row(params: &GaussianParams, threshold: f64) -> Result<Row, String> {
    Ok(Row::from_report(
        &q_gaussian_closed(params).map_err(|e| e.to_string())?,
        threshold,
    ))
}

fn cmd_gaussian(args: GaussianCmd) -> Result<u8, String> {
    check_threshold(args.common.threshold)?;
    let params =
        GaussianParams::new(args.a, args.b, args.c1, args.c2).map_err(|e| e.to_string())?;
    let verdict = validate_covariance(&params.covariance());
    if !verdict.is_valid() {
        return Err(format!("unphysical covariance matrix: {}", verdict.summary()));
    }
    let th = args.common.threshold;
    let rows = match args.method {
        MethodArg::Closed => vec![closed_gaussian_row(&params, th)?],
        MethodArg::General => {
            let w = wigner_of_gaussian(&params.covariance()).map_err(|e| e.to_string())?;
            vec![general_row(&w, th)?]
        }
        MethodArg::Fock => {
            return Err(
                "the number-basis oracle needs a state construction; for raw standard-form \
                 parameters use closed or general"
                    .into(),
            )
        }
        MethodArg::All => {
            let w = wigner_of_gaussian(&params.covariance()).map_err(|e| e.to_string())?;
            vec![closed_gaussian_row(&params, th)?, general_row(&w, th)?]
        }
    };
    render_and_emit(&rows, &args.common)
}

fn cmd_family(args: FamilyCmd) -> Result<u8, String> {
    match args.family {
        FamilyKind::SqueezedThermal(a) => {
            check_threshold(a.common.threshold)?;
            check_fock_dim(a.fock_dim)?;
            let th = a.common.threshold;
            let params = squeezed_thermal_params(a.n, a.r).map_err(|e| e.to_string())?;
            let rows = match a.method {
                MethodArg::Closed => vec![closed_gaussian_row(&params, th)?],
                MethodArg::General => {
                    let w = make_squeezed_thermal(a.n, a.r).map_err(|e| e.to_string())?;
                    vec![general_row(&w, th)?]
                }
                MethodArg::Fock => {
                    let s = fock_squeezed_thermal(a.n, a.r, a.fock_dim)
                        .map_err(|e| e.to_string())?;
                    vec![fock_state_row(&s, th)?]
                }
                MethodArg::All => {
                    let w = make_squeezed_thermal(a.n, a.r).map_err(|e| e.to_string())?;
                    let s = fock_squeezed_thermal(a.n, a.r, a.fock_dim)
                        .map_err(|e| e.to_string())?;
                    vec![
                        closed_gaussian_row(&params, th)?,
                        general_row(&w, th)?,
                        fock_state_row(&s, th)?,
                    ]
                }
            };
            render_and_emit(&rows, &a.common)
        }
        FamilyKind::PhotonMixed(a) => {
            check_threshold(a.common.threshold)?;
            let th = a.common.threshold;
            let rows = match a.method {
                MethodArg::Closed => vec![Row::from_scalar(
                    q_photon_mixed_closed(a.k).map_err(|e| e.to_string())?,
                    th,
                )],
                MethodArg::General => {
                    let w = make_photon_number_mixed(a.k).map_err(|e| e.to_string())?;
                    vec![general_row(&w, th)?]
                }
                MethodArg::Fock => {
                    let s = fock_photon_number_mixed(a.k).map_err(|e| e.to_string())?;
                    vec![fock_state_row(&s, th)?]
                }
                MethodArg::All => {
                    let w = make_photon_number_mixed(a.k).map_err(|e| e.to_string())?;
                    let s = fock_photon_number_mixed(a.k).map_err(|e| e.to_string())?;
                    vec![
                        Row::from_scalar(q_photon_mixed_closed(a.k).map_err(|e| e.to_string())?, th),
                        general_row(&w, th)?,
                        fock_state_row(&s, th)?,
                    ]
                }
            };
            render_and_emit(&rows, &a.common)
        }
        FamilyKind::GaussianVacuumMix(a) => {
            check_threshold(a.common.threshold)?;
            let th = a.common.threshold;
            let params = squeezed_thermal_params(a.n, a.r).map_err(|e| e.to_string())?;
            let rows = match a.method {
                MethodArg::Closed => vec![Row::from_scalar(
                    q_mixture_closed(a.k, &params).map_err(|e| e.to_string())?,
                    th,
                )],
                MethodArg::General => {
                    let w =
                        make_gaussian_vacuum_mixture(a.k, &params).map_err(|e| e.to_string())?;
                    vec![general_row(&w, th)?]
                }
                MethodArg::Fock => {
                    return Err(
                        "the number-basis oracle does not cover the gaussian-vacuum-mix \
                         family; use closed or general"
                            .into(),
                    )
                }
                MethodArg::All => {
                    let w =
                        make_gaussian_vacuum_mixture(a.k, &params).map_err(|e| e.to_string())?;
                    vec![
                        Row::from_scalar(
                            q_mixture_closed(a.k, &params).map_err(|e| e.to_string())?,
                            th,
                        ),
                        general_row(&w, th)?,
                    ]
                }
            };
            render_and_emit(&rows, &a.common)
        }
        FamilyKind::PhotonAdded(a) => {
            check_threshold(a.common.threshold)?;
            if !a.r.is_finite() {
                return Err(format!("squeezing parameter must be finite, got {}", a.r));
            }
            let th = a.common.threshold;
            let rows = match a.method {
                MethodArg::Closed => {
                    if a.n != 0.0 {
                        return Err(
                            "the photon-added closed form is available only at n = 0; \
                             use general"
                                .into(),
                        );
                    }
                    vec![Row::from_scalar(q_photon_added_n0(a.r), th)]
                }
                MethodArg::General => {
                    let w = make_photon_added_squeezed_thermal(a.n, a.r)
                        .map_err(|e| e.to_string())?;
                    vec![general_row(&w, th)?]
                }
                MethodArg::Fock => {
                    return Err(
                        "the number-basis oracle does not cover the photon-added family; \
                         use general"
                            .into(),
                    )
                }
                MethodArg::All => {
                    let mut rows = Vec::new();
                    if a.n == 0.0 {
                        rows.push(Row::from_scalar(q_photon_added_n0(a.r), th));
                    }
                    let w = make_photon_added_squeezed_thermal(a.n, a.r)
                        .map_err(|e| e.to_string())?;
                    rows.push(general_row(&w, th)?);
                    rows
                }
            };
            render_and_emit(&rows, &a.common)
        }
    }
}

fn cmd_wigner(args: WignerCmd) -> Result<u8, String> {
    check_threshold(args.common.threshold)?;
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| format!("cannot read {}: {e}", args.file.display()))?;
    let state = WignerState::from_json(&text).map_err(|e| e.to_string())?;
    let norm = normalization(&state).map_err(|e| e.to_string())?;
    if (norm - 1.0).abs() > 1e-6 {
        return Err(format!("state integrates to {norm:.9e}, expected 1"));
    }
    let pur = purity(&state).map_err(|e| e.to_string())?;
    if pur > 1.0 + 1e-6 {
        return Err(format!("purity {pur:.9e} exceeds 1; not a physical state"));
    }
    let rows = vec![general_row(&state, args.common.threshold)?];
    render_and_emit(&rows, &args.common)
}

fn cmd_reduce(args: ReduceCmd) -> Result<u8, String> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| format!("cannot read {}: {e}", args.file.display()))?;
    let cov = CovarianceMatrix::from_json(&text).map_err(|e| e.to_string())?;
    let verdict = validate_covariance(&cov);
    if !verdict.is_valid() {
        return Err(format!("unphysical covariance matrix: {}", verdict.summary()));
    }
    let params = standard_form_reduce(&cov).map_err(|e| e.to_string())?;
    let payload = match args.output {
        Format::Human => {
            let mut out = String::new();
            kv(&mut out, "a", &f6(params.a));
            kv(&mut out, "b", &f6(params.b));
            kv(&mut out, "c1", &f6(params.c1));
            kv(&mut out, "c2", &f6(params.c2));
            kv(&mut out, "physical", "yes");
            out
        }
        Format::Json => format!(
            "{{\"a\":{},\"b\":{},\"c1\":{},\"c2\":{},\"physical\":true}}\n",
            f17(params.a),
            f17(params.b),
            f17(params.c1),
            f17(params.c2),
        ),
        Format::Csv => format!(
            "a,b,c1,c2,physical\n{},{},{},{},true\n",
            f17(params.a),
            f17(params.b),
            f17(params.c1),
            f17(params.c2),
        ),
    };
    emit(&payload, args.out.as_deref())?;
    Ok(0)
}

fn cmd_scan(args: ScanCmd) -> Result<u8, String> {
    if args.family != "photon-added" {
        return Err(format!(
            "scan supports only the photon-added family, got '{}'",
            args.family
        ));
    }
    let n_grid = parse_grid(&args.n)?;
    let r_grid = parse_grid(&args.r)?;
    let rows = scan_photon_added(&n_grid, &r_grid);
    let payload = match args.output {
        Format::Human => scan_human(&rows),
        Format::Json => scan_json(&rows),
        Format::Csv => scan_csv(&rows),
    };
    emit(&payload, args.out.as_deref())?;
    Ok(if rows.iter().all(|r| r.status == "ok") { 0 } else { 3 })
}

fn cmd_verify(args: VerifyCmd) -> Result<u8, String> {
    check_threshold(args.threshold)?;
    check_fock_dim(args.fock_dim)?;
    if args.output == Format::Csv {
        return Err("csv output is not supported for verify; use human or json".into());
    }
    let reports = run_all(&VerifyConfig {
        fock_dim: args.fock_dim,
        threshold: args.threshold,
    });
    let payload = match args.output {
        Format::Human => verify_human(&reports),
        Format::Json => verify_json(&reports),
        Format::Csv => unreachable!(),
    };
    emit(&payload, args.out.as_deref())?;
    Ok(verify_exit_code(&reports))
}

fn verify_exit_code(reports: &[CheckReport]) -> u8 {
    if reports.iter().all(|r| r.passed) {
        0
    } else {
        1
    }
}

fn render_and_emit(rows: &[Row], common: &CommonOpts) -> Result<u8, String> {
    let payload = match common.output {
        Format::Human => rows_human(rows),
        Format::Json => rows_json(rows),
        Format::Csv => rows_csv(rows),
    };
    emit(&payload, common.out.as_deref())?;
    Ok(0)
}

fn emit(payload: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        None => {
            print!("{payload}");
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, payload)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    }
}

/// 17 significant digits: enough for exact f64 round-trips, so json/csv
/// output is byte-stable and loses nothing.
fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// 6 significant digits for human-facing tables.
fn f6(x: f64) -> String {
    format!("{x:.5e}")
}

fn kv(out: &mut String, label: &str, value: &str) {
    out.push_str(&format!("{label:<16}{value}\n"));
}

fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn pair_deltas(rows: &[Row]) -> Vec<(&'static str, &'static str, f64)> {
    let mut out = Vec::new();
    for (i, first) in rows.iter().enumerate() {
        for second in &rows[i + 1..] {
            out.push((first.method, second.method, (first.q - second.q).abs()));
        }
    }
    out
}

fn rows_human(rows: &[Row]) -> String {
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        kv(&mut out, "method", row.method);
        kv(&mut out, "q", &f6(row.q));
        if let Some(t) = row.term1 {
            kv(&mut out, "term1", &f6(t));
        }
        if let Some(t) = row.term2 {
            kv(&mut out, "term2", &f6(t));
        }
        if let Some(c) = row.tuple_count {
            kv(&mut out, "tuples", &c.to_string());
        }
        if let Some(x) = row.imag_residue {
            kv(&mut out, "imag residue", &f6(x));
        }
        if let Some((da, db)) = row.fock_dims {
            kv(&mut out, "fock dims", &format!("{da}x{db}"));
        }
        if let Some(x) = row.truncation_deficit {
            kv(&mut out, "trace deficit", &f6(x));
        }
        kv(
            &mut out,
            "verdict",
            &format!(
                "{} (threshold {})",
                row.verdict.verdict.as_str(),
                f6(row.verdict.threshold)
            ),
        );
    }
    let deltas = pair_deltas(rows);
    if !deltas.is_empty() {
        out.push('\n');
        for (a, b, d) in deltas {
            out.push_str(&format!("|q({a}) - q({b})| = {}\n", f6(d)));
        }
    }
    out
}

fn rows_json(rows: &[Row]) -> String {
    let mut out = String::from("{\"reports\":[");
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{{\"method\":{}", json_str(row.method)));
        out.push_str(&format!(",\"q\":{}", f17(row.q)));
        if let Some(t) = row.term1 {
            out.push_str(&format!(",\"term1\":{}", f17(t)));
        }
        if let Some(t) = row.term2 {
            out.push_str(&format!(",\"term2\":{}", f17(t)));
        }
        if let Some(c) = row.tuple_count {
            out.push_str(&format!(",\"tuple_count\":{c}"));
        }
        if let Some(x) = row.imag_residue {
            out.push_str(&format!(",\"imag_residue\":{}", f17(x)));
        }
        if let Some((da, db)) = row.fock_dims {
            out.push_str(&format!(",\"fock_dims\":[{da},{db}]"));
        }
        if let Some(x) = row.truncation_deficit {
            out.push_str(&format!(",\"truncation_deficit\":{}", f17(x)));
        }
        out.push_str(&format!(",\"verdict\":{}", json_str(row.verdict.verdict.as_str())));
        out.push_str(&format!(",\"threshold\":{}}}", f17(row.verdict.threshold)));
    }
    out.push_str("],\"deltas\":[");
    for (i, (a, b, d)) in pair_deltas(rows).iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"first\":{},\"second\":{},\"abs_delta\":{}}}",
            json_str(a),
            json_str(b),
            f17(*d)
        ));
    }
    out.push_str("]}\n");
    out
}

fn rows_csv(rows: &[Row]) -> String {
    let mut out = String::from("method,q,term1,term2,verdict,threshold\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.method,
            f17(row.q),
            row.term1.map(f17).unwrap_or_default(),
            row.term2.map(f17).unwrap_or_default(),
            row.verdict.verdict.as_str(),
            f17(row.verdict.threshold),
        ));
    }
    out
}

fn scan_human(rows: &[ScanRow]) -> String {
    let mut out = format!("{:<16}{:<16}{:<16}{}\n", "n", "r", "log10_q", "status");
    for row in rows {
        let log = if row.status == "ok" { f6(row.log10_q) } else { "nan".to_owned() };
        out.push_str(&format!(
            "{:<16}{:<16}{:<16}{}\n",
            f6(row.n),
            f6(row.r),
            log,
            row.status
        ));
    }
    out
}

fn scan_json(rows: &[ScanRow]) -> String {
    let mut out = String::from("{\"rows\":[");
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let log = if row.status == "ok" { f17(row.log10_q) } else { "null".to_owned() };
        out.push_str(&format!(
            "{{\"n\":{},\"r\":{},\"log10_q\":{},\"status\":{}}}",
            f17(row.n),
            f17(row.r),
            log,
            json_str(&row.status)
        ));
    }
    out.push_str("]}\n");
    out
}

fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("n,r,log10_q,status\n");
    for row in rows {
        let log = if row.status == "ok" { f17(row.log10_q) } else { "nan".to_owned() };
        out.push_str(&format!(
            "{},{},{},{}\n",
            f17(row.n),
            f17(row.r),
            log,
            row.status
        ));
    }
    out
}

fn verify_human(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    let mut passed = 0;
    for r in reports {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        if r.passed {
            passed += 1;
        }
        out.push_str(&format!("[{tag}] {}. {} — {}\n", r.id, r.name, r.details));
    }
    out.push_str(&format!("{passed}/{} checks passed\n", reports.len()));
    out
}

fn verify_json(reports: &[CheckReport]) -> String {
    let mut out = String::from("{\"checks\":[");
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"id\":{},\"name\":{},\"passed\":{},\"details\":{}}}",
            r.id,
            json_str(r.name),
            r.passed,
            json_str(&r.details)
        ));
    }
    let all = reports.iter().all(|r| r.passed);
    out.push_str(&format!("],\"passed\":{all}}}\n"));
    out
}

/// Parses "start:stop:count" into an inclusive, evenly spaced grid. The
/// last point is set to `stop` exactly so endpoint rows are reproducible.
fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid '{text}' must have the form start:stop:count"));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| format!("grid start '{}' is not a number", parts[0]))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| format!("grid stop '{}' is not a number", parts[1]))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| format!("grid count '{}' is not a positive integer", parts[2]))?;
    if !start.is_finite() || !stop.is_finite() {
        return Err(format!("grid '{text}' has a non-finite endpoint"));
    }
    match count {
        0 => Err("grid count must be at least 1".into()),
        1 => {
            if start == stop {
                Ok(vec![start])
            } else {
                Err(format!(
                    "grid '{text}' with count 1 requires start = stop"
                ))
            }
        }
        _ => {
            if stop <= start {
                return Err(format!("grid '{text}' requires stop > start"));
            }
            let step = (stop - start) / ((count - 1) as f64);
            let mut grid: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
            grid[count - 1] = stop;
            Ok(grid)
        }
    }
}
