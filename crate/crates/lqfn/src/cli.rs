//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use lqfn_core::component::{dpa, dpa_r0, dpa_static_limit, make_component};
use lqfn_core::gaussian::{araki_woods, GaussianState};
use lqfn_core::linalg::{c, max_abs_diff, CMatrix};
use lqfn_core::state_space::{realize, stability, StabilityReport};
use lqfn_core::symplectic::{shale_decompose, SymplecticMatrix};
use lqfn_core::transfer::{full_symplectic_residual, quadrature_tf, TransferFunction};
use lqfn_core::{DoubledMatrix, LinearComponent, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, EXIT_OK, EXIT_USAGE};
use crate::examples::{self, EXAMPLES};
use crate::file::{DoubledValue, KindSpec, MatrixValue, NetworkFile};
use crate::output::{complex_pair, doubled_json, fmt_complex, fmt_f64, matrix_json, to_json, DoubledJson};

#[derive(Debug, Parser)]
#[command(name = "lqfn", version, about = "Linear quantum feedback networks with squeezing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a network file and check its wiring.
    Validate {
        /// Path to a network file, or the name of a bundled example.
        file: String,
    },
    /// Zero-delay reduction of a network (delays are ignored).
    Reduce { file: String },
    /// Frequency response along s = i omega, honouring delays.
    Sweep {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        omega_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        omega_max: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Scale::Linear)]
        scale: Scale,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Network transfer function at one complex frequency.
    Tf {
        file: String,
        /// Frequency as RE,IM.
        #[arg(long = "s", allow_hyphen_values = true)]
        s: String,
    },
    /// Eigenvalues of the drift matrix and the Hurwitz verdict.
    Stability {
        #[command(flatten)]
        source: ComponentSource,
    },
    /// Shale decomposition of a scattering matrix.
    Shale {
        #[command(flatten)]
        source: ComponentSource,
        /// Doubled matrix as JSON {"minus": ..., "plus": ...}.
        #[arg(long = "s", conflicts_with_all = ["file", "kind"])]
        s: Option<String>,
    },
    /// Vacuum dilation of a Gaussian state (N, M).
    ArakiWoods {
        /// Number or JSON matrix.
        #[arg(long = "N", allow_hyphen_values = true)]
        n: String,
        /// Number or JSON matrix.
        #[arg(long = "M", allow_hyphen_values = true)]
        m: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Convergence of a dynamical component to its static limit.
    Limit {
        #[arg(long, value_enum)]
        kind: LimitKind,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 3.0)]
        kappa0: f64,
        #[arg(long, default_value_t = 1.0)]
        epsilon0: f64,
        #[arg(long, default_value_t = 10.0)]
        omega_max: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// List the bundled network files, or print one.
    Examples { name: Option<String> },
}

#[derive(Debug, clap::Args)]
pub struct ComponentSource {
    /// Network file or bundled example (its zero-delay reduction is used).
    #[arg(conflicts_with = "kind")]
    pub file: Option<String>,
    /// Component kind as in network files, e.g. dpa.
    #[arg(long)]
    pub kind: Option<String>,
    /// Component parameters as JSON, e.g. '{"kappa": 2, "epsilon": 1}'.
    #[arg(long, default_value = "{}", requires = "kind")]
    pub params: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LimitKind {
    Dpa,
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "lqfn: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: &Command) -> Result<String, CliError> {
    match cmd {
        Command::Validate { file } => cmd_validate(file),
        Command::Reduce { file } => cmd_reduce(file),
        Command::Sweep {
            file,
            omega_min,
            omega_max,
            points,
            scale,
            format,
        } => {
            let grid = frequency_grid(*omega_min, *omega_max, *points, *scale)?;
            cmd_sweep(file, &grid, *format)
        }
        Command::Tf { file, s } => cmd_tf(file, s),
        Command::Stability { source } => cmd_stability(source),
        Command::Shale { source, s } => cmd_shale(source, s.as_deref()),
        Command::ArakiWoods { n, m, tol } => cmd_araki_woods(n, m, *tol),
        Command::Limit {
            kind: LimitKind::Dpa,
            k,
            kappa0,
            epsilon0,
            omega_max,
            points,
        } => cmd_limit_dpa(*k, *kappa0, *epsilon0, *omega_max, *points),
        Command::Examples { name } => cmd_examples(name.as_deref()),
    }
}

/// Reads a file, falling back to the bundled examples by name.
pub fn load_network(arg: &str) -> Result<NetworkFile, CliError> {
    let path = Path::new(arg);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{arg}: {e}")))?
    } else if let Some(ex) = examples::find(arg) {
        ex.text.to_string()
    } else {
        return Err(CliError::Io(format!("{arg}: no such file or bundled example")));
    };
    NetworkFile::from_json(&text)
}

fn reduced(file: &NetworkFile) -> Result<LinearComponent, CliError> {
    let net = file.without_delays().to_graph()?.compile()?;
    Ok(net.reduce_zero_delay()?)
}

fn cmd_validate(arg: &str) -> Result<String, CliError> {
    let file = load_network(arg)?;
    let net = file.to_graph()?.compile()?;
    let delayed = net.edges.iter().filter(|e| e.delay.is_some_and(|t| t > 0.0)).count();
    Ok(format!(
        "ok: {} components, {} external channels, {} internal edges ({} delayed), {} modes\n",
        file.components.len(),
        net.partition.n1(),
        net.partition.n2(),
        delayed,
        net.partition.base().modes(),
    ))
}

#[derive(Serialize)]
struct ClosedFormJson {
    zeta: f64,
    gamma_minus: f64,
    gamma_plus: f64,
    hurwitz: bool,
}

#[derive(Serialize)]
struct StabilityJson {
    eigenvalues: Vec<[f64; 2]>,
    spectral_abscissa: f64,
    hurwitz: bool,
    closed_form: Option<ClosedFormJson>,
}

fn stability_json(rep: &StabilityReport) -> StabilityJson {
    StabilityJson {
        eigenvalues: rep.eigenvalues.iter().map(|z| complex_pair(*z)).collect(),
        spectral_abscissa: rep.spectral_abscissa,
        hurwitz: rep.hurwitz,
        closed_form: rep.closed_form.as_ref().map(|cf| ClosedFormJson {
            zeta: cf.zeta,
            gamma_minus: cf.gamma_minus,
            gamma_plus: cf.gamma_plus,
            hurwitz: cf.hurwitz(),
        }),
    }
}

#[derive(Serialize)]
struct ResidualsJson {
    symplectic: f64,
    /// `‖Ã + Ã♭ + C̃♭C̃‖`
    drift: f64,
    /// `‖B̃ + C̃♭D̃‖`
    input: f64,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct ReduceJson {
    channels: usize,
    modes: usize,
    mode_labels: Vec<String>,
    S0: DoubledJson,
    C0: DoubledJson,
    Omega0: DoubledJson,
    A0: DoubledJson,
    stability: StabilityJson,
    residuals: ResidualsJson,
}

fn cmd_reduce(arg: &str) -> Result<String, CliError> {
    let g = reduced(&load_network(arg)?)?;
    let ss = realize(&g);
    let drift = &(&ss.a_tilde + &ss.a_tilde.flat()) + &(&ss.c_tilde.flat() * &ss.c_tilde);
    let input = &ss.b_tilde + &(&ss.c_tilde.flat() * &ss.d_tilde);
    let omega = DoubledMatrix::from_blocks(g.omega().omega_minus().clone(), g.omega().omega_plus().clone());
    let report = ReduceJson {
        channels: g.channels(),
        modes: g.modes(),
        mode_labels: g.mode_labels().to_vec(),
        S0: doubled_json(g.s_tilde().as_doubled()),
        C0: doubled_json(g.c_tilde()),
        Omega0: doubled_json(&omega),
        A0: doubled_json(&ss.a_tilde),
        stability: stability_json(&stability(&ss)?),
        residuals: ResidualsJson {
            symplectic: g.s_tilde().residual(),
            drift: drift.max_norm(),
            input: input.max_norm(),
        },
    };
    Ok(to_json(&report))
}

/// Grid of `points` frequencies from `min` to `max` inclusive.
pub fn frequency_grid(min: f64, max: f64, points: usize, scale: Scale) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::Usage(format!("--points must be at least 2, got {points}")));
    }
    if !(min < max) || !min.is_finite() || !max.is_finite() {
        return Err(CliError::Usage(format!("need finite --omega-min < --omega-max, got {min} and {max}")));
    }
    if scale == Scale::Log && min <= 0.0 {
        return Err(CliError::Usage("log scale needs positive frequency bounds".into()));
    }
    let last = (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points)
        .map(|i| {
            let t = i as f64 / last;
            match scale {
                Scale::Linear => min + (max - min) * t,
                Scale::Log => (min.ln() + (max.ln() - min.ln()) * t).exp(),
            }
        })
        .collect();
    grid[0] = min;
    grid[points - 1] = max;
    Ok(grid)
}

#[derive(Serialize)]
struct SweepPointJson {
    omega: f64,
    value: Option<Vec<Vec<[f64; 2]>>>,
    symplectic_residual: Option<f64>,
    pole: bool,
}

#[derive(Serialize)]
struct SweepJson {
    channels: usize,
    points: Vec<SweepPointJson>,
}

fn cmd_sweep(arg: &str, grid: &[f64], format: Format) -> Result<String, CliError> {
    let net = load_network(arg)?.to_graph()?.compile()?;
    let responder = net.responder()?;
    let n = responder.channels();
    let values: Vec<(f64, Option<CMatrix>)> = grid.iter().map(|&w| (w, responder.eval(c(0.0, w)).ok())).collect();
    match format {
        Format::Csv => {
            let mut text = String::from("omega");
            for i in 0..2 * n {
                for j in 0..2 * n {
                    text.push_str(&format!(",re_{i}_{j},im_{i}_{j}"));
                }
            }
            text.push_str(",symplectic_residual,pole_flag\n");
            for (w, v) in &values {
                text.push_str(&fmt_f64(*w));
                match v {
                    Some(v) => {
                        for i in 0..2 * n {
                            for j in 0..2 * n {
                                text.push_str(&format!(",{},{}", fmt_f64(v[(i, j)].re), fmt_f64(v[(i, j)].im)));
                            }
                        }
                        text.push_str(&format!(",{},0\n", fmt_f64(full_symplectic_residual(v))));
                    }
                    None => {
                        text.push_str(&",".repeat(8 * n * n + 1));
                        text.push_str(",1\n");
                    }
                }
            }
            Ok(text)
        }
        Format::Json => {
            let points = values
                .iter()
                .map(|(w, v)| SweepPointJson {
                    omega: *w,
                    value: v.as_ref().map(matrix_json),
                    symplectic_residual: v.as_ref().map(full_symplectic_residual),
                    pole: v.is_none(),
                })
                .collect();
            Ok(to_json(&SweepJson { channels: n, points }))
        }
    }
}

fn parse_complex_arg(s: &str) -> Result<lqfn_core::Complex64, CliError> {
    let bad = || CliError::Usage(format!("--s expects RE,IM, got {s:?}"));
    let (re, im) = s.split_once(',').ok_or_else(bad)?;
    let re = re.trim().parse::<f64>().map_err(|_| bad())?;
    let im = im.trim().parse::<f64>().map_err(|_| bad())?;
    Ok(c(re, im))
}

#[derive(Serialize)]
struct TfJson {
    s: [f64; 2],
    value: Vec<Vec<[f64; 2]>>,
    symplectic_residual: f64,
}

fn cmd_tf(arg: &str, s: &str) -> Result<String, CliError> {
    let s = parse_complex_arg(s)?;
    let net = load_network(arg)?.to_graph()?.compile()?;
    let value = net.response(s)?;
    Ok(to_json(&TfJson {
        s: complex_pair(s),
        value: matrix_json(&value),
        symplectic_residual: full_symplectic_residual(&value),
    }))
}

fn source_component(src: &ComponentSource) -> Result<LinearComponent, CliError> {
    match (&src.file, &src.kind) {
        (Some(file), None) => reduced(&load_network(file)?),
        (None, Some(kind)) => {
            let spec = KindSpec::from_parts(kind, &src.params)?;
            let kind = spec.to_kind().map_err(CliError::Validation)?;
            Ok(make_component(kind)?)
        }
        _ => Err(CliError::Usage("give either a network file or --kind".into())),
    }
}

fn verdict(hurwitz: bool) -> &'static str {
    if hurwitz {
        "HURWITZ"
    } else {
        "NOT HURWITZ"
    }
}

fn cmd_stability(src: &ComponentSource) -> Result<String, CliError> {
    let g = source_component(src)?;
    let rep = stability(&realize(&g))?;
    let mut text = String::from("eigenvalues:\n");
    for z in &rep.eigenvalues {
        text.push_str(&format!("  {}\n", fmt_complex(*z)));
    }
    text.push_str(&format!("spectral_abscissa: {}\n", fmt_f64(rep.spectral_abscissa)));
    if let Some(cf) = &rep.closed_form {
        text.push_str(&format!(
            "closed_form: zeta {} gamma_minus {} gamma_plus {} {}\n",
            fmt_f64(cf.zeta),
            fmt_f64(cf.gamma_minus),
            fmt_f64(cf.gamma_plus),
            verdict(cf.hurwitz())
        ));
    }
    text.push_str(&format!("verdict: {}\n", verdict(rep.hurwitz)));
    Ok(text)
}

#[derive(Serialize)]
struct ShaleJson {
    r_diag: Vec<f64>,
    s_out: Vec<Vec<[f64; 2]>>,
    s_in: Vec<Vec<[f64; 2]>>,
    recomposition_residual: f64,
    symplectic_residual: f64,
}

fn cmd_shale(src: &ComponentSource, s: Option<&str>) -> Result<String, CliError> {
    let sym = match s {
        Some(json) => {
            let value: DoubledValue = serde_json::from_str(json).map_err(|e| CliError::parse(&e))?;
            SymplecticMatrix::new(value.to_doubled().map_err(CliError::Validation)?, DEFAULT_TOL)?
        }
        None => source_component(src)?.s_tilde().clone(),
    };
    let f = shale_decompose(&sym)?;
    Ok(to_json(&ShaleJson {
        r_diag: f.r_diag.clone(),
        s_out: matrix_json(&f.s_out),
        s_in: matrix_json(&f.s_in),
        recomposition_residual: f.recompose().max_diff(sym.as_doubled()),
        symplectic_residual: sym.residual(),
    }))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixArg {
    Scalar(f64),
    Matrix(MatrixValue),
}

fn parse_matrix_arg(flag: &str, s: &str) -> Result<CMatrix, CliError> {
    let arg: MatrixArg = serde_json::from_str(s)
        .map_err(|_| CliError::Usage(format!("{flag} expects a number or a JSON matrix, got {s:?}")))?;
    match arg {
        MatrixArg::Scalar(x) => Ok(CMatrix::from_element(1, 1, c(x, 0.0))),
        MatrixArg::Matrix(m) => m.to_matrix().map_err(|e| CliError::Usage(format!("{flag}: {e}"))),
    }
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct ArakiWoodsJson {
    eigenvalues: Vec<f64>,
    kept_modes: Vec<usize>,
    X: Vec<Vec<[f64; 2]>>,
    Y: Vec<Vec<[f64; 2]>>,
    Z: Vec<Vec<[f64; 2]>>,
    E0: DoubledJson,
    condition_residual: f64,
    dilation_residual: f64,
    moment_residual: f64,
}

fn cmd_araki_woods(n: &str, m: &str, tol: f64) -> Result<String, CliError> {
    let n_mat = parse_matrix_arg("--N", n)?;
    let m_mat = parse_matrix_arg("--M", m)?;
    let state = GaussianState::new(n_mat.clone(), m_mat.clone(), tol)?;
    let f = araki_woods(&state, tol)?;
    let (n_back, m_back) = f.moments();
    Ok(to_json(&ArakiWoodsJson {
        eigenvalues: f.eigenvalues.clone(),
        kept_modes: f.kept_modes.clone(),
        X: matrix_json(&f.x_mat),
        Y: matrix_json(&f.y_mat),
        Z: matrix_json(&f.z_mat),
        E0: doubled_json(&f.dilation()),
        condition_residual: f.condition_residual(),
        dilation_residual: f.dilation_residual(),
        moment_residual: max_abs_diff(&n_back, &n_mat).max(max_abs_diff(&m_back, &m_mat)),
    }))
}

#[derive(Serialize)]
struct LimitJson {
    kind: &'static str,
    k: f64,
    kappa0: f64,
    epsilon0: f64,
    r0: f64,
    limit: DoubledJson,
    quadrature_gains: [f64; 2],
    omega_max: f64,
    points: usize,
    residual: f64,
}

fn cmd_limit_dpa(k: f64, kappa0: f64, epsilon0: f64, omega_max: f64, points: usize) -> Result<String, CliError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(CliError::Usage(format!("--k must be positive, got {k}")));
    }
    if !(omega_max > 0.0) {
        return Err(CliError::Usage(format!("--omega-max must be positive, got {omega_max}")));
    }
    let grid = frequency_grid(-omega_max, omega_max, points, Scale::Linear)?;
    let limit = dpa_static_limit(kappa0, epsilon0)?;
    let target = limit.s_tilde().as_doubled().embed();
    let tf = TransferFunction::of(&dpa(k * kappa0, k * epsilon0)?)?;
    let mut residual: f64 = 0.0;
    for w in grid {
        residual = residual.max(max_abs_diff(&tf.eval(c(0.0, w))?, &target));
    }
    let q = quadrature_tf(&target);
    Ok(to_json(&LimitJson {
        kind: "dpa",
        k,
        kappa0,
        epsilon0,
        r0: dpa_r0(kappa0, epsilon0),
        limit: doubled_json(limit.s_tilde().as_doubled()),
        quadrature_gains: [q.xi_x[(0, 0)].re, q.xi_y[(0, 0)].re],
        omega_max,
        points,
        residual,
    }))
}

fn cmd_examples(name: Option<&str>) -> Result<String, CliError> {
    match name {
        None => Ok(EXAMPLES
            .iter()
            .map(|e| format!("{:<16} {}\n", e.name, e.summary))
            .collect()),
        Some(name) => examples::find(name)
            .map(|e| e.text.to_string())
            .ok_or_else(|| CliError::Usage(format!("no bundled example named {name:?}"))),
    }
}
