use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qangle::fock::DEFAULT_TAIL_TOL;
use qangle::io::{csv_row, StateSpec, FORMAT_VERSION};
use qangle::naimark::{commutator_check, heterodyne_moments, intrinsic_quadratures, y_moments};
use qangle::pegg_barnett::{pb_convergence, pb_pmf};
use qangle::phase_repr::default_grid;
use qangle::polarization::{db_view, polarization_ellipse, snapshot_sequence};
use qangle::relphase::{absolute_time_pdf, DEFAULT_TIME_GRID};
use qangle::{to_jm, AngularGrid, AngularPdf, MeasureOptions, MeasurementRegistry, PrimitiveConvention, StateInput};

fn version_line() -> &'static str {
    Box::leak(
        format!("{} (library {}, state format {FORMAT_VERSION})", env!("CARGO_PKG_VERSION"), qangle::VERSION)
            .into_boxed_str(),
    )
}

#[derive(Parser)]
#[command(name = "qangle", version = version_line(), about = "Phase and angle distributions of oscillator states")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Photonic,
    Fermionic,
}

impl From<Convention> for PrimitiveConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Photonic => PrimitiveConvention::Photonic,
            Convention::Fermionic => PrimitiveConvention::Fermionic,
        }
    }
}

#[derive(Args)]
struct StateArgs {
    /// num:n | coh:N | xnum:n | xcoh:N | xsup:n1,w1;n2,w2 | file:path.json
    #[arg(long, visible_alias = "pol")]
    state: String,
    /// Truncation; defaults to the smallest one meeting --tail-tol.
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
}

impl StateArgs {
    fn build(&self) -> qangle::Result<StateInput> {
        self.state.parse::<StateSpec>()?.build(self.n_max, self.tail_tol)
    }
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Written atomically; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Phase density of a state under a registered measurement scheme.
    Phase {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value = "single")]
        scheme: String,
        /// Grid size; defaults to max(1024, next power of two >= 4 (n_max + 1)).
        #[arg(long)]
        k: Option<usize>,
        /// Absolute time for the snapshot scheme.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, value_enum, default_value = "photonic")]
        convention: Convention,
        #[command(flatten)]
        output: Output,
    },
    /// Discrete phase statistics and their convergence to the continuous law.
    Pb {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
        s: Vec<u32>,
        /// Directory receiving pmf_s<S>.csv for every S.
        #[arg(long)]
        pmf_dir: Option<PathBuf>,
        /// Convergence report path (JSON); stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Heterodyne and phase-extension moment report (JSON).
    Moments {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Snapshot relative-phase densities over K_t absolute times.
    Sweep {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TIME_GRID)]
        kt: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Time-averaged relative-phase density (quantum polarization ellipse).
    Ellipse {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        k: Option<usize>,
        /// Add a dB column (peak at 60 dB, floored at 0).
        #[arg(long)]
        db: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Absolute-time density C(t) / 2pi.
    Timepdf {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = DEFAULT_TIME_GRID)]
        kt: usize,
        #[command(flatten)]
        output: Output,
    },
    /// List registered measurement schemes.
    Schemes,
}

enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl From<qangle::Error> for Failure {
    fn from(e: qangle::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn emit(path: Option<&Path>, body: &str) -> Res<()> {
    match path {
        None => {
            std::io::stdout().lock().write_all(body.as_bytes())?;
            Ok(())
        }
        Some(p) => {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(body.as_bytes())?;
            tmp.persist(p).map_err(|e| Failure::Io(e.to_string()))?;
            Ok(())
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn pdf_body(pdf: &AngularPdf, extra: Option<(&str, Vec<f64>)>, format: Format, axis: &str) -> String {
    let angles: Vec<f64> = pdf.grid.angles().collect();
    match format {
        Format::Csv => {
            let mut out = String::from(axis);
            out.push_str(",density");
            if let Some((name, _)) = &extra {
                out.push(',');
                out.push_str(name);
            }
            out.push('\n');
            for (i, &a) in angles.iter().enumerate() {
                let mut row = vec![a, pdf.values[i]];
                if let Some((_, col)) = &extra {
                    row.push(col[i]);
                }
                out.push_str(&csv_row(&row));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut obj = json!({ axis: angles, "density": pdf.values });
            if let Some((name, col)) = extra {
                obj[name] = json!(col);
            }
            json_text(&obj)
        }
    }
}

fn grid_or_default(k: Option<usize>, state: &StateInput) -> usize {
    k.unwrap_or_else(|| default_grid(state.n_max()))
}

fn run(cmd: Cmd) -> Res<()> {
    match cmd {
        Cmd::Phase { state, scheme, k, t, convention, output } => {
            let input = state.build()?;
            let registry = MeasurementRegistry::builtin();
            let opts = MeasureOptions { k: grid_or_default(k, &input), t, convention: convention.into() };
            let pdf = registry.get(&scheme)?.distribution(&input, &opts)?;
            emit(output.out.as_deref(), &pdf_body(&pdf, None, output.format, "phi"))
        }
        Cmd::Pb { state, s, pmf_dir, out } => {
            let StateInput::Single(st) = state.build()? else {
                return Err(Failure::Usage("pb needs a single-mode state".into()));
            };
            if let Some(dir) = &pmf_dir {
                std::fs::create_dir_all(dir)?;
                for &si in &s {
                    let pmf = pb_pmf(&st, si)?;
                    let mut body = String::from("theta,mass\n");
                    for (th, m) in pmf.theta.iter().zip(&pmf.masses) {
                        body.push_str(&csv_row(&[*th, *m]));
                        body.push('\n');
                    }
                    emit(Some(&dir.join(format!("pmf_s{si}.csv"))), &body)?;
                }
            }
            let conv = pb_convergence(&st, &s)?;
            let report = json!({
                "n_max": st.n_max(),
                "convergence": conv.iter().map(|p| json!({"s": p.s, "distance": p.distance})).collect::<Vec<_>>(),
            });
            emit(out.as_deref(), &json_text(&report))
        }
        Cmd::Moments { state, out } => {
            let input = state.build()?;
            let st = match &input {
                StateInput::Single(s) => s.clone(),
                StateInput::Two(t) => {
                    t.system_mode().ok_or_else(|| Failure::Usage("moments needs a single-mode state".into()))?
                }
            };
            let [mx, mp, sx, sp] = intrinsic_quadratures(&st);
            let resid = commutator_check(&st);
            let report = json!({
                "n_max": st.n_max(),
                "intrinsic": {"mean_X": mx, "mean_P": mp, "second_X": sx, "second_P": sp,
                              "var_X": sx - mx * mx, "var_P": sp - mp * mp},
                "heterodyne": heterodyne_moments(&st),
                "phase": y_moments(&st),
                "residuals": {"sum_rule": resid.sum_rule, "commutator": resid.commutator},
            });
            emit(out.as_deref(), &json_text(&report))
        }
        Cmd::Sweep { state, k, kt, output } => {
            let input = state.build()?;
            let k = grid_or_default(k, &input);
            let jm = to_jm(&input.two(), PrimitiveConvention::Photonic);
            let times: Vec<f64> = AngularGrid::new(kt)?.angles().collect();
            let sweep = snapshot_sequence(&jm, &times, k)?;
            let angles: Vec<f64> = sweep.grid.angles().collect();
            let body = match output.format {
                Format::Csv => {
                    let mut out = String::from("t,phi,density\n");
                    for (t, slice) in sweep.times.iter().zip(&sweep.slices) {
                        for (i, &phi) in angles.iter().enumerate() {
                            let d = slice.as_ref().map_or(f64::NAN, |p| p.values[i]);
                            out.push_str(&csv_row(&[*t, phi, d]));
                            out.push('\n');
                        }
                    }
                    out
                }
                Format::Json => json_text(&json!({
                    "t": sweep.times,
                    "phi": angles,
                    "conditioning": sweep.conditioning,
                    "density": sweep.slices.iter().map(|s| s.as_ref().map(|p| p.values.clone())).collect::<Vec<_>>(),
                })),
            };
            emit(output.out.as_deref(), &body)
        }
        Cmd::Ellipse { state, k, db, output } => {
            let input = state.build()?;
            let k = grid_or_default(k, &input);
            let pdf = polarization_ellipse(&to_jm(&input.two(), PrimitiveConvention::Photonic), k)?;
            let extra = db.then(|| ("db", db_view(&pdf)));
            emit(output.out.as_deref(), &pdf_body(&pdf, extra, output.format, "phi"))
        }
        Cmd::Timepdf { state, kt, output } => {
            let input = state.build()?;
            let pdf = absolute_time_pdf(&to_jm(&input.two(), PrimitiveConvention::Photonic), kt)?;
            emit(output.out.as_deref(), &pdf_body(&pdf, None, output.format, "t"))
        }
        Cmd::Schemes => {
            let registry = MeasurementRegistry::builtin();
            let body: String = registry.iter().map(|s| format!("{}\t{}\n", s.name(), s.summary())).collect();
            emit(None, &body)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
