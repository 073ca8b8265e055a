//! Command dispatch: each command reads a validated config and writes its
//! artifacts into the configured output directory.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use epstein_core::asymptotics::{phi_coefficient, rescaled_forms, verify_asymptotics};
use epstein_core::conformal::SymTwoTensor;
use epstein_core::epstein::{forms_at, sample_mesh_with, EpsteinMesh};
use epstein_core::foliation::{
    c_of_k, continuation, intrinsic_B, FoliationBranch, Mode, ModelSurface,
};
use epstein_core::Exec;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::config::{ConfigMode, ExperimentConfig, Suite};
use crate::error::CliError;
use crate::verify::{run_suite, Check};

pub const ARTIFACT_NAME: &str = "epstein";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// k values tabulated by `fuchsian-table` when the config has no `k_list`.
pub const FUCHSIAN_TABLE_K: [f64; 7] = [-0.9, -0.75, -0.5, -0.25, -0.1, -0.05, -0.01];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Sample,
    Solve,
    Asymptotics,
    FuchsianTable,
    Verify(Suite),
    /// Picks the command from the config's `mode`.
    Run,
}

/// Files written by a successful command.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
}

/// Runs `command`, writing artifacts under `config.output.dir` and progress
/// lines to `log`.
pub fn dispatch(
    command: Command,
    config: &ExperimentConfig,
    log: &mut dyn Write,
) -> Result<Outcome, CliError> {
    config.validate()?;
    let dir = PathBuf::from(&config.output.dir);
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut out = Writer {
        dir,
        config,
        files: Vec::new(),
    };
    match command {
        Command::Sample => sample(&mut out, log)?,
        Command::Solve => solve(&mut out, log)?,
        Command::Asymptotics => asymptotics(&mut out, log)?,
        Command::FuchsianTable => fuchsian_table(&mut out, log)?,
        Command::Verify(suite) => verify(&mut out, suite, log)?,
        Command::Run => {
            let next = match config.mode {
                ConfigMode::KSurface | ConfigMode::Cmc => Command::Asymptotics,
                ConfigMode::EpsteinSample => Command::Sample,
                ConfigMode::VerifySuite => Command::Verify(config.verify.suite),
            };
            return dispatch(next, config, log);
        }
    }
    Ok(Outcome { files: out.files })
}

fn say(log: &mut dyn Write, line: std::fmt::Arguments) {
    // Progress output is best effort; a closed stdout must not fail the run.
    let _ = log.write_fmt(line);
    let _ = log.write_all(b"\n");
}

macro_rules! say {
    ($log:expr, $($arg:tt)*) => { say($log, format_args!($($arg)*)) };
}

/// Fixed-width float with 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Writer<'a> {
    dir: PathBuf,
    config: &'a ExperimentConfig,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.files.push(path);
        Ok(())
    }

    /// Comment header for line-oriented text formats.
    fn header(&self, prefix: &str) -> String {
        format!(
            "{prefix} {ARTIFACT_NAME} {ARTIFACT_VERSION}\n{prefix} config {}\n",
            self.config.echo()
        )
    }

    fn write_json<T: Serialize>(
        &mut self,
        name: &str,
        key: &str,
        value: &T,
    ) -> Result<(), CliError> {
        let mut doc = json!({
            "artifact": { "name": ARTIFACT_NAME, "version": ARTIFACT_VERSION },
            "config": self.config,
        });
        doc[key] = serde_json::to_value(value).expect("artifact serializes");
        let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
        text.push('\n');
        self.write(name, &text)
    }
}

fn solve_branch(
    config: &ExperimentConfig,
    mode: Mode,
    ks: &[f64],
) -> Result<(ModelSurface, FoliationBranch), CliError> {
    let surface = config.model_surface()?;
    let branch = continuation(mode, ks, &surface, &config.solver.to_core())?;
    Ok((surface, branch))
}

fn sample(out: &mut Writer, log: &mut dyn Write) -> Result<(), CliError> {
    let config = out.config;
    let mode = config.mode.solver_mode().unwrap_or(Mode::KSurface);
    let (surface, branch) = solve_branch(config, mode, &[config.sample.k])?;
    let sigma = branch.sigma(0, &surface)?;
    let b = intrinsic_B(&sigma, &surface)?;
    let dev = surface.developing_map();
    let mesh = sample_mesh_with(&sigma, &b, Some(&dev), Exec::default())?;
    out.write("mesh.obj", &obj(out, &mesh))?;
    out.write("mesh.csv", &mesh_csv(out, &mesh))?;
    say!(
        log,
        "sample: {} surface at k = {}, {} vertices, {} triangles, {} degenerate",
        mode.name(),
        config.sample.k,
        mesh.vertices.len(),
        mesh.triangles.len(),
        mesh.degenerate_count()
    );
    Ok(())
}

fn obj(out: &Writer, mesh: &EpsteinMesh) -> String {
    let mut s = out.header("#");
    s.push_str("# vertices (x, y, t) in the upper half-space; K(I) and H per vertex in mesh.csv\n");
    for v in &mesh.vertices {
        let z = v.base.z();
        let _ = writeln!(s, "v {} {} {}", num(z.re), num(z.im), num(v.base.t()));
    }
    for [a, b, c] in &mesh.triangles {
        let _ = writeln!(s, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    s
}

fn mesh_csv(out: &Writer, mesh: &EpsteinMesh) -> String {
    let mut s = out.header("#");
    s.push_str("vertex,node,chart_re,chart_im,x,y,t,K_I,H,degenerate\n");
    for (i, v) in mesh.vertices.iter().enumerate() {
        let z = v.base.z();
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        let _ = writeln!(
            s,
            "{i},{},{},{},{},{},{},{},{},{}",
            mesh.node[i],
            num(v.z.re),
            num(v.z.im),
            num(z.re),
            num(z.im),
            num(v.base.t()),
            opt(v.gauss_curvature),
            opt(v.mean_curvature),
            v.degenerate
        );
    }
    s
}

fn solve(out: &mut Writer, log: &mut dyn Write) -> Result<(), CliError> {
    let config = out.config;
    let mode = config.solver_mode()?;
    let (_, branch) = solve_branch(config, mode, &config.k_values())?;
    for s in &branch.samples {
        say!(
            log,
            "solve: {} k = {:+.4} iterations {} residual {:.2e} |u| {:.3e}",
            mode.name(),
            s.k,
            s.iterations,
            s.residual,
            s.u_sup()
        );
    }
    out.write_json("branch.json", "branch", &branch)
}

struct RungCoefficients {
    eps: f64,
    ci_re: f64,
    ci_im: f64,
    cii_re: f64,
    cii_im: f64,
}

fn asymptotics(out: &mut Writer, log: &mut dyn Write) -> Result<(), CliError> {
    let config = out.config;
    let mode = config.solver_mode()?;
    let (surface, branch) = solve_branch(config, mode, &config.k_values())?;
    let report = verify_asymptotics(&branch, &surface)?;

    // One-sided difference quotients per rung, in the k direction.
    let h = SymTwoTensor::from_metric(surface.h());
    let mut rungs = Vec::new();
    for r in rescaled_forms(&branch, &surface)? {
        let pi = phi_coefficient(&r.first.checked_sub(&h)?.scale(1.0 / r.eps), &surface)?;
        let pii = phi_coefficient(&r.second.checked_sub(&h)?.scale(1.0 / r.eps), &surface)?;
        rungs.push(RungCoefficients {
            eps: r.eps,
            ci_re: -pi.c_re,
            ci_im: -pi.c_im,
            cii_re: -pii.c_re,
            cii_im: -pii.c_im,
        });
    }
    rungs.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    rungs.push(RungCoefficients {
        eps: 0.0,
        ci_re: report.ci_re,
        ci_im: report.ci_im,
        cii_re: report.cii_re,
        cii_im: report.cii_im,
    });
    let mut csv = out.header("#");
    csv.push_str(
        "# rows with eps > 0 are difference quotients; eps = 0 is the extrapolated tangent\n",
    );
    csv.push_str("eps,cI_re,cI_im,cII_re,cII_im\n");
    for r in &rungs {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            num(r.eps),
            num(r.ci_re),
            num(r.ci_im),
            num(r.cii_re),
            num(r.cii_im)
        );
    }
    out.write_json("report.json", "report", &report)?;
    out.write("tangent.csv", &csv)?;
    say!(
        log,
        "asymptotics: {} cI = {:+.6} {:+.6}i, cII = {:+.6} {:+.6}i (order {})",
        mode.name(),
        report.ci_re,
        report.ci_im,
        report.cii_re,
        report.cii_im,
        report.extrapolation_order
    );
    Ok(())
}

/// `(k, c(k), K(I), H)` for the Fuchsian surface `c(k)·h`, evaluated through
/// the general fundamental-form formulas.
pub fn fuchsian_row(k: f64) -> Result<[f64; 4], CliError> {
    let c = c_of_k(k)?;
    let kc = -1.0 / c;
    let f = forms_at(0.5 * c.ln(), Complex64::new(0.0, 0.0), kc);
    Ok([k, c, f.gauss_curvature(kc), f.mean_curvature(kc)])
}

fn fuchsian_table(out: &mut Writer, log: &mut dyn Write) -> Result<(), CliError> {
    let ks = out
        .config
        .k_list
        .clone()
        .unwrap_or_else(|| FUCHSIAN_TABLE_K.to_vec());
    let mut csv = out.header("#");
    csv.push_str("k,c,K_I,H\n");
    say!(log, "{:>24} {:>24} {:>24} {:>24}", "k", "c(k)", "K(I)", "H");
    for k in ks {
        let row = fuchsian_row(k)?;
        let cells: Vec<String> = row.iter().map(|x| num(*x)).collect();
        let _ = writeln!(csv, "{}", cells.join(","));
        say!(
            log,
            "{:>24} {:>24} {:>24} {:>24}",
            cells[0],
            cells[1],
            cells[2],
            cells[3]
        );
    }
    out.write("fuchsian_table.csv", &csv)
}

fn verify(out: &mut Writer, suite: Suite, log: &mut dyn Write) -> Result<(), CliError> {
    let checks: Vec<Check> = run_suite(suite, out.config)?;
    for c in &checks {
        say!(log, "{}", c.line());
    }
    out.write_json(&format!("verify_{}.json", suite.name()), "checks", &checks)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    say!(
        log,
        "verify {}: {} checks, {} failed",
        suite.name(),
        checks.len(),
        failed
    );
    if failed > 0 {
        return Err(CliError::Verification(format!(
            "{failed} of {} checks in suite `{}` failed",
            checks.len(),
            suite.name()
        )));
    }
    Ok(())
}

/// Path of an artifact written by [`dispatch`].
pub fn artifact_path(config: &ExperimentConfig, name: &str) -> PathBuf {
    Path::new(&config.output.dir).join(name)
}
