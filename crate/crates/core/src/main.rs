use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cutdarcy::assembly::{FaceSelection, Method, MultiplierStab, NormalSource, StabilizationForm};
use cutdarcy::fespace::MultiplierDegree;
use cutdarcy::harness::{run_experiment_with, write_csv, Example, ExperimentConfig, LevelRun};
use cutdarcy::io::{write_macro_csv, write_matrix_market, write_mesh, write_vector_market};
use cutdarcy::macroelement::build_macro_partition;

#[derive(Parser)]
#[command(name = "cutdarcy", version, about = "Cut mixed finite elements for Darcy flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study over a list of mesh levels.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleArg {
    #[value(name = "1")]
    Ex1,
    #[value(name = "1.2")]
    Ex12,
    #[value(name = "2")]
    Ex2,
    #[value(name = "2-fitted")]
    Ex2Fitted,
    Mixed,
    Div,
    Lindiv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Lagrange,
    Penalty,
}

#[derive(Clone, Copy, ValueEnum)]
enum StabArg {
    Sc,
    ScHat,
    ScTilde,
}

#[derive(Clone, Copy, ValueEnum)]
enum ImplArg {
    Patch,
    Face,
}

#[derive(Clone, Copy, ValueEnum)]
enum FacesArg {
    All,
    Macro,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalArg {
    Levelset,
    Segment,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "1")]
    example: ExampleArg,
    /// Pressure amplitude of example 1.2.
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
    /// Divergence of the `div` example.
    #[arg(long, default_value_t = 1.0)]
    g0: f64,
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    nx: Vec<usize>,
    #[arg(long, value_enum, default_value = "lagrange")]
    method: MethodArg,
    #[arg(long, default_value_t = Method::DEFAULT_PENALTY)]
    penalty: f64,
    #[arg(long, value_enum, default_value = "sc")]
    stab: StabArg,
    #[arg(long = "impl", value_enum, default_value = "patch")]
    form: ImplArg,
    #[arg(long, value_enum, default_value = "all")]
    faces: FacesArg,
    #[arg(long, value_enum, default_value = "levelset")]
    normal: NormalArg,
    #[arg(long = "mult-deg", default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
    mult_deg: u8,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long = "tau-b", default_value_t = 1.0)]
    tau_b: f64,
    #[arg(long = "tau-c", default_value_t = 1.0)]
    tau_c: f64,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write `<stem>_nx<N>.mesh` per level.
    #[arg(long)]
    dump_mesh: bool,
    /// Write `<stem>_nx<N>.mtx` and `<stem>_nx<N>_rhs.mtx` per level.
    #[arg(long)]
    dump_system: bool,
    /// Write `<stem>_nx<N>_macro.csv` per level.
    #[arg(long)]
    dump_macro: bool,
    /// Skip condition estimates.
    #[arg(long)]
    no_condest: bool,
    /// Write zero runtimes so that repeated runs give identical files.
    #[arg(long)]
    no_timing: bool,
}

impl RunArgs {
    fn config(&self) -> ExperimentConfig {
        let example = match self.example {
            ExampleArg::Ex1 => Example::Ex1,
            ExampleArg::Ex12 => Example::Ex1_2 { c: self.c },
            ExampleArg::Ex2 => Example::Ex2Unfitted,
            ExampleArg::Ex2Fitted => Example::Ex2Fitted,
            ExampleArg::Mixed => Example::MixedBc,
            ExampleArg::Div => Example::ConstantDivergence { g0: self.g0 },
            ExampleArg::Lindiv => Example::LinearDivergence,
        };
        let mut cfg = ExperimentConfig::new(example);
        cfg.levels = self.nx.clone();
        cfg.method = match self.method {
            MethodArg::Lagrange => Method::Lagrange,
            MethodArg::Penalty => Method::Penalty { lambda: self.penalty },
        };
        cfg.multiplier_degree = if self.mult_deg == 0 { MultiplierDegree::Constant } else { MultiplierDegree::Linear };
        let s = &mut cfg.stabilization;
        s.tau = self.tau;
        s.tau_b = self.tau_b;
        s.tau_c = self.tau_c;
        s.delta = self.delta;
        s.multiplier_stab = match self.stab {
            StabArg::Sc => MultiplierStab::Sc,
            StabArg::ScHat => MultiplierStab::ScHat,
            StabArg::ScTilde => MultiplierStab::ScTilde,
        };
        s.form = match self.form {
            ImplArg::Patch => StabilizationForm::PatchExtension,
            ImplArg::Face => StabilizationForm::FaceJumps,
        };
        s.faces = match self.faces {
            FacesArg::All => FaceSelection::AllSigma,
            FacesArg::Macro => FaceSelection::MacroOnly,
        };
        s.normal_source = match self.normal {
            NormalArg::Levelset => NormalSource::LevelSetGradient,
            NormalArg::Segment => NormalSource::SegmentNormal,
        };
        cfg.condest = !self.no_condest;
        cfg.timing = !self.no_timing;
        cfg
    }

    fn dump_stem(&self) -> PathBuf {
        match &self.out {
            Some(p) => p.with_extension(""),
            None => PathBuf::from("cutdarcy"),
        }
    }
}

fn dump_path(stem: &Path, nx: usize, suffix: &str) -> PathBuf {
    let mut name = stem.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(format!("_nx{nx}{suffix}"));
    stem.with_file_name(name)
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn dump_level(args: &RunArgs, delta: f64, run: &LevelRun) -> io::Result<()> {
    let stem = args.dump_stem();
    if args.dump_mesh {
        let mut w = create(&dump_path(&stem, run.nx, ".mesh"))?;
        write_mesh(&mut w, &run.mesh)?;
        w.flush()?;
    }
    if args.dump_system {
        let mut w = create(&dump_path(&stem, run.nx, ".mtx"))?;
        write_matrix_market(&mut w, &run.system.matrix)?;
        w.flush()?;
        let mut w = create(&dump_path(&stem, run.nx, "_rhs.mtx"))?;
        write_vector_market(&mut w, &run.system.rhs)?;
        w.flush()?;
    }
    if args.dump_macro {
        // The partition does not depend on the solve, so it is rebuilt here.
        match build_macro_partition(&run.mesh, delta) {
            Ok(part) => {
                let mut w = create(&dump_path(&stem, run.nx, "_macro.csv"))?;
                write_macro_csv(&mut w, &run.mesh, &part)?;
                w.flush()?;
            }
            Err(e) => log::warn!("nx={}: no partition to dump: {e}", run.nx),
        }
    }
    Ok(())
}

fn run(args: &RunArgs) -> ExitCode {
    let cfg = args.config();
    let mut dump_error = None;
    let result = run_experiment_with(&cfg, |level| {
        if dump_error.is_none() {
            dump_error = dump_level(args, cfg.stabilization.delta, level).err();
        }
    });
    let rows = match result {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_geometry() { 3 } else { 2 });
        }
    };
    if let Some(e) = dump_error {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    for r in rows.iter().filter(|r| r.residual > cutdarcy::linalg::RESIDUAL_WARN) {
        log::warn!("nx={}: relative residual {:.3e}", r.nx, r.residual);
    }
    let written = match &args.out {
        Some(path) => create(path).and_then(|mut w| {
            write_csv(&mut w, &cfg, &rows)?;
            w.flush()
        }),
        None => write_csv(io::stdout().lock(), &cfg, &rows),
    };
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run(args) => run(&args),
    }
}
