//! The `lhsi` command line.
//!
//! Exit codes: 0 success, 1 usage or invalid parameter, 2 bad input data
//! (format, shape, I/O), 3 numerical failure. Failures print one line to
//! standard error: `error: kind=<code> msg="<message>"`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ndarray::Axis;

use crate::analysis::{
    autocorr_resolution, bar_group_dips, condition_sweep, psnr, two_point_test, SweepMode,
    RAYLEIGH_DIP,
};
use crate::error::{Error, Result};
use crate::filter::FilterFunction;
use crate::io::{self, csv, RunConfig};
use crate::model::SystemModel;
use crate::simkit::{simulate_capture, FilterArraySpec, PsfKind};
use crate::solver::fista_reconstruct;
use crate::HyperspectralCube;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lhsi", version, about = "Lensless hyperspectral camera simulation and reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SceneKind {
    Points,
    ResTarget,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a PSF image
    GenPsf {
        #[arg(long, value_parser = parse_kind)]
        kind: PsfKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.5)]
        feature_px: f64,
        #[arg(long, value_parser = parse_shape, default_value = "64x64")]
        shape: (usize, usize),
        #[arg(long, default_value_t = FilterArraySpec::default().superpixel_px())]
        superpixel_px: usize,
        /// Also write an 8-bit PNG preview
        #[arg(long)]
        preview: Option<PathBuf>,
    },
    /// Generate the filter function described by a run config
    GenFilter {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_parser = parse_shape, default_value = "64x64")]
        shape: (usize, usize),
    },
    /// Build a synthetic scene from a scene spec
    GenScene {
        #[arg(long, value_enum)]
        kind: SceneKind,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate a capture: forward model, peak-1 exposure, Gaussian noise
    Forward {
        #[arg(long)]
        psf: PathBuf,
        #[arg(long)]
        filter: PathBuf,
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        noise_var: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        preview: Option<PathBuf>,
    },
    /// FISTA reconstruction of a measurement
    Reconstruct {
        #[arg(long)]
        psf: PathBuf,
        #[arg(long)]
        filter: PathBuf,
        #[arg(long)]
        meas: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Objective trace as CSV
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        log_every: usize,
    },
    /// Autocorrelation resolution estimate of a PSF
    AnalyzeAutocorr {
        #[arg(long)]
        psf: PathBuf,
        #[arg(long, default_value_t = FilterArraySpec::default().superpixel_px())]
        superpixel_px: usize,
    },
    /// Local condition numbers of point lattices
    AnalyzeCond {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides psf.kind from the config
        #[arg(long, value_parser = parse_kind)]
        kind: Option<PsfKind>,
        #[arg(long, value_parser = parse_mode, default_value = "2d")]
        mode: SweepMode,
        #[arg(long, default_value_t = 9)]
        max_points: usize,
        /// Comma-separated lattice pitches in pixels [default: 1..=super-pixel]
        #[arg(long, value_delimiter = ',')]
        separations: Option<Vec<usize>>,
        #[arg(long, value_parser = parse_shape, default_value = "64x64")]
        shape: (usize, usize),
    },
    /// Two-point resolution test
    TwoPoint {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        channel: usize,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated separations in pixels [default: 1..=super-pixel]
        #[arg(long, value_delimiter = ',')]
        separations: Option<Vec<usize>>,
        #[arg(long, value_parser = parse_shape, default_value = "64x64")]
        shape: (usize, usize),
    },
    /// Resolution target through the diffuser, low-NA and high-NA cameras
    ResTarget {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Directory for the three reconstructions
        #[arg(long)]
        recon_dir: Option<PathBuf>,
    },
    /// Spectrum of one pixel of a cube
    Spectra {
        #[arg(long)]
        cube: PathBuf,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_kind(s: &str) -> std::result::Result<PsfKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<SweepMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_shape(s: &str) -> std::result::Result<(usize, usize), String> {
    let (h, w) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected HxW, got {s:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    if h == 0 || w == 0 {
        return Err(format!("shape {s:?} has a zero side"));
    }
    Ok((h, w))
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) => EXIT_USAGE,
        Error::Shape(_) | Error::NonFinite(_) | Error::Format(_) | Error::Io(_) => EXIT_DATA,
        Error::Numerical(_) => EXIT_NUMERICAL,
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: kind=usage msg={first:?}");
            return EXIT_USAGE;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: kind={} msg={:?}", e.code(), e.to_string());
            exit_code(&e)
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

fn default_separations(superpixel_px: usize) -> Vec<usize> {
    (1..=superpixel_px.max(1)).collect()
}

fn load_filter(path: &Path, spec: &FilterArraySpec) -> Result<FilterFunction> {
    FilterFunction::from_cube(io::read_cube(path)?, spec.grid, spec.filter_px)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::GenPsf { kind, out, seed, feature_px, shape, superpixel_px, preview } => {
            let psf = crate::simkit::generate_psf(kind, shape, seed, feature_px, superpixel_px)?;
            io::write_image(&out, psf.data())?;
            if let Some(p) = preview {
                io::write_png_preview(p, psf.data())?;
            }
        }
        Command::GenFilter { config, out, shape } => {
            let cfg = io::read_run_config(config)?;
            let wl = cfg.filter.channel_centers();
            let f = crate::simkit::generate_filter_function(shape, &cfg.filter, &wl)?;
            io::write_cube(out, &f.to_cube())?;
        }
        Command::GenScene { kind, spec, out } => {
            let spec = io::read_scene_spec(spec)?;
            let cube = match kind {
                SceneKind::Points => spec.point_scene()?,
                SceneKind::ResTarget => spec.resolution_target()?,
            };
            io::write_cube(out, &cube)?;
        }
        Command::Forward { psf, filter, scene, out, noise_var, seed, preview } => {
            let psf = io::read_psf(psf)?;
            let filter = load_filter(&filter, &FilterArraySpec::default())?;
            let scene = io::read_cube(scene)?;
            let model = SystemModel::new(psf, filter, (scene.ny(), scene.nx()))?;
            let capture = simulate_capture(&model, &scene, noise_var, seed)?;
            io::write_image(&out, capture.measurement.data())?;
            if let Some(p) = preview {
                io::write_png_preview(p, capture.measurement.data())?;
            }
            println!("gain={}", capture.gain);
        }
        Command::Reconstruct { psf, filter, meas, config, out, log, log_every } => {
            let cfg = io::read_run_config(config)?;
            let psf = io::read_psf(psf)?;
            let filter = load_filter(&filter, &cfg.filter)?;
            let b = io::read_measurement(meas)?;
            let shape = filter.sensor_shape();
            let model = SystemModel::new(psf, filter, shape)?;
            model.check_measurement(&b)?;
            let solver = crate::SolverConfig { log_every, ..cfg.solver_config() };
            let (recon, diag) = fista_reconstruct(&model, &b, &solver)?;
            io::write_cube(out, &recon)?;
            if let Some(p) = log {
                write_text(&p, &csv::objective_csv(&diag))?;
            }
            println!("iterations={}", diag.iterations_run);
        }
        Command::AnalyzeAutocorr { psf, superpixel_px } => {
            if superpixel_px == 0 {
                return Err(Error::param("superpixel_px must be positive"));
            }
            let hw = autocorr_resolution(&io::read_psf(psf)?)?;
            println!("half_width_px={hw}");
            println!("half_width_superpx={}", hw / superpixel_px as f64);
        }
        Command::AnalyzeCond { config, out, kind, mode, max_points, separations, shape } => {
            let cfg = io::read_run_config(config)?;
            let model = cfg.build_model(kind.unwrap_or(cfg.psf.kind), shape)?;
            let seps = separations.unwrap_or_else(|| default_separations(cfg.filter.superpixel_px()));
            let rows = condition_sweep(&model, max_points, &seps, mode)?;
            write_text(&out, &csv::condition_csv(&rows))?;
        }
        Command::TwoPoint { config, channel, out, separations, shape } => {
            let cfg = io::read_run_config(config)?;
            let model = cfg.build_model(cfg.psf.kind, shape)?;
            let seps = separations.unwrap_or_else(|| default_separations(cfg.filter.superpixel_px()));
            let report = two_point_test(
                &model,
                &cfg.solver_config(),
                channel,
                &seps,
                cfg.noise_variance,
                cfg.seed,
            )?;
            write_text(&out, &csv::two_point_csv(&report.rows))?;
            match report.smallest_resolved_px {
                Some(d) => println!("smallest_resolved_px={d}"),
                None => println!("smallest_resolved_px=none"),
            }
        }
        Command::ResTarget { config, spec, out, recon_dir } => {
            let cfg = io::read_run_config(config)?;
            let spec = io::read_scene_spec(spec)?;
            if spec.n_lambda != cfg.filter.n_channels() {
                return Err(Error::Shape(format!(
                    "scene has {} channels, filter array has {}",
                    spec.n_lambda,
                    cfg.filter.n_channels()
                )));
            }
            let truth = spec.resolution_target()?;
            let mut text = String::from(
                "architecture,psnr_db,group,bar_width_px,dip_left,dip_right,resolved\n",
            );
            for (name, kind) in
                [("diffuser", PsfKind::Diffuser), ("low-na", PsfKind::LowNa), ("high-na", PsfKind::HighNa)]
            {
                let recon = reconstruct_target(&cfg, kind, &truth)?;
                let p = psnr(&recon, &truth)?;
                for (i, g) in spec.groups.iter().enumerate() {
                    let [a, b] = bar_group_dips(&recon, g)?;
                    let resolved = a <= RAYLEIGH_DIP && b <= RAYLEIGH_DIP;
                    text.push_str(&format!(
                        "{name},{p},{i},{},{a},{b},{resolved}\n",
                        g.bar_width_px
                    ));
                }
                if let Some(dir) = &recon_dir {
                    io::write_cube(dir.join(format!("{name}.hsc")), &recon)?;
                }
                println!("{name}_psnr_db={p}");
            }
            write_text(&out, &text)?;
        }
        Command::Spectra { cube, x, y, out } => {
            let cube = io::read_cube(cube)?;
            if x >= cube.nx() || y >= cube.ny() {
                return Err(Error::param(format!(
                    "pixel ({x}, {y}) outside {}x{}",
                    cube.ny(),
                    cube.nx()
                )));
            }
            let spectrum: Vec<f64> =
                cube.data().index_axis(Axis(2), x).index_axis(Axis(1), y).to_vec();
            write_text(&out, &csv::spectrum_csv(cube.wavelengths_nm(), &spectrum))?;
        }
    }
    Ok(())
}

/// Simulates a capture of `truth` through the camera of `kind` and returns
/// the reconstruction rescaled to scene units.
pub fn reconstruct_target(
    cfg: &RunConfig,
    kind: PsfKind,
    truth: &HyperspectralCube,
) -> Result<HyperspectralCube> {
    let model = cfg.build_model(kind, (truth.ny(), truth.nx()))?;
    let capture = simulate_capture(&model, truth, cfg.noise_variance, cfg.seed)?;
    let (mut recon, _) = fista_reconstruct(&model, &capture.measurement, &cfg.solver_config())?;
    recon.data_mut().mapv_inplace(|v| v / capture.gain);
    Ok(recon)
}
