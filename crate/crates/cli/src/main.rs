//! `daylight` — scene checking, daylight-factor grids, time-series
//! simulation, and measurement validation from the command line.
//!
//! Exit codes: 0 success, 1 unreadable or unparseable input, 2 semantic
//! failure (invalid scene, bad flag values, no matched measurements).

use clap::{Args, Parser, Subcommand};
use daylight_core::engine::{
    self, grid_snapshot, simulate, validate_against, EngineError, ValidationReport,
};
use daylight_core::scene::{
    expand_grid, load_measurements, load_scene, load_weather, Scene, SceneError, SensorSpec,
};
use daylight_core::sky::SkyModel;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "daylight",
    version,
    about = "Indoor daylighting: daylight factors, work-plane illuminance, validation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a scene file and print its summary.
    Check {
        /// Scene description (TOML).
        scene: PathBuf,
    },
    /// Daylight-factor snapshot of every sensor under an overcast sky.
    Grid {
        scene: PathBuf,
        /// Exterior diffuse horizontal illuminance (lux) to scale to.
        #[arg(long)]
        edh: f64,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a companion gnuplot script next to --out.
        #[arg(long)]
        emit_gnuplot: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Simulate a weather time series and write the results CSV.
    Simulate {
        scene: PathBuf,
        /// Weather CSV: timestamp,ghi_wm2,dhi_wm2,eg_lux.
        weather: PathBuf,
        /// Results CSV destination.
        #[arg(long)]
        out: PathBuf,
        /// Also write a companion gnuplot script next to --out.
        #[arg(long)]
        emit_gnuplot: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Compare a simulation against measured illuminance and report errors.
    Validate {
        scene: PathBuf,
        weather: PathBuf,
        /// Measurements CSV: timestamp,point_id,e_lux.
        measured: PathBuf,
        /// Metrics report destination.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

/// Scene-file settings that flags may override.
#[derive(Args)]
struct Overrides {
    /// Window patch grid side count for the sky integrals (1–512).
    #[arg(long)]
    patch_n: Option<usize>,
    /// Diffuse luminous efficacy (lm/W).
    #[arg(long)]
    k_diffuse: Option<f64>,
    /// Beam luminous efficacy (lm/W).
    #[arg(long)]
    k_beam: Option<f64>,
    /// Model exterior obstructions (sky masking, shadows, reflected light).
    #[arg(long)]
    enable_overhang: bool,
    /// Replace the sensor layout with a floor grid at this height (m).
    #[arg(long)]
    grid_height: Option<f64>,
    /// Spacing (m) of the replacement floor grid.
    #[arg(long)]
    grid_spacing: Option<f64>,
}

/// A failure carrying the exit code mandated by the CLI contract.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
    fn semantic(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<SceneError> for Failure {
    fn from(e: SceneError) -> Self {
        match e {
            SceneError::Parse(_) => Failure::io(e.to_string()),
            SceneError::Invalid { .. } => Failure::semantic(e.to_string()),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::semantic(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Check { scene } => cmd_check(&scene),
        Command::Grid { scene, edh, out, emit_gnuplot, overrides } => {
            cmd_grid(&scene, edh, out.as_deref(), emit_gnuplot, &overrides)
        }
        Command::Simulate { scene, weather, out, emit_gnuplot, overrides } => {
            cmd_simulate(&scene, &weather, &out, emit_gnuplot, &overrides)
        }
        Command::Validate { scene, weather, measured, out, overrides } => {
            cmd_validate(&scene, &weather, &measured, &out, &overrides)
        }
    }
}

/// Loads the scene and applies flag overrides on top of its settings.
fn load_with_overrides(path: &Path, ov: &Overrides) -> Result<Scene, Failure> {
    let mut scene = load_scene(path)?;

    if let Some(n) = ov.patch_n {
        if !(1..=512).contains(&n) {
            return Err(Failure::semantic(format!("--patch-n must be 1..=512, got {n}")));
        }
        scene.options.patch_n = n;
    }
    if let Some(k) = ov.k_diffuse {
        scene.options.efficacies.k_diffuse = k;
    }
    if let Some(k) = ov.k_beam {
        scene.options.efficacies.k_beam = k;
    }
    if ov.k_diffuse.is_some() || ov.k_beam.is_some() {
        scene
            .options
            .efficacies
            .validate()
            .map_err(|e| Failure::semantic(e.to_string()))?;
    }
    if ov.enable_overhang {
        scene.options.enable_overhang_shading = true;
    }

    if ov.grid_height.is_some() || ov.grid_spacing.is_some() {
        let (spacing, height, margin) = match scene.sensor_spec {
            SensorSpec::Grid { spacing_m, height_m, margin_m } => (
                ov.grid_spacing.unwrap_or(spacing_m),
                ov.grid_height.unwrap_or(height_m),
                margin_m,
            ),
            SensorSpec::Points(_) => {
                let (Some(s), Some(h)) = (ov.grid_spacing, ov.grid_height) else {
                    return Err(Failure::semantic(
                        "replacing explicit sensor points with a grid needs both \
                         --grid-spacing and --grid-height",
                    ));
                };
                (s, h, 0.0)
            }
        };
        scene.sensors = expand_grid(&scene.zone, spacing, height, margin)
            .map_err(Failure::from)?;
        scene.sensor_spec =
            SensorSpec::Grid { spacing_m: spacing, height_m: height, margin_m: margin };
        if scene.sensors.is_empty() {
            return Err(Failure::semantic("the requested grid contains no points"));
        }
    }

    Ok(scene)
}

fn cmd_check(path: &Path) -> Result<(), Failure> {
    let scene = load_scene(path)?;
    println!("scene: {} ({})", scene.zone.name, path.display());
    println!("total surface area: {:.3} m²", scene.zone.total_surface_area_m2);
    println!("mean reflectance: {:.4}", scene.zone.mean_reflectance);
    for g in &scene.zone.glazings {
        println!(
            "glazing {}: {:.3} m² in {} (τ = {:.2})",
            g.id,
            g.polygon.area(),
            g.host_surface,
            g.transmittance
        );
    }
    println!("obstructions: {}", scene.obstructions.len());
    println!(
        "overhang shading: {}",
        if scene.options.enable_overhang_shading { "on" } else { "off" }
    );
    println!("sensors: {}", scene.sensors.len());
    if scene.warnings.is_empty() {
        println!("warnings: none");
    } else {
        for w in &scene.warnings {
            println!("warning: {w}");
        }
    }
    println!("ok");
    Ok(())
}

fn cmd_grid(
    path: &Path,
    edh: f64,
    out: Option<&Path>,
    emit_gnuplot: bool,
    ov: &Overrides,
) -> Result<(), Failure> {
    if !(edh >= 0.0) || !edh.is_finite() {
        return Err(Failure::semantic(format!("--edh must be a finite value ≥ 0, got {edh}")));
    }
    let scene = load_with_overrides(path, ov)?;
    let cells = grid_snapshot(&scene, &scene.sensors, edh, SkyModel::CieOvercast)?;

    let mut table = String::from("point_id,sc_pct,erc_pct,irc_pct,df_pct,e_diffuse_lux\n");
    for c in &cells {
        table.push_str(&format!(
            "{},{:.4},{:.4},{:.4},{:.4},{:.4}\n",
            c.point.id,
            c.components.sc_pct,
            c.components.erc_pct,
            c.components.irc_pct,
            c.components.df_pct,
            c.e_lux
        ));
    }
    match out {
        Some(p) => {
            std::fs::write(p, &table)?;
            println!("wrote {} rows to {}", cells.len(), p.display());
            if emit_gnuplot {
                let script = grid_plot_script(p);
                let sp = p.with_extension("gp");
                std::fs::write(&sp, script)?;
                println!("wrote plot script to {}", sp.display());
            }
        }
        None => {
            if emit_gnuplot {
                return Err(Failure::semantic("--emit-gnuplot needs --out"));
            }
            print!("{table}");
        }
    }
    Ok(())
}

fn cmd_simulate(
    scene_path: &Path,
    weather_path: &Path,
    out: &Path,
    emit_gnuplot: bool,
    ov: &Overrides,
) -> Result<(), Failure> {
    let scene = load_with_overrides(scene_path, ov)?;
    let weather = load_weather(weather_path)?;

    let started = Instant::now();
    let results = simulate(&scene, &weather)?;
    let elapsed = started.elapsed();

    let file = std::fs::File::create(out)?;
    engine::write_results_csv(std::io::BufWriter::new(file), &results)?;
    println!(
        "wrote {} rows ({} timesteps × {} sensors) to {} in {:.3} s",
        results.len(),
        weather.len(),
        scene.sensors.len(),
        out.display(),
        elapsed.as_secs_f64()
    );
    if emit_gnuplot {
        let ids: Vec<&str> = scene.sensors.iter().map(|s| s.id.as_str()).collect();
        let sp = out.with_extension("gp");
        std::fs::write(&sp, series_plot_script(out, &ids))?;
        println!("wrote plot script to {}", sp.display());
    }
    Ok(())
}

fn cmd_validate(
    scene_path: &Path,
    weather_path: &Path,
    measured_path: &Path,
    out: &Path,
    ov: &Overrides,
) -> Result<(), Failure> {
    let scene = load_with_overrides(scene_path, ov)?;
    let weather = load_weather(weather_path)?;
    let measured = load_measurements(measured_path)?;

    let results = simulate(&scene, &weather)?;
    let report = validate_against(&results, &measured)?;

    let file = std::fs::File::create(out)?;
    engine::write_metrics_csv(std::io::BufWriter::new(file), &report)?;
    print_report(&report);
    println!("wrote metrics to {}", out.display());
    Ok(())
}

fn print_report(report: &ValidationReport) {
    let _ = writeln!(
        std::io::stdout(),
        "{:<12} {:>6} {:>12} {:>12} {:>10}",
        "point",
        "n",
        "mbe (lx)",
        "rmse (lx)",
        "rmse rel"
    );
    for (id, m) in &report.per_point {
        print_metrics_row(id, m);
    }
    print_metrics_row("overall", &report.overall);
    println!("unmatched measurements: {}", report.unmatched_measured);
}

fn print_metrics_row(label: &str, m: &engine::ErrorMetrics) {
    let rel = m
        .rmse_rel
        .map(|r| format!("{:.4}", r))
        .unwrap_or_else(|| "-".to_string());
    println!(
        "{:<12} {:>6} {:>12.2} {:>12.2} {:>10}",
        label, m.n, m.mbe_lux, m.rmse_lux, rel
    );
}

/// Gnuplot script plotting total illuminance per sensor over time.
fn series_plot_script(csv: &Path, ids: &[&str]) -> String {
    let file = csv.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let list = ids.join(" ");
    format!(
        "set datafile separator \",\"\n\
         set xdata time\n\
         set timefmt \"%Y-%m-%dT%H:%M:%S\"\n\
         set format x \"%H:%M\"\n\
         set ylabel \"work-plane illuminance (lx)\"\n\
         set key outside right autotitle columnhead\n\
         plot for [p in \"{list}\"] \"{file}\" \
         using 1:(strcol(2) eq p ? column(9) : NaN) with lines title p\n"
    )
}

/// Gnuplot script plotting the daylight-factor profile across the sensors.
fn grid_plot_script(csv: &Path) -> String {
    let file = csv.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    format!(
        "set datafile separator \",\"\n\
         set ylabel \"daylight factor (%)\"\n\
         set key autotitle columnhead\n\
         set style data linespoints\n\
         plot \"{file}\" using 0:5:xtic(1) title \"DF\"\n"
    )
}
