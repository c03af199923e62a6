use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use circlabel::error::SimError;
use circlabel::geometry::{Projection, ScreenVec};
use circlabel::interaction::PipelineConfig;
use circlabel::layout::{
    build_first_level, labels_for_objects, layout_for, layout_json, layout_svg, LayoutDocument,
    Method, MultiCircleLayout,
};
use circlabel::protocol::serve;
use circlabel::scene::Scene;
use circlabel::sim::{
    compare_methods, format_table, generate_scene, write_report, CompareConfig, Limits, Preset,
    SceneSource, SceneSpec,
};

#[derive(Parser, Debug)]
#[command(name = "circlabel", version, about = "Sorted circle label layouts and gaze-guided object locating")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lay out the labels of one initial letter and write the layout.
    Layout(LayoutArgs),
    /// Run scripted trials for each method and write metrics.
    Simulate(SimulateArgs),
    /// Serve line-delimited JSON sessions over TCP.
    Serve(ServeArgs),
    /// Generate a scene file.
    Scene(SceneArgs),
}

#[derive(Args, Debug, Clone)]
struct Tuning {
    /// Maximum number of second-level circles.
    #[arg(long, default_value_t = 6)]
    max_circles: usize,
    /// Relaxation iterations before overlapping labels are removed.
    #[arg(long, default_value_t = 60)]
    relax_iters: usize,
    /// Letter dwell time in milliseconds.
    #[arg(long, default_value_t = 400.0)]
    dwell_ms: f64,
    /// Full central field of view in degrees.
    #[arg(long, default_value_t = 30.0)]
    fov_deg: f64,
    /// Simulation tick rate in hertz.
    #[arg(long, default_value_t = 60.0)]
    tick_hz: f64,
}

impl Tuning {
    fn pipeline(&self, method: Method) -> PipelineConfig {
        let mut c = PipelineConfig {
            method,
            projection: Projection::with_central_fov_deg(self.fov_deg),
            dwell: self.dwell_ms / 1000.0,
            ..PipelineConfig::default()
        };
        c.layout.max_circles = self.max_circles;
        c.layout.relax_iters = self.relax_iters;
        c
    }
}

#[derive(Args, Debug)]
struct LayoutArgs {
    #[arg(long)]
    scene: PathBuf,
    /// Initial letter; ignored by cc2, which shows every label.
    #[arg(long)]
    letter: Option<char>,
    #[arg(long, default_value = "ec3")]
    method: Method,
    /// Layout JSON path; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional SVG rendering of the layout.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Scene file; a scene is generated per trial when omitted.
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "ec1,ec2,ec3")]
    method: Vec<Method>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Objects per generated scene.
    #[arg(long, default_value_t = 60)]
    objects: usize,
    #[arg(long, default_value = "scatter")]
    preset: Preset,
    /// Trial time limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    max_seconds: f64,
    /// Output directory for trials.jsonl, summary.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:7878")]
    bind: String,
    /// Scene preloaded into every session.
    #[arg(long)]
    scene: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args, Debug)]
struct SceneArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 60)]
    objects: usize,
    #[arg(long, default_value = "grid")]
    preset: Preset,
    /// Concentrates initial letters; 0 is uniform.
    #[arg(long, default_value_t = 0.0)]
    skew: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status for input that cannot be read or parsed.
const EXIT_PARSE: u8 = 2;
/// Exit status for a layout or simulation failure.
const EXIT_LAYOUT: u8 = 3;

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn parse(msg: impl ToString) -> Self {
        Self {
            code: EXIT_PARSE,
            msg: msg.to_string(),
        }
    }

    fn layout(msg: impl ToString) -> Self {
        Self {
            code: EXIT_LAYOUT,
            msg: msg.to_string(),
        }
    }
}

fn load_scene(path: &Path) -> Result<Scene, Failure> {
    Scene::load(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::layout(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_layout(args: &LayoutArgs) -> Result<(), Failure> {
    let scene = load_scene(&args.scene)?;
    let config = args.tuning.pipeline(args.method);
    let view = scene.spawn.view().map_err(Failure::parse)?;
    let labels = labels_for_objects(&scene.objects);
    let (labels, center, letter) = if args.method == Method::Cc2 {
        (labels, ScreenVec::ZERO, None)
    } else {
        let letter = args
            .letter
            .ok_or_else(|| Failure::parse(format!("--letter is required for {}", args.method)))?
            .to_ascii_lowercase();
        let ring = build_first_level(&labels).map_err(Failure::layout)?;
        let center = ring.position(letter).unwrap_or(ScreenVec::ZERO);
        let picked: Vec<_> = labels.into_iter().filter(|l| l.initial() == letter).collect();
        (picked, center, Some(letter))
    };

    let layout = if labels.is_empty() {
        log::warn!("no labels start with {:?}; writing an empty layout", letter.unwrap_or(' '));
        MultiCircleLayout::empty(center)
    } else {
        layout_for(
            args.method,
            &labels,
            &scene.objects,
            &view.with_gaze(center),
            &config.projection,
            &config.layout,
        )
        .map_err(Failure::layout)?
    };
    if !layout.dropped.is_empty() {
        log::warn!("{} labels could not be placed", layout.dropped.len());
    }
    if let Some(svg) = &args.svg {
        std::fs::write(svg, layout_svg(&layout)).map_err(|e| Failure::layout(format!("{}: {e}", svg.display())))?;
    }
    let doc = LayoutDocument::new(args.method.name(), letter, layout);
    write_text(args.out.as_deref(), &(layout_json(&doc) + "\n"))
}

fn sim_failure(e: SimError) -> Failure {
    match e {
        SimError::InvalidConfig(_) | SimError::Json(_) | SimError::EmptyScene => Failure::parse(e),
        _ => Failure::layout(e),
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let scene = match &args.scene {
        Some(path) => SceneSource::Fixed {
            scene: load_scene(path)?,
        },
        None => SceneSource::Generated {
            n_objects: args.objects,
            preset: args.preset,
            skew: 0.0,
        },
    };
    let mut cfg = CompareConfig::new(scene, args.method.clone(), args.trials, args.seed);
    cfg.pipeline = args.tuning.pipeline(Method::Ec3);
    cfg.limits = Limits {
        max_seconds: args.max_seconds,
        tick_hz: args.tuning.tick_hz,
    };
    let report = compare_methods(&cfg).map_err(sim_failure)?;
    if let Some(dir) = &args.out {
        write_report(dir, &report).map_err(sim_failure)?;
    }
    print!("{}", format_table(&report));
    Ok(())
}

fn cmd_serve(args: &ServeArgs) -> Result<(), Failure> {
    let scene = args.scene.as_deref().map(load_scene).transpose()?;
    let listener = TcpListener::bind(&args.bind).map_err(|e| Failure::parse(format!("{}: {e}", args.bind)))?;
    let addr = listener.local_addr().map_err(Failure::parse)?;
    eprintln!("listening on {addr}");
    serve(listener, args.tuning.pipeline(Method::Ec3), args.tuning.tick_hz, scene).map_err(Failure::layout)
}

fn cmd_scene(args: &SceneArgs) -> Result<(), Failure> {
    let spec = SceneSpec {
        seed: args.seed,
        n_objects: args.objects,
        preset: args.preset,
        skew: args.skew,
    };
    let scene = generate_scene(&spec).map_err(Failure::parse)?;
    write_text(args.out.as_deref(), &(scene.to_json() + "\n"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Layout(a) => cmd_layout(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Serve(a) => cmd_serve(a),
        Command::Scene(a) => cmd_scene(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
