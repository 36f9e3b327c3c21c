//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use snakelet_core::{DetectParams, RecoveryParams, SnakeletParams, Thresholds};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "snakelet", version, about = "Edge detection and broken-edge recovery with snakelets")]
pub struct Cli {
    /// key=value file of flag defaults; flags on the command line win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classic Canny edge detection
    Canny(CannyArgs),
    /// Close breaks in a binary edge map
    Recover(RecoverArgs),
    /// Seeded edge detection with growing snakelets
    Detect(DetectArgs),
    /// Score recovery or detection on a generated fixture
    Eval(EvalArgs),
    /// Dump GVF components as PGM images
    Gvf(GvfArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    /// Gaussian smoothing scale in pixels
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// High hysteresis threshold on NMS magnitude
    #[arg(long, default_value_t = 0.2)]
    pub th: f64,
    /// Low hysteresis threshold on NMS magnitude
    #[arg(long, default_value_t = 0.05)]
    pub tl: f64,
}

impl ThresholdArgs {
    pub fn thresholds(&self) -> Result<Thresholds, CliError> {
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(CliError::Usage("--sigma must be >= 0".into()));
        }
        Ok(Thresholds::new(self.th, self.tl)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SnakeArgs {
    /// Tension weight (calibrated)
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Rigidity weight (calibrated)
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Gradient gain of the growth step (calibrated)
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    /// Point spacing along a snakelet in pixels (calibrated)
    #[arg(long, default_value_t = 2.0)]
    pub spacing: f64,
    /// External force weight (calibrated)
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// Growth step per iteration in pixels (calibrated)
    #[arg(long, default_value_t = 2.0)]
    pub step: f64,
}

impl SnakeArgs {
    pub fn params(&self) -> SnakeletParams {
        SnakeletParams {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            spacing: self.spacing,
            kappa: self.kappa,
            step: self.step,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RecoveryArgs {
    /// Initial snakelet length in pixels traced back from each endpoint
    /// (20 to 30 is typical)
    #[arg(long, default_value_t = 25)]
    pub init_length: usize,
    /// Maximum growing length in pixels; wider breaks stay open
    #[arg(long, default_value_t = 70.0)]
    pub max_grow: f64,
    /// GVF iterations before the first attempt (3 to 5 is typical)
    #[arg(long, default_value_t = 5)]
    pub gvf_init_iters: usize,
    /// GVF iterations added per expansion round (calibrated)
    #[arg(long, default_value_t = 5)]
    pub gvf_expand_step: usize,
    /// Total GVF iteration budget (calibrated)
    #[arg(long, default_value_t = 50)]
    pub gvf_max_iters: usize,
    /// Distance in pixels at which a growing end snaps to an edge (calibrated)
    #[arg(long, default_value_t = 1.5)]
    pub snap: f64,
    /// GVF smoothness weight, at most 0.25 (calibrated)
    #[arg(long, default_value_t = 0.2)]
    pub mu: f64,
}

impl RecoveryArgs {
    pub fn params(&self) -> RecoveryParams {
        RecoveryParams {
            init_length: self.init_length,
            max_grow: self.max_grow,
            gvf_init_iters: self.gvf_init_iters,
            gvf_expand_step: self.gvf_expand_step,
            gvf_max_iters: self.gvf_max_iters,
            snap: self.snap,
            mu: self.mu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Export {
    /// SVG 1.1 polylines
    Svg,
    /// Snakelet records (always written)
    Records,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Snakelet record file [default: OUTPUT with extension .txt]
    #[arg(long, value_name = "FILE")]
    pub records: Option<PathBuf>,
    /// Extra export formats
    #[arg(long, value_enum, value_delimiter = ',')]
    pub export: Vec<Export>,
    /// SVG destination [default: OUTPUT with extension .svg]
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CannyArgs {
    #[command(flatten)]
    pub th: ThresholdArgs,
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RecoverArgs {
    /// Original image; its NMS gradient guides growth and the GVF
    #[arg(long, value_name = "FILE")]
    pub gradient_image: Option<PathBuf>,
    /// Smoothing scale for the gradient image
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[command(flatten)]
    pub recovery: RecoveryArgs,
    #[command(flatten)]
    pub snake: SnakeArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Binary edge image
    pub input: PathBuf,
    /// Recovered edge PNG
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DetectParamArgs {
    #[command(flatten)]
    pub th: ThresholdArgs,
    /// Length a seed snakelet grows before others can stop it (calibrated)
    #[arg(long, default_value_t = 12.0)]
    pub seed_init_length: f64,
    /// Length at which a snakelet hands over to a continuation (calibrated)
    #[arg(long, default_value_t = 40.0)]
    pub chain_max_grow: f64,
    /// GVF iterations over the NMS image (3 to 5 is typical)
    #[arg(long, default_value_t = 4)]
    pub gvf_iters: usize,
    /// Radius in pixels around snakelets that suppresses seeds (calibrated)
    #[arg(long, default_value_t = 2)]
    pub coverage_radius: usize,
    /// Skip the closing recovery pass
    #[arg(long)]
    pub no_recovery: bool,
    #[command(flatten)]
    pub recovery: RecoveryArgs,
    #[command(flatten)]
    pub snake: SnakeArgs,
}

impl DetectParamArgs {
    pub fn params(&self) -> Result<DetectParams, CliError> {
        let recovery = self.recovery.params();
        let p = DetectParams {
            sigma: self.th.sigma,
            th: self.th.thresholds()?,
            seed_init_length: self.seed_init_length,
            chain_max_grow: self.chain_max_grow,
            gvf_iters: self.gvf_iters,
            coverage_radius: self.coverage_radius,
            snap: recovery.snap,
            snake: self.snake.params(),
            recovery: (!self.no_recovery).then_some(recovery),
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub params: DetectParamArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Export one polyline per chain of linked snakelets to the SVG
    #[arg(long)]
    pub merge_chains: bool,
    /// RGB PNG of the snakelets drawn over the NMS image
    #[arg(long, value_name = "FILE")]
    pub overlay: Option<PathBuf>,
    /// Gray or RGB image
    pub input: PathBuf,
    /// Rasterized snakelets as an edge PNG
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    /// Ellipse outline
    Ellipse,
    /// Open U: two arms joined by a half circle
    U,
    /// Disk; in detect mode its rim fades to near zero contrast over a
    /// short arc
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Recover,
    Detect,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value = "ellipse")]
    pub shape: Shape,
    #[arg(long, value_enum, default_value = "recover")]
    pub mode: Mode,
    /// Fixture width and height in pixels
    #[arg(long, default_value_t = 200)]
    pub size: usize,
    /// Number of breaks cut into the contour (recover mode)
    #[arg(long, default_value_t = 3)]
    pub breaks: usize,
    #[arg(long, default_value_t = 5)]
    pub min_break: usize,
    #[arg(long, default_value_t = 25)]
    pub max_break: usize,
    /// Edge pixels kept between breaks and away from curve ends
    #[arg(long, default_value_t = 30)]
    pub separation: usize,
    /// Seed of the break placement
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Matching tolerance in pixels
    #[arg(long, default_value_t = 2.0)]
    pub tolerance: f64,
    /// Also write the report to this file
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Fail with exit code 1 if F1 is below this bound
    #[arg(long)]
    pub assert_f1: Option<f64>,
    /// Fail with exit code 1 if the gap-closure rate is below this bound
    #[arg(long)]
    pub assert_gap_closure: Option<f64>,
    #[command(flatten)]
    pub params: DetectParamArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GvfArgs {
    /// Iteration counts to dump
    #[arg(long, value_delimiter = ',', default_value = "3,10")]
    pub iters: Vec<usize>,
    /// GVF smoothness weight, in (0, 0.25]
    #[arg(long, default_value_t = 0.2)]
    pub mu: f64,
    /// Build the field from the NMS gradient of the image instead of the
    /// image itself
    #[arg(long)]
    pub nms: bool,
    /// Smoothing scale for --nms
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Edge image (or any image with --nms)
    pub input: PathBuf,
    /// Output prefix; writes PREFIX_u_N.pgm and PREFIX_v_N.pgm
    pub prefix: PathBuf,
}
