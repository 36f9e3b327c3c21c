//! Subcommand implementations. Parameters are validated before any image
//! is read.

use std::path::{Path, PathBuf};

use snakelet_core::eval::{ellipse_contour, make_breaks, render, score, u_shape, BreakSpec, FadingDisk, Metrics};
use snakelet_core::gvf::GvfState;
use snakelet_core::line::supercover_polyline;
use snakelet_core::recovery::GRADIENT_ZERO_FRACTILE;
use snakelet_core::{
    canny_detect, detect, gradient_of, nonmax_suppress, rasterize, recover, to_grayscale, BinaryEdgeMap,
    RasterImage, SnakeletSet, SnakeletState,
};

use crate::cli::{CannyArgs, DetectArgs, EvalArgs, Export, GvfArgs, Mode, OutputArgs, RecoverArgs, Shape};
use crate::error::CliError;
use crate::formats::{chain_svg, field_components, format_metrics, format_records, snakelet_svg};
use crate::io::{load_image, to_byte, write_edges, write_pgm, write_png, write_text};

pub fn canny(args: &CannyArgs) -> Result<(), CliError> {
    let th = args.th.thresholds()?;
    let img = load_image(&args.input)?;
    let edges = canny_detect(&img, args.th.sigma, th)?;
    write_edges(&args.output, &edges)?;
    println!("edge pixels: {}", edges.count());
    Ok(())
}

/// Binary edge map of an image, thresholding at 0.5 if it is not binary.
fn binarize(img: &RasterImage, path: &Path) -> Result<BinaryEdgeMap, CliError> {
    let gray = to_grayscale(img)?;
    if gray.data().iter().any(|&v| v != 0.0 && v != 1.0) {
        eprintln!("warning: {} is not binary; thresholding at 0.5", path.display());
    }
    Ok(BinaryEdgeMap::from_threshold(&gray, 0.5))
}

fn write_snakelets(out: &OutputArgs, output: &Path, set: &SnakeletSet, svg: Option<String>) -> Result<(), CliError> {
    let records = out.records.clone().unwrap_or_else(|| output.with_extension("txt"));
    write_text(&records, &format_records(set))?;
    let want_svg = svg.is_some() || out.export.contains(&Export::Svg);
    if want_svg {
        let path = out.svg.clone().unwrap_or_else(|| output.with_extension("svg"));
        write_text(&path, &svg.unwrap_or_else(|| snakelet_svg(set)))?;
    }
    Ok(())
}

fn state_counts(set: &SnakeletSet) -> (usize, usize) {
    let reached = set.snakelets.iter().filter(|s| s.state == SnakeletState::Reached).count();
    let discarded = set.snakelets.iter().filter(|s| s.state == SnakeletState::Discarded).count();
    (reached, discarded)
}

pub fn recover_cmd(args: &RecoverArgs) -> Result<(), CliError> {
    let snake = args.snake.params();
    let params = args.recovery.params();
    params.validate(&snake)?;
    if !(args.sigma >= 0.0) || !args.sigma.is_finite() {
        return Err(CliError::Usage("--sigma must be >= 0".into()));
    }
    let edges = binarize(&load_image(&args.input)?, &args.input)?;
    let grad = match &args.gradient_image {
        Some(p) => Some(gradient_of(&load_image(p)?, args.sigma)?),
        None => None,
    };
    let out = recover(&edges, &params, &snake, grad.as_ref())?;
    write_edges(&args.output, &out.recovered)?;
    write_snakelets(&args.out, &args.output, &out.set, None)?;
    let (reached, discarded) = state_counts(&out.set);
    println!(
        "endpoints: {} reached: {reached} discarded: {discarded} expansion rounds: {} gvf iterations: {}",
        out.set.len(),
        out.expansion_rounds,
        out.gvf_iterations
    );
    Ok(())
}

/// Gray NMS image with the snakelets drawn in red.
pub fn overlay(nms: &RasterImage, set: &SnakeletSet) -> Vec<u8> {
    let (w, h) = (nms.width(), nms.height());
    let mut rgb = Vec::with_capacity(w * h * 3);
    for &v in nms.data() {
        let b = to_byte(v);
        rgb.extend([b, b, b]);
    }
    for s in &set.snakelets {
        supercover_polyline(&s.points, w, h, |p| {
            let i = 3 * (p.y * w + p.x);
            rgb[i..i + 3].copy_from_slice(&[255, 0, 0]);
        });
    }
    rgb
}

pub fn detect_cmd(args: &DetectArgs) -> Result<(), CliError> {
    let params = args.params.params()?;
    let img = load_image(&args.input)?;
    let set = detect(&img, &params)?;
    write_edges(&args.output, &rasterize(&set))?;
    let svg = args.merge_chains.then(|| chain_svg(&set));
    write_snakelets(&args.out, &args.output, &set, svg)?;
    if let Some(path) = &args.overlay {
        let nms = nonmax_suppress(&gradient_of(&img, params.sigma)?);
        write_png(path, img.width(), img.height(), 3, &overlay(&nms, &set))?;
    }
    println!(
        "snakelets: {} chains: {} recovered: {} edge pixels: {}",
        set.len(),
        set.merged_chains().len(),
        set.recovered,
        rasterize(&set).count()
    );
    Ok(())
}

/// Generated fixture: the image or edge map to run on, the ground truth
/// and the gaps to close.
struct Fixture {
    input: Input,
    truth: BinaryEdgeMap,
    gaps: Vec<Vec<snakelet_core::Pixel>>,
}

enum Input {
    Edges(BinaryEdgeMap),
    Image(RasterImage),
}

fn fixture(args: &EvalArgs) -> Result<Fixture, CliError> {
    let n = args.size;
    if n < 32 {
        return Err(CliError::Usage("--size must be at least 32".into()));
    }
    let s = n as f64;
    let (cx, cy) = (s / 2.0, s / 2.0);
    let disk = FadingDisk {
        width: n,
        height: n,
        cx,
        cy,
        radius: 0.3125 * s,
        fade_angle: 0.0,
        fade_len: 10.0,
        ramp_len: 15.0,
        min_contrast: 0.02,
    };
    let (a, b) = (0.4 * s, 0.275 * s);
    let truth = match args.shape {
        Shape::Ellipse => BinaryEdgeMap::from_pixels(n, n, ellipse_contour(n, n, cx, cy, a, b)),
        Shape::U => u_shape(n, n, cx, 0.54 * s, 0.21 * s, 0.42 * s),
        Shape::Disk => disk.contour(),
    };
    match args.mode {
        Mode::Recover => {
            let spec = BreakSpec {
                separation: args.separation,
                ..BreakSpec::new(args.breaks, args.min_break, args.max_break, args.seed)
            };
            let (broken, gaps) = make_breaks(&truth, &spec)?;
            Ok(Fixture {
                input: Input::Edges(broken),
                truth,
                gaps,
            })
        }
        Mode::Detect => match args.shape {
            Shape::Ellipse => {
                let img = render(n, n, 4, |x, y| {
                    let r = ((x - cx) / a).powi(2) + ((y - cy) / b).powi(2);
                    if r <= 1.0 { 0.8 } else { 0.2 }
                });
                Ok(Fixture {
                    input: Input::Image(img),
                    truth,
                    gaps: Vec::new(),
                })
            }
            Shape::Disk => Ok(Fixture {
                input: Input::Image(disk.image()),
                truth,
                gaps: vec![disk.faded_pixels()],
            }),
            Shape::U => Err(CliError::Usage("the u fixture supports recover mode only".into())),
        },
    }
}

pub fn eval_cmd(args: &EvalArgs) -> Result<(), CliError> {
    let params = args.params.params()?;
    let recovery = args.params.recovery.params();
    if !(args.tolerance >= 0.0) {
        return Err(CliError::Usage("--tolerance must be >= 0".into()));
    }
    let fx = fixture(args)?;
    let (result, set) = match &fx.input {
        Input::Edges(edges) => {
            let out = recover(edges, &recovery, &params.snake, None)?;
            (out.recovered, out.set)
        }
        Input::Image(img) => {
            let set = detect(img, &params)?;
            (rasterize(&set), set)
        }
    };
    let m = score(&result, &fx.truth, args.tolerance, &fx.gaps)?;
    let (reached, discarded) = state_counts(&set);
    let extra = [
        ("shape", format!("{:?}", args.shape).to_lowercase()),
        ("mode", format!("{:?}", args.mode).to_lowercase()),
        ("seed", args.seed.to_string()),
        ("gaps", fx.gaps.len().to_string()),
        ("snakelets", set.len().to_string()),
        ("reached", reached.to_string()),
        ("discarded", discarded.to_string()),
    ];
    let report = format_metrics(&m, &extra);
    print!("{report}");
    if let Some(path) = &args.report {
        write_text(path, &report)?;
    }
    check_bounds(&m, args.assert_f1, args.assert_gap_closure)
}

fn check_bounds(m: &Metrics, f1: Option<f64>, gap: Option<f64>) -> Result<(), CliError> {
    if let Some(bound) = f1 {
        if !(m.f1 >= bound) {
            return Err(CliError::Assertion(format!("f1 {:.6} < {bound}", m.f1)));
        }
    }
    if let Some(bound) = gap {
        if !(m.gap_closure_rate >= bound) {
            return Err(CliError::Assertion(format!("gap_closure_rate {:.6} < {bound}", m.gap_closure_rate)));
        }
    }
    Ok(())
}

fn dump_path(prefix: &Path, component: &str, iters: usize) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(format!("_{component}_{iters}.pgm"));
    PathBuf::from(name)
}

pub fn gvf_cmd(args: &GvfArgs) -> Result<(), CliError> {
    if !(args.mu > 0.0 && args.mu <= 0.25) {
        return Err(CliError::Usage("--mu must lie in (0, 0.25]".into()));
    }
    if args.iters.is_empty() {
        return Err(CliError::Usage("--iters needs at least one count".into()));
    }
    if !(args.sigma >= 0.0) || !args.sigma.is_finite() {
        return Err(CliError::Usage("--sigma must be >= 0".into()));
    }
    let img = load_image(&args.input)?;
    let (source, fractile) = if args.nms {
        (nonmax_suppress(&gradient_of(&img, args.sigma)?), GRADIENT_ZERO_FRACTILE)
    } else {
        (to_grayscale(&img)?, 0.0)
    };
    let mut state = GvfState::init(&source, args.mu)?;
    let mut iters = args.iters.clone();
    iters.sort_unstable();
    iters.dedup();
    for n in iters {
        state.iterate_in_place(n - state.iterations_done);
        let (u, v) = field_components(&state.normalized(fractile)?);
        write_pgm(&dump_path(&args.prefix, "u", n), img.width(), img.height(), &u)?;
        write_pgm(&dump_path(&args.prefix, "v", n), img.width(), img.height(), &v)?;
    }
    Ok(())
}
