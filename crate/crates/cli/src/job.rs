//! Pipeline orchestration behind the subcommands.

use std::path::Path;

use serde::Serialize;

use seamcut::blend::{composite_naive, poisson_fuse};
use seamcut::evaluation::evaluate;
use seamcut::graphcut::{extract_seam, Seam};
use seamcut::homography::{plan_canvas, warp_target};
use seamcut::metrics::{save_report_csv, seam_report, SeamReport};
use seamcut::refine::{self, IterationDiagnostics};
use seamcut::synth::{make_fixture, FixtureSpec};
use seamcut::{AlignedPair, Image, Mask, Result, StitchConfig, StitchError};

use crate::{ConfigOverrides, EvaluateArgs, FixtureArgs, StitchArgs};

/// Which files a stitch run writes.
#[derive(Debug, Clone, Copy, Default)]
struct EmitSet {
    composite: bool,
    naive: bool,
    seam_overlay: bool,
    signals_csv: bool,
    report_json: bool,
    labeling: bool,
    iter_overlays: bool,
}

fn parse_emit(list: &str) -> Result<EmitSet> {
    let mut set = EmitSet::default();
    for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token {
            "composite" => set.composite = true,
            "naive" => set.naive = true,
            "seam-overlay" => set.seam_overlay = true,
            "signals-csv" => set.signals_csv = true,
            "report-json" => set.report_json = true,
            "labeling" => set.labeling = true,
            "iter-overlays" => set.iter_overlays = true,
            "all" => {
                set = EmitSet {
                    composite: true,
                    naive: true,
                    seam_overlay: true,
                    signals_csv: true,
                    report_json: true,
                    labeling: true,
                    iter_overlays: true,
                }
            }
            other => {
                return Err(StitchError::Format(format!(
                    "unknown emit target `{other}`"
                )))
            }
        }
    }
    Ok(set)
}

/// Precedence: CLI flag > config file > built-in default.
fn resolve_config(overrides: &ConfigOverrides) -> Result<StitchConfig> {
    let mut cfg = match &overrides.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| StitchError::Io {
                path: path.clone(),
                source: e,
            })?;
            serde_json::from_str(&text)
                .map_err(|e| StitchError::Format(format!("config file: {e}")))?
        }
        None => StitchConfig::default(),
    };
    if let Some(v) = overrides.patch_size {
        cfg.patch_size = v;
    }
    if let Some(v) = overrides.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = overrides.sigma {
        cfg.sigma = v;
    }
    if let Some(v) = overrides.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = overrides.band_radius {
        cfg.band_radius = v;
    }
    if let Some(v) = overrides.max_iter {
        cfg.max_iterations = v;
    }
    if let Some(v) = overrides.smoothing {
        cfg.smoothing = v;
    }
    if let Some(v) = overrides.poisson_tolerance {
        cfg.poisson_tolerance = v;
    }
    if overrides.no_compounding {
        cfg.compounding = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Copies `img` onto a larger canvas at the given offset and returns the
/// placed image with its footprint mask.
fn place_on_canvas(img: &Image, w: u32, h: u32, ox: u32, oy: u32) -> (Image, Mask) {
    let mut placed = Image::new(w, h);
    for y in 0..img.height() {
        for x in 0..img.width() {
            placed.set_pixel(ox + x, oy + y, img.pixel(x, y));
        }
    }
    let mask = Mask::from_rect(w, h, ox, oy, ox + img.width(), oy + img.height());
    (placed, mask)
}

/// Loads the pair and aligns the target: with a homography the canvas is
/// the bounding box of both footprints and the target is warped onto it;
/// without one the images sit at the origin of a shared canvas.
fn ingest_pair(
    reference: &Path,
    target: &Path,
    homography: Option<&Path>,
) -> Result<AlignedPair> {
    let ref_img = seamcut::io::load_image(reference)?;
    let target_img = seamcut::io::load_image(target)?;
    match homography {
        Some(path) => {
            let h = seamcut::io::load_homography(path)?;
            let plan = plan_canvas(
                ref_img.width(),
                ref_img.height(),
                target_img.width(),
                target_img.height(),
                &h,
            )?;
            let (placed_ref, mask0) = place_on_canvas(
                &ref_img,
                plan.width,
                plan.height,
                plan.ref_offset.0,
                plan.ref_offset.1,
            );
            let (warped, mask1) =
                warp_target(&target_img, &plan.target_to_canvas, plan.width, plan.height)?;
            AlignedPair::new(placed_ref, mask0, warped, mask1)
        }
        None => {
            let w = ref_img.width().max(target_img.width());
            let h = ref_img.height().max(target_img.height());
            let (placed_ref, mask0) = place_on_canvas(&ref_img, w, h, 0, 0);
            let (placed_target, mask1) = place_on_canvas(&target_img, w, h, 0, 0);
            AlignedPair::new(placed_ref, mask0, placed_target, mask1)
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| StitchError::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| StitchError::Format(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| StitchError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Top-level report of a stitch run. Field order is the JSON order;
/// nothing here depends on time or environment, so reruns are
/// byte-identical.
#[derive(Debug, Serialize)]
struct StitchReport {
    converged: bool,
    iterations: u32,
    seam_length: usize,
    q_seam: f64,
    mean_combined: f64,
    max_combined: f64,
    max_point_evaluation: f64,
    per_iteration: Vec<IterationDiagnostics>,
    seam: SeamReport,
    config: StitchConfig,
}

pub fn run_stitch(args: StitchArgs) -> Result<()> {
    let emit = parse_emit(&args.emit)?;
    let cfg = resolve_config(&args.overrides)?;
    ensure_dir(&args.out)?;

    let pair = ingest_pair(&args.reference, &args.target, args.homography.as_deref())?;
    let outcome = refine::run(&pair, &cfg)?;
    let seam = &outcome.seam;
    let final_signal = outcome
        .state
        .signals
        .last()
        .expect("refine always records at least one iteration");

    // Gradient-domain fusion needs a mixed labeling; a constant labeling
    // (coincident footprints) falls back to the naive copy.
    let naive = composite_naive(&pair, &outcome.labeling)?;
    let fused = if outcome.labeling.is_mixed() {
        poisson_fuse(&pair, &outcome.labeling, &cfg)?
    } else {
        naive.clone()
    };

    if emit.composite {
        seamcut::io::save_image(&fused.image, &args.out.join("composite.png"))?;
    }
    if emit.naive {
        seamcut::io::save_image(&naive.image, &args.out.join("naive.png"))?;
    }
    if emit.seam_overlay {
        seamcut::io::save_overlay(
            &fused.image,
            seam,
            final_signal,
            &args.out.join("seam_overlay.png"),
        )?;
    }
    if emit.labeling {
        seamcut::io::save_labeling(
            &outcome.labeling,
            pair.region(),
            &args.out.join("labeling.png"),
            &args.out.join("labeling.json"),
        )?;
    }
    if emit.signals_csv {
        for (i, signal) in outcome.state.signals.iter().enumerate() {
            let name = format!("signals_{:03}.csv", i + 1);
            seamcut::io::save_signals_csv(signal, &args.out.join(name))?;
        }
    }
    if emit.iter_overlays {
        for (i, iter_seam) in outcome.state.seams.iter().enumerate() {
            let name = format!("iter_overlay_{:03}.png", i + 1);
            seamcut::io::save_overlay(
                &naive.image,
                iter_seam,
                &outcome.state.signals[i],
                &args.out.join(name),
            )?;
        }
    }
    if emit.report_json {
        let report = seam_report(seam, final_signal, pair.reference(), pair.target(), &cfg)?;
        let stitch_report = StitchReport {
            converged: outcome.state.converged,
            iterations: outcome.state.iterations,
            seam_length: seam.len(),
            q_seam: report.q_seam,
            mean_combined: final_signal.mean_combined(),
            max_combined: final_signal.max_combined(),
            max_point_evaluation: final_signal.max_point(),
            per_iteration: outcome.state.diagnostics.clone(),
            seam: report,
            config: cfg.clone(),
        };
        write_json(&stitch_report, &args.out.join("report.json"))?;
    }
    Ok(())
}

pub fn run_evaluate(args: EvaluateArgs) -> Result<()> {
    let cfg = resolve_config(&args.overrides)?;
    ensure_dir(&args.out)?;
    let pair = ingest_pair(&args.reference, &args.target, args.homography.as_deref())?;
    let sidecar = args
        .sidecar
        .clone()
        .unwrap_or_else(|| args.labeling.with_extension("json"));
    let labeling = seamcut::io::load_labeling(&args.labeling, &sidecar, pair.region())?;
    let seam: Seam = match extract_seam(&labeling, pair.region()) {
        Ok(seam) => seam,
        Err(StitchError::EmptySeam) => {
            return Err(StitchError::Format(
                "labeling carries a single label; there is no seam to evaluate".into(),
            ))
        }
        Err(other) => return Err(other),
    };
    let signal = evaluate(&seam, pair.reference(), pair.target(), &cfg)?;
    let report = seam_report(&seam, &signal, pair.reference(), pair.target(), &cfg)?;
    write_json(&report, &args.out.join("report.json"))?;
    seamcut::io::save_signals_csv(&signal, &args.out.join("signals.csv"))?;
    save_report_csv(&report, &args.out.join("crossings.csv"))?;
    Ok(())
}

pub fn run_fixture(args: FixtureArgs) -> Result<()> {
    let spec: FixtureSpec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| StitchError::Io {
                path: path.clone(),
                source: e,
            })?;
            serde_json::from_str(&text)
                .map_err(|e| StitchError::Format(format!("fixture spec: {e}")))?
        }
        None => FixtureSpec::default(),
    };
    let fixture = make_fixture(&spec)?;
    fixture.write_to_dir(&args.out)
}
