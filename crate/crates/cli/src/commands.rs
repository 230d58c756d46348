use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use fresh_core::experiments::{grid_search, residual_spectrum_ratio, train_image, write_ratio_csv, TrainConfig};
use fresh_core::inr::{frequency_magnitudes, load_checkpoint, save_checkpoint};
use fresh_core::{
    init_model, load_png, make_coord_grid, resample_square, save_png, select, spectrum_full, CandidateGrid,
    Image, InrModel, SelectionParams, SelectionReport,
};

use crate::args::{AnalyzeArgs, Cli, Command, CommonArgs, ModelArgs, SelectArgs, SelectionArgs, SweepArgs, TrainArgs, TrainingArgs};
use crate::grid::parse_grid;

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_DEGENERATE: u8 = 2;
pub const EXIT_DIVERGED: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_NO_INPUT: u8 = 66;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    MissingFile(PathBuf),
    Write { path: PathBuf, source: std::io::Error },
    Core(fresh_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::MissingFile(p) => write!(f, "no such file: {}", p.display()),
            CliError::Write { path, source } => write!(f, "cannot write {}: {source}", path.display()),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fresh_core::Error> for CliError {
    fn from(e: fresh_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub fn exit_code(e: &CliError) -> u8 {
    use fresh_core::Error as E;
    match e {
        CliError::Usage(_) => EXIT_USAGE,
        CliError::MissingFile(_) => EXIT_NO_INPUT,
        CliError::Write { .. } => EXIT_FAILURE,
        CliError::Core(core) => match core {
            E::Degenerate(_) => EXIT_DEGENERATE,
            E::Diverged { .. } => EXIT_DIVERGED,
            E::InvalidArgument(_) | E::ShapeMismatch(_) => EXIT_USAGE,
            E::Decode { .. } | E::UnsupportedPng { .. } | E::Checkpoint(_) | E::Json(_) => EXIT_DATA,
            E::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => EXIT_NO_INPUT,
            _ => EXIT_FAILURE,
        },
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Select(a) => cmd_select(a),
        Command::Train(a) => cmd_train(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Analyze(a) => cmd_analyze(a),
    }
}

fn read_image(path: &Path) -> CliResult<Image> {
    if !path.exists() {
        return Err(CliError::MissingFile(path.to_path_buf()));
    }
    Ok(load_png(path)?)
}

fn out_dir(common: &CommonArgs) -> CliResult<&Path> {
    fs::create_dir_all(&common.out).map_err(|source| CliError::Write {
        path: common.out.clone(),
        source,
    })?;
    Ok(&common.out)
}

fn write_file(path: PathBuf, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    let result = File::create(&path).and_then(|f| {
        let mut w = BufWriter::new(f);
        body(&mut w)?;
        w.flush()
    });
    result.map_err(|source| CliError::Write { path, source })
}

fn candidate_grid(model: &ModelArgs, selection: &SelectionArgs) -> CliResult<CandidateGrid> {
    let kind = model.kind();
    let values = match &selection.grid {
        None => CandidateGrid::default_for(kind).swept_values(),
        Some(spec) => parse_grid(spec).map_err(|e| CliError::Usage(format!("--grid: {e}")))?,
    };
    let configs = values.into_iter().map(|v| kind.config(v, model.finer_omega())).collect();
    Ok(CandidateGrid::new(configs)?)
}

fn selection_params(model: &ModelArgs, selection: &SelectionArgs, seed: u64) -> SelectionParams {
    SelectionParams {
        spectrum_size: selection.n,
        repeats: selection.repeats,
        resolution: selection.resolution,
        arch: model.architecture(),
        seed,
        jobs: selection.jobs.max(1),
    }
}

fn train_config(model: &ModelArgs, training: &TrainingArgs, seed: u64) -> TrainConfig {
    TrainConfig {
        steps: training.steps,
        log_every: training.log_every,
        lr: training.lr,
        batch_size: training.batch_size,
        seed,
        arch: model.architecture(),
    }
}

fn run_selection(
    image: &Image,
    model: &ModelArgs,
    selection: &SelectionArgs,
    common: &CommonArgs,
) -> CliResult<SelectionReport> {
    let grid = candidate_grid(model, selection)?;
    let report = select(&grid, image, &selection_params(model, selection, common.seed))?;
    let dir = out_dir(common)?;
    write_file(dir.join("selection.csv"), |w| report.write_csv(w))?;
    let json = report.to_json()?;
    write_file(dir.join("selection.json"), |w| w.write_all(json.as_bytes()))?;
    Ok(report)
}

fn cmd_select(a: SelectArgs) -> CliResult<()> {
    let image = read_image(&a.image)?;
    let report = run_selection(&image, &a.model, &a.selection, &a.common)?;
    let best = report.chosen_score();
    println!(
        "chosen {} (W = {:.6} +/- {:.6})",
        report.chosen, best.mean, best.se
    );
    Ok(())
}

fn save_training(dir: &Path, model: &InrModel<f32>, image: &Image, report: &fresh_core::experiments::TrainReport) -> CliResult<()> {
    write_file(dir.join("train.csv"), |w| report.write_csv(w))?;
    let json = serde_json::to_string_pretty(report).map_err(fresh_core::Error::from)?;
    write_file(dir.join("train.json"), |w| w.write_all(json.as_bytes()))?;
    let render = model.render(&make_coord_grid(image.height(), image.width()));
    save_png(&render.clamped(), dir.join("reconstruction.png"))?;
    save_checkpoint(model, dir.join("checkpoint.json"))?;
    Ok(())
}

fn cmd_train(a: TrainArgs) -> CliResult<()> {
    let image = read_image(&a.image)?;
    let config = if a.fresh {
        let report = run_selection(&image, &a.model, &a.selection, &a.common)?;
        println!("selected {}", report.chosen);
        report.chosen
    } else {
        a.model.explicit_config()
    };
    let train = train_config(&a.model, &a.training, a.common.seed);
    let (model, report) = train_image(config, &image, &train)?;
    save_training(out_dir(&a.common)?, &model, &image, &report)?;
    match report.final_ssim {
        Some(s) => println!("{config}: PSNR {:.2} dB, SSIM {s:.4}", report.final_psnr()),
        None => println!("{config}: PSNR {:.2} dB", report.final_psnr()),
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> CliResult<()> {
    let image = read_image(&a.image)?;
    let grid = candidate_grid(&a.model, &a.selection)?;
    let selection = run_selection(&image, &a.model, &a.selection, &a.common)?;
    let train = train_config(&a.model, &a.training, a.common.seed);
    let sweep = grid_search(&grid, &image, &train, a.selection.jobs.max(1))?;
    let dir = out_dir(&a.common)?;
    write_file(dir.join("sweep.csv"), |w| sweep.write_csv(w))?;
    let json = sweep.to_json()?;
    write_file(dir.join("sweep.json"), |w| w.write_all(json.as_bytes()))?;

    for e in &sweep.entries {
        match (&e.report, &e.failure) {
            (Some(r), _) => println!("{}: PSNR {:.2} dB", e.config, r.final_psnr()),
            (None, Some(msg)) => println!("{}: failed ({msg})", e.config),
            (None, None) => {}
        }
    }
    let best = sweep.best_entry().and_then(|b| b.final_psnr().map(|p| (b.config, p)));
    let picked = sweep.entry_for(&selection.chosen).and_then(|e| e.final_psnr());
    match (best, picked) {
        (Some((cfg, best_psnr)), Some(p)) => println!(
            "best {cfg} at {best_psnr:.2} dB; selected {} at {p:.2} dB (gap {:.2} dB)",
            selection.chosen,
            best_psnr - p
        ),
        (Some((cfg, best_psnr)), None) => {
            println!("best {cfg} at {best_psnr:.2} dB; selected {} failed to train", selection.chosen)
        }
        (None, _) => println!("every candidate failed to train"),
    }
    Ok(())
}

fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, c))
        .collect()
}

fn cmd_analyze(a: AnalyzeArgs) -> CliResult<()> {
    if a.bins == 0 {
        return Err(CliError::Usage("--bins must be positive".into()));
    }
    let dir = out_dir(&a.common)?.to_path_buf();
    let image = a.image.as_deref().map(read_image).transpose()?;
    if let Some(img) = &image {
        let square = if img.is_square() {
            img.clone()
        } else {
            resample_square(img, a.resolution)?
        };
        let s = spectrum_full(&square)?;
        write_file(dir.join("spectrum.csv"), |w| s.write_csv(w))?;
    }

    let load = |p: &PathBuf| -> CliResult<InrModel<f32>> {
        if !p.exists() {
            return Err(CliError::MissingFile(p.clone()));
        }
        Ok(load_checkpoint(p)?)
    };
    let model = match &a.checkpoint {
        Some(p) => load(p)?,
        None => init_model::<f32>(a.model.explicit_config(), a.model.architecture().with_channels(1), a.common.seed)?,
    };
    let mags = frequency_magnitudes(&model);
    write_file(dir.join("magnitudes.csv"), |w| {
        writeln!(w, "unit,magnitude")?;
        for (i, m) in mags.iter().enumerate() {
            writeln!(w, "{i},{m}")?;
        }
        Ok(())
    })?;
    let hist = histogram(&mags, a.bins);
    write_file(dir.join("magnitude_hist.csv"), |w| {
        writeln!(w, "lower,upper,count")?;
        for (lo, hi, c) in &hist {
            writeln!(w, "{lo},{hi},{c}")?;
        }
        Ok(())
    })?;

    if let Some(base) = &a.baseline {
        let target = image
            .as_ref()
            .ok_or_else(|| CliError::Usage("--baseline needs --image as the target".into()))?;
        let other = load(base)?;
        let grid = make_coord_grid(target.height(), target.width());
        let ratio = residual_spectrum_ratio(&model.render(&grid), &other.render(&grid), target, a.n, a.resolution)?;
        write_file(dir.join("residual_ratio.csv"), |w| write_ratio_csv(&ratio, w))?;
    }
    println!("wrote analysis to {}", dir.display());
    Ok(())
}
