use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use speedpower_core::calmwater::{fit_with_detection, CalmWaterModel, FitDiagnostics};
use speedpower_core::data::{
    calm_weather_subset, emit_csv, filter_steady_state, generate as generate_records, ingest_csv,
    FilterCounts, SyntheticScenario,
};
use speedpower_core::eval::{
    benchmark as run_benchmark, benchmark_csv, benchmark_svg, binned_mape, bins_csv, bins_svg,
    kfold_evaluate, metrics_partial, weather_correct, BenchmarkSetup, Bin, CalmCandidate,
    KFoldReport, MetricReport, PhysicsPredictor, Predictor,
};
use speedpower_core::mlmodel::{train, FnnModel, TrainConfig};
use speedpower_core::units::{knots_to_ms, ms_to_knots};
use speedpower_core::waves::{polar_sweep as sweep, WaveTheory};
use speedpower_core::{Error as CoreError, VoyageRecord};

use crate::config::RunConfig;
use crate::seed::derive_seed;

fn out_path(cfg: &RunConfig, name: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    Ok(cfg.out_dir.join(name))
}

fn write(cfg: &RunConfig, name: &str, contents: &str) -> Result<PathBuf> {
    let path = out_path(cfg, name)?;
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn write_json<T: Serialize>(cfg: &RunConfig, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(cfg, name, &text)
}

/// Reads and steady-state filters a voyage file, reporting what was dropped.
fn load_records(cfg: &RunConfig, data: &Path) -> Result<(Vec<VoyageRecord>, IngestSummary)> {
    let ingested =
        ingest_csv(data).with_context(|| format!("reading voyage data {}", data.display()))?;
    if !ingested.report.is_empty() {
        eprintln!(
            "{}: {} rows rejected",
            data.display(),
            ingested.report.len()
        );
        for r in ingested.report.rejections.iter().take(5) {
            eprintln!("  row {}: {}", r.row, r.reason);
        }
    }
    let read = ingested.records.len();
    let filtered = filter_steady_state(&ingested.records, &cfg.filter)?;
    let summary = IngestSummary {
        rows_accepted: read,
        rows_rejected: ingested.report.len(),
        filtered_out: filtered.counts,
        kept: filtered.kept.len(),
    };
    Ok((filtered.kept, summary))
}

#[derive(Serialize)]
struct IngestSummary {
    rows_accepted: usize,
    rows_rejected: usize,
    filtered_out: FilterCounts,
    kept: usize,
}

pub fn generate(
    cfg: &RunConfig,
    scenario: Option<&Path>,
    records: usize,
    seed_overridden: bool,
) -> Result<()> {
    let scenario = match scenario {
        Some(path) => {
            let mut s = SyntheticScenario::load(path)
                .with_context(|| format!("loading scenario {}", path.display()))?;
            if seed_overridden {
                s.seed = derive_seed(cfg.seed, "generate");
            }
            s
        }
        None => {
            let mut s = SyntheticScenario::reference(records, derive_seed(cfg.seed, "generate"));
            s.vessel = cfg.vessel()?;
            s.wind = cfg.wind.clone();
            s
        }
    };
    let recs = generate_records(&scenario)?;
    let csv = out_path(cfg, "voyage.csv")?;
    emit_csv(&csv, &recs)?;
    write(cfg, "scenario.json", &format!("{}\n", scenario.to_json()?))?;
    println!("wrote {} records to {}", recs.len(), csv.display());
    Ok(())
}

#[derive(Serialize)]
struct CalmFitReport {
    input: IngestSummary,
    calm_weather_records: usize,
    dropped_non_positive: usize,
    out_of_validity: usize,
    correction_theory: String,
    breakpoints_kn: Vec<f64>,
    diagnostics: FitDiagnostics,
}

pub fn fit_calm(cfg: &RunConfig, data: &Path) -> Result<()> {
    let vessel = cfg.vessel()?;
    let (records, input) = load_records(cfg, data)?;
    let calm = calm_weather_subset(&records, &cfg.filter);
    let s = &cfg.calm_fit;
    let min_segment = s.min_segment_for(calm.len());
    let needed = ((s.breakpoints + 1) * min_segment.max(2)).max(5 + s.breakpoints);
    if calm.len() < needed {
        bail!(
            "insufficient calm-weather data: {} records with H_S <= {} m after filtering, need at least {needed}",
            calm.len(),
            cfg.filter.calm_weather_hs_max
        );
    }
    let registry = cfg.registry()?;
    let theory = registry.get(&s.correction_theory)?;
    let wind = cfg.wind.setup(&vessel)?;
    let corrected = weather_correct(&calm, &vessel, &wind, theory.as_ref(), cfg.validity_mode())?;
    let (model, diagnostics) = fit_with_detection(
        &corrected.points,
        s.breakpoints,
        s.min_segment_for(corrected.points.len()),
        s.smoothing_delta(),
    )?;

    let path = write(cfg, "calm_model.json", &format!("{}\n", model.to_json()?))?;
    let breakpoints_kn: Vec<f64> = model
        .breakpoints
        .iter()
        .map(|b| ms_to_knots(b.speed))
        .collect();
    for (i, b) in breakpoints_kn.iter().enumerate() {
        println!("breakpoint {i}: {b:.3} kn");
    }
    println!("segment exponents: {:?}", diagnostics.effective_exponents);
    write_json(
        cfg,
        "calm_fit.json",
        &CalmFitReport {
            input,
            calm_weather_records: calm.len(),
            dropped_non_positive: corrected.dropped_non_positive,
            out_of_validity: corrected.out_of_validity,
            correction_theory: s.correction_theory.clone(),
            breakpoints_kn,
            diagnostics,
        },
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct TrainReport<'a> {
    input: IngestSummary,
    config: &'a TrainConfig,
    kfold: KFoldReport,
    final_epoch_losses: Vec<f64>,
}

pub fn train_nn(cfg: &RunConfig, data: &Path) -> Result<()> {
    let (records, input) = load_records(cfg, data)?;
    let train_cfg = TrainConfig {
        seed: derive_seed(cfg.seed, "train-nn"),
        ..cfg.train.clone()
    };
    if records.len() < train_cfg.batch_size {
        bail!(
            "fewer records ({}) than the batch size ({})",
            records.len(),
            train_cfg.batch_size
        );
    }
    let trace = out_path(cfg, "nn_divergence.txt")?;
    let diverged = |stage: &str, e: CoreError| -> anyhow::Error {
        if let CoreError::TrainingDiverged { epoch } = e {
            let _ = std::fs::write(
                &trace,
                format!("stage: {stage}\nepoch: {epoch}\nconfig: {train_cfg:?}\n"),
            );
            anyhow::anyhow!(
                "training diverged during {stage} at epoch {epoch}; trace written to {}",
                trace.display()
            )
        } else {
            e.into()
        }
    };
    let kfold = kfold_evaluate(
        &records,
        cfg.eval.k_folds,
        derive_seed(cfg.seed, "kfold"),
        cfg.eval.mape_denominator,
        |fold: &[VoyageRecord]| Ok(train(fold, &train_cfg)?.model),
    )
    .map_err(|e| diverged("cross-validation", e))?;
    let outcome = train(&records, &train_cfg).map_err(|e| diverged("final training", e))?;

    let model_path = out_path(cfg, "nn_model.json")?;
    outcome.model.save(&model_path)?;
    println!(
        "batch {} / lr {} / {} epochs; {}-fold mean MAPE {:.3}%",
        train_cfg.batch_size,
        train_cfg.learning_rate,
        train_cfg.epochs,
        cfg.eval.k_folds,
        kfold.mean.mape * 100.0
    );
    write_json(
        cfg,
        "nn_report.json",
        &TrainReport {
            input,
            config: &train_cfg,
            kfold,
            final_epoch_losses: outcome.epoch_losses,
        },
    )?;
    println!("wrote {}", model_path.display());
    Ok(())
}

fn load_calm(path: &Path) -> Result<CalmWaterModel> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading calm-water model {}", path.display()))?;
    Ok(CalmWaterModel::from_json(&text)?)
}

fn selected_theories(cfg: &RunConfig) -> Result<Vec<Arc<dyn WaveTheory>>> {
    let registry = cfg.registry()?;
    let names = if cfg.eval.theories.is_empty() {
        registry.names()
    } else {
        cfg.eval.theories.clone()
    };
    Ok(names
        .iter()
        .map(|n| registry.get(n))
        .collect::<speedpower_core::Result<_>>()?)
}

pub fn benchmark(
    cfg: &RunConfig,
    data: &Path,
    calm_model: &Path,
    references: &[String],
    nn_model: Option<&Path>,
) -> Result<()> {
    let vessel = cfg.vessel()?;
    let mut calm_models = vec![CalmCandidate {
        name: "fitted".into(),
        model: load_calm(calm_model)?,
    }];
    for r in references {
        let Some((name, path)) = r.split_once('=') else {
            bail!("reference curve `{r}` must look like NAME=PATH");
        };
        calm_models.push(CalmCandidate {
            name: name.to_string(),
            model: load_calm(Path::new(path))?,
        });
    }
    let nn = match nn_model {
        Some(p) => {
            Some(FnnModel::load(p).with_context(|| format!("loading network {}", p.display()))?)
        }
        None => None,
    };
    let theories = selected_theories(cfg)?;
    let (records, _) = load_records(cfg, data)?;
    let wind = cfg.wind.setup(&vessel)?;
    let setup = BenchmarkSetup {
        vessel: &vessel,
        wind: &wind,
        theories: theories.clone(),
        calm_models: calm_models.clone(),
        nn: nn.as_ref(),
        denominator: cfg.eval.mape_denominator,
    };
    let matrix = run_benchmark(&records, &setup)?;
    if cfg.strict_validity {
        if let Some(c) = matrix.cells.iter().find(|c| c.out_of_validity > 0) {
            bail!(
                "{} records lie outside the validity range of `{}` (strict validity)",
                c.out_of_validity,
                c.column
            );
        }
    }

    // binned errors against speed for the first calm model and the network
    let speeds: Vec<f64> = records.iter().map(|r| ms_to_knots(r.stw)).collect();
    let actual: Vec<f64> = records.iter().map(|r| r.brake_power).collect();
    let mut series: Vec<(String, Vec<Bin>)> = Vec::new();
    let first = &calm_models[0];
    let columns: Vec<Option<Arc<dyn WaveTheory>>> =
        theories.iter().cloned().map(Some).chain([None]).collect();
    for theory in columns {
        let column = theory
            .as_ref()
            .map_or(speedpower_core::eval::NO_CORRECTION.to_string(), |t| {
                t.name().to_string()
            });
        if matrix
            .get(&first.name, &column)
            .and_then(|c| c.mape())
            .is_none()
        {
            continue;
        }
        let p = PhysicsPredictor {
            calm: first.model.clone(),
            vessel,
            wind: wind.clone(),
            theory,
        };
        let predicted = records
            .iter()
            .map(|r| p.predict(r))
            .collect::<speedpower_core::Result<Vec<f64>>>()?;
        series.push((
            format!("{}+{column}", first.name),
            binned_mape(
                &speeds,
                &actual,
                &predicted,
                cfg.eval.bins,
                cfg.eval.mape_denominator,
            )?,
        ));
    }
    if let Some(nn) = &nn {
        let predicted = records
            .iter()
            .map(|r| nn.predict(r))
            .collect::<speedpower_core::Result<Vec<f64>>>()?;
        series.push((
            "nn".into(),
            binned_mape(
                &speeds,
                &actual,
                &predicted,
                cfg.eval.bins,
                cfg.eval.mape_denominator,
            )?,
        ));
    }
    let mut binned = String::from("series,lo,hi,count,mape,std\n");
    for (name, bins) in &series {
        for line in bins_csv(bins).lines().skip(1) {
            binned.push_str(&format!("{name},{line}\n"));
        }
    }

    write(cfg, "benchmark.csv", &benchmark_csv(&matrix))?;
    write(cfg, "benchmark.svg", &benchmark_svg(&matrix))?;
    write_json(cfg, "benchmark.json", &matrix)?;
    write(cfg, "binned_mape.csv", &binned)?;
    write(
        cfg,
        "binned_mape.svg",
        &bins_svg(&series, "speed through water [kn]"),
    )?;

    for c in &matrix.cells {
        match c.mape() {
            Some(m) => println!(
                "{:>14} {:>22}  MAPE {:6.3}%  out-of-validity {}",
                c.row,
                c.column,
                m * 100.0,
                c.out_of_validity
            ),
            None => println!(
                "{:>14} {:>22}  MAPE   n/a   {}",
                c.row,
                c.column,
                c.note.as_deref().unwrap_or("")
            ),
        }
    }
    println!("wrote benchmark to {}", cfg.out_dir.display());
    Ok(())
}

pub fn polar_sweep(cfg: &RunConfig) -> Result<()> {
    let vessel = cfg.vessel()?;
    let p = &cfg.polar;
    let points = sweep(
        &selected_theories(cfg)?,
        &vessel,
        p.h_s,
        p.t_p,
        knots_to_ms(p.stw_kn),
        p.step_deg,
    )?;
    let mut csv = String::from("theory,alpha_deg,r_aw_kn\n");
    for pt in &points {
        csv.push_str(&format!(
            "{},{},{}\n",
            pt.theory,
            pt.alpha_deg,
            pt.r_aw_newtons / 1000.0
        ));
    }
    let path = write(cfg, "polar.csv", &csv)?;
    println!("wrote {} points to {}", points.len(), path.display());
    Ok(())
}

fn column(header: &[&str], name: &str, input: &Path) -> Result<usize> {
    header
        .iter()
        .position(|h| h.trim() == name)
        .with_context(|| {
            format!(
                "{}: no column `{name}` (have {})",
                input.display(),
                header.join(", ")
            )
        })
}

pub fn metrics(cfg: &RunConfig, input: &Path, actual_col: &str, predicted_col: &str) -> Result<()> {
    let text =
        std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().context("empty input")?.split(',').collect();
    let (ia, ip) = (
        column(&header, actual_col, input)?,
        column(&header, predicted_col, input)?,
    );
    let (mut actual, mut predicted) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |idx: usize| -> Result<f64> {
            let raw = fields.get(idx).map(|s| s.trim()).unwrap_or("");
            raw.parse().with_context(|| {
                format!("{} row {}: `{raw}` is not a number", input.display(), i + 1)
            })
        };
        actual.push(parse(ia)?);
        predicted.push(parse(ip)?);
    }
    let report: MetricReport = metrics_partial(&actual, &predicted, cfg.eval.mape_denominator)?;
    println!(
        "n {}  MAE {}  MAPE {:.4}%  MBE {}  R2 {}",
        report.n,
        report.mae,
        report.mape * 100.0,
        report.mbe,
        report
            .r2
            .map_or("undefined".to_string(), |r| format!("{r:.6}"))
    );
    write_json(cfg, "metrics.json", &report)?;
    Ok(())
}
