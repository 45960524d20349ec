use std::collections::BTreeMap;

use hodge_gp::data::{load_flow_csv, rng, split, Dataset, OrientationPolicy, Provenance};
use hodge_gp::gp::{metrics, FitConfig, GpModel, PosteriorResult};
use hodge_gp::kernels::SpectralPoint;
use hodge_gp::{Error, KernelContext, KernelSpec, Result};
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::FitPredictArgs;
use crate::output::{csv_writer, mean_std, out_dir, write_json, MeanStd};

/// Random stream from which per-restart seeds are drawn.
const RESTART_STREAM: u64 = 0x5EED;

#[derive(Serialize)]
struct RestartRow {
    index: usize,
    init_seed: u64,
    split_seed: Option<u64>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rmse: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nlpd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    final_loss: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise_variance: Option<f64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    params: BTreeMap<String, f64>,
    num_train: usize,
    num_test: usize,
}

#[derive(Serialize)]
struct Aggregate {
    succeeded: usize,
    failed: usize,
    rmse: Option<MeanStd>,
    nlpd: Option<MeanStd>,
}

#[derive(Serialize)]
struct DatasetInfo {
    num_nodes: usize,
    num_edges: usize,
    num_triangles: usize,
    num_observed: usize,
    split: &'static str,
    provenance: Provenance,
}

#[derive(Serialize)]
struct Results<'a> {
    config: &'a FitPredictArgs,
    kernel: KernelSpec,
    dataset: DatasetInfo,
    restarts: Vec<RestartRow>,
    aggregate: Aggregate,
    /// Restart whose predictions, spectrum and checkpoint were written.
    reported_restart: Option<usize>,
}

struct Fitted {
    model: GpModel,
    pred: PosteriorResult,
}

/// Per-restart seeds for the initialization and, if needed, the split.
fn restart_seeds(master: u64, index: usize) -> (u64, u64) {
    let mut r = rng(master, RESTART_STREAM + index as u64);
    (r.next_u64(), r.next_u64())
}

fn load(args: &FitPredictArgs) -> Result<(Dataset, bool)> {
    if let Some(dir) = &args.bundle {
        let ds = Dataset::read_bundle(dir)?;
        let fixed = ds.train_mask.is_some();
        return Ok((ds, fixed));
    }
    let (Some(complex), Some(flow)) = (&args.complex, &args.flow) else {
        return Err(Error::Usage(
            "pass either --bundle or --complex with --flow".into(),
        ));
    };
    let policy = if args.strict_orientation {
        OrientationPolicy::RequireCanonical
    } else {
        OrientationPolicy::Resign
    };
    let ds = load_flow_csv(
        complex,
        flow,
        policy,
        args.infer_triangles,
        args.train_ratio,
        args.seed,
    )?;
    let fixed = ds
        .provenance
        .params
        .get("split_source")
        .and_then(|v| v.as_str())
        == Some("file");
    Ok((ds, fixed))
}

fn fit_one(
    args: &FitPredictArgs,
    spec: &KernelSpec,
    ctx: &KernelContext,
    ds: &Dataset,
    init_seed: u64,
) -> Result<Fitted> {
    let (train, test) = (ds.train_indices(), ds.test_indices());
    let mut model = GpModel::new(
        spec.clone(),
        train.clone(),
        ds.values_at(&train),
        args.init_noise,
        ds.complex.num_edges(),
    )?;
    let config = FitConfig {
        iters: args.iters,
        lr: args.lr,
        seed: init_seed,
        random_init: !args.fixed_init,
    };
    model.fit(ctx, &config)?;
    let pred = model.predict(ctx, &test, args.components)?;
    Ok(Fitted { model, pred })
}

pub fn run(args: &FitPredictArgs) -> Result<u8> {
    if args.restarts == 0 {
        return Err(Error::Usage("--restarts must be at least 1".into()));
    }
    if !(args.lr > 0.0) {
        return Err(Error::Usage(format!(
            "--lr must be positive, got {}",
            args.lr
        )));
    }
    let spec = args.kernel.spec();
    spec.validate()?;
    if args.components && !matches!(spec, KernelSpec::HcEdge { .. }) {
        return Err(Error::Usage(
            "--components needs hc-matern or hc-diffusion".into(),
        ));
    }
    let (ds, has_split) = load(args)?;
    let resplit = args.resplit || !has_split;
    let ctx = KernelContext::new(ds.complex.clone(), args.kernel.truncate)?;
    log::info!("spectrum dims (H, G, C) = {:?}", ctx.spectrum().dims());
    // warm the lazily computed eigenbases
    spec.assemble(&ctx)?;

    let runs: Vec<(RestartRow, Option<Fitted>)> = (0..args.restarts)
        .into_par_iter()
        .map(|i| {
            let (init_seed, split_seed) = restart_seeds(args.seed, i);
            let data = if resplit {
                split(&ds, args.train_ratio, split_seed)
            } else {
                Ok(ds.clone())
            };
            let mut row = RestartRow {
                index: i,
                init_seed,
                split_seed: resplit.then_some(split_seed),
                status: "failed",
                error: None,
                rmse: None,
                nlpd: None,
                final_loss: None,
                noise_variance: None,
                params: BTreeMap::new(),
                num_train: 0,
                num_test: 0,
            };
            let outcome = data.and_then(|d| {
                row.num_train = d.train_indices().len();
                row.num_test = d.test_indices().len();
                let fitted = fit_one(args, &spec, &ctx, &d, init_seed)?;
                let m = metrics(&fitted.pred, &d.values_at(&d.test_indices()))?;
                Ok((fitted, m))
            });
            match outcome {
                Ok((fitted, m)) => {
                    row.status = "ok";
                    row.rmse = Some(m.rmse);
                    row.nlpd = Some(m.nlpd);
                    row.final_loss = fitted.model.loss_trace.last().copied();
                    row.noise_variance = Some(fitted.model.noise_variance);
                    row.params = fitted
                        .model
                        .kernel_spec
                        .param_names()
                        .into_iter()
                        .zip(fitted.model.kernel_spec.params())
                        .collect();
                    log::info!("restart {i}: rmse {:.4} nlpd {:.4}", m.rmse, m.nlpd);
                    (row, Some(fitted))
                }
                Err(e) => {
                    log::warn!("restart {i} failed: {e}");
                    row.error = Some(e.to_string());
                    (row, None)
                }
            }
        })
        .collect();

    let ok: Vec<&RestartRow> = runs
        .iter()
        .map(|r| &r.0)
        .filter(|r| r.status == "ok")
        .collect();
    let rmse: Vec<f64> = ok.iter().filter_map(|r| r.rmse).collect();
    let nlpd: Vec<f64> = ok.iter().filter_map(|r| r.nlpd).collect();
    let aggregate = Aggregate {
        succeeded: ok.len(),
        failed: args.restarts - ok.len(),
        rmse: mean_std(&rmse),
        nlpd: mean_std(&nlpd),
    };

    let reported = runs
        .iter()
        .filter_map(|(row, f)| f.as_ref().map(|f| (row, f)))
        .min_by(|a, b| {
            if args.best_of_restarts {
                let la = a.0.final_loss.unwrap_or(f64::INFINITY);
                let lb = b.0.final_loss.unwrap_or(f64::INFINITY);
                la.total_cmp(&lb).then(a.0.index.cmp(&b.0.index))
            } else {
                a.0.index.cmp(&b.0.index)
            }
        });

    let dir = out_dir(&args.out)?;
    if let Some((row, fitted)) = reported {
        write_predictions(&dir.join("predictions.csv"), &ds, &fitted.pred)?;
        let points = fitted.model.kernel_spec.spectral_density(&ctx)?;
        write_spectrum(&dir.join("kernel_spectrum.csv"), &points)?;
        write_json(&dir.join("checkpoint.json"), &fitted.model)?;
        log::info!("reported restart {}", row.index);
    }

    let results = Results {
        config: args,
        kernel: spec.clone(),
        dataset: DatasetInfo {
            num_nodes: ds.complex.num_nodes(),
            num_edges: ds.complex.num_edges(),
            num_triangles: ds.complex.num_triangles(),
            num_observed: ds.observed.iter().filter(|o| **o).count(),
            split: if resplit { "per-restart" } else { "fixed" },
            provenance: ds.provenance.clone(),
        },
        reported_restart: reported.map(|(row, _)| row.index),
        aggregate,
        restarts: runs.into_iter().map(|(row, _)| row).collect(),
    };
    write_json(&dir.join("results.json"), &results)?;

    let agg = &results.aggregate;
    match (agg.rmse, agg.nlpd) {
        (Some(r), Some(n)) => println!(
            "{}/{} restarts ok  rmse {:.4} ± {:.4}  nlpd {:.4} ± {:.4}",
            agg.succeeded, args.restarts, r.mean, r.std, n.mean, n.std
        ),
        _ => println!("all {} restarts failed", args.restarts),
    }
    Ok(exit_status(agg.failed, args.restarts))
}

/// 0 when every restart succeeded, 3 when none did, 4 otherwise.
fn exit_status(failed: usize, restarts: usize) -> u8 {
    match failed {
        0 => 0,
        f if f == restarts => 3,
        _ => 4,
    }
}

fn write_predictions(path: &std::path::Path, ds: &Dataset, pred: &PosteriorResult) -> Result<()> {
    let mut w = csv_writer(path)?;
    let comps = pred.components.as_ref();
    if comps.is_some() {
        w.write_record(["simplex", "mean", "variance", "mean_H", "mean_G", "mean_C"])?;
    } else {
        w.write_record(["simplex", "mean", "variance"])?;
    }
    for (j, &e) in pred.test_indices.iter().enumerate() {
        let mut row = vec![
            ds.complex.edge_label(e),
            pred.mean[j].to_string(),
            pred.variance[j].to_string(),
        ];
        if let Some(c) = comps {
            row.push(c.mean_harmonic[j].to_string());
            row.push(c.mean_gradient[j].to_string());
            row.push(c.mean_curl[j].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_spectrum(path: &std::path::Path, points: &[SpectralPoint]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["lambda", "psi", "block"])?;
    for p in points {
        w.write_record([p.lambda.to_string(), p.psi.to_string(), p.block.clone()])?;
    }
    w.flush()?;
    Ok(())
}
