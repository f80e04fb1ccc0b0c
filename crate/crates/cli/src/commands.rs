use std::path::Path;
use std::time::Instant;

use pgee::eval::bench::{benchmark_scaling, edge_pass_ladder, linear_fit, BenchFamily, TimingRow};
use pgee::eval::crossval::{cross_validate, CrossValConfig, Method};
use pgee::eval::data::prepare_graph;
use pgee::eval::noise::NoiseConfig;
use pgee::eval::sweep::{simulation_sweep, SweepConfig, SweepRow};
use pgee::io::{
    load_labeled_graph, save_edge_list, save_embedding, save_labels, write_scores_csv, IdBase,
};
use pgee::{normalize_rows, principal_embedding, score_report, simulation_preset, ModelSpec};
use pgee::{PrincipalConfig, SmallClassPolicy};
use serde_json::json;

use crate::manifest::{
    create_dir, internal, require_file, write_file, write_json, Failure, Manifest, Outcome,
};
use crate::{BenchArgs, EmbedArgs, EvaluateArgs, SimulateArgs};

/// Sizes above this need `bench --large`.
const BENCH_SIZE_CAP: usize = 100_000;
const LARGE_N: usize = 100_000;
const LARGE_K: usize = 40;
const LARGE_LADDER: [f64; 4] = [1.25e6, 2.5e6, 5e6, 1e7];

pub fn embed(a: &EmbedArgs) -> Outcome {
    require_file("graph", &a.graph)?;
    require_file("labels", &a.labels)?;
    let config = a.threshold.config();
    let (file, y) = load_labeled_graph(&a.graph, &a.labels, a.directed)?;
    let g = &file.graph;

    let start = Instant::now();
    let full = normalize_rows(&pgee::embed(g, &y)?);
    let embed_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let report = score_report(&full, &y, &config)?;
    let principal = principal_embedding(&full, &report)?;
    let score_seconds = start.elapsed().as_secs_f64();

    let start = Instant::now();
    create_dir(&a.out)?;
    let mut manifest = Manifest::new(
        "embed",
        None,
        json!({ "method": a.method, "directed": a.directed, "principal": config }),
    );
    manifest.input("graph", &a.graph)?;
    manifest.input("labels", &a.labels)?;
    let chosen = match a.method {
        Method::Gee => &full,
        Method::Pgee => &principal,
    };
    save_embedding(chosen, &y, a.out.join("embedding.csv"), file.base)?;
    manifest.output("embedding", &a.out, "embedding.csv")?;
    manifest.output("embedding-meta", &a.out, "embedding.json")?;
    if a.method == Method::Pgee {
        save_embedding(&full, &y, a.out.join("full.csv"), file.base)?;
        manifest.output("full-embedding", &a.out, "full.csv")?;
        manifest.output("full-embedding-meta", &a.out, "full.json")?;
    }
    let mut scores = Vec::new();
    write_scores_csv(&report, &mut scores).map_err(|e| internal("scores.csv", e))?;
    write_file(&a.out.join("scores.csv"), scores)?;
    manifest.output("scores", &a.out, "scores.csv")?;

    manifest.timing = Some(json!({
        "embed_seconds": embed_seconds,
        "score_seconds": score_seconds,
        "write_seconds": start.elapsed().as_secs_f64(),
    }));
    manifest.summary = json!({
        "vertices": g.n(),
        "edges": g.s(),
        "self_loops_dropped": file.stats.self_loops_dropped,
        "duplicates_dropped": file.stats.duplicates_dropped,
        "classes": y.num_classes(),
        "known_labels": y.known_count(),
        "dimension": chosen.dim(),
        "principal_set": report.principal_set,
        "epsilon_elbow": report.epsilon_elbow,
        "epsilon": report.epsilon,
        "fell_back": report.fell_back,
    });
    manifest.save(&a.out)?;
    println!(
        "{} vertices, {} edges, K = {}; principal set {:?} (epsilon {:.4}); wrote {}",
        g.n(),
        g.s(),
        y.num_classes(),
        report.principal_set,
        report.epsilon,
        a.out.display()
    );
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> Outcome {
    let spec = match (a.model, &a.spec) {
        (Some(kind), _) => simulation_preset(kind, a.n.expect("clap requires --n with --model"))?,
        (None, Some(path)) => {
            require_file("spec", path)?;
            let text = std::fs::read_to_string(path).map_err(|e| internal(path.display(), e))?;
            let spec = ModelSpec::from_toml(&text)?;
            match a.n {
                Some(n) => spec.with_n(n),
                None => spec,
            }
        }
        (None, None) => unreachable!("clap requires --model or --spec"),
    };
    spec.validate()?;
    let sample = spec.sample(a.seed)?;

    create_dir(&a.out)?;
    save_edge_list(&sample.graph, a.out.join("edges.txt"), IdBase::Zero)?;
    save_labels(&sample.labels, a.out.join("labels.txt"))?;
    write_file(&a.out.join("spec.toml"), spec.to_toml()?)?;
    let mut manifest = Manifest::new(
        "simulate",
        Some(a.seed),
        json!({ "model": spec.kind(), "n": spec.n() }),
    );
    if let Some(path) = &a.spec {
        manifest.input("spec", path)?;
    }
    for (role, name) in [
        ("edges", "edges.txt"),
        ("labels", "labels.txt"),
        ("spec", "spec.toml"),
    ] {
        manifest.output(role, &a.out, name)?;
    }
    manifest.summary = json!({
        "vertices": sample.graph.n(),
        "edges": sample.graph.s(),
        "class_counts": sample.labels.class_counts(),
    });
    manifest.save(&a.out)?;
    println!(
        "sampled {} with n = {}: {} edges; wrote {}",
        spec.kind().name(),
        spec.n(),
        sample.graph.s(),
        a.out.display()
    );
    Ok(())
}

pub fn evaluate(a: &EvaluateArgs) -> Outcome {
    let principal = a.threshold.config();
    if let Some(kind) = a.model {
        if a.method.is_some() {
            return Err(Failure::Usage(
                "--method applies to --graph runs; preset sweeps report both methods".into(),
            ));
        }
        return evaluate_preset(a, kind, principal);
    }
    let graph = a
        .graph
        .as_deref()
        .expect("clap requires --model or --graph");
    let labels = a
        .labels
        .as_deref()
        .expect("clap requires --labels with --graph");
    evaluate_graph(a, graph, labels, principal)
}

fn evaluate_preset(a: &EvaluateArgs, kind: pgee::ModelKind, principal: PrincipalConfig) -> Outcome {
    let config = SweepConfig {
        kind,
        sizes: a.n_list.clone(),
        replicates: a.replicates,
        seed: a.seed,
        principal,
        folds: (a.folds > 0).then_some(a.folds),
    };
    let start = Instant::now();
    let result = simulation_sweep(&config)?;
    let seconds = start.elapsed().as_secs_f64();

    create_dir(&a.out)?;
    let mut csv = String::from(SweepRow::CSV_HEADER);
    csv.push('\n');
    for row in &result.rows {
        csv.push_str(&row.to_csv());
        csv.push('\n');
    }
    write_file(&a.out.join("fig2.csv"), csv)?;
    write_json(
        &a.out.join("eval.json"),
        &json!({ "mode": "preset", "config": config, "rows": result.rows, "records": result.records }),
    )?;
    let mut manifest = Manifest::new("evaluate", Some(a.seed), json!(config));
    manifest.output("fig2", &a.out, "fig2.csv")?;
    manifest.output("eval", &a.out, "eval.json")?;
    manifest.timing = Some(json!({ "total_seconds": seconds }));
    manifest.summary = json!(result.rows);
    manifest.save(&a.out)?;
    for row in &result.rows {
        println!(
            "{} n = {}: exact recovery {:.2}, tpr {:.3}, fpr {:.4}",
            kind.name(),
            row.n,
            row.exact_recovery,
            row.tpr,
            row.fpr
        );
    }
    Ok(())
}

fn evaluate_graph(
    a: &EvaluateArgs,
    graph: &Path,
    labels: &Path,
    principal: PrincipalConfig,
) -> Outcome {
    require_file("graph", graph)?;
    require_file("labels", labels)?;
    let (file, y) = load_labeled_graph(graph, labels, false)?;
    let (g, y, summary) = prepare_graph(&file.graph, &y)?;
    let config = CrossValConfig {
        folds: a.folds,
        replicates: a.replicates,
        seed: a.seed,
        principal,
        noise: a.noise.map(|fraction| NoiseConfig {
            fraction,
            classes: a.noise_classes,
        }),
        strict_classes: !a.lenient_folds,
    };
    let start = Instant::now();
    let report = cross_validate(&g, &y, &config)?;
    let seconds = start.elapsed().as_secs_f64();
    let methods: Vec<Method> = match a.method {
        Some(m) => vec![m],
        None => Method::ALL.to_vec(),
    };
    let results: Vec<_> = methods.iter().map(|&m| report.get(m)).collect();

    create_dir(&a.out)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut table = String::from(
        "method,replicates,mean_error,sd_error,mean_clean_error,median_principal_size\n",
    );
    for r in &results {
        table.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.method,
            r.replicate_errors.len(),
            r.mean_error,
            r.sd_error,
            opt(r.mean_clean_error),
            opt(r.median_principal_size)
        ));
    }
    write_file(&a.out.join("table.csv"), table)?;
    write_json(
        &a.out.join("eval.json"),
        &json!({ "mode": "graph", "dataset": summary, "config": config, "results": results }),
    )?;
    let mut manifest = Manifest::new("evaluate", Some(a.seed), json!(config));
    manifest.input("graph", graph)?;
    manifest.input("labels", labels)?;
    manifest.output("table", &a.out, "table.csv")?;
    manifest.output("eval", &a.out, "eval.json")?;
    let timing: Vec<_> = results
        .iter()
        .map(|r| json!({ "method": r.method, "timing": r.timing }))
        .collect();
    manifest.timing = Some(json!({ "total_seconds": seconds, "methods": timing }));
    manifest.summary = json!(summary);
    manifest.save(&a.out)?;
    for r in &results {
        println!(
            "{}: error {:.2}% +/- {:.2} over {} replicates",
            r.method,
            100.0 * r.mean_error,
            100.0 * r.sd_error,
            r.replicate_errors.len()
        );
    }
    Ok(())
}

pub fn bench(a: &BenchArgs) -> Outcome {
    if !a.large {
        if let Some(&n) = a.sizes.iter().find(|&&n| n > BENCH_SIZE_CAP) {
            return Err(Failure::Usage(format!(
                "size {n} is above {BENCH_SIZE_CAP}; pass --large to allow it"
            )));
        }
    }
    let config = PrincipalConfig {
        small_classes: SmallClassPolicy::Drop,
        ..PrincipalConfig::default()
    };
    let mut rows: Vec<(String, TimingRow)> = Vec::new();
    if !a.sizes.is_empty() {
        let family = BenchFamily::Preset(a.model);
        for row in benchmark_scaling(family, &a.sizes, a.seed, a.trials, &config)? {
            rows.push((a.model.name().to_string(), row));
        }
    }
    let mut fit = None;
    if a.large {
        let ladder = edge_pass_ladder(LARGE_N, LARGE_K, &LARGE_LADDER, a.seed, a.trials, &config)?;
        let xs: Vec<f64> = ladder.iter().map(|r| r.s as f64).collect();
        let ys: Vec<f64> = ladder.iter().map(|r| r.embed_min).collect();
        fit = Some(linear_fit(&xs, &ys)?);
        for row in ladder {
            rows.push((format!("scaled-k{LARGE_K}"), row));
        }
    }

    create_dir(&a.out)?;
    let mut csv = format!("family,{}\n", TimingRow::CSV_HEADER);
    for (family, row) in &rows {
        csv.push_str(&format!("{family},{}\n", row.to_csv()));
    }
    write_file(&a.out.join("timing.csv"), csv)?;
    let mut manifest = Manifest::new(
        "bench",
        Some(a.seed),
        json!({ "model": a.model, "sizes": a.sizes, "trials": a.trials, "large": a.large }),
    );
    manifest.output("timing", &a.out, "timing.csv")?;
    manifest.summary = json!({ "edge_pass_fit": fit });
    manifest.save(&a.out)?;
    for (family, row) in &rows {
        println!(
            "{family} n = {} s = {}: embed+score min {:.4} s, median {:.4} s",
            row.n, row.s, row.total_min, row.total_median
        );
    }
    if let Some(fit) = fit {
        println!("edge-pass time vs edges: R^2 = {:.4}", fit.r_squared);
    }
    Ok(())
}
