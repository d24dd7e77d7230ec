use std::io::Write;
use std::path::Path;
use std::time::Instant;

use polyra::{
    abstract_tree, cluster, cluster_swarm, fit_with_report, generate, rangefinder, score_conditional, score_mean, simplify_with,
    substitute, viou, AbstractConfig, BoundingBox, Dataset64, FitConfig, GenConfig, Halfspace64, RangeQuery, TruthShape,
};
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::model::{self, ModelFile};
use crate::table::{csv_writer, fmt_row, read_table, sink, Table};
use crate::{AbstractArgs, Cli, Command, FitArgs};

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Fit { input, output, fit, seed } => cmd_fit(cli, input, output.as_deref(), fit, *seed),
        Command::Predict { model, input, grid, bounds, render, output } => {
            let grid = if *render { Some(200) } else { *grid };
            cmd_predict(cli, model, input.as_deref(), grid, bounds, output.as_deref())
        }
        Command::Score { model, input, output } => cmd_score(cli, model, input, output.as_deref()),
        Command::Abstract { model, train, abs, seed, output } => cmd_abstract(cli, model, train, abs, *seed, output.as_deref()),
        Command::Generate { model, samples, burn_in, seed, weighting, start, output } => {
            let (_, m) = model::load(model)?;
            let s = m.swarm("generate")?;
            let start_point = start.as_deref().map(|s| parse_numbers(s, "start point")).transpose()?;
            let cfg =
                GenConfig { n_samples: *samples, burn_in: *burn_in, seed: *seed, segment_weighting: *weighting, start_point };
            let pts = generate(s, &cfg)?;
            let mut w = csv_writer(sink(output.as_deref())?, cli.delimiter);
            w.write_record(columns(s.dim()))?;
            for p in &pts {
                w.write_record(fmt_row(p))?;
            }
            flush(w)
        }
        Command::Range { model, fix } => cmd_range(model, fix),
        Command::Cluster { input, model, fit, abs, seed, output, assignments } => {
            cmd_cluster(cli, input, model.as_deref(), fit, abs, *seed, output.as_deref(), assignments.as_deref())
        }
        Command::Eval { model, viou, against, samples, seed, bounds } => {
            cmd_eval(model, viou.as_deref(), against.as_deref(), *samples, *seed, bounds.as_deref())
        }
    }
}

fn fit_config(args: &FitArgs, seed: u64) -> FitConfig {
    FitConfig {
        adim: args.adim,
        bdim: args.bdim,
        n_models: args.n_models,
        extend: args.extend,
        minpoi: args.minpoi,
        quantile: args.quantile,
        subsample: args.subsample,
        seed,
        max_reject_factor: args.max_reject_factor,
    }
}

fn abstract_config(args: &AbstractArgs, seed: u64) -> CliResult<AbstractConfig<f64>> {
    Ok(AbstractConfig {
        delta_v: args.delta_v,
        n_feasibility_samples: args.feasibility_samples,
        n_volume_samples: args.volume_samples,
        bounding_box: args.region.as_deref().map(parse_box).transpose()?,
        seed,
        backend: args.backend,
        epsilon: args.epsilon,
        term_ceiling: args.term_ceiling,
        max_passes: args.max_passes,
    })
}

fn load_data(cli: &Cli, path: &Path) -> CliResult<(Table, Dataset64)> {
    let table = read_table(path, cli.csv())?;
    let data = Dataset64::new(&table.rows)?;
    Ok((table, data))
}

fn columns(dim: usize) -> Vec<String> {
    (0..dim).map(|k| format!("x{k}")).collect()
}

fn flush(mut w: csv::Writer<Box<dyn Write>>) -> CliResult<()> {
    w.flush().map_err(CliError::io("output"))
}

fn parse_numbers(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{what}: {v:?} is not a number")))).collect()
}

/// `lo0,hi0,lo1,hi1,...`
fn parse_box(s: &str) -> CliResult<BoundingBox<f64>> {
    let v = parse_numbers(s, "bounds")?;
    if v.is_empty() || v.len() % 2 != 0 {
        return Err(CliError::Usage("bounds need lo,hi pairs".into()));
    }
    let (lo, hi) = v.chunks(2).map(|c| (c[0], c[1])).unzip();
    BoundingBox::new(lo, hi).map_err(|e| CliError::Usage(format!("bounds: {e}")))
}

fn check_width(model_dim: usize, table: &Table) -> CliResult<()> {
    if table.dim() != model_dim {
        return Err(CliError::Data(format!("model has dimension {model_dim} but the input has {} columns", table.dim())));
    }
    Ok(())
}

fn cmd_fit(cli: &Cli, input: &Path, output: Option<&Path>, args: &FitArgs, seed: u64) -> CliResult<()> {
    let (_, data) = load_data(cli, input)?;
    let start = Instant::now();
    let (swarm, report) = fit_with_report(&data, &fit_config(args, seed))?;
    let file = ModelFile::from_swarm(&swarm);
    match output {
        Some(p) => model::save(p, &file)?,
        None => print!("{}", model::to_json(&file)),
    }
    eprintln!(
        "fitted {} points in {} dimensions: {} submodels accepted, {} draws rejected, {} base shapes, {:.2?}",
        data.len(),
        data.dim(),
        report.accepted,
        report.rejected,
        report.base_shapes,
        start.elapsed()
    );
    Ok(())
}

fn cmd_predict(
    cli: &Cli,
    path: &Path,
    input: Option<&Path>,
    grid: Option<usize>,
    bounds: &str,
    output: Option<&Path>,
) -> CliResult<()> {
    let (file, m) = model::load(path)?;
    let mut w = csv_writer(sink(output)?, cli.delimiter);
    if let Some(n) = grid {
        if m.dim() != 2 {
            return Err(CliError::Usage(format!("--grid needs a 2D model, this one has dimension {}", m.dim())));
        }
        if n < 2 {
            return Err(CliError::Usage("--grid needs at least 2 points per side".into()));
        }
        let b = if bounds == "auto" {
            file.bounds.as_ref().ok_or_else(|| CliError::Usage("model has no bounds; pass --bounds".into()))?.widened(0.1)
        } else {
            parse_box(bounds)?
        };
        if b.dim() != 2 {
            return Err(CliError::Usage("--bounds needs two lo,hi pairs".into()));
        }
        let at = |k: usize, i: usize| b.lo()[k] + (b.hi()[k] - b.lo()[k]) * i as f64 / (n - 1) as f64;
        w.write_record(["x", "y", "member"])?;
        for i in 0..n {
            for j in 0..n {
                let x = [at(0, i), at(1, j)];
                let member = m.contains(&x)? as u8;
                w.write_record([x[0].to_string(), x[1].to_string(), member.to_string()])?;
            }
        }
        return flush(w);
    }
    let input = input.ok_or_else(|| CliError::Usage("predict needs an input file or --grid".into()))?;
    let table = read_table(input, cli.csv())?;
    check_width(m.dim(), &table)?;
    let mut header = table.header.clone().unwrap_or_else(|| columns(m.dim()));
    header.push("member".into());
    w.write_record(&header)?;
    for x in &table.rows {
        let mut rec = fmt_row(x);
        rec.push((m.contains(x)? as u8).to_string());
        w.write_record(&rec)?;
    }
    flush(w)
}

fn cmd_score(cli: &Cli, path: &Path, input: &Path, output: Option<&Path>) -> CliResult<()> {
    let (_, m) = model::load(path)?;
    let s = m.swarm("score")?;
    let table = read_table(input, cli.csv())?;
    check_width(s.dim(), &table)?;
    let mut w = csv_writer(sink(output)?, cli.delimiter);
    let mut header = table.header.clone().unwrap_or_else(|| columns(s.dim()));
    header.extend(["member", "anomaly_mean", "anomaly_conditional"].map(String::from));
    w.write_record(&header)?;
    for x in &table.rows {
        let mut rec = fmt_row(x);
        rec.push((s.contains(x)? as u8).to_string());
        rec.push((1.0 - score_mean(s, x)?).to_string());
        rec.push((1.0 - score_conditional(s, x)?.value).to_string());
        w.write_record(&rec)?;
    }
    flush(w)
}

fn cmd_abstract(cli: &Cli, path: &Path, train: &Path, args: &AbstractArgs, seed: u64, output: Option<&Path>) -> CliResult<()> {
    let (file, m) = model::load(path)?;
    let (table, data) = load_data(cli, train)?;
    check_width(m.dim(), &table)?;
    let cfg = abstract_config(args, seed)?;
    let fallback = file.bounds.clone().unwrap_or_else(|| data.bounds());
    let region = cfg.region(&fallback)?;
    let start = Instant::now();
    let out = abstract_tree(&m.as_tree(), m.dim(), &data, region.clone(), &cfg)?;
    let hyper = json!({
        "delta_v": cfg.delta_v,
        "backend": cfg.backend,
        "n_feasibility_samples": cfg.n_feasibility_samples,
        "n_volume_samples": cfg.n_volume_samples,
        "epsilon": cfg.epsilon,
        "seed": seed,
        "region": region,
    });
    let result = ModelFile::from_dnf(&out.dnf, Some(fallback), hyper);
    match output {
        Some(p) => model::save(p, &result)?,
        None => print!("{}", model::to_json(&result)),
    }
    eprintln!(
        "{} model: complexity {} -> {} nodes ({:.1}x reduction), {} terms, {:.2?}",
        file.kind(),
        out.nodes_before,
        out.nodes_after,
        out.reduction_factor(),
        out.dnf.len(),
        start.elapsed()
    );
    Ok(())
}

fn cmd_range(path: &Path, fix: &[String]) -> CliResult<()> {
    let (_, m) = model::load(path)?;
    let fixed = fix
        .iter()
        .map(|f| {
            let (k, v) = f.split_once('=').ok_or_else(|| CliError::Usage(format!("--fix expects index=value, got {f:?}")))?;
            let k = k.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad coordinate index {k:?}")))?;
            let v = v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad value {v:?}")))?;
            Ok((k, v))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let q = RangeQuery::new(m.dim(), fixed.iter().copied())?;
    let pairs: Vec<(usize, f64)> = q.fixed().iter().map(|(&k, &v)| (k, v)).collect();
    let tree = simplify_with(&m.as_tree(), 0.0);
    let set = rangefinder(&substitute(&tree, m.dim(), &pairs)?)?.without_points();
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "coordinate {} member intervals:", q.free_index());
    if set.is_empty() {
        let _ = writeln!(out, "  (none)");
    }
    for iv in set.intervals() {
        // adding zero turns -0 into 0
        let _ = writeln!(out, "  [{}, {}]", iv.lo + 0.0, iv.hi + 0.0);
    }
    Ok(())
}

fn describe(h: &Halfspace64) -> String {
    let terms: Vec<String> = h.normal().iter().enumerate().map(|(k, a)| format!("{a:+.6}*x{k}")).collect();
    format!("{} <= {:.6}", terms.join(" "), h.bound())
}

#[allow(clippy::too_many_arguments)]
fn cmd_cluster(
    cli: &Cli,
    input: &Path,
    model_path: Option<&Path>,
    fit: &FitArgs,
    abs: &AbstractArgs,
    seed: u64,
    output: Option<&Path>,
    assignments: Option<&Path>,
) -> CliResult<()> {
    let (_, data) = load_data(cli, input)?;
    let cfg = abstract_config(abs, seed)?;
    let clusters = match model_path {
        Some(p) => {
            let (_, m) = model::load(p)?;
            let s = m.swarm("cluster --model")?;
            if s.dim() != data.dim() {
                return Err(CliError::Data(format!("model has dimension {} but the input has {}", s.dim(), data.dim())));
            }
            cluster_swarm(s, &data, &cfg)?
        }
        None => cluster(&data, &fit_config(fit, seed), &cfg)?,
    };
    let mut sizes = vec![0usize; clusters.clusters.len()];
    for ids in &clusters.assignment {
        for &c in ids {
            sizes[c] += 1;
        }
    }
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{} clusters, {} unassigned points", clusters.clusters.len(), clusters.unassigned());
    for (k, p) in clusters.clusters.iter().enumerate() {
        let _ = writeln!(out, "cluster {k}: {} points, {} constraints", sizes[k], p.len());
        for h in p.constraints() {
            let _ = writeln!(out, "  {}", describe(h));
        }
    }
    drop(out);
    if let Some(p) = output {
        let dnf = polyra::DnfForm64::new(data.dim(), clusters.clusters.clone())?;
        model::save(p, &ModelFile::from_dnf(&dnf, Some(data.bounds()), json!({ "seed": seed })))?;
    }
    if let Some(p) = assignments {
        let mut w = csv_writer(sink(Some(p))?, cli.delimiter);
        w.write_record(["row", "clusters"])?;
        for (i, ids) in clusters.assignment.iter().enumerate() {
            let joined: Vec<String> = ids.iter().map(usize::to_string).collect();
            w.write_record([i.to_string(), joined.join(";")])?;
        }
        flush(w)?;
    }
    Ok(())
}

type Reference = Box<dyn Fn(&[f64]) -> bool>;

fn cmd_eval(
    path: &Path,
    truth: Option<&str>,
    against: Option<&Path>,
    samples: usize,
    seed: u64,
    bounds: Option<&str>,
) -> CliResult<()> {
    let (file, m) = model::load(path)?;
    let own = file.bounds.as_ref().map(|b| b.widened(0.1));
    let (other, other_bounds): (Reference, Option<BoundingBox<f64>>) = match (truth, against) {
        (Some(text), None) => {
            let shape: TruthShape = text.parse().map_err(|e: polyra::PolyraError| CliError::Usage(e.to_string()))?;
            if shape.dim() != m.dim() {
                return Err(CliError::Usage(format!("reference has dimension {} but the model has {}", shape.dim(), m.dim())));
            }
            let b = shape.bounds()?;
            (Box::new(move |x: &[f64]| shape.contains(x)), Some(b))
        }
        (None, Some(p)) => {
            let (f2, m2) = model::load(p)?;
            if m2.dim() != m.dim() {
                return Err(CliError::Data(format!("models have dimensions {} and {}", m.dim(), m2.dim())));
            }
            (Box::new(move |x: &[f64]| m2.contains(x).unwrap_or(false)), f2.bounds.map(|b| b.widened(0.1)))
        }
        _ => return Err(CliError::Usage("eval needs exactly one of --viou or --against".into())),
    };
    let region = match (bounds, own, other_bounds) {
        (Some(s), _, _) => parse_box(s)?,
        (None, Some(a), Some(b)) => a.union(&b)?,
        (None, Some(a), None) | (None, None, Some(a)) => a,
        (None, None, None) => return Err(CliError::Usage("no bounds known for either shape; pass --bounds".into())),
    };
    let v = viou(|x: &[f64]| m.contains(x).unwrap_or(false), other, &region, samples, seed)?;
    let _ = writeln!(std::io::stdout(), "viou {v:.6}");
    Ok(())
}
