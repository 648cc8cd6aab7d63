use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rumour_core::classifiers::save_model;
use rumour_core::dataset::{load_jsonl, load_pheme, make_folds, save_jsonl, stratified_split};
use rumour_core::embedding::{
    load_store, save_store, CachedProvider, EmbeddingProvider, EmbeddingStore,
    PrecomputedProvider, ProviderConfig, ProviderMode, RemoteProvider, TextItem,
};
use rumour_core::eval::{
    compare_report, parse_report_csv, report_csv, run_cv, run_holdout, ReportRow, Representation,
    RepresentationData,
};
use rumour_core::features::{csv_header, extract_all, load_lexicons, CsvRow, Lexicons};
use rumour_core::{Error, LabeledDataset};

use crate::config::{parse_algorithms, parse_mode, parse_representations, RunConfig};
use crate::{Cli, Command, EmbedArgs, RunArgs};

/// A failure together with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    error: Error,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        self.code
    }

    fn external(error: Error) -> Self {
        CliError { code: 3, error }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

/// 2 for configuration problems, 3 for the embedding service, 4 for data.
impl From<Error> for CliError {
    fn from(error: Error) -> Self {
        let code = match error {
            Error::Config(_) => 2,
            ref e if e.is_external() => 3,
            _ => 4,
        };
        CliError { code, error }
    }
}

type CmdResult = std::result::Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    Error::Config(msg.into()).into()
}

pub fn run(cli: Cli) -> CmdResult {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    match cli.command {
        Command::Ingest { root, output } => ingest(&root, &output),
        Command::Features {
            input,
            output,
            lexicons,
        } => features(&input, &output, lexicons.or(cfg.lexicon_dir)),
        Command::Embed(args) => embed(args, &cfg),
        Command::TrainEval(args) => {
            apply_run_args(&mut cfg, &args, false)?;
            train_eval(&cfg)
        }
        Command::Cv(args) => {
            apply_run_args(&mut cfg, &args, true)?;
            cv(&cfg)
        }
        Command::Compare { reports } => compare(&reports, cli.out.as_deref()),
    }
}

fn write_file(path: &Path, content: &str) -> CmdResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, content).map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn summary(ds: &LabeledDataset) -> String {
    let (r, n) = ds.class_counts();
    format!("{r} rumour / {n} non-rumour")
}

fn ingest(root: &Path, output: &Path) -> CmdResult {
    let ds = match load_pheme(root) {
        Ok(ds) => ds,
        Err(e @ (Error::PathNotFound(_) | Error::Structure(_))) => {
            return Err(CliError { code: 2, error: e })
        }
        Err(e) => return Err(e.into()),
    };
    save_jsonl(&ds, output)?;
    println!("{}", summary(&ds));
    Ok(())
}

fn lexicons(dir: Option<PathBuf>) -> std::result::Result<Lexicons, CliError> {
    match dir {
        None => Ok(Lexicons::bundled()),
        Some(d) => load_lexicons(&d).map_err(|e| CliError { code: 2, error: e }),
    }
}

fn features(input: &Path, output: &Path, lexicon_dir: Option<PathBuf>) -> CmdResult {
    match &lexicon_dir {
        Some(d) => log::info!("lexicons from {}", d.display()),
        None => log::info!("bundled lexicons"),
    }
    let lex = lexicons(lexicon_dir)?;
    for w in &lex.warnings {
        log::warn!("{w}");
    }
    let ds = load_jsonl(input)?;
    let mut out = csv_header();
    out.push('\n');
    for t in ds.tweets() {
        let fv = extract_all(t, &lex);
        let row = CsvRow {
            id: &t.id,
            features: &fv,
            label: ds.label_of(t).as_str(),
        };
        out.push_str(&format!("{row}\n"));
    }
    write_file(output, &out)?;
    log::info!("wrote {} feature rows to {}", ds.len(), output.display());
    Ok(())
}

fn provider_config(args: &EmbedArgs, base: &ProviderConfig) -> std::result::Result<ProviderConfig, CliError> {
    let mut p = base.clone();
    if let Some(m) = &args.mode {
        p.mode = parse_mode(m)?;
    }
    if let Some(s) = &args.store {
        p.store_path = Some(s.clone());
    }
    if let Some(e) = &args.endpoint {
        p.endpoint = Some(e.clone());
    }
    if let Some(n) = args.batch_size {
        p.batch_size = n;
    }
    if let Some(n) = args.timeout_ms {
        p.timeout_ms = n;
    }
    if let Some(n) = args.max_retries {
        p.max_retries = n;
    }
    if let Some(n) = args.dim {
        p.dim = n;
    }
    Ok(p)
}

fn embed_all(
    provider: &mut dyn EmbeddingProvider,
    ds: &LabeledDataset,
    batch: usize,
) -> rumour_core::Result<EmbeddingStore> {
    let items: Vec<TextItem<'_>> = ds
        .tweets()
        .iter()
        .map(|t| TextItem {
            id: &t.id,
            text: &t.text,
        })
        .collect();
    let mut store = EmbeddingStore::new(provider.dim(), provider.model_tag());
    let total = items.len();
    for (n, chunk) in items.chunks(batch.max(1)).enumerate() {
        for v in provider.embed_batch(chunk)? {
            store.insert(v.tweet_id, v.values)?;
        }
        log::info!("batch {}: {}/{total} tweets embedded", n + 1, store.len());
    }
    Ok(store)
}

fn embed(args: EmbedArgs, cfg: &RunConfig) -> CmdResult {
    let pc = provider_config(&args, &cfg.provider)?;
    let ds = load_jsonl(&args.input)?;
    let output = args.output.clone();
    let result = (|| -> std::result::Result<EmbeddingStore, CliError> {
        // Any failure to build or reach the provider is a service failure.
        pc.validate().map_err(CliError::external)?;
        let mut inner: Box<dyn EmbeddingProvider> = match pc.mode {
            ProviderMode::Precomputed => {
                let path = pc.store_path.as_ref().expect("validated");
                Box::new(PrecomputedProvider::new(load_store(path)?))
            }
            ProviderMode::Remote => Box::new(RemoteProvider::connect(&pc)?),
        };
        let store = match &args.cache {
            Some(path) if path.exists() => {
                let mut cached = CachedProvider::new(load_store(path)?, inner)?;
                embed_all(&mut cached, &ds, pc.batch_size)?;
                let cache = cached.into_store();
                restrict(&cache, &ds)?
            }
            _ => embed_all(inner.as_mut(), &ds, pc.batch_size)?,
        };
        Ok(store)
    })();
    match result.and_then(|store| save_store(&store, &output).map_err(CliError::from)) {
        Ok(()) => {
            log::info!("wrote {} vectors to {}", ds.len(), output.display());
            Ok(())
        }
        Err(e) => {
            let partial = PathBuf::from(format!("{}.partial", output.display()));
            let _ = fs::remove_file(&partial);
            let _ = fs::remove_file(&output);
            Err(e)
        }
    }
}

/// The vectors of `ds` in dataset order.
fn restrict(store: &EmbeddingStore, ds: &LabeledDataset) -> rumour_core::Result<EmbeddingStore> {
    let mut out = EmbeddingStore::new(store.dim(), store.model_tag());
    for id in ds.ids() {
        let v = store.get(id).ok_or_else(|| Error::MissingVector(id.to_string()))?;
        out.insert(id, v.to_vec())?;
    }
    Ok(out)
}

fn apply_run_args(cfg: &mut RunConfig, args: &RunArgs, is_cv: bool) -> CmdResult {
    if let Some(d) = &args.data {
        cfg.jsonl = Some(d.clone());
        cfg.pheme_root = None;
    }
    if let Some(s) = &args.store {
        cfg.embedding_store = Some(s.clone());
    }
    if let Some(l) = &args.lexicons {
        cfg.lexicon_dir = Some(l.clone());
    }
    let (algos, reps) = if is_cv {
        (&mut cfg.cv_algorithms, &mut cfg.cv_representations)
    } else {
        (&mut cfg.algorithms, &mut cfg.representations)
    };
    if let Some(a) = &args.algorithms {
        *algos = parse_algorithms(a)?;
    }
    if let Some(r) = &args.representations {
        *reps = parse_representations(r)?;
    }
    if let Some(k) = args.k {
        cfg.cv_k = k;
    }
    cfg.validate()?;
    cfg.check_paths()?;
    Ok(())
}

fn load_dataset(cfg: &RunConfig) -> std::result::Result<LabeledDataset, CliError> {
    match (&cfg.jsonl, &cfg.pheme_root) {
        (Some(p), _) => Ok(load_jsonl(p)?),
        (None, Some(root)) => Ok(load_pheme(root)?),
        (None, None) => Err(usage("no dataset: set data.jsonl or data.pheme_root, or pass --data")),
    }
}

fn load_representations(
    cfg: &RunConfig,
    wanted: &[Representation],
    ds: &LabeledDataset,
) -> std::result::Result<Vec<RepresentationData>, CliError> {
    let mut out = Vec::new();
    for rep in wanted {
        out.push(match rep {
            Representation::Features39 => {
                RepresentationData::from_features(ds, &lexicons(cfg.lexicon_dir.clone())?)
            }
            Representation::Embedding => {
                let path = cfg
                    .embedding_store
                    .as_ref()
                    .ok_or_else(|| usage("embedding representation needs data.embedding_store or --store"))?;
                RepresentationData::from_store(&load_store(path)?)
            }
        });
    }
    Ok(out)
}

fn write_run_record(cfg: &RunConfig, name: &str) -> CmdResult {
    let record = serde_json::json!({
        "seed": cfg.seed,
        "config_hash": cfg.hash(),
        "config": cfg,
    });
    let text = serde_json::to_string_pretty(&record).expect("config serializes") + "\n";
    write_file(&cfg.out_dir.join(name), &text)
}

fn train_eval(cfg: &RunConfig) -> CmdResult {
    let ds = load_dataset(cfg)?;
    log::info!("{}", summary(&ds));
    let reps = load_representations(cfg, &cfg.representations, &ds)?;
    let split = stratified_split(&ds, cfg.train_fraction, cfg.seed)?;
    let mut rows = Vec::new();
    for data in &reps {
        for &algo in &cfg.algorithms {
            let tc = cfg.train_config(algo);
            log::info!("hold-out {algo} on {}", data.kind.as_str());
            let (report, mut model) = run_holdout(&ds, data, &tc, &split)?;
            model.config_hash = Some(cfg.hash());
            log::info!("{algo}/{}: accuracy {:.3}", data.kind.as_str(), report.metrics.accuracy);
            let model_path = cfg.out_dir.join("models").join(format!("{}.json", report.run_id));
            if let Some(dir) = model_path.parent() {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            save_model(&model, &model_path)?;
            rows.push(ReportRow::from(&report));
        }
    }
    write_reports(cfg, "report", &rows)?;
    write_run_record(cfg, "run.json")
}

fn write_reports(cfg: &RunConfig, stem: &str, rows: &[ReportRow]) -> CmdResult {
    write_file(&cfg.out_dir.join(format!("{stem}.csv")), &report_csv(rows))?;
    let table = compare_report(rows);
    write_file(&cfg.out_dir.join(format!("{stem}.txt")), &table.text)?;
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(table.text.as_bytes());
    Ok(())
}

fn cv(cfg: &RunConfig) -> CmdResult {
    let ds = load_dataset(cfg)?;
    log::info!("{}", summary(&ds));
    let reps = load_representations(cfg, &cfg.cv_representations, &ds)?;
    let split = stratified_split(&ds, cfg.train_fraction, cfg.seed)?;
    let train_ids: Vec<String> = ds
        .ids()
        .filter(|id| split.train_ids.contains(*id))
        .map(String::from)
        .collect();
    let plan = make_folds(&train_ids, cfg.cv_k, cfg.seed)?;
    let mut rows = Vec::new();
    let mut mean_rows = Vec::new();
    for data in &reps {
        for &algo in &cfg.cv_algorithms {
            log::info!("{}-fold cv {algo} on {}", cfg.cv_k, data.kind.as_str());
            let report = run_cv(&ds, data, &cfg.train_config(algo), &plan)?;
            let mut r = report.rows();
            let mut mean = r.last().cloned().expect("mean row");
            mean.run_id = report.run_id.clone();
            mean_rows.push(mean);
            rows.append(&mut r);
        }
    }
    write_file(&cfg.out_dir.join("cv_report.csv"), &report_csv(&rows))?;
    let table = compare_report(&mean_rows);
    write_file(&cfg.out_dir.join("cv_report.txt"), &table.text)?;
    print!("{}", table.text);
    write_run_record(cfg, "cv_run.json")
}

fn compare(paths: &[PathBuf], out: Option<&Path>) -> CmdResult {
    let mut rows = Vec::new();
    for p in paths {
        let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        rows.extend(parse_report_csv(&text).map_err(|e| Error::parse(p, e.to_string()))?);
    }
    let table = compare_report(&rows);
    if let Some(dir) = out {
        write_file(&dir.join("compare.csv"), &table.csv)?;
        write_file(&dir.join("compare.txt"), &table.text)?;
    }
    print!("{}", table.text);
    Ok(())
}
