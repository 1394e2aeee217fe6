//! Config-driven experiment runner.
//!
//! Each stage writes its artifacts into `<output_dir>/<stage>-<hash>/`, where
//! the hash covers every setting that feeds the stage and its upstream
//! stages. Every artifact file starts with a
//! `# kg-typer <stage> config=<hash>` line. A stage whose directory already
//! exists is skipped unless forced; a stage whose upstream directory is
//! missing fails with [`PipelineError::MissingUpstream`].

mod config;
mod grid;
mod report;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

pub use config::{ConfigError, ConfigMap, ExperimentConfig, KEYS};
pub use grid::{run_grid, GridCell, GridReport};
pub use report::{ReportRow, COLUMNS};

use crate::codec::{self, CodecError, EncodedExample, FeatureVocabulary};
use crate::dataset::{self, LabelSet, LabelVocabulary, Partition, PrepError};
use crate::graph::{node_key, GraphBuilder, SemanticGraph};
use crate::metrics::{self, MetricsError};
use crate::nn::{self, ModelState, NnError};
use crate::rdf::{self, IngestError, Term, Triple};
use crate::walker::{self, WalkError, WalkFeature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Prep,
    Walk,
    Encode,
    Train,
    Eval,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Ingest,
        Stage::Prep,
        Stage::Walk,
        Stage::Encode,
        Stage::Train,
        Stage::Eval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Prep => "prep",
            Stage::Walk => "walk",
            Stage::Encode => "encode",
            Stage::Train => "train",
            Stage::Eval => "eval",
        }
    }

    pub fn upstream(self) -> Option<Stage> {
        let i = Stage::ALL.iter().position(|&s| s == self)?;
        i.checked_sub(1).map(|j| Stage::ALL[j])
    }

    /// Config sections that feed this stage, upstream ones included.
    pub fn sections(self) -> &'static [&'static str] {
        const ALL: [&str; 8] = [
            "input", "", "prep", "walk", "encode", "network", "train", "eval",
        ];
        match self {
            Stage::Ingest => &ALL[..1],
            Stage::Prep => &ALL[..3],
            Stage::Walk => &ALL[..4],
            Stage::Encode => &ALL[..5],
            Stage::Train => &ALL[..7],
            Stage::Eval => &ALL[..8],
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{stage} needs {upstream} artifacts at {}; run `{upstream}` first", path.display())]
    MissingUpstream {
        stage: Stage,
        upstream: Stage,
        path: PathBuf,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {reason}", path.display())]
    Artifact { path: PathBuf, reason: String },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Prep(#[from] PrepError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl PipelineError {
    pub fn is_config(&self) -> bool {
        matches!(self, PipelineError::Config(_))
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Re-run stages whose artifacts already exist.
    pub force: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageOutcome {
    pub stage: Stage,
    pub dir: PathBuf,
    pub skipped: bool,
    /// One-line human summary; empty when skipped.
    pub summary: String,
}

/// Where `stage` keeps its artifacts under `cfg`.
pub fn stage_dir(cfg: &ExperimentConfig, stage: Stage) -> PathBuf {
    cfg.output_dir
        .join(format!("{}-{}", stage.name(), cfg.hash(stage.sections())))
}

fn stamp(kind: &str, hash: &str) -> String {
    format!("# kg-typer {kind} config={hash}\n")
}

fn header(stage: Stage, hash: &str) -> String {
    stamp(stage.name(), hash)
}

/// Writes one artifact file inside a stage's scratch directory.
struct Writer<'a> {
    dir: &'a Path,
    stage: Stage,
    hash: String,
}

impl Writer<'_> {
    fn file<F>(&self, name: &str, body: F) -> Result<(), PipelineError>
    where
        F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
    {
        let path = self.dir.join(name);
        let err = io_err(&path);
        let mut w = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
        let result = w
            .write_all(header(self.stage, &self.hash).as_bytes())
            .and_then(|_| body(&mut w))
            .and_then(|_| w.flush());
        result.map_err(err)
    }
}

/// Opens an upstream artifact and checks its stamp.
fn open_artifact(
    cfg: &ExperimentConfig,
    stage: Stage,
    upstream: Stage,
    name: &str,
) -> Result<(PathBuf, BufReader<File>), PipelineError> {
    let dir = stage_dir(cfg, upstream);
    if !dir.is_dir() {
        return Err(PipelineError::MissingUpstream {
            stage,
            upstream,
            path: dir,
        });
    }
    let path = dir.join(name);
    let file = File::open(&path).map_err(io_err(&path))?;
    let mut r = BufReader::new(file);
    let mut first = String::new();
    r.read_line(&mut first).map_err(io_err(&path))?;
    let expected = header(upstream, &cfg.hash(upstream.sections()));
    if first != expected {
        return Err(PipelineError::Artifact {
            path,
            reason: format!("stale or foreign artifact (header {:?})", first.trim_end()),
        });
    }
    Ok((path, r))
}

fn read_text(
    cfg: &ExperimentConfig,
    stage: Stage,
    upstream: Stage,
    name: &str,
) -> Result<(PathBuf, Vec<String>), PipelineError> {
    let (path, r) = open_artifact(cfg, stage, upstream, name)?;
    let lines = r
        .lines()
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err(&path))?;
    Ok((path, lines))
}

fn load_graph(
    cfg: &ExperimentConfig,
    stage: Stage,
    upstream: Stage,
) -> Result<SemanticGraph, PipelineError> {
    let (path, mut r) = open_artifact(cfg, stage, upstream, "graph.bin")?;
    SemanticGraph::load(&mut r).map_err(io_err(&path))
}

fn artifact_err(path: &Path, reason: impl Into<String>) -> PipelineError {
    PipelineError::Artifact {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Runs one stage. Upstream artifacts must already exist.
pub fn run_stage(
    stage: Stage,
    cfg: &ExperimentConfig,
    opts: RunOptions,
) -> Result<StageOutcome, PipelineError> {
    let dir = stage_dir(cfg, stage);
    if dir.is_dir() && !opts.force {
        return Ok(StageOutcome {
            stage,
            dir,
            skipped: true,
            summary: String::new(),
        });
    }
    if let Some(up) = stage.upstream() {
        let up_dir = stage_dir(cfg, up);
        if !up_dir.is_dir() {
            return Err(PipelineError::MissingUpstream {
                stage,
                upstream: up,
                path: up_dir,
            });
        }
    }
    fs::create_dir_all(&cfg.output_dir).map_err(io_err(&cfg.output_dir))?;
    // build in a scratch directory and rename, so a stage directory only
    // ever exists complete
    let scratch = cfg.output_dir.join(format!(
        ".{}.partial",
        dir.file_name().unwrap().to_string_lossy()
    ));
    if scratch.exists() {
        fs::remove_dir_all(&scratch).map_err(io_err(&scratch))?;
    }
    fs::create_dir_all(&scratch).map_err(io_err(&scratch))?;
    let w = Writer {
        dir: &scratch,
        stage,
        hash: cfg.hash(stage.sections()),
    };
    let result = match stage {
        Stage::Ingest => ingest(cfg, &w),
        Stage::Prep => prep(cfg, &w),
        Stage::Walk => walk(cfg, &w),
        Stage::Encode => encode(cfg, &w),
        Stage::Train => train(cfg, &w),
        Stage::Eval => eval(cfg, &w),
    };
    let summary = match result {
        Ok(s) => s,
        Err(e) => {
            let _ = fs::remove_dir_all(&scratch);
            return Err(e);
        }
    };
    if dir.exists() {
        fs::remove_dir_all(&dir).map_err(io_err(&dir))?;
    }
    fs::rename(&scratch, &dir).map_err(io_err(&dir))?;
    Ok(StageOutcome {
        stage,
        dir,
        skipped: false,
        summary,
    })
}

/// Runs every stage in order and returns the evaluation row.
pub fn run_pipeline(
    cfg: &ExperimentConfig,
    opts: RunOptions,
) -> Result<(Vec<StageOutcome>, ReportRow), PipelineError> {
    let outcomes = Stage::ALL
        .into_iter()
        .map(|s| run_stage(s, cfg, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((outcomes, read_report(cfg)?))
}

/// Reads the machine-readable row of a finished evaluation.
pub fn read_report(cfg: &ExperimentConfig) -> Result<ReportRow, PipelineError> {
    let dir = stage_dir(cfg, Stage::Eval);
    let path = dir.join("report.txt");
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    text.lines()
        .find(|l| l.starts_with("dataset="))
        .ok_or_else(|| artifact_err(&path, "no key-value line"))?
        .parse()
        .map_err(|e: String| artifact_err(&path, e))
}

struct Parsed {
    triples: Vec<Triple>,
    malformed: Vec<rdf::MalformedLine>,
    malformed_count: usize,
}

fn parse_file(path: &Path, strict: bool) -> Result<Parsed, PipelineError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut it = rdf::parse_ntriples(BufReader::new(file), strict);
    let triples = it.by_ref().collect::<Result<Vec<_>, _>>()?;
    Ok(Parsed {
        triples,
        malformed: it.malformed().to_vec(),
        malformed_count: it.malformed_count(),
    })
}

fn ingest(cfg: &ExperimentConfig, w: &Writer) -> Result<String, PipelineError> {
    let mut builder = GraphBuilder::new();
    let mut types = std::collections::BTreeSet::new();
    let mut malformed = Vec::new();
    let (mut triples_seen, mut malformed_count) = (0usize, 0usize);
    let mut sources = vec![(cfg.graph.as_path(), true)];
    if let Some(t) = &cfg.types {
        sources.push((t.as_path(), false));
    }
    for (path, is_graph) in sources {
        let parsed = parse_file(path, cfg.strict)?;
        triples_seen += parsed.triples.len();
        malformed_count += parsed.malformed_count;
        malformed.extend(
            parsed
                .malformed
                .into_iter()
                .map(|m| (path.to_path_buf(), m)),
        );
        for t in &parsed.triples {
            if t.predicate.value == cfg.type_predicate {
                if t.subject.is_node() && t.object.is_node() {
                    types.insert((node_key(&t.subject), t.object.value.clone()));
                }
            } else if is_graph {
                builder.add_triple(t);
            }
        }
    }
    let graph = builder.build();
    w.file("graph.bin", |f| graph.save(f))?;
    w.file("types.tsv", |f| {
        for (node, ty) in &types {
            writeln!(f, "{node}\t{ty}")?;
        }
        Ok(())
    })?;
    w.file("malformed.tsv", |f| {
        for (path, m) in &malformed {
            let name = path.file_name().unwrap_or_default().to_string_lossy();
            writeln!(
                f,
                "{name}\t{}\t{}",
                m.line_no,
                m.reason.replace(['\t', '\n'], " ")
            )?;
        }
        Ok(())
    })?;
    Ok(format!(
        "{triples_seen} triples, {malformed_count} malformed lines, {} nodes, {} type assertions",
        graph.node_count(),
        types.len()
    ))
}

fn term_for_key(key: &str) -> Term {
    match key.strip_prefix("_:") {
        Some(label) => Term::blank(label),
        None => Term::iri(key),
    }
}

fn prep(cfg: &ExperimentConfig, w: &Writer) -> Result<String, PipelineError> {
    let graph = load_graph(cfg, Stage::Prep, Stage::Ingest)?;
    let (path, lines) = read_text(cfg, Stage::Prep, Stage::Ingest, "types.tsv")?;
    let type_pred = Term::iri(cfg.type_predicate.clone());
    let type_triples = lines
        .iter()
        .map(|l| {
            let (node, ty) = l
                .split_once('\t')
                .ok_or_else(|| artifact_err(&path, format!("bad line {l:?}")))?;
            Ok(Triple::new(
                term_for_key(node),
                type_pred.clone(),
                Term::iri(ty),
            ))
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let ds = dataset::extract_targets(&graph, &type_triples, cfg.min_support)?;
    let parts = dataset::split(&ds.individuals, &cfg.split_plan());

    w.file("graph.bin", |f| ds.graph.save(f))?;
    w.file("labels.tsv", |f| ds.labels.write_tsv(f))?;
    w.file("labeled.tsv", |f| {
        dataset::write_labeled(f, &ds.graph, &ds.individuals)
    })?;
    w.file("split.tsv", |f| {
        for p in Partition::ALL {
            for (b, batch) in parts.batches(p).iter().enumerate() {
                for it in batch {
                    writeln!(f, "{}\t{}\t{b}", ds.graph.name_of(it.node), p.name())?;
                }
            }
        }
        Ok(())
    })?;
    Ok(format!(
        "{} individuals, {} labels, split {}/{}/{}",
        ds.individuals.len(),
        ds.labels.len(),
        parts.len(Partition::Train),
        parts.len(Partition::Validation),
        parts.len(Partition::Test)
    ))
}

fn read_labeled(
    cfg: &ExperimentConfig,
    stage: Stage,
) -> Result<Vec<(String, LabelSet)>, PipelineError> {
    let (_, r) = open_artifact(cfg, stage, Stage::Prep, "labeled.tsv")?;
    Ok(dataset::read_labeled(r)?)
}

/// `(node, partition, batch)` in split order.
fn read_split(
    cfg: &ExperimentConfig,
    stage: Stage,
) -> Result<Vec<(String, Partition, usize)>, PipelineError> {
    let (path, lines) = read_text(cfg, stage, Stage::Prep, "split.tsv")?;
    lines
        .iter()
        .map(|l| {
            let bad = || artifact_err(&path, format!("bad line {l:?}"));
            let mut f = l.split('\t');
            let (Some(node), Some(p), Some(b), None) = (f.next(), f.next(), f.next(), f.next())
            else {
                return Err(bad());
            };
            let p = Partition::ALL
                .into_iter()
                .find(|x| x.name() == p)
                .ok_or_else(bad)?;
            Ok((node.to_string(), p, b.parse().map_err(|_| bad())?))
        })
        .collect()
}

fn walk(cfg: &ExperimentConfig, w: &Writer) -> Result<String, PipelineError> {
    let graph = load_graph(cfg, Stage::Walk, Stage::Prep)?;
    let labeled = read_labeled(cfg, Stage::Walk)?;
    let nodes = labeled
        .iter()
        .map(|(n, _)| {
            graph.node_id(n).ok_or_else(|| {
                artifact_err(&stage_dir(cfg, Stage::Prep), format!("{n} not in graph"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let features = walker::extract_all(&graph, &nodes, &cfg.walk)?;
    w.file("features.tsv", |f| {
        for ((node, _), fs) in labeled.iter().zip(&features) {
            let joined: Vec<&str> = fs.iter().map(WalkFeature::as_str).collect();
            writeln!(f, "{node}\t{}", joined.join(";"))?;
        }
        Ok(())
    })?;
    let total: usize = features.iter().map(Vec::len).sum();
    Ok(format!(
        "{} individuals, {:.1} distinct features each",
        nodes.len(),
        total as f64 / nodes.len().max(1) as f64
    ))
}

fn read_features(
    cfg: &ExperimentConfig,
    stage: Stage,
) -> Result<HashMap<String, Vec<String>>, PipelineError> {
    let (path, lines) = read_text(cfg, stage, Stage::Walk, "features.tsv")?;
    lines
        .iter()
        .map(|l| {
            let (node, fs) = l
                .split_once('\t')
                .ok_or_else(|| artifact_err(&path, format!("bad line {l:?}")))?;
            let fs = fs
                .split(';')
                .filter(|f| !f.is_empty())
                .map(str::to_string)
                .collect();
            Ok((node.to_string(), fs))
        })
        .collect()
}

fn encode(cfg: &ExperimentConfig, w: &Writer) -> Result<String, PipelineError> {
    let labeled: HashMap<String, LabelSet> =
        read_labeled(cfg, Stage::Encode)?.into_iter().collect();
    let split = read_split(cfg, Stage::Encode)?;
    let features = read_features(cfg, Stage::Encode)?;
    let lookup = |node: &str| {
        let missing = || {
            artifact_err(
                &stage_dir(cfg, Stage::Walk),
                format!("no features for {node}"),
            )
        };
        features.get(node).ok_or_else(missing)
    };
    let mut train_features = Vec::new();
    for (node, p, _) in &split {
        if *p == Partition::Train {
            train_features.extend(lookup(node)?.iter().map(String::as_str));
        }
    }
    let vocab = codec::build_vocabulary(train_features);
    let mut by_part: BTreeMap<Partition, Vec<EncodedExample>> = BTreeMap::new();
    for (node, p, _) in &split {
        let targets = labeled
            .get(node)
            .ok_or_else(|| artifact_err(&stage_dir(cfg, Stage::Prep), format!("{node} unlabeled")))?
            .clone();
        by_part.entry(*p).or_default().push(EncodedExample {
            node: node.clone(),
            input: cfg.encoding.encode(lookup(node)?, &vocab),
            targets,
        });
    }
    w.file("vocab.tsv", |f| vocab.write_tsv(f))?;
    for p in Partition::ALL {
        let rows = by_part.get(&p).map_or(&[][..], Vec::as_slice);
        w.file(&format!("{}.tsv", p.name()), |f| {
            codec::write_encoded(f, rows)
        })?;
    }
    Ok(format!(
        "{} features in vocabulary, input width {}",
        vocab.len(),
        cfg.encoding.input_width(&vocab)
    ))
}

fn read_encoded(
    cfg: &ExperimentConfig,
    stage: Stage,
    p: Partition,
) -> Result<Vec<EncodedExample>, PipelineError> {
    let (_, r) = open_artifact(cfg, stage, Stage::Encode, &format!("{}.tsv", p.name()))?;
    Ok(codec::read_encoded(r)?)
}

fn input_width(cfg: &ExperimentConfig, stage: Stage) -> Result<usize, PipelineError> {
    let (_, r) = open_artifact(cfg, stage, Stage::Encode, "vocab.tsv")?;
    Ok(cfg.encoding.input_width(&FeatureVocabulary::read_tsv(r)?))
}

fn label_count(cfg: &ExperimentConfig, stage: Stage) -> Result<usize, PipelineError> {
    let (_, r) = open_artifact(cfg, stage, Stage::Prep, "labels.tsv")?;
    Ok(LabelVocabulary::read_tsv(r)?.len())
}

fn train(cfg: &ExperimentConfig, w: &Writer) -> Result<String, PipelineError> {
    let encode_dir = stage_dir(cfg, Stage::Encode);
    if !encode_dir.is_dir() {
        return Err(PipelineError::MissingUpstream {
            stage: Stage::Train,
            upstream: Stage::Encode,
            path: encode_dir,
        });
    }
    let split = read_split(cfg, Stage::Train)?;
    let batch_of: HashMap<&str, usize> = split
        .iter()
        .filter(|(_, p, _)| *p == Partition::Train)
        .map(|(n, _, b)| (n.as_str(), *b))
        .collect();
    let mut batches: Vec<Vec<EncodedExample>> = Vec::new();
    for e in read_encoded(cfg, Stage::Train, Partition::Train)? {
        let b = *batch_of.get(e.node.as_str()).ok_or_else(|| {
            artifact_err(&encode_dir, format!("{} not in training split", e.node))
        })?;
        if batches.len() <= b {
            batches.resize_with(b + 1, Vec::new);
        }
        batches[b].push(e);
    }
    let validation = read_encoded(cfg, Stage::Train, Partition::Validation)?;
    let spec = cfg.network_spec(
        input_width(cfg, Stage::Train)?,
        label_count(cfg, Stage::Train)?,
    );
    let mut state = ModelState::new(spec, &cfg.train)?;
    let val = (!validation.is_empty()).then_some(validation.as_slice());
    let trace = nn::train(&mut state, &batches, val, &cfg.train)?;

    w.file("model.ckpt", |f| nn::save_checkpoint(&state.network, f))?;
    w.file("trace.tsv", |f| {
        writeln!(f, "epoch\tloss\ttrain_f1\tval_f1")?;
        for e in &trace.epochs {
            let val = e.validation.map_or(String::from("-"), |m| m.f1.to_string());
            writeln!(f, "{}\t{}\t{}\t{val}", e.epoch, e.loss, e.train.f1)?;
        }
        Ok(())
    })?;
    let last = trace.epochs.last();
    Ok(format!(
        "{} epochs, final loss {:.4}, train f1 {:.4}",
        trace.epochs.len(),
        last.map_or(f64::NAN, |e| e.loss),
        last.map_or(f64::NAN, |e| e.train.f1)
    ))
}

fn eval(cfg: &ExperimentConfig, w: &Writer) -> Result<String, PipelineError> {
    let (path, mut r) = open_artifact(cfg, Stage::Eval, Stage::Train, "model.ckpt")?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io_err(&path))?;
    let network = nn::load_checkpoint(&mut bytes.as_slice()).map_err(io_err(&path))?;
    let test = read_encoded(cfg, Stage::Eval, Partition::Test)?;
    let refs: Vec<&EncodedExample> = test.iter().collect();
    let probs = nn::predict_batches(&network, &refs, 1024)?;
    let predicted = metrics::predict_labels(probs.view(), cfg.train.threshold);
    let actual: Vec<LabelSet> = test.iter().map(|e| e.targets.clone()).collect();
    let m = metrics::micro_f1(&predicted, &actual)?;
    let row = ReportRow::new(cfg, test.len(), m);
    w.file("report.txt", |f| {
        f.write_all(report::table(std::slice::from_ref(&row)).as_bytes())?;
        writeln!(f)?;
        writeln!(f, "{}", row.kv())
    })?;
    Ok(format!("test {m}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_names_round_trip() {
        for s in Stage::ALL {
            assert_eq!(s.name().parse::<Stage>().unwrap(), s);
        }
        assert_eq!(Stage::Ingest.upstream(), None);
        assert_eq!(Stage::Eval.upstream(), Some(Stage::Train));
    }

    #[test]
    fn downstream_hashes_cover_upstream_sections() {
        for s in Stage::ALL {
            if let Some(up) = s.upstream() {
                for sec in up.sections() {
                    assert!(s.sections().contains(sec), "{s} misses {sec}");
                }
            }
        }
    }
}
