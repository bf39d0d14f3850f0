use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::json;
use ukg_core::eval::{evaluate, EvalOptions, EvalTasks, RelevancePool};

use super::load_model;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::splitdir::SplitDir;

pub const REPORT_TEXT_FILE: &str = "eval_report.txt";
pub const REPORT_JSON_FILE: &str = "eval_report.json";
pub const PER_QUERY_FILE: &str = "ndcg_per_query.tsv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Confidence,
    Ranking,
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Relevance {
    /// Label ranking queries from train, validation and test facts.
    AllSplits,
    TestOnly,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model file or training output directory.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub split: PathBuf,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "confidence,ranking,classification"
    )]
    pub tasks: Vec<Task>,
    #[arg(long, value_enum, default_value = "all-splits")]
    pub relevance: Relevance,
    /// Seeds the negatives used to fit the classifier.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write reports and a manifest here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include per-query nDCG in the output directory.
    #[arg(long, requires = "out")]
    pub per_query: bool,
}

pub fn run(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let data = SplitDir::load(&args.split)?;
    let params = load_model(&args.model, &data.vocab)?;
    let options = EvalOptions {
        tasks: EvalTasks {
            confidence: args.tasks.contains(&Task::Confidence),
            ranking: args.tasks.contains(&Task::Ranking),
            classification: args.tasks.contains(&Task::Classification),
        },
        tau: data.meta.tau,
        relevance_pool: match args.relevance {
            Relevance::AllSplits => RelevancePool::AllSplits,
            Relevance::TestOnly => RelevancePool::TestOnly,
        },
        seed: args.seed,
    };
    let report = evaluate(&params, &data.split, &options)?;
    let text = report.to_text();
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Internal(e.to_string()))?;

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| CliError::file(dir, e))?;
        let save = |name: &str, body: String| {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| CliError::file(&path, e))
        };
        save(REPORT_TEXT_FILE, text.clone())?;
        save(
            REPORT_JSON_FILE,
            serde_json::to_string_pretty(&report)? + "\n",
        )?;
        let mut outputs = vec![REPORT_TEXT_FILE, REPORT_JSON_FILE];
        if args.per_query {
            let mut rows = String::from("head\trelation\tndcg_linear\tndcg_exp\n");
            let show = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
            for q in &report.per_query {
                let name = |id, f: fn(&ukg_core::Vocabulary, usize) -> Option<&str>| {
                    f(&data.vocab, id).unwrap_or("?").to_string()
                };
                rows += &format!(
                    "{}\t{}\t{}\t{}\n",
                    name(q.head, ukg_core::Vocabulary::entity_name),
                    name(q.relation, ukg_core::Vocabulary::relation_name),
                    show(q.linear),
                    show(q.exponential)
                );
            }
            save(PER_QUERY_FILE, rows)?;
            outputs.push(PER_QUERY_FILE);
        }
        let mut manifest = RunManifest::new("eval", json!({ "options": options }));
        manifest.add_input(&args.split.join(crate::manifest::MANIFEST_FILE))?;
        let model_input = if args.model.is_dir() {
            args.model.join(super::MODEL_FILE)
        } else {
            args.model.clone()
        };
        manifest.add_input(&model_input)?;
        manifest.finish(dir, &outputs)?;
    }
    Ok(())
}
