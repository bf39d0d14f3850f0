use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use ukg_core::eval::rank_entities;
use ukg_core::{Triple, Vocabulary};

use super::load_model;
use crate::error::{CliError, Result};
use crate::splitdir::SplitDir;

const SUGGESTIONS: usize = 3;

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file or training output directory.
    #[arg(long)]
    pub model: PathBuf,
    /// Split directory providing the vocabulary.
    #[arg(long)]
    pub split: PathBuf,
    #[arg(long)]
    pub head: String,
    #[arg(long)]
    pub relation: String,
    /// Score this tail; without it, list the best tails.
    #[arg(long)]
    pub tail: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
}

fn nearest<'a>(name: &str, candidates: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut scored: Vec<(usize, &str)> = candidates
        .map(|c| (strsim::levenshtein(name, c), c))
        .collect();
    scored.sort();
    scored
        .into_iter()
        .take(SUGGESTIONS)
        .map(|(_, c)| c)
        .collect()
}

fn resolve<'a, I>(kind: &str, name: &str, id: Option<usize>, names: I) -> Result<usize>
where
    I: Iterator<Item = &'a str>,
{
    id.ok_or_else(|| {
        CliError::Data(format!(
            "unknown {kind} `{name}`; nearest: {}",
            nearest(name, names).join(", ")
        ))
    })
}

fn entity(vocab: &Vocabulary, name: &str) -> Result<usize> {
    resolve("entity", name, vocab.entity_id(name), vocab.entities())
}

pub fn run(args: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    let data = SplitDir::load(&args.split)?;
    let vocab = &data.vocab;
    let head = entity(vocab, &args.head)?;
    let relation = resolve(
        "relation",
        &args.relation,
        vocab.relation_id(&args.relation),
        vocab.relations(),
    )?;
    let params = load_model(&args.model, vocab)?;
    let io = |e: std::io::Error| CliError::Internal(e.to_string());

    if let Some(tail_name) = &args.tail {
        let tail = entity(vocab, tail_name)?;
        let confidence = params.confidence(&Triple::new(head, relation, tail))?;
        return writeln!(
            out,
            "{}\t{}\t{}\t{confidence:.6}",
            args.head, args.relation, tail_name
        )
        .map_err(io);
    }

    let scores = params.tail_confidences(head, relation)?;
    for (rank, tail) in rank_entities(&scores)
        .into_iter()
        .take(args.top_k)
        .enumerate()
    {
        let name = vocab.entity_name(tail).unwrap_or("?");
        writeln!(out, "{}\t{name}\t{:.6}", rank + 1, scores[tail]).map_err(io)?;
    }
    Ok(())
}
