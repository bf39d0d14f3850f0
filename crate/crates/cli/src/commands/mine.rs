use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use ukg_core::data::FactIndex;
use ukg_core::psl::{format_report, mine_rules, MiningConfig};

use crate::error::{CliError, Result};
use crate::splitdir::SplitDir;

#[derive(Debug, Args)]
pub struct MineArgs {
    #[arg(long)]
    pub split: PathBuf,
    /// Strong-fact threshold; defaults to the one stored with the split.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub min_hit_ratio: f64,
    #[arg(long, default_value_t = 1)]
    pub min_support: usize,
    /// Paths examined per candidate before the estimate is marked truncated.
    #[arg(long, default_value_t = 100_000)]
    pub max_paths: usize,
    /// Report file (tab-separated).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the surviving rules in rule-file syntax.
    #[arg(long)]
    pub rules_out: Option<PathBuf>,
}

pub fn run(args: &MineArgs, out: &mut dyn Write) -> Result<()> {
    let data = SplitDir::load(&args.split)?;
    let tau = args.tau.unwrap_or(data.meta.tau);
    let index = FactIndex::new(&data.split.train, tau);
    let config = MiningConfig {
        min_hit_ratio: args.min_hit_ratio,
        min_support: args.min_support,
        max_paths: args.max_paths,
    };
    let reports = mine_rules(&index, &data.vocab, &config);
    fs::write(&args.out, format_report(&reports)).map_err(|e| CliError::file(&args.out, e))?;
    if let Some(path) = &args.rules_out {
        let text: String = reports.iter().map(|r| format!("{}\n", r.rule)).collect();
        fs::write(path, text).map_err(|e| CliError::file(path, e))?;
    }
    writeln!(out, "{} rules -> {}", reports.len(), args.out.display())
        .map_err(|e| CliError::Internal(e.to_string()))
}
