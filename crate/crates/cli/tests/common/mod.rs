#![allow(dead_code)]

use std::path::Path;

pub fn ukg(args: &[&str]) -> ukg_cli::Result<String> {
    let mut out = Vec::new();
    ukg_cli::run_args(std::iter::once("ukg").chain(args.iter().copied()), &mut out)?;
    Ok(String::from_utf8(out).unwrap())
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// A split directory generated with the given extra `synth` flags.
pub fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec!["synth", "--out", p(dir)];
    args.extend_from_slice(extra);
    ukg(&args).unwrap();
}
