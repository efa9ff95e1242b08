//! Command-line front end.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::{debug, info};

use crate::detect::{scan, to_text, ScanOptions};
use crate::diff::DEFAULT_THRESHOLD;
use crate::eval::{evaluate, parse_reports, parse_truth};
use crate::infer::{infer_with, load_pairs, merge};
use crate::model::ProgramModel;
use crate::repair::{render_suggestion, suggest};
use crate::store::{self, PatternPack};

/// Pack inferred from the shipped example pairs.
pub const BUILTIN_PACK: &str = include_str!("../data/patterns.json");

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FINDINGS: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "misuse-forge", version, about = "Infer security-API misuse patterns from example pairs and scan Java sources with them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infer a merged pattern pack from a directory of example pairs.
    Infer {
        pairs_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_threshold)]
        threshold: Option<f64>,
    },
    /// Scan Java files or directories for misuses.
    Scan {
        #[arg(required = true)]
        sources: Vec<PathBuf>,
        /// Pattern packs; the built-in pack is used when none is given.
        #[arg(long = "patterns")]
        patterns: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        emit_repairs: bool,
        #[arg(long, value_parser = parse_threshold)]
        threshold: Option<f64>,
    },
    /// Compare a report file with ground truth.
    Eval {
        reports: PathBuf,
        truth: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate pattern packs.
    PackValidate {
        #[arg(required = true)]
        packs: Vec<PathBuf>,
    },
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err("threshold must be in (0, 1]".into())
    }
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter("MISUSE_FORGE_LOG");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Run with parsed arguments and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Infer { pairs_dir, out, threshold } => cmd_infer(&pairs_dir, out.as_deref(), threshold.unwrap_or(DEFAULT_THRESHOLD)),
        Command::Scan { sources, patterns, out, format, emit_repairs, threshold } => {
            let opts = ScanOptions { threshold: threshold.unwrap_or(DEFAULT_THRESHOLD) };
            cmd_scan(&sources, &patterns, out.as_deref(), format, emit_repairs, &opts)
        }
        Command::Eval { reports, truth, format, out } => cmd_eval(&reports, &truth, format, out.as_deref()),
        Command::PackValidate { packs } => cmd_pack_validate(&packs),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn cmd_infer(dir: &Path, out: Option<&Path>, threshold: f64) -> Result<i32> {
    let pairs = load_pairs(dir).with_context(|| format!("reading {}", dir.display()))?;
    let mut patterns = Vec::new();
    let mut failed = 0;
    for p in &pairs {
        match infer_with(&p.name, &p.insecure, &p.secure, threshold) {
            Ok(r) => {
                eprintln!("ok      {} -> {}", p.name, r.pattern.id);
                for d in &r.diagnostics {
                    eprintln!("        {d}");
                }
                patterns.push(r.pattern);
            }
            Err(e) => {
                failed += 1;
                eprintln!("failed  {}: {e}", p.name);
            }
        }
    }
    let merged = merge(&patterns);
    info!("{} pairs, {} patterns inferred, {} after merging", pairs.len(), patterns.len(), merged.len());
    eprintln!("{} of {} pairs inferred; {} unique patterns", patterns.len(), pairs.len(), merged.len());
    let pack = PatternPack::new(merged);
    match out {
        Some(p) => store::save(&pack, p)?,
        None => write_output(None, &pack.to_canonical_json())?,
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_ERROR })
}

/// Java files under the given paths, in a stable order.
pub fn collect_sources(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    fn walk(p: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(p)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
            entries.sort();
            for e in entries {
                walk(&e, out)?;
            }
        } else if p.extension().is_some_and(|x| x == "java") {
            out.push(p.to_path_buf());
        }
        Ok(())
    }
    let mut out = Vec::new();
    for p in paths {
        if !p.exists() {
            bail!("no such file or directory: {}", p.display());
        }
        if p.is_file() && p.extension().is_none_or(|x| x != "java") {
            out.push(p.clone());
        } else {
            walk(p, &mut out)?;
        }
    }
    Ok(out)
}

pub fn load_packs(paths: &[PathBuf]) -> Result<PatternPack> {
    if paths.is_empty() {
        return Ok(store::parse(BUILTIN_PACK)?);
    }
    let mut all = Vec::new();
    for p in paths {
        all.extend(store::load(p)?.patterns);
    }
    Ok(PatternPack::new(merge(&all)))
}

pub fn cmd_scan(sources: &[PathBuf], packs: &[PathBuf], out: Option<&Path>, format: Format, emit_repairs: bool, opts: &ScanOptions) -> Result<i32> {
    let pack = load_packs(packs)?;
    let files = collect_sources(sources)?;
    let mut inputs = Vec::new();
    for f in &files {
        let text = std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
        inputs.push((f.display().to_string(), text));
    }
    debug!("scanning {} files with {} patterns", inputs.len(), pack.patterns.len());
    let model = match ProgramModel::build(&inputs) {
        Ok(m) => m,
        Err(errs) => {
            for e in &errs {
                eprintln!("parse error: {e}");
            }
            return Ok(EXIT_ERROR);
        }
    };
    let reports = scan(&model, &pack, opts);
    let text = match format {
        Format::Json => {
            let mut s = String::new();
            for r in &reports {
                let mut v = serde_json::to_value(r)?;
                if emit_repairs {
                    let p = pack.patterns.iter().find(|p| p.id == r.pattern_id).expect("pattern of report");
                    v["repair"] = serde_json::to_value(suggest(r, p, &model))?;
                }
                s.push_str(&serde_json::to_string(&v)?);
                s.push('\n');
            }
            s
        }
        Format::Text if emit_repairs => {
            let mut s = String::new();
            for r in &reports {
                s.push_str(&to_text(std::slice::from_ref(r)));
                let p = pack.patterns.iter().find(|p| p.id == r.pattern_id).expect("pattern of report");
                s.push_str(&render_suggestion(&suggest(r, p, &model)));
            }
            s
        }
        Format::Text => to_text(&reports),
    };
    write_output(out, &text)?;
    info!("{} reports", reports.len());
    Ok(if reports.is_empty() { EXIT_OK } else { EXIT_FINDINGS })
}

pub fn cmd_eval(reports: &Path, truth: &Path, format: Format, out: Option<&Path>) -> Result<i32> {
    let r = std::fs::read_to_string(reports).with_context(|| format!("reading {}", reports.display()))?;
    let t = std::fs::read_to_string(truth).with_context(|| format!("reading {}", truth.display()))?;
    let r = parse_reports(&r).with_context(|| format!("parsing {}", reports.display()))?;
    let t = parse_truth(&t).with_context(|| format!("parsing {}", truth.display()))?;
    let m = evaluate(&r, &t);
    let text = match format {
        Format::Text => m.to_table(),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&m.to_json())?),
    };
    write_output(out, &text)?;
    Ok(EXIT_OK)
}

pub fn cmd_pack_validate(packs: &[PathBuf]) -> Result<i32> {
    let mut code = EXIT_OK;
    for p in packs {
        match store::load(p) {
            Ok(pack) => println!("{}: ok, {} patterns", p.display(), pack.patterns.len()),
            Err(store::StoreError::Schema(errs)) => {
                code = EXIT_ERROR;
                for e in errs {
                    println!("{}: {e}", p.display());
                }
            }
            Err(e) => {
                code = EXIT_ERROR;
                println!("{}: {e}", p.display());
            }
        }
    }
    Ok(code)
}
