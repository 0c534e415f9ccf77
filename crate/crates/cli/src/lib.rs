//! Command-line front end: expression syntax, JSON output and subcommand dispatch.

pub mod error;
pub mod json;
pub mod parse;
pub mod selftest;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use mwk_core::arith::{hilbert_classical, set_max_factor_digits};
use mwk_core::hasse::{transfer_image_test, QuadExt};
use mwk_core::idele::{diagonal, MwIdele};
use mwk_core::localsym::{h_mw, in_wild_kernel, moore_check, mw_hilbert};
use mwk_core::mwcore::{in_kmw_z, in_kmw_zs, in_plus, normal_form, residue};
use mwk_core::{MwExpr, Place};
use serde_json::{json, Map, Value};

pub use error::{CliError, CliResult};
pub use parse::{parse, parse_rational};

#[derive(Debug, Parser)]
#[command(name = "mwk", version, about = "Milnor-Witt K-theory of Q", allow_negative_numbers = true)]
pub struct Cli {
    /// Refuse to factor integers with more decimal digits than this.
    #[arg(long, global = true)]
    pub max_factor_digits: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal form: Milnor and Witt images, s_inf and residues.
    Nf {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Residue at a prime.
    Residue {
        #[arg(long)]
        prime: u64,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Classical Hilbert symbol (a, b)_v, or its Milnor-Witt refinement with --mw.
    Hilbert {
        #[arg(long)]
        mw: bool,
        #[arg(long)]
        place: Place,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Local Milnor-Witt symbols of a degree-2 element at every relevant place.
    Hmw {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Local symbols of [a][b] and their reduced product; exit 4 unless it is +1.
    Reciprocity {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Membership in K^MW(Z), K^MW(Z[1/S]) (`ZS=2,3`), the signature kernel (`plus`)
    /// or the kernel of all local symbols (`wild`).
    Membership {
        #[arg(long)]
        group: String,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Idele operations on JSON files.
    Idele {
        #[command(subcommand)]
        op: IdeleOp,
    },
    /// Decide whether a degree-2 element is a transfer from Q(sqrt d).
    Hasse {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Run the seeded invariant suites; exit 4 on any failure.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        size: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum IdeleOp {
    /// Product of local absolute values.
    Vol {
        #[arg(long)]
        file: PathBuf,
    },
    /// Diagonal image of a degree-1 expression.
    Diag {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Parity of an idele with all u-coordinates 1.
    Parity {
        #[arg(long)]
        file: PathBuf,
    },
    /// Sum of the ideles in the given files.
    Add {
        #[arg(long = "file", required = true)]
        files: Vec<PathBuf>,
    },
}

/// JSON for standard output, and whether the requested check held.
pub struct Outcome {
    pub json: Value,
    pub ok: bool,
}

impl From<Value> for Outcome {
    fn from(json: Value) -> Self {
        Outcome { json, ok: true }
    }
}

fn read_idele_file(path: &Path) -> CliResult<MwIdele> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    json::read_idele(&value)
}

fn membership(group: &str, e: &MwExpr) -> CliResult<bool> {
    Ok(match group {
        "Z" => in_kmw_z(e)?,
        "plus" => in_plus(e)?,
        "wild" => in_wild_kernel(e)?,
        g => {
            let list = g
                .strip_prefix("ZS=")
                .ok_or_else(|| CliError::Input(format!("unknown group \"{g}\"")))?;
            let primes = list
                .split(',')
                .map(|s| s.trim().parse::<u64>())
                .collect::<Result<BTreeSet<u64>, _>>()
                .map_err(|_| CliError::Input(format!("bad prime list \"{list}\"")))?;
            in_kmw_zs(e, &primes)?
        }
    })
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    if let Some(d) = cli.max_factor_digits {
        set_max_factor_digits(d);
    }
    let out = match &cli.command {
        Command::Nf { expr } => json::normal_form(&normal_form(&parse(expr)?)?).into(),
        Command::Residue { prime, expr } => json::residue(&residue(&parse(expr)?, *prime)?).into(),
        Command::Hilbert { mw, place, a, b } => {
            let (a, b) = (parse_rational(a)?, parse_rational(b)?);
            let value = if *mw {
                let x = MwExpr::symbol(vec![a])?;
                let y = MwExpr::symbol(vec![b])?;
                json::bvalue(&mw_hilbert(&x, &y, *place)?)
            } else {
                json!(hilbert_classical(&a, &b, *place)?)
            };
            json!({ "place": place.to_string(), "mw": mw, "value": value }).into()
        }
        Command::Hmw { expr } => json::place_map(&h_mw(&parse(expr)?)?, json::bvalue).into(),
        Command::Reciprocity { a, b } => {
            let (a, b) = (parse_rational(a)?, parse_rational(b)?);
            let report = moore_check(&MwExpr::symbol(vec![a.clone(), b.clone()])?)?;
            let mut places = Map::new();
            for (v, h) in &report.symbols {
                places.insert(
                    v.to_string(),
                    json!({
                        "hilbert": hilbert_classical(&a, &b, *v)?,
                        "mw": json::bvalue(h),
                        "reduced": json::bvalue(&report.reduced[v]),
                    }),
                );
            }
            Outcome {
                json: json!({ "places": places, "product": report.product }),
                ok: report.passed(),
            }
        }
        Command::Membership { group, expr } => {
            let member = membership(group, &parse(expr)?)?;
            json!({ "group": group, "member": member }).into()
        }
        Command::Idele { op } => match op {
            IdeleOp::Vol { file } => {
                json!({ "vol": json::rational(&read_idele_file(file)?.vol()?) }).into()
            }
            IdeleOp::Diag { expr } => json::idele(&diagonal(&parse(expr)?)?).into(),
            IdeleOp::Parity { file } => json!({ "parity": read_idele_file(file)?.parity()? }).into(),
            IdeleOp::Add { files } => {
                let mut sum = MwIdele::identity();
                for f in files {
                    sum = sum.add(&read_idele_file(f)?)?;
                }
                json::idele(&sum).into()
            }
        },
        Command::Hasse { d, expr } => {
            let r = transfer_image_test(&parse(expr)?, &QuadExt::new(*d)?)?;
            json!({
                "in_transfer_image": r.in_image,
                "certificate": json::place_map(&r.certificate, |k| json!(k)),
            })
            .into()
        }
        Command::Selftest { seed, size } => {
            let (json, ok) = selftest::run(*seed, *size);
            Outcome { json, ok }
        }
    };
    Ok(out)
}
