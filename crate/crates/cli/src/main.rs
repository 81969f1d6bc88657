//! `exodromy`: fans, orbit posets, fundamental categories, constructible
//! sheaves, and Kummer covers from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid input, 3 property-check
//! failure. All output is deterministic for fixed inputs and `--seed`.

mod formats;
mod selfcheck;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use exodromy::fan::{orbit_poset, validate_fan, Fan};
use exodromy::fundcat::GaloisDatum;
use exodromy::sheafcalc::{
    decompose, enumerate_sheaves, glue, hom_set, pushforward_open, sections, validate_sheaf,
    SheafError,
};
use exodromy::tame::{cover_components, descent_cross_check, extension_from_surjection};
use formats::*;
use num_bigint::BigInt;
use serde::Serialize;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "exodromy", version, about = "Toric orbit stratifications and their sheaf calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fan file operations
    Fan {
        #[command(subcommand)]
        cmd: FanCmd,
    },
    /// Print the orbit poset of a fan
    Poset {
        file: PathBuf,
        /// Emit Graphviz DOT instead of JSON
        #[arg(long)]
        dot: bool,
    },
    /// Print the fundamental category (objects, ranks, Hasse generators)
    Fundcat {
        file: PathBuf,
        /// Truncate at this finite level
        #[arg(long)]
        level: Option<u64>,
        /// Cyclotomic exponent of Frobenius modulo the level
        #[arg(long, default_value_t = 1)]
        frob: u64,
        /// Residue characteristic gate (0 means none)
        #[arg(long = "char", default_value_t = 0)]
        char_p: u64,
        /// Emit Graphviz DOT instead of JSON
        #[arg(long)]
        dot: bool,
    },
    /// Sheaf file operations
    Sheaf {
        #[command(subcommand)]
        cmd: SheafCmd,
    },
    /// Count sheaves with bounded stalks up to isomorphism
    Enumerate {
        file: PathBuf,
        #[arg(long)]
        max_stalk: usize,
        #[arg(long)]
        level: Option<u64>,
        #[arg(long, default_value_t = 1)]
        frob: u64,
        /// Cap on the number of candidates examined
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
    },
    /// Kummer cover operations
    Cover {
        #[command(subcommand)]
        cmd: CoverCmd,
    },
    /// Run the built-in oracle suites
    Selfcheck {
        /// Seed for the randomized suites
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum FanCmd {
    /// Parse a fan file and check every fan invariant
    Validate { file: PathBuf },
}

#[derive(Subcommand)]
enum SheafCmd {
    /// Parse a sheaf file and check every functor axiom
    Validate { file: PathBuf },
    /// Enumerate sections over an upward-closed set of cones
    Sections {
        file: PathBuf,
        /// Comma-separated cone ids (defaults to the whole domain)
        #[arg(long)]
        over: Option<String>,
    },
    /// Push a sheaf forward from its (upward-closed) domain to the whole fan
    Pushforward { file: PathBuf },
    /// Split a sheaf at a minimal stratum into open part, stalk, and
    /// comparison map
    Decompose {
        file: PathBuf,
        #[arg(long)]
        stratum: usize,
    },
    /// Reassemble a sheaf from a decomposition bundle
    Glue { file: PathBuf },
    /// Enumerate all natural transformations between two sheaves
    Hom {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
}

#[derive(Subcommand)]
enum CoverCmd {
    /// Compute the lattice extension of a character surjection
    Build {
        file: PathBuf,
        #[arg(long = "char", default_value_t = 0)]
        char_p: u64,
    },
    /// Image and component count of a sublattice under the character
    Components {
        file: PathBuf,
        /// Sublattice rows as a JSON array, e.g. "[[1,0],[0,2]]"
        #[arg(long)]
        sub: String,
    },
    /// Compare the sheaf-calculus pushforward with the descent dichotomy
    Crosscheck {
        file: PathBuf,
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        stratum: usize,
        #[arg(long)]
        level: Option<u64>,
        #[arg(long, default_value_t = 1)]
        frob: u64,
        #[arg(long = "char", default_value_t = 0)]
        char_p: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

fn property_failure(msg: impl Into<String>) -> Failure {
    Failure { code: 3, message: msg.into() }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Failure {
        invalid(e.to_string())
    }
}

impl From<SheafError> for Failure {
    fn from(e: SheafError) -> Failure {
        invalid(e.to_string())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable output"));
}

fn load_fan(path: &Path) -> Result<Fan, Failure> {
    let file: FanFile = read_json(path)?;
    let parsed = fan_from_file(&file)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let report = validate_fan(&parsed.fan);
    if !report.is_valid() {
        let mut msg = String::from("fan is invalid:");
        for v in &report.violations {
            msg.push_str(&format!("\n  {v}"));
        }
        return Err(invalid(msg));
    }
    Ok(parsed.fan)
}

fn galois_header(level: Option<u64>, frob: u64, char_p: u64) -> Result<Option<GaloisHeader>, Failure> {
    match level {
        None => Ok(None),
        Some(n) => {
            GaloisDatum::new(n, frob, char_p).map_err(|e| invalid(e.to_string()))?;
            Ok(Some(GaloisHeader { level: n, frob, char: char_p }))
        }
    }
}

#[derive(Serialize)]
struct PosetJson {
    format: u32,
    rank: usize,
    cones: Vec<PosetCone>,
    covers: Vec<(usize, usize)>,
    top: usize,
}

#[derive(Serialize)]
struct PosetCone {
    id: usize,
    rays: Vec<Vec<i64>>,
    dim: usize,
    orbit_dim: usize,
}

fn poset_json(fan: &Fan) -> Result<PosetJson, Failure> {
    use num_traits::ToPrimitive;
    let poset = orbit_poset(fan).map_err(|e| invalid(e.to_string()))?;
    let cones = fan
        .cones()
        .iter()
        .enumerate()
        .map(|(id, c)| PosetCone {
            id,
            rays: c
                .rays()
                .iter()
                .map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect())
                .collect(),
            dim: fan.cone_dim(id),
            orbit_dim: poset.orbit_dim(id),
        })
        .collect();
    Ok(PosetJson {
        format: FORMAT,
        rank: fan.rank(),
        cones,
        covers: poset.covers().to_vec(),
        top: poset.top(),
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Fan { cmd: FanCmd::Validate { file } } => {
            let fan = load_fan(&file)?;
            println!("fan is valid: {} cones, rank {}", fan.len(), fan.rank());
            Ok(())
        }
        Command::Poset { file, dot } => {
            let fan = load_fan(&file)?;
            let json = poset_json(&fan)?;
            if dot {
                println!("digraph orbit_poset {{");
                println!("  rankdir=BT;");
                for c in &json.cones {
                    println!(
                        "  n{} [label=\"{}: dim {} orbit {}\"];",
                        c.id, c.id, c.dim, c.orbit_dim
                    );
                }
                for (s, t) in &json.covers {
                    println!("  n{s} -> n{t};");
                }
                println!("}}");
            } else {
                print_json(&json);
            }
            Ok(())
        }
        Command::Fundcat { file, level, frob, char_p, dot } => {
            let fan = load_fan(&file)?;
            let galois = galois_header(level, frob, char_p)?;
            let site = site_for(&fan, galois)?;
            let cat = site.category();
            let poset = site.poset();

            #[derive(Serialize)]
            struct FundcatJson {
                format: u32,
                objects: Vec<FundcatObject>,
                covers: Vec<(usize, usize)>,
                #[serde(skip_serializing_if = "Option::is_none")]
                galois: Option<GaloisHeader>,
            }
            #[derive(Serialize)]
            struct FundcatObject {
                id: usize,
                orbit_dim: usize,
                hom_rank: usize,
                #[serde(skip_serializing_if = "Option::is_none")]
                endo_hom_size: Option<u64>,
            }
            let objects: Vec<FundcatObject> = poset
                .objects()
                .map(|s| FundcatObject {
                    id: s,
                    orbit_dim: poset.orbit_dim(s),
                    hom_rank: cat.group_rank(s),
                    endo_hom_size: site.finite().map(|flc| flc.hom_size(s, s)),
                })
                .collect();
            if dot {
                println!("digraph fundamental_category {{");
                println!("  rankdir=BT;");
                for o in &objects {
                    println!("  n{} [label=\"{}: Z^{}\"];", o.id, o.id, o.hom_rank);
                }
                for (s, t) in poset.covers() {
                    println!("  n{s} -> n{t};");
                }
                println!("}}");
            } else {
                print_json(&FundcatJson {
                    format: FORMAT,
                    objects,
                    covers: poset.covers().to_vec(),
                    galois,
                });
            }
            Ok(())
        }
        Command::Sheaf { cmd } => run_sheaf(cmd),
        Command::Enumerate { file, max_stalk, level, frob, budget } => {
            let fan = load_fan(&file)?;
            let galois = galois_header(level, frob, 0)?;
            let site = site_for(&fan, galois)?;
            let reps = enumerate_sheaves(&site, max_stalk, budget)
                .map_err(|e| invalid(e.to_string()))?;
            println!("{}", reps.len());
            for (i, rep) in reps.iter().enumerate() {
                let sizes: Vec<String> = rep
                    .domain()
                    .iter()
                    .map(|&s| format!("{}:{}", s, rep.carrier(s)))
                    .collect();
                println!("class {i}: stalks {{{}}}", sizes.join(", "));
            }
            Ok(())
        }
        Command::Cover { cmd } => run_cover(cmd),
        Command::Selfcheck { seed } => {
            if selfcheck::run_all(seed) {
                Ok(())
            } else {
                Err(property_failure("selfcheck failed"))
            }
        }
    }
}

fn run_sheaf(cmd: SheafCmd) -> Result<(), Failure> {
    match cmd {
        SheafCmd::Validate { file } => {
            let parsed = sheaf_from_file(&read_json(&file)?)?;
            for w in &parsed.warnings {
                eprintln!("warning: {w}");
            }
            let report = validate_sheaf(&parsed.sheaf);
            if report.is_valid() {
                println!(
                    "sheaf is valid: {} stalks, total carrier {}",
                    parsed.sheaf.domain().len(),
                    parsed.sheaf.carriers().values().sum::<usize>()
                );
                Ok(())
            } else {
                let mut msg = String::from("sheaf is invalid:");
                for v in &report.violations {
                    msg.push_str(&format!("\n  {v}"));
                }
                Err(invalid(msg))
            }
        }
        SheafCmd::Sections { file, over } => {
            let parsed = sheaf_from_file(&read_json(&file)?)?;
            ensure_valid(&parsed)?;
            let t_set: BTreeSet<usize> = match over {
                None => parsed.sheaf.domain().clone(),
                Some(text) => text
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().map_err(|e| invalid(e.to_string())))
                    .collect::<Result<_, _>>()?,
            };
            let secs = sections(&parsed.sheaf, &t_set)?;
            #[derive(Serialize)]
            struct SectionsJson {
                count: usize,
                sections: Vec<std::collections::BTreeMap<usize, usize>>,
            }
            print_json(&SectionsJson { count: secs.len(), sections: secs });
            Ok(())
        }
        SheafCmd::Pushforward { file } => {
            let parsed = sheaf_from_file(&read_json(&file)?)?;
            ensure_valid(&parsed)?;
            let pushed = pushforward_open(&parsed.sheaf)?;
            print_json(&sheaf_to_file(&pushed));
            Ok(())
        }
        SheafCmd::Decompose { file, stratum } => {
            let parsed = sheaf_from_file(&read_json(&file)?)?;
            ensure_valid(&parsed)?;
            let d = decompose(&parsed.sheaf, stratum)?;
            print_json(&BundleFile {
                format: FORMAT,
                stratum: d.stratum,
                open: sheaf_to_file(&d.open_part),
                closed: local_system_to_file(&d.closed_part),
                theta: d.theta,
            });
            Ok(())
        }
        SheafCmd::Glue { file } => {
            let bundle: BundleFile = read_json(&file)?;
            if bundle.format != FORMAT {
                return Err(invalid(format!("unsupported format {}", bundle.format)));
            }
            let open = sheaf_from_file(&bundle.open)?;
            let closed = local_system_from_file(&open.site, &bundle.closed)?;
            let glued = glue(&open.sheaf, &closed, &bundle.theta)?;
            print_json(&sheaf_to_file(&glued));
            Ok(())
        }
        SheafCmd::Hom { left, right } => {
            let f = sheaf_from_file(&read_json(&left)?)?;
            let g = sheaf_from_file(&read_json(&right)?)?;
            ensure_valid(&f)?;
            ensure_valid(&g)?;
            let homs = hom_set(&f.sheaf, &g.sheaf)?;
            #[derive(Serialize)]
            struct HomJson {
                count: usize,
                morphisms: Vec<std::collections::BTreeMap<usize, Vec<usize>>>,
            }
            print_json(&HomJson {
                count: homs.len(),
                morphisms: homs.into_iter().map(|m| m.components).collect(),
            });
            Ok(())
        }
    }
}

fn ensure_valid(parsed: &ParsedSheaf) -> Result<(), Failure> {
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let report = validate_sheaf(&parsed.sheaf);
    if report.is_valid() {
        Ok(())
    } else {
        let mut msg = String::from("sheaf is invalid:");
        for v in &report.violations {
            msg.push_str(&format!("\n  {v}"));
        }
        Err(invalid(msg))
    }
}

fn run_cover(cmd: CoverCmd) -> Result<(), Failure> {
    match cmd {
        CoverCmd::Build { file, char_p } => {
            let phi = cover_from_file(&read_json(&file)?)?;
            let spec = extension_from_surjection(&phi, char_p)
                .map_err(|e| invalid(e.to_string()))?;
            print_json(&extension_to_file(&spec));
            Ok(())
        }
        CoverCmd::Components { file, sub } => {
            let phi = cover_from_file(&read_json(&file)?)?;
            let rows: Vec<Vec<i64>> =
                serde_json::from_str(&sub).map_err(|e| invalid(format!("--sub: {e}")))?;
            let matrix = if rows.is_empty() {
                exodromy::intlat::IntMatrix::zeros(0, phi.source_rank)
            } else {
                exodromy::intlat::IntMatrix::from_rows(
                    rows.iter()
                        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                        .collect(),
                )
            };
            let (descends, count) =
                cover_components(&phi, &matrix).map_err(|e| invalid(e.to_string()))?;
            #[derive(Serialize)]
            struct ComponentsJson {
                descends: bool,
                component_count: u64,
            }
            use num_traits::ToPrimitive;
            print_json(&ComponentsJson {
                descends,
                component_count: count.to_u64().expect("desk-scale count"),
            });
            Ok(())
        }
        CoverCmd::Crosscheck { file, fan, stratum, level, frob, char_p } => {
            let phi = cover_from_file(&read_json(&file)?)?;
            let chart = load_fan(&fan)?;
            let galois = match level {
                None => None,
                Some(n) => {
                    Some(GaloisDatum::new(n, frob, char_p).map_err(|e| invalid(e.to_string()))?)
                }
            };
            let verdict = descent_cross_check(&phi, &chart, stratum, galois)
                .map_err(|e| invalid(e.to_string()))?;
            #[derive(Serialize)]
            struct VerdictJson {
                stratum: usize,
                descends: bool,
                component_count: u64,
                pushforward_stalk: usize,
                predicted_stalk: usize,
                agree: bool,
            }
            use num_traits::ToPrimitive;
            print_json(&VerdictJson {
                stratum: verdict.stratum,
                descends: verdict.descends,
                component_count: verdict.component_count.to_u64().expect("desk-scale count"),
                pushforward_stalk: verdict.pushforward_stalk,
                predicted_stalk: verdict.predicted_stalk,
                agree: verdict.agree,
            });
            if verdict.agree {
                Ok(())
            } else {
                Err(property_failure("descent cross-check disagreed"))
            }
        }
    }
}

fn main() -> ExitCode {
    // behave like a normal unix tool when the reader closes the pipe
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
