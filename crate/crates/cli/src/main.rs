//! Command-line workbench for finite ordered monoids.
//!
//! Exit codes: 0 on success, 1 when a checked property fails or a query
//! answers negatively (a counterexample, a refuted relation, an unproved
//! pair), 2 when the input is malformed or an operation's precondition is
//! not met.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pomonoid::{
    check_id_fragment_cancellativity, check_meet_distribution,
    check_square_condition, enumerate_conuclei, enumerate_nuclei, id_algebra,
    is_cancellative, is_commutative, is_down_directed, is_ideally_residuated,
    is_integral, is_integrally_closed, is_unital, nuclear_image,
    order_cancellation_witness, validate, validate_nucleus, AlgebraKind,
    Antichain, Elem, FinitePomonoid, FreePreimage, GroupError, GroupPreimage,
    IdError, PreimageVariant, Proof, Side, UnaryMap, Word,
};
use pomonoid_cli::suite::{run_suite, Status, SuiteConfig, VerificationReport};
use pomonoid_cli::{catalog, io};

#[derive(Parser)]
#[command(
    name = "pomonoid",
    version,
    about = "Workbench for finite ordered monoids: word preorders, nuclei, \
             downset algebras, and signed proof search"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Words including the empty word
    Mon,
    /// Non-empty words
    Umon,
    /// Non-empty words without a unit requirement on the base
    Sgrp,
}

impl VariantArg {
    fn to_variant(self, commutative: bool) -> PreimageVariant {
        let v = match self {
            VariantArg::Mon => PreimageVariant::MONOID,
            VariantArg::Umon => PreimageVariant::UNITAL,
            VariantArg::Sgrp => PreimageVariant::SEMIGROUP,
        };
        if commutative {
            v.commutative()
        } else {
            v
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SideArg {
    /// Solve u∘x below the target
    Left,
    /// Solve x∘u below the target
    Right,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the axioms of an algebra file, including any unary-map blocks
    Validate {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print structural properties of an algebra
    Props {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// List every nucleus of an algebra
    Nuclei {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the image algebra under a nucleus from the file's map blocks
    Image {
        file: PathBuf,
        /// Name of the map block to use (defaults to the only block)
        #[arg(long)]
        map: Option<String>,
    },
    /// List every conucleus of an algebra
    Conuclei {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether word U is below word V
    WordLe {
        file: PathBuf,
        u: String,
        v: String,
        #[arg(long, value_enum, default_value = "mon")]
        variant: VariantArg,
        #[arg(long)]
        commutative: bool,
    },
    /// Print the canonical form of a word
    Canon {
        file: PathBuf,
        u: String,
        #[arg(long, value_enum, default_value = "mon")]
        variant: VariantArg,
        #[arg(long)]
        commutative: bool,
    },
    /// Search for order-cancellation failures over words
    FreeCancel {
        file: PathBuf,
        /// Word-length budget
        #[arg(long, default_value_t = 4)]
        budget: usize,
        #[arg(long, value_enum, default_value = "umon")]
        variant: VariantArg,
        #[arg(long)]
        commutative: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check the square-table condition
    Square {
        file: PathBuf,
        /// Largest table size and variable count
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long)]
        json: bool,
    },
    /// Cancellativity of the downset algebra (finite; or over the word
    /// fragment with --budget)
    Idcancel {
        file: PathBuf,
        /// Generator length bound for the word-fragment mode
        #[arg(long)]
        budget: Option<usize>,
        /// Generators per antichain in the word-fragment mode
        #[arg(long, default_value_t = 2)]
        gens: usize,
        #[arg(long)]
        commutative: bool,
        #[arg(long)]
        json: bool,
    },
    /// Distribution of products over meets in the word-fragment downsets
    Meet {
        file: PathBuf,
        /// Word-length budget
        #[arg(long, default_value_t = 4)]
        budget: usize,
        #[arg(long)]
        commutative: bool,
        #[arg(long)]
        json: bool,
    },
    /// Greatest word X with U∘X (left) or X∘U (right) below [A]
    Residual {
        file: PathBuf,
        u: String,
        a: Elem,
        #[arg(long, value_enum, default_value = "left")]
        side: SideArg,
        #[arg(long, value_enum, default_value = "mon")]
        variant: VariantArg,
        #[arg(long)]
        commutative: bool,
    },
    /// Positive-part antichain of a signed word
    Sigma {
        file: PathBuf,
        alpha: String,
    },
    /// Bounded proof search between signed words
    Prove {
        file: PathBuf,
        alpha: String,
        beta: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Enumerate (and cache) the catalog of small pomonoids
    Catalog {
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run the verification suite
    Verify {
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        /// Word-length budget
        #[arg(long, default_value_t = 4)]
        budget: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        n_square: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

/// Failure modes that map onto the documented exit codes.
enum CmdError {
    /// Unreadable or malformed input, or an unmet operation precondition.
    Input(String),
    /// Internal failure (cache I/O, enumeration).
    Internal(String),
}

impl From<io::ParseError> for CmdError {
    fn from(e: io::ParseError) -> Self {
        CmdError::Input(e.to_string())
    }
}

impl From<pomonoid::WordError> for CmdError {
    fn from(e: pomonoid::WordError) -> Self {
        CmdError::Input(e.to_string())
    }
}

impl From<GroupError> for CmdError {
    fn from(e: GroupError) -> Self {
        CmdError::Input(e.to_string())
    }
}

impl From<IdError> for CmdError {
    fn from(e: IdError) -> Self {
        CmdError::Input(e.to_string())
    }
}

impl From<anyhow::Error> for CmdError {
    fn from(e: anyhow::Error) -> Self {
        CmdError::Internal(format!("{e:#}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(CmdError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<(FinitePomonoid, Vec<UnaryMap>), CmdError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CmdError::Input(format!("cannot read {}: {e}", path.display()))
    })?;
    Ok(io::parse_algebra(&text)?)
}

/// Emit a check outcome as human text or a JSON record; `witness` empty
/// means the check passed.
fn report_check(
    id: &str,
    witness: Option<String>,
    millis: u64,
    json: bool,
) -> ExitCode {
    let status = if witness.is_none() { Status::Pass } else { Status::Fail };
    if json {
        let r = VerificationReport {
            id: id.to_string(),
            status,
            witness: witness.clone(),
            millis,
        };
        println!("{}", serde_json::to_string(&r).expect("serializable"));
    } else {
        match &witness {
            None => println!("OK"),
            Some(w) => println!("{w}"),
        }
    }
    if witness.is_none() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn ac_words(x: &Antichain<Word>) -> String {
    let gens: Vec<String> = x.gens().iter().map(|g| g.to_string()).collect();
    format!("{{{}}}", gens.join(","))
}

fn ac_elems(x: &Antichain<Elem>) -> String {
    let gens: Vec<String> = x.gens().iter().map(|g| g.to_string()).collect();
    format!("{{{}}}", gens.join(","))
}

fn map_table(g: &UnaryMap) -> String {
    g.map.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
}

fn print_proof(p: &Proof) {
    println!("{}", p.start);
    let mut cur = p.start.clone();
    for (i, step) in p.steps.iter().enumerate() {
        let lhs_len = step.rule.lhs().len();
        cur = cur.splice(step.prefix, step.prefix + lhs_len, &step.rule.rhs());
        let (sl, sr) = step.rule.side();
        println!(
            "{:>3}. {:<11} at {:<2} =>  {cur}   (side: {sl} <= {sr})",
            i + 1,
            step.rule.name(),
            step.prefix
        );
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, CmdError> {
    match cmd {
        Cmd::Validate { file, json } => {
            let (alg, maps) = load(&file)?;
            let start = Instant::now();
            let mut lines = Vec::new();
            let report = validate(&alg, AlgebraKind::new(alg.signature))
                .map_err(|e| CmdError::Input(e.to_string()))?;
            for v in &report.violations {
                lines.push(format!("{}: {v}", alg.name));
            }
            for g in &maps {
                match validate_nucleus(&alg, g) {
                    Ok(r) => {
                        for v in &r.violations {
                            lines.push(format!("map {}: {v}", g.name));
                        }
                    }
                    Err(e) => {
                        return Err(CmdError::Input(format!(
                            "map {}: {e}",
                            g.name
                        )))
                    }
                }
            }
            let witness =
                if lines.is_empty() { None } else { Some(lines.join("; ")) };
            Ok(report_check(
                "validate",
                witness,
                start.elapsed().as_millis() as u64,
                json,
            ))
        }
        Cmd::Props { file, json } => {
            let (alg, _) = load(&file)?;
            let props = [
                ("commutative", is_commutative(&alg)),
                ("integral", is_integral(&alg)),
                ("integrally-closed", is_integrally_closed(&alg)),
                ("cancellative", is_cancellative(&alg)),
                ("down-directed", is_down_directed(&alg)),
                ("ideally-residuated", is_ideally_residuated(&alg)),
            ];
            if json {
                let mut obj = serde_json::Map::new();
                obj.insert("name".into(), json!(alg.name));
                obj.insert("signature".into(), json!(alg.signature.keyword()));
                obj.insert("elements".into(), json!(alg.n()));
                obj.insert("unit".into(), json!(alg.unit()));
                for (k, v) in props {
                    obj.insert(k.into(), json!(v));
                }
                println!("{}", serde_json::Value::Object(obj));
            } else {
                println!(
                    "{} ({}, {} elements, unit {:?})",
                    alg.name,
                    alg.signature.keyword(),
                    alg.n(),
                    alg.unit()
                );
                for (k, v) in props {
                    println!("{k}: {v}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Nuclei { file, json } => {
            let (alg, _) = load(&file)?;
            for (i, g) in enumerate_nuclei(&alg).iter().enumerate() {
                let unital = is_unital(&alg, g);
                if json {
                    println!(
                        "{}",
                        json!({"index": i, "map": g.map, "unital": unital})
                    );
                } else {
                    println!(
                        "nucleus {i}: [{}] unital={}",
                        map_table(g),
                        unital.map_or("n/a".into(), |b| b.to_string())
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Conuclei { file, json } => {
            let (alg, _) = load(&file)?;
            for (i, g) in enumerate_conuclei(&alg).iter().enumerate() {
                if json {
                    println!("{}", json!({"index": i, "map": g.map}));
                } else {
                    println!("conucleus {i}: [{}]", map_table(g));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Image { file, map } => {
            let (alg, maps) = load(&file)?;
            let g = match &map {
                Some(name) => maps.iter().find(|g| &g.name == name).ok_or_else(
                    || CmdError::Input(format!("no map named {name} in file")),
                )?,
                None => match maps.as_slice() {
                    [only] => only,
                    [] => {
                        return Err(CmdError::Input(
                            "file contains no map block".into(),
                        ))
                    }
                    _ => {
                        return Err(CmdError::Input(
                            "several map blocks; pick one with --map".into(),
                        ))
                    }
                },
            };
            let report = validate_nucleus(&alg, g)
                .map_err(|e| CmdError::Input(e.to_string()))?;
            if !report.ok() {
                let v = &report.violations[0];
                println!("map {} is not a nucleus: {v}", g.name);
                return Ok(ExitCode::from(1));
            }
            let image = nuclear_image(&alg, g)
                .map_err(|e| CmdError::Input(e.to_string()))?;
            print!("{}", io::serialize_algebra(&image));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::WordLe { file, u, v, variant, commutative } => {
            let (alg, _) = load(&file)?;
            let pre =
                FreePreimage::new(&alg, variant.to_variant(commutative))?;
            let (wu, wv) = (io::parse_word(&u)?, io::parse_word(&v)?);
            let holds = pre.word_le(&wu, &wv)?;
            println!("{holds}");
            Ok(if holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Canon { file, u, variant, commutative } => {
            let (alg, _) = load(&file)?;
            let pre =
                FreePreimage::new(&alg, variant.to_variant(commutative))?;
            let w = io::parse_word(&u)?;
            println!("{}", pre.canonical_form(&w)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::FreeCancel { file, budget, variant, commutative, json } => {
            let (alg, _) = load(&file)?;
            let start = Instant::now();
            let pre =
                FreePreimage::new(&alg, variant.to_variant(commutative))?;
            let mut witness = None;
            if let Some(w) = pre.check_left_cancellativity(budget)? {
                witness = Some(format!(
                    "[{}] composed on the {} relates {} and {} but they are \
                     unrelated",
                    w.factor,
                    side_str(w.side),
                    w.u,
                    w.v
                ));
            } else if let Some((u, w)) = pre.check_limited_cancellativity(budget)?
            {
                witness = Some(format!(
                    "{w} is below {u}∘{w} but the unit word is not below {u}"
                ));
            }
            Ok(report_check(
                "free-cancel",
                witness,
                start.elapsed().as_millis() as u64,
                json,
            ))
        }
        Cmd::Square { file, n_max, json } => {
            let (alg, _) = load(&file)?;
            let start = Instant::now();
            let witness =
                check_square_condition(&alg, n_max).map(|v| v.to_string());
            Ok(report_check(
                "square",
                witness,
                start.elapsed().as_millis() as u64,
                json,
            ))
        }
        Cmd::Idcancel { file, budget, gens, commutative, json } => {
            let (alg, _) = load(&file)?;
            let start = Instant::now();
            let witness = match budget {
                None => {
                    let (id_alg, chains) = id_algebra(&alg);
                    order_cancellation_witness(&id_alg).map(|w| {
                        format!(
                            "a={} b={} x={} fail to cancel on the {}",
                            ac_elems(&chains[w.a]),
                            ac_elems(&chains[w.b]),
                            ac_elems(&chains[w.x]),
                            side_str(w.side)
                        )
                    })
                }
                Some(len) => {
                    let variant = VariantArg::Umon.to_variant(commutative);
                    let pre = FreePreimage::new(&alg, variant)?;
                    check_id_fragment_cancellativity(&pre, len, gens)?.map(
                        |w| {
                            format!(
                                "a={} b={} x={} fail to cancel on the {}",
                                ac_words(&w.a),
                                ac_words(&w.b),
                                ac_words(&w.x),
                                side_str(w.side)
                            )
                        },
                    )
                }
            };
            Ok(report_check(
                "idcancel",
                witness,
                start.elapsed().as_millis() as u64,
                json,
            ))
        }
        Cmd::Meet { file, budget, commutative, json } => {
            let (alg, _) = load(&file)?;
            let start = Instant::now();
            let variant = VariantArg::Umon.to_variant(commutative);
            let pre = FreePreimage::new(&alg, variant)?;
            let witness = check_meet_distribution(&pre, budget)?.map(|w| {
                format!(
                    "x={} y={} z={} break the {} law, separated by {}",
                    ac_words(&w.x),
                    ac_words(&w.y),
                    ac_words(&w.z),
                    side_str(w.side),
                    w.witness
                )
            });
            Ok(report_check(
                "meet",
                witness,
                start.elapsed().as_millis() as u64,
                json,
            ))
        }
        Cmd::Residual { file, u, a, side, variant, commutative } => {
            let (alg, _) = load(&file)?;
            let pre =
                FreePreimage::new(&alg, variant.to_variant(commutative))?;
            let w = io::parse_word(&u)?;
            let side = match side {
                SideArg::Left => Side::Left,
                SideArg::Right => Side::Right,
            };
            match pre.residual_by_singleton(&w, a, side) {
                Ok(r) => {
                    println!("{r}");
                    Ok(ExitCode::SUCCESS)
                }
                Err(e @ pomonoid::WordError::NoGreatestSolution { .. }) => {
                    println!("{e}");
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.into()),
            }
        }
        Cmd::Sigma { file, alpha } => {
            let (alg, _) = load(&file)?;
            let gp = GroupPreimage::new(&alg)?;
            let a = io::parse_signed_word(&alpha)?;
            match gp.sigma(&a) {
                Ok(ac) => {
                    println!("{}", ac_words(&ac));
                    Ok(ExitCode::SUCCESS)
                }
                Err(e @ GroupError::NoPositiveBound(_)) => {
                    println!("{e}");
                    Ok(ExitCode::from(1))
                }
                Err(e) => Err(e.into()),
            }
        }
        Cmd::Prove { file, alpha, beta, depth } => {
            let (alg, _) = load(&file)?;
            let gp = GroupPreimage::new(&alg)?;
            let a = io::parse_signed_word(&alpha)?;
            let b = io::parse_signed_word(&beta)?;
            match gp.prove_bounded(&a, &b, depth)?.proof() {
                Some(p) => {
                    println!("proved in {} steps:", p.steps.len());
                    print_proof(p);
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("unknown at depth {depth}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Cmd::Catalog { n_max, json } => {
            let members = catalog::load_catalog(n_max)?;
            if json {
                for m in &members {
                    println!("{}", json!({"name": m.name, "elements": m.n()}));
                }
            } else {
                for (n, count) in catalog::per_size_counts(&members, n_max) {
                    println!("{count} members with {n} elements");
                }
                println!(
                    "cached at {}",
                    catalog::catalog_cache_path(n_max).display()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { n_max, budget, depth, n_square, seed, json } => {
            let cfg = SuiteConfig { n_max, l: budget, depth, n_square, seed };
            let reports = run_suite(&cfg)?;
            let mut any_fail = false;
            for r in &reports {
                any_fail |= r.status == Status::Fail;
                if json {
                    println!(
                        "{}",
                        serde_json::to_string(r).expect("serializable")
                    );
                } else {
                    println!("{:<48} {:>20} {:>7} ms", r.id, r.status, r.millis);
                    if let Some(w) = &r.witness {
                        println!("    {w}");
                    }
                }
            }
            Ok(if any_fail { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
    }
}

fn side_str(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}
