//! Command-line surface for identity products, NKS/KS sets, and CNS
//! structures.
//!
//! Exit codes: 0 = property verified / enumeration complete, 1 = property
//! refuted (diagnostics printed), 2 = usage or parse error, 3 = search
//! budget exhausted.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pauli_ids::budget::Budget;
use pauli_ids::catalog::{BudgetStamp, CatalogDocument};
use pauli_ids::cns::{
    auto_assignment, cns_critical, enumerate_cns, family_cns, verify_cns, CnsFamily, CnsMatrix,
};
use pauli_ids::contextuality::{
    assignment_feasible, find_nks_subset, ks_from_nks, set_critical, verify_ks, verify_nks,
    AssignmentMode, Feasibility, IdSet, SetKind,
};
use pauli_ids::enumeration::{enumerate_critical_ids, min_critical_size, EnumOptions};
use pauli_ids::equivalence::{brute_force_equivalent, canonical_key};
use pauli_ids::io::{format_idset, parse_cns, parse_graph, parse_id_blocks, parse_idset};
use pauli_ids::oracle::{product_sign_oracle, SampleRng};
use pauli_ids::stabilizer::{generate_group, group_contains_id_up_to_local};
use pauli_ids::{
    analyze_id, eigenbasis_rank, is_critical_id, word_product, IdTable,
    PauliWord, SplitWitness,
};

const EXIT_VERIFIED: u8 = 0;
const EXIT_REFUTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "pauli-ids", version, about = "Nonclassical structures of the N-qubit Pauli group")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GlobalArgs {
    /// Wall-clock budget for exhaustive searches, in seconds.
    #[arg(long, global = true)]
    budget_seconds: Option<f64>,
    /// Node budget for exhaustive searches.
    #[arg(long, global = true)]
    budget_nodes: Option<u64>,
    /// Worker threads (results are independent of this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized cross-checks.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Count positive sign classes with O = 0 in censuses.
    #[arg(long = "include-positive-O0", global = true)]
    include_positive_o0: bool,
}

impl GlobalArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_nodes: self.budget_nodes,
            max_time: self.budget_seconds.map(std::time::Duration::from_secs_f64),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate each ID block in a file.
    VerifyId { file: PathBuf },
    /// Criticality of each ID block, with split witnesses.
    Criticality { file: PathBuf },
    /// SQP classes, odd count, and sign of each ID block.
    Classify { file: PathBuf },
    /// Canonical representative-class keys of each ID block.
    Canon { file: PathBuf },
    /// Equivalence of exactly two ID blocks.
    Equiv {
        file: PathBuf,
        /// Use the brute-force permutation search instead of canonical keys.
        #[arg(long)]
        brute_force: bool,
    },
    /// Census of representative critical IDs for given sizes.
    EnumIds {
        #[arg(short, long)]
        m: usize,
        #[arg(short, long)]
        n: usize,
        /// Write the census catalog (JSON) here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The smallest M for which a critical ID M^N exists.
    MinSize {
        #[arg(short, long)]
        n: usize,
    },
    /// NKS verification: odd negatives, even per-qubit letter counts.
    VerifyNks { file: PathBuf },
    /// KS verification: odd negatives, even per-word ID membership.
    VerifyKs { file: PathBuf },
    /// Criticality of an NKS or KS set under ID/qubit removals.
    SetCritical {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// Generate a KS set from an NKS set by pairing odd-occurrence words.
    KsFromNks {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search a KS set for an NKS subset.
    FindNks { file: PathBuf },
    /// GF(2) value-assignment feasibility oracle.
    AssignOracle {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
    },
    /// Check the CNS parity invariants.
    CnsVerify { file: PathBuf },
    /// CNS criticality under the row-subset criterion.
    CnsCritical { file: PathBuf },
    /// Enumerate representative critical CNSs with o columns.
    CnsEnum {
        #[arg(short, long)]
        o: usize,
        #[arg(short = 'O', long)]
        output: Option<PathBuf>,
    },
    /// Emit a named CNS family member.
    CnsFamily {
        #[arg(long, value_enum)]
        kind: FamilyArg,
        #[arg(short, long)]
        o: usize,
    },
    /// Instantiate an NKS set from a CNS and an ID pool.
    Instantiate {
        #[arg(long)]
        cns: PathBuf,
        #[arg(long)]
        pool: PathBuf,
        /// Pool index per CNS row (default: round-robin).
        #[arg(long, value_delimiter = ',')]
        r#use: Option<Vec<usize>>,
        /// Rows assigned negative sign (default: row 0).
        #[arg(long, value_delimiter = ',')]
        negatives: Option<Vec<usize>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Stabilizer group generated by the first ID block.
    StabGroup { file: PathBuf },
    /// Membership of an ID in a graph-state stabilizer group up to local
    /// relabeling.
    GraphMember {
        #[arg(long)]
        id: PathBuf,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Cross-check symbolic products against the dense matrix oracle.
    OracleCheck {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Nks,
    Ks,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PerWord,
    PerLetter,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Ring,
    Kite,
}

/// Anything that should terminate with a specific exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn refuted(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_REFUTED, message: message.into() }
    }

    fn budget(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_BUDGET, message: message.into() }
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, content)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_ids(path: &PathBuf) -> Result<Vec<IdTable>, Failure> {
    let text = read_file(path)?;
    parse_id_blocks(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_idset(path: &PathBuf) -> Result<IdSet, Failure> {
    let text = read_file(path)?;
    parse_idset(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_cns(path: &PathBuf) -> Result<CnsMatrix, Failure> {
    let text = read_file(path)?;
    parse_cns(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn witness_text(witness: &SplitWitness) -> String {
    let one_based = |v: &[usize]| -> Vec<usize> { v.iter().map(|i| i + 1).collect() };
    match witness {
        SplitWitness::RowSplit { rows } => format!("row split: rows {:?}", one_based(rows)),
        SplitWitness::ColumnSplit { qubits } => {
            format!("column split: qubits {:?}", one_based(qubits))
        }
        SplitWitness::GeneralSplit { rows, qubits } => format!(
            "general split: rows {:?} on qubits {:?}",
            one_based(rows),
            one_based(qubits)
        ),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let global = cli.global.clone();
    match cli.command {
        Command::VerifyId { file } => {
            let text = read_file(&file)?;
            let blocks = pauli_ids::io::parse_blocks(&text)
                .map_err(|e| Failure::usage(format!("{}: {e}", file.display())))?;
            if blocks.is_empty() {
                return Err(Failure::usage(format!("{}: no ID blocks", file.display())));
            }
            let mut all_ok = true;
            for (index, block) in blocks.iter().enumerate() {
                match analyze_id(&block.rows) {
                    Ok(id) => {
                        let rank = eigenbasis_rank(&id)
                            .map(|r| r.to_string())
                            .unwrap_or_else(|_| "-".into());
                        if global.json {
                            println!(
                                "{}",
                                serde_json::json!({
                                    "block": index + 1, "valid": true,
                                    "label": id.label(), "sign": id.sign().to_string(),
                                    "m": id.m(), "n": id.n(), "o": id.odd_count(),
                                    "eigenbasis_rank": eigenbasis_rank(&id).ok(),
                                })
                            );
                        } else {
                            println!(
                                "block {}: valid {} sign={} rank={}",
                                index + 1,
                                id.label(),
                                id.sign(),
                                rank
                            );
                        }
                    }
                    Err(e) => {
                        all_ok = false;
                        if global.json {
                            println!(
                                "{}",
                                serde_json::json!({
                                    "block": index + 1, "valid": false, "error": e.to_string(),
                                })
                            );
                        } else {
                            println!("block {}: invalid: {e}", index + 1);
                        }
                    }
                }
            }
            Ok(if all_ok { EXIT_VERIFIED } else { EXIT_REFUTED })
        }

        Command::Criticality { file } => {
            let ids = load_ids(&file)?;
            let mut all_critical = true;
            for (index, id) in ids.iter().enumerate() {
                let report = is_critical_id(id);
                if global.json {
                    println!(
                        "{}",
                        serde_json::json!({
                            "block": index + 1, "label": id.label(),
                            "critical": report.critical,
                            "witness": report.witness.as_ref().map(witness_text),
                        })
                    );
                } else {
                    match &report.witness {
                        None => println!("block {}: {} critical", index + 1, id.label()),
                        Some(w) => println!(
                            "block {}: {} noncritical ({})",
                            index + 1,
                            id.label(),
                            witness_text(w)
                        ),
                    }
                }
                all_critical &= report.critical;
            }
            Ok(if all_critical { EXIT_VERIFIED } else { EXIT_REFUTED })
        }

        Command::Classify { file } => {
            let ids = load_ids(&file)?;
            for (index, id) in ids.iter().enumerate() {
                if global.json {
                    let columns: Vec<String> =
                        id.columns().iter().map(|c| c.class().to_string()).collect();
                    println!(
                        "{}",
                        serde_json::json!({
                            "block": index + 1, "label": id.label(),
                            "sign": id.sign().to_string(), "o": id.odd_count(),
                            "columns": columns,
                        })
                    );
                } else {
                    let columns: Vec<String> =
                        id.columns().iter().map(|c| c.class().to_string()).collect();
                    println!(
                        "block {}: {} sign={} columns: {}",
                        index + 1,
                        id.label(),
                        id.sign(),
                        columns.join(", ")
                    );
                }
            }
            Ok(EXIT_VERIFIED)
        }

        Command::Canon { file } => {
            let ids = load_ids(&file)?;
            for (index, id) in ids.iter().enumerate() {
                let key = canonical_key(id);
                if global.json {
                    println!(
                        "{}",
                        serde_json::json!({
                            "block": index + 1, "label": id.label(), "canonical_key": key.to_hex(),
                        })
                    );
                } else {
                    println!("block {}: {} {}", index + 1, id.label(), key.to_hex());
                }
            }
            Ok(EXIT_VERIFIED)
        }

        Command::Equiv { file, brute_force } => {
            let ids = load_ids(&file)?;
            if ids.len() != 2 {
                return Err(Failure::usage(format!(
                    "equiv expects exactly 2 blocks, found {}",
                    ids.len()
                )));
            }
            let equivalent = if brute_force {
                brute_force_equivalent(&ids[0], &ids[1], &global.budget())
                    .map_err(|e| Failure::budget(e.to_string()))?
            } else {
                pauli_ids::equivalence::equivalent(&ids[0], &ids[1])
            };
            if global.json {
                println!("{}", serde_json::json!({ "equivalent": equivalent }));
            } else {
                println!("{}", if equivalent { "equivalent" } else { "not equivalent" });
            }
            Ok(if equivalent { EXIT_VERIFIED } else { EXIT_REFUTED })
        }

        Command::EnumIds { m, n, output } => {
            let opts = EnumOptions {
                include_positive_o0: global.include_positive_o0,
                budget: global.budget(),
            };
            let census = enumerate_critical_ids(m, n, &opts).map_err(|e| match e {
                pauli_ids::enumeration::EnumError::BudgetExceeded { .. } => {
                    Failure::budget(e.to_string())
                }
                other => Failure::usage(other.to_string()),
            })?;
            let stamp = BudgetStamp {
                max_nodes: global.budget_nodes,
                max_seconds: global.budget_seconds,
            };
            let doc = CatalogDocument::from_census(&census, m, n, stamp);
            let text = doc.emit().map_err(|e| Failure::usage(e.to_string()))?;
            if let Some(path) = &output {
                fs::write(path, &text)
                    .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            }
            if global.json {
                print!("{text}");
            } else {
                let counts: Vec<String> =
                    census.counts_by_o.iter().map(|(o, c)| format!("O={o}: {c}")).collect();
                println!(
                    "ID{m}^{n}: {} representative classes ({})",
                    census.total_classes(),
                    if counts.is_empty() { "none".into() } else { counts.join(", ") }
                );
                for class in &census.classes {
                    println!();
                    println!("# {} sign={}", class.exemplar.label(), class.exemplar.sign());
                    println!("{}", class.exemplar);
                }
            }
            Ok(EXIT_VERIFIED)
        }

        Command::MinSize { n } => {
            let result = min_critical_size(n, &global.budget()).map_err(|e| match e {
                pauli_ids::enumeration::EnumError::BudgetExceeded { .. } => {
                    Failure::budget(e.to_string())
                }
                other => Failure::usage(other.to_string()),
            })?;
            if global.json {
                println!("{}", serde_json::json!({ "n": n, "min_m": result }));
            } else {
                println!("L({n}) = {result}");
            }
            Ok(EXIT_VERIFIED)
        }

        Command::VerifyNks { file } => {
            let set = load_idset(&file)?;
            let report = verify_nks(&set);
            if global.json {
                let odd: Vec<String> = report
                    .odd_letters
                    .iter()
                    .map(|(q, l)| format!("{l}_{}", q + 1))
                    .collect();
                println!(
                    "{}",
                    serde_json::json!({
                        "nks": report.holds,
                        "negative_count": report.negative_count,
                        "odd_letters": odd,
                    })
                );
            } else if report.holds {
                println!("NKS set: {} IDs, {} negative", set.len(), report.negative_count);
            } else {
                println!("not an NKS set: {} negative IDs", report.negative_count);
                for (q, letter) in &report.odd_letters {
                    println!("  letter {letter} occurs an odd number of times on qubit {}", q + 1);
                }
            }
            Ok(if report.holds { EXIT_VERIFIED } else { EXIT_REFUTED })
        }

        Command::VerifyKs { file } => {
            let set = load_idset(&file)?;
            let report = verify_ks(&set);
            if global.json {
                let odd: Vec<String> = report.odd_words.iter().map(|w| w.to_string()).collect();
                println!(
                    "{}",
                    serde_json::json!({
                        "ks": report.holds,
                        "negative_count": report.negative_count,
                        "odd_words": odd,
                    })
                );
            } else if report.holds {
                println!("KS set: {} IDs, {} negative", set.len(), report.negative_count);
            } else {
                println!("not a KS set: {} negative IDs", report.negative_count);
                for word in &report.odd_words {
                    println!("  observable {word} appears in an odd number of IDs");
                }
            }
            Ok(if report.holds { EXIT_VERIFIED } else { EXIT_REFUTED })
        }

        Command::SetCritical { file, kind } => {
            let set = load_idset(&file)?;
            let kind = match kind {
                KindArg::Nks => SetKind::Nks,
                KindArg::Ks => SetKind::Ks,
            };
            let result = set_critical(&set, kind, &global.budget()).map_err(|e| match e {
                pauli_ids::contextuality::ContextError::Budget(_) => Failure::budget(e.to_string()),
                other => Failure::usage(other.to_string()),
            })?;
            if global.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "critical": result.critical,
                        "witness": result.witness.as_ref().map(|w| serde_json::json!({
                            "kept_ids": w.kept_ids.iter().map(|i| i + 1).collect::<Vec<_>>(),
                            "kept_qubits": w.kept_qubits.iter().map(|q| q + 1).collect::<Vec<_>>(),
                        })),
                    })
                );
            } else if result.critical {
                println!("critical");
            } else if let Some(w) = &result.witness {
                println!(
                    "not critical: IDs {:?} on qubits {:?} still verify",
                    w.kept_ids.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    w.kept_qubits.iter().map(|q| q + 1).collect::<Vec<_>>()
                );
            }
            Ok(if result.critical { EXIT_VERIFIED } else { EXIT_REFUTED })
        }

        Command::KsFromNks { file, output } => {
            let set = load_idset(&file)?;
            let ks = ks_from_nks(&set).map_err(|e| Failure::refuted(e.to_string()))?;
            write_output(&output, &format_idset(&ks))?;
            Ok(EXIT_VERIFIED)
        }

        Command::FindNks { file } => {
            let set = load_idset(&file)?;
            let found = find_nks_subset(&set, &global.budget()).map_err(|e| match e {
                pauli_ids::contextuality::ContextError::Budget(_) => Failure::budget(e.to_string()),
                other => Failure::usage(other.to_string()),
            })?;
            match found {
                Some(reduction) => {
                    if global.json {
                        println!(
                            "{}",
                            serde_json::json!({
                                "found": true,
                                "ids": reduction.kept_ids.iter().map(|i| i + 1).collect::<Vec<_>>(),
                                "qubits": reduction.kept_qubits.iter().map(|q| q + 1).collect::<Vec<_>>(),
                            })
                        );
                    } else {
                        println!(
                            "# NKS subset: IDs {:?} on qubits {:?}",
                            reduction.kept_ids.iter().map(|i| i + 1).collect::<Vec<_>>(),
                            reduction.kept_qubits.iter().map(|q| q + 1).collect::<Vec<_>>()
                        );
                        print!("{}", format_idset(&reduction.set));
                    }
                    Ok(EXIT_VERIFIED)
                }
                None => {
                    println!("no NKS subset found");
                    Ok(EXIT_REFUTED)
                }
            }
        }

        Command::AssignOracle { file, mode } => {
            let set = load_idset(&file)?;
            let mode = match mode {
                ModeArg::PerWord => AssignmentMode::PerWord,
                ModeArg::PerLetter => AssignmentMode::PerSingleQubitLetter,
            };
            match assignment_feasible(&set, mode) {
                Feasibility::Feasible { assignment } => {
                    if global.json {
                        let values: Vec<serde_json::Value> = assignment
                            .iter()
                            .map(|(var, sign)| {
                                serde_json::json!({ "var": var.to_string(), "value": sign.to_string() })
                            })
                            .collect();
                        println!(
                            "{}",
                            serde_json::json!({ "feasible": true, "assignment": values })
                        );
                    } else {
                        println!("feasible");
                        for (var, sign) in &assignment {
                            println!("  {var} = {sign}1");
                        }
                    }
                    Ok(EXIT_VERIFIED)
                }
                Feasibility::Infeasible { certificate } => {
                    let ids: Vec<usize> = certificate.iter().map(|i| i + 1).collect();
                    if global.json {
                        println!(
                            "{}",
                            serde_json::json!({ "feasible": false, "certificate": ids })
                        );
                    } else {
                        println!("infeasible: equations of IDs {ids:?} sum to 0 = 1");
                    }
                    Ok(EXIT_REFUTED)
                }
            }
        }

        Command::CnsVerify { file } => {
            let matrix = load_cns(&file)?;
            let report = verify_cns(&matrix);
            if global.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "legal": report.legal,
                        "row_violations": report.row_violations.iter().map(|r| r + 1).collect::<Vec<_>>(),
                        "column_violations": report.column_violations.iter().map(|c| c + 1).collect::<Vec<_>>(),
                    })
                );
            } else if report.legal {
                println!("legal CNS: {} generalized IDs on {} odd qubits", matrix.r(), matrix.q());
            } else {
                for r in &report.row_violations {
                    println!("row {} has an odd or < 2 count of O cells", r + 1);
                }
                for c in &report.column_violations {
                    println!("column {} has an odd or < 2 count of O cells", c + 1);
                }
            }
            Ok(if report.legal { EXIT_VERIFIED } else { EXIT_REFUTED })
        }

        Command::CnsCritical { file } => {
            let matrix = load_cns(&file)?;
            if !verify_cns(&matrix).legal {
                return Err(Failure::usage("matrix is not a legal CNS"));
            }
            let result = cns_critical(&matrix);
            if global.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "critical": result.critical,
                        "witness": result.witness.as_ref().map(|w| w.iter().map(|r| r + 1).collect::<Vec<_>>()),
                    })
                );
            } else if result.critical {
                println!("critical");
            } else if let Some(w) = &result.witness {
                println!(
                    "not critical: rows {:?} form a smaller CNS",
                    w.iter().map(|r| r + 1).collect::<Vec<_>>()
                );
            }
            Ok(if result.critical { EXIT_VERIFIED } else { EXIT_REFUTED })
        }

        Command::CnsEnum { o, output } => {
            let reps = enumerate_cns(o, &global.budget()).map_err(|e| match e {
                pauli_ids::cns::CnsError::Budget(_) => Failure::budget(e.to_string()),
                other => Failure::usage(other.to_string()),
            })?;
            let mut body = String::new();
            for (i, matrix) in reps.iter().enumerate() {
                if i > 0 {
                    body.push('\n');
                }
                body.push_str(&matrix.to_string());
                body.push('\n');
            }
            if global.json {
                let matrices: Vec<Vec<String>> = reps
                    .iter()
                    .map(|m| m.to_string().lines().map(str::to_string).collect())
                    .collect();
                println!("{}", serde_json::json!({ "o": o, "count": reps.len(), "matrices": matrices }));
            } else {
                println!("{} representative critical CNSs for {} odd qubits", reps.len(), o);
            }
            if let Some(path) = &output {
                fs::write(path, &body)
                    .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            } else if !global.json {
                print!("\n{body}");
            }
            Ok(EXIT_VERIFIED)
        }

        Command::CnsFamily { kind, o } => {
            let kind = match kind {
                FamilyArg::Ring => CnsFamily::Ring,
                FamilyArg::Kite => CnsFamily::Kite,
            };
            let matrix = family_cns(kind, o).map_err(|e| Failure::usage(e.to_string()))?;
            println!("{matrix}");
            Ok(EXIT_VERIFIED)
        }

        Command::Instantiate { cns, pool, r#use, negatives, output } => {
            let matrix = load_cns(&cns)?;
            let pool_ids = load_ids(&pool)?;
            if pool_ids.is_empty() {
                return Err(Failure::usage("empty ID pool"));
            }
            let rows = matrix.r();
            let picks: Vec<usize> = match r#use {
                Some(picks) => picks,
                None => (0..rows).map(|r| r % pool_ids.len()).collect(),
            };
            if picks.len() != rows {
                return Err(Failure::usage(format!(
                    "--use needs {} entries, got {}",
                    rows,
                    picks.len()
                )));
            }
            let negative_rows = negatives.unwrap_or_else(|| vec![0]);
            let mut negative_flags = vec![false; rows];
            for r in &negative_rows {
                if *r >= rows {
                    return Err(Failure::usage(format!("negative row {r} out of range")));
                }
                negative_flags[*r] = true;
            }
            let assignments = auto_assignment(&matrix, &pool_ids, &picks, &negative_flags)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let set = pauli_ids::cns::instantiate_nks(&matrix, &pool_ids, &assignments)
                .map_err(|e| Failure::refuted(e.to_string()))?;
            write_output(&output, &format_idset(&set))?;
            Ok(EXIT_VERIFIED)
        }

        Command::StabGroup { file } => {
            let ids = load_ids(&file)?;
            let first = ids.first().ok_or_else(|| Failure::usage("no ID blocks"))?;
            let group = generate_group(first.rows()).map_err(|e| Failure::usage(e.to_string()))?;
            if global.json {
                let members: Vec<String> = group.iter().map(|e| e.to_string()).collect();
                println!("{}", serde_json::json!({ "order": group.len(), "members": members }));
            } else {
                println!("group of order {}", group.len());
                for element in &group {
                    println!("{element}");
                }
            }
            Ok(EXIT_VERIFIED)
        }

        Command::GraphMember { id, graph } => {
            let ids = load_ids(&id)?;
            let first = ids.first().ok_or_else(|| Failure::usage("no ID blocks"))?;
            let graph_text = read_file(&graph)?;
            let graph = parse_graph(&graph_text)
                .map_err(|e| Failure::usage(format!("graph: {e}")))?;
            let witness = group_contains_id_up_to_local(first, &graph, &global.budget())
                .map_err(|e| match e {
                    pauli_ids::stabilizer::StabilizerError::Budget(_) => {
                        Failure::budget(e.to_string())
                    }
                    other => Failure::usage(other.to_string()),
                })?;
            match witness {
                Some(map) => {
                    let qubits: Vec<usize> = map.qubit_map.iter().map(|q| q + 1).collect();
                    if global.json {
                        println!(
                            "{}",
                            serde_json::json!({
                                "member": true, "qubit_map": qubits, "letter_perms": map.letter_perms,
                            })
                        );
                    } else {
                        println!("member: qubit map {qubits:?}, letter perms {:?}", map.letter_perms);
                    }
                    Ok(EXIT_VERIFIED)
                }
                None => {
                    println!("not a member");
                    Ok(EXIT_REFUTED)
                }
            }
        }

        Command::OracleCheck { samples } => {
            if let Some(disagreement) = oracle_check(samples, global.seed) {
                println!("disagreement: {disagreement}");
                return Ok(EXIT_REFUTED);
            }
            if global.json {
                println!("{}", serde_json::json!({ "samples": samples, "disagreements": 0 }));
            } else {
                println!("{samples} random commuting sets: symbolic and dense phases agree");
            }
            Ok(EXIT_VERIFIED)
        }
    }
}

/// Draws random commuting row sets (n <= 4) and compares the chained
/// symbolic product phase against the dense matrix product.
fn oracle_check(samples: usize, seed: u64) -> Option<String> {
    let mut rng = SampleRng::new(seed);
    let mut done = 0;
    while done < samples {
        let n = 2 + rng.below(3);
        let count = 2 + rng.below(4);
        let mut rows: Vec<PauliWord> = Vec::new();
        let mut guard = 0;
        while rows.len() < count && guard < 200 {
            guard += 1;
            let x = rng.next_u64() & ((1 << n) - 1);
            let z = rng.next_u64() & ((1 << n) - 1);
            let word = PauliWord::from_bits(n, x, z).unwrap();
            if word.is_identity() {
                continue;
            }
            if rows
                .iter()
                .all(|r| pauli_ids::commutes(r, &word).unwrap() && *r != word)
            {
                rows.push(word);
            }
        }
        if rows.len() < 2 {
            continue;
        }
        done += 1;
        // Close the set with the product word so the dense product is +-I.
        let mut phase = pauli_ids::PhaseExponent::ZERO;
        let mut acc = PauliWord::identity(rows[0].n());
        for row in &rows {
            let (k, next) = word_product(&acc, row).unwrap();
            phase = phase.combine(k);
            acc = next;
        }
        if !acc.is_identity() {
            // Append the closing word when it commutes with everything.
            if !rows.iter().all(|r| pauli_ids::commutes(r, &acc).unwrap()) {
                continue;
            }
            let (k, rest) = word_product(&acc, &acc).unwrap();
            debug_assert!(rest.is_identity());
            rows.push(acc);
            phase = phase.combine(k);
        }
        match product_sign_oracle(&rows) {
            Ok(dense) => {
                if dense != phase {
                    return Some(format!(
                        "rows {:?}: symbolic i^{} vs dense i^{}",
                        rows.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                        phase.value(),
                        dense.value()
                    ));
                }
            }
            Err(e) => return Some(format!("dense oracle failed: {e}")),
        }
    }
    None
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.global.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
