//! Command line front end: every library computation behind one binary
//! with deterministic text, JSON, and DOT output.
//!
//! Exit codes: 0 when the computation succeeds (and any certificate
//! passes), 1 when a certificate fails, 2 on usage or parse errors.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use arbor::arrangement::{
    chamber_count, char_poly_product, duality_check, exponents, field_is_logarithmic,
    omega_is_logarithmic, relation_span_check, saito_check, Arrangement,
};
use arbor::coalg::{
    algebra_reduce, coproduct, gamma, iso_check, AlgebraWord, CoalgebraElement, DualContext,
};
use arbor::lattice::{build_lattice, cardinality_poly_recursive, char_poly_mobius, hasse_dot, mobius};
use arbor::sweep::run_sweep;
use arbor::treecore::{check_chordal_peo, linear_extensions, Vertex};
use arbor::{Certificate, Forest, LabelTable, RootedTree};

#[derive(Parser)]
#[command(
    name = "arbor",
    version,
    about = "Exact certificates and combinatorics for the hyperplane arrangements, \
             intersection lattices, and forest coalgebras of labeled rooted trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; dot applies to the lattice subcommand only
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Base point of the integer grids used by the determinant and duality
    /// certificates
    #[arg(long, default_value_t = 1, global = true, allow_negative_numbers = true)]
    grid_offset: i64,
    /// Size bound for sweep (1..=6)
    #[arg(long, global = true)]
    max_n: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Sorted vertex depths of a tree (the exponents of its arrangement)
    Exponents { tree: String },
    /// Defining form of the arrangement of a tree, in factored form
    Qform { tree: String },
    /// Certify that the derivation matrix has determinant a unit times the
    /// defining form (the Saito criterion)
    SaitoCheck { tree: String },
    /// Check that every derivation row and every form row is logarithmic
    LogCheck { tree: String },
    /// Certify the duality pairings between the form and derivation frames
    DualityCheck { tree: String },
    /// Intersection lattice of a tree: elements, covers, Mobius values
    Lattice { tree: String },
    /// Characteristic polynomial of the arrangement of a tree
    Charpoly { tree: String },
    /// Number of chambers of the arrangement of a tree
    Chambers { tree: String },
    /// Cardinality polynomial of a tree in y and z
    Cardpoly { tree: String },
    /// Coproduct of a forest in the forest coalgebra
    Coproduct { forest: String },
    /// Subforests of a forest with exactly the given node set
    Gamma {
        forest: String,
        /// Comma-separated node labels; empty for the empty set
        #[arg(long, default_value = "")]
        nodes: String,
    },
    /// Signed normal form of a word in the presented algebra
    AlgebraReduce {
        /// Comma-separated degree-one factors, e.g. "a(b),a(c)"; empty for
        /// the unit word
        word: String,
        /// Extra ambient labels beyond those in the word, comma-separated
        #[arg(long, default_value = "")]
        labels: String,
    },
    /// Image of a word of the presented algebra in the dual forest algebra
    Rho {
        /// Comma-separated degree-one factors, e.g. "a(b),a(c)"; empty for
        /// the unit word
        word: String,
        /// Extra ambient labels beyond those in the word, comma-separated
        #[arg(long, default_value = "")]
        labels: String,
    },
    /// Certify the isomorphism between the presented algebra and the dual
    /// forest algebra on a label set
    IsoCheck {
        /// Comma-separated labels, e.g. "a,b,c"
        labels: String,
    },
    /// Check that every linear extension of the tree order is a perfect
    /// elimination order of the comparability graph
    ChordalCheck { tree: String },
    /// Certify that the three-term relations span the relation space of
    /// the arrangement
    RelationsCheck { tree: String },
    /// Run the whole invariant suite over all trees and forests up to
    /// --max-n vertices
    Sweep,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let format = cli.format;
    match cli.command {
        Command::Exponents { tree } => {
            only_text_or_json(format)?;
            let t = parse_tree(&tree)?;
            let exps = exponents(&t);
            match format {
                Format::Text => {
                    let parts: Vec<String> = exps.iter().map(usize::to_string).collect();
                    println!("{}", parts.join(" "));
                }
                Format::Json => println!(
                    "{}",
                    json!({
                        "schema": "arbor.exponents/1",
                        "tree": t.render(),
                        "exponents": exps,
                    })
                ),
                Format::Dot => unreachable!(),
            }
            Ok(0)
        }
        Command::Qform { tree } => {
            only_text_or_json(format)?;
            let t = parse_tree(&tree)?;
            let arr = Arrangement::new(t.clone());
            let label = |v: Vertex| t.labels().label(v).to_string();
            match format {
                Format::Text => println!("{}", arr.defining_form().render(&label)),
                Format::Json => {
                    let factors: Vec<[String; 2]> = arr
                        .hyperplanes()
                        .iter()
                        .map(|h| [label(h.plus), label(h.minus)])
                        .collect();
                    println!(
                        "{}",
                        json!({
                            "schema": "arbor.qform/1",
                            "tree": t.render(),
                            "factors": factors,
                            "rendered": arr.defining_form().render(&label),
                        })
                    );
                }
                Format::Dot => unreachable!(),
            }
            Ok(0)
        }
        Command::SaitoCheck { tree } => {
            only_text_or_json(format)?;
            let t = parse_tree(&tree)?;
            let cert = saito_check(&Arrangement::new(t), cli.grid_offset);
            Ok(emit_certificate(&cert, format))
        }
        Command::LogCheck { tree } => {
            only_text_or_json(format)?;
            let t = parse_tree(&tree)?;
            let arr = Arrangement::new(t.clone());
            let mut failure = None;
            for i in 0..t.n() {
                if !field_is_logarithmic(&arr, &arr.theta(i)) {
                    failure = Some(format!(
                        "the derivation row of {} is not logarithmic",
                        t.labels().label(i)
                    ));
                    break;
                }
                if !omega_is_logarithmic(&arr, i) {
                    failure = Some(format!(
                        "the form row of {} is not logarithmic",
                        t.labels().label(i)
                    ));
                    break;
                }
            }
            let n = t.n();
            let cert = Certificate::new(
                format!(
                    "every derivation row and every form row of {} is logarithmic",
                    t.render()
                ),
                failure.is_none(),
                failure
                    .unwrap_or_else(|| format!("{n} derivation rows and {n} form rows checked")),
            );
            Ok(emit_certificate(&cert, format))
        }
        Command::DualityCheck { tree } => {
            only_text_or_json(format)?;
            let t = parse_tree(&tree)?;
            let cert = duality_check(&Arrangement::new(t), cli.grid_offset);
            Ok(emit_certificate(&cert, format))
        }
        Command::Lattice { tree } => {
            let t = parse_tree(&tree)?;
            let lat = build_lattice(&t);
            let mu = mobius(&lat);
            match format {
                Format::Text => {
                    println!("tree: {}", t.render());
                    println!("elements: {}", lat.len());
                    for (idx, f) in lat.elements().iter().enumerate() {
                        println!("{idx}: {} (rank {})", f.render(), lat.rank(idx));
                    }
                    let covers: Vec<String> = lat
                        .hasse()
                        .iter()
                        .map(|(a, b)| format!("{a}<{b}"))
                        .collect();
                    println!("covers: {}", covers.join(" "));
                    let mus: Vec<String> = mu.mu.iter().map(i64::to_string).collect();
                    println!("mobius: {}", mus.join(" "));
                }
                Format::Json => {
                    let elements: Vec<String> =
                        lat.elements().iter().map(Forest::render).collect();
                    let hasse: Vec<[usize; 2]> =
                        lat.hasse().iter().map(|&(a, b)| [a, b]).collect();
                    println!(
                        "{}",
                        json!({
                            "schema": "arbor.lattice/1",
                            "tree": t.render(),
                            "elements": elements,
                            "rank": lat.ranks(),
                            "hasse": hasse,
                            "mobius": mu.mu,
                        })
                    );
                }
                Format::Dot => print!("{}", hasse_dot(&lat)),
            }
            Ok(0)
        }
        Command::Charpoly { tree } => {
            only_text_or_json(format)?;
            let t = parse_tree(&tree)?;
            let chi = char_poly_product(&t);
            debug_assert_eq!(chi, char_poly_mobius(&build_lattice(&t)));
            match format {
                Format::Text => println!("{}", chi.render("y")),
                Format::Json => println!(
                    "{}",
                    json!({
                        "schema": "arbor.charpoly/1",
                        "tree": t.render(),
                        "characteristic": chi.render("y"),
                        "exponents": exponents(&t),
                    })
                ),
                Format::Dot => unreachable!(),
            }
            Ok(0)
        }
        Command::Chambers { tree } => {
            only_text_or_json(format)?;
            let t = parse_tree(&tree)?;
            let count = chamber_count(&t);
            match format {
                Format::Text => println!("{count}"),
                Format::Json => println!(
                    "{}",
                    json!({
                        "schema": "arbor.chambers/1",
                        "tree": t.render(),
                        "chambers": count,
                    })
                ),
                Format::Dot => unreachable!(),
            }
            Ok(0)
        }
        Command::Cardpoly { tree } => {
            only_text_or_json(format)?;
            let t = parse_tree(&tree)?;
            let poly = cardinality_poly_recursive(&t);
            match format {
                Format::Text => println!("{}", poly.render()),
                Format::Json => println!(
                    "{}",
                    json!({
                        "schema": "arbor.cardpoly/1",
                        "tree": t.render(),
                        "polynomial": poly.render(),
                    })
                ),
                Format::Dot => unreachable!(),
            }
            Ok(0)
        }
        Command::Coproduct { forest } => {
            only_text_or_json(format)?;
            let f = parse_forest(&forest)?;
            let delta = coproduct(&CoalgebraElement::from_forest(&f));
            match format {
                Format::Text => println!("{}", delta.render()),
                Format::Json => {
                    let terms: Vec<serde_json::Value> = delta
                        .terms()
                        .iter()
                        .map(|(tuple, c)| {
                            let forests: Vec<String> =
                                tuple.iter().map(Forest::render).collect();
                            json!({ "forests": forests, "coeff": c })
                        })
                        .collect();
                    println!(
                        "{}",
                        json!({
                            "schema": "arbor.coproduct/1",
                            "forest": f.render(),
                            "terms": terms,
                        })
                    );
                }
                Format::Dot => unreachable!(),
            }
            Ok(0)
        }
        Command::Gamma { forest, nodes } => {
            only_text_or_json(format)?;
            let f = parse_forest(&forest)?;
            let mut wanted = std::collections::BTreeSet::new();
            for name in split_list(&nodes) {
                let v = f
                    .labels()
                    .index_of(name)
                    .ok_or_else(|| format!("unknown label {name:?}"))?;
                if f.parent(v).is_none() {
                    return Err(format!(
                        "{name:?} is a root of the forest, not a node; nodes are the \
                         non-root vertices"
                    ));
                }
                wanted.insert(v);
            }
            let subforests = gamma(&f, &wanted);
            match format {
                Format::Text => {
                    for g in &subforests {
                        println!("{}", g.render());
                    }
                }
                Format::Json => {
                    let names: Vec<String> = wanted
                        .iter()
                        .map(|&v| f.labels().label(v).to_string())
                        .collect();
                    let renders: Vec<String> = subforests.iter().map(Forest::render).collect();
                    println!(
                        "{}",
                        json!({
                            "schema": "arbor.gamma/1",
                            "forest": f.render(),
                            "nodes": names,
                            "subforests": renders,
                        })
                    );
                }
                Format::Dot => unreachable!(),
            }
            Ok(0)
        }
        Command::AlgebraReduce { word, labels } => {
            only_text_or_json(format)?;
            let w = parse_word(&word, &labels)?;
            let reduced = algebra_reduce(&w);
            match format {
                Format::Text => match &reduced {
                    None => println!("0"),
                    Some((sign, f)) => println!("{sign:+}\u{00b7}[{}]", f.render()),
                },
                Format::Json => {
                    let (sign, forest) = match &reduced {
                        None => (serde_json::Value::Null, serde_json::Value::Null),
                        Some((sign, f)) => (json!(sign), json!(f.render())),
                    };
                    println!(
                        "{}",
                        json!({
                            "schema": "arbor.reduce/1",
                            "word": w.render(),
                            "zero": reduced.is_none(),
                            "sign": sign,
                            "forest": forest,
                        })
                    );
                }
                Format::Dot => unreachable!(),
            }
            Ok(0)
        }
        Command::Rho { word, labels } => {
            only_text_or_json(format)?;
            let w = parse_word(&word, &labels)?;
            check_dual_size(w.labels().len())?;
            let ctx = DualContext::new(w.labels());
            let image = ctx.rho(&w);
            match format {
                Format::Text => println!("{}", image.render()),
                Format::Json => {
                    let terms: Vec<serde_json::Value> = image
                        .terms()
                        .iter()
                        .map(|(f, c)| json!({ "forest": f.render(), "coeff": c }))
                        .collect();
                    println!(
                        "{}",
                        json!({
                            "schema": "arbor.rho/1",
                            "word": w.render(),
                            "terms": terms,
                        })
                    );
                }
                Format::Dot => unreachable!(),
            }
            Ok(0)
        }
        Command::IsoCheck { labels } => {
            only_text_or_json(format)?;
            let parts: Vec<&str> = split_list(&labels).collect();
            if parts.is_empty() {
                return Err("iso-check needs at least one label, e.g. \"a,b,c\"".to_string());
            }
            let table = LabelTable::from_strs(&parts).map_err(|e| format!("parse error: {e}"))?;
            check_dual_size(table.len())?;
            let cert = iso_check(&table);
            Ok(emit_certificate(&cert, format))
        }
        Command::ChordalCheck { tree } => {
            only_text_or_json(format)?;
            let t = parse_tree(&tree)?;
            let orders = linear_extensions(&t);
            let failing = orders.iter().find(|o| !check_chordal_peo(&t, o));
            let cert = Certificate::new(
                format!(
                    "every linear extension of {} is a perfect elimination order of its \
                     comparability graph",
                    t.render()
                ),
                failing.is_none(),
                match failing {
                    None => format!("{} linear extensions checked", orders.len()),
                    Some(order) => {
                        let named: Vec<&str> =
                            order.iter().map(|&v| t.labels().label(v)).collect();
                        format!("extension {} fails to eliminate", named.join(","))
                    }
                },
            );
            Ok(emit_certificate(&cert, format))
        }
        Command::RelationsCheck { tree } => {
            only_text_or_json(format)?;
            let t = parse_tree(&tree)?;
            let cert = relation_span_check(&Arrangement::new(t));
            Ok(emit_certificate(&cert, format))
        }
        Command::Sweep => {
            only_text_or_json(format)?;
            let max_n = cli
                .max_n
                .ok_or("sweep requires --max-n with a bound between 1 and 6")?;
            if !(1..=6).contains(&max_n) {
                return Err("sweep bound must be between 1 and 6".to_string());
            }
            let report = run_sweep(max_n, cli.grid_offset);
            match format {
                Format::Text => print!("{}", report.render_text()),
                Format::Json => {
                    let counts: Vec<serde_json::Value> = report
                        .counts
                        .iter()
                        .map(|r| {
                            json!({
                                "n": r.n,
                                "trees": r.trees,
                                "trees_expected": r.trees_expected,
                                "forests": r.forests,
                                "forests_expected": r.forests_expected,
                            })
                        })
                        .collect();
                    let properties: Vec<serde_json::Value> = report
                        .properties
                        .iter()
                        .map(|p| {
                            json!({
                                "name": p.name,
                                "bound": p.bound,
                                "pass": p.pass,
                                "detail": p.detail,
                            })
                        })
                        .collect();
                    println!(
                        "{}",
                        json!({
                            "schema": "arbor.sweep/1",
                            "max_n": report.max_n,
                            "grid_offset": report.grid_offset,
                            "counts": counts,
                            "properties": properties,
                            "pass": report.all_pass(),
                        })
                    );
                }
                Format::Dot => unreachable!(),
            }
            Ok(u8::from(!report.all_pass()))
        }
    }
}

fn parse_tree(text: &str) -> Result<RootedTree, String> {
    RootedTree::parse(text).map_err(|e| {
        format!("parse error: {e}\ntrees are written as label(child,...), e.g. \"a(b(c),d)\"")
    })
}

fn parse_forest(text: &str) -> Result<Forest, String> {
    Forest::parse(text).map_err(|e| {
        format!(
            "parse error: {e}\nforests join trees with ';', e.g. \"a(b);c\"; trees are \
             written as label(child,...)"
        )
    })
}

fn parse_word(word: &str, ambient: &str) -> Result<AlgebraWord, String> {
    let extra: Vec<String> = split_list(ambient).map(str::to_string).collect();
    AlgebraWord::parse(word, &extra).map_err(|e| {
        format!(
            "parse error: {e}\nwords are comma-separated degree-one factors, e.g. \
             \"a(b),a(c)\""
        )
    })
}

fn split_list(text: &str) -> impl Iterator<Item = &str> {
    text.split(',').map(str::trim).filter(|p| !p.is_empty())
}

fn only_text_or_json(format: Format) -> Result<(), String> {
    if format == Format::Dot {
        Err("dot output is only available for the lattice subcommand".to_string())
    } else {
        Ok(())
    }
}

fn check_dual_size(n: usize) -> Result<(), String> {
    if n > 5 {
        Err(format!(
            "the dual algebra on {n} labels has {} basis forests; sizes above 5 are not \
             supported",
            (n as u64 + 1).pow(n as u32 - 1)
        ))
    } else {
        Ok(())
    }
}

fn emit_certificate(cert: &Certificate, format: Format) -> u8 {
    match format {
        Format::Text => println!("{cert}"),
        Format::Json => println!(
            "{}",
            json!({
                "schema": "arbor.certificate/1",
                "claim": cert.claim,
                "pass": cert.pass,
                "witness": cert.witness,
            })
        ),
        Format::Dot => unreachable!(),
    }
    u8::from(!cert.pass)
}
