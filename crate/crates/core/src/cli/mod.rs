//! The `selfsim` command line: build groups and tree representations, print
//! portraits and automata, and run the verification suites.
//!
//! Exit codes: 0 on success or a passing suite, 1 on a failed check, 2 on a
//! usage error.

mod verify;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::pcgroup::{parse_expr, GroupElement, PcPresentation};
use crate::selfsim::{
    act_on_word, fcore_witness, format_tree_word, parse_gdata, parse_tree_word, Automaton, Endomorphism, GData,
    GDataRep, Portrait, VirtualEndomorphism, WitnessKind, WitnessOutcome,
};
use crate::zoo::{dm_endo, make_group, psi_endo, scaling_endo, GroupSpec};

pub use verify::{verify_suite, Suite, SuiteReport};

/// Depth cap when `SELFSIM_MAX_DEPTH` is unset.
pub const DEFAULT_MAX_DEPTH: usize = 16;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "selfsim", version, about = "Self-similar actions of torsion-free nilpotent groups on rooted trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the basis, weights and center rank of a group.
    Group {
        spec: Option<String>,
        #[arg(long)]
        group: Option<String>,
    },
    /// Export the automata of a tree representation.
    Rep {
        #[command(flatten)]
        source: Source,
        /// Defaults to every weight-1 generator.
        #[arg(long)]
        element: Option<String>,
        #[command(flatten)]
        view: View,
    },
    /// Print the portrait of an element truncated to a depth.
    Portrait {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        element: String,
        #[command(flatten)]
        view: View,
    },
    /// Apply an element to a tree word.
    Act {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        element: String,
        /// Digits for alphabets up to 10, comma-separated letters otherwise.
        #[arg(long)]
        word: String,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Restrict the suite to one group.
        #[arg(long)]
        group: Option<String>,
    },
    /// Search for a witness that G-data on a group has a nontrivial F-core.
    Witness {
        #[arg(long, default_value = "n34")]
        group: String,
        #[arg(long)]
        data: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Source {
    /// `free_abelian:3`, `heisenberg`, `free_nil_c3_r2`, `two_gen_c3:1,0`, `ut:4`, `n34`.
    #[arg(long)]
    group: String,
    /// `double`, `scale:s`, `dm:m`, `psi:m1,m2,m3` or `images:w1;w2;…`.
    #[arg(long, conflicts_with = "data")]
    endo: Option<String>,
    /// G-data file.
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct View {
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

struct Fail {
    code: i32,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail { code: 2, msg: msg.into() }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::Parse { .. } | Error::UnknownSpec(_) | Error::UnknownGenerator(_) | Error::InvalidParameter(_) => 2,
            _ => 1,
        };
        Fail { code, msg: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Fail>;

/// Runs one invocation; `args[0]` is the program name.
pub fn run(args: &[String]) -> Output {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code: 2, stdout: String::new(), stderr: text }
            } else {
                Output { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(cli.command) {
        Ok((code, stdout)) => Output { code, stdout, stderr: String::new() },
        Err(f) => Output { code: f.code, stdout: String::new(), stderr: format!("error: {}\n", f.msg) },
    }
}

fn execute(cmd: Command) -> CliResult<(i32, String)> {
    match cmd {
        Command::Group { spec, group } => {
            let s = match (spec, group) {
                (Some(s), None) | (None, Some(s)) => s,
                (Some(_), Some(_)) => return Err(usage("give the group either positionally or with --group")),
                (None, None) => return Err(usage("missing group spec")),
            };
            let (spec, pres) = load_group(&s)?;
            Ok((0, describe_group(&spec, &pres)))
        }
        Command::Rep { source, element, view } => {
            let format = view.format.unwrap_or(Format::Json);
            let depth = checked_depth(view.depth)?;
            let (pres, data, label) = load_source(&source)?;
            let rep = GDataRep::new(&data)?;
            let elements = match element {
                Some(w) => vec![(w.clone(), parse_element(&pres, &w)?)],
                None => pres
                    .indices_of_weight(1)
                    .map(|i| (pres.name(i).to_string(), GroupElement::generator(&pres, i)))
                    .collect(),
            };
            Ok((0, render_rep(&rep, &label, &elements, depth, format)?))
        }
        Command::Portrait { source, element, view } => {
            let format = view.format.unwrap_or(Format::Text);
            let depth = checked_depth(view.depth)?;
            let (pres, data, _) = load_source(&source)?;
            let rep = GDataRep::new(&data)?;
            let p = Portrait::of(&rep, &parse_element(&pres, &element)?, depth)?;
            Ok((0, match format {
                Format::Text => p.to_text(),
                Format::Dot => p.to_dot(),
                Format::Json => json(&p),
            }))
        }
        Command::Act { source, element, word } => {
            let (pres, data, _) = load_source(&source)?;
            let rep = GDataRep::new(&data)?;
            let m = crate::selfsim::TreeAction::alphabet(&rep);
            let w = parse_tree_word(&word, m).map_err(|e| usage(e.to_string()))?;
            if w.len() > max_depth()? {
                return Err(usage(format!("word longer than the depth cap {}", max_depth()?)));
            }
            let out = act_on_word(&rep, &parse_element(&pres, &element)?, &w)?;
            Ok((0, format!("{}\n", format_tree_word(&out, m))))
        }
        Command::Verify { suite, group } => {
            let only = group.map(|s| s.parse::<GroupSpec>()).transpose()?;
            let report = verify_suite(suite, only.as_ref())?;
            Ok((if report.passed { 0 } else { 1 }, report.text))
        }
        Command::Witness { group, data } => {
            let (_, pres) = load_group(&group)?;
            let text = read_file(&data)?;
            let gdata = parse_gdata(&text, &pres)?;
            render_witness(&pres, &gdata)
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn max_depth() -> CliResult<usize> {
    match std::env::var("SELFSIM_MAX_DEPTH") {
        Ok(v) => v.trim().parse().map_err(|_| usage(format!("SELFSIM_MAX_DEPTH=`{v}` is not a depth"))),
        Err(_) => Ok(DEFAULT_MAX_DEPTH),
    }
}

fn checked_depth(d: usize) -> CliResult<usize> {
    let cap = max_depth()?;
    if d > cap {
        return Err(usage(format!("depth {d} exceeds the cap {cap} (SELFSIM_MAX_DEPTH)")));
    }
    Ok(d)
}

fn read_file(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_group(s: &str) -> CliResult<(GroupSpec, Arc<PcPresentation>)> {
    let spec: GroupSpec = s.parse()?;
    let pres = make_group(&spec)?;
    Ok((spec, pres))
}

fn parse_element(pres: &Arc<PcPresentation>, w: &str) -> CliResult<GroupElement> {
    Ok(parse_expr(w, pres)?.eval(pres)?)
}

/// The endomorphism used when `--endo` and `--data` are both absent.
fn default_endo(spec: &GroupSpec) -> Option<&'static str> {
    match spec {
        GroupSpec::FreeAbelian(_) | GroupSpec::Heisenberg => Some("double"),
        GroupSpec::FreeNilC3R2 | GroupSpec::TwoGenC3 { .. } => Some("psi:2,-1,1"),
        GroupSpec::Unitriangular(_) => Some("dm:2"),
        GroupSpec::N34 => None,
    }
}

fn load_source(src: &Source) -> CliResult<(Arc<PcPresentation>, GData, String)> {
    let (spec, pres) = load_group(&src.group)?;
    if let Some(path) = &src.data {
        let data = parse_gdata(&read_file(path)?, &pres)?;
        return Ok((pres, data, format!("data:{}", path.display())));
    }
    let endo = match &src.endo {
        Some(e) => e.clone(),
        None => default_endo(&spec)
            .ok_or_else(|| usage(format!("{spec} has no default endomorphism; pass --endo or --data")))?
            .to_string(),
    };
    let v = endo_from_text(&spec, &pres, &endo)?;
    Ok((pres, GData::new(vec![v])?, endo))
}

/// The virtual endomorphism `ψ^-1 : ψ(G) -> G` for an injective `ψ`, or
/// `dm_endo` directly.
fn endo_from_text(spec: &GroupSpec, pres: &Arc<PcPresentation>, e: &str) -> CliResult<VirtualEndomorphism> {
    let (head, arg) = match e.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a)),
        None => (e.trim(), None),
    };
    let bad = || usage(format!("unknown endomorphism `{e}`"));
    let int = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
    let psi: Endomorphism = match (head, arg) {
        ("double", None) => scaling_endo(pres, 2)?,
        ("scale", Some(s)) => scaling_endo(pres, int(s)?)?,
        ("dm", Some(m)) => {
            let GroupSpec::Unitriangular(n) = spec else {
                return Err(usage("`dm:m` needs a unitriangular group `ut:n`"));
            };
            return Ok(dm_endo(*n, int(m)?)?);
        }
        ("psi", Some(a)) => {
            let v = a.split(',').map(int).collect::<CliResult<Vec<_>>>()?;
            let [m1, m2, m3] = v[..] else { return Err(bad()) };
            psi_endo(pres, m1, m2, m3)?
        }
        ("images", Some(a)) => {
            let images = a.split(';').map(|w| parse_element(pres, w)).collect::<CliResult<Vec<_>>>()?;
            Endomorphism::from_generator_images(pres, images)?
        }
        _ => return Err(bad()),
    };
    Ok(psi.inverse_on_image()?)
}

fn describe_group(spec: &GroupSpec, pres: &PcPresentation) -> String {
    let mut s = format!("group {spec}\n");
    let _ = writeln!(s, "hirsch length {}", pres.hirsch_length());
    let _ = writeln!(s, "class {}", pres.nilpotency_class());
    s.push_str("basis:\n");
    for i in 0..pres.len() {
        let _ = writeln!(s, "  {i:>2} {} weight {}", pres.name(i), pres.weight(i));
    }
    let _ = writeln!(s, "center rank {}", pres.center_lattice().rank());
    s
}

#[derive(Serialize)]
struct RepJson {
    data: String,
    alphabet: usize,
    depth: usize,
    automata: Vec<NamedAutomaton>,
}

#[derive(Serialize)]
struct NamedAutomaton {
    element: String,
    automaton: Automaton,
}

fn render_rep(
    rep: &GDataRep,
    label: &str,
    elements: &[(String, GroupElement)],
    depth: usize,
    format: Format,
) -> CliResult<String> {
    let m = crate::selfsim::TreeAction::alphabet(rep);
    let mut automata = Vec::new();
    for (name, g) in elements {
        automata.push(NamedAutomaton { element: name.clone(), automaton: Automaton::explore(rep, g, depth)? });
    }
    Ok(match format {
        Format::Json => json(&RepJson { data: label.to_string(), alphabet: m, depth, automata }),
        Format::Dot => automata.iter().map(|a| a.automaton.to_dot()).collect(),
        Format::Text => {
            let mut s = format!("representation {label} alphabet={m}\n");
            for ((_, g), a) in elements.iter().zip(&automata) {
                let _ = writeln!(s, "\nelement {} = {}", a.element, g.to_tuple());
                s.push_str(&a.automaton.to_text());
                s.push_str(&Portrait::of(rep, g, depth)?.to_text());
            }
            s
        }
    })
}

fn render_witness(pres: &PcPresentation, data: &GData) -> CliResult<(i32, String)> {
    let list = |v: &[num_bigint::BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    let mut s = format!("parts {} with indices ({})\n", data.parts().len(), list(&data.m_parts()));
    let w = match fcore_witness(data)? {
        WitnessOutcome::NoneFound { reason } => {
            let _ = writeln!(s, "no witness: {reason}");
            return Ok((1, s));
        }
        WitnessOutcome::Found(w) => w,
    };
    let names: Vec<&str> = pres.indices_of_weight(1).map(|i| pres.name(i)).collect();
    let k: Vec<String> = names.iter().zip(&w.powers).map(|(n, p)| format!("{n}^{p}")).collect();
    let _ = writeln!(s, "K = <{}>", k.join(", "));
    let _ = writeln!(s, "Z(K) rank {}", w.center_of_k.rank());
    let _ = writeln!(s, "det N_f: ({})", list(&w.determinants));
    let kind = match w.kind {
        WitnessKind::CenterOfK => "center of K",
        WitnessKind::KernelOfSingularParts => "kernel of the singular parts in Z(K)",
        WitnessKind::InvariantChain => "invariant sublattice of Z(K)",
    };
    let _ = writeln!(s, "witness: {kind}");
    for g in w.subgroup.sequence() {
        let _ = writeln!(s, "  {} = {}", g, g.to_tuple());
    }
    if let Some(fixed) = w.pointwise_fixed {
        let _ = writeln!(s, "fixed pointwise by every part: {}", yes_no(fixed));
    }
    let c = &w.checks;
    let _ = writeln!(
        s,
        "checks: nontrivial={} inside_every_domain={} normal={} invariant={}",
        yes_no(c.nontrivial),
        yes_no(c.inside_every_domain),
        yes_no(c.normal),
        yes_no(c.invariant.iter().all(|&b| b))
    );
    Ok((0, s))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
