//! Command-line front end. Every subcommand reads JSON files and emits one
//! JSON document (or a short text rendering with `--format text`).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::criterion::{full_criterion, CriterionReport, TargetDoc, TestMapDoc, TestMapsDoc, Verdict};
use crate::diagram::{ChainDoc, Diagram, Representation, RepresentationDoc, SubdiagramChain};
use crate::error::{Error, Result};
use crate::galois::{build_galois_diagram, comparison_json, orbit_maps, FiniteGroup, GSet, GroupDoc};
use crate::graph::{les_check, GraphDoc};
use crate::linalg::json::{vector_to_json, MatrixLiteral};
use crate::linalg::{smith_normal_form, Int, Matrix, Rat, Ring, RingKind};
use crate::module::ModuleDoc;
use crate::universal::Universe;

#[derive(Parser, Debug)]
#[command(name = "univcat", version, about = "Exact computations in universal categories of diagram representations")]
pub struct RunConfig {
    /// Coefficient ring; defaults to the ring declared by the input.
    #[arg(long, global = true, value_enum)]
    pub ring: Option<RingArg>,
    /// Write the report here as well as (unless --quiet) to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub quiet: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RingArg {
    #[value(name = "Z")]
    Z,
    #[value(name = "Q")]
    Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Smith normal form of a matrix.
    Snf { matrix: PathBuf },
    /// Commutant of a representation at a stage.
    End {
        representation: PathBuf,
        /// Comma-separated objects of a full subdiagram, or `all`.
        #[arg(long)]
        stage: Option<String>,
    },
    /// Module homomorphisms between two modules over the same algebra.
    Hom { source: PathBuf, target: PathBuf },
    /// Relative homology of a graph pair.
    Homology { graph: PathBuf },
    /// Exactness of the long exact sequence of a graph triple.
    LesCheck { graph: PathBuf },
    /// Equivalence criterion for a representation against a target.
    Criterion {
        representation: PathBuf,
        target: PathBuf,
        maps: PathBuf,
    },
    /// Commutants along a chain of stages with rank traces.
    Tower { representation: PathBuf, chain: PathBuf },
    /// Writes a Galois-set instance (representation, target, test maps) to a
    /// directory and reports the comparison with the group algebra.
    Galois {
        /// C2, C3, C4, S3, C2xC2, or a group JSON file.
        group: String,
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

/// What a run produced: the rendered report and the exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    value: Value,
    pass: bool,
    text: String,
}

impl Report {
    fn ok(value: Value, text: String) -> Self {
        Report { value, pass: true, text }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), e.to_string())
            } else {
                (e.to_string(), String::new())
            };
            return Outcome { code, stdout, stderr };
        }
    };
    execute(&config)
}

pub fn execute(config: &RunConfig) -> Outcome {
    match dispatch(config) {
        Ok(report) => {
            let rendered = match config.format {
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&report.value).expect("json");
                    s.push('\n');
                    s
                }
                Format::Text => report.text,
            };
            if let Some(path) = &config.out {
                if let Err(e) = std::fs::write(path, &rendered) {
                    return failure(format!("cannot write {}: {e}", path.display()));
                }
            }
            Outcome {
                code: if report.pass { 0 } else { 1 },
                stdout: if config.quiet { String::new() } else { rendered },
                stderr: String::new(),
            }
        }
        Err(e) => failure(format!("error: {e}")),
    }
}

fn failure(message: String) -> Outcome {
    Outcome {
        code: 2,
        stdout: String::new(),
        stderr: message + "\n",
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        let line = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("");
        Error::Parse(format!("{}: {e}\n  {}", path.display(), line.trim_end()))
    })
}

fn dispatch(config: &RunConfig) -> Result<Report> {
    match &config.command {
        Command::Snf { matrix } => cmd_snf(matrix, config.ring),
        Command::End { representation, stage } => {
            cmd_end(load_rep(representation, config.ring)?, stage.as_deref())
        }
        Command::Hom { source, target } => cmd_hom(source, target, config.ring),
        Command::Homology { graph } => cmd_homology(graph),
        Command::LesCheck { graph } => cmd_les_check(graph),
        Command::Criterion {
            representation,
            target,
            maps,
        } => {
            let target: TargetDoc = read_json(target)?;
            let maps: TestMapsDoc = read_json(maps)?;
            cmd_criterion(load_rep(representation, config.ring)?, &target, &maps.maps)
        }
        Command::Tower { representation, chain } => {
            let chain: ChainDoc = read_json(chain)?;
            cmd_tower(load_rep(representation, config.ring)?, &chain)
        }
        Command::Galois { group, dir } => cmd_galois(group, dir.as_deref(), config.ring),
    }
}

/// A representation over whichever ring was selected.
enum AnyRing {
    Z(Representation<Int>),
    Q(Representation<Rat>),
}

fn load_rep(path: &Path, ring: Option<RingArg>) -> Result<AnyRing> {
    let doc: RepresentationDoc = read_json(path)?;
    match (doc.ring, ring) {
        (RingKind::Z, None | Some(RingArg::Z)) => Ok(AnyRing::Z(doc.to_rep()?)),
        (RingKind::Z, Some(RingArg::Q)) => Ok(AnyRing::Q(doc.to_rep::<Int>()?.base_change_q())),
        (RingKind::Q, None | Some(RingArg::Q)) => Ok(AnyRing::Q(doc.to_rep()?)),
        (RingKind::Q, Some(RingArg::Z)) => Err(Error::Ring("a representation over Q cannot be read over Z".into())),
    }
}

fn label<T: serde::Serialize>(t: &T) -> String {
    match serde_json::to_value(t) {
        Ok(Value::String(s)) => s,
        Ok(v) => v.to_string(),
        Err(_) => String::new(),
    }
}

macro_rules! on_ring {
    ($any:expr, $rep:ident => $body:expr) => {
        match $any {
            AnyRing::Z($rep) => $body,
            AnyRing::Q($rep) => $body,
        }
    };
}

fn parse_matrix<R: Ring>(v: &Value) -> Result<Matrix<R>> {
    MatrixLiteral::from_value(v).map_err(Error::Parse)?.to_matrix().map_err(Error::Parse)
}

fn cmd_snf(path: &Path, ring: Option<RingArg>) -> Result<Report> {
    let v: Value = read_json(path)?;
    fn go<R: Ring>(v: &Value) -> Result<Report> {
        let a = parse_matrix::<R>(v)?;
        let d = smith_normal_form(&a);
        let diagonal = d.diagonal();
        let text = format!(
            "diagonal: {}\nrank: {}\n",
            diagonal.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
            d.rank()
        );
        Ok(Report::ok(
            json!({
                "ring": R::KIND,
                "diagonal": vector_to_json(&diagonal),
                "rank": d.rank(),
                "u": d.u, "s": d.s, "v": d.v,
            }),
            text,
        ))
    }
    match ring {
        Some(RingArg::Q) => go::<Rat>(&v),
        _ => go::<Int>(&v),
    }
}

fn select_stage<R: Ring>(rep: &Representation<R>, stage: Option<&str>) -> Result<Diagram> {
    let d = rep.diagram();
    match stage {
        None | Some("all") => Ok(d.clone()),
        Some(s) => {
            let names: Vec<&str> = s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
            if let Some(bad) = names.iter().find(|n| !d.has_object(n)) {
                return Err(Error::Invalid(format!(
                    "unknown stage '{bad}'; valid stages: all, or comma-separated objects from {}",
                    d.objects().join(", ")
                )));
            }
            d.full_subdiagram(&names)
        }
    }
}

fn cmd_end(rep: AnyRing, stage: Option<&str>) -> Result<Report> {
    on_ring!(rep, rep => {
        let stage = select_stage(&rep, stage)?;
        let universe = Universe::new(rep);
        let end = universe.end(&stage)?;
        let text = format!(
            "stage: {}\ndim: {}\n",
            end.stage().objects().join(", "),
            end.dim()
        );
        Ok(Report::ok(end.to_json(), text))
    })
}

fn cmd_hom(source: &Path, target: &Path, ring: Option<RingArg>) -> Result<Report> {
    let (x, y): (ModuleDoc, ModuleDoc) = (read_json(source)?, read_json(target)?);
    fn go<R: Ring>(x: &ModuleDoc, y: &ModuleDoc) -> Result<Report> {
        let (x, y) = (x.to_module::<R>()?, y.to_module::<R>()?);
        let h = x.hom(&y)?;
        let group = h.group().clone();
        let text = format!("hom: {group}\n");
        Ok(Report::ok(
            json!({
                "ring": R::KIND,
                "group": group,
                "rank": h.rank(),
                "generators": h.generators(),
            }),
            text,
        ))
    }
    match ring {
        Some(RingArg::Q) => go::<Rat>(&x, &y),
        _ => go::<Int>(&x, &y),
    }
}

fn cmd_homology(path: &Path) -> Result<Report> {
    let doc: GraphDoc = read_json(path)?;
    let pair = doc.pair()?;
    let h = pair.homology();
    let group = h.group();
    let text = format!("H{}(X, Y) = {group}\n", pair.degree);
    Ok(Report::ok(
        json!({
            "degree": pair.degree,
            "group": group,
            "rank": h.rank(),
            "cycles": h.cycle_matrix(),
        }),
        text,
    ))
}

fn cmd_les_check(path: &Path) -> Result<Report> {
    let doc: GraphDoc = read_json(path)?;
    let report = les_check(&doc.triple()?)?;
    let mut text = String::new();
    for n in &report.nodes {
        let _ = writeln!(
            text,
            "{:<8} rank {}  image {}  kernel {}  {}",
            n.name,
            n.rank,
            n.image_rank,
            n.kernel_rank,
            if n.exact { "exact" } else { "NOT EXACT" }
        );
    }
    let verdict = if report.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(text, "{verdict}");
    Ok(Report {
        value: json!({"nodes": report.nodes, "verdict": verdict}),
        pass: report.pass,
        text,
    })
}

fn criterion_text(r: &CriterionReport) -> String {
    let mut text = String::new();
    for item in r.condition_a.iter().chain(&r.condition_b).chain(&r.condition_c) {
        let _ = writeln!(text, "({}) {:<24} {}", item.condition, item.subject, item.status);
    }
    let _ = writeln!(text, "overall: {}", label(&r.overall()));
    text
}

fn cmd_criterion(rep: AnyRing, target: &TargetDoc, maps: &[TestMapDoc]) -> Result<Report> {
    on_ring!(rep, rep => {
        let target = target.to_target()?;
        let resolved = maps
            .iter()
            .enumerate()
            .map(|(i, m)| m.resolve(i, &rep, Some(&target)))
            .collect::<Result<Vec<_>>>()?;
        let universe = Universe::new(rep);
        let report = full_criterion(&universe, &target, &resolved)?;
        Ok(Report {
            value: report.to_json(),
            pass: report.overall() == Verdict::Pass,
            text: criterion_text(&report),
        })
    })
}

fn cmd_tower(rep: AnyRing, chain: &ChainDoc) -> Result<Report> {
    on_ring!(rep, rep => {
        let chain = SubdiagramChain::from_doc(rep.diagram(), chain)?;
        let universe = Universe::new(rep);
        let tower = universe.tower(&chain)?;
        let mut text = String::new();
        for t in &tower.traces {
            let ranks: Vec<String> = t.ranks.iter().map(|r| r.to_string()).collect();
            let _ = writeln!(text, "stage {}: {} {}", t.stage, ranks.join(" "), label(&t.flag));
        }
        Ok(Report::ok(tower.to_json(), text))
    })
}

fn preset_group(name: &str) -> Option<FiniteGroup> {
    let c2 = FiniteGroup::cyclic(2);
    match name {
        "C2" => Some(c2),
        "C3" => Some(FiniteGroup::cyclic(3)),
        "C4" => Some(FiniteGroup::cyclic(4)),
        "S3" => Some(FiniteGroup::symmetric(3)),
        "C2xC2" => Some(c2.direct_product(&c2)),
        _ => None,
    }
}

fn write_json(dir: &Path, name: &str, v: &Value) -> Result<()> {
    let path = dir.join(name);
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    std::fs::write(&path, s).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn cmd_galois(group: &str, dir: Option<&Path>, ring: Option<RingArg>) -> Result<Report> {
    let (g, set, maps) = match preset_group(group) {
        Some(g) => {
            let set = GSet::regular(&g);
            let maps = orbit_maps(&g, &set);
            (g, set, maps)
        }
        None => {
            let doc: GroupDoc = read_json(Path::new(group))?;
            let g = doc.group()?;
            let set = match doc.sets(&g)?.into_iter().next() {
                Some(s) => s,
                None => GSet::regular(&g),
            };
            let maps = if doc.maps.is_empty() { orbit_maps(&g, &set) } else { doc.maps.clone() };
            (g, set, maps)
        }
    };
    fn go<R: Ring>(g: &FiniteGroup, set: &GSet, maps: &[Vec<usize>], dir: Option<&Path>) -> Result<Report> {
        let gd = build_galois_diagram::<R>(g, set, maps)?;
        let universe = Universe::new(gd.rep.clone());
        let stage = gd.rep.diagram().full_subdiagram(&[crate::galois::GALOIS_OBJECT])?;
        let end = universe.end(&stage)?;
        let cmp = gd.compare(&end)?;
        if let Some(dir) = dir {
            std::fs::create_dir_all(dir).map_err(|e| Error::Invalid(format!("cannot create {}: {e}", dir.display())))?;
            let to_doc = |name: String, object: String, matrix: &Matrix<R>| {
                json!({"name": name, "object": object, "matrix": MatrixLiteral::from_matrix(matrix)})
            };
            let good: Vec<Value> = gd
                .equivariant_test_maps()
                .into_iter()
                .map(|t| to_doc(t.name, t.object, &t.matrix))
                .collect();
            let bad_map = gd.non_equivariant_test_map();
            let mut bad = good.clone();
            bad.push(to_doc(bad_map.name, bad_map.object, &bad_map.matrix));
            let rep_doc = serde_json::to_value(RepresentationDoc::from_rep(&gd.rep)).expect("json");
            let target = serde_json::to_value(TargetDoc::from_target(&gd.target())).expect("json");
            write_json(dir, "representation.json", &rep_doc)?;
            write_json(dir, "target.json", &target)?;
            write_json(dir, "maps.json", &json!({"maps": good}))?;
            write_json(dir, "maps_non_equivariant.json", &json!({"maps": bad}))?;
            write_json(dir, "group.json", &serde_json::to_value(GroupDoc::from_parts(g, std::slice::from_ref(set), maps)).expect("json"))?;
        }
        let text = format!(
            "|G| = {}\ncommutant dim = {}\nisomorphism: {}\n",
            cmp.group_order,
            cmp.commutant_dim,
            cmp.is_isomorphism()
        );
        Ok(Report {
            value: comparison_json(&cmp),
            pass: cmp.is_isomorphism(),
            text,
        })
    }
    match ring {
        Some(RingArg::Q) => go::<Rat>(&g, &set, &maps, dir),
        _ => go::<Int>(&g, &set, &maps, dir),
    }
}
