mod input;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use smoothpoly::catalog::{to_off, CatalogFile, EntryRecord, ReadError};
use smoothpoly::constructions::{blow_downs, is_minimal};
use smoothpoly::enumerate2d::enumerate_smooth_polygons;
use smoothpoly::enumerate3d::{classify, verify_catalog, ClosureConfig, VerifyInput, VerifyReport};
use smoothpoly::fans::{is_smooth, normal_fan, surface_class};
use smoothpoly::iso::{canonical_form, isomorphism};
use smoothpoly::labels::{
    edge_blowup_labels, facet_point_lower_bound, is_realizable, label, label_point_lower_bound,
    vertex_blowup_labels, TriangulationLabel,
};
use smoothpoly::normality::{
    check_normality, degrevlex_basis, lex_basis, search_quadratic_order, VariableOrder,
};
use smoothpoly::{Error, LatticePolytope};

/// Completeness of the 3-D pipeline is only established up to this budget.
const PROVEN_MAX_POINTS_3D: usize = 16;
/// Larger budgets are refused as a resource cap.
const CAP_MAX_POINTS_3D: usize = 20;
const CAP_MAX_POINTS_2D: usize = 60;
/// Random orders tried by `normality --variables search`.
const SEARCH_ATTEMPTS: usize = 2000;
const SEARCH_SEED: u64 = 1;

#[derive(Parser)]
#[command(
    name = "smoothpoly",
    version,
    about = "Classify and inspect smooth lattice polytopes"
)]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all smooth polytopes up to a lattice point budget.
    Classify {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(2..=3))]
        dim: u8,
        #[arg(long, default_value_t = 16)]
        max_points: usize,
        /// Catalog path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep only polygons with at least this many vertices (2-D).
        #[arg(long)]
        min_vertices: Option<usize>,
        /// Expand every polytope in the blow-up search.
        #[arg(long)]
        no_prune: bool,
    },
    /// Re-check every entry of a catalog.
    Verify { catalog: PathBuf },
    /// Decide whether two polytope files are unimodularly equivalent.
    Iso { a: PathBuf, b: PathBuf },
    /// Quadratic Gröbner basis and squarefree initial ideal checks.
    Normality {
        catalog: PathBuf,
        /// Only entries with at most this many points.
        #[arg(long)]
        max_points: Option<usize>,
        #[arg(long, value_enum, default_value_t = OrderChoice::Both)]
        order: OrderChoice,
        /// Variable order: default, reverse, boundary-first or search.
        #[arg(long, default_value = "default")]
        variables: String,
        /// A single entry, with the bases printed.
        #[arg(long)]
        id: Option<String>,
    },
    /// Write one entry as JSON or as an OFF mesh.
    Export {
        catalog: PathBuf,
        #[arg(long)]
        id: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Triangulation label of a polytope file, or facts about a label.
    Label {
        file: Option<PathBuf>,
        /// A label such as "3^2 4^3".
        #[arg(long, conflicts_with = "file")]
        label: Option<String>,
    },
    /// Smoothness, minimality and label of a polytope file.
    Check { file: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderChoice {
    Lex,
    Degrevlex,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Off,
}

enum Failure {
    Usage(String),
    Io(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Resource(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<ReadError> for Failure {
    fn from(e: ReadError) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    // exit quietly when the reader of stdout goes away, as with `| head`
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    let result = match cli.command {
        Command::Classify {
            dim,
            max_points,
            out,
            min_vertices,
            no_prune,
        } => cmd_classify(
            dim as usize,
            max_points,
            out.as_deref(),
            min_vertices,
            no_prune,
        ),
        Command::Verify { catalog } => cmd_verify(&catalog),
        Command::Iso { a, b } => cmd_iso(&a, &b),
        Command::Normality {
            catalog,
            max_points,
            order,
            variables,
            id,
        } => cmd_normality(&catalog, max_points, order, &variables, id.as_deref()),
        Command::Export {
            catalog,
            id,
            format,
            out,
        } => cmd_export(&catalog, &id, format, out.as_deref()),
        Command::Label { file, label } => cmd_label(file.as_deref(), label.as_deref()),
        Command::Check { file } => cmd_check(&file),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

/// Summary goes to standard output unless the catalog itself does.
fn report(to_stdout: bool, text: &str) {
    if to_stdout {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn cmd_classify(
    dim: usize,
    max_points: usize,
    out: Option<&Path>,
    min_vertices: Option<usize>,
    no_prune: bool,
) -> Outcome {
    let cap = if dim == 3 {
        CAP_MAX_POINTS_3D
    } else {
        CAP_MAX_POINTS_2D
    };
    if max_points > cap {
        return Err(Failure::Resource(format!(
            "--max-points {max_points} exceeds the limit of {cap} for dimension {dim}"
        )));
    }
    if max_points < dim + 1 {
        return Err(Failure::Usage(format!(
            "--max-points must be at least {}",
            dim + 1
        )));
    }
    let summary_to_stdout = out.is_some();
    let catalog = if dim == 2 {
        if no_prune {
            return Err(Failure::Usage(
                "--no-prune only applies to dimension 3".into(),
            ));
        }
        let mut polys = enumerate_smooth_polygons(max_points);
        if let Some(k) = min_vertices {
            polys.retain(|p| p.num_vertices() >= k);
        }
        CatalogFile::from_polygons(&polys, max_points)
    } else {
        if min_vertices.is_some() {
            return Err(Failure::Usage(
                "--min-vertices only applies to dimension 2".into(),
            ));
        }
        if max_points > PROVEN_MAX_POINTS_3D {
            eprintln!("warning: completeness is only established up to {PROVEN_MAX_POINTS_3D} lattice points");
        }
        let mut cfg = ClosureConfig::new(max_points);
        cfg.prune = !no_prune;
        CatalogFile::from_classification(&classify(cfg), max_points)
    };
    emit(out, &catalog.to_json_lines())?;
    report(summary_to_stdout, &summary(&catalog));
    Ok(true)
}

fn summary(cat: &CatalogFile) -> String {
    let h = &cat.header;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} polytopes (dimension {}, at most {} lattice points)",
        h.count, h.dim, h.max_points
    );
    let produced: BTreeMap<String, usize> = match &h.tallies {
        Some(t) => [
            ("simplex", t.simplex),
            ("cayley_segments", t.cayley_segments),
            ("cayley_pair", t.cayley_pair),
            ("blowup", t.blowup),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect(),
        None => BTreeMap::new(),
    };
    let _ = writeln!(s, "{:<18} {:>8} {:>9}", "category", "entries", "produced");
    for (c, n) in &h.category_counts {
        let p = produced
            .get(&c.to_string())
            .map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(s, "{:<18} {:>8} {:>9}", c.to_string(), n, p);
    }
    if let Some(t) = &h.tallies {
        let _ = writeln!(s, "segment triples with s = 1: {}", t.segment_triples_s1);
        let _ = writeln!(
            s,
            "cayley_pair entries isomorphic to cayley_segments entries: {}",
            t.pair_segment_overlap
        );
        let groups: Vec<String> = t
            .pair_groups
            .iter()
            .map(|(g, n)| {
                let shared = t.pair_group_shared.get(g).copied().unwrap_or(0);
                if shared > 0 {
                    format!("{g} {n} ({shared} shared)")
                } else {
                    format!("{g} {n}")
                }
            })
            .collect();
        let _ = writeln!(s, "cayley_pair by base: {}", groups.join(", "));
    }
    let dims: Vec<String> = h
        .embedding_counts
        .iter()
        .map(|(d, n)| format!("P^{d}: {n}"))
        .collect();
    let _ = writeln!(s, "by embedding: {}", dims.join(", "));
    s
}

/// Record fields must agree with the geometry of their vertices.
fn record_mismatches(e: &EntryRecord, p: &LatticePolytope) -> Vec<String> {
    let mut out = Vec::new();
    if p.num_points() != e.num_points {
        out.push(format!(
            "{}: num_points {} but {} lattice points",
            e.id,
            e.num_points,
            p.num_points()
        ));
    }
    let (v, ed, f) = p.f_vector();
    let fv = if p.dim() == 3 {
        vec![v, ed, f]
    } else {
        vec![v, ed]
    };
    if fv != e.f_vector {
        out.push(format!(
            "{}: f_vector {:?} but geometry gives {:?}",
            e.id, e.f_vector, fv
        ));
    }
    if p.dim() == 3 {
        if let (Some(l), Ok(actual)) = (&e.label, label(p)) {
            if *l != actual {
                out.push(format!("{}: label {l} but geometry gives {actual}", e.id));
            }
        }
    }
    if let Some(r) = &e.recipe {
        match r
            .build()
            .and_then(|q| Ok(canonical_form(&q)? == canonical_form(p)?))
        {
            Ok(true) => {}
            Ok(false) => out.push(format!("{}: recipe builds a different polytope", e.id)),
            Err(err) => out.push(format!("{}: recipe fails: {err}", e.id)),
        }
    }
    out
}

fn cmd_verify(path: &Path) -> Outcome {
    let cat = CatalogFile::read(path)?;
    let max_points = cat.header.max_points;
    let mut report = if cat.header.dim == 3 {
        let items: Vec<VerifyInput<'_>> = cat
            .entries
            .iter()
            .map(|e| VerifyInput {
                id: &e.id,
                vertices: &e.vertices,
                minimal: Some(e.minimal),
            })
            .collect();
        verify_catalog(&items, max_points)
    } else {
        verify_polygons(&cat)
    };
    let records: Vec<String> = cat
        .entries
        .par_iter()
        .flat_map_iter(|e| match e.polytope() {
            Ok(p) if is_smooth(&p) => record_mismatches(e, &p),
            _ => Vec::new(),
        })
        .collect();
    report.checks.push(smoothpoly::enumerate3d::CheckResult {
        name: "record fields match geometry",
        violations: records,
    });
    print!("{report}");
    let ok = report.ok();
    println!(
        "{}: {} entries, {} violations",
        if ok { "verified" } else { "FAILED" },
        cat.entries.len(),
        report.violations()
    );
    Ok(ok)
}

fn verify_polygons(cat: &CatalogFile) -> VerifyReport {
    let mut smooth = Vec::new();
    let mut budget = Vec::new();
    let mut distinct = Vec::new();
    let mut seen = BTreeMap::new();
    for e in &cat.entries {
        let p = match e.polytope() {
            Ok(p) if p.dim() == 2 && p.vertices().len() == e.vertices.len() && is_smooth(&p) => p,
            _ => {
                smooth.push(e.id.clone());
                continue;
            }
        };
        if p.num_points() > cat.header.max_points {
            budget.push(e.id.clone());
        }
        if let Some(other) = seen.insert(canonical_form(&p).unwrap(), e.id.clone()) {
            distinct.push(format!("{} is isomorphic to {other}", e.id));
        }
    }
    let check = |name, violations| smoothpoly::enumerate3d::CheckResult { name, violations };
    VerifyReport {
        checks: vec![
            check("smooth", smooth),
            check("point budget", budget),
            check("distinct canonical forms", distinct),
        ],
    }
}

fn read_polytope(path: &Path) -> Result<LatticePolytope, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    input::parse_polytope(&text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn cmd_iso(a: &Path, b: &Path) -> Outcome {
    let p = read_polytope(a)?;
    let q = read_polytope(b)?;
    match isomorphism(&p, &q) {
        Ok(Some(m)) => {
            println!("isomorphic");
            println!("x -> M x + t");
            for row in m.matrix_rows() {
                let r: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
                println!("M  [{}]", r.join(" "));
            }
            println!("t  {}", m.translation());
            Ok(true)
        }
        Ok(None) => {
            println!("not isomorphic");
            Ok(false)
        }
        Err(Error::NotSmooth(_)) => Err(Failure::Usage("both polytopes must be smooth".into())),
        Err(e) => Err(Failure::Io(e.to_string())),
    }
}

enum Variables {
    Named(VariableOrder),
    Search,
}

fn cmd_normality(
    path: &Path,
    max_points: Option<usize>,
    order: OrderChoice,
    variables: &str,
    id: Option<&str>,
) -> Outcome {
    let vars = match variables {
        "search" => Variables::Search,
        v => Variables::Named(
            v.parse()
                .map_err(|e: Error| Failure::Usage(e.to_string()))?,
        ),
    };
    let cat = CatalogFile::read(path)?;
    let entries: Vec<&EntryRecord> = match id {
        Some(id) => vec![cat
            .get(id)
            .ok_or_else(|| Failure::Usage(format!("no entry {id}")))?],
        None => cat
            .entries
            .iter()
            .filter(|e| max_points.is_none_or(|m| e.num_points <= m))
            .collect(),
    };
    let want_quadratic = order != OrderChoice::Lex;
    let want_squarefree = order != OrderChoice::Degrevlex;
    let lines: Vec<(String, Result<bool, String>, bool)> = entries
        .par_iter()
        .map(|e| {
            let start = Instant::now();
            let res = normality_line(e, &vars, want_quadratic, want_squarefree);
            let capped = matches!(res, Err(Error::ResourceCap(_)));
            let res = res.map_err(|err| err.to_string());
            let line = match &res {
                Ok((_, text)) => format!(
                    "{:<15} {:>3} pts  {text}  [{:.0?}]",
                    e.id,
                    e.num_points,
                    start.elapsed()
                ),
                Err(msg) => format!("{:<15} {:>3} pts  ABORTED: {msg}", e.id, e.num_points),
            };
            (line, res.map(|(ok, _)| ok), capped)
        })
        .collect();
    let mut passed = 0;
    let mut failed = 0;
    let mut aborted = 0;
    for (line, res, capped) in &lines {
        println!("{line}");
        match res {
            Ok(true) => passed += 1,
            Ok(false) => failed += 1,
            Err(_) if *capped => aborted += 1,
            Err(_) => failed += 1,
        }
    }
    if let (Some(id), Some(e)) = (id, entries.first()) {
        print_bases(id, e, &vars, want_quadratic, want_squarefree)?;
    }
    println!("{passed} passed, {failed} failed, {aborted} aborted at the resource cap");
    if aborted > 0 && failed == 0 {
        return Err(Failure::Resource(format!(
            "{aborted} computations hit the resource cap"
        )));
    }
    Ok(failed == 0 && aborted == 0)
}

/// One report line. With a named variable order that fails, the other named
/// orders and then a seeded search are tried and reported.
fn normality_line(
    e: &EntryRecord,
    vars: &Variables,
    want_quadratic: bool,
    want_squarefree: bool,
) -> Result<(bool, String), Error> {
    let p = e.polytope()?;
    let first = match vars {
        Variables::Named(o) => *o,
        Variables::Search => VariableOrder::Default,
    };
    let r = check_normality(&p, first)?;
    let mut text = String::new();
    let mut ok = true;
    if want_quadratic {
        let _ = write!(
            text,
            "degrevlex({first}): {} size {} max degree {}",
            if r.quadratic {
                "quadratic"
            } else {
                "NOT quadratic"
            },
            r.degrevlex_size,
            r.max_degree
        );
        if !r.quadratic {
            match search_quadratic_order(&p, SEARCH_ATTEMPTS, SEARCH_SEED)? {
                Some(perm) => {
                    let _ = write!(text, "; quadratic under variable order {perm:?}");
                    ok &= matches!(vars, Variables::Search);
                }
                None => {
                    let _ = write!(
                        text,
                        "; no quadratic order found in {SEARCH_ATTEMPTS} attempts"
                    );
                    ok = false;
                }
            }
        }
    }
    if want_squarefree {
        if !text.is_empty() {
            text.push_str("  ");
        }
        let _ = write!(
            text,
            "lex({first}): {} size {}",
            if r.squarefree {
                "squarefree"
            } else {
                "NOT squarefree"
            },
            r.lex_size
        );
        if !r.squarefree {
            let retry = VariableOrder::ALL
                .into_iter()
                .filter(|&o| o != first)
                .find(|&o| check_normality(&p, o).is_ok_and(|r| r.squarefree));
            if let Some(o) = retry {
                let _ = write!(text, "; squarefree under {o}");
                ok &= matches!(vars, Variables::Search);
            } else {
                ok = false;
            }
        }
    }
    Ok((ok, text))
}

fn print_bases(
    id: &str,
    e: &EntryRecord,
    vars: &Variables,
    want_quadratic: bool,
    want_squarefree: bool,
) -> Result<(), Failure> {
    let p = e.polytope().map_err(|err| Failure::Io(err.to_string()))?;
    let o = match vars {
        Variables::Named(o) => *o,
        Variables::Search => VariableOrder::Default,
    };
    let io = |err: Error| match err {
        Error::ResourceCap(m) => Failure::Resource(m),
        other => Failure::Io(other.to_string()),
    };
    let mut pts = p.lattice_points().to_vec();
    pts.sort();
    println!("variables of {id} ({o} order):");
    for k in o.permutation(&p) {
        println!("  x{} = {}", k + 1, pts[k]);
    }
    if want_quadratic {
        let g = degrevlex_basis(&p, o).map_err(io)?;
        println!("reduced degrevlex basis ({} elements):", g.len());
        for b in &g {
            println!("  {b}");
        }
    }
    if want_squarefree {
        let g = lex_basis(&p, o).map_err(io)?;
        println!("reduced lex basis ({} elements):", g.len());
        for b in &g {
            println!("  {b}");
        }
    }
    Ok(())
}

fn cmd_export(path: &Path, id: &str, format: Format, out: Option<&Path>) -> Outcome {
    let cat = CatalogFile::read(path)?;
    let e = cat
        .get(id)
        .ok_or_else(|| Failure::Usage(format!("no entry {id}")))?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(e).expect("records serialize") + "\n",
        Format::Off => to_off(&e.polytope().map_err(|err| Failure::Io(err.to_string()))?),
    };
    emit(out, &text)?;
    Ok(true)
}

fn cmd_label(file: Option<&Path>, text: Option<&str>) -> Outcome {
    match (file, text) {
        (Some(f), _) => {
            let p = read_polytope(f)?;
            if p.dim() != 3 {
                return Err(Failure::Usage("labels are defined for 3-polytopes".into()));
            }
            match label(&p) {
                Ok(l) => {
                    println!("{l}");
                    Ok(true)
                }
                Err(e) => {
                    println!("no label: {e}");
                    Ok(false)
                }
            }
        }
        (None, Some(t)) => {
            let l: TriangulationLabel = t
                .parse()
                .map_err(|e: Error| Failure::Usage(e.to_string()))?;
            println!(
                "label {l}: {} facets, {} vertices",
                l.num_facets(),
                l.num_vertices()
            );
            let realizable = is_realizable(&l);
            println!(
                "realized by a triangulation of the sphere: {}",
                if realizable { "yes" } else { "no" }
            );
            match facet_point_lower_bound(&l) {
                Ok(b) => println!("lower bound on lattice points: {b}"),
                Err(_) => println!(
                    "lower bound on lattice points (label only): {}",
                    label_point_lower_bound(&l)
                ),
            }
            let join = |s: BTreeSet<TriangulationLabel>| {
                s.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            println!("vertex blow-ups: {}", join(vertex_blowup_labels(&l)));
            println!("edge blow-ups: {}", join(edge_blowup_labels(&l)));
            Ok(realizable)
        }
        (None, None) => Err(Failure::Usage("give a polytope file or --label".into())),
    }
}

fn cmd_check(file: &Path) -> Outcome {
    let p = read_polytope(file)?;
    let (v, e, f) = p.f_vector();
    println!("dimension: {}", p.dim());
    println!("lattice points: {}", p.num_points());
    if p.dim() == 3 {
        println!("f-vector: ({v}, {e}, {f})");
    } else {
        println!("vertices: {v}");
    }
    println!("simple: {}", p.is_simple());
    let smooth = is_smooth(&p);
    println!("smooth: {smooth}");
    if !smooth {
        return Ok(false);
    }
    if p.dim() == 3 {
        println!(
            "label: {}",
            label(&p).map_err(|e| Failure::Io(e.to_string()))?
        );
    } else {
        println!("fan class: {}", surface_class(&normal_fan(&p)));
    }
    let downs = blow_downs(&p);
    println!("minimal: {}", is_minimal(&p));
    for (facet, q) in downs {
        println!(
            "  blow-down of facet {facet}: {} lattice points",
            q.num_points()
        );
    }
    Ok(true)
}
