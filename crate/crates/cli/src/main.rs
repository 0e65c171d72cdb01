//! Command-line front end: reads elements, series, diagrams and bialgebra
//! data as JSON, runs one computation, and prints a JSON or text report.

use clap::{Args, Parser, Subcommand, ValueEnum};
use dyalg::algebra::{is_invariant_wrt, AlgebraElement};
use dyalg::cohomology::cohomology_table;
use dyalg::combinatorics::{maximal_nested_sets, quotient_diagram, DecorationMonoid, Diagram};
use dyalg::realization::{
    build_kac_moody_borel, evaluate, is_nondegenerate, matrix_to_json, validate_bialgebra, validate_bialgebra_window,
    validate_dy_module, DYModuleData, DYModuleJson, KacMoodyData, LieBialgebraData, LieBialgebraJson,
};
use dyalg::suites::{run_suite, SuiteReport, SUITES};
use dyalg::twist_lab::{
    associator_two_jet, check_associator_axioms, check_coxeter_family, coxeter_family_from_twist, series_from_json_auto,
    series_to_json, solve_gauge, SeriesJson,
};
use dyalg::{rational, Error};
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dyalg", version, about = "Exact computations in universal Drinfeld-Yetter algebras")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// String-degree truncation for products, or series order.
    #[arg(long, global = true)]
    max_degree: Option<usize>,
    /// Weight window for root-cone decorations and Kac-Moody truncations.
    #[arg(long, global = true)]
    weight_cap: Option<usize>,
    /// Progress and timing on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Product of two elements.
    Multiply { left: PathBuf, right: PathBuf },
    /// Hochschild differential of an element.
    #[command(name = "dH")]
    DH { element: PathBuf },
    /// Face map `index` of an element.
    Face {
        element: PathBuf,
        #[arg(long)]
        index: usize,
    },
    /// Invariance with respect to the (optionally decorated) r-matrix.
    InvariantCheck {
        element: PathBuf,
        /// Decoration of r as comma-separated coordinates.
        #[arg(long)]
        decor: Option<String>,
    },
    /// Hochschild cohomology dimensions at one string degree.
    Cohomology {
        #[arg(long)]
        strands: usize,
        #[arg(long, default_value_t = 2)]
        n_max: usize,
        /// trivial | split | cone:RANK
        #[arg(long)]
        monoid: Option<String>,
    },
    /// Runs a named property suite, or `all`.
    Verify { suite: String },
    /// Maximal nested sets of a diagram.
    NestedSets(DiagramArg),
    /// Quotient of a diagram by a vertex subset.
    QuotientDiagram {
        #[command(flatten)]
        diagram: DiagramArg,
        /// Comma-separated vertex labels.
        #[arg(long)]
        by: String,
    },
    /// Evaluates an element on modules over a Lie bialgebra.
    Realize {
        element: PathBuf,
        #[arg(long)]
        bialgebra: PathBuf,
        #[arg(long = "module", required = true)]
        modules: Vec<PathBuf>,
    },
    /// Builds the truncated Borel of a Kac-Moody algebra.
    KmBuild {
        /// Generalized Cartan matrix as JSON, e.g. [[2,-1],[-1,2]].
        #[arg(long)]
        gcm: String,
    },
    /// Pentagon, hexagon, duality and 2-jet residuals of an associator.
    AssociatorCheck {
        /// Series file; the built-in 2-jet when omitted.
        series: Option<PathBuf>,
    },
    /// Gauge `u` with gauge(u, J1) = J2.
    SolveGauge {
        j1: PathBuf,
        j2: PathBuf,
        /// Associator series; the built-in 2-jet when omitted.
        #[arg(long)]
        phi: Option<PathBuf>,
    },
    /// Builds the nested-set twist family of a diagram and checks its axioms.
    CoxeterCheck {
        #[command(flatten)]
        diagram: DiagramArg,
        /// Rational scale of the elementary twists.
        #[arg(long, default_value = "1/2")]
        base: String,
    },
}

#[derive(Args)]
struct DiagramArg {
    /// Diagram JSON file with `vertices` and `edges`.
    #[arg(long, conflicts_with = "path")]
    diagram: Option<PathBuf>,
    /// The path diagram A_n.
    #[arg(long)]
    path: Option<u32>,
}

/// Settings shared by all subcommands.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    monoid: Option<DecorationMonoid>,
    n: Option<usize>,
    max_degree: Option<usize>,
    series_order: Option<usize>,
    weight_cap: Option<usize>,
    format: Option<Format>,
    seed: Option<u64>,
}

struct Settings {
    monoid: Option<DecorationMonoid>,
    max_degree: Option<usize>,
    series_order: usize,
    weight_cap: usize,
    format: Format,
    seed: u64,
    verbose: u8,
}

/// A failure with its exit code.
struct Fail {
    code: u8,
    msg: String,
    report: Option<Value>,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 2,
            Error::Mismatch(_) => 3,
            Error::Validation(_) => 4,
            _ => 1,
        };
        Fail { code, msg: e.to_string(), report: None }
    }
}

type Out = std::result::Result<(Value, String, bool), Fail>;

fn parse_err(msg: impl Into<String>) -> Fail {
    Fail { code: 2, msg: msg.into(), report: None }
}

fn read_json<T: DeserializeOwned>(p: &Path) -> Result<T, Fail> {
    let s = std::fs::read_to_string(p).map_err(|e| parse_err(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&s).map_err(|e| parse_err(format!("{}: {e}", p.display())))
}

fn read_element(p: &Path) -> Result<AlgebraElement, Fail> {
    Ok(AlgebraElement::from_json(&read_json(p)?)?)
}

fn read_series(p: &Path) -> Result<dyalg::algebra::GradedSeries, Fail> {
    let j: SeriesJson = read_json(p)?;
    Ok(series_from_json_auto(&j)?)
}

fn settings(g: &Global) -> Result<Settings, Fail> {
    let cfg: RunConfig = match &g.config {
        Some(p) => read_json(p)?,
        None => RunConfig::default(),
    };
    let s = Settings {
        monoid: cfg.monoid,
        max_degree: g.max_degree.or(cfg.max_degree),
        series_order: g.max_degree.or(cfg.series_order).unwrap_or(3),
        weight_cap: g.weight_cap.or(cfg.weight_cap).unwrap_or(3),
        format: g.format.or(cfg.format).unwrap_or(Format::Json),
        seed: g.seed.or(cfg.seed).unwrap_or(7),
        verbose: g.verbose,
    };
    if s.weight_cap == 0 || s.series_order == 0 || s.max_degree == Some(0) || cfg.n == Some(0) {
        return Err(parse_err("guards must be positive"));
    }
    Ok(s)
}

fn parse_monoid(s: &str, cap: usize) -> Result<DecorationMonoid, Fail> {
    let m = match s {
        "trivial" => DecorationMonoid::Trivial,
        "split" => DecorationMonoid::Split,
        _ => match s.strip_prefix("cone:").and_then(|r| r.parse::<usize>().ok()) {
            Some(rank) => DecorationMonoid::RootCone { rank, cap },
            None => return Err(parse_err(format!("unknown monoid {s}"))),
        },
    };
    m.validate()?;
    Ok(m)
}

fn diagram_of(d: &DiagramArg) -> Result<Diagram, Fail> {
    match (&d.diagram, d.path) {
        (Some(p), None) => read_json(p),
        (None, Some(n)) if n > 0 => Ok(Diagram::path(n)),
        _ => Err(parse_err("give --diagram FILE or --path N")),
    }
}

fn labels(s: &str) -> Result<Vec<u32>, Fail> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| x.trim().parse().map_err(|_| parse_err(format!("bad label {x}")))).collect()
}

fn element_out(x: &AlgebraElement) -> (Value, String) {
    (serde_json::to_value(x.to_json()).expect("serializable"), x.to_string())
}

fn suite_text(r: &SuiteReport) -> String {
    let mut t = format!("{}: {} ({} checks, {} failed)", r.suite, if r.pass() { "pass" } else { "FAIL" }, r.checked, r.failures.len());
    for f in &r.failures {
        t.push_str(&format!("\n  failed: {f}"));
    }
    for f in &r.findings {
        t.push_str(&format!("\n  note: {f}"));
    }
    t
}

fn run(cmd: &Cmd, s: &Settings) -> Out {
    match cmd {
        Cmd::Multiply { left, right } => {
            let (a, b) = (read_element(left)?, read_element(right)?);
            if a.n != b.n || a.monoid != b.monoid {
                return Err(Fail { code: 3, msg: "mismatch: operands live in different algebras".into(), report: None });
            }
            let p = match s.max_degree {
                Some(d) => a.mul_trunc(&b, d),
                None => a.mul(&b)?,
            };
            let (j, t) = element_out(&p);
            Ok((j, t, true))
        }
        Cmd::DH { element } => {
            let (j, t) = element_out(&read_element(element)?.hochschild_d());
            Ok((j, t, true))
        }
        Cmd::Face { element, index } => {
            let (j, t) = element_out(&read_element(element)?.face_map(*index)?);
            Ok((j, t, true))
        }
        Cmd::InvariantCheck { element, decor } => {
            let x = read_element(element)?;
            let d = match decor {
                Some(d) => {
                    let v: Vec<u8> = d.split(',').map(|c| c.trim().parse().map_err(|_| parse_err("bad decoration"))).collect::<Result<_, _>>()?;
                    x.monoid.parse_decor(&v)?
                }
                None => dyalg::combinatorics::Decor::ZERO,
            };
            let inv = is_invariant_wrt(&x, d)?;
            Ok((json!({ "invariant": inv }), format!("invariant: {inv}"), true))
        }
        Cmd::Cohomology { strands, n_max, monoid } => {
            let m = match (monoid, &s.monoid) {
                (Some(m), _) => parse_monoid(m, s.weight_cap)?,
                (None, Some(m)) => m.clone(),
                (None, None) => DecorationMonoid::Trivial,
            };
            let rows = cohomology_table(*strands, *n_max, &m)?;
            let mut t = String::from("n  ker  im  H  oracle  total-oracle");
            for r in &rows {
                t.push_str(&format!("\n{}  {}  {}  {}  {}  {}", r.n, r.dim_ker, r.dim_im, r.dim_h, r.oracle, r.total_degree_oracle));
            }
            Ok((serde_json::to_value(&rows).expect("serializable"), t, true))
        }
        Cmd::Verify { suite } => {
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut reports = Vec::new();
            for n in names {
                if s.verbose > 0 {
                    eprintln!("running {n}");
                }
                reports.push(run_suite(n, s.seed)?);
            }
            let ok = reports.iter().all(|r| r.pass());
            let text = reports.iter().map(suite_text).collect::<Vec<_>>().join("\n");
            Ok((serde_json::to_value(&reports).expect("serializable"), text, ok))
        }
        Cmd::NestedSets(d) => {
            let sets = maximal_nested_sets(&diagram_of(d)?);
            let text = format!("{} maximal nested sets\n", sets.len())
                + &sets.iter().map(|f| format!("{:?}", f.0)).collect::<Vec<_>>().join("\n");
            Ok((json!({ "count": sets.len(), "nested_sets": sets }), text, true))
        }
        Cmd::QuotientDiagram { diagram, by } => {
            let q = quotient_diagram(&diagram_of(diagram)?, &labels(by)?)?;
            let text = format!("vertices {:?}\nedges {:?}", q.labels(), q.edges());
            Ok((serde_json::to_value(&q).expect("serializable"), text, true))
        }
        Cmd::Realize { element, bialgebra, modules } => {
            let x = read_element(element)?;
            let a = LieBialgebraData::from_json(&read_json::<LieBialgebraJson>(bialgebra)?)?;
            let rep = validate_bialgebra(&a)?;
            if !rep.is_valid() {
                return Err(Fail { code: 4, msg: "bialgebra axioms violated".into(), report: Some(json!(rep)) });
            }
            let mut mods = Vec::new();
            for p in modules {
                let v = DYModuleData::from_json(&read_json::<DYModuleJson>(p)?)?;
                let rep = validate_dy_module(&a, &v)?;
                if !rep.is_valid() {
                    return Err(Fail { code: 4, msg: format!("{}: module axioms violated", p.display()), report: Some(json!(rep)) });
                }
                mods.push(v);
            }
            let m = evaluate(&x, &a, &mods)?;
            let rows = matrix_to_json(&m);
            let text = rows.iter().map(|r| r.join(" ")).collect::<Vec<_>>().join("\n");
            Ok((json!({ "rows": m.rows, "cols": m.cols, "entries": rows }), text, true))
        }
        Cmd::KmBuild { gcm } => {
            let g: Vec<Vec<i64>> = serde_json::from_str(gcm).map_err(|e| parse_err(format!("gcm: {e}")))?;
            let k = KacMoodyData::new(g, s.weight_cap);
            let b = build_kac_moody_borel(&k)?;
            let form = k.extended_form()?;
            let rep = validate_bialgebra_window(&b.algebra, Some(k.cap))?;
            let out = json!({
                "labels": b.labels,
                "bialgebra": b.algebra.to_json(),
                "extended_form": matrix_to_json(&form),
                "nondegenerate": is_nondegenerate(&form),
                "validation": rep,
            });
            if !rep.is_valid() {
                return Err(Fail { code: 4, msg: "truncated Borel fails validation".into(), report: Some(out) });
            }
            let text = format!(
                "dimension {}\nbasis {}\nextended form nondegenerate: {}\nvalidation: ok",
                b.algebra.dim,
                b.labels.join(" "),
                is_nondegenerate(&form)
            );
            Ok((out, text, true))
        }
        Cmd::AssociatorCheck { series } => {
            let m = s.monoid.clone().unwrap_or(DecorationMonoid::Trivial);
            let phi = match series {
                Some(p) => read_series(p)?,
                None => associator_two_jet(&m, s.series_order)?,
            };
            let rep = check_associator_axioms(&phi, s.series_order.min(phi.order()))?;
            let ok = rep.passes_mod(3);
            let text = rep
                .residuals
                .iter()
                .map(|r| format!("{}: {:?}{}", r.name, r.per_degree, r.first_offending.as_ref().map(|o| format!("  first: {o}")).unwrap_or_default()))
                .collect::<Vec<_>>()
                .join("\n");
            Ok((json!(rep), text, ok))
        }
        Cmd::SolveGauge { j1, j2, phi } => {
            let (a, b) = (read_series(j1)?, read_series(j2)?);
            let phi = match phi {
                Some(p) => read_series(p)?,
                None => associator_two_jet(&a.monoid, s.series_order)?,
            };
            let d = s.series_order.min(a.order()).min(b.order());
            let u = solve_gauge(&a, &b, &phi, d)?;
            let text = u.parts.iter().enumerate().map(|(k, p)| format!("degree {k}: {p}")).collect::<Vec<_>>().join("\n");
            Ok((json!(series_to_json(&u)), text, true))
        }
        Cmd::CoxeterCheck { diagram, base } => {
            let d = diagram_of(diagram)?;
            let c = rational::parse(base).ok_or_else(|| parse_err(format!("bad rational {base}")))?;
            let m = s.monoid.clone().unwrap_or(DecorationMonoid::Trivial);
            let fam = coxeter_family_from_twist(&d, &c, &m, s.series_order)?;
            let rep = check_coxeter_family(&fam, &d, s.series_order)?;
            let text = rep
                .axioms
                .iter()
                .map(|a| format!("{}: {} instances, {} failures", a.axiom, a.instances, a.failures))
                .collect::<Vec<_>>()
                .join("\n");
            Ok((json!(rep), text, rep.pass()))
        }
    }
}

fn emit(s: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{s}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let t = std::time::Instant::now();
    let result = settings(&cli.global).and_then(|s| run(&cli.cmd, &s).map(|o| (o, s)));
    match result {
        Ok(((j, text, ok), s)) => {
            match s.format {
                Format::Json => emit(&serde_json::to_string_pretty(&j).expect("serializable")),
                Format::Text => emit(&text),
            }
            if s.verbose > 0 {
                eprintln!("done in {:.2?}", t.elapsed());
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            if let Some(r) = f.report {
                emit(&serde_json::to_string_pretty(&r).expect("serializable"));
            }
            ExitCode::from(f.code)
        }
    }
}
