use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use legendre_cli::document::{write_integral, write_isotropic, Body, DocError, GermDocument};
use legendre_cli::front::{sample_front, Grid};
use legendre_cli::render;
use legendre_core::integral_maps::{
    complete_from_uv, lift_isotropic, owu_normal_form, project_isotropic, IntegralMap,
};
use legendre_core::ring::Cap;
use legendre_core::stability::{self, Classification, StabilityError, Verdict, R0};
use serde_json::{json, Value};

/// Exact computations with integral map-germs into standard contact space.
#[derive(Parser)]
#[command(name = "legendre", version)]
struct Cli {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to a file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The open Whitney umbrella of type k in n variables.
    NormalForm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Truncate the components at this degree.
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Complete graph data (u, v) to an integral germ.
    Complete { file: PathBuf },
    /// Run a stability check on one or more germ files.
    Check {
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Mode::Contact)]
        mode: Mode,
        /// Jet order; defaults to max(ceil(n/2) + 1, r0).
        #[arg(long)]
        order: Option<u32>,
        /// Truncate the germ at this degree first.
        #[arg(long)]
        cap: Option<u32>,
        /// Largest order searched for r0.
        #[arg(long, default_value_t = 24)]
        max_r0: u32,
    },
    /// Open Whitney umbrella type.
    Classify {
        files: Vec<PathBuf>,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        cap: Option<u32>,
        #[arg(long, default_value_t = 24)]
        max_r0: u32,
    },
    /// Lift an isotropic map (p, q) to an integral germ.
    Lift { file: PathBuf },
    /// Project an integral germ to its isotropic map.
    Project { file: PathBuf },
    /// Join two unfoldings of the same germ.
    Extend { first: PathBuf, second: PathBuf },
    /// Sample the (q, r) front as CSV.
    Front {
        file: PathBuf,
        #[arg(long, default_value_t = 41)]
        samples: usize,
        /// Half-width of the sampled source interval.
        #[arg(long, default_value_t = 1.0)]
        range: f64,
        /// Parameter grid `name=start:end:count`; repeatable.
        #[arg(long = "param-grid")]
        param_grid: Vec<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Contact,
    Legendre,
    A2r,
    Aprime,
    Classify,
    /// Jet-level evidence for condition (ca).
    Ca,
    All,
}

/// Exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    Pass,
    Inconclusive,
    Fail,
    Malformed,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Malformed => 2,
            Status::Inconclusive => 3,
        }
    }

    fn of(v: Verdict) -> Status {
        match v {
            Verdict::Pass => Status::Pass,
            Verdict::Fail => Status::Fail,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

struct Failure {
    status: Status,
    message: String,
}

impl Failure {
    fn malformed(message: impl ToString) -> Failure {
        Failure {
            status: Status::Malformed,
            message: message.to_string(),
        }
    }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        Failure::malformed(e)
    }
}

impl From<StabilityError> for Failure {
    fn from(e: StabilityError) -> Self {
        let status = match e {
            StabilityError::CapShortfall { .. } => Status::Inconclusive,
            _ => Status::Malformed,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(String, Status), Failure>;

fn read_doc(path: &Path) -> Result<GermDocument, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
    GermDocument::parse(&text).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn label_of(doc: &GermDocument, path: &Path) -> String {
    doc.label(
        &path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
    )
}

fn germ_output(f: &IntegralMap, name: Option<&str>, as_json: bool) -> String {
    if as_json {
        pretty(&render::germ_json(f, name))
    } else {
        write_integral(f, name)
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn order_for(
    f: &IntegralMap,
    requested: Option<u32>,
    max_r0: u32,
) -> Result<(u32, Option<R0>), Failure> {
    if let Some(r) = requested {
        return Ok((r, None));
    }
    let search = match f.cap().degree() {
        None => max_r0,
        Some(c) if c >= 3 => max_r0.min(c - 3),
        Some(_) => {
            return Err(StabilityError::CapShortfall {
                needed: 3,
                available: f.cap(),
            }
            .into())
        }
    };
    let r0 = stability::search_r0(f, search)?;
    match r0.value() {
        Some(v) => Ok((stability::default_order(f.n(), v), Some(r0))),
        None => Err(Failure {
            status: Status::Inconclusive,
            message: format!("r0 not found up to order {search}"),
        }),
    }
}

fn check_one(
    path: &Path,
    mode: Mode,
    order: Option<u32>,
    cap: Option<u32>,
    max_r0: u32,
) -> Result<(Value, String, Status), Failure> {
    let doc = read_doc(path)?;
    let mut f = doc.integral_map()?;
    if let Some(c) = cap {
        f = f.truncate(Cap::new(c));
    }
    if !f.germ().params().is_empty() {
        return Err(StabilityError::HasParameters.into());
    }
    let label = label_of(&doc, path);
    let (r, r0) = order_for(&f, order.or(doc.order), max_r0)?;
    let mut text = render::header(&label, r, f.cap(), r0);
    let (result, status) = match mode {
        Mode::Contact | Mode::Legendre => {
            let (c, l) = stability::check_spans(&f, r)?;
            let rep = if mode == Mode::Contact { c } else { l }.with_label(&label);
            text.push_str(&render::stability(&rep));
            (serde_json::to_value(&rep), Status::of(rep.verdict))
        }
        Mode::A2r | Mode::Aprime => {
            let (c, _) = stability::check_spans(&f, r)?;
            let (a2r, aprime) = stability::conditions_with(&f, r, c.verdict)?;
            let rep = if mode == Mode::A2r { a2r } else { aprime }.with_label(&label);
            text.push_str(&render::condition(&rep));
            (serde_json::to_value(&rep), Status::of(rep.verdict))
        }
        Mode::Classify => {
            let mut rep = stability::owu_classify(&f, r)?;
            rep.germ = label.clone();
            text.push_str(&render::classification(&rep));
            (
                serde_json::to_value(&rep),
                classification_status(&rep.classification),
            )
        }
        Mode::Ca => {
            let mut rep = stability::ca_evidence(&f, r)?;
            rep.germ = label.clone();
            text.push_str(&render::ca(&rep));
            (serde_json::to_value(&rep), Status::of(rep.ca_evidence))
        }
        Mode::All => {
            let mut rep = stability::full_report(&f, r)?;
            rep.contact.germ = label.clone();
            rep.legendre.germ = label.clone();
            rep.truncated_generation.germ = label.clone();
            rep.generation.germ = label.clone();
            rep.classification.germ = label.clone();
            text.push_str(&render::stability(&rep.contact));
            text.push_str(&render::stability(&rep.legendre));
            text.push_str(&render::condition(&rep.truncated_generation));
            text.push_str(&render::condition(&rep.generation));
            text.push_str(&render::classification(&rep.classification));
            let status = Status::of(rep.contact.verdict)
                .max(Status::of(rep.legendre.verdict))
                .max(Status::of(rep.truncated_generation.verdict))
                .max(Status::of(rep.generation.verdict));
            (serde_json::to_value(&rep), status)
        }
    };
    let result = result.map_err(Failure::malformed)?;
    let envelope = json!({
        "file": path.display().to_string(),
        "germ": label,
        "order": r,
        "order_from": if order.is_some() { "flag" } else if doc.order.is_some() { "document" } else { "default" },
        "r0": r0,
        "cap": f.cap(),
        "result": result,
    });
    Ok((envelope, text, status))
}

fn classification_status(c: &Classification) -> Status {
    match c {
        Classification::Umbrella { .. } => Status::Pass,
        Classification::NotUmbrella => Status::Fail,
        Classification::Inconclusive { .. } => Status::Inconclusive,
    }
}

fn check_batch(
    files: &[PathBuf],
    mode: Mode,
    order: Option<u32>,
    cap: Option<u32>,
    max_r0: u32,
    as_json: bool,
) -> Outcome {
    if files.is_empty() {
        return Err(Failure::malformed("no germ files given"));
    }
    let results = legendre_core::exec::map(files, |p| check_one(p, mode, order, cap, max_r0));
    let mut docs = Vec::new();
    let mut texts = Vec::new();
    let mut status = Status::Pass;
    for (path, r) in files.iter().zip(results) {
        match r {
            Ok((v, t, s)) => {
                docs.push(v);
                texts.push(t);
                status = status.max(s);
            }
            Err(e) if files.len() == 1 => return Err(e),
            Err(e) => {
                docs.push(json!({ "file": path.display().to_string(), "error": e.message }));
                texts.push(format!("{}: error: {}\n", path.display(), e.message));
                status = status.max(e.status);
            }
        }
    }
    let out = if as_json {
        pretty(&if docs.len() == 1 {
            docs.pop().expect("one")
        } else {
            Value::Array(docs)
        })
    } else {
        texts.join("\n")
    };
    Ok((out, status))
}

fn run(cli: &Cli) -> Outcome {
    let as_json = cli.json;
    match &cli.command {
        Command::NormalForm { n, k, cap } => {
            let mut f = owu_normal_form(*n, *k).map_err(Failure::malformed)?;
            if let Some(c) = cap {
                f = f.truncate(Cap::new(*c));
            }
            Ok((
                germ_output(&f, Some(&format!("f_{{{n},{k}}}")), as_json),
                Status::Pass,
            ))
        }
        Command::Complete { file } => {
            let doc = read_doc(file)?;
            let Body::Graph { u, v } = &doc.body else {
                return Err(Failure::malformed("complete expects graph data `u`, `v`"));
            };
            let f = complete_from_uv(&doc.vars, u, v).map_err(Failure::malformed)?;
            Ok((germ_output(&f, doc.name.as_deref(), as_json), Status::Pass))
        }
        Command::Check {
            files,
            mode,
            order,
            cap,
            max_r0,
        } => check_batch(files, *mode, *order, *cap, *max_r0, as_json),
        Command::Classify {
            files,
            order,
            cap,
            max_r0,
        } => check_batch(files, Mode::Classify, *order, *cap, *max_r0, as_json),
        Command::Lift { file } => {
            let doc = read_doc(file)?;
            let g = doc.isotropic_map()?;
            let f = lift_isotropic(&g).map_err(Failure::malformed)?;
            Ok((germ_output(&f, doc.name.as_deref(), as_json), Status::Pass))
        }
        Command::Project { file } => {
            let doc = read_doc(file)?;
            let g = project_isotropic(&doc.integral_map()?).map_err(Failure::malformed)?;
            let out = if as_json {
                pretty(&render::isotropic_json(&g, doc.name.as_deref()))
            } else {
                write_isotropic(&g, doc.name.as_deref())
            };
            Ok((out, Status::Pass))
        }
        Command::Extend { first, second } => {
            let a = read_doc(first)?.integral_map()?;
            let b = read_doc(second)?.integral_map()?;
            let f = stability::extend_unfoldings(&a, &b)?;
            Ok((germ_output(&f, None, as_json), Status::Pass))
        }
        Command::Front {
            file,
            samples,
            range,
            param_grid,
        } => {
            let f = read_doc(file)?.integral_map()?;
            let grids = param_grid
                .iter()
                .map(|g| Grid::parse(g))
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::malformed)?;
            let csv = sample_front(&f, *samples, *range, &grids).map_err(Failure::malformed)?;
            Ok((csv, Status::Pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, status)) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, out.as_bytes()),
                None => std::io::stdout().write_all(out.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(Status::Malformed.code());
            }
            ExitCode::from(status.code())
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.status.code())
        }
    }
}
