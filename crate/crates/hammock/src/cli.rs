//! Command-line front end: flags mirroring the plot option set, the
//! load -> layout -> connectors -> render pipeline, and the ordering
//! utility.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::connectors::{build_connectors, ConnectorError};
use crate::dataset::{self, ColumnKind, DataError, Dataset, Predicate};
use crate::layout::{compute_layout, Annotation, Canvas, LayoutError, PlotSpec, Shape};
use crate::order::{greedy_order, OrderError, OrderMode};
use crate::render::{build_scene, emit_svg, resolve_colors, RenderError};

/// Errors mapped to exit codes: usage = 1, data = 2, render/io = 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Render(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Render(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Render(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.message())
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(format!("dataset: {e}"))
    }
}
impl From<LayoutError> for CliError {
    fn from(e: LayoutError) -> Self {
        CliError::Data(format!("layout: {e}"))
    }
}
impl From<ConnectorError> for CliError {
    fn from(e: ConnectorError) -> Self {
        CliError::Data(format!("connectors: {e}"))
    }
}
impl From<OrderError> for CliError {
    fn from(e: OrderError) -> Self {
        CliError::Data(format!("order: {e}"))
    }
}
impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        CliError::Render(format!("render: {e}"))
    }
}

#[derive(Parser, Debug)]
#[command(name = "hammock", version, about = "Render hammock plots from CSV data")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Render a hammock plot to SVG
    Plot(PlotArgs),
    /// Print a greedy correlation-based variable ordering
    Order(OrderArgs),
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// Input CSV file with a header row
    input: PathBuf,

    /// Variables to plot, left to right (comma separated)
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,

    /// JSON label map: {"col": {"label": "...", "values": {"0": "..."}}}
    #[arg(long)]
    labels: Option<PathBuf>,

    /// Reserve a band at the bottom for missing values
    #[arg(long)]
    missing: bool,

    /// Variable driving the highlight (may be outside --vars)
    #[arg(long)]
    hivar: Option<String>,

    /// Highlight predicate, repeatable: a value or label, 'missing',
    /// '>N', '<N', or 'in:a,b,c'
    #[arg(long = "hival")]
    hivals: Vec<String>,

    /// Colors: default first, then one per --hival (comma separated)
    #[arg(long, value_delimiter = ',')]
    colorlist: Option<Vec<String>>,

    /// Connector width factor relative to the default
    #[arg(long)]
    barwidth: Option<f64>,

    /// Draw connectors of fewer rows as if they had this many
    #[arg(long)]
    minbarfreq: Option<usize>,

    /// Fraction of the vertical space filled by univariate bars
    #[arg(long)]
    uni_fraction: Option<f64>,

    /// Fraction of each inter-axis gap used by univariate regions
    /// (1 = parallel univariate plots, no connectors)
    #[arg(long)]
    space: Option<f64>,

    /// Numeric variables forced onto one shared scale; 'all' expands to
    /// the full --vars list (comma separated)
    #[arg(long, value_delimiter = ',')]
    samescale: Option<Vec<String>>,

    /// Connector shape: rectangle | parallelogram
    #[arg(long)]
    shape: Option<String>,

    /// Suppress axis, tick, and category labels
    #[arg(long)]
    nolabel: bool,

    /// Suppress univariate bars
    #[arg(long)]
    nounibar: bool,

    /// Numeric tick label format, e.g. %8.0g
    #[arg(long)]
    label_format: Option<String>,

    /// Label font size in points
    #[arg(long)]
    label_size: Option<f64>,

    /// Text annotation "Y X TEXT" in plot coordinates (y 0-100, x = axis
    /// number), repeatable
    #[arg(long = "text")]
    texts: Vec<String>,

    /// Dashed horizontal line at this y (0-100), repeatable
    #[arg(long = "yline")]
    ylines: Vec<f64>,

    /// Category order for one variable: "var=code,code,...", bottom
    /// first, repeatable
    #[arg(long = "category-order")]
    category_order: Vec<String>,

    /// Canvas size as WIDTHxHEIGHT
    #[arg(long)]
    canvas: Option<String>,

    /// JSON file holding any of the plot options; flags override it
    #[arg(long)]
    spec: Option<PathBuf>,

    /// Output SVG path (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Extra token treated as missing (on top of "" and "."), repeatable
    #[arg(long = "na")]
    na: Vec<String>,

    /// Columns forced to categorical (comma separated)
    #[arg(long, value_delimiter = ',')]
    categorical: Vec<String>,
}

#[derive(Args, Debug)]
struct OrderArgs {
    /// Input CSV file with a header row
    input: PathBuf,

    /// Candidate variables (comma separated)
    #[arg(long, value_delimiter = ',')]
    vars: Vec<String>,

    /// First variable of the ordering
    #[arg(long)]
    start: String,

    /// Selection rule: max (|corr|) | minsq (squared corr)
    #[arg(long, default_value = "max")]
    mode: String,

    /// Extra token treated as missing, repeatable
    #[arg(long = "na")]
    na: Vec<String>,

    /// Columns forced to categorical (comma separated)
    #[arg(long, value_delimiter = ',')]
    categorical: Vec<String>,
}

/// Syntactically parsed highlight predicate; values are resolved against
/// the highlight column once the dataset is loaded.
#[derive(Debug, Clone, PartialEq)]
pub enum HivalSpec {
    Missing,
    Greater(f64),
    Less(f64),
    /// A number, a category code, or a value label.
    Value(String),
    InSet(Vec<String>),
}

impl HivalSpec {
    pub fn parse(raw: &str) -> Result<HivalSpec, CliError> {
        let malformed = |why: &str| CliError::Usage(format!("malformed --hival '{raw}': {why}"));
        if raw == "missing" {
            return Ok(HivalSpec::Missing);
        }
        if let Some(rest) = raw.strip_prefix('>') {
            let n: f64 = rest.trim().parse().map_err(|_| malformed("expected >NUMBER"))?;
            return Ok(HivalSpec::Greater(n));
        }
        if let Some(rest) = raw.strip_prefix('<') {
            let n: f64 = rest.trim().parse().map_err(|_| malformed("expected <NUMBER"))?;
            return Ok(HivalSpec::Less(n));
        }
        if let Some(rest) = raw.strip_prefix("in:") {
            let items: Vec<String> = rest.split(',').map(|s| s.trim().to_string()).collect();
            if items.is_empty() || items.iter().any(|s| s.is_empty()) {
                return Err(malformed("expected in:a,b,c"));
            }
            return Ok(HivalSpec::InSet(items));
        }
        let value = raw.strip_prefix('=').unwrap_or(raw);
        if value.is_empty() {
            return Err(malformed("empty value"));
        }
        Ok(HivalSpec::Value(value.to_string()))
    }

    fn describe(&self) -> String {
        match self {
            HivalSpec::Missing => "missing".to_string(),
            HivalSpec::Greater(n) => format!(">{n}"),
            HivalSpec::Less(n) => format!("<{n}"),
            HivalSpec::Value(v) => v.clone(),
            HivalSpec::InSet(items) => format!("in:{}", items.join(",")),
        }
    }

    /// Resolve against the highlight column: labels first, then literal
    /// codes or numbers.
    pub fn resolve(&self, ds: &Dataset, hivar: &str) -> Result<Predicate, CliError> {
        let col = ds.column(hivar).map_err(CliError::from)?;
        let lookup_code = |text: &str| -> Result<i64, CliError> {
            if let Some((code, _)) = col.value_labels.iter().find(|(_, l)| l.as_str() == text) {
                return Ok(*code);
            }
            text.parse().map_err(|_| {
                CliError::Data(format!(
                    "dataset: no category of '{hivar}' is labeled or coded '{text}'"
                ))
            })
        };
        match self {
            HivalSpec::Missing => Ok(Predicate::IsMissing),
            HivalSpec::Greater(n) => Ok(Predicate::GreaterThan(*n)),
            HivalSpec::Less(n) => Ok(Predicate::LessThan(*n)),
            HivalSpec::Value(text) => match col.kind {
                ColumnKind::Numeric => {
                    let n: f64 = text.parse().map_err(|_| {
                        CliError::Data(format!(
                            "dataset: '{text}' is not a number, but highlight column '{hivar}' is numeric"
                        ))
                    })?;
                    Ok(Predicate::EqualsNumber(n))
                }
                ColumnKind::Categorical => Ok(Predicate::EqualsCode(lookup_code(text)?)),
            },
            HivalSpec::InSet(items) => match col.kind {
                ColumnKind::Categorical => {
                    let codes = items
                        .iter()
                        .map(|t| lookup_code(t))
                        .collect::<Result<Vec<i64>, CliError>>()?;
                    Ok(Predicate::InCodes(codes))
                }
                ColumnKind::Numeric => Err(CliError::Data(format!(
                    "dataset: in-set highlighting needs a categorical column, '{hivar}' is numeric"
                ))),
            },
        }
    }
}

/// Fully parsed plot invocation with highlight values still in textual
/// form (they resolve against the loaded dataset).
#[derive(Debug, Clone)]
pub struct PlotInvocation {
    pub input: PathBuf,
    pub labels: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub missing_tokens: BTreeSet<String>,
    pub type_hints: BTreeMap<String, ColumnKind>,
    pub varlist: Vec<String>,
    pub missing: bool,
    pub hivar: Option<String>,
    pub hival_specs: Vec<HivalSpec>,
    pub samescale: Vec<String>,
    pub spec_template: PlotSpec,
}

#[derive(Debug, Clone)]
pub struct OrderInvocation {
    pub input: PathBuf,
    pub missing_tokens: BTreeSet<String>,
    pub type_hints: BTreeMap<String, ColumnKind>,
    pub vars: Vec<String>,
    pub start: String,
    pub mode: OrderMode,
}

#[derive(Debug, Clone)]
pub enum Invocation {
    Plot(Box<PlotInvocation>),
    Order(OrderInvocation),
}

#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    vars: Option<Vec<String>>,
    missing: Option<bool>,
    hivar: Option<String>,
    hivals: Option<Vec<String>>,
    colorlist: Option<Vec<String>>,
    barwidth: Option<f64>,
    minbarfreq: Option<usize>,
    uni_fraction: Option<f64>,
    space: Option<f64>,
    samescale: Option<Vec<String>>,
    shape: Option<String>,
    nolabel: Option<bool>,
    nounibar: Option<bool>,
    label_format: Option<String>,
    label_size: Option<f64>,
    text: Option<Vec<String>>,
    ylines: Option<Vec<f64>>,
    category_order: Option<BTreeMap<String, Vec<i64>>>,
    canvas: Option<String>,
}

fn parse_annotation(raw: &str) -> Result<Annotation, CliError> {
    let malformed = || CliError::Usage(format!("malformed --text '{raw}': expected \"Y X TEXT\""));
    let mut parts = raw.splitn(3, char::is_whitespace);
    let y: f64 = parts.next().ok_or_else(malformed)?.parse().map_err(|_| malformed())?;
    let x: f64 = parts.next().ok_or_else(malformed)?.parse().map_err(|_| malformed())?;
    let text = parts.next().ok_or_else(malformed)?.trim().to_string();
    if text.is_empty() {
        return Err(malformed());
    }
    Ok(Annotation { y, x, text })
}

fn parse_canvas(raw: &str) -> Result<Canvas, CliError> {
    let malformed = || CliError::Usage(format!("malformed --canvas '{raw}': expected WIDTHxHEIGHT"));
    let (w, h) = raw.split_once('x').ok_or_else(malformed)?;
    let width: f64 = w.trim().parse().map_err(|_| malformed())?;
    let height: f64 = h.trim().parse().map_err(|_| malformed())?;
    if width <= 0.0 || height <= 0.0 {
        return Err(malformed());
    }
    Ok(Canvas { width, height })
}

fn parse_category_order(raw: &str) -> Result<(String, Vec<i64>), CliError> {
    let malformed =
        || CliError::Usage(format!("malformed --category-order '{raw}': expected var=c1,c2,..."));
    let (var, codes) = raw.split_once('=').ok_or_else(malformed)?;
    let codes = codes
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<Result<Vec<i64>, _>>()
        .map_err(|_| malformed())?;
    if var.trim().is_empty() || codes.is_empty() {
        return Err(malformed());
    }
    Ok((var.trim().to_string(), codes))
}

fn resolve_plot(args: PlotArgs) -> Result<PlotInvocation, CliError> {
    let file: SpecFile = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Data(format!("dataset: cannot read spec file {}: {e}", path.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("bad spec file {}: {e}", path.display())))?
        }
        None => SpecFile::default(),
    };

    let varlist = if args.vars.is_empty() {
        file.vars.unwrap_or_default()
    } else {
        args.vars
    };
    if varlist.is_empty() {
        return Err(CliError::Usage(
            "plot needs at least one variable (--vars or the spec file)".to_string(),
        ));
    }
    let space = args.space.or(file.space).unwrap_or(0.2);
    if varlist.len() < 2 && space < 1.0 {
        return Err(CliError::Usage(
            "plot needs at least two variables unless --space 1".to_string(),
        ));
    }

    let hival_raw = if args.hivals.is_empty() {
        file.hivals.unwrap_or_default()
    } else {
        args.hivals
    };
    let hival_specs = hival_raw
        .iter()
        .map(|raw| HivalSpec::parse(raw))
        .collect::<Result<Vec<_>, _>>()?;

    let shape = match args.shape.or(file.shape) {
        Some(raw) => raw.parse::<Shape>().map_err(CliError::Usage)?,
        None => Shape::default(),
    };
    let texts = if args.texts.is_empty() {
        file.text.unwrap_or_default()
    } else {
        args.texts
    };
    let annotations = texts
        .iter()
        .map(|raw| parse_annotation(raw))
        .collect::<Result<Vec<_>, _>>()?;
    let canvas = match args.canvas.or(file.canvas) {
        Some(raw) => parse_canvas(&raw)?,
        None => Canvas::default(),
    };

    let mut category_order = file.category_order.unwrap_or_default();
    for raw in &args.category_order {
        let (var, codes) = parse_category_order(raw)?;
        category_order.insert(var, codes);
    }

    let defaults = PlotSpec::default();
    let spec_template = PlotSpec {
        varlist: varlist.clone(),
        missing: args.missing || file.missing.unwrap_or(false),
        hivar: args.hivar.clone().or(file.hivar.clone()),
        hivals: Vec::new(), // resolved at run time
        colorlist: args
            .colorlist
            .or(file.colorlist)
            .unwrap_or(defaults.colorlist),
        barwidth: args.barwidth.or(file.barwidth).unwrap_or(defaults.barwidth),
        minbarfreq: args
            .minbarfreq
            .or(file.minbarfreq)
            .unwrap_or(defaults.minbarfreq),
        uni_fraction: args
            .uni_fraction
            .or(file.uni_fraction)
            .unwrap_or(defaults.uni_fraction),
        space,
        samescale: Vec::new(), // expanded at run time ('all' shorthand)
        shape,
        nolabel: args.nolabel || file.nolabel.unwrap_or(false),
        nounibar: args.nounibar || file.nounibar.unwrap_or(false),
        label_format: args
            .label_format
            .or(file.label_format)
            .unwrap_or(defaults.label_format),
        label_size: args
            .label_size
            .or(file.label_size)
            .unwrap_or(defaults.label_size),
        annotations,
        ylines: if args.ylines.is_empty() {
            file.ylines.unwrap_or_default()
        } else {
            args.ylines
        },
        category_order,
        canvas,
    };

    let samescale = match args.samescale.or(file.samescale) {
        None => Vec::new(),
        Some(list) if list.len() == 1 && list[0] == "all" => varlist.clone(),
        Some(list) => list,
    };

    let mut missing_tokens = dataset::default_missing_tokens();
    missing_tokens.extend(args.na.iter().cloned());
    let type_hints = args
        .categorical
        .iter()
        .map(|name| (name.clone(), ColumnKind::Categorical))
        .collect();

    Ok(PlotInvocation {
        input: args.input,
        labels: args.labels,
        output: args.output,
        missing_tokens,
        type_hints,
        varlist,
        missing: spec_template.missing,
        hivar: spec_template.hivar.clone(),
        hival_specs,
        samescale,
        spec_template,
    })
}

fn resolve_order(args: OrderArgs) -> Result<OrderInvocation, CliError> {
    if args.vars.len() < 2 {
        return Err(CliError::Usage(
            "order needs at least two variables in --vars".to_string(),
        ));
    }
    let mode = args.mode.parse::<OrderMode>().map_err(CliError::Usage)?;
    let mut missing_tokens = dataset::default_missing_tokens();
    missing_tokens.extend(args.na.iter().cloned());
    let type_hints = args
        .categorical
        .iter()
        .map(|name| (name.clone(), ColumnKind::Categorical))
        .collect();
    Ok(OrderInvocation {
        input: args.input,
        missing_tokens,
        type_hints,
        vars: args.vars,
        start: args.start,
        mode,
    })
}

/// Parse an argv (including the program name). Clap usage errors, malformed
/// predicates, and malformed option syntax map to exit code 1.
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        CliCommand::Plot(args) => Ok(Invocation::Plot(Box::new(resolve_plot(args)?))),
        CliCommand::Order(args) => Ok(Invocation::Order(resolve_order(args)?)),
    }
}

/// Run a parsed invocation, writing the SVG (or ordering) and warnings.
/// Returns the rendered SVG bytes for plot invocations.
pub fn run(inv: &Invocation) -> Result<Option<Vec<u8>>, CliError> {
    match inv {
        Invocation::Plot(plot) => run_plot(plot).map(Some),
        Invocation::Order(order) => {
            run_order(order)?;
            Ok(None)
        }
    }
}

fn run_plot(inv: &PlotInvocation) -> Result<Vec<u8>, CliError> {
    if inv.spec_template.nounibar && inv.spec_template.space >= 1.0 {
        eprintln!("warning: nounibar with space=1 leaves nothing to draw at the axes");
    }

    let ds = dataset::load_csv(&inv.input, &inv.type_hints, &inv.missing_tokens)?;
    let ds = match &inv.labels {
        Some(path) => dataset::apply_label_map(&ds, path)?,
        None => ds,
    };

    let mut spec = inv.spec_template.clone();
    spec.samescale = inv.samescale.clone();
    if let Some(hivar) = &inv.hivar {
        spec.hivals = inv
            .hival_specs
            .iter()
            .map(|h| h.resolve(&ds, hivar))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, pred) in spec.hivals.iter().enumerate() {
            let hits = dataset::select_rows(&ds, hivar, pred)?;
            if hits.is_empty() {
                eprintln!(
                    "warning: --hival {} matches no rows of '{hivar}'",
                    inv.hival_specs[i].describe()
                );
            }
        }
    } else if !inv.hival_specs.is_empty() {
        return Err(CliError::Usage(
            "--hival given without --hivar".to_string(),
        ));
    }

    let layout = compute_layout(&ds, &spec)?;
    let connectors = build_connectors(&ds, &spec, &layout)?;
    let mut colors = resolve_colors(&spec.colorlist)?;
    if std::env::var_os("HAMMOCK_NO_COLOR").is_some() {
        for c in &mut colors {
            c.alpha = 1.0;
        }
    }
    let scene = build_scene(&ds, &layout, &connectors, &spec, &colors)?;
    let svg = emit_svg(&scene);

    match &inv.output {
        Some(path) => std::fs::write(path, &svg).map_err(|e| {
            CliError::Render(format!("render: cannot write {}: {e}", path.display()))
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&svg)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Render(format!("render: cannot write to stdout: {e}")))?;
        }
    }
    Ok(svg)
}

fn run_order(inv: &OrderInvocation) -> Result<(), CliError> {
    let ds = dataset::load_csv(&inv.input, &inv.type_hints, &inv.missing_tokens)?;
    let ordered = greedy_order(&ds, &inv.vars, &inv.start, inv.mode)?;
    println!("{}", ordered.join(" "));
    Ok(())
}

/// Binary entry point: returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse_from(std::env::args_os()) {
        Ok(cli) => cli,
        Err(e)
            if e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion =>
        {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprint!("{e}");
            return 1;
        }
    };
    let inv = match cli.command {
        CliCommand::Plot(args) => resolve_plot(args).map(|p| Invocation::Plot(Box::new(p))),
        CliCommand::Order(args) => resolve_order(args).map(Invocation::Order),
    };
    let result = inv.and_then(|inv| run(&inv));
    match result {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> String {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("fixtures")
            .join(name)
            .display()
            .to_string()
    }

    fn argv(parts: &[&str]) -> Vec<String> {
        std::iter::once("hammock")
            .chain(parts.iter().copied())
            .map(|s| s.to_string())
            .collect()
    }

    #[test]
    fn parses_figure_two_invocation() {
        let inv = parse_args(argv(&[
            "plot",
            &fixture("auto.csv"),
            "--vars",
            "mpg,weight,foreign,rep78,headroom,price",
            "--missing",
            "--hivar",
            "foreign",
            "--hival",
            "=1",
            "--label-format",
            "%8.0g",
            "--yline",
            "10",
        ]))
        .unwrap();
        let Invocation::Plot(plot) = inv else {
            panic!("expected plot")
        };
        assert_eq!(plot.varlist.len(), 6);
        assert!(plot.missing);
        assert_eq!(plot.hivar.as_deref(), Some("foreign"));
        assert_eq!(plot.hival_specs, vec![HivalSpec::Value("1".to_string())]);
        assert_eq!(plot.spec_template.ylines, vec![10.0]);
        assert_eq!(plot.spec_template.label_format, "%8.0g");
    }

    #[test]
    fn parses_tracing_invocation() {
        let inv = parse_args(argv(&[
            "plot",
            &fixture("stages.csv"),
            "--vars",
            "s16,s17,s18",
            "--missing",
            "--nolabel",
            "--colorlist",
            "gs10,red,blue,yellow",
            "--barwidth",
            ".2",
            "--minbarfreq",
            "5",
            "--uni-fraction",
            ".15",
            "--text",
            "97 1 slow",
            "--text",
            "10 1 fast",
            "--text",
            "3 1 missing",
            "--hivar",
            "rider",
            "--hival",
            "Pog",
        ]))
        .unwrap();
        let Invocation::Plot(plot) = inv else {
            panic!("expected plot")
        };
        assert_eq!(plot.spec_template.barwidth, 0.2);
        assert_eq!(plot.spec_template.minbarfreq, 5);
        assert_eq!(plot.spec_template.uni_fraction, 0.15);
        assert_eq!(plot.spec_template.annotations.len(), 3);
        assert_eq!(plot.spec_template.annotations[2].text, "missing");
        assert_eq!(plot.hival_specs, vec![HivalSpec::Value("Pog".to_string())]);
    }

    #[test]
    fn parses_parallel_univariate_invocation() {
        let inv = parse_args(argv(&[
            "plot",
            &fixture("stages.csv"),
            "--vars",
            "s16,s17,s18",
            "--samescale",
            "all",
            "--space",
            "1",
            "--nolabel",
        ]))
        .unwrap();
        let Invocation::Plot(plot) = inv else {
            panic!("expected plot")
        };
        assert_eq!(plot.spec_template.space, 1.0);
        assert_eq!(plot.samescale, plot.varlist);
    }

    #[test]
    fn hival_grammar() {
        assert_eq!(HivalSpec::parse("missing").unwrap(), HivalSpec::Missing);
        assert_eq!(HivalSpec::parse(">27").unwrap(), HivalSpec::Greater(27.0));
        assert_eq!(HivalSpec::parse("<3.5").unwrap(), HivalSpec::Less(3.5));
        assert_eq!(
            HivalSpec::parse("=1").unwrap(),
            HivalSpec::Value("1".to_string())
        );
        assert_eq!(
            HivalSpec::parse("Martinez").unwrap(),
            HivalSpec::Value("Martinez".to_string())
        );
        assert_eq!(
            HivalSpec::parse("in:1,4,5").unwrap(),
            HivalSpec::InSet(vec!["1".into(), "4".into(), "5".into()])
        );
        assert!(matches!(
            HivalSpec::parse(">abc"),
            Err(CliError::Usage(msg)) if msg.contains(">abc")
        ));
        assert!(HivalSpec::parse("=").is_err());
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let err = parse_args(argv(&["plot", "x.csv", "--vars", "a,b", "--frobnicate"]));
        assert!(matches!(err, Err(CliError::Usage(_))));
    }

    #[test]
    fn single_variable_needs_space_one() {
        let err = parse_args(argv(&["plot", "x.csv", "--vars", "a"]));
        assert!(matches!(err, Err(CliError::Usage(_))));
        let ok = parse_args(argv(&["plot", "x.csv", "--vars", "a", "--space", "1"]));
        assert!(ok.is_ok());
    }

    #[test]
    fn order_subcommand_parses() {
        let inv = parse_args(argv(&[
            "order",
            &fixture("auto.csv"),
            "--vars",
            "mpg,weight,price",
            "--start",
            "mpg",
            "--mode",
            "max",
        ]))
        .unwrap();
        let Invocation::Order(order) = inv else {
            panic!("expected order")
        };
        assert_eq!(order.mode, OrderMode::MaxCorr);
        assert_eq!(order.start, "mpg");
    }

    #[test]
    fn bad_mode_is_usage_error() {
        let err = parse_args(argv(&[
            "order",
            "x.csv",
            "--vars",
            "a,b",
            "--start",
            "a",
            "--mode",
            "bogus",
        ]));
        assert!(matches!(err, Err(CliError::Usage(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), 1);
        assert_eq!(CliError::Data(String::new()).exit_code(), 2);
        assert_eq!(CliError::Render(String::new()).exit_code(), 3);
    }

    #[test]
    fn hival_resolution_prefers_labels() {
        let ds = dataset::load_csv(
            std::path::Path::new(&fixture("stages.csv")),
            &BTreeMap::new(),
            &dataset::default_missing_tokens(),
        )
        .unwrap();
        let pred = HivalSpec::Value("Pog".to_string())
            .resolve(&ds, "rider")
            .unwrap();
        assert_eq!(pred, Predicate::EqualsCode(0));
        let pred = HivalSpec::Value("27".to_string())
            .resolve(&ds, "s16")
            .unwrap();
        assert_eq!(pred, Predicate::EqualsNumber(27.0));
        let err = HivalSpec::Value("Nobody".to_string()).resolve(&ds, "rider");
        assert!(matches!(err, Err(CliError::Data(msg)) if msg.contains("Nobody")));
    }

    #[test]
    fn annotation_and_canvas_parsing() {
        let a = parse_annotation("97 1 slow rider").unwrap();
        assert_eq!((a.y, a.x), (97.0, 1.0));
        assert_eq!(a.text, "slow rider");
        assert!(parse_annotation("97 slow").is_err());
        let c = parse_canvas("800x400").unwrap();
        assert_eq!((c.width, c.height), (800.0, 400.0));
        assert!(parse_canvas("800").is_err());
        assert!(parse_canvas("-5x100").is_err());
    }

    #[test]
    fn category_order_parsing() {
        let (var, codes) = parse_category_order("foreign=1,0").unwrap();
        assert_eq!(var, "foreign");
        assert_eq!(codes, vec![1, 0]);
        assert!(parse_category_order("foreign").is_err());
        assert!(parse_category_order("foreign=a,b").is_err());
    }
}
