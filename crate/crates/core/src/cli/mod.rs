//! Command-line interface.
//!
//! Exit codes: 0 success, 1 a valid negative answer, 2 usage, parse, type or
//! precondition errors, 3 budget exceeded.

pub mod render;
pub mod workspace;

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::clones::{
    clone_generate, compose_functions, equality_pattern_relation, general_superposition, inv, pol,
    superposition_decomposition, LabelSet,
};
use crate::error::{Error, Result};
use crate::galois::{
    constraints_satisfied_by, functions_satisfying, galois_roundtrip_report, local_closure_constraints,
    separating_constraint, separating_function, ConstraintSet, FunctionSeparation, RoundtripOutcome,
};
use crate::limits::{Limits, ENV_JOBS};
use crate::minors::{
    canonical_constraints, compose_schemes, intersect_consequents, is_conjunctive_minor, minor_classification, relax,
    scheme_apply, tight_minor_constraint, tight_minor_relations, MinorScheme, SkolemMap,
};
use crate::model::{
    columns_in_relation, decode_point, encode_point, Constraint, FiniteDomain, FiniteFunction, IndexMap, Matrix,
    Relation,
};
use crate::oracle;
use crate::partials::{
    all_partial_functions, extension_gap, family_closure_harness, injective_partial_functions, PartialFamily,
};
use crate::satisfaction::{
    apply_to_matrix, find_violation, image_of_relation, partial_satisfies, preserves, PartialFunction,
};
use crate::substitution::{local_closure_functions, substitute, svs_closure, FunctionClass};
use render::*;
pub use workspace::Workspace;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "relcon",
    version,
    about = "Relational constraints, minors and clones over finite sets"
)]
pub struct Cli {
    /// Workspace file with domain, relation, function, ... declarations (repeatable)
    #[arg(short = 'w', long = "workspace", global = true)]
    workspace: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Override the table-size budget (bits)
    #[arg(long, global = true)]
    max_table_bits: Option<u32>,
    /// Override the per-search candidate budget
    #[arg(long, global = true)]
    max_candidates: Option<u64>,
    /// Worker threads for parallel enumerations
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank of a tuple in lexicographic order
    EncodePoint(EncodePointArgs),
    /// Are all columns of a matrix in a relation
    ColumnsIn(ColumnsInArgs),
    /// Apply a function to the rows of a matrix
    ApplyMatrix(ApplyMatrixArgs),
    /// Does a function satisfy a constraint
    Satisfies(SatisfiesArgs),
    /// Does a partial function satisfy a constraint
    PartialSatisfies(PartialSatisfiesArgs),
    /// Does an operation preserve a relation
    Preserves(PreservesArgs),
    /// The image fR of a relation
    Image(ImageArgs),
    /// Evaluate one map of a scheme at a tuple and indeterminate assignment
    SchemeApply(SchemeApplyArgs),
    /// Tight conjunctive minor of a relation or constraint family via a scheme
    Minor(MinorArgs),
    /// Compare a relation with the tight minor of a family
    ClassifyMinor(ClassifyArgs),
    /// Is a constraint a conjunctive minor of a family via a scheme
    IsMinor(IsMinorArgs),
    /// Composite scheme H(H_1, ..., H_k)
    ComposeSchemes(ComposeSchemesArgs),
    /// Simple variable substitution g(a) = f(a ∘ l)
    Substitute(SubstituteArgs),
    /// Composition f(g_1, ..., g_n)
    Compose(ComposeArgs),
    /// Closure of a class under simple variable substitutions
    SvsClose(BoundedClassArgs),
    /// Literal local closure of a function class or constraint set
    LocalClosure(LocalClosureArgs),
    /// Clone generated by a set of operations
    Clone(BoundedClassArgs),
    /// Operations preserving every given relation
    Pol(PolArgs),
    /// Relations preserved by every given operation
    Inv(BoundedClassArgs),
    /// Constraints satisfied by every member of a class
    Characterize(BoundedClassArgs),
    /// Functions satisfying every member of a constraint set
    Define(ConstraintSetArgs),
    /// General superposition of a relation family
    Superpose(SuperposeArgs),
    /// Split a superposition into a tight minor and an equality pattern
    DecomposeSuperposition(SuperposeArgs),
    /// Tuples constant on the positions sharing a label
    EqualityPattern(PatternArgs),
    /// A constraint satisfied by a class but not by a given function
    SeparateConstraint(SeparateConstraintArgs),
    /// A function satisfying a constraint set but not a given constraint
    SeparateFunction(SeparateFunctionArgs),
    /// Separate every non-member of a substitution-closed class
    Roundtrip(ClassArgs),
    /// Restrict the antecedent and extend the consequent of a constraint
    Relax(RelaxArgs),
    /// Intersect the consequents of constraints sharing an antecedent
    Intersect(IntersectArgs),
    /// The equality, empty and trivial constraints
    Canonical(CanonicalArgs),
    /// Check that a family of partial functions is extensible
    Extensible(FamilyArgs),
    /// Closure properties of the constraints satisfied by an extensible family
    ClosureHarness(HarnessArgs),
    /// Naive reference implementations
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Image by enumerating every matrix
    Image(ImageArgs),
    /// Tight minor by enumerating every tuple and Skolem map
    Minor(MinorArgs),
    /// Superposition by enumerating every label map
    Superpose(SuperposeArgs),
}

#[derive(Args, Debug)]
struct EncodePointArgs {
    #[arg(long)]
    domain: String,
    /// Tuple, e.g. "0 1 2"
    #[arg(long, conflicts_with = "index", required_unless_present = "index")]
    tuple: Option<String>,
    /// Decode this index instead
    #[arg(long, requires = "arity")]
    index: Option<usize>,
    #[arg(long)]
    arity: Option<usize>,
}

#[derive(Args, Debug)]
struct ColumnsInArgs {
    #[arg(long)]
    relation: String,
    /// Columns separated by `;`, e.g. "0 1; 1 0"
    #[arg(long)]
    columns: String,
}

#[derive(Args, Debug)]
struct ApplyMatrixArgs {
    #[arg(long = "fn")]
    function: String,
    /// Columns separated by `;`, one per argument
    #[arg(long)]
    columns: String,
}

#[derive(Args, Debug)]
struct PartialSatisfiesArgs {
    /// Graph as `tuple:value` pairs separated by `;`, e.g. "0:1; 1:0"
    #[arg(long)]
    graph: String,
    #[arg(long)]
    arity: usize,
    #[arg(long)]
    domain: String,
    #[arg(long)]
    codomain: Option<String>,
    #[arg(long)]
    constraint: String,
}

#[derive(Args, Debug)]
struct SchemeApplyArgs {
    #[arg(long)]
    scheme: String,
    /// Index of the map within the scheme
    #[arg(long, default_value_t = 0)]
    map: usize,
    #[arg(long)]
    tuple: String,
    /// Indeterminate values, e.g. "v=1 w=0"
    #[arg(long, default_value = "")]
    assign: String,
}

#[derive(Args, Debug)]
struct SatisfiesArgs {
    #[arg(long = "fn")]
    function: String,
    /// Constraint name or `(R,S)` with relation names
    #[arg(long)]
    constraint: String,
}

#[derive(Args, Debug)]
struct PreservesArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    relation: String,
}

#[derive(Args, Debug)]
struct ImageArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long)]
    relation: String,
}

#[derive(Args, Debug)]
struct MinorArgs {
    /// Scheme name or file
    #[arg(long)]
    scheme: String,
    #[arg(long, num_args = 1.., conflicts_with = "constraints", required_unless_present = "constraints")]
    relations: Vec<String>,
    #[arg(long, num_args = 1..)]
    constraints: Vec<String>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    relation: String,
    #[arg(long)]
    scheme: String,
    #[arg(long, num_args = 1.., required = true)]
    relations: Vec<String>,
}

#[derive(Args, Debug)]
struct IsMinorArgs {
    #[arg(long)]
    constraint: String,
    #[arg(long)]
    scheme: String,
    #[arg(long, num_args = 1.., required = true)]
    constraints: Vec<String>,
}

#[derive(Args, Debug)]
struct ComposeSchemesArgs {
    #[arg(long)]
    scheme: String,
    #[arg(long, num_args = 1.., required = true)]
    inner: Vec<String>,
}

#[derive(Args, Debug)]
struct SubstituteArgs {
    #[arg(long = "fn")]
    function: String,
    /// Image sequence of l, e.g. "0 0"
    #[arg(long)]
    map: String,
    #[arg(long)]
    target: usize,
}

#[derive(Args, Debug)]
struct ComposeArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long, num_args = 1.., required = true)]
    inner: Vec<String>,
}

#[derive(Args, Debug)]
struct ClassArgs {
    /// Class name
    #[arg(long, conflicts_with = "fns")]
    class: Option<String>,
    /// Member function names
    #[arg(long, num_args = 0..)]
    fns: Vec<String>,
    /// Input domain, for an empty list of functions
    #[arg(long)]
    domain: Option<String>,
    /// Output domain, for an empty list of functions (defaults to the input)
    #[arg(long)]
    codomain: Option<String>,
    /// Arity bound of the class (defaults to the largest member arity)
    #[arg(long)]
    class_bound: Option<usize>,
}

#[derive(Args, Debug)]
struct BoundedClassArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long)]
    bound: usize,
}

#[derive(Args, Debug)]
struct ConstraintSetArgs {
    #[arg(long, num_args = 0..)]
    constraints: Vec<String>,
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    codomain: Option<String>,
    #[arg(long)]
    bound: usize,
}

#[derive(Args, Debug)]
struct LocalClosureArgs {
    #[command(flatten)]
    class: ClassArgs,
    /// Treat the input as a constraint set with this arity bound
    #[arg(long, num_args = 0.., requires = "set_bound")]
    constraints: Option<Vec<String>>,
    #[arg(long)]
    set_bound: Option<usize>,
}

#[derive(Args, Debug)]
struct PolArgs {
    #[arg(long, num_args = 0..)]
    relations: Vec<String>,
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    bound: usize,
}

#[derive(Args, Debug)]
struct SuperposeArgs {
    #[arg(long, num_args = 1.., required = true)]
    relations: Vec<String>,
    /// Target label tuple, e.g. "p p"
    #[arg(long)]
    target: String,
    /// Label tuple of one family member (repeat in family order)
    #[arg(long, required = true)]
    family: Vec<String>,
    /// Label set name
    #[arg(long)]
    labels: String,
}

#[derive(Args, Debug)]
struct PatternArgs {
    #[arg(long)]
    target: String,
    #[arg(long)]
    domain: String,
}

#[derive(Args, Debug)]
struct SeparateConstraintArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long = "fn")]
    function: String,
}

#[derive(Args, Debug)]
struct SeparateFunctionArgs {
    #[command(flatten)]
    set: ConstraintSetArgs,
    /// Use the constraints satisfied by this class instead of --constraints
    #[arg(long)]
    from_class: Option<String>,
    #[arg(long)]
    constraint: String,
}

#[derive(Args, Debug)]
struct RelaxArgs {
    #[arg(long)]
    constraint: String,
    #[arg(long)]
    antecedent: String,
    #[arg(long)]
    consequent: String,
}

#[derive(Args, Debug)]
struct IntersectArgs {
    #[arg(long, num_args = 1.., required = true)]
    constraints: Vec<String>,
}

#[derive(Args, Debug)]
struct CanonicalArgs {
    #[arg(long)]
    domain: String,
    #[arg(long)]
    codomain: Option<String>,
    #[arg(long)]
    arity: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    All,
    Injective,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    #[arg(long, num_args = 1.., required = true)]
    arities: Vec<usize>,
    #[arg(long)]
    domain: String,
    #[arg(long)]
    codomain: Option<String>,
}

#[derive(Args, Debug)]
struct HarnessArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 2)]
    bound: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

struct Reply {
    text: String,
    json: Value,
    code: i32,
}

impl Reply {
    fn ok(text: String, json: Value) -> Self {
        Reply {
            text,
            json,
            code: EXIT_OK,
        }
    }

    fn answer(yes: bool, json: Value) -> Self {
        Reply {
            text: format!("{yes}\n"),
            json,
            code: if yes { EXIT_OK } else { EXIT_NO },
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_budget() {
        EXIT_BUDGET
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    stdout: String::new(),
                    stderr: rendered,
                    code: EXIT_USAGE,
                }
            } else {
                Outcome {
                    stdout: rendered,
                    stderr: String::new(),
                    code: EXIT_OK,
                }
            };
        }
    };
    match execute(&cli) {
        Ok(reply) => Outcome {
            stdout: match cli.format {
                Format::Text => reply.text,
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&reply.json).unwrap()),
            },
            stderr: String::new(),
            code: reply.code,
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: exit_code(&e),
        },
    }
}

fn execute(cli: &Cli) -> Result<Reply> {
    let mut limits = Limits::from_env()?;
    if let Some(bits) = cli.max_table_bits {
        limits.max_table_bits = bits;
    }
    if let Some(c) = cli.max_candidates {
        limits.max_candidates = c;
    }
    let mut ws = Workspace::new();
    for path in &cli.workspace {
        let text = read(path)?;
        ws.extend_from_text(&text)
            .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    }
    let jobs = match cli.jobs {
        Some(j) => Some(j),
        None => match env::var(ENV_JOBS) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| Error::Invalid(format!("{ENV_JOBS}={v} is not an integer")))?,
            ),
            Err(_) => None,
        },
    };
    let ctx = Ctx { ws, limits };
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Invalid(format!("cannot start {n} worker threads: {e}")))?;
            pool.install(|| ctx.dispatch(&cli.command))
        }
        None => ctx.dispatch(&cli.command),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn labels_of(s: &str) -> Vec<String> {
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

fn elements_of(s: &str, what: &str) -> Result<Vec<usize>> {
    labels_of(s)
        .iter()
        .map(|x| {
            x.parse::<usize>()
                .map_err(|_| Error::Invalid(format!("bad element `{x}` in {what}")))
        })
        .collect()
}

fn columns_of(s: &str) -> Result<Vec<Vec<usize>>> {
    s.split(';').map(|c| elements_of(c, "--columns")).collect()
}

fn unknown(kind: &'static str, name: &str) -> Error {
    Error::Unknown {
        kind,
        name: name.to_string(),
    }
}

struct Ctx {
    ws: Workspace,
    limits: Limits,
}

impl Ctx {
    fn domain(&self, name: &str) -> Result<&FiniteDomain> {
        self.ws.domains.get(name).ok_or_else(|| unknown("domain", name))
    }

    fn relation(&self, name: &str) -> Result<&Relation> {
        self.ws.relations.get(name).ok_or_else(|| unknown("relation", name))
    }

    fn relations(&self, names: &[String]) -> Result<Vec<Relation>> {
        names.iter().map(|n| self.relation(n).cloned()).collect()
    }

    fn function(&self, name: &str) -> Result<&FiniteFunction> {
        self.ws.functions.get(name).ok_or_else(|| unknown("function", name))
    }

    /// A constraint binding name, or `(R,S)` with relation names.
    fn constraint(&self, spec: &str) -> Result<Constraint> {
        let s = spec.trim();
        if let Some(inner) = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::Invalid(format!("expected `(R,S)`, found `{spec}`")));
            }
            return Constraint::new(self.relation(parts[0])?.clone(), self.relation(parts[1])?.clone());
        }
        self.ws
            .constraints
            .get(s)
            .map(|b| b.constraint.clone())
            .ok_or_else(|| unknown("constraint", s))
    }

    fn constraints(&self, specs: &[String]) -> Result<Vec<Constraint>> {
        specs.iter().map(|s| self.constraint(s)).collect()
    }

    /// A scheme binding name, or a file holding exactly one scheme.
    fn scheme(&self, spec: &str) -> Result<MinorScheme> {
        if let Some(h) = self.ws.schemes.get(spec) {
            return Ok(h.clone());
        }
        let path = Path::new(spec);
        if !path.exists() {
            return Err(unknown("scheme", spec));
        }
        let file = Workspace::parse(&read(path)?).map_err(|e| Error::Invalid(format!("{spec}: {e}")))?;
        let mut schemes = file.schemes.into_values();
        match (schemes.next(), schemes.next()) {
            (Some(h), None) => Ok(h),
            _ => Err(Error::Invalid(format!("{spec} must declare exactly one scheme"))),
        }
    }

    fn label_set(&self, name: &str) -> Result<&LabelSet> {
        self.ws.labels.get(name).ok_or_else(|| unknown("label set", name))
    }

    fn class(&self, args: &ClassArgs) -> Result<FunctionClass> {
        if let Some(name) = &args.class {
            let k = self.ws.classes.get(name).ok_or_else(|| unknown("class", name))?;
            return match args.class_bound {
                Some(b) => k.class.clone().with_bound(b),
                None => Ok(k.class.clone()),
            };
        }
        let fs: Vec<FiniteFunction> = args
            .fns
            .iter()
            .map(|n| self.function(n).cloned())
            .collect::<Result<_>>()?;
        let (a, b) = match (fs.first(), &args.domain) {
            (_, Some(d)) => {
                let a = self.domain(d)?.clone();
                let b = match &args.codomain {
                    Some(c) => self.domain(c)?.clone(),
                    None => a.clone(),
                };
                (a, b)
            }
            (Some(f), None) => (f.input().clone(), f.output().clone()),
            (None, None) => {
                return Err(Error::Invalid(
                    "give --class, --fns, or --domain for an empty class".into(),
                ))
            }
        };
        let bound = args
            .class_bound
            .unwrap_or_else(|| fs.iter().map(FiniteFunction::arity).max().unwrap_or(1));
        FunctionClass::new(&a, &b, bound, fs)
    }

    fn constraint_set(&self, args: &ConstraintSetArgs) -> Result<ConstraintSet> {
        let cs = self.constraints(&args.constraints)?;
        let (a, b) = match (cs.first(), &args.domain) {
            (_, Some(d)) => {
                let a = self.domain(d)?.clone();
                let b = match &args.codomain {
                    Some(c) => self.domain(c)?.clone(),
                    None => a.clone(),
                };
                (a, b)
            }
            (Some(c), None) => (c.source().clone(), c.target().clone()),
            (None, None) => {
                return Err(Error::Invalid(
                    "give --constraints, or --domain for an empty constraint set".into(),
                ))
            }
        };
        ConstraintSet::new(&a, &b, args.bound, cs)
    }

    fn family(&self, args: &FamilyArgs) -> Result<PartialFamily> {
        let a = self.domain(&args.domain)?;
        let b = match &args.codomain {
            Some(c) => self.domain(c)?,
            None => a,
        };
        match args.family {
            FamilyKind::All => all_partial_functions(&args.arities, a, b, &self.limits),
            FamilyKind::Injective => injective_partial_functions(&args.arities, a, b, &self.limits),
        }
    }

    fn dispatch(&self, command: &Command) -> Result<Reply> {
        let limits = &self.limits;
        match command {
            Command::EncodePoint(a) => {
                let d = self.domain(&a.domain)?;
                match (&a.tuple, a.index, a.arity) {
                    (Some(t), _, _) => {
                        let p = encode_point(&elements_of(t, "--tuple")?, d)?;
                        Ok(Reply::ok(format!("{p}\n"), json!({ "index": p })))
                    }
                    (None, Some(i), Some(m)) => {
                        let t = decode_point(i, m, d)?;
                        Ok(Reply::ok(format!("{}\n", workspace::join(&t)), json!({ "tuple": t })))
                    }
                    _ => Err(Error::Invalid("give --tuple, or --index with --arity".into())),
                }
            }
            Command::ColumnsIn(a) => {
                let r = self.relation(&a.relation)?;
                let m = Matrix::new(r.domain(), columns_of(&a.columns)?)?;
                let yes = columns_in_relation(&m, r)?;
                Ok(Reply::answer(yes, json!({ "columns_in": yes })))
            }
            Command::ApplyMatrix(a) => {
                let f = self.function(&a.function)?;
                let m = Matrix::new(f.input(), columns_of(&a.columns)?)?;
                let t = apply_to_matrix(f, &m)?;
                Ok(Reply::ok(format!("{}\n", workspace::join(&t)), json!({ "tuple": t })))
            }
            Command::PartialSatisfies(a) => {
                let d = self.domain(&a.domain)?;
                let e = match &a.codomain {
                    Some(c) => self.domain(c)?,
                    None => d,
                };
                let graph = a
                    .graph
                    .split(';')
                    .filter(|x| !x.trim().is_empty())
                    .map(|pair| {
                        let (t, v) = pair
                            .split_once(':')
                            .ok_or_else(|| Error::Invalid(format!("expected `tuple:value`, found `{pair}`")))?;
                        let v = elements_of(v, "--graph")?;
                        if v.len() != 1 {
                            return Err(Error::Invalid(format!("expected one value in `{pair}`")));
                        }
                        Ok((elements_of(t, "--graph")?, v[0]))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let p = PartialFunction::new(a.arity, d, e, graph)?;
                let yes = partial_satisfies(&p, &self.constraint(&a.constraint)?)?;
                Ok(Reply::answer(yes, json!({ "satisfies": yes })))
            }
            Command::SchemeApply(a) => {
                let h = self.scheme(&a.scheme)?;
                let map = h
                    .maps()
                    .get(a.map)
                    .ok_or_else(|| Error::Invalid(format!("the scheme has {} maps", h.maps().len())))?;
                let pairs = labels_of(&a.assign)
                    .iter()
                    .map(|kv| {
                        let (k, v) = kv
                            .split_once('=')
                            .ok_or_else(|| Error::Invalid(format!("expected `name=value`, found `{kv}`")))?;
                        let v = v
                            .parse::<usize>()
                            .map_err(|_| Error::Invalid(format!("bad value in `{kv}`")))?;
                        Ok((k.to_string(), v))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let t = scheme_apply(&elements_of(&a.tuple, "--tuple")?, &SkolemMap::new(pairs), map)?;
                Ok(Reply::ok(format!("{}\n", workspace::join(&t)), json!({ "tuple": t })))
            }
            Command::Satisfies(a) => {
                let f = self.function(&a.function)?;
                let c = self.constraint(&a.constraint)?;
                let violation = find_violation(f, &c)?;
                let columns = violation.as_ref().map(|m| m.columns().to_vec());
                Ok(Reply::answer(
                    violation.is_none(),
                    json!({ "satisfies": violation.is_none(), "violation": columns }),
                ))
            }
            Command::Preserves(a) => {
                let yes = preserves(self.function(&a.function)?, self.relation(&a.relation)?)?;
                Ok(Reply::answer(yes, json!({ "preserves": yes })))
            }
            Command::Image(a) => {
                let r = image_of_relation(self.function(&a.function)?, self.relation(&a.relation)?)?;
                Ok(relation_reply("image", &r))
            }
            Command::Minor(a) => self.minor(a, false),
            Command::ClassifyMinor(a) => {
                let kind = minor_classification(
                    self.relation(&a.relation)?,
                    &self.scheme(&a.scheme)?,
                    &self.relations(&a.relations)?,
                )?;
                Ok(Reply::ok(
                    format!("{}\n", kind.as_str()),
                    json!({ "classification": kind.as_str() }),
                ))
            }
            Command::IsMinor(a) => {
                let yes = is_conjunctive_minor(
                    &self.constraint(&a.constraint)?,
                    &self.scheme(&a.scheme)?,
                    &self.constraints(&a.constraints)?,
                )?;
                Ok(Reply::answer(yes, json!({ "conjunctive_minor": yes })))
            }
            Command::ComposeSchemes(a) => {
                let inner = a.inner.iter().map(|s| self.scheme(s)).collect::<Result<Vec<_>>>()?;
                let k = compose_schemes(&self.scheme(&a.scheme)?, &inner)?;
                Ok(Reply::ok(scheme_text("composite", &k), scheme_json(&k)))
            }
            Command::Substitute(a) => {
                let images = labels_of(&a.map)
                    .iter()
                    .map(|x| {
                        x.parse::<usize>()
                            .map_err(|_| Error::Invalid(format!("bad index `{x}` in --map")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let g = substitute(self.function(&a.function)?, &IndexMap::new(images, a.target)?)?;
                Ok(Reply::ok(function_text("substituted", &g), function_json(&g)))
            }
            Command::Compose(a) => {
                let gs = a
                    .inner
                    .iter()
                    .map(|n| self.function(n).cloned())
                    .collect::<Result<Vec<_>>>()?;
                let h = compose_functions(self.function(&a.function)?, &gs)?;
                Ok(Reply::ok(function_text("composite", &h), function_json(&h)))
            }
            Command::SvsClose(a) => {
                let k = svs_closure(&self.class(&a.class)?, a.bound)?;
                Ok(class_reply("closure", &k))
            }
            Command::LocalClosure(a) => match &a.constraints {
                Some(names) => {
                    let t = self.constraint_set(&ConstraintSetArgs {
                        constraints: names.clone(),
                        domain: a.class.domain.clone(),
                        codomain: a.class.codomain.clone(),
                        bound: a.set_bound.unwrap_or(1),
                    })?;
                    let closed = local_closure_constraints(&t, limits)?;
                    Ok(constraint_set_reply("closure", &closed))
                }
                None => {
                    let k = local_closure_functions(&self.class(&a.class)?, limits)?;
                    Ok(class_reply("closure", &k))
                }
            },
            Command::Clone(a) => {
                let k = clone_generate(&self.class(&a.class)?, a.bound, limits)?;
                Ok(class_reply("clone", &k))
            }
            Command::Pol(a) => {
                let rels = self.relations(&a.relations)?;
                let d = match (&a.domain, rels.first()) {
                    (Some(d), _) => self.domain(d)?.clone(),
                    (None, Some(r)) => r.domain().clone(),
                    (None, None) => return Err(Error::Invalid("give --relations or --domain".into())),
                };
                let k = pol(&rels, &d, a.bound, limits)?;
                Ok(class_reply("pol", &k))
            }
            Command::Inv(a) => {
                let rels = inv(&self.class(&a.class)?, a.bound, limits)?;
                let text: String = rels
                    .iter()
                    .enumerate()
                    .map(|(i, r)| format!("{}\n", relation_text(&format!("inv.{i}"), r)))
                    .collect();
                Ok(Reply::ok(
                    text,
                    json!({ "relations": rels.iter().map(relation_json).collect::<Vec<_>>() }),
                ))
            }
            Command::Characterize(a) => {
                let t = constraints_satisfied_by(&self.class(&a.class)?, a.bound, limits)?;
                Ok(constraint_set_reply("satisfied", &t))
            }
            Command::Define(a) => {
                let k = functions_satisfying(&self.constraint_set(a)?, a.bound, limits)?;
                Ok(class_reply("defined", &k))
            }
            Command::Superpose(a) => self.superpose(a, false),
            Command::DecomposeSuperposition(a) => {
                let family: Vec<Vec<String>> = a.family.iter().map(|s| labels_of(s)).collect();
                let d = superposition_decomposition(
                    &labels_of(&a.target),
                    &family,
                    self.label_set(&a.labels)?,
                    &self.relations(&a.relations)?,
                    limits,
                )?;
                let text = format!(
                    "{}{}\n{}\n{}\nholds {}\n",
                    scheme_text("scheme", &d.scheme),
                    relation_text("minor", &d.tight_minor),
                    relation_text("pattern", &d.pattern),
                    relation_text("superposition", &d.superposition),
                    d.holds
                );
                let json = json!({
                    "scheme": scheme_json(&d.scheme),
                    "minor": relation_json(&d.tight_minor),
                    "pattern": relation_json(&d.pattern),
                    "superposition": relation_json(&d.superposition),
                    "holds": d.holds,
                });
                Ok(Reply {
                    text,
                    json,
                    code: if d.holds { EXIT_OK } else { EXIT_NO },
                })
            }
            Command::EqualityPattern(a) => {
                let r = equality_pattern_relation(&labels_of(&a.target), self.domain(&a.domain)?)?;
                Ok(relation_reply("pattern", &r))
            }
            Command::SeparateConstraint(a) => {
                let k = self.class(&a.class)?;
                match separating_constraint(&k, self.function(&a.function)?, limits)? {
                    Some(c) => Ok(Reply::ok(constraint_text("separator", &c), constraint_json(&c))),
                    None => Ok(Reply {
                        text: "absent: the function is a member of the class\n".into(),
                        json: json!({ "separator": null }),
                        code: EXIT_NO,
                    }),
                }
            }
            Command::SeparateFunction(a) => {
                let t = match &a.from_class {
                    Some(name) => {
                        let k = self.ws.classes.get(name).ok_or_else(|| unknown("class", name))?;
                        constraints_satisfied_by(&k.class, a.set.bound, limits)?
                    }
                    None => self.constraint_set(&a.set)?,
                };
                let c = self.constraint(&a.constraint)?;
                let (text, json, code) = match separating_function(&t, &c, limits)? {
                    FunctionSeparation::Found(g) => (function_text("separator", &g), function_json(&g), EXIT_OK),
                    FunctionSeparation::InSet => (
                        "absent: the constraint belongs to the set\n".to_string(),
                        json!({ "separator": null, "reason": "in-set" }),
                        EXIT_NO,
                    ),
                    FunctionSeparation::EmptyAntecedent => (
                        "absent: a constraint with empty antecedent is satisfied by every function\n".to_string(),
                        json!({ "separator": null, "reason": "empty-antecedent" }),
                        EXIT_NO,
                    ),
                    FunctionSeparation::Exhausted => (
                        "absent: no separating function within the search space\n".to_string(),
                        json!({ "separator": null, "reason": "exhausted" }),
                        EXIT_NO,
                    ),
                };
                Ok(Reply { text, json, code })
            }
            Command::Roundtrip(a) => {
                let report = galois_roundtrip_report(&self.class(a)?, limits)?;
                let mut text = format!(
                    "members {}\nnon-members {}\nseparated {}\n",
                    report.members,
                    report.entries.len(),
                    report.separated()
                );
                if let Some(note) = &report.note {
                    text.push_str(&format!("note {note}\n"));
                }
                let mut entries = Vec::new();
                for e in &report.entries {
                    match &e.outcome {
                        RoundtripOutcome::Separated { constraint, verified } => {
                            text.push_str(&format!(
                                "{} {} {}\n",
                                compact_function(&e.function),
                                if *verified { "separated-by" } else { "unverified" },
                                compact_constraint(constraint)
                            ));
                            entries.push(json!({
                                "function": function_json(&e.function),
                                "separator": constraint_json(constraint),
                                "verified": verified,
                            }));
                        }
                        RoundtripOutcome::NotSeparated => {
                            text.push_str(&format!(
                                "{} not-separated-within-bounds\n",
                                compact_function(&e.function)
                            ));
                            entries.push(json!({ "function": function_json(&e.function), "separator": null }));
                        }
                    }
                }
                let ok = report.succeeded();
                Ok(Reply {
                    text,
                    json: json!({
                        "members": report.members,
                        "separated": report.separated(),
                        "entries": entries,
                        "note": report.note,
                        "succeeded": ok,
                    }),
                    code: if ok { EXIT_OK } else { EXIT_NO },
                })
            }
            Command::Relax(a) => {
                let c = relax(
                    &self.constraint(&a.constraint)?,
                    self.relation(&a.antecedent)?.clone(),
                    self.relation(&a.consequent)?.clone(),
                )?;
                Ok(Reply::ok(constraint_text("relaxed", &c), constraint_json(&c)))
            }
            Command::Intersect(a) => {
                let c = intersect_consequents(&self.constraints(&a.constraints)?)?;
                Ok(Reply::ok(constraint_text("intersection", &c), constraint_json(&c)))
            }
            Command::Canonical(a) => {
                let d = self.domain(&a.domain)?;
                let e = match &a.codomain {
                    Some(c) => self.domain(c)?,
                    None => d,
                };
                let cc = canonical_constraints(d, e, a.arity)?;
                let text = format!(
                    "{}\n{}\n{}",
                    constraint_text("equality", &cc.equality),
                    constraint_text("empty", &cc.empty),
                    constraint_text("trivial", &cc.trivial)
                );
                let json = json!({
                    "equality": constraint_json(&cc.equality),
                    "empty": constraint_json(&cc.empty),
                    "trivial": constraint_json(&cc.trivial),
                });
                Ok(Reply::ok(text, json))
            }
            Command::Extensible(a) => {
                let family = self.family(a)?;
                match extension_gap(&family)? {
                    None => Ok(Reply::answer(
                        true,
                        json!({ "extensible": true, "members": family.len() }),
                    )),
                    Some((p, y)) => {
                        let graph: Vec<(Vec<usize>, usize)> =
                            p.domain_tuples().zip(p.graph().values().copied()).collect();
                        Ok(Reply {
                            text: format!("false\ncounterexample {graph:?} at {y:?}\n"),
                            json: json!({ "extensible": false, "members": family.len(), "partial": graph, "point": y }),
                            code: EXIT_NO,
                        })
                    }
                }
            }
            Command::ClosureHarness(a) => {
                let family = self.family(&a.family)?;
                let report = family_closure_harness(&family, a.trials, a.bound, a.seed, limits)?;
                let violations = report.violations();
                let mut text = format!(
                    "family {}\nequality {}\nempty {}\ntrials {}\nviolations {}\n",
                    report.family_size,
                    report.equality,
                    report.empty,
                    report.trials.len(),
                    violations
                );
                for t in report.trials.iter().filter(|t| !t.satisfied || !t.member) {
                    text.push_str(&format!(
                        "violation {} {} {}\n",
                        t.index,
                        t.kind.as_str(),
                        compact_constraint(&t.derived)
                    ));
                }
                let trials: Vec<Value> = report
                    .trials
                    .iter()
                    .map(|t| {
                        json!({
                            "index": t.index,
                            "kind": t.kind.as_str(),
                            "derived": constraint_json(&t.derived),
                            "satisfied": t.satisfied,
                            "member": t.member,
                        })
                    })
                    .collect();
                Ok(Reply {
                    text,
                    json: json!({
                        "family": report.family_size,
                        "equality": report.equality,
                        "empty": report.empty,
                        "violations": violations,
                        "trials": trials,
                    }),
                    code: if violations == 0 { EXIT_OK } else { EXIT_NO },
                })
            }
            Command::Oracle(OracleCommand::Image(a)) => {
                let r = oracle::image(self.function(&a.function)?, self.relation(&a.relation)?)?;
                Ok(relation_reply("image", &r))
            }
            Command::Oracle(OracleCommand::Minor(a)) => self.minor(a, true),
            Command::Oracle(OracleCommand::Superpose(a)) => self.superpose(a, true),
        }
    }

    fn minor(&self, a: &MinorArgs, naive: bool) -> Result<Reply> {
        let h = self.scheme(&a.scheme)?;
        let tight = |rels: &[Relation]| {
            if naive {
                oracle::tight_minor(&h, rels)
            } else {
                tight_minor_relations(&h, rels)
            }
        };
        if a.constraints.is_empty() {
            let r = tight(&self.relations(&a.relations)?)?;
            return Ok(relation_reply("minor", &r));
        }
        let cs = self.constraints(&a.constraints)?;
        let c = if naive {
            let (rs, ss): (Vec<Relation>, Vec<Relation>) = cs
                .iter()
                .map(|c| (c.antecedent().clone(), c.consequent().clone()))
                .unzip();
            Constraint::new(tight(&rs)?, tight(&ss)?)?
        } else {
            tight_minor_constraint(&h, &cs)?
        };
        Ok(Reply::ok(constraint_text("minor", &c), constraint_json(&c)))
    }

    fn superpose(&self, a: &SuperposeArgs, naive: bool) -> Result<Reply> {
        let family: Vec<Vec<String>> = a.family.iter().map(|s| labels_of(s)).collect();
        let rels = self.relations(&a.relations)?;
        let l = self.label_set(&a.labels)?;
        let target = labels_of(&a.target);
        let r = if naive {
            oracle::superposition(&rels, &target, &family, l)?
        } else {
            general_superposition(&rels, &target, &family, l, &self.limits)?
        };
        Ok(relation_reply("superposition", &r))
    }
}

fn relation_reply(role: &str, r: &Relation) -> Reply {
    Reply::ok(relation_text(role, r), relation_json(r))
}

fn class_reply(role: &str, k: &FunctionClass) -> Reply {
    Reply::ok(class_text(role, k), class_json(k))
}

fn constraint_set_reply(role: &str, t: &ConstraintSet) -> Reply {
    let text: String = t
        .members()
        .enumerate()
        .map(|(i, c)| format!("{}\n", constraint_text(&format!("{role}.{i}"), c)))
        .collect();
    Reply::ok(text, constraint_set_json(t))
}
