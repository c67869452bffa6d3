use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use nilcoxeter::cosets::{self, CosetJson};
use nilcoxeter::demazure::DemazureOp;
use nilcoxeter::expressions::{self, Expression};
use nilcoxeter::frobenius::{self, Modify};
use nilcoxeter::rewrite::{self, Rewriter};
use nilcoxeter::{verify, CoxeterMatrix, CoxeterSystem, DoubleCoset, GenSet, Poly, Realization, Q};

#[derive(Parser)]
#[command(name = "nilcox", version, about = "Double cosets, singular expressions and Demazure operators for Coxeter systems")]
struct Cli {
    #[command(flatten)]
    session: Session,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Session {
    /// Named Coxeter type, e.g. A3, B3, G2, I2(5), A~1.
    #[arg(long, global = true, default_value = "A3")]
    group: String,
    /// Coxeter matrix JSON file `{"labels":[...],"m":[[...]]}`; overrides --group.
    #[arg(long, global = true)]
    matrix: Option<PathBuf>,
    /// Built-in realization (`perm:<n>`, `geometric:<type>`, `affine-A1`) or a
    /// JSON file `{"roots":[[...]],"coroots":[[...]]}`.
    #[arg(long, global = true)]
    realization: Option<String>,
    /// Degree bound for operator comparisons, in the grading with deg α = 2.
    #[arg(long, global = true)]
    degree_bound: Option<usize>,
    /// Finitary enumeration cap.
    #[arg(long, global = true, default_value_t = 50_000)]
    cap: usize,
    /// Search budget for expression enumeration and rewriting.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Double cosets.
    #[command(subcommand)]
    Cosets(CosetsCmd),
    /// Reduced expressions.
    #[command(subcommand)]
    Rex(RexCmd),
    /// Demazure operators.
    #[command(subcommand)]
    Demazure(DemazureCmd),
    /// Frobenius extensions.
    #[command(subcommand)]
    Frobenius(FrobeniusCmd),
    /// Verification suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum CosetsCmd {
    /// All (I, J)-cosets.
    Enumerate {
        #[arg(long = "I", default_value = "")]
        i: String,
        #[arg(long = "J", default_value = "")]
        j: String,
    },
}

#[derive(Subcommand)]
enum RexCmd {
    /// Reduced expressions of a coset.
    List {
        /// Coset JSON `{"I":[...],"J":[...],"pmin":[...]}`.
        #[arg(long)]
        coset: String,
        #[arg(long)]
        max_width: Option<usize>,
    },
    /// The graph of reduced expressions joined by braid moves.
    Graph {
        #[arg(long)]
        coset: String,
    },
    /// Reduce an expression by braid moves and contractions.
    Reduce {
        /// Expression in `+/-` notation, e.g. `[{0} + 1 - 0]`.
        #[arg(long)]
        expr: String,
    },
}

#[derive(Subcommand)]
enum DemazureCmd {
    /// Apply an operator to a polynomial.
    Apply {
        /// Operator descriptor, e.g. `{"kind":"coset","I":[0],"J":[1],"pmin":[]}`.
        #[arg(long)]
        op: String,
        /// Polynomial as a JSON term list `[{"exp":[...],"num":"1","den":"1"}]`.
        #[arg(long)]
        poly: String,
    },
}

#[derive(Subcommand)]
enum FrobeniusCmd {
    /// Dual bases of R^I over R^J (I ⊆ J), or with --coset and --L the dual
    /// bases whose d side lies in the image of ∂ of the minimal element.
    DualBases {
        #[arg(long = "I", default_value = "")]
        i: String,
        #[arg(long = "J", default_value = "")]
        j: String,
        #[arg(long)]
        coset: Option<String>,
        #[arg(long = "L")]
        l: Option<String>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run every named check for --group.
    All,
}

enum Failure {
    Input(String),
    Check(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Check(m) => write!(f, "check failed: {m}"),
        }
    }
}

fn input<E: fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn check<E: fmt::Display>(e: E) -> Failure {
    Failure::Check(e.to_string())
}

struct Ctx {
    sys: Arc<CoxeterSystem>,
    real: Option<Arc<Realization>>,
}

#[derive(Deserialize)]
struct RealizationJson {
    roots: Vec<Vec<Value>>,
    coroots: Vec<Vec<Value>>,
}

fn parse_q(v: &Value) -> Result<Q, String> {
    match v {
        Value::Number(n) => n.as_i64().map(|n| Q::from_integer(n.into())).ok_or_else(|| format!("non-integer number {n}; use a string \"a/b\"")),
        Value::String(s) => {
            let (a, b) = s.split_once('/').unwrap_or((s, "1"));
            let a: i64 = a.trim().parse().map_err(|_| format!("bad rational {s:?}"))?;
            let b: i64 = b.trim().parse().map_err(|_| format!("bad rational {s:?}"))?;
            if b == 0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Q::new(a.into(), b.into()))
        }
        _ => Err(format!("expected a number or string, got {v}")),
    }
}

impl Session {
    fn system(&self) -> Result<Arc<CoxeterSystem>, Failure> {
        let sys = match &self.matrix {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                let (m, labels) = CoxeterMatrix::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                CoxeterSystem::with_labels(m, labels)
            }
            None => CoxeterSystem::named(&self.group).map_err(input)?,
        };
        Ok(Arc::new(sys.with_cap(self.cap)))
    }

    fn realization(&self, sys: &Arc<CoxeterSystem>) -> Result<Arc<Realization>, Failure> {
        let real = match &self.realization {
            Some(name) if name.ends_with(".json") => {
                let text = std::fs::read_to_string(name).map_err(|e| Failure::Input(format!("{name}: {e}")))?;
                let raw: RealizationJson = serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{name}: line {} column {}: {e}", e.line(), e.column())))?;
                let conv = |rows: &[Vec<Value>]| rows.iter().map(|r| r.iter().map(parse_q).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>();
                let roots = conv(&raw.roots).map_err(Failure::Input)?;
                let coroots = conv(&raw.coroots).map_err(Failure::Input)?;
                Realization::new(name.clone(), sys.clone(), roots, coroots).map_err(input)?
            }
            Some(name) => Realization::builtin(name).map_err(input)?,
            None if self.matrix.is_none() => verify::realization_for(&self.group).map_err(Failure::Input)?,
            None => Realization::geometric(sys.clone()).map_err(input)?,
        };
        if real.system().matrix() != sys.matrix() {
            return Err(Failure::Input(format!("realization {:?} does not match the Coxeter matrix", real.name())));
        }
        Ok(Arc::new(real))
    }
}

impl Ctx {
    fn real(&self) -> &Realization {
        self.real.as_ref().expect("realization loaded")
    }

    /// The system all group elements live in.
    fn group(&self) -> &CoxeterSystem {
        match &self.real {
            Some(r) => r.system(),
            None => &self.sys,
        }
    }

    fn subset(&self, text: &str) -> Result<GenSet, Failure> {
        let sys = self.group();
        let mut set = GenSet::EMPTY;
        for tok in text.split([',', ' ']).map(str::trim).filter(|t| !t.is_empty() && *t != "∅") {
            let s = sys
                .labels()
                .iter()
                .position(|l| l == tok)
                .or_else(|| tok.parse::<usize>().ok().filter(|&i| i < sys.rank()))
                .ok_or_else(|| Failure::Input(format!("unknown generator {tok:?}")))?;
            set = set.with(s);
        }
        Ok(set)
    }

    fn finitary(&self, set: GenSet) -> Result<GenSet, Failure> {
        if !self.group().is_finitary(set).map_err(input)? {
            return Err(Failure::Input(format!("{set:?} is not finitary")));
        }
        Ok(set)
    }

    fn coset(&self, text: &str) -> Result<DoubleCoset, Failure> {
        let raw: CosetJson = serde_json::from_str(text).map_err(|e| Failure::Input(format!("coset JSON, column {}: {e}", e.column())))?;
        cosets::from_json(self.group(), &raw).map_err(input)
    }
}

fn coset_value(sys: &CoxeterSystem, p: &DoubleCoset) -> Value {
    let (ld, rd) = cosets::coset_descents(sys, p);
    json!({
        "I": p.left(),
        "J": p.right(),
        "pmin": p.pmin().word(),
        "pmax": p.pmax().word(),
        "leftred": p.left_redundancy(),
        "rightred": p.right_redundancy(),
        "leftdes": ld,
        "rightdes": rd,
    })
}

fn op_from_json(ctx: &Ctx, text: &str) -> Result<DemazureOp, Failure> {
    let v: Value = serde_json::from_str(text).map_err(|e| Failure::Input(format!("operator JSON, column {}: {e}", e.column())))?;
    let real = ctx.real();
    let sys = ctx.group();
    let set = |key: &str| -> Result<GenSet, Failure> {
        let raw = v.get(key).ok_or_else(|| Failure::Input(format!("operator is missing {key:?}")))?;
        serde_json::from_value::<GenSet>(raw.clone()).map_err(|e| Failure::Input(format!("{key}: {e}")))
    };
    let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| Failure::Input("operator is missing \"kind\"".into()))?;
    let op = match kind {
        "simple" => {
            let s = v.get("s").and_then(Value::as_u64).ok_or_else(|| Failure::Input("simple operator needs \"s\"".into()))?;
            DemazureOp::simple(real, s as usize).map_err(input)?
        }
        "element" => {
            let word: Vec<usize> = serde_json::from_value(v.get("word").cloned().unwrap_or(Value::Null)).map_err(|e| Failure::Input(format!("word: {e}")))?;
            DemazureOp::element(real, &sys.element(&word).map_err(input)?)
        }
        "parabolic" => DemazureOp::parabolic(real, set("I")?).map_err(input)?,
        "relative" => DemazureOp::relative(real, set("I")?, set("J")?).map_err(input)?,
        "coset" => {
            let p = ctx.coset(text)?;
            DemazureOp::coset(real, &p).map_err(input)?
        }
        "expression" => {
            let e = match v.get("expr") {
                Some(Value::String(s)) => Expression::parse(sys, s).map_err(input)?,
                Some(other) => Expression::from_json_value(sys, other).map_err(input)?,
                None => return Err(Failure::Input("expression operator needs \"expr\"".into())),
            };
            DemazureOp::expression(real, &e).map_err(input)?
        }
        other => return Err(Failure::Input(format!("unknown operator kind {other:?}"))),
    };
    Ok(op)
}

fn emit(format: Format, value: &Value, text: impl FnOnce() -> String) {
    match format {
        Format::Text => print!("{}", text()),
        _ => println!("{}", serde_json::to_string_pretty(value).expect("serializable")),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let s = &cli.session;
    if s.cap == 0 || s.budget == 0 || s.degree_bound == Some(0) {
        return Err(Failure::Input("bounds must be positive".into()));
    }
    let sys = s.system()?;
    let needs_real = matches!(cli.command, Command::Demazure(_) | Command::Frobenius(_));
    let real = if needs_real { Some(s.realization(&sys)?) } else { None };
    let ctx = Ctx { sys, real };
    match cli.command {
        Command::Cosets(CosetsCmd::Enumerate { i, j }) => {
            let (i, j) = (ctx.finitary(ctx.subset(&i)?)?, ctx.finitary(ctx.subset(&j)?)?);
            let sys = ctx.group();
            let ps = cosets::enumerate_cosets(sys, i, j).map_err(input)?;
            let v = Value::Array(ps.iter().map(|p| coset_value(sys, p)).collect());
            emit(s.format, &v, || ps.iter().map(|p| format!("{p:?}  pmax={:?}\n", p.pmax())).collect());
        }
        Command::Rex(RexCmd::List { coset, max_width }) => {
            let p = ctx.coset(&coset)?;
            let es = expressions::reduced_expressions_of(ctx.group(), &p, max_width, s.budget).map_err(check)?;
            let v = Value::Array(es.iter().map(Expression::to_json_value).collect());
            emit(s.format, &v, || es.iter().map(|e| format!("{e}\n")).collect());
        }
        Command::Rex(RexCmd::Graph { coset }) => {
            let p = ctx.coset(&coset)?;
            let rw = Rewriter::new(ctx.group());
            let g = rewrite::matsumoto_graph(&rw, &p, s.budget).map_err(check)?;
            match s.format {
                Format::Dot => print!("{}", g.to_dot()),
                f => {
                    let v = json!({
                        "vertices": g.vertices.iter().map(Expression::to_json_value).collect::<Vec<_>>(),
                        "edges": g.edges.iter().map(|(a, b, k)| json!([a, b, k])).collect::<Vec<_>>(),
                        "connected": g.is_connected(),
                        "components": g.component_count(),
                    });
                    emit(f, &v, || format!("{} vertices, {} edges, {} component(s)\n", g.vertices.len(), g.edges.len(), g.component_count()));
                }
            }
        }
        Command::Rex(RexCmd::Reduce { expr }) => {
            let sys = ctx.group();
            let e = Expression::parse(sys, &expr).map_err(input)?;
            let rw = Rewriter::new(sys);
            let (r, trace) = rewrite::reduce_expression(&rw, &e, s.budget).map_err(check)?;
            let p = r.expressed_coset(sys).map_err(check)?;
            let v = json!({
                "input": e.to_json_value(),
                "reduced": r.to_json_value(),
                "coset": coset_value(sys, &p),
                "trace": trace.iter().map(|m| m.to_json_value()).collect::<Vec<_>>(),
            });
            emit(s.format, &v, || {
                let mut out = format!("{e}\n");
                for m in &trace {
                    out.push_str(&format!("  {} at {}: {}\n", m.kind, m.position, m.after));
                }
                out.push_str(&format!("reduced: {r}\n"));
                out
            });
        }
        Command::Demazure(DemazureCmd::Apply { op, poly }) => {
            let real = ctx.real();
            let op = op_from_json(&ctx, &op)?;
            let f = Poly::from_json(real.dim(), &poly).map_err(input)?;
            if !real.is_invariant(&f, op.domain) {
                return Err(Failure::Input(format!("polynomial is not invariant under {:?}", op.domain)));
            }
            let g = op.apply(real, &f).map_err(check)?;
            let v = serde_json::to_value(g.to_terms_json()).expect("serializable");
            emit(s.format, &v, || format!("{g:?}\n"));
        }
        Command::Frobenius(FrobeniusCmd::DualBases { i, j, coset, l }) => {
            let real = ctx.real();
            let pair = match (coset, l) {
                (Some(c), l) => {
                    let p = ctx.coset(&c)?;
                    let l = match l {
                        Some(l) => ctx.finitary(ctx.subset(&l)?)?,
                        None => ctx.finitary(ctx.group().all())?,
                    };
                    frobenius::dual_bases_in_image(real, &p, l).map_err(check)?
                }
                (None, Some(_)) => return Err(Failure::Input("--L needs --coset".into())),
                (None, None) => {
                    let (i, j) = (ctx.subset(&i)?, ctx.finitary(ctx.subset(&j)?)?);
                    let pair = frobenius::almost_dual_bases(real, i, j).map_err(check)?;
                    frobenius::gram_schmidt_dualize(real, &pair, Modify::D).map_err(check)?
                }
            };
            let v = pair.to_json_value();
            emit(s.format, &v, || {
                let mut out = String::new();
                for (k, (c, d)) in pair.c.iter().zip(&pair.d).enumerate() {
                    out.push_str(&format!("{k}: c = {c:?}\n   d = {d:?}\n"));
                }
                out
            });
        }
        Command::Verify(VerifyCmd::All) => {
            let reports = verify::suite(&s.group, s.seed, s.degree_bound).map_err(Failure::Input)?;
            let v = serde_json::to_value(&reports).expect("serializable");
            emit(s.format, &v, || {
                reports
                    .iter()
                    .map(|r| format!("{} {} ({:.1}s) {}\n", if r.passed { "PASS" } else { "FAIL" }, r.name, r.seconds, r.detail))
                    .collect()
            });
            if let Some(bad) = reports.iter().find(|r| !r.passed) {
                return Err(Failure::Check(format!("{}: {}", bad.name, bad.detail)));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(match f {
                Failure::Input(_) => 2,
                Failure::Check(_) => 1,
            })
        }
    }
}
