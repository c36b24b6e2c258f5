//! Command-line front end. Every command prints one JSON object on standard
//! output; numbers are written as strings.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use valdef::algebra::text::{parse_elem_list, parse_rational};
use valdef::fol::{self, EvalMode, Formula, PrintFormat};
use valdef::katocheck::{self, Scheme};
use valdef::milnor::{self, SymbolSum};
use valdef::quadform::{self, DiagonalQuadraticForm};
use valdef::recipe::{self, IsoData};
use valdef::valuation::Place;
use valdef::{divisorsets, Elem, Error, Field, Result};

#[derive(Parser)]
#[command(name = "valdef", version, about = "Emit and check field-theoretic formulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a formula.
    Emit {
        #[command(subcommand)]
        which: Emit,
        #[arg(long, value_enum, default_value_t = Format::Sexpr, global = true)]
        format: Format,
    },
    /// Evaluate a sentence over a finite field.
    Eval {
        #[arg(long)]
        field: String,
        /// File holding the sentence, or `-` for standard input.
        #[arg(long)]
        sentence: String,
        /// Values of free variables, as `name=element`.
        #[arg(long = "assign")]
        assign: Vec<String>,
        #[arg(long)]
        sequential: bool,
    },
    /// Pfister forms `⟨⟨a1, …, ar⟩⟩`.
    Pfister {
        #[arg(value_enum)]
        op: PfisterOp,
        #[arg(long)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        /// Treat the coefficients as a diagonal form instead.
        #[arg(long)]
        diagonal: bool,
        /// Vector to evaluate at (for `value`).
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Milnor K-theory symbols.
    Symbol {
        #[command(subcommand)]
        op: SymbolOp,
    },
    /// Sampled checks of the Kato complex.
    Kato {
        #[arg(value_enum)]
        op: KatoOp,
        #[arg(long)]
        scheme: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        sequential: bool,
    },
    /// Divisor sets and the rings they cut out.
    Divisor {
        #[arg(value_enum)]
        op: DivisorOp,
        #[arg(long)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        /// Element tested for membership.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Degree (for `deg`).
        #[arg(long)]
        n: Option<u64>,
    },
    /// Size and quantifier statistics of a formula.
    Stats {
        /// File holding the formula, or `-` for standard input.
        #[arg(long)]
        formula: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Sexpr,
    Unicode,
}

#[derive(Subcommand)]
enum Emit {
    Phi0 {
        #[arg(long)]
        r: usize,
    },
    Phid {
        #[arg(long)]
        d: usize,
    },
    Phift {
        #[arg(long)]
        e: usize,
    },
    Vald {
        #[arg(long)]
        d: usize,
    },
    Degn {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        e: usize,
    },
    Iso {
        /// JSON file with the field data, or `-` for standard input.
        #[arg(long)]
        data: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PfisterOp {
    Isotropic,
    Value,
}

#[derive(Args)]
struct SymbolArgs {
    #[arg(long)]
    field: String,
    /// Entries of the symbol, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    entries: String,
}

#[derive(Subcommand)]
enum SymbolOp {
    Boundary {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(long)]
        place: String,
    },
    Trivial {
        #[command(flatten)]
        symbol: SymbolArgs,
    },
    Hbn {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    Reciprocity {
        #[arg(long)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KatoOp {
    Complex,
    Exactness,
}

#[derive(Clone, Copy, ValueEnum)]
enum DivisorOp {
    Df,
    Theta,
    Thetabar,
    Ideal,
    Ring,
    Ring0,
    Deg,
}

fn read_source(path: &str) -> Result<String> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::parse(format!("standard input: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::parse(format!("{path}: {e}")))?
    };
    Ok(text)
}

/// Reads a formula from a file or standard input; output of `emit` is
/// accepted as well.
fn read_formula(path: &str) -> Result<Formula> {
    let text = read_source(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| Error::parse(e.to_string()))?;
        let f = v
            .get("formula")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse("JSON input has no \"formula\" field"))?;
        return fol::parse_formula(f);
    }
    fol::parse_formula(&text)
}

fn field(s: &str) -> Result<Field> {
    s.parse()
}

fn elem(k: &Field, s: &str) -> Result<Elem> {
    k.parse_elem(s)
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::pre(format!("--{flag} is required here")))
}

fn stringify(v: Value) -> Value {
    match v {
        Value::Number(n) => Value::String(n.to_string()),
        Value::Array(xs) => Value::Array(xs.into_iter().map(stringify).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, stringify(v))).collect()),
        other => other,
    }
}

fn formula_output(f: &Formula, format: Format) -> Value {
    let format = match format {
        Format::Sexpr => PrintFormat::Sexpr,
        Format::Unicode => PrintFormat::Unicode,
    };
    json!({
        "formula": fol::print_formula(f, format),
        "stats": fol::stats(f),
    })
}

fn emit(which: &Emit, format: Format) -> Result<Value> {
    let f = match which {
        Emit::Phi0 { r } => recipe::emit_phi0(*r),
        Emit::Phid { d } => recipe::emit_phi_d(*d),
        Emit::Phift { e } => recipe::emit_phi_ft(*e),
        Emit::Vald { d } => recipe::emit_val_d(*d)?,
        Emit::Degn { n, e } => recipe::emit_deg_n(*n, *e)?,
        Emit::Iso { data } => {
            let data: IsoData =
                serde_json::from_str(&read_source(data)?).map_err(|e| Error::parse(e.to_string()))?;
            recipe::emit_iso_sentence(&data)?
        }
    };
    Ok(formula_output(&f, format))
}

fn eval(field_s: &str, sentence: &str, assign: &[String], sequential: bool) -> Result<Value> {
    let k = field(field_s)?;
    let f = read_formula(sentence)?;
    let mut values = BTreeMap::new();
    for a in assign {
        let (name, value) = a
            .split_once('=')
            .ok_or_else(|| Error::parse(format!("expected name=element, found {a:?}")))?;
        values.insert(name.trim().to_string(), elem(&k, value.trim())?);
    }
    let mode = if sequential { EvalMode::Sequential } else { EvalMode::default() };
    let verdict = fol::eval_sentence_with(&f, &k, &values, mode)?;
    Ok(json!({ "verdict": verdict }))
}

fn pfister(op: PfisterOp, field_s: &str, coeffs: &str, diagonal: bool, x: &Option<String>) -> Result<Value> {
    let k = field(field_s)?;
    let cs = parse_elem_list(&k, coeffs)?;
    let q = if diagonal {
        DiagonalQuadraticForm::new(k.clone(), cs)?
    } else {
        quadform::pfister(&k, &cs)?
    };
    match op {
        PfisterOp::Isotropic => {
            let verdict = match &k {
                Field::Q => quadform::isotropic_q(&q)?,
                _ if k.is_finite() => quadform::isotropic_fq(&q)?,
                _ => return Err(Error::Undecidable(format!("isotropy over {k}"))),
            };
            Ok(json!({ "form": q.show(), "verdict": verdict }))
        }
        PfisterOp::Value => {
            let xs = parse_elem_list(&k, required(x, "x")?)?;
            let v = quadform::evaluate(&q, &xs)?;
            Ok(json!({ "form": q.show(), "value": k.show(&v) }))
        }
    }
}

fn symbol(op: &SymbolOp) -> Result<Value> {
    let single = |a: &SymbolArgs| -> Result<SymbolSum> {
        let k = field(&a.field)?;
        let entries = parse_elem_list(&k, &a.entries)?;
        SymbolSum::single(k, entries)
    };
    match op {
        SymbolOp::Boundary { symbol, place } => {
            let s = single(symbol)?;
            let v = Place::parse(&s.field, place)?;
            let b = milnor::boundary(&s, &v)?;
            Ok(json!({ "symbol": s.show(), "place": v.show(&s.field), "boundary": b.show() }))
        }
        SymbolOp::Trivial { symbol } => {
            let s = single(symbol)?;
            Ok(json!({ "symbol": s.show(), "verdict": milnor::is_trivial(&s)? }))
        }
        SymbolOp::Hbn { a, b } => {
            let inv = milnor::hbn_invariants(&parse_rational(a)?, &parse_rational(b)?)?;
            let invariants: Map<String, Value> = inv
                .invariants
                .iter()
                .map(|(p, i)| (p.strip_prefix("p:").unwrap_or(p).to_string(), json!(i)))
                .collect();
            Ok(json!({ "invariants": invariants, "sum": inv.total(), "verdict": inv.total() == 0 }))
        }
        SymbolOp::Reciprocity { field: f, a, b } => {
            let k = field(f)?;
            let verdict = milnor::reciprocity_check(&k, &elem(&k, a)?, &elem(&k, b)?)?;
            Ok(json!({ "verdict": verdict }))
        }
    }
}

fn kato(op: KatoOp, scheme: &str, samples: usize, seed: u64, sequential: bool) -> Result<Value> {
    let inst = katocheck::build_kc(Scheme::parse(scheme)?)?;
    let xs = katocheck::random_symbols(&inst, samples, seed);
    let report = match op {
        KatoOp::Complex => katocheck::check_complex(&inst, &xs, !sequential)?,
        KatoOp::Exactness => katocheck::check_exactness(&inst, &xs, !sequential)?,
    };
    let verdict = report.verdict();
    let mut v = serde_json::to_value(&report).map_err(|e| Error::parse(e.to_string()))?;
    v["verdict"] = json!(verdict);
    Ok(v)
}

fn divisor(op: DivisorOp, field_s: &str, f: &str, x: &Option<String>, n: Option<u64>) -> Result<Value> {
    let k = field(field_s)?;
    let f = elem(&k, f)?;
    let member = |test: fn(&Field, &Elem, &Elem) -> Result<bool>| -> Result<Value> {
        let x = elem(&k, required(x, "x")?)?;
        Ok(json!({ "verdict": test(&k, &x, &f)? }))
    };
    match op {
        DivisorOp::Df => Ok(json!({ "places": divisorsets::d_f(&k, &f)?.show() })),
        DivisorOp::Theta => member(divisorsets::theta_member),
        DivisorOp::Thetabar => member(divisorsets::theta_bar_member),
        DivisorOp::Ideal => member(divisorsets::ideal_a_member),
        DivisorOp::Ring => member(divisorsets::ring_r_member),
        DivisorOp::Ring0 => member(divisorsets::ring_r0_member),
        DivisorOp::Deg => {
            let n = n.ok_or_else(|| Error::pre("--n is required here"))?;
            let c = divisorsets::degree_check(&k, &f, n)?;
            let mut v = serde_json::to_value(&c).map_err(|e| Error::parse(e.to_string()))?;
            v["verdict"] = json!(c.holds);
            Ok(v)
        }
    }
}

fn run(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Emit { which, format } => emit(which, *format),
        Command::Eval {
            field,
            sentence,
            assign,
            sequential,
        } => eval(field, sentence, assign, *sequential),
        Command::Pfister {
            op,
            field,
            coeffs,
            diagonal,
            x,
        } => pfister(*op, field, coeffs, *diagonal, x),
        Command::Symbol { op } => symbol(op),
        Command::Kato {
            op,
            scheme,
            samples,
            seed,
            sequential,
        } => kato(*op, scheme, *samples, *seed, *sequential),
        Command::Divisor { op, field, f, x, n } => divisor(*op, field, f, x, *n),
        Command::Stats { formula } => Ok(json!({ "stats": fol::stats(&read_formula(formula)?) })),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Syntax { .. } | Error::Parse(_) | Error::Mismatch(_) => 2,
        Error::Undecidable(_) => 4,
        Error::Precondition(_) | Error::DivisionByZero | Error::Unsupported(_) => 3,
    }
}

fn with_schema(v: Value) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), json!("1"));
    if let Value::Object(m) = stringify(v) {
        out.extend(m);
    }
    Value::Object(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, code) = match run(&cli) {
        Ok(v) => (with_schema(v), 0),
        Err(e) => {
            eprintln!("valdef: {e}");
            (with_schema(json!({ "error": e.to_string() })), exit_code(&e))
        }
    };
    let text = serde_json::to_string_pretty(&value).expect("JSON value serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(code)
}
