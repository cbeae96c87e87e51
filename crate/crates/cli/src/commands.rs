use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use archevol_core::analysis::{analyze_sequence, cpa_matrix, CpaOptions, SequenceReport};
use archevol_core::cosa::{self, cosa_type_graph, rules, Architecture};
use archevol_core::evolution::{OperationDescriptor, OperationName};
use archevol_core::graph::matching::Bindings;
use archevol_core::graph::{ConformanceReport, Value};
use archevol_core::patterns::{builtin_patterns, pattern_by_name, plain_types, run_pattern, DecisionScript, RunState};
use archevol_core::rewrite::{parse_rules, Rule, RuleSequence};
use archevol_core::styles::{builtin_styles, check_style, style_by_name, Style};

use crate::{BuiltinRules, BuiltinSequence, Command, MatrixFormat, Op, OpArgs, ReportFormat};

pub const OK: i32 = 0;
pub const VIOLATIONS: i32 = 1;

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or unreadable input.
    Usage(String),
    Internal(String),
}

impl Failure {
    pub fn status(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

fn usage(e: impl fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_architecture(path: &Path) -> Result<Architecture, Failure> {
    Architecture::from_document(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_style(spec: &str) -> Result<Style, Failure> {
    if let Some(s) = style_by_name(spec) {
        return Ok(s);
    }
    let path = Path::new(spec);
    if !path.exists() {
        let known: Vec<String> = builtin_styles().into_iter().map(|s| s.name).collect();
        return Err(usage(format!("no style `{spec}` (built in: {})", known.join(", "))));
    }
    Style::from_document(&read(path)?).map_err(|e| usage(format!("{spec}: {e}")))
}

fn load_rules(paths: &[std::path::PathBuf]) -> Result<Vec<Rule>, Failure> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(parse_rules(&read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?);
    }
    Ok(out)
}

fn write_architecture(a: &Architecture, out: Option<&Path>) -> Result<(), Failure> {
    let text = a.to_canonical();
    match out {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    cosa::to_canonical_json(v)
}

fn report_text(r: &ConformanceReport) -> String {
    let mut s = String::new();
    for v in &r.violations {
        if v.message.starts_with(&v.code) {
            let _ = writeln!(s, "{}", v.message);
        } else {
            let _ = writeln!(s, "{}: {}", v.code, v.message);
        }
    }
    let _ = writeln!(
        s,
        "{}",
        if r.ok {
            "ok".to_owned()
        } else {
            format!("{} violations", r.violations.len())
        }
    );
    s
}

fn print_report(r: &ConformanceReport, format: ReportFormat) -> i32 {
    match format {
        ReportFormat::Text => print!("{}", report_text(r)),
        ReportFormat::Json => print!("{}", json(r)),
    }
    if r.ok {
        OK
    } else {
        VIOLATIONS
    }
}

fn descriptor(args: &OpArgs) -> Result<OperationDescriptor, Failure> {
    if let Some(p) = &args.descriptor {
        return serde_json::from_str(&read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())));
    }
    let op = args.op.ok_or_else(|| usage("one of --op and --descriptor is required"))?;
    let name = match op {
        Op::Create => OperationName::Create,
        Op::Delete => OperationName::Delete,
        Op::MovePort => OperationName::MovePort,
        Op::Split => OperationName::SplitComponent,
        Op::Merge => OperationName::MergeComponents,
        Op::MoveIn => OperationName::MoveIn,
        Op::MoveOut => OperationName::MoveOut,
        Op::Delegate => OperationName::DelegatePort,
    };
    let mut d = OperationDescriptor::new(name, &args.context);
    let new_name = if name == OperationName::Create { "name" } else { "newName" };
    let given = [
        ("parent", args.parent.clone().map(serde_json::Value::from)),
        (new_name, args.name.clone().map(serde_json::Value::from)),
        ("target", args.target.clone().map(serde_json::Value::from)),
        ("kind", args.kind.clone().map(serde_json::Value::from)),
        ("ports", (!args.ports.is_empty()).then(|| args.ports.clone().into())),
        ("with", (!args.with.is_empty()).then(|| args.with.clone().into())),
    ];
    for (k, v) in given {
        if let Some(v) = v {
            d = d.with_param(k, v);
        }
    }
    d.check().map_err(usage)?;
    Ok(d)
}

fn sequence_text(r: &SequenceReport) -> String {
    let mut s = format!("sequence: {}\n", r.sequence);
    for f in &r.findings {
        let _ = writeln!(s, "position {} {}: {}", f.position, f.rule, f.message);
    }
    if let Some(d) = &r.dynamic {
        let _ = writeln!(s, "{} rewrites applied", d.trace.steps.len());
        if let Some(e) = &d.error {
            let _ = writeln!(s, "run failed: {e}");
        }
    }
    s.push_str(if r.is_ok() { "applicable\n" } else { "not applicable\n" });
    s
}

pub fn run(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Validate { file, format } => {
            let a = load_architecture(&file)?;
            let report = cosa::validate(&a).map_err(|e| usage(format!("{}: {e}", file.display())))?;
            Ok(print_report(&report, format))
        }
        Command::CheckStyle { file, style, format } => {
            let style = load_style(&style)?;
            let a = load_architecture(&file)?;
            let report = check_style(&a, &style).map_err(usage)?;
            Ok(print_report(&report, format))
        }
        Command::Apply { file, op, out } => {
            let d = descriptor(&op)?;
            let a = load_architecture(&file)?;
            match d.apply(&a) {
                Ok(ev) => {
                    write_architecture(&ev.architecture, out.as_deref())?;
                    Ok(OK)
                }
                Err(e) => {
                    eprintln!("{d}: {e}");
                    Ok(VIOLATIONS)
                }
            }
        }
        Command::Pattern {
            file,
            pattern,
            script,
            out,
            format,
        } => {
            let p = pattern_by_name(&pattern).ok_or_else(|| usage(format!("no pattern `{pattern}`")))?;
            let mut script = DecisionScript::from_document(&read(&script)?)
                .map_err(|e| usage(format!("{}: {e}", script.display())))?;
            let a = load_architecture(&file)?;
            let run = run_pattern(&p, &a, &mut script);
            match format {
                ReportFormat::Json => print!("{}", json(&run)),
                ReportFormat::Text => {
                    for t in &run.trace {
                        println!("{}: {}", t.step, t.detail);
                    }
                    if let Some(r) = &run.final_report {
                        print!("{}", report_text(r));
                    }
                }
            }
            if run.state != RunState::Finished {
                eprintln!("{}", run.error.as_deref().unwrap_or("the run did not finish"));
                return Ok(VIOLATIONS);
            }
            write_architecture(&run.architecture, out.as_deref())?;
            Ok(if run.final_report.is_some_and(|r| r.ok) { OK } else { VIOLATIONS })
        }
        Command::Cpa {
            rules: files,
            builtin,
            style,
            max_overlap,
            format,
        } => {
            let mut set = load_rules(&files)?;
            if builtin == Some(BuiltinRules::ClientServerRules) {
                set.extend(rules::client_server_rules());
            }
            if set.is_empty() {
                return Err(usage("no rules given"));
            }
            let mut opts = match style {
                Some(s) => load_style(&s)?.cpa_options().map_err(usage)?,
                None if builtin.is_some() => load_style("client-server")?.cpa_options().map_err(usage)?,
                None => CpaOptions::new(cosa_type_graph().clone()),
            };
            if let Some(n) = max_overlap {
                opts = opts.with_max_overlap_nodes(n);
            }
            let m = cpa_matrix(&set, &opts).map_err(usage)?;
            print!(
                "{}",
                match format {
                    MatrixFormat::Table => m.to_table(),
                    MatrixFormat::Json => m.to_json(),
                    MatrixFormat::Dot => m.to_dot(),
                }
            );
            Ok(OK)
        }
        Command::Sequence {
            builtin,
            rules: files,
            order,
            host,
            params,
            assume,
            max_rewrites,
            format,
        } => {
            let (text, default_name) = match (builtin, order) {
                (Some(BuiltinSequence::ServerIntro), _) => (rules::SERVER_INTRO.to_owned(), Some("Server")),
                (Some(BuiltinSequence::ClientIntro), _) => (rules::CLIENT_INTRO.to_owned(), Some("Client")),
                (None, Some(o)) => (o, None),
                (None, None) => return Err(usage("one of --builtin and --order is required")),
            };
            let mut pool = load_rules(&files)?;
            pool.extend(rules::client_server_rules());
            let seq = RuleSequence::parse(&text, |n| pool.iter().find(|r| r.name() == n).cloned()).map_err(usage)?;
            let mut env = Bindings::new();
            if let Some(n) = default_name {
                env.insert(rules::NAME_PARAM.to_owned(), Value::from(n));
            }
            for p in &params {
                let (k, v) = p
                    .split_once('=')
                    .ok_or_else(|| usage(format!("parameter `{p}` is not key=value")))?;
                env.insert(k.to_owned(), Value::from(v));
            }
            let host = match host {
                Some(h) => Some(cosa::encode(&load_architecture(&h)?).map_err(usage)?),
                None => None,
            };
            let assumed = assume.unwrap_or_else(plain_types);
            let report = analyze_sequence(&seq, cosa_type_graph(), &assumed, host.as_ref(), &env, max_rewrites);
            match format {
                ReportFormat::Text => print!("{}", sequence_text(&report)),
                ReportFormat::Json => print!("{}", json(&report)),
            }
            Ok(if report.is_ok() { OK } else { VIOLATIONS })
        }
        Command::List => {
            println!("styles:");
            for s in builtin_styles() {
                println!("  {}", s.name);
            }
            println!("patterns:");
            for p in builtin_patterns() {
                println!("  {}: {}", p.name, p.description);
            }
            println!("operations:");
            for op in OperationName::ALL {
                let (context, required, optional) = op.signature();
                let mut line = format!("  {op} <{context}>");
                for r in required {
                    let _ = write!(line, " {r}");
                }
                for o in optional {
                    let _ = write!(line, " [{o}]");
                }
                println!("{line}");
            }
            Ok(OK)
        }
        Command::Serve {
            port,
            bind,
            allow_origin,
        } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
                )
                .init();
            let origin = allow_origin
                .map(|o| o.parse().map_err(|_| usage(format!("bad origin `{o}`"))))
                .transpose()?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Internal(e.to_string()))?;
            rt.block_on(archevol_service::serve((bind, port).into(), origin))
                .map_err(|e| Failure::Internal(e.to_string()))?;
            Ok(OK)
        }
    }
}
