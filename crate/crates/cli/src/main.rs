use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use cocofj::harness::{diff_check, run_benchmark, BenchOptions, Case};
use cocofj::synth::{mutate, synthesize, Naming, Scheme, SynthConfig};
use cocofj::{
    check_cocontextual, contextual, parse_classes, parse_program, render, ClassDecl, Edit, ParseError, ProgramNode,
    Session, Span, Tuning, TypeError, Verdict,
};

#[derive(Parser)]
#[command(
    name = "cocofj",
    version,
    about = "Contextual and co-contextual Featherweight Java type checking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Contextual,
    Cocontextual,
}

#[derive(clap::Args)]
struct TuningArgs {
    /// Disable condition normalization (also disables in-depth merging).
    #[arg(long)]
    no_normalize: bool,
    /// Disable in-depth merging of requirements.
    #[arg(long)]
    no_merge: bool,
}

impl TuningArgs {
    fn tuning(&self) -> Tuning {
        Tuning {
            normalize: !self.no_normalize,
            in_depth_merge: !self.no_merge,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Type check a program.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "cocontextual")]
        mode: Mode,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Replay an edit script against a memoized session.
    Session {
        file: PathBuf,
        /// Lines of `replace <class> <file>`, `delete <class>` or `insert <file>`.
        script: PathBuf,
        /// Memo cache file, loaded if present and written back afterwards.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Write a synthesized program.
    Synth {
        #[arg(long, default_value = "super")]
        scheme: Scheme,
        #[arg(long, default_value = "unique")]
        naming: Naming,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        height: usize,
        /// Apply one seeded fault to the program.
        #[arg(long)]
        seed: Option<u64>,
        /// Output path; standard output if absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Time the contextual, initial co-contextual and incremental checks.
    Bench {
        /// Schemes to run; all if absent.
        #[arg(long, value_delimiter = ',')]
        scheme: Vec<Scheme>,
        /// Naming schemes to run; `unique` if absent.
        #[arg(long, value_delimiter = ',')]
        naming: Vec<Naming>,
        #[arg(long, value_delimiter = ',', default_value = "4")]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        height: Vec<usize>,
        #[arg(long, default_value_t = 30)]
        repetitions: usize,
        /// Line-delimited JSON records, one per sample.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Run both checkers on every `.fj` file of a directory.
    Diff {
        corpus: PathBuf,
        /// Also check this many seeded mutants of each file expected to
        /// be accepted.
        #[arg(long, default_value_t = 0)]
        mutants: u64,
        /// First mutation seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tuning: TuningArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { file, mode, tuning } => {
            let program = load_program(&file)?;
            let verdict = match mode {
                Mode::Contextual => contextual::check_program(&program),
                Mode::Cocontextual => check_cocontextual(&program, tuning.tuning()).verdict,
            };
            Ok(report_verdict(&file, &program, &verdict))
        }
        Command::Session {
            file,
            script,
            cache,
            tuning,
        } => run_session(&file, &script, cache.as_deref(), tuning.tuning()),
        Command::Synth {
            scheme,
            naming,
            k,
            height,
            seed,
            out,
        } => {
            if k == 0 || height == 0 {
                bail!("--k and --height must be positive");
            }
            let mut program = synthesize(&SynthConfig::new(scheme, naming, k, height));
            if let Some(seed) = seed {
                let m = mutate(&program, seed);
                eprintln!(
                    "fault {:?} in {}; expect {}",
                    m.fault,
                    m.target.as_ref().map_or("-", |c| c.as_str()),
                    if m.expect_accept { "accept" } else { "reject" }
                );
                program = m.program;
            }
            let text = render(&program);
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench {
            scheme,
            naming,
            k,
            height,
            repetitions,
            report,
            tuning,
        } => {
            if k.contains(&0) || height.contains(&0) {
                bail!("--k and --height must be positive");
            }
            let schemes = if scheme.is_empty() {
                Scheme::ALL.to_vec()
            } else {
                scheme
            };
            let namings = if naming.is_empty() {
                vec![Naming::Unique]
            } else {
                naming
            };
            let mut configs = Vec::new();
            for &s in &schemes {
                for &n in &namings {
                    for &kk in &k {
                        for &h in &height {
                            configs.push(SynthConfig::new(s, n, kk, h));
                        }
                    }
                }
            }
            let opts = BenchOptions {
                repetitions,
                tuning: tuning.tuning(),
                ..BenchOptions::default()
            };
            let result = run_benchmark(&configs, &opts);
            print!("{}", result.table());
            if let Some(path) = report {
                let mut out = std::io::BufWriter::new(
                    fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
                );
                for r in result.records() {
                    writeln!(out, "{}", serde_json::to_string(&r)?)?;
                }
                out.flush()?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Diff {
            corpus,
            mutants,
            seed,
            tuning,
        } => {
            let cases = load_corpus(&corpus, seed..seed.saturating_add(mutants))?;
            let report = diff_check(&cases, tuning.tuning());
            print!("{report}");
            Ok(if report.is_clean() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_failure(path: &Path, e: &ParseError) -> anyhow::Error {
    anyhow::anyhow!("{}:{}:{}: syntax error: {}", path.display(), e.line, e.col, e.message)
}

fn load_program(path: &Path) -> Result<ProgramNode> {
    parse_program(&read(path)?).map_err(|e| parse_failure(path, &e))
}

fn load_class(path: &Path) -> Result<ClassDecl> {
    let mut classes = parse_classes(&read(path)?).map_err(|e| parse_failure(path, &e))?;
    if classes.len() != 1 {
        bail!(
            "{}: expected exactly one class, found {}",
            path.display(),
            classes.len()
        );
    }
    Ok(classes.remove(0))
}

/// Position of an error: its own span, else the declaration it names.
fn locate(program: &ProgramNode, err: &TypeError) -> Span {
    if err.span.is_known() {
        return err.span;
    }
    let Some(class) = err.class.as_ref() else {
        return Span::new(1, 1);
    };
    let Some(decl) = program.classes().into_iter().find(|d| &d.name == class) else {
        return Span::new(1, 1);
    };
    err.method
        .as_ref()
        .and_then(|m| decl.method(m.as_str()))
        .map(|m| m.span)
        .filter(Span::is_known)
        .unwrap_or(decl.span)
}

fn print_errors(file: &Path, program: &ProgramNode, errors: &[TypeError]) {
    for e in errors {
        let span = locate(program, e);
        let scope = match (&e.class, &e.method) {
            (Some(c), Some(m)) => format!("in {c}.{m}: "),
            (Some(c), None) => format!("in {c}: "),
            _ => String::new(),
        };
        eprintln!("{}:{}: error[T-{}]: {scope}{}", file.display(), span, e.rule, e.message);
    }
}

fn report_verdict(file: &Path, program: &ProgramNode, verdict: &Verdict) -> ExitCode {
    match verdict {
        Verdict::Accept => {
            println!("accept");
            ExitCode::SUCCESS
        }
        Verdict::Reject(errors) => {
            println!("reject");
            print_errors(file, program, errors);
            ExitCode::from(1)
        }
    }
}

enum Directive {
    Replace(String, PathBuf),
    Delete(String),
    Insert(PathBuf),
}

fn parse_script(path: &Path) -> Result<Vec<(String, Directive)>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::new();
    for (n, line) in read(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let d = match words.as_slice() {
            ["replace", class, file] => Directive::Replace(class.to_string(), base.join(file)),
            ["delete", class] => Directive::Delete(class.to_string()),
            ["insert", file] => Directive::Insert(base.join(file)),
            _ => bail!("{}:{}: unknown directive {line:?}", path.display(), n + 1),
        };
        out.push((line.to_string(), d));
    }
    Ok(out)
}

fn run_session(file: &Path, script: &Path, cache: Option<&Path>, tuning: Tuning) -> Result<ExitCode> {
    let program = load_program(file)?;
    let directives = parse_script(script)?;
    let mut session = Session::new(program, tuning);
    if let Some(path) = cache.filter(|p| p.exists()) {
        let loaded = session.load_cache(path)?;
        println!("cache: loaded {loaded} entries");
    }
    let report = session.check();
    println!(
        "initial: {} (recomputed {}/{})",
        word(&report.outcome.verdict),
        report.recomputed,
        report.nodes
    );
    let mut last = report.outcome.verdict;
    for (i, (text, d)) in directives.into_iter().enumerate() {
        let edit = match d {
            Directive::Replace(class, path) => Edit::Replace(class.as_str().into(), load_class(&path)?),
            Directive::Delete(class) => Edit::Delete(class.as_str().into()),
            Directive::Insert(path) => Edit::Insert(load_class(&path)?),
        };
        session
            .edit(edit)
            .with_context(|| format!("{}: edit {}", script.display(), i + 1))?;
        let report = session.check();
        println!(
            "edit {} `{text}`: {} (recomputed {}/{})",
            i + 1,
            word(&report.outcome.verdict),
            report.recomputed,
            report.nodes
        );
        last = report.outcome.verdict;
    }
    if let Some(path) = cache {
        session.save_cache(path)?;
    }
    Ok(match &last {
        Verdict::Accept => ExitCode::SUCCESS,
        Verdict::Reject(errors) => {
            print_errors(file, session.program(), errors);
            ExitCode::from(1)
        }
    })
}

fn word(v: &Verdict) -> &'static str {
    if v.is_accept() {
        "accept"
    } else {
        "reject"
    }
}

/// Reads `*.fj` files in name order. A line `// expect: accept` or
/// `// expect: reject` records the known verdict.
fn load_corpus(dir: &Path, seeds: std::ops::Range<u64>) -> Result<Vec<Case>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "fj"));
    paths.sort();
    let mut cases = Vec::new();
    for path in paths {
        let text = read(&path)?;
        let program = parse_program(&text).map_err(|e| parse_failure(&path, &e))?;
        let expect_accept = text.lines().find_map(|l| match l.trim() {
            "// expect: accept" => Some(true),
            "// expect: reject" => Some(false),
            _ => None,
        });
        let name = path.display().to_string();
        if expect_accept == Some(true) {
            for seed in seeds.clone() {
                let m = mutate(&program, seed);
                cases.push(Case {
                    name: format!("{name} mutant {seed} ({:?})", m.fault),
                    program: m.program,
                    expect_accept: Some(m.expect_accept),
                });
            }
        }
        cases.push(Case {
            name,
            program,
            expect_accept,
        });
    }
    Ok(cases)
}
