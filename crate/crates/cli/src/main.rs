use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ccsn_core::abstraction::{check_xi, discriminate, Discrimination, XiVerdict};
use ccsn_core::generate::{random_program, GenConfig};
use ccsn_core::laws::{left_biased_choice_merge, run_all, LawConfig};
use ccsn_core::{den_d, den_o, parse_program, Calculus, Program};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "ccsn",
    version,
    about = "Operational and denotational semantics for CCS with multiparty synchronization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Calculus; inferred from a `.ccsnp` extension when omitted.
    #[arg(long, global = true, value_enum)]
    calculus: Option<CalculusArg>,
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    nbar: u64,
    /// Symbol budget for both semantics.
    #[arg(long, global = true, default_value_t = 48, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = SemanticsArg::Both)]
    semantics: SemanticsArg,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the trace sets of a program.
    Run { file: PathBuf },
    /// Compare ξ of the operational semantics with the denotational one.
    CheckXi {
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        file: Option<PathBuf>,
        /// Check this many seeded random programs instead of a file.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Run the algebraic law suites.
    Laws {
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        /// Swap in a broken choice merge to check that the suites notice.
        #[arg(long, hide = true)]
        inject_mutation: bool,
    },
    /// Search for a context telling two programs apart.
    Discriminate {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_depth: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CalculusArg {
    Ccsn,
    Ccsnplus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SemanticsArg {
    Op,
    Den,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Serialize)]
struct Config {
    calculus: Option<Calculus>,
    nbar: usize,
    budget: usize,
    semantics: SemanticsArg,
    seed: u64,
}

enum Failure {
    Input(String),
    Property,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

struct Ctx {
    cli: Cli,
    nbar: usize,
    budget: usize,
}

impl Ctx {
    fn calculus_for(&self, path: &Path) -> Calculus {
        match self.cli.calculus {
            Some(CalculusArg::Ccsn) => Calculus::Ccsn,
            Some(CalculusArg::Ccsnplus) => Calculus::CcsnPlus,
            None if path.extension().is_some_and(|e| e == "ccsnp") => Calculus::CcsnPlus,
            None => Calculus::Ccsn,
        }
    }

    fn load(&self, path: &Path) -> Result<Program, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        parse_program(&text, self.calculus_for(path), self.nbar)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }

    fn emit(&self, results: Vec<Value>, text: String) {
        match self.cli.format {
            Format::Text => print!("{text}"),
            Format::Json => {
                let config = Config {
                    calculus: self.cli.calculus.map(|c| match c {
                        CalculusArg::Ccsn => Calculus::Ccsn,
                        CalculusArg::Ccsnplus => Calculus::CcsnPlus,
                    }),
                    nbar: self.nbar,
                    budget: self.budget,
                    semantics: self.cli.semantics,
                    seed: self.cli.seed,
                };
                let report = json!({ "config": config, "results": results });
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            }
        }
    }
}

fn cmd_run(ctx: &Ctx, file: &Path) -> Result<(), Failure> {
    let p = ctx.load(file)?;
    let sem = ctx.cli.semantics;
    let mut result = json!({ "file": file.display().to_string() });
    let mut text = String::new();
    if sem != SemanticsArg::Den {
        let o = den_o(p.main(), &p, ctx.budget)?;
        text += &format!("O = {o}\n");
        result["op"] = serde_json::to_value(&o)?;
    }
    if sem != SemanticsArg::Op {
        let d = den_d(p.main(), &p, ctx.budget)?;
        text += &format!("D = {d}\n");
        result["den"] = serde_json::to_value(&d)?;
    }
    ctx.emit(vec![result], text);
    Ok(())
}

fn xi_result(label: &str, p: &Program, m: usize) -> Result<(Value, String, bool), Failure> {
    let check = check_xi(p.main(), p, m)?;
    let equal = check.verdict == XiVerdict::Equal;
    let mut value = json!({ "program": label, "op": check.op, "den": check.den });
    let text = match &check.verdict {
        XiVerdict::Equal => {
            value["verdict"] = json!("equal");
            format!("{label}: equal\n")
        }
        XiVerdict::Diff { witness } => {
            value["verdict"] = json!("diff");
            value["witness"] = serde_json::to_value(witness)?;
            format!(
                "{label}: diff at {witness}\n  xi(O) = {}\n  D     = {}\n",
                check.op, check.den
            )
        }
    };
    Ok((value, text, equal))
}

fn cmd_check_xi(ctx: &Ctx, file: Option<&Path>, random: Option<usize>) -> Result<(), Failure> {
    let mut results = Vec::new();
    let mut text = String::new();
    let mut all_equal = true;
    let mut push = |(v, t, eq): (Value, String, bool)| {
        results.push(v);
        text += &t;
        all_equal &= eq;
    };
    if let Some(n) = random {
        let calculus = match ctx.cli.calculus {
            Some(CalculusArg::Ccsnplus) => Calculus::CcsnPlus,
            _ => Calculus::Ccsn,
        };
        let cfg = GenConfig {
            nbar: ctx.nbar,
            ..GenConfig::new(calculus)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.cli.seed);
        for _ in 0..n {
            let p = random_program(&mut rng, &cfg);
            let label = p.to_string().replace('\n', " ");
            push(xi_result(&label, &p, ctx.budget)?);
        }
    } else if let Some(file) = file {
        let p = ctx.load(file)?;
        push(xi_result(&file.display().to_string(), &p, ctx.budget)?);
    }
    let failures = results.iter().filter(|v| v["verdict"] != "equal").count();
    text += &format!("{} checked, {failures} differ\n", results.len());
    ctx.emit(results, text);
    if all_equal {
        Ok(())
    } else {
        Err(Failure::Property)
    }
}

fn cmd_laws(ctx: &Ctx, cases: usize, inject_mutation: bool) -> Result<(), Failure> {
    let mut cfg = LawConfig {
        cases,
        nbar: ctx.nbar,
        ..LawConfig::new(ctx.cli.seed)
    };
    if inject_mutation {
        cfg.choice_merge = left_biased_choice_merge;
    }
    let results = run_all(&cfg);
    let mut text = String::new();
    for r in &results {
        let status = if r.passed() { "pass" } else { "FAIL" };
        text += &format!("{status} {:<12} {} ({} cases", r.suite, r.law, r.cases);
        if r.failures > 0 {
            text += &format!(
                ", {} failed, e.g. {}",
                r.failures,
                r.counterexample.as_deref().unwrap_or("")
            );
        }
        text += ")\n";
    }
    let ok = results.iter().all(|r| r.passed());
    let values = results
        .iter()
        .map(serde_json::to_value)
        .collect::<Result<_, _>>()?;
    ctx.emit(values, text);
    if ok {
        Ok(())
    } else {
        Err(Failure::Property)
    }
}

/// Both programs' declarations in one program; a variable declared in both
/// must have the same body.
fn merge_programs(p1: &Program, p2: &Program) -> Result<Program, Failure> {
    if p1.calculus() != p2.calculus() {
        return Err(Failure::Input(
            "the two programs are in different calculi".into(),
        ));
    }
    let mut decls = p1.decls().clone();
    for (y, body) in p2.decls() {
        if decls.get(y).is_some_and(|b| b != body) {
            return Err(Failure::Input(format!(
                "`{y}` is declared differently in the two programs"
            )));
        }
        decls.insert(y.clone(), body.clone());
    }
    let channels = p1.channels().union(p2.channels()).cloned().collect();
    Ok(Program::new(
        p1.calculus(),
        channels,
        decls,
        p1.main().clone(),
        p1.nbar(),
    )?)
}

fn cmd_discriminate(
    ctx: &Ctx,
    file1: &Path,
    file2: &Path,
    max_depth: usize,
) -> Result<(), Failure> {
    let p1 = ctx.load(file1)?;
    let p2 = ctx.load(file2)?;
    let p = merge_programs(&p1, &p2)?;
    let (value, text) = match discriminate(p1.main(), p2.main(), &p, max_depth, ctx.budget)? {
        Discrimination::Found {
            context,
            left,
            right,
            examined,
        } => (
            json!({
                "verdict": "found",
                "context": context.0.to_string(),
                "left": left,
                "right": right,
                "examined": examined,
            }),
            format!("Found({})\n  O1 = {}\n  O2 = {}\n", context.0, left, right),
        ),
        Discrimination::NotFound {
            max_depth,
            examined,
        } => (
            json!({ "verdict": "not_found", "max_depth": max_depth, "examined": examined }),
            format!("NotFound (depth <= {max_depth}, {examined} contexts)\n"),
        ),
    };
    ctx.emit(vec![value], text);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        nbar: cli.nbar as usize,
        budget: cli.budget as usize,
        cli,
    };
    let outcome = match &ctx.cli.command {
        Command::Run { file } => cmd_run(&ctx, file),
        Command::CheckXi { file, random } => cmd_check_xi(&ctx, file.as_deref(), *random),
        Command::Laws {
            cases,
            inject_mutation,
        } => cmd_laws(&ctx, *cases, *inject_mutation),
        Command::Discriminate {
            file1,
            file2,
            max_depth,
        } => cmd_discriminate(&ctx, file1, file2, *max_depth),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Property) => ExitCode::from(2),
    }
}
