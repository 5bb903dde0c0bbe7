use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use glattice::error::{Error, Result};
use glattice::groups::{Group, DEFAULT_SUBGROUP_BOUND};
use glattice::io::{read_json, GroupJson, LatticeJson, SequenceJson, SpecJson, SubgroupJson};
use glattice::lattices::{chevalley_lattice, GLattice};
use glattice::rationality::{
    classify_norm_one, hasse_obstruction, verify_restriction_converse, verify_tensor_rationality, ClassificationReport,
    ClassifyOptions, EtaleSpec, HasseReport, Verdict,
};
use glattice::resolutions::SearchBudget;

mod commands;

#[derive(Parser)]
#[command(name = "glattice", version, about = "Computations with G-lattices and norm one tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Common,
}

#[derive(Args)]
struct Common {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "GLATTICE_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for batches.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: u32,
    /// Largest group order for which subgroups are enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_SUBGROUP_BOUND, value_parser = positive)]
    bound_subgroups: usize,
    /// Largest group order for which H^2 is computed from cochains.
    #[arg(long = "bound-h2", global = true, default_value_t = glattice::cohomology::DEFAULT_H2_BOUND, value_parser = positive)]
    bound_h2: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exit with status 2 when a verdict is unknown.
    #[arg(long, global = true)]
    strict: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Order, generators and subgroup classes of a group.
    GroupInfo {
        #[arg(long)]
        group: PathBuf,
    },
    /// H^0, H^1, Tate cohomology per subgroup class, H^2 and Sha^2_omega.
    LatticeCohomology {
        #[arg(long)]
        lattice: PathBuf,
    },
    /// Permutation order of a lattice, or of J_{G/H}.
    Pord {
        #[arg(long, conflicts_with_all = ["group", "subgroup"])]
        lattice: Option<PathBuf>,
        #[arg(long, requires = "subgroup")]
        group: Option<PathBuf>,
        #[arg(long, requires = "group")]
        subgroup: Option<PathBuf>,
    },
    /// Rationality verdicts for norm one tori; several specs form a batch.
    Classify(SpecInput),
    /// Sha^2_omega of norm one tori.
    Hasse(SpecInput),
    /// Compare the norm one torus of a tensor product with its factors.
    TensorCheck {
        /// Exactly two specs.
        #[arg(long, num_args = 1, required = true)]
        spec: Vec<PathBuf>,
        /// Check the restriction to the first factor of the direct product
        /// instead.
        #[arg(long)]
        converse: bool,
    },
    /// Check exactness of a sequence and report the first failing term.
    VerifySeq {
        #[arg(long)]
        sequence: PathBuf,
    },
}

#[derive(Args)]
struct SpecInput {
    #[arg(long, conflicts_with_all = ["group", "subgroup"])]
    spec: Vec<PathBuf>,
    #[arg(long, requires = "subgroup")]
    group: Option<PathBuf>,
    #[arg(long, requires = "group")]
    subgroup: Option<PathBuf>,
}

enum Failure {
    Input(Error),
    Unknown,
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn load_group(path: &Path) -> Result<Group> {
    read_json::<GroupJson>(path)?.build()
}

fn load_specs(input: &SpecInput) -> Result<Vec<EtaleSpec>> {
    match (&input.group, &input.subgroup) {
        (Some(g), Some(h)) => {
            let g = load_group(g)?;
            let h = read_json::<SubgroupJson>(h)?.build(&g)?;
            Ok(vec![EtaleSpec::transitive(&h)])
        }
        _ if input.spec.is_empty() => Err(Error::Input("give --spec, or --group with --subgroup".into())),
        _ => input.spec.iter().map(|p| read_json::<SpecJson>(p)?.build()).collect(),
    }
}

fn render<T: Serialize>(value: &T, md: impl FnOnce(&T) -> String, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(value).expect("reports serialize") + "\n",
        Format::Md => md(value),
    }
}

fn batch<T: Send>(jobs: u32, specs: &[EtaleSpec], f: impl Fn(&EtaleSpec) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs as usize)
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    pool.install(|| specs.par_iter().map(&f).collect())
}

fn one_or_many<T: Serialize>(items: &[T], md: impl Fn(&T) -> String, format: Format) -> String {
    match (format, items) {
        (Format::Json, [one]) => render(one, |_| String::new(), format),
        (Format::Json, _) => render(&items, |_| String::new(), format),
        (Format::Md, _) => items.iter().map(md).collect::<Vec<_>>().join("\n---\n\n"),
    }
}

fn run(cli: &Cli) -> std::result::Result<String, (String, Failure)> {
    let o = &cli.opts;
    let opts = ClassifyOptions {
        bound_subgroups: o.bound_subgroups,
        bound_h2: o.bound_h2,
        seed: o.seed,
        budget: SearchBudget::default(),
    };
    let fail = |out: String, f: Failure| Err((out, f));
    let wrap = |r: Result<String>| r.map_err(|e| (String::new(), Failure::Input(e)));
    match &cli.command {
        Command::GroupInfo { group } => wrap((|| {
            let info = commands::group_info(&load_group(group)?, o.bound_subgroups)?;
            Ok(render(&info, |i| i.to_markdown(), o.format))
        })()),
        Command::LatticeCohomology { lattice } => wrap((|| {
            let m = read_json::<LatticeJson>(lattice)?.build()?;
            let rep = commands::lattice_cohomology(&m, o.bound_subgroups, o.bound_h2)?;
            Ok(render(&rep, |r| r.to_markdown(), o.format))
        })()),
        Command::Pord { lattice, group, subgroup } => wrap((|| {
            let m: GLattice = match (lattice, group, subgroup) {
                (Some(l), _, _) => read_json::<LatticeJson>(l)?.build()?,
                (None, Some(g), Some(h)) => {
                    let g = load_group(g)?;
                    let h = read_json::<SubgroupJson>(h)?.build(&g)?;
                    chevalley_lattice(&glattice::groups::GSet::cosets(&h))?
                }
                _ => return Err(Error::Input("give --lattice, or --group with --subgroup".into())),
            };
            let rep = commands::pord(&m, o.bound_subgroups)?;
            Ok(render(&rep, |r| r.to_markdown(), o.format))
        })()),
        Command::Classify(input) => {
            let specs = load_specs(input).map_err(|e| (String::new(), Failure::Input(e)))?;
            let reports: Vec<ClassificationReport> =
                batch(o.jobs, &specs, |s| classify_norm_one(s, &opts)).map_err(|e| (String::new(), Failure::Input(e)))?;
            let out = one_or_many(&reports, |r| r.to_markdown(), o.format);
            if let Some(r) = reports.iter().find(|r| !r.all_checks_pass()) {
                let names: Vec<&str> =
                    r.cross_checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                return fail(out, Failure::Check(format!("cross-checks failed: {}", names.join(", "))));
            }
            if o.strict && reports.iter().any(|r| r.stably_rational == Verdict::Unknown) {
                return fail(out, Failure::Unknown);
            }
            Ok(out)
        }
        Command::Hasse(input) => {
            let specs = load_specs(input).map_err(|e| (String::new(), Failure::Input(e)))?;
            let reports: Vec<HasseReport> =
                batch(o.jobs, &specs, |s| hasse_obstruction(s, &opts)).map_err(|e| (String::new(), Failure::Input(e)))?;
            let out = one_or_many(&reports, |r| r.to_markdown(), o.format);
            if reports.iter().any(|r| r.routes_agree == Some(false)) {
                return fail(out, Failure::Check("the two Sha^2_omega computations disagree".into()));
            }
            Ok(out)
        }
        Command::TensorCheck { spec, converse } => {
            if spec.len() != 2 {
                return fail(String::new(), Failure::Input(Error::Input("tensor-check needs exactly two --spec files".into())));
            }
            let load = |p: &PathBuf| read_json::<SpecJson>(p).and_then(|s| s.build());
            let (a, b) = match (load(&spec[0]), load(&spec[1])) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return fail(String::new(), Failure::Input(e)),
            };
            let (out, passed) = if *converse {
                let rep = verify_restriction_converse(&a, &b, &opts).map_err(|e| (String::new(), Failure::Input(e)))?;
                (render(&rep, |r| r.to_markdown(), o.format), rep.all_checks_pass())
            } else {
                let rep = verify_tensor_rationality(&a, &b, &opts).map_err(|e| (String::new(), Failure::Input(e)))?;
                let unknown = rep.product.stably_rational == Verdict::Unknown;
                let out = render(&rep, |r| r.to_markdown(), o.format);
                if rep.all_checks_pass() && o.strict && unknown {
                    return fail(out, Failure::Unknown);
                }
                (out, rep.all_checks_pass())
            };
            if !passed {
                return fail(out, Failure::Check("cross-checks failed".into()));
            }
            Ok(out)
        }
        Command::VerifySeq { sequence } => {
            let e = read_json::<SequenceJson>(sequence)
                .and_then(|s| s.build())
                .map_err(|e| (String::new(), Failure::Input(e)))?;
            let rep = commands::verify_sequence(&e).map_err(|e| (String::new(), Failure::Input(e)))?;
            let out = render(&rep, |r| r.to_markdown(), o.format);
            match rep.failing_node {
                None => Ok(out),
                Some(node) => fail(out, Failure::Input(Error::NotExact { node, detail: rep.detail.clone() })),
            }
        }
    }
}

fn emit(text: &str, output: Option<&Path>) -> std::io::Result<()> {
    match output {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, failure) = match run(&cli) {
        Ok(text) => (text, None),
        Err((text, f)) => (text, Some(f)),
    };
    if !text.is_empty() {
        if let Err(e) = emit(&text, cli.opts.output.as_deref()) {
            eprintln!("error: cannot write report: {e}");
            return ExitCode::from(1);
        }
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Some(Failure::Unknown) => {
            eprintln!("error: stable rationality verdict is unknown (--strict)");
            ExitCode::from(2)
        }
        Some(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
