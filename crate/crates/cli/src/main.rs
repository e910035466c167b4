use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pb_core::gen::{gen_instance, gen_profile, GenError, GenParams, ProfileKind};
use pb_core::model::{
    check_feasibility, effective_bounds, parse_instance_file, parse_votes_file, to_canonical_json,
    validate_profile, LabelPolicy, VoteRecord,
};
use pb_core::profiles::classify;
use pb_core::strategy::{
    find_profitable_deviation, fixture, fixtures, SpaceOptions, StrategyError,
};
use pb_core::{
    solve, Instance, ModelError, SolveError, SolveMode, SolverConfig, TieBreakPolicy, Vote, VoterId,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "pb",
    version,
    about = "Participatory budgeting with interacting projects"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance (and optionally a votes file) and print effective bounds.
    Validate {
        instance: PathBuf,
        votes: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Report whether the profile is independent / substitute-chain per group.
    Classify {
        instance: PathBuf,
        votes: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Aggregate the votes into a funded bundle.
    Tally {
        instance: PathBuf,
        votes: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Search one voter's misreports for a gain in true utility.
    Attack {
        instance: PathBuf,
        votes: PathBuf,
        #[arg(long)]
        voter: u32,
        /// Search full ballots (the default); listed for scripts that want it explicit.
        #[arg(long, conflicts_with = "single_group")]
        exhaustive: bool,
        /// Vary one group at a time, keeping the rest of the truthful ballot.
        #[arg(long)]
        single_group: bool,
        /// Never try complement flags.
        #[arg(long)]
        no_complements: bool,
        /// Refuse deviation spaces larger than this.
        #[arg(long, default_value_t = 2_000_000)]
        space_cap: u128,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Generate a seeded random instance and profile.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = KindArg::General)]
        kind: KindArg,
        /// `MIN:MAX` project count.
        #[arg(long, value_parser = parse_range)]
        projects: Option<(u64, u64)>,
        #[arg(long, value_parser = parse_range)]
        voters: Option<(u64, u64)>,
        #[arg(long, value_parser = parse_range)]
        budget: Option<(u64, u64)>,
        #[arg(long, value_parser = parse_range)]
        cost: Option<(u64, u64)>,
        #[arg(long)]
        max_group_size: Option<usize>,
        #[arg(long)]
        complement_prob: Option<f64>,
        #[arg(long)]
        max_weight: Option<u64>,
        /// Directory for instance.json and votes.json; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in fixtures or write them to disk.
    Fixtures {
        /// Write every fixture to DIR/<name>/.
        #[arg(long, value_name = "DIR", conflicts_with = "show")]
        write_all: Option<PathBuf>,
        /// Print one fixture's instance and votes.
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
    /// Run the HTTP election service (PB_BIND, PB_DATA_DIR, PB_SMAX_CAP).
    Serve {
        #[arg(long)]
        bind: Option<String>,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// `default`, `index-sum`, or `file:<path>` with a tie-break policy.
    #[arg(long)]
    tiebreak: Option<String>,
    #[arg(long)]
    smax_cap: Option<usize>,
    #[arg(long)]
    distinct_cap: Option<usize>,
    #[arg(long)]
    oracle_cap: Option<usize>,
    /// Let greedy stop once no project adds welfare.
    #[arg(long)]
    no_pad: bool,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Auto,
    Greedy,
    Exact,
    Distinct,
    Oracle,
}

impl From<ModeArg> for SolveMode {
    fn from(m: ModeArg) -> SolveMode {
        match m {
            ModeArg::Auto => SolveMode::Auto,
            ModeArg::Greedy => SolveMode::ForceGreedy,
            ModeArg::Exact => SolveMode::ForceExact,
            ModeArg::Distinct => SolveMode::ForceDistinct,
            ModeArg::Oracle => SolveMode::ForceOracle,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    General,
    Def3,
    Def3WithDeviant,
    Singleton,
    WithComplements,
}

impl From<KindArg> for ProfileKind {
    fn from(k: KindArg) -> ProfileKind {
        match k {
            KindArg::General => ProfileKind::General,
            KindArg::Def3 => ProfileKind::Def3,
            KindArg::Def3WithDeviant => ProfileKind::Def3WithDeviant,
            KindArg::Singleton => ProfileKind::SingletonGroups,
            KindArg::WithComplements => ProfileKind::WithComplements,
        }
    }
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(':').unwrap_or((s, s));
    let lo: u64 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad range {s:?}, expected MIN:MAX"))?;
    let hi: u64 = b
        .trim()
        .parse()
        .map_err(|_| format!("bad range {s:?}, expected MIN:MAX"))?;
    if lo > hi {
        return Err(format!("range {s:?} has MIN above MAX"));
    }
    Ok((lo, hi))
}

/// A failure with its exit code.
struct Failure {
    exit: u8,
    code: String,
    message: String,
    entity: Option<String>,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)?;
        if let Some(e) = &self.entity {
            write!(f, " (at {e})")?;
        }
        Ok(())
    }
}

const EXIT_VALIDATION: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_CAPACITY: u8 = 4;

impl Failure {
    fn validation(code: &str, message: String) -> Failure {
        Failure {
            exit: EXIT_VALIDATION,
            code: code.into(),
            message,
            entity: None,
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Failure {
        Failure::validation("Io", format!("{}: {e}", path.display()))
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Failure {
        let exit = if matches!(e, ModelError::Infeasible(_)) {
            EXIT_INFEASIBLE
        } else {
            EXIT_VALIDATION
        };
        Failure {
            exit,
            code: e.code().into(),
            message: e.to_string(),
            entity: e.entity(),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Failure {
        match e {
            SolveError::Model(m) => m.into(),
            e => Failure {
                exit: if e.is_capacity() {
                    EXIT_CAPACITY
                } else {
                    EXIT_VALIDATION
                },
                code: e.code().into(),
                message: e.to_string(),
                entity: e.entity(),
            },
        }
    }
}

impl From<StrategyError> for Failure {
    fn from(e: StrategyError) -> Failure {
        match e {
            StrategyError::Solve(s) => s.into(),
            StrategyError::SpaceTooLarge { .. } => Failure {
                exit: EXIT_CAPACITY,
                code: e.code().into(),
                message: e.to_string(),
                entity: None,
            },
            StrategyError::UnknownVoter(v) => Failure {
                exit: EXIT_VALIDATION,
                code: e.code().into(),
                message: e.to_string(),
                entity: Some(v.to_string()),
            },
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn load_instance(path: &Path, policy: LabelPolicy) -> Result<Instance, Failure> {
    let file = parse_instance_file(&read(path)?).map_err(|e| {
        Failure::validation("MalformedInstance", format!("{}: {e}", path.display()))
    })?;
    let instance = Instance::build(&file, policy)?;
    effective_bounds(&instance)?;
    if !check_feasibility(&instance) {
        return Err(ModelError::Infeasible(instance.root_label().id).into());
    }
    Ok(instance)
}

fn load_votes(instance: &Instance, path: &Path) -> Result<(Vec<Vote>, Vec<String>), Failure> {
    let records = parse_votes_file(&read(path)?)
        .map_err(|e| Failure::validation("MalformedVotes", format!("{}: {e}", path.display())))?;
    let (votes, fixes) = validate_profile(instance, &records)?;
    let notes = fixes
        .into_iter()
        .map(|(v, f)| {
            format!(
                "normalized {v}: {}",
                serde_json::to_string(&f).expect("fix serializes")
            )
        })
        .collect();
    Ok((votes, notes))
}

impl SolveArgs {
    fn config(&self) -> SolverConfig {
        let mut c = SolverConfig::default();
        if let Some(v) = self.smax_cap {
            c.smax_cap = v;
        }
        if let Some(v) = self.distinct_cap {
            c.distinct_cap = v;
        }
        if let Some(v) = self.oracle_cap {
            c.oracle_cap = v;
        }
        c.pad = !self.no_pad;
        c
    }

    /// The oracle is the only solver that accepts overlapping labels.
    fn policy(&self) -> LabelPolicy {
        if self.mode == ModeArg::Oracle {
            LabelPolicy::Relaxed
        } else {
            LabelPolicy::RequireLaminar
        }
    }

    fn apply_tiebreak(&self, instance: Instance) -> Result<Instance, Failure> {
        let Some(spec) = &self.tiebreak else {
            return Ok(instance);
        };
        let policy = match spec.as_str() {
            "default" => TieBreakPolicy::default(),
            "index-sum" => TieBreakPolicy::index_sum(),
            other => {
                let Some(path) = other.strip_prefix("file:") else {
                    return Err(Failure::validation(
                        "BadTieBreak",
                        format!(
                            "unknown tie-break {other:?}; use default, index-sum or file:<path>"
                        ),
                    ));
                };
                let path = Path::new(path);
                serde_json::from_str(&read(path)?).map_err(|e| {
                    Failure::validation("BadTieBreak", format!("{}: {e}", path.display()))
                })?
            }
        };
        Ok(instance.with_tiebreak(policy)?)
    }
}

impl OutputArgs {
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
        let body = match self.format {
            Format::Text => text(),
            Format::Structured => {
                let mut s = to_canonical_json(value);
                s.push('\n');
                s
            }
        };
        match &self.out {
            Some(path) => fs::write(path, body).map_err(|e| Failure::io(path, e)),
            None => {
                print!("{body}");
                Ok(())
            }
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }
    fs::write(path, body).map_err(|e| Failure::io(path, e))
}

fn records(votes: &[Vote]) -> Vec<VoteRecord> {
    votes.iter().map(Vote::to_record).collect()
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    laminar: bool,
    effective_bounds: Vec<(String, u64, u64)>,
    voters: Option<usize>,
    normalizations: Vec<String>,
}

#[derive(Serialize)]
struct AttackReport {
    voter: VoterId,
    exhaustive: bool,
    examined: u64,
    deviation: Option<pb_core::DeviationResult>,
}

#[derive(Serialize)]
struct FixtureMeta<'a> {
    name: &'a str,
    summary: &'a str,
    mode: SolveMode,
    attacker: Option<VoterId>,
    allow_complements: bool,
    overlapping_labels: bool,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate {
            instance,
            votes,
            out,
        } => {
            let inst = load_instance(&instance, LabelPolicy::RequireLaminar)?;
            let bounds = effective_bounds(&inst)?;
            let (voters, normalizations) = match votes {
                Some(path) => {
                    let (v, notes) = load_votes(&inst, &path)?;
                    (Some(v.len()), notes)
                }
                None => (None, Vec::new()),
            };
            let report = ValidateReport {
                valid: true,
                laminar: inst.is_laminar(),
                effective_bounds: bounds
                    .bounds
                    .iter()
                    .map(|(l, (lo, hi))| (l.to_string(), *lo, *hi))
                    .collect(),
                voters,
                normalizations,
            };
            out.emit(&report, || {
                let mut s = String::from("valid\neffective bounds:\n");
                for (l, lo, hi) in &report.effective_bounds {
                    s.push_str(&format!("  {l}: [{lo}, {hi}]\n"));
                }
                if let Some(n) = report.voters {
                    s.push_str(&format!("ballots: {n}\n"));
                }
                for n in &report.normalizations {
                    s.push_str(&format!("{n}\n"));
                }
                s
            })
        }
        Command::Classify {
            instance,
            votes,
            out,
        } => {
            let inst = load_instance(&instance, LabelPolicy::Relaxed)?;
            let (votes, _) = load_votes(&inst, &votes)?;
            let report = classify(&inst, &votes);
            out.emit(&report, || report.to_text())
        }
        Command::Tally {
            instance,
            votes,
            solve: args,
            out,
        } => {
            let inst = args.apply_tiebreak(load_instance(&instance, args.policy())?)?;
            let (votes, notes) = load_votes(&inst, &votes)?;
            for n in &notes {
                eprintln!("{n}");
            }
            let result = solve(&inst, &votes, args.mode.into(), &args.config())?;
            out.emit(&result, || result.to_text())
        }
        Command::Attack {
            instance,
            votes,
            voter,
            exhaustive: _,
            single_group,
            no_complements,
            space_cap,
            solve: args,
            out,
        } => {
            let inst = args.apply_tiebreak(load_instance(&instance, args.policy())?)?;
            let (votes, _) = load_votes(&inst, &votes)?;
            let options = SpaceOptions {
                allow_complements: !no_complements,
                single_group,
                cap: space_cap,
            };
            let search = find_profitable_deviation(
                &inst,
                &votes,
                VoterId(voter),
                args.mode.into(),
                &args.config(),
                options,
            )?;
            let report = AttackReport {
                voter: VoterId(voter),
                exhaustive: search.exhaustive,
                examined: search.examined,
                deviation: search.found,
            };
            out.emit(&report, || {
                let scope = if report.exhaustive {
                    "exhaustive"
                } else {
                    "single-group"
                };
                let mut s = format!("searched {} ballots ({scope})\n", report.examined);
                match &report.deviation {
                    Some(d) => s.push_str(&d.to_text()),
                    None => s.push_str("no profitable deviation\n"),
                }
                s
            })
        }
        Command::Gen {
            seed,
            kind,
            projects,
            voters,
            budget,
            cost,
            max_group_size,
            complement_prob,
            max_weight,
            out,
        } => {
            let mut p = GenParams::default().with_seed(seed).with_kind(kind.into());
            if let Some((a, b)) = projects {
                p.projects = (a as usize, b as usize);
            }
            if let Some((a, b)) = voters {
                p.voters = (a as usize, b as usize);
            }
            if let Some(r) = budget {
                p.budget = r;
            }
            if let Some(r) = cost {
                p.cost = r;
            }
            if let Some(s) = max_group_size {
                p.max_group_size = s;
            }
            if let Some(c) = complement_prob {
                p.complement_prob = c;
            }
            if let Some(w) = max_weight {
                p.max_weight = w;
            }
            let inst = gen_instance(&p).map_err(|e: GenError| Failure {
                exit: EXIT_INFEASIBLE,
                code: "GenerationFailed".into(),
                message: e.to_string(),
                entity: None,
            })?;
            let profile = gen_profile(&inst, &p);
            let instance_json = to_canonical_json(&inst.to_file());
            let votes_json = to_canonical_json(&profile.votes);
            match out {
                Some(dir) => {
                    write_file(&dir.join("instance.json"), &instance_json)?;
                    write_file(&dir.join("votes.json"), &votes_json)?;
                }
                None => println!("{{\"instance\":{instance_json},\"votes\":{votes_json}}}"),
            }
            Ok(())
        }
        Command::Fixtures { write_all, show } => {
            if let Some(name) = show {
                let f = fixture(&name).ok_or_else(|| {
                    Failure::validation("UnknownId", format!("no fixture named {name:?}"))
                })?;
                println!(
                    "{{\"instance\":{},\"votes\":{}}}",
                    to_canonical_json(&f.instance),
                    to_canonical_json(&f.votes)
                );
                return Ok(());
            }
            for (name, f) in fixtures() {
                match &write_all {
                    Some(dir) => {
                        let (inst, votes) = f.build()?;
                        let d = dir.join(name);
                        write_file(
                            &d.join("instance.json"),
                            &to_canonical_json(&inst.to_file()),
                        )?;
                        write_file(&d.join("votes.json"), &to_canonical_json(&records(&votes)))?;
                        let meta = FixtureMeta {
                            name,
                            summary: f.summary,
                            mode: f.mode,
                            attacker: f.attacker,
                            allow_complements: f.allow_complements,
                            overlapping_labels: f.relaxed,
                        };
                        write_file(&d.join("fixture.json"), &to_canonical_json(&meta))?;
                        println!("wrote {}", d.display());
                    }
                    None => println!("{name}: {}", f.summary),
                }
            }
            Ok(())
        }
        Command::Serve {
            bind,
            data_dir,
            mode,
        } => {
            let mut config = pb_service::ServiceConfig::from_env()
                .map_err(|m| Failure::validation("BadConfig", m))?;
            if let Some(b) = bind {
                config.bind = b;
            }
            if let Some(d) = data_dir {
                config.data_dir = d;
            }
            if let Some(m) = mode {
                config.mode = m.into();
            }
            let runtime = tokio::runtime::Runtime::new()
                .map_err(|e| Failure::validation("Io", e.to_string()))?;
            runtime
                .block_on(pb_service::serve(config))
                .map_err(|e| Failure {
                    exit: 1,
                    code: e.code().into(),
                    message: e.to_string(),
                    entity: e.entity(),
                })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit)
        }
    }
}
