use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use adapta_core::activity::{ActivityKind, ActivitySpec, DEFAULT_REPETITIONS};
use adapta_core::adaptation::dump_rules;
use adapta_core::dataset;
use adapta_core::analytics::{report_json, report_text, ReportKind};
use adapta_core::gesture::{default_definitions, describe_definitions};
use adapta_core::models::{
    validate_depth_distance, ArmMobility, DepthCheck, DeviceInteractionModel, Disability, LateralityProblem, Posture,
    ProfileId, Sex, Side, UserProfile,
};
use adapta_core::replay::{run_replay, SessionMeta};
use adapta_core::store::{DataStore, ProfileRecord};
use adapta_core::ueq::{aggregate_scales, box_plot, parse_responses, render_report};
use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "adapta", version, about = "Adaptive motion-based learning activities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataDir {
    /// Data directory (profiles, content, traces, session log)
    #[arg(long, env = "ADAPTA_DATA")]
    data: PathBuf,
}

impl DataDir {
    fn open(&self) -> Result<DataStore> {
        DataStore::open(&self.data).with_context(|| format!("cannot open data directory {}", self.data.display()))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Adaptation rule base
    Rules {
        #[command(subcommand)]
        action: RulesAction,
    },
    /// Compiled-in gesture definitions
    Gestures {
        #[command(subcommand)]
        action: GesturesAction,
    },
    /// Learner profiles
    Profiles {
        #[command(subcommand)]
        action: ProfilesAction,
    },
    /// Replay a recorded skeleton trace through an activity and log the session
    Replay {
        #[command(flatten)]
        data: DataDir,
        #[arg(long)]
        profile: String,
        /// concept:animals, concept:vehicles, laterality:left or laterality:right
        #[arg(long)]
        activity: ActivityKind,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
        repetitions: u32,
        #[arg(long, default_value_t = 1)]
        iteration: u32,
        #[arg(long, default_value_t = 1)]
        session: u32,
        /// Print the log without appending it to the session log
        #[arg(long)]
        dry_run: bool,
    },
    /// Descriptive statistics over logged sessions
    Stats {
        #[arg(long, env = "ADAPTA_DATA", required_unless_present = "builtin")]
        data: Option<PathBuf>,
        /// Use the bundled evaluation dataset instead of a data directory
        #[arg(long, conflicts_with = "data")]
        builtin: bool,
        #[arg(long, value_parser = parse_report)]
        report: ReportKind,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
        iteration: u32,
        #[arg(long)]
        json: bool,
    },
    /// Score a User Experience Questionnaire response file
    Ueq {
        #[arg(long)]
        input: PathBuf,
        /// Compare scale means against the benchmark categories
        #[arg(long)]
        benchmark: bool,
        /// Append five-number summaries per scale
        #[arg(long)]
        boxplot: bool,
    },
    /// Run the session service
    Serve {
        #[command(flatten)]
        data: DataDir,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Subcommand)]
enum RulesAction {
    Dump,
}

#[derive(Subcommand)]
enum GesturesAction {
    Describe,
}

#[derive(Subcommand)]
enum ProfilesAction {
    Add {
        #[command(flatten)]
        data: DataDir,
        /// Read the profile record from a JSON file instead of flags
        #[arg(long, conflicts_with_all = ["id", "name", "age", "sex", "disability"])]
        file: Option<PathBuf>,
        #[arg(long, required_unless_present = "file")]
        id: Option<String>,
        #[arg(long, required_unless_present = "file")]
        name: Option<String>,
        #[arg(long, required_unless_present = "file")]
        age: Option<u32>,
        #[arg(long, value_enum, required_unless_present = "file")]
        sex: Option<SexArg>,
        #[arg(long, value_enum, required_unless_present = "file")]
        disability: Option<DisabilityArg>,
        #[arg(long, value_enum, default_value = "none")]
        laterality: LateralityArg,
        #[arg(long, value_enum, default_value = "standing")]
        posture: PostureArg,
        #[arg(long)]
        rgb: bool,
        #[arg(long, default_value_t = 2.0)]
        distance: f64,
        #[arg(long, value_enum, default_value = "both-right")]
        arms: ArmsArg,
    },
    List {
        #[command(flatten)]
        data: DataDir,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SexArg {
    F,
    M,
    Other,
}

#[derive(Clone, Copy, ValueEnum)]
enum DisabilityArg {
    Visual,
    Hearing,
    Physical,
    Autism,
}

#[derive(Clone, Copy, ValueEnum)]
enum LateralityArg {
    None,
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum PostureArg {
    Standing,
    Seated,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArmsArg {
    BothLeft,
    BothRight,
    RightOnly,
    LeftOnly,
}

fn parse_report(s: &str) -> Result<ReportKind, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            eprintln!("adapta: {}", chain.join(": "));
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Rules { action: RulesAction::Dump } => print!("{}", dump_rules()),
        Command::Gestures { action: GesturesAction::Describe } => {
            print!("{}", describe_definitions(&default_definitions()))
        }
        Command::Profiles { action } => profiles(action)?,
        Command::Replay {
            data,
            profile,
            activity,
            trace,
            repetitions,
            iteration,
            session,
            dry_run,
        } => {
            let store = data.open()?;
            let meta = SessionMeta {
                iteration,
                session_index: session,
            };
            let log = run_replay(&store, &ProfileId::new(profile), ActivitySpec { kind: activity, repetitions }, &trace, meta)?;
            if !dry_run {
                store.append_session(&log)?;
            }
            println!("{}", serde_json::to_string(&log)?);
        }
        Command::Stats {
            data,
            builtin,
            report,
            iteration,
            json,
        } => {
            let logs = match data {
                Some(dir) if !builtin => DataDir { data: dir }.open()?.read_sessions()?,
                _ => dataset::logs(),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&report_json(report, &logs, iteration)?)?);
            } else {
                print!("{}", report_text(report, &logs, iteration)?);
            }
        }
        Command::Ueq { input, benchmark, boxplot } => {
            let text = read_text(&input)?;
            let responses = parse_responses(&text)?;
            let report = aggregate_scales(&responses)?;
            let boxes = boxplot.then(|| box_plot(&responses));
            print!("{}", render_report(&report, benchmark, boxes.as_deref()));
        }
        Command::Serve { data, port } => {
            let store = Arc::new(data.open()?);
            let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
            let runtime = tokio::runtime::Runtime::new()?;
            eprintln!("adapta: serving on http://{addr}");
            runtime
                .block_on(adapta_server::serve(store, addr))
                .with_context(|| format!("cannot serve on {addr}"))?;
        }
    }
    Ok(())
}

fn profiles(action: ProfilesAction) -> Result<()> {
    match action {
        ProfilesAction::Add {
            data,
            file,
            id,
            name,
            age,
            sex,
            disability,
            laterality,
            posture,
            rgb,
            distance,
            arms,
        } => {
            let store = data.open()?;
            let record = match file {
                Some(path) => serde_json::from_str::<ProfileRecord>(&read_text(&path)?)
                    .with_context(|| format!("{} is not a profile record", path.display()))?,
                None => ProfileRecord {
                    profile: UserProfile {
                        id: ProfileId::new(id.ok_or_else(|| anyhow!("--id is required"))?),
                        full_name: name.ok_or_else(|| anyhow!("--name is required"))?,
                        age: age.ok_or_else(|| anyhow!("--age is required"))?,
                        sex: match sex.ok_or_else(|| anyhow!("--sex is required"))? {
                            SexArg::F => Sex::F,
                            SexArg::M => Sex::M,
                            SexArg::Other => Sex::Other,
                        },
                        laterality: match laterality {
                            LateralityArg::None => LateralityProblem::None,
                            LateralityArg::Left => LateralityProblem::CannotRecognizeLeft,
                            LateralityArg::Right => LateralityProblem::CannotRecognizeRight,
                        },
                        disability: match disability.ok_or_else(|| anyhow!("--disability is required"))? {
                            DisabilityArg::Visual => Disability::Visual,
                            DisabilityArg::Hearing => Disability::Hearing,
                            DisabilityArg::Physical => Disability::Physical,
                            DisabilityArg::Autism => Disability::Autism,
                        },
                    },
                    device: DeviceInteractionModel {
                        posture: match posture {
                            PostureArg::Standing => Posture::Standing,
                            PostureArg::Seated => Posture::Seated,
                        },
                        rgb_camera_active: rgb,
                        depth_distance: distance,
                        arm_mobility: match arms {
                            ArmsArg::BothLeft => ArmMobility::BothArms { dominant: Side::Left },
                            ArmsArg::BothRight => ArmMobility::BothArms { dominant: Side::Right },
                            ArmsArg::RightOnly => ArmMobility::RightArmOnly,
                            ArmsArg::LeftOnly => ArmMobility::LeftArmOnly,
                        },
                    },
                },
            };
            if let DepthCheck::OutsideRecommended(d) = validate_depth_distance(&record.device) {
                eprintln!("adapta: warning: depth distance {d} m is outside the recommended range");
            }
            let id = record.profile.id.clone();
            store.add_profile(record)?;
            println!("added {id}");
        }
        ProfilesAction::List { data, json } => {
            let records = data.open()?.profiles()?;
            if json {
                println!("{}", serde_json::to_string_pretty(&records)?);
            } else {
                for r in &records {
                    println!(
                        "{}\t{}\t{}\t{}\t{:?}",
                        r.profile.id, r.profile.full_name, r.profile.age, r.profile.disability, r.device.posture
                    );
                }
            }
        }
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}
