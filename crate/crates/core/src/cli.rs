//! Command-line front end. Every subcommand reads plain-text files (see
//! [`crate::io`]) and prints tab-separated `key<TAB>value` lines or tables.
//!
//! Exit codes: 0 success, 1 malformed input, 2 unphysical state or channel,
//! 3 infeasible request (mixed state where a pure one is needed, cutoff too
//! small, ...).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::channels::{self, Quadrature};
use crate::entanglement::{self, ModePartition, Party};
use crate::error::{Error, Result};
use crate::fock;
use crate::io::{self, StateFile};
use crate::protocols;

#[derive(Parser, Debug)]
#[command(name = "gaussent", version, about = "Gaussian state toolkit")]
struct Cli {
    /// Decimal places in printed numbers.
    #[arg(long, global = true, default_value_t = 6)]
    precision: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the uncertainty relation.
    Validate { state: PathBuf },
    /// Logarithmic negativity across a bipartition.
    Negativity {
        state: PathBuf,
        /// Party labels per mode, e.g. AB or AABB.
        #[arg(long)]
        partition: Option<String>,
    },
    /// PPT verdict, optionally verifying a separability certificate.
    Separability {
        state: PathBuf,
        #[arg(long)]
        partition: Option<String>,
        /// Matrix files with γ_A and γ_B such that γ ⪰ γ_A ⊕ γ_B.
        #[arg(long, num_args = 2, value_names = ["GAMMA_A", "GAMMA_B"])]
        witness: Option<Vec<PathBuf>>,
    },
    /// Two-mode squeezing parameters of a pure state's normal form.
    Schmidt {
        state: PathBuf,
        #[arg(long)]
        partition: Option<String>,
    },
    /// Convertibility of pure states.
    Convert(ConvertArgs),
    #[command(subcommand)]
    Channel(ChannelCommand),
    /// Condition on a measurement of one mode and write the remaining state.
    Measure {
        state: PathBuf,
        #[arg(long)]
        mode: usize,
        #[arg(long, value_parser = parse_quadrature, conflicts_with = "vacuum", required_unless_present = "vacuum")]
        homodyne: Option<Quadrature>,
        #[arg(long)]
        vacuum: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    #[command(subcommand)]
    Distill(DistillCommand),
    #[command(subcommand)]
    Passive(PassiveCommand),
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ConvertArgs {
    /// Squeezing vectors r and r′ (Gaussian local operations).
    #[arg(long, num_args = 2, value_names = ["R", "R_PRIME"])]
    glocc: Option<Vec<PathBuf>>,
    /// Schmidt coefficient vectors α and α′ (general local operations).
    #[arg(long, num_args = 2, value_names = ["ALPHA", "ALPHA_PRIME"])]
    locc: Option<Vec<PathBuf>>,
}

#[derive(Subcommand, Debug)]
enum ChannelCommand {
    /// Apply a channel and write the output state.
    Apply {
        state: PathBuf,
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        attenuation: Option<f64>,
        /// Channel file with sections A, G and optionally shift.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum DistillCommand {
    /// Random Gaussian protocols on two copies of a two-mode state.
    Nogo {
        state: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, env = "GAUSSENT_SEED", default_value_t = 0)]
        seed: u64,
        /// Also print the gain of every trial.
        #[arg(long)]
        all: bool,
    },
    /// De-Gaussification followed by Gaussification rounds.
    Pipeline {
        #[arg(long)]
        r: f64,
        /// Beam-splitter transmissivity; searched over a grid when omitted.
        #[arg(long = "V")]
        v: Option<f64>,
        #[arg(long, default_value_t = 2)]
        iters: usize,
        #[arg(long, default_value_t = 12)]
        cutoff: usize,
    },
}

#[derive(Subcommand, Debug)]
enum PassiveCommand {
    /// Closed-form bound for passive entangling networks.
    Max { state: PathBuf },
    /// Numerical search over passive networks.
    Optimize {
        state: PathBuf,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, env = "GAUSSENT_SEED", default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum DemoCommand {
    /// Trace distance, entanglement and energy of states near the vacuum.
    Continuity {
        #[arg(long, default_value_t = 1_000_000)]
        kmax: u64,
    },
}

fn parse_quadrature(s: &str) -> std::result::Result<Quadrature, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Unphysical { .. } | Error::NotSymplectic(_) | Error::NotCompletelyPositive { .. } => 2,
        Error::NotPure(_) | Error::Truncation { .. } | Error::Singular(_) | Error::Decomposition(_) => 3,
        _ => 1,
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let mut buf = Vec::new();
    let result = dispatch(&cli, &mut buf);
    let _ = out.write_all(&buf);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

struct Printer<'a> {
    out: &'a mut Vec<u8>,
    prec: usize,
}

impl Printer<'_> {
    fn num(&self, x: f64) -> String {
        format!("{:.*}", self.prec, x)
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.out, "{key}\t{value}");
    }

    fn kv_num(&mut self, key: &str, x: f64) {
        let v = self.num(x);
        self.kv(key, v);
    }

    fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.out, "{}", cells.join("\t"));
    }

    fn nums(&self, xs: &[f64]) -> String {
        xs.iter().map(|&x| self.num(x)).collect::<Vec<_>>().join(" ")
    }
}

fn partition(flag: &Option<String>, file: &StateFile) -> Result<ModePartition> {
    let p = match (flag, &file.partition) {
        (Some(s), _) => s.parse()?,
        (None, Some(p)) => p.clone(),
        (None, None) if file.modes() == 2 => ModePartition::split(1, 1),
        (None, None) => {
            return Err(Error::Parse(
                "--partition is required for states with more than two modes".into(),
            ))
        }
    };
    if p.modes() != file.modes() {
        return Err(Error::Parse(format!(
            "partition labels {} modes, state has {}",
            p.modes(),
            file.modes()
        )));
    }
    Ok(p)
}

fn emit_state(file: &StateFile, output: &Option<PathBuf>, out: &mut Vec<u8>) -> Result<()> {
    match output {
        Some(path) => file.write(path),
        None => {
            out.extend_from_slice(file.to_text().as_bytes());
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli, out: &mut Vec<u8>) -> Result<i32> {
    let mut pr = Printer {
        out,
        prec: cli.precision,
    };
    match &cli.command {
        Command::Validate { state } => {
            let file = StateFile::read(state)?;
            let report = file.covariance()?.validate();
            pr.kv("valid", report.valid);
            pr.kv_num("min_eigenvalue", report.min_uncertainty_eigenvalue);
            let nus = pr.nums(&report.symplectic_eigenvalues);
            pr.kv("symplectic_eigenvalues", nus);
            if !report.valid {
                return Err(Error::Unphysical {
                    min_eigenvalue: report.min_uncertainty_eigenvalue,
                });
            }
        }
        Command::Negativity {
            state,
            partition: flag,
        } => {
            let file = StateFile::read(state)?;
            let p = partition(flag, &file)?;
            let e = entanglement::log_negativity_gaussian(&file.covariance()?, &p)?;
            let v = pr.num(e);
            pr.row(&[v]);
        }
        Command::Separability {
            state,
            partition: flag,
            witness,
        } => {
            let file = StateFile::read(state)?;
            let p = partition(flag, &file)?;
            let cov = file.covariance()?;
            let report = entanglement::ppt_verdict(&cov, &p)?;
            pr.kv("verdict", if report.is_entangled() { "npt" } else { "ppt" });
            pr.kv_num("min_eigenvalue", report.min_eigenvalue);
            pr.kv("conclusion", report.note());
            if let Some(paths) = witness {
                let ga = crate::CovarianceMatrix::new(io::read_matrix(&paths[0])?)?;
                let gb = crate::CovarianceMatrix::new(io::read_matrix(&paths[1])?)?;
                let ok = entanglement::separability_witness_verify(&cov, &ga, &gb, &p)?;
                pr.kv("witness", if ok { "verified" } else { "rejected" });
            }
        }
        Command::Schmidt {
            state,
            partition: flag,
        } => {
            let file = StateFile::read(state)?;
            let p = partition(flag, &file)?;
            let nf = entanglement::schmidt_normal_form(&file.covariance()?, &p)?;
            let r = pr.nums(&nf.r);
            pr.kv("r", r);
        }
        Command::Convert(args) => {
            let verdict = match (&args.glocc, &args.locc) {
                (Some(v), None) => {
                    entanglement::glocc_convertible(&io::read_vector(&v[0])?, &io::read_vector(&v[1])?)
                }
                (None, Some(v)) => {
                    entanglement::locc_convertible_pure(&io::read_vector(&v[0])?, &io::read_vector(&v[1])?)?
                }
                _ => return Err(Error::Parse("give exactly one of --glocc or --locc".into())),
            };
            pr.kv("convertible", verdict);
        }
        Command::Channel(ChannelCommand::Apply {
            state,
            attenuation,
            file: chan,
            output,
        }) => {
            let file = StateFile::read(state)?;
            let st = file.state()?;
            let ch = match (attenuation, chan) {
                (Some(eta), None) => channels::attenuation_channel(*eta, st.modes())?,
                (None, Some(path)) => io::read_channel(path)?,
                _ => return Err(Error::Parse("give exactly one of --attenuation or --file".into())),
            };
            let res = channels::apply_channel(&st, &ch)?;
            let part = file.partition.clone().filter(|p| p.modes() == res.modes());
            emit_state(&StateFile::from_state(&res).with_partition(part), output, pr.out)?;
        }
        Command::Measure {
            state,
            mode,
            homodyne,
            vacuum,
            output,
        } => {
            let file = StateFile::read(state)?;
            let st = file.state()?;
            let part = match &file.partition {
                Some(p) if *mode < p.modes() && p.modes() > 1 => {
                    let rest: Vec<Party> = p
                        .parties()
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| k != mode)
                        .map(|(_, &x)| x)
                        .collect();
                    ModePartition::new(rest).ok()
                }
                _ => None,
            };
            let out_file = match (homodyne, vacuum) {
                (Some(q), false) => {
                    let res = channels::homodyne_condition(&st, *mode, *q)?;
                    StateFile::from_state(&res).with_note("homodyne", format!("{q:?} on mode {mode}"))
                }
                (None, true) => {
                    let c = channels::vacuum_project(&st, *mode)?;
                    StateFile::from_state(&c.state)
                        .with_note("vacuum projection", format!("mode {mode}"))
                        .with_note("probability", format!("{:.16e}", c.probability))
                }
                _ => return Err(Error::Parse("give exactly one of --homodyne or --vacuum".into())),
            };
            emit_state(&out_file.with_partition(part), output, pr.out)?;
        }
        Command::Distill(DistillCommand::Nogo {
            state,
            trials,
            seed,
            all,
        }) => {
            let file = StateFile::read(state)?;
            let cov = file.covariance()?;
            let e_in = entanglement::log_negativity_gaussian(&cov, &ModePartition::split(1, 1))?;
            let rep = protocols::no_go_monte_carlo(&cov, *trials, *seed)?;
            let mut sorted = rep.gains.clone();
            sorted.sort_by(f64::total_cmp);
            pr.kv("trials", trials);
            pr.kv("seed", seed);
            pr.kv_num("input_log_negativity", e_in);
            pr.kv("max_gain", format!("{:.*e}", pr.prec, rep.max_gain));
            pr.kv("argmax_trial", rep.argmax_trial);
            pr.kv_num("median_gain", sorted[sorted.len() / 2]);
            pr.kv_num("min_gain", sorted[0]);
            if *all {
                pr.row(&["trial".into(), "gain".into()]);
                for (t, g) in rep.gains.iter().enumerate() {
                    let g = pr.num(*g);
                    pr.row(&[t.to_string(), g]);
                }
            }
        }
        Command::Distill(DistillCommand::Pipeline { r, v, iters, cutoff }) => {
            let trace = match v {
                Some(v) => protocols::distill_pipeline(*r, *v, *iters, *cutoff)?,
                None => protocols::distill_grid(*r, &protocols::V_GRID, *iters, *cutoff)?
                    .into_iter()
                    .fold(None::<protocols::DistillationTrace>, |best, t| match best {
                        Some(b) if b.final_log_negativity() >= t.final_log_negativity() => Some(b),
                        _ => Some(t),
                    })
                    .expect("grid is not empty"),
            };
            let _ = writeln!(
                pr.out,
                "# r {} V {} cutoff {} input_log_negativity {}",
                pr.num(trace.r),
                pr.num(trace.v),
                cutoff,
                pr.num(trace.initial_log_negativity)
            );
            pr.row(&[
                "iteration".into(),
                "log_negativity".into(),
                "p_success".into(),
                "cumulative_p".into(),
                "gaussianity_distance".into(),
                "tail".into(),
            ]);
            for rec in &trace.records {
                let cells = vec![
                    rec.iteration.to_string(),
                    pr.num(rec.log_negativity),
                    pr.num(rec.probability),
                    pr.num(rec.cumulative_probability),
                    pr.num(rec.gaussianity_distance),
                    format!("{:.*e}", pr.prec, rec.tail),
                ];
                pr.row(&cells);
            }
        }
        Command::Passive(PassiveCommand::Max { state }) => {
            let file = StateFile::read(state)?;
            let b = protocols::passive_max_entanglement(&file.covariance()?)?;
            let v = pr.num(b);
            pr.row(&[v]);
        }
        Command::Passive(PassiveCommand::Optimize {
            state,
            restarts,
            seed,
        }) => {
            let file = StateFile::read(state)?;
            let cov = file.covariance()?;
            let bound = protocols::passive_max_entanglement(&cov)?;
            let opt = protocols::passive_optimizer(&cov, *restarts, *seed)?;
            pr.kv_num("bound", bound);
            pr.kv_num("achieved", opt.log_negativity);
            pr.kv("modes", format!("{} {}", opt.modes.0, opt.modes.1));
        }
        Command::Demo(DemoCommand::Continuity { kmax }) => {
            if *kmax < 3 {
                return Err(Error::param("--kmax must be at least 3"));
            }
            let mut ks: Vec<u64> = (3..=(*kmax).min(10)).collect();
            let mut p = 100u64;
            while p <= *kmax {
                ks.push(p);
                p = p.saturating_mul(10);
            }
            if ks.last() != Some(kmax) {
                ks.push(*kmax);
            }
            pr.row(&[
                "k".into(),
                "trace_distance".into(),
                "entanglement".into(),
                "mean_energy".into(),
            ]);
            for k in ks {
                let c = fock::continuity_demo(k)?;
                let cells = vec![
                    k.to_string(),
                    pr.num(c.trace_distance),
                    pr.num(c.entanglement),
                    pr.num(c.mean_energy),
                ];
                pr.row(&cells);
            }
        }
    }
    Ok(0)
}
