mod report;

use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use flatbetti::coinv::mixing_breakdown;
use flatbetti::gysin::{mult_ranks, LinearForm, SpectralPage};
use flatbetti::lesolver::{
    equivariant_series, ho_liu_numerator, ho_liu_series, klein_record, PairSequenceInstance,
};
use flatbetti::liecat::{rp2_formality_check, GroupId};
use flatbetti::numcheck::{self, CheckReport, Execution, SamplerConfig, DEFAULT_SEED};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "flatbetti",
    version,
    about = "Betti numbers of flat SU(3)-bundle moduli over nonorientable surfaces"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Poincaré polynomials of representation spaces.
    Betti {
        #[command(subcommand)]
        surface: Surface,
    },
    /// Cohomology of the commuting stratum, split by Weyl orbits.
    Mixing {
        #[arg(long, default_value = "su3")]
        group: GroupId,
    },
    /// Gysin sequence of the C*-bundle over the flag manifold.
    Gysin {
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Chern class as a comma-separated linear form.
        #[arg(long, default_value = "-1,1,0", allow_hyphen_values = true)]
        form: LinearForm,
    },
    /// Resolve the long exact sequence of the pair (Z, A).
    SolvePair {
        /// Drop the low-degree constraint and list every consistent page.
        #[arg(long)]
        no_constraint: bool,
    },
    /// Conjectured equivariant series for a connected sum of projective planes.
    HoLiu {
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=1))]
        n: u32,
        #[arg(long, default_value_t = 20)]
        order: usize,
    },
    /// Floating-point checks on sampled unitary matrices.
    Numcheck {
        check: CheckKind,
        /// Defaults to 100, or 1000 for rp2.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, env = "FLATBETTI_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Evaluate samples on one thread.
        #[arg(long)]
        serial: bool,
        /// Restrict rp2 to one group; both U(3) and SU(3) otherwise.
        #[arg(long)]
        group: Option<GroupId>,
    },
    /// Recompute every claim and compare with the stored expected values.
    Report {
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        #[arg(long, env = "FLATBETTI_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        serial: bool,
    },
}

#[derive(Subcommand)]
enum Surface {
    /// Hom(π₁(Klein bottle), G).
    Klein {
        #[arg(long, default_value = "su3")]
        group: GroupId,
    },
    /// Hom(π₁(RP²), G).
    Rp2 {
        #[arg(long)]
        group: GroupId,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Dimension,
    Eigen,
    Cover,
    Rp2,
    StratumA,
    Psi,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

/// Exit status 2, formatted like clap's own usage errors.
fn usage(msg: impl std::fmt::Display) -> ExitCode {
    let err = Cli::command().error(ErrorKind::InvalidValue, msg);
    let _ = err.print();
    ExitCode::from(2)
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(value).expect("serializable")
        );
    } else {
        print!("{}", text());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let json = cli.json;
    match cli.command {
        Command::Betti {
            surface: Surface::Klein { group },
        } => {
            if group != GroupId::su(3) {
                return Ok(usage(format!(
                    "the Klein bottle computation is implemented for SU(3), not {group}"
                )));
            }
            let r = klein_record(group)?;
            emit(json, &r, || {
                format!(
                    "group            {group}\n\
                     P_t(A)           {}\n\
                     pair bound       {}\n\
                     constraint       {}\n\
                     solutions        {}\n\
                     P_t(Z)           {}\n\
                     total dimension  {} (fixed-point total {})\n\
                     bound attained   {}\n\
                     equivariant      {}\n",
                    r.pt_a.pretty(),
                    r.bound.pretty(),
                    r.constraint,
                    r.solutions.len(),
                    r.pt_z.pretty(),
                    r.total_dimension,
                    r.instance.fixed_point_total,
                    r.bound_attained,
                    r.equivariant_series,
                )
            });
        }
        Command::Betti {
            surface: Surface::Rp2 { group },
        } => {
            let r = rp2_formality_check(group);
            emit(json, &r, || {
                let mut out = format!("group {}\n", r.group);
                for c in &r.components {
                    out.push_str(&format!("  {:<12} {}\n", c.label, c.poincare.pretty()));
                }
                let total: flatbetti::series::RationalPoly =
                    r.components.iter().map(|c| c.poincare.clone()).sum();
                out.push_str(&format!("total        {}\n", total.pretty()));
                out.push_str(&format!("odd Betti numbers vanish: {}\n", r.all_even));
                out.push_str(&format!(
                    "torus square roots of 1: {} (expected {})\n",
                    r.torus_root_count, r.expected_root_count
                ));
                out
            });
        }
        Command::Mixing { group } => {
            let orbits = mixing_breakdown(group)?;
            emit(json, &orbits, || {
                let mut out = format!("group {group}\n");
                for o in &orbits {
                    let signs: Vec<String> = o
                        .orbit
                        .representative
                        .signs
                        .iter()
                        .map(|s| s.to_string())
                        .collect();
                    out.push_str(&format!(
                        "  orbit of ({}) size {} stabilizer {:>2}: {}\n",
                        signs.join(","),
                        o.orbit.orbit_size,
                        o.orbit.stabilizer_order,
                        o.poincare.pretty()
                    ));
                }
                let total: flatbetti::series::RationalPoly =
                    orbits.iter().map(|o| o.poincare.clone()).sum();
                out.push_str(&format!("P_t(A) {}\n", total.pretty()));
                out
            });
        }
        Command::Gysin { n, form } => {
            if form.nvars() != n {
                return Ok(usage(format!(
                    "--form has {} entries, expected {n}",
                    form.nvars()
                )));
            }
            if !(1..=5).contains(&n) {
                return Ok(usage("--n must be between 1 and 5"));
            }
            let e2 = SpectralPage::for_bundle(&form);
            let e3 = e2.next_page();
            #[derive(Serialize)]
            struct Out {
                form: String,
                ranks: Vec<usize>,
                e2: Vec<((usize, usize), usize)>,
                e3: Vec<((usize, usize), usize)>,
                total_space: String,
            }
            let out = Out {
                form: form.to_string(),
                ranks: mult_ranks(&form),
                e2: e2.dims.iter().map(|(k, v)| (*k, *v)).collect(),
                e3: e3.dims.iter().map(|(k, v)| (*k, *v)).collect(),
                total_space: e3.total_poincare().to_string(),
            };
            emit(json, &out, || {
                format!(
                    "Chern class {}\nranks {:?}\nE2\n{}E3\n{}P_t(Y) {}\n",
                    form,
                    out.ranks,
                    e2.render(),
                    e3.render(),
                    e3.total_poincare().pretty()
                )
            });
        }
        Command::SolvePair { no_constraint } => {
            let mut instance = PairSequenceInstance::for_group(GroupId::su(3))?;
            if no_constraint {
                instance.low_degree_constraint = None;
            }
            let pages = instance.solve_all();
            emit(json, &pages, || {
                let mut out = format!("initial page\n{}\n", instance.render_initial());
                out.push_str(&format!("{} consistent page(s)\n", pages.len()));
                for page in &pages {
                    out.push_str(&format!(
                        "\n{}P_t(Z) {}\n",
                        instance.render_solved(page),
                        page.resulting_poincare.pretty()
                    ));
                }
                out
            });
            if pages.is_empty() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::HoLiu { n, order } => {
            let numerator = ho_liu_numerator(n);
            let series = ho_liu_series(n, order);
            let agrees = if n == 1 {
                Some(series == equivariant_series(GroupId::su(3), order)?)
            } else {
                None
            };
            let value = serde_json::json!({
                "n": n,
                "numerator": numerator.to_string(),
                "series": series.to_string(),
                "matches_equivariant_series": agrees,
            });
            emit(json, &value, || {
                let mut out = format!("numerator {}\nseries    {}\n", numerator.pretty(), series);
                if let Some(a) = agrees {
                    out.push_str(&format!("matches P_t(Z)·P_t(BSU(3)): {a}\n"));
                }
                out
            });
        }
        Command::Numcheck {
            check,
            samples,
            tol,
            seed,
            serial,
            group,
        } => {
            let exec = if serial {
                Execution::Serial
            } else {
                Execution::Parallel
            };
            let base = SamplerConfig {
                tolerance: tol,
                seed,
                ..SamplerConfig::default()
            };
            let cfg = SamplerConfig {
                sample_count: samples.unwrap_or(100),
                ..base.clone()
            };
            let rp2_cfg = SamplerConfig {
                sample_count: samples.unwrap_or(1000),
                ..base
            };
            if let Err(e) = cfg.validate() {
                return Ok(usage(e));
            }
            if let Some(g) = group {
                if g.n() < 2 {
                    return Ok(usage("rp2 sampling needs n >= 2"));
                }
            }
            let rp2_groups = match group {
                Some(g) => vec![g],
                None => vec![GroupId::u(3), GroupId::su(3)],
            };
            let rp2 = |out: &mut Vec<CheckReport>| {
                for &g in &rp2_groups {
                    out.push(numcheck::rp2_check(g, &rp2_cfg, exec));
                }
            };
            let mut reports = Vec::new();
            match check {
                CheckKind::Dimension => reports.push(numcheck::dimension_check(&cfg, exec)),
                CheckKind::Eigen => reports.push(numcheck::eigen_check(&cfg, exec)),
                CheckKind::Cover => reports.push(numcheck::cover_check(&cfg, exec)),
                CheckKind::StratumA => reports.push(numcheck::stratum_a_check(&cfg, exec)),
                CheckKind::Psi => reports.push(numcheck::psi_convention_check(&cfg, exec)),
                CheckKind::Rp2 => rp2(&mut reports),
                CheckKind::All => {
                    reports.push(numcheck::dimension_check(&cfg, exec));
                    reports.push(numcheck::eigen_check(&cfg, exec));
                    reports.push(numcheck::cover_check(&cfg, exec));
                    reports.push(numcheck::stratum_a_check(&cfg, exec));
                    reports.push(numcheck::psi_convention_check(&cfg, exec));
                    rp2(&mut reports);
                }
            }
            println!("{}", serde_json::to_string_pretty(&reports)?);
            if !reports.iter().all(CheckReport::all_pass) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Report {
            format,
            seed,
            serial,
        } => {
            let exec = if serial {
                Execution::Serial
            } else {
                Execution::Parallel
            };
            let cfg = SamplerConfig {
                seed,
                ..SamplerConfig::default()
            };
            let doc = report::build(&cfg, exec)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&doc)?),
                Format::Markdown => print!("{}", doc.to_markdown()),
            }
            if !doc.is_match() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
