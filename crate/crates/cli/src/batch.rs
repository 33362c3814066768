use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use popmatch::twosided::find_popular;
use popmatch::{
    generate, perturb_agent, robust_multi, robust_one_sided, solve_one_sided, stable_k, unpopularity_factor,
    Factor, GenConfig, Model,
};

use crate::commands::{CmdResult, Failure, Outcome};
use crate::ModelArg;

/// An inclusive range written `min..max`, or a single value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

impl FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
        match s.split_once("..") {
            Some((lo, hi)) => Ok(SizeRange {
                min: parse(lo)?,
                max: parse(hi.strip_prefix('=').unwrap_or(hi))?,
            }),
            None => {
                let v = parse(s)?;
                Ok(SizeRange { min: v, max: v })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    /// Does a popular matching exist?
    Popular,
    /// Does a robust popular matching exist for a random single-agent perturbation?
    Robust,
    /// Unpopularity factor of the stable-k output.
    Factor,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Agents and jobs per side, `min..max` inclusive.
    #[arg(long)]
    n: SizeRange,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Largest tie, which is also k for two-sided ties (default 2).
    #[arg(long)]
    tie_max: Option<usize>,
    /// Trials per size.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = Task::Popular)]
    task: Task,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; rows are identical for every thread count.
    #[arg(long)]
    threads: Option<usize>,
    /// Add a wall_ms column (not reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: PathBuf,
}

struct Trial {
    id: usize,
    n: usize,
    seed: u64,
}

struct Row {
    id: usize,
    n: usize,
    edges: usize,
    seed: u64,
    outcome: String,
    factor: Option<Factor>,
    wall_ms: f64,
}

const SKIPPED: &str = "skipped-cap";

fn capped<T>(r: popmatch::Result<T>) -> Result<Option<T>, popmatch::Error> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(popmatch::Error::SizeLimit { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn yes_no(found: Option<bool>, yes: &str, no: &str) -> String {
    match found {
        Some(true) => yes.into(),
        Some(false) => no.into(),
        None => SKIPPED.into(),
    }
}

fn run_trial(model: Model, args: &BatchArgs, cap: usize, t: &Trial) -> Result<Row, popmatch::Error> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(t.seed);
    let instance = generate(&GenConfig::new(model, t.n, t.n, args.density, rng.gen()))?;
    let mut factor = None;
    let outcome = match args.task {
        Task::Popular => {
            let found = match model {
                Model::OneSided => Some(solve_one_sided(&instance)?.is_some()),
                _ => capped(find_popular(&instance, cap))?.map(|m| m.is_some()),
            };
            yes_no(found, "popular-exists", "no-popular")
        }
        Task::Robust => {
            let agent = rng.gen_range(0..t.n);
            let other = perturb_agent(&instance, agent, rng.gen())?;
            let found = match model {
                Model::OneSided => Some(robust_one_sided(&instance, &other)?.is_some()),
                _ => capped(robust_multi(&[&instance, &other], cap))?.map(|r| r.is_some()),
            };
            yes_no(found, "robust-exists", "no-robust")
        }
        Task::Factor => {
            let m = stable_k(&instance)?;
            match capped(unpopularity_factor(&instance, &m, cap))? {
                Some(r) => {
                    factor = Some(r.factor);
                    r.factor.to_string()
                }
                None => SKIPPED.into(),
            }
        }
    };
    Ok(Row {
        id: t.id,
        n: t.n,
        edges: instance.num_edges(),
        seed: t.seed,
        outcome,
        factor,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn summary(model: Model, task: Task, rows: &[Row]) -> String {
    let mut text = String::new();
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.dedup();
    for n in sizes {
        let group: Vec<&Row> = rows.iter().filter(|r| r.n == n).collect();
        let decided: Vec<&&Row> = group.iter().filter(|r| r.outcome != SKIPPED).collect();
        let skipped = group.len() - decided.len();
        let detail = match task {
            Task::Factor => {
                let worst = decided.iter().filter_map(|r| r.factor).max();
                format!("max-factor={}", worst.map_or("-".to_string(), |f| f.to_string()))
            }
            _ => {
                let yes = decided.iter().filter(|r| r.outcome.ends_with("-exists")).count();
                let rate = if decided.is_empty() {
                    "-".to_string()
                } else {
                    format!("{:.3}", yes as f64 / decided.len() as f64)
                };
                let label = if task == Task::Popular { "popular" } else { "robust" };
                format!("{label}-exists={yes} frequency={rate}")
            }
        };
        text += &format!(
            "model={model} n={n} trials={} skipped={skipped} {detail}\n",
            group.len()
        );
    }
    text
}

pub fn run(args: &BatchArgs, cap: usize) -> CmdResult {
    let model = args.model.resolve(args.tie_max)?;
    if args.task == Task::Robust && model.has_job_lists() {
        return Err(Failure::Usage("--task robust needs a one-sided or two-sided-one-tie model".into()));
    }
    if args.task == Task::Factor && !model.has_job_lists() {
        return Err(Failure::Usage("--task factor needs --model two-sided-ties".into()));
    }
    if args.n.min == 0 && args.n.max >= args.n.min {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    GenConfig::new(model, 1, 1, args.density, 0).validate()?;

    let mut seeds = ChaCha8Rng::seed_from_u64(args.seed);
    let trials: Vec<Trial> = (args.n.min..=args.n.max)
        .flat_map(|n| (0..args.trials).map(move |_| n))
        .enumerate()
        .map(|(id, n)| Trial { id, n, seed: seeds.gen() })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let rows = pool.install(|| {
        trials
            .par_iter()
            .map(|t| run_trial(model, args, cap, t))
            .collect::<Result<Vec<Row>, _>>()
    })?;

    let mut writer = csv::Writer::from_writer(File::create(&args.out)?);
    let mut header = vec!["id", "model", "n", "m", "seed", "outcome"];
    if args.timing {
        header.push("wall_ms");
    }
    writer.write_record(&header)?;
    for r in &rows {
        let mut record = vec![
            r.id.to_string(),
            model.to_string(),
            r.n.to_string(),
            r.edges.to_string(),
            r.seed.to_string(),
            r.outcome.clone(),
        ];
        if args.timing {
            record.push(format!("{:.3}", r.wall_ms));
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;

    let mut out = io::stdout().lock();
    out.write_all(summary(model, args.task, &rows).as_bytes())?;
    Ok(Outcome::Found)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!("3..5".parse::<SizeRange>(), Ok(SizeRange { min: 3, max: 5 }));
        assert_eq!("3..=5".parse::<SizeRange>(), Ok(SizeRange { min: 3, max: 5 }));
        assert_eq!("4".parse::<SizeRange>(), Ok(SizeRange { min: 4, max: 4 }));
        assert!("a..3".parse::<SizeRange>().is_err());
    }
}
