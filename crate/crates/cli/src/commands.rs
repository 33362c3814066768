use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use popmatch::popularity::ViolatedCondition;
use popmatch::twosided::{build_hybrid, find_popular};
use popmatch::{
    check_stability, generate, is_popular, is_popular_oracle, parse_instance, parse_matching, robust_multi,
    robust_one_sided, serialize_instance, serialize_matching, solve_one_sided, stable_k, unpopularity_factor,
    GenConfig, Instance, Matching, Model, Verdict,
};

use crate::GenArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Found,
    None,
}

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: popmatch::Error },
    #[error(transparent)]
    Core(#[from] popmatch::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

pub type CmdResult = Result<Outcome, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|source| Failure::Read {
        path: path.to_owned(),
        source,
    })
}

pub fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|source| Failure::Parse {
        path: path.to_owned(),
        source,
    })
}

fn load_matching(instance: &Instance, path: &Path) -> Result<Matching, Failure> {
    parse_matching(instance, &read(path)?).map_err(|source| Failure::Parse {
        path: path.to_owned(),
        source,
    })
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn found(instance: &Instance, m: Option<Matching>) -> CmdResult {
    match m {
        Some(m) => {
            emit(&serialize_matching(instance, &m))?;
            Ok(Outcome::Found)
        }
        None => {
            emit("NONE\n")?;
            Ok(Outcome::None)
        }
    }
}

pub fn solve(path: &Path, cap: usize) -> CmdResult {
    let instance = load_instance(path)?;
    let m = match instance.model() {
        Model::OneSided => solve_one_sided(&instance)?,
        Model::TwoSidedOneTie => find_popular(&instance, cap)?,
        Model::TwoSidedTies { .. } => Some(stable_k(&instance)?),
    };
    found(&instance, m)
}

pub fn verify(instance: &Path, matching: &Path, oracle_cap: Option<usize>) -> CmdResult {
    let instance = load_instance(instance)?;
    let m = load_matching(&instance, matching)?;
    let verdict = match oracle_cap {
        Some(cap) => is_popular_oracle(&instance, &m, cap)?,
        None => is_popular(&instance, &m)?,
    };
    match verdict {
        Verdict::Popular => {
            emit("POPULAR\n")?;
            Ok(Outcome::Found)
        }
        Verdict::NotPopular(w) => {
            let mut text = format!("NOT POPULAR\nmargin: {}\n", w.margin);
            if w.violated_condition != ViolatedCondition::NotApplicable {
                text += &format!("condition: {}\n", w.violated_condition);
            }
            text += "better:\n";
            text += &serialize_matching(&instance, &w.better);
            emit(&text)?;
            Ok(Outcome::None)
        }
    }
}

pub fn robust(first: &Path, second: &Path, extra: &[PathBuf], cap: usize) -> CmdResult {
    let mut instances = vec![load_instance(first)?, load_instance(second)?];
    for p in extra {
        instances.push(load_instance(p)?);
    }
    let refs: Vec<&Instance> = instances.iter().collect();
    let base = refs[0];
    let m = match base.model() {
        Model::OneSided if refs.len() == 2 => robust_one_sided(refs[0], refs[1])?,
        Model::OneSided => popmatch::onesided::robust_one_sided_multi(&refs)?,
        Model::TwoSidedOneTie => robust_multi(&refs, cap)?.map(|r| r.matching),
        Model::TwoSidedTies { .. } => {
            return Err(Failure::Usage(
                "robust matchings are only computed for one-sided and two-sided-one-tie instances".into(),
            ))
        }
    };
    found(base, m)
}

pub fn stablek(path: &Path, factor: bool, cap: usize) -> CmdResult {
    let instance = load_instance(path)?;
    let m = stable_k(&instance)?;
    let blocking = check_stability(&instance, &m)?;
    let mut text = serialize_matching(&instance, &m);
    text += &format!("# blocking-pairs: {}\n", blocking.len());
    for p in &blocking {
        text += &format!(
            "# blocking: {} {}\n",
            instance.agent_names()[p.agent],
            instance.job_names()[p.job]
        );
    }
    if factor {
        let Model::TwoSidedTies { k } = instance.model() else {
            unreachable!("stable_k accepted the instance")
        };
        match unpopularity_factor(&instance, &m, cap) {
            Ok(r) => text += &format!("# unpopularity-factor: {} (k = {k})\n", r.factor),
            Err(popmatch::Error::SizeLimit { vertices, cap }) => {
                text += &format!("# unpopularity-factor: skipped-cap ({vertices} vertices, cap {cap})\n")
            }
            Err(e) => return Err(e.into()),
        }
    }
    emit(&text)?;
    Ok(Outcome::Found)
}

pub fn unpopularity(instance: &Path, matching: &Path, cap: usize) -> CmdResult {
    let instance = load_instance(instance)?;
    let m = load_matching(&instance, matching)?;
    let report = unpopularity_factor(&instance, &m, cap)?;
    let mut text = format!("factor: {}\n", report.factor);
    if let Some(n) = &report.argmax {
        text += "better:\n";
        text += &serialize_matching(&instance, n);
    }
    emit(&text)?;
    Ok(Outcome::Found)
}

pub fn hybrid(first: &Path, second: &Path, edge: &str) -> CmdResult {
    let (i, j) = (load_instance(first)?, load_instance(second)?);
    let (a, b) = edge
        .split_once(':')
        .ok_or_else(|| Failure::Usage(format!("--edge `{edge}` is not of the form agent:job")))?;
    let (a, b) = (i.agent_by_name(a.trim())?, i.job_by_name(b.trim())?);
    emit(&serialize_instance(&build_hybrid(&i, &j, a, b)?))?;
    Ok(Outcome::Found)
}

pub fn gen(model: Model, args: &GenArgs) -> CmdResult {
    let mut config = GenConfig::new(
        model,
        args.agents,
        args.jobs.unwrap_or(args.agents),
        args.density,
        args.seed,
    );
    if let Model::TwoSidedTies { k } = model {
        config.tie_max = k;
    }
    let text = serialize_instance(&generate(&config)?);
    match &args.output {
        Some(p) => fs::write(p, text)?,
        None => emit(&text)?,
    }
    Ok(Outcome::Found)
}
