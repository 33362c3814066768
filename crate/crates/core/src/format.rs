//! Line-based text formats for instances and matchings.
//!
//! Instance files:
//!
//! ```text
//! # comment
//! model two-sided-ties k=2
//! agents a1 a2
//! jobs b1 b2
//! a1 : [b1 b2]
//! a2 : b1 > b2
//! b1 : [a1 a2]
//! b2 : a1 > a2
//! ```
//!
//! `>` separates rank groups, `[x y]` is a tie and `x , y` joins `y` into the
//! tie of the preceding item. Job lines are only allowed under
//! `two-sided-ties`. Matching files hold one `agent job` pair per line.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{Instance, Model, PreferenceList, Side, VertexId};
use crate::matching::Matching;

const RESERVED: &[char] = &['[', ']', '>', ',', ':', '#'];

fn meaningful_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        }
        .trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_model(line_no: usize, line: &str) -> Result<Model> {
    let mut words = line.split_whitespace();
    if words.next() != Some("model") {
        return Err(Error::syntax(line_no, "expected `model <name>`"));
    }
    let model = match (words.next(), words.next()) {
        (Some("one-sided"), None) => Model::OneSided,
        (Some("two-sided-one-tie"), None) => Model::TwoSidedOneTie,
        (Some("two-sided-ties"), Some(k)) => {
            let k = k
                .strip_prefix("k=")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::syntax(line_no, "expected `k=<positive integer>`"))?;
            Model::TwoSidedTies { k }
        }
        _ => return Err(Error::syntax(line_no, format!("unknown model line `{line}`"))),
    };
    if words.next().is_some() {
        return Err(Error::syntax(line_no, "trailing input after model"));
    }
    Ok(model)
}

fn parse_names(line_no: usize, line: &str, keyword: &str) -> Result<Vec<String>> {
    let mut words = line.split_whitespace();
    if words.next() != Some(keyword) {
        return Err(Error::syntax(line_no, format!("expected `{keyword} <name>...`")));
    }
    words
        .map(|w| {
            if w.contains(RESERVED) {
                Err(Error::syntax(line_no, format!("invalid vertex name `{w}`")))
            } else {
                Ok(w.to_string())
            }
        })
        .collect()
}

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Name(&'a str),
    Open,
    Close,
    Gt,
    Comma,
}

fn tokenize(line_no: usize, s: &str) -> Result<Vec<Token<'_>>> {
    let mut out = Vec::new();
    let mut rest = s;
    while let Some(c) = rest.chars().next() {
        if c.is_whitespace() {
            rest = &rest[c.len_utf8()..];
            continue;
        }
        let tok = match c {
            '[' => Token::Open,
            ']' => Token::Close,
            '>' => Token::Gt,
            ',' => Token::Comma,
            ':' => return Err(Error::syntax(line_no, "unexpected `:`")),
            _ => {
                let end = rest
                    .find(|ch: char| ch.is_whitespace() || RESERVED.contains(&ch))
                    .unwrap_or(rest.len());
                out.push(Token::Name(&rest[..end]));
                rest = &rest[end..];
                continue;
            }
        };
        out.push(tok);
        rest = &rest[1..];
    }
    Ok(out)
}

fn parse_groups(
    line_no: usize,
    rhs: &str,
    resolve: &dyn Fn(&str) -> Option<usize>,
) -> Result<Vec<Vec<usize>>> {
    let lookup = |name: &str| {
        resolve(name).ok_or_else(|| {
            Error::syntax(line_no, format!("`{name}` is not a vertex of the opposite side"))
        })
    };
    let tokens = tokenize(line_no, rhs)?;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut expect_item = true;
    let mut join = false;
    let mut it = tokens.into_iter();
    while let Some(tok) = it.next() {
        let items = match tok {
            Token::Name(n) if expect_item => vec![lookup(n)?],
            Token::Open if expect_item => {
                let mut tie = Vec::new();
                loop {
                    match it.next() {
                        Some(Token::Name(n)) => tie.push(lookup(n)?),
                        Some(Token::Close) if !tie.is_empty() => break,
                        Some(Token::Close) => return Err(Error::syntax(line_no, "empty tie `[]`")),
                        _ => return Err(Error::syntax(line_no, "unterminated tie")),
                    }
                }
                tie
            }
            Token::Gt | Token::Comma if !expect_item => {
                expect_item = true;
                join = tok == Token::Comma;
                continue;
            }
            Token::Close => return Err(Error::syntax(line_no, "unexpected `]`")),
            _ if expect_item => return Err(Error::syntax(line_no, "expected a vertex or a tie")),
            _ => return Err(Error::syntax(line_no, "expected `>` or `,` between items")),
        };
        match groups.last_mut() {
            Some(last) if join => last.extend(items),
            _ => groups.push(items),
        }
        expect_item = false;
        join = false;
    }
    if expect_item && !groups.is_empty() {
        return Err(Error::syntax(line_no, "trailing separator"));
    }
    Ok(groups)
}

/// Parses an instance file; every structural invariant is validated.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = meaningful_lines(text);
    let (no, line) = lines
        .next()
        .ok_or_else(|| Error::syntax(1, "missing model line"))?;
    let model = parse_model(no, line)?;
    let (no, line) = lines
        .next()
        .ok_or_else(|| Error::syntax(no + 1, "missing agents line"))?;
    let agents = parse_names(no, line, "agents")?;
    let (no, line) = lines
        .next()
        .ok_or_else(|| Error::syntax(no + 1, "missing jobs line"))?;
    let jobs = parse_names(no, line, "jobs")?;

    let agent_index: HashMap<&str, usize> =
        agents.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let job_index: HashMap<&str, usize> =
        jobs.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut agent_lists: Vec<Option<PreferenceList>> = vec![None; agents.len()];
    let mut job_lists: Vec<Option<PreferenceList>> = vec![None; jobs.len()];

    for (no, line) in lines {
        let (owner, rhs) = line
            .split_once(':')
            .ok_or_else(|| Error::syntax(no, "expected `<name> : <preferences>`"))?;
        let owner = owner.trim();
        let (slot, groups) = if let Some(&a) = agent_index.get(owner) {
            let groups = parse_groups(no, rhs, &|n| job_index.get(n).copied())?;
            (&mut agent_lists[a], groups)
        } else if let Some(&b) = job_index.get(owner) {
            if !model.has_job_lists() {
                return Err(Error::syntax(
                    no,
                    format!("job preference lines are not allowed under model {model}"),
                ));
            }
            let groups = parse_groups(no, rhs, &|n| agent_index.get(n).copied())?;
            (&mut job_lists[b], groups)
        } else {
            return Err(Error::syntax(no, format!("unknown vertex `{owner}`")));
        };
        if slot.is_some() {
            return Err(Error::syntax(no, format!("second preference line for `{owner}`")));
        }
        if let Model::TwoSidedTies { k } = model {
            if groups.iter().any(|g| g.len() > k) {
                return Err(Error::syntax(no, format!("tie longer than k={k}")));
            }
        }
        let list = PreferenceList::new(groups).map_err(|e| Error::syntax(no, e.to_string()))?;
        *slot = Some(list);
    }

    let agent_prefs = agent_lists.into_iter().map(Option::unwrap_or_default).collect();
    let job_prefs = model
        .has_job_lists()
        .then(|| job_lists.into_iter().map(Option::unwrap_or_default).collect());
    Instance::new(model, agents, jobs, agent_prefs, job_prefs)
}

fn write_list(out: &mut String, list: &PreferenceList, names: &[String]) {
    for (i, group) in list.groups().iter().enumerate() {
        out.push_str(if i == 0 { " " } else { " > " });
        if group.len() == 1 {
            out.push_str(&names[group[0]]);
        } else {
            out.push('[');
            let joined: Vec<&str> = group.iter().map(|&x| names[x].as_str()).collect();
            out.push_str(&joined.join(" "));
            out.push(']');
        }
    }
}

/// Canonical text form: vertices in index order, ties sorted by index.
pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {}", instance.model());
    let _ = writeln!(out, "agents {}", instance.agent_names().join(" "));
    let _ = writeln!(out, "jobs {}", instance.job_names().join(" "));
    for (a, name) in instance.agent_names().iter().enumerate() {
        out.push_str(name);
        out.push_str(" :");
        write_list(&mut out, instance.agent_prefs(a), instance.job_names());
        out.push('\n');
    }
    if instance.model().has_job_lists() {
        for (b, name) in instance.job_names().iter().enumerate() {
            out.push_str(name);
            out.push_str(" :");
            write_list(&mut out, instance.job_prefs(b), instance.agent_names());
            out.push('\n');
        }
    }
    out
}

/// Parses `agent job` lines against `instance`.
pub fn parse_matching(instance: &Instance, text: &str) -> Result<Matching> {
    let mut m = Matching::empty_for(instance);
    for (no, line) in meaningful_lines(text) {
        let words: Vec<&str> = line.split_whitespace().collect();
        let [agent, job] = words[..] else {
            return Err(Error::syntax(no, "expected `<agent> <job>`"));
        };
        let a = match instance.lookup(agent) {
            Some(VertexId {
                side: Side::Agent,
                index,
            }) => index,
            _ => return Err(Error::syntax(no, format!("`{agent}` is not an agent"))),
        };
        let b = match instance.lookup(job) {
            Some(VertexId {
                side: Side::Job,
                index,
            }) => index,
            _ => return Err(Error::syntax(no, format!("`{job}` is not a job"))),
        };
        if !instance.has_edge(a, b) {
            return Err(Error::syntax(no, format!("({agent}, {job}) is not an edge")));
        }
        m.insert(a, b).map_err(|e| Error::syntax(no, e.to_string()))?;
    }
    Ok(m)
}

pub fn serialize_matching(instance: &Instance, m: &Matching) -> String {
    let mut out = String::new();
    for (a, b) in m.pairs() {
        let _ = writeln!(out, "{} {}", instance.agent_names()[a], instance.job_names()[b]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_one_sided() {
        let inst = parse_instance("model one-sided\nagents a1\njobs b1\na1 : b1\n").unwrap();
        assert_eq!(inst.num_edges(), 1);
        assert_eq!(inst.model(), Model::OneSided);
    }

    #[test]
    fn job_line_rejected_without_job_lists() {
        let text = "model one-sided\nagents a1\njobs b1\na1 : b1\nb1 : a1\n";
        assert!(matches!(
            parse_instance(text),
            Err(Error::Syntax { line: 5, .. })
        ));
        let text = "model two-sided-one-tie\nagents a1\njobs b1\na1 : b1\nb1 : a1\n";
        assert!(parse_instance(text).is_err());
    }

    #[test]
    fn bracket_tie_maps_to_one_group() {
        let text = "model two-sided-ties k=2\nagents a1\njobs b1 b2\na1 : [b1 b2]\nb1 : a1\nb2 : a1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.agent_prefs(0).groups(), &[vec![0, 1]]);
    }

    #[test]
    fn comma_joins_the_previous_group() {
        let text = "model two-sided-ties k=2\nagents a1\njobs b1 b2 b3\na1 : b3 > b1 , b2\nb1 : a1\nb2 : a1\nb3 : a1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.agent_prefs(0).groups(), &[vec![2], vec![0, 1]]);
    }

    #[test]
    fn tie_longer_than_k_reports_line() {
        let text = "model two-sided-ties k=1\nagents a1\njobs b1 b2\na1 : [b1 b2]\n";
        assert!(matches!(parse_instance(text), Err(Error::Syntax { line: 4, .. })));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "# header\nmodel one-sided\nagents a1\njobs b1\n\na1 : b1 >\n";
        assert!(matches!(parse_instance(text), Err(Error::Syntax { line: 6, .. })));
        let text = "model one-sided\nagents a1\njobs b1\na1 : b1 b1\n";
        assert!(matches!(parse_instance(text), Err(Error::Syntax { line: 4, .. })));
        let text = "model one-sided\nagents a1\njobs b1\na1 : b1 > b1\n";
        assert!(matches!(parse_instance(text), Err(Error::Syntax { line: 4, .. })));
        assert!(matches!(parse_instance("model nope\n"), Err(Error::Syntax { line: 1, .. })));
        assert!(parse_instance("").is_err());
    }

    #[test]
    fn duplicate_names_rejected() {
        let text = "model one-sided\nagents a1 a1\njobs b1\n";
        assert_eq!(parse_instance(text), Err(Error::DuplicateName("a1".into())));
    }

    #[test]
    fn job_list_must_cover_neighbours() {
        let text = "model two-sided-ties k=1\nagents a1 a2\njobs b1\na1 : b1\na2 : b1\nb1 : a1\n";
        assert!(matches!(parse_instance(text), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn fixtures_round_trip() {
        let fixtures = [
            "model one-sided\nagents a1 a2 a3\njobs b1 b2 b3\na1 : b1 > b2 > b3\na2 : b1 > b2 > b3\na3 : b1 > b2 > b3\n",
            "model two-sided-one-tie\nagents a1 a2\njobs b1 b2 b3\na1 : b1 > b2\na2 :\n",
            "model two-sided-ties k=2\nagents a1 a2\njobs b1 b2\na1 : [b1 b2]\na2 : b1 > b2\nb1 : [a1 a2]\nb2 : a1 > a2\n",
        ];
        for text in fixtures {
            let inst = parse_instance(text).unwrap();
            let out = serialize_instance(&inst);
            assert_eq!(out, text);
            assert_eq!(parse_instance(&out).unwrap(), inst);
        }
    }

    #[test]
    fn matching_format() {
        let inst =
            parse_instance("model one-sided\nagents a1 a2\njobs b1 b2\na1 : b1 > b2\na2 : b1\n")
                .unwrap();
        let m = parse_matching(&inst, "# pairs\na2 b1\na1 b2\n").unwrap();
        assert_eq!(serialize_matching(&inst, &m), "a1 b2\na2 b1\n");
        assert!(matches!(parse_matching(&inst, "a2 b2\n"), Err(Error::Syntax { line: 1, .. })));
        assert!(parse_matching(&inst, "a1 b1\na2 b1\n").is_err());
        assert!(parse_matching(&inst, "b1 a1\n").is_err());
    }
}
