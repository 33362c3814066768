use crate::error::{Error, Result};
use crate::instance::{Instance, PreferenceList};

/// The single agent whose preference order differs between two instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationDiff {
    pub agent: usize,
    pub order_first: PreferenceList,
    pub order_second: PreferenceList,
}

fn structural_mismatch(first: &Instance, second: &Instance) -> Option<&'static str> {
    if first.model() != second.model() {
        return Some("models differ");
    }
    if first.agent_names() != second.agent_names() || first.job_names() != second.job_names() {
        return Some("vertex sets differ");
    }
    let same_graph = (0..first.num_agents())
        .all(|a| first.agent_prefs(a).item_set().eq(second.agent_prefs(a).item_set()));
    if !same_graph {
        return Some("edge sets differ");
    }
    if (0..first.num_jobs()).any(|b| first.job_prefs(b) != second.job_prefs(b)) {
        return Some("job preferences differ");
    }
    None
}

/// Identifies the perturbed agent of an instance pair.
///
/// Returns `Ok(None)` for identical instances and an error when the pair is
/// not a single-agent perturbation.
pub fn diff_instances(first: &Instance, second: &Instance) -> Result<Option<PerturbationDiff>> {
    if let Some(reason) = structural_mismatch(first, second) {
        return Err(Error::NotSingleAgentPerturbation(reason.to_string()));
    }
    let mut differing = (0..first.num_agents()).filter(|&a| first.agent_prefs(a) != second.agent_prefs(a));
    let Some(agent) = differing.next() else {
        return Ok(None);
    };
    if let Some(other) = differing.next() {
        return Err(Error::NotSingleAgentPerturbation(format!(
            "agents {} and {} both changed their preferences",
            first.agent_names()[agent],
            first.agent_names()[other]
        )));
    }
    Ok(Some(PerturbationDiff {
        agent,
        order_first: first.agent_prefs(agent).clone(),
        order_second: second.agent_prefs(agent).clone(),
    }))
}

/// The agent in which all `instances` may differ from the first one.
/// `Ok(None)` when all instances are identical.
pub fn common_perturbed_agent(instances: &[&Instance]) -> Result<Option<usize>> {
    let Some((first, rest)) = instances.split_first() else {
        return Err(Error::InvalidArgument("no instances given".into()));
    };
    let mut agent = None;
    for other in rest {
        if let Some(d) = diff_instances(first, other)? {
            match agent {
                Some(a) if a != d.agent => {
                    return Err(Error::NotSingleAgentPerturbation(format!(
                        "instances perturb both {} and {}",
                        first.agent_names()[a],
                        first.agent_names()[d.agent]
                    )))
                }
                _ => agent = Some(d.agent),
            }
        }
    }
    Ok(agent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_instance;

    const BASE: &str = "model one-sided\nagents a1 a2\njobs b1 b2\na1 : b1 > b2\na2 : b1 > b2\n";

    #[test]
    fn identical_instances_have_no_diff() {
        let i = parse_instance(BASE).unwrap();
        assert_eq!(diff_instances(&i, &i), Ok(None));
    }

    #[test]
    fn reversed_list_is_detected() {
        let i = parse_instance(BASE).unwrap();
        let j = parse_instance(&BASE.replace("a1 : b1 > b2", "a1 : b2 > b1")).unwrap();
        let d = diff_instances(&i, &j).unwrap().unwrap();
        assert_eq!(d.agent, 0);
        assert_eq!(d.order_second, PreferenceList::strict([1, 0]).unwrap());
    }

    #[test]
    fn structural_changes_rejected() {
        let i = parse_instance(BASE).unwrap();
        let j = parse_instance(&BASE.replace("a2 : b1 > b2", "a2 : b1")).unwrap();
        assert!(matches!(diff_instances(&i, &j), Err(Error::NotSingleAgentPerturbation(_))));
        let k = parse_instance(&BASE.replace("one-sided", "two-sided-one-tie")).unwrap();
        assert!(diff_instances(&i, &k).is_err());
        let two = parse_instance(
            "model one-sided\nagents a1 a2\njobs b1 b2\na1 : b2 > b1\na2 : b2 > b1\n",
        )
        .unwrap();
        assert!(diff_instances(&i, &two).is_err());
    }
}
