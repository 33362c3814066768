//! Exhaustive enumeration of the matchings of an instance, optionally with
//! some agents pinned to a job or to being unmatched.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matching::Matching;

/// A constraint on one agent during enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pin {
    Job(usize),
    Unmatched,
}

/// Visits every matching of `instance` compatible with `pins` (one entry per
/// agent, `None` = unconstrained). Agents are processed in index order; each
/// agent tries its jobs in preference order before staying unmatched. The
/// visitor may stop the search early by returning `ControlFlow::Break`.
pub fn for_each_matching<B, F>(instance: &Instance, pins: &[Option<Pin>], mut visit: F) -> Result<Option<B>>
where
    F: FnMut(&Matching) -> ControlFlow<B>,
{
    if pins.len() != instance.num_agents() {
        return Err(Error::InvalidArgument("one pin slot per agent required".into()));
    }
    let mut m = Matching::empty_for(instance);
    for (a, pin) in pins.iter().enumerate() {
        if let Some(Pin::Job(b)) = *pin {
            if !instance.has_edge(a, b) {
                return Err(Error::InvalidArgument(format!(
                    "pinned pair ({}, {b}) is not an edge",
                    instance.agent_names()[a]
                )));
            }
            m.insert(a, b)?;
        }
    }
    match recurse(instance, pins, 0, &mut m, &mut visit) {
        ControlFlow::Break(b) => Ok(Some(b)),
        ControlFlow::Continue(()) => Ok(None),
    }
}

fn recurse<B, F>(
    instance: &Instance,
    pins: &[Option<Pin>],
    a: usize,
    m: &mut Matching,
    visit: &mut F,
) -> ControlFlow<B>
where
    F: FnMut(&Matching) -> ControlFlow<B>,
{
    if a == instance.num_agents() {
        return visit(m);
    }
    if pins[a].is_some() {
        return recurse(instance, pins, a + 1, m, visit);
    }
    for b in instance.agent_prefs(a).items() {
        if m.agent_of(b).is_none() {
            m.link(a, b);
            recurse(instance, pins, a + 1, m, visit)?;
            m.remove_agent(a);
        }
    }
    recurse(instance, pins, a + 1, m, visit)
}

/// All matchings of `instance`, in enumeration order.
pub fn all_matchings(instance: &Instance) -> Vec<Matching> {
    let mut out = Vec::new();
    let pins = vec![None; instance.num_agents()];
    for_each_matching::<(), _>(instance, &pins, |m| {
        out.push(m.clone());
        ControlFlow::Continue(())
    })
    .expect("unconstrained enumeration cannot fail");
    out
}

pub fn count_matchings(instance: &Instance) -> u64 {
    let mut n = 0u64;
    let pins = vec![None; instance.num_agents()];
    for_each_matching::<(), _>(instance, &pins, |_| {
        n += 1;
        ControlFlow::Continue(())
    })
    .expect("unconstrained enumeration cannot fail");
    n
}
