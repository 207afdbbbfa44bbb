use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::ContextualityError;
use crate::abelian::GroupElement;
use crate::scenario::{EmpiricalModel, Outcome};

/// An outcome for every `(party, choice)` pair that occurs in some context.
/// Parties are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalSection {
    pub values: BTreeMap<(usize, usize), GroupElement>,
}

impl GlobalSection {
    pub fn get(&self, party: usize, choice: usize) -> Option<&GroupElement> {
        self.values.get(&(party, choice))
    }
}

/// True iff the restriction of `assignment` to every context lies in that
/// context's support.
pub fn is_global_section(model: &EmpiricalModel, assignment: &GlobalSection) -> bool {
    let group = model.group();
    model.contexts().iter().enumerate().all(|(i, c)| {
        let outcome: Option<Outcome> =
            c.choices.iter().enumerate().map(|(j, &m)| assignment.get(j, m).map(|g| group.index_of(g))).collect();
        outcome.is_some_and(|o| model.support(i).any(|s| *s == o))
    })
}

/// Depth-first search for a global section.
///
/// Variables are `(party, choice)` pairs in lexicographic order, values in
/// element enumeration order; the first section found is returned. Because
/// variables are ordered party-first, the assigned part of every context is
/// always a prefix of its parties, so each context is checked against the set
/// of prefixes of its support as soon as a new party is filled in.
pub fn find_global_section(model: &EmpiricalModel, cap: u64) -> Result<Option<GlobalSection>, ContextualityError> {
    let group = model.group();
    let order = group.order();
    let contexts = model.contexts();

    let variables: Vec<(usize, usize)> = contexts
        .iter()
        .flat_map(|c| c.choices.iter().enumerate().map(|(j, &m)| (j, m)))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let size = (order as u64).checked_pow(variables.len() as u32).unwrap_or(u64::MAX);
    if size > cap {
        return Err(ContextualityError::SearchSpaceTooLarge { size, cap });
    }

    // prefixes[c][len] = set of support prefixes of that length
    let prefixes: Vec<Vec<HashSet<Vec<usize>>>> = (0..contexts.len())
        .map(|i| {
            let mut by_len = vec![HashSet::new(); model.parties() + 1];
            for o in model.support(i) {
                for len in 1..=o.len() {
                    by_len[len].insert(o[..len].to_vec());
                }
            }
            by_len
        })
        .collect();

    let watchers: Vec<Vec<usize>> = variables
        .iter()
        .map(|&(j, m)| (0..contexts.len()).filter(|&c| contexts[c].choices[j] == m).collect())
        .collect();

    let mut search =
        Search { model, variables: &variables, watchers: &watchers, prefixes: &prefixes, values: BTreeMap::new() };
    if !search.extend(0) {
        return Ok(None);
    }
    let values = search.values.into_iter().map(|(k, v)| (k, group.element_at(v))).collect();
    Ok(Some(GlobalSection { values }))
}

struct Search<'a> {
    model: &'a EmpiricalModel,
    variables: &'a [(usize, usize)],
    watchers: &'a [Vec<usize>],
    prefixes: &'a [Vec<HashSet<Vec<usize>>>],
    values: BTreeMap<(usize, usize), usize>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.variables.len() {
            return true;
        }
        let (party, choice) = self.variables[depth];
        for value in 0..self.model.group().order() {
            self.values.insert((party, choice), value);
            if self.consistent(depth) && self.extend(depth + 1) {
                return true;
            }
        }
        self.values.remove(&(party, choice));
        false
    }

    fn consistent(&self, depth: usize) -> bool {
        let (party, _) = self.variables[depth];
        self.watchers[depth].iter().all(|&c| {
            let choices = &self.model.contexts()[c].choices;
            let prefix: Vec<usize> = (0..=party).map(|j| self.values[&(j, choices[j])]).collect();
            self.prefixes[c][party + 1].contains(&prefix)
        })
    }
}
