//! Bounded bidirectional search for a common move-descendant.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{find_elementary_moves, MoveParams};
use crate::words::{GroupWord, InverseAlphabet, Word};

/// Limits for [`common_descendant_search`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Distinct words stored over both sides.
    pub max_states: usize,
    /// Moves applied along one side.
    pub max_depth: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_states: 100_000,
            max_depth: 32,
        }
    }
}

/// One applied move, as recorded in a search trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MoveRecord {
    pub position: usize,
    #[serde(skip)]
    pub period: Word,
    pub multiplicity: usize,
    #[serde(skip)]
    pub result: GroupWord,
}

impl MoveRecord {
    pub fn result_len(&self) -> usize {
        self.result.len()
    }

    /// `position=<i> period=<u> m=<m> length=<len>`
    pub fn trace_line(&self, alphabet: &InverseAlphabet) -> String {
        format!(
            "position={} period={} m={} length={}",
            self.position,
            alphabet.format(&self.period),
            self.multiplicity,
            self.result.len()
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Both words reach `witness`; `left` moves the first word there and
    /// `right` the second.
    Joined {
        witness: GroupWord,
        left: Vec<MoveRecord>,
        right: Vec<MoveRecord>,
    },
    /// No common descendant found. This is not a proof that the words
    /// differ in the Burnside group.
    Undecided {
        explored_left: usize,
        explored_right: usize,
        /// The budget stopped the search before the move graph was
        /// exhausted.
        budget_exhausted: bool,
    },
}

impl SearchOutcome {
    pub fn is_joined(&self) -> bool {
        matches!(self, SearchOutcome::Joined { .. })
    }

    /// Line-oriented trace, one move per line, each side under a header.
    pub fn trace(&self, alphabet: &InverseAlphabet) -> String {
        let mut out = String::new();
        match self {
            SearchOutcome::Joined {
                witness,
                left,
                right,
            } => {
                let _ = writeln!(out, "joined {}", alphabet.format(witness));
                for (side, moves) in [("left", left), ("right", right)] {
                    let _ = writeln!(out, "{side} {}", moves.len());
                    for m in moves {
                        out.push_str(&m.trace_line(alphabet));
                        out.push('\n');
                    }
                }
            }
            SearchOutcome::Undecided {
                explored_left,
                explored_right,
                budget_exhausted,
            } => {
                let _ = writeln!(
                    out,
                    "undecided explored_left={explored_left} explored_right={explored_right} budget_exhausted={budget_exhausted}"
                );
            }
        }
        out
    }
}

struct Side {
    parent: HashMap<GroupWord, Option<(GroupWord, MoveRecord)>>,
    frontier: Vec<GroupWord>,
    depth: usize,
}

impl Side {
    fn new(start: &GroupWord) -> Self {
        let mut parent = HashMap::new();
        parent.insert(start.clone(), None);
        Side {
            parent,
            frontier: vec![start.clone()],
            depth: 0,
        }
    }

    /// Moves from the root to `w`, in application order.
    fn path_to(&self, w: &GroupWord) -> Vec<MoveRecord> {
        let mut path = Vec::new();
        let mut cur = w.clone();
        while let Some(Some((prev, record))) = self.parent.get(&cur) {
            path.push(record.clone());
            cur = prev.clone();
        }
        path.reverse();
        path
    }
}

enum Step {
    Met(GroupWord),
    OutOfStates,
    Done,
}

fn expand(this: &mut Side, other: &Side, params: &MoveParams, room: &mut usize) -> Step {
    let frontier = std::mem::take(&mut this.frontier);
    this.depth += 1;
    let mut next = Vec::new();
    for w in frontier {
        for mv in find_elementary_moves(&w, params) {
            if this.parent.contains_key(&mv.result) {
                continue;
            }
            if *room == 0 {
                return Step::OutOfStates;
            }
            *room -= 1;
            let record = MoveRecord {
                position: mv.run.start,
                period: mv.run.period.clone(),
                multiplicity: mv.run.exponent,
                result: mv.result.clone(),
            };
            this.parent
                .insert(mv.result.clone(), Some((w.clone(), record)));
            if other.parent.contains_key(&mv.result) {
                return Step::Met(mv.result);
            }
            next.push(mv.result);
        }
    }
    this.frontier = next;
    Step::Done
}

/// Breadth-first search from both words, one level at a time on the side
/// with the smaller frontier, until a word is reached from both sides or
/// the budget runs out.
///
/// Words are memoized as freely reduced based words; no cyclic
/// normalisation is applied.
pub fn common_descendant_search(
    w1: &GroupWord,
    w2: &GroupWord,
    params: &MoveParams,
    budget: SearchBudget,
) -> SearchOutcome {
    if w1 == w2 {
        return SearchOutcome::Joined {
            witness: w1.clone(),
            left: Vec::new(),
            right: Vec::new(),
        };
    }
    let mut left = Side::new(w1);
    let mut right = Side::new(w2);
    let mut room = budget.max_states.saturating_sub(2);
    loop {
        let left_open = !left.frontier.is_empty() && left.depth < budget.max_depth;
        let right_open = !right.frontier.is_empty() && right.depth < budget.max_depth;
        let pick_left = match (left_open, right_open) {
            (false, false) => {
                let stopped_by_depth = !left.frontier.is_empty() || !right.frontier.is_empty();
                return SearchOutcome::Undecided {
                    explored_left: left.parent.len(),
                    explored_right: right.parent.len(),
                    budget_exhausted: stopped_by_depth,
                };
            }
            (true, false) => true,
            (false, true) => false,
            (true, true) => left.frontier.len() <= right.frontier.len(),
        };
        let step = if pick_left {
            expand(&mut left, &right, params, &mut room)
        } else {
            expand(&mut right, &left, params, &mut room)
        };
        match step {
            Step::Met(witness) => {
                return SearchOutcome::Joined {
                    left: left.path_to(&witness),
                    right: right.path_to(&witness),
                    witness,
                }
            }
            Step::OutOfStates => {
                return SearchOutcome::Undecided {
                    explored_left: left.parent.len(),
                    explored_right: right.parent.len(),
                    budget_exhausted: true,
                }
            }
            Step::Done => {}
        }
    }
}
