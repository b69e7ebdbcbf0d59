//! Sample/symbol pairing for successive processing.
//!
//! Sample `y_l(j)` sees `b_k(j)` for `k ≤ l` and `b_k(j-1)` for `k > l`.
//! Walking the samples in time order, each one contains exactly one symbol
//! not seen before; walking backwards from `y_{K-1}(N+1)` the same holds in
//! reverse. Slots and users are 0-based here: samples live in slots `0..=N`,
//! symbols in `0..N`.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Step {
    pub slot: usize,
    pub user: usize,
    /// `(slot, user)` of the symbol first seen in this sample.
    pub exposes: (usize, usize),
}

/// Symbols present in sample `(slot, l)`, as `(slot, user)` pairs.
pub(crate) fn involved(frame_len: usize, users: usize, slot: usize, l: usize) -> impl Iterator<Item = (usize, usize)> {
    let current = (slot < frame_len).then_some(0..=l).into_iter().flatten().map(move |k| (slot, k));
    let previous = (slot >= 1)
        .then_some(l + 1..users)
        .into_iter()
        .flatten()
        .map(move |k| (slot - 1, k));
    current.chain(previous)
}

pub(crate) fn schedule(direction: Direction, frame_len: usize, users: usize) -> Vec<Step> {
    let mut steps = Vec::with_capacity(frame_len * users);
    match direction {
        Direction::Forward => {
            for slot in 0..frame_len {
                for user in 0..users {
                    steps.push(Step {
                        slot,
                        user,
                        exposes: (slot, user),
                    });
                }
            }
        }
        Direction::Backward => {
            for slot in (0..=frame_len).rev() {
                for user in (0..users).rev() {
                    let exposes = if user + 1 == users {
                        (slot < frame_len).then_some((slot, 0))
                    } else {
                        (slot >= 1).then(|| (slot - 1, user + 1))
                    };
                    if let Some(exposes) = exposes {
                        steps.push(Step { slot, user, exposes });
                    }
                }
            }
        }
    }
    steps
}
