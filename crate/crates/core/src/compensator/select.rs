use alloc::vec::Vec;

use crate::narx::{Interval, Regime};
use crate::poly::{RootSet, DEFAULT_IM_TOL};

/// Roots this close to a bound (relative to the span) are snapped onto it.
pub const BOUND_SNAP: f64 = 1e-9;

/// Outcome of root selection for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    Root(f64),
    /// No admissible root: keep the previous input.
    Hold,
}

impl Selection {
    pub fn or_hold(self, previous: f64) -> f64 {
        match self {
            Selection::Root(x) => x,
            Selection::Hold => previous,
        }
    }
}

/// Real roots inside `bounds` and, on a branch, strictly on the branch side
/// of `pivot` (above it when loading, below it when unloading).
pub fn admissible_roots(
    roots: &RootSet,
    pivot: f64,
    bounds: Interval,
    branch: Option<Regime>,
) -> Vec<f64> {
    let snap = BOUND_SNAP * bounds.span();
    roots
        .real_roots(DEFAULT_IM_TOL)
        .into_iter()
        .map(|x| {
            if x < bounds.lo && bounds.lo - x <= snap {
                bounds.lo
            } else if x > bounds.hi && x - bounds.hi <= snap {
                bounds.hi
            } else {
                x
            }
        })
        .filter(|&x| bounds.contains(x))
        .filter(|&x| match branch {
            None => true,
            Some(Regime::Loading) => x > pivot,
            Some(Regime::Unloading) => x < pivot,
        })
        .collect()
}

/// Candidate closest to `previous`; the first one wins ties.
pub fn closest(candidates: impl IntoIterator<Item = f64>, previous: f64) -> Selection {
    candidates
        .into_iter()
        .fold(None, |best: Option<f64>, x| match best {
            Some(b) if (b - previous).abs() <= (x - previous).abs() => Some(b),
            _ => Some(x),
        })
        .map_or(Selection::Hold, Selection::Root)
}

/// Admissible root closest to the previous input, or [`Selection::Hold`].
pub fn select_root(
    roots: &RootSet,
    previous: f64,
    bounds: Interval,
    branch: Option<Regime>,
) -> Selection {
    closest(admissible_roots(roots, previous, bounds, branch), previous)
}
