//! Backward trajectories and Bowen-ball membership.
//!
//! An inverse Bowen ball around a prehistory x̂ = (x₀, x₋₁, …) holds the
//! points z that have some backward branch (z, z₋₁, …, z₋ₙ) staying within
//! ε of x̂ at every level. Membership is decided by a depth-first search of
//! the preimage tree of z, cut wherever a level leaves the ε-neighbourhood.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::numerics::RngStream;
use crate::systems::{Endomorphism, ReferenceMeasure};

/// (x₀, x₋₁, …, x₋ₙ) with f(x₋ᵢ) = x₋ᵢ₊₁.
#[derive(Clone, Debug, PartialEq)]
pub struct Prehistory<P> {
    points: Vec<P>,
}

impl<P: Clone> Prehistory<P> {
    /// `points[i]` is x₋ᵢ. Panics on an empty list.
    pub fn new(points: Vec<P>) -> Self {
        assert!(!points.is_empty(), "a prehistory holds at least x0");
        Self { points }
    }

    pub fn depth(&self) -> usize {
        self.points.len() - 1
    }

    pub fn x0(&self) -> &P {
        &self.points[0]
    }

    /// x₋ᵢ
    pub fn point(&self, i: usize) -> &P {
        &self.points[i]
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn truncated(&self, depth: usize) -> Self {
        Self { points: self.points[..=depth.min(self.depth())].to_vec() }
    }

    /// Largest d(f(x₋ᵢ), x₋ᵢ₊₁) along the trajectory.
    pub fn max_defect<S: Endomorphism<Point = P>>(&self, sys: &S) -> f64 {
        (1..self.points.len())
            .map(|i| sys.distance(&sys.apply(&self.points[i]), &self.points[i - 1]))
            .fold(0.0, f64::max)
    }
}

/// Which kind of Bowen ball a query describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Direction {
    Forward,
    Inverse,
}

/// One forward or inverse Bowen ball of depth `n` and radius `epsilon`.
#[derive(Clone, Copy, Debug)]
pub struct BowenQuery<'a, P> {
    pub anchor: &'a Prehistory<P>,
    pub n: usize,
    pub epsilon: f64,
    pub direction: Direction,
}

impl<'a, P: Clone> BowenQuery<'a, P> {
    pub fn new(anchor: &'a Prehistory<P>, n: usize, epsilon: f64, direction: Direction) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(invalid("epsilon", "must be positive"));
        }
        if direction == Direction::Inverse && n > anchor.depth() {
            return Err(invalid("n", "exceeds the anchor depth"));
        }
        Ok(Self { anchor, n, epsilon, direction })
    }

    pub fn inverse(anchor: &'a Prehistory<P>, n: usize, epsilon: f64) -> Result<Self> {
        Self::new(anchor, n, epsilon, Direction::Inverse)
    }

    pub fn forward(anchor: &'a Prehistory<P>, n: usize, epsilon: f64) -> Result<Self> {
        Self::new(anchor, n, epsilon, Direction::Forward)
    }
}

/// Walks back from `x0`, choosing among preimages with the system's
/// backward weights (1/J where the Jacobian is known, uniform otherwise).
pub fn sample_backward<S: Endomorphism>(sys: &S, x0: S::Point, depth: usize, rng: &mut RngStream) -> Prehistory<S::Point> {
    let mut points = Vec::with_capacity(depth + 1);
    points.push(x0);
    let mut pre = Vec::new();
    let mut weights = Vec::new();
    for i in 0..depth {
        sys.preimages_into(&points[i], &mut pre);
        if pre.is_empty() {
            break;
        }
        sys.backward_weights(&pre, &mut weights);
        let k = rng.next_weighted(&weights);
        points.push(pre.swap_remove(k));
    }
    Prehistory::new(points)
}

/// A prehistory of `x0` of the given depth. For systems without closed-form
/// backward conditionals (the SRB cases) the step law is uniform over the
/// admissible preimages, which only approximates the lift.
pub fn sample_prehistory<S: Endomorphism>(
    sys: &S,
    tag: ReferenceMeasure,
    x0: S::Point,
    depth: usize,
    rng: &mut RngStream,
) -> Result<Prehistory<S::Point>> {
    sys.check_measure(tag)?;
    let p = sample_backward(sys, x0, depth, rng);
    if p.depth() < depth {
        return Err(Error::InvalidParameter { name: "x0", reason: "point has no preimage".into() });
    }
    Ok(p)
}

/// d(fⁱz, fⁱx) < eps for 0 ≤ i ≤ n.
pub fn is_in_forward_bowen_ball<S: Endomorphism>(sys: &S, x: &S::Point, n: usize, eps: f64, z: &S::Point) -> bool {
    let mut a = x.clone();
    let mut b = z.clone();
    for i in 0..=n {
        if !(sys.distance(&a, &b) < eps) {
            return false;
        }
        if i < n {
            a = sys.apply(&a);
            b = sys.apply(&b);
        }
    }
    true
}

/// Same test against a precomputed forward orbit `orbit[i] = fⁱx`.
/// Returns the deepest n ≤ max_n with z in B_n(x, eps), or None if z is
/// not even within eps of x.
pub fn deepest_forward_level<S: Endomorphism>(sys: &S, orbit: &[S::Point], eps: f64, max_n: usize, z: &S::Point) -> Option<usize> {
    let mut b = z.clone();
    let last = max_n.min(orbit.len() - 1);
    for (i, a) in orbit.iter().enumerate().take(last + 1) {
        if !(sys.distance(a, &b) < eps) {
            return i.checked_sub(1);
        }
        if i < last {
            b = sys.apply(&b);
        }
    }
    Some(last)
}

/// Reusable buffers for preimage-tree searches.
pub struct BranchSearch<'s, S: Endomorphism> {
    sys: &'s S,
    levels: Vec<Vec<S::Point>>,
    nodes: u64,
}

impl<'s, S: Endomorphism> BranchSearch<'s, S> {
    pub fn new(sys: &'s S) -> Self {
        Self { sys, levels: Vec::new(), nodes: 0 }
    }

    /// Preimage expansions performed since construction.
    pub fn nodes_expanded(&self) -> u64 {
        self.nodes
    }

    fn take_level(&mut self, level: usize) -> Vec<S::Point> {
        if self.levels.len() <= level {
            self.levels.resize_with(level + 1, Vec::new);
        }
        core::mem::take(&mut self.levels[level])
    }

    /// Deepest level n ≤ max_n such that z lies in the inverse ball of depth
    /// n around `anchor`; `None` when d(z, x₀) ≥ eps.
    pub fn deepest_inverse_level(&mut self, anchor: &[S::Point], eps: f64, max_n: usize, z: &S::Point) -> Option<usize> {
        if !(self.sys.distance(z, &anchor[0]) < eps) {
            return None;
        }
        let target = max_n.min(anchor.len() - 1);
        Some(self.descend(anchor, eps, target, 0, z))
    }

    fn descend(&mut self, anchor: &[S::Point], eps: f64, target: usize, level: usize, z: &S::Point) -> usize {
        if level == target {
            return level;
        }
        let mut buf = self.take_level(level);
        self.sys.preimages_into(z, &mut buf);
        self.nodes += 1;
        let next = &anchor[level + 1];
        let mut best = level;
        for w in buf.iter() {
            if self.sys.distance(w, next) < eps {
                let d = self.descend(anchor, eps, target, level + 1, w);
                if d > best {
                    best = d;
                    if best == target {
                        break;
                    }
                }
            }
        }
        self.levels[level] = buf;
        best
    }

    /// First admissible branch (z, z₋₁, …, z₋ₙ), if any.
    pub fn find_branch(&mut self, anchor: &[S::Point], eps: f64, n: usize, z: &S::Point) -> Option<Vec<S::Point>> {
        if !(self.sys.distance(z, &anchor[0]) < eps) || n >= anchor.len() {
            return None;
        }
        let mut path = Vec::with_capacity(n + 1);
        path.push(z.clone());
        if self.find_path(anchor, eps, n, &mut path) {
            Some(path)
        } else {
            None
        }
    }

    fn find_path(&mut self, anchor: &[S::Point], eps: f64, n: usize, path: &mut Vec<S::Point>) -> bool {
        let level = path.len() - 1;
        if level == n {
            return true;
        }
        let mut buf = self.take_level(level);
        self.sys.preimages_into(&path[level], &mut buf);
        self.nodes += 1;
        let mut found = false;
        for w in buf.iter() {
            if self.sys.distance(w, &anchor[level + 1]) < eps {
                path.push(w.clone());
                if self.find_path(anchor, eps, n, path) {
                    found = true;
                    break;
                }
                path.pop();
            }
        }
        self.levels[level] = buf;
        found
    }

    /// Number of distinct admissible branches of depth n, with preimages at
    /// each level deduplicated at 1e-9.
    pub fn count_branches(&mut self, anchor: &[S::Point], eps: f64, n: usize, z: &S::Point) -> u64 {
        if !(self.sys.distance(z, &anchor[0]) < eps) || n >= anchor.len() {
            return 0;
        }
        self.count_from(anchor, eps, n, 0, z)
    }

    fn count_from(&mut self, anchor: &[S::Point], eps: f64, n: usize, level: usize, z: &S::Point) -> u64 {
        if level == n {
            return 1;
        }
        let mut buf = self.take_level(level);
        self.sys.preimages_into(z, &mut buf);
        self.nodes += 1;
        let mut kept: Vec<S::Point> = Vec::with_capacity(buf.len());
        for w in buf.iter() {
            if self.sys.distance(w, &anchor[level + 1]) < eps && !kept.iter().any(|k| self.sys.distance(k, w) < 1e-9) {
                kept.push(w.clone());
            }
        }
        self.levels[level] = buf;
        kept.iter().map(|w| self.count_from(anchor, eps, n, level + 1, w)).sum()
    }
}

/// z ∈ B⁻ₙ(x̂, ε) for an inverse query; z ∈ Bₙ(x₀, ε) for a forward one.
pub fn is_in_inverse_bowen_ball<S: Endomorphism>(sys: &S, q: &BowenQuery<'_, S::Point>, z: &S::Point) -> bool {
    match q.direction {
        Direction::Forward => is_in_forward_bowen_ball(sys, q.anchor.x0(), q.n, q.epsilon, z),
        Direction::Inverse => {
            let mut search = BranchSearch::new(sys);
            search.deepest_inverse_level(q.anchor.points(), q.epsilon, q.n, z) == Some(q.n)
        }
    }
}

/// Number of distinct ε-admissible backward branches of z (0 iff z is not in the ball).
pub fn count_admissible_branches<S: Endomorphism>(sys: &S, q: &BowenQuery<'_, S::Point>, z: &S::Point) -> u64 {
    BranchSearch::new(sys).count_branches(q.anchor.points(), q.epsilon, q.n, z)
}

/// Endpoint z₋ₙ of the first admissible branch, if one exists.
pub fn admissible_endpoint<S: Endomorphism>(sys: &S, q: &BowenQuery<'_, S::Point>, z: &S::Point) -> Option<S::Point> {
    BranchSearch::new(sys).find_branch(q.anchor.points(), q.epsilon, q.n, z).and_then(|mut p| p.pop())
}
