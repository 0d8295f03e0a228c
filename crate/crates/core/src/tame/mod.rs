//! Exact rectangle unions in the plane, coordinate projections, fibers and
//! robust disconnection of fibers.
//!
//! All arithmetic is over [`BigRational`]; nothing in this module uses a
//! tolerance.
//!
//! Robust disconnection at `t0` is decided on the components of the preimage
//! of a small open interval `N = (t0 - δ, t0 + δ)`. Components of an open set
//! are open and pairwise disjoint, so two disjoint opens `V, W` covering the
//! preimage, both meeting the fiber, exist exactly when at least two
//! components meet the fiber. Below the distance from `t0` to the nearest
//! other critical abscissa the component structure does not depend on `δ`,
//! and between consecutive critical abscissae it does not depend on `t0`, so
//! the critical values and one sample per gap are enough for a global
//! verdict. The reformulation assumes the preimage is open in the ambient
//! set, which holds for unions of rectangles with the subspace topology.

mod certificate;
mod geometry;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use certificate::{certificate_covering, CertificateCheck, SamplePoint};
pub use geometry::{Interval, IntervalUnion, Rect};

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TameError {
    #[error("not a rational number: `{0}`")]
    BadRational(String),
    #[error("rectangle {index}: {reason}")]
    BadRectangle { index: usize, reason: String },
    #[error("empty rectangle union")]
    Empty,
    #[error(transparent)]
    LocalGlobal(#[from] Box<crate::local_global::LocalGlobalError>),
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.4"`.
pub fn parse_rational(s: &str) -> Result<Q, TameError> {
    let bad = || TameError::BadRational(s.to_string());
    let t = s.trim();
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: num_bigint::BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let scale = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Q::new(digits, scale));
    }
    t.parse::<Q>().map_err(|_| bad())
}

/// Renders a rational as `p` or `p/q`.
pub fn format_rational(q: &Q) -> String {
    q.to_string()
}

/// Which coordinate the input judge projects onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[default]
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

/// On-disk rectangle: rational strings and open flags for the left, right,
/// bottom and top edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectDoc {
    pub x: [String; 2],
    pub y: [String; 2],
    pub open: [bool; 4],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectUnionDoc {
    #[serde(default)]
    pub axis: Axis,
    pub rectangles: Vec<RectDoc>,
}

/// A finite union of axis-aligned rectangles with a projection judge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectUnion {
    rects: Vec<Rect>,
    axis: Axis,
}

/// Components of the preimage of `(t0 - δ, t0 + δ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearComponents {
    pub t0: Q,
    pub delta: Q,
    /// Each component as the clipped rectangle pieces it is made of.
    pub components: Vec<Vec<Rect>>,
}

impl NearComponents {
    /// Components with a point over `t0`.
    pub fn meeting_fiber(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&k| self.components[k].iter().any(|r| r.proj_contains(&self.t0)))
            .collect()
    }
}

/// One component of a robust disconnection, with a marked point over `t0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedComponent {
    pub pieces: Vec<Rect>,
    /// `(projected coordinate, other coordinate)`.
    pub marked: (Q, Q),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustDisconnectionCertificate {
    pub t0: Q,
    /// The open interval `N` around `t0`.
    pub neighborhood: (Q, Q),
    pub components: Vec<MarkedComponent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafVerdict {
    pub sheaf: bool,
    /// Candidate values whose fiber has at least two components.
    pub disconnected_fibers: Vec<Q>,
    /// Candidate values whose fiber is robustly disconnected.
    pub robust: Vec<Q>,
    /// Set when some edge is open, so compactness of the ambient set is not
    /// established.
    pub compactness_unchecked: bool,
}

impl SheafVerdict {
    /// One-line summary, e.g. `sheaf: yes; disconnected fiber at 1/2: yes; robust: no`.
    pub fn summary(&self) -> String {
        let yn = |b: bool| if b { "yes" } else { "no" };
        match self.disconnected_fibers.first() {
            Some(t) => format!(
                "sheaf: {}; disconnected fiber at {}: yes; robust: {}",
                yn(self.sheaf),
                format_rational(t),
                yn(self.robust.contains(t))
            ),
            None => format!("sheaf: {}; disconnected fibers: none", yn(self.sheaf)),
        }
    }
}

impl RectUnion {
    pub fn new(rects: Vec<Rect>, axis: Axis) -> Result<Self, TameError> {
        if rects.is_empty() {
            return Err(TameError::Empty);
        }
        Ok(RectUnion { rects, axis })
    }

    pub fn from_doc(doc: &RectUnionDoc) -> Result<Self, TameError> {
        let rects = doc
            .rectangles
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let x = (parse_rational(&r.x[0])?, parse_rational(&r.x[1])?);
                let y = (parse_rational(&r.y[0])?, parse_rational(&r.y[1])?);
                Rect::new(x, y, r.open)
                    .map_err(|reason| TameError::BadRectangle { index: k, reason })
            })
            .collect::<Result<Vec<_>, _>>()?;
        RectUnion::new(rects, doc.axis)
    }

    pub fn to_doc(&self) -> RectUnionDoc {
        RectUnionDoc {
            axis: self.axis,
            rectangles: self
                .rects
                .iter()
                .map(|r| RectDoc {
                    x: [format_rational(&r.x.lo), format_rational(&r.x.hi)],
                    y: [format_rational(&r.y.lo), format_rational(&r.y.hi)],
                    open: [r.x.lo_open, r.x.hi_open, r.y.lo_open, r.y.hi_open],
                })
                .collect(),
        }
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    /// The same set with rectangles stored projected-coordinate first.
    fn oriented(&self) -> Vec<Rect> {
        match self.axis {
            Axis::X => self.rects.clone(),
            Axis::Y => self.rects.iter().map(Rect::transposed).collect(),
        }
    }

    /// The fiber over `t` as a merged union of intervals in the other
    /// coordinate.
    pub fn fiber(&self, t: &Q) -> IntervalUnion {
        IntervalUnion::new(
            self.oriented()
                .iter()
                .filter(|r| r.x.contains(t))
                .map(|r| r.y.clone())
                .collect(),
        )
    }

    /// Sorted distinct edge coordinates along the projection.
    pub fn critical_values(&self) -> Vec<Q> {
        let set: BTreeSet<Q> = self
            .oriented()
            .iter()
            .flat_map(|r| [r.x.lo.clone(), r.x.hi.clone()])
            .collect();
        set.into_iter().collect()
    }

    /// Half the distance from `t0` to the nearest other critical value, or 1
    /// if there is none.
    pub fn safe_delta(&self, t0: &Q) -> Q {
        let two = Q::from_integer(2.into());
        self.critical_values()
            .iter()
            .filter(|c| *c != t0)
            .map(|c| (c - t0).abs())
            .min()
            .map(|d| d / two)
            .unwrap_or_else(Q::one)
    }

    /// Components of the preimage of `(t0 - δ, t0 + δ)` for an explicit `δ`.
    pub fn preimage_components_with(&self, t0: &Q, delta: &Q) -> NearComponents {
        let n = Interval::open(t0 - delta, t0 + delta);
        let pieces: Vec<Rect> = self
            .oriented()
            .iter()
            .filter_map(|r| r.clip_x(&n))
            .collect();
        let mut parent: Vec<usize> = (0..pieces.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for a in 0..pieces.len() {
            for b in a + 1..pieces.len() {
                if pieces[a].union_connected(&pieces[b]) {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut groups: Vec<(usize, Vec<Rect>)> = Vec::new();
        for (k, piece) in pieces.into_iter().enumerate() {
            let root = find(&mut parent, k);
            match groups.iter_mut().find(|g| g.0 == root) {
                Some(g) => g.1.push(piece),
                None => groups.push((root, vec![piece])),
            }
        }
        NearComponents {
            t0: t0.clone(),
            delta: delta.clone(),
            components: groups.into_iter().map(|g| g.1).collect(),
        }
    }

    /// Components of the preimage of a neighborhood of `t0` small enough that
    /// the answer no longer depends on its size.
    pub fn preimage_components_near(&self, t0: &Q) -> NearComponents {
        self.preimage_components_with(t0, &self.safe_delta(t0))
    }

    pub fn robustly_disconnected(&self, t0: &Q) -> Option<RobustDisconnectionCertificate> {
        let near = self.preimage_components_near(t0);
        let hits = near.meeting_fiber();
        if hits.len() < 2 {
            return None;
        }
        let components = hits
            .into_iter()
            .map(|k| {
                let pieces = near.components[k].clone();
                let over = pieces
                    .iter()
                    .find(|r| r.proj_contains(t0))
                    .expect("component meets the fiber");
                MarkedComponent {
                    marked: (t0.clone(), over.y.sample()),
                    pieces,
                }
            })
            .collect();
        Some(RobustDisconnectionCertificate {
            t0: t0.clone(),
            neighborhood: (t0 - &near.delta, t0 + &near.delta),
            components,
        })
    }

    /// Critical values plus one sample strictly between consecutive ones.
    pub fn candidate_values(&self) -> Vec<Q> {
        let crit = self.critical_values();
        let two = Q::from_integer(2.into());
        let mut out = Vec::with_capacity(2 * crit.len());
        for (k, c) in crit.iter().enumerate() {
            out.push(c.clone());
            if let Some(next) = crit.get(k + 1) {
                out.push((c + next) / &two);
            }
        }
        out
    }

    pub fn sheaf_verdict(&self) -> SheafVerdict {
        let candidates = self.candidate_values();
        let disconnected_fibers = candidates
            .iter()
            .filter(|t| self.fiber(t).components() >= 2)
            .cloned()
            .collect();
        let robust: Vec<Q> = candidates
            .iter()
            .filter(|t| self.robustly_disconnected(t).is_some())
            .cloned()
            .collect();
        SheafVerdict {
            sheaf: robust.is_empty(),
            disconnected_fibers,
            robust,
            compactness_unchecked: self
                .rects
                .iter()
                .any(|r| r.x.lo_open || r.x.hi_open || r.y.lo_open || r.y.hi_open),
        }
    }

    pub(crate) fn oriented_rects(&self) -> Vec<Rect> {
        self.oriented()
    }
}

#[cfg(test)]
mod tests;
