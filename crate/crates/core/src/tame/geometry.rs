use std::cmp::Ordering;
use std::fmt;

use super::{format_rational, Q};

/// A non-empty interval of the line with open/closed ends. A closed interval
/// with `lo == hi` is a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: Q, hi: Q, lo_open: bool, hi_open: bool) -> Option<Self> {
        let ok = match lo.cmp(&hi) {
            Ordering::Less => true,
            Ordering::Equal => !lo_open && !hi_open,
            Ordering::Greater => false,
        };
        ok.then_some(Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        })
    }

    pub fn open(lo: Q, hi: Q) -> Self {
        Interval::new(lo, hi, true, true).expect("open interval with lo < hi")
    }

    pub fn closed(lo: Q, hi: Q) -> Self {
        Interval::new(lo, hi, false, false).expect("closed interval with lo <= hi")
    }

    pub fn contains(&self, t: &Q) -> bool {
        let above = if self.lo_open {
            *t > self.lo
        } else {
            *t >= self.lo
        };
        let below = if self.hi_open {
            *t < self.hi
        } else {
            *t <= self.hi
        };
        above && below
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_open) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_open),
            Ordering::Less => (other.lo.clone(), other.lo_open),
            Ordering::Equal => (self.lo.clone(), self.lo_open || other.lo_open),
        };
        let (hi, hi_open) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_open),
            Ordering::Greater => (other.hi.clone(), other.hi_open),
            Ordering::Equal => (self.hi.clone(), self.hi_open || other.hi_open),
        };
        Interval::new(lo, hi, lo_open, hi_open)
    }

    pub fn closure(&self) -> Interval {
        Interval::closed(self.lo.clone(), self.hi.clone())
    }

    /// The union of the two intervals is connected.
    pub fn union_connected(&self, other: &Interval) -> bool {
        self.intersect(&other.closure()).is_some() || self.closure().intersect(other).is_some()
    }

    fn hull(&self, other: &Interval) -> Interval {
        let (lo, lo_open) = match self.lo.cmp(&other.lo) {
            Ordering::Less => (self.lo.clone(), self.lo_open),
            Ordering::Greater => (other.lo.clone(), other.lo_open),
            Ordering::Equal => (self.lo.clone(), self.lo_open && other.lo_open),
        };
        let (hi, hi_open) = match self.hi.cmp(&other.hi) {
            Ordering::Greater => (self.hi.clone(), self.hi_open),
            Ordering::Less => (other.hi.clone(), other.hi_open),
            Ordering::Equal => (self.hi.clone(), self.hi_open && other.hi_open),
        };
        Interval {
            lo,
            hi,
            lo_open,
            hi_open,
        }
    }

    /// A point of the interval: the midpoint, or the point itself.
    pub fn sample(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(2.into())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            return write!(f, "{{{}}}", format_rational(&self.lo));
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_open { '(' } else { '[' },
            format_rational(&self.lo),
            format_rational(&self.hi),
            if self.hi_open { ')' } else { ']' }
        )
    }
}

/// A finite union of intervals, merged into its connected components and
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl IntervalUnion {
    pub fn new(mut parts: Vec<Interval>) -> Self {
        // Closed left ends first, so a closed end touching an open one merges.
        parts.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.lo_open.cmp(&b.lo_open)));
        let mut merged: Vec<Interval> = Vec::new();
        for p in parts {
            match merged.last_mut() {
                Some(last) if last.union_connected(&p) => *last = last.hull(&p),
                _ => merged.push(p),
            }
        }
        IntervalUnion { parts: merged }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn components(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("∪"))
    }
}

/// An axis-aligned rectangle, possibly degenerate (segment or point).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub x: Interval,
    pub y: Interval,
}

impl Rect {
    /// `open` flags the left, right, bottom and top edges.
    pub fn new(x: (Q, Q), y: (Q, Q), open: [bool; 4]) -> Result<Self, String> {
        let x = Interval::new(x.0, x.1, open[0], open[1])
            .ok_or("x-range is empty (lo > hi, or a point with an open end)")?;
        let y = Interval::new(y.0, y.1, open[2], open[3])
            .ok_or("y-range is empty (lo > hi, or a point with an open end)")?;
        Ok(Rect { x, y })
    }

    pub fn transposed(&self) -> Rect {
        Rect {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    pub fn proj_contains(&self, t: &Q) -> bool {
        self.x.contains(t)
    }

    pub fn clip_x(&self, n: &Interval) -> Option<Rect> {
        Some(Rect {
            x: self.x.intersect(n)?,
            y: self.y.clone(),
        })
    }

    /// The union of the two rectangles is connected: one meets the closure
    /// of the other.
    pub fn union_connected(&self, other: &Rect) -> bool {
        let meets = |a: &Rect, b: &Rect| {
            a.x.intersect(&b.x.closure()).is_some() && a.y.intersect(&b.y.closure()).is_some()
        };
        meets(self, other) || meets(other, self)
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}×{}", self.x, self.y)
    }
}
