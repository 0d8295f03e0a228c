//! Pushouts along monomorphisms in `Sys_ho(I, O)` and a brute-force Van Kampen
//! check.
//!
//! The pushout state set is `(A ⊔ B) / ~` where `~` is generated by
//! `m(c) ~ f(c)`; dynamics are transferred class by class and re-checked for
//! well-definedness on every member.

use std::collections::HashMap;

use thiserror::Error;

use super::finite::{unique_names, FiniteSet};
use super::morphism::{MorphismError, SystemMorphism};
use super::system::{MealySystem, ValidationError};
use crate::Verdict;

/// Largest state count accepted by [`verify_vk_square`].
pub const VK_MAX_STATES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PushoutError {
    #[error("InterfaceMismatch: the span's systems do not share one interface (I, O)")]
    InterfaceMismatch,
    #[error("span legs must be morphisms of Sys_ho(I, O) with a common source")]
    NotHomogeneousSpan,
    #[error("the leg C → A is not injective on states")]
    NotMono,
    #[error("a leg of the span is not a morphism: square fails at ({state}, {input})")]
    NotAMorphism { state: String, input: String },
    #[error("the given maps do not form a cocone: {0}")]
    NotACocone(String),
    #[error("ScaleExceeded: {states} states exceeds the brute-force bound of {bound}")]
    ScaleExceeded { states: usize, bound: usize },
    #[error("internal: {0}")]
    Internal(String),
    #[error(transparent)]
    Morphism(#[from] MorphismError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root so class order is deterministic.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Class id per element, classes numbered by first member.
    fn classes(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut id_of_root = HashMap::new();
        let mut out = Vec::with_capacity(n);
        for x in 0..n {
            let r = self.find(x);
            let next = id_of_root.len();
            out.push(*id_of_root.entry(r).or_insert(next));
        }
        let count = id_of_root.len();
        (out, count)
    }
}

/// The result of [`pushout_along_mono`].
#[derive(Debug, Clone)]
pub struct Pushout {
    pub system: MealySystem,
    /// `A → P`.
    pub can_a: SystemMorphism,
    /// `B → P`.
    pub can_b: SystemMorphism,
    /// The span's mono leg `C → A`.
    pub m: SystemMorphism,
    /// The span's other leg `C → B`.
    pub f: SystemMorphism,
}

fn ensure_morphism(m: &SystemMorphism) -> Result<(), PushoutError> {
    match m.check() {
        Verdict::Holds => Ok(()),
        Verdict::Fails(w) => Err(PushoutError::NotAMorphism {
            state: w.state,
            input: w.input,
        }),
    }
}

/// Pushout of `A ←m– C –f→ B` in `Sys_ho(I, O)`, with `m` injective.
///
/// Class names are taken from the first member (A before B), with primes
/// appended when two classes would otherwise share a name.
pub fn pushout_along_mono(m: &SystemMorphism, f: &SystemMorphism) -> Result<Pushout, PushoutError> {
    let (c, a, b) = (m.source(), m.target(), f.target());
    if f.source() != c {
        return Err(PushoutError::NotHomogeneousSpan);
    }
    if a.inputs() != b.inputs()
        || a.outputs() != b.outputs()
        || c.inputs() != a.inputs()
        || c.outputs() != a.outputs()
    {
        return Err(PushoutError::InterfaceMismatch);
    }
    if !m.is_homogeneous_morphism() || !f.is_homogeneous_morphism() {
        return Err(PushoutError::NotHomogeneousSpan);
    }
    if !m.is_injective() {
        return Err(PushoutError::NotMono);
    }
    ensure_morphism(m)?;
    ensure_morphism(f)?;

    let (na, nb) = (a.state_count(), b.state_count());
    let mut uf = UnionFind::new(na + nb);
    for x in 0..c.state_count() {
        uf.union(m.before_map()[x], na + f.before_map()[x]);
    }
    let (class_of, n_classes) = uf.classes();

    let member_name = |x: usize| -> &str {
        if x < na {
            a.before().name(x)
        } else {
            b.before().name(x - na)
        }
    };
    let mut first_member = vec![usize::MAX; n_classes];
    for x in 0..na + nb {
        if first_member[class_of[x]] == usize::MAX {
            first_member[class_of[x]] = x;
        }
    }
    let names = unique_names(
        first_member
            .iter()
            .map(|&x| member_name(x).to_string())
            .collect(),
    );
    let states = FiniteSet::new(names.iter().cloned());
    let pos_of_class: Vec<usize> = names
        .iter()
        .map(|n| states.index_of(n).expect("class name present"))
        .collect();
    let mut class_at_pos = vec![0; n_classes];
    for (k, &p) in pos_of_class.iter().enumerate() {
        class_at_pos[p] = k;
    }

    let step_member = |x: usize, i: usize| -> (usize, usize) {
        if x < na {
            let (s2, o) = a.step(x, i);
            (class_of[s2], o)
        } else {
            let (s2, o) = b.step(x - na, i);
            (class_of[na + s2], o)
        }
    };
    // Well-definedness: every member of a class must agree.
    for x in 0..na + nb {
        for i in 0..a.inputs().len() {
            let rep = first_member[class_of[x]];
            if step_member(x, i) != step_member(rep, i) {
                return Err(PushoutError::Internal(format!(
                    "pushout dynamics not well defined at ({}, {})",
                    member_name(x),
                    a.inputs().name(i)
                )));
            }
        }
    }
    let system = MealySystem::from_fn(
        states.clone(),
        states,
        a.inputs().clone(),
        a.outputs().clone(),
        |p, i| {
            let (k, o) = step_member(first_member[class_at_pos[p]], i);
            (pos_of_class[k], o)
        },
    )?;
    let can_a = SystemMorphism::homogeneous(
        a.clone(),
        system.clone(),
        (0..na).map(|x| pos_of_class[class_of[x]]).collect(),
    )?;
    let can_b = SystemMorphism::homogeneous(
        b.clone(),
        system.clone(),
        (0..nb).map(|x| pos_of_class[class_of[na + x]]).collect(),
    )?;
    Ok(Pushout {
        system,
        can_a,
        can_b,
        m: m.clone(),
        f: f.clone(),
    })
}

impl Pushout {
    /// The unique mediating morphism `P → Z` for a cocone `h_a: A → Z`,
    /// `h_b: B → Z` with `h_a ∘ m = h_b ∘ f`.
    pub fn mediate(
        &self,
        h_a: &SystemMorphism,
        h_b: &SystemMorphism,
    ) -> Result<SystemMorphism, PushoutError> {
        if h_a.source() != self.m.target() || h_b.source() != self.f.target() {
            return Err(PushoutError::NotACocone(
                "legs start at the wrong systems".into(),
            ));
        }
        if h_a.target() != h_b.target() {
            return Err(PushoutError::NotACocone(
                "legs end at different systems".into(),
            ));
        }
        if !h_a.is_homogeneous_morphism() || !h_b.is_homogeneous_morphism() {
            return Err(PushoutError::NotACocone(
                "legs are not Sys_ho morphisms".into(),
            ));
        }
        let n = self.system.state_count();
        let mut image: Vec<Option<usize>> = vec![None; n];
        let mut assign = |p: usize, z: usize| -> Result<(), PushoutError> {
            match image[p] {
                Some(prev) if prev != z => Err(PushoutError::NotACocone(format!(
                    "state {} would need two images",
                    self.system.before().name(p)
                ))),
                _ => {
                    image[p] = Some(z);
                    Ok(())
                }
            }
        };
        for (x, &p) in self.can_a.before_map().iter().enumerate() {
            assign(p, h_a.before_map()[x])?;
        }
        for (y, &p) in self.can_b.before_map().iter().enumerate() {
            assign(p, h_b.before_map()[y])?;
        }
        let states: Vec<usize> = image
            .into_iter()
            .map(|z| {
                z.ok_or_else(|| {
                    PushoutError::Internal("canonical maps not jointly surjective".into())
                })
            })
            .collect::<Result<_, _>>()?;
        let u = SystemMorphism::homogeneous(self.system.clone(), h_a.target().clone(), states)?;
        ensure_morphism(&u)?;
        Ok(u)
    }
}

/// Pullback of two `Sys_ho` morphisms with a common target.
#[derive(Debug, Clone)]
pub struct HoPullback {
    pub system: MealySystem,
    /// State pairs `(x, y)` indexed by the pullback's state positions.
    pub pairs: Vec<(usize, usize)>,
    pub to_first: SystemMorphism,
    pub to_second: SystemMorphism,
}

impl HoPullback {
    fn position(&self, pair: (usize, usize)) -> Option<usize> {
        self.pairs.iter().position(|&p| p == pair)
    }
}

pub fn pullback_ho(f: &SystemMorphism, g: &SystemMorphism) -> Result<HoPullback, PushoutError> {
    if f.target() != g.target() {
        return Err(PushoutError::NotACocone(
            "pullback legs end at different systems".into(),
        ));
    }
    let (x, y) = (f.source(), g.source());
    let mut raw = Vec::new();
    for a in 0..x.state_count() {
        for b in 0..y.state_count() {
            if f.before_map()[a] == g.before_map()[b] {
                raw.push((a, b));
            }
        }
    }
    let names: Vec<String> = raw
        .iter()
        .map(|&(a, b)| format!("({},{})", x.before().name(a), y.before().name(b)))
        .collect();
    let states = FiniteSet::new(names.iter().cloned());
    let mut pairs = vec![(0, 0); raw.len()];
    for (k, n) in names.iter().enumerate() {
        pairs[states.index_of(n).unwrap()] = raw[k];
    }
    let lookup: HashMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let mut mismatch = None;
    let system = MealySystem::from_fn(
        states.clone(),
        states,
        x.inputs().clone(),
        x.outputs().clone(),
        |p, i| {
            let (a, b) = pairs[p];
            let (a2, oa) = x.step(a, i);
            let (b2, ob) = y.step(b, i);
            if oa != ob || !lookup.contains_key(&(a2, b2)) {
                mismatch = Some(p);
            }
            (lookup.get(&(a2, b2)).copied().unwrap_or(0), oa)
        },
    )?;
    if mismatch.is_some() {
        return Err(PushoutError::Internal(
            "legs are not morphisms into a common system".into(),
        ));
    }
    let to_first = SystemMorphism::homogeneous(
        system.clone(),
        x.clone(),
        pairs.iter().map(|p| p.0).collect(),
    )?;
    let to_second = SystemMorphism::homogeneous(
        system.clone(),
        y.clone(),
        pairs.iter().map(|p| p.1).collect(),
    )?;
    Ok(HoPullback {
        system,
        pairs,
        to_first,
        to_second,
    })
}

/// Pulls the pushout square back along `g: W → P` and checks the pulled-back
/// square is again a pushout.
///
/// Two routes are compared: the system-level pushout of the pulled-back span
/// must be isomorphic to `W` via the mediating map, and the plain set-level
/// quotient of `W_A ⊔ W_B` by `W_C` must biject onto `W`.
pub fn verify_vk_square(po: &Pushout, g: &SystemMorphism) -> Result<Verdict<String>, PushoutError> {
    let sizes = [
        po.m.source().state_count(),
        po.m.target().state_count(),
        po.f.target().state_count(),
        po.system.state_count(),
        g.source().state_count(),
    ];
    if let Some(&big) = sizes.iter().find(|&&s| s > VK_MAX_STATES) {
        return Err(PushoutError::ScaleExceeded {
            states: big,
            bound: VK_MAX_STATES,
        });
    }
    if g.target() != &po.system || !g.is_homogeneous_morphism() {
        return Err(PushoutError::NotACocone(
            "g must be a Sys_ho morphism into P".into(),
        ));
    }
    ensure_morphism(g)?;

    let wa = pullback_ho(g, &po.can_a)?;
    let wb = pullback_ho(g, &po.can_b)?;
    let can_c = po.can_a.compose(&po.m)?;
    let wc = pullback_ho(g, &can_c)?;

    let leg = |into: &HoPullback, via: &SystemMorphism| -> Result<SystemMorphism, PushoutError> {
        let states = wc
            .pairs
            .iter()
            .map(|&(w, c)| {
                into.position((w, via.before_map()[c]))
                    .ok_or_else(|| PushoutError::Internal("back face is not a pullback".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SystemMorphism::homogeneous(
            wc.system.clone(),
            into.system.clone(),
            states,
        )?)
    };
    let wc_to_wa = leg(&wa, &po.m)?;
    let wc_to_wb = leg(&wb, &po.f)?;

    // Route 1: pushout in Sys_ho, mediating map to W.
    let top = pushout_along_mono(&wc_to_wa, &wc_to_wb)?;
    let u = top.mediate(&wa.to_first, &wb.to_first)?;
    let n_w = g.source().state_count();
    let mut hit = vec![false; n_w];
    for &w in u.before_map() {
        hit[w] = true;
    }
    let iso = u.before_map().len() == n_w && hit.iter().all(|&h| h);

    // Route 2: set-level quotient, no dynamics involved.
    let (na, nb) = (wa.pairs.len(), wb.pairs.len());
    let mut uf = UnionFind::new(na + nb);
    for k in 0..wc.pairs.len() {
        uf.union(wc_to_wa.before_map()[k], na + wc_to_wb.before_map()[k]);
    }
    let (class_of, n_classes) = uf.classes();
    let mut class_to_w: Vec<Option<usize>> = vec![None; n_classes];
    let mut set_ok = true;
    for x in 0..na + nb {
        let w = if x < na {
            wa.pairs[x].0
        } else {
            wb.pairs[x - na].0
        };
        match class_to_w[class_of[x]] {
            Some(prev) if prev != w => set_ok = false,
            _ => class_to_w[class_of[x]] = Some(w),
        }
    }
    let mut seen = vec![false; n_w];
    for w in class_to_w.iter().flatten() {
        if seen[*w] {
            set_ok = false;
        }
        seen[*w] = true;
    }
    set_ok &= seen.iter().all(|&s| s);

    Ok(match (iso, set_ok) {
        (true, true) => Verdict::Holds,
        (false, true) => {
            Verdict::Fails("mediating map W_A +_{W_C} W_B → W is not bijective".into())
        }
        (true, false) => Verdict::Fails("set-level quotient does not biject onto W".into()),
        (false, false) => Verdict::Fails("pulled-back square is not a pushout".into()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(names: &[&str]) -> MealySystem {
        let n = names.len();
        let rows: Vec<(&str, &str, &str, &str)> = (0..n)
            .map(|k| (names[k], "x", names[(k + 1) % n], "0"))
            .collect();
        MealySystem::homogeneous_from_table(&["x"], &["0"], &rows).unwrap()
    }

    fn empty_like(sys: &MealySystem) -> MealySystem {
        MealySystem::from_fn(
            FiniteSet::empty(),
            FiniteSet::empty(),
            sys.inputs().clone(),
            sys.outputs().clone(),
            |_, _| unreachable!(),
        )
        .unwrap()
    }

    #[test]
    fn empty_apex_gives_disjoint_union() {
        let a = cycle(&["a0", "a1"]);
        let b = cycle(&["b0", "b1", "b2"]);
        let c = empty_like(&a);
        let m = SystemMorphism::homogeneous(c.clone(), a, vec![]).unwrap();
        let f = SystemMorphism::homogeneous(c, b, vec![]).unwrap();
        let po = pushout_along_mono(&m, &f).unwrap();
        assert_eq!(po.system.state_count(), 5);
        assert!(po.can_a.is_injective() && po.can_b.is_injective());
    }

    #[test]
    fn identity_mono_gives_b() {
        let a = cycle(&["a0", "a1", "a2"]);
        let b = cycle(&["b0"]);
        let m = SystemMorphism::identity(&a);
        let f = SystemMorphism::homogeneous(a.clone(), b.clone(), vec![0, 0, 0]).unwrap();
        let po = pushout_along_mono(&m, &f).unwrap();
        assert_eq!(po.system.state_count(), 1);
        assert!(po.can_b.check().holds());
    }

    #[test]
    fn interface_mismatch_is_reported() {
        let a = cycle(&["a0"]);
        let b =
            MealySystem::homogeneous_from_table(&["y"], &["0"], &[("b", "y", "b", "0")]).unwrap();
        let c = empty_like(&a);
        let m = SystemMorphism::homogeneous(c.clone(), a, vec![]).unwrap();
        let f = SystemMorphism::new(c, b, vec![], vec![], vec![0], vec![0]).unwrap();
        assert_eq!(
            pushout_along_mono(&m, &f).unwrap_err(),
            PushoutError::InterfaceMismatch
        );
    }

    #[test]
    fn vk_on_identity_and_scale_bound() {
        let a = cycle(&["a0", "a1"]);
        let b = cycle(&["b0", "b1"]);
        let c = empty_like(&a);
        let m = SystemMorphism::homogeneous(c.clone(), a, vec![]).unwrap();
        let f = SystemMorphism::homogeneous(c, b, vec![]).unwrap();
        let po = pushout_along_mono(&m, &f).unwrap();
        let g = SystemMorphism::identity(&po.system);
        assert!(verify_vk_square(&po, &g).unwrap().holds());

        let big = cycle(&["x0", "x1", "x2", "x3", "x4", "x5"]);
        let cb = empty_like(&big);
        let m = SystemMorphism::homogeneous(cb.clone(), big.clone(), vec![]).unwrap();
        let f = SystemMorphism::homogeneous(cb, big, vec![]).unwrap();
        let po = pushout_along_mono(&m, &f).unwrap();
        let g = SystemMorphism::identity(&po.system);
        assert!(matches!(
            verify_vk_square(&po, &g),
            Err(PushoutError::ScaleExceeded { .. })
        ));
    }
}
