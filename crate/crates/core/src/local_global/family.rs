use std::collections::BTreeMap;

use super::LocalGlobalError;
use crate::exec::Execution;
use crate::explanations::{behavioral_equiv, cogerm_search, CogermWitness, Judge, Section};
use crate::systems::{
    overlap, pushout_along_mono, Covering, FiniteSet, MealySystem, OpenImmersion, Overlap,
    SystemMorphism,
};
use crate::Verdict;

/// Local sections, one per patch of a covering, with optional cogerm
/// witnesses on the pairwise overlaps.
#[derive(Debug, Clone)]
pub struct CompatibleFamily {
    covering: Covering,
    locals: Vec<Section>,
    witnesses: BTreeMap<(usize, usize), CogermWitness>,
}

/// The two restrictions of a family to one pairwise overlap.
#[derive(Debug, Clone)]
pub struct OverlapPair {
    pub pair: (usize, usize),
    pub overlap: Overlap,
    pub first: Section,
    pub second: Section,
}

impl CompatibleFamily {
    /// Pairs each patch with its local section; checks only that they line up.
    pub fn new(covering: Covering, locals: Vec<Section>) -> Result<Self, LocalGlobalError> {
        if locals.len() != covering.patches().len() {
            return Err(LocalGlobalError::WrongLocalCount {
                expected: covering.patches().len(),
                found: locals.len(),
            });
        }
        if let Some(k) = locals
            .iter()
            .zip(covering.patches())
            .position(|(s, m)| s.patch() != m)
        {
            return Err(LocalGlobalError::ForeignLocal(k));
        }
        Ok(CompatibleFamily {
            covering,
            locals,
            witnesses: BTreeMap::new(),
        })
    }

    pub fn covering(&self) -> &Covering {
        &self.covering
    }

    pub fn locals(&self) -> &[Section] {
        &self.locals
    }

    pub fn witnesses(&self) -> &BTreeMap<(usize, usize), CogermWitness> {
        &self.witnesses
    }

    /// Non-empty pairwise overlaps `α < β` with both restrictions.
    pub fn overlap_pairs(&self) -> Result<Vec<OverlapPair>, LocalGlobalError> {
        let patches = self.covering.patches();
        let mut out = Vec::new();
        for a in 0..patches.len() {
            for b in a + 1..patches.len() {
                let Some(ov) = overlap(&patches[a], &patches[b])? else {
                    continue;
                };
                if ov.is_empty() {
                    continue;
                }
                let first = self.locals[a].restrict(&ov.into_first)?;
                let second = self.locals[b].restrict(&ov.into_second)?;
                out.push(OverlapPair {
                    pair: (a, b),
                    overlap: ov,
                    first,
                    second,
                });
            }
        }
        Ok(out)
    }

    /// Computes a cogerm witness on every overlap; fails on the first pair
    /// that has none.
    pub fn with_witnesses(mut self, exec: Execution) -> Result<Self, LocalGlobalError> {
        let pairs = self.overlap_pairs()?;
        let found = exec.map(&pairs, |p| cogerm_search(&p.first, &p.second));
        for (p, w) in pairs.iter().zip(found) {
            match w? {
                Ok(w) => {
                    self.witnesses.insert(p.pair, w);
                }
                Err(failure) => {
                    return Err(LocalGlobalError::IncompatibleFamily {
                        pair: p.pair,
                        reason: format!("no cogerm witness on the overlap: {failure:?}"),
                    })
                }
            }
        }
        Ok(self)
    }

    /// Supplies a witness by hand; it is validated when gluing.
    pub fn insert_witness(&mut self, pair: (usize, usize), w: CogermWitness) {
        self.witnesses.insert(pair, w);
    }

    /// Checks behavioral compatibility over `alphabet` on every overlap.
    pub fn check_behavioral(
        &self,
        alphabet: &FiniteSet,
        exec: Execution,
    ) -> Result<(), LocalGlobalError> {
        let pairs = self.overlap_pairs()?;
        let verdicts = exec.map(&pairs, |p| behavioral_equiv(&p.first, &p.second, alphabet));
        for (p, v) in pairs.iter().zip(verdicts) {
            if let Verdict::Fails(d) = v? {
                return Err(LocalGlobalError::IncompatibleFamily {
                    pair: p.pair,
                    reason: format!(
                        "restrictions differ from {} on [{}]",
                        d.state,
                        d.word.join(", ")
                    ),
                });
            }
        }
        Ok(())
    }
}

fn incompatible(pair: (usize, usize), reason: &str) -> LocalGlobalError {
    LocalGlobalError::IncompatibleFamily {
        pair,
        reason: reason.into(),
    }
}

/// Global ψ assembled pointwise from the locals through `state_maps[α]`
/// (local explanatory state → global state). Every patch containing a point
/// must agree.
fn assemble_psi(
    covering: &Covering,
    locals: &[Section],
    state_maps: &[Vec<usize>],
) -> Result<(Vec<usize>, Vec<usize>), LocalGlobalError> {
    let target = covering.target();
    let mut before: Vec<Option<(usize, usize)>> = vec![None; target.before().len()];
    let mut after: Vec<Option<(usize, usize)>> = vec![None; target.after().len()];
    for (a, (m, local)) in covering.patches().iter().zip(locals).enumerate() {
        for (x, &gx) in m.morphism().before_map().iter().enumerate() {
            let v = state_maps[a][local.before_image(x)];
            match before[gx] {
                Some((b, w)) if w != v => {
                    return Err(incompatible(
                        (b, a),
                        "patches send a before-state to different glued states",
                    ))
                }
                Some(_) => {}
                None => before[gx] = Some((a, v)),
            }
        }
        for (y, &gy) in m.morphism().after_map().iter().enumerate() {
            let v = state_maps[a][local.after_image(y)];
            match after[gy] {
                Some((b, w)) if w != v => {
                    return Err(incompatible(
                        (b, a),
                        "patches send an after-state to different glued states",
                    ))
                }
                Some(_) => {}
                None => after[gy] = Some((a, v)),
            }
        }
    }
    let uncovered = || LocalGlobalError::Internal("covering leaves a state without a patch".into());
    let before = before
        .into_iter()
        .map(|v| v.map(|x| x.1).ok_or_else(uncovered))
        .collect::<Result<Vec<_>, _>>()?;
    let after = after
        .into_iter()
        .map(|v| v.map(|x| x.1).ok_or_else(uncovered))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((before, after))
}

/// Glues a cogerm-compatible family by iterated pushouts over the witness
/// cores.
///
/// Patch `α` is attached to the system glued so far along the union of the
/// images of its cores with earlier patches. Witnesses are pairwise; if two
/// earlier cores send one state of `S'_α` to different glued states, the
/// family is rejected as incompatible rather than re-quotiented.
pub fn glue_cogerm(f: &CompatibleFamily, judge: &Judge) -> Result<Section, LocalGlobalError> {
    let locals = f.locals();
    for p in f.overlap_pairs()? {
        let w = f
            .witnesses
            .get(&p.pair)
            .ok_or_else(|| incompatible(p.pair, "missing cogerm witness"))?;
        if !w.check(&p.first, &p.second) {
            return Err(incompatible(
                p.pair,
                "cogerm witness does not factor the restrictions",
            ));
        }
    }
    let interface = locals[0].explanatory();
    if locals.iter().any(|s| {
        s.explanatory().inputs() != interface.inputs()
            || s.explanatory().outputs() != interface.outputs()
    }) {
        return Err(incompatible(
            (0, 0),
            "local explanatory systems have different interfaces",
        ));
    }

    let mut glued: MealySystem = locals[0].explanatory().clone();
    let mut cans: Vec<Vec<usize>> = vec![(0..glued.state_count()).collect()];
    for (a, local) in locals.iter().enumerate().skip(1) {
        let ex = local.explanatory();
        let mut attach: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for (b, can) in cans.iter().enumerate().take(a) {
            let Some(w) = f.witnesses.get(&(b, a)) else {
                continue;
            };
            for c in 0..w.core.state_count() {
                let x = w.second.before_map()[c];
                let target = can[w.first.before_map()[c]];
                match attach.get(&x) {
                    Some(&(b0, t)) if t != target => {
                        return Err(incompatible(
                            (b0, a),
                            "overlap cores send one local state to two glued states",
                        ))
                    }
                    Some(_) => {}
                    None => {
                        attach.insert(x, (b, target));
                    }
                }
            }
        }
        let xs: Vec<usize> = attach.keys().copied().collect();
        let core_states = ex.before().select(xs.iter().copied());
        let core = MealySystem::from_fn(
            core_states.clone(),
            core_states,
            ex.inputs().clone(),
            ex.outputs().clone(),
            |k, i| {
                let (s2, o) = ex.step(xs[k], i);
                let pos = xs
                    .binary_search(&s2)
                    .expect("union of witness cores is closed under dynamics");
                (pos, o)
            },
        )?;
        let m = SystemMorphism::homogeneous(core.clone(), ex.clone(), xs.clone())?;
        let to_glued = SystemMorphism::homogeneous(
            core,
            glued.clone(),
            xs.iter().map(|x| attach[x].1).collect(),
        )?;
        let po = pushout_along_mono(&m, &to_glued)?;
        for can in cans.iter_mut() {
            for p in can.iter_mut() {
                *p = po.can_b.before_map()[*p];
            }
        }
        cans.push(po.can_a.before_map().to_vec());
        glued = po.system;
    }
    let (before, after) = assemble_psi(f.covering(), locals, &cans)?;
    Ok(Section::from_state_maps(
        judge,
        OpenImmersion::identity(f.covering().target()),
        glued,
        before,
        after,
    )?)
}

/// Checks that the restriction of `glued` to each patch is cogerm-equivalent
/// to the local section; reports the first patch that is not.
pub fn verify_cogerm_gluing(
    f: &CompatibleFamily,
    glued: &Section,
) -> Result<Verdict<usize>, LocalGlobalError> {
    for (a, (m, local)) in f.covering().patches().iter().zip(f.locals()).enumerate() {
        let r = glued.restrict(m)?;
        match cogerm_search(&r, local)? {
            Ok(w) if w.check(&r, local) => {}
            _ => return Ok(Verdict::Fails(a)),
        }
    }
    Ok(Verdict::Holds)
}

/// Gluing for unquotiented sections: all locals share one explanatory system
/// and agree literally on overlaps; `ψ` is assembled pointwise.
pub fn literal_glue(f: &CompatibleFamily, judge: &Judge) -> Result<Section, LocalGlobalError> {
    let locals = f.locals();
    let ex = locals[0].explanatory();
    if let Some(k) = locals.iter().position(|s| s.explanatory() != ex) {
        return Err(incompatible(
            (0, k),
            "locals use different explanatory systems",
        ));
    }
    for p in f.overlap_pairs()? {
        if p.first != p.second {
            return Err(incompatible(p.pair, "restrictions differ on the overlap"));
        }
    }
    let id: Vec<usize> = (0..ex.state_count()).collect();
    let maps = vec![id; locals.len()];
    let (before, after) = assemble_psi(f.covering(), locals, &maps)?;
    Ok(Section::from_state_maps(
        judge,
        OpenImmersion::identity(f.covering().target()),
        ex.clone(),
        before,
        after,
    )?)
}

/// Restricts a global section to every patch of `c`.
pub fn restrict_to_covering(c: &Covering, s: &Section) -> Result<Vec<Section>, LocalGlobalError> {
    c.patches().iter().map(|m| Ok(s.restrict(m)?)).collect()
}
