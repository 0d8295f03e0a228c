//! Discrete two-patch covering built from a robust disconnection.
//!
//! The sampled system is stateless: one input per sample point, the judge
//! sends a point to its projected coordinate. Points of the first marked
//! component output `o0`, the other marked components `o1`, and points away
//! from the neighborhood (`C`) output `o0`. Patch one holds the first
//! component and `C`, patch two the rest and `C`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{format_rational, Interval, RectUnion, RobustDisconnectionCertificate, TameError, Q};
use crate::explanations::{Judge, JudgeDoc};
use crate::local_global::{stateless_ri_section, LocalGlobalError, StatelessSection};
use crate::systems::{Covering, FiniteSet, MealySystem, OpenImmersion, Subsystem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SamplePoint {
    pub name: String,
    /// `(projected coordinate, other coordinate)` as rational strings.
    pub at: (String, String),
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub points: Vec<SamplePoint>,
    /// Input names of the two patches.
    pub patches: [Vec<String>; 2],
    /// Both patches carry a stateless section.
    pub locals_exist: bool,
    /// The two local sections agree on the overlap.
    pub compatible: bool,
    /// The whole sampled system carries a stateless section.
    pub glues: bool,
}

impl CertificateCheck {
    pub fn compatible_but_unglueable(&self) -> bool {
        self.locals_exist && self.compatible && !self.glues
    }
}

fn lg(e: LocalGlobalError) -> TameError {
    TameError::LocalGlobal(Box::new(e))
}

/// Samples `u` around the certificate and checks the resulting two-patch
/// covering with the stateless section logic.
pub fn certificate_covering(
    u: &RectUnion,
    cert: &RobustDisconnectionCertificate,
) -> Result<CertificateCheck, TameError> {
    let two = Q::from_integer(2.into());
    let half = (&cert.neighborhood.1 - &cert.neighborhood.0) / Q::from_integer(4.into());
    let (left_edge, right_edge) = (&cert.t0 - &half, &cert.t0 + &half);

    let mut points: Vec<(String, (Q, Q), &'static str)> = Vec::new();
    for (k, comp) in cert.components.iter().enumerate() {
        let (name, out) = if k == 0 {
            ("v0".to_string(), "o0")
        } else {
            (format!("w{}", k - 1), "o1")
        };
        points.push((name, comp.marked.clone(), out));
    }
    let mut c = 0;
    for r in u.oriented_rects() {
        let below = Interval::new(
            r.x.lo.clone().min(left_edge.clone()) - Q::from_integer(1.into()),
            left_edge.clone(),
            true,
            true,
        );
        let above = Interval::new(
            right_edge.clone(),
            r.x.hi.clone().max(right_edge.clone()) + Q::from_integer(1.into()),
            true,
            true,
        );
        for side in [below, above].into_iter().flatten() {
            if let Some(part) = r.x.intersect(&side) {
                let y = (&r.y.lo + &r.y.hi) / &two;
                points.push((format!("c{c}"), (part.sample(), y), "o0"));
                c += 1;
            }
        }
    }

    let names: Vec<String> = points.iter().map(|p| p.0.clone()).collect();
    let inputs = FiniteSet::new(names.iter().cloned());
    let outputs = FiniteSet::new(["o0", "o1"].map(String::from));
    let state = FiniteSet::new(["•".to_string()]);
    let by_name: BTreeMap<&str, &(String, (Q, Q), &'static str)> =
        points.iter().map(|p| (p.0.as_str(), p)).collect();
    let sys = MealySystem::from_fn(
        state.clone(),
        state,
        inputs.clone(),
        outputs.clone(),
        |_, i| {
            let out = by_name[inputs.name(i)].2;
            (0, outputs.index_of(out).expect("o0 or o1"))
        },
    )
    .map_err(|e| lg(e.into()))?;
    let judge = Judge::from_doc(&JudgeDoc {
        inputs: points
            .iter()
            .map(|p| (p.0.clone(), format_rational(&p.1 .0)))
            .collect(),
        outputs: [("o0", "o0"), ("o1", "o1")]
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .into(),
        interpretable_inputs: None,
        interpretable_outputs: None,
    })
    .map_err(|e| lg(e.into()))?;

    let c_names: Vec<&str> = names
        .iter()
        .filter(|n| n.starts_with('c'))
        .map(String::as_str)
        .collect();
    let first: Vec<&str> = std::iter::once("v0")
        .chain(c_names.iter().copied())
        .collect();
    let second: Vec<&str> = names
        .iter()
        .map(String::as_str)
        .filter(|n| n.starts_with('w'))
        .chain(c_names.iter().copied())
        .collect();
    let cover = Covering::from_subsystems(
        &sys,
        &[
            Subsystem::inputs(&sys, &first),
            Subsystem::inputs(&sys, &second),
        ],
    )
    .map_err(|e| lg(e.into()))?;
    let locals: Vec<StatelessSection> = cover
        .patches()
        .iter()
        .map(|m| stateless_ri_section(&sys, &judge, m))
        .collect::<Result<_, _>>()
        .map_err(lg)?;
    let locals_exist = locals.iter().all(StatelessSection::exists);

    let compatible = if c_names.is_empty() {
        true
    } else {
        let ov = OpenImmersion::inclusion(&sys, &Subsystem::inputs(&sys, &c_names))
            .map_err(|e| lg(e.into()))?;
        match stateless_ri_section(&sys, &judge, &ov).map_err(lg)? {
            StatelessSection::Exists(on_overlap) => locals.iter().all(|l| match l {
                StatelessSection::Exists(g) => on_overlap.iter().all(|(k, v)| g.get(k) == Some(v)),
                StatelessSection::Blocked(_) => false,
            }),
            StatelessSection::Blocked(_) => false,
        }
    };
    let glues = stateless_ri_section(&sys, &judge, &OpenImmersion::identity(&sys))
        .map_err(lg)?
        .exists();

    let patch_names = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    Ok(CertificateCheck {
        points: points
            .iter()
            .map(|(name, (a, b), out)| SamplePoint {
                name: name.clone(),
                at: (format_rational(a), format_rational(b)),
                output: out.to_string(),
            })
            .collect(),
        patches: [patch_names(&first), patch_names(&second)],
        locals_exist,
        compatible,
        glues,
    })
}
