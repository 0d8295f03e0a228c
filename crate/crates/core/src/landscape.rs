//! The gluing landscape: which presheaves are separated and which glue,
//! each cell backed by checks on the built-in fixtures.

use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;
use crate::explanations::is_j_full;
use crate::fixtures::{load_builtin, sections_builtin, Loaded, SectionsFixture};
use crate::local_global::{
    check_separation, discrete_stateless_sheaf_check, glue_behavioral, glue_cogerm, literal_glue,
    literal_separation, restrict_to_covering, stateless_ri_section, verify_cogerm_gluing,
    CompatibleFamily, EquivalenceKind, GlueOutcome,
};
use crate::systems::{Covering, OpenImmersion, Subsystem};
use crate::tame::certificate_covering;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{fixture}: {message}")]
pub struct LandscapeError {
    pub fixture: String,
    pub message: String,
}

fn err(fixture: &str) -> impl Fn(String) -> LandscapeError + '_ {
    move |message| LandscapeError {
        fixture: fixture.to_string(),
        message,
    }
}

/// One observation behind a cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub fixture: String,
    pub property: String,
    pub expected: bool,
    pub observed: bool,
}

impl Check {
    pub fn matches(&self) -> bool {
        self.expected == self.observed
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    /// The table entry.
    pub claim: String,
    pub checks: Vec<Check>,
}

impl Cell {
    /// Every check came out as the claim predicts.
    pub fn reproduced(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::matches)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub presheaf: String,
    pub separated: Cell,
    pub gluing: Cell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Landscape {
    pub rows: Vec<Row>,
}

impl Landscape {
    pub fn reproduced(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.separated.reproduced() && r.gluing.reproduced())
    }

    /// The Yes/No table, then one line per check.
    pub fn render(&self) -> String {
        let w = self
            .rows
            .iter()
            .map(|r| r.presheaf.chars().count())
            .max()
            .unwrap_or(0);
        let mut out = format!("{:<w$}  {:<14}  {}\n", "presheaf", "separated?", "gluing?");
        for r in &self.rows {
            out += &format!(
                "{:<w$}  {:<14}  {}\n",
                r.presheaf, r.separated.claim, r.gluing.claim
            );
        }
        out.push('\n');
        for r in &self.rows {
            for (col, cell) in [("separated", &r.separated), ("gluing", &r.gluing)] {
                for c in &cell.checks {
                    out += &format!(
                        "[{}] {} / {}: {} on {} (expected {}, observed {})\n",
                        if c.matches() { "ok" } else { "MISMATCH" },
                        r.presheaf,
                        col,
                        c.property,
                        c.fixture,
                        c.expected,
                        c.observed
                    );
                }
            }
        }
        out
    }
}

fn check(fixture: &str, property: &str, expected: bool, observed: bool) -> Check {
    Check {
        fixture: fixture.into(),
        property: property.into(),
        expected,
        observed,
    }
}

fn cell(claim: &str, checks: Vec<Check>) -> Cell {
    Cell {
        claim: claim.into(),
        checks,
    }
}

const SEPARATION_FIXTURES: [&str; 4] = [
    "beh-jfull-redirected",
    "cex-ri-separation",
    "cogerm-extra-states",
    "ri-jfull-routing",
];

fn separates(
    name: &str,
    f: &SectionsFixture,
    kind: EquivalenceKind,
    exec: Execution,
) -> Result<bool, LandscapeError> {
    let r = check_separation(
        kind,
        &f.covering,
        &f.sections[0],
        &f.sections[1],
        &f.judge,
        exec,
    )
    .map_err(|e| err(name)(e.to_string()))?;
    Ok(!r.violates_separation())
}

fn unquotiented() -> Result<Row, LandscapeError> {
    let mut sep = Vec::new();
    let mut glue = Vec::new();
    for name in SEPARATION_FIXTURES {
        let f = sections_builtin(name);
        let e = err(name);
        let held = literal_separation(&f.covering, &f.sections[0], &f.sections[1])
            .map_err(|x| e(x.to_string()))?;
        sep.push(check(name, "literal separation", true, held));
        let mut all = true;
        for s in &f.sections {
            let locals = restrict_to_covering(&f.covering, s).map_err(|x| e(x.to_string()))?;
            let family =
                CompatibleFamily::new(f.covering.clone(), locals).map_err(|x| e(x.to_string()))?;
            all &= literal_glue(&family, &f.judge).is_ok_and(|g| &g == s);
        }
        glue.push(check(name, "restrictions glue back literally", true, all));
    }
    Ok(Row {
        presheaf: "F̃_j (unquotiented)".into(),
        separated: cell("Yes", sep),
        gluing: cell("Yes (sheaf)", glue),
    })
}

fn cogerm(exec: Execution) -> Result<Row, LandscapeError> {
    let name = "cogerm-extra-states";
    let f = sections_builtin(name);
    let sep = vec![check(
        name,
        "cogerm separation",
        false,
        separates(name, &f, EquivalenceKind::Cogerm, exec)?,
    )];
    let name = "cogerm-gluing";
    let e = err(name);
    let f = sections_builtin(name);
    let glued = CompatibleFamily::new(f.covering.clone(), f.sections.clone())
        .and_then(|fam| fam.with_witnesses(exec))
        .and_then(|fam| {
            let g = glue_cogerm(&fam, &f.judge)?;
            Ok(verify_cogerm_gluing(&fam, &g)?.holds())
        })
        .map_err(|x| e(x.to_string()))?;
    Ok(Row {
        presheaf: "F_j (cogerm)".into(),
        separated: cell("No", sep),
        gluing: cell("Yes", vec![check(name, "cogerm gluing", true, glued)]),
    })
}

fn glues_behaviorally(name: &str, exec: Execution) -> Result<bool, LandscapeError> {
    let f = sections_builtin(name);
    let out = glue_behavioral(&f.covering, &f.sections, &f.judge, exec)
        .map_err(|e| err(name)(e.to_string()))?;
    Ok(matches!(out, GlueOutcome::Glued(_)))
}

fn behavioral(exec: Execution) -> Result<Row, LandscapeError> {
    let mut sep = Vec::new();
    for name in SEPARATION_FIXTURES {
        let f = sections_builtin(name);
        sep.push(check(
            name,
            "behavioral separation",
            true,
            separates(name, &f, EquivalenceKind::Beh, exec)?,
        ));
    }
    let name = "cex-beh-gluing";
    Ok(Row {
        presheaf: "F^beh_j (behavioral)".into(),
        separated: cell("Yes", sep),
        gluing: cell(
            "No",
            vec![check(
                name,
                "behavioral gluing",
                false,
                glues_behaviorally(name, exec)?,
            )],
        ),
    })
}

fn restricted(exec: Execution) -> Result<Row, LandscapeError> {
    let mut sep = Vec::new();
    for name in [
        "cex-ri-separation",
        "beh-jfull-redirected",
        "ri-jfull-routing",
    ] {
        let f = sections_builtin(name);
        let full = is_j_full(&f.covering, &f.judge).holds();
        sep.push(check(
            name,
            "covering is j-full",
            name != "cex-ri-separation",
            full,
        ));
        sep.push(check(
            name,
            "restricted-interface separation",
            full,
            separates(name, &f, EquivalenceKind::Ri, exec)?,
        ));
    }
    // With every patch seeing all of I', restricted-interface and behavioral
    // sections coincide, so the behavioral obstruction is one here too.
    let name = "cex-beh-gluing";
    let f = sections_builtin(name);
    let glue = vec![
        check(
            name,
            "covering is j-full",
            true,
            is_j_full(&f.covering, &f.judge).holds(),
        ),
        check(
            name,
            "restricted-interface gluing",
            false,
            glues_behaviorally(name, exec)?,
        ),
    ];
    Ok(Row {
        presheaf: "F^ri_j (restricted-interface)".into(),
        separated: cell("j-full only", sep),
        gluing: cell("No in general", glue),
    })
}

fn stateless(exec: Execution) -> Result<Row, LandscapeError> {
    let name = "stateless-two-fibers";
    let e = err(name);
    let Loaded::Judge { system, judge } = load_builtin(name) else {
        return Err(e("not a judge fixture".into()));
    };
    // A j-full covering: each patch keeps all inputs and splits nothing.
    let whole = OpenImmersion::identity(&system);
    let cover = Covering::from_subsystems(
        &system,
        &[Subsystem::full(&system), Subsystem::full(&system)],
    )
    .map_err(|x| e(x.to_string()))?;
    let global = stateless_ri_section(&system, &judge, &whole).map_err(|x| e(x.to_string()))?;
    let mut agree = global.exists();
    for m in cover.patches() {
        let local = stateless_ri_section(&system, &judge, m).map_err(|x| e(x.to_string()))?;
        agree &= local == global;
    }
    let sep = vec![check(
        name,
        "stateless sections agree with their restrictions (j-full covering)",
        true,
        agree,
    )];

    let report =
        discrete_stateless_sheaf_check(&system, &judge, exec).map_err(|x| e(x.to_string()))?;
    let mut glue = vec![
        check(
            name,
            "discrete sheaf verdict matches the fiber criterion",
            true,
            report.agrees_with_criterion(),
        ),
        check(
            name,
            "sheaf (a fiber with two inputs exists)",
            false,
            report.sheaf,
        ),
    ];
    for rect in ["punctured-square", "two-bands"] {
        let Loaded::RectUnion(u) = load_builtin(rect) else {
            return Err(err(rect)("not a rect-union fixture".into()));
        };
        let v = u.sheaf_verdict();
        glue.push(check(
            rect,
            "sheaf iff no robustly disconnected fiber",
            true,
            v.sheaf == v.robust.is_empty(),
        ));
        if let Some(t) = v.robust.first() {
            let cert = u
                .robustly_disconnected(t)
                .expect("robust value has a certificate");
            let c = certificate_covering(&u, &cert).map_err(|x| err(rect)(x.to_string()))?;
            glue.push(check(
                rect,
                "certificate covering is compatible but does not glue",
                true,
                c.compatible_but_unglueable(),
            ));
        }
    }
    Ok(Row {
        presheaf: "F^ri_j,1 (stateless)".into(),
        separated: cell("j-full only", sep),
        gluing: cell("iff no robust disconn.", glue),
    })
}

/// Runs every check behind the table.
pub fn landscape(exec: Execution) -> Result<Landscape, LandscapeError> {
    Ok(Landscape {
        rows: vec![
            unquotiented()?,
            cogerm(exec)?,
            behavioral(exec)?,
            restricted(exec)?,
            stateless(exec)?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_reproduced() {
        let l = landscape(Execution::Sequential).unwrap();
        let text = l.render();
        assert!(l.reproduced(), "{text}");
        let claims: Vec<(&str, &str)> = l
            .rows
            .iter()
            .map(|r| (r.separated.claim.as_str(), r.gluing.claim.as_str()))
            .collect();
        assert_eq!(
            claims,
            vec![
                ("Yes", "Yes (sheaf)"),
                ("No", "Yes"),
                ("Yes", "No"),
                ("j-full only", "No in general"),
                ("j-full only", "iff no robust disconn."),
            ]
        );
        assert_eq!(l, landscape(Execution::Parallel).unwrap());
    }
}
