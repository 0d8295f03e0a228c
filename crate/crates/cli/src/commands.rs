use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

use sheafmealy::epsilon::depth_report;
use sheafmealy::exec::Execution;
use sheafmealy::explanations::CogermFailure;
use sheafmealy::fixtures::{self, Fixture, FixtureError, Loaded, SectionsFixture, SectionsRole};
use sheafmealy::landscape::landscape;
use sheafmealy::local_global::{
    bounded_synthesis, check_separation, glue_behavioral, glue_cogerm, verify_behavioral_gluing,
    verify_cogerm_gluing, CompatibleFamily, Difference, EquivalenceKind, GlueOutcome,
    LocalGlobalError, PatchVerdict,
};
use sheafmealy::properties;
use sheafmealy::tame::{certificate_covering, format_rational, RectUnion};
use sheafmealy::{resolve_seed, Verdict};

use crate::{Check, Cli, Command, Fixtures, Format};

/// What to print and the exit code.
pub struct Output {
    pub text: String,
    pub code: u8,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error("`{name}` is a {found} fixture; this check needs {expected}")]
    WrongKind {
        name: String,
        found: String,
        expected: &'static str,
    },
    #[error("[{module}] {message}")]
    Module {
        module: &'static str,
        message: String,
    },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Fixture(FixtureError::Malformed(_)) => 2,
            _ => 1,
        }
    }
}

fn module(name: &'static str) -> impl Fn(&dyn std::fmt::Display) -> CliError {
    move |e| CliError::Module {
        module: name,
        message: e.to_string(),
    }
}

fn ok(format: Format, text: String, value: Value) -> Output {
    code(format, text, value, 0)
}

fn code(format: Format, text: String, value: Value, code: u8) -> Output {
    let text = match format {
        Format::Text => text,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("reports serialize");
            s.push('\n');
            s
        }
    };
    Output { text, code }
}

fn kind_name(f: &Fixture) -> String {
    serde_json::to_value(f.kind)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

/// A file path if one exists, otherwise a built-in fixture name.
fn fixture(arg: &str) -> Result<Fixture, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: arg.into(),
            message: e.to_string(),
        })?;
        Ok(fixtures::parse(&text)?)
    } else {
        fixtures::builtin(arg).map_err(|e| match e {
            FixtureError::Unknown(_) => CliError::Io {
                path: arg.into(),
                message: "no such file or built-in fixture".into(),
            },
            e => e.into(),
        })
    }
}

fn sections(arg: &str, role: SectionsRole) -> Result<(String, SectionsFixture), CliError> {
    let f = fixture(arg)?;
    let expected = match role {
        SectionsRole::Separation => "a separation sections fixture",
        SectionsRole::Gluing => "a gluing sections fixture",
    };
    match f.load()? {
        Loaded::Sections(s) if s.role == role => Ok((f.name, *s)),
        _ => Err(CliError::WrongKind {
            name: f.name.clone(),
            found: kind_name(&f),
            expected,
        }),
    }
}

pub fn run(cli: &Cli, exec: Execution) -> Result<Output, CliError> {
    let fmt = cli.format;
    match &cli.command {
        Command::Validate { path } => validate(fmt, path),
        Command::Check(Check::Separation { fixture, relation }) => {
            separation(fmt, fixture, relation.map(Into::into), exec)
        }
        Command::Check(Check::GlueCogerm { fixture }) => glue_cogerm_cmd(fmt, fixture, exec),
        Command::Check(Check::GlueBeh {
            fixture,
            synthesize,
        }) => glue_beh(fmt, fixture, *synthesize, exec),
        Command::Check(Check::TameCheck { fixture }) => tame_check(fmt, fixture),
        Command::Check(Check::EpsDepth {
            fixture,
            epsilon,
            fiber,
        }) => eps_depth(fmt, fixture, *epsilon, fiber.as_deref(), exec),
        Command::Check(Check::Landscape) => {
            let l = landscape(exec).map_err(|e| module("landscape")(&e))?;
            let value = serde_json::to_value(&l).expect("landscape serializes");
            Ok(code(
                fmt,
                l.render(),
                value,
                if l.reproduced() { 0 } else { 1 },
            ))
        }
        Command::Fixtures(Fixtures::List) => {
            let mut text = String::new();
            let mut list = Vec::new();
            for name in fixtures::builtin_names() {
                let f = fixtures::builtin(name)?;
                text += &format!("{:<28} {:<11} {}\n", f.name, kind_name(&f), f.source);
                list.push(json!({"name": f.name, "kind": kind_name(&f), "source": f.source}));
            }
            Ok(ok(fmt, text, Value::Array(list)))
        }
        Command::Fixtures(Fixtures::Dump { name }) => {
            let text = fixtures::builtin_text(name)?;
            Ok(Output {
                text: text.to_string(),
                code: 0,
            })
        }
        Command::Props {
            seed,
            suite,
            trials,
        } => props(fmt, resolve_seed(*seed), suite.as_deref(), *trials, exec),
    }
}

fn validate(fmt: Format, path: &Path) -> Result<Output, CliError> {
    let shown = path.display().to_string();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let message = e.to_string();
            let value = json!({"status": "malformed", "path": shown, "errors": [message]});
            return Ok(code(
                fmt,
                format!("malformed: cannot read {shown}: {message}\n"),
                value,
                2,
            ));
        }
    };
    let f = match fixtures::parse(&text) {
        Ok(f) => f,
        Err(e) => {
            let value = json!({"status": "malformed", "path": shown, "errors": [e.to_string()]});
            return Ok(code(fmt, format!("malformed: {e}\n"), value, 2));
        }
    };
    match f.load() {
        Ok(_) => {
            let value = json!({"status": "valid", "name": f.name, "kind": kind_name(&f)});
            Ok(ok(
                fmt,
                format!("valid: {} ({})\n", f.name, kind_name(&f)),
                value,
            ))
        }
        Err(FixtureError::Invalid(v)) => {
            let mut text = format!("invalid: {} ({})\n", f.name, kind_name(&f));
            for line in &v {
                text += &format!("  - {line}\n");
            }
            let value = json!({"status": "invalid", "name": f.name, "kind": kind_name(&f), "violations": v});
            Ok(code(fmt, text, value, 1))
        }
        Err(e) => {
            let value = json!({"status": "malformed", "path": shown, "errors": [e.to_string()]});
            Ok(code(fmt, format!("malformed: {e}\n"), value, 2))
        }
    }
}

fn relation_name(k: EquivalenceKind) -> &'static str {
    match k {
        EquivalenceKind::Beh => "beh",
        EquivalenceKind::Ri => "ri",
        EquivalenceKind::Cogerm => "cogerm",
    }
}

fn describe(v: &Verdict<Difference>) -> String {
    match v.witness() {
        None => "equal".into(),
        Some(Difference::Behavior(d)) => format!(
            "differ from {} on [{}]: [{}] vs [{}]",
            d.state,
            d.word.join(", "),
            d.first_outputs.join(", "),
            d.second_outputs.join(", ")
        ),
        Some(Difference::Cogerm(CogermFailure::OutputMismatch { pair, input })) => {
            format!(
                "not cogerm-equivalent: paired states {} and {} answer {input} differently",
                pair.0, pair.1
            )
        }
        Some(Difference::Cogerm(CogermFailure::NotSingleValued { state, partners })) => {
            format!(
                "not cogerm-equivalent: {state} pairs with {}",
                partners.join(" and ")
            )
        }
    }
}

fn separation(
    fmt: Format,
    arg: &str,
    relation: Option<EquivalenceKind>,
    exec: Execution,
) -> Result<Output, CliError> {
    let (name, f) = sections(arg, SectionsRole::Separation)?;
    let kind = relation.unwrap_or(f.relation);
    let r = check_separation(
        kind,
        &f.covering,
        &f.sections[0],
        &f.sections[1],
        &f.judge,
        exec,
    )
    .map_err(|e| module("local-global")(&e))?;
    let mut text = format!("separation ({}) on {name}\n", relation_name(kind));
    for PatchVerdict {
        patch,
        alphabet,
        verdict,
    } in &r.locally
    {
        text += &format!(
            "  patch {patch} over [{}]: {}\n",
            alphabet.join(", "),
            describe(verdict)
        );
    }
    text += &format!("  global: {}\n", describe(&r.globally));
    let verdict = if r.violates_separation() {
        "violated"
    } else if r.locally_equal() {
        "holds"
    } else {
        "holds (sections already differ locally)"
    };
    text += &format!("separation: {verdict}\n");
    if let Some(o) = r.obstruction() {
        text += &format!("{}\n", o.narrative);
    }
    let value = json!({
        "fixture": name,
        "relation": relation_name(kind),
        "violates_separation": r.violates_separation(),
        "report": r,
        "obstruction": r.obstruction(),
    });
    Ok(ok(fmt, text, value))
}

fn glue_cogerm_cmd(fmt: Format, arg: &str, exec: Execution) -> Result<Output, CliError> {
    let (name, f) = sections(arg, SectionsRole::Gluing)?;
    let lg = module("local-global");
    let family =
        CompatibleFamily::new(f.covering.clone(), f.sections.clone()).map_err(|e| lg(&e))?;
    let attempt = family.with_witnesses(exec).and_then(|fam| {
        let g = glue_cogerm(&fam, &f.judge)?;
        let verified = verify_cogerm_gluing(&fam, &g)?.holds();
        Ok((g, verified))
    });
    match attempt {
        Ok((g, verified)) => {
            let ex = g.explanatory();
            let text = format!(
                "cogerm gluing on {name}\nglued: {}-state explanatory system [{}]\nrestrictions cogerm-equivalent to the locals: {}\n",
                ex.state_count(),
                ex.before().as_slice().join(", "),
                if verified { "yes" } else { "no" }
            );
            let value = json!({"fixture": name, "outcome": "glued", "states": ex.state_count(), "verified": verified, "section": g.to_doc()});
            Ok(ok(fmt, text, value))
        }
        Err(LocalGlobalError::IncompatibleFamily { pair, reason }) => {
            let text = format!(
                "cogerm gluing on {name}\nincompatible on patches {} and {}: {reason}\n",
                pair.0, pair.1
            );
            let value = json!({"fixture": name, "outcome": "incompatible", "pair": [pair.0, pair.1], "reason": reason});
            Ok(ok(fmt, text, value))
        }
        Err(e) => Err(lg(&e)),
    }
}

fn glue_beh(
    fmt: Format,
    arg: &str,
    synthesize: Option<usize>,
    exec: Execution,
) -> Result<Output, CliError> {
    let (name, f) = sections(arg, SectionsRole::Gluing)?;
    let lg = module("local-global");
    let out = glue_behavioral(&f.covering, &f.sections, &f.judge, exec).map_err(|e| lg(&e))?;
    let mut text = format!("behavioral gluing on {name}\n");
    match &out {
        GlueOutcome::Glued(s) => {
            let verified = verify_behavioral_gluing(&f.covering, &f.sections, s, &f.judge)
                .map_err(|e| lg(&e))?;
            text += &format!(
                "glued: {}-state explanatory system; restrictions behave like the locals: {}\n",
                s.explanatory().state_count(),
                if verified { "yes" } else { "no" }
            );
        }
        GlueOutcome::Obstructed(r) => {
            text += &format!("obstructed at {}: {}\n", r.site, r.narrative)
        }
    }
    let mut value = json!({"fixture": name, "gluing": out});
    if let Some(n) = synthesize {
        let s =
            bounded_synthesis(&f.covering, &f.sections, &f.judge, n, exec).map_err(|e| lg(&e))?;
        text += &format!(
            "synthesis up to {n} states: {} machines searched, {}\n",
            s.machines_searched,
            match s.found_states {
                Some(k) => format!("found a {k}-state global section"),
                None => "no global section".into(),
            }
        );
        value["synthesis"] = serde_json::to_value(&s).expect("synthesis serializes");
    }
    Ok(ok(fmt, text, value))
}

fn tame_check(fmt: Format, arg: &str) -> Result<Output, CliError> {
    let f = fixture(arg)?;
    let Loaded::RectUnion(u) = f.load()? else {
        return Err(CliError::WrongKind {
            name: f.name.clone(),
            found: kind_name(&f),
            expected: "a rect-union fixture",
        });
    };
    tame_report(fmt, &f.name, &u)
}

fn tame_report(fmt: Format, name: &str, u: &RectUnion) -> Result<Output, CliError> {
    let v = u.sheaf_verdict();
    let q = |x: &sheafmealy::tame::Q| format_rational(x);
    let mut text = format!("{}\n", v.summary());
    let critical: Vec<String> = u.critical_values().iter().map(q).collect();
    text += &format!("critical values: {}\n", critical.join(", "));
    let mut fibers = Vec::new();
    for t in &v.disconnected_fibers {
        let fiber = u.fiber(t);
        text += &format!(
            "fiber at {}: {fiber} ({} components)\n",
            q(t),
            fiber.components()
        );
        fibers
            .push(json!({"t": q(t), "fiber": fiber.to_string(), "components": fiber.components()}));
    }
    let mut certs = Vec::new();
    for t in &v.robust {
        let cert = u
            .robustly_disconnected(t)
            .expect("robust value has a certificate");
        let check = certificate_covering(u, &cert).map_err(|e| module("tame")(&e))?;
        text += &format!(
            "certificate at {}: neighborhood ({}, {}), {} components meet the fiber\n",
            q(&cert.t0),
            q(&cert.neighborhood.0),
            q(&cert.neighborhood.1),
            cert.components.len()
        );
        text += &format!(
            "  two-patch covering on {} sample points: locals exist: {}, compatible: {}, glues: {}\n",
            check.points.len(),
            check.locals_exist,
            check.compatible,
            check.glues
        );
        certs.push(json!({
            "t0": q(&cert.t0),
            "neighborhood": [q(&cert.neighborhood.0), q(&cert.neighborhood.1)],
            "components": cert.components.iter().map(|c| json!({
                "pieces": c.pieces.len(),
                "marked": [q(&c.marked.0), q(&c.marked.1)],
            })).collect::<Vec<_>>(),
            "covering": check,
        }));
    }
    if v.compactness_unchecked {
        text += "note: some edges are open, so the union is not compact; the criterion is applied as is\n";
    }
    let value = json!({
        "fixture": name,
        "summary": v.summary(),
        "sheaf": v.sheaf,
        "critical_values": critical,
        "disconnected_fibers": fibers,
        "certificates": certs,
        "compactness_unchecked": v.compactness_unchecked,
    });
    Ok(ok(fmt, text, value))
}

fn eps_depth(
    fmt: Format,
    arg: &str,
    epsilon: Option<f64>,
    fiber: Option<&str>,
    exec: Execution,
) -> Result<Output, CliError> {
    let f = fixture(arg)?;
    let Loaded::Epsilon(p) = f.load()? else {
        return Err(CliError::WrongKind {
            name: f.name.clone(),
            found: kind_name(&f),
            expected: "an epsilon fixture",
        });
    };
    let eps = epsilon.unwrap_or(p.epsilon);
    let fibers = match fiber {
        Some(x) => vec![x.to_string()],
        None => p.instance.fibers(),
    };
    let mut text = String::new();
    let mut reports = Vec::new();
    for x in &fibers {
        let r = depth_report(&p.instance, &p.patches, eps, x, exec)
            .map_err(|e| module("epsilon")(&e))?;
        let depth = match r.depth {
            Some(k) => format!("depth {k} via patches {:?}", r.subfamily),
            None => "feasible, no obstruction".into(),
        };
        text += &format!(
            "fiber {x} at ε = {eps}: {depth}; pairwise radius {:.9}, full radius {:.9}\n",
            r.radius_pairwise, r.radius_full
        );
        reports.push(r);
    }
    let value = json!({"fixture": f.name, "epsilon": eps, "fibers": reports});
    Ok(ok(fmt, text, value))
}

fn props(
    fmt: Format,
    seed: u64,
    suite: Option<&str>,
    trials: Option<usize>,
    exec: Execution,
) -> Result<Output, CliError> {
    use properties::*;
    let reports: Vec<SuiteReport> = match suite {
        None => standard_suites(seed, exec),
        Some(name) => {
            let t = |default: usize| trials.unwrap_or(default);
            vec![match name {
                "beh-separation" => separation_suite(seed, t(SEPARATION_TRIALS), exec),
                "cogerm-gluing" => cogerm_gluing_suite(seed, t(COGERM_TRIALS), exec),
                "helly-d1" => helly_suite(seed, t(HELLY_TRIALS), 1, exec),
                "helly-d2" => helly_suite(seed, t(HELLY_TRIALS), 2, exec),
                "helly-d3" => helly_suite(seed, t(HELLY_TRIALS), 3, exec),
                "discrete-helly" => discrete_helly_suite(seed, t(DISCRETE_TRIALS), exec),
                "vk-cube" => vk_cube_suite(seed, t(VK_TRIALS), exec),
                "minimize" => minimize_suite(seed, t(MISC_TRIALS), exec),
                "restriction" => restriction_suite(seed, t(MISC_TRIALS), exec),
                "tame-chain" => tame_chain_suite(seed, t(MISC_TRIALS), exec),
                other => return Err(CliError::UnknownSuite(other.into())),
            }]
        }
    };
    let mut text = format!("seed: {seed}\n");
    for r in &reports {
        text += &format!(
            "[{}] {}\n",
            if r.passed() { "pass" } else { "FAIL" },
            r.summary()
        );
        for e in &r.examples {
            text += &format!("    {e}\n");
        }
    }
    let failed = reports.iter().any(|r| !r.passed());
    let value = json!({"seed": seed, "suites": reports});
    Ok(code(fmt, text, value, u8::from(failed)))
}
