//! Rendering of results as exact-rational JSON or plain text.

use desing::chart::Chart;
use desing::driver::{Operation, Resolution, TraceStep};
use desing::idealistic::{IdealisticSpace, TestStep, TrickTrace};
use desing::io::ProblemFile;
use desing::monomial::{LogState, MonomialResolution};
use serde_json::{json, Value};

/// A finished command: its report in both forms and whether the verdict
/// was positive.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub positive: bool,
}

impl Report {
    pub fn new(json: Value, text: String) -> Self {
        Report { json, text, positive: true }
    }

    pub fn verdict(mut self, positive: bool) -> Self {
        self.positive = positive;
        self
    }
}

pub fn space_json(space: &IdealisticSpace) -> Value {
    serde_json::to_value(ProblemFile::from_space(space)).expect("problem files serialize")
}

pub fn space_text(space: &IdealisticSpace) -> String {
    let chart = space.chart();
    let names = chart.variables();
    let ideals: Vec<String> =
        space.ideals().iter().map(|m| format!("({}, {})", m.poly.display(names), m.mark)).collect();
    let mut out = format!("variables: {}\n", names.join(", "));
    let divisor = divisor_text(chart);
    if !divisor.is_empty() {
        out += &format!("divisor: {divisor}\n");
    }
    if let Some(sub) = chart.subspace() {
        out += &format!("zeroed: {}\n", chart.names_of(sub.vars()).join(", "));
    }
    if !chart.is_whole_chart() {
        out += &format!("region: {} != 0\n", chart.region().display(names));
    }
    out + &format!("ideals: {}", ideals.join(", "))
}

fn divisor_text(chart: &Chart) -> String {
    let names = chart.variables();
    chart.divisor().iter().map(|(l, &v)| format!("{} on {}", l.name(), names[v])).collect::<Vec<_>>().join(", ")
}

pub fn log_state_json(state: &LogState) -> Value {
    json!({
        "control": state.control(),
        "exponents": state.exponents().iter().map(|(l, a)| (l.name(), json!(a))).collect::<serde_json::Map<_, _>>(),
    })
}

fn log_state_text(state: &LogState) -> String {
    let parts: Vec<String> =
        state.exponents().iter().filter(|(_, &a)| a > 0).map(|(l, a)| format!("{}^{a}", l.name())).collect();
    format!("[{}] / {}", parts.join(" "), state.control())
}

pub fn monomial_report(start: &LogState, run: &MonomialResolution) -> Report {
    let steps: Vec<Value> = run
        .steps
        .iter()
        .map(|s| json!({"node": s.node, "center": s.center.iter().map(|l| l.name()).collect::<Vec<_>>()}))
        .collect();
    let leaves: Vec<Value> = run
        .nodes
        .iter()
        .enumerate()
        .filter(|(_, n)| n.children.is_empty())
        .map(|(i, n)| json!({"node": i, "state": log_state_json(&n.state), "singular": n.state.is_singular()}))
        .collect();
    let mut text = format!("start: {}\n", log_state_text(start));
    for (i, s) in run.steps.iter().enumerate() {
        let center: Vec<String> = s.center.iter().map(|l| l.name()).collect();
        text += &format!("step {}: node {} center {{{}}}\n", i + 1, s.node, center.join(", "));
    }
    for (i, n) in run.nodes.iter().enumerate().filter(|(_, n)| n.children.is_empty()) {
        text += &format!("leaf {i}: {}\n", log_state_text(&n.state));
    }
    let all_subcritical = run.leaves().all(|n| !n.state.is_singular());
    text += if all_subcritical { "all leaves subcritical" } else { "singular leaves remain" };
    Report::new(json!({"start": log_state_json(start), "steps": steps, "leaves": leaves}), text).verdict(all_subcritical)
}

pub fn trick_report(trace: &TrickTrace) -> Report {
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|s| {
            json!({
                "j": s.j,
                "predicted": s.predicted.to_string(),
                "actual": s.actual.to_string(),
                "divisor_permissible": s.divisor_permissible,
                "delta_point": s.delta_point.to_string(),
                "delta_curve": s.delta_curve.to_string(),
                "inequality_holds": s.inequality_holds,
            })
        })
        .collect();
    let json = json!({
        "e": trace.e.to_string(),
        "j0": trace.j0,
        "matched": trace.matched,
        "branches": trace.branches,
        "predicted_branches": trace.predicted_branches,
        "translation": trace.translation.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "steps": steps,
    });
    let mut text = format!("e = {}\n", trace.e);
    for s in &trace.steps {
        text += &format!(
            "j={}: predicted {} actual {} permissible {} delta_P {} delta_X {}\n",
            s.j, s.predicted, s.actual, s.divisor_permissible, s.delta_point, s.delta_curve
        );
    }
    text += &format!("j0 = {}, matched = {}", trace.j0, trace.matched);
    Report::new(json, text).verdict(trace.matched)
}

pub fn test_system_text(system: &[TestStep]) -> String {
    system
        .iter()
        .map(|s| match s {
            TestStep::Center { vars } => format!("center {{{}}}", vars.join(",")),
            TestStep::Projection { m } => format!("projection {m}"),
        })
        .collect::<Vec<_>>()
        .join(" ; ")
}

fn operation_text(op: &Operation) -> String {
    match op {
        Operation::Blowup { center } => format!("blowup {{{}}}", center.join(",")),
        Operation::Cover { var, value } => format!("cover {var} != 0 | {var} != {value}"),
        Operation::Substitute { var, offset } => format!("substitute {var} -> {var} + ({offset})"),
    }
}

fn step_text(i: usize, s: &TraceStep) -> String {
    let phase = serde_json::to_value(s.phase).expect("phases serialize");
    let levels: Vec<String> =
        s.levels.iter().map(|r| serde_json::to_value(r).expect("roles serialize").as_str().unwrap_or("").to_string()).collect();
    format!(
        "step {}: node {} {} [{}] levels {} -> {:?}",
        i + 1,
        s.node,
        operation_text(&s.operation),
        phase.as_str().unwrap_or(""),
        levels.join("/"),
        s.children
    )
}

pub fn resolution_report(resolution: &Resolution, verification: &[(usize, bool)]) -> Report {
    let resolved = verification.iter().all(|(_, ok)| *ok);
    let tree: Value = serde_json::from_str(&resolution.snapshot()).expect("snapshots are json");
    let json = json!({
        "trace": resolution.trace(),
        "leaves": verification.iter().map(|(id, ok)| json!({"node": id, "sing_empty": ok})).collect::<Vec<_>>(),
        "resolved": resolved,
        "tree": tree,
    });
    let mut text = String::new();
    for (i, s) in resolution.trace().iter().enumerate() {
        text += &step_text(i, s);
        text.push('\n');
    }
    for (id, ok) in verification {
        let leaf = &resolution.tree.node(*id).payload;
        let status = if *ok { "Sing empty" } else { "SINGULAR" };
        text += &format!("leaf {id}: {status}; {}\n", space_text(leaf).replace('\n', "; "));
    }
    text += if resolved { "resolved" } else { "not resolved" };
    Report::new(json, text).verdict(resolved)
}
