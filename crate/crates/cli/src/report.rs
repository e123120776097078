//! Report payloads. Everything here serializes deterministically; the only
//! run-dependent field is `timing_ms`.

use serde::Serialize;
use serde_json::Value;

use ntoda::angcat::{Backend, Morphism, ObjRef};
use ntoda::exactlin::Coset;

use crate::build::{MorphismEcho, Provenance};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Info,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskReport {
    pub name: String,
    pub task: String,
    pub status: Status,
    pub result: Value,
    pub failures: Vec<String>,
    pub timing_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionReport {
    pub name: String,
    pub provenance: Provenance,
    pub morphisms: Vec<MorphismEcho>,
    pub tasks: Vec<TaskReport>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub info: usize,
    pub error: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub scene: String,
    pub sections: Vec<SectionReport>,
    pub summary: Summary,
}

impl Report {
    pub fn new(scene: &str, sections: Vec<SectionReport>) -> Report {
        let mut summary = Summary::default();
        for t in sections.iter().flat_map(|s| &s.tasks) {
            match t.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Info => summary.info += 1,
                Status::Error => summary.error += 1,
            }
        }
        Report {
            schema: REPORT_SCHEMA,
            tool: "ntoda".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scene: scene.into(),
            sections,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0 && self.summary.error == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable summary, one line per task.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            out.push_str(&format!("[{}] {} over Z/{}\n", s.name, s.provenance.backend, s.provenance.modulus));
            for t in &s.tasks {
                let status = format!("{:?}", t.status).to_uppercase();
                let headline = t.result.get("display").and_then(Value::as_str).unwrap_or("");
                out.push_str(&format!("  {status:<5} {:<28} {headline}\n", t.name));
                for f in &t.failures {
                    out.push_str(&format!("        - {f}\n"));
                }
            }
        }
        let m = &self.summary;
        out.push_str(&format!("{} passed, {} failed, {} errors, {} informational\n", m.pass, m.fail, m.error, m.info));
        out
    }
}

/// Removes every `timing_ms` field, for comparing runs.
pub fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("timing_ms");
            for x in map.values_mut() {
                strip_timing(x);
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn vec_text(v: &[u64]) -> String {
    if v.len() == 1 {
        v[0].to_string()
    } else {
        format!("({})", v.iter().map(u64::to_string).collect::<Vec<_>>().join(", "))
    }
}

/// Display such as `1 + (2)`, `{0}` or `(1, 0) + ⟨(0, 1)⟩`.
pub fn coset_display(c: &Coset) -> String {
    let Some(rep) = c.representative() else { return "∅".into() };
    let rep = c.subgroup().reduce(rep);
    let gens = c.subgroup().basis();
    if gens.is_empty() {
        return format!("{{{}}}", vec_text(&rep));
    }
    let span: Vec<String> = gens.iter().map(|g| vec_text(g)).collect();
    if c.ambient() == 1 {
        format!("{} + ({})", vec_text(&rep), span.join(", "))
    } else {
        format!("{} + ⟨{}⟩", vec_text(&rep), span.join(", "))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HomInfo {
    pub src: String,
    pub tgt: String,
    pub basis: Vec<String>,
}

pub fn hom_info(b: &dyn Backend, x: ObjRef, y: ObjRef) -> HomInfo {
    HomInfo {
        src: b.describe_object(x),
        tgt: b.describe_object(y),
        basis: b.hom_basis(x, y).unwrap_or_default(),
    }
}

/// A coset with its hom space: canonical representative, subgroup basis in
/// Howell form, size and a display string.
pub fn coset_json(b: &dyn Backend, hom: (ObjRef, ObjRef), c: &Coset) -> Value {
    let rep = c.representative().map(|r| c.subgroup().reduce(r));
    serde_json::json!({
        "hom": hom_info(b, hom.0, hom.1),
        "empty": c.is_empty(),
        "representative": rep,
        "subgroup_basis": c.subgroup().basis(),
        "size": c.size().map(|s| s.to_string()),
        "display": coset_display(c),
    })
}

pub fn morphism_json(b: &dyn Backend, f: &Morphism) -> Value {
    serde_json::json!({
        "src": b.describe_object(f.src),
        "tgt": b.describe_object(f.tgt),
        "coords": f.coords,
    })
}
