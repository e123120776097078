//! Scene files: a JSON description of a category, named objects, morphisms,
//! sequences and the tasks to run on them.
//!
//! A scene either lists `sections`, each with its own backend, or puts a
//! single section's fields at top level. An empty document is an empty scene.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_default() -> u32 {
    SCHEMA_VERSION
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    #[serde(default = "schema_default")]
    pub schema: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub sections: Vec<Section>,
    #[serde(default)]
    pub backend: Option<BackendSpec>,
    #[serde(default)]
    pub objects: Vec<ObjectDecl>,
    #[serde(default)]
    pub morphisms: Vec<MorphismDecl>,
    #[serde(default)]
    pub sequences: Vec<SequenceDecl>,
    #[serde(default)]
    pub tasks: Vec<TaskDecl>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Section {
    pub name: String,
    pub backend: BackendSpec,
    #[serde(default)]
    pub objects: Vec<ObjectDecl>,
    #[serde(default)]
    pub morphisms: Vec<MorphismDecl>,
    #[serde(default)]
    pub sequences: Vec<SequenceDecl>,
    #[serde(default)]
    pub tasks: Vec<TaskDecl>,
}

impl Scene {
    pub fn from_str(text: &str, path: &str) -> Result<Scene> {
        if text.trim().is_empty() {
            return Ok(Scene::default());
        }
        let scene: Scene = serde_json::from_str(text).map_err(|e| CliError::parse(path, &e))?;
        if scene.schema != SCHEMA_VERSION {
            return invalid(format!("unsupported schema {} (expected {SCHEMA_VERSION})", scene.schema));
        }
        Ok(scene)
    }

    pub fn load(path: &Path) -> Result<Scene> {
        let text = std::fs::read_to_string(path)?;
        Scene::from_str(&text, &path.display().to_string())
    }

    /// The sections to run, with a top-level section first when present.
    pub fn sections(&self) -> Result<Vec<Section>> {
        let mut out = Vec::new();
        let loose = !self.objects.is_empty()
            || !self.morphisms.is_empty()
            || !self.sequences.is_empty()
            || !self.tasks.is_empty();
        match &self.backend {
            Some(b) => out.push(Section {
                name: if self.name.is_empty() { "main".into() } else { self.name.clone() },
                backend: b.clone(),
                objects: self.objects.clone(),
                morphisms: self.morphisms.clone(),
                sequences: self.sequences.clone(),
                tasks: self.tasks.clone(),
            }),
            None if loose => return invalid("top-level objects, morphisms or tasks need a backend"),
            None => {}
        }
        out.extend(self.sections.iter().cloned());
        let mut seen = std::collections::BTreeSet::new();
        for s in &out {
            if !seen.insert(s.name.as_str()) {
                return invalid(format!("duplicate section name {:?}", s.name));
            }
        }
        Ok(out)
    }
}

/// An integer, or a symbolic multiple of the quiver parameter `lambda`
/// (`"lambda"`, `"-2lambda"`, `"1/lambda"`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Sym(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackendSpec {
    /// Free modules over `Z/p²`.
    FreeLocal { p: u64 },
    /// A cluster tilting subcategory of the homotopy category of projectives
    /// over a bound quiver algebra.
    Quiver {
        vertices: Vec<String>,
        arrows: Vec<ArrowDecl>,
        #[serde(default)]
        relations: Vec<Vec<TermDecl>>,
        field_char: u64,
        #[serde(default)]
        lambda: Option<i64>,
        n: usize,
        #[serde(default)]
        path_bound: Option<usize>,
        cluster_tilting: Vec<ModuleDecl>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDecl {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDecl {
    pub coeff: Scalar,
    pub path: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDecl {
    pub name: String,
    #[serde(default)]
    pub projective: Option<String>,
    #[serde(default)]
    pub simple: Option<String>,
    #[serde(default)]
    pub rep: Option<RepDecl>,
}

/// Dimension per vertex and matrix (`dim tgt × dim src`) per arrow; omitted
/// entries are zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepDecl {
    pub dims: BTreeMap<String, usize>,
    #[serde(default)]
    pub maps: BTreeMap<String, Vec<Vec<Scalar>>>,
}

/// A named direct sum of objects.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDecl {
    pub name: String,
    pub sum: Vec<String>,
}

/// A morphism given by exactly one constructor field.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDecl {
    pub name: String,
    #[serde(default)]
    pub src: Option<String>,
    #[serde(default)]
    pub tgt: Option<String>,
    /// Coordinates in the pinned basis of the hom space.
    #[serde(default)]
    pub coords: Option<Vec<Scalar>>,
    /// Matrix over `Z/p²` (free local backend).
    #[serde(default)]
    pub matrix: Option<Vec<Vec<Scalar>>>,
    /// Scalar endomorphism of `R` (free local backend).
    #[serde(default)]
    pub scalar: Option<Scalar>,
    /// Path expression between stalk projectives, e.g. `"a'a"`.
    #[serde(default)]
    pub path: Option<String>,
    /// Vertexwise matrices between cluster tilting modules.
    #[serde(default)]
    pub module_map: Option<BTreeMap<String, Vec<Vec<Scalar>>>>,
    /// Degree to matrix of path expressions between complex terms.
    #[serde(default)]
    pub chain_map: Option<BTreeMap<String, Vec<Vec<String>>>>,
    /// `[g, f]` is `g ∘ f`.
    #[serde(default)]
    pub compose: Option<Vec<String>>,
    /// Linear combination `[[c, name], ...]`.
    #[serde(default)]
    pub combine: Option<Vec<(Scalar, String)>>,
    #[serde(default)]
    pub neg: Option<String>,
    #[serde(default)]
    pub suspend: Option<String>,
    #[serde(default)]
    pub by: Option<i64>,
    #[serde(default)]
    pub identity: Option<String>,
    #[serde(default)]
    pub zero: Option<bool>,
    /// Matrix of morphism names (or null) between declared sums.
    #[serde(default)]
    pub block: Option<Vec<Vec<Option<String>>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDecl {
    pub name: String,
    #[serde(default)]
    pub maps: Option<Vec<String>>,
    /// The backend's extension of a morphism.
    #[serde(default)]
    pub extension_of: Option<String>,
}

/// A coset element: coordinates or a morphism name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Elem {
    Coords(Vec<i64>),
    Name(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosetExpect {
    pub rep: Elem,
    #[serde(default)]
    pub span: Vec<Elem>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketExpect {
    #[serde(default)]
    pub empty: Option<bool>,
    #[serde(default)]
    pub coset: Option<CosetExpect>,
    #[serde(default)]
    pub contains: Vec<Elem>,
    #[serde(default)]
    pub excludes: Vec<Elem>,
    #[serde(default)]
    pub contains_zero: Option<bool>,
    #[serde(default)]
    pub size: Option<u64>,
    /// Generators of the expected subgroup.
    #[serde(default)]
    pub subgroup: Option<Vec<Elem>>,
    #[serde(default)]
    pub subgroup_is_indeterminacy: Option<bool>,
    /// The bracket is the whole hom space.
    #[serde(default)]
    pub full: Option<bool>,
    /// All requested flavors give equal cosets.
    #[serde(default)]
    pub flavors_agree: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketRef {
    pub chain: Vec<String>,
    #[serde(default = "cc")]
    pub flavor: String,
    #[serde(default)]
    pub extension: Option<String>,
}

fn cc() -> String {
    "cc".into()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorExpect {
    pub morphism: String,
    pub via: String,
    pub holds: bool,
}

/// A structural law, named as in the engine.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    ZeroMembership,
    SubgroupLaw,
    Coincidence,
    FcInclusion,
    Additivity { i: usize, other: String },
    Negation { i: usize },
    TwoSigns { j: usize, k: usize },
    PostInclusion,
    PreInclusion,
    LowShift,
    HighShift,
    Shift { i: usize },
    PostPre,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskDecl {
    HomDim {
        #[serde(default)]
        name: Option<String>,
        src: String,
        tgt: String,
        #[serde(default)]
        expect: Option<usize>,
    },
    /// Hom ranks for every (row, column) pair of objects.
    HomTable {
        #[serde(default)]
        name: Option<String>,
        rows: Vec<String>,
        cols: Vec<String>,
        #[serde(default)]
        expect: Option<Vec<Vec<usize>>>,
    },
    DescribeHom {
        #[serde(default)]
        name: Option<String>,
        src: String,
        tgt: String,
        #[serde(default)]
        shift: i64,
        #[serde(default)]
        expect_len: Option<usize>,
        #[serde(default)]
        expect_factors: Vec<FactorExpect>,
    },
    Bracket {
        #[serde(default)]
        name: Option<String>,
        chain: Vec<String>,
        #[serde(default = "cc")]
        flavor: String,
        #[serde(default)]
        extension: Option<String>,
        #[serde(default)]
        expect: Option<BracketExpect>,
    },
    BracketEqual {
        #[serde(default)]
        name: Option<String>,
        left: BracketRef,
        right: BracketRef,
        #[serde(default = "yes")]
        expect: bool,
    },
    Heller {
        #[serde(default)]
        name: Option<String>,
        sequence: String,
        /// `yes`, `no`, `not-yoneda-exact` or `identity-not-in-bracket`.
        #[serde(default)]
        expect: Option<String>,
    },
    Yoneda {
        #[serde(default)]
        name: Option<String>,
        sequence: String,
        #[serde(default)]
        expect: Option<bool>,
    },
    SsCompare {
        #[serde(default)]
        name: Option<String>,
        chain: Vec<String>,
        /// `opposite` or `equal`.
        #[serde(default)]
        expect: Option<String>,
    },
    Oracle {
        #[serde(default)]
        name: Option<String>,
        chain: Vec<String>,
        #[serde(default = "cc")]
        flavor: String,
        #[serde(default)]
        extension: Option<String>,
        #[serde(default)]
        expect: Option<Vec<Vec<i64>>>,
    },
    Juggling {
        #[serde(default)]
        name: Option<String>,
        chain: Vec<String>,
        law: LawSpec,
        #[serde(default = "cc")]
        flavor: String,
        #[serde(default = "yes")]
        expect: bool,
    },
    /// Projective dimensions of the simple modules, in vertex order.
    Pd {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        expect: Option<Vec<usize>>,
    },
}

impl TaskDecl {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskDecl::HomDim { .. } => "hom_dim",
            TaskDecl::HomTable { .. } => "hom_table",
            TaskDecl::DescribeHom { .. } => "describe_hom",
            TaskDecl::Bracket { .. } => "bracket",
            TaskDecl::BracketEqual { .. } => "bracket_equal",
            TaskDecl::Heller { .. } => "heller",
            TaskDecl::Yoneda { .. } => "yoneda",
            TaskDecl::SsCompare { .. } => "ss_compare",
            TaskDecl::Oracle { .. } => "oracle",
            TaskDecl::Juggling { .. } => "juggling",
            TaskDecl::Pd { .. } => "pd",
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            TaskDecl::HomDim { name, .. }
            | TaskDecl::HomTable { name, .. }
            | TaskDecl::DescribeHom { name, .. }
            | TaskDecl::Bracket { name, .. }
            | TaskDecl::BracketEqual { name, .. }
            | TaskDecl::Heller { name, .. }
            | TaskDecl::Yoneda { name, .. }
            | TaskDecl::SsCompare { name, .. }
            | TaskDecl::Oracle { name, .. }
            | TaskDecl::Juggling { name, .. }
            | TaskDecl::Pd { name, .. } => name.as_deref(),
        }
    }

    /// The declared name, or `<index>:<kind>`.
    pub fn display_name(&self, index: usize) -> String {
        self.label().map_or_else(|| format!("{index}:{}", self.kind()), str::to_string)
    }
}
