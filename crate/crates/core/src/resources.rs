//! Material and machine-tool databases.
//!
//! ```json
//! {"materials": [{"name": "low_carbon_steel", "shear_stress": 100, "yield_stress": 210}]}
//! {"tools": [{"name": "punching_press", "kind": "punching_press", "Kd": 0.3333333333333333, "max_force": 0}]}
//! ```
//!
//! Stresses are N/mm², forces N. `max_force` 0 means unlimited.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::brep::{Node, SchemaError};

const BUILTIN_MATERIALS: &str = include_str!("../resources/materials.json");
const BUILTIN_TOOLS: &str = include_str!("../resources/tools.json");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaterialSpec {
    pub name: String,
    /// τ, N/mm²
    pub shear_stress: f64,
    /// Ys, N/mm²
    pub yield_stress: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolSpec {
    pub name: String,
    pub kind: String,
    #[serde(rename = "Kd")]
    pub force_coefficient: f64,
    /// N; 0 means unlimited.
    pub max_force: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResourceError {
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("{kind} \"{name}\" is defined more than once")]
    DuplicateName { kind: &'static str, name: String },
    #[error("unknown {kind} \"{name}\"{}", suggest(suggestions))]
    NotFound { kind: &'static str, name: String, suggestions: Vec<String> },
}

fn suggest(s: &[String]) -> String {
    if s.is_empty() {
        String::new()
    } else {
        format!("; did you mean {}?", s.iter().map(|n| format!("\"{n}\"")).collect::<Vec<_>>().join(" or "))
    }
}

/// Name-keyed entries; keys are lower case.
#[derive(Debug, Clone, PartialEq)]
pub struct Database<T> {
    kind: &'static str,
    entries: BTreeMap<String, T>,
}

pub type MaterialDb = Database<MaterialSpec>;
pub type ToolDb = Database<ToolSpec>;

impl<T: Clone> Database<T> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Case-insensitive lookup. Misses suggest names within edit distance 2,
    /// comparing against whole names and their `_`-separated words.
    pub fn get(&self, name: &str) -> Result<&T, ResourceError> {
        let key = name.to_lowercase();
        self.entries.get(&key).ok_or_else(|| ResourceError::NotFound {
            kind: self.kind,
            name: name.to_string(),
            suggestions: self
                .entries
                .keys()
                .filter(|k| std::iter::once(k.as_str()).chain(k.split('_')).any(|w| strsim::levenshtein(w, &key) <= 2))
                .cloned()
                .collect(),
        })
    }

    /// Entries of `other` replace same-named entries here.
    pub fn merge(&mut self, other: &Database<T>) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }
}

fn load<T>(
    text: &str,
    kind: &'static str,
    list_key: &str,
    parse: impl Fn(&Node, String) -> Result<T, SchemaError>,
) -> Result<Database<T>, ResourceError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| SchemaError::new("", format!("invalid JSON: {e}")))?;
    let root = Node::root(&doc);
    let mut entries = BTreeMap::new();
    for item in root.field(list_key)?.items()? {
        let name = item.field("name")?.str()?.trim().to_string();
        if name.is_empty() {
            return Err(item.field("name")?.err("name must not be empty").into());
        }
        let key = name.to_lowercase();
        if entries.contains_key(&key) {
            return Err(ResourceError::DuplicateName { kind, name });
        }
        entries.insert(key, parse(&item, name)?);
    }
    Ok(Database { kind, entries })
}

pub fn load_materials(text: &str) -> Result<MaterialDb, ResourceError> {
    load(text, "material", "materials", |item, name| {
        Ok(MaterialSpec {
            name,
            shear_stress: item.field("shear_stress")?.positive()?,
            yield_stress: item.field("yield_stress")?.positive()?,
        })
    })
}

pub fn load_tools(text: &str) -> Result<ToolDb, ResourceError> {
    load(text, "tool", "tools", |item, name| {
        let max = item.field("max_force")?;
        let max_force = max.f64()?;
        if max_force < 0.0 {
            return Err(max.err("must not be negative"));
        }
        Ok(ToolSpec {
            kind: match item.opt_field("kind")? {
                Some(k) => k.str()?.to_string(),
                None => name.clone(),
            },
            name,
            force_coefficient: item.field("Kd")?.positive()?,
            max_force,
        })
    })
}

impl MaterialDb {
    pub fn builtin() -> Self {
        load_materials(BUILTIN_MATERIALS).expect("built-in materials are valid")
    }
}

impl ToolDb {
    pub fn builtin() -> Self {
        load_tools(BUILTIN_TOOLS).expect("built-in tools are valid")
    }
}
