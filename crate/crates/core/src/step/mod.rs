//! ISO 10303-21 clear-text exchange files.
//!
//! [`parse_exchange`] turns the text into an [`ExchangeStructure`] (header
//! plus id → entity map) without interpreting any schema. [`resolve_brep`]
//! then walks the AP-203 geometry subset reachable from the single
//! `MANIFOLD_SOLID_BREP` and builds a [`Solid`](crate::brep::Solid).

mod export;
mod parser;
mod resolve;
mod writer;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use export::export_solid;
pub use parser::parse_exchange;
pub use resolve::{resolve_brep, resolve_brep_with_diagnostics, Diagnostics, SUPPORTED_ENTITIES};

/// One parameter of an entity instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Parameter {
    Integer(i64),
    Real(f64),
    /// Contents between the quotes, escapes kept verbatim.
    String(String),
    /// Hex digits of a binary literal, without the quotes.
    Binary(String),
    /// Enumeration name without the surrounding dots, e.g. `T` for `.T.`.
    Enumeration(String),
    Reference(u64),
    List(Vec<Parameter>),
    /// A typed parameter such as `LENGTH_MEASURE(2.0)`.
    Typed { keyword: String, value: Box<Parameter> },
    /// `$`
    Unset,
    /// `*`
    Derived,
}

impl Parameter {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Parameter::Real(v) => Some(*v),
            Parameter::Integer(v) => Some(*v as f64),
            Parameter::Typed { value, .. } => value.as_f64(),
            _ => None,
        }
    }

    pub fn as_reference(&self) -> Option<u64> {
        match self {
            Parameter::Reference(id) => Some(*id),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Parameter]> {
        match self {
            Parameter::List(items) => Some(items),
            _ => None,
        }
    }

    /// `.T.` / `.F.` enumerations.
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Parameter::Enumeration(e) if e == "T" => Some(true),
            Parameter::Enumeration(e) if e == "F" => Some(false),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Parameter::String(s) => Some(s),
            _ => None,
        }
    }

    /// Every entity reference inside this parameter, depth first.
    pub fn references(&self, out: &mut Vec<u64>) {
        match self {
            Parameter::Reference(id) => out.push(*id),
            Parameter::List(items) => items.iter().for_each(|p| p.references(out)),
            Parameter::Typed { value, .. } => value.references(out),
            _ => {}
        }
    }
}

/// A keyword with its parameter list, e.g. `CARTESIAN_POINT('',(0.,0.,0.))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub keyword: String,
    pub params: Vec<Parameter>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Entity {
    Simple(Record),
    /// Multi-keyword instance `(A(..) B(..))`.
    Complex(Vec<Record>),
}

impl Entity {
    /// Keyword of a simple instance; complex instances report their parts
    /// joined by `+`.
    pub fn keyword(&self) -> String {
        match self {
            Entity::Simple(r) => r.keyword.clone(),
            Entity::Complex(parts) => parts.iter().map(|r| r.keyword.as_str()).collect::<Vec<_>>().join("+"),
        }
    }

    pub fn records(&self) -> &[Record] {
        match self {
            Entity::Simple(r) => std::slice::from_ref(r),
            Entity::Complex(parts) => parts,
        }
    }

    pub fn references(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for r in self.records() {
            r.params.iter().for_each(|p| p.references(&mut out));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Header {
    /// First parameter of `FILE_DESCRIPTION`.
    pub description: Vec<String>,
    /// First parameter of `FILE_NAME`.
    pub file_name: String,
    /// Schema identifiers from `FILE_SCHEMA`.
    pub schema: Vec<String>,
    /// Every header entity in file order.
    pub records: Vec<Record>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExchangeStructure {
    pub header: Header,
    pub entities: BTreeMap<u64, Entity>,
}

impl ExchangeStructure {
    /// `(from, to)` for every reference that names no instance.
    pub fn dangling_references(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for (&id, e) in &self.entities {
            for r in e.references() {
                if !self.entities.contains_key(&r) {
                    out.push((id, r));
                }
            }
        }
        out
    }

    pub fn keyword_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for e in self.entities.values() {
            *counts.entry(e.keyword()).or_insert(0) += 1;
        }
        counts
    }

    /// Clear-text encoding of this structure.
    pub fn to_part21(&self) -> String {
        writer::write(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Header,
    Data,
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::Header => "HEADER",
            Section::Data => "DATA",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("syntax error at line {line}, column {column}: expected {expected}")]
    SyntaxError { line: usize, column: usize, expected: String },
    #[error("missing {0} section")]
    MissingSection(Section),
    #[error("instance #{id} is defined more than once (line {line})")]
    DuplicateInstance { id: u64, line: usize },
    #[error("#{from_id} references undefined instance #{to_id}")]
    DanglingReference { from_id: u64, to_id: u64 },
    #[error("#{entity_id} uses unsupported geometry {keyword}")]
    UnsupportedGeometry { entity_id: u64, keyword: String },
    #[error("#{entity_id}: expected {expected}, found {found}")]
    UnexpectedEntity { entity_id: u64, expected: String, found: String },
    #[error("#{entity_id} is malformed: {reason}")]
    MalformedEntity { entity_id: u64, reason: String },
    #[error("no MANIFOLD_SOLID_BREP instance found")]
    NoSolid,
    #[error("{count} MANIFOLD_SOLID_BREP instances found; exactly one is supported")]
    MultipleSolids { count: usize },
    #[error("invalid B-Rep: {0}")]
    Model(#[from] crate::brep::BrepError),
}
