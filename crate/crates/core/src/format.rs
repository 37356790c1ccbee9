//! JSON documents exchanged by the command-line tool.
//!
//! Every document is an object carrying `"format": "toric-lattice/1"` and a
//! `"document"` tag naming its type. Models appear either as a descriptor
//! string (`"P2"`, `"F:1"`, `"dP:3"`) or as a full record; standard records
//! must match the standard model exactly.

use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::augmentation::{AugmentationStep, Variant};
use crate::decompose::{CertificateStep, DecompositionCertificate, HirzebruchClass, ShadowChain};
use crate::enumerate::{Dedup, Enumeration, EnumerationSpec, VerificationReport};
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, ModelKind, SurfaceModel};
use crate::matrix::IntMatrix;
use crate::toric::{LineBundleCollection, ToricSystem};

pub const FORMAT: &str = "toric-lattice/1";

pub mod document {
    pub const MODEL: &str = "model";
    pub const SYSTEM: &str = "toric-system";
    pub const COLLECTION: &str = "collection";
    pub const CERTIFICATE: &str = "certificate";
    pub const ENUMERATION_SPEC: &str = "enumeration-spec";
    pub const ENUMERATION: &str = "enumeration";
    pub const REPORT: &str = "verification-report";
    pub const SHADOW: &str = "shadow";
    pub const MINUS_ONE_CLASSES: &str = "minus-one-classes";
    pub const SYSTEM_CHECK: &str = "system-check";
    pub const COLLECTION_CHECK: &str = "collection-check";
    pub const BLOWDOWN: &str = "blowdown";
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    format: &'static str,
    document: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

#[derive(Deserialize)]
struct Header {
    format: Option<String>,
    document: Option<String>,
}

/// Serialises `body` as a tagged document.
pub fn write<T: Serialize>(document: &str, body: &T) -> Result<String> {
    let value = serde_json::to_value(Envelope { format: FORMAT, document, body })?;
    let mut text = String::new();
    render(&value, 0, &mut text);
    text.push('\n');
    Ok(text)
}

/// Pretty JSON that keeps arrays of scalars on one line, so vectors and
/// matrix rows read as rows.
fn render(value: &Value, indent: usize, out: &mut String) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', n));
    match value {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, v)) in map.iter().enumerate() {
                pad(out, indent + 2);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                render(v, indent + 2, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
        Value::Array(items) if items.iter().any(|v| v.is_array() || v.is_object()) => {
            out.push_str("[\n");
            for (i, v) in items.iter().enumerate() {
                pad(out, indent + 2);
                render(v, indent + 2, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push('[');
            out.push_str(&parts.join(", "));
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Checks the header, then parses the body. Syntax and type errors carry
/// line and column.
pub fn read<T: DeserializeOwned>(text: &str, document: &str) -> Result<T> {
    let header: Header = serde_json::from_str(text)?;
    match header.format.as_deref() {
        Some(FORMAT) => {}
        Some(other) => {
            return Err(Error::Format(format!("field `format`: unsupported {other:?}, expected {FORMAT:?}")))
        }
        None => return Err(Error::Format("missing field `format`".into())),
    }
    match header.document.as_deref() {
        Some(d) if d == document => {}
        Some(other) => return Err(Error::Format(format!("field `document`: got {other:?}, expected {document:?}"))),
        None => return Err(Error::Format("missing field `document`".into())),
    }
    Ok(serde_json::from_str(text)?)
}

/// Full model record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub kind: ModelKind,
    pub basis: Vec<String>,
    pub gram: IntMatrix,
    pub canonical: DivisorClass,
    #[serde(default = "one")]
    pub chi: i64,
}

fn one() -> i64 {
    1
}

impl ModelRecord {
    pub fn from_model(model: &SurfaceModel) -> Self {
        ModelRecord {
            kind: model.kind(),
            basis: model.basis().to_vec(),
            gram: model.gram().clone(),
            canonical: model.canonical().clone(),
            chi: model.chi(),
        }
    }

    pub fn into_model(self) -> Result<SurfaceModel> {
        if self.kind == ModelKind::Abstract {
            return SurfaceModel::from_gram(self.basis, self.gram, self.canonical, self.chi);
        }
        let standard = SurfaceModel::standard(self.kind)?;
        let fields: [(&str, bool); 4] = [
            ("basis", self.basis == standard.basis()),
            ("gram", &self.gram == standard.gram()),
            ("canonical", &self.canonical == standard.canonical()),
            ("chi", self.chi == standard.chi()),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, ok)| !ok) {
            return Err(Error::Format(format!("field `{name}` does not match the standard {} model", self.kind)));
        }
        Ok(standard)
    }
}

/// A descriptor string or a full record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Descriptor(String),
    Record(ModelRecord),
}

impl ModelRef {
    /// Standard models are written as descriptors.
    pub fn from_model(model: &SurfaceModel) -> Self {
        let standard = model.kind() != ModelKind::Abstract
            && matches!(SurfaceModel::standard(model.kind()), Ok(ref s) if s == model);
        if standard {
            ModelRef::Descriptor(model.kind().descriptor())
        } else {
            ModelRef::Record(ModelRecord::from_model(model))
        }
    }

    pub fn resolve(self) -> Result<SurfaceModel> {
        match self {
            ModelRef::Descriptor(s) => SurfaceModel::standard(ModelKind::parse(&s)?),
            ModelRef::Record(r) => r.into_model(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub model: ModelRef,
    pub divisors: Vec<DivisorClass>,
}

impl SystemRecord {
    pub fn from_system(system: &ToricSystem) -> Self {
        SystemRecord { model: ModelRef::from_model(system.model()), divisors: system.divisors().to_vec() }
    }

    pub fn into_system(self) -> Result<ToricSystem> {
        ToricSystem::new(Arc::new(self.model.resolve()?), self.divisors)
    }

    fn into_system_on(self, model: &Arc<SurfaceModel>) -> Result<ToricSystem> {
        ToricSystem::new(model.clone(), self.divisors)
    }
}

pub fn model_to_string(model: &SurfaceModel) -> Result<String> {
    write(document::MODEL, &ModelRecord::from_model(model))
}

pub fn model_from_str(text: &str) -> Result<SurfaceModel> {
    read::<ModelRecord>(text, document::MODEL)?.into_model()
}

pub fn system_to_string(system: &ToricSystem) -> Result<String> {
    write(document::SYSTEM, &SystemRecord::from_system(system))
}

pub fn system_from_str(text: &str) -> Result<ToricSystem> {
    read::<SystemRecord>(text, document::SYSTEM)?.into_system()
}

pub fn collection_to_string(collection: &LineBundleCollection) -> Result<String> {
    let record =
        SystemRecord { model: ModelRef::from_model(collection.model()), divisors: collection.divisors().to_vec() };
    write(document::COLLECTION, &record)
}

pub fn collection_from_str(text: &str) -> Result<LineBundleCollection> {
    let record = read::<SystemRecord>(text, document::COLLECTION)?;
    LineBundleCollection::new(Arc::new(record.model.resolve()?), record.divisors)
}

#[derive(Serialize, Deserialize)]
struct StepRecord {
    variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    model: ModelRef,
    isometry: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct CertificateRecord {
    target: SystemRecord,
    base: SystemRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base_family: Option<HirzebruchClass>,
    steps: Vec<StepRecord>,
    frame: IntMatrix,
    #[serde(default)]
    minus_one_positions: Vec<Vec<usize>>,
}

pub fn certificate_to_string(cert: &DecompositionCertificate) -> Result<String> {
    let record = CertificateRecord {
        target: SystemRecord::from_system(&cert.target),
        base: SystemRecord::from_system(&cert.base_system),
        base_family: cert.base_family,
        steps: cert
            .steps
            .iter()
            .map(|s| StepRecord {
                variant: s.step.variant,
                m: s.step.m,
                model: ModelRef::from_model(&s.model),
                isometry: s.isometry.clone(),
            })
            .collect(),
        frame: cert.frame.clone(),
        minus_one_positions: cert.minus_one_positions.clone(),
    };
    write(document::CERTIFICATE, &record)
}

/// Parses a certificate. Only the structure is checked here; use
/// [`crate::decompose::verify`] to replay it.
pub fn certificate_from_str(text: &str) -> Result<DecompositionCertificate> {
    let record: CertificateRecord = read(text, document::CERTIFICATE)?;
    let target = record.target.into_system()?;
    let base_model = Arc::new(record.base.model.clone().resolve()?);
    let base_system = record.base.into_system_on(&base_model)?;
    let steps = record
        .steps
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let step = AugmentationStep { variant: s.variant, m: s.m };
            step.check(usize::MAX).map_err(|e| Error::Format(format!("steps[{i}]: {e}")))?;
            Ok(CertificateStep { step, model: s.model.resolve()?, isometry: s.isometry })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecompositionCertificate {
        target,
        base_system,
        base_family: record.base_family,
        steps,
        frame: record.frame,
        minus_one_positions: record.minus_one_positions,
    })
}

pub fn spec_from_str(text: &str) -> Result<EnumerationSpec> {
    read(text, document::ENUMERATION_SPEC)
}

pub fn spec_to_string(spec: &EnumerationSpec) -> Result<String> {
    write(document::ENUMERATION_SPEC, spec)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationRecord {
    pub model: ModelRef,
    pub bound: i64,
    pub dedup: Dedup,
    pub truncated: bool,
    pub count: usize,
    pub systems: Vec<Vec<DivisorClass>>,
}

pub fn enumeration_to_string(spec: &EnumerationSpec, e: &Enumeration) -> Result<String> {
    let record = EnumerationRecord {
        model: ModelRef::from_model(&e.model),
        bound: spec.bound,
        dedup: spec.dedup,
        truncated: e.truncated,
        count: e.systems.len(),
        systems: e.systems.iter().map(|s| s.divisors().to_vec()).collect(),
    };
    write(document::ENUMERATION, &record)
}

/// The systems listed in an enumeration document.
pub fn enumeration_from_str(text: &str) -> Result<Vec<ToricSystem>> {
    let record: EnumerationRecord = read(text, document::ENUMERATION)?;
    let model = Arc::new(record.model.resolve()?);
    record.systems.into_iter().map(|d| ToricSystem::new(model.clone(), d)).collect()
}

pub fn report_to_string(report: &VerificationReport) -> Result<String> {
    write(document::REPORT, report)
}

pub fn report_from_str(text: &str) -> Result<VerificationReport> {
    read(text, document::REPORT)
}

pub fn shadow_to_string(chain: &ShadowChain) -> Result<String> {
    write(document::SHADOW, chain)
}

#[derive(Serialize, Deserialize)]
pub struct MinusOneRecord {
    pub model: ModelRef,
    pub count: usize,
    pub classes: Vec<DivisorClass>,
}

pub fn minus_one_to_string(model: &SurfaceModel, classes: &[DivisorClass]) -> Result<String> {
    let record = MinusOneRecord { model: ModelRef::from_model(model), count: classes.len(), classes: classes.to_vec() };
    write(document::MINUS_ONE_CLASSES, &record)
}
