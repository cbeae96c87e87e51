use serde::{Deserialize, Serialize};

use super::model::{ArchError, Architecture};

pub const ARCHITECTURE_FORMAT: &str = "archevol/architecture@1";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format `{found}`, expected `{expected}`")]
    Version { found: String, expected: &'static str },
    #[error(transparent)]
    Invalid(#[from] ArchError),
}

#[derive(Serialize, Deserialize)]
struct Doc {
    format: String,
    #[serde(flatten)]
    arch: Architecture,
}

/// Serializes any document canonically: object keys sorted, two-space
/// indentation, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json::Value objects are BTreeMaps, so a round trip sorts keys.
    let v = serde_json::to_value(value).expect("serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

/// Reads a versioned document, rejecting other format tags.
pub fn check_format(value: &serde_json::Value, expected: &'static str) -> Result<(), FormatError> {
    match value.get("format").and_then(|f| f.as_str()) {
        Some(f) if f == expected => Ok(()),
        Some(f) => Err(FormatError::Version {
            found: f.to_owned(),
            expected,
        }),
        None => Err(FormatError::Version {
            found: String::new(),
            expected,
        }),
    }
}

impl Architecture {
    /// Canonical, diff-stable file form.
    pub fn to_canonical(&self) -> String {
        to_canonical_json(&Doc {
            format: ARCHITECTURE_FORMAT.to_owned(),
            arch: self.clone(),
        })
    }

    /// Parses an architecture document and checks its references.
    pub fn from_document(text: &str) -> Result<Architecture, FormatError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        check_format(&value, ARCHITECTURE_FORMAT)?;
        let doc: Doc = serde_json::from_value(value)?;
        doc.arch.check_references()?;
        Ok(doc.arch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosa::{Component, Port};

    #[test]
    fn canonical_form_sorts_keys_and_round_trips() {
        let mut a = Architecture::new("t");
        a.components.push(Component::new("A").with_ports([Port::provided("p")]).with_children([]));
        let text = a.to_canonical();
        assert!(text.starts_with("{\n  \"attachments\": []"));
        assert!(text.contains("\"children\": []"));
        let back = Architecture::from_document(&text).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.to_canonical(), text);
    }

    #[test]
    fn wrong_version_rejected() {
        let text = Architecture::new("t").to_canonical().replace("@1", "@9");
        assert!(matches!(Architecture::from_document(&text), Err(FormatError::Version { .. })));
    }
}
