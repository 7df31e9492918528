//! Kernel spec files: parsing with line/field diagnostics, overrides, and
//! conversion to a [`KernelSpec`].

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use sphere_spd::kernels::{CoefficientScheme, KernelSpec, KernelSupport, ProjectiveFamily, SpaceDescriptor, Truncation};
use sphere_spd::supportsets::{SupportSet1D, SupportSet2D};
use sphere_spd::Error;

/// Support list: 1D terms for `circle`/`sphere`, `{k, l}` products otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Support {
    Single(SupportSet1D),
    Product(SupportSet2D),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecFile {
    pub space: SpaceDescriptor,
    pub support: Support,
    pub scheme: CoefficientScheme,
    pub truncation: Truncation,
    pub seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec<'a> {
    space: SpaceDescriptor,
    #[serde(borrow)]
    support: &'a RawValue,
    #[serde(default)]
    scheme: CoefficientScheme,
    #[serde(default)]
    truncation: Truncation,
    #[serde(default)]
    seed: u64,
}

/// A malformed or invalid spec, located as precisely as the input allows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl SpecError {
    pub fn field(field: &str, message: impl Into<String>) -> Self {
        SpecError { line: None, column: None, field: Some(field.to_string()), message: message.into() }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "spec error")?;
        if let Some(line) = self.line {
            write!(f, " at line {line}")?;
            if let Some(col) = self.column {
                write!(f, ", column {col}")?;
            }
        }
        if let Some(field) = &self.field {
            write!(f, " (field `{field}`)")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for SpecError {}

fn located(err: serde_path_to_error::Error<serde_json::Error>, prefix: &str, line_offset: usize) -> SpecError {
    let path = err.path().to_string();
    let inner = err.into_inner();
    let field = match (prefix, path.as_str()) {
        (p, ".") => (!p.is_empty()).then(|| p.to_string()),
        ("", p) => Some(p.to_string()),
        (pre, p) if p.starts_with('[') => Some(format!("{pre}{p}")),
        (pre, p) => Some(format!("{pre}.{p}")),
    };
    let line = (inner.line() > 0).then(|| inner.line() + line_offset);
    let column = (inner.column() > 0).then_some(inner.column());
    // serde_json appends its own location; keep only the message
    let message = inner.to_string();
    let message = message.split(" at line ").next().unwrap_or(&message).to_string();
    SpecError { line, column, field, message }
}

/// Parses a `--space` value: `circle`, `sphere:M`, `circle_sphere:M`,
/// `circle_tph:FAMILY:D` with FAMILY one of `real_proj`, `complex_proj`,
/// `quat_proj`, `cayley`.
pub fn parse_space(text: &str) -> Result<SpaceDescriptor, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| format!("`{s}` is not a dimension"));
    let space = match parts.as_slice() {
        ["circle"] => SpaceDescriptor::Circle,
        ["sphere", m] => SpaceDescriptor::Sphere { m: num(m)? },
        ["circle_sphere", m] => SpaceDescriptor::CircleSphere { m: num(m)? },
        ["circle_tph", fam, d] => {
            let family = match *fam {
                "real_proj" => ProjectiveFamily::RealProj,
                "complex_proj" => ProjectiveFamily::ComplexProj,
                "quat_proj" => ProjectiveFamily::QuatProj,
                "cayley" => ProjectiveFamily::Cayley,
                other => return Err(format!("unknown projective family `{other}`")),
            };
            SpaceDescriptor::CircleTph { family, d: num(d)? }
        }
        _ => return Err(format!("cannot parse space `{text}`")),
    };
    space.validate().map_err(|e| e.to_string())?;
    Ok(space)
}

/// Parses a `--trunc K,L` value.
pub fn parse_truncation(text: &str) -> Result<Truncation, String> {
    let (k, l) = text.split_once(',').ok_or_else(|| format!("expected K,L, got `{text}`"))?;
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("`{s}` is not a degree"));
    Ok(Truncation { kmax: num(k)?, lmax: num(l)? })
}

/// Parses a spec file; `space` replaces the file's space before the support is read.
pub fn parse_spec(text: &str, space: Option<SpaceDescriptor>) -> Result<SpecFile, SpecError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| located(e, "", 0))?;
    de.end().map_err(|e| SpecError {
        line: Some(e.line()),
        column: Some(e.column()),
        field: None,
        message: "trailing characters after the spec object".into(),
    })?;
    let space = space.unwrap_or(raw.space);
    space.validate().map_err(|e| SpecError::field("space", e.to_string()))?;
    let support_text = raw.support.get();
    // the raw slice borrows from `text`, so its offset locates it in the file
    let offset = support_text.as_ptr() as usize - text.as_ptr() as usize;
    let line_offset = text[..offset].matches('\n').count();
    let mut sde = serde_json::Deserializer::from_str(support_text);
    let support = if space.is_product() {
        Support::Product(serde_path_to_error::deserialize(&mut sde).map_err(|e| located(e, "support", line_offset))?)
    } else {
        Support::Single(serde_path_to_error::deserialize(&mut sde).map_err(|e| located(e, "support", line_offset))?)
    };
    let spec = SpecFile { space, support, scheme: raw.scheme, truncation: raw.truncation, seed: raw.seed };
    spec.kernel()?;
    Ok(spec)
}

impl SpecFile {
    pub fn kernel_support(&self) -> KernelSupport {
        match &self.support {
            Support::Single(s) => KernelSupport::Single(s.clone()),
            Support::Product(s) => KernelSupport::Product(s.clone()),
        }
    }

    /// Builds the kernel, attributing validation failures to spec fields.
    pub fn kernel(&self) -> Result<KernelSpec, SpecError> {
        KernelSpec::new(self.space, self.kernel_support(), self.scheme, self.truncation).map_err(|e| {
            let field = match e {
                Error::InvalidScheme(_) => "scheme",
                Error::UnsupportedDegree(_) => "truncation",
                Error::InvalidSpace(_) => "support",
                _ => "space",
            };
            SpecError::field(field, e.to_string())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PRODUCT: &str = r#"{
  "space": {"kind": "circle_sphere", "m": 2},
  "support": [
    {"k": {"type": "prog", "base": 0, "step": 1}, "l": {"type": "prog", "base": 0, "step": 2}}
  ],
  "scheme": {"kind": "constant", "params": {"c": 1.0}},
  "truncation": {"kmax": 20, "lmax": 20},
  "seed": 4
}"#;

    #[test]
    fn product_spec_round_trips() {
        let spec = parse_spec(PRODUCT, None).unwrap();
        assert!(matches!(spec.support, Support::Product(ref s) if s.terms.len() == 1));
        let json = serde_json::to_string_pretty(&spec).unwrap();
        assert_eq!(parse_spec(&json, None).unwrap(), spec);
    }

    #[test]
    fn defaults_fill_in() {
        let spec = parse_spec(r#"{"space": {"kind": "circle"}, "support": [{"type": "one", "value": 3}]}"#, None).unwrap();
        assert_eq!(spec.scheme, CoefficientScheme::default());
        assert_eq!(spec.truncation, Truncation::default());
        assert_eq!(spec.seed, 0);
    }

    #[test]
    fn bad_support_is_located() {
        let text = PRODUCT.replace(r#""step": 2"#, r#""step": 0"#);
        let err = parse_spec(&text, None).unwrap_err();
        assert_eq!(err.line, Some(4));
        assert_eq!(err.field.as_deref(), Some("support[0].l"));
    }

    #[test]
    fn unknown_field_is_located() {
        let err = parse_spec(r#"{"space": {"kind": "circle"}, "support": [], "colour": 1}"#, None).unwrap_err();
        assert_eq!(err.line, Some(1));
        assert!(err.message.contains("colour"), "{err}");
    }

    #[test]
    fn invalid_dimension_names_the_space() {
        let err = parse_spec(r#"{"space": {"kind": "sphere", "m": 1}, "support": []}"#, None).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("space"));
    }

    #[test]
    fn space_override_changes_support_shape() {
        let text = r#"{"space": {"kind": "circle"}, "support": [{"k": {"type": "one", "value": 1}, "l": {"type": "one", "value": 1}}]}"#;
        assert!(parse_spec(text, None).is_err());
        let spec = parse_spec(text, Some(SpaceDescriptor::CircleSphere { m: 3 })).unwrap();
        assert_eq!(spec.space, SpaceDescriptor::CircleSphere { m: 3 });
    }

    #[test]
    fn flag_parsers() {
        assert_eq!(parse_space("circle_sphere:4").unwrap(), SpaceDescriptor::CircleSphere { m: 4 });
        assert_eq!(
            parse_space("circle_tph:quat_proj:8").unwrap(),
            SpaceDescriptor::CircleTph { family: ProjectiveFamily::QuatProj, d: 8 }
        );
        assert!(parse_space("circle_tph:cayley:8").is_err());
        assert!(parse_space("torus").is_err());
        assert_eq!(parse_truncation("10, 20").unwrap(), Truncation { kmax: 10, lmax: 20 });
        assert!(parse_truncation("10").is_err());
    }
}
