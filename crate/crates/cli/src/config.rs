//! Command parameters from flags layered over an optional JSON config file.

use crate::error::CliError;
use crate::output::read_input;
use bigraded_toda::Signature;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use std::path::Path;

/// Overlays the non-null fields of `flags` on the object in `file`.
///
/// Both are the same argument struct, so a config file holds exactly the
/// keys a command accepts as flags; unknown keys are rejected.
pub fn layered<A: Serialize + DeserializeOwned>(flags: A, file: Option<&Path>) -> Result<A, CliError> {
    let Some(path) = file else {
        return Ok(flags);
    };
    let base: Value = serde_json::from_str(&read_input(path)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let Value::Object(mut base) = base else {
        return Err(CliError::Io(format!("{}: config must be a JSON object", path.display())));
    };
    // every field serializes, unset ones as null, so the keys are the accepted names
    let Value::Object(over) = serde_json::to_value(&flags)? else {
        unreachable!("argument structs serialize to objects");
    };
    if let Some(k) = base.keys().find(|k| !over.contains_key(*k)) {
        return Err(CliError::usage(format!("{}: unknown key {k:?}", path.display())));
    }
    for (k, v) in over {
        if !v.is_null() {
            base.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Resolves `-N`/`-M` (default 1) and records the values in the arguments.
pub fn signature(n: &mut Option<u32>, m: &mut Option<u32>) -> Result<Signature, CliError> {
    let (n, m) = (*n.get_or_insert(1), *m.get_or_insert(1));
    Signature::try_new(n, m).ok_or_else(|| CliError::usage(format!("signature ({n},{m}) needs N, M ≥ 1")))
}

pub fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::usage(format!("{name} must be positive and finite, found {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize, Debug, PartialEq, Default)]
    struct A {
        x: Option<u32>,
        y: Option<f64>,
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::TempDir::new().unwrap();
        let f = dir.path().join("c.json");
        std::fs::write(&f, r#"{"x": 1, "y": 2.5}"#).unwrap();
        let got = layered(A { x: Some(7), y: None }, Some(&f)).unwrap();
        assert_eq!(got, A { x: Some(7), y: Some(2.5) });
    }

    #[test]
    fn unknown_keys_and_non_objects_are_rejected() {
        let dir = tempfile::TempDir::new().unwrap();
        let f = dir.path().join("c.json");
        std::fs::write(&f, r#"{"z": 1}"#).unwrap();
        assert!(matches!(layered(A::default(), Some(&f)), Err(CliError::Usage(_))));
        std::fs::write(&f, "[1]").unwrap();
        assert!(matches!(layered(A::default(), Some(&f)), Err(CliError::Io(_))));
    }

    #[test]
    fn signature_defaults_are_recorded() {
        let (mut n, mut m) = (None, Some(3));
        assert_eq!(signature(&mut n, &mut m).unwrap(), Signature::new(1, 3));
        assert_eq!(n, Some(1));
        assert!(signature(&mut Some(0), &mut None).is_err());
    }
}
