//! Versioned JSON containers for trained models.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize)]
struct EnvelopeOut<'a, T> {
    format_version: u32,
    kind: &'a str,
    crate_version: &'a str,
    model: &'a T,
}

#[derive(Deserialize)]
struct Header {
    format_version: u32,
    kind: String,
}

pub fn to_string<T: Serialize>(kind: &str, value: &T) -> Result<String> {
    Ok(serde_json::to_string(&EnvelopeOut {
        format_version: FORMAT_VERSION,
        kind,
        crate_version: env!("CARGO_PKG_VERSION"),
        model: value,
    })?)
}

pub fn from_str<T: DeserializeOwned>(text: &str, kind: &str) -> Result<T> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    let header: Header = serde_json::from_value(value.clone()).map_err(|e| Error::Parse {
        what: "model file",
        message: e.to_string(),
    })?;
    if header.format_version != FORMAT_VERSION {
        return Err(Error::ModelVersion {
            found: header.format_version,
            expected: FORMAT_VERSION,
        });
    }
    if header.kind != kind {
        return Err(Error::Parse {
            what: "model file",
            message: format!("holds a {} model, expected {kind}", header.kind),
        });
    }
    let model = value
        .get_mut("model")
        .map(serde_json::Value::take)
        .ok_or_else(|| Error::Parse {
            what: "model file",
            message: "missing model field".into(),
        })?;
    Ok(serde_json::from_value(model)?)
}

pub fn save<T: Serialize>(path: &Path, kind: &str, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, to_string(kind, value)?).map_err(|e| Error::io(path, e))
}

pub fn load<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_str(&text, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_version_check() {
        let s = to_string("thing", &vec![1u8, 2]).unwrap();
        assert_eq!(from_str::<Vec<u8>>(&s, "thing").unwrap(), vec![1, 2]);
        assert!(matches!(
            from_str::<Vec<u8>>(&s, "other"),
            Err(Error::Parse { .. })
        ));
        let bumped = s.replace("\"format_version\":1", "\"format_version\":99");
        assert!(matches!(
            from_str::<Vec<u8>>(&bumped, "thing"),
            Err(Error::ModelVersion {
                found: 99,
                expected: 1
            })
        ));
    }
}
