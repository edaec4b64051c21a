use sha2::{Digest, Sha256};
use std::path::Path;

use super::GanModel;
use crate::error::Result;

pub fn load_model(path: &Path) -> Result<GanModel> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn save_model(model: &GanModel, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(model)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Hex SHA-256 of the canonical JSON encoding.
pub fn model_hash(model: &GanModel) -> String {
    let bytes = serde_json::to_vec(model).expect("models always serialize");
    hex_digest(&bytes)
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_preset, Preset};

    #[test]
    fn json_round_trip_is_lossless() {
        for p in [Preset::ScatteringSmall, Preset::Junction1] {
            let m = build_preset(p, 5);
            let text = serde_json::to_string(&m).unwrap();
            let back: GanModel = serde_json::from_str(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(model_hash(&back), model_hash(&m));
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join(format!("gan-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.json");
        let m = build_preset(Preset::PhotoCt1, 2);
        save_model(&m, &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), m);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
