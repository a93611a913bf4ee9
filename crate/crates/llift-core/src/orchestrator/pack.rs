//! Prompt packs: external template files with named `{{slot}}` holes, plus
//! a manifest. The shipped pack is embedded; a directory pack can replace
//! it without a code change.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::OrchestratorError;

#[derive(Debug, Clone)]
pub struct PromptPack {
    name: String,
    version: String,
    templates: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct Manifest {
    name: String,
    version: String,
    templates: BTreeMap<String, String>,
}

const REQUIRED_TEMPLATES: &[&str] = &[
    "convo1_system",
    "convo1_analysis",
    "convo1_validate",
    "convo1_structured",
    "convo2_system",
    "convo2_seed",
    "convo2_supply",
    "convo2_validate",
    "convo2_structured",
    "few_shot_block",
    "repair",
    "zero_step",
    "one_step",
];

macro_rules! builtin_templates {
    ($($key:literal => $file:literal),+ $(,)?) => {
        [$(($key, include_str!(concat!("../../pack/", $file)))),+]
    };
}

impl PromptPack {
    /// The pack compiled into the binary.
    pub fn builtin() -> PromptPack {
        let entries = builtin_templates![
            "convo1_system" => "convo1_system.txt",
            "convo1_analysis" => "convo1_analysis.txt",
            "convo1_validate" => "convo1_validate.txt",
            "convo1_structured" => "convo1_structured.txt",
            "convo2_system" => "convo2_system.txt",
            "convo2_seed" => "convo2_seed.txt",
            "convo2_supply" => "convo2_supply.txt",
            "convo2_validate" => "convo2_validate.txt",
            "convo2_structured" => "convo2_structured.txt",
            "few_shot_block" => "few_shot_block.txt",
            "repair" => "repair.txt",
            "zero_step" => "zero_step.txt",
            "one_step" => "one_step.txt",
        ];
        PromptPack {
            name: "default".into(),
            version: "1".into(),
            templates: entries
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    /// Load a pack directory: `manifest.json` naming the template files.
    pub fn load(dir: &Path) -> Result<PromptPack, OrchestratorError> {
        let manifest_path = dir.join("manifest.json");
        let text = std::fs::read_to_string(&manifest_path).map_err(|e| {
            OrchestratorError::Pack(format!("{}: {e}", manifest_path.display()))
        })?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| OrchestratorError::Pack(format!("{}: {e}", manifest_path.display())))?;
        let mut templates = BTreeMap::new();
        for (key, file) in manifest.templates {
            let path = dir.join(&file);
            let body = std::fs::read_to_string(&path)
                .map_err(|e| OrchestratorError::Pack(format!("{}: {e}", path.display())))?;
            templates.insert(key, body);
        }
        let pack = PromptPack {
            name: manifest.name,
            version: manifest.version,
            templates,
        };
        pack.check_complete()?;
        Ok(pack)
    }

    fn check_complete(&self) -> Result<(), OrchestratorError> {
        for key in REQUIRED_TEMPLATES {
            if !self.templates.contains_key(*key) {
                return Err(OrchestratorError::Pack(format!(
                    "pack `{}` is missing template `{key}`",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Fill every `{{slot}}` in the template. An unfilled slot left over is
    /// an error; so is a slot name the template does not mention.
    pub fn render(&self, key: &str, slots: &[(&str, &str)]) -> Result<String, OrchestratorError> {
        let template = self
            .templates
            .get(key)
            .ok_or_else(|| OrchestratorError::Pack(format!("unknown template `{key}`")))?;
        let mut out = template.clone();
        for (slot, value) in slots {
            let hole = format!("{{{{{slot}}}}}");
            if !out.contains(&hole) {
                return Err(OrchestratorError::Pack(format!(
                    "template `{key}` has no slot `{slot}`"
                )));
            }
            out = out.replace(&hole, value);
        }
        if let Some(start) = out.find("{{") {
            let tail: String = out[start..].chars().take(24).collect();
            return Err(OrchestratorError::Pack(format!(
                "template `{key}` has an unfilled slot near `{tail}`"
            )));
        }
        Ok(out.trim_end().to_string())
    }
}
