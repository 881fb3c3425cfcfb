//! Provider profiles file.
//!
//! ```json
//! {
//!   "default_profile": "gemini",
//!   "profiles": {
//!     "gemini": {
//!       "base_url": "https://generativelanguage.googleapis.com/v1beta/openai",
//!       "model": "gemini-2.0-flash",
//!       "auth_env_var": "GEMINI_API_KEY",
//!       "audio": "inline"
//!     },
//!     "offline": { "kind": "replay", "fixtures": ["responses/one.json"] }
//!   },
//!   "plan": { "k": 3, "temperature": 0.5 }
//! }
//! ```
//!
//! Credentials are read from the environment variable the profile names.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::http::{from_wire, AudioTransport, OpenAiCompatible};
use super::provider::{ChatProvider, ProviderError, ScriptedProvider};
use super::PlanConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    #[default]
    Openai,
    /// Plays back captured response bodies in order.
    Replay,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderProfile {
    pub kind: ProfileKind,
    pub base_url: String,
    pub model: Option<String>,
    pub auth_env_var: Option<String>,
    pub audio: AudioTransport,
    pub timeout_secs: Option<u64>,
    /// Replay bodies, relative to the config file.
    pub fixtures: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub default_profile: Option<String>,
    pub profiles: BTreeMap<String, ProviderProfile>,
    pub plan: PlanConfig,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ProviderConfig {
    pub fn load(path: &Path) -> Result<Self, ProviderError> {
        let text = std::fs::read_to_string(path).map_err(|e| ProviderError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: ProviderConfig =
            serde_json::from_str(&text).map_err(|e| ProviderError::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn profile(&self, name: Option<&str>) -> Result<(&str, &ProviderProfile), ProviderError> {
        let name = match name.or(self.default_profile.as_deref()) {
            Some(n) => n,
            None if self.profiles.len() == 1 => self.profiles.keys().next().unwrap().as_str(),
            None => return Err(ProviderError::Config("no profile selected and no default_profile".into())),
        };
        self.profiles
            .get_key_value(name)
            .map(|(k, v)| (k.as_str(), v))
            .ok_or_else(|| ProviderError::Config(format!("unknown profile {name:?}")))
    }

    /// Instantiates the provider for a profile. `audio_root` resolves
    /// relative audio references in inline mode.
    pub fn build(&self, name: Option<&str>, audio_root: Option<&Path>) -> Result<Box<dyn ChatProvider>, ProviderError> {
        let (name, profile) = self.profile(name)?;
        match profile.kind {
            ProfileKind::Openai => {
                if profile.base_url.is_empty() {
                    return Err(ProviderError::Config(format!("profile {name:?} has no base_url")));
                }
                let api_key = match &profile.auth_env_var {
                    Some(var) => Some(
                        std::env::var(var)
                            .map_err(|_| ProviderError::Auth(format!("environment variable {var} is not set")))?,
                    ),
                    None => None,
                };
                let timeout = Duration::from_secs(profile.timeout_secs.unwrap_or(120));
                let mut p = OpenAiCompatible::new(&profile.base_url, api_key, profile.audio, timeout)?;
                if let Some(root) = audio_root {
                    p = p.with_audio_root(root);
                }
                Ok(Box::new(p))
            }
            ProfileKind::Replay => {
                let mut script = Vec::with_capacity(profile.fixtures.len());
                for f in &profile.fixtures {
                    let path = self.base_dir.join(f);
                    let body = std::fs::read_to_string(&path)
                        .map_err(|e| ProviderError::Config(format!("{}: {e}", path.display())))?;
                    script.push(Ok(from_wire(&body)?.text));
                }
                Ok(Box::new(ScriptedProvider::new(script)))
            }
        }
    }

    /// Plan settings with the profile's model applied.
    pub fn plan_config(&self, name: Option<&str>) -> Result<PlanConfig, ProviderError> {
        let (_, profile) = self.profile(name)?;
        let mut plan = self.plan.clone();
        if let Some(model) = &profile.model {
            plan.model = model.clone();
        }
        Ok(plan)
    }
}
