//! Optional TOML settings file. Precedence is defaults < file < flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use jch_core::{Error, Params, Result};

/// Environment variable naming the settings file used when `--config` is
/// absent.
pub const CONFIG_ENV: &str = "JCH_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub gamma0: Option<f64>,
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    #[serde(alias = "omega-ph")]
    pub omega_ph: Option<f64>,
    #[serde(alias = "g-p")]
    pub g_p: Option<f64>,
    pub omega0: Option<f64>,
    pub t_max: Option<f64>,
    pub t_samples: Option<usize>,
    pub horizon: Option<f64>,
    pub format: Option<String>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config {}: {e}", origin.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text, path)
    }

    /// Reads `--config`, else `$JCH_CONFIG`, else nothing.
    pub fn discover(flag: Option<&Path>) -> Result<Self> {
        let path = flag
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
        match path {
            Some(p) => Self::load(&p),
            None => Ok(Self::default()),
        }
    }

    /// Defaults overlaid with the file's model parameters.
    pub fn params(&self) -> Params {
        let d = Params::default();
        Params {
            gamma0: self.gamma0.unwrap_or(d.gamma0),
            lambda: self.lambda.unwrap_or(d.lambda),
            delta: self.delta.unwrap_or(d.delta),
            omega_ph: self.omega_ph.unwrap_or(d.omega_ph),
            g_p: self.g_p.unwrap_or(d.g_p),
            omega0: self.omega0.unwrap_or(d.omega0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_known_keys() {
        let c = FileConfig::parse("lambda = 0.5\ng_p = 2\nformat = \"json\"\n", Path::new("x")).unwrap();
        assert_eq!(c.params().lambda, 0.5);
        assert_eq!(c.params().g_p, 2.0);
        assert_eq!(c.params().omega_ph, 10.0);
        assert_eq!(c.format.as_deref(), Some("json"));
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = FileConfig::parse("lamda = 1", Path::new("x")).unwrap_err();
        assert!(err.to_string().contains("lamda"));
    }
}
