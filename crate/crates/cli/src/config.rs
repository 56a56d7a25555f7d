//! `key = value` defaults file. Blank lines and `#` comments are ignored.

use std::path::Path;

use fermat_core::Error;

use crate::commands::BackendArg;
use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    pub backend: Option<BackendArg>,
    pub precision: Option<usize>,
    pub json: Option<bool>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::InvalidArgument(format!("config line {}: {what}", i + 1));
            let (k, v) = line.split_once('=').ok_or_else(|| bad("expected key = value"))?;
            let v = v.trim().trim_matches('"');
            match k.trim() {
                "backend" => {
                    cfg.backend = Some(match v {
                        "exact" => BackendArg::Exact,
                        "float" => BackendArg::Float,
                        _ => return Err(bad("backend must be exact or float").into()),
                    })
                }
                "precision" => cfg.precision = Some(v.parse().map_err(|_| bad("precision must be an integer"))?),
                "json" => cfg.json = Some(v.parse().map_err(|_| bad("json must be true or false"))?),
                other => return Err(bad(&format!("unknown key `{other}`")).into()),
            }
        }
        Ok(cfg)
    }
}
