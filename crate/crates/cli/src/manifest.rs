//! Run manifests. A manifest sits next to its output as
//! `<out>.manifest.json` and holds the full resolved configuration, so
//! `relint replay` regenerates the output byte for byte. No timestamps or
//! host data are recorded, which keeps manifests themselves reproducible.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const TOOL: &str = "relint";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
}

impl Manifest {
    pub fn new(config: RunConfig) -> Self {
        Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
        }
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn write(&self, output: &Path) -> Result<PathBuf> {
        let path = Self::path_for(output);
        let text = serde_json::to_string_pretty(self)? + "\n";
        std::fs::write(&path, text).with_context(|| format!("cannot write manifest {}", path.display()))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("cannot read manifest {}", path.display()))?;
        let m: Self =
            serde_json::from_str(&text).with_context(|| format!("invalid manifest {}", path.display()))?;
        if m.tool != TOOL {
            bail!("manifest was written by `{}`, not {TOOL}", m.tool);
        }
        if m.version != env!("CARGO_PKG_VERSION") {
            eprintln!(
                "warning: manifest version {} differs from this build ({})",
                m.version,
                env!("CARGO_PKG_VERSION")
            );
        }
        Ok(m)
    }
}
