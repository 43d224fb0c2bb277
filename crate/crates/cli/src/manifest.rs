use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use dichot_core::datio::Table;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Record of one run. Holds nothing time- or host-dependent, so equal inputs
/// give byte-identical manifests.
#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    seed: u64,
    config: toml::Value,
    inputs: BTreeMap<String, String>,
    outputs: BTreeMap<String, String>,
}

pub struct Run {
    dir: PathBuf,
    manifest: Manifest,
}

fn sha256(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Run {
    pub fn new(dir: &Path, subcommand: &'static str, seed: u64) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: Manifest {
                tool: "dichot",
                version: env!("CARGO_PKG_VERSION"),
                subcommand,
                seed,
                config: toml::Value::Table(Default::default()),
                inputs: BTreeMap::new(),
                outputs: BTreeMap::new(),
            },
        })
    }

    pub fn seed(&mut self, seed: u64) {
        self.manifest.seed = seed;
    }

    pub fn config<T: Serialize>(&mut self, cfg: &T) -> Result<()> {
        self.manifest.config = toml::Value::try_from(cfg).context("serializing config")?;
        Ok(())
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.manifest.inputs.insert(path.display().to_string(), sha256(&bytes));
        Ok(())
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.outputs.insert(name.to_string(), sha256(contents));
        Ok(())
    }

    pub fn table(&mut self, name: &str, t: &Table) -> Result<()> {
        self.write(name, t.to_tsv().as_bytes())
    }

    pub fn finish(self) -> Result<()> {
        let text = toml::to_string(&self.manifest).context("serializing manifest")?;
        let path = self.dir.join("manifest.toml");
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
