//! Server configuration file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use tabviz_core::dataset::{Dataset, DatasetManifest, SourceFormat};
use tabviz_core::fusion::{check_pattern_table, PatternTable};
use tabviz_core::gesture::GestureConfig;
use tabviz_core::chart::ViewConfig;
use tabviz_core::parser::KeywordFile;
use tabviz_core::session::{Catalog, Engine, SessionConfig};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSource {
    pub name: String,
    pub path: PathBuf,
    /// Attribute type overrides.
    #[serde(default)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_listen")]
    pub listen: String,
    /// Empty means the bundled movies table.
    #[serde(default)]
    pub datasets: Vec<DatasetSource>,
    /// Name of the dataset new sessions start with; the first one if unset.
    #[serde(default)]
    pub default_dataset: Option<String>,
    #[serde(default)]
    pub patterns: Option<PathBuf>,
    #[serde(default)]
    pub keywords: Option<PathBuf>,
    #[serde(default)]
    pub gesture: GestureConfig,
    #[serde(default)]
    pub view: ViewConfig,
    /// Directory for per-session JSONL traces.
    #[serde(default)]
    pub trace_dir: Option<PathBuf>,
}

fn default_listen() -> String {
    "127.0.0.1:7878".into()
}

impl Default for Config {
    fn default() -> Self {
        Config {
            listen: default_listen(),
            datasets: Vec::new(),
            default_dataset: None,
            patterns: None,
            keywords: None,
            gesture: GestureConfig::default(),
            view: ViewConfig::default(),
            trace_dir: None,
        }
    }
}

impl Config {
    /// Parse config text; errors name the offending field path.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            anyhow::anyhow!("config error at `{path}`: {}", e.into_inner())
        })
    }

    /// Load a config file; relative paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut config = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for d in &mut config.datasets {
            fix(&mut d.path);
            if let Some(m) = &mut d.manifest {
                fix(m);
            }
        }
        for p in [&mut config.patterns, &mut config.keywords, &mut config.trace_dir].into_iter().flatten() {
            fix(p);
        }
        Ok(config)
    }

    pub fn session_config(&self) -> SessionConfig {
        SessionConfig {
            gesture: self.gesture,
            view: self.view,
        }
    }

    pub fn catalog(&self) -> Result<Catalog> {
        let patterns = match &self.patterns {
            Some(p) => load_patterns(p)?,
            None => PatternTable::shipped(),
        };
        let report = check_pattern_table(&patterns);
        if !report.is_clean() {
            bail!(
                "pattern table is inconsistent: {} conflicts, {} problems",
                report.conflicts.len(),
                report.problems.len()
            );
        }
        let keywords = match &self.keywords {
            Some(p) => load_keywords(p)?,
            None => KeywordFile::shipped(),
        };
        let mut engines = Vec::new();
        if self.datasets.is_empty() {
            engines.push(Engine::new("movies", Dataset::movies(), &keywords, patterns.clone())?);
        }
        for d in &self.datasets {
            let dataset = load_dataset(&d.path, d.manifest.as_deref())?;
            let engine = Engine::new(d.name.clone(), dataset, &keywords, patterns.clone())
                .with_context(|| format!("dataset {}", d.name))?;
            engines.push(engine);
        }
        let default_name = self.default_dataset.clone().unwrap_or_else(|| engines[0].name.clone());
        let Some(i) = engines.iter().position(|e| e.name == default_name) else {
            bail!("default_dataset {default_name:?} is not configured");
        };
        let default = Arc::new(engines.remove(i));
        let mut catalog = Catalog::new(default);
        for e in engines {
            catalog.insert(Arc::new(e));
        }
        Ok(catalog)
    }
}

pub fn load_dataset(path: &Path, manifest: Option<&Path>) -> Result<Dataset> {
    let format = SourceFormat::from_path(&path.to_string_lossy())
        .with_context(|| format!("{}: expected a .csv or .json file", path.display()))?;
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let manifest = match manifest {
        Some(m) => {
            let text = std::fs::read_to_string(m).with_context(|| format!("reading {}", m.display()))?;
            Some(DatasetManifest::from_json(&text)?)
        }
        None => None,
    };
    Dataset::load_with_manifest(&bytes, format, manifest.as_ref()).with_context(|| format!("loading {}", path.display()))
}

pub fn load_patterns(path: &Path) -> Result<PatternTable> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    PatternTable::from_json(&text).with_context(|| format!("in {}", path.display()))
}

pub fn load_keywords(path: &Path) -> Result<KeywordFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    KeywordFile::from_json(&text).with_context(|| format!("in {}", path.display()))
}
