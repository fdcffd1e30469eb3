//! Loading of `.bc` files and of the multi-agent manifest: a small TOML
//! file naming the agent files, the conflict component, the resolution
//! component, and the stage to build.
//!
//! ```toml
//! agents = ["sumo_a.bc", "sumo_b.bc"]
//! conflict = "sumo_conflict.bc"
//! resolution = "sumo_resolution.bc"
//! stage = "global"
//! ```
//!
//! Relative paths resolve against the manifest's directory. Each file is
//! grounded in its own namespace (the agent's id, `c`, or `r`) so generated
//! law ids from different files cannot collide; user labels are shared
//! across files by design.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::compose::MasSpec;
use crate::diag::Diagnostic;
use crate::grounder::{ground_with_namespace, GroundError, GroundingStats};
use crate::model::ActionDescription;
use crate::parser::{parse, SpecFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Union,
    Global,
}

#[derive(Clone, Debug)]
pub struct Manifest {
    pub agents: Vec<PathBuf>,
    pub conflict: Option<PathBuf>,
    pub resolution: Option<PathBuf>,
    pub stage: Stage,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {diagnostic}")]
    Parse {
        path: PathBuf,
        diagnostic: Diagnostic,
    },
    #[error("{path}: {source}")]
    Ground {
        path: PathBuf,
        source: GroundError,
    },
    #[error("{path}: invalid manifest: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Agent { path: PathBuf, message: String },
}

#[derive(Deserialize)]
struct RawManifest {
    agents: Vec<String>,
    conflict: Option<String>,
    resolution: Option<String>,
    stage: Option<String>,
}

pub fn load_manifest(path: &Path) -> Result<Manifest, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let raw: RawManifest = toml::from_str(&text).map_err(|e| LoadError::Manifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &str| -> PathBuf {
        let pb = PathBuf::from(p);
        if pb.is_absolute() {
            pb
        } else {
            base.join(pb)
        }
    };
    let stage = match raw.stage.as_deref() {
        None | Some("union") => Stage::Union,
        Some("global") => Stage::Global,
        Some(other) => {
            return Err(LoadError::Manifest {
                path: path.to_path_buf(),
                message: format!("unknown stage `{}`; use `union` or `global`", other),
            })
        }
    };
    if raw.agents.is_empty() {
        return Err(LoadError::Manifest {
            path: path.to_path_buf(),
            message: "at least one agent file is required".into(),
        });
    }
    Ok(Manifest {
        agents: raw.agents.iter().map(|p| resolve(p)).collect(),
        conflict: raw.conflict.as_deref().map(resolve),
        resolution: raw.resolution.as_deref().map(resolve),
        stage,
    })
}

pub fn parse_file(path: &Path) -> Result<SpecFile, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text).map_err(|diagnostic| LoadError::Parse {
        path: path.to_path_buf(),
        diagnostic,
    })
}

/// Parse and ground one `.bc` file.
pub fn load_description(path: &Path) -> Result<(ActionDescription, GroundingStats), LoadError> {
    load_description_in(path, "")
}

fn load_description_in(
    path: &Path,
    namespace: &str,
) -> Result<(ActionDescription, GroundingStats), LoadError> {
    let spec = parse_file(path)?;
    ground_with_namespace(&spec, namespace).map_err(|source| LoadError::Ground {
        path: path.to_path_buf(),
        source,
    })
}

/// The agent id of a spec file: the unique owner its action declarations
/// name.
fn agent_id_of(spec: &SpecFile, path: &Path) -> Result<String, LoadError> {
    let owners: BTreeSet<&String> = spec.actions.iter().filter_map(|a| a.agent.as_ref()).collect();
    match owners.len() {
        1 => Ok(owners.into_iter().next().unwrap().clone()),
        0 => Err(LoadError::Agent {
            path: path.to_path_buf(),
            message: "agent file declares no action owner; tag actions with `agent <name>`".into(),
        }),
        _ => Err(LoadError::Agent {
            path: path.to_path_buf(),
            message: "agent file tags actions with more than one owner".into(),
        }),
    }
}

/// Load the full multi-agent system named by a manifest.
pub fn load_mas(manifest: &Manifest) -> Result<MasSpec, LoadError> {
    let mut mas = MasSpec::default();
    for path in &manifest.agents {
        let spec = parse_file(path)?;
        let id = agent_id_of(&spec, path)?;
        let (desc, _) = load_description_in(path, &id)?;
        if mas.agents.insert(id.clone(), desc).is_some() {
            return Err(LoadError::Agent {
                path: path.to_path_buf(),
                message: format!("agent `{}` appears twice in the manifest", id),
            });
        }
    }
    if let Some(path) = &manifest.conflict {
        mas.conflict = Some(load_description_in(path, "c")?.0);
    }
    if let Some(path) = &manifest.resolution {
        mas.resolution = Some(load_description_in(path, "r")?.0);
    }
    Ok(mas)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../corpus")
            .join(name)
    }

    #[test]
    fn loads_sumo_manifests() {
        let m = load_manifest(&corpus("sumo_union.toml")).unwrap();
        assert_eq!(m.stage, Stage::Union);
        assert_eq!(m.agents.len(), 2);
        let mas = load_mas(&m).unwrap();
        assert_eq!(mas.agents.len(), 2);
        assert!(mas.agents.contains_key("a"));
        assert!(mas.agents.contains_key("b"));
        assert!(mas.conflict.is_some());
        assert!(mas.resolution.is_none());
    }

    #[test]
    fn loads_global_manifest_with_resolution() {
        let m = load_manifest(&corpus("sumo_global.toml")).unwrap();
        assert_eq!(m.stage, Stage::Global);
        let mas = load_mas(&m).unwrap();
        assert!(mas.resolution.is_some());
    }

    #[test]
    fn missing_file_is_reported_with_path() {
        let err = load_description(&corpus("missing.bc")).unwrap_err();
        assert!(err.to_string().contains("missing.bc"));
    }
}
