use std::fmt;
use std::path::{Path, PathBuf};

use ddp_core::{core_kb, parse_discourse, Ilf, KbError, KnowledgeBase};

#[derive(Debug)]
pub enum LoadError {
    Read { path: PathBuf, source: std::io::Error },
    Ilf { path: PathBuf, source: ddp_core::IlfError },
    Kb { path: PathBuf, source: KbError },
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Read { path, source } => write!(f, "{}: {source}", path.display()),
            LoadError::Ilf { path, source } => write!(f, "{}:{source}", path.display()),
            LoadError::Kb { path, source } => write!(f, "{}:{source}", path.display()),
        }
    }
}

impl std::error::Error for LoadError {}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Read { path: path.to_owned(), source })
}

pub fn load_discourse(path: &Path) -> Result<Vec<Ilf>, LoadError> {
    parse_discourse(&read(path)?).map_err(|source| LoadError::Ilf { path: path.to_owned(), source })
}

/// The KB at `path`, or the bundled one.
pub fn load_kb(path: Option<&Path>) -> Result<KnowledgeBase, LoadError> {
    match path {
        None => Ok(core_kb()),
        Some(p) => KnowledgeBase::parse(&read(p)?).map_err(|source| LoadError::Kb { path: p.to_owned(), source }),
    }
}
