use std::path::{Component, Path, PathBuf};

use anyhow::{Context, Result};
use walkdir::WalkDir;

/// One scan found under an input root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanDir {
    /// Directory holding the numbered PNG slices.
    pub slices_dir: PathBuf,
    /// Directory holding the scan's sidecars: the parent of a `slices/`
    /// directory, otherwise `slices_dir` itself.
    pub root: PathBuf,
    /// Location of `root` relative to the input root; mirrored under the
    /// output root.
    pub rel: PathBuf,
}

impl ScanDir {
    /// Stable `/`-separated key for messages and seeding.
    pub fn key(&self) -> String {
        self.rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/")
    }

    /// Source id taken from a `source_<n>` ancestor, if any.
    pub fn source_hint(&self) -> Option<u32> {
        self.rel
            .components()
            .chain(self.root.components())
            .filter_map(|c| match c {
                Component::Normal(s) => s.to_str(),
                _ => None,
            })
            .find_map(|s| s.strip_prefix("source_")?.parse().ok())
    }
}

fn has_png(dir: &Path) -> bool {
    std::fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok())
                .any(|e| e.path().extension().is_some_and(|x| x == "png") && e.path().is_file())
        })
        .unwrap_or(false)
}

/// Every directory under `input` (inclusive) that holds PNG slices, in
/// lexicographic path order. Anything under `exclude` is skipped so an
/// output root nested in the input is never re-read.
pub fn discover_scans(input: &Path, exclude: Option<&Path>) -> Result<Vec<ScanDir>> {
    anyhow::ensure!(
        input.is_dir(),
        "input {} is not a directory",
        input.display()
    );
    let exclude = exclude.and_then(|p| std::path::absolute(p).ok());
    let mut scans = Vec::new();
    let walker = WalkDir::new(input).follow_links(true).sort_by_file_name();
    for entry in walker {
        let entry = entry.with_context(|| format!("walking {}", input.display()))?;
        if !entry.file_type().is_dir() {
            continue;
        }
        let dir = entry.path();
        if let (Some(ex), Ok(abs)) = (&exclude, std::path::absolute(dir)) {
            if abs.starts_with(ex) {
                continue;
            }
        }
        if !has_png(dir) {
            continue;
        }
        let root = if dir.file_name().is_some_and(|n| n == "slices") && dir != input {
            dir.parent().unwrap_or(dir).to_path_buf()
        } else {
            dir.to_path_buf()
        };
        let rel = match root.strip_prefix(input) {
            Ok(r) if !r.as_os_str().is_empty() => r.to_path_buf(),
            _ => std::path::absolute(&root)
                .ok()
                .and_then(|a| a.file_name().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("scan")),
        };
        scans.push(ScanDir {
            slices_dir: dir.to_path_buf(),
            root,
            rel,
        });
    }
    Ok(scans)
}

/// `target` relative to directory `base`, using `..` where needed.
pub fn relative_path(target: &Path, base: &Path) -> String {
    let (Ok(t), Ok(b)) = (std::path::absolute(target), std::path::absolute(base)) else {
        return target.to_string_lossy().into_owned();
    };
    let t: Vec<_> = normalize(&t);
    let b: Vec<_> = normalize(&b);
    let common = t.iter().zip(&b).take_while(|(x, y)| x == y).count();
    let mut parts: Vec<String> = vec!["..".to_string(); b.len() - common];
    parts.extend(t[common..].iter().cloned());
    if parts.is_empty() {
        ".".to_string()
    } else {
        parts.join("/")
    }
}

fn normalize(p: &Path) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for c in p.components() {
        match c {
            Component::ParentDir => {
                out.pop();
            }
            Component::CurDir => {}
            other => out.push(other.as_os_str().to_string_lossy().into_owned()),
        }
    }
    out
}
