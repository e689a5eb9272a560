//! File-level dependency networks extracted from source trees.
//!
//! A [`LangProfile`] says which files belong to the language, which lines are
//! references (one regex capture per reference) and where references are
//! looked up. Edges run from the dependent file to its dependency.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::{Component, Path, PathBuf};

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{invalid, Error, Result};
use crate::graph::DirectedGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    /// Try the referencing file's directory first.
    #[serde(default = "yes")]
    pub relative: bool,
    /// Directories relative to the scan root, tried in order.
    #[serde(default)]
    pub search_paths: Vec<String>,
    /// Suffixes tried after the reference, in order; `""` means as written.
    #[serde(default = "as_written")]
    pub suffixes: Vec<String>,
    /// Separator in dotted module names, rewritten to `/` before lookup.
    #[serde(default)]
    pub module_separator: Option<char>,
}

fn yes() -> bool {
    true
}

fn as_written() -> Vec<String> {
    vec![String::new()]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LangProfile {
    pub name: String,
    pub file_globs: Vec<String>,
    pub import_patterns: Vec<String>,
    pub resolution: Resolution,
    #[serde(default)]
    pub line_comments: Vec<String>,
    #[serde(default)]
    pub block_comment: Option<(String, String)>,
}

impl LangProfile {
    pub fn c() -> Self {
        Self {
            name: "c".into(),
            file_globs: ["*.c", "*.h", "*.cc", "*.cpp", "*.cxx", "*.hh", "*.hpp"].map(String::from).to_vec(),
            import_patterns: vec![r#"^\s*#\s*include\s*[<"]([^>"]+)[>"]"#.into()],
            resolution: Resolution {
                relative: true,
                search_paths: vec![".".into(), "include".into()],
                suffixes: as_written(),
                module_separator: None,
            },
            line_comments: vec!["//".into()],
            block_comment: Some(("/*".into(), "*/".into())),
        }
    }

    pub fn import() -> Self {
        Self {
            name: "import".into(),
            file_globs: vec!["*.py".into()],
            import_patterns: vec![
                r"^\s*import\s+([A-Za-z_][\w.]*)".into(),
                r"^\s*from\s+([A-Za-z_][\w.]*)\s+import\b".into(),
            ],
            resolution: Resolution {
                relative: true,
                search_paths: vec![".".into()],
                suffixes: vec![".py".into(), "/__init__.py".into()],
                module_separator: Some('.'),
            },
            line_comments: vec!["#".into()],
            block_comment: None,
        }
    }

    pub fn require() -> Self {
        Self {
            name: "require".into(),
            file_globs: ["*.js", "*.cjs", "*.mjs"].map(String::from).to_vec(),
            import_patterns: vec![r#"^.*?\brequire\s*\(\s*["']([^"']+)["']\s*\)"#.into()],
            resolution: Resolution {
                relative: true,
                search_paths: vec![".".into()],
                suffixes: ["", ".js", "/index.js"].map(String::from).to_vec(),
                module_separator: None,
            },
            line_comments: vec!["//".into()],
            block_comment: Some(("/*".into(), "*/".into())),
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "c" => Some(Self::c()),
            "import" => Some(Self::import()),
            "require" => Some(Self::require()),
            _ => None,
        }
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["c", "import", "require"]
    }

    pub fn compile(&self) -> Result<CompiledProfile<'_>> {
        if self.file_globs.is_empty() || self.import_patterns.is_empty() {
            return Err(invalid(format!("profile {}: needs a file glob and an import pattern", self.name)));
        }
        let globs = self
            .file_globs
            .iter()
            .map(|g| glob::Pattern::new(g).map_err(|e| invalid(format!("glob {g:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let patterns = self
            .import_patterns
            .iter()
            .map(|p| {
                let re = Regex::new(p).map_err(|e| invalid(format!("pattern {p:?}: {e}")))?;
                if !p.starts_with('^') {
                    return Err(invalid(format!("pattern {p:?} must be anchored with ^")));
                }
                if re.captures_len() != 2 {
                    return Err(invalid(format!("pattern {p:?} must have exactly one capture group")));
                }
                Ok(re)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CompiledProfile { profile: self, globs, patterns })
    }
}

pub struct CompiledProfile<'a> {
    profile: &'a LangProfile,
    globs: Vec<glob::Pattern>,
    patterns: Vec<Regex>,
}

impl CompiledProfile<'_> {
    /// Globs without `/` match the file name, others the root-relative path.
    pub fn matches(&self, rel: &str) -> bool {
        let name = rel.rsplit('/').next().unwrap_or(rel);
        self.globs.iter().zip(&self.profile.file_globs).any(|(g, raw)| {
            if raw.contains('/') {
                g.matches(rel)
            } else {
                g.matches(name)
            }
        })
    }

    /// References in file order, comments removed on a best-effort basis.
    pub fn references(&self, text: &str) -> Vec<String> {
        let mut refs = Vec::new();
        let mut in_block = false;
        for raw in text.lines() {
            let mut line = raw.to_string();
            if let Some((open, close)) = &self.profile.block_comment {
                if in_block {
                    match line.find(close.as_str()) {
                        Some(end) => {
                            line = line[end + close.len()..].to_string();
                            in_block = false;
                        }
                        None => continue,
                    }
                }
                while let Some(start) = line.find(open.as_str()) {
                    match line[start + open.len()..].find(close.as_str()) {
                        Some(end) => {
                            let after = start + open.len() + end + close.len();
                            line = format!("{}{}", &line[..start], &line[after..]);
                        }
                        None => {
                            line.truncate(start);
                            in_block = true;
                            break;
                        }
                    }
                }
            }
            let trimmed = line.trim_start();
            if self.profile.line_comments.iter().any(|c| trimmed.starts_with(c.as_str())) {
                continue;
            }
            for re in &self.patterns {
                if let Some(c) = re.captures(&line) {
                    let r = c[1].trim();
                    if !r.is_empty() {
                        refs.push(r.to_string());
                    }
                }
            }
        }
        refs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolved {
    /// Root-relative path of a matched file.
    Internal(String),
    External,
}

/// Lexical normalisation of a root-relative path; `None` if it leaves the root.
fn normalize(path: &Path) -> Option<String> {
    let mut parts: Vec<String> = Vec::new();
    for c in path.components() {
        match c {
            Component::Normal(s) => parts.push(s.to_string_lossy().into_owned()),
            Component::CurDir => {}
            Component::ParentDir => {
                parts.pop()?;
            }
            Component::RootDir | Component::Prefix(_) => return None,
        }
    }
    Some(parts.join("/"))
}

/// Looks `reference` up relative to `current_file`'s directory, then along
/// the search paths; the first candidate present in `files` wins.
pub fn resolve_reference(reference: &str, current_file: &str, resolution: &Resolution, files: &HashSet<String>) -> Resolved {
    if reference.is_empty() || reference.starts_with('/') {
        return Resolved::External;
    }
    let reference = match resolution.module_separator {
        Some(sep) => reference.replace(sep, "/"),
        None => reference.to_string(),
    };
    let mut bases: Vec<PathBuf> = Vec::new();
    if resolution.relative {
        bases.push(Path::new(current_file).parent().map(Path::to_path_buf).unwrap_or_default());
    }
    bases.extend(resolution.search_paths.iter().map(PathBuf::from));
    for base in bases {
        for suffix in &resolution.suffixes {
            let candidate = base.join(format!("{reference}{suffix}"));
            if let Some(rel) = normalize(&candidate) {
                if files.contains(&rel) {
                    return Resolved::Internal(rel);
                }
            }
        }
    }
    Resolved::External
}

pub const EXTERNAL_PREFIX: &str = "ext:";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractionReport {
    #[serde(skip)]
    pub graph: DirectedGraph,
    /// Files first (sorted by path), then `ext:<reference>` nodes (sorted).
    pub labels: Vec<String>,
    pub external_count: usize,
    /// `(file, reference)` pairs left out of the graph.
    pub unresolved: Vec<(String, String)>,
    /// `(file, error)` for files that could not be read.
    pub skipped: Vec<(String, String)>,
}

impl ExtractionReport {
    pub fn labels_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "path"]).expect("in-memory write");
        for (i, l) in self.labels.iter().enumerate() {
            w.write_record([i.to_string(), l.clone()]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn unresolved_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["file", "reference"]).expect("in-memory write");
        for (f, r) in &self.unresolved {
            w.write_record([f, r]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }
}

pub fn scan_tree(root: &Path, profile: &LangProfile, include_external: bool) -> Result<ExtractionReport> {
    let compiled = profile.compile()?;
    fs::read_dir(root).map_err(|e| Error::Io(format!("{}: {e}", root.display())))?;
    let mut files = Vec::new();
    let mut skipped = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let p = e.path().map(|p| rel_label(root, p)).unwrap_or_default();
                log::warn!("skipping {p}: {e}");
                skipped.push((p, e.to_string()));
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = rel_label(root, entry.path());
        if compiled.matches(&rel) {
            files.push(rel);
        }
    }
    files.sort();
    let file_set: HashSet<String> = files.iter().cloned().collect();

    let scanned: Vec<(usize, std::result::Result<Vec<String>, String>)> = files
        .par_iter()
        .enumerate()
        .map(|(i, rel)| {
            let refs = fs::read(root.join(rel))
                .map(|bytes| compiled.references(&String::from_utf8_lossy(&bytes)))
                .map_err(|e| e.to_string());
            (i, refs)
        })
        .collect();

    let mut internal: BTreeSet<(usize, String)> = BTreeSet::new();
    let mut external: BTreeSet<(usize, String)> = BTreeSet::new();
    let mut unresolved = Vec::new();
    for (i, refs) in scanned {
        let refs = match refs {
            Ok(r) => r,
            Err(e) => {
                log::warn!("skipping {}: {e}", files[i]);
                skipped.push((files[i].clone(), e));
                continue;
            }
        };
        for r in refs {
            match resolve_reference(&r, &files[i], &profile.resolution, &file_set) {
                Resolved::Internal(target) if target == files[i] => {}
                Resolved::Internal(target) => {
                    internal.insert((i, target));
                }
                Resolved::External if include_external => {
                    external.insert((i, r));
                }
                Resolved::External => unresolved.push((files[i].clone(), r)),
            }
        }
    }

    let index: BTreeMap<&str, usize> = files.iter().enumerate().map(|(i, f)| (f.as_str(), i)).collect();
    let ext_names: BTreeSet<&str> = external.iter().map(|(_, r)| r.as_str()).collect();
    let ext_index: BTreeMap<&str, usize> = ext_names.iter().enumerate().map(|(k, &r)| (r, files.len() + k)).collect();
    let mut graph = DirectedGraph::new(files.len() + ext_names.len());
    for (src, target) in &internal {
        graph.add_edge(*src, index[target.as_str()])?;
    }
    for (src, r) in &external {
        graph.add_edge(*src, ext_index[r.as_str()])?;
    }
    let mut labels = files.clone();
    labels.extend(ext_names.iter().map(|r| format!("{EXTERNAL_PREFIX}{r}")));
    Ok(ExtractionReport { graph, labels, external_count: ext_names.len(), unresolved, skipped })
}

fn rel_label(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/")
}
