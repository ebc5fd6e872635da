//! The `.scx` text format.
//!
//! UTF-8, one maximal simplex per line as whitespace-separated vertex ids.
//! Lines starting with `#` are comments and blank lines are ignored. An
//! optional directive `root <id>` names the root vertex.
//!
//! The writer emits an optional `root` line followed by the maximal
//! simplices in lexicographic order, one per line, ids separated by single
//! spaces. Writing a parsed document and parsing it again is lossless, and
//! writing is idempotent.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::complex::{RootedComplex, Simplex, SimplicialComplex, Vertex};
use crate::error::{Error, Result};

/// A parsed `.scx` file, keeping simplices in file order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScxDocument {
    pub simplices: Vec<Simplex>,
    pub root: Option<Vertex>,
}

/// Structural findings about a document; `is_valid` is what `validate`
/// reports to the shell.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub n_vertices: usize,
    pub f_vector: Vec<usize>,
    pub components: usize,
    pub duplicate_lines: Vec<usize>,
    /// Lines listing a simplex that is a proper face of another listed one.
    pub non_maximal_lines: Vec<usize>,
    pub root_missing: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.duplicate_lines.is_empty() && self.non_maximal_lines.is_empty() && !self.root_missing
    }
}

impl ScxDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut simplices = Vec::new();
        let mut root = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |message: String| Error::Parse { line: line_no, message };
            if let Some(rest) = line.strip_prefix("root") {
                if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                    if root.is_some() {
                        return Err(perr("second root directive".into()));
                    }
                    let id = rest
                        .trim()
                        .parse::<Vertex>()
                        .map_err(|e| perr(format!("bad root id: {e}")))?;
                    root = Some(id);
                    continue;
                }
            }
            let ids = line
                .split_whitespace()
                .map(|t| t.parse::<Vertex>().map_err(|e| perr(format!("bad vertex id {t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let s = Simplex::new(ids).map_err(|e| perr(e.to_string()))?;
            simplices.push(s);
        }
        Ok(ScxDocument { simplices, root })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn from_complex(k: &SimplicialComplex, root: Option<Vertex>) -> Self {
        ScxDocument {
            simplices: k.maximal_simplices(),
            root,
        }
    }

    pub fn complex(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::closure(self.simplices.iter().map(|s| s.vertices().to_vec()))
    }

    /// The complex rooted at the file's `root` directive, or at `fallback`.
    pub fn rooted(&self, fallback: Option<Vertex>) -> Result<RootedComplex> {
        let root = fallback
            .or(self.root)
            .ok_or_else(|| Error::param("no root given and no `root` directive in file"))?;
        RootedComplex::new(self.complex()?, root)
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        let k = self.complex()?;
        let mut report = ValidationReport {
            n_vertices: k.n_vertices(),
            f_vector: (0..=k.dim().map_or(0, |d| d + 1)).map(|p| k.count(p)).take_while(|&c| c > 0).collect(),
            components: k.components().len(),
            ..Default::default()
        };
        let mut seen = HashSet::new();
        let maximal: HashSet<Simplex> = k.maximal_simplices().into_iter().collect();
        for (i, s) in self.simplices.iter().enumerate() {
            if !seen.insert(s.clone()) {
                report.duplicate_lines.push(i);
            } else if !maximal.contains(s) {
                report.non_maximal_lines.push(i);
            }
        }
        report.root_missing = self.root.is_some_and(|r| !k.has_vertex(r));
        Ok(report)
    }

    /// Serialises in the canonical layout described in the module docs.
    pub fn write(&self) -> String {
        let mut out = String::new();
        if let Some(r) = self.root {
            writeln!(out, "root {r}").unwrap();
        }
        for s in &self.simplices {
            let line: Vec<String> = s.vertices().iter().map(ToString::to_string).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }
}

/// Writes a complex (optionally rooted) as `.scx` text.
pub fn to_scx(k: &SimplicialComplex, root: Option<Vertex>) -> String {
    ScxDocument::from_complex(k, root).write()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_root() {
        let doc = ScxDocument::parse("# triangle\nroot 2\n0 1 2\n\n 3   2 \n").unwrap();
        assert_eq!(doc.root, Some(2));
        assert_eq!(doc.simplices.len(), 2);
        let k = doc.complex().unwrap();
        assert_eq!((k.count(0), k.count(1), k.count(2)), (4, 4, 1));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(ScxDocument::parse("0 1\n0 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(ScxDocument::parse("0 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ScxDocument::parse("root\n"), Err(Error::Parse { .. })));
        assert!(matches!(ScxDocument::parse("-1 2\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let text = "root 4\n4 1 0\n# c\n1 7\n0 4\n9\n";
        let doc = ScxDocument::parse(text).unwrap();
        let canonical = ScxDocument::from_complex(&doc.complex().unwrap(), doc.root).write();
        assert_eq!(canonical, "root 4\n0 1 4\n1 7\n9\n");
        let again = ScxDocument::parse(&canonical).unwrap();
        assert_eq!(again.write(), canonical);
        assert_eq!(again.complex().unwrap(), doc.complex().unwrap());
    }

    #[test]
    fn validation_flags_redundant_lines() {
        let doc = ScxDocument::parse("root 9\n0 1 2\n0 1\n0 1 2\n").unwrap();
        let rep = doc.validate().unwrap();
        assert_eq!(rep.non_maximal_lines, vec![1]);
        assert_eq!(rep.duplicate_lines, vec![2]);
        assert!(rep.root_missing);
        assert!(!rep.is_valid());
        let ok = ScxDocument::parse("0 1 2\n3\n").unwrap().validate().unwrap();
        assert!(ok.is_valid());
        assert_eq!(ok.components, 2);
        assert_eq!(ok.f_vector, vec![4, 3, 1]);
    }
}
