//! C corpus indexing and exact function-definition extraction.
//!
//! Extraction is lexical, not a C parse: after stripping comments, string
//! and character literals, and preprocessor lines, a top-level
//! `identifier ( args ) {` sequence opens a definition and brace matching
//! closes it. The extracted text is the exact byte slice of the file lines
//! from the contiguous leading comment block (if any) through the closing
//! brace, so the model sees the code exactly as the file carries it,
//! comments included.
//!
//! Macros are not expanded and function-like macro definitions are not
//! indexed; they are stripped with the rest of the preprocessor noise.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

const CACHE_VERSION: u32 = 1;

/// An exact function definition: `text` is byte-identical to the file slice
/// `[start_line, end_line]` (1-based, inclusive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDef {
    pub name: String,
    pub file: String,
    pub start_line: u32,
    pub end_line: u32,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStats {
    pub files_scanned: usize,
    pub definitions_found: usize,
    pub warnings: Vec<String>,
}

/// Immutable index of every function definition under a corpus root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusIndex {
    root: PathBuf,
    defs: BTreeMap<String, Vec<FunctionDef>>,
    by_file: BTreeMap<String, Vec<(u32, u32, String)>>,
    files: BTreeMap<String, FileMeta>,
    stats: BuildStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct FileMeta {
    size: u64,
    mtime_ms: u128,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus root `{0}` is not a readable directory")]
    BadRoot(PathBuf),
    #[error("no definition of `{0}` in the corpus")]
    NotFound(String),
    #[error("`{name}` is ambiguous; defined in: {}", candidates.join(", "))]
    Ambiguous { name: String, candidates: Vec<String> },
    #[error("file `{0}` is not indexed")]
    FileNotIndexed(String),
    #[error("no definition in `{file}` spans line {line}")]
    NoEnclosing { file: String, line: u32 },
    #[error("cannot write index cache: {0}")]
    CacheIo(#[from] std::io::Error),
}

/// Scan `root` for `.c`/`.h` files and index every top-level function
/// definition. Unreadable or non-UTF-8 files become warnings in the build
/// stats, never a failure. File order is sorted, so the index is
/// deterministic for an unchanged tree.
pub fn build_index(root: &Path) -> Result<CorpusIndex, CorpusError> {
    if !root.is_dir() {
        return Err(CorpusError::BadRoot(root.to_path_buf()));
    }
    let mut index = CorpusIndex {
        root: root.to_path_buf(),
        defs: BTreeMap::new(),
        by_file: BTreeMap::new(),
        files: BTreeMap::new(),
        stats: BuildStats::default(),
    };
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                index.stats.warnings.push(format!("walk error: {e}"));
                continue;
            }
        };
        if !entry.file_type().is_file() || !is_source_file(entry.path()) {
            continue;
        }
        let rel = relative_name(root, entry.path());
        let text = match std::fs::read(entry.path()) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(t) => t,
                Err(_) => {
                    index.stats.warnings.push(format!("{rel}: not UTF-8, skipped"));
                    continue;
                }
            },
            Err(e) => {
                index.stats.warnings.push(format!("{rel}: unreadable ({e}), skipped"));
                continue;
            }
        };
        index.stats.files_scanned += 1;
        index.files.insert(rel.clone(), file_meta(entry.path()));
        for def in scan_source(&rel, &text) {
            index
                .by_file
                .entry(rel.clone())
                .or_default()
                .push((def.start_line, def.end_line, def.name.clone()));
            index.defs.entry(def.name.clone()).or_default().push(def);
            index.stats.definitions_found += 1;
        }
    }
    Ok(index)
}

fn is_source_file(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("c") | Some("h")
    )
}

fn relative_name(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn file_meta(path: &Path) -> FileMeta {
    let meta = std::fs::metadata(path).ok();
    FileMeta {
        size: meta.as_ref().map_or(0, |m| m.len()),
        mtime_ms: meta
            .and_then(|m| m.modified().ok())
            .and_then(|t| t.duration_since(std::time::UNIX_EPOCH).ok())
            .map_or(0, |d| d.as_millis()),
    }
}

impl CorpusIndex {
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    pub fn len(&self) -> usize {
        self.defs.values().map(|v| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.keys().map(|s| s.as_str())
    }

    pub fn definitions(&self, name: &str) -> &[FunctionDef] {
        self.defs.get(name).map_or(&[], |v| v.as_slice())
    }

    /// Return the unique definition of `name`. With multiple definitions,
    /// prefer the one in `hint_file`, then the one whose directory shares
    /// the longest prefix with `hint_file`; ties break by lexicographic
    /// file path. Without a hint, multiple definitions are an error.
    pub fn extract_function(
        &self,
        name: &str,
        hint_file: Option<&str>,
    ) -> Result<&FunctionDef, CorpusError> {
        let candidates = self
            .defs
            .get(name)
            .ok_or_else(|| CorpusError::NotFound(name.to_string()))?;
        if candidates.len() == 1 {
            return Ok(&candidates[0]);
        }
        let Some(hint) = hint_file else {
            return Err(CorpusError::Ambiguous {
                name: name.to_string(),
                candidates: candidates.iter().map(|d| d.file.clone()).collect(),
            });
        };
        if let Some(local) = candidates.iter().find(|d| d.file == hint) {
            return Ok(local);
        }
        let hint_dir: Vec<&str> = dir_components(hint);
        let best = candidates
            .iter()
            .min_by(|a, b| {
                let pa = shared_prefix_len(&dir_components(&a.file), &hint_dir);
                let pb = shared_prefix_len(&dir_components(&b.file), &hint_dir);
                pb.cmp(&pa).then_with(|| a.file.cmp(&b.file))
            })
            .expect("candidates non-empty");
        Ok(best)
    }

    /// The definition whose span contains `line` in `file`.
    pub fn enclosing_function(&self, file: &str, line: u32) -> Result<&FunctionDef, CorpusError> {
        let spans = self
            .by_file
            .get(file)
            .ok_or_else(|| CorpusError::FileNotIndexed(file.to_string()))?;
        for (start, end, name) in spans {
            if *start <= line && line <= *end {
                let def = self
                    .defs
                    .get(name)
                    .and_then(|v| v.iter().find(|d| d.file == file && d.start_line == *start))
                    .expect("by_file entries mirror defs");
                return Ok(def);
            }
        }
        Err(CorpusError::NoEnclosing {
            file: file.to_string(),
            line,
        })
    }

    /// Persist the index as a versioned cache document (spans only; text is
    /// re-sliced from the files on load).
    pub fn save_cache(&self, path: &Path) -> Result<(), CorpusError> {
        let doc = CacheDoc {
            version: CACHE_VERSION,
            root: self.root.to_string_lossy().into_owned(),
            files: self.files.clone(),
            stats: self.stats.clone(),
            defs: self
                .defs
                .values()
                .flatten()
                .map(|d| (d.name.clone(), d.file.clone(), d.start_line, d.end_line))
                .collect(),
        };
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, serde_json::to_string(&doc).expect("cache serializes"))?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CacheDoc {
    version: u32,
    root: String,
    files: BTreeMap<String, FileMeta>,
    stats: BuildStats,
    defs: Vec<(String, String, u32, u32)>,
}

/// Load a cached index if it is still fresh (same file set, sizes, and
/// mtimes), otherwise rebuild and refresh the cache. Returns the index and
/// whether a rebuild happened.
pub fn load_or_build(root: &Path, cache_path: &Path) -> Result<(CorpusIndex, bool), CorpusError> {
    if let Some(index) = try_load_cache(root, cache_path) {
        return Ok((index, false));
    }
    let index = build_index(root)?;
    index.save_cache(cache_path)?;
    Ok((index, true))
}

fn try_load_cache(root: &Path, cache_path: &Path) -> Option<CorpusIndex> {
    let text = std::fs::read_to_string(cache_path).ok()?;
    let doc: CacheDoc = serde_json::from_str(&text).ok()?;
    if doc.version != CACHE_VERSION || Path::new(&doc.root) != root {
        return None;
    }
    // Any size/mtime drift or file-set change invalidates the cache.
    let mut current = BTreeMap::new();
    for entry in WalkDir::new(root).sort_by_file_name().into_iter().flatten() {
        if entry.file_type().is_file() && is_source_file(entry.path()) {
            current.insert(relative_name(root, entry.path()), file_meta(entry.path()));
        }
    }
    if current != doc.files {
        return None;
    }
    let mut index = CorpusIndex {
        root: root.to_path_buf(),
        defs: BTreeMap::new(),
        by_file: BTreeMap::new(),
        files: doc.files,
        stats: doc.stats,
    };
    let mut texts: BTreeMap<&str, String> = BTreeMap::new();
    for (name, file, start_line, end_line) in &doc.defs {
        if !texts.contains_key(file.as_str()) {
            let content = std::fs::read_to_string(root.join(file)).ok()?;
            texts.insert(file, content);
        }
        let content = &texts[file.as_str()];
        let def = FunctionDef {
            name: name.clone(),
            file: file.clone(),
            start_line: *start_line,
            end_line: *end_line,
            text: slice_lines(content, *start_line, *end_line)?.to_string(),
        };
        index
            .by_file
            .entry(file.clone())
            .or_default()
            .push((def.start_line, def.end_line, def.name.clone()));
        index.defs.entry(name.clone()).or_default().push(def);
    }
    Some(index)
}

fn dir_components(file: &str) -> Vec<&str> {
    let mut parts: Vec<&str> = file.split('/').collect();
    parts.pop();
    parts
}

fn shared_prefix_len(a: &[&str], b: &[&str]) -> usize {
    a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count()
}

/// Byte slice of 1-based inclusive lines, excluding the final newline.
pub fn slice_lines(content: &str, start_line: u32, end_line: u32) -> Option<&str> {
    let starts = line_starts(content);
    let start = *starts.get(start_line as usize - 1)?;
    let end = match starts.get(end_line as usize) {
        Some(next) => next - 1,
        None if (end_line as usize) == starts.len() => {
            content.len() - usize::from(content.ends_with('\n'))
        }
        None => return None,
    };
    content.get(start..end)
}

fn line_starts(content: &str) -> Vec<usize> {
    let mut starts = vec![0];
    for (i, b) in content.bytes().enumerate() {
        if b == b'\n' && i + 1 < content.len() {
            starts.push(i + 1);
        }
    }
    starts
}

// ---- lexical scan ----

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Ident(String),
    Punct(u8),
    Other,
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    start: usize,
    line: u32,
}

#[derive(Debug, Clone, Copy)]
struct CommentSpan {
    start: usize,
    end: usize,
    start_line: u32,
    end_line: u32,
}

struct Scan {
    tokens: Vec<Tok>,
    comments: Vec<CommentSpan>,
}

fn lex(content: &str) -> Scan {
    let b = content.as_bytes();
    let mut tokens = Vec::new();
    let mut comments = Vec::new();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut line_has_code = false;
    while i < b.len() {
        let c = b[i];
        match c {
            b'\n' => {
                line += 1;
                line_has_code = false;
                i += 1;
            }
            b' ' | b'\t' | b'\r' => {
                i += 1;
            }
            b'/' if b.get(i + 1) == Some(&b'/') => {
                let (start, start_line) = (i, line);
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
                comments.push(CommentSpan { start, end: i, start_line, end_line: line });
            }
            b'/' if b.get(i + 1) == Some(&b'*') => {
                let (start, start_line) = (i, line);
                i += 2;
                while i < b.len() && !(b[i] == b'*' && b.get(i + 1) == Some(&b'/')) {
                    if b[i] == b'\n' {
                        line += 1;
                    }
                    i += 1;
                }
                i = (i + 2).min(b.len());
                comments.push(CommentSpan { start, end: i, start_line, end_line: line });
            }
            b'"' | b'\'' => {
                line_has_code = true;
                let quote = c;
                let start = i;
                i += 1;
                while i < b.len() {
                    match b[i] {
                        b'\\' => i += 2,
                        b'\n' => {
                            line += 1;
                            i += 1;
                            break; // unterminated literal; resync at newline
                        }
                        q if q == quote => {
                            i += 1;
                            break;
                        }
                        _ => i += 1,
                    }
                }
                tokens.push(Tok { kind: TokKind::Other, start, line });
            }
            b'#' if !line_has_code => {
                // Preprocessor logical line, including continuations.
                while i < b.len() {
                    match b[i] {
                        b'\n' => {
                            line += 1;
                            i += 1;
                            break;
                        }
                        b'\\' if b.get(i + 1) == Some(&b'\n') => {
                            line += 1;
                            i += 2;
                        }
                        b'/' if b.get(i + 1) == Some(&b'*') => {
                            i += 2;
                            while i < b.len() && !(b[i] == b'*' && b.get(i + 1) == Some(&b'/')) {
                                if b[i] == b'\n' {
                                    line += 1;
                                }
                                i += 1;
                            }
                            i = (i + 2).min(b.len());
                        }
                        b'/' if b.get(i + 1) == Some(&b'/') => {
                            while i < b.len() && b[i] != b'\n' {
                                i += 1;
                            }
                        }
                        _ => i += 1,
                    }
                }
                line_has_code = false;
            }
            _ if c.is_ascii_alphabetic() || c == b'_' => {
                line_has_code = true;
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                tokens.push(Tok {
                    kind: TokKind::Ident(content[start..i].to_string()),
                    start,
                    line,
                });
            }
            _ if c.is_ascii_digit() => {
                line_has_code = true;
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'.') {
                    i += 1;
                }
                tokens.push(Tok { kind: TokKind::Other, start, line });
            }
            _ => {
                line_has_code = true;
                tokens.push(Tok { kind: TokKind::Punct(c), start: i, line });
                i += 1;
            }
        }
    }
    Scan { tokens, comments }
}

const NON_FUNCTION_KEYWORDS: &[&str] = &[
    "if", "else", "while", "for", "do", "switch", "case", "default", "return", "sizeof", "goto",
    "break", "continue", "typedef", "struct", "union", "enum",
];

fn is_punct(tok: Option<&Tok>, c: u8) -> bool {
    matches!(tok, Some(Tok { kind: TokKind::Punct(p), .. }) if *p == c)
}

fn match_group(tokens: &[Tok], open_idx: usize, open: u8, close: u8) -> Option<usize> {
    let mut depth = 0usize;
    for (j, tok) in tokens.iter().enumerate().skip(open_idx) {
        match &tok.kind {
            TokKind::Punct(p) if *p == open => depth += 1,
            TokKind::Punct(p) if *p == close => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(j);
                }
            }
            _ => {}
        }
    }
    None
}

/// Scan one file's text for top-level function definitions.
fn scan_source(rel_file: &str, content: &str) -> Vec<FunctionDef> {
    let scan = lex(content);
    let tokens = &scan.tokens;
    let mut defs = Vec::new();
    let mut brace_depth = 0usize;
    let mut i = 0;
    while i < tokens.len() {
        match &tokens[i].kind {
            TokKind::Punct(b'{') => {
                brace_depth += 1;
                i += 1;
            }
            TokKind::Punct(b'}') => {
                brace_depth = brace_depth.saturating_sub(1);
                i += 1;
            }
            TokKind::Ident(name)
                if brace_depth == 0
                    && !NON_FUNCTION_KEYWORDS.contains(&name.as_str())
                    && is_punct(tokens.get(i + 1), b'(') =>
            {
                if let Some(close) = match_group(tokens, i + 1, b'(', b')') {
                    if is_punct(tokens.get(close + 1), b'{') {
                        if let Some(end) = match_group(tokens, close + 1, b'{', b'}') {
                            let sig = signature_start(tokens, &scan.comments, i);
                            let start_line =
                                leading_comment_start(&scan.comments, content, tokens[sig].line);
                            let end_line = tokens[end].line;
                            if let Some(text) = slice_lines(content, start_line, end_line) {
                                defs.push(FunctionDef {
                                    name: name.clone(),
                                    file: rel_file.to_string(),
                                    start_line,
                                    end_line,
                                    text: text.to_string(),
                                });
                            }
                            i = end + 1;
                            continue;
                        }
                    }
                }
                i += 1;
            }
            _ => {
                i += 1;
            }
        }
    }
    defs
}

/// Walk back from the name token over the declaration head (type names,
/// qualifiers, `*`), stopping at any other punctuation or at a comment gap.
fn signature_start(tokens: &[Tok], comments: &[CommentSpan], name_idx: usize) -> usize {
    let mut s = name_idx;
    while s > 0 {
        let prev = &tokens[s - 1];
        if !matches!(&prev.kind, TokKind::Ident(_) | TokKind::Punct(b'*')) {
            break;
        }
        let prev_end = match &prev.kind {
            TokKind::Ident(id) => prev.start + id.len(),
            _ => prev.start + 1,
        };
        let comment_between = comments
            .iter()
            .any(|c| c.start >= prev_end && c.start < tokens[s].start);
        if comment_between {
            break;
        }
        s -= 1;
    }
    s
}

/// First line of the contiguous leading comment block above `sig_line`, or
/// `sig_line` itself. A qualifying comment ends exactly one line above the
/// block scanned so far, starts its own line, and has nothing but
/// whitespace after it on its final line.
fn leading_comment_start(comments: &[CommentSpan], content: &str, sig_line: u32) -> u32 {
    let starts = line_starts(content);
    let line_start = |line: u32| starts.get(line as usize - 1).copied();
    let mut block_start = sig_line;
    loop {
        if block_start == 1 {
            return block_start;
        }
        let target = block_start - 1;
        let Some(c) = comments.iter().rev().find(|c| c.end_line == target) else {
            return block_start;
        };
        // Comment must start its line...
        let Some(cs) = line_start(c.start_line) else {
            return block_start;
        };
        if !content[cs..c.start].trim().is_empty() {
            return block_start;
        }
        // ...and own the rest of its final line.
        let tail_end = line_start(target + 1).map_or(content.len(), |s| s - 1);
        if c.end <= tail_end && !content[c.end..tail_end].trim().is_empty() {
            return block_start;
        }
        block_start = c.start_line;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;
    use tempfile::TempDir;

    fn write_corpus(files: &[(&str, &str)]) -> TempDir {
        let dir = TempDir::new().unwrap();
        for (name, content) in files {
            let path = dir.path().join(name);
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(path, content).unwrap();
        }
        dir
    }

    const FUNC_C: &str = "extern int some_condi;\n\nint func(int* a){\n\tif(some_condi)\n\t\treturn -1;\n\t*a = 42;\n\treturn 0;\n}\n";

    #[test]
    fn indexes_simple_function() {
        let dir = write_corpus(&[("func.c", FUNC_C)]);
        let index = build_index(dir.path()).unwrap();
        assert_eq!(index.stats().definitions_found, 1);
        let def = index.extract_function("func", None).unwrap();
        assert!(def.text.starts_with("int func(int* a){"));
        assert_eq!(def.start_line, 3);
        assert_eq!(def.end_line, 8);
    }

    #[test]
    fn empty_directory_indexes_nothing() {
        let dir = TempDir::new().unwrap();
        let index = build_index(dir.path()).unwrap();
        assert!(index.is_empty());
        assert_eq!(index.stats().files_scanned, 0);
    }

    #[test]
    fn missing_name_is_not_found() {
        let dir = write_corpus(&[("func.c", FUNC_C)]);
        let index = build_index(dir.path()).unwrap();
        assert!(matches!(
            index.extract_function("va_start", None),
            Err(CorpusError::NotFound(_))
        ));
    }

    #[test]
    fn leading_comment_block_included() {
        let src = "/* header comment */\n\n/* what func does\n * in detail\n */\n// extra note\nint documented(void)\n{\n\treturn 1;\n}\n";
        let dir = write_corpus(&[("doc.c", src)]);
        let index = build_index(dir.path()).unwrap();
        let def = index.extract_function("documented", None).unwrap();
        assert_eq!(def.start_line, 3, "blank line separates the file header");
        assert!(def.text.starts_with("/* what func does"));
        assert!(def.text.contains("// extra note"));
        assert!(def.text.ends_with('}'));
    }

    #[test]
    fn blank_line_breaks_comment_chain() {
        let src = "/* far comment */\n\nint f(void)\n{\n\treturn 0;\n}\n";
        let dir = write_corpus(&[("a.c", src)]);
        let index = build_index(dir.path()).unwrap();
        let def = index.extract_function("f", None).unwrap();
        assert_eq!(def.start_line, 3);
        assert!(def.text.starts_with("int f(void)"));
    }

    #[test]
    fn strings_braces_and_preprocessor_ignored() {
        let src = concat!(
            "#define WEIRD(x) { x }\n",
            "#if defined(FOO) && \\\n",
            "    defined(BAR)\n",
            "int not_really(void) { return 0; }\n",
            "#endif\n",
            "static const char *msg = \"brace { in } string\";\n",
            "int real(const char *s)\n",
            "{\n",
            "\tchar c = '{';\n",
            "\tif (s) {\n",
            "\t\treturn c == '}';\n",
            "\t}\n",
            "\treturn 0; /* } in comment */\n",
            "}\n",
        );
        let dir = write_corpus(&[("tricky.c", src)]);
        let index = build_index(dir.path()).unwrap();
        let names: Vec<&str> = index.names().collect();
        assert_eq!(names, ["not_really", "real"]);
        let def = index.extract_function("real", None).unwrap();
        assert!(def.text.ends_with("/* } in comment */\n}"));
        // Exact slice fidelity against a fresh read.
        let content = fs::read_to_string(dir.path().join("tricky.c")).unwrap();
        assert_eq!(
            slice_lines(&content, def.start_line, def.end_line).unwrap(),
            def.text
        );
    }

    #[test]
    fn hint_file_disambiguates() {
        let a = "int init(void) { return 1; }\n";
        let b = "int init(void) { return 2; }\n";
        let dir = write_corpus(&[("a.c", a), ("b.c", b)]);
        let index = build_index(dir.path()).unwrap();
        let def = index.extract_function("init", Some("a.c")).unwrap();
        assert_eq!(def.file, "a.c");
        assert!(matches!(
            index.extract_function("init", None),
            Err(CorpusError::Ambiguous { .. })
        ));
    }

    #[test]
    fn shared_directory_prefix_breaks_ties() {
        let files = [
            ("drivers/net/a.c", "int probe(void) { return 1; }\n"),
            ("drivers/usb/b.c", "int probe(void) { return 2; }\n"),
        ];
        let dir = write_corpus(&files);
        let index = build_index(dir.path()).unwrap();
        let def = index
            .extract_function("probe", Some("drivers/usb/main.c"))
            .unwrap();
        assert_eq!(def.file, "drivers/usb/b.c");
        // Equal prefixes fall back to lexicographic path order.
        let def = index.extract_function("probe", Some("sound/x.c")).unwrap();
        assert_eq!(def.file, "drivers/net/a.c");
    }

    #[test]
    fn enclosing_function_by_line() {
        let src = "int first(void)\n{\n\treturn 1;\n}\n\n/* doc */\nint second(void)\n{\n\treturn 2;\n}\n";
        let dir = write_corpus(&[("two.c", src)]);
        let index = build_index(dir.path()).unwrap();
        assert_eq!(index.enclosing_function("two.c", 3).unwrap().name, "first");
        assert_eq!(index.enclosing_function("two.c", 9).unwrap().name, "second");
        // Leading comment lines belong to the definition's span.
        assert_eq!(index.enclosing_function("two.c", 6).unwrap().name, "second");
        // Line 5 is the blank line between the two.
        assert!(matches!(
            index.enclosing_function("two.c", 5),
            Err(CorpusError::NoEnclosing { line: 5, .. })
        ));
        assert!(matches!(
            index.enclosing_function("two.c", 999),
            Err(CorpusError::NoEnclosing { .. })
        ));
        assert!(matches!(
            index.enclosing_function("absent.c", 1),
            Err(CorpusError::FileNotIndexed(_))
        ));
    }

    #[test]
    fn comment_between_functions_without_attachment() {
        let src = "int a(void) { return 0; }\n/* floating note */\n\nint b(void) { return 1; }\n";
        let dir = write_corpus(&[("gap.c", src)]);
        let index = build_index(dir.path()).unwrap();
        // The note is followed by a blank line, so it attaches to nothing.
        assert!(matches!(
            index.enclosing_function("gap.c", 2),
            Err(CorpusError::NoEnclosing { .. })
        ));
        assert_eq!(index.enclosing_function("gap.c", 4).unwrap().name, "b");
    }

    #[test]
    fn rebuild_is_idempotent() {
        let dir = write_corpus(&[("func.c", FUNC_C), ("doc.c", "int g(void) { return 0; }\n")]);
        let a = build_index(dir.path()).unwrap();
        let b = build_index(dir.path()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn declarations_and_calls_not_indexed() {
        let src = concat!(
            "int forward_decl(int x);\n",
            "MODULE_LICENSE(\"GPL\");\n",
            "static int value = 0;\n",
            "struct ops table = { .field = 1 };\n",
            "int actual(int x)\n{\n\treturn x;\n}\n",
        );
        let dir = write_corpus(&[("decls.c", src)]);
        let index = build_index(dir.path()).unwrap();
        let names: Vec<&str> = index.names().collect();
        assert_eq!(names, ["actual"]);
    }

    #[test]
    fn cache_round_trip_and_staleness() {
        let dir = write_corpus(&[("func.c", FUNC_C)]);
        let cache = dir.path().join("index-cache.json");
        let (built, rebuilt) = load_or_build(dir.path(), &cache).unwrap();
        assert!(rebuilt);
        let (loaded, rebuilt) = load_or_build(dir.path(), &cache).unwrap();
        assert!(!rebuilt, "fresh cache should be reused");
        assert_eq!(built, loaded);

        // Touching a file with different content invalidates the cache.
        std::thread::sleep(std::time::Duration::from_millis(5));
        fs::write(dir.path().join("func.c"), format!("{FUNC_C}\nint extra(void) {{ return 0; }}\n")).unwrap();
        let (after, rebuilt) = load_or_build(dir.path(), &cache).unwrap();
        assert!(rebuilt);
        assert_eq!(after.definitions("extra").len(), 1);
    }

    #[test]
    fn header_files_scanned() {
        let src = "static inline int helper(int v)\n{\n\treturn v + 1;\n}\n";
        let dir = write_corpus(&[("util.h", src), ("skip.txt", "int nope(void) { return 0; }\n")]);
        let index = build_index(dir.path()).unwrap();
        let names: Vec<&str> = index.names().collect();
        assert_eq!(names, ["helper"]);
    }

    #[test]
    fn pointer_return_and_multiline_signature() {
        let src = "static struct page **\nalloc_table(unsigned int count)\n{\n\treturn 0;\n}\n";
        let dir = write_corpus(&[("ml.c", src)]);
        let index = build_index(dir.path()).unwrap();
        let def = index.extract_function("alloc_table", None).unwrap();
        assert_eq!(def.start_line, 1);
        assert!(def.text.starts_with("static struct page **"));
    }
}
