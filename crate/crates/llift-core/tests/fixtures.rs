//! Conformance checks for the shipped fixture corpus: the lookup examples
//! the rest of the pipeline depends on.

use std::path::{Path, PathBuf};

use llift_core::corpus::{build_index, CorpusError};

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/corpus")
}

#[test]
fn enclosing_function_at_line_504() {
    let index = build_index(&corpus_dir()).unwrap();
    let def = index
        .enclosing_function("drivers/media/dvb-frontends/stv0910.c", 504)
        .unwrap();
    assert_eq!(def.name, "get_signal_parameters");
    assert!(def.start_line <= 504 && 504 <= def.end_line);

    assert!(matches!(
        index.enclosing_function("drivers/media/dvb-frontends/stv0910.c", 100_000),
        Err(CorpusError::NoEnclosing { .. })
    ));
}

#[test]
fn figure_initializer_extracts_verbatim() {
    let index = build_index(&corpus_dir()).unwrap();
    let def = index.extract_function("func", None).unwrap();
    assert!(def.text.starts_with("int func(int* a){"));
}

#[test]
fn scanf_family_resolvable_builtins_not() {
    let index = build_index(&corpus_dir()).unwrap();
    let def = index.extract_function("sscanf", None).unwrap();
    assert_eq!(def.file, "lib/vsprintf.c");
    assert!(def.text.starts_with("/**"), "kernel-doc comment travels with the code");
    // Compiler built-ins have no definition anywhere in the tree.
    assert!(matches!(
        index.extract_function("va_start", None),
        Err(CorpusError::NotFound(_))
    ));
}

/// Brace balance outside strings, chars, and comments, for every extracted
/// definition in the shipped corpus.
#[test]
fn every_definition_brace_balanced() {
    let index = build_index(&corpus_dir()).unwrap();
    let mut checked = 0;
    for name in index.names().map(str::to_string).collect::<Vec<_>>() {
        for def in index.definitions(&name) {
            assert!(balanced(&def.text), "unbalanced braces in {name} ({})", def.file);
            checked += 1;
        }
    }
    assert!(checked >= 16, "shipped corpus should stay rich; found {checked}");
}

fn balanced(text: &str) -> bool {
    let b = text.as_bytes();
    let mut depth: i64 = 0;
    let mut i = 0;
    while i < b.len() {
        match b[i] {
            b'/' if b.get(i + 1) == Some(&b'/') => {
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
            }
            b'/' if b.get(i + 1) == Some(&b'*') => {
                i += 2;
                while i < b.len() && !(b[i] == b'*' && b.get(i + 1) == Some(&b'/')) {
                    i += 1;
                }
                i += 2;
            }
            q @ (b'"' | b'\'') => {
                i += 1;
                while i < b.len() && b[i] != q {
                    if b[i] == b'\\' {
                        i += 1;
                    }
                    i += 1;
                }
                i += 1;
            }
            b'{' => {
                depth += 1;
                i += 1;
            }
            b'}' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
                i += 1;
            }
            _ => i += 1,
        }
    }
    depth == 0
}
