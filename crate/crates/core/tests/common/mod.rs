#![allow(dead_code)]

use std::path::{Path, PathBuf};

use dyntest_core::bytecode::CompiledModule;
use dyntest_core::testcase::{parse_suite, TestSuite};

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn corpus_dir() -> PathBuf {
    workspace_root().join("corpus")
}

/// Every corpus module as (stem, compiled module), sorted by path.
pub fn corpus_modules() -> Vec<(String, CompiledModule)> {
    let mut paths = Vec::new();
    for project in std::fs::read_dir(corpus_dir()).unwrap() {
        let project = project.unwrap().path();
        if !project.is_dir() {
            continue;
        }
        for entry in std::fs::read_dir(&project).unwrap() {
            let p = entry.unwrap().path();
            if p.extension().is_some_and(|e| e == "dyn") {
                paths.push(p);
            }
        }
    }
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let stem = p.file_stem().unwrap().to_string_lossy().into_owned();
            let src = std::fs::read_to_string(&p).unwrap();
            let cm = dyntest_core::load_module(&stem, &src).unwrap();
            (stem, cm)
        })
        .collect()
}

pub fn module(stem: &str) -> CompiledModule {
    corpus_modules()
        .into_iter()
        .find(|(s, _)| s == stem)
        .unwrap_or_else(|| panic!("no corpus module {stem}"))
        .1
}

/// The hand-written suite for a corpus module.
pub fn fixture_suite(stem: &str, cm: &CompiledModule) -> TestSuite {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/suites")
        .join(format!("{stem}.dyn"));
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_suite(&src, &cm.pool_for(true)).unwrap()
}

/// Modules where no suite reaches every goal.
pub const UNREACHABLE: &[&str] = &["abstract_base", "dead_branch"];

pub mod oracle;
