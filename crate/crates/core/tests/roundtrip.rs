use std::fs;
use std::path::PathBuf;

use ribbon_core::format::{parse_document, to_json, Document, Payload};
use ribbon_core::moves::{random_move_corpus, CorpusBounds};
use ribbon_core::seifert::KnotName;

fn data_files() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
}

#[test]
fn curated_files_round_trip() {
    let files = data_files();
    assert!(files.len() >= 15);
    for p in files {
        let text = fs::read_to_string(&p).unwrap();
        let doc = parse_document(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        let once = to_json(&doc).unwrap();
        let again = parse_document(&once).unwrap();
        assert_eq!(again, doc, "{}", p.display());
        assert_eq!(to_json(&again).unwrap(), once, "{}", p.display());
    }
}

#[test]
fn corpus_round_trips() {
    for (i, t) in random_move_corpus(11, 30, &CorpusBounds::default()).into_iter().enumerate() {
        for b in [&t.middle, &t.child_gt, &t.child_lt] {
            let doc = Document { name: KnotName::new(format!("c{i}"), ""), payload: Payload::SeifertBundle(b.clone()) };
            assert_eq!(parse_document(&to_json(&doc).unwrap()).unwrap(), doc);
        }
        let doc = Document { name: KnotName::new(format!("t{i}"), "triple"), payload: Payload::MoveTriple(t) };
        assert_eq!(parse_document(&to_json(&doc).unwrap()).unwrap(), doc);
    }
}
