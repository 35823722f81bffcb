#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const PAGES: &[(&str, &str, &str)] = &[
    ("http://www.travel.example/paris", "paris.html", "<html><body><p>Cheap Hotels in Paris. The Map of Paris is free.</p></body></html>"),
    ("http://maps.example/tunis", "tunis.txt", "Hotels in Tunis are near the Map of Tunis.\n"),
    ("http://www.travel.example/cairo", "cairo.htm", "<p>Book Hotels in Cairo &amp; see the Map of Tunis.</p>"),
];

/// Mock fixture directory answering "Paris" and "Tunis" with the three pages.
pub fn mock_client(dir: &Path) -> PathBuf {
    let root = dir.join("client");
    fs::create_dir_all(&root).unwrap();
    let mut queries = String::from("query\turi\tfile\n");
    queries.push_str(&format!("Paris\t{}\t{}\n", PAGES[0].0, PAGES[0].1));
    queries.push_str(&format!("Paris\t{}\t{}\n", PAGES[2].0, PAGES[2].1));
    queries.push_str(&format!("Tunis\t{}\t{}\n", PAGES[1].0, PAGES[1].1));
    queries.push_str(&format!("Tunis\t{}\t{}\n", PAGES[0].0, PAGES[0].1));
    fs::write(root.join("queries.tsv"), queries).unwrap();
    for (_, file, body) in PAGES {
        fs::write(root.join(file), body).unwrap();
    }
    root
}

pub fn examples_file(dir: &Path, rows: &[(&str, &str)]) -> PathBuf {
    let path = dir.join("examples.tsv");
    let mut text = String::from("surface\tclass\n");
    for (s, c) in rows {
        text.push_str(&format!("{s}\t{c}\n"));
    }
    fs::write(&path, text).unwrap();
    path
}

pub fn capitals(dir: &Path) -> PathBuf {
    examples_file(dir, &[("Paris", "capital"), ("Tunis", "capital")])
}

/// Writes a corpus directory by hand, bypassing the library writer.
pub fn write_corpus(dir: &Path, class: &str, docs: &[(&str, &str, &str)]) -> PathBuf {
    fs::create_dir_all(dir.join("docs")).unwrap();
    let mut manifest = String::from("id\tsource\turi\tkind\tfile\n");
    for (id, uri, text) in docs {
        let host = uri.split("//").nth(1).unwrap().split('/').next().unwrap();
        manifest.push_str(&format!("{id}\t{host}\t{uri}\tplain\tdocs/{id}.txt\n"));
        fs::write(dir.join(format!("docs/{id}.txt")), text).unwrap();
    }
    fs::write(dir.join("manifest.tsv"), manifest).unwrap();
    if !class.is_empty() {
        fs::write(dir.join("class.txt"), format!("{class}\n")).unwrap();
    }
    dir.to_path_buf()
}

pub fn nerctx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nerctx")).args(args).output().expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
