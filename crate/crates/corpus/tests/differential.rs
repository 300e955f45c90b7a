use cloudsift_corpus::fixtures::{check_plist, check_sqlite, plist_tree, sqlite_fixture};

#[test]
fn sqlite_reader_matches_stock_sqlite() {
    let mut failures = Vec::new();
    let mut pages = std::collections::BTreeSet::new();
    let mut rows = 0;
    for seed in 0..120 {
        let f = sqlite_fixture(seed).unwrap();
        pages.insert(f.page_size);
        match check_sqlite(&f) {
            Ok(n) => rows += n,
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
    assert_eq!(pages.len(), 4);
    assert!(rows > 5000, "only {rows} rows compared");
}

#[test]
fn plist_reader_matches_reference_writer() {
    let mut failures = Vec::new();
    for seed in 0..150 {
        for xml in [true, false] {
            if let Err(e) = check_plist(&plist_tree(seed, false), xml) {
                failures.push(format!("seed {seed}: {e}"));
            }
        }
        if let Err(e) = check_plist(&plist_tree(seed, true), false) {
            failures.push(format!("seed {seed} with uids: {e}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
