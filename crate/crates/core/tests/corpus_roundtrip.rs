use proptest::prelude::*;
use tritask::corpus::{load_dataset, save_dataset, Corpus, Instance, LabelTriple};

fn instance() -> impl Strategy<Value = Row> {
    (
        "[a-zà-ü][a-zà-ü0-9 ,.!?😀\"']{0,30}[a-z]",
        prop::option::of((0..3usize, 0..2usize, 0..2usize)),
    )
}

type Row = (String, Option<(usize, usize, usize)>);

fn build(rows: Vec<Row>, labeled: bool) -> Corpus {
    let instances = rows
        .into_iter()
        .enumerate()
        .map(|(i, (text, l))| Instance {
            id: format!("c{i}"),
            text,
            labels: if labeled {
                let (a, g, c) = l.unwrap_or((0, 0, 0));
                Some(LabelTriple::from_indices(a, g, c))
            } else {
                None
            },
        })
        .collect();
    Corpus::new("p", instances).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_then_load_is_identity(rows in prop::collection::vec(instance(), 1..25), labeled: bool, csv: bool) {
        let corpus = build(rows, labeled);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(if csv { "c.csv" } else { "c.tsv" });
        save_dataset(&corpus, &path).unwrap();
        let loaded = load_dataset(&path, labeled).unwrap();
        prop_assert_eq!(loaded.rows, corpus.len());
        prop_assert_eq!(loaded.report.dropped, 0);
        prop_assert_eq!(loaded.corpus.instances(), corpus.instances());
    }
}

#[test]
fn retained_plus_dropped_is_every_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mixed.tsv");
    std::fs::write(
        &path,
        "id\ttext\taggression\tgender\tcommunal\n\
         1\tfine\tNAG\tNGEN\tNCOM\n\
         2\tNaN\tNAG\tNGEN\tNCOM\n\
         3\t   \tOAG\tGEN\tCOM\n\
         1\tdup\tNAG\tNGEN\tNCOM\n\
         4\tbad label\tXAG\tNGEN\tNCOM\n\
         5\tkept\tCAG\tGEN\tCOM\n",
    )
    .unwrap();
    let loaded = load_dataset(&path, true).unwrap();
    assert_eq!(loaded.rows, 6);
    assert_eq!(loaded.corpus.len(), 2);
    assert_eq!(loaded.corpus.len() + loaded.report.dropped, loaded.rows);
}
