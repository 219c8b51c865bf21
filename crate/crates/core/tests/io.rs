use gaitnl_core::series::*;
use gaitnl_core::Error;

fn sample_dataset() -> Dataset {
    Dataset::new(
        "mem.csv",
        Format::Csv,
        vec![
            Column { name: "hip angle".into(), values: ColumnValues::Numeric(vec![0.1, -2.5e-7, f64::NAN, 1e300]) },
            Column { name: "label".into(), values: ColumnValues::Text(vec!["a".into(), "b, c".into(), "".into(), "d".into()]) },
            Column { name: "knee".into(), values: ColumnValues::Numeric(vec![1.0, 2.0, 3.0, 0.30000000000000004]) },
        ],
    )
    .unwrap()
}

fn same_values(a: &Dataset, b: &Dataset) {
    assert_eq!(a.columns().len(), b.columns().len());
    for (x, y) in a.columns().iter().zip(b.columns()) {
        assert_eq!(x.name, y.name);
        match (&x.values, &y.values) {
            (ColumnValues::Numeric(p), ColumnValues::Numeric(q)) => {
                assert_eq!(p.len(), q.len());
                for (u, v) in p.iter().zip(q) {
                    assert!(u.to_bits() == v.to_bits() || (u.is_nan() && v.is_nan()));
                }
            }
            (p, q) => assert_eq!(p, q),
        }
    }
}

#[test]
fn csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("walk.csv");
    let ds = sample_dataset();
    write_csv(&ds, &path).unwrap();
    let back = load_dataset(&path).unwrap();
    assert_eq!(back.format, Format::Csv);
    assert_eq!(back.label(), "walk");
    same_values(&ds, &back);
}

#[test]
fn parquet_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("walk.parquet");
    let ds = sample_dataset();
    write_parquet(&ds, &path).unwrap();
    let back = load_dataset(&path).unwrap();
    assert_eq!(back.format, Format::Parquet);
    same_values(&ds, &back);
    // format sniffing ignores the extension
    let odd = dir.path().join("walk.bin");
    std::fs::copy(&path, &odd).unwrap();
    assert_eq!(load_dataset(&odd).unwrap().format, Format::Parquet);
}

#[test]
fn unreadable_inputs() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_dataset(dir.path().join("missing.csv")), Err(Error::UnreadableFile { .. })));
    let ragged = dir.path().join("ragged.csv");
    std::fs::write(&ragged, "a,b\n1,2\n3\n").unwrap();
    assert!(matches!(load_dataset(&ragged), Err(Error::UnreadableFile { .. })));
    let binary = dir.path().join("blob.dat");
    std::fs::write(&binary, [0xff, 0xfe, 0x00, 0x81]).unwrap();
    assert!(matches!(load_dataset(&binary), Err(Error::UnknownFormat(_))));
}

#[test]
fn attribute_lists() {
    let a = AttributeList::parse("# gait columns\nhip angle\n\n  knee \n").unwrap();
    assert_eq!(a.names(), ["hip angle", "knee"]);
    assert_eq!(AttributeList::parse("# nothing\n\n"), Err(Error::EmptyAttributeList));
    assert_eq!(AttributeList::parse("a\nb\na\n"), Err(Error::DuplicateAttribute("a".into())));
}

#[test]
fn column_selection_and_nan_policy() {
    let ds = Dataset::new(
        "x.csv",
        Format::Csv,
        vec![
            Column { name: "edge".into(), values: ColumnValues::Numeric(vec![f64::NAN, 1.0, 2.0, f64::NAN]) },
            Column { name: "mid".into(), values: ColumnValues::Numeric(vec![1.0, f64::NAN, 2.0, 3.0]) },
            Column { name: "txt".into(), values: ColumnValues::Text(vec!["a".into(); 4]) },
        ],
    )
    .unwrap();
    let attrs = AttributeList::parse("edge\nmid\ntxt\nnope").unwrap();
    let strict = select_columns(&ds, &attrs, NanPolicy::Reject);
    assert!(matches!(strict[0], Err(Error::NonNumericColumn(_))));
    assert!(matches!(strict[2], Err(Error::NonNumericColumn(_))));
    assert!(matches!(strict[3], Err(Error::MissingColumn(_))));
    let trimmed = select_columns(&ds, &attrs, NanPolicy::TrimEdges);
    assert_eq!(trimmed[0].as_ref().unwrap().samples(), [1.0, 2.0]);
    assert!(matches!(trimmed[1], Err(Error::NonNumericColumn(_))));
}
