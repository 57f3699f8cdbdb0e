use thzlink::channel::{BerTable, Modulation, TableModel};

#[test]
fn default_table_shape_and_anchor() {
    let t = TableModel::default().generate().unwrap();
    assert_eq!(t.len(), 40);
    assert_eq!(t.distances()[0], 0.5);
    assert_eq!(t.distances()[39], 20.0);
    let anchor = t.lookup_pe(20.0, Modulation::Bpsk).unwrap();
    assert!((anchor - 0.0579).abs() <= 0.05 * 0.0579, "anchor {anchor}");
    for m in Modulation::ALL {
        for i in 1..t.len() {
            assert!(t.ber_at(i, m) >= t.ber_at(i - 1, m), "{m} at {}", t.distances()[i]);
        }
    }
}

#[test]
fn csv_export_has_160_rows_and_reads_back() {
    let t = TableModel::default().generate().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    t.save(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("distance_m,modulation,ber"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 160);

    // (10.0 m, 16QAM) straight from the exported text.
    let row = rows
        .iter()
        .find(|r| r.starts_with("10,16QAM,") || r.starts_with("10.0,16QAM,"))
        .expect("10 m 16QAM row");
    let exported: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    let back = BerTable::load(&path).unwrap();
    assert_eq!(back.lookup_pe(10.0, Modulation::Qam16).unwrap(), exported);
    assert_eq!(back, t);
}

#[test]
fn out_of_range_and_missing_file() {
    let t = TableModel::default().generate().unwrap();
    assert!(t.lookup_pe(25.0, Modulation::Bpsk).is_err());
    assert!(t.lookup_pe(0.1, Modulation::Bpsk).is_err());
    let err = BerTable::load(std::path::Path::new("/nonexistent/ber.csv")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/ber.csv"));
}
