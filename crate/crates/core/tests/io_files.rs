use std::io::Cursor;

use polar_gft::filters::{design_circle_filter, design_psd_filter, FilterKind, PolynomialFilter};
use polar_gft::graph::{random_dense, random_signal};
use polar_gft::io::{
    load_graph, load_matrix, load_signal, read_basis, read_edge_list, read_json, save_matrix, save_signal,
    write_basis, write_json,
};
use polar_gft::spectral::{build_gft, eig_orthogonal, Measure};
use polar_gft::Error;

#[test]
fn matrix_files_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/a.mtx");
    let a = random_dense(9, 4);
    save_matrix(&path, a.matrix()).unwrap();
    assert_eq!(&load_matrix(&path).unwrap(), a.matrix());
    assert_eq!(load_graph(&path).unwrap().n(), 9);
}

#[test]
fn signal_files_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let s = random_signal(17, 8).unwrap();
    save_signal(&path, &s).unwrap();
    assert_eq!(load_signal(&path).unwrap().values(), s.values());
}

#[test]
fn filter_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for f in [
        design_psd_filter(FilterKind::Lowpass, 1.0, 8, 2.0).unwrap(),
        design_circle_filter(FilterKind::Highpass, 1.2, 6).unwrap(),
    ] {
        let path = dir.path().join("f.json");
        write_json(&path, &f).unwrap();
        let back: PolynomialFilter = read_json(&path).unwrap();
        assert_eq!(back, f);
    }
}

#[test]
fn basis_csv_round_trips() {
    let q = polar_gft::decomposition::polar_decompose(&random_dense(6, 1)).unwrap().q;
    let b = build_gft(&eig_orthogonal(&q).unwrap(), Measure::AngularFrequency).unwrap();
    let mut buf = Vec::new();
    write_basis(&mut buf, &b.basis).unwrap();
    assert_eq!(read_basis(Cursor::new(buf)).unwrap(), b.basis);
}

#[test]
fn edge_list_with_header_and_comments() {
    let text = "src,dst,weight\n# comment\n0,1,2.5\n1,2,1\n";
    let a = read_edge_list(Cursor::new(text), None).unwrap();
    assert_eq!(a.n(), 3);
    assert_eq!(a.weight(0, 1), 2.5);
    assert_eq!(a.matrix()[(1, 0)], 2.5);
    let padded = read_edge_list(Cursor::new(text), Some(5)).unwrap();
    assert_eq!(padded.n(), 5);
    assert!(matches!(read_edge_list(Cursor::new("0,1\n"), None), Err(Error::Parse { line: 1, .. })));
}

#[test]
fn missing_files_are_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_matrix(&dir.path().join("absent.mtx")), Err(Error::Io(_))));
}
