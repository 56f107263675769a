use std::path::Path;

use diva::io::{
    decode_divm, encode_divm, load_dataset, read_csv, read_divm, write_csv, write_divm, Format,
};
use diva_core::{LabelKind, Matrix};
use proptest::prelude::*;

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn identity_fixture_with_class_column() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "x.csv", "1,0\n0,1\n");
    let l = write(dir.path(), "y.csv", "0\n1\n");
    let d = load_dataset(&f, &l, Format::Csv).unwrap();
    assert_eq!(d.labels(), &Matrix::identity(2));
    assert_eq!(d.features(), &Matrix::identity(2));
    assert_eq!(d.kind(), LabelKind::OneHot);
}

#[test]
fn one_hot_label_matrix_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "x.csv", "1,2\n3,4\n5,6\n");
    let l = write(dir.path(), "y.csv", "0,1,0\n1,0,0\n0,0,1\n");
    let d = load_dataset(&f, &l, Format::Csv).unwrap();
    assert_eq!((d.n(), d.m(), d.k()), (3, 2, 3));
    assert_eq!(d.classes(), vec![1, 0, 2]);
}

#[test]
fn nan_cell_error_names_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "x.csv", "1,2\n3,NaN\n");
    let l = write(dir.path(), "y.csv", "0\n1\n");
    let msg = load_dataset(&f, &l, Format::Csv).unwrap_err().to_string();
    assert!(msg.contains("row 2") && msg.contains("column 2"), "{msg}");
    let f = write(dir.path(), "x.csv", "1,inf\n3,4\n");
    let msg = load_dataset(&f, &l, Format::Csv).unwrap_err().to_string();
    assert!(msg.contains("row 1") && msg.contains("column 2"), "{msg}");
}

#[test]
fn non_finite_divm_entry_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("x.divm");
    let l = dir.path().join("y.divm");
    write_divm(
        &f,
        &Matrix::from_vec(2, 2, vec![1.0, 2.0, f64::NAN, 4.0]).unwrap(),
    )
    .unwrap();
    write_divm(&l, &Matrix::from_vec(2, 1, vec![0.0, 1.0]).unwrap()).unwrap();
    let msg = load_dataset(&f, &l, Format::Divm).unwrap_err().to_string();
    assert!(msg.contains("row 2") && msg.contains("column 1"), "{msg}");
}

#[test]
fn row_count_mismatch_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "x.csv", "1,0\n0,1\n");
    let l = write(dir.path(), "y.csv", "0\n1\n1\n");
    assert!(load_dataset(&f, &l, Format::Csv).is_err());
}

#[test]
fn ragged_and_malformed_csv_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let msg = read_csv(&write(dir.path(), "a.csv", "1,2\n3\n"))
        .unwrap_err()
        .to_string();
    assert!(msg.contains("row 2"), "{msg}");
    let msg = read_csv(&write(dir.path(), "b.csv", "1,x\n"))
        .unwrap_err()
        .to_string();
    assert!(msg.contains("row 1") && msg.contains("column 2"), "{msg}");
    assert!(read_csv(&write(dir.path(), "c.csv", "")).is_err());
}

#[test]
fn huge_class_label_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "x.csv", "1\n2\n");
    let l = write(dir.path(), "y.csv", "0\n2147483648\n");
    assert!(load_dataset(&f, &l, Format::Csv).is_err());
    let l = write(dir.path(), "y.csv", "0\n2147483647.5\n");
    // not integral: treated as a real-valued target
    assert_eq!(
        load_dataset(&f, &l, Format::Csv).unwrap().kind(),
        LabelKind::Residual
    );
}

#[test]
fn bad_magic_and_missing_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "x.divm", "DIVX\u{1}\0\0\0\0\0\0\0\0\0\0\0");
    assert!(read_divm(&p).unwrap_err().to_string().contains("magic"));
    let missing = dir.path().join("nope.csv");
    let msg = read_csv(&missing).unwrap_err().to_string();
    assert!(msg.contains("nope.csv"), "{msg}");
}

#[test]
fn csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let m = Matrix::from_vec(2, 3, vec![0.1, -1e-300, 5e-324, 1.0 / 3.0, -0.0, 1e300]).unwrap();
    let p = dir.path().join("m.csv");
    write_csv(&p, &m).unwrap();
    let back = read_csv(&p).unwrap();
    let bits = |x: &Matrix| x.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&back), bits(&m));
}

fn finite_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..10, 1usize..10).prop_flat_map(|(r, c)| {
        proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), r * c)
            .prop_map(move |d| Matrix::from_vec(r, c, d).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn divm_round_trip_bit_identical(m in finite_matrix()) {
        let bytes = encode_divm(&m).unwrap();
        prop_assert_eq!(bytes.len(), 16 + 8 * m.rows() * m.cols());
        let back = decode_divm(&bytes, Path::new("mem")).unwrap();
        prop_assert_eq!(back.shape(), m.shape());
        for (a, b) in back.as_slice().iter().zip(m.as_slice()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(encode_divm(&back).unwrap(), bytes);
    }

    #[test]
    fn divm_file_round_trip(m in finite_matrix()) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.divm");
        write_divm(&p, &m).unwrap();
        prop_assert_eq!(read_divm(&p).unwrap(), m);
    }
}
