use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use bimult_ffi::*;

fn matrix(rows: usize, cols: usize, data: &[f64]) -> *mut BimultMatrix {
    let mut m = ptr::null_mut();
    let st = unsafe { bimult_matrix_new(rows, cols, data.as_ptr(), &mut m) };
    assert_eq!(st, BimultStatus::Ok);
    m
}

fn read(m: *const BimultMatrix) -> (usize, usize, Vec<f64>) {
    let (mut r, mut c) = (0, 0);
    unsafe {
        assert_eq!(bimult_matrix_shape(m, &mut r, &mut c), BimultStatus::Ok);
        let mut buf = vec![0.0; 2 * r * c];
        assert_eq!(
            bimult_matrix_data(m, buf.as_mut_ptr(), buf.len()),
            BimultStatus::Ok
        );
        (r, c, buf)
    }
}

fn last_error() -> String {
    let p = bimult_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn matrix_round_trip() {
    let data = [1.0, 2.0, 3.0, -4.0, 5.0, 0.5];
    let m = matrix(1, 3, &data);
    let (r, c, back) = read(m);
    assert_eq!((r, c), (1, 3));
    assert_eq!(back, data);
    unsafe { bimult_matrix_free(m) };
}

#[test]
fn schur_apply_multiplies_entrywise() {
    // dims (1, 1, 1): M(y, x) = φ·y·x
    let dims = [1usize, 1, 1];
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(
            bimult_schur_new(dims.as_ptr(), [2.0, 0.0].as_ptr(), &mut s),
            BimultStatus::Ok
        );
    }
    let x = matrix(1, 1, &[3.0, 0.0]);
    let y = matrix(1, 1, &[0.0, 1.0]);
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(bimult_apply_schur(s, y, x, &mut out), BimultStatus::Ok);
    }
    assert_eq!(read(out).2, vec![0.0, 6.0]);

    let mut phi = ptr::null_mut();
    let mut out2 = ptr::null_mut();
    unsafe {
        assert_eq!(bimult_schur_embed(s, &mut phi), BimultStatus::Ok);
        assert_eq!(bimult_apply_tau(phi, y, x, &mut out2), BimultStatus::Ok);
    }
    assert_eq!(read(out2).2, vec![0.0, 6.0]);

    let mut v = 0.0;
    unsafe {
        assert_eq!(
            bimult_norm_schur(s, BimultTarget::S1, 2, 0, &mut v),
            BimultStatus::Ok
        );
    }
    assert!((v - 2.0).abs() < 1e-9);
    let mut w = 0.0;
    unsafe {
        assert_eq!(
            bimult_norm_tau(phi, BimultTarget::S2, 2, 0, &mut w),
            BimultStatus::Ok
        );
    }
    assert!((w - 2.0).abs() < 1e-9);

    unsafe {
        bimult_matrix_free(out);
        bimult_matrix_free(out2);
        bimult_matrix_free(x);
        bimult_matrix_free(y);
        bimult_symbol_free(phi);
        bimult_schur_free(s);
    }
}

#[test]
fn gamma2_of_hadamard() {
    let m = matrix(2, 2, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0]);
    let mut v = 0.0;
    unsafe {
        assert_eq!(bimult_gamma2(m, 1e-9, &mut v), BimultStatus::Ok);
        bimult_matrix_free(m);
    }
    assert!((v - 2f64.sqrt()).abs() < 1e-6, "{v}");
}

#[test]
fn errors_map_to_status_codes() {
    let x = matrix(2, 3, &[0.0; 12]);
    let y = matrix(2, 2, &[0.0; 8]);
    let dims = [1usize, 1, 1];
    let mut s = ptr::null_mut();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(
            bimult_schur_new(dims.as_ptr(), [1.0, 0.0].as_ptr(), &mut s),
            BimultStatus::Ok
        );
        assert_eq!(bimult_apply_schur(s, y, x, &mut out), BimultStatus::Shape);
        assert!(out.is_null());
        assert!(last_error().starts_with("shape"));

        let mut v = 0.0;
        assert_eq!(
            bimult_gamma2(y, 1e-12, &mut v),
            BimultStatus::InvalidArgument
        );
        assert_eq!(
            bimult_norm_schur(s, BimultTarget::B, 0, 0, &mut v),
            BimultStatus::InvalidArgument
        );
        assert_eq!(
            bimult_gamma2(ptr::null(), 1e-9, &mut v),
            BimultStatus::NullPointer
        );
        assert!(last_error().contains("null"));

        let mut bad = ptr::null_mut();
        assert_eq!(
            bimult_matrix_new(2, 2, ptr::null(), &mut bad),
            BimultStatus::NullPointer
        );
        let mut buf = [0.0; 3];
        assert_eq!(
            bimult_matrix_data(y, buf.as_mut_ptr(), buf.len()),
            BimultStatus::InvalidArgument
        );

        bimult_matrix_free(ptr::null_mut());
        bimult_schur_free(s);
        bimult_matrix_free(x);
        bimult_matrix_free(y);
    }
}

#[test]
fn header_declares_exports_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/bimult.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build script");
    for name in [
        "bimult_last_error",
        "bimult_matrix_new",
        "bimult_matrix_free",
        "bimult_matrix_shape",
        "bimult_matrix_data",
        "bimult_schur_new",
        "bimult_schur_free",
        "bimult_symbol_new",
        "bimult_symbol_free",
        "bimult_schur_embed",
        "bimult_apply_schur",
        "bimult_apply_tau",
        "bimult_gamma2",
        "bimult_norm_schur",
        "bimult_norm_tau",
        "BIMULT_STATUS_NULL_POINTER",
        "typedef struct BimultMatrix BimultMatrix",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"bimult.h\"\nint main(void) { BimultMatrix *m = 0; return (int)bimult_matrix_new(0, 0, 0, &m); }\n",
    )
    .unwrap();
    match Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    {
        Ok(o) => assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr)),
        Err(_) => eprintln!("no C compiler found; skipped syntax check"),
    }
}
