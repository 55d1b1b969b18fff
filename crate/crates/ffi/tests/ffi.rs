use std::ffi::{CStr, CString};
use std::ptr;

use bpcentre_ffi::*;

fn last_error() -> String {
    let p = bp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn table(p: u32, w: u64) -> *mut BpEtaTable {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { bp_eta_table_build(p, w, &mut t) }, BpStatus::Ok);
    assert!(!t.is_null());
    t
}

#[test]
fn build_rejects_even_prime() {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { bp_eta_table_build(2, 4, &mut t) }, BpStatus::NotOddPrime);
    assert!(t.is_null());
    assert!(last_error().contains("not an odd prime"));
}

#[test]
fn eta_r_v1_string() {
    let t = table(3, 4);
    let mut s = ptr::null_mut();
    let gamma = [1u32];
    assert_eq!(unsafe { bp_eta_r_string(t, gamma.as_ptr(), 1, &mut s) }, BpStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(s) }.to_str().unwrap(), "v_1 + 3·t_1");
    unsafe { bp_string_free(s) };

    let too_heavy = [0u32, 0, 1];
    assert_eq!(unsafe { bp_eta_r_string(t, too_heavy.as_ptr(), 3, &mut s) }, BpStatus::InvalidArgument);
    assert!(last_error().contains("exceeds"));
    unsafe { bp_eta_table_free(t) };
}

#[test]
fn null_arguments_are_reported() {
    let mut out = 0u64;
    assert_eq!(unsafe { bp_eta_table_max_weight(ptr::null(), &mut out) }, BpStatus::NullArgument);
    let t = table(3, 2);
    assert_eq!(unsafe { bp_eta_table_max_weight(t, ptr::null_mut()) }, BpStatus::NullArgument);
    assert_eq!(unsafe { bp_eta_table_max_weight(t, &mut out) }, BpStatus::Ok);
    assert_eq!(out, 2);
    unsafe {
        bp_eta_table_free(t);
        bp_eta_table_free(ptr::null_mut());
    }
}

#[test]
fn save_load_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let t = table(3, 6);
    assert_eq!(unsafe { bp_eta_table_save(t, cpath.as_ptr()) }, BpStatus::Ok);
    let first = std::fs::read(&path).unwrap();
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { bp_eta_table_load(cpath.as_ptr(), &mut loaded) }, BpStatus::Ok);
    assert_eq!(unsafe { bp_eta_table_save(loaded, cpath.as_ptr()) }, BpStatus::Ok);
    assert_eq!(first, std::fs::read(&path).unwrap());

    std::fs::write(&path, "{").unwrap();
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { bp_eta_table_load(cpath.as_ptr(), &mut bad) }, BpStatus::Cache);
    unsafe {
        bp_eta_table_free(t);
        bp_eta_table_free(loaded);
    }
}

#[test]
fn realize_and_centre() {
    let t = table(3, 8);
    let a = [4u32];
    let mut v = 99;
    assert_eq!(unsafe { bp_realize(t, a.as_ptr(), 1, a.as_ptr(), 1, &mut v) }, BpStatus::Ok);
    // x_(4) = 1/μ_{(4),(4)} = 1/81 and x_(0,1) = 1/9, so μ̄ = 3^4.
    assert_eq!(v, 4);
    let b = [0u32, 1];
    assert_eq!(unsafe { bp_realize(t, a.as_ptr(), 1, b.as_ptr(), 2, &mut v) }, BpStatus::Ok);
    let c = [1u32];
    assert_eq!(unsafe { bp_realize(t, a.as_ptr(), 1, c.as_ptr(), 1, &mut v) }, BpStatus::InvalidArgument);

    let (mut rank, mut scalar) = (0usize, false);
    for (r, n) in [(0, 1), (4, 1), (8, 2)] {
        assert_eq!(unsafe { bp_centre_rank(t, r, n, &mut rank, &mut scalar) }, BpStatus::Ok);
        assert_eq!((rank, scalar), (1, true));
    }
    unsafe { bp_eta_table_free(t) };
}

#[test]
fn lattices() {
    let mut sg = ptr::null_mut();
    assert_eq!(unsafe { bp_sg_window(3, 2, &mut sg) }, BpStatus::Ok);
    let (mut rank, mut amb) = (0, 0);
    assert_eq!(unsafe { bp_lattice_rank(sg, &mut rank, &mut amb) }, BpStatus::Ok);
    assert_eq!((rank, amb), (3, 3));

    let mut len = 0;
    assert_eq!(unsafe { bp_lattice_elementary_divisors(sg, ptr::null_mut(), 0, &mut len) }, BpStatus::BufferTooSmall);
    assert_eq!(len, 3);
    let mut buf = [0u32; 3];
    assert_eq!(unsafe { bp_lattice_elementary_divisors(sg, buf.as_mut_ptr(), 3, &mut len) }, BpStatus::Ok);
    assert_eq!(buf, [0, 0, 1]);
    assert_eq!(unsafe { bp_lattice_pivot_exponents(sg, buf.as_mut_ptr(), 3, &mut len) }, BpStatus::Ok);
    assert_eq!(buf.iter().sum::<u32>(), 1);

    let t = table(3, 2);
    let mut diag = ptr::null_mut();
    assert_eq!(unsafe { bp_diagonal_lattice(t, 2, 1, &mut diag) }, BpStatus::Ok);
    let mut inside = false;
    assert_eq!(unsafe { bp_lattice_is_sublattice(diag, sg, &mut inside) }, BpStatus::Ok);
    assert!(inside);
    assert_eq!(unsafe { bp_lattice_is_sublattice(sg, diag, &mut inside) }, BpStatus::Ok);
    assert!(!inside, "Ψ^0 is outside the diagonal lattice");

    let mut other = ptr::null_mut();
    assert_eq!(unsafe { bp_sg_window(3, 1, &mut other) }, BpStatus::Ok);
    assert_eq!(unsafe { bp_lattice_is_sublattice(sg, other, &mut inside) }, BpStatus::InvalidArgument);
    unsafe {
        bp_lattice_free(sg);
        bp_lattice_free(diag);
        bp_lattice_free(other);
        bp_eta_table_free(t);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/bpcentre.h")).unwrap();
    for name in [
        "bp_last_error_message",
        "bp_eta_table_build",
        "bp_eta_table_load",
        "bp_eta_table_save",
        "bp_eta_table_free",
        "bp_eta_r_string",
        "bp_realize",
        "bp_centre_rank",
        "bp_sg_window",
        "bp_diagonal_lattice",
        "bp_lattice_elementary_divisors",
        "bp_lattice_free",
        "typedef struct BpEtaTable BpEtaTable",
        "BP_STATUS_BUFFER_TOO_SMALL = 8",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

/// Compiles a small C program against the header when a C compiler is present.
#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"bpcentre.h\"\nint main(void) { BpEtaTable *t = 0; return bp_eta_table_build(3, 1, &t) == BP_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .ok_or(())
}
