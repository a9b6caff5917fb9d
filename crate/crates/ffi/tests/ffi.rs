use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use nilpotwist_ffi::*;

fn group(spec: &str) -> *mut NwGroup {
    let spec = CString::new(spec).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { nw_group_from_spec(spec.as_ptr(), &mut g) }, NwStatus::Ok);
    assert!(!g.is_null());
    g
}

fn take_string(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { nw_free_cstring(s) };
    out
}

fn last_error() -> Option<String> {
    let p = nw_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

#[test]
fn group_basics() {
    let a = group("burnside:A:p=3");
    unsafe {
        let mut order = 0;
        assert_eq!(nw_group_order(a, &mut order), NwStatus::Ok);
        assert_eq!(order, 81);
        let mut label = ptr::null_mut();
        assert_eq!(nw_group_label(a, &mut label), NwStatus::Ok);
        assert_eq!(take_string(label), "A(p=3)");
        let mut class2 = false;
        assert_eq!(nw_group_is_class2(a, &mut class2), NwStatus::Ok);
        assert!(class2);
        let mut z = 0;
        assert_eq!(nw_group_center_order(a, &mut z), NwStatus::Ok);
        assert_eq!(z, 9);
        // Moduli (27, 3): y has index 1 and x index 3; [x,y] = x^18 gives yx = x^19 y.
        let mut c = 0;
        assert_eq!(nw_group_multiply_index(a, 1, 3, &mut c), NwStatus::Ok);
        assert_eq!(c, 19 * 3 + 1);
        assert_eq!(nw_group_multiply_index(a, 81, 0, &mut c), NwStatus::InvalidArgument);
        assert!(last_error().unwrap().contains("out of range"));
        let mut fp = ptr::null_mut();
        assert_eq!(nw_group_fingerprint_json(a, &mut fp), NwStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(fp)).unwrap();
        assert_eq!(v["center_order"], 9);
        assert_eq!(v["derived_exponent"], 3);
        nw_group_free(a);
    }
}

#[test]
fn twists_and_isomorphism() {
    let a = group("burnside:A:p=3");
    let ab = group("abelian:3^3x3");
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(nw_group_twist(a, 1, &mut t), NwStatus::Ok);
        let mut iso = false;
        assert_eq!(nw_is_isomorphic(t, ab, 0, &mut iso), NwStatus::Ok);
        assert!(iso);
        assert_eq!(nw_is_isomorphic(a, ab, 0, &mut iso), NwStatus::Ok);
        assert!(!iso);

        let mut it = ptr::null_mut();
        assert_eq!(nw_group_iterate_twist(a, 1, 1, &mut it), NwStatus::Ok);
        for x in 0..81 {
            for y in 0..81 {
                let (mut p, mut q) = (0, 0);
                nw_group_multiply_index(t, x, y, &mut p);
                nw_group_multiply_index(it, x, y, &mut q);
                assert_eq!(p, q);
            }
        }
        for g in [a, ab, t, it] {
            nw_group_free(g);
        }
    }
}

#[test]
fn budget_status() {
    let b = group("burnside:B:p=3");
    let ab = group("abelian:3^2x3x3");
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(nw_group_twist(b, 1, &mut t), NwStatus::Ok);
        let mut iso = false;
        assert_eq!(nw_is_isomorphic(t, ab, 1, &mut iso), NwStatus::BudgetExceeded);
        assert_eq!(nw_is_isomorphic(t, ab, 0, &mut iso), NwStatus::Ok);
        assert!(iso);
        for g in [b, ab, t] {
            nw_group_free(g);
        }
    }
}

#[test]
fn strings() {
    let h = group("heisenberg:p=3:k=2");
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(nw_string_of(h, &mut s), NwStatus::Ok);
        let mut len = 0;
        assert_eq!(nw_string_len(s, &mut len), NwStatus::Ok);
        assert_eq!(len, 3);
        let mut centers = Vec::new();
        for i in 0..len {
            let mut t = ptr::null_mut();
            assert_eq!(nw_string_term(s, i, &mut t), NwStatus::Ok);
            let mut z = 0;
            nw_group_center_order(t, &mut z);
            centers.push(z);
            nw_group_free(t);
        }
        assert_eq!(centers, vec![9, 81, 729]);
        let mut t = ptr::null_mut();
        assert_eq!(nw_string_term(s, 3, &mut t), NwStatus::InvalidArgument);
        let mut json = ptr::null_mut();
        assert_eq!(nw_string_report_json(s, &mut json), NwStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(v["pairwise_non_isomorphic"], true);
        assert_eq!(v["terms"][2]["abelian"], true);
        nw_string_free(s);
        nw_group_free(h);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(nw_group_from_spec(ptr::null(), &mut g), NwStatus::NullPointer);
        let bad = CString::new("burnside:Q:p=3").unwrap();
        assert_eq!(nw_group_from_spec(bad.as_ptr(), &mut g), NwStatus::InvalidArgument);
        assert!(last_error().is_some());

        let zero_order = CString::new(r#"{"label": "bad", "generators": [{"order": 0}], "commutators": {}}"#).unwrap();
        assert_eq!(nw_group_from_json(zero_order.as_ptr(), &mut g), NwStatus::InvalidPresentation);

        let even = group("abelian:2x2");
        let mut s = ptr::null_mut();
        assert_eq!(nw_string_of(even, &mut s), NwStatus::EvenOrder);
        nw_group_free(even);

        let ut = group("unitriangular:p=3:n=4");
        let mut class2 = true;
        assert_eq!(nw_group_is_class2(ut, &mut class2), NwStatus::Ok);
        assert!(!class2);
        assert_eq!(nw_group_twist(ut, 1, &mut g), NwStatus::NotClass2);
        nw_group_free(ut);

        let h = group("heisenberg:p=3:k=1");
        assert_eq!(nw_group_order(h, ptr::null_mut()), NwStatus::NullPointer);
        assert_eq!(nw_group_order(ptr::null(), ptr::null_mut()), NwStatus::NullPointer);
        let mut order = 0;
        assert_eq!(nw_group_order(h, &mut order), NwStatus::Ok);
        assert!(last_error().is_none());
        nw_group_free(h);
        nw_group_free(ptr::null_mut());
        nw_string_free(ptr::null_mut());
        nw_free_cstring(ptr::null_mut());
    }
}

#[test]
fn json_presentation() {
    let json = CString::new(
        r#"{"label": "H27", "generators": [{"order": 3}, {"order": 3}, {"order": 3}], "commutators": {"2,1": [0, 0, 1]}}"#,
    )
    .unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(nw_group_from_json(json.as_ptr(), &mut g), NwStatus::Ok);
        let h = group("heisenberg:p=3:k=1");
        let mut iso = false;
        assert_eq!(nw_is_isomorphic(g, h, 0, &mut iso), NwStatus::Ok);
        assert!(iso);
        nw_group_free(g);
        nw_group_free(h);
    }
}

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

/// `target/<profile>`, which holds the cdylib next to `deps/`.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/nilpotwist.h")).unwrap();
    for decl in [
        "typedef struct NwGroup NwGroup;",
        "typedef struct NwString NwString;",
        "NW_STATUS_BUDGET_EXCEEDED = 8",
        "enum NwStatus nw_group_from_spec(const char *spec, struct NwGroup **out);",
        "enum NwStatus nw_is_isomorphic(const struct NwGroup *g,",
        "const char *nw_last_error_message(void);",
        "void nw_free_cstring(char *s);",
    ] {
        assert!(header.contains(decl), "missing {decl}");
    }
}

#[test]
fn c_program_links_against_the_library() {
    let lib =
        profile_dir().join(if cfg!(target_os = "macos") { "libnilpotwist_ffi.dylib" } else { "libnilpotwist_ffi.so" });
    assert!(lib.exists(), "{} not built", lib.display());
    let out_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let exe = out_dir.join("nilpotwist_smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-o")
        .arg(&exe)
        .arg(&lib)
        .arg(format!("-Wl,-rpath,{}", profile_dir().display()))
        .status()
        .expect("C compiler runs");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(
        String::from_utf8(run.stdout).unwrap(),
        "order 729 terms 3 centers 9 81 729\nbad spec status 2 message set\n"
    );
}
