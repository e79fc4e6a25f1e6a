use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use mdx_ffi::*;

const LAMBDA: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn model() -> *mut MdxModel {
    let m = mdx_model_new(1.0, LAMBDA);
    assert!(!m.is_null());
    m
}

#[test]
fn average_matches_closed_form() {
    let m = model();
    let mut out = MdxAverage {
        p: 0.0,
        numeric_beta: 0.0,
        numeric_xi: 0.0,
        analytic_gamma: 0.0,
        sqrt_dispersion: 0.0,
        convergent: false,
    };
    unsafe {
        assert_eq!(mdx_average(m, 0.6, &mut out), MdxStatus::Ok);
        assert!(out.convergent);
        assert!((out.analytic_gamma - 1.25).abs() < 1e-12);
        assert!((out.numeric_beta - 1.25).abs() < 1e-8);
        assert!((out.sqrt_dispersion - 1.36f64.sqrt()).abs() < 1e-14);

        assert_eq!(mdx_average(m, 1.2, &mut out), MdxStatus::Ok);
        assert!(!out.convergent);
        assert!(out.numeric_beta.is_nan());
        mdx_model_free(m);
    }
}

#[test]
fn multipliers_and_infeasible_targets() {
    let mut out = MdxMultipliers {
        nu: 0.0,
        gamma: 0.0,
        c3: 0.0,
        shape_k: 0.0,
    };
    unsafe {
        assert_eq!(mdx_solve_multipliers(1.5, -0.018_245_0, &mut out), MdxStatus::Ok);
        assert!((out.nu - 4.0).abs() < 1e-5);
        assert!((out.gamma - 1.0).abs() < 1e-5);
        assert_eq!(mdx_solve_multipliers(1.0, -1.0, &mut out), MdxStatus::Infeasible);
        let msg = CStr::from_ptr(mdx_last_error_message());
        assert!(!msg.to_bytes().is_empty());
    }
}

#[test]
fn fisher_and_geometry() {
    let m = model();
    let (mut g, mut gb2, mut c, mut d, mut b) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let grid = [10.0, 14.0, 18.0, 22.0, 26.0];
    unsafe {
        assert_eq!(mdx_fisher_metric(m, 2.0, 5.0, &mut g, &mut gb2), MdxStatus::Ok);
        assert!((g * 4.0 - gb2).abs() < 1e-12 * gb2);
        assert_eq!(mdx_fisher_limit(m, 1.0, grid.as_ptr(), grid.len(), &mut c), MdxStatus::Ok);
        assert!((c - 4.0).abs() < 1e-3);
        assert_eq!(mdx_fisher_limit(m, 1.0, ptr::null(), 0, &mut c), MdxStatus::NullPointer);
        assert_eq!(mdx_geodesic_distance(1.0, std::f64::consts::E, &mut d), MdxStatus::Ok);
        assert!((d - 1.0).abs() < 1e-14);
        assert_eq!(mdx_geodesic(1.0, 1.0, &mut b), MdxStatus::Ok);
        assert!((b - std::f64::consts::E).abs() < 1e-14);
        assert_eq!(mdx_geodesic(-1.0, 1.0, &mut b), MdxStatus::Domain);
        mdx_model_free(m);
    }
}

#[test]
fn legendre_recovers_relativistic_lagrangian() {
    let m = model();
    let (mut value, mut p) = (0.0, 0.0);
    unsafe {
        assert_eq!(mdx_legendre(m, 0.5, 1e-12, &mut value, &mut p), MdxStatus::Ok);
        let expected = -(1.0f64 - 0.25).sqrt();
        assert!((value - expected).abs() < 1e-9);
        assert!((p - 0.5 / 0.75f64.sqrt()).abs() < 1e-6);
        assert_eq!(mdx_legendre(m, 0.5, 1e-12, &mut value, ptr::null_mut()), MdxStatus::Ok);
        assert_eq!(mdx_legendre(m, 1.5, 1e-12, &mut value, &mut p), MdxStatus::Domain);
        mdx_model_free(m);
    }
}

#[test]
fn verify_json_round_trip() {
    let mut json: *mut libc::c_char = ptr::null_mut();
    let mut failed = usize::MAX;
    unsafe {
        assert_eq!(mdx_verify_json(ptr::null(), 42, &mut json, &mut failed), MdxStatus::Ok);
        assert_eq!(failed, 0);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        mdx_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["seed"], 42);

        let bad = CString::new(r#"{"model":{"m":-1.0}}"#).unwrap();
        let status = mdx_verify_json(bad.as_ptr(), 42, &mut json, &mut failed);
        assert_ne!(status, MdxStatus::Ok);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mdx.h")).unwrap();
    assert!(header.starts_with("#ifndef MDX_H"));
    for name in [
        "MDX_STATUS_OK",
        "MDX_STATUS_PANIC",
        "typedef struct MdxModel MdxModel",
        "mdx_model_new",
        "mdx_model_free",
        "mdx_average",
        "mdx_solve_multipliers",
        "mdx_fisher_metric",
        "mdx_fisher_limit",
        "mdx_geodesic_distance",
        "mdx_legendre",
        "mdx_verify_json",
        "mdx_string_free",
        "mdx_last_error_message",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "mdx.h"

int main(void) {
    MdxModel *m = mdx_model_new(1.0, sqrt(0.5));
    if (!m) return 10;
    MdxAverage a;
    if (mdx_average(m, 0.6, &a) != MDX_STATUS_OK) return 11;
    if (fabs(a.analytic_gamma - 1.25) > 1e-12) return 12;
    double d;
    if (mdx_geodesic_distance(1.0, exp(2.0), &d) != MDX_STATUS_OK) return 13;
    if (fabs(d - 2.0) > 1e-12) return 14;
    if (mdx_geodesic(0.0, 1.0, &d) != MDX_STATUS_DOMAIN) return 15;
    mdx_model_free(m);
    printf("ok\n");
    return 0;
}
"#;

/// Directory holding the built static library, next to the test binary.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = artifact_dir().join("libmdx_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
