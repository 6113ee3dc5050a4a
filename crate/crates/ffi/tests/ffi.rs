use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use ctcfx_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ctc_last_error()) }.to_string_lossy().into_owned()
}

fn compile(words: &[&str], alphabet: Option<&str>) -> *mut CtcDict {
    let owned: Vec<CString> = words.iter().map(|w| CString::new(*w).unwrap()).collect();
    let ptrs: Vec<*const c_char> = owned.iter().map(|c| c.as_ptr()).collect();
    let alpha = alphabet.map(|a| CString::new(a).unwrap());
    let mut dict = ptr::null_mut();
    let status = unsafe {
        ctc_dict_compile(
            ptrs.as_ptr(),
            ptrs.len(),
            alpha.as_ref().map_or(ptr::null(), |a| a.as_ptr()),
            &mut dict,
        )
    };
    assert_eq!(status, CtcStatus::Ok, "{}", last_error());
    dict
}

fn best(dec: *const CtcDecoder) -> Vec<u16> {
    let mut buf = [0u16; 64];
    let mut len = 0;
    let status = unsafe { ctc_decoder_best(dec, buf.as_mut_ptr(), buf.len(), &mut len, ptr::null_mut()) };
    assert_eq!(status, CtcStatus::Ok, "{}", last_error());
    buf[..len].to_vec()
}

// alphabet "acdgort_": c=2 a=1 t=7 o=5; blank is index 8 of the frame
fn peaked(label: usize, runner_up: Option<usize>) -> [i8; 9] {
    let mut f = [0i8; 9];
    f[label] = 24;
    if let Some(r) = runner_up {
        f[r] = 20;
    }
    f
}

fn push_word(dec: *mut CtcDecoder, frames: &[[i8; 9]]) {
    for f in frames {
        for frame in [*f, *f, peaked(8, None)] {
            let s = unsafe { ctc_decoder_push_logits(dec, frame.as_ptr(), frame.len()) };
            assert_eq!(s, CtcStatus::Ok, "{}", last_error());
        }
    }
}

#[test]
fn dictionary_round_trip_and_probe() {
    let dict = compile(&["cat", "car", "dog"], Some("acdgort_"));
    unsafe {
        assert_eq!(ctc_dict_node_count(dict), 8);
        assert_eq!(ctc_dict_k(dict), 8);

        let mut len = 0;
        assert_eq!(ctc_dict_save(dict, ptr::null_mut(), 0, &mut len), CtcStatus::BufferTooSmall);
        let mut blob = vec![0u8; len];
        assert_eq!(ctc_dict_save(dict, blob.as_mut_ptr(), blob.len(), &mut len), CtcStatus::Ok);

        let mut back = ptr::null_mut();
        assert_eq!(ctc_dict_load(blob.as_ptr(), blob.len(), &mut back), CtcStatus::Ok);
        let mut again = vec![0u8; len];
        assert_eq!(ctc_dict_save(back, again.as_mut_ptr(), again.len(), &mut len), CtcStatus::Ok);
        assert_eq!(blob, again);

        let (mut found, mut allowed, mut next) = (0u8, [0u8; 8], [0u32; 8]);
        let prefix = [2u16, 1];
        let s = ctc_dict_probe(back, prefix.as_ptr(), 2, &mut found, allowed.as_mut_ptr(), next.as_mut_ptr());
        assert_eq!(s, CtcStatus::Ok);
        assert_eq!(found, 1);
        // after "ca": r (6) and t (7)
        assert_eq!(allowed, [0, 0, 0, 0, 0, 1, 1, 0]);

        let prefix = [2u16, 7, 7, 7];
        ctc_dict_probe(back, prefix.as_ptr(), 4, &mut found, allowed.as_mut_ptr(), next.as_mut_ptr());
        assert_eq!(found, 0);

        let prefix = [3u16, 5, 4];
        ctc_dict_probe(back, prefix.as_ptr(), 3, &mut found, allowed.as_mut_ptr(), next.as_mut_ptr());
        assert_eq!((found, allowed[7], next[7]), (1, 1, 0));

        ctc_dict_free(back);
        ctc_dict_free(dict);
    }
}

#[test]
fn dictionary_changes_the_result() {
    let dict = compile(&["cat", "car", "dog"], Some("acdgort_"));
    let frames = [peaked(1, None), peaked(4, Some(0)), peaked(6, None)];
    unsafe {
        let mut free = ptr::null_mut();
        assert_eq!(ctc_decoder_new(8, 4, true, ptr::null(), &mut free), CtcStatus::Ok);
        push_word(free, &frames);
        assert_eq!(best(free), [2, 5, 7]);
        assert_eq!(ctc_decoder_frames(free), 9);
        ctc_decoder_free(free);

        let mut lm = ptr::null_mut();
        assert_eq!(ctc_decoder_new(8, 4, true, dict, &mut lm), CtcStatus::Ok);
        // the decoder keeps its own copy
        ctc_dict_free(dict);
        push_word(lm, &frames);
        assert_eq!(best(lm), [2, 1, 7]);
        ctc_decoder_free(lm);
    }
}

#[test]
fn collapse_is_reported_and_sticky() {
    let toml = CString::new("w = 8\nadjust = false\n").unwrap();
    unsafe {
        let mut dec = ptr::null_mut();
        assert_eq!(ctc_decoder_new_with_config(28, toml.as_ptr(), ptr::null(), &mut dec), CtcStatus::Ok);
        let flat = [0i8; 29];
        let mut status = CtcStatus::Ok;
        for _ in 0..200 {
            status = ctc_decoder_push_logits(dec, flat.as_ptr(), flat.len());
            if status != CtcStatus::Ok {
                break;
            }
        }
        assert_eq!(status, CtcStatus::BeamCollapse);
        assert!(!last_error().is_empty());
        assert_eq!(ctc_decoder_push_logits(dec, flat.as_ptr(), flat.len()), CtcStatus::BeamCollapse);
        ctc_decoder_free(dec);
    }
}

#[test]
fn argument_errors() {
    unsafe {
        let mut dec = ptr::null_mut();
        assert_eq!(ctc_decoder_new(8, 0, true, ptr::null(), &mut dec), CtcStatus::Config);
        assert!(dec.is_null());
        assert_eq!(ctc_decoder_new(8, 4, true, ptr::null(), ptr::null_mut()), CtcStatus::NullPointer);

        let bad = CString::new("beam = 3").unwrap();
        assert_eq!(ctc_decoder_new_with_config(8, bad.as_ptr(), ptr::null(), &mut dec), CtcStatus::Config);

        assert_eq!(ctc_decoder_new(8, 4, true, ptr::null(), &mut dec), CtcStatus::Ok);
        let short = [0i8; 3];
        assert_eq!(ctc_decoder_push_logits(dec, short.as_ptr(), 3), CtcStatus::Decode);
        assert!(last_error().contains("3"));
        let mut probs = [0.0125; 9];
        probs[8] = 0.9;
        assert_eq!(ctc_decoder_push_probs(dec, probs.as_ptr(), 9), CtcStatus::Ok);
        let mut len = 9;
        assert_eq!(ctc_decoder_best(dec, ptr::null_mut(), 0, &mut len, ptr::null_mut()), CtcStatus::Ok);
        assert_eq!(len, 0);
        probs = [0.0125; 9];
        probs[3] = 0.9;
        assert_eq!(ctc_decoder_push_probs(dec, probs.as_ptr(), 9), CtcStatus::Ok);
        let mut one = [0u16; 1];
        assert_eq!(ctc_decoder_best(dec, one.as_mut_ptr(), 0, &mut len, ptr::null_mut()), CtcStatus::BufferTooSmall);
        assert_eq!(len, 1);
        assert_eq!(ctc_decoder_best(dec, one.as_mut_ptr(), 1, &mut len, ptr::null_mut()), CtcStatus::Ok);
        assert_eq!(one, [4]);
        ctc_decoder_free(dec);

        let mut dict = ptr::null_mut();
        let junk = [1u8, 2, 3];
        assert_eq!(ctc_dict_load(junk.as_ptr(), 3, &mut dict), CtcStatus::Dictionary);
        let alpha = CString::new("abc").unwrap();
        let w = CString::new("ab").unwrap();
        let words = [w.as_ptr()];
        assert_eq!(ctc_dict_compile(words.as_ptr(), 1, alpha.as_ptr(), &mut dict), CtcStatus::InvalidArgument);
        ctc_dict_free(ptr::null_mut());
        ctc_decoder_free(ptr::null_mut());
        assert_eq!(ctc_dict_node_count(ptr::null()), 0);
    }
}

#[test]
fn softmax_and_ratio_helpers() {
    let logits = [24i8, 0, 0, 0];
    let mut out = [0.0f64; 4];
    unsafe {
        assert_eq!(ctc_softmax_approx(logits.as_ptr(), 4, out.as_mut_ptr()), CtcStatus::Ok);
    }
    assert!(out[0] > out[1] && out[1] == out[2] && out[2] == out[3]);
    let r = ctc_compression_ratio(28, 8, 1800, 30, 19);
    assert_eq!(format!("{r:.2}"), "29.49");
    assert!(ctc_compression_ratio(1, 8, 10, 30, 19).is_nan());
}

fn target_dir() -> PathBuf {
    // .../target/<profile>/deps/ffi-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_header() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libctcfx_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let build = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
