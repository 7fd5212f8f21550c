use qapc_core::compiler::*;
use qapc_core::rational::int;

#[test]
fn builtin_fragments_certify() {
    let lib = FragmentLibrary::builtin();
    let expect_k = [
        ("end-1", 2),
        ("end-4", 2),
        ("straight-h", 5),
        ("straight-v", 5),
        ("corner-12", 5),
        ("corner-34", 5),
        ("corner-23", 4),
        ("corner-14", 4),
        ("cross", 10),
        ("cross-r11", 10),
        ("or-12-4-r11", 6),
        ("and-23-1-r00", 6),
    ];
    for (label, k) in expect_k {
        let e = lib.get(label).unwrap();
        let cert = e.certificate.as_ref().unwrap();
        assert_eq!(cert.k, k, "{label}");
        assert_eq!(cert.w_tilde, int(0), "{label}");
        assert!(cert.flip_bounded, "{label}");
        assert!(e.fragment.vertices.len() <= MAX_FRAGMENT_VERTICES);
    }
    for e in &lib.entries {
        println!("{} k={} sets={} anchors={:?}", e.fragment.label, e.certificate.as_ref().unwrap().k, e.certificate.as_ref().unwrap().independent_sets, e.fragment.anchors);
    }
}
