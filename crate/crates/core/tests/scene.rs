use cartier_core::gallery::{gallery, GALLERY};
use cartier_core::{emit_scene, parse_scene, Error, Sheaf};

#[test]
fn gallery_scenes_round_trip() {
    for p in [3, 5, 7] {
        for name in GALLERY {
            let scene = match gallery(name, p) {
                Ok(s) => s,
                Err(Error::Precondition(_)) if p < 5 => continue,
                Err(e) => panic!("{name} p={p}: {e}"),
            };
            let text = emit_scene(&scene);
            let parsed = parse_scene(&text).unwrap_or_else(|e| panic!("{name} p={p}: {e}\n{text}"));
            assert_eq!(parsed, scene, "{name} p={p}");
            assert_eq!(emit_scene(&parsed), text);
        }
    }
}

#[test]
fn gallery_parameters() {
    for r in 1..=3 {
        let s = gallery(&format!("g1_trivial:{r}"), 3).unwrap();
        assert_eq!(s.higgs().unwrap().rank(), r);
    }
    let s = gallery("g7_gm_rank1:0", 3).unwrap();
    assert!(matches!(s.sheaf, Some(Sheaf::Flat(_))));
    assert!(gallery("g7_gm_rank1:3", 3).is_err());
    assert!(matches!(gallery("g8", 3), Err(Error::UnknownGallery(_))));
    assert!(gallery("g6_a2_rank3_exp3", 3).is_err());
    assert!(gallery("g2_a1_rank2", 2).is_err());
}

#[test]
fn g4_lift_text() {
    let text = emit_scene(&gallery("g4_p1_lemma", 3).unwrap());
    assert!(text.contains("\"w\": \"w^3 + 3*w\""), "{text}");
    assert!(text.contains("\"w\": \"s^-1\""), "{text}");
}

fn g2_text(p: u64) -> String {
    emit_scene(&gallery("g2_a1_rank2", p).unwrap())
}

#[test]
fn rejects_even_prime() {
    let text = g2_text(3).replacen("\"p\": 3", "\"p\": 2", 1);
    let err = parse_scene(&text).unwrap_err();
    assert!(err.to_string().contains("odd prime"), "{err}");
}

#[test]
fn malformed_polynomial_names_token() {
    let text = g2_text(3).replacen("\"t^3 + 3*t\"", "\"t^3 + 3*$t\"", 1);
    let err = parse_scene(&text).unwrap_err().to_string();
    assert!(err.contains("atlas.lifts[1].images.t"), "{err}");
    assert!(err.contains('$'), "{err}");
}

#[test]
fn invariant_failures_are_rejected() {
    let text = g2_text(3).replacen("[\n          [\n            \"0\",\n            \"1\"\n          ],\n          [\n            \"0\",\n            \"0\"\n          ]", "[\n          [\n            \"1\",\n            \"1\"\n          ],\n          [\n            \"0\",\n            \"1\"\n          ]", 1);
    assert_ne!(text, g2_text(3), "fixture replacement did not apply");
    let err = parse_scene(&text).unwrap_err().to_string();
    assert!(err.contains("nilpotency"), "{err}");

    let bad_lift = g2_text(3).replacen("\"t^3\"", "\"t^3 + t\"", 1);
    let err = parse_scene(&bad_lift).unwrap_err().to_string();
    assert!(err.contains("does not reduce"), "{err}");

    let unknown = g2_text(3).replacen("\"rank\"", "\"rnak\"", 1);
    assert!(parse_scene(&unknown).is_err());
}

#[test]
fn schema_errors_report_position() {
    let err = parse_scene("{\"p\": 3,\n \"atlas\": 5}").unwrap_err().to_string();
    assert!(err.contains("line 2"), "{err}");
}
