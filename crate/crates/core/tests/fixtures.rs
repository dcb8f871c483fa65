use std::fs;
use std::path::Path;

use rrsynth_core::format::{parse_game, write_game};
use rrsynth_core::{games, PenaltyFn};

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name);
    fs::read_to_string(path).unwrap()
}

#[test]
fn every_fixture_parses() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "rrg") {
            let text = fs::read_to_string(&path).unwrap();
            let game = parse_game(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(parse_game(&write_game(&game)).unwrap(), game);
            count += 1;
        }
    }
    assert!(count >= 4);
}

#[test]
fn fixtures_match_builtins() {
    assert_eq!(parse_game(&fixture("fig1.rrg")).unwrap(), games::fig1());
    assert_eq!(parse_game(&fixture("fig2.rrg")).unwrap(), games::fig2());
    assert_eq!(
        parse_game(&fixture("blades4.rrg")).unwrap(),
        games::blades(4).unwrap()
    );
}

#[test]
fn weighted_fixture_penalties() {
    let g = parse_game(&fixture("weighted.rrg")).unwrap();
    assert_eq!(g.s(), 4);
    assert_eq!(g.penalties()[0], PenaltyFn::affine(2, 1).unwrap());
    assert_eq!(g.penalties()[1].eval(3), Some(9));
}
