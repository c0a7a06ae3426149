mod common;

use std::io::Write as _;

use hullpeel::bounds::{chain_item, lower_bound, UpperBound};
use hullpeel::constructions::{
    build_simplex, build_ternary, build_threeblock, corollary_subset, verify_invariant, BlockTree, Mode,
};
use hullpeel::geometry::pts;
use hullpeel::peeling::{count, PeelCount};
use hullpeel::report::Verdict;
use hullpeel::search::{embedded_small_configs, ingest_configs, perturb_search, SearchConfig, SMALL_MINIMA};
use hullpeel::Error;

#[test]
fn constructions_survive_a_file_round_trip() {
    for c in [build_ternary(2).unwrap(), build_threeblock(10).unwrap(), build_simplex(3, 1).unwrap()] {
        let s = pts::parse(&pts::write(&c.points)).unwrap();
        let tree = BlockTree::parse(&c.blocks.to_text()).unwrap();
        assert_eq!(s, c.points);
        assert_eq!(tree, c.blocks);
        assert!(verify_invariant(&s, &tree, Mode::Exhaustive).all_proved());
        assert_eq!(count(&s).unwrap(), count(&c.points).unwrap());
    }
}

#[test]
fn corollary_subsets_stay_below_the_whole() {
    let c = build_ternary(2).unwrap();
    let whole = count(&c.points).unwrap();
    for m in 1..=9 {
        let sub = corollary_subset(&c, m).unwrap();
        let g = count(&sub).unwrap();
        assert!(g <= whole);
        let it = chain_item("sub", &g, m as u64, 2, Some(UpperBound::Cor1)).unwrap();
        assert_eq!(it.verdict, Verdict::Proved, "{it:?}");
    }
}

#[test]
fn search_reaches_the_small_minima() {
    for (n, expected) in SMALL_MINIMA {
        let out = perturb_search(&SearchConfig::new(n, 1)).unwrap();
        assert_eq!(out.count, PeelCount::from(expected), "n = {n}");
        assert_eq!(count(&out.set).unwrap(), out.count);
    }
    let mut cfg = SearchConfig::new(5, 1);
    cfg.iterations = 20_000;
    assert_eq!(perturb_search(&cfg).unwrap().count, PeelCount::from(60));
}

#[test]
fn search_at_seven_points_is_sandwiched() {
    let mut cfg = SearchConfig::new(7, 3);
    cfg.iterations = 2000;
    cfg.restarts = 4;
    let out = perturb_search(&cfg).unwrap();
    assert!(out.count <= count(&build_threeblock(7).unwrap().points).unwrap());
    assert!(out.count >= lower_bound(7, 2).unwrap());
}

#[test]
fn ingested_files_give_the_minimum() {
    let mut sets = Vec::new();
    for (n, _) in SMALL_MINIMA {
        sets.extend(embedded_small_configs(n).unwrap());
    }
    sets.push(common::random_set(6, 2, 9));
    sets.push(common::convex_set(6, 9));
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "# embedded minima and two others\n{}", pts::write_records(&sets)).unwrap();
    let ing = ingest_configs(f.path(), false).unwrap();
    assert_eq!(ing.sets.len(), sets.len());
    let min6 = ing
        .sets
        .iter()
        .filter(|s| s.len() == 6)
        .map(|s| count(s).unwrap())
        .min()
        .unwrap();
    assert_eq!(min6, PeelCount::from(180));
}

#[test]
fn lenient_ingestion_skips_bad_records() {
    let text = "2 3\n0 0 0\n1 1 0\n2 0 1\n\n2 3\n0 0 0\n1 1 1\n2 2 2\n\n2 2\n0 0 0\n0 1 1\n";
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    let ing = ingest_configs(f.path(), true).unwrap();
    assert_eq!(ing.sets.len(), 1);
    assert_eq!(ing.skipped.iter().map(|s| s.first_line).collect::<Vec<_>>(), vec![6, 11]);
    match ingest_configs(f.path(), false) {
        Err(Error::Parse { line: 6, .. }) => {}
        other => panic!("expected a parse error at line 6, got {other:?}"),
    }
}
