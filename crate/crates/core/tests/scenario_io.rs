use std::path::PathBuf;

use healthroute_core::fixtures::diamond;
use healthroute_core::scenario::{generate_grid, load_scenario, save_scenario, GeneratorParams, Preset};
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/fixtures").join(name)
}

/// The documented fixture is exactly what the library produces. Run with
/// `UPDATE_FIXTURES=1` to regenerate.
#[test]
fn diamond_fixture_file_is_current() {
    let text = save_scenario(&diamond(300.0));
    let path = fixture("diamond.scenario.json");
    if std::env::var_os("UPDATE_FIXTURES").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let on_disk = std::fs::read_to_string(&path).unwrap();
    assert_eq!(on_disk, text);
    assert_eq!(load_scenario(&on_disk).unwrap(), diamond(300.0));
}

#[test]
fn generated_scenarios_always_validate() {
    for seed in 0..100u64 {
        let p = GeneratorParams {
            rows: 2 + (seed % 13) as usize,
            cols: 2 + (seed % 7) as usize,
            zone_cell: 1 + (seed % 3) as usize,
            hotspot_count: (seed % 2) as usize,
            seed,
            ..Default::default()
        };
        let s = generate_grid(&p).unwrap();
        // Re-validates from scratch.
        load_scenario(&save_scenario(&s)).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn save_is_a_fixed_point(seed in any::<u64>(), rows in 2usize..12, cols in 2usize..12, spring in any::<bool>()) {
        let p = GeneratorParams {
            rows,
            cols,
            hotspot_count: 1,
            seed,
            preset: if spring { Preset::SpringPollen } else { Preset::Baseline },
            ..Default::default()
        };
        let s = generate_grid(&p).unwrap();
        let once = save_scenario(&s);
        let back = load_scenario(&once).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(save_scenario(&back), once);
    }
}
