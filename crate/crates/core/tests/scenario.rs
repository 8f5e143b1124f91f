use mdsplan::scenario::ScenarioSpec;
use mdsplan::{generate_scenario, load_scenario, save_scenario, LinkParams, Scenario, Scenario32};
use proptest::prelude::*;

fn link() -> impl Strategy<Value = LinkParams> {
    (1e-3f64..1e3, 1e-3f64..1e3, 0.0f64..10.0).prop_map(|(g, u, a)| LinkParams::remote(g, u, a))
}

fn scenario() -> impl Strategy<Value = Scenario> {
    (1usize..4, 0usize..5).prop_flat_map(|(m, n)| {
        (
            proptest::collection::vec(1u64..1_000_000, m),
            proptest::collection::vec((1e-3f64..1e3, 0.0f64..10.0), m),
            proptest::collection::vec(
                proptest::collection::vec(proptest::option::weighted(0.8, link()), n),
                m,
            ),
            proptest::option::of(any::<u64>()),
        )
            .prop_map(|(rows, locals, workers, seed)| {
                let links = locals
                    .into_iter()
                    .zip(workers)
                    .map(|((u, a), ws)| {
                        let mut row = vec![LinkParams::local(u, a)];
                        // `None` stands for a computation-only worker link.
                        row.extend(
                            ws.into_iter()
                                .map(|w| w.unwrap_or(LinkParams { gamma: None, u, a })),
                        );
                        row
                    })
                    .collect();
                Scenario::new(rows, links).unwrap().with_seed(seed)
            })
    })
}

proptest! {
    #[test]
    fn file_round_trip_is_bit_exact(s in scenario()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        save_scenario(&s, &path).unwrap();
        let back: Scenario = load_scenario(&path).unwrap();
        prop_assert_eq!(&back, &s);
        save_scenario(&back, &path).unwrap();
        let again: Scenario = load_scenario(&path).unwrap();
        prop_assert_eq!(again, s);
    }
}

#[test]
fn generated_files_reload() {
    let dir = tempfile::tempdir().unwrap();
    for (i, spec) in [
        ScenarioSpec::small_scale(Some(2.0)),
        ScenarioSpec::large_scale(None),
    ]
    .iter()
    .enumerate()
    {
        let s: Scenario = generate_scenario(spec, 7).unwrap().with_seed(Some(7));
        let path = dir.path().join(format!("{i}.json"));
        save_scenario(&s, &path).unwrap();
        let back: Scenario = load_scenario(&path).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.seed(), Some(7));
        for m in 0..s.num_masters() {
            for n in 1..=s.num_workers() {
                let l = s.link(m, n);
                assert_eq!(l.u, 1.0 / l.a);
                assert_eq!(l.gamma, spec.gamma_multiplier.map(|g| g * l.u));
            }
        }
    }
}

#[test]
fn single_precision_loads_the_same_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let s: Scenario = generate_scenario(&ScenarioSpec::small_scale(Some(2.0)), 3).unwrap();
    save_scenario(&s, &path).unwrap();
    let narrow: Scenario32 = load_scenario(&path).unwrap();
    assert_eq!(narrow, s.cast::<f32>());
}

#[test]
fn missing_and_invalid_files_report_errors() {
    assert!(load_scenario::<f64>("/nonexistent/scenario.json").is_err());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"masters":[{"L":10,"local":{"u":1,"a":0.5}}],"workers":[[{"gamma":1,"u":0,"a":0.1}]]}"#,
    )
    .unwrap();
    let err = load_scenario::<f64>(&path).unwrap_err().to_string();
    assert!(err.contains("links[0][1].u"), "{err}");
}
