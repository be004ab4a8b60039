use std::fs;

use ctstd_core::io::{
    load_embeddings, load_volume, read_json, save_volume, write_embeddings, write_manifest,
    write_report, SelectionManifest, FORMAT_VERSION,
};
use ctstd_core::metrics::{analyze, Class, EmbeddingSet, MetricsReport, PerClass};
use ctstd_core::{generate_phantom, BitDepth, Error, PhantomSpec, ScanVolume, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn phantom_round_trips_through_png() {
    let dir = tempfile::tempdir().unwrap();
    let (v, _) = generate_phantom(&PhantomSpec::with_bell_profile(12, 40, 36, 0.2, 1)).unwrap();
    let v = v.with_scan_id("p1").with_source_id(2);
    let names = save_volume(&v, dir.path()).unwrap();
    assert_eq!(names.first().unwrap(), "0001.png");
    assert_eq!(names.last().unwrap(), "0012.png");
    assert_eq!(load_volume(dir.path()).unwrap(), v);
}

#[test]
fn sixteen_bit_histogram_preserved() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut slice: Vec<u16> = (0..64 * 64).map(|_| rng.random()).collect();
    slice[0] = 0;
    slice[1] = u16::MAX;
    let v = ScanVolume::new(64, 64, BitDepth::Sixteen, vec![slice.clone(), slice]).unwrap();
    save_volume(&v, dir.path()).unwrap();
    let back = load_volume(dir.path()).unwrap();
    assert_eq!(back.bit_depth(), BitDepth::Sixteen);
    assert_eq!(back.histogram(), v.histogram());
}

/// Independent parse: split on commas by hand.
fn hand_parse(text: &str) -> Vec<(String, u32, Class, Vec<f64>)> {
    text.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let class = match f[2] {
                "covid" => Class::Covid,
                "non_covid" => Class::NonCovid,
                other => panic!("label {other}"),
            };
            (
                f[0].to_string(),
                f[1].parse().unwrap(),
                class,
                f[3..].iter().map(|t| t.parse().unwrap()).collect(),
            )
        })
        .collect()
}

#[test]
fn ten_thousand_rows_match_second_parser() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let d = 6;
    let mut text = String::from("scan_id,source_id,label,f_0,f_1,f_2,f_3,f_4,f_5\n");
    for i in 0..10_000 {
        let label = if rng.random_bool(0.5) {
            "covid"
        } else {
            "non_covid"
        };
        text.push_str(&format!("scan{i},{},{label}", rng.random_range(0..4)));
        for _ in 0..d {
            let x: f64 = rng.random_range(-1e4..1e4);
            text.push_str(&format!(",{x}"));
        }
        text.push('\n');
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("emb.csv");
    fs::write(&path, &text).unwrap();
    let set = load_embeddings(&path).unwrap();
    let rows = hand_parse(&text);
    assert_eq!(set.len(), rows.len());
    for (i, (id, s, c, v)) in rows.into_iter().enumerate() {
        assert_eq!(set.scan_ids()[i], id);
        assert_eq!(set.sources()[i], s);
        assert_eq!(set.labels()[i], c);
        assert_eq!(set.vectors()[i], v);
    }
    let mut buf = Vec::new();
    write_embeddings(&set, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), text);
}

#[test]
fn ragged_file_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(
        &path,
        "scan_id,source_id,label,f_0,f_1,f_2\na,0,covid,1,2,3\nb,0,covid,1,2\n",
    )
    .unwrap();
    let err = load_embeddings(&path).unwrap_err();
    assert!(matches!(err, Error::RaggedRow { line: 3, .. }));
    assert!(err.to_string().contains("line 3"));
}

fn sample_report() -> MetricsReport {
    let set = EmbeddingSet::new(
        vec![
            vec![0.0, 0.0],
            vec![0.0, 2.0],
            vec![10.0, 0.0],
            vec![10.0, 2.0],
            vec![1.0, 0.0],
            vec![1.0, 2.0],
            vec![11.0, 0.0],
            vec![11.0, 2.0],
        ],
        [Class::Covid, Class::Covid, Class::NonCovid, Class::NonCovid].repeat(2),
        vec![0, 0, 0, 0, 1, 1, 1, 1],
    )
    .unwrap();
    analyze(&set).unwrap()
}

#[test]
fn reports_are_byte_identical_and_finite() {
    let dir = tempfile::tempdir().unwrap();
    let r = sample_report();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    write_report(&r, &a).unwrap();
    write_report(&r.clone(), &b).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let mut bad = r;
    bad.inter_source_variance = PerClass {
        covid: Some(f64::NAN),
        non_covid: Some(1.0),
    };
    let c = dir.path().join("c.json");
    assert!(matches!(
        write_report(&bad, &c),
        Err(Error::NonFiniteField(_))
    ));
    assert!(!c.exists());
}

#[test]
fn selection_manifest_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let m = SelectionManifest {
        format_version: FORMAT_VERSION,
        scan_id: "source_0/covid_001".into(),
        strategy: Strategy::Kds,
        n: 3,
        percentiles: vec![1.0 / 6.0, 0.5, 5.0 / 6.0],
        bandwidth_h: Some(12.345678901234),
        areas: vec![0, 10, 250, 400, 120],
        selected_indices: vec![1, 2, 4],
        seed: None,
    };
    let path = dir.path().join("selection.json");
    write_manifest(&m, &path).unwrap();
    let back: SelectionManifest = read_json(&path).unwrap();
    assert_eq!(back.selected_indices, m.selected_indices);
    assert_eq!(back.areas, m.areas);
    assert_eq!(back.scan_id, m.scan_id);
    for (a, b) in back.percentiles.iter().zip(&m.percentiles) {
        assert!(((a - b) / b).abs() < 1e-11);
    }
    assert!((back.bandwidth_h.unwrap() - 12.345678901234).abs() < 1e-10);
    // rewriting the parsed copy gives the same bytes
    let again = dir.path().join("again.json");
    write_manifest(&back, &again).unwrap();
    assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
}
