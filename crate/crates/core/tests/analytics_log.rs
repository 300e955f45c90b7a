use cloudsift::codecs::logs::parse_json_lines_log;
use cloudsift::model::Scalar;

const LINES: &str = r#"{ "retry":0, "favorite":false, "extension":"pdf", "id":23, "cached":false, "ts":"1335445641.29", "event":"file.view.start", "size":1695706 }
{ "id":23, "ts":"1335445641.31", "size":1695706, "event":"download.start", "extension":"pdf", "connection":"wifi" }
{ "ts":"1335445641.84", "screen":"DocumentViewController", "event":"screen.view" }
{ "id":23, "ts":"1335445657.75", "size":1695706, "event":"download.success", "extension":"pdf" }
{ "id":23, "event":"file.view.success", "ts":"1335445659.92" }
{ "ts":"1335445669.71", "screen":"SearchableFolderListController", "event":"screen.view" }
{ "ts":"1335445670.04", "cached":true, "path_hash":912, "event":"metadata.load.start" }
{ "path_hash":912, "event":"metadata.load.unchanged", "ts":"1335445673.07" }
"#;

#[test]
fn dropbox_ios_view_and_offline_sequence() {
    let parsed = parse_json_lines_log(LINES);
    assert!(parsed.warnings.is_empty(), "{:?}", parsed.warnings);
    let kinds: Vec<&str> = parsed
        .events
        .iter()
        .map(|e| e.event_kind.as_str())
        .collect();
    assert_eq!(
        kinds,
        [
            "file.view.start",
            "download.start",
            "screen.view",
            "download.success",
            "file.view.success",
            "screen.view",
            "metadata.load.start",
            "metadata.load.unchanged"
        ]
    );
    let first = &parsed.events[0];
    assert_eq!(
        first.attributes.get("size"),
        Some(&Scalar::Integer(1695706))
    );
    assert_eq!(
        first.attributes.get("extension"),
        Some(&Scalar::Text("pdf".into()))
    );
    let ts = first.timestamp.as_ref().unwrap().to_unix_seconds();
    assert!((ts - 1335445641.29).abs() < 1e-6);
    // Every event is timestamped and the sequence is ordered in time.
    let times: Vec<f64> = parsed
        .events
        .iter()
        .map(|e| e.timestamp.as_ref().unwrap().to_unix_seconds())
        .collect();
    assert!(times.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn damaged_line_is_skipped_with_warning() {
    let mut text = LINES.to_string();
    text.insert_str(0, "{ \"event\": \n");
    let parsed = parse_json_lines_log(&text);
    assert_eq!(parsed.events.len(), 8);
    assert_eq!(parsed.warnings.len(), 1);
}
