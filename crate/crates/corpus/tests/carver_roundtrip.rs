use cloudsift_corpus::dataset::{dataset_spec, FileType};
use cloudsift_corpus::fixtures::carve_trial;

#[test]
fn every_dataset_type_carves_back_byte_identical() {
    let data = dataset_spec(3);
    let mut failures = Vec::new();
    for ty in [
        FileType::Jpeg,
        FileType::Mp3,
        FileType::Mp4,
        FileType::Pdf,
        FileType::Docx,
    ] {
        let files: Vec<_> = data.files.iter().filter(|f| f.file_type == ty).collect();
        for trial in 0..20u64 {
            let f = files[trial as usize % files.len()];
            if let Err(e) = carve_trial(&f.bytes, trial * 31 + ty as u64) {
                failures.push(format!("{} trial {trial}: {e}", f.name));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn thumbnails_carve_back() {
    let data = dataset_spec(4);
    for f in data.files.iter().filter_map(|f| f.thumbnail.as_ref()) {
        carve_trial(f, f.len() as u64).unwrap();
    }
}
