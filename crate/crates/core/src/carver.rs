//! Header/footer file carving over raw images.

use memchr::memmem;

use crate::evidence::RawImage;
use crate::model::{ContentLocation, ObjectOrigin, RecoveredObject, Rendition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validator {
    None,
    JpegSegments,
    ZipEocd,
    Mp3Frames,
    Mp4Boxes,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarveSignature {
    pub label: String,
    pub header: Vec<u8>,
    /// Offset of `header` from the start of the file (4 for the MP4 `ftyp`).
    pub header_offset: usize,
    pub footer: Option<Vec<u8>>,
    pub max_length: u64,
    pub validator: Validator,
}

pub fn builtin_signatures() -> Vec<CarveSignature> {
    let sig = |label: &str,
               header: &[u8],
               header_offset,
               footer: Option<&[u8]>,
               max_mb: u64,
               validator| {
        CarveSignature {
            label: label.to_string(),
            header: header.to_vec(),
            header_offset,
            footer: footer.map(<[u8]>::to_vec),
            max_length: max_mb << 20,
            validator,
        }
    };
    vec![
        sig(
            "jpeg",
            &[0xFF, 0xD8, 0xFF],
            0,
            Some(&[0xFF, 0xD9]),
            32,
            Validator::JpegSegments,
        ),
        sig("pdf", b"%PDF", 0, Some(b"%%EOF"), 256, Validator::None),
        sig(
            "zip",
            b"PK\x03\x04",
            0,
            Some(b"PK\x05\x06"),
            256,
            Validator::ZipEocd,
        ),
        sig("mp3", b"ID3", 0, None, 256, Validator::Mp3Frames),
        sig("mp4", b"ftyp", 4, None, 1024, Validator::Mp4Boxes),
    ]
}

/// A carved byte range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extent {
    pub signature: usize,
    pub offset: u64,
    pub length: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CarveOutcome {
    pub objects: Vec<RecoveredObject>,
    pub notes: Vec<String>,
}

/// Finds carveable extents in offset order. Candidates starting inside an
/// accepted extent are skipped; at equal starts the longest valid wins.
pub fn carve_extents(data: &[u8], sigs: &[CarveSignature], notes: &mut Vec<String>) -> Vec<Extent> {
    let mut starts: Vec<(usize, usize)> = Vec::new();
    for (i, s) in sigs.iter().enumerate() {
        if s.header.is_empty() || s.max_length == 0 {
            continue;
        }
        for pos in memmem::find_iter(data, &s.header) {
            if pos >= s.header_offset {
                starts.push((pos - s.header_offset, i));
            }
        }
    }
    starts.sort_unstable();
    let mut out = Vec::new();
    let mut cursor = 0usize;
    let mut idx = 0;
    while idx < starts.len() {
        let start = starts[idx].0;
        let mut best: Option<(usize, usize)> = None;
        while idx < starts.len() && starts[idx].0 == start {
            let si = starts[idx].1;
            idx += 1;
            if start < cursor {
                continue;
            }
            let sig = &sigs[si];
            let limit = data
                .len()
                .min(start.saturating_add(sig.max_length as usize));
            match extent_len(&data[start..limit], sig) {
                Some(len) => {
                    if best.map_or(true, |(_, l)| len > l) {
                        best = Some((si, len));
                    }
                }
                None => notes.push(format!(
                    "{} candidate at {start} failed validation",
                    sig.label
                )),
            }
        }
        if let Some((si, len)) = best {
            out.push(Extent {
                signature: si,
                offset: start as u64,
                length: len as u64,
            });
            cursor = start + len;
        }
    }
    out
}

pub fn carve(image: &RawImage, sigs: &[CarveSignature]) -> CarveOutcome {
    let mut notes = Vec::new();
    let data = image.bytes();
    let objects = carve_extents(data, sigs, &mut notes)
        .into_iter()
        .filter_map(|e| {
            let bytes = &data[e.offset as usize..(e.offset + e.length) as usize];
            RecoveredObject::from_bytes(
                format!("{}_{}", sigs[e.signature].label, e.offset),
                ObjectOrigin::CarvedAtOffset(e.offset),
                Rendition::Original,
                ContentLocation::ImageExtent {
                    image: image.label().to_string(),
                    offset: e.offset,
                    length: e.length,
                },
                bytes,
            )
            .ok()
        })
        .collect();
    CarveOutcome { objects, notes }
}

fn extent_len(buf: &[u8], sig: &CarveSignature) -> Option<usize> {
    match sig.validator {
        Validator::JpegSegments => jpeg_len(buf),
        Validator::None => footer_len(buf, sig),
        Validator::ZipEocd => zip_len(buf),
        Validator::Mp3Frames => mp3_len(buf),
        Validator::Mp4Boxes => mp4_len(buf),
    }
}

/// First footer after the header, plus one optional line ending.
fn footer_len(buf: &[u8], sig: &CarveSignature) -> Option<usize> {
    let footer = sig.footer.as_deref()?;
    let from = sig.header_offset + sig.header.len();
    let at = from + memmem::find(buf.get(from..)?, footer)?;
    let mut end = at + footer.len();
    match buf.get(end..end + 2) {
        Some(b"\r\n") => end += 2,
        _ => {
            if matches!(buf.get(end), Some(b'\n' | b'\r')) {
                end += 1;
            }
        }
    }
    Some(end)
}

fn be16(b: &[u8], at: usize) -> Option<usize> {
    Some(u16::from_be_bytes(b.get(at..at + 2)?.try_into().ok()?) as usize)
}

fn le16(b: &[u8], at: usize) -> Option<usize> {
    Some(u16::from_le_bytes(b.get(at..at + 2)?.try_into().ok()?) as usize)
}

fn le32(b: &[u8], at: usize) -> Option<usize> {
    Some(u32::from_le_bytes(b.get(at..at + 4)?.try_into().ok()?) as usize)
}

fn be32(b: &[u8], at: usize) -> Option<u64> {
    Some(u32::from_be_bytes(b.get(at..at + 4)?.try_into().ok()?) as u64)
}

fn jpeg_len(buf: &[u8]) -> Option<usize> {
    let mut pos = 2;
    let mut first = true;
    loop {
        if *buf.get(pos)? != 0xFF {
            return None;
        }
        while *buf.get(pos + 1)? == 0xFF {
            pos += 1;
        }
        let marker = buf[pos + 1];
        if first && !matches!(marker, 0xC0..=0xCF | 0xDB | 0xDD | 0xE0..=0xEF | 0xFE) {
            return None;
        }
        first = false;
        match marker {
            0xD9 => return Some(pos + 2),
            0x00 | 0xD8 => return None,
            0x01 | 0xD0..=0xD7 => pos += 2,
            _ => {
                let len = be16(buf, pos + 2)?;
                if len < 2 {
                    return None;
                }
                pos += 2 + len;
                if marker == 0xDA {
                    // Entropy-coded data runs to the next non-stuffed,
                    // non-restart marker.
                    loop {
                        let ff = pos + memchr::memchr(0xFF, buf.get(pos..)?)?;
                        match *buf.get(ff + 1)? {
                            0x00 | 0xD0..=0xD7 | 0xFF => pos = ff + 1,
                            _ => {
                                pos = ff;
                                break;
                            }
                        }
                    }
                }
            }
        }
    }
}

fn zip_len(buf: &[u8]) -> Option<usize> {
    for eocd in memmem::find_iter(buf, b"PK\x05\x06") {
        let (Some(cd_size), Some(cd_off), Some(comment)) = (
            le32(buf, eocd + 12),
            le32(buf, eocd + 16),
            le16(buf, eocd + 20),
        ) else {
            return None;
        };
        if cd_off.checked_add(cd_size) != Some(eocd) {
            continue;
        }
        if cd_size > 0 && buf.get(cd_off..cd_off + 4) != Some(b"PK\x01\x02") {
            continue;
        }
        let end = eocd + 22 + comment;
        return (end <= buf.len()).then_some(end);
    }
    None
}

const L3_BITRATES_V1: [u32; 15] = [
    0, 32, 40, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320,
];
const L3_BITRATES_V2: [u32; 15] = [0, 8, 16, 24, 32, 40, 48, 56, 64, 80, 96, 112, 128, 144, 160];

/// Length of an MPEG audio Layer III frame starting at `h`.
pub fn mp3_frame_len(h: &[u8]) -> Option<usize> {
    let h = h.get(..4)?;
    if h[0] != 0xFF || h[1] & 0xE0 != 0xE0 {
        return None;
    }
    let version = (h[1] >> 3) & 3;
    let layer = (h[1] >> 1) & 3;
    let br_idx = (h[2] >> 4) as usize;
    let sr_idx = ((h[2] >> 2) & 3) as usize;
    let padding = ((h[2] >> 1) & 1) as usize;
    if version == 1 || layer != 1 || br_idx == 0 || br_idx == 15 || sr_idx == 3 {
        return None;
    }
    let (bitrate, rates, coeff): (u32, [u32; 3], u32) = match version {
        3 => (L3_BITRATES_V1[br_idx], [44100, 48000, 32000], 144),
        2 => (L3_BITRATES_V2[br_idx], [22050, 24000, 16000], 72),
        _ => (L3_BITRATES_V2[br_idx], [11025, 12000, 8000], 72),
    };
    Some((coeff * bitrate * 1000 / rates[sr_idx]) as usize + padding)
}

fn mp3_len(buf: &[u8]) -> Option<usize> {
    let head = buf.get(..10)?;
    if !(2..=4).contains(&head[3]) || head[6..10].iter().any(|b| b & 0x80 != 0) {
        return None;
    }
    let size = head[6..10]
        .iter()
        .fold(0usize, |acc, b| (acc << 7) | *b as usize);
    let mut pos = 10 + size + if head[5] & 0x10 != 0 { 10 } else { 0 };
    let mut frames = 0;
    while let Some(len) = buf.get(pos..).and_then(mp3_frame_len) {
        if pos + len > buf.len() {
            break;
        }
        pos += len;
        frames += 1;
    }
    if frames < 2 {
        return None;
    }
    if buf.get(pos..pos + 3) == Some(b"TAG") && pos + 128 <= buf.len() {
        pos += 128;
    }
    Some(pos)
}

const MP4_TOP_LEVEL: [&[u8; 4]; 14] = [
    b"ftyp", b"moov", b"mdat", b"free", b"skip", b"wide", b"udta", b"uuid", b"meta", b"pdin",
    b"moof", b"mfra", b"styp", b"sidx",
];

fn mp4_len(buf: &[u8]) -> Option<usize> {
    let mut pos = 0usize;
    let mut has_media = false;
    while let Some(kind) = buf.get(pos + 4..pos + 8) {
        if !MP4_TOP_LEVEL.iter().any(|t| &t[..] == kind) || (pos == 0 && kind != b"ftyp") {
            break;
        }
        let size = match be32(buf, pos)? {
            1 => {
                let big = buf
                    .get(pos + 8..pos + 16)
                    .map(|b| u64::from_be_bytes(b.try_into().unwrap()));
                match big {
                    Some(s) if s >= 16 => s,
                    _ => break,
                }
            }
            s if s >= 8 => s,
            _ => break,
        };
        let end = (pos as u64).checked_add(size)?;
        if end > buf.len() as u64 {
            break;
        }
        if kind == b"moov" || kind == b"mdat" {
            has_media = true;
        }
        pos = end as usize;
    }
    (pos > 0 && has_media).then_some(pos)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn extents(data: &[u8]) -> Vec<Extent> {
        carve_extents(data, &builtin_signatures(), &mut Vec::new())
    }

    fn tiny_jpeg() -> Vec<u8> {
        let mut v = vec![0xFF, 0xD8, 0xFF, 0xE0, 0x00, 0x04, b'J', b'F'];
        v.extend_from_slice(&[0xFF, 0xDA, 0x00, 0x02]);
        v.extend_from_slice(&[0x12, 0xFF, 0x00, 0x34, 0xFF, 0xD3, 0x56]);
        v.extend_from_slice(&[0xFF, 0xD9]);
        v
    }

    #[test]
    fn five_signatures() {
        let s = builtin_signatures();
        assert_eq!(s.len(), 5);
        assert_eq!(s[0].footer.as_deref(), Some(&[0xFF, 0xD9][..]));
        assert!(s.iter().all(|s| !s.header.is_empty() && s.max_length > 0));
    }

    #[test]
    fn zero_image() {
        assert!(extents(&[0u8; 8192]).is_empty());
        assert!(extents(&[]).is_empty());
    }

    #[test]
    fn jpeg_walk_skips_stuffing_and_restarts() {
        let j = tiny_jpeg();
        let mut data = vec![0u8; 100];
        data.extend_from_slice(&j);
        data.extend_from_slice(&[0xFF, 0xD9, 0, 0]);
        let e = extents(&data);
        assert_eq!(
            e,
            vec![Extent {
                signature: 0,
                offset: 100,
                length: j.len() as u64
            }]
        );
    }

    #[test]
    fn pdf_footer_with_eol() {
        let pdf = b"%PDF-1.4\nbody\n%%EOF\r\n";
        let mut data = vec![7u8; 10];
        data.extend_from_slice(pdf);
        data.extend_from_slice(b"\nzz");
        assert_eq!(extents(&data)[0].length, pdf.len() as u64);
    }

    #[test]
    fn unterminated_pdf_discarded_with_note() {
        let mut notes = Vec::new();
        assert!(carve_extents(b"%PDF-1.4 no end", &builtin_signatures(), &mut notes).is_empty());
        assert_eq!(notes.len(), 1);
    }

    #[test]
    fn zip_eocd_consistency() {
        // Local header, central directory, EOCD for an empty stored entry "a".
        let mut z = Vec::new();
        z.extend_from_slice(b"PK\x03\x04");
        z.extend_from_slice(&[0u8; 22]);
        z.extend_from_slice(&1u16.to_le_bytes());
        z.extend_from_slice(&0u16.to_le_bytes());
        z.push(b'a');
        let cd = z.len();
        z.extend_from_slice(b"PK\x01\x02");
        z.extend_from_slice(&[0u8; 24]);
        z.extend_from_slice(&1u16.to_le_bytes());
        z.extend_from_slice(&[0u8; 16]);
        z.push(b'a');
        let cd_size = z.len() - cd;
        z.extend_from_slice(b"PK\x05\x06");
        z.extend_from_slice(&[0, 0, 0, 0, 1, 0, 1, 0]);
        z.extend_from_slice(&(cd_size as u32).to_le_bytes());
        z.extend_from_slice(&(cd as u32).to_le_bytes());
        z.extend_from_slice(&2u16.to_le_bytes());
        z.extend_from_slice(b"hi");
        let mut data = vec![1u8; 33];
        data.extend_from_slice(&z);
        data.extend_from_slice(&[9u8; 40]);
        assert_eq!(
            extents(&data),
            vec![Extent {
                signature: 2,
                offset: 33,
                length: z.len() as u64
            }]
        );
    }

    #[test]
    fn mp3_frame_lengths() {
        // MPEG-1 Layer III, 128 kbit/s, 44.1 kHz.
        assert_eq!(mp3_frame_len(&[0xFF, 0xFB, 0x90, 0x00]), Some(417));
        assert_eq!(mp3_frame_len(&[0xFF, 0xFB, 0x92, 0x00]), Some(418));
        assert_eq!(mp3_frame_len(&[0xFF, 0xFB, 0xF0, 0x00]), None);
    }

    #[test]
    fn mp3_tag_frames_and_id3v1() {
        let mut m = b"ID3\x03\x00\x00\x00\x00\x00\x05".to_vec();
        m.extend_from_slice(&[0u8; 5]);
        for _ in 0..3 {
            let mut f = vec![0xFF, 0xFB, 0x90, 0x00];
            f.resize(417, 0x11);
            m.extend_from_slice(&f);
        }
        m.extend_from_slice(b"TAG");
        m.resize(m.len() + 125, b' ');
        let mut data = m.clone();
        data.extend_from_slice(&[0u8; 64]);
        assert_eq!(extents(&data)[0].length, m.len() as u64);
    }

    #[test]
    fn mp4_box_sum() {
        let mut m = Vec::new();
        m.extend_from_slice(&16u32.to_be_bytes());
        m.extend_from_slice(b"ftypisom\0\0\0\0");
        m.extend_from_slice(&12u32.to_be_bytes());
        m.extend_from_slice(b"mdat1234");
        let mut data = vec![0u8; 4];
        data.extend_from_slice(&m);
        data.extend_from_slice(&[0xAB; 32]);
        assert_eq!(
            extents(&data),
            vec![Extent {
                signature: 4,
                offset: 4,
                length: 28
            }]
        );
    }

    #[test]
    fn nested_headers_skipped() {
        let mut pdf = b"%PDF-1.4\n".to_vec();
        pdf.extend_from_slice(&tiny_jpeg());
        pdf.extend_from_slice(b"\n%%EOF\n");
        let e = extents(&pdf);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].length, pdf.len() as u64);
    }

    #[test]
    fn carved_objects_named_by_type_and_offset() {
        let mut data = vec![0u8; 4096];
        data.extend_from_slice(&tiny_jpeg());
        let img = RawImage::from_bytes("img", data);
        let out = carve(&img, &builtin_signatures());
        assert_eq!(out.objects.len(), 1);
        assert_eq!(out.objects[0].logical_name, "jpeg_4096");
        assert_eq!(out.objects[0].origin, ObjectOrigin::CarvedAtOffset(4096));
        assert_eq!(out.objects[0].md5, crate::hashing::md5_hex(&tiny_jpeg()));
    }

    proptest::proptest! {
        #[test]
        fn extents_disjoint_in_bounds_deterministic(
            noise in proptest::collection::vec(proptest::prelude::any::<u8>(), 0..4096),
            inserts in proptest::collection::vec((0usize..4096, 0usize..5), 0..6),
        ) {
            let pieces: [&[u8]; 5] = [&[0xFF, 0xD8, 0xFF], b"%PDF", b"%%EOF\n", b"PK\x03\x04", b"ID3\x03\x00\x00\x00\x00\x00\x01"];
            let mut data = noise;
            for (at, which) in inserts {
                let at = at.min(data.len());
                data.splice(at..at, pieces[which].iter().copied());
            }
            let a = extents(&data);
            proptest::prop_assert_eq!(&a, &extents(&data));
            let mut end = 0;
            for e in &a {
                proptest::prop_assert!(e.offset >= end);
                end = e.offset + e.length;
                proptest::prop_assert!(end <= data.len() as u64);
            }
        }
    }
}
