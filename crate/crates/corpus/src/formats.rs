//! Byte-exact synthetic files with real container structure.

use rand::{Rng, RngCore};

fn random_bytes(rng: &mut impl RngCore, n: usize) -> Vec<u8> {
    let mut v = vec![0u8; n];
    rng.fill_bytes(&mut v);
    v
}

/// Baseline JPEG: SOI, APP0, DQT, SOF0, SOS, stuffed entropy data, EOI.
pub fn jpeg(size: usize, rng: &mut impl RngCore) -> Vec<u8> {
    let mut out = Vec::with_capacity(size);
    out.extend_from_slice(&[0xFF, 0xD8]);
    out.extend_from_slice(&[0xFF, 0xE0, 0x00, 0x10]);
    out.extend_from_slice(b"JFIF\0");
    out.extend_from_slice(&[0x01, 0x01, 0x00, 0x00, 0x01, 0x00, 0x01, 0x00, 0x00]);
    out.extend_from_slice(&[0xFF, 0xDB, 0x00, 0x43, 0x00]);
    out.extend((0..64u8).map(|i| 1 + i / 4));
    let (w, h) = (640u16, 480u16);
    out.extend_from_slice(&[0xFF, 0xC0, 0x00, 0x11, 0x08]);
    out.extend_from_slice(&h.to_be_bytes());
    out.extend_from_slice(&w.to_be_bytes());
    out.extend_from_slice(&[0x03, 0x01, 0x22, 0x00, 0x02, 0x11, 0x00, 0x03, 0x11, 0x00]);
    out.extend_from_slice(&[
        0xFF, 0xDA, 0x00, 0x0C, 0x03, 0x01, 0x00, 0x02, 0x11, 0x03, 0x11, 0x00, 0x3F, 0x00,
    ]);
    assert!(size >= out.len() + 3, "jpeg size {size} too small");
    let body_end = size - 2;
    while out.len() < body_end {
        let b: u8 = rng.gen();
        if b == 0xFF {
            if out.len() + 2 <= body_end {
                out.extend_from_slice(&[0xFF, 0x00]);
            } else {
                out.push(0xFE);
            }
        } else {
            out.push(b);
        }
    }
    out.extend_from_slice(&[0xFF, 0xD9]);
    out
}

/// PDF whose only `%%EOF` is the final one.
pub fn pdf(size: usize, rng: &mut impl RngCore) -> Vec<u8> {
    let head = b"%PDF-1.4\n1 0 obj\n<< /Type /Catalog /Pages 2 0 R >>\nendobj\n2 0 obj\n<< /Type /Pages /Kids [] /Count 0 >>\nendobj\n3 0 obj\n<< /Length 0000000000 >>\nstream\n";
    let tail = b"\nendstream\nendobj\ntrailer\n<< /Root 1 0 R >>\n%%EOF\n";
    assert!(size > head.len() + tail.len(), "pdf size {size} too small");
    let n = size - head.len() - tail.len();
    let mut out = Vec::with_capacity(size);
    out.extend_from_slice(head);
    let len_field = format!("{n:010}");
    let at = out.windows(10).position(|w| w == b"0000000000").unwrap();
    out[at..at + 10].copy_from_slice(len_field.as_bytes());
    out.extend(
        random_bytes(rng, n)
            .into_iter()
            .map(|b| if b == b'%' { b'#' } else { b }),
    );
    out.extend_from_slice(tail);
    out
}

struct ZipEntry {
    name: &'static str,
    data: Vec<u8>,
    offset: u32,
}

/// Stored (uncompressed) ZIP laid out as a minimal DOCX package; a media
/// member absorbs the remaining bytes so the total is exact.
pub fn docx(size: usize, rng: &mut impl RngCore) -> Vec<u8> {
    let content_types = br#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types"><Default Extension="xml" ContentType="application/xml"/><Override PartName="/word/document.xml" ContentType="application/vnd.openxmlformats-officedocument.wordprocessingml.document.main+xml"/></Types>"#.to_vec();
    let document = br#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?><w:document xmlns:w="http://schemas.openxmlformats.org/wordprocessingml/2006/main"><w:body><w:p><w:r><w:t>cloud storage test document</w:t></w:r></w:p></w:body></w:document>"#.to_vec();
    let names = [
        "[Content_Types].xml",
        "word/document.xml",
        "word/media/image1.bin",
    ];
    let fixed: usize = names.iter().map(|n| 30 + 46 + 2 * n.len()).sum::<usize>()
        + 22
        + content_types.len()
        + document.len();
    assert!(size > fixed, "docx size {size} too small");
    let mut entries = vec![
        ZipEntry {
            name: names[0],
            data: content_types,
            offset: 0,
        },
        ZipEntry {
            name: names[1],
            data: document,
            offset: 0,
        },
        ZipEntry {
            name: names[2],
            data: random_bytes(rng, size - fixed),
            offset: 0,
        },
    ];
    let mut out = Vec::with_capacity(size);
    for e in &mut entries {
        e.offset = out.len() as u32;
        let crc = crc32fast::hash(&e.data);
        out.extend_from_slice(b"PK\x03\x04");
        out.extend_from_slice(&20u16.to_le_bytes());
        out.extend_from_slice(&0u16.to_le_bytes());
        out.extend_from_slice(&0u16.to_le_bytes());
        out.extend_from_slice(&0x6000u16.to_le_bytes());
        out.extend_from_slice(&0x4099u16.to_le_bytes());
        out.extend_from_slice(&crc.to_le_bytes());
        out.extend_from_slice(&(e.data.len() as u32).to_le_bytes());
        out.extend_from_slice(&(e.data.len() as u32).to_le_bytes());
        out.extend_from_slice(&(e.name.len() as u16).to_le_bytes());
        out.extend_from_slice(&0u16.to_le_bytes());
        out.extend_from_slice(e.name.as_bytes());
        out.extend_from_slice(&e.data);
    }
    let cd_start = out.len();
    for e in &entries {
        let crc = crc32fast::hash(&e.data);
        out.extend_from_slice(b"PK\x01\x02");
        out.extend_from_slice(&20u16.to_le_bytes());
        out.extend_from_slice(&20u16.to_le_bytes());
        out.extend_from_slice(&0u16.to_le_bytes());
        out.extend_from_slice(&0u16.to_le_bytes());
        out.extend_from_slice(&0x6000u16.to_le_bytes());
        out.extend_from_slice(&0x4099u16.to_le_bytes());
        out.extend_from_slice(&crc.to_le_bytes());
        out.extend_from_slice(&(e.data.len() as u32).to_le_bytes());
        out.extend_from_slice(&(e.data.len() as u32).to_le_bytes());
        out.extend_from_slice(&(e.name.len() as u16).to_le_bytes());
        out.extend_from_slice(&[0u8; 12]);
        out.extend_from_slice(&e.offset.to_le_bytes());
        out.extend_from_slice(e.name.as_bytes());
    }
    let cd_size = out.len() - cd_start;
    out.extend_from_slice(b"PK\x05\x06");
    out.extend_from_slice(&[0u8; 4]);
    out.extend_from_slice(&3u16.to_le_bytes());
    out.extend_from_slice(&3u16.to_le_bytes());
    out.extend_from_slice(&(cd_size as u32).to_le_bytes());
    out.extend_from_slice(&(cd_start as u32).to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    debug_assert_eq!(out.len(), size);
    out
}

const MP3_FRAME: usize = 417;

/// ID3v2 tag, 128 kbit/s 44.1 kHz Layer III frames, ID3v1 trailer. The
/// ID3v2 padding takes up the remainder so the frame count is whole.
pub fn mp3(size: usize, rng: &mut impl RngCore) -> Vec<u8> {
    assert!(
        size >= 10 + 128 + 2 * MP3_FRAME,
        "mp3 size {size} too small"
    );
    let pad = (size - 138) % MP3_FRAME;
    let frames = (size - 138 - pad) / MP3_FRAME;
    let mut out = Vec::with_capacity(size);
    out.extend_from_slice(b"ID3\x03\x00\x00");
    out.extend((0..4).rev().map(|i| ((pad >> (7 * i)) & 0x7F) as u8));
    out.resize(10 + pad, 0);
    for _ in 0..frames {
        out.extend_from_slice(&[0xFF, 0xFB, 0x90, 0x00]);
        out.extend(random_bytes(rng, MP3_FRAME - 4));
    }
    let mut tag = [b' '; 128];
    tag[..3].copy_from_slice(b"TAG");
    tag[3..13].copy_from_slice(b"test audio");
    tag[127] = 12;
    out.extend_from_slice(&tag);
    debug_assert_eq!(out.len(), size);
    out
}

/// ftyp, moov with an mvhd, and an mdat holding the remaining bytes.
pub fn mp4(size: usize, rng: &mut impl RngCore) -> Vec<u8> {
    let mut out = Vec::with_capacity(size);
    out.extend_from_slice(&24u32.to_be_bytes());
    out.extend_from_slice(b"ftypisom");
    out.extend_from_slice(&0x200u32.to_be_bytes());
    out.extend_from_slice(b"isommp41");
    let mut mvhd = Vec::new();
    mvhd.extend_from_slice(&108u32.to_be_bytes());
    mvhd.extend_from_slice(b"mvhd");
    mvhd.extend_from_slice(&[0u8; 12]);
    mvhd.extend_from_slice(&1000u32.to_be_bytes());
    mvhd.extend_from_slice(&30_000u32.to_be_bytes());
    mvhd.extend_from_slice(&0x0001_0000u32.to_be_bytes());
    mvhd.extend_from_slice(&0x0100u16.to_be_bytes());
    mvhd.resize(108, 0);
    out.extend_from_slice(&((8 + mvhd.len()) as u32).to_be_bytes());
    out.extend_from_slice(b"moov");
    out.extend_from_slice(&mvhd);
    assert!(size > out.len() + 8, "mp4 size {size} too small");
    let mdat = size - out.len();
    out.extend_from_slice(&(mdat as u32).to_be_bytes());
    out.extend_from_slice(b"mdat");
    out.extend(random_bytes(rng, mdat - 8));
    out
}

fn png_chunk(out: &mut Vec<u8>, kind: &[u8; 4], data: &[u8]) {
    out.extend_from_slice(&(data.len() as u32).to_be_bytes());
    let start = out.len();
    out.extend_from_slice(kind);
    out.extend_from_slice(data);
    let crc = crc32fast::hash(&out[start..]);
    out.extend_from_slice(&crc.to_be_bytes());
}

/// PNG page snapshot; the IDAT payload is opaque.
pub fn png(payload: usize, rng: &mut impl RngCore) -> Vec<u8> {
    let mut out = b"\x89PNG\r\n\x1a\n".to_vec();
    let mut ihdr = Vec::new();
    ihdr.extend_from_slice(&612u32.to_be_bytes());
    ihdr.extend_from_slice(&792u32.to_be_bytes());
    ihdr.extend_from_slice(&[8, 2, 0, 0, 0]);
    png_chunk(&mut out, b"IHDR", &ihdr);
    png_chunk(&mut out, b"IDAT", &random_bytes(rng, payload));
    png_chunk(&mut out, b"IEND", &[]);
    out
}
