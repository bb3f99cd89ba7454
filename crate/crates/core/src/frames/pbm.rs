//! Binary PBM (`P4`) encoding. Rows are packed MSB-first and padded to a
//! whole byte; a set bit is an event pixel.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::frames::BinaryFrame;

pub fn encode_pbm(frame: &BinaryFrame) -> Vec<u8> {
    let (w, h) = frame.dims();
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    let row_bytes = w.div_ceil(8);
    out.reserve(row_bytes * h);
    for y in 0..h {
        for bx in 0..row_bytes {
            let mut byte = 0u8;
            for bit in 0..8 {
                let x = bx * 8 + bit;
                if x < w && frame.get(x, y) {
                    byte |= 0x80 >> bit;
                }
            }
            out.push(byte);
        }
    }
    out
}

pub fn write_pbm<W: Write>(mut out: W, frame: &BinaryFrame) -> Result<()> {
    out.write_all(&encode_pbm(frame))?;
    Ok(())
}

fn header_token(data: &[u8], pos: &mut usize) -> Result<String> {
    loop {
        match data.get(*pos) {
            Some(b'#') => {
                while *pos < data.len() && data[*pos] != b'\n' {
                    *pos += 1;
                }
            }
            Some(c) if c.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(Error::Pbm("truncated header".into())),
        }
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() && data[*pos] != b'#' {
        *pos += 1;
    }
    Ok(String::from_utf8_lossy(&data[start..*pos]).into_owned())
}

pub fn decode_pbm(data: &[u8]) -> Result<BinaryFrame> {
    let mut pos = 0;
    if header_token(data, &mut pos)? != "P4" {
        return Err(Error::Pbm("missing P4 magic".into()));
    }
    let parse_dim = |tok: String| tok.parse::<usize>().map_err(|_| Error::Pbm(format!("bad dimension {tok:?}")));
    let w = parse_dim(header_token(data, &mut pos)?)?;
    let h = parse_dim(header_token(data, &mut pos)?)?;
    // exactly one whitespace byte separates the header from the raster
    match data.get(pos) {
        Some(c) if c.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Pbm("missing raster separator".into())),
    }
    let row_bytes = w.div_ceil(8);
    let raster = &data[pos..];
    if raster.len() < row_bytes * h {
        return Err(Error::Pbm(format!(
            "raster has {} bytes, expected {}",
            raster.len(),
            row_bytes * h
        )));
    }
    Ok(BinaryFrame::from_fn(w, h, |x, y| {
        raster[y * row_bytes + x / 8] & (0x80 >> (x % 8)) != 0
    }))
}

pub fn read_pbm<R: Read>(mut input: R) -> Result<BinaryFrame> {
    let mut data = Vec::new();
    input.read_to_end(&mut data)?;
    decode_pbm(&data)
}

pub fn load_pbm(path: impl AsRef<Path>) -> Result<BinaryFrame> {
    decode_pbm(&std::fs::read(path)?)
}

pub fn save_pbm(path: impl AsRef<Path>, frame: &BinaryFrame) -> Result<()> {
    std::fs::write(path, encode_pbm(frame))?;
    Ok(())
}
