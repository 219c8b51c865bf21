use std::io::{self, Read, Write};

use super::plot::{row_words, RecurrencePlot};
use super::Norm;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"RQA1";
const HEADER_LEN: usize = 32;

/// Full n × n plot as a binary PBM-style bitmap ("P4"), recurrences black.
pub fn write_pgm<W: Write>(plot: &RecurrencePlot, out: W) -> io::Result<()> {
    let n = plot.len();
    let mut out = io::BufWriter::new(out);
    write!(out, "P4\n{n} {n}\n")?;
    let mut line = vec![0u8; n.div_ceil(8)];
    for i in 0..n {
        line.fill(0);
        for j in 0..n {
            if plot.get(i, j) {
                line[j / 8] |= 0x80 >> (j % 8);
            }
        }
        out.write_all(&line)?;
    }
    out.flush()
}

fn put_varint<W: Write>(out: &mut W, mut v: u64) -> io::Result<()> {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            return out.write_all(&[byte]);
        }
        out.write_all(&[byte | 0x80])?;
    }
}

fn get_varint(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    let mut v = 0u64;
    for shift in (0..64).step_by(7) {
        let Some(&b) = bytes.get(*pos) else {
            return Err(corrupt("truncated run length"));
        };
        *pos += 1;
        v |= u64::from(b & 0x7f) << shift;
        if b & 0x80 == 0 {
            return Ok(v);
        }
    }
    Err(corrupt("run length overflows 64 bits"))
}

fn corrupt(what: &str) -> Error {
    Error::InvalidParameter(format!("corrupt recurrence archive: {what}"))
}

/// Run-length archive of the upper triangle.
///
/// Header (32 bytes, little-endian): `RQA1`, n as u64, radius as f64, norm
/// code as u8, Theiler window as u32, 7 zero bytes. The payload walks the
/// triangle row by row (cells (i, i..n)) and stores LEB128 run lengths that
/// alternate between unset and set cells, starting with unset.
pub fn write_rle<W: Write>(plot: &RecurrencePlot, out: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&(plot.len() as u64).to_le_bytes());
    header.extend_from_slice(&plot.radius().to_le_bytes());
    header.push(plot.norm().code());
    let theiler = u32::try_from(plot.theiler()).unwrap_or(u32::MAX);
    header.extend_from_slice(&theiler.to_le_bytes());
    header.resize(HEADER_LEN, 0);
    out.write_all(&header)?;

    let n = plot.len();
    let mut current = false;
    let mut run = 0u64;
    for i in 0..n {
        let row = plot.triangle_row(i);
        for k in 0..n - i {
            let bit = row[k / 64] >> (k % 64) & 1 == 1;
            if bit != current {
                put_varint(&mut out, run)?;
                current = bit;
                run = 0;
            }
            run += 1;
        }
    }
    put_varint(&mut out, run)?;
    out.flush()
}

pub fn read_rle<R: Read>(mut input: R) -> Result<RecurrencePlot> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| corrupt(&e.to_string()))?;
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(corrupt("bad header"));
    }
    let u64_at = |p: usize| u64::from_le_bytes(bytes[p..p + 8].try_into().unwrap());
    let n = usize::try_from(u64_at(4)).map_err(|_| corrupt("size"))?;
    let radius = f64::from_bits(u64_at(12));
    let norm = Norm::from_code(bytes[20]).ok_or_else(|| corrupt("unknown norm"))?;
    let theiler = u32::from_le_bytes(bytes[21..25].try_into().unwrap()) as usize;

    let total_cells = (n as u64) * (n as u64 + 1) / 2;
    let words_len: usize = (0..n).map(|i| row_words(n, i)).sum();
    let mut words = vec![0u64; words_len];
    let mut pos = HEADER_LEN;
    let (mut row, mut k, mut base) = (0usize, 0usize, 0usize);
    let mut seen = 0u64;
    let mut current = false;
    while seen < total_cells {
        let mut run = get_varint(&bytes, &mut pos)?;
        if run > total_cells - seen {
            return Err(corrupt("runs exceed the triangle"));
        }
        seen += run;
        while run > 0 {
            let room = (n - row - k) as u64;
            let take = run.min(room) as usize;
            if current {
                for kk in k..k + take {
                    words[base + kk / 64] |= 1 << (kk % 64);
                }
            }
            k += take;
            run -= take as u64;
            if k == n - row {
                base += row_words(n, row);
                row += 1;
                k = 0;
            }
        }
        current = !current;
    }
    if pos != bytes.len() {
        return Err(corrupt("trailing bytes"));
    }
    RecurrencePlot::from_parts(n, radius, norm, theiler, words)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rqa::RqaParams;
    use crate::statespace::StateMatrix;

    fn plot(n: usize) -> RecurrencePlot {
        let x: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64).collect();
        let mut p = RqaParams::new(1.5);
        p.weighted_entropy = false;
        RecurrencePlot::build(&StateMatrix::from_flat(x, 1).unwrap(), &p, None).unwrap()
    }

    #[test]
    fn rle_round_trip() {
        for n in [2, 3, 64, 65, 200] {
            let p = plot(n);
            let mut buf = Vec::new();
            write_rle(&p, &mut buf).unwrap();
            assert_eq!(&buf[..4], b"RQA1");
            assert_eq!(read_rle(buf.as_slice()).unwrap(), p);
        }
    }

    #[test]
    fn rle_rejects_truncation() {
        let mut buf = Vec::new();
        write_rle(&plot(100), &mut buf).unwrap();
        buf.pop();
        assert!(read_rle(buf.as_slice()).is_err());
        assert!(read_rle(&b"RQA0"[..]).is_err());
    }

    #[test]
    fn pgm_layout() {
        let p = plot(10);
        let mut buf = Vec::new();
        write_pgm(&p, &mut buf).unwrap();
        let header = b"P4\n10 10\n";
        assert_eq!(&buf[..header.len()], header);
        let body = &buf[header.len()..];
        assert_eq!(body.len(), 20);
        for i in 0..10 {
            for j in 0..10 {
                let bit = body[i * 2 + j / 8] & (0x80 >> (j % 8)) != 0;
                assert_eq!(bit, p.get(i, j));
            }
        }
    }
}
