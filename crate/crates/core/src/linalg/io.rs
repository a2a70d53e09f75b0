//! Matrix files: plain CSV (one row per line) and the binary FMAT1 layout
//! (`b"FMAT1\0"`, u64 LE rows, u64 LE cols, f64 LE column-major data).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::matrix::DenseMatrix;
use crate::error::{FalcError, Result};

pub const FMAT_MAGIC: &[u8; 6] = b"FMAT1\0";

pub fn write_fmat<W: Write>(mut w: W, a: &DenseMatrix) -> Result<()> {
    w.write_all(FMAT_MAGIC)?;
    w.write_all(&(a.rows() as u64).to_le_bytes())?;
    w.write_all(&(a.cols() as u64).to_le_bytes())?;
    for v in a.as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_fmat<R: Read>(mut r: R) -> Result<DenseMatrix> {
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic)
        .map_err(|_| FalcError::Format("truncated FMAT1 header".into()))?;
    if &magic != FMAT_MAGIC {
        return Err(FalcError::Format("bad FMAT1 magic".into()));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)
        .map_err(|_| FalcError::Format("truncated FMAT1 header".into()))?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)
        .map_err(|_| FalcError::Format("truncated FMAT1 header".into()))?;
    let cols = u64::from_le_bytes(word) as usize;
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| FalcError::Format("FMAT1 dimensions overflow".into()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != count * 8 {
        return Err(FalcError::Format(format!(
            "FMAT1 payload has {} bytes, expected {}",
            bytes.len(),
            count * 8
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    DenseMatrix::from_col_major(rows, cols, data)
}

pub fn write_csv<W: Write>(mut w: W, a: &DenseMatrix) -> Result<()> {
    for i in 0..a.rows() {
        let line: Vec<String> = (0..a.cols()).map(|j| format_real(a[(i, j)])).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<DenseMatrix> {
    let mut rows = Vec::new();
    for (lineno, line) in BufReader::new(r).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| {
                let v: f64 = f.trim().parse().map_err(|_| {
                    FalcError::Format(format!("line {}: cannot parse {f:?}", lineno + 1))
                })?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(FalcError::NonFinite(format!("CSV line {}", lineno + 1)))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn save_fmat(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    write_fmat(BufWriter::new(File::create(path)?), a)
}

pub fn load_fmat(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    read_fmat(BufReader::new(File::open(path)?))
}

pub fn save_csv(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    write_csv(BufWriter::new(File::create(path)?), a)
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    read_csv(File::open(path)?)
}

/// Loads by extension: `.fmat` binary, anything else CSV.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let p = path.as_ref();
    match p.extension().and_then(|e| e.to_str()) {
        Some("fmat") => load_fmat(p),
        _ => load_csv(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![1.0, -2.5, 1e-300], vec![0.1, 3.0, -7.0]]).unwrap()
    }

    #[test]
    fn fmat_round_trip_and_layout() {
        let a = sample();
        let mut buf = Vec::new();
        write_fmat(&mut buf, &a).unwrap();
        assert_eq!(&buf[..6], b"FMAT1\0");
        assert_eq!(u64::from_le_bytes(buf[6..14].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[14..22].try_into().unwrap()), 3);
        // second stored value is row 1, column 0
        assert_eq!(f64::from_le_bytes(buf[30..38].try_into().unwrap()), 0.1);
        assert_eq!(read_fmat(&buf[..]).unwrap(), a);
    }

    #[test]
    fn fmat_rejects_bad_input() {
        let mut buf = Vec::new();
        write_fmat(&mut buf, &sample()).unwrap();
        assert!(read_fmat(&buf[..buf.len() - 1]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'G';
        assert!(read_fmat(&bad[..]).is_err());
        let nan_at = 22;
        buf[nan_at..nan_at + 8].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(read_fmat(&buf[..]).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let a = sample();
        let mut buf = Vec::new();
        write_csv(&mut buf, &a).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap(), a);
    }

    #[test]
    fn csv_rejects_non_finite() {
        assert!(read_csv("1,2\n3,NaN\n".as_bytes()).is_err());
        assert!(read_csv("1,inf\n".as_bytes()).is_err());
        assert!(read_csv("1,2\n3\n".as_bytes()).is_err());
        assert!(read_csv("1,x\n".as_bytes()).is_err());
    }
}
