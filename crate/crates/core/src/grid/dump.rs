//! Raw field dumps: a text header line `n L t` followed by little-endian
//! f64 values ordered (component, z, y, x) for Ex, Ey, Ez, Bx, By, Bz.

use std::io::{BufRead, BufReader, Read, Write};

use super::{FieldState, GridSpec, VectorField};
use crate::{Error, Result};

pub fn write_fields<W: Write>(mut w: W, grid: &GridSpec, t: f64, f: &FieldState) -> Result<()> {
    writeln!(w, "{} {:.17e} {:.17e}", grid.n(), grid.box_length(), t)?;
    let mut buf = Vec::with_capacity(6 * grid.len() * 8);
    for c in f.e.0.iter().chain(f.b.0.iter()) {
        for v in c {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_fields<R: Read>(r: R) -> Result<(GridSpec, f64, FieldState)> {
    let mut r = BufReader::new(r);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let bad = |msg: &str| Error::InvalidGrid(format!("field dump header: {msg}"));
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(bad("expected `n L t`"));
    }
    let n: usize = parts[0].parse().map_err(|_| bad("n"))?;
    let l: f64 = parts[1].parse().map_err(|_| bad("L"))?;
    let t: f64 = parts[2].parse().map_err(|_| bad("t"))?;
    let grid = GridSpec::new(n, l)?;
    let mut raw = vec![0u8; 6 * grid.len() * 8];
    r.read_exact(&mut raw)?;
    let mut values = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")));
    let mut comp = || -> Vec<f64> { values.by_ref().take(grid.len()).collect() };
    let e = VectorField([comp(), comp(), comp()]);
    let b = VectorField([comp(), comp(), comp()]);
    Ok((grid, t, FieldState { e, b }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bitwise() {
        let g = GridSpec::new(16, 3.5).unwrap();
        let f = FieldState {
            e: VectorField::from_fn(&g, |x| [x[0], x[1] * 1e-300, -x[2]]),
            b: VectorField::from_fn(&g, |x| [x[0].sin(), 0.1, x[1] * x[2]]),
        };
        let mut bytes = Vec::new();
        write_fields(&mut bytes, &g, 1.25, &f).unwrap();
        let header_end = bytes.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(bytes.len() - header_end - 1, 6 * g.len() * 8);
        // first value after the header is Ex at (z, y, x) = (0, 0, 0)
        let first = f64::from_le_bytes(bytes[header_end + 1..header_end + 9].try_into().unwrap());
        assert_eq!(first, g.coord(0));
        let (g2, t, f2) = read_fields(&bytes[..]).unwrap();
        assert_eq!(g2, g);
        assert_eq!(t, 1.25);
        assert_eq!(f2, f);
    }

    #[test]
    fn truncated_dump_is_an_error() {
        let g = GridSpec::new(16, 1.0).unwrap();
        let mut bytes = Vec::new();
        write_fields(&mut bytes, &g, 0.0, &FieldState::zeros(&g)).unwrap();
        bytes.truncate(bytes.len() - 1);
        assert!(read_fields(&bytes[..]).is_err());
        assert!(read_fields(&b"16 1.0\n"[..]).is_err());
    }
}
