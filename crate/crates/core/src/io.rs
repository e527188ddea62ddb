//! Trajectory files: packed bits with a little-endian length header, or CSV.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

/// 8-byte little-endian length, then the outcomes packed eight to a byte,
/// least significant bit first.
pub fn write_packed<W: Write>(traj: &Trajectory, mut w: W) -> Result<()> {
    w.write_all(&(traj.len() as u64).to_le_bytes())?;
    let mut bytes = vec![0u8; traj.len().div_ceil(8)];
    for &p in traj.ones() {
        bytes[p / 8] |= 1 << (p % 8);
    }
    w.write_all(&bytes)?;
    Ok(())
}

pub fn read_packed<R: Read>(mut r: R) -> Result<Trajectory> {
    let mut header = [0u8; 8];
    r.read_exact(&mut header)?;
    let len = usize::try_from(u64::from_le_bytes(header))
        .map_err(|_| Error::Config("trajectory length overflows".into()))?;
    let mut bytes = vec![0u8; len.div_ceil(8)];
    r.read_exact(&mut bytes)?;
    let mut ones = Vec::new();
    for (i, &b) in bytes.iter().enumerate() {
        for bit in 0..8 {
            if b >> bit & 1 == 1 {
                let p = i * 8 + bit;
                if p >= len {
                    return Err(Error::Config("padding bits set in packed trajectory".into()));
                }
                ones.push(p);
            }
        }
    }
    Trajectory::from_ones(len, ones)
}

/// Header `outcome`, then one `0` or `1` per line.
pub fn write_csv<W: Write>(traj: &Trajectory, mut w: W) -> Result<()> {
    w.write_all(b"outcome\n")?;
    let mut line = Vec::with_capacity(2 * traj.len());
    for b in traj.to_bits() {
        line.push(if b { b'1' } else { b'0' });
        line.push(b'\n');
    }
    w.write_all(&line)?;
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Trajectory> {
    let mut bits = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if i == 0 && t == "outcome" {
            continue;
        }
        match t {
            "0" => bits.push(false),
            "1" => bits.push(true),
            "" => {}
            other => return Err(Error::Config(format!("bad outcome {other:?} on line {}", i + 1))),
        }
    }
    Ok(Trajectory::from_bits(&bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_layout() {
        let t = Trajectory::from_ones(10, vec![0, 3, 9]).unwrap();
        let mut buf = Vec::new();
        write_packed(&t, &mut buf).unwrap();
        assert_eq!(buf, [10, 0, 0, 0, 0, 0, 0, 0, 0b0000_1001, 0b0000_0010]);
        assert_eq!(read_packed(&buf[..]).unwrap(), t);
    }

    #[test]
    fn csv_round_trip() {
        let t = Trajectory::from_bits(&[false, true, true, false]);
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        assert_eq!(buf, b"outcome\n0\n1\n1\n0\n");
        assert_eq!(read_csv(&buf[..]).unwrap(), t);
    }
}
