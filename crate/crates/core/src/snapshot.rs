//! Binary field snapshots.
//!
//! Layout, all little-endian:
//!
//! ```text
//! "EMXF" | version u32 | N u32 | L f64 | count u32
//! count x (name length u32 | UTF-8 name)
//! count x N^3 f64 samples in flat (i, j, k) order
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::dynamics::FluidState;
use crate::error::{Error, Result};
use crate::spectral::{GridSpec, ScalarField, VectorField};

pub const MAGIC: &[u8; 4] = b"EMXF";
pub const VERSION: u32 = 1;
const MAX_NAME: u32 = 4096;

/// Named scalar fields on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    grid: GridSpec,
    fields: Vec<(String, ScalarField)>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Format {
        what: "snapshot",
        msg: msg.into(),
    }
}

impl Snapshot {
    pub fn new(grid: GridSpec) -> Self {
        Self {
            grid,
            fields: Vec::new(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn fields(&self) -> &[(String, ScalarField)] {
        &self.fields
    }

    pub fn push(&mut self, name: &str, f: ScalarField) -> Result<()> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch {
                left: format!("{:?}", self.grid),
                right: format!("{:?}", f.grid()),
            });
        }
        if self.get(name).is_some() {
            return Err(bad(format!("duplicate field `{name}`")));
        }
        self.fields.push((name.to_string(), f));
        Ok(())
    }

    /// Stores the components as `name_x`, `name_y`, `name_z`.
    pub fn push_vector(&mut self, name: &str, v: &VectorField) -> Result<()> {
        for (c, f) in ["x", "y", "z"].iter().zip(v.comps()) {
            self.push(&format!("{name}_{c}"), f.clone())?;
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&ScalarField> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn require(&self, name: &str) -> Result<&ScalarField> {
        self.get(name)
            .ok_or_else(|| bad(format!("missing field `{name}`")))
    }

    pub fn vector(&self, name: &str) -> Result<VectorField> {
        Ok(VectorField::new([
            self.require(&format!("{name}_x"))?.clone(),
            self.require(&format!("{name}_y"))?.clone(),
            self.require(&format!("{name}_z"))?.clone(),
        ]))
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.grid.n() as u32).to_le_bytes())?;
        w.write_all(&self.grid.box_len().to_le_bytes())?;
        w.write_all(&(self.fields.len() as u32).to_le_bytes())?;
        for (name, _) in &self.fields {
            w.write_all(&(name.len() as u32).to_le_bytes())?;
            w.write_all(name.as_bytes())?;
        }
        for (_, f) in &self.fields {
            for v in f.data() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let io = |e: std::io::Error| bad(format!("truncated or unreadable: {e}"));
        let mut u32_buf = [0u8; 4];
        let mut f64_buf = [0u8; 8];
        let mut read_u32 = |r: &mut dyn Read| -> Result<u32> {
            r.read_exact(&mut u32_buf).map_err(io)?;
            Ok(u32::from_le_bytes(u32_buf))
        };

        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(bad(format!("bad magic {magic:?}")));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let n = read_u32(&mut r)? as usize;
        r.read_exact(&mut f64_buf).map_err(io)?;
        let l = f64::from_le_bytes(f64_buf);
        let grid = GridSpec::new(n, l)?;
        let count = read_u32(&mut r)?;
        let mut names = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let len = read_u32(&mut r)?;
            if len > MAX_NAME {
                return Err(bad(format!("field name of {len} bytes")));
            }
            let mut buf = vec![0u8; len as usize];
            r.read_exact(&mut buf).map_err(io)?;
            names.push(String::from_utf8(buf).map_err(|e| bad(e.to_string()))?);
        }
        let mut snap = Snapshot::new(grid);
        let mut bytes = vec![0u8; grid.len() * 8];
        for name in names {
            r.read_exact(&mut bytes).map_err(io)?;
            let data = bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect();
            snap.push(&name, ScalarField::from_vec(grid, data))?;
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest).map_err(io)? != 0 {
            return Err(bad("trailing bytes after the last field"));
        }
        Ok(snap)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(BufWriter::new(f))
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(BufReader::new(f))
    }

    /// `n`, `u_*`, `E_*`, `B_*`.
    pub fn from_fluid(s: &FluidState) -> Result<Self> {
        let mut snap = Self::new(*s.grid());
        snap.push("n", s.n.clone())?;
        snap.push_vector("u", &s.u)?;
        snap.push_vector("E", &s.e)?;
        snap.push_vector("B", &s.b)?;
        Ok(snap)
    }

    pub fn to_fluid(&self) -> Result<FluidState> {
        Ok(FluidState {
            n: self.require("n")?.clone(),
            u: self.vector("u")?,
            e: self.vector("E")?,
            b: self.vector("B")?,
            t: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_band_limited, Spectral};

    fn sample() -> Snapshot {
        let s = Spectral::new(GridSpec::new(8, 5.0).unwrap());
        let mut snap = Snapshot::new(*s.grid());
        snap.push("q", random_band_limited(&s, 3, 1)).unwrap();
        let mut odd = random_band_limited(&s, 3, 2);
        odd.data_mut()[3] = f64::MIN_POSITIVE / 3.0; // subnormal
        odd.data_mut()[4] = -0.0;
        snap.push("odd", odd).unwrap();
        snap
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let snap = sample();
        let mut buf = Vec::new();
        snap.write_to(&mut buf).unwrap();
        let back = Snapshot::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.fields().len(), 2);
        for ((na, a), (nb, b)) in snap.fields().iter().zip(back.fields()) {
            assert_eq!(na, nb);
            let bits = |f: &ScalarField| f.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(a), bits(b));
        }
        assert_eq!(back.grid(), snap.grid());
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"EMXF");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), VERSION);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(buf[12..20].try_into().unwrap()), 5.0);
        assert_eq!(u32::from_le_bytes(buf[20..24].try_into().unwrap()), 2);
        assert_eq!(buf.len(), 24 + 4 + 1 + 4 + 3 + 2 * 512 * 8);
    }

    #[test]
    fn corrupt_input_is_refused() {
        let mut buf = Vec::new();
        sample().write_to(&mut buf).unwrap();
        assert!(Snapshot::read_from(&buf[..buf.len() - 1]).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(Snapshot::read_from(extra.as_slice()).is_err());
        let mut magic = buf.clone();
        magic[0] = b'X';
        assert!(Snapshot::read_from(magic.as_slice()).is_err());
    }
}
