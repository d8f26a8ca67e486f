//! Binary field snapshots and CSV slices.
//!
//! Layout (little endian): `b"QHDF"`, then `u32` version, dimension,
//! resolution, arity and real/complex flag (0 = real, 1 = complex), followed by
//! the samples as `f64`, component after component, each row-major. Complex
//! samples are stored as interleaved `(re, im)` pairs.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::{ComplexField, ScalarField, VectorField};
use super::grid::TorusGrid;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"QHDF";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    Real {
        grid: TorusGrid,
        components: Vec<Vec<f64>>,
    },
    Complex {
        grid: TorusGrid,
        values: Vec<Complex64>,
    },
}

impl From<&ScalarField> for Snapshot {
    fn from(f: &ScalarField) -> Self {
        Snapshot::Real {
            grid: *f.grid(),
            components: vec![f.values().to_vec()],
        }
    }
}

impl From<&VectorField> for Snapshot {
    fn from(v: &VectorField) -> Self {
        Snapshot::Real {
            grid: *v.grid(),
            components: v.components().to_vec(),
        }
    }
}

impl From<&ComplexField> for Snapshot {
    fn from(f: &ComplexField) -> Self {
        Snapshot::Complex {
            grid: *f.grid(),
            values: f.values().to_vec(),
        }
    }
}

fn put_u32(w: &mut impl Write, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn get_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

impl Snapshot {
    pub fn grid(&self) -> &TorusGrid {
        match self {
            Snapshot::Real { grid, .. } | Snapshot::Complex { grid, .. } => grid,
        }
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let grid = self.grid();
        w.write_all(MAGIC)?;
        put_u32(w, VERSION)?;
        put_u32(w, grid.dim() as u32)?;
        put_u32(w, grid.n() as u32)?;
        match self {
            Snapshot::Real { components, .. } => {
                put_u32(w, components.len() as u32)?;
                put_u32(w, 0)?;
                for v in components.iter().flatten() {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
            Snapshot::Complex { values, .. } => {
                put_u32(w, 1)?;
                put_u32(w, 1)?;
                for c in values {
                    w.write_all(&c.re.to_le_bytes())?;
                    w.write_all(&c.im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad snapshot magic".into()));
        }
        let version = get_u32(r)?;
        if version != VERSION {
            return Err(Error::Format(format!(
                "unsupported snapshot version {version}"
            )));
        }
        let dim = get_u32(r)? as usize;
        let n = get_u32(r)? as usize;
        let arity = get_u32(r)? as usize;
        let flag = get_u32(r)?;
        let grid = TorusGrid::new(dim, n)?;
        match flag {
            0 => {
                let mut components = Vec::with_capacity(arity);
                for _ in 0..arity {
                    let c = (0..grid.len())
                        .map(|_| get_f64(r))
                        .collect::<Result<Vec<_>>>()?;
                    components.push(c);
                }
                Ok(Snapshot::Real { grid, components })
            }
            1 => {
                if arity != 1 {
                    return Err(Error::Format("complex snapshots must have arity 1".into()));
                }
                let values = (0..grid.len())
                    .map(|_| Ok(Complex64::new(get_f64(r)?, get_f64(r)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Snapshot::Complex { grid, values })
            }
            other => Err(Error::Format(format!("unknown real/complex flag {other}"))),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        buf
    }
}

/// CSV of a 1D slice through `f` along axis 0 (at the first node of the other axis).
pub fn slice_csv(f: &ScalarField) -> String {
    let grid = f.grid();
    let stride = if grid.dim() == 2 { grid.n() } else { 1 };
    let mut out = String::from("x,value\n");
    for j in 0..grid.n() {
        let x = j as f64 * grid.dx();
        out.push_str(&format!("{x},{}\n", f.values()[j * stride]));
    }
    out
}
