//! Bit-exact binary snapshots of a [`GaugeFieldState`].
//!
//! Layout, all little-endian:
//!
//! ```text
//! "DWYM"  version:u32  D:u32  N:u32  extents:u32×D  spacings:f64×D  q:f64  m:f64
//! payload: phi, pi^0..pi^{D-1}, a_0..a_{D-1}, p^{αβ} (α<β)
//! crc32(payload):u32
//! ```
//!
//! Each field is written site by site (axis 0 slowest); vectors contribute N
//! (re, im) pairs per site and matrices N² pairs in row-major order.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{LatticeField, LatticeSpec};
use crate::state::{GaugeFieldState, ModelParams};
use crate::tensor::{ComplexMatrix, ComplexVector};

pub const MAGIC: &[u8; 4] = b"DWYM";
pub const VERSION: u32 = 1;

pub fn to_bytes(state: &GaugeFieldState) -> Vec<u8> {
    let spec = state.spec();
    let params = state.params();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(spec.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(params.n as u32).to_le_bytes());
    for &e in spec.extents() {
        out.extend_from_slice(&(e as u32).to_le_bytes());
    }
    for &s in spec.spacings() {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out.extend_from_slice(&params.q.to_le_bytes());
    out.extend_from_slice(&params.m.to_le_bytes());

    let mut payload = Vec::new();
    let mut push = |z: Complex64| {
        payload.extend_from_slice(&z.re.to_le_bytes());
        payload.extend_from_slice(&z.im.to_le_bytes());
    };
    for v in state.phi.values() {
        v.as_slice().iter().copied().for_each(&mut push);
    }
    for f in &state.pi {
        for v in f.values() {
            v.as_slice().iter().copied().for_each(&mut push);
        }
    }
    for f in state.a.iter().chain(&state.p) {
        for m in f.values() {
            m.entries().for_each(&mut push);
        }
    }
    let crc = crc32fast::hash(&payload);
    out.extend_from_slice(&payload);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Truncated(format!("reading {what} at byte {}", self.pos)))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn complex(&mut self) -> Result<Complex64> {
        Ok(Complex64::new(self.f64("payload")?, self.f64("payload")?))
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<GaugeFieldState> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(Error::Version(version));
    }
    let dim = r.u32("dimension")? as usize;
    let n = r.u32("internal dimension")? as usize;
    if !(2..=crate::tensor::MAX_DIM).contains(&dim) {
        return Err(Error::Lattice(format!("snapshot dimension {dim} out of range")));
    }
    let extents = (0..dim)
        .map(|_| r.u32("extents").map(|e| e as usize))
        .collect::<Result<Vec<_>>>()?;
    let spacings = (0..dim).map(|_| r.f64("spacings")).collect::<Result<Vec<_>>>()?;
    let q = r.f64("q")?;
    let m = r.f64("m")?;
    let spec = LatticeSpec::from_parts(extents, spacings)?;
    let params = ModelParams::new(n, q, m)?;

    let sites = spec.sites();
    let vectors = (1 + dim) * sites * n;
    let matrices = (dim + spec.pair_count()) * sites * n * n;
    let payload_len = 16 * (vectors + matrices);
    let payload_start = r.pos;
    let payload = r.take(payload_len, "payload")?;
    let stored = r.u32("checksum")?;
    if r.pos != bytes.len() {
        return Err(Error::Mismatch(format!(
            "{} trailing bytes after snapshot",
            bytes.len() - r.pos
        )));
    }
    let computed = crc32fast::hash(payload);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }

    let mut p = Reader {
        bytes,
        pos: payload_start,
    };
    let vector_field = |p: &mut Reader| -> Result<LatticeField<ComplexVector>> {
        let values = (0..sites)
            .map(|_| {
                let v = (0..n).map(|_| p.complex()).collect::<Result<Vec<_>>>()?;
                Ok(ComplexVector::from_slice(&v))
            })
            .collect::<Result<Vec<_>>>()?;
        LatticeField::from_values(&spec, values)
    };
    let phi = vector_field(&mut p)?;
    let pi = (0..dim).map(|_| vector_field(&mut p)).collect::<Result<Vec<_>>>()?;
    let matrix_field = |p: &mut Reader| -> Result<LatticeField<ComplexMatrix>> {
        let values = (0..sites)
            .map(|_| {
                let v = (0..n * n).map(|_| p.complex()).collect::<Result<Vec<_>>>()?;
                Ok(ComplexMatrix::from_row_major(&v))
            })
            .collect::<Result<Vec<_>>>()?;
        LatticeField::from_values(&spec, values)
    };
    let a = (0..dim).map(|_| matrix_field(&mut p)).collect::<Result<Vec<_>>>()?;
    let pp = (0..spec.pair_count())
        .map(|_| matrix_field(&mut p))
        .collect::<Result<Vec<_>>>()?;
    Ok(GaugeFieldState::from_parts(spec, params, phi, pi, a, pp))
}

pub fn write(state: &GaugeFieldState, path: &Path) -> Result<()> {
    fs::write(path, to_bytes(state)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read(path: &Path) -> Result<GaugeFieldState> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_bytes(&bytes)
}

/// Reads a snapshot and insists it was written for the given lattice and N.
pub fn read_expecting(path: &Path, spec: &LatticeSpec, params: &ModelParams) -> Result<GaugeFieldState> {
    let state = read(path)?;
    if state.n() != params.n {
        return Err(Error::ParamMismatch(format!(
            "snapshot has N = {}, run expects N = {}",
            state.n(),
            params.n
        )));
    }
    if state.spec() != spec {
        return Err(Error::ParamMismatch(format!(
            "snapshot lattice {:?} differs from run lattice {:?}",
            state.spec().extents(),
            spec.extents()
        )));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bits(s: &GaugeFieldState) -> Vec<u64> {
        to_bytes(s)
            .chunks(8)
            .map(|c| c.iter().rev().fold(0u64, |acc, &b| (acc << 8) | b as u64))
            .collect()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        for k in 0..100 {
            let dim = 2 + k % 3;
            let extent = if dim == 4 { 4 } else { 5 };
            let spec = LatticeSpec::uniform(dim, extent, 0.1 + 0.01 * k as f64).unwrap();
            let params = ModelParams::new(1 + k % 3, 0.3 * k as f64, 0.5).unwrap();
            let s = GaugeFieldState::random(&spec, &params, 1e3, &mut rng).unwrap();
            write(&s, &path).unwrap();
            let back = read(&path).unwrap();
            assert_eq!(back, s);
            assert_eq!(bits(&back), bits(&s));
        }
    }

    #[test]
    fn time_slices_round_trip() {
        let spec = LatticeSpec::time_slice(&[8], &[0.25], 0.1).unwrap();
        let params = ModelParams::new(2, 1.0, 1.0).unwrap();
        let s = GaugeFieldState::random(&spec, &params, 1.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(from_bytes(&to_bytes(&s)).unwrap(), s);
    }

    fn sample() -> (GaugeFieldState, Vec<u8>) {
        let spec = LatticeSpec::uniform(2, 4, 0.25).unwrap();
        let params = ModelParams::new(2, 1.0, 1.0).unwrap();
        let s = GaugeFieldState::random(&spec, &params, 1.0, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let b = to_bytes(&s);
        (s, b)
    }

    #[test]
    fn corrupted_magic_is_rejected() {
        let (_, mut b) = sample();
        b[0] = b'X';
        let err = from_bytes(&b).unwrap_err();
        assert!(matches!(err, Error::BadMagic));
        assert!(err.to_string().contains("bad magic"));
    }

    #[test]
    fn version_truncation_and_checksum_errors() {
        let (_, b) = sample();
        let mut v = b.clone();
        v[4] = 9;
        assert!(matches!(from_bytes(&v), Err(Error::Version(9))));
        assert!(matches!(from_bytes(&b[..b.len() - 5]), Err(Error::Truncated(_))));
        assert!(matches!(from_bytes(&b[..10]), Err(Error::Truncated(_))));
        let mut c = b.clone();
        let mid = b.len() / 2;
        c[mid] ^= 0x10;
        assert!(matches!(from_bytes(&c), Err(Error::Checksum { .. })));
    }

    #[test]
    fn order_mismatch_is_reported() {
        let (s, _) = sample();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("n2.bin");
        write(&s, &path).unwrap();
        let want = ModelParams::new(3, 1.0, 1.0).unwrap();
        let err = read_expecting(&path, s.spec(), &want).unwrap_err();
        assert!(err.to_string().contains("param mismatch"));
        assert!(read_expecting(&path, s.spec(), s.params()).is_ok());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read(Path::new("/nonexistent/snapshot.bin")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
