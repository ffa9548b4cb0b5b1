//! Wire format for stream transports: little-endian frames of
//! `tag: u32, source: u32, byte length: u64, payload`.

use std::io::{self, Read, Write};

/// Header size in bytes.
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub tag: u32,
    pub source: u32,
    pub payload: Vec<f64>,
}

impl Frame {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.payload.len());
        out.extend_from_slice(&self.tag.to_le_bytes());
        out.extend_from_slice(&self.source.to_le_bytes());
        out.extend_from_slice(&((8 * self.payload.len()) as u64).to_le_bytes());
        for v in &self.payload {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(&self.encode())
    }

    pub fn read_from<R: Read>(r: &mut R) -> io::Result<Frame> {
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header)?;
        let tag = u32::from_le_bytes(header[0..4].try_into().unwrap());
        let source = u32::from_le_bytes(header[4..8].try_into().unwrap());
        let len = u64::from_le_bytes(header[8..16].try_into().unwrap());
        if len % 8 != 0 {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                "payload is not a whole number of f64",
            ));
        }
        let mut bytes = vec![0u8; len as usize];
        r.read_exact(&mut bytes)?;
        let payload = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Frame {
            tag,
            source,
            payload,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let f = Frame {
            tag: 0x0102_0304,
            source: 7,
            payload: vec![1.0],
        };
        let b = f.encode();
        assert_eq!(&b[0..4], &[4, 3, 2, 1]);
        assert_eq!(&b[4..8], &[7, 0, 0, 0]);
        assert_eq!(&b[8..16], &[8, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(&b[16..], &1.0f64.to_le_bytes());
    }

    #[test]
    fn truncated_frame_is_an_error() {
        let b = Frame {
            tag: 1,
            source: 0,
            payload: vec![1.0, 2.0],
        }
        .encode();
        assert!(Frame::read_from(&mut &b[..b.len() - 1]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(tag: u32, source: u32, payload in proptest::collection::vec(any::<f64>(), 0..64)) {
            let f = Frame { tag, source, payload };
            let back = Frame::read_from(&mut f.encode().as_slice()).unwrap();
            prop_assert_eq!(back.tag, f.tag);
            prop_assert_eq!(back.source, f.source);
            let same = back.payload.iter().zip(&f.payload).all(|(a, b)| a.to_bits() == b.to_bits());
            prop_assert!(same && back.payload.len() == f.payload.len());
        }
    }
}
