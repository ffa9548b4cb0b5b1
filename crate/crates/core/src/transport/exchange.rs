use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::WorkerGroup;
use crate::error::{Error, Result};
use crate::lattice::{
    Face, GaugeField, Geometry, LinkStore, Sign, SpinorField, Sublattice, NDIM, NSPIN,
};

const TAG_SPINOR_HALO: u32 = 16;
const TAG_GAUGE_HALO: u32 = 32;

/// Bytes of one complex double.
pub const COMPLEX_BYTES: usize = 16;

/// Exchange schedule of one face, seen from the receiving worker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacePlan {
    pub dir: usize,
    pub forward: bool,
    /// Worker that owns the sites mirrored in this halo slab.
    pub source_rank: usize,
    /// Worker whose halo on the same face is filled from our boundary.
    pub dest_rank: usize,
    pub sites: usize,
    pub bytes: usize,
    /// False when the face wraps onto this same worker.
    pub remote: bool,
}

/// Halo exchange schedule for spinor fields of colour dimension `dim`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExchangePlan {
    geometry: Geometry,
    rank: usize,
    dim: usize,
    faces: Vec<FacePlan>,
}

impl ExchangePlan {
    pub fn new(lattice: &Sublattice, dim: usize) -> Self {
        let geometry = lattice.geometry().clone();
        let rank = lattice.rank();
        let faces = Face::all()
            .map(|f| {
                let opposite = Face::new(
                    f.dir,
                    if f.sign == Sign::Forward {
                        Sign::Backward
                    } else {
                        Sign::Forward
                    },
                );
                let sites = geometry.face_sites(f.dir);
                FacePlan {
                    dir: f.dir,
                    forward: f.sign == Sign::Forward,
                    source_rank: geometry.neighbor_rank(rank, f),
                    dest_rank: geometry.neighbor_rank(rank, opposite),
                    sites,
                    bytes: spinor_face_bytes(sites, dim),
                    remote: geometry.grid()[f.dir] > 1,
                }
            })
            .collect();
        Self {
            geometry,
            rank,
            dim,
            faces,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn faces(&self) -> &[FacePlan] {
        &self.faces
    }

    /// Bytes received per exchange over all eight faces.
    pub fn total_bytes(&self) -> usize {
        self.faces.iter().map(|f| f.bytes).sum()
    }

    /// Bytes received from other workers only.
    pub fn remote_bytes(&self) -> usize {
        self.faces
            .iter()
            .filter(|f| f.remote)
            .map(|f| f.bytes)
            .sum()
    }

    fn check(&self, field: &SpinorField) -> Result<()> {
        let lat = field.lattice();
        if lat.geometry() != &self.geometry || lat.rank() != self.rank || field.dim() != self.dim {
            return Err(Error::ContractViolation(
                "exchange plan does not match the field".into(),
            ));
        }
        Ok(())
    }
}

/// Message size of one spinor face: `sites x 4 x D_R` complex doubles.
pub fn spinor_face_bytes(sites: usize, dim: usize) -> usize {
    sites * NSPIN * dim * COMPLEX_BYTES
}

fn pack_sites(data: &[Complex64], sites: &[u32], len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(sites.len() * len * 2);
    for &s in sites {
        let s = s as usize;
        for z in &data[s * len..(s + 1) * len] {
            out.push(z.re);
            out.push(z.im);
        }
    }
    out
}

fn unpack_complex(dst: &mut [Complex64], payload: &[f64]) -> Result<()> {
    if payload.len() != 2 * dst.len() {
        return Err(Error::Transport(format!(
            "halo message carries {} values, expected {}",
            payload.len(),
            2 * dst.len()
        )));
    }
    for (z, p) in dst.iter_mut().zip(payload.chunks_exact(2)) {
        *z = Complex64::new(p[0], p[1]);
    }
    Ok(())
}

/// Refreshes every halo slot of `field` from the owning neighbour's
/// boundary. Interior values are not touched.
pub fn halo_exchange(
    group: &mut WorkerGroup,
    field: &mut SpinorField,
    plan: &ExchangePlan,
) -> Result<()> {
    plan.check(field)?;
    let lattice = std::sync::Arc::clone(field.lattice());
    let len = field.site_len();
    for (i, fp) in plan.faces.iter().enumerate() {
        let face = Face::from_index(i);
        let payload = pack_sites(field.data(), lattice.send_slab(face), len);
        group.send(fp.dest_rank, TAG_SPINOR_HALO + i as u32, payload)?;
    }
    for (i, fp) in plan.faces.iter().enumerate() {
        let face = Face::from_index(i);
        let payload = group.recv(fp.source_rank, TAG_SPINOR_HALO + i as u32)?;
        let start = lattice.face_offset(face) * len;
        unpack_complex(
            &mut field.data_mut()[start..start + fp.sites * len],
            &payload,
        )?;
    }
    Ok(())
}

/// Refreshes the halo copies of all links from their owners.
pub fn gauge_halo_exchange(group: &mut WorkerGroup, gauge: &mut GaugeField) -> Result<()> {
    let lattice = std::sync::Arc::clone(gauge.lattice());
    let geometry = lattice.geometry();
    let rank = lattice.rank();
    let block = NDIM * gauge.link_len();
    for face in Face::all() {
        let opposite = Face::new(
            face.dir,
            if face.sign == Sign::Forward {
                Sign::Backward
            } else {
                Sign::Forward
            },
        );
        let sites = lattice.send_slab(face);
        let payload: Vec<f64> = match gauge.links() {
            LinkStore::Real(v) => sites
                .iter()
                .flat_map(|&s| {
                    v[s as usize * block..(s as usize + 1) * block]
                        .iter()
                        .copied()
                })
                .collect(),
            LinkStore::Complex(v) => {
                let mut out = Vec::with_capacity(sites.len() * block * 2);
                for &s in sites {
                    for z in &v[s as usize * block..(s as usize + 1) * block] {
                        out.push(z.re);
                        out.push(z.im);
                    }
                }
                out
            }
        };
        group.send(
            geometry.neighbor_rank(rank, opposite),
            TAG_GAUGE_HALO + face.index() as u32,
            payload,
        )?;
    }
    for face in Face::all() {
        let payload = group.recv(
            geometry.neighbor_rank(rank, face),
            TAG_GAUGE_HALO + face.index() as u32,
        )?;
        let start = lattice.face_offset(face) * block;
        let n = geometry.face_sites(face.dir) * block;
        match gauge.links_mut() {
            LinkStore::Real(v) => {
                if payload.len() != n {
                    return Err(Error::Transport(
                        "gauge halo message has the wrong size".into(),
                    ));
                }
                v[start..start + n].copy_from_slice(&payload);
            }
            LinkStore::Complex(v) => unpack_complex(&mut v[start..start + n], &payload)?,
        }
    }
    Ok(())
}
