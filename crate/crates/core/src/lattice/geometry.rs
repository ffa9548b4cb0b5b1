use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of space-time directions. Direction 0 is time.
pub const NDIM: usize = 4;

/// Extents or coordinates in (t, x, y, z) order.
pub type Coords = [usize; NDIM];

/// Smallest local lattice the stock tests accept, (t, x, y, z).
pub const LOCAL_FLOOR: Coords = [8, 4, 4, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Forward,
    Backward,
}

/// One of the eight faces of a sub-lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Face {
    pub dir: usize,
    pub sign: Sign,
}

impl Face {
    pub const COUNT: usize = 2 * NDIM;

    pub fn new(dir: usize, sign: Sign) -> Self {
        Self { dir, sign }
    }

    /// Dense index; `+mu` faces come before `-mu` faces.
    pub fn index(self) -> usize {
        2 * self.dir + usize::from(self.sign == Sign::Backward)
    }

    pub fn from_index(i: usize) -> Self {
        let sign = if i.is_multiple_of(2) {
            Sign::Forward
        } else {
            Sign::Backward
        };
        Self { dir: i / 2, sign }
    }

    pub fn all() -> impl Iterator<Item = Face> {
        (0..Self::COUNT).map(Face::from_index)
    }
}

/// Formats extents as `TxXxYxZ`.
pub fn format_extents(c: &Coords) -> String {
    c.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

/// Parses `TxXxYxZ`.
pub fn parse_extents(s: &str) -> std::result::Result<Coords, String> {
    let parts: Vec<&str> = s.trim().split(['x', 'X']).collect();
    if parts.len() != NDIM {
        return Err(format!("`{s}` is not of the form TxXxYxZ"));
    }
    let mut out = [0; NDIM];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p
            .trim()
            .parse()
            .map_err(|_| format!("`{p}` is not a positive integer"))?;
    }
    Ok(out)
}

/// Global lattice, process grid and the per-worker local extents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    global: Coords,
    grid: Coords,
    local: Coords,
}

impl Geometry {
    pub fn new(global: Coords, grid: Coords, enforce_floor: bool) -> Result<Self> {
        let mut local = [0; NDIM];
        for mu in 0..NDIM {
            if global[mu] == 0 || !global[mu].is_multiple_of(2) {
                return Err(Error::Decomposition(format!(
                    "global extent {} in direction {mu} must be positive and even",
                    global[mu]
                )));
            }
            if grid[mu] == 0 {
                return Err(Error::Decomposition(format!(
                    "process grid entry in direction {mu} is zero"
                )));
            }
            if !global[mu].is_multiple_of(grid[mu]) {
                return Err(Error::Decomposition(format!(
                    "extent {} in direction {mu} is not divisible by {} workers",
                    global[mu], grid[mu]
                )));
            }
            local[mu] = global[mu] / grid[mu];
        }
        if enforce_floor && local.iter().zip(LOCAL_FLOOR.iter()).any(|(l, f)| l < f) {
            return Err(Error::FloorViolation { local });
        }
        Ok(Self {
            global,
            grid,
            local,
        })
    }

    /// Picks a process grid for `workers` by repeatedly halving the
    /// direction with the largest local extent.
    pub fn auto_grid(global: Coords, workers: usize) -> Result<Coords> {
        if workers == 0 {
            return Err(Error::Decomposition("worker count must be positive".into()));
        }
        let mut grid = [1; NDIM];
        let mut remaining = workers;
        let mut p = 2;
        let mut factors = Vec::new();
        while remaining > 1 {
            while remaining.is_multiple_of(p) {
                factors.push(p);
                remaining /= p;
            }
            p += 1;
        }
        factors.sort_unstable_by(|a, b| b.cmp(a));
        for f in factors {
            let best = (0..NDIM)
                .filter(|&mu| (global[mu] / grid[mu]).is_multiple_of(f))
                .max_by_key(|&mu| {
                    (
                        global[mu] / grid[mu],
                        std::cmp::Reverse(grid[mu]),
                        NDIM - mu,
                    )
                });
            match best {
                Some(mu) => grid[mu] *= f,
                None => {
                    return Err(Error::Decomposition(format!(
                        "cannot split lattice {} over {workers} workers",
                        format_extents(&global)
                    )))
                }
            }
        }
        Ok(grid)
    }

    pub fn global(&self) -> Coords {
        self.global
    }

    pub fn grid(&self) -> Coords {
        self.grid
    }

    pub fn local(&self) -> Coords {
        self.local
    }

    pub fn workers(&self) -> usize {
        self.grid.iter().product()
    }

    pub fn global_volume(&self) -> usize {
        self.global.iter().product()
    }

    pub fn local_volume(&self) -> usize {
        self.local.iter().product()
    }

    /// Sites on one face perpendicular to `dir`.
    pub fn face_sites(&self, dir: usize) -> usize {
        self.local_volume() / self.local[dir]
    }

    pub fn halo_sites(&self) -> usize {
        (0..NDIM).map(|mu| 2 * self.face_sites(mu)).sum()
    }

    /// Coordinates in the process grid, row-major with z fastest.
    pub fn worker_coords(&self, rank: usize) -> Coords {
        let mut c = [0; NDIM];
        let mut r = rank;
        for mu in (0..NDIM).rev() {
            c[mu] = r % self.grid[mu];
            r /= self.grid[mu];
        }
        c
    }

    pub fn rank_of(&self, coords: Coords) -> usize {
        coords
            .iter()
            .zip(self.grid.iter())
            .fold(0, |acc, (c, g)| acc * g + c)
    }

    /// Rank of the periodic neighbour of `rank` across `face`.
    pub fn neighbor_rank(&self, rank: usize, face: Face) -> usize {
        let mut c = self.worker_coords(rank);
        let g = self.grid[face.dir];
        c[face.dir] = match face.sign {
            Sign::Forward => (c[face.dir] + 1) % g,
            Sign::Backward => (c[face.dir] + g - 1) % g,
        };
        self.rank_of(c)
    }

    /// Lexicographic (t, x, y, z) index of a global site.
    pub fn global_index(&self, c: Coords) -> usize {
        c.iter()
            .zip(self.global.iter())
            .fold(0, |acc, (c, g)| acc * g + c)
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "global {} on grid {} (local {})",
            format_extents(&self.global),
            format_extents(&self.grid),
            format_extents(&self.local)
        )
    }
}

/// Where a neighbouring site lives in extended (interior + halo) storage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteRef {
    Interior(usize),
    Halo {
        face: Face,
        slot: usize,
        index: usize,
    },
}

impl SiteRef {
    pub fn storage_index(self) -> usize {
        match self {
            SiteRef::Interior(i) => i,
            SiteRef::Halo { index, .. } => index,
        }
    }
}

/// One worker's share of the lattice.
///
/// Interior sites are indexed lexicographically in (t, x, y, z) with `z`
/// fastest. Halo slots follow the interior as one contiguous slab per face,
/// in [`Face::index`] order; within a slab sites are ordered
/// lexicographically over the three remaining coordinates.
#[derive(Debug, Clone)]
pub struct Sublattice {
    geometry: Geometry,
    rank: usize,
    coords: Coords,
    origin: Coords,
    face_offsets: [usize; Face::COUNT],
    neighbors: Vec<[u32; Face::COUNT]>,
    send_slabs: Vec<Vec<u32>>,
}

impl Sublattice {
    pub fn new(geometry: &Geometry, rank: usize) -> Result<Self> {
        if rank >= geometry.workers() {
            return Err(Error::ContractViolation(format!(
                "rank {rank} outside a group of {} workers",
                geometry.workers()
            )));
        }
        let coords = geometry.worker_coords(rank);
        let local = geometry.local();
        let mut origin = [0; NDIM];
        for mu in 0..NDIM {
            origin[mu] = coords[mu] * local[mu];
        }
        let volume = geometry.local_volume();
        let mut face_offsets = [0; Face::COUNT];
        let mut off = volume;
        for f in Face::all() {
            face_offsets[f.index()] = off;
            off += geometry.face_sites(f.dir);
        }
        let mut sub = Self {
            geometry: geometry.clone(),
            rank,
            coords,
            origin,
            face_offsets,
            neighbors: Vec::new(),
            send_slabs: Vec::new(),
        };
        sub.neighbors = (0..volume)
            .map(|s| {
                let mut row = [0u32; Face::COUNT];
                for f in Face::all() {
                    row[f.index()] = sub.neighbor(s, f.dir, f.sign).storage_index() as u32;
                }
                row
            })
            .collect();
        // Slab sent to fill the *receiver's* halo on face f: the receiver's
        // +mu halo holds our x_mu = 0 layer, its -mu halo our x_mu = L-1 layer.
        sub.send_slabs = Face::all()
            .map(|f| {
                let layer = match f.sign {
                    Sign::Forward => 0,
                    Sign::Backward => local[f.dir] - 1,
                };
                (0..volume)
                    .filter(|&s| sub.local_coords(s)[f.dir] == layer)
                    .map(|s| s as u32)
                    .collect()
            })
            .collect();
        Ok(sub)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn worker_coords(&self) -> Coords {
        self.coords
    }

    pub fn volume(&self) -> usize {
        self.geometry.local_volume()
    }

    /// Interior plus halo sites.
    pub fn extended_volume(&self) -> usize {
        self.volume() + self.geometry.halo_sites()
    }

    pub fn face_offset(&self, face: Face) -> usize {
        self.face_offsets[face.index()]
    }

    pub fn local_coords(&self, site: usize) -> Coords {
        let local = self.geometry.local();
        let mut c = [0; NDIM];
        let mut r = site;
        for mu in (0..NDIM).rev() {
            c[mu] = r % local[mu];
            r /= local[mu];
        }
        c
    }

    pub fn local_index(&self, c: Coords) -> usize {
        c.iter()
            .zip(self.geometry.local().iter())
            .fold(0, |acc, (c, l)| acc * l + c)
    }

    fn face_slot(&self, c: &Coords, dir: usize) -> usize {
        let local = self.geometry.local();
        (0..NDIM)
            .filter(|&nu| nu != dir)
            .fold(0, |acc, nu| acc * local[nu] + c[nu])
    }

    /// Nearest neighbour of an interior site. Sites owned by this worker
    /// (including periodic wrap in undecomposed directions) resolve to the
    /// interior; anything else resolves to the halo slot of that face.
    pub fn neighbor(&self, site: usize, dir: usize, sign: Sign) -> SiteRef {
        let local = self.geometry.local();
        let mut c = self.local_coords(site);
        let decomposed = self.geometry.grid()[dir] > 1;
        match sign {
            Sign::Forward if c[dir] + 1 < local[dir] => c[dir] += 1,
            Sign::Backward if c[dir] > 0 => c[dir] -= 1,
            _ if !decomposed => {
                c[dir] = match sign {
                    Sign::Forward => 0,
                    Sign::Backward => local[dir] - 1,
                }
            }
            _ => {
                let face = Face::new(dir, sign);
                let slot = self.face_slot(&c, dir);
                return SiteRef::Halo {
                    face,
                    slot,
                    index: self.face_offset(face) + slot,
                };
            }
        }
        SiteRef::Interior(self.local_index(c))
    }

    /// Neighbour table in extended storage, one row per interior site in
    /// [`Face::index`] order.
    pub fn neighbor_table(&self) -> &[[u32; Face::COUNT]] {
        &self.neighbors
    }

    /// Interior sites whose values fill the receiving neighbour's halo on `face`.
    pub fn send_slab(&self, face: Face) -> &[u32] {
        &self.send_slabs[face.index()]
    }

    /// Global coordinates of any site in extended storage.
    pub fn global_coords(&self, index: usize) -> Coords {
        let global = self.geometry.global();
        let local = self.geometry.local();
        if index < self.volume() {
            let l = self.local_coords(index);
            let mut g = [0usize; NDIM];
            for mu in 0..NDIM {
                g[mu] = self.origin[mu] + l[mu];
            }
            return g;
        }
        let mut c = [0isize; NDIM];
        let face = Face::all()
            .filter(|f| index >= self.face_offset(*f))
            .last()
            .expect("halo index below first face offset");
        let mut slot = index - self.face_offset(face);
        for nu in (0..NDIM).rev() {
            if nu == face.dir {
                continue;
            }
            c[nu] = (slot % local[nu]) as isize;
            slot /= local[nu];
        }
        c[face.dir] = match face.sign {
            Sign::Forward => local[face.dir] as isize,
            Sign::Backward => -1,
        };
        let mut g = [0usize; NDIM];
        for mu in 0..NDIM {
            let v = self.origin[mu] as isize + c[mu];
            g[mu] = v.rem_euclid(global[mu] as isize) as usize;
        }
        g
    }

    pub fn global_index(&self, index: usize) -> usize {
        self.geometry.global_index(self.global_coords(index))
    }
}
