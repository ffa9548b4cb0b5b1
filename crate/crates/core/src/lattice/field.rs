use std::sync::Arc;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use super::geometry::{Sublattice, NDIM};
use super::rng::{site_rng, Stream};
use crate::error::{Error, Result};
use crate::group::{random_group_element, rep_dim, represent, RepMatrix, Representation};

/// Spin components per site.
pub const NSPIN: usize = 4;

/// Fermion field: `4 x D_R` complex numbers per site, interior then halo.
///
/// Component `(spin, color)` of extended site `s` lives at
/// `s * 4 * D_R + spin * D_R + color`.
#[derive(Debug, Clone)]
pub struct SpinorField {
    lattice: Arc<Sublattice>,
    dim: usize,
    data: Vec<Complex64>,
}

impl SpinorField {
    pub fn zeros(lattice: &Arc<Sublattice>, dim: usize) -> Self {
        Self {
            lattice: Arc::clone(lattice),
            dim,
            data: vec![Complex64::new(0.0, 0.0); lattice.extended_volume() * NSPIN * dim],
        }
    }

    pub fn lattice(&self) -> &Arc<Sublattice> {
        &self.lattice
    }

    /// Colour dimension `D_R`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn site_len(&self) -> usize {
        NSPIN * self.dim
    }

    /// Whole extended storage (interior followed by halo slabs).
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn interior(&self) -> &[Complex64] {
        &self.data[..self.lattice.volume() * self.site_len()]
    }

    pub fn interior_mut(&mut self) -> &mut [Complex64] {
        let n = self.lattice.volume() * self.site_len();
        &mut self.data[..n]
    }

    pub fn halo(&self) -> &[Complex64] {
        &self.data[self.lattice.volume() * self.site_len()..]
    }

    pub fn site(&self, index: usize) -> &[Complex64] {
        let l = self.site_len();
        &self.data[index * l..(index + 1) * l]
    }

    pub fn site_mut(&mut self, index: usize) -> &mut [Complex64] {
        let l = self.site_len();
        &mut self.data[index * l..(index + 1) * l]
    }

    /// True when both fields live on the same sub-lattice shape and colour dimension.
    pub fn compatible(&self, other: &SpinorField) -> bool {
        self.dim == other.dim
            && (Arc::ptr_eq(&self.lattice, &other.lattice)
                || (self.lattice.geometry() == other.lattice.geometry()
                    && self.lattice.rank() == other.lattice.rank()))
    }

    pub fn ensure_compatible(&self, other: &SpinorField) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::ContractViolation(
                "spinor fields live on different lattices or representations".into(),
            ))
        }
    }

    pub fn copy_from(&mut self, other: &SpinorField) -> Result<()> {
        self.ensure_compatible(other)?;
        self.data.copy_from_slice(&other.data);
        Ok(())
    }

    pub fn fill_zero(&mut self) {
        self.data.fill(Complex64::new(0.0, 0.0));
    }

    /// Applies `γ5 = diag(-1, -1, 1, 1)` to every interior site.
    pub fn apply_gamma5(&mut self) {
        let d = self.dim;
        let l = self.site_len();
        for site in self.interior_mut().chunks_exact_mut(l) {
            for z in &mut site[..2 * d] {
                *z = -*z;
            }
        }
    }
}

/// Fills a spinor field from streams keyed by `(seed, field_index, global site)`.
/// Halo slots are left at zero.
pub fn init_spinor_random(
    lattice: &Arc<Sublattice>,
    dim: usize,
    seed: u64,
    field_index: u64,
) -> SpinorField {
    let mut field = SpinorField::zeros(lattice, dim);
    for s in 0..lattice.volume() {
        let mut rng = site_rng(
            seed,
            Stream::Spinor { field: field_index },
            lattice.global_index(s) as u64,
        );
        for z in field.site_mut(s) {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *z = Complex64::new(re, im);
        }
    }
    field
}

/// Link storage, `D_R x D_R` row-major per (extended site, direction).
#[derive(Debug, Clone, PartialEq)]
pub enum LinkStore {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// Represented gauge links on interior and halo sites.
#[derive(Debug, Clone)]
pub struct GaugeField {
    lattice: Arc<Sublattice>,
    n: usize,
    rep: Representation,
    dim: usize,
    links: LinkStore,
}

impl GaugeField {
    fn from_fn<F>(
        lattice: &Arc<Sublattice>,
        n: usize,
        rep: Representation,
        mut link: F,
    ) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<RepMatrix>,
    {
        let dim = rep_dim(rep, n)?;
        let count = lattice.extended_volume() * NDIM;
        let mut links = if rep.is_real() {
            LinkStore::Real(Vec::with_capacity(count * dim * dim))
        } else {
            LinkStore::Complex(Vec::with_capacity(count * dim * dim))
        };
        for s in 0..lattice.extended_volume() {
            for mu in 0..NDIM {
                let m = link(s, mu)?;
                match &mut links {
                    LinkStore::Real(v) => {
                        v.extend(m.row_major_real().expect("adjoint links are real"))
                    }
                    LinkStore::Complex(v) => v.extend(m.row_major_complex()),
                }
            }
        }
        Ok(Self {
            lattice: Arc::clone(lattice),
            n,
            rep,
            dim,
            links,
        })
    }

    /// Every link set to the identity.
    pub fn unit(lattice: &Arc<Sublattice>, n: usize, rep: Representation) -> Result<Self> {
        let dim = rep_dim(rep, n)?;
        let one = RepMatrix::identity(dim, rep.is_real());
        Self::from_fn(lattice, n, rep, |_, _| Ok(one.clone()))
    }

    pub fn lattice(&self) -> &Arc<Sublattice> {
        &self.lattice
    }

    /// Group rank N.
    pub fn group_rank(&self) -> usize {
        self.n
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn links(&self) -> &LinkStore {
        &self.links
    }

    pub fn links_mut(&mut self) -> &mut LinkStore {
        &mut self.links
    }

    /// Entries per (site, direction) block.
    pub fn link_len(&self) -> usize {
        self.dim * self.dim
    }

    /// Link `U_mu(site)` as a dense matrix.
    pub fn link(&self, site: usize, dir: usize) -> RepMatrix {
        let d = self.dim;
        let off = (site * NDIM + dir) * d * d;
        match &self.links {
            LinkStore::Real(v) => RepMatrix::from_row_major_real(d, &v[off..off + d * d]),
            LinkStore::Complex(v) => RepMatrix::from_row_major_complex(d, &v[off..off + d * d]),
        }
    }
}

/// Random gauge field. Each global link `U_mu(x)` comes from a stream keyed
/// by `(seed, mu, x)`, so halo copies agree with the owning worker.
pub fn init_gauge_random(
    lattice: &Arc<Sublattice>,
    n: usize,
    rep: Representation,
    seed: u64,
) -> Result<GaugeField> {
    GaugeField::from_fn(lattice, n, rep, |s, mu| {
        let mut rng = site_rng(
            seed,
            Stream::Gauge { dir: mu as u64 },
            lattice.global_index(s) as u64,
        );
        let u = random_group_element(n, &mut rng)?;
        represent(&u, rep)
    })
}
