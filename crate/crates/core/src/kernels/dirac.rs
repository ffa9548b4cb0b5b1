use super::gamma::SpinProjectors;
use super::site::{dirac_site, DiracScratch, DiracStencil};
use crate::error::{Error, Result};
use crate::lattice::{GaugeField, LinkStore, SpinorField};
use crate::transport::{halo_exchange, ExchangePlan, WorkerGroup};

/// Wilson-Dirac operator on a fixed gauge background.
#[derive(Debug, Clone)]
pub struct WilsonDirac<'a> {
    gauge: &'a GaugeField,
    mass: f64,
    projectors: SpinProjectors,
    plan: ExchangePlan,
}

impl<'a> WilsonDirac<'a> {
    pub fn new(gauge: &'a GaugeField, mass: f64) -> Self {
        Self::with_projectors(gauge, mass, SpinProjectors::default())
    }

    /// Uses a custom spin structure (another basis, or a deliberately broken one).
    pub fn with_projectors(gauge: &'a GaugeField, mass: f64, projectors: SpinProjectors) -> Self {
        let plan = ExchangePlan::new(gauge.lattice(), gauge.dim());
        Self {
            gauge,
            mass,
            projectors,
            plan,
        }
    }

    pub fn gauge(&self) -> &GaugeField {
        self.gauge
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn plan(&self) -> &ExchangePlan {
        &self.plan
    }

    fn check(&self, out: &SpinorField, input: &SpinorField) -> Result<()> {
        if input.dim() != self.gauge.dim() {
            return Err(Error::ContractViolation(format!(
                "spinor colour dimension {} does not match the {} gauge field (dimension {})",
                input.dim(),
                self.gauge.representation(),
                self.gauge.dim()
            )));
        }
        let (a, b) = (input.lattice(), self.gauge.lattice());
        if a.geometry() != b.geometry() || a.rank() != b.rank() {
            return Err(Error::ContractViolation(
                "spinor and gauge fields live on different lattices".into(),
            ));
        }
        out.ensure_compatible(input)
    }

    /// `out = D input`. Refreshes the halo of `input` first (collective).
    pub fn apply(
        &self,
        out: &mut SpinorField,
        input: &mut SpinorField,
        group: &mut WorkerGroup,
    ) -> Result<()> {
        self.check(out, input)?;
        halo_exchange(group, input, &self.plan)?;
        self.apply_local(out, input);
        Ok(())
    }

    /// Stencil sweep only; `input` halos must already be current.
    pub fn apply_local(&self, out: &mut SpinorField, input: &SpinorField) {
        let lattice = input.lattice();
        let dim = input.dim();
        let sl = input.site_len();
        let neighbors = lattice.neighbor_table();
        let volume = lattice.volume();
        let out_data = &mut out.interior_mut()[..volume * sl];
        match self.gauge.links() {
            LinkStore::Real(links) => {
                let st = DiracStencil {
                    dim,
                    neighbors,
                    links: links.as_slice(),
                    diagonal: 4.0 + self.mass,
                    projectors: &self.projectors,
                };
                let mut scratch = DiracScratch::new(dim);
                for (site, o) in out_data.chunks_exact_mut(sl).enumerate() {
                    dirac_site(&st, site, input.data(), o, &mut scratch);
                }
            }
            LinkStore::Complex(links) => {
                let st = DiracStencil {
                    dim,
                    neighbors,
                    links: links.as_slice(),
                    diagonal: 4.0 + self.mass,
                    projectors: &self.projectors,
                };
                let mut scratch = DiracScratch::new(dim);
                for (site, o) in out_data.chunks_exact_mut(sl).enumerate() {
                    dirac_site(&st, site, input.data(), o, &mut scratch);
                }
            }
        }
    }
}

/// `out = D input` for the Wilson operator with bare mass `mass`.
pub fn apply_dirac(
    out: &mut SpinorField,
    gauge: &GaugeField,
    input: &mut SpinorField,
    mass: f64,
    group: &mut WorkerGroup,
) -> Result<()> {
    WilsonDirac::new(gauge, mass).apply(out, input, group)
}
