//! Per-site kernel bodies, generic over the scalar type.
//!
//! These are the only places where the benchmark does floating-point work
//! on fields. The field-level drivers call them with `f64`; the operation
//! counting oracle calls them with [`Counted`](super::counting::Counted).

use super::arith::{cadd, csub, czero, Cplx, LinkCoeff, Real};
use super::gamma::SpinProjectors;
use crate::lattice::{Face, NDIM, NSPIN};

/// `acc += Σ |z|²` over one site.
#[inline]
pub fn sqnorm_site<T: Real>(site: &[Cplx<T>], acc: &mut T) {
    for z in site {
        *acc += z.re * z.re + z.im * z.im;
    }
}

/// `psi2 += c * psi1` over one site.
#[inline]
pub fn mul_add_site<T: Real>(psi2: &mut [Cplx<T>], c: Cplx<T>, psi1: &[Cplx<T>]) {
    for (a, b) in psi2.iter_mut().zip(psi1) {
        super::arith::cmac(a, c, *b);
    }
}

/// Everything the Wilson stencil reads besides the input spinor.
pub struct DiracStencil<'a, T: Real, L: LinkCoeff<T>> {
    pub dim: usize,
    /// Extended-storage neighbour of every interior site, [`Face::index`] order.
    pub neighbors: &'a [[u32; Face::COUNT]],
    /// `U_mu(x)` row-major at `(x * 4 + mu) * dim²`, for every extended site.
    pub links: &'a [L],
    /// `4 + m`
    pub diagonal: T,
    pub projectors: &'a SpinProjectors,
}

/// Work buffers for [`dirac_site`]; allocate once per field sweep.
pub struct DiracScratch<T> {
    half: Vec<Cplx<T>>,
    product: Vec<Cplx<T>>,
    acc: Vec<Cplx<T>>,
}

impl<T: Real> DiracScratch<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            half: vec![czero(); 2 * dim],
            product: vec![czero(); 2 * dim],
            acc: vec![czero(); NSPIN * dim],
        }
    }
}

/// Wilson-Dirac operator at one interior site:
///
/// ```text
/// out(x) = (4 + m) in(x) - 1/2 Σ_mu [ (1 - γ_mu) U_mu(x) in(x + mu)
///                                   + (1 + γ_mu) U_mu(x - mu)† in(x - mu) ]
/// ```
///
/// Each hopping term projects onto two spin components, multiplies those by
/// the link and rebuilds the other two from the projector structure.
#[inline]
pub fn dirac_site<T: Real, L: LinkCoeff<T>>(
    st: &DiracStencil<'_, T, L>,
    site: usize,
    input: &[Cplx<T>],
    out: &mut [Cplx<T>],
    scratch: &mut DiracScratch<T>,
) {
    let d = st.dim;
    let sl = NSPIN * d;
    let dd = d * d;
    let DiracScratch { half, product, acc } = scratch;
    acc.fill(czero());

    for mu in 0..NDIM {
        let col = &st.projectors.col[mu];
        let phase = &st.projectors.phase[mu];
        for forward in [true, false] {
            let face = 2 * mu + usize::from(!forward);
            let nb = st.neighbors[site][face] as usize;
            let psi = &input[nb * sl..(nb + 1) * sl];

            // h_r = psi_r - s phase_r psi_col(r), s = +1 forward, -1 backward
            for r in 0..2 {
                let p = if forward { phase[r] } else { -phase[r] };
                let src = &psi[col[r] * d..(col[r] + 1) * d];
                for a in 0..d {
                    half[r * d + a] = csub(psi[r * d + a], p.apply(src[a]));
                }
            }

            product.fill(czero());
            if forward {
                let u = &st.links[(site * NDIM + mu) * dd..(site * NDIM + mu + 1) * dd];
                for (dst, h) in product.chunks_exact_mut(d).zip(half.chunks_exact(d)) {
                    for (p, row) in dst.iter_mut().zip(u.chunks_exact(d)) {
                        for (&l, &x) in row.iter().zip(h) {
                            L::mac(p, l, x);
                        }
                    }
                }
            } else {
                let u = &st.links[(nb * NDIM + mu) * dd..(nb * NDIM + mu + 1) * dd];
                // (U†h)_a = Σ_b conj(U_ba) h_b, accumulated row by row of U
                for (dst, h) in product.chunks_exact_mut(d).zip(half.chunks_exact(d)) {
                    for (row, &x) in u.chunks_exact(d).zip(h) {
                        for (p, &l) in dst.iter_mut().zip(row) {
                            L::mac_conj(p, l, x);
                        }
                    }
                }
            }

            for k in 0..2 * d {
                acc[k] = cadd(acc[k], product[k]);
            }
            // lower components: -s phase_r product_col(r)
            for r in 2..NSPIN {
                let p = if forward { -phase[r] } else { phase[r] };
                let src = col[r];
                for a in 0..d {
                    acc[r * d + a] = cadd(acc[r * d + a], p.apply(product[src * d + a]));
                }
            }
        }
    }

    let own = &input[site * sl..(site + 1) * sl];
    let half_coeff = T::from_f64(0.5);
    for k in 0..sl {
        let mut z = Cplx::new(st.diagonal * own[k].re, st.diagonal * own[k].im);
        z.re -= half_coeff * acc[k].re;
        z.im -= half_coeff * acc[k].im;
        out[k] = z;
    }
}
