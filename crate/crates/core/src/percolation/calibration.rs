//! Simple-cubic bond percolation, a reference model with a well-known
//! threshold near 0.2488.

use rand::RngCore;

use super::UnionFind;
use crate::lattice::Dims;
use crate::rng::Threshold;

#[derive(Clone, Debug)]
pub struct CubicBondBuilder {
    dims: Dims,
    keep: Threshold,
}

impl CubicBondBuilder {
    pub fn new(dims: Dims, p: f64) -> Self {
        CubicBondBuilder { dims, keep: Threshold::new(p) }
    }

    /// One uniform per potential bond (+x, +y, +z from each site, in-range
    /// only), site by site.
    pub fn spans<R: RngCore + ?Sized>(&self, rng: &mut R) -> bool {
        let d = self.dims;
        if d.lx <= 1 {
            return true;
        }
        let n = d.sites();
        let mut uf = UnionFind::new(n + 2);
        let (sx, sy) = (1, d.lx);
        let sz = d.lx * d.ly;
        for z in 0..d.lz {
            for y in 0..d.ly {
                for x in 0..d.lx {
                    let i = x + d.lx * (y + d.ly * z);
                    if x + 1 < d.lx && self.keep.draw(rng) {
                        uf.union(i as u32, (i + sx) as u32);
                    }
                    if y + 1 < d.ly && self.keep.draw(rng) {
                        uf.union(i as u32, (i + sy) as u32);
                    }
                    if z + 1 < d.lz && self.keep.draw(rng) {
                        uf.union(i as u32, (i + sz) as u32);
                    }
                }
                let row = d.lx * (y + d.ly * z);
                uf.union(row as u32, n as u32);
                uf.union((row + d.lx - 1) as u32, n as u32 + 1);
            }
        }
        uf.connected(n as u32, n as u32 + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::run_rng;

    #[test]
    fn extremes() {
        let d = Dims::cube(5);
        assert!(CubicBondBuilder::new(d, 1.0).spans(&mut run_rng(0, 0)));
        assert!(!CubicBondBuilder::new(d, 0.0).spans(&mut run_rng(0, 0)));
    }
}
