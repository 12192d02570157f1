//! Brickwork (diamond) lattice of star microclusters.
//!
//! Every site has two X arms and two transverse arms. Even-parity sites send
//! T1 to `+y` and T2 to `+z`; odd-parity sites send them to `-y` and `-z`.
//! Boundaries are open and spanning is measured along `x`.

use std::fmt::Write as _;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::fusion::{FusionKind, FusionResult, GateParams, GateSampler, LossScope};
use crate::microcluster::{build_site, ArmAssignment, ArmSlot, ArmState, SiteOutcome, SiteRules};
use crate::rng::Threshold;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub lx: usize,
    pub ly: usize,
    pub lz: usize,
}

impl Dims {
    pub fn new(lx: usize, ly: usize, lz: usize) -> Self {
        Dims { lx, ly, lz }
    }

    pub fn cube(l: usize) -> Self {
        Dims { lx: l, ly: l, lz: l }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.lx == 0 || self.ly == 0 || self.lz == 0 {
            return Err(format!("dimensions must be at least 1, got {}x{}x{}", self.lx, self.ly, self.lz));
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.lx * self.ly * self.lz
    }

    pub fn index(&self, c: SiteCoord) -> usize {
        c.x + self.lx * (c.y + self.ly * c.z)
    }

    pub fn coord(&self, i: usize) -> SiteCoord {
        SiteCoord { x: i % self.lx, y: i / self.lx % self.ly, z: i / (self.lx * self.ly) }
    }

    pub fn contains(&self, c: SiteCoord) -> bool {
        c.x < self.lx && c.y < self.ly && c.z < self.lz
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteCoord {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl SiteCoord {
    pub fn new(x: usize, y: usize, z: usize) -> Self {
        SiteCoord { x, y, z }
    }

    pub fn parity(&self) -> usize {
        (self.x + self.y + self.z) % 2
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("site {0:?} lies outside the lattice")]
    OutOfRange(SiteCoord),
}

fn step(c: SiteCoord, slot: ArmSlot) -> Option<SiteCoord> {
    let up = c.parity() == 0;
    let mv = |v: usize, forward: bool| if forward { v.checked_add(1) } else { v.checked_sub(1) };
    Some(match slot {
        ArmSlot::MinusX => SiteCoord { x: c.x.checked_sub(1)?, ..c },
        ArmSlot::PlusX => SiteCoord { x: c.x + 1, ..c },
        ArmSlot::T1 => SiteCoord { y: mv(c.y, up)?, ..c },
        ArmSlot::T2 => SiteCoord { z: mv(c.z, up)?, ..c },
    })
}

/// Slot on the neighbouring site that faces `slot`.
pub fn facing(slot: ArmSlot) -> ArmSlot {
    match slot {
        ArmSlot::MinusX => ArmSlot::PlusX,
        ArmSlot::PlusX => ArmSlot::MinusX,
        s => s,
    }
}

/// In-range neighbours of `c`, each with the slot of `c` that points at it.
pub fn neighbors(c: SiteCoord, d: Dims) -> Result<Vec<(SiteCoord, ArmSlot)>, LatticeError> {
    if !d.contains(c) {
        return Err(LatticeError::OutOfRange(c));
    }
    Ok(ArmSlot::ALL
        .into_iter()
        .filter_map(|s| step(c, s).filter(|n| d.contains(*n)).map(|n| (n, s)))
        .collect())
}

/// Every geometric bond once, from the endpoint that reaches it via `+X`,
/// or via a transverse slot on an even site. Raster order.
pub fn geometric_bonds(d: Dims) -> Vec<(usize, ArmSlot, usize)> {
    let mut out = Vec::with_capacity(d.sites() * 2);
    for i in 0..d.sites() {
        let c = d.coord(i);
        for s in [ArmSlot::PlusX, ArmSlot::T1, ArmSlot::T2] {
            if s != ArmSlot::PlusX && c.parity() != 0 {
                continue;
            }
            if let Some(n) = step(c, s).filter(|n| d.contains(*n)) {
                out.push((i, s, d.index(n)));
            }
        }
    }
    out
}

pub fn lattice_adjacent(d: Dims, a: usize, b: usize) -> bool {
    neighbors(d.coord(a), d).map(|ns| ns.iter().any(|(n, _)| d.index(*n) == b)).unwrap_or(false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LossMode {
    /// Gate photons are lost; damage is cut out by Z measurements.
    #[default]
    Unheralded,
    /// Final-cluster sites are deleted; no neighbour penalty.
    Heralded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LossRemedy {
    /// Both arms' centre-side neighbours are measured in Z.
    #[default]
    ZCut,
    /// The bond is lost, nothing else.
    VoidBond,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossSpec {
    pub p_loss: f64,
    pub scope: LossScope,
    pub mode: LossMode,
    pub remedy: LossRemedy,
    /// Also lose each site's centre photon with `p_loss` (unheralded mode).
    pub center_loss: bool,
}

impl Default for LossSpec {
    fn default() -> Self {
        LossSpec {
            p_loss: 0.0,
            scope: LossScope::DataAndAncilla,
            mode: LossMode::Unheralded,
            remedy: LossRemedy::ZCut,
            center_loss: false,
        }
    }
}

impl LossSpec {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn unheralded(p_loss: f64) -> Self {
        LossSpec { p_loss, ..Default::default() }
    }

    pub fn heralded(p_loss: f64) -> Self {
        LossSpec { p_loss, mode: LossMode::Heralded, ..Default::default() }
    }

    /// Loss probability applied to gate photons.
    pub fn gate_loss(&self) -> f64 {
        match self.mode {
            LossMode::Unheralded => self.p_loss,
            LossMode::Heralded => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BondKind {
    /// Direct fusion of two attached arms.
    Lattice,
    /// Produced through one or more detached pairs.
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bond {
    pub a: u32,
    pub b: u32,
    pub kind: BondKind,
}

/// One fusion between arm `a.1` of site `a.0` (first data photon) and arm
/// `b.1` of site `b.0` (second data photon).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExternalFusion {
    pub a: (usize, ArmSlot),
    pub b: (usize, ArmSlot),
    pub result: FusionResult,
}

/// Owner-level edges after all fusions, independent of geometry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assembly {
    pub bonds: Vec<Bond>,
    /// Sites whose centre was cut out by a gate-loss remedy.
    pub removed: Vec<bool>,
    /// Detached pairs `(site, first slot)` each diagonal bond runs through.
    pub routes: Vec<(u32, u32, ArmSlot)>,
}

const NONE: u32 = u32::MAX;

/// Applies external fusion outcomes to built sites.
///
/// Losses are handled first, then failures, then successes; each stage only
/// removes structure, so the result does not depend on gate order. A success
/// toggles the edge between the two arms' owners (a centre, or a detached
/// pair that relays to its partner's owner). Edges produced twice cancel.
pub fn assemble(
    sites: &mut [SiteOutcome],
    fusions: &[ExternalFusion],
    rules: &SiteRules,
    remedy: LossRemedy,
) -> Assembly {
    let n = sites.len();
    let mut removed = vec![false; n];
    let kill_center = |sites: &mut [SiteOutcome], s: usize| {
        for a in sites[s].arms.iter_mut() {
            if *a == ArmState::Attached {
                *a = ArmState::Dead;
            }
        }
    };
    let kill_pair = |sites: &mut [SiteOutcome], s: usize, slot: ArmSlot| {
        if let ArmState::Paired(t) = sites[s].arm(slot) {
            sites[s].arms[t.index()] = ArmState::Dead;
        }
        sites[s].arms[slot.index()] = ArmState::Dead;
    };

    for f in fusions.iter().filter(|f| f.result.kind == FusionKind::LossDetected) {
        for (s, slot) in [f.a, f.b] {
            match (remedy, sites[s].arm(slot)) {
                (LossRemedy::ZCut, ArmState::Attached) => {
                    removed[s] = true;
                    kill_center(sites, s);
                }
                (LossRemedy::ZCut, ArmState::Paired(_)) => kill_pair(sites, s, slot),
                (LossRemedy::VoidBond, ArmState::Paired(_)) => kill_pair(sites, s, slot),
                (_, _) => sites[s].arms[slot.index()] = ArmState::Dead,
            }
        }
    }
    for f in fusions.iter().filter(|f| f.result.kind == FusionKind::Failure) {
        for (role, (s, slot)) in [f.a, f.b].into_iter().enumerate() {
            match sites[s].arm(slot) {
                ArmState::Attached if rules.external_fail_cuts_center[role] => kill_center(sites, s),
                ArmState::Attached | ArmState::Dead => sites[s].arms[slot.index()] = ArmState::Dead,
                ArmState::Paired(_) => kill_pair(sites, s, slot),
            }
        }
    }

    // Ports: centres are nodes 0..n; detached-pair member (s, slot) is node
    // n + 4s + slot. `link[4s + slot]` is the node across that member's fusion.
    let mut bonds = Vec::new();
    let mut link: Vec<u32> = Vec::new();
    let mut lattice_at = vec![NONE; 4 * n];
    let owner = |sites: &[SiteOutcome], (s, slot): (usize, ArmSlot)| -> Option<u32> {
        match sites[s].arm(slot) {
            ArmState::Attached => Some(s as u32),
            ArmState::Paired(_) => Some((n + 4 * s + slot.index()) as u32),
            ArmState::Dead => None,
        }
    };
    let mut center_to_pair: Vec<(u32, u32)> = Vec::new();
    for f in fusions.iter().filter(|f| f.result.kind == FusionKind::Success) {
        let (Some(oa), Some(ob)) = (owner(sites, f.a), owner(sites, f.b)) else {
            continue;
        };
        let (ca, cb) = ((oa as usize) < n, (ob as usize) < n);
        if ca && cb {
            if oa == ob {
                continue;
            }
            // A second fusion between the same two centres cancels the first.
            let (sa, sb) = (f.a.0, f.b.0);
            if let Some(k) = (0..4).find(|&k| {
                let bi = lattice_at[4 * sa + k];
                bi != NONE && {
                    let bd = bonds[bi as usize];
                    let Bond { a, b, .. } = bd;
                    (a as usize == sa && b as usize == sb) || (a as usize == sb && b as usize == sa)
                }
            }) {
                let bi = lattice_at[4 * sa + k] as usize;
                bonds[bi] = Bond { a: NONE, b: NONE, kind: BondKind::Lattice };
                lattice_at[4 * sa + k] = NONE;
                continue;
            }
            let bi = bonds.len() as u32;
            lattice_at[4 * sa + f.a.1.index()] = bi;
            lattice_at[4 * sb + f.b.1.index()] = bi;
            bonds.push(Bond { a: oa, b: ob, kind: BondKind::Lattice });
            continue;
        }
        if link.is_empty() {
            link = vec![NONE; 4 * n];
        }
        if !ca {
            link[oa as usize - n] = ob;
        }
        if !cb {
            link[ob as usize - n] = oa;
        }
        if ca {
            center_to_pair.push((oa, ob));
        }
        if cb {
            center_to_pair.push((ob, oa));
        }
    }

    // Walk relay chains from each centre; each chain is seen from both ends
    // and kept from the lower-numbered one.
    let partner_port = |sites: &[SiteOutcome], port: u32| -> u32 {
        let p = port as usize - n;
        let (s, slot) = (p / 4, ArmSlot::from_index(p % 4));
        match sites[s].arm(slot) {
            ArmState::Paired(t) => (n + 4 * s + t.index()) as u32,
            _ => unreachable!("relay port must be paired"),
        }
    };
    let mut diagonals: Vec<(u32, u32, usize, usize)> = Vec::new();
    let mut route_buf: Vec<(u32, ArmSlot)> = Vec::new();
    for &(u, first) in &center_to_pair {
        let mut port = first;
        let start = route_buf.len();
        let end = loop {
            let p = port as usize - n;
            let (s, slot) = (p / 4, ArmSlot::from_index(p % 4));
            let mate = partner_port(sites, port);
            let lo = slot.min(ArmSlot::from_index((mate as usize - n) % 4));
            route_buf.push((s as u32, lo));
            let next = link[mate as usize - n];
            if next == NONE {
                break None;
            }
            if (next as usize) < n {
                break Some(next);
            }
            port = next;
            if route_buf.len() - start > 2 * n {
                break None;
            }
        };
        match end {
            Some(v) if u < v => diagonals.push((u, v, start, route_buf.len())),
            _ => route_buf.truncate(start),
        }
    }

    let mut routes = Vec::new();
    if !diagonals.is_empty() {
        diagonals.sort_unstable();
        let mut i = 0;
        let mut kept: Vec<(u32, u32, usize, usize)> = Vec::new();
        while i < diagonals.len() {
            let mut j = i;
            while j < diagonals.len() && diagonals[j].0 == diagonals[i].0 && diagonals[j].1 == diagonals[i].1 {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                kept.push(diagonals[i]);
            }
            i = j;
        }
        for (u, v, r0, r1) in kept {
            let clash = (0..4).find(|&k| {
                let bi = lattice_at[4 * u as usize + k];
                bi != NONE && {
                    let b = bonds[bi as usize];
                    (b.a == u && b.b == v) || (b.a == v && b.b == u)
                }
            });
            if let Some(k) = clash {
                let bi = lattice_at[4 * u as usize + k] as usize;
                bonds[bi].a = NONE;
                continue;
            }
            let bi = bonds.len() as u32;
            bonds.push(Bond { a: u, b: v, kind: BondKind::Diagonal });
            for &(s, slot) in &route_buf[r0..r1] {
                routes.push((bi, s, slot));
            }
        }
    }
    if bonds.iter().any(|b| b.a == NONE) {
        // Compact away cancelled bonds, keeping route indices valid.
        let mut remap = vec![NONE; bonds.len()];
        let mut out = Vec::with_capacity(bonds.len());
        for (i, b) in bonds.iter().enumerate() {
            if b.a != NONE {
                remap[i] = out.len() as u32;
                out.push(*b);
            }
        }
        bonds = out;
        for r in routes.iter_mut() {
            r.0 = remap[r.0 as usize];
        }
    }
    Assembly { bonds, removed, routes }
}

/// Surviving centres and the bonds between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PercolationGraph {
    pub dims: Dims,
    pub sites: Vec<SiteOutcome>,
    pub bonds: Vec<Bond>,
    /// Sites excised by loss processing.
    pub removed: Vec<bool>,
    /// Detached pairs `(bond, site, lower slot)` behind each diagonal bond.
    pub routes: Vec<(u32, u32, ArmSlot)>,
}

impl PercolationGraph {
    pub fn is_live(&self, s: usize) -> bool {
        self.sites[s].center_alive && !self.removed[s]
    }

    pub fn count(&self, kind: BondKind) -> usize {
        self.bonds.iter().filter(|b| b.kind == kind).count()
    }

    /// Removes every site flagged in `drop` together with its bonds.
    pub fn remove_sites(&mut self, drop: &[bool]) {
        for (r, &d) in self.removed.iter_mut().zip(drop) {
            *r |= d;
        }
        self.prune();
    }

    fn prune(&mut self) {
        let removed = &self.removed;
        let sites = &self.sites;
        let live = |s: u32| sites[s as usize].center_alive && !removed[s as usize];
        let mut remap = Vec::with_capacity(self.bonds.len());
        let mut kept = Vec::with_capacity(self.bonds.len());
        for b in &self.bonds {
            if live(b.a) && live(b.b) {
                remap.push(kept.len() as u32);
                kept.push(*b);
            } else {
                remap.push(NONE);
            }
        }
        self.bonds = kept;
        self.routes.retain_mut(|r| {
            r.0 = remap[r.0 as usize];
            r.0 != NONE
        });
    }

    /// Debug check of the structural invariants.
    pub fn validate(&self) -> Result<(), String> {
        for b in &self.bonds {
            for s in [b.a, b.b] {
                if !self.is_live(s as usize) {
                    return Err(format!("bond {b:?} touches dead or removed site {s}"));
                }
            }
            if b.a == b.b {
                return Err(format!("self bond at {}", b.a));
            }
        }
        for s in &self.sites {
            s.validate()?;
        }
        Ok(())
    }

    pub fn dump(&self) -> String {
        let d = self.dims;
        let mut out = format!("dims {} {} {}\n", d.lx, d.ly, d.lz);
        for (i, s) in self.sites.iter().enumerate() {
            let c = d.coord(i);
            let class = if self.removed[i] { "removed" } else { s.class().name() };
            writeln!(out, "site {} {} {} {}", c.x, c.y, c.z, class).unwrap();
        }
        for b in &self.bonds {
            let (p, q) = (d.coord(b.a as usize), d.coord(b.b as usize));
            let kind = match b.kind {
                BondKind::Lattice => "lattice",
                BondKind::Diagonal => "diagonal",
            };
            writeln!(out, "bond {} {} {} {} {} {} {}", p.x, p.y, p.z, q.x, q.y, q.z, kind).unwrap();
        }
        out
    }
}

/// Precomputed per-configuration state for repeated instance builds.
#[derive(Clone, Debug)]
pub struct LatticeBuilder {
    pub dims: Dims,
    pub assignment: ArmAssignment,
    pub loss: LossSpec,
    sampler: GateSampler,
    rules: SiteRules,
    bonds: Vec<(usize, ArmSlot, usize)>,
    site_loss: Threshold,
}

impl LatticeBuilder {
    pub fn new(dims: Dims, gate: &GateParams, loss: &LossSpec, assignment: &ArmAssignment) -> Self {
        LatticeBuilder {
            dims,
            assignment: *assignment,
            loss: *loss,
            sampler: GateSampler::new(gate, loss.gate_loss(), loss.scope),
            rules: SiteRules::new(gate),
            bonds: geometric_bonds(dims),
            site_loss: Threshold::new(loss.p_loss),
        }
    }

    /// Sites first (two gates each), then bonds in raster order, then one
    /// uniform per site for site-level loss. The number of draws is fixed.
    pub fn build<R: RngCore + ?Sized>(&self, rng: &mut R) -> PercolationGraph {
        let d = self.dims;
        let mut sites: Vec<SiteOutcome> = (0..d.sites())
            .map(|_| build_site(&self.sampler, &self.rules, &self.assignment, rng))
            .collect();
        let fusions: Vec<ExternalFusion> = self
            .bonds
            .iter()
            .map(|&(a, slot, b)| ExternalFusion {
                a: (a, slot),
                b: (b, facing(slot)),
                result: self.sampler.sample(rng),
            })
            .collect();
        let asm = assemble(&mut sites, &fusions, &self.rules, self.loss.remedy);
        let mut g = PercolationGraph {
            dims: d,
            sites,
            bonds: asm.bonds,
            removed: asm.removed,
            routes: asm.routes,
        };
        g.prune();
        let site_hits: Vec<bool> = (0..d.sites()).map(|_| self.site_loss.draw(rng)).collect();
        match self.loss.mode {
            LossMode::Heralded => g.remove_sites(&site_hits),
            LossMode::Unheralded if self.loss.center_loss => {
                let lost: Vec<LostPhoton> = site_hits
                    .iter()
                    .enumerate()
                    .filter(|(_, &h)| h)
                    .map(|(s, _)| LostPhoton::Center(s))
                    .collect();
                apply_unheralded_loss(&mut g, &lost);
            }
            LossMode::Unheralded => {}
        }
        debug_assert!(g.validate().is_ok(), "{:?}", g.validate());
        g
    }
}

pub fn build_instance<R: RngCore + ?Sized>(
    dims: Dims,
    gate: &GateParams,
    loss: &LossSpec,
    assignment: &ArmAssignment,
    rng: &mut R,
) -> PercolationGraph {
    LatticeBuilder::new(dims, gate, loss, assignment).build(rng)
}

/// A lost photon located in the final cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LostPhoton {
    Center(usize),
    Arm(usize, ArmSlot),
}

/// Cuts lost photons out of a built graph by Z-measuring their neighbours.
///
/// A lost centre takes its bonded partners with it. A lost arm on a centre
/// removes that centre; a lost arm in a detached pair voids the diagonal
/// bonds relayed through the pair.
pub fn apply_unheralded_loss(g: &mut PercolationGraph, lost: &[LostPhoton]) {
    if lost.is_empty() {
        return;
    }
    let n = g.sites.len();
    let mut drop = vec![false; n];
    let mut void = vec![false; g.bonds.len()];
    for &l in lost {
        match l {
            LostPhoton::Center(s) => {
                drop[s] = true;
                for b in &g.bonds {
                    if b.a as usize == s {
                        drop[b.b as usize] = true;
                    } else if b.b as usize == s {
                        drop[b.a as usize] = true;
                    }
                }
            }
            LostPhoton::Arm(s, slot) => match g.sites[s].arm(slot) {
                ArmState::Attached => drop[s] = true,
                ArmState::Paired(t) => {
                    let lo = slot.min(t);
                    for &(bi, rs, rslot) in &g.routes {
                        if rs as usize == s && rslot == lo {
                            void[bi as usize] = true;
                        }
                    }
                }
                ArmState::Dead => {}
            },
        }
    }
    if void.iter().any(|&v| v) {
        let mut i = 0;
        let mut remap = Vec::with_capacity(g.bonds.len());
        let mut kept = Vec::with_capacity(g.bonds.len());
        for b in &g.bonds {
            if void[i] {
                remap.push(NONE);
            } else {
                remap.push(kept.len() as u32);
                kept.push(*b);
            }
            i += 1;
        }
        g.bonds = kept;
        g.routes.retain_mut(|r| {
            r.0 = remap[r.0 as usize];
            r.0 != NONE
        });
    }
    g.remove_sites(&drop);
}

/// Deletes each site independently with probability `p_loss`.
pub fn apply_heralded_loss<R: RngCore + ?Sized>(g: &mut PercolationGraph, p_loss: f64, rng: &mut R) {
    let t = Threshold::new(p_loss);
    let drop: Vec<bool> = (0..g.sites.len()).map(|_| t.draw(rng)).collect();
    g.remove_sites(&drop);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::PhotonRole;
    use crate::microcluster::default_assignment;
    use crate::rng::run_rng;

    #[test]
    fn corner_neighbours() {
        let d = Dims::cube(3);
        let ns = neighbors(SiteCoord::new(0, 0, 0), d).unwrap();
        assert_eq!(
            ns,
            vec![
                (SiteCoord::new(1, 0, 0), ArmSlot::PlusX),
                (SiteCoord::new(0, 1, 0), ArmSlot::T1),
                (SiteCoord::new(0, 0, 1), ArmSlot::T2),
            ]
        );
        assert_eq!(neighbors(SiteCoord::new(1, 1, 1), d).unwrap().len(), 4);
        assert!(neighbors(SiteCoord::new(3, 0, 0), d).is_err());
    }

    #[test]
    fn full_lattice_has_every_bond() {
        let d = Dims::cube(2);
        let g = build_instance(d, &GateParams::with_p(1.0), &LossSpec::none(), &default_assignment(), &mut run_rng(0, 0));
        assert_eq!(g.bonds.len(), geometric_bonds(d).len());
        assert_eq!(g.bonds.len(), 8);
        assert_eq!(g.count(BondKind::Diagonal), 0);
    }

    #[test]
    fn zero_success_has_no_bonds() {
        let g = build_instance(Dims::cube(4), &GateParams::with_p(0.0), &LossSpec::none(), &default_assignment(), &mut run_rng(0, 0));
        assert!(g.bonds.is_empty());
    }

    #[test]
    fn failed_side_relays_a_diagonal_bond() {
        // u = (1,1,0) is even: its -X arm faces v = (0,1,0), its T1 arm faces
        // w = (1,2,0). Both belong to side 1 in the default assignment.
        let d = Dims::new(3, 3, 1);
        let a = default_assignment();
        let rules = SiteRules::new(&GateParams::default());
        let u = d.index(SiteCoord::new(1, 1, 0));
        let v = d.index(SiteCoord::new(0, 1, 0));
        let w = d.index(SiteCoord::new(1, 2, 0));
        let mut sites = vec![SiteOutcome::FULL_STAR; d.sites()];
        sites[u] = crate::microcluster::site_from_fusions(
            &a,
            &rules,
            [FusionResult::FAILURE, FusionResult::SUCCESS],
        );
        let fusions = [
            ExternalFusion { a: (v, ArmSlot::PlusX), b: (u, ArmSlot::MinusX), result: FusionResult::SUCCESS },
            ExternalFusion { a: (u, ArmSlot::T1), b: (w, ArmSlot::T1), result: FusionResult::SUCCESS },
        ];
        let asm = assemble(&mut sites, &fusions, &rules, LossRemedy::ZCut);
        assert_eq!(asm.bonds, vec![Bond { a: v as u32, b: w as u32, kind: BondKind::Diagonal }]);
        assert!(!lattice_adjacent(d, v, w));
        assert_eq!(asm.routes, vec![(0, u as u32, ArmSlot::MinusX)]);
    }

    #[test]
    fn duplicate_edges_cancel() {
        let rules = SiteRules::new(&GateParams::default());
        let mut sites = vec![SiteOutcome::FULL_STAR; 2];
        let fusions = [
            ExternalFusion { a: (0, ArmSlot::PlusX), b: (1, ArmSlot::MinusX), result: FusionResult::SUCCESS },
            ExternalFusion { a: (0, ArmSlot::T1), b: (1, ArmSlot::T1), result: FusionResult::SUCCESS },
        ];
        let asm = assemble(&mut sites, &fusions, &rules, LossRemedy::ZCut);
        assert!(asm.bonds.is_empty());
    }

    #[test]
    fn external_loss_cuts_both_centres() {
        let rules = SiteRules::new(&GateParams::default());
        let mut sites = vec![SiteOutcome::FULL_STAR; 3];
        let fusions = [
            ExternalFusion { a: (0, ArmSlot::PlusX), b: (1, ArmSlot::MinusX), result: FusionResult::lost(&[PhotonRole::Data1]) },
            ExternalFusion { a: (1, ArmSlot::PlusX), b: (2, ArmSlot::MinusX), result: FusionResult::SUCCESS },
        ];
        let asm = assemble(&mut sites.clone(), &fusions, &rules, LossRemedy::ZCut);
        assert_eq!(asm.removed, vec![true, true, false]);
        assert!(asm.bonds.is_empty());
        let asm = assemble(&mut sites, &fusions, &rules, LossRemedy::VoidBond);
        assert_eq!(asm.removed, vec![false; 3]);
        assert_eq!(asm.bonds.len(), 1);
    }

    #[test]
    fn unheralded_loss_rules() {
        let d = Dims::new(3, 3, 1);
        let mut g = build_instance(d, &GateParams::with_p(1.0), &LossSpec::none(), &default_assignment(), &mut run_rng(0, 0));
        let before = g.clone();
        apply_unheralded_loss(&mut g, &[]);
        assert_eq!(g, before);
        let c = d.index(SiteCoord::new(1, 1, 0));
        let degree = g.bonds.iter().filter(|b| b.a as usize == c || b.b as usize == c).count();
        assert_eq!(degree, 3);
        apply_unheralded_loss(&mut g, &[LostPhoton::Center(c)]);
        assert_eq!(g.removed.iter().filter(|&&r| r).count(), 4);

        let mut g = before.clone();
        apply_unheralded_loss(&mut g, &[LostPhoton::Arm(c, ArmSlot::PlusX)]);
        assert!(g.removed[c]);
        assert!(g.bonds.iter().all(|b| b.a as usize != c && b.b as usize != c));
        g.validate().unwrap();
    }

    #[test]
    fn heralded_extremes() {
        let d = Dims::cube(3);
        let base = build_instance(d, &GateParams::with_p(1.0), &LossSpec::none(), &default_assignment(), &mut run_rng(0, 0));
        let mut g = base.clone();
        apply_heralded_loss(&mut g, 0.0, &mut run_rng(1, 0));
        assert_eq!(g, base);
        apply_heralded_loss(&mut g, 1.0, &mut run_rng(1, 0));
        assert!(g.bonds.is_empty() && g.removed.iter().all(|&r| r));
    }

    #[test]
    fn dump_format() {
        let g = build_instance(Dims::new(2, 1, 1), &GateParams::with_p(1.0), &LossSpec::none(), &default_assignment(), &mut run_rng(0, 0));
        assert_eq!(g.dump(), "dims 2 1 1\nsite 0 0 0 full_star\nsite 1 0 0 full_star\nbond 0 0 0 1 0 0 lattice\n");
    }
}
