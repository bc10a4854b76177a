//! Glued surfaces over a Wang tile set and the Thurston-type norm.
//!
//! An integral 2-cycle `c` prescribes `|c_j|` square copies of each tile
//! `j`, negative coefficients contributing reflected (orientation-reversed)
//! copies. Each copy exposes four edge slots; two slots may be glued when
//! they carry the same edge class (axis and color) and opposite polarity,
//! where the polarity of a slot is the boundary traversal sign of its side
//! times the sign of its copy. A perfect matching of the slots yields a
//! closed surface; the norm of the cycle is `F - max V` over all matchings,
//! i.e. the negative of the largest achievable Euler characteristic (every
//! such surface has `E = 2F`).
//!
//! The maximization is a branch and bound over matchings with a rollback
//! union-find on the square corners; an unpruned brute force over all
//! matchings serves as an independent reference for small instances.

use crate::budget::Budget;
use crate::homology::{self, ApComplex, Axis};
use crate::tileset::{Side, WangTileSet};
use crate::Rat;
use std::collections::BTreeMap;
use thiserror::Error;

/// One square copy: a prototile instance with the sign of its coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SquareCopy {
    pub tile: usize,
    pub sign: i8,
}

/// A slot is one side of one copy, encoded as `copy * 4 + side.index()`;
/// slots therefore sort by copy id and then top < bottom < left < right.
pub type Slot = usize;

pub fn slot_of(copy: usize, side: Side) -> Slot {
    copy * 4 + side.index()
}

pub fn slot_copy(slot: Slot) -> usize {
    slot / 4
}

pub fn slot_side(slot: Slot) -> Side {
    Side::from_index(slot % 4)
}

/// Gluing polarity of a slot: +1 for the bottom/right sides of a positive
/// copy and the top/left sides of a negative copy, -1 otherwise. Two slots
/// of one edge class can be glued exactly when their polarities cancel.
pub fn slot_polarity(side: Side, sign: i8) -> i8 {
    (side.ccw_sign() as i8) * sign
}

/// Square corner, `copy * 4 + corner index`.
type Corner = usize;

const SW: usize = 0;
const NW: usize = 1;
const NE: usize = 2;
const SE: usize = 3;

/// The two corners bounding a slot, ordered by increasing coordinate along
/// the slot's axis. Glued slots identify first with first and second with
/// second corner: the identifying isometry (a translation for equal signs, a
/// reflection across the edge line for opposite signs) preserves the
/// along-axis coordinate.
fn slot_corners(slot: Slot) -> [Corner; 2] {
    let c = slot_copy(slot) * 4;
    match slot_side(slot) {
        Side::Top => [c + NW, c + NE],
        Side::Bottom => [c + SW, c + SE],
        Side::Left => [c + SW, c + NW],
        Side::Right => [c + SE, c + NE],
    }
}

/// A closed surface: square copies plus a perfect matching of their slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedSurface {
    pub copies: Vec<SquareCopy>,
    /// `partner[s]` is the slot glued to `s`; a fixed-point-free involution.
    pub partner: Vec<Slot>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("chain has {got} coordinates, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("chain must be integral")]
    NotIntegral,
    #[error("the zero chain bounds no surface")]
    ZeroCycle,
    #[error("chain is not a cycle: edge class `{cell}` has unbalanced slots")]
    NotACycle { cell: String },
    #[error("brute force reference is limited to {limit} slots, surface has {got}")]
    TooLarge { got: usize, limit: usize },
    #[error("surface component is not a flat torus: {msg}")]
    NotFlatTorus { msg: String },
}

/// Square copies prescribed by an integral chain: `|c_j|` copies of tile
/// `j`, in tile order.
pub fn chain_copies(chain: &[i64]) -> Vec<SquareCopy> {
    let mut copies = Vec::new();
    for (tile, &c) in chain.iter().enumerate() {
        let sign = if c < 0 { -1 } else { 1 };
        for _ in 0..c.unsigned_abs() {
            copies.push(SquareCopy { tile, sign });
        }
    }
    copies
}

/// Per-slot edge class and polarity data for a fixed copy list.
struct SlotTable {
    /// Interned (axis, color) bucket per slot.
    bucket: Vec<u32>,
    polarity: Vec<i8>,
    /// Bucket display names, `H:color` / `V:color`.
    bucket_names: Vec<String>,
}

fn slot_table(set: &WangTileSet, copies: &[SquareCopy]) -> SlotTable {
    let mut keys: BTreeMap<(Axis, String), u32> = BTreeMap::new();
    let mut bucket = Vec::with_capacity(copies.len() * 4);
    let mut polarity = Vec::with_capacity(copies.len() * 4);
    let mut bucket_names = Vec::new();
    for copy in copies {
        let tile = &set.tiles[copy.tile];
        for side in Side::ALL {
            let key = (side.axis(), tile.color(side).to_string());
            let next = keys.len() as u32;
            let id = *keys.entry(key.clone()).or_insert(next);
            if id == next {
                bucket_names.push(format!("{}:{}", key.0, key.1));
            }
            bucket.push(id);
            polarity.push(slot_polarity(side, copy.sign));
        }
    }
    SlotTable { bucket, polarity, bucket_names }
}

/// Positive- and negative-polarity slots of every bucket, in slot order.
fn bucket_slots(table: &SlotTable) -> Vec<(Vec<Slot>, Vec<Slot>)> {
    let mut buckets = vec![(Vec::new(), Vec::new()); table.bucket_names.len()];
    for slot in 0..table.bucket.len() {
        let b = table.bucket[slot] as usize;
        if table.polarity[slot] > 0 {
            buckets[b].0.push(slot);
        } else {
            buckets[b].1.push(slot);
        }
    }
    buckets
}

/// Candidate partners of every slot, ascending: the opposite-polarity slots
/// of its bucket.
fn candidate_lists(table: &SlotTable) -> Vec<Vec<Slot>> {
    let buckets = bucket_slots(table);
    (0..table.bucket.len())
        .map(|slot| {
            let (plus, minus) = &buckets[table.bucket[slot] as usize];
            if table.polarity[slot] > 0 { minus.clone() } else { plus.clone() }
        })
        .collect()
}

fn prepare(
    set: &WangTileSet,
    cx: &ApComplex,
    chain: &[Rat],
) -> Result<(Vec<SquareCopy>, SlotTable), SurfaceError> {
    assert_eq!(cx.n_tiles(), set.tiles.len(), "complex does not match tile set");
    if chain.len() != set.tiles.len() {
        return Err(SurfaceError::DimensionMismatch {
            got: chain.len(),
            expected: set.tiles.len(),
        });
    }
    let ints = homology::to_integer_vec(chain).ok_or(SurfaceError::NotIntegral)?;
    if ints.iter().all(|&v| v == 0) {
        return Err(SurfaceError::ZeroCycle);
    }
    let copies = chain_copies(&ints);
    let table = slot_table(set, &copies);
    // Bucket balance is exactly the cycle condition.
    for (b, (plus, minus)) in bucket_slots(&table).iter().enumerate() {
        if plus.len() != minus.len() {
            return Err(SurfaceError::NotACycle { cell: table.bucket_names[b].clone() });
        }
    }
    Ok((copies, table))
}

/// Glue the copies of an integral cycle in canonical order: within every
/// bucket the k-th positive slot meets the k-th negative slot.
pub fn build_surface(
    set: &WangTileSet,
    cx: &ApComplex,
    chain: &[Rat],
) -> Result<GluedSurface, SurfaceError> {
    let (copies, table) = prepare(set, cx, chain)?;
    let mut partner = vec![usize::MAX; copies.len() * 4];
    for (plus, minus) in bucket_slots(&table) {
        for (s, t) in plus.iter().zip(&minus) {
            partner[*s] = *t;
            partner[*t] = *s;
        }
    }
    Ok(GluedSurface { copies, partner })
}

/// Check a surface's internal consistency: the pairing must be a perfect
/// matching gluing only slots of equal edge class and opposite polarity.
/// With `chain` given, the copies must realize it (counts and signs).
pub fn validate_surface(
    set: &WangTileSet,
    surface: &GluedSurface,
    chain: Option<&[Rat]>,
) -> Result<(), String> {
    let n = surface.copies.len() * 4;
    if surface.partner.len() != n {
        return Err(format!("pairing has {} entries for {} slots", surface.partner.len(), n));
    }
    for c in &surface.copies {
        if c.tile >= set.tiles.len() {
            return Err(format!("copy of unknown tile index {}", c.tile));
        }
        if c.sign != 1 && c.sign != -1 {
            return Err(format!("copy sign {} is not ±1", c.sign));
        }
    }
    let table = slot_table(set, &surface.copies);
    for s in 0..n {
        let t = surface.partner[s];
        if t >= n {
            return Err(format!("slot {s} glued out of range"));
        }
        if t == s {
            return Err(format!("slot {s} glued to itself"));
        }
        if surface.partner[t] != s {
            return Err(format!("gluing of slot {s} is not symmetric"));
        }
        if table.bucket[s] != table.bucket[t] {
            return Err(format!(
                "slots {s} and {t} glued across edge classes {} and {}",
                table.bucket_names[table.bucket[s] as usize],
                table.bucket_names[table.bucket[t] as usize]
            ));
        }
        if table.polarity[s] + table.polarity[t] != 0 {
            return Err(format!("slots {s} and {t} glued with equal polarity"));
        }
    }
    if let Some(chain) = chain {
        let ints = homology::to_integer_vec(chain)
            .ok_or_else(|| "chain is not integral".to_string())?;
        if ints.len() != set.tiles.len() {
            return Err("chain dimension mismatch".to_string());
        }
        let mut counts = vec![0i64; set.tiles.len()];
        for c in &surface.copies {
            counts[c.tile] += c.sign as i64;
        }
        if counts != ints {
            return Err("copies do not realize the chain".to_string());
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Corner classes, Euler characteristic, components.

/// Plain union-find used for one-shot statistics.
struct Uf {
    parent: Vec<usize>,
    size: Vec<usize>,
    classes: usize,
}

impl Uf {
    fn new(n: usize) -> Self {
        Uf { parent: (0..n).collect(), size: vec![1; n], classes: n }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] || (self.size[ra] == self.size[rb] && rb < ra) {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.classes -= 1;
    }
}

/// Identify corners along every gluing and return the corner union-find.
fn corner_classes(surface: &GluedSurface) -> Uf {
    let mut uf = Uf::new(surface.copies.len() * 4);
    for s in 0..surface.partner.len() {
        let t = surface.partner[s];
        if t <= s {
            continue;
        }
        let cs = slot_corners(s);
        let ct = slot_corners(t);
        uf.union(cs[0], ct[0]);
        uf.union(cs[1], ct[1]);
    }
    uf
}

/// Cell counts for one connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentStats {
    /// Copy ids, ascending.
    pub copies: Vec<usize>,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
    /// All copies positive and every corner class of valence 4: the
    /// component is a flat torus and unrolls to a periodic tiling.
    pub flat: bool,
}

/// Cell counts of a glued surface and its components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceStats {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
    pub components: Vec<ComponentStats>,
}

pub fn surface_stats(surface: &GluedSurface) -> SurfaceStats {
    let f = surface.copies.len();
    let corners = corner_classes(surface);
    let vertices = corners.classes;
    // Components of the face adjacency graph.
    let mut comp = Uf::new(f);
    for s in 0..surface.partner.len() {
        comp.union(slot_copy(s), slot_copy(surface.partner[s]));
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for c in 0..f {
        by_root.entry(comp.find(c)).or_default().push(c);
    }
    let mut components = Vec::new();
    for (_, copies) in by_root {
        let mut verts = 0;
        let mut flat = copies.iter().all(|&c| surface.copies[c].sign > 0);
        let mut seen_roots = Vec::new();
        for &c in &copies {
            for k in 0..4 {
                let root = corners.find(c * 4 + k);
                if !seen_roots.contains(&root) {
                    seen_roots.push(root);
                    verts += 1;
                    if corners.size[root] != 4 {
                        flat = false;
                    }
                }
            }
        }
        let faces = copies.len();
        let edges = faces * 2;
        components.push(ComponentStats {
            copies,
            vertices: verts,
            edges,
            faces,
            euler: verts as i64 - edges as i64 + faces as i64,
            flat,
        });
    }
    SurfaceStats {
        vertices,
        edges: f * 2,
        faces: f,
        euler: vertices as i64 - (f * 2) as i64 + f as i64,
        components,
    }
}

// ---------------------------------------------------------------------------
// Rollback union-find for the matching searches.

enum UfOp {
    Dec { root: usize },
    Union { child: usize, parent: usize },
}

/// Union-find over corners with an operation log for backtracking. `open`
/// counts, per class, the corner incidences whose slot is still unmatched;
/// a class with `open == 0` can never grow again.
struct RollbackUf {
    parent: Vec<usize>,
    size: Vec<usize>,
    open: Vec<usize>,
    classes: usize,
    log: Vec<UfOp>,
}

impl RollbackUf {
    /// Every corner starts alone with its two slot incidences open.
    fn new(n: usize) -> Self {
        RollbackUf {
            parent: (0..n).collect(),
            size: vec![1; n],
            open: vec![2; n],
            classes: n,
            log: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn dec_open(&mut self, corner: usize) -> usize {
        let root = self.find(corner);
        self.open[root] -= 1;
        self.log.push(UfOp::Dec { root });
        root
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return ra;
        }
        if self.size[ra] < self.size[rb] || (self.size[ra] == self.size[rb] && rb < ra) {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.open[ra] += self.open[rb];
        self.classes -= 1;
        self.log.push(UfOp::Union { child: rb, parent: ra });
        ra
    }

    fn checkpoint(&self) -> usize {
        self.log.len()
    }

    fn rollback(&mut self, checkpoint: usize) {
        while self.log.len() > checkpoint {
            match self.log.pop().unwrap() {
                UfOp::Dec { root } => self.open[root] += 1,
                UfOp::Union { child, parent } => {
                    self.parent[child] = child;
                    self.size[parent] -= self.size[child];
                    self.open[parent] -= self.open[child];
                    self.classes += 1;
								}
            }
        }
    }

    /// Glue two slots: close the four corner incidences, then identify the
    /// corner pairs. Returns the roots touched.
    fn glue(&mut self, s: Slot, t: Slot) -> [usize; 2] {
        let cs = slot_corners(s);
        let ct = slot_corners(t);
        self.dec_open(cs[0]);
        self.dec_open(cs[1]);
        self.dec_open(ct[0]);
        self.dec_open(ct[1]);
        let r0 = self.union(cs[0], ct[0]);
        let r1 = self.union(cs[1], ct[1]);
        [r0, r1]
    }
}

// ---------------------------------------------------------------------------
// Norm search.

/// How a norm search ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    /// The whole matching space was covered (up to pruning by bound).
    Exact,
    /// The node budget ran out; the value is only an upper bound.
    UpperBound,
}

/// Norm value with its witness surface.
#[derive(Clone, Debug)]
pub struct NormCertificate {
    /// `faces - V` for the best matching found; the norm when `status` is
    /// `Exact`, otherwise an upper bound.
    pub value: i64,
    pub witness: GluedSurface,
    pub status: SearchStatus,
    pub nodes: u64,
}

struct NormSearch<'a> {
    candidates: &'a [Vec<Slot>],
    partner: Vec<Slot>,
    uf: RollbackUf,
    best_v: usize,
    best_partner: Vec<Slot>,
    nodes: u64,
    exhausted: bool,
}

impl NormSearch<'_> {
    fn run(&mut self, budget: &mut Budget, cursor: Slot) {
        let n = self.partner.len();
        let mut s = cursor;
        while s < n && self.partner[s] != usize::MAX {
            s += 1;
        }
        if s == n {
            if self.uf.classes > self.best_v {
                self.best_v = self.uf.classes;
                self.best_partner = self.partner.clone();
            }
            return;
        }
        // Final class count only ever shrinks along a branch.
        if self.uf.classes <= self.best_v {
            return;
        }
        for i in 0..self.candidates[s].len() {
            let t = self.candidates[s][i];
            if self.partner[t] != usize::MAX {
                continue;
            }
            if !budget.tick() {
                self.exhausted = true;
                return;
            }
            self.nodes += 1;
            let cp = self.uf.checkpoint();
            self.partner[s] = t;
            self.partner[t] = s;
            self.uf.glue(s, t);
            self.run(budget, s + 1);
            self.uf.rollback(cp);
            self.partner[s] = usize::MAX;
            self.partner[t] = usize::MAX;
            if self.exhausted {
                return;
            }
        }
    }
}

/// Norm of an integral cycle: `F - max V` over all gluings of its copies,
/// maximized by branch and bound seeded with the canonical gluing.
pub fn thurston_norm(
    set: &WangTileSet,
    cx: &ApComplex,
    chain: &[Rat],
    budget: &mut Budget,
) -> Result<NormCertificate, SurfaceError> {
    cx.check_dim(chain).map_err(|_| SurfaceError::DimensionMismatch {
        got: chain.len(),
        expected: cx.n_tiles(),
    })?;
    if homology::to_integer_vec(chain).ok_or(SurfaceError::NotIntegral)?.iter().all(|&v| v == 0)
    {
        return Ok(NormCertificate {
            value: 0,
            witness: GluedSurface { copies: Vec::new(), partner: Vec::new() },
            status: SearchStatus::Exact,
            nodes: 0,
        });
    }
    let (copies, table) = prepare(set, cx, chain)?;
    let faces = copies.len() as i64;
    let seed = build_surface(set, cx, chain)?;
    let seed_v = surface_stats(&seed).vertices;
    let candidates = candidate_lists(&table);
    let mut search = NormSearch {
        candidates: &candidates,
        partner: vec![usize::MAX; copies.len() * 4],
        uf: RollbackUf::new(copies.len() * 4),
        best_v: seed_v,
        best_partner: seed.partner.clone(),
        nodes: 0,
        exhausted: false,
    };
    search.run(budget, 0);
    Ok(NormCertificate {
        value: faces - search.best_v as i64,
        witness: GluedSurface { copies, partner: search.best_partner },
        status: if search.exhausted { SearchStatus::UpperBound } else { SearchStatus::Exact },
        nodes: search.nodes,
    })
}

/// Unpruned reference implementation: enumerate every perfect matching by
/// plain recursion, recomputing the vertex count from scratch at each leaf.
pub fn thurston_norm_bruteforce(
    set: &WangTileSet,
    cx: &ApComplex,
    chain: &[Rat],
) -> Result<NormCertificate, SurfaceError> {
    const LIMIT: usize = 32;
    cx.check_dim(chain).map_err(|_| SurfaceError::DimensionMismatch {
        got: chain.len(),
        expected: cx.n_tiles(),
    })?;
    if homology::to_integer_vec(chain).ok_or(SurfaceError::NotIntegral)?.iter().all(|&v| v == 0)
    {
        return Ok(NormCertificate {
            value: 0,
            witness: GluedSurface { copies: Vec::new(), partner: Vec::new() },
            status: SearchStatus::Exact,
            nodes: 0,
        });
    }
    let (copies, table) = prepare(set, cx, chain)?;
    let n = copies.len() * 4;
    if n > LIMIT {
        return Err(SurfaceError::TooLarge { got: n, limit: LIMIT });
    }

    fn recurse(
        table: &SlotTable,
        copies: &[SquareCopy],
        partner: &mut Vec<Slot>,
        best: &mut Option<(usize, Vec<Slot>)>,
        nodes: &mut u64,
    ) {
        let n = partner.len();
        let Some(s) = (0..n).find(|&s| partner[s] == usize::MAX) else {
            let surface = GluedSurface { copies: copies.to_vec(), partner: partner.clone() };
            let v = corner_classes(&surface).classes;
            if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
                *best = Some((v, partner.clone()));
            }
            return;
        };
        for t in s + 1..n {
            if partner[t] != usize::MAX
                || table.bucket[t] != table.bucket[s]
                || table.polarity[s] + table.polarity[t] != 0
            {
                continue;
            }
            *nodes += 1;
            partner[s] = t;
            partner[t] = s;
            recurse(table, copies, partner, best, nodes);
            partner[s] = usize::MAX;
            partner[t] = usize::MAX;
        }
    }

    let mut partner = vec![usize::MAX; n];
    let mut best = None;
    let mut nodes = 0;
    recurse(&table, &copies, &mut partner, &mut best, &mut nodes);
    let (best_v, best_partner) = best.expect("balanced buckets always admit a matching");
    Ok(NormCertificate {
        value: copies.len() as i64 - best_v as i64,
        witness: GluedSurface { copies, partner: best_partner },
        status: SearchStatus::Exact,
        nodes,
    })
}

// ---------------------------------------------------------------------------
// Flat torus search.

/// Outcome of searching a cycle's matchings for an everywhere-valence-4
/// surface.
#[derive(Clone, Debug)]
pub enum TorusOutcome {
    Found(GluedSurface),
    NoTorus,
    BudgetExhausted { nodes: u64 },
}

struct TorusSearch<'a> {
    candidates: &'a [Vec<Slot>],
    partner: Vec<Slot>,
    uf: RollbackUf,
    nodes: u64,
    exhausted: bool,
    found: Option<Vec<Slot>>,
}

impl TorusSearch<'_> {
    fn run(&mut self, budget: &mut Budget, cursor: Slot) {
        let n = self.partner.len();
        let mut s = cursor;
        while s < n && self.partner[s] != usize::MAX {
            s += 1;
        }
        if s == n {
            self.found = Some(self.partner.clone());
            return;
        }
        for i in 0..self.candidates[s].len() {
            let t = self.candidates[s][i];
            if self.partner[t] != usize::MAX {
                continue;
            }
            if !budget.tick() {
                self.exhausted = true;
                return;
            }
            self.nodes += 1;
            let cp = self.uf.checkpoint();
            self.partner[s] = t;
            self.partner[t] = s;
            let roots = self.uf.glue(s, t);
            let ok = roots.iter().all(|&r| {
                self.uf.size[r] <= 4 && (self.uf.open[r] > 0 || self.uf.size[r] == 4)
            });
            if ok {
                self.run(budget, s + 1);
            }
            self.uf.rollback(cp);
            self.partner[s] = usize::MAX;
            self.partner[t] = usize::MAX;
            if self.found.is_some() || self.exhausted {
                return;
            }
        }
    }
}

/// Search the matchings of a non-negative integral cycle for a surface all
/// of whose corner classes have valence 4 (a disjoint union of flat tori).
pub fn find_torus(
    set: &WangTileSet,
    cx: &ApComplex,
    chain: &[Rat],
    budget: &mut Budget,
) -> Result<TorusOutcome, SurfaceError> {
    let (copies, table) = prepare(set, cx, chain)?;
    if copies.iter().any(|c| c.sign < 0) {
        // Reflected copies never close up into translation tori.
        return Ok(TorusOutcome::NoTorus);
    }
    let candidates = candidate_lists(&table);
    let mut search = TorusSearch {
        candidates: &candidates,
        partner: vec![usize::MAX; copies.len() * 4],
        uf: RollbackUf::new(copies.len() * 4),
        nodes: 0,
        exhausted: false,
        found: None,
    };
    search.run(budget, 0);
    match search.found {
        Some(partner) => Ok(TorusOutcome::Found(GluedSurface { copies, partner })),
        None if search.exhausted => Ok(TorusOutcome::BudgetExhausted { nodes: search.nodes }),
        None => Ok(TorusOutcome::NoTorus),
    }
}

// ---------------------------------------------------------------------------
// Unrolling a flat torus component into a periodic tiling.

/// A periodic tiling: a fundamental domain for the lattice spanned by
/// `(k, 0)` and `(s, l)`, in Hermite normal form (`k, l >= 1`,
/// `0 <= s < k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicTiling {
    pub k: i64,
    pub l: i64,
    pub s: i64,
    /// Tile index at `(x, y)`, row-major by `y` then `x`, for
    /// `0 <= x < k`, `0 <= y < l`.
    pub domain: Vec<usize>,
}

impl PeriodicTiling {
    /// Tile at an arbitrary lattice cell.
    pub fn at(&self, x: i64, y: i64) -> usize {
        let yr = y.rem_euclid(self.l);
        let shift = (y - yr) / self.l;
        let xr = (x - shift * self.s).rem_euclid(self.k);
        self.domain[(yr * self.k + xr) as usize]
    }
}

/// Check a periodic tiling against the tile adjacency constraints, wrapping
/// across the lattice.
pub fn validate_periodic(set: &WangTileSet, pt: &PeriodicTiling) -> Result<(), String> {
    if pt.k < 1 || pt.l < 1 || pt.s < 0 || pt.s >= pt.k {
        return Err(format!("lattice {} {} {} is not in normal form", pt.k, pt.l, pt.s));
    }
    if pt.domain.len() != (pt.k * pt.l) as usize {
        return Err(format!(
            "domain has {} cells for a {}x{} lattice",
            pt.domain.len(),
            pt.k,
            pt.l
        ));
    }
    if let Some(&t) = pt.domain.iter().find(|&&t| t >= set.tiles.len()) {
        return Err(format!("domain references unknown tile index {t}"));
    }
    for y in 0..pt.l {
        for x in 0..pt.k {
            let t = &set.tiles[pt.at(x, y)];
            let right = &set.tiles[pt.at(x + 1, y)];
            if t.east != right.west {
                return Err(format!("east/west mismatch at ({x},{y})"));
            }
            let up = &set.tiles[pt.at(x, y + 1)];
            if t.north != up.south {
                return Err(format!("north/south mismatch at ({x},{y})"));
            }
        }
    }
    Ok(())
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        let g = a.abs();
        (g, if a < 0 { -1 } else { 1 }, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Unroll one flat torus component of a surface into a periodic tiling: the
/// copies develop into the plane along the gluings, the development's return
/// vectors span a finite-index sublattice of `Z²`, and the copies form a
/// fundamental domain for it.
pub fn extract_periodic_tiling(
    set: &WangTileSet,
    surface: &GluedSurface,
    component: &[usize],
) -> Result<PeriodicTiling, SurfaceError> {
    let fail = |msg: &str| SurfaceError::NotFlatTorus { msg: msg.to_string() };
    if component.is_empty() {
        return Err(fail("empty component"));
    }
    if component.iter().any(|&c| surface.copies[c].sign < 0) {
        return Err(fail("component contains reflected copies"));
    }
    // Develop the component over Z² by breadth-first search.
    let mut pos: BTreeMap<usize, (i64, i64)> = BTreeMap::new();
    let mut gens: Vec<(i64, i64)> = Vec::new();
    let base = *component.iter().min().unwrap();
    pos.insert(base, (0, 0));
    let mut queue = std::collections::VecDeque::from([base]);
    while let Some(c) = queue.pop_front() {
        let (x, y) = pos[&c];
        for side in Side::ALL {
            let t = surface.partner[slot_of(c, side)];
            let delta = match side {
                Side::Top => (0, 1),
                Side::Bottom => (0, -1),
                Side::Left => (-1, 0),
                Side::Right => (1, 0),
            };
            if slot_side(t) == side {
                return Err(fail("gluing does not translate"));
            }
            let nc = slot_copy(t);
            let np = (x + delta.0, y + delta.1);
            match pos.get(&nc) {
                None => {
                    pos.insert(nc, np);
                    queue.push_back(nc);
                }
                Some(&p) => {
                    let g = (p.0 - np.0, p.1 - np.1);
                    if g != (0, 0) && !gens.contains(&g) {
                        gens.push(g);
                    }
                }
            }
        }
    }
    if pos.len() != component.len() {
        return Err(fail("component is not glue-connected"));
    }
    // Hermite normal form of the return lattice: u1 = (k, 0), u2 = (s, l).
    let mut v: (i64, i64) = (0, 0);
    for &g in &gens {
        if g.1 == 0 {
            continue;
        }
        let (_, p, q) = ext_gcd(v.1, g.1);
        v = (p * v.0 + q * g.0, p * v.1 + q * g.1);
    }
    if v.1 < 0 {
        v = (-v.0, -v.1);
    }
    let l = v.1;
    if l == 0 {
        return Err(fail("development does not close vertically"));
    }
    let mut k = 0i64;
    for &g in &gens {
        let reduced_x = g.0 - (g.1 / l) * v.0;
        debug_assert_eq!(g.1 % l, 0);
        k = ext_gcd(k, reduced_x).0;
    }
    if k == 0 {
        return Err(fail("development does not close horizontally"));
    }
    let s = v.0.rem_euclid(k);
    if k * l != component.len() as i64 {
        return Err(fail("lattice covolume does not match the component size"));
    }
    // Reduce every copy into the fundamental domain.
    let mut domain: Vec<Option<usize>> = vec![None; (k * l) as usize];
    for (&c, &(x, y)) in &pos {
        let yr = y.rem_euclid(l);
        let xr = (x - ((y - yr) / l) * s).rem_euclid(k);
        let cell = &mut domain[(yr * k + xr) as usize];
        if cell.replace(surface.copies[c].tile).is_some() {
            return Err(fail("two copies develop to the same lattice cell"));
        }
    }
    let pt = PeriodicTiling {
        k,
        l,
        s,
        domain: domain.into_iter().map(|c| c.unwrap()).collect(),
    };
    validate_periodic(set, &pt).map_err(|msg| fail(&msg))?;
    Ok(pt)
}

/// Normalized tile frequencies of a periodic tiling: per-tile counts over
/// the fundamental domain, divided by its area. Always a non-negative cycle
/// with coordinate sum 1.
pub fn ev_of_periodic(cx: &ApComplex, pt: &PeriodicTiling) -> Vec<Rat> {
    let mut counts = vec![0i64; cx.n_tiles()];
    for &t in &pt.domain {
        counts[t] += 1;
    }
    let area = crate::rat(pt.k * pt.l);
    counts.into_iter().map(|c| crate::rat(c) / area.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::build_wang_complex;
    use crate::tileset::parse_wang;
    use crate::{rat, Rat};

    const MONO: &str = "tileset MONO\ntile T N=a S=a E=a W=a\n";
    const DEAD: &str = "tileset DEAD\ntile T N=a S=b E=c W=c\n";
    const CHECKER: &str =
        "tileset CHECKER\ntile A N=1 S=2 E=4 W=3\ntile B N=2 S=1 E=3 W=4\n";

    fn setup(text: &str) -> (crate::tileset::WangTileSet, crate::homology::ApComplex) {
        let set = parse_wang(text).unwrap();
        let cx = build_wang_complex(&set);
        (set, cx)
    }

    fn rvec(v: Vec<i64>) -> Vec<Rat> {
        v.into_iter().map(rat).collect()
    }

    #[test]
    fn mono_single_square_is_a_torus() {
        let (set, cx) = setup(MONO);
        let surface = build_surface(&set, &cx, &rvec(vec![1])).unwrap();
        validate_surface(&set, &surface, Some(&rvec(vec![1]))).unwrap();
        let stats = surface_stats(&surface);
        assert_eq!((stats.vertices, stats.edges, stats.faces), (1, 2, 1));
        assert_eq!(stats.euler, 0);
        assert_eq!(stats.components.len(), 1);
        assert!(stats.components[0].flat);
    }

    #[test]
    fn mono_norm_is_zero() {
        let (set, cx) = setup(MONO);
        let norm = thurston_norm(&set, &cx, &rvec(vec![1]), &mut Budget::unlimited()).unwrap();
        assert_eq!(norm.value, 0);
        assert_eq!(norm.status, SearchStatus::Exact);
        let brute = thurston_norm_bruteforce(&set, &cx, &rvec(vec![1])).unwrap();
        assert_eq!(brute.value, 0);
    }

    #[test]
    fn zero_chain_has_norm_zero() {
        let (set, cx) = setup(MONO);
        let norm = thurston_norm(&set, &cx, &[rat(0)], &mut Budget::unlimited()).unwrap();
        assert_eq!(norm.value, 0);
        assert!(norm.witness.copies.is_empty());
    }

    #[test]
    fn non_cycles_are_rejected() {
        let (set, cx) = setup(DEAD);
        match build_surface(&set, &cx, &rvec(vec![1])) {
            Err(SurfaceError::NotACycle { cell }) => assert_eq!(cell, "H:a"),
            other => panic!("expected NotACycle, got {other:?}"),
        }
        let (set, cx) = setup(MONO);
        assert!(matches!(
            thurston_norm(&set, &cx, &[crate::ratio(1, 2)], &mut Budget::unlimited()),
            Err(SurfaceError::NotIntegral)
        ));
        assert!(matches!(
            build_surface(&set, &cx, &[rat(0)]),
            Err(SurfaceError::ZeroCycle)
        ));
    }

    #[test]
    fn checker_diagonal_cycle_is_a_flat_torus() {
        let (set, cx) = setup(CHECKER);
        let c = rvec(vec![1, 1]);
        let norm = thurston_norm(&set, &cx, &c, &mut Budget::unlimited()).unwrap();
        assert_eq!(norm.value, 0);
        let brute = thurston_norm_bruteforce(&set, &cx, &c).unwrap();
        assert_eq!(brute.value, 0);
        match find_torus(&set, &cx, &c, &mut Budget::unlimited()).unwrap() {
            TorusOutcome::Found(surface) => {
                let stats = surface_stats(&surface);
                assert_eq!(stats.euler, 0);
                assert!(stats.components[0].flat);
                let pt =
                    extract_periodic_tiling(&set, &surface, &stats.components[0].copies).unwrap();
                assert_eq!((pt.k, pt.l, pt.s), (2, 1, 1));
                assert_eq!(pt.domain, vec![0, 1]);
                validate_periodic(&set, &pt).unwrap();
                assert_eq!(ev_of_periodic(&cx, &pt), vec![crate::ratio(1, 2), crate::ratio(1, 2)]);
            }
            other => panic!("expected a torus, got {other:?}"),
        }
    }

    #[test]
    fn checker_unbalanced_chain_is_not_a_cycle() {
        let (set, cx) = setup(CHECKER);
        assert!(matches!(
            find_torus(&set, &cx, &rvec(vec![1, 0]), &mut Budget::unlimited()),
            Err(SurfaceError::NotACycle { .. })
        ));
    }

    #[test]
    fn mono_torus_extraction_gives_unit_period() {
        let (set, cx) = setup(MONO);
        match find_torus(&set, &cx, &rvec(vec![1]), &mut Budget::unlimited()).unwrap() {
            TorusOutcome::Found(surface) => {
                let stats = surface_stats(&surface);
                let pt =
                    extract_periodic_tiling(&set, &surface, &stats.components[0].copies).unwrap();
                assert_eq!((pt.k, pt.l, pt.s), (1, 1, 0));
                assert_eq!(ev_of_periodic(&cx, &pt), vec![rat(1)]);
            }
            other => panic!("expected a torus, got {other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_reports_upper_bound() {
        let (set, cx) = setup(CHECKER);
        let mut budget = Budget::new(1);
        let norm = thurston_norm(&set, &cx, &rvec(vec![2, 2]), &mut budget).unwrap();
        assert_eq!(norm.status, SearchStatus::UpperBound);
        // The canonical seed still provides a valid surface.
        validate_surface(&set, &norm.witness, Some(&rvec(vec![2, 2]))).unwrap();
    }

    #[test]
    fn negative_coefficients_build_reflected_copies() {
        // Two equal tiles under different ids; (1, -1) is a cycle whose
        // surface glues a square to a reflected copy, forcing reflection
        // gluings on the vertical sides.
        let text = "tileset REFL\ntile A N=a S=a E=e W=w\ntile B N=a S=a E=e W=w\n";
        let (set, cx) = setup(text);
        let c = vec![rat(1), rat(-1)];
        assert!(cx.is_cycle(&c).unwrap());
        let surface = build_surface(&set, &cx, &c).unwrap();
        validate_surface(&set, &surface, Some(&c)).unwrap();
        let stats = surface_stats(&surface);
        assert_eq!(stats.faces, 2);
        assert_eq!(stats.edges, 4);
        assert_eq!(stats.euler % 2, 0);
        assert!(matches!(
            find_torus(&set, &cx, &c, &mut Budget::unlimited()).unwrap(),
            TorusOutcome::NoTorus
        ));
        let norm = thurston_norm(&set, &cx, &c, &mut Budget::unlimited()).unwrap();
        let brute = thurston_norm_bruteforce(&set, &cx, &c).unwrap();
        assert_eq!(norm.value, brute.value);
        // Gluing the two squares along their entire boundary yields a
        // sphere (V = 4, χ = 2), so the norm of this mixed-sign cycle is
        // negative.
        assert_eq!(norm.value, -2);
        let best = surface_stats(&norm.witness);
        assert_eq!(best.euler, 2);
    }

    #[test]
    fn norm_agrees_with_bruteforce_on_scaled_checker() {
        let (set, cx) = setup(CHECKER);
        for n in 1..=3 {
            let c = rvec(vec![n, n]);
            let fast = thurston_norm(&set, &cx, &c, &mut Budget::unlimited()).unwrap();
            let brute = thurston_norm_bruteforce(&set, &cx, &c).unwrap();
            assert_eq!(fast.value, brute.value, "n = {n}");
            assert_eq!(fast.status, SearchStatus::Exact);
            validate_surface(&set, &fast.witness, Some(&c)).unwrap();
            validate_surface(&set, &brute.witness, Some(&c)).unwrap();
        }
    }

    #[test]
    fn periodic_tiling_accessor_wraps_with_shear() {
        let pt = PeriodicTiling { k: 2, l: 1, s: 1, domain: vec![7, 9] };
        assert_eq!(pt.at(0, 0), 7);
        assert_eq!(pt.at(1, 0), 9);
        assert_eq!(pt.at(2, 0), 7);
        // One row up shifts by s = 1.
        assert_eq!(pt.at(0, 1), 9);
        assert_eq!(pt.at(1, 1), 7);
        assert_eq!(pt.at(0, -1), 9);
    }
}
