//! Binary space partitioning into rooms, corridor placement with restart,
//! and rasterization into cell states.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, CatalogError, GroupKeyKind};
use crate::rng::{Phase, StreamRng};
use crate::scene::{EdgeSpan, ObjectKind, PlacedObject, Pose, SceneError, Side, TileScene, TileSize};
use crate::sizing::{plan_rooms, SizingConstants};

pub const DEFAULT_MAX_RESTARTS: u32 = 64;
/// Wall ring plus one cell of clearance on each side of a room.
pub const LEAF_ALLOWANCE: i32 = 4;
pub const WINDOW_STRIDE: i32 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BspError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error("no valid layout after {0} restarts")]
    RestartExhausted(u32),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

fn default_max_restarts() -> u32 {
    DEFAULT_MAX_RESTARTS
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BspParams {
    pub footprint_w: i32,
    pub footprint_d: i32,
    pub num_rooms: u32,
    pub room_min: i32,
    pub room_max: i32,
    pub corridor_min: i32,
    pub corridor_max: i32,
    pub seed: u64,
    #[serde(default = "default_max_restarts")]
    pub max_restarts: u32,
}

impl BspParams {
    pub fn leaf_min(&self) -> i32 {
        self.room_min + LEAF_ALLOWANCE
    }

    /// Checks parameter invariants and area feasibility; uses no randomness.
    pub fn validate(&self) -> Result<(), BspError> {
        let invalid = |m: &str| Err(BspError::InvalidParams(m.to_string()));
        if self.num_rooms < 1 {
            return invalid("num_rooms must be at least 1");
        }
        if self.room_min < 3 {
            return invalid("room_min must be at least 3");
        }
        if self.room_min > self.room_max {
            return invalid("room_min must not exceed room_max");
        }
        if self.corridor_min < 1 {
            return invalid("corridor_min must be at least 1");
        }
        if self.corridor_min > self.corridor_max {
            return invalid("corridor_min must not exceed corridor_max");
        }
        if self.footprint_w < 1 || self.footprint_d < 1 {
            return invalid("footprint dimensions must be positive");
        }
        let area = self.footprint_w as i64 * self.footprint_d as i64;
        let n = self.num_rooms as i64;
        if n * (self.room_min as i64).pow(2) > area {
            return Err(BspError::InfeasibleParams(format!(
                "{} rooms of at least {}x{} cells exceed the {}x{} footprint",
                self.num_rooms, self.room_min, self.room_min, self.footprint_w, self.footprint_d
            )));
        }
        if n > 1 && self.corridor_min + 2 > self.room_max {
            return Err(BspError::InfeasibleParams(format!(
                "a corridor of width {} with its walls does not fit a room side of at most {}",
                self.corridor_min, self.room_max
            )));
        }
        // every leaf also needs the wall ring and clearance
        let leaf = self.leaf_min() as i64;
        if self.footprint_w < self.leaf_min() || self.footprint_d < self.leaf_min() || n * leaf * leaf > area {
            return Err(BspError::InfeasibleParams(format!(
                "{} leaves of at least {}x{} cells do not fit the {}x{} footprint",
                self.num_rooms, leaf, leaf, self.footprint_w, self.footprint_d
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
}

impl Rect {
    pub fn new(x: i32, y: i32, w: i32, h: i32) -> Self {
        Rect { x, y, w, h }
    }

    pub fn x1(&self) -> i32 {
        self.x + self.w
    }

    pub fn y1(&self) -> i32 {
        self.y + self.h
    }

    pub fn area(&self) -> i64 {
        self.w as i64 * self.h as i64
    }

    pub fn contains_rect(&self, o: &Rect) -> bool {
        o.x >= self.x && o.y >= self.y && o.x1() <= self.x1() && o.y1() <= self.y1()
    }

    pub fn cells(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        (self.y..self.y1()).flat_map(move |y| (self.x..self.x1()).map(move |x| (x, y)))
    }

    pub fn grown(&self, by: i32) -> Rect {
        Rect::new(self.x - by, self.y - by, self.w + 2 * by, self.h + 2 * by)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BspNode {
    pub rect: Rect,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<BspNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room: Option<Rect>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corridors: Vec<Rect>,
}

impl BspNode {
    fn leaf(rect: Rect) -> Self {
        BspNode { rect, children: Vec::new(), room: None, corridors: Vec::new() }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Leaves in depth-first order, lower coordinates first.
    pub fn leaves(&self) -> Vec<&BspNode> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a BspNode>) {
        if self.is_leaf() {
            out.push(self);
        } else {
            for c in &self.children {
                c.collect_leaves(out);
            }
        }
    }

    fn leaves_mut(&mut self) -> Vec<&mut BspNode> {
        if self.is_leaf() {
            return vec![self];
        }
        self.children.iter_mut().flat_map(|c| c.leaves_mut()).collect()
    }

    /// Children exactly tile their parent and rooms sit inside their leaf.
    pub fn is_well_formed(&self) -> bool {
        if self.is_leaf() {
            return self.room.is_none_or(|r| self.rect.contains_rect(&r));
        }
        let [a, b] = [&self.children[0], &self.children[1]];
        let vertical = a.rect.x1() == b.rect.x
            && a.rect.x == self.rect.x
            && b.rect.x1() == self.rect.x1()
            && a.rect.y == self.rect.y
            && b.rect.y == self.rect.y
            && a.rect.h == self.rect.h
            && b.rect.h == self.rect.h;
        let horizontal = a.rect.y1() == b.rect.y
            && a.rect.y == self.rect.y
            && b.rect.y1() == self.rect.y1()
            && a.rect.x == self.rect.x
            && b.rect.x == self.rect.x
            && a.rect.w == self.rect.w
            && b.rect.w == self.rect.w;
        self.children.len() == 2 && (vertical || horizontal) && a.is_well_formed() && b.is_well_formed()
    }
}

/// Recursive random splitting until there are `num_rooms` leaves. Returns
/// `None` when no leaf can be split further before the count is reached.
pub fn partition(params: &BspParams, seed: u64) -> Option<BspNode> {
    let mut rng = StreamRng::new(seed, Phase::Split);
    let mut root = BspNode::leaf(Rect::new(0, 0, params.footprint_w, params.footprint_d));
    let min = params.leaf_min();
    let mut count = 1;
    while count < params.num_rooms {
        let mut leaves = root.leaves_mut();
        let candidates: Vec<usize> = (0..leaves.len())
            .filter(|&i| leaves[i].rect.w >= 2 * min || leaves[i].rect.h >= 2 * min)
            .collect();
        if candidates.is_empty() {
            return None;
        }
        let leaf = &mut leaves[candidates[rng.below(candidates.len() as u64) as usize]];
        let r = leaf.rect;
        let can_x = r.w >= 2 * min;
        let can_y = r.h >= 2 * min;
        let split_x = match (can_x, can_y) {
            (true, true) => rng.coin(),
            (x, _) => x,
        };
        let (a, b) = if split_x {
            let at = rng.range_inclusive(min as i64, (r.w - min) as i64) as i32;
            (Rect::new(r.x, r.y, at, r.h), Rect::new(r.x + at, r.y, r.w - at, r.h))
        } else {
            let at = rng.range_inclusive(min as i64, (r.h - min) as i64) as i32;
            (Rect::new(r.x, r.y, r.w, at), Rect::new(r.x, r.y + at, r.w, r.h - at))
        };
        leaf.children = vec![BspNode::leaf(a), BspNode::leaf(b)];
        count += 1;
    }
    Some(root)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corridor {
    /// Floor cells strictly between the two room walls.
    pub rect: Rect,
    /// Room indices in depth-first leaf order.
    pub rooms: [usize; 2],
    /// Direction from the first room to the second.
    pub direction: Side,
    /// Door cells in the first and second room's wall.
    pub doors: [(i32, i32); 2],
}

impl Corridor {
    pub fn length(&self) -> i32 {
        match self.direction {
            Side::E | Side::W => self.rect.w,
            Side::N | Side::S => self.rect.h,
        }
    }

    /// Floor, side walls and the wall cells where it meets each room.
    fn owned_cells(&self) -> Vec<(i32, i32)> {
        self.rect.grown(1).cells().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BspLayout {
    pub params: BspParams,
    pub attempt: u32,
    pub seed_used: u64,
    pub tree: BspNode,
    /// Room interiors in depth-first leaf order.
    pub rooms: Vec<Rect>,
    pub corridors: Vec<Corridor>,
}

impl BspLayout {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("layout serializes")
    }

    /// Room adjacency through corridors is a single component.
    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.rooms.len());
        for c in &self.corridors {
            uf.union(c.rooms[0], c.rooms[1]);
        }
        uf.components() <= 1
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, i: usize) -> usize {
        let p = self.0[i];
        if p == i {
            return i;
        }
        let root = self.find(p);
        self.0[i] = root;
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
        ra != rb
    }

    fn components(&mut self) -> usize {
        (0..self.0.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Which side of `a` the leaf `b` touches, if they share an edge segment.
fn shared_side(a: &Rect, b: &Rect) -> Option<Side> {
    let overlap_x = a.x.max(b.x) < a.x1().min(b.x1());
    let overlap_y = a.y.max(b.y) < a.y1().min(b.y1());
    if overlap_x && b.y1() == a.y {
        Some(Side::N)
    } else if overlap_y && b.x == a.x1() {
        Some(Side::E)
    } else if overlap_x && b.y == a.y1() {
        Some(Side::S)
    } else if overlap_y && b.x1() == a.x {
        Some(Side::W)
    } else {
        None
    }
}

/// The leaf-edge segment two adjacent leaves share, on the axis across `dir`.
fn shared_span(a: &Rect, b: &Rect, dir: Side) -> (i32, i32) {
    match dir {
        Side::E | Side::W => (a.y.max(b.y), a.y1().min(b.y1())),
        Side::N | Side::S => (a.x.max(b.x), a.x1().min(b.x1())),
    }
}

/// A corridor band `start..start + width` across a shared leaf edge.
#[derive(Debug, Clone, Copy)]
struct Lane {
    pair: (usize, usize),
    horizontal: bool,
    start: i32,
    width: i32,
}

fn neighbours(leaves: &[Rect], i: usize, dir: Side) -> Vec<usize> {
    let mut out: Vec<usize> =
        (0..leaves.len()).filter(|&j| j != i && shared_side(&leaves[i], &leaves[j]) == Some(dir)).collect();
    out.sort_by_key(|&j| (leaves[j].y, leaves[j].x));
    out
}

/// Largest room side a leaf allows on one axis.
fn room_cap(leaf: &Rect, horizontal: bool, params: &BspParams) -> i32 {
    let len = if horizontal { leaf.h } else { leaf.w };
    params.room_max.min(len - LEAF_ALLOWANCE)
}

/// Breadth-first spanning tree over adjacent leaves, one lane per tree
/// edge. Each lane is drawn so the lanes ending at a room still fit inside
/// one room side. `None` if some leaf cannot be reached.
fn lane_tree(leaves: &[Rect], params: &BspParams, rng: &mut StreamRng) -> Option<Vec<Lane>> {
    let mut seen = vec![false; leaves.len()];
    // per leaf, the hull of lane bands plus walls on the x and the y axis
    let mut hulls: Vec<[Option<(i32, i32)>; 2]> = vec![[None; 2]; leaves.len()];
    let mut queue = std::collections::VecDeque::from([0]);
    seen[0] = true;
    let mut lanes = Vec::new();
    while let Some(i) = queue.pop_front() {
        for dir in Side::ALL {
            for j in neighbours(leaves, i, dir) {
                if seen[j] {
                    continue;
                }
                let horizontal = matches!(dir, Side::E | Side::W);
                let axis = horizontal as usize;
                let span = shared_span(&leaves[i], &leaves[j], dir);
                let cap = room_cap(&leaves[i], horizontal, params);
                // band walls stay two cells off both leaf edges and within
                // reach of the lanes room i already carries
                let (mut lo, mut hi) = (span.0 + 2, span.1 - 2);
                if let Some((a, b)) = hulls[i][axis] {
                    lo = lo.max(b - cap);
                    hi = hi.min(a + cap);
                }
                let widest = params
                    .corridor_max
                    .min(hi - lo - 2)
                    .min(cap - 2)
                    .min(room_cap(&leaves[j], horizontal, params) - 2);
                if widest < params.corridor_min {
                    continue;
                }
                seen[j] = true;
                queue.push_back(j);
                let width = rng.range_inclusive(params.corridor_min as i64, widest as i64) as i32;
                let start = rng.range_inclusive((lo + 1) as i64, (hi - 1 - width) as i64) as i32;
                let band = (start - 1, start + width + 1);
                for k in [i, j] {
                    let h = &mut hulls[k][axis];
                    *h = Some(h.map_or(band, |(a, b)| (a.min(band.0), b.max(band.1))));
                }
                lanes.push(Lane { pair: (i.min(j), i.max(j)), horizontal, start, width });
            }
        }
    }
    seen.iter().all(|&s| s).then_some(lanes)
}

/// Draws one room axis inside `leaf_lo..leaf_lo + leaf_len`, covering `hull`
/// (lane bands plus their walls) when given. Returns `(start, size)`.
fn room_axis(rng: &mut StreamRng, leaf_lo: i32, leaf_len: i32, hull: Option<(i32, i32)>, params: &BspParams) -> Option<(i32, i32)> {
    let (inner_lo, inner_hi) = (leaf_lo + 2, leaf_lo + leaf_len - 2);
    let need = hull.map_or(0, |(lo, hi)| hi - lo);
    let smallest = params.room_min.max(need);
    let largest = params.room_max.min(leaf_len - LEAF_ALLOWANCE);
    if smallest > largest {
        return None;
    }
    let size = rng.range_inclusive(smallest as i64, largest as i64) as i32;
    let (lo, hi) = match hull {
        Some((a, b)) => (inner_lo.max(b - size), a.min(inner_hi - size)),
        None => (inner_lo, inner_hi - size),
    };
    Some((rng.range_inclusive(lo as i64, hi as i64) as i32, size))
}

/// Builds a corridor between two rooms. With `band` the corridor runs
/// along it; otherwise width and offset are drawn, and `None` means the
/// interiors do not overlap enough to fit a corridor with both side walls.
fn try_corridor(
    ra: &Rect,
    rb: &Rect,
    dir: Side,
    rooms: [usize; 2],
    params: &BspParams,
    rng: &mut StreamRng,
    band: Option<(i32, i32)>,
) -> Option<Corridor> {
    let horizontal = matches!(dir, Side::E | Side::W);
    let (s, cw) = match band {
        Some(b) => b,
        None => {
            let (lo, hi) = if horizontal {
                (ra.y.max(rb.y), ra.y1().min(rb.y1()))
            } else {
                (ra.x.max(rb.x), ra.x1().min(rb.x1()))
            };
            let widest = params.corridor_max.min(hi - lo - 2);
            if widest < params.corridor_min {
                return None;
            }
            let cw = rng.range_inclusive(params.corridor_min as i64, widest as i64) as i32;
            (rng.range_inclusive((lo + 1) as i64, (hi - 1 - cw) as i64) as i32, cw)
        }
    };
    let door = if cw % 2 == 1 {
        s + cw / 2
    } else {
        s + cw / 2 - rng.coin() as i32
    };
    let (first, second) = match dir {
        Side::E | Side::S => (ra, rb),
        Side::W | Side::N => (rb, ra),
    };
    // `first` is the room with lower coordinates
    let (rect, d_first, d_second) = if horizontal {
        let (x0, x1) = (first.x1() + 1, second.x - 1);
        (Rect::new(x0, s, x1 - x0, cw), (first.x1(), door), (second.x - 1, door))
    } else {
        let (y0, y1) = (first.y1() + 1, second.y - 1);
        (Rect::new(s, y0, cw, y1 - y0), (door, first.y1()), (door, second.y - 1))
    };
    let doors = if matches!(dir, Side::E | Side::S) { [d_first, d_second] } else { [d_second, d_first] };
    Some(Corridor { rect, rooms, direction: dir, doors })
}

/// Rooms for every leaf, then corridors in N, E, S, W order from each leaf.
///
/// A spanning tree of adjacent leaves gets its corridor bands first and
/// every room is sized to cover the bands that end at it, so the tree
/// corridors always fit. Other adjacent pairs get a corridor when their
/// rooms happen to overlap. Returns `None` when the leaves cannot be
/// linked this way.
pub fn place_rooms_and_corridors(mut tree: BspNode, params: &BspParams, seed: u64, attempt: u32) -> Option<BspLayout> {
    let leaves: Vec<Rect> = tree.leaves().iter().map(|l| l.rect).collect();
    let mut corridor_rng = StreamRng::new(seed, Phase::Corridor);
    let lanes = lane_tree(&leaves, params, &mut corridor_rng)?;

    let mut room_rng = StreamRng::new(seed, Phase::Room);
    let mut rooms = Vec::new();
    for (i, leaf) in tree.leaves_mut().into_iter().enumerate() {
        let r = leaf.rect;
        let hull = |horizontal: bool| {
            lanes
                .iter()
                .filter(|l| l.horizontal == horizontal && (l.pair.0 == i || l.pair.1 == i))
                .map(|l| (l.start - 1, l.start + l.width + 1))
                .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
        };
        // north/south lanes constrain x, east/west lanes constrain y
        let (x, w) = room_axis(&mut room_rng, r.x, r.w, hull(false), params)?;
        let (y, h) = room_axis(&mut room_rng, r.y, r.h, hull(true), params)?;
        let room = Rect::new(x, y, w, h);
        leaf.room = Some(room);
        rooms.push(room);
    }

    let mut corridors: Vec<Corridor> = Vec::new();
    let mut owned: HashSet<(i32, i32)> = HashSet::new();
    let mut linked: HashSet<(usize, usize)> = HashSet::new();
    let mut per_leaf: Vec<Vec<Rect>> = vec![Vec::new(); leaves.len()];
    for i in 0..leaves.len() {
        for dir in Side::ALL {
            for j in neighbours(&leaves, i, dir) {
                let pair = (i.min(j), i.max(j));
                if linked.contains(&pair) {
                    continue;
                }
                let band = lanes.iter().find(|l| l.pair == pair).map(|l| (l.start, l.width));
                let Some(c) = try_corridor(&rooms[i], &rooms[j], dir, [i, j], params, &mut corridor_rng, band) else {
                    continue;
                };
                let cells = c.owned_cells();
                if cells.iter().any(|p| owned.contains(p)) {
                    continue;
                }
                owned.extend(cells);
                linked.insert(pair);
                per_leaf[i].push(c.rect);
                corridors.push(c);
            }
        }
    }
    for (leaf, rects) in tree.leaves_mut().into_iter().zip(per_leaf) {
        leaf.corridors = rects;
    }
    let layout = BspLayout { params: params.clone(), attempt, seed_used: seed, tree, rooms, corridors };
    layout.is_connected().then_some(layout)
}

/// Partition, rooms and corridors, restarting with `seed + attempt` until
/// a connected layout appears.
pub fn generate_layout(params: &BspParams) -> Result<BspLayout, BspError> {
    params.validate()?;
    for attempt in 0..=params.max_restarts {
        let seed = params.seed.wrapping_add(attempt as u64);
        let Some(tree) = partition(params, seed) else { continue };
        if let Some(layout) = place_rooms_and_corridors(tree, params, seed, attempt) {
            return Ok(layout);
        }
    }
    Err(BspError::RestartExhausted(params.max_restarts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellState {
    Empty,
    Floor,
    Wall,
    CornerWall,
    Door,
    Window,
}

impl CellState {
    pub fn token(self) -> char {
        match self {
            CellState::Empty => '.',
            CellState::Floor => 'F',
            CellState::Wall => 'W',
            CellState::CornerWall => 'C',
            CellState::Door => 'D',
            CellState::Window => 'O',
        }
    }

    pub fn from_token(c: char) -> Option<Self> {
        Some(match c {
            '.' => CellState::Empty,
            'F' => CellState::Floor,
            'W' => CellState::Wall,
            'C' => CellState::CornerWall,
            'D' => CellState::Door,
            'O' => CellState::Window,
            _ => return None,
        })
    }

    pub fn is_barrier(self) -> bool {
        matches!(self, CellState::Wall | CellState::CornerWall | CellState::Door | CellState::Window)
    }
}

/// For walls, doors and windows the side the floor lies on. For corners
/// the corner of the enclosed region they occupy: N = NW, E = NE, S = SE,
/// W = SW.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub state: CellState,
    pub orientation: Option<Side>,
}

impl Cell {
    pub const EMPTY: Cell = Cell { state: CellState::Empty, orientation: None };
    pub const FLOOR: Cell = Cell { state: CellState::Floor, orientation: None };

    fn oriented(state: CellState, side: Side) -> Cell {
        Cell { state, orientation: Some(side) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellGrid {
    width: i32,
    depth: i32,
    cells: Vec<Cell>,
}

#[derive(Serialize, Deserialize)]
struct CellGridDoc {
    width: i32,
    depth: i32,
    rows: Vec<String>,
}

impl Serialize for CellGrid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CellGridDoc { width: self.width, depth: self.depth, rows: self.rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CellGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let doc = CellGridDoc::deserialize(d)?;
        if doc.width < 0 || doc.depth < 0 || doc.rows.len() != doc.depth as usize {
            return Err(D::Error::custom("row count does not match depth"));
        }
        let mut cells = Vec::with_capacity((doc.width * doc.depth) as usize);
        for row in &doc.rows {
            let chars: Vec<char> = row.chars().collect();
            if chars.len() != 2 * doc.width as usize {
                return Err(D::Error::custom("row length does not match width"));
            }
            for pair in chars.chunks(2) {
                let state = CellState::from_token(pair[0]).ok_or_else(|| D::Error::custom("unknown cell state"))?;
                let orientation = match pair[1] {
                    '.' => None,
                    'n' => Some(Side::N),
                    'e' => Some(Side::E),
                    's' => Some(Side::S),
                    'w' => Some(Side::W),
                    _ => return Err(D::Error::custom("unknown orientation")),
                };
                cells.push(Cell { state, orientation });
            }
        }
        Ok(CellGrid { width: doc.width, depth: doc.depth, cells })
    }
}

impl fmt::Display for CellGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for y in 0..self.depth {
            let line: String = (0..self.width).map(|x| self.get(x, y).map_or(' ', |c| c.state.token())).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl CellGrid {
    pub fn new(width: i32, depth: i32) -> Self {
        CellGrid { width, depth, cells: vec![Cell::EMPTY; (width.max(0) * depth.max(0)) as usize] }
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn depth(&self) -> i32 {
        self.depth
    }

    pub fn get(&self, x: i32, y: i32) -> Option<Cell> {
        if x < 0 || y < 0 || x >= self.width || y >= self.depth {
            return None;
        }
        Some(self.cells[(y * self.width + x) as usize])
    }

    fn set(&mut self, x: i32, y: i32, cell: Cell) {
        assert!(x >= 0 && y >= 0 && x < self.width && y < self.depth, "({x}, {y}) outside grid");
        self.cells[(y * self.width + x) as usize] = cell;
    }

    fn state(&self, x: i32, y: i32) -> CellState {
        self.get(x, y).map_or(CellState::Empty, |c| c.state)
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|c| c.state == state).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, i32, Cell)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, c)| (i as i32 % self.width, i as i32 / self.width, *c))
    }

    pub fn rows(&self) -> Vec<String> {
        (0..self.depth)
            .map(|y| {
                (0..self.width)
                    .flat_map(|x| {
                        let c = self.get(x, y).unwrap();
                        [c.state.token(), c.orientation.map_or('.', |s| s.as_char())]
                    })
                    .collect()
            })
            .collect()
    }

    /// No floor cell touches an empty cell or the grid border, even
    /// diagonally.
    pub fn is_enclosed(&self) -> bool {
        self.iter().filter(|(_, _, c)| c.state == CellState::Floor).all(|(x, y, _)| {
            (-1..=1).all(|dy| (-1..=1).all(|dx| self.get(x + dx, y + dy).is_some_and(|n| n.state != CellState::Empty)))
        })
    }

    /// Every floor cell is reachable from every other through floor and
    /// door cells.
    pub fn floor_connected(&self) -> bool {
        let walkable = |c: Cell| matches!(c.state, CellState::Floor | CellState::Door);
        let Some(start) = self.iter().find(|(_, _, c)| c.state == CellState::Floor) else { return true };
        let mut seen = vec![false; self.cells.len()];
        let mut stack = vec![(start.0, start.1)];
        seen[(start.1 * self.width + start.0) as usize] = true;
        while let Some((x, y)) = stack.pop() {
            for side in Side::ALL {
                let (dx, dy) = side.delta();
                let (nx, ny) = (x + dx, y + dy);
                if let Some(c) = self.get(nx, ny) {
                    let i = (ny * self.width + nx) as usize;
                    if walkable(c) && !seen[i] {
                        seen[i] = true;
                        stack.push((nx, ny));
                    }
                }
            }
        }
        self.iter().all(|(x, y, c)| c.state != CellState::Floor || seen[(y * self.width + x) as usize])
    }
}

/// Writes a region's wall ring. With `skip` set, the ring's cells on those
/// two sides are left to whatever already occupies them.
fn write_ring(grid: &mut CellGrid, r: &Rect, skip: Option<[Side; 2]>) {
    let ring = r.grown(1);
    let skipped = |s: Side| skip.is_some_and(|k| k.contains(&s));
    for x in r.x..r.x1() {
        if !skipped(Side::N) {
            grid.set(x, ring.y, Cell::oriented(CellState::Wall, Side::S));
        }
        if !skipped(Side::S) {
            grid.set(x, ring.y1() - 1, Cell::oriented(CellState::Wall, Side::N));
        }
    }
    for y in r.y..r.y1() {
        if !skipped(Side::W) {
            grid.set(ring.x, y, Cell::oriented(CellState::Wall, Side::E));
        }
        if !skipped(Side::E) {
            grid.set(ring.x1() - 1, y, Cell::oriented(CellState::Wall, Side::W));
        }
    }
    grid.set(ring.x, ring.y, Cell::oriented(CellState::CornerWall, Side::N));
    grid.set(ring.x1() - 1, ring.y, Cell::oriented(CellState::CornerWall, Side::E));
    grid.set(ring.x1() - 1, ring.y1() - 1, Cell::oriented(CellState::CornerWall, Side::S));
    grid.set(ring.x, ring.y1() - 1, Cell::oriented(CellState::CornerWall, Side::W));
}

fn fill(grid: &mut CellGrid, r: &Rect) {
    for (x, y) in r.cells() {
        grid.set(x, y, Cell::FLOOR);
    }
}

/// Rasterizes a layout into cell states, placing windows on exterior room
/// walls with a per-side stride phase drawn from the window stream.
pub fn rasterize_states(layout: &BspLayout) -> CellGrid {
    let p = &layout.params;
    let mut grid = CellGrid::new(p.footprint_w, p.footprint_d);
    for room in &layout.rooms {
        write_ring(&mut grid, room, None);
        fill(&mut grid, room);
    }
    for c in &layout.corridors {
        let ends = match c.direction {
            Side::E | Side::W => [Side::E, Side::W],
            Side::N | Side::S => [Side::N, Side::S],
        };
        write_ring(&mut grid, &c.rect, Some(ends));
        fill(&mut grid, &c.rect);
        for (k, &(x, y)) in c.doors.iter().enumerate() {
            let room = &layout.rooms[c.rooms[k]];
            let facing = if x < room.x {
                Side::E
            } else if x >= room.x1() {
                Side::W
            } else if y < room.y {
                Side::S
            } else {
                Side::N
            };
            grid.set(x, y, Cell::oriented(CellState::Door, facing));
        }
    }
    let mut rng = StreamRng::new(layout.seed_used, Phase::Window);
    for room in &layout.rooms {
        for side in Side::ALL {
            let phase = rng.below(WINDOW_STRIDE as u64) as i32;
            let (dx, dy) = side.delta();
            let cells: Vec<(i32, i32)> = match side {
                Side::N => (room.x..room.x1()).map(|x| (x, room.y - 1)).collect(),
                Side::S => (room.x..room.x1()).map(|x| (x, room.y1())).collect(),
                Side::E => (room.y..room.y1()).map(|y| (room.x1(), y)).collect(),
                Side::W => (room.y..room.y1()).map(|y| (room.x - 1, y)).collect(),
            };
            for (i, (x, y)) in cells.into_iter().enumerate() {
                let exterior = grid.state(x + dx, y + dy) == CellState::Empty;
                if i as i32 % WINDOW_STRIDE == phase && grid.state(x, y) == CellState::Wall && exterior {
                    let o = grid.get(x, y).unwrap().orientation.unwrap();
                    grid.set(x, y, Cell::oriented(CellState::Window, o));
                }
            }
        }
    }
    grid
}

/// Non-floor cell count implied by the layout's rooms and corridors.
pub fn expected_barrier_cells(layout: &BspLayout) -> usize {
    let rooms: i64 = layout.rooms.iter().map(|r| 2 * (r.w + r.h) as i64 + 4).sum();
    let corridors: i64 = layout.corridors.iter().map(|c| 2 * c.length() as i64).sum();
    (rooms + corridors) as usize
}

/// Realizes cell states as oriented tiles; floors also get a roof.
pub fn cells_to_scene(grid: &CellGrid, grid_height_m: f64, grid_levels: u32, tile: TileSize) -> Result<TileScene, SceneError> {
    let mut scene = TileScene::new(grid_levels, grid_height_m, tile)?;
    let t = tile.meters();
    let span = EdgeSpan { length_m: t, along_m: 0.0, outward_m: 0.5 * t };
    for level in 0..grid_levels {
        for (x, y, c) in grid.iter() {
            if c.state == CellState::Floor {
                scene.insert(PlacedObject::new(ObjectKind::Floor, ObjectKind::Floor.as_str(), Pose::floor(level, x, y)))?;
                scene.insert(PlacedObject::new(ObjectKind::Roof, ObjectKind::Roof.as_str(), Pose::floor(level, x, y)))?;
            }
        }
        for (x, y, c) in grid.iter() {
            let kind = match c.state {
                CellState::Empty | CellState::Floor => continue,
                CellState::Wall => ObjectKind::Wall,
                CellState::CornerWall => ObjectKind::CornerWall,
                CellState::Door => ObjectKind::Door,
                CellState::Window => ObjectKind::Window,
            };
            let o = c.orientation.expect("barrier cells are oriented");
            let pose = if kind == ObjectKind::CornerWall {
                // attach to the floor cell diagonally inside the corner
                let (fx, fy) = match o {
                    Side::N => (x + 1, y + 1),
                    Side::E => (x - 1, y + 1),
                    Side::S => (x - 1, y - 1),
                    Side::W => (x + 1, y - 1),
                };
                Pose::edge_span(level, fx, fy, o, EdgeSpan { length_m: t, ..span })
            } else {
                let (dx, dy) = o.delta();
                Pose::edge_span(level, x + dx, y + dy, o.opposite(), span)
            };
            scene.insert(PlacedObject::new(kind, kind.as_str(), pose))?;
        }
    }
    Ok(scene)
}

/// Layout, grid and scene with the replay stamp attached.
pub fn generate_scene(params: &BspParams, grid_height_m: f64, grid_levels: u32) -> Result<(BspLayout, CellGrid, TileScene), BspError> {
    let layout = generate_layout(params)?;
    let grid = rasterize_states(&layout);
    let mut scene = cells_to_scene(&grid, grid_height_m, grid_levels, TileSize::One)?;
    let layout_doc = serde_json::json!({
        "attempt": layout.attempt,
        "seed_used": layout.seed_used,
        "tree": layout.tree,
        "rooms": layout.rooms,
        "corridors": layout.corridors,
        "grid": grid,
    });
    scene.set_generation("bspca", serde_json::to_value(params).expect("params serialize"), layout_doc);
    Ok((layout, grid, scene))
}

/// Parameters with every field drawn from the seed, shrunk until the
/// footprint can hold the rooms.
pub fn random_params(seed: u64, footprint_w: i32, footprint_d: i32) -> BspParams {
    let mut rng = StreamRng::new(seed, Phase::Params);
    let room_min = rng.range_inclusive(3, 5) as i32;
    let room_max = room_min + rng.range_inclusive(0, 6) as i32;
    let corridor_min = 1;
    let corridor_max = rng.range_inclusive(1, 3) as i32;
    let mut num_rooms = rng.range_inclusive(2, 8) as u32;
    let leaf = (room_min + LEAF_ALLOWANCE) as i64;
    let area = footprint_w as i64 * footprint_d as i64;
    while num_rooms > 1 && num_rooms as i64 * leaf * leaf > area {
        num_rooms -= 1;
    }
    BspParams {
        footprint_w,
        footprint_d,
        num_rooms,
        room_min,
        room_max,
        corridor_min,
        corridor_max,
        seed,
        max_restarts: DEFAULT_MAX_RESTARTS,
    }
}

/// Room count and minimum room size from the catalog; the remaining fields
/// come from the seed.
pub fn params_from_data(
    catalog: &Catalog,
    key: GroupKeyKind,
    footprint: (i32, i32),
    seed: u64,
    constants: &SizingConstants,
) -> Result<BspParams, BspError> {
    let rooms = plan_rooms(catalog, key, constants)?;
    let (w, d) = footprint;
    let needed: i64 = rooms
        .iter()
        .map(|r| r.width_m.ceil() as i64 * r.depth_m.ceil() as i64)
        .sum();
    if needed > w as i64 * d as i64 {
        return Err(BspError::InfeasibleParams(format!(
            "rooms need {needed} cells but the footprint has {}",
            w as i64 * d as i64
        )));
    }
    let largest = rooms.iter().map(|r| r.width_m.max(r.depth_m).ceil() as i32).max().unwrap_or(3);
    let mut rng = StreamRng::new(seed, Phase::Params);
    let room_min = largest.max(3);
    let params = BspParams {
        footprint_w: w,
        footprint_d: d,
        num_rooms: rooms.len() as u32,
        room_min,
        room_max: room_min + rng.range_inclusive(0, 4) as i32,
        corridor_min: 1,
        corridor_max: rng.range_inclusive(1, 3) as i32,
        seed,
        max_restarts: DEFAULT_MAX_RESTARTS,
    };
    params.validate()?;
    Ok(params)
}
