//! Finite unimodal frames, delta-frames, and the frame constructions used by
//! the encodings: delta-products, fans, spy-chains, and disjoint unions with
//! a spy-point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

/// A world identifier: a natural, a named token, or a pair of identifiers.
/// Pairs arise from products; the derived ordering makes every enumeration
/// deterministic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum World {
    Num(u64),
    Name(String),
    Pair(Box<World>, Box<World>),
}

impl World {
    pub fn pair(h: World, v: World) -> World {
        World::Pair(Box::new(h), Box::new(v))
    }

    /// Components of a pair world.
    pub fn as_pair(&self) -> Option<(&World, &World)> {
        match self {
            World::Pair(h, v) => Some((h, v)),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            World::Num(n) => json!(n),
            World::Name(s) => json!(s),
            World::Pair(h, v) => json!([h.to_json(), v.to_json()]),
        }
    }

    pub fn from_json(value: &Value) -> Result<World, FrameError> {
        match value {
            Value::Number(n) => n
                .as_u64()
                .map(World::Num)
                .ok_or_else(|| FrameError::Json(format!("bad world number {n}"))),
            Value::String(s) => Ok(World::Name(s.clone())),
            Value::Array(items) if items.len() == 2 => Ok(World::pair(
                World::from_json(&items[0])?,
                World::from_json(&items[1])?,
            )),
            other => Err(FrameError::Json(format!("bad world {other}"))),
        }
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            World::Num(n) => write!(f, "{n}"),
            World::Name(s) => write!(f, "{s}"),
            World::Pair(h, v) => write!(f, "({h},{v})"),
        }
    }
}

impl From<u64> for World {
    fn from(n: u64) -> World {
        World::Num(n)
    }
}

impl From<&str> for World {
    fn from(s: &str) -> World {
        World::Name(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("frame must have at least one world")]
    EmptyWorlds,
    #[error("relation edge ({0},{1}) mentions a world outside the frame")]
    EdgeOutsideWorlds(World, World),
    #[error("diagonal world {0} outside the frame")]
    DiagOutsideWorlds(World),
    #[error("fan and spy-chain sizes must be at least 1")]
    ZeroSize,
    #[error("disjoint union with a spy-point needs at least one frame")]
    EmptyUnion,
    #[error("world {0} has no pair interpretation")]
    NotAPair(World),
    #[error("malformed frame JSON: {0}")]
    Json(String),
}

/// A finite unimodal Kripke frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    worlds: BTreeSet<World>,
    rel: BTreeSet<(World, World)>,
}

impl Frame {
    pub fn new(
        worlds: impl IntoIterator<Item = World>,
        rel: impl IntoIterator<Item = (World, World)>,
    ) -> Result<Frame, FrameError> {
        let worlds: BTreeSet<World> = worlds.into_iter().collect();
        let rel: BTreeSet<(World, World)> = rel.into_iter().collect();
        if worlds.is_empty() {
            return Err(FrameError::EmptyWorlds);
        }
        for (a, b) in &rel {
            if !worlds.contains(a) || !worlds.contains(b) {
                return Err(FrameError::EdgeOutsideWorlds(a.clone(), b.clone()));
            }
        }
        Ok(Frame { worlds, rel })
    }

    /// Frame on `{0..k-1}` whose worlds are all seen from world `0` in one
    /// step: the minimal relation `{(0,n) : 0 < n < k}`. Larger fans are
    /// obtained with [`Frame::with_edges`].
    pub fn fan(k: u64) -> Result<Frame, FrameError> {
        if k == 0 {
            return Err(FrameError::ZeroSize);
        }
        Frame::new(
            (0..k).map(World::Num),
            (1..k).map(|n| (World::Num(0), World::Num(n))),
        )
    }

    /// Frame on `{0..k}` where world `k` (the spy-point) sees every world
    /// `n < k` and the worlds `0..k-1` form a successor chain.
    pub fn spy_chain(k: u64) -> Result<Frame, FrameError> {
        if k == 0 {
            return Err(FrameError::ZeroSize);
        }
        let spy = (0..k).map(|n| (World::Num(k), World::Num(n)));
        let chain = (1..k).map(|n| (World::Num(n - 1), World::Num(n)));
        Frame::new((0..=k).map(World::Num), spy.chain(chain))
    }

    /// The spy-point of [`Frame::spy_chain`].
    pub fn spy_of_chain(k: u64) -> World {
        World::Num(k)
    }

    /// A copy of the frame with extra edges added.
    pub fn with_edges(
        &self,
        extra: impl IntoIterator<Item = (World, World)>,
    ) -> Result<Frame, FrameError> {
        Frame::new(
            self.worlds.iter().cloned(),
            self.rel.iter().cloned().chain(extra),
        )
    }

    pub fn worlds(&self) -> &BTreeSet<World> {
        &self.worlds
    }

    pub fn rel(&self) -> &BTreeSet<(World, World)> {
        &self.rel
    }

    pub fn has_edge(&self, a: &World, b: &World) -> bool {
        self.rel.contains(&(a.clone(), b.clone()))
    }

    pub fn successors<'a>(&'a self, w: &'a World) -> impl Iterator<Item = &'a World> + 'a {
        self.rel
            .range((w.clone(), World::Num(0))..)
            .take_while(move |(a, _)| a == w)
            .map(|(_, b)| b)
    }

    pub fn out_degree(&self, w: &World) -> usize {
        self.successors(w).count()
    }

    pub fn max_out_degree(&self) -> usize {
        self.worlds
            .iter()
            .map(|w| self.out_degree(w))
            .max()
            .unwrap_or(0)
    }

    /// Every world has at most `n` successors.
    pub fn is_alt(&self, n: usize) -> bool {
        self.max_out_degree() <= n
    }

    /// Exhaustively decided frame properties.
    pub fn properties(&self) -> FrameProperties {
        let ws: Vec<&World> = self.worlds.iter().collect();
        let serial = ws.iter().all(|w| self.successors(w).next().is_some());
        let reflexive = ws.iter().all(|w| self.has_edge(w, w));
        let symmetric = self.rel.iter().all(|(a, b)| self.has_edge(b, a));
        let transitive = self.rel.iter().all(|(a, b)| {
            self.successors(b)
                .all(|c| self.has_edge(a, c))
        });
        let weakly_connected = ws.iter().all(|x| {
            let succ: Vec<&World> = self.successors(x).collect();
            succ.iter().all(|y| {
                succ.iter().all(|z| {
                    y == z || self.has_edge(y, z) || self.has_edge(z, y)
                })
            })
        });
        let universal = self.rel.len() == self.worlds.len() * self.worlds.len();
        FrameProperties {
            serial,
            reflexive,
            transitive,
            symmetric,
            weakly_connected,
            universal,
            max_out_degree: self.max_out_degree(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "worlds": self.worlds.iter().map(World::to_json).collect::<Vec<_>>(),
            "rel": self.rel.iter().map(|(a, b)| json!([a.to_json(), b.to_json()])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Frame, FrameError> {
        let worlds = json_worlds(value, "worlds")?;
        let rel = json_edges(value, "rel")?;
        Frame::new(worlds, rel)
    }
}

/// Truth of the standard frame conditions, decided by exhaustive checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameProperties {
    pub serial: bool,
    pub reflexive: bool,
    pub transitive: bool,
    pub symmetric: bool,
    pub weakly_connected: bool,
    pub universal: bool,
    pub max_out_degree: usize,
}

impl FrameProperties {
    pub fn alt(&self, n: usize) -> bool {
        self.max_out_degree <= n
    }
}

/// A finite 3-modal delta-frame: two relations plus a diagonal set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaFrame {
    worlds: BTreeSet<World>,
    rh: BTreeSet<(World, World)>,
    rv: BTreeSet<(World, World)>,
    diag: BTreeSet<World>,
}

impl DeltaFrame {
    pub fn new(
        worlds: impl IntoIterator<Item = World>,
        rh: impl IntoIterator<Item = (World, World)>,
        rv: impl IntoIterator<Item = (World, World)>,
        diag: impl IntoIterator<Item = World>,
    ) -> Result<DeltaFrame, FrameError> {
        let worlds: BTreeSet<World> = worlds.into_iter().collect();
        let rh: BTreeSet<(World, World)> = rh.into_iter().collect();
        let rv: BTreeSet<(World, World)> = rv.into_iter().collect();
        let diag: BTreeSet<World> = diag.into_iter().collect();
        if worlds.is_empty() {
            return Err(FrameError::EmptyWorlds);
        }
        for (a, b) in rh.iter().chain(rv.iter()) {
            if !worlds.contains(a) || !worlds.contains(b) {
                return Err(FrameError::EdgeOutsideWorlds(a.clone(), b.clone()));
            }
        }
        for d in &diag {
            if !worlds.contains(d) {
                return Err(FrameError::DiagOutsideWorlds(d.clone()));
            }
        }
        Ok(DeltaFrame {
            worlds,
            rh,
            rv,
            diag,
        })
    }

    pub fn worlds(&self) -> &BTreeSet<World> {
        &self.worlds
    }
    pub fn rh(&self) -> &BTreeSet<(World, World)> {
        &self.rh
    }
    pub fn rv(&self) -> &BTreeSet<(World, World)> {
        &self.rv
    }
    pub fn diag(&self) -> &BTreeSet<World> {
        &self.diag
    }

    pub fn contains(&self, w: &World) -> bool {
        self.worlds.contains(w)
    }

    pub fn succ_h<'a>(&'a self, w: &'a World) -> impl Iterator<Item = &'a World> + 'a {
        rel_successors(&self.rh, w)
    }

    pub fn succ_v<'a>(&'a self, w: &'a World) -> impl Iterator<Item = &'a World> + 'a {
        rel_successors(&self.rv, w)
    }

    /// A root under the reflexive-transitive closure of the union relation,
    /// if one exists; the least such world in enumeration order.
    pub fn root(&self) -> Option<World> {
        let ws: Vec<&World> = self.worlds.iter().collect();
        let index: BTreeMap<&World, usize> = ws.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        let n = ws.len();
        let mut reach = vec![false; n * n];
        for i in 0..n {
            reach[i * n + i] = true;
        }
        for (a, b) in self.rh.iter().chain(self.rv.iter()) {
            reach[index[a] * n + index[b]] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i * n + k] {
                    for j in 0..n {
                        if reach[k * n + j] {
                            reach[i * n + j] = true;
                        }
                    }
                }
            }
        }
        (0..n)
            .find(|&i| (0..n).all(|j| reach[i * n + j]))
            .map(|i| ws[i].clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "worlds": self.worlds.iter().map(World::to_json).collect::<Vec<_>>(),
            "rh": self.rh.iter().map(|(a, b)| json!([a.to_json(), b.to_json()])).collect::<Vec<_>>(),
            "rv": self.rv.iter().map(|(a, b)| json!([a.to_json(), b.to_json()])).collect::<Vec<_>>(),
            "diag": self.diag.iter().map(World::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<DeltaFrame, FrameError> {
        DeltaFrame::new(
            json_worlds(value, "worlds")?,
            json_edges(value, "rh")?,
            json_edges(value, "rv")?,
            json_worlds(value, "diag")?,
        )
    }
}

fn rel_successors<'a>(
    rel: &'a BTreeSet<(World, World)>,
    w: &'a World,
) -> impl Iterator<Item = &'a World> + 'a {
    rel.range((w.clone(), World::Num(0))..)
        .take_while(move |(a, _)| a == w)
        .map(|(_, b)| b)
}

fn json_worlds(value: &Value, key: &str) -> Result<Vec<World>, FrameError> {
    value
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| FrameError::Json(format!("missing array {key:?}")))?
        .iter()
        .map(World::from_json)
        .collect()
}

fn json_edges(value: &Value, key: &str) -> Result<Vec<(World, World)>, FrameError> {
    value
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| FrameError::Json(format!("missing array {key:?}")))?
        .iter()
        .map(|pair| match pair.as_array() {
            Some(items) if items.len() == 2 => {
                Ok((World::from_json(&items[0])?, World::from_json(&items[1])?))
            }
            _ => Err(FrameError::Json(format!("bad edge {pair}"))),
        })
        .collect()
}

/// The delta-product: worlds are pairs, the horizontal relation moves the
/// first coordinate, the vertical relation the second, and the diagonal is
/// the identity on the shared worlds of the two components.
pub fn delta_product(fh: &Frame, fv: &Frame) -> DeltaFrame {
    let mut worlds = BTreeSet::new();
    let mut rh = BTreeSet::new();
    let mut rv = BTreeSet::new();
    let mut diag = BTreeSet::new();
    for x in fh.worlds() {
        for y in fv.worlds() {
            worlds.insert(World::pair(x.clone(), y.clone()));
        }
    }
    for (x, x2) in fh.rel() {
        for y in fv.worlds() {
            rh.insert((
                World::pair(x.clone(), y.clone()),
                World::pair(x2.clone(), y.clone()),
            ));
        }
    }
    for (y, y2) in fv.rel() {
        for x in fh.worlds() {
            rv.insert((
                World::pair(x.clone(), y.clone()),
                World::pair(x.clone(), y2.clone()),
            ));
        }
    }
    for x in fh.worlds() {
        if fv.worlds().contains(x) {
            diag.insert(World::pair(x.clone(), x.clone()));
        }
    }
    DeltaFrame {
        worlds,
        rh,
        rv,
        diag,
    }
}

/// Fresh root seeing every world of tagged copies of the given frames; edges
/// within each copy mirror the original relation.
pub fn disjoint_union_with_spy(frames: &[Frame]) -> Result<Frame, FrameError> {
    if frames.is_empty() {
        return Err(FrameError::EmptyUnion);
    }
    let spy = World::Name("spy".to_string());
    let tag = |w: &World, i: usize| World::pair(w.clone(), World::Num(i as u64));
    let mut worlds = BTreeSet::from([spy.clone()]);
    let mut rel = BTreeSet::new();
    for (i, f) in frames.iter().enumerate() {
        for w in f.worlds() {
            let t = tag(w, i);
            rel.insert((spy.clone(), t.clone()));
            worlds.insert(t);
        }
        for (a, b) in f.rel() {
            rel.insert((tag(a, i), tag(b, i)));
        }
    }
    Ok(Frame { worlds, rel })
}

/// The spy-point world of [`disjoint_union_with_spy`].
pub fn spy_point() -> World {
    World::Name("spy".to_string())
}

/// Whether the diagonal of a delta-frame whose worlds are pairs hits each
/// row and each column at most once. Errors on worlds without a pair
/// interpretation.
pub fn diag_uniqueness(df: &DeltaFrame) -> Result<bool, FrameError> {
    let mut by_h: BTreeMap<&World, &World> = BTreeMap::new();
    let mut by_v: BTreeMap<&World, &World> = BTreeMap::new();
    for w in df.diag() {
        let (h, v) = w.as_pair().ok_or_else(|| FrameError::NotAPair(w.clone()))?;
        if let Some(prev) = by_h.insert(h, v) {
            if prev != v {
                return Ok(false);
            }
        }
        if let Some(prev) = by_v.insert(v, h) {
            if prev != h {
                return Ok(false);
            }
        }
    }
    // Non-diagonal worlds still need pair interpretations for the check to
    // be meaningful.
    for w in df.worlds() {
        if w.as_pair().is_none() {
            return Err(FrameError::NotAPair(w.clone()));
        }
    }
    Ok(true)
}
