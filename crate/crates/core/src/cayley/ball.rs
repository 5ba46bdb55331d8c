use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{GroupOracle, Letter, PresentationSpec, Word};
use crate::rational::Rational;

pub type VertexId = u32;

const NONE: VertexId = VertexId::MAX;

/// Default cap on the number of vertices of a ball.
pub const DEFAULT_VERTEX_CAP: usize = 4_000_000;

#[derive(Debug, Clone)]
enum Index {
    /// The oracle's reduction is a canonical normal form.
    Exact(HashMap<Word, VertexId>),
    /// Fingerprint buckets, confirmed by the word problem.
    Keyed(HashMap<u64, Vec<VertexId>>),
}

/// The radius-`N` ball of `Cay(G, S)` around the identity.
///
/// Vertices are numbered level by level; within a level they appear in
/// increasing ShortLex order of their normal forms.
#[derive(Debug, Clone)]
pub struct CayleyBall {
    oracle: Arc<GroupOracle>,
    radius: usize,
    words: Vec<Word>,
    /// `level_start[k]..level_start[k + 1]` are the vertices at level `k`.
    level_start: Vec<usize>,
    /// `edges[v * |S| + s]`, `NONE` when `v·s` leaves the ball.
    edges: Vec<VertexId>,
    preds: Vec<Vec<(VertexId, Letter)>>,
    index: Index,
}

/// Geodesic words between two vertices, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geodesics {
    pub words: Vec<Word>,
    /// More geodesics exist beyond the cap.
    pub overflow: bool,
}

impl PartialEq for CayleyBall {
    fn eq(&self, other: &Self) -> bool {
        self.radius == other.radius
            && self.words == other.words
            && self.level_start == other.level_start
            && self.edges == other.edges
            && self.preds == other.preds
            && PresentationSpec::of(&self.oracle) == PresentationSpec::of(&other.oracle)
    }
}

impl CayleyBall {
    /// Breadth-first construction from the identity.
    ///
    /// A candidate `w·s` is identified with an existing vertex `u` iff
    /// `(w·s)·u⁻¹` is trivial, testing only vertices at levels `|w| - 1`,
    /// `|w|` and `|w| + 1`. The first discovery of a vertex is its ShortLex
    /// normal form because parents and letters are visited in order.
    pub fn build(oracle: Arc<GroupOracle>, radius: usize, vertex_cap: usize) -> Result<Self> {
        let width = oracle.alphabet().len();
        let index = if oracle.has_geodesic_normal_form() {
            Index::Exact(HashMap::new())
        } else {
            Index::Keyed(HashMap::new())
        };
        let mut ball = CayleyBall {
            oracle,
            radius,
            words: vec![Word::empty()],
            level_start: vec![0, 1],
            edges: vec![NONE; width],
            preds: vec![Vec::new()],
            index,
        };
        ball.index_insert(0);

        for k in 0..=radius {
            let (lo, hi) = (ball.level_start[k], ball.level_start[k + 1]);
            for v in lo..hi {
                for s in 0..width as Letter {
                    if ball.edges[v * width + s as usize] != NONE {
                        continue;
                    }
                    let mut cand = ball.words[v].clone();
                    cand.push(s);
                    let lvl = |u: usize, b: &CayleyBall| b.level(u as VertexId);
                    let found = ball.find(&cand, |u, b| {
                        let l = lvl(u, b);
                        l + 1 >= k && l <= k + 1
                    })?;
                    let u = match found {
                        Some(u) => u as usize,
                        None if k < radius => {
                            if ball.words.len() >= vertex_cap {
                                return Err(Error::ResourceLimit(format!(
                                    "ball exceeds {vertex_cap} vertices at level {}",
                                    k + 1
                                )));
                            }
                            let u = ball.words.len();
                            ball.words.push(cand);
                            ball.edges.extend(std::iter::repeat_n(NONE, width));
                            ball.preds.push(Vec::new());
                            ball.index_insert(u);
                            u
                        }
                        None => continue,
                    };
                    let si = ball.oracle.alphabet().inv(s);
                    ball.edges[v * width + s as usize] = u as VertexId;
                    ball.edges[u * width + si as usize] = v as VertexId;
                    if u >= hi {
                        ball.preds[u].push((v as VertexId, s));
                    }
                }
            }
            if k < radius {
                ball.level_start.push(ball.words.len());
            }
        }
        Ok(ball)
    }

    fn index_insert(&mut self, v: usize) {
        match &mut self.index {
            Index::Exact(map) => {
                map.insert(self.words[v].clone(), v as VertexId);
            }
            Index::Keyed(map) => {
                let key = self
                    .oracle
                    .fingerprinter()
                    .expect("keyed index needs a fingerprinter")
                    .key(self.words[v].letters());
                map.entry(key).or_default().push(v as VertexId);
            }
        }
    }

    fn find(
        &self,
        w: &Word,
        admissible: impl Fn(usize, &CayleyBall) -> bool,
    ) -> Result<Option<VertexId>> {
        match &self.index {
            Index::Exact(map) => {
                let nf = self.oracle.reduce(w)?;
                Ok(map
                    .get(&nf)
                    .copied()
                    .filter(|&u| admissible(u as usize, self)))
            }
            Index::Keyed(map) => {
                let key = self
                    .oracle
                    .fingerprinter()
                    .expect("fingerprinter")
                    .key(w.letters());
                let Some(bucket) = map.get(&key) else {
                    return Ok(None);
                };
                for &u in bucket {
                    if admissible(u as usize, self)
                        && self.oracle.equal(w, &self.words[u as usize])?
                    {
                        return Ok(Some(u));
                    }
                }
                Ok(None)
            }
        }
    }

    /// The vertex representing the element `w`, if it lies in the ball.
    pub fn locate(&self, w: &Word) -> Result<Option<VertexId>> {
        if let Index::Exact(_) = self.index {
            let nf = self.oracle.reduce(w)?;
            if nf.len() > self.radius {
                return Ok(None);
            }
        }
        self.find(w, |_, _| true)
    }

    pub fn oracle(&self) -> &GroupOracle {
        &self.oracle
    }

    pub fn oracle_arc(&self) -> &Arc<GroupOracle> {
        &self.oracle
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn identity(&self) -> VertexId {
        0
    }

    pub fn level(&self, v: VertexId) -> usize {
        self.words[v as usize].len()
    }

    /// Vertices at level `k`.
    pub fn sphere(&self, k: usize) -> std::ops::Range<VertexId> {
        if k > self.radius {
            return 0..0;
        }
        self.level_start[k] as VertexId..self.level_start[k + 1] as VertexId
    }

    pub fn word(&self, v: VertexId) -> &Word {
        &self.words[v as usize]
    }

    pub fn neighbor(&self, v: VertexId, s: Letter) -> Option<VertexId> {
        let u = self.edges[v as usize * self.oracle.alphabet().len() + s as usize];
        (u != NONE).then_some(u)
    }

    pub fn geodesic_preds(&self, v: VertexId) -> &[(VertexId, Letter)] {
        &self.preds[v as usize]
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.words.len() {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("vertex {v} is not in the ball")))
        }
    }

    /// `d(x, y)`, the level of the vertex identified with `x⁻¹y`.
    pub fn distance(&self, x: VertexId, y: VertexId) -> Result<usize> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        if x == y {
            return Ok(0);
        }
        self.distance_words(self.word(x), self.word(y))
    }

    /// Distance between the elements represented by two arbitrary words.
    pub fn distance_words(&self, p: &Word, q: &Word) -> Result<usize> {
        self.try_distance_words(p, q)?
            .ok_or_else(|| Error::OutOfRange("x⁻¹y lies outside the ball".into()))
    }

    /// Like [`CayleyBall::distance_words`], with `None` beyond [`CayleyBall::reach`].
    pub fn try_distance_words(&self, p: &Word, q: &Word) -> Result<Option<usize>> {
        self.word_length(&self.oracle.alphabet().inverse(p).concat(q))
    }

    /// Largest element length answered exactly: the radius, or unbounded when
    /// the oracle's reduction already is the ShortLex normal form.
    pub fn reach(&self) -> usize {
        if self.oracle.has_geodesic_normal_form() {
            usize::MAX
        } else {
            self.radius
        }
    }

    /// Word length `|w|_S` of an element, if it is within reach.
    pub fn word_length(&self, w: &Word) -> Result<Option<usize>> {
        if self.oracle.has_geodesic_normal_form() {
            return Ok(Some(self.oracle.reduce(w)?.len()));
        }
        Ok(self.locate(w)?.map(|v| self.level(v)))
    }

    /// ShortLex normal form of an element, if it is within reach.
    pub fn normal_form(&self, w: &Word) -> Result<Option<Word>> {
        if self.oracle.has_geodesic_normal_form() {
            return self.oracle.reduce(w).map(Some);
        }
        Ok(self.locate(w)?.map(|v| self.words[v as usize].clone()))
    }

    /// Word length up to twice the radius. Beyond the ball every geodesic
    /// crosses the top sphere, so `|w| = R + min |u⁻¹w|` over `u` at level `R`.
    pub fn extended_length(&self, w: &Word) -> Result<Option<usize>> {
        if let Some(l) = self.word_length(w)? {
            return Ok(Some(l));
        }
        let top: Vec<VertexId> = self.sphere(self.radius).collect();
        let inv = self.oracle.alphabet();
        let best = top
            .par_iter()
            .map(|&u| {
                Ok(self
                    .locate(&inv.inverse(self.word(u)).concat(w))?
                    .map(|v| self.level(v)))
            })
            .collect::<Result<Vec<Option<usize>>>>()?
            .into_iter()
            .flatten()
            .min();
        Ok(best.map(|d| d + self.radius))
    }

    /// `w` is a geodesic word (from the identity).
    pub fn is_geodesic(&self, w: &Word) -> Result<bool> {
        if w.len() > self.reach() {
            return Err(Error::OutOfRange(format!(
                "word of length {} exceeds ball radius {}",
                w.len(),
                self.radius
            )));
        }
        Ok(self.word_length(w)? == Some(w.len()))
    }

    /// The lex-least geodesic word from `e` to `v`.
    pub fn shortlex_nf(&self, v: VertexId) -> Result<Word> {
        self.check_vertex(v)?;
        Ok(self.words[v as usize].clone())
    }

    /// All geodesic words from `x` to `y` in lexicographic order, at most `cap`.
    pub fn enumerate_geodesics(&self, x: VertexId, y: VertexId, cap: usize) -> Result<Geodesics> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        let w = self
            .oracle
            .alphabet()
            .inverse(self.word(x))
            .concat(self.word(y));
        let z = self
            .locate(&w)?
            .ok_or_else(|| Error::OutOfRange("x⁻¹y lies outside the ball".into()))?;
        Ok(self.geodesics_to(z, cap))
    }

    /// Geodesic words from `e` to `z`, lexicographically, at most `cap`.
    pub fn geodesics_to(&self, z: VertexId, cap: usize) -> Geodesics {
        let mut cone: HashSet<VertexId> = HashSet::new();
        let mut stack = vec![z];
        cone.insert(z);
        while let Some(v) = stack.pop() {
            for &(p, _) in self.geodesic_preds(v) {
                if cone.insert(p) {
                    stack.push(p);
                }
            }
        }
        let mut out = Geodesics {
            words: Vec::new(),
            overflow: false,
        };
        let mut cur = Word::empty();
        self.geodesic_dfs(0, z, &cone, cap, &mut cur, &mut out);
        out
    }

    fn geodesic_dfs(
        &self,
        v: VertexId,
        z: VertexId,
        cone: &HashSet<VertexId>,
        cap: usize,
        cur: &mut Word,
        out: &mut Geodesics,
    ) {
        if out.overflow {
            return;
        }
        if v == z {
            if out.words.len() == cap {
                out.overflow = true;
            } else {
                out.words.push(cur.clone());
            }
            return;
        }
        let next_level = self.level(v) + 1;
        for s in self.oracle.alphabet().letters() {
            if let Some(u) = self.neighbor(v, s) {
                if self.level(u) == next_level && cone.contains(&u) {
                    cur.push(s);
                    self.geodesic_dfs(u, z, cone, cap, cur, out);
                    cur.0.pop();
                    if out.overflow {
                        return;
                    }
                }
            }
        }
    }

    /// Follows edges from `start` along `w`, falling back to the word
    /// problem when a step leaves the recorded edges.
    pub fn walk(&self, start: VertexId, w: &Word) -> Result<Option<VertexId>> {
        let mut v = start;
        for (i, &s) in w.letters().iter().enumerate() {
            match self.neighbor(v, s) {
                Some(u) => v = u,
                None => {
                    let rest = Word(w.letters()[i..].to_vec());
                    return self.locate(&self.word(v).concat(&rest));
                }
            }
        }
        Ok(Some(v))
    }

    /// Number of vertices at level at most `k`.
    pub fn ball_size(&self, k: usize) -> Result<usize> {
        if k > self.radius {
            return Err(Error::OutOfRange(format!(
                "radius {k} exceeds ball radius {}",
                self.radius
            )));
        }
        Ok(self.level_start[k + 1])
    }

    /// `M_{5δ}`: the size of the radius-`floor(5δ)` ball.
    pub fn m_of(&self, delta: Rational) -> Result<usize> {
        self.ball_size(delta.scale(5).floor() as usize)
    }

    pub(crate) fn raw_parts(&self) -> (&[Word], &[VertexId]) {
        (&self.words, &self.edges)
    }

    pub(crate) fn from_parts(
        oracle: Arc<GroupOracle>,
        radius: usize,
        words: Vec<Word>,
        edges: Vec<VertexId>,
    ) -> Result<Self> {
        let width = oracle.alphabet().len();
        if edges.len() != words.len() * width || words.first().is_none_or(|w| !w.is_empty()) {
            return Err(Error::Serde("inconsistent ball tables".into()));
        }
        let mut level_start = vec![0usize];
        for k in 0..=radius {
            let end = words
                .iter()
                .position(|w| w.len() > k)
                .unwrap_or(words.len());
            level_start.push(end);
        }
        if level_start[radius + 1] != words.len() {
            return Err(Error::Serde("vertex beyond the stated radius".into()));
        }
        let mut preds = vec![Vec::new(); words.len()];
        for v in 0..words.len() {
            for s in 0..width {
                let u = edges[v * width + s];
                if u == NONE {
                    continue;
                }
                if u as usize >= words.len() {
                    return Err(Error::Serde("edge target out of range".into()));
                }
                if words[u as usize].len() == words[v].len() + 1 {
                    preds[u as usize].push((v as VertexId, s as Letter));
                }
            }
        }
        let index = if oracle.has_geodesic_normal_form() {
            Index::Exact(HashMap::new())
        } else {
            Index::Keyed(HashMap::new())
        };
        let mut ball = CayleyBall {
            oracle,
            radius,
            words,
            level_start,
            edges,
            preds,
            index,
        };
        for v in 0..ball.words.len() {
            ball.index_insert(v);
        }
        Ok(ball)
    }
}

/// Size of the radius-`k` ball in the `degree`-regular tree, an upper bound
/// for any Cayley graph with `|S| = degree`.
pub fn regular_tree_ball_size(degree: usize, k: usize) -> u128 {
    let d = degree as u128;
    let mut total: u128 = 1;
    let mut sphere: u128 = d;
    for _ in 0..k {
        total = total.saturating_add(sphere);
        sphere = sphere.saturating_mul(d.saturating_sub(1));
    }
    total
}
