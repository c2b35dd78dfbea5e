//! Graph maps with an invariant filtration: stratum classification,
//! train-track checks, the yellow/red decomposition of paths and the
//! substitution induced on the top exponential stratum.
//!
//! Edges are the letters of an [`InverseAlphabet`]; the inverse letter is
//! the reversed edge. Edge paths are words over that alphabet together with
//! their endpoints, and tightening a path is free reduction of its word.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::automorphisms::{AbelianizationMatrix, BasisMap, Growth};
use crate::error::{Error, Result};
use crate::matrices::NonnegIntMatrix;
use crate::substitutions::{Substitution, DEFAULT_LENGTH_CAP};
use crate::words::{flip, reduce, Color, InverseAlphabet, Letter, Reducer, Word};

/// Tolerance used for stratum eigendata.
pub const PF_TOLERANCE: f64 = 1e-12;

/// A finite graph. Edge `x` of the alphabet runs from `initial(x)` to
/// `terminal(x)`; its inverse runs backwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<String>,
    edges: InverseAlphabet,
    tails: Vec<usize>,
    heads: Vec<usize>,
}

impl Graph {
    /// `edges` lists `(name, initial vertex, terminal vertex)`.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, usize, usize)]) -> Result<Self> {
        let mut seen = HashSet::new();
        for v in vertices {
            let v = v.as_ref();
            if v.is_empty() || v.chars().any(char::is_whitespace) {
                return Err(Error::InvalidName(v.to_string()));
            }
            if !seen.insert(v) {
                return Err(Error::DuplicateName(v.to_string()));
            }
        }
        let names: Vec<&str> = edges.iter().map(|e| e.0.as_ref()).collect();
        let alphabet = InverseAlphabet::new(&names)?;
        for (name, t, h) in edges {
            if *t >= vertices.len() || *h >= vertices.len() {
                return Err(Error::InvalidArgument(format!(
                    "edge `{}` uses an unknown vertex",
                    name.as_ref()
                )));
            }
        }
        Ok(Graph {
            vertices: vertices.iter().map(|v| v.as_ref().to_string()).collect(),
            edges: alphabet,
            tails: edges.iter().map(|e| e.1).collect(),
            heads: edges.iter().map(|e| e.2).collect(),
        })
    }

    /// One vertex `*` with a petal for every letter of `alphabet`.
    pub fn rose(alphabet: &InverseAlphabet) -> Self {
        let r = alphabet.rank();
        Graph {
            vertices: vec!["*".to_string()],
            edges: alphabet.clone(),
            tails: vec![0; r],
            heads: vec![0; r],
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edges(&self) -> &InverseAlphabet {
        &self.edges
    }

    /// Number of unoriented edges.
    pub fn edge_count(&self) -> usize {
        self.tails.len()
    }

    pub fn initial(&self, e: Letter) -> usize {
        if e.is_inverse() {
            self.heads[e.symbol()]
        } else {
            self.tails[e.symbol()]
        }
    }

    pub fn terminal(&self, e: Letter) -> usize {
        self.initial(e.inverse())
    }

    /// Validates `edges` as a tight path. An empty word needs `start`.
    pub fn path(&self, edges: Word, start: Option<usize>) -> Result<EdgePath> {
        for (i, pair) in edges.windows(2).enumerate() {
            if self.terminal(pair[0]) != self.initial(pair[1]) {
                return Err(Error::NotComposable(i + 1));
            }
            if pair[1] == pair[0].inverse() {
                return Err(Error::NotTight(i + 1));
            }
        }
        if let Some(l) = edges.iter().find(|l| !self.edges.contains(**l)) {
            return Err(Error::UnknownLetter(format!("#{}", l.index())));
        }
        let start = match (edges.first(), start) {
            (Some(&e), Some(s)) if self.initial(e) != s => return Err(Error::NotComposable(0)),
            (Some(&e), _) => self.initial(e),
            (None, Some(s)) if s < self.vertices.len() => s,
            (None, _) => return Err(Error::TrivialWord),
        };
        let end = edges.last().map_or(start, |&e| self.terminal(e));
        Ok(EdgePath { start, end, edges })
    }

    /// Parses a nonempty path written in edge names.
    pub fn parse_path(&self, text: &str) -> Result<EdgePath> {
        self.path(self.edges.parse_word(text)?, None)
    }

    /// Spanning tree by breadth-first search from vertex 0, as the set of
    /// tree edge symbols, or `None` when the graph is disconnected.
    fn spanning_tree(&self) -> Option<(Vec<bool>, Vec<Word>)> {
        let n = self.vertices.len();
        let mut in_tree = vec![false; self.edge_count()];
        let mut reach: Vec<Option<Word>> = vec![None; n];
        reach[0] = Some(Word::empty());
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for l in self.edges.letters() {
                if self.initial(l) != v {
                    continue;
                }
                let u = self.terminal(l);
                if reach[u].is_none() {
                    in_tree[l.symbol()] = true;
                    let mut w = reach[v].clone().expect("visited");
                    w.push(l);
                    reach[u] = Some(w);
                    queue.push_back(u);
                }
            }
        }
        let paths: Option<Vec<Word>> = reach.into_iter().collect();
        paths.map(|p| (in_tree, p))
    }
}

/// A tight edge path with its endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgePath {
    start: usize,
    end: usize,
    edges: Word,
}

impl EdgePath {
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn edges(&self) -> &Word {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_loop(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumKind {
    Zero,
    NonExponential,
    Exponential,
    /// Nonzero and reducible: the filtration should be refined.
    RequiresRefinement,
}

/// Classification of one stratum.
#[derive(Clone, Debug, PartialEq)]
pub struct StratumReport {
    pub height: usize,
    pub kind: StratumKind,
    /// Edge symbols of the stratum, in alphabet order; they index the rows
    /// and columns of `matrix`.
    pub edges: Vec<usize>,
    pub matrix: NonnegIntMatrix,
    /// Primitive transition matrix (exponential strata only).
    pub aperiodic: Option<bool>,
    pub lambda: Option<f64>,
    pub residual: Option<f64>,
    /// For a single-edge non-exponential stratum with `f(e) = e·u`, the
    /// word `u`.
    pub suffix: Option<Word>,
}

/// Legality of every nondegenerate turn, grouped by vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TurnTable {
    /// `turns[v]` lists `(e1, e2, legal)` with `e1 < e2` leaving `v`.
    pub turns: Vec<Vec<(Letter, Letter, bool)>>,
}

impl TurnTable {
    pub fn illegal_turns(&self) -> impl Iterator<Item = (Letter, Letter)> + '_ {
        self.turns
            .iter()
            .flatten()
            .filter(|t| !t.2)
            .map(|t| (t.0, t.1))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum RttViolation {
    /// `Df` sends an edge of the stratum out of it.
    DerivativeLeavesStratum {
        height: usize,
        edge: String,
        image: String,
    },
    /// The image of a stratum edge contains an illegal turn in the stratum.
    IllegalEdgeImage {
        height: usize,
        edge: String,
        position: usize,
    },
    /// An edge of lower height joining attaching vertices has an iterate
    /// that collapses or leaves the attaching set.
    AttachingPathFails {
        height: usize,
        edge: String,
        power: usize,
    },
}

/// Outcome of [`StratifiedGraphMap::check_rtt`]. Only the stated finite
/// checks are made.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RttReport {
    pub exponential_heights: Vec<usize>,
    pub depth: usize,
    pub violations: Vec<RttViolation>,
    /// Every vertex image is a fixed vertex.
    pub vertex_images_fixed: bool,
}

impl RttReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// One maximal yellow piece found by the yellow-loop audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YellowPiece {
    pub power: usize,
    pub offset: usize,
    pub path: EdgePath,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YellowLoopAudit {
    pub edge: Letter,
    pub depth: usize,
    pub pieces: Vec<YellowPiece>,
}

impl YellowLoopAudit {
    /// No yellow piece is a closed loop.
    pub fn passed(&self) -> bool {
        self.pieces.iter().all(|p| !p.path.is_loop())
    }

    pub fn loops(&self) -> impl Iterator<Item = &YellowPiece> {
        self.pieces.iter().filter(|p| p.path.is_loop())
    }

    /// The longest loop, earliest first on ties.
    pub fn witness(&self) -> Option<&YellowPiece> {
        self.loops()
            .fold(None, |best: Option<&YellowPiece>, p| match best {
                Some(b) if b.path.len() >= p.path.len() => Some(b),
                _ => Some(p),
            })
    }
}

/// Edge lengths on the top exponential stratum, scaled by `λ` under the map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PfMetric {
    pub lambda: f64,
    pub residual: f64,
    /// Red edge symbols with their lengths.
    pub red_edges: Vec<usize>,
    pub lengths: Vec<f64>,
}

impl PfMetric {
    /// Sum of red edge lengths along the path; yellow edges weigh zero.
    pub fn length(&self, path: &[Letter]) -> f64 {
        path.iter()
            .filter_map(|l| self.red_edges.iter().position(|&s| s == l.symbol()))
            .map(|i| self.lengths[i])
            .sum()
    }
}

/// The substitution on red edges induced by the top exponential stratum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedSubstitution {
    pub substitution: Substitution,
    /// Graph symbol of each letter of the substitution alphabet.
    pub red_edges: Vec<usize>,
}

impl InducedSubstitution {
    /// Red letters of a graph word, relabelled into the substitution
    /// alphabet.
    pub fn project(&self, w: &[Letter]) -> Word {
        project(&self.red_edges, w)
    }
}

fn project(red_edges: &[usize], w: &[Letter]) -> Word {
    w.iter()
        .filter_map(|l| {
            red_edges
                .iter()
                .position(|&s| s == l.symbol())
                .map(|i| Letter::new(i, l.is_inverse()))
        })
        .collect()
}

/// A graph self-map sending vertices to vertices and edges to tight paths,
/// with an invariant filtration given by edge heights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratifiedGraphMap {
    graph: Graph,
    heights: Vec<usize>,
    vertex_map: Vec<usize>,
    images: Vec<Word>,
}

impl StratifiedGraphMap {
    /// Validates images (tight, nontrivial, joining the images of the
    /// endpoints) and the filtration (no edge maps over a higher edge).
    pub fn new(
        graph: Graph,
        heights: Vec<usize>,
        vertex_map: Vec<usize>,
        images: Vec<Word>,
    ) -> Result<Self> {
        let k = graph.edge_count();
        if heights.len() != k || images.len() != k {
            return Err(Error::DimensionMismatch(heights.len().min(images.len()), k));
        }
        if vertex_map.len() != graph.vertices.len() {
            return Err(Error::DimensionMismatch(
                vertex_map.len(),
                graph.vertices.len(),
            ));
        }
        if vertex_map.iter().any(|&v| v >= graph.vertices.len()) {
            return Err(Error::InvalidArgument("vertex image out of range".into()));
        }
        if heights.contains(&0) {
            return Err(Error::InvalidArgument("heights start at 1".into()));
        }
        for (s, img) in images.iter().enumerate() {
            let e = Letter::new(s, false);
            let name = graph.edges.name(e);
            if img.is_empty() {
                return Err(Error::TrivialImage(name));
            }
            let path = graph.path(img.clone(), None)?;
            if path.start != vertex_map[graph.initial(e)]
                || path.end != vertex_map[graph.terminal(e)]
            {
                return Err(Error::ImageEndpoints { edge: name });
            }
            if let Some(l) = img.iter().find(|l| heights[l.symbol()] > heights[s]) {
                return Err(Error::FiltrationViolation {
                    edge: name,
                    offender: graph.edges.name(l.positive()),
                });
            }
        }
        Ok(StratifiedGraphMap {
            graph,
            heights,
            vertex_map,
            images,
        })
    }

    /// The rose map of a basis map, with the given edge heights.
    pub fn rose(map: &BasisMap, heights: Vec<usize>) -> Result<Self> {
        let graph = Graph::rose(map.alphabet());
        let images = map.images().iter().map(|w| w.as_word().clone()).collect();
        Self::new(graph, heights, vec![0], images)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn height(&self, e: Letter) -> usize {
        self.heights[e.symbol()]
    }

    pub fn heights(&self) -> &[usize] {
        &self.heights
    }

    pub fn top_height(&self) -> usize {
        self.heights.iter().copied().max().unwrap_or(0)
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    /// `f(e)`, with `f(e^-1)` the reversed image.
    pub fn image(&self, e: Letter) -> Word {
        let w = &self.images[e.symbol()];
        if e.is_inverse() {
            flip(w)
        } else {
            w.clone()
        }
    }

    /// First edge of `f(e)`.
    pub fn derivative(&self, e: Letter) -> Letter {
        let w = &self.images[e.symbol()];
        if e.is_inverse() {
            w[w.len() - 1].inverse()
        } else {
            w[0]
        }
    }

    /// `f_#^p(α)`, tightened after every application.
    pub fn f_sharp(&self, alpha: &EdgePath, p: usize) -> Result<EdgePath> {
        self.f_sharp_capped(alpha, p, DEFAULT_LENGTH_CAP)
    }

    pub fn f_sharp_capped(&self, alpha: &EdgePath, p: usize, cap: usize) -> Result<EdgePath> {
        let mut cur = alpha.clone();
        for _ in 0..p {
            let mut r = Reducer::with_capacity(cur.len() * 2);
            for &e in cur.edges.iter() {
                let w = &self.images[e.symbol()];
                if e.is_inverse() {
                    w.iter().rev().for_each(|l| r.push(l.inverse()));
                } else {
                    r.push_all(w);
                }
                if r.len() > cap {
                    return Err(Error::LengthCap { cap });
                }
            }
            cur = EdgePath {
                start: self.vertex_map[cur.start],
                end: self.vertex_map[cur.end],
                edges: r.finish().into_word(),
            };
        }
        Ok(cur)
    }

    fn stratum_edges(&self, k: usize) -> Vec<usize> {
        (0..self.heights.len())
            .filter(|&s| self.heights[s] == k)
            .collect()
    }

    /// Entry `(i, j)` counts occurrences of `e_i` or `e_i^-1` in `f(e_j)`,
    /// over the edges of height `k`.
    pub fn transition_matrix(&self, k: usize) -> NonnegIntMatrix {
        let edges = self.stratum_edges(k);
        let mut m = NonnegIntMatrix::zeros(edges.len());
        for (j, &ej) in edges.iter().enumerate() {
            for l in self.images[ej].iter() {
                if let Some(i) = edges.iter().position(|&s| s == l.symbol()) {
                    *m.get_mut(i, j) += 1u32;
                }
            }
        }
        m
    }

    /// One report per height that carries edges, bottom up.
    pub fn classify_strata(&self) -> Result<Vec<StratumReport>> {
        let mut heights: Vec<usize> = self.heights.clone();
        heights.sort_unstable();
        heights.dedup();
        heights
            .into_iter()
            .map(|k| self.classify_stratum(k))
            .collect()
    }

    fn classify_stratum(&self, k: usize) -> Result<StratumReport> {
        let edges = self.stratum_edges(k);
        let matrix = self.transition_matrix(k);
        let mut report = StratumReport {
            height: k,
            kind: StratumKind::Zero,
            edges: edges.clone(),
            matrix: matrix.clone(),
            aperiodic: None,
            lambda: None,
            residual: None,
            suffix: None,
        };
        if matrix.is_zero() {
            return Ok(report);
        }
        if !matrix.is_irreducible() {
            report.kind = StratumKind::RequiresRefinement;
            return Ok(report);
        }
        if matrix.is_transitive_permutation() {
            report.kind = StratumKind::NonExponential;
            report.lambda = Some(1.0);
            report.residual = Some(0.0);
            if let [e] = edges[..] {
                let img = &self.images[e];
                if img[0] == Letter::new(e, false) {
                    report.suffix = Some(Word::new(img[1..].to_vec()));
                }
            }
            return Ok(report);
        }
        let pf = matrix.pf_eigenvalue(PF_TOLERANCE)?;
        report.kind = StratumKind::Exponential;
        report.aperiodic = Some(matrix.is_primitive());
        report.lambda = Some(pf.lambda);
        report.residual = Some(pf.residual);
        Ok(report)
    }

    fn legal_pair(&self, mut e1: Letter, mut e2: Letter) -> bool {
        let bound = 4 * self.graph.edge_count() * self.graph.edge_count() + 1;
        for _ in 0..=bound {
            if e1 == e2 {
                return false;
            }
            e1 = self.derivative(e1);
            e2 = self.derivative(e2);
        }
        true
    }

    /// Whether the turn `(e1, e2)` is legal: no iterate of `Df` applied to
    /// both directions makes them equal.
    pub fn is_legal_turn(&self, e1: Letter, e2: Letter) -> bool {
        self.legal_pair(e1, e2)
    }

    pub fn turn_table(&self) -> TurnTable {
        let mut turns = vec![Vec::new(); self.graph.vertices.len()];
        let letters: Vec<Letter> = self.graph.edges.letters().collect();
        for (i, &e1) in letters.iter().enumerate() {
            for &e2 in &letters[i + 1..] {
                let v = self.graph.initial(e1);
                if v == self.graph.initial(e2) {
                    turns[v].push((e1, e2, self.legal_pair(e1, e2)));
                }
            }
        }
        TurnTable { turns }
    }

    /// Index of the first illegal turn of height `k` in `path`, if any, or
    /// an error when the path leaves `G_k`.
    fn first_illegal(&self, path: &[Letter], k: usize) -> Result<Option<usize>> {
        if path.iter().any(|l| self.height(*l) > k) {
            return Err(Error::NotLegal(k));
        }
        for (i, pair) in path.windows(2).enumerate() {
            if self.height(pair[0]) == k
                && self.height(pair[1]) == k
                && !self.legal_pair(pair[0].inverse(), pair[1])
            {
                return Ok(Some(i + 1));
            }
        }
        Ok(None)
    }

    /// Lies in `G_k` and takes only legal turns between edges of height `k`.
    pub fn is_k_legal(&self, path: &[Letter], k: usize) -> bool {
        matches!(self.first_illegal(path, k), Ok(None))
    }

    /// Checks (RTT-i) exactly, (RTT-iii) on the images of stratum edges and
    /// (RTT-ii) on lower edges joining attaching vertices, iterated up to
    /// `depth` times.
    pub fn check_rtt(&self, depth: usize) -> Result<RttReport> {
        let strata = self.classify_strata()?;
        let mut violations = Vec::new();
        let mut exponential_heights = Vec::new();
        let name = |l: Letter| self.graph.edges.name(l);
        for s in strata.iter().filter(|s| s.kind == StratumKind::Exponential) {
            let k = s.height;
            exponential_heights.push(k);
            for &e in &s.edges {
                for l in [Letter::new(e, false), Letter::new(e, true)] {
                    let d = self.derivative(l);
                    if self.height(d) != k {
                        violations.push(RttViolation::DerivativeLeavesStratum {
                            height: k,
                            edge: name(l),
                            image: name(d),
                        });
                    }
                }
                if let Some(position) = self.first_illegal(&self.images[e], k)? {
                    violations.push(RttViolation::IllegalEdgeImage {
                        height: k,
                        edge: name(Letter::new(e, false)),
                        position,
                    });
                }
            }
            let attaching = self.attaching_vertices(k);
            for lower in (0..self.heights.len()).filter(|&x| self.heights[x] < k) {
                let e = Letter::new(lower, false);
                if !attaching.contains(&self.graph.initial(e))
                    || !attaching.contains(&self.graph.terminal(e))
                {
                    continue;
                }
                let mut path = self.graph.path(Word::new(vec![e]), None)?;
                for power in 1..=depth {
                    path = self.f_sharp(&path, 1)?;
                    if path.is_empty()
                        || !attaching.contains(&path.start)
                        || !attaching.contains(&path.end)
                    {
                        violations.push(RttViolation::AttachingPathFails {
                            height: k,
                            edge: name(e),
                            power,
                        });
                        break;
                    }
                }
            }
        }
        let vertex_images_fixed = self.vertex_map.iter().all(|&v| self.vertex_map[v] == v);
        Ok(RttReport {
            exponential_heights,
            depth,
            violations,
            vertex_images_fixed,
        })
    }

    /// Vertices of `H_k ∩ G_{k-1}`.
    fn attaching_vertices(&self, k: usize) -> HashSet<usize> {
        let touching = |pred: &dyn Fn(usize) -> bool| -> HashSet<usize> {
            (0..self.heights.len())
                .filter(|&s| pred(self.heights[s]))
                .flat_map(|s| [self.graph.tails[s], self.graph.heads[s]])
                .collect()
        };
        let top = touching(&|h| h == k);
        let below = touching(&|h| h < k);
        top.intersection(&below).copied().collect()
    }

    /// Maximal pieces of `α` lying in the stratum of height `k` (red) or
    /// below it (yellow).
    pub fn yellow_red_split(&self, alpha: &EdgePath, k: usize) -> Result<Vec<(Color, EdgePath)>> {
        if self.first_illegal(&alpha.edges, k)?.is_some() {
            return Err(Error::NotLegal(k));
        }
        Ok(self.pieces(alpha, k))
    }

    fn pieces(&self, alpha: &EdgePath, k: usize) -> Vec<(Color, EdgePath)> {
        let color = |l: &Letter| {
            if self.height(*l) == k {
                Color::Red
            } else {
                Color::Yellow
            }
        };
        let mut out = Vec::new();
        let mut i = 0;
        let w = &alpha.edges;
        while i < w.len() {
            let c = color(&w[i]);
            let mut j = i + 1;
            while j < w.len() && color(&w[j]) == c {
                j += 1;
            }
            let piece = Word::new(w[i..j].to_vec());
            let start = self.graph.initial(piece[0]);
            let end = self.graph.terminal(piece[piece.len() - 1]);
            out.push((
                c,
                EdgePath {
                    start,
                    end,
                    edges: piece,
                },
            ));
            i = j;
        }
        out
    }

    /// The letters of `α` of height `k`, in order. Not reduced in general.
    pub fn red_projection(&self, alpha: &[Letter], k: usize) -> Word {
        alpha
            .iter()
            .copied()
            .filter(|l| self.height(*l) == k)
            .collect()
    }

    /// The top stratum, provided it is the only exponential one.
    pub fn top_exponential_stratum(&self) -> Result<StratumReport> {
        let strata = self.classify_strata()?;
        let top = self.top_height();
        let exponential: Vec<&StratumReport> = strata
            .iter()
            .filter(|s| s.kind == StratumKind::Exponential)
            .collect();
        match exponential[..] {
            [s] if s.height == top => Ok(s.clone()),
            _ => Err(Error::ExponentialStrata {
                count: exponential.len(),
                top,
            }),
        }
    }

    /// `σ(e) = Red(f(e))` on the edges of the top exponential stratum.
    pub fn induced_substitution(&self) -> Result<InducedSubstitution> {
        let stratum = self.top_exponential_stratum()?;
        let names: Vec<String> = stratum
            .edges
            .iter()
            .map(|&s| self.graph.edges.name(Letter::new(s, false)))
            .collect();
        let alphabet = InverseAlphabet::new(&names)?;
        let images = stratum
            .edges
            .iter()
            .map(|&s| project(&stratum.edges, &self.images[s]))
            .collect();
        Ok(InducedSubstitution {
            substitution: Substitution::new(alphabet, images)?,
            red_edges: stratum.edges,
        })
    }

    /// Whether `Red(f_#^p(α)) = σ^p(Red(α))` for a red-legal `α`.
    pub fn red_commutation_check(&self, alpha: &EdgePath, p: usize) -> Result<bool> {
        let sigma = self.induced_substitution()?;
        let k = self.top_height();
        if self.first_illegal(&alpha.edges, k)?.is_some() {
            return Err(Error::NotLegal(k));
        }
        let lhs = sigma.project(&self.f_sharp(alpha, p)?.edges);
        let rhs = sigma
            .substitution
            .iterate(&sigma.project(&alpha.edges), p)?;
        Ok(lhs == rhs)
    }

    /// Lists the maximal yellow pieces of `f_#^p(e)` for `1 ≤ p ≤ depth`.
    pub fn yellow_loop_audit(&self, e: Letter, depth: usize) -> Result<YellowLoopAudit> {
        let k = self.top_exponential_stratum()?.height;
        if self.height(e) != k {
            return Err(Error::InvalidArgument(format!(
                "`{}` is not a red edge",
                self.graph.edges.name(e)
            )));
        }
        let mut pieces = Vec::new();
        let mut path = self.graph.path(Word::new(vec![e]), None)?;
        for power in 1..=depth {
            path = self.f_sharp(&path, 1)?;
            let mut offset = 0;
            for (color, piece) in self.pieces(&path, k) {
                let len = piece.len();
                if color == Color::Yellow {
                    pieces.push(YellowPiece {
                        power,
                        offset,
                        path: piece,
                    });
                }
                offset += len;
            }
        }
        Ok(YellowLoopAudit {
            edge: e,
            depth,
            pieces,
        })
    }

    /// PF lengths on the top exponential stratum: the positive eigenvector
    /// of `M^T`, so that `|f(e)| = λ|e|` for each red edge `e`.
    pub fn pf_metric(&self) -> Result<PfMetric> {
        let stratum = self
            .top_exponential_stratum()
            .map_err(|_| Error::MissingEigendata)?;
        let pf = stratum.matrix.transpose().pf_eigenvalue(PF_TOLERANCE)?;
        Ok(PfMetric {
            lambda: pf.lambda,
            residual: pf.residual,
            red_edges: stratum.edges,
            lengths: pf.eigvec,
        })
    }

    pub fn pf_length(&self, alpha: &[Letter]) -> Result<f64> {
        Ok(self.pf_metric()?.length(alpha))
    }

    /// Exponential iff some stratum is exponential; fails while a stratum
    /// still needs refining.
    pub fn growth_classify(&self) -> Result<Growth> {
        let strata = self.classify_strata()?;
        if let Some(s) = strata
            .iter()
            .find(|s| s.kind == StratumKind::RequiresRefinement)
        {
            return Err(Error::RequiresRefinement(s.height));
        }
        Ok(
            if strata.iter().any(|s| s.kind == StratumKind::Exponential) {
                Growth::Exponential
            } else {
                Growth::Polynomial
            },
        )
    }

    /// Action on the first homology, in the basis of loops through the
    /// edges outside a breadth-first spanning tree. A homotopy equivalence
    /// has determinant ±1; this is a necessary condition only.
    pub fn homology_action(&self) -> Result<AbelianizationMatrix> {
        let (in_tree, reach) = self
            .graph
            .spanning_tree()
            .ok_or_else(|| Error::InvalidArgument("graph is disconnected".into()))?;
        let loops: Vec<usize> = (0..in_tree.len()).filter(|&s| !in_tree[s]).collect();
        let n = loops.len();
        // signed count of each loop edge in f(x), for every edge x
        let counts: Vec<Vec<i64>> = self
            .images
            .iter()
            .map(|img| {
                let mut c = vec![0i64; n];
                for l in img.iter() {
                    if let Some(i) = loops.iter().position(|&s| s == l.symbol()) {
                        c[i] += if l.is_inverse() { -1 } else { 1 };
                    }
                }
                c
            })
            .collect();
        let mut m = vec![vec![0i64; n]; n];
        for (j, &e) in loops.iter().enumerate() {
            let l = Letter::new(e, false);
            let mut generator: Vec<Letter> = reach[self.graph.initial(l)].to_vec();
            generator.push(l);
            generator.extend(flip(&reach[self.graph.terminal(l)]).iter());
            for x in reduce(&generator).iter() {
                let sign = if x.is_inverse() { -1 } else { 1 };
                for i in 0..n {
                    m[i][j] += sign * counts[x.symbol()][i];
                }
            }
        }
        Ok(AbelianizationMatrix(m))
    }
}
