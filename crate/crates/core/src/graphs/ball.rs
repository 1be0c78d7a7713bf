//! Metric balls around the basepoint in the tree completion of a core graph:
//! the graph with one fresh tree branch grafted onto every missing generator
//! direction. Balls are what local comparisons between an infinite cover and
//! its finite approximations consume.

use super::{parallel_bfs_equal, CoreGraph};
use crate::words::Alphabet;
use crate::Error;
use std::collections::HashMap;

/// The radius-`r` neighborhood of the basepoint. Vertices are those at
/// distance at most `r`; an edge is kept only when at least one endpoint is
/// interior (distance below `r`), so the ball is exactly the union of the
/// traversals of all words of length at most `r` from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    alphabet: Alphabet,
    radius: u32,
    fwd: Vec<Option<u32>>,
    bwd: Vec<Option<u32>>,
    depth: Vec<u32>,
}

impl Ball {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn vertex_count(&self) -> usize {
        self.depth.len()
    }

    pub fn edge_count(&self) -> usize {
        self.fwd.iter().filter(|e| e.is_some()).count()
    }
}

/// Rooted labeled isomorphism of balls of equal radius.
pub fn balls_isomorphic(a: &Ball, b: &Ball) -> Result<bool, Error> {
    if a.radius != b.radius {
        return Err(Error::RadiusMismatch(a.radius, b.radius));
    }
    if a.alphabet != b.alphabet {
        return Err(Error::AlphabetMismatch);
    }
    Ok(parallel_bfs_equal(
        a.alphabet.rank(),
        (&a.fwd, &a.bwd, 0),
        (&b.fwd, &b.bwd, 0),
    ))
}

pub(super) fn build(graph: &CoreGraph, radius: u32) -> Ball {
    let rank = graph.alphabet().rank();
    let mut fwd: Vec<Option<u32>> = vec![None; rank];
    let mut bwd: Vec<Option<u32>> = vec![None; rank];
    let mut depth: Vec<u32> = vec![0];
    // graph vertex behind each ball vertex; None marks grafted tree vertices
    let mut origin: Vec<Option<u32>> = vec![Some(graph.basepoint())];
    let mut graph_to_ball: HashMap<u32, u32> = HashMap::from([(graph.basepoint(), 0)]);
    let mut head = 0usize;
    while head < depth.len() {
        let v = head as u32;
        head += 1;
        let d = depth[v as usize];
        if d == radius {
            continue;
        }
        let vorigin = origin[v as usize];
        for forward in [true, false] {
            for g in 0..rank {
                let slot = v as usize * rank + g;
                let existing = if forward { fwd[slot] } else { bwd[slot] };
                if existing.is_some() {
                    continue;
                }
                let graph_target = vorigin.and_then(|gv| graph.step(gv, g, forward));
                let known = graph_target.and_then(|gx| graph_to_ball.get(&gx).copied());
                let target = match known {
                    Some(b) => b,
                    None => {
                        let nv = depth.len() as u32;
                        depth.push(d + 1);
                        origin.push(graph_target);
                        fwd.extend(std::iter::repeat_n(None, rank));
                        bwd.extend(std::iter::repeat_n(None, rank));
                        if let Some(gx) = graph_target {
                            graph_to_ball.insert(gx, nv);
                        }
                        nv
                    }
                };
                let (src, dst) = if forward { (v, target) } else { (target, v) };
                debug_assert!(fwd[src as usize * rank + g].is_none());
                debug_assert!(bwd[dst as usize * rank + g].is_none());
                fwd[src as usize * rank + g] = Some(dst);
                bwd[dst as usize * rank + g] = Some(src);
            }
        }
    }
    Ball {
        alphabet: graph.alphabet().clone(),
        radius,
        fwd,
        bwd,
        depth,
    }
}
