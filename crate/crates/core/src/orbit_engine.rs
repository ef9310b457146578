//! Functional-graph analysis of a local function: cycles, heights, orbits,
//! equivalence classes and their trees, and the height partition.
//!
//! Every traversal is iterative with an explicit stack so that `n` in the
//! tens of millions does not touch the call stack.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_model::LocalFunction;

const UNVISITED: u8 = 0;
const IN_PROGRESS: u8 = 1;
const DONE: u8 = 2;

/// Outcome of cycle detection. When a cycle exists, `elements` lists
/// `(phi(x), phi^2(x), ..., phi^m(x) = x)` where `x` is the smallest element
/// on any cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub found: bool,
    pub elements: Vec<usize>,
}

impl CycleReport {
    pub fn length(&self) -> usize {
        self.elements.len()
    }

    /// Cycle members in ascending order.
    pub fn support(&self) -> Vec<usize> {
        let mut s = self.elements.clone();
        s.sort_unstable();
        s
    }
}

/// Finds a cycle of `phi_n`, preferring the one through the smallest cycle
/// element.
pub fn detect_cycle(lf: &LocalFunction) -> CycleReport {
    let n = lf.n();
    let mut state = vec![UNVISITED; n + 1];
    state[0] = DONE;
    let mut path = Vec::new();
    let mut best: Option<usize> = None;
    for start in 1..=n {
        if state[start] != UNVISITED {
            continue;
        }
        let mut x = start;
        while state[x] == UNVISITED {
            state[x] = IN_PROGRESS;
            path.push(x);
            x = lf.image(x);
        }
        if state[x] == IN_PROGRESS {
            // x closes a new cycle; its members are the path suffix from x.
            let pos = path
                .iter()
                .rposition(|&y| y == x)
                .expect("x is on the path");
            let min = *path[pos..].iter().min().expect("nonempty");
            best = Some(best.map_or(min, |b| b.min(min)));
        }
        for y in path.drain(..) {
            state[y] = DONE;
        }
    }
    match best {
        None => CycleReport {
            found: false,
            elements: Vec::new(),
        },
        Some(root) => {
            let mut elements = Vec::new();
            let mut y = lf.image(root);
            loop {
                elements.push(y);
                if y == root {
                    break;
                }
                y = lf.image(y);
            }
            CycleReport {
                found: true,
                elements,
            }
        }
    }
}

/// Heights of a cycle-free local function and the height partition
/// `pi = (p_1, ..., p_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightProfile {
    /// `heights[x - 1] = h(x)`, the least `k` with `phi_n^k(x) = 0`.
    pub heights: Vec<usize>,
    pub partition_pi: Vec<usize>,
    pub degree_m: usize,
}

impl HeightProfile {
    pub fn n(&self) -> usize {
        self.heights.len()
    }

    #[inline]
    pub fn height(&self, x: usize) -> usize {
        self.heights[x - 1]
    }

    /// `sum_x h(x)`, equal to `sum_nu nu * p_nu`.
    pub fn height_sum(&self) -> u64 {
        self.heights.iter().map(|&h| h as u64).sum()
    }

    /// `n*m - m(m-1)/2`, the largest value the height sum can reach.
    pub fn height_sum_bound(&self) -> u64 {
        let (n, m) = (self.n() as u64, self.degree_m as u64);
        n * m - m * m.saturating_sub(1) / 2
    }

    /// `|J_{n,k}| = n - sum_{nu <= k} p_nu` for `k = 1..=m`.
    pub fn tail_counts(&self) -> Vec<usize> {
        let mut remaining = self.n();
        self.partition_pi
            .iter()
            .map(|&p| {
                remaining -= p;
                remaining
            })
            .collect()
    }
}

/// Computes heights with a memoized walk; fails if any walk revisits a node
/// still in progress.
pub fn heights(lf: &LocalFunction) -> Result<HeightProfile> {
    let n = lf.n();
    // 0 = unvisited, u32::MAX = in progress, otherwise the height.
    const PENDING: u32 = u32::MAX;
    let mut h = vec![0u32; n + 1];
    let mut path = Vec::new();
    for start in 1..=n {
        if h[start] != 0 {
            continue;
        }
        let mut x = start;
        let mut base = loop {
            if x == 0 {
                break 0;
            }
            match h[x] {
                0 => {
                    h[x] = PENDING;
                    path.push(x);
                    x = lf.image(x);
                }
                PENDING => return Err(Error::CyclePresent),
                known => break known,
            }
        };
        while let Some(y) = path.pop() {
            base += 1;
            h[y] = base;
        }
    }
    let heights: Vec<usize> = h[1..].iter().map(|&v| v as usize).collect();
    let degree_m = heights.iter().copied().max().unwrap_or(0);
    let mut partition_pi = vec![0usize; degree_m];
    for &v in &heights {
        partition_pi[v - 1] += 1;
    }
    Ok(HeightProfile {
        heights,
        partition_pi,
        degree_m,
    })
}

fn check_index(lf: &LocalFunction, x: usize) -> Result<()> {
    if x == 0 || x > lf.n() {
        return Err(Error::IndexOutOfRange {
            index: x,
            n: lf.n(),
        });
    }
    Ok(())
}

/// `(x, phi_n(x), ..., phi_n^{h(x)-1}(x))`.
pub fn orbit(lf: &LocalFunction, x: usize) -> Result<Vec<usize>> {
    check_index(lf, x)?;
    if detect_cycle(lf).found {
        return Err(Error::CyclePresent);
    }
    let mut out = Vec::new();
    let mut y = x;
    while y != 0 {
        out.push(y);
        y = lf.image(y);
    }
    Ok(out)
}

/// A class tree: nodes labeled `(y, h(y))`, parent of `y` is `phi_n(y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledTree {
    pub root: usize,
    /// `(node, height)` in ascending node order.
    pub nodes: Vec<(usize, usize)>,
    /// Children of each internal node, ascending.
    pub children: BTreeMap<usize, Vec<usize>>,
}

/// Partition of `{1..n}` into orbit classes, each keyed by its unique
/// height-1 root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitDecomposition {
    /// `class_root[x - 1]` is the root of the class of `x`.
    pub class_root: Vec<usize>,
    pub classes: BTreeMap<usize, Vec<usize>>,
    children: Vec<Vec<usize>>,
    heights: Vec<usize>,
}

impl OrbitDecomposition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn children(&self, y: usize) -> &[usize] {
        &self.children[y]
    }

    pub fn tree(&self, root: usize) -> Option<LabeledTree> {
        let members = self.classes.get(&root)?;
        let nodes = members.iter().map(|&y| (y, self.heights[y - 1])).collect();
        let children = members
            .iter()
            .filter(|&&y| !self.children[y].is_empty())
            .map(|&y| (y, self.children[y].clone()))
            .collect();
        Some(LabeledTree {
            root,
            nodes,
            children,
        })
    }

    /// Number of nodes at each depth below the roots, found breadth-first
    /// over the trees. Depth `k - 1` holds exactly the nodes of height `k`.
    pub fn level_counts(&self) -> Vec<usize> {
        let mut counts = Vec::new();
        let mut queue: VecDeque<(usize, usize)> = self.classes.keys().map(|&r| (r, 0)).collect();
        while let Some((y, depth)) = queue.pop_front() {
            if counts.len() <= depth {
                counts.push(0);
            }
            counts[depth] += 1;
            queue.extend(self.children[y].iter().map(|&c| (c, depth + 1)));
        }
        counts
    }
}

/// Splits `{1..n}` into classes of elements whose orbits meet.
pub fn decompose(lf: &LocalFunction) -> Result<OrbitDecomposition> {
    let profile = heights(lf)?;
    let n = lf.n();
    // Visit by increasing height so each parent's root is known first.
    let mut by_height: Vec<Vec<usize>> = vec![Vec::new(); profile.degree_m + 1];
    for x in 1..=n {
        by_height[profile.height(x)].push(x);
    }
    let mut root = vec![0usize; n + 1];
    for x in by_height.into_iter().flatten() {
        let parent = lf.image(x);
        root[x] = if parent == 0 { x } else { root[parent] };
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut children = vec![Vec::new(); n + 1];
    for (x, &r) in root.iter().enumerate().skip(1) {
        classes.entry(r).or_default().push(x);
        let parent = lf.image(x);
        if parent != 0 {
            children[parent].push(x);
        }
    }
    Ok(OrbitDecomposition {
        class_root: root[1..].to_vec(),
        classes,
        children,
        heights: profile.heights,
    })
}

/// `|J_{n,k}|`, the number of `x` with `phi_n^k(x)` still in `{1..n}`.
pub fn j_nk(lf: &LocalFunction, k: usize) -> Result<usize> {
    let profile = heights(lf)?;
    Ok(profile.heights.iter().filter(|&&h| h > k).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::{localize, parse_spec, FunctionSpec};

    fn lf(spec: &str, n: usize) -> LocalFunction {
        localize(&parse_spec(spec).unwrap(), n).unwrap()
    }

    const THREE_X_MINUS_ONE: &str = "rcwa:mod=2;0:1,0;1:3,-1;cut=2";

    #[test]
    fn detect_cycle_examples() {
        let two = detect_cycle(&lf("table:1>2,2>1", 2));
        assert!(two.found);
        assert_eq!(two.elements, vec![2, 1]);
        assert_eq!(two.length(), 2);

        for n in [1, 5, 50] {
            assert!(!detect_cycle(&lf("shift:t=1", n)).found);
        }

        let c = detect_cycle(&lf(THREE_X_MINUS_ONE, 10));
        assert_eq!(c.elements, vec![7, 10, 5]);
        assert_eq!(c.support(), vec![5, 7, 10]);
        assert!(!detect_cycle(&lf(THREE_X_MINUS_ONE, 9)).found);
    }

    #[test]
    fn smallest_cycle_wins() {
        // 2-cycle {4,5} is met first from x = 1, but {2,3} holds the minimum.
        let lf = LocalFunction::from_images(&[4, 3, 2, 5, 4]).unwrap();
        assert_eq!(detect_cycle(&lf).elements, vec![3, 2]);
    }

    #[test]
    fn cycle_elements_follow_phi() {
        let lf = lf(THREE_X_MINUS_ONE, 64);
        let c = detect_cycle(&lf);
        assert!(c.found);
        assert_eq!(c.support()[0], 5);
        let m = c.length();
        for i in 0..m {
            assert_eq!(lf.image(c.elements[i]), c.elements[(i + 1) % m]);
        }
    }

    #[test]
    fn heights_examples() {
        let hp = heights(&lf("shift:t=1", 3)).unwrap();
        assert_eq!(hp.heights, vec![3, 2, 1]);
        assert_eq!(hp.partition_pi, vec![1, 1, 1]);
        assert_eq!(hp.degree_m, 3);

        let hp = heights(&localize(&FunctionSpec::collatz(), 50).unwrap()).unwrap();
        assert_eq!(
            hp.partition_pi,
            vec![10, 4, 3, 3, 3, 3, 4, 2, 2, 2, 2, 2, 3, 2, 2, 1, 1, 1]
        );
        assert_eq!(hp.degree_m, 18);
        assert_eq!(hp.height_sum(), 348);

        assert_eq!(
            heights(&lf("table:1>2,2>1", 3)).unwrap_err(),
            Error::CyclePresent
        );
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbit(&lf("shift:t=1", 5), 3).unwrap(), vec![3, 4, 5]);
        let c = localize(&FunctionSpec::collatz(), 50).unwrap();
        assert_eq!(orbit(&c, 3).unwrap(), vec![3, 5, 8, 4, 2]);
        assert_eq!(orbit(&c, 1).unwrap(), vec![1]);
        assert_eq!(
            orbit(&c, 0).unwrap_err(),
            Error::IndexOutOfRange { index: 0, n: 50 }
        );
        assert_eq!(
            orbit(&c, 51).unwrap_err(),
            Error::IndexOutOfRange { index: 51, n: 50 }
        );
        assert_eq!(
            orbit(&lf("table:1>2,2>1", 3), 3).unwrap_err(),
            Error::CyclePresent
        );
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&lf("shift:t=1", 5)).unwrap();
        assert_eq!(d.class_count(), 1);
        assert_eq!(d.classes[&5], vec![1, 2, 3, 4, 5]);
        let tree = d.tree(5).unwrap();
        assert_eq!(tree.nodes, vec![(1, 5), (2, 4), (3, 3), (4, 2), (5, 1)]);
        assert_eq!(tree.children[&5], vec![4]);
        assert_eq!(tree.children[&2], vec![1]);
        assert!(!tree.children.contains_key(&1));

        let d = decompose(&lf("table:1>3,2>3", 3)).unwrap();
        assert_eq!(d.class_count(), 1);
        assert_eq!(d.children(3), &[1, 2]);
        assert_eq!(d.class_root, vec![3, 3, 3]);

        let d = decompose(&lf("nextprime", 10)).unwrap();
        assert_eq!(d.class_count(), 7);
        assert_eq!(d.classes[&7], vec![2, 3, 5, 7]);
        for single in [1, 4, 6, 8, 9, 10] {
            assert_eq!(d.classes[&single], vec![single]);
        }
        assert!(d.tree(2).is_none());
        assert_eq!(d.level_counts(), vec![7, 1, 1, 1]);

        assert!(decompose(&lf("table:1>2,2>1", 2)).is_err());
    }

    #[test]
    fn j_nk_examples() {
        assert_eq!(j_nk(&lf("shift:t=1", 5), 2).unwrap(), 3);
        let c = localize(&FunctionSpec::collatz(), 50).unwrap();
        assert_eq!(j_nk(&c, 1).unwrap(), 40);
        assert_eq!(j_nk(&c, 50).unwrap(), 0);
        assert_eq!(j_nk(&lf("nextprime", 30), 30).unwrap(), 0);
    }

    #[test]
    fn tail_counts_and_bound() {
        let hp = heights(&lf("shift:t=1", 5)).unwrap();
        assert_eq!(hp.tail_counts(), vec![4, 3, 2, 1, 0]);
        // A single chain attains the bound.
        assert_eq!(hp.height_sum(), hp.height_sum_bound());
    }

    #[test]
    fn deep_chain_has_no_recursion_limit() {
        let n = 2_000_000;
        let lf = lf("shift:t=1", n);
        let hp = heights(&lf).unwrap();
        assert_eq!(hp.degree_m, n);
        assert!(!detect_cycle(&lf).found);
    }
}
