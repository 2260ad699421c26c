//! Small graph utilities shared by the acceptance and emptiness checks.

use std::collections::VecDeque;

/// Strongly connected components of the subgraph induced by `active`.
///
/// Returns `comp[v]` for every active node (`usize::MAX` for inactive ones)
/// together with the number of components. Iterative Tarjan.
pub(crate) fn scc(adj: &[Vec<usize>], active: &[bool]) -> (Vec<usize>, usize) {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut count = 0;
    // (node, next edge position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if !active[root] || index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if !active[w] {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp[w] = count;
                        if w == v {
                            break;
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    (comp, count)
}

/// Nodes reachable from `sources`.
pub(crate) fn reachable(adj: &[Vec<usize>], sources: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in sources {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Shortest path (as a node sequence, both ends included) from any source to
/// any node satisfying `target`, moving only through `active` nodes.
pub(crate) fn shortest_path(
    adj: &[Vec<usize>],
    sources: &[usize],
    active: &[bool],
    target: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if active[s] && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        if target(v) {
            let mut path = vec![v];
            let mut cur = v;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in &adj[v] {
            if active[w] && !seen[w] {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Accepting cycle search for the max-even parity condition.
///
/// Walks even colors from the highest downwards; inside the subgraph of
/// reachable nodes with color at most `c`, an SCC that holds a color-`c` node
/// and at least one edge is an accepting cycle. Returns that node.
pub(crate) fn max_even_cycle(
    adj: &[Vec<usize>],
    colors: &[u32],
    sources: &[usize],
) -> Option<usize> {
    let reach = reachable(adj, sources);
    let top = (0..adj.len())
        .filter(|&v| reach[v])
        .map(|v| colors[v])
        .max()?;
    let mut c = if top % 2 == 0 {
        top as i64
    } else {
        top as i64 - 1
    };
    while c >= 0 {
        let cu = c as u32;
        let active: Vec<bool> = (0..adj.len())
            .map(|v| reach[v] && colors[v] <= cu)
            .collect();
        if (0..adj.len()).any(|v| active[v] && colors[v] == cu) {
            let (comp, count) = scc(adj, &active);
            let mut nontrivial = vec![false; count];
            for v in 0..adj.len() {
                if !active[v] {
                    continue;
                }
                for &w in &adj[v] {
                    if active[w] && comp[w] == comp[v] {
                        nontrivial[comp[v]] = true;
                    }
                }
            }
            if let Some(v) =
                (0..adj.len()).find(|&v| active[v] && colors[v] == cu && nontrivial[comp[v]])
            {
                return Some(v);
            }
        }
        c -= 2;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_splits_chain_and_cycle() {
        let adj = vec![vec![1], vec![2], vec![1], vec![]];
        let (comp, count) = scc(&adj, &[true; 4]);
        assert_eq!(count, 3);
        assert_eq!(comp[1], comp[2]);
        assert_ne!(comp[0], comp[1]);
    }

    #[test]
    fn max_even_prefers_high_even() {
        // 0 -> 1 <-> 2 ; colors 1 at node 1, 2 at node 2
        let adj = vec![vec![1], vec![2], vec![1]];
        assert_eq!(max_even_cycle(&adj, &[0, 1, 2], &[0]), Some(2));
        // odd top with no even cycle beneath
        assert_eq!(max_even_cycle(&adj, &[0, 3, 2], &[0]), None);
    }

    #[test]
    fn self_loop_counts_as_cycle() {
        let adj = vec![vec![0]];
        assert_eq!(max_even_cycle(&adj, &[0], &[0]), Some(0));
        let adj = vec![vec![]];
        assert_eq!(max_even_cycle(&adj, &[0], &[0]), None);
    }
}
