//! Hash-consed Boolean circuits with constant folding.

use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    False,
    True,
    Var(u32),
    Not(NodeId),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
}

/// Children are always created before their parents, so node ids are a
/// topological order.
#[derive(Clone, Debug)]
pub struct Circuit {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
}

impl Default for Circuit {
    fn default() -> Self {
        Self::new()
    }
}

impl Circuit {
    pub const FALSE: NodeId = NodeId(0);
    pub const TRUE: NodeId = NodeId(1);

    pub fn new() -> Self {
        let mut c = Circuit {
            nodes: Vec::new(),
            index: HashMap::new(),
        };
        c.intern(Node::False);
        c.intern(Node::True);
        c
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn constant(&self, b: bool) -> NodeId {
        if b {
            Self::TRUE
        } else {
            Self::FALSE
        }
    }

    pub fn var(&mut self, v: u32) -> NodeId {
        self.intern(Node::Var(v))
    }

    pub fn not(&mut self, a: NodeId) -> NodeId {
        match self.node(a) {
            Node::False => Self::TRUE,
            Node::True => Self::FALSE,
            Node::Not(x) => *x,
            _ => self.intern(Node::Not(a)),
        }
    }

    fn gate(&mut self, inputs: impl IntoIterator<Item = NodeId>, is_and: bool) -> NodeId {
        let (unit, zero) = if is_and {
            (Self::TRUE, Self::FALSE)
        } else {
            (Self::FALSE, Self::TRUE)
        };
        let mut xs = Vec::new();
        for x in inputs {
            if x == zero {
                return zero;
            }
            if x == unit {
                continue;
            }
            match self.node(x) {
                Node::And(ys) if is_and => xs.extend_from_slice(ys),
                Node::Or(ys) if !is_and => xs.extend_from_slice(ys),
                _ => xs.push(x),
            }
        }
        xs.sort_unstable();
        xs.dedup();
        for &x in &xs {
            if let Node::Not(y) = self.node(x) {
                if xs.binary_search(y).is_ok() {
                    return zero;
                }
            }
        }
        match xs.len() {
            0 => unit,
            1 => xs[0],
            _ => self.intern(if is_and { Node::And(xs) } else { Node::Or(xs) }),
        }
    }

    pub fn and(&mut self, inputs: impl IntoIterator<Item = NodeId>) -> NodeId {
        self.gate(inputs, true)
    }

    pub fn or(&mut self, inputs: impl IntoIterator<Item = NodeId>) -> NodeId {
        self.gate(inputs, false)
    }

    pub fn and2(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.and([a, b])
    }

    pub fn or2(&mut self, a: NodeId, b: NodeId) -> NodeId {
        self.or([a, b])
    }

    pub fn implies(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let na = self.not(a);
        self.or([na, b])
    }

    pub fn iff(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let l = self.implies(a, b);
        let r = self.implies(b, a);
        self.and([l, r])
    }

    /// At most one input is true (pairwise encoding).
    pub fn at_most_one(&mut self, inputs: &[NodeId]) -> NodeId {
        let mut parts = Vec::new();
        for i in 0..inputs.len() {
            for j in i + 1..inputs.len() {
                let both = self.and2(inputs[i], inputs[j]);
                parts.push(self.not(both));
            }
        }
        self.and(parts)
    }

    pub fn exactly_one(&mut self, inputs: &[NodeId]) -> NodeId {
        let some = self.or(inputs.iter().copied());
        let amo = self.at_most_one(inputs);
        self.and2(some, amo)
    }

    /// Evaluates under a total assignment.
    pub fn eval(&self, root: NodeId, assign: &dyn Fn(u32) -> bool) -> bool {
        let mut memo: HashMap<NodeId, bool> = HashMap::new();
        self.eval_memo(root, assign, &mut memo)
    }

    fn eval_memo(
        &self,
        id: NodeId,
        assign: &dyn Fn(u32) -> bool,
        memo: &mut HashMap<NodeId, bool>,
    ) -> bool {
        if let Some(&v) = memo.get(&id) {
            return v;
        }
        let v = match self.node(id) {
            Node::False => false,
            Node::True => true,
            Node::Var(v) => assign(*v),
            Node::Not(x) => !self.eval_memo(*x, assign, memo),
            Node::And(xs) => xs.iter().all(|&x| self.eval_memo(x, assign, memo)),
            Node::Or(xs) => xs.iter().any(|&x| self.eval_memo(x, assign, memo)),
        };
        memo.insert(id, v);
        v
    }

    /// Nodes reachable from `root`, in increasing (topological) order.
    pub fn cone(&self, root: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id.0 as usize], true) {
                continue;
            }
            match self.node(id) {
                Node::Not(x) => stack.push(*x),
                Node::And(xs) | Node::Or(xs) => stack.extend(xs.iter().copied()),
                _ => {}
            }
        }
        (0..self.nodes.len() as u32)
            .filter(|&i| seen[i as usize])
            .map(NodeId)
            .collect()
    }

    /// Copies the cone of `root` into `target`, replacing variables for which
    /// `subst` returns a node. `cone` must be `self.cone(root)`.
    pub fn substitute_into(
        &self,
        root: NodeId,
        cone: &[NodeId],
        subst: &dyn Fn(u32) -> Option<NodeId>,
        target: &mut Circuit,
        scratch: &mut Vec<NodeId>,
    ) -> NodeId {
        scratch.resize(self.nodes.len(), Self::FALSE);
        for &id in cone {
            let new = match self.node(id) {
                Node::False => Self::FALSE,
                Node::True => Self::TRUE,
                Node::Var(v) => match subst(*v) {
                    Some(n) => n,
                    None => target.var(*v),
                },
                Node::Not(x) => {
                    let x = scratch[x.0 as usize];
                    target.not(x)
                }
                Node::And(xs) => {
                    let ys: Vec<NodeId> = xs.iter().map(|x| scratch[x.0 as usize]).collect();
                    target.and(ys)
                }
                Node::Or(xs) => {
                    let ys: Vec<NodeId> = xs.iter().map(|x| scratch[x.0 as usize]).collect();
                    target.or(ys)
                }
            };
            scratch[id.0 as usize] = new;
        }
        scratch[root.0 as usize]
    }

    /// Variables occurring in the cone of `root`.
    pub fn vars(&self, root: NodeId) -> Vec<u32> {
        let mut vs: Vec<u32> = self
            .cone(root)
            .into_iter()
            .filter_map(|id| match self.node(id) {
                Node::Var(v) => Some(*v),
                _ => None,
            })
            .collect();
        vs.sort_unstable();
        vs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding_and_sharing() {
        let mut c = Circuit::new();
        let x = c.var(0);
        let y = c.var(1);
        let nx = c.not(x);
        assert_eq!(c.and2(x, nx), Circuit::FALSE);
        assert_eq!(c.or2(x, nx), Circuit::TRUE);
        assert_eq!(c.not(nx), x);
        assert_eq!(c.and2(x, y), c.and2(y, x));
        let t = Circuit::TRUE;
        assert_eq!(c.and2(x, t), x);
        let inner = c.and2(x, y);
        assert_eq!(c.and2(inner, x), inner);
    }

    #[test]
    fn exactly_one_semantics() {
        let mut c = Circuit::new();
        let vs: Vec<NodeId> = (0..3).map(|i| c.var(i)).collect();
        let e = c.exactly_one(&vs);
        for bits in 0u32..8 {
            let v = c.eval(e, &|i| bits >> i & 1 == 1);
            assert_eq!(v, bits.count_ones() == 1, "{bits:03b}");
        }
    }

    #[test]
    fn substitution_simplifies() {
        let mut c = Circuit::new();
        let x = c.var(0);
        let y = c.var(1);
        let f = c.implies(x, y);
        let mut t = Circuit::new();
        let cone = c.cone(f);
        let mut scratch = Vec::new();
        let r = c.substitute_into(
            f,
            &cone,
            &|v| (v == 0).then_some(Circuit::FALSE),
            &mut t,
            &mut scratch,
        );
        assert_eq!(r, Circuit::TRUE);
        let r = c.substitute_into(
            f,
            &cone,
            &|v| (v == 0).then_some(Circuit::TRUE),
            &mut t,
            &mut scratch,
        );
        assert_eq!(t.node(r), &Node::Var(1));
    }
}
