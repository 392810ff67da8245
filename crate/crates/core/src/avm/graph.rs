//! Graph unification. Structures are loaded into a union-find arena where
//! every variable names one node, unified there, and read back into tree form
//! with shared complex nodes written as tags.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use super::{Atom, Attr, FeatureStructure, FeatureValue, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyFailure {
    /// Distinct atoms, or an atom against a structure, at `path`.
    #[error("conflicting values at {path}")]
    Conflict { path: String },
    /// The result would contain a structure inside itself.
    #[error("occurs check failed at {path}")]
    OccursCheck { path: String },
}

impl UnifyFailure {
    pub fn path(&self) -> &str {
        match self {
            UnifyFailure::Conflict { path } | UnifyFailure::OccursCheck { path } => path,
        }
    }
}

/// Resolved value of every variable that occurred in the inputs. Unbound
/// variables are absent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings(BTreeMap<Var, FeatureValue>);

impl Bindings {
    pub fn get(&self, var: &Var) -> Option<&FeatureValue> {
        self.0.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &FeatureValue)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}↦{v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone)]
pub struct Unified {
    pub structure: FeatureStructure,
    pub bindings: Bindings,
}

#[derive(Debug, Clone)]
enum Node {
    Free,
    Atom(Atom),
    Complex(BTreeMap<Attr, usize>),
}

#[derive(Default)]
struct Graph {
    nodes: Vec<Node>,
    parent: Vec<usize>,
    names: Vec<Vec<Var>>,
    vars: BTreeMap<Var, usize>,
}

enum Naming {
    Original,
    Canonical { next: usize, assigned: HashMap<usize, Var> },
}

fn join(path: &[Attr]) -> String {
    path.iter().map(Attr::as_str).collect::<Vec<_>>().join("|")
}

impl Graph {
    fn push(&mut self, node: Node) -> usize {
        let id = self.nodes.len();
        self.nodes.push(node);
        self.parent.push(id);
        self.names.push(Vec::new());
        id
    }

    fn find(&mut self, mut id: usize) -> usize {
        let mut root = id;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[id] != root {
            let next = self.parent[id];
            self.parent[id] = root;
            id = next;
        }
        root
    }

    fn var_node(&mut self, var: &Var) -> usize {
        if let Some(&id) = self.vars.get(var) {
            return id;
        }
        let id = self.push(Node::Free);
        self.names[id].push(var.clone());
        self.vars.insert(var.clone(), id);
        id
    }

    fn link(&mut self, from: usize, into: usize) {
        self.parent[from] = into;
        let moved = std::mem::take(&mut self.names[from]);
        self.names[into].extend(moved);
    }

    fn build(&mut self, fs: &FeatureStructure, path: &mut Vec<Attr>) -> Result<usize, UnifyFailure> {
        let mut children = BTreeMap::new();
        for (attr, value) in &fs.attrs {
            path.push(attr.clone());
            let child = match value {
                FeatureValue::Atom(a) => self.push(Node::Atom(a.clone())),
                FeatureValue::Var(v) => self.var_node(v),
                FeatureValue::Nested(inner) => self.build(inner, path)?,
            };
            path.pop();
            children.insert(attr.clone(), child);
        }
        let node = self.push(Node::Complex(children));
        match &fs.tag {
            Some(tag) => {
                let id = self.var_node(tag);
                self.unify(id, node, path)?;
                Ok(id)
            }
            None => Ok(node),
        }
    }

    fn unify(&mut self, x: usize, y: usize, path: &mut Vec<Attr>) -> Result<(), UnifyFailure> {
        let x = self.find(x);
        let y = self.find(y);
        if x == y {
            return Ok(());
        }
        match (&self.nodes[x], &self.nodes[y]) {
            (Node::Free, _) => self.link(x, y),
            (_, Node::Free) => self.link(y, x),
            (Node::Atom(a), Node::Atom(b)) => {
                if a != b {
                    return Err(UnifyFailure::Conflict { path: join(path) });
                }
                self.link(x, y);
            }
            (Node::Complex(_), Node::Complex(_)) => {
                let Node::Complex(left) = std::mem::replace(&mut self.nodes[x], Node::Free) else { unreachable!() };
                // Link before recursing so shared sub-paths terminate.
                self.link(x, y);
                for (attr, child) in left {
                    let rep = self.find(y);
                    let existing = match &self.nodes[rep] {
                        Node::Complex(map) => map.get(&attr).copied(),
                        _ => unreachable!("complex node lost its representative"),
                    };
                    match existing {
                        Some(other) => {
                            path.push(attr);
                            self.unify(child, other, path)?;
                            path.pop();
                        }
                        None => {
                            if let Node::Complex(map) = &mut self.nodes[rep] {
                                map.insert(attr, child);
                            }
                        }
                    }
                }
            }
            _ => return Err(UnifyFailure::Conflict { path: join(path) }),
        }
        Ok(())
    }

    fn occurs_check(&mut self, root: usize) -> Result<(), UnifyFailure> {
        fn visit(
            g: &mut Graph,
            id: usize,
            on_stack: &mut HashSet<usize>,
            done: &mut HashSet<usize>,
            path: &mut Vec<Attr>,
        ) -> Result<(), UnifyFailure> {
            let id = g.find(id);
            if done.contains(&id) {
                return Ok(());
            }
            if !on_stack.insert(id) {
                return Err(UnifyFailure::OccursCheck { path: join(path) });
            }
            if let Node::Complex(map) = &g.nodes[id] {
                let children: Vec<_> = map.iter().map(|(a, c)| (a.clone(), *c)).collect();
                for (attr, child) in children {
                    path.push(attr);
                    visit(g, child, on_stack, done, path)?;
                    path.pop();
                }
            }
            on_stack.remove(&id);
            done.insert(id);
            Ok(())
        }
        visit(self, root, &mut HashSet::new(), &mut HashSet::new(), &mut Vec::new())
    }

    fn count_refs(&mut self, id: usize, counts: &mut HashMap<usize, usize>) {
        let id = self.find(id);
        let seen = counts.entry(id).or_insert(0);
        *seen += 1;
        if *seen > 1 {
            return;
        }
        if let Node::Complex(map) = &self.nodes[id] {
            let children: Vec<_> = map.values().copied().collect();
            for child in children {
                self.count_refs(child, counts);
            }
        }
    }

    fn name_of(&self, id: usize, naming: &mut Naming) -> Var {
        match naming {
            Naming::Original => self.names[id].iter().min().cloned().unwrap_or_else(|| Var::new(&format!("_G{id}"))),
            Naming::Canonical { next, assigned } => assigned
                .entry(id)
                .or_insert_with(|| {
                    *next += 1;
                    Var::new(&format!("V{next}"))
                })
                .clone(),
        }
    }

    fn read_back(&mut self, root: usize, naming: &mut Naming) -> FeatureStructure {
        let mut counts = HashMap::new();
        self.count_refs(root, &mut counts);
        let mut emitted = HashSet::new();
        match self.emit(root, &counts, &mut emitted, naming) {
            FeatureValue::Nested(fs) => fs,
            // The root of a structure is always complex.
            other => unreachable!("root read back as {other:?}"),
        }
    }

    fn emit(
        &mut self,
        id: usize,
        counts: &HashMap<usize, usize>,
        emitted: &mut HashSet<usize>,
        naming: &mut Naming,
    ) -> FeatureValue {
        let id = self.find(id);
        match self.nodes[id].clone() {
            Node::Free => FeatureValue::Var(self.name_of(id, naming)),
            Node::Atom(a) => FeatureValue::Atom(a),
            Node::Complex(map) => {
                let shared = counts.get(&id).copied().unwrap_or(0) > 1;
                let tag = if shared {
                    let name = self.name_of(id, naming);
                    if !emitted.insert(id) {
                        return FeatureValue::Var(name);
                    }
                    Some(name)
                } else {
                    None
                };
                let mut attrs = BTreeMap::new();
                for (attr, child) in map {
                    let value = self.emit(child, counts, emitted, naming);
                    attrs.insert(attr, value);
                }
                FeatureValue::Nested(FeatureStructure { tag, attrs })
            }
        }
    }

    fn bindings(&mut self) -> Bindings {
        let vars: Vec<_> = self.vars.iter().map(|(v, id)| (v.clone(), *id)).collect();
        let mut out = BTreeMap::new();
        for (var, id) in vars {
            let rep = self.find(id);
            let value = match &self.nodes[rep] {
                Node::Free => {
                    let name = self.name_of(rep, &mut Naming::Original);
                    if name == var {
                        continue;
                    }
                    FeatureValue::Var(name)
                }
                Node::Atom(a) => FeatureValue::Atom(a.clone()),
                Node::Complex(_) => FeatureValue::Nested(self.read_back(rep, &mut Naming::Original)),
            };
            out.insert(var, value);
        }
        Bindings(out)
    }
}

/// Unifies two structures whose variable namespaces are already disjoint
/// except where sharing is intended. A variable name used in both inputs
/// denotes one variable.
pub fn unify(a: &FeatureStructure, b: &FeatureStructure) -> Result<Unified, UnifyFailure> {
    let mut g = Graph::default();
    let mut path = Vec::new();
    let ra = g.build(a, &mut path)?;
    let rb = g.build(b, &mut path)?;
    g.unify(ra, rb, &mut path)?;
    g.occurs_check(ra)?;
    let structure = g.read_back(ra, &mut Naming::Original);
    let bindings = g.bindings();
    Ok(Unified { structure, bindings })
}

/// Left fold of [`unify`]; the empty structure is the unit.
pub fn unify_all<'a>(items: impl IntoIterator<Item = &'a FeatureStructure>) -> Result<FeatureStructure, UnifyFailure> {
    let mut acc = FeatureStructure::new();
    for item in items {
        acc = unify(&acc, item)?.structure;
    }
    Ok(acc)
}

/// True iff some binding of `general`'s variables makes it a sub-map of
/// `specific` at every path, with shared nodes in `general` mapped to shared
/// nodes (or equal atoms) in `specific`.
pub fn subsumes(general: &FeatureStructure, specific: &FeatureStructure) -> bool {
    let mut g = Graph::default();
    let mut s = Graph::default();
    let (Ok(rg), Ok(rs)) = (g.build(general, &mut Vec::new()), s.build(specific, &mut Vec::new())) else {
        return false;
    };

    fn check(g: &mut Graph, s: &mut Graph, gid: usize, sid: usize, map: &mut HashMap<usize, usize>) -> bool {
        let gid = g.find(gid);
        let sid = s.find(sid);
        if let Some(&mapped) = map.get(&gid) {
            return mapped == sid
                || matches!((&s.nodes[mapped], &s.nodes[sid]), (Node::Atom(a), Node::Atom(b)) if a == b);
        }
        map.insert(gid, sid);
        match (g.nodes[gid].clone(), &s.nodes[sid]) {
            (Node::Free, _) => true,
            (Node::Atom(a), Node::Atom(b)) => &a == b,
            (Node::Complex(gm), Node::Complex(sm)) => {
                let sm = sm.clone();
                gm.into_iter().all(|(attr, gc)| match sm.get(&attr) {
                    Some(&sc) => check(g, s, gc, sc, map),
                    None => false,
                })
            }
            _ => false,
        }
    }
    check(&mut g, &mut s, rg, rs, &mut HashMap::new())
}

/// Alpha-normal form: variables renamed `V1`, `V2`, … in first-visit order
/// under sorted-attribute traversal, singly-referenced tags dropped, and
/// content of a shared node written at its first occurrence.
pub fn canonicalize(a: &FeatureStructure) -> FeatureStructure {
    let mut g = Graph::default();
    match g.build(a, &mut Vec::new()) {
        Ok(root) if g.occurs_check(root).is_ok() => {
            g.read_back(root, &mut Naming::Canonical { next: 0, assigned: HashMap::new() })
        }
        // Inconsistent tag contents: fall back to plain renaming.
        _ => {
            let order = a.variables();
            a.rename_vars(&mut |v| {
                let i = order.iter().position(|o| o == v).unwrap_or(0);
                Var::new(&format!("V{}", i + 1))
            })
        }
    }
}
