use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::KripkeError;
use crate::formula::{Formula, Kind};

/// Most worlds a model may have; world sets are `u64` masks.
pub const MAX_MODEL_WORLDS: usize = 64;

/// A finite Kripke model. Worlds are `0..worlds`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    worlds: usize,
    edges: BTreeSet<(usize, usize)>,
    valuation: BTreeMap<String, BTreeSet<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    worlds: usize,
    edges: Vec<[usize; 2]>,
    valuation: BTreeMap<String, Vec<usize>>,
}

impl KripkeModel {
    pub fn new<E, V>(worlds: usize, edges: E, valuation: V) -> Result<Self, KripkeError>
    where
        E: IntoIterator<Item = (usize, usize)>,
        V: IntoIterator<Item = (String, BTreeSet<usize>)>,
    {
        if worlds == 0 || worlds > MAX_MODEL_WORLDS {
            return Err(KripkeError::WorldCount(worlds));
        }
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= worlds || j >= worlds) {
            return Err(KripkeError::UnknownWorld(i.max(j)));
        }
        let valuation: BTreeMap<String, BTreeSet<usize>> = valuation.into_iter().collect();
        for ws in valuation.values() {
            if let Some(&w) = ws.iter().find(|&&w| w >= worlds) {
                return Err(KripkeError::UnknownWorld(w));
            }
        }
        Ok(KripkeModel {
            worlds,
            edges,
            valuation,
        })
    }

    pub(crate) fn from_masks(succ: &[u64], atoms: &[String], val: &[u64]) -> Self {
        let worlds = succ.len();
        let edges = (0..worlds)
            .flat_map(|i| (0..worlds).filter(move |&j| succ[i] >> j & 1 == 1).map(move |j| (i, j)))
            .collect();
        let valuation = atoms
            .iter()
            .zip(val)
            .map(|(a, &m)| (a.clone(), (0..worlds).filter(|&w| m >> w & 1 == 1).collect()))
            .collect();
        KripkeModel {
            worlds,
            edges,
            valuation,
        }
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn valuation(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.valuation
    }

    pub(crate) fn succ_masks(&self) -> Vec<u64> {
        let mut succ = vec![0u64; self.worlds];
        for &(i, j) in &self.edges {
            succ[i] |= 1 << j;
        }
        succ
    }

    /// The set of worlds forcing `a`, as a mask.
    pub fn truth_set(&self, a: &Formula) -> Result<u64, KripkeError> {
        let c = Compiled::new(a);
        let mut val = Vec::with_capacity(c.vars.len());
        for v in &c.vars {
            let ws = self
                .valuation
                .get(v)
                .ok_or_else(|| KripkeError::UnvaluedVariable(v.clone()))?;
            val.push(ws.iter().fold(0u64, |m, &w| m | 1 << w));
        }
        Ok(c.eval(&self.succ_masks(), &val, &mut Vec::new()))
    }

    /// `{"worlds": k, "edges": [[i, j], ..], "valuation": {"p": [i, ..]}}`
    pub fn to_json(&self) -> String {
        let raw = RawModel {
            worlds: self.worlds,
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
            valuation: self
                .valuation
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().copied().collect()))
                .collect(),
        };
        let mut s = serde_json::to_string(&raw).expect("model serialises");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, KripkeError> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| KripkeError::Json(e.to_string()))?;
        KripkeModel::new(
            raw.worlds,
            raw.edges.into_iter().map(|[i, j]| (i, j)),
            raw.valuation.into_iter().map(|(k, v)| (k, v.into_iter().collect())),
        )
    }
}

/// Whether `a` holds at world `w` of `m`.
pub fn forces(m: &KripkeModel, w: usize, a: &Formula) -> Result<bool, KripkeError> {
    if w >= m.worlds {
        return Err(KripkeError::UnknownWorld(w));
    }
    Ok(m.truth_set(a)? >> w & 1 == 1)
}

enum Op {
    False,
    Var(usize),
    Imp(usize, usize),
    Box(usize),
}

/// A formula flattened to its DAG, evaluated on world-set masks.
pub(crate) struct Compiled {
    ops: Vec<Op>,
    pub(crate) vars: Vec<String>,
}

impl Compiled {
    pub(crate) fn new(a: &Formula) -> Self {
        let mut c = Compiled {
            ops: Vec::new(),
            vars: Vec::new(),
        };
        let mut memo: HashMap<usize, usize> = HashMap::new();
        let mut var_ix: HashMap<String, usize> = HashMap::new();
        // Post-order without recursion.
        let mut stack: Vec<(&Formula, bool)> = vec![(a, false)];
        while let Some((f, expanded)) = stack.pop() {
            if memo.contains_key(&f.ptr()) {
                continue;
            }
            match f.kind() {
                Kind::Falsum => {
                    memo.insert(f.ptr(), c.ops.len());
                    c.ops.push(Op::False);
                }
                Kind::Var(v) => {
                    let next = var_ix.len();
                    let ix = *var_ix.entry(v.to_string()).or_insert_with(|| {
                        c.vars.push(v.to_string());
                        next
                    });
                    memo.insert(f.ptr(), c.ops.len());
                    c.ops.push(Op::Var(ix));
                }
                Kind::Implies(l, r) => {
                    if expanded {
                        let op = Op::Imp(memo[&l.ptr()], memo[&r.ptr()]);
                        memo.insert(f.ptr(), c.ops.len());
                        c.ops.push(op);
                    } else {
                        stack.push((f, true));
                        stack.push((r, false));
                        stack.push((l, false));
                    }
                }
                Kind::Box(x) => {
                    if expanded {
                        let op = Op::Box(memo[&x.ptr()]);
                        memo.insert(f.ptr(), c.ops.len());
                        c.ops.push(op);
                    } else {
                        stack.push((f, true));
                        stack.push((x, false));
                    }
                }
            }
        }
        c
    }

    /// Truth set of the root; `val[i]` is the truth set of `vars[i]`.
    pub(crate) fn eval(&self, succ: &[u64], val: &[u64], buf: &mut Vec<u64>) -> u64 {
        let worlds = succ.len();
        let all = if worlds == 64 { u64::MAX } else { (1u64 << worlds) - 1 };
        buf.clear();
        for op in &self.ops {
            let v = match *op {
                Op::False => 0,
                Op::Var(i) => val[i],
                Op::Imp(a, b) => (!buf[a] | buf[b]) & all,
                Op::Box(a) => {
                    let t = buf[a];
                    let mut m = 0u64;
                    for (w, &s) in succ.iter().enumerate() {
                        if s & !t == 0 {
                            m |= 1 << w;
                        }
                    }
                    m
                }
            };
            buf.push(v);
        }
        *buf.last().expect("non-empty formula")
    }
}
