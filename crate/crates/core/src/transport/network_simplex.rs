//! Primal network simplex for the uncapacitated transportation problem.
//!
//! Spanning-tree bookkeeping (thread / reverse thread / successor counts)
//! follows the classic LEMON layout. Every arc is uncapacitated, so arcs are
//! only ever in the lower or tree state. Entering arcs are chosen by block
//! search over a fixed arc order; ties keep the first candidate, which makes
//! the pivot sequence fully deterministic.

const STATE_TREE: i8 = 0;
const STATE_LOWER: i8 = 1;
const NONE: usize = usize::MAX;
const EPS: f64 = 2.220446049250313e-15;

/// Solution of a transportation problem.
#[derive(Debug, Clone)]
pub struct FlowSolution {
    /// Nonzero flows `(source, sink, mass)` sorted by source then sink.
    pub flows: Vec<(usize, usize, f64)>,
    /// Source potentials `f` and sink potentials `g` with `f_i + g_j <= c_ij`.
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub cost: f64,
    pub pivots: usize,
}

pub struct NetworkSimplex<'a> {
    ns: usize,
    nt: usize,
    arc_num: usize,
    costs: &'a [f64],
    art_cost: Vec<f64>,
    art_source: Vec<usize>,
    art_target: Vec<usize>,
    flow: Vec<f64>,
    state: Vec<i8>,
    pi: Vec<f64>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    forward: Vec<bool>,
    dirty_revs: Vec<usize>,
    block_size: usize,
    next_arc: usize,
    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: f64,
}

impl<'a> NetworkSimplex<'a> {
    /// `costs` is the dense row-major `supply.len() x demand.len()` matrix.
    pub fn new(supply: &[f64], demand: &[f64], costs: &'a [f64]) -> Self {
        let ns = supply.len();
        let nt = demand.len();
        assert_eq!(costs.len(), ns * nt);
        let node_num = ns + nt;
        let arc_num = ns * nt;
        let all_arcs = arc_num + node_num;
        let root = node_num;

        let max_cost = costs.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
        let art = (max_cost + 1.0) * node_num as f64;

        let mut s = NetworkSimplex {
            ns,
            nt,
            arc_num,
            costs,
            art_cost: vec![0.0; node_num],
            art_source: vec![0; node_num],
            art_target: vec![0; node_num],
            flow: vec![0.0; all_arcs],
            state: vec![STATE_LOWER; all_arcs],
            pi: vec![0.0; node_num + 1],
            parent: vec![NONE; node_num + 1],
            pred: vec![NONE; node_num + 1],
            thread: vec![0; node_num + 1],
            rev_thread: vec![0; node_num + 1],
            succ_num: vec![0; node_num + 1],
            last_succ: vec![0; node_num + 1],
            forward: vec![false; node_num + 1],
            dirty_revs: Vec::new(),
            block_size: ((arc_num as f64).sqrt().ceil() as usize).max(10),
            next_arc: 0,
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0.0,
        };

        s.thread[root] = 0;
        s.rev_thread[0] = root;
        s.succ_num[root] = node_num + 1;
        s.last_succ[root] = root - 1;
        for u in 0..node_num {
            let e = arc_num + u;
            let sup = if u < ns { supply[u] } else { -demand[u - ns] };
            s.parent[u] = root;
            s.pred[u] = e;
            s.thread[u] = u + 1;
            s.rev_thread[u + 1] = u;
            s.succ_num[u] = 1;
            s.last_succ[u] = u;
            s.state[e] = STATE_TREE;
            if sup >= 0.0 {
                s.forward[u] = true;
                s.pi[u] = 0.0;
                s.art_source[u] = u;
                s.art_target[u] = root;
                s.flow[e] = sup;
                s.art_cost[u] = 0.0;
            } else {
                s.forward[u] = false;
                s.pi[u] = art;
                s.art_source[u] = root;
                s.art_target[u] = u;
                s.flow[e] = -sup;
                s.art_cost[u] = art;
            }
        }
        s
    }

    #[inline]
    fn source(&self, e: usize) -> usize {
        if e < self.arc_num {
            e / self.nt
        } else {
            self.art_source[e - self.arc_num]
        }
    }

    #[inline]
    fn target(&self, e: usize) -> usize {
        if e < self.arc_num {
            self.ns + e % self.nt
        } else {
            self.art_target[e - self.arc_num]
        }
    }

    #[inline]
    fn cost(&self, e: usize) -> f64 {
        if e < self.arc_num {
            self.costs[e]
        } else {
            self.art_cost[e - self.arc_num]
        }
    }

    #[inline]
    fn reduced_cost(&self, e: usize) -> (f64, f64) {
        let ps = self.pi[e / self.nt];
        let pt = self.pi[self.ns + e % self.nt];
        let c = self.costs[e];
        let scale = ps.abs().max(pt.abs()).max(c.abs());
        (c + ps - pt, scale)
    }

    fn find_entering_arc(&mut self) -> bool {
        let mut min = 0.0;
        let mut cnt = self.block_size;
        let mut found = false;
        let start = self.next_arc;
        let mut e = start;
        for _ in 0..self.arc_num {
            if self.state[e] == STATE_LOWER {
                let (c, scale) = self.reduced_cost(e);
                if c < min && c < -EPS * scale {
                    min = c;
                    self.in_arc = e;
                    found = true;
                }
            }
            e += 1;
            if e == self.arc_num {
                e = 0;
            }
            cnt -= 1;
            if cnt == 0 {
                if found {
                    self.next_arc = e;
                    return true;
                }
                cnt = self.block_size;
            }
        }
        if found {
            self.next_arc = e;
        }
        found
    }

    fn find_join_node(&mut self) {
        let mut u = self.source(self.in_arc);
        let mut v = self.target(self.in_arc);
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    fn find_leaving_arc(&mut self) -> bool {
        // entering arcs are always in the lower state
        let first = self.source(self.in_arc);
        let second = self.target(self.in_arc);
        self.delta = f64::INFINITY;
        let mut result = 0;
        let mut u = first;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.forward[u] { self.flow[e] } else { f64::INFINITY };
            if d < self.delta {
                self.delta = d;
                self.u_out = u;
                result = 1;
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != self.join {
            let e = self.pred[u];
            let d = if self.forward[u] { f64::INFINITY } else { self.flow[e] };
            if d <= self.delta {
                self.delta = d;
                self.u_out = u;
                result = 2;
            }
            u = self.parent[u];
        }
        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        result != 0
    }

    fn change_flow(&mut self) {
        let val = self.delta;
        if val > 0.0 {
            self.flow[self.in_arc] += val;
            let mut u = self.source(self.in_arc);
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] += if self.forward[u] { -val } else { val };
                u = self.parent[u];
            }
            let mut u = self.target(self.in_arc);
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] += if self.forward[u] { val } else { -val };
                u = self.parent[u];
            }
        }
        self.state[self.in_arc] = STATE_TREE;
        let out = self.pred[self.u_out];
        self.state[out] = STATE_LOWER;
        self.flow[out] = 0.0;
    }

    fn update_tree_structure(&mut self) {
        let u_in = self.u_in;
        let v_in = self.v_in;
        let u_out = self.u_out;
        let join = self.join;
        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];

        let mut u = self.last_succ[u_in];
        let mut right = self.thread[u];

        let last = if old_rev_thread == v_in {
            self.thread[self.last_succ[u_out]]
        } else {
            self.thread[v_in]
        };

        // re-hang the stem between u_in and u_out
        self.thread[v_in] = u_in;
        let mut stem = u_in;
        self.dirty_revs.clear();
        self.dirty_revs.push(v_in);
        let mut par_stem = v_in;
        while stem != u_out {
            let new_stem = self.parent[stem];
            self.thread[u] = new_stem;
            self.dirty_revs.push(u);

            let w = self.rev_thread[stem];
            self.thread[w] = right;
            self.rev_thread[right] = w;

            self.parent[stem] = par_stem;
            par_stem = stem;
            stem = new_stem;

            u = if self.last_succ[stem] == self.last_succ[par_stem] {
                self.rev_thread[par_stem]
            } else {
                self.last_succ[stem]
            };
            right = self.thread[u];
        }
        self.parent[u_out] = par_stem;
        self.thread[u] = last;
        self.rev_thread[last] = u;
        self.last_succ[u_out] = u;

        if old_rev_thread != v_in {
            self.thread[old_rev_thread] = right;
            self.rev_thread[right] = old_rev_thread;
        }

        for i in 0..self.dirty_revs.len() {
            let u = self.dirty_revs[i];
            let t = self.thread[u];
            self.rev_thread[t] = u;
        }

        let mut tmp_sc = 0usize;
        let tmp_ls = self.last_succ[u_out];
        let mut u = u_out;
        while u != u_in {
            let w = self.parent[u];
            self.pred[u] = self.pred[w];
            self.forward[u] = !self.forward[w];
            tmp_sc = tmp_sc + self.succ_num[u] - self.succ_num[w];
            self.succ_num[u] = tmp_sc;
            self.last_succ[w] = tmp_ls;
            u = w;
        }
        self.pred[u_in] = self.in_arc;
        self.forward[u_in] = u_in == self.source(self.in_arc);
        self.succ_num[u_in] = old_succ_num;

        let (up_limit_in, up_limit_out) = if self.last_succ[join] == v_in {
            (NONE, join)
        } else {
            (join, NONE)
        };

        let mut u = v_in;
        while u != up_limit_in && u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = self.last_succ[u_out];
            u = self.parent[u];
        }
        let replacement = if join != old_rev_thread && v_in != old_rev_thread {
            old_rev_thread
        } else {
            self.last_succ[u_out]
        };
        let mut u = v_out;
        while u != up_limit_out && u != NONE && self.last_succ[u] == old_last_succ {
            self.last_succ[u] = replacement;
            u = self.parent[u];
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    fn update_potential(&mut self) {
        let u_in = self.u_in;
        let e = self.pred[u_in];
        let sigma = if self.forward[u_in] {
            self.pi[self.v_in] - self.pi[u_in] - self.cost(e)
        } else {
            self.pi[self.v_in] - self.pi[u_in] + self.cost(e)
        };
        let end = self.thread[self.last_succ[u_in]];
        let mut u = u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }

    /// Runs the simplex method to optimality.
    pub fn solve(mut self) -> FlowSolution {
        let mut pivots = 0;
        while self.find_entering_arc() {
            self.find_join_node();
            if !self.find_leaving_arc() {
                break;
            }
            self.change_flow();
            self.update_tree_structure();
            self.update_potential();
            pivots += 1;
        }

        let mut flows = Vec::new();
        let mut cost = 0.0;
        for e in 0..self.arc_num {
            let v = self.flow[e];
            if v > 0.0 {
                let (i, j) = (e / self.nt, e % self.nt);
                flows.push((i, j, v));
                cost += v * self.costs[e];
            }
        }
        // reduced cost c + pi_s - pi_t >= 0  <=>  f = -pi_s, g = pi_t
        let shift = self.pi[0];
        let f = (0..self.ns).map(|i| shift - self.pi[i]).collect();
        let g = (0..self.nt).map(|j| self.pi[self.ns + j] - shift).collect();
        FlowSolution { flows, f, g, cost, pivots }
    }
}
