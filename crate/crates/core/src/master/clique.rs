/// Two items that can share no bin: together too wide and too tall.
pub fn incompatible(a: (u32, u32), b: (u32, u32), width: u32, height: u32) -> bool {
    a.0 as u64 + b.0 as u64 > width as u64 && a.1 as u64 + b.1 as u64 > height as u64
}

/// Adjacency matrix of the incompatibility graph.
pub fn incompatibility_graph(dims: &[(u32, u32)], width: u32, height: u32) -> Vec<Vec<bool>> {
    let n = dims.len();
    let mut adj = vec![vec![false; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            if incompatible(dims[a], dims[b], width, height) {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
    }
    adj
}

struct Clique<'a> {
    adj: &'a [Vec<bool>],
    best: Vec<usize>,
    cur: Vec<usize>,
}

impl Clique<'_> {
    /// Greedy coloring of `cand`; returns the vertices in color order with their color numbers.
    fn color(&self, cand: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in cand {
            match classes.iter_mut().find(|c| c.iter().all(|&u| !self.adj[u][v])) {
                Some(c) => c.push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut order = Vec::with_capacity(cand.len());
        let mut colors = Vec::with_capacity(cand.len());
        for (k, c) in classes.iter().enumerate() {
            for &v in c {
                order.push(v);
                colors.push(k + 1);
            }
        }
        (order, colors)
    }

    fn expand(&mut self, cand: Vec<usize>) {
        let (order, colors) = self.color(&cand);
        for idx in (0..order.len()).rev() {
            if self.cur.len() + colors[idx] <= self.best.len() {
                return;
            }
            let v = order[idx];
            self.cur.push(v);
            let next: Vec<usize> = order[..idx].iter().copied().filter(|&u| self.adj[v][u]).collect();
            if next.is_empty() {
                if self.cur.len() > self.best.len() {
                    self.best = self.cur.clone();
                }
            } else {
                self.expand(next);
            }
            self.cur.pop();
        }
    }
}

/// Maximum clique by branch and bound with a greedy coloring bound. Sorted ascending.
pub fn max_clique(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    let mut verts: Vec<usize> = (0..n).collect();
    let degree = |v: usize| adj[v].iter().filter(|&&e| e).count();
    verts.sort_by_key(|&v| (std::cmp::Reverse(degree(v)), v));
    let mut c = Clique { adj, best: Vec::new(), cur: Vec::new() };
    if n > 0 {
        c.expand(verts);
    }
    c.best.sort_unstable();
    c.best
}
