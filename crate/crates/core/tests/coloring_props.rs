use proptest::prelude::*;

use tfim_tur::lattice::{color_edges, Graph};

/// Connected graph with maximum degree 3: a random tree plus extra edges.
fn subcubic(n: usize, choices: &[usize]) -> Graph {
    let mut deg = vec![0usize; n];
    let mut edges = Vec::new();
    let mut c = choices.iter().cycle();
    for v in 1..n {
        let open: Vec<usize> = (0..v).filter(|&u| deg[u] < 3).collect();
        let u = open[c.next().unwrap() % open.len()];
        edges.push((u, v));
        deg[u] += 1;
        deg[v] += 1;
    }
    for _ in 0..n {
        let a = c.next().unwrap() % n;
        let b = c.next().unwrap() % n;
        let (a, b) = (a.min(b), a.max(b));
        if a != b && deg[a] < 3 && deg[b] < 3 && !edges.contains(&(a, b)) {
            edges.push((a, b));
            deg[a] += 1;
            deg[b] += 1;
        }
    }
    Graph::new(n, edges, None).unwrap()
}

fn is_bipartite(g: &Graph) -> bool {
    let mut side = vec![None; g.n_vertices()];
    side[0] = Some(false);
    let mut queue = std::collections::VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            match side[w] {
                None => {
                    side[w] = Some(!side[v].unwrap());
                    queue.push_back(w);
                }
                Some(s) if s == side[v].unwrap() => return false,
                _ => {}
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn coloring_is_proper_and_tight(n in 2usize..40, choices in prop::collection::vec(0usize..1000, 1..200)) {
        let g = subcubic(n, &choices);
        let coloring = color_edges(&g);
        prop_assert!(coloring.validate(&g).is_ok());
        let max_deg = (0..n).map(|v| g.neighbors(v).len()).max().unwrap();
        if is_bipartite(&g) {
            prop_assert_eq!(coloring.n_colors(), max_deg);
        } else {
            prop_assert!(coloring.n_colors() <= max_deg + 1);
        }
        for class in coloring.classes() {
            prop_assert!(!class.is_empty());
        }
    }
}
