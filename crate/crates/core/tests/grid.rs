use msf_core::algebra::{outgoing_edge_fn, MinWeight};
use msf_core::cost::WordSize;
use msf_core::grid::{
    grid_allgather, grid_multilinear, grid_multilinear_pairwise, partition, split_changes,
    GridLayout, GridShape,
};
use msf_core::kernels::multilinear;
use msf_core::{AdjacencyMatrix, ChangeSet, EdgeEntry};
use proptest::prelude::*;

const SHAPES: [usize; 5] = [1, 4, 9, 16, 64];

fn graph_and_parents() -> impl Strategy<Value = (AdjacencyMatrix, Vec<usize>, Vec<bool>)> {
    (1usize..=80).prop_flat_map(|n| {
        (
            prop::collection::vec((0..n, 0..n, 1u8..8), 0..=4 * n),
            prop::collection::vec(0..n, n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(edges, p, mask)| {
                let a = AdjacencyMatrix::from_edges(
                    n,
                    edges.into_iter().map(|(u, v, w)| (u, v, f64::from(w))),
                )
                .unwrap();
                (a, p, mask)
            })
    })
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn grid_kernels_equal_sequential((a, p, mask) in graph_and_parents()) {
        let f = outgoing_edge_fn();
        for mask in [None, Some(mask.as_slice())] {
            let expected = multilinear(&a, &p, &p, &f, &MinWeight, mask).unwrap();
            for procs in SHAPES {
                let state = partition(&a, GridShape::new(procs).unwrap());
                let (w, _) = grid_multilinear(&state, &p, &p, &f, &MinWeight, mask).unwrap();
                let (w2, _) = grid_multilinear_pairwise(&state, &p, &p, &f, &MinWeight, mask).unwrap();
                prop_assert_eq!(&w, &expected, "p = {}", procs);
                prop_assert_eq!(&w2, &expected, "pairwise, p = {}", procs);
            }
        }
    }

    #[test]
    fn partition_reassembles((a, _, _) in graph_and_parents()) {
        for procs in SHAPES {
            let state = partition(&a, GridShape::new(procs).unwrap());
            prop_assert_eq!(state.nnz(), a.nnz());
            prop_assert_eq!(&state.reassemble().unwrap(), &a);
        }
    }

    #[test]
    fn pairwise_costs_nnz_extra_writes((a, p, _) in graph_and_parents()) {
        let f = outgoing_edge_fn();
        for procs in [1, 4, 16, 64] {
            let state = partition(&a, GridShape::new(procs).unwrap());
            let (_, once) = grid_multilinear(&state, &p, &p, &f, &MinWeight, None).unwrap();
            let (_, pair) = grid_multilinear_pairwise(&state, &p, &p, &f, &MinWeight, None).unwrap();
            prop_assert_eq!(pair.total.remote_writes - once.total.remote_writes, a.nnz() as u64);
        }
    }

    #[test]
    fn broadcast_and_reduce_move_one_block_per_rank((a, p, _) in graph_and_parents()) {
        let f = outgoing_edge_fn();
        for procs in [4, 9, 16, 64] {
            let state = partition(&a, GridShape::new(procs).unwrap());
            let side = (procs as f64).sqrt() as usize;
            let block = ceil_div(a.n(), side) as u64;
            let (_, counters) = grid_multilinear(&state, &p, &p, &f, &MinWeight, None).unwrap();
            for rank in &counters.per_rank {
                // Two input vectors of one word per element.
                prop_assert_eq!(rank.words_broadcast, 2 * block);
                prop_assert_eq!(rank.words_reduced / EdgeEntry::WORDS, block);
            }
        }
    }

    #[test]
    fn allgather_reaches_every_rank(
        changes in prop::collection::btree_map(0usize..200, 0usize..200, 0..60)
    ) {
        let changed: ChangeSet = changes.iter().map(|(&v, &p)| (v, p)).collect();
        for procs in SHAPES {
            let layout = GridLayout::new(procs, 200).unwrap();
            let parts = split_changes(&changed, &layout);
            let (merged, counters) = grid_allgather(&parts, &layout).unwrap();
            prop_assert_eq!(&merged, &changed);
            prop_assert_eq!(
                counters.total.words_allgathered,
                ((procs - 1) * changed.len() * 2) as u64
            );
        }
    }
}

#[test]
fn single_rank_grid_has_no_collective_traffic() {
    let a = AdjacencyMatrix::from_edges(5, [(0, 1, 1.0), (1, 2, 2.0), (3, 4, 1.0)]).unwrap();
    let p: Vec<usize> = (0..5).collect();
    let state = partition(&a, GridShape::new(1).unwrap());
    let (_, c) = grid_multilinear(&state, &p, &p, &outgoing_edge_fn(), &MinWeight, None).unwrap();
    assert_eq!(c.total.words_broadcast, 0);
    assert_eq!(c.total.words_reduced, 0);
    assert_eq!(c.total.words_redistributed, 0);
    assert_eq!(c.total.local_combines, a.nnz() as u64);
}

#[test]
fn counters_do_not_depend_on_thread_count() {
    let edges: Vec<_> = (0..300u32)
        .map(|i| {
            (
                (i % 97) as usize,
                ((i * 31 + 7) % 97) as usize,
                f64::from(i % 11 + 1),
            )
        })
        .collect();
    let a = AdjacencyMatrix::from_edges(97, edges).unwrap();
    let p: Vec<usize> = (0..97).map(|i| i / 3 * 3).collect();
    let run = || {
        let state = partition(&a, GridShape::new(16).unwrap());
        grid_multilinear(&state, &p, &p, &outgoing_edge_fn(), &MinWeight, None).unwrap()
    };
    let baseline = run();
    for threads in [1, 2, 5] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        assert_eq!(pool.install(run), baseline);
    }
}
