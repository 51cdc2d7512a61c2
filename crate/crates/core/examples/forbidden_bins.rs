//! Column generation with forbidden bins: the best pattern under the
//! current duals is excluded, and pricing steps below it with the profit cap.

use std::collections::HashSet;

use binpack::colgen::{enter_node, generate_columns, initialize_pool, ColGenConfig};
use binpack::{Instance, Item, Pattern};

fn main() {
    let inst = Instance::from_items(
        100,
        [
            Item { weight: 45, demand: 2 },
            Item { weight: 30, demand: 3 },
            Item { weight: 20, demand: 5 },
        ],
    )
    .unwrap();
    let mut free = initialize_pool(&inst);
    let base = generate_columns(&mut free, &HashSet::new(), &ColGenConfig::default());
    println!("no forbidden bins: z_lp = {:.4}", base.z_lp);

    let mut forbidden = HashSet::new();
    for pattern in [[0, 2, 2], [1, 1, 1], [2, 0, 0]] {
        forbidden.insert(Pattern::new(pattern.to_vec()));
        let mut master = initialize_pool(&inst);
        enter_node(&mut master, &inst.demands(), &forbidden);
        let out = generate_columns(&mut master, &forbidden, &ColGenConfig::default());
        println!(
            "{} forbidden: z_lp = {:.4}, proven {}, decrement solves {}, certify solves {}",
            forbidden.len(),
            out.z_lp,
            out.proven_optimal,
            out.stats.decrement_solves,
            out.stats.certify_solves,
        );
        assert!(forbidden.iter().all(|p| !master.contains(p)));
    }
}
