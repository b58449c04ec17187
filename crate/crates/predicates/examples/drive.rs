//! End-to-end drive: compile a checkerboard master, round-trip it through
//! the text format, binary-split it, and rewrite it onto disjoint scopes.

use ciwb_ci::format::{parse_instance, serialize_instance};
use ciwb_predicates::{finalize_implication, to_disjoint};
use ciwb_tiling::TileSystem;

fn main() {
    let mut sys = TileSystem::new(vec!["a".to_string(), "b".to_string()]).unwrap();
    sys.add_h(0, 1).unwrap();
    sys.add_h(1, 0).unwrap();
    sys.add_v(0, 1).unwrap();
    sys.add_v(1, 0).unwrap();

    let ti = finalize_implication(&sys, 2, 2, 1).unwrap();
    println!(
        "master: {} vars, {} antecedent statements",
        ti.instance.vars.len(),
        ti.instance.antecedent.len()
    );

    let text = serialize_instance(&ti.instance);
    let back = parse_instance(&text).unwrap();
    assert_eq!(back, ti.instance);
    println!("text round-trip: {} bytes, bit-exact", text.len());

    let split = ti.split_binary().unwrap();
    println!(
        "split: {} binary vars, {} statements",
        split.instance.vars.len(),
        split.instance.antecedent.len()
    );

    let (dis, map) = to_disjoint(&ti.instance);
    println!(
        "disjoint: {} vars in {} scopes, {} statements",
        dis.vars.len(),
        map.n_source,
        dis.antecedent.len()
    );
}
