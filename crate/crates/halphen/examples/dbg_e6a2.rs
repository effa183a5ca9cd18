// scratch: compare canonical vs recomputed count tables for E6+A2
use halphen::fixtures::Fixtures;
use halphen::model::{reconstruct, reference_sequence};
use halphen::polytope::count;
use halphen::root_data::{canonical_grading, torsion_elements, ClassGroupElement, Type13};

fn main() {
    let t = Type13::E6A2;
    let fx = Fixtures::bundled();
    let can = canonical_grading(t);
    let model = reconstruct(&reference_sequence(t, fx).unwrap()).unwrap();
    let rec = &model.q_matrix;
    println!("canonical free: {:?}", can.free);
    println!("canonical torsion: {:?}", can.torsion);
    println!("recomputed free: {:?}", rec.free);
    println!("recomputed torsion: {:?}", rec.torsion);
    for (name, q) in [("canonical", &can), ("recomputed", rec)] {
        println!("--- {name}");
        for f in [[0i64,0],[1,0],[0,1],[1,1],[2,0],[0,2],[2,1],[1,2],[2,2],[3,3]] {
            let mut row = vec![];
            for tw in torsion_elements(&q.class_group()) {
                row.push(count(q, &ClassGroupElement::new(f.to_vec(), tw)).unwrap());
            }
            println!("f={f:?}: {row:?}");
        }
    }
}
