// Step-2 projection with cached family.
use entrocone::project::{chm_project, keep_vars, ProjectOptions};
use entrocone::shannon::{beyond_shannon_closure, elemental_inequalities, Cone};
use std::path::Path;

fn main() {
    let t0 = std::time::Instant::now();
    let cache = Path::new("/tmp/zy_family5.jsonl");
    let family = if cache.exists() {
        entrocone::io::read_forms(cache).unwrap()
    } else {
        let f = beyond_shannon_closure(&[entrocone::catalog::zhang_yeung()], 5).unwrap();
        entrocone::io::write_forms(cache, &f).unwrap();
        f
    };
    println!("family: {} ({:?})", family.len(), t0.elapsed());
    let scn = entrocone::seq::family_scenario();
    let mut ineqs = elemental_inequalities(5).unwrap();
    ineqs.extend(family);
    let cone = Cone::new(5, ineqs, scn.equalities().unwrap()).unwrap();
    let t1 = std::time::Instant::now();
    let proj = chm_project(&cone, &keep_vars(4), &ProjectOptions::default()).unwrap();
    let (small, _) = proj.into_variable_cone(4).unwrap();
    println!("projection facets: {} ({:?})", small.ineqs().len(), t1.elapsed());
    let f3 = entrocone::seq::seq_inequality(entrocone::seq::SeqIndex(3)).unwrap();
    println!("contains third member as facet: {}", small.ineqs().contains(&f3));
    println!("rays: {}", proj.cone.rays().map(<[entrocone::space::EntVector]>::len).unwrap_or(0));
}
