mod common;

use common::{fekete_sup_residual_n20, riesz_lattice2, Golden};

#[test]
fn fekete_residual_at_twenty_matches_fixture() {
    let g = Golden::load().unwrap();
    let v = fekete_sup_residual_n20();
    assert!(v <= 1.01);
    g.check("fekete_sup_residual_n20", v).unwrap();
}

#[test]
fn sparse_lattice_riesz_floor_matches_fixture() {
    let g = Golden::load().unwrap();
    let v = riesz_lattice2();
    assert!(v > 0.0);
    g.check("riesz_lattice2_lower", v).unwrap();
}
