mod common;

use common::*;

#[test]
fn acceptance_does_not_depend_on_the_lasso() {
    acceptance_is_representation_invariant(1, 1000).unwrap();
}

#[test]
fn ltl_does_not_depend_on_the_lasso() {
    ltl_is_representation_invariant(2, 1000).unwrap();
}

#[test]
fn complementing_twice_is_the_identity() {
    complement_is_an_involution(3, 500).unwrap();
}

#[test]
fn n_models_are_monotone_in_n() {
    n_models_are_monotone(4, 500).unwrap();
}

#[test]
fn de_morgan_and_until_release_duality() {
    ltl_dualities(5, 500).unwrap();
}
