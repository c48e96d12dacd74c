use mell_cli::render::render_dot;
use mell_core::fixtures;

fn nodes(dot: &str) -> Vec<&str> {
    dot.lines().filter(|l| l.contains("shape=")).collect()
}

fn edges(dot: &str) -> Vec<&str> {
    dot.lines().filter(|l| l.contains(" -- ")).collect()
}

#[test]
fn one_is_a_single_node() {
    let dot = render_dot(&fixtures::one());
    assert!(dot.starts_with("graph "));
    assert_eq!(nodes(&dot).len(), 1);
    assert!(edges(&dot).is_empty());
    assert!(nodes(&dot)[0].contains("xlabel=\"c:1\""));
}

#[test]
fn psi2_has_three_cells_and_its_conclusions() {
    let dot = render_dot(&fixtures::psi2());
    let n = nodes(&dot);
    assert_eq!(n.len(), 3);
    assert!(n.iter().all(|l| l.contains("shape=box")));
    assert!(dot.contains("c1:1"));
    assert!(dot.contains("c2:2"));
    assert_eq!(edges(&dot).len(), 3);
    assert_eq!(dot.matches("#1").count(), 2);
}

#[test]
fn free_ports_get_their_own_nodes() {
    let dot = render_dot(&fixtures::axpair());
    let n = nodes(&dot);
    assert_eq!(n.len(), 2);
    assert!(n.iter().all(|l| l.contains("shape=circle")));
    assert_eq!(edges(&dot), ["  \"port_p\" -- \"port_q\" [label=\"p / q\"];"]);
}

#[test]
fn rendering_is_deterministic() {
    for r in [fixtures::fig1(), fixtures::psi2(), fixtures::two_boxes().1] {
        assert_eq!(render_dot(&r), render_dot(&r.clone()));
    }
}
