use pyo3::prelude::*;
use pyo3::types::PyDict;
use pyo3::wrap_pymodule;

fn with_module(script: &str) {
    Python::attach(|py| {
        let module = wrap_pymodule!(toric_poset_py::toric_poset_py)(py);
        let globals = PyDict::new(py);
        globals.set_item("tp", module).unwrap();
        let code = std::ffi::CString::new(script).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python snippet failed");
        }
    });
}

#[test]
fn four_vectors_poset_from_python() {
    with_module(
        r##"
X = [[2, 0, 1, 2], [0, 1, -1, 2]]
p = tp.build_layer_poset(X)
assert p.rank_counts() == [1, 6, 6], p.rank_counts()
assert len(p) == 13 and len(p.edges) == 22
assert p.characteristic_polynomial() == [10, -6, 1]
assert p.same_as(tp.brute_force(X))
assert not p.same_as(tp.build_intersection_lattice(X))
names = [v.name for v in p.vertices if v.rank == 1]
assert "{1} k=(1)" in names, names
assert '"char_poly"' in p.to_json(invariants=True)
assert p.to_dot().startswith("digraph")
assert len(tp.enumerate_torsion_points(X)) == 6
"##,
    );
}

#[test]
fn groups_and_linear_algebra_from_python() {
    with_module(
        r##"
m = tp.Matroid([[2, 0, 1, 2], [0, 1, -1, 2]])
assert m.multiplicity([0, 3]) == 4 and m.rank([0, 3]) == 2
g = m.layer_group([0, 3])
assert g.factors == [2, 2] and g.order == 4 and len(g.elements()) == 4
assert g.canonicalize([2, 4]) == ([0, 0], [0, 0])
t = m.layer_group([3])
assert t.factors == [2]
assert g.project(t, [1, 1]) == ([1], [1])
assert g.project(t, [2, 0]) == ([0], [0])

s = tp.smith_normal_form([[2, 4], [6, 8]])
assert s.factors == [2, 4] and s.rank == 2
big = 10 ** 30
assert tp.rank([[big, 1], [1, 0]]) == 2
assert tp.gcd_of_maximal_minors([[big], [2 * big]]) == big
assert tp.parse_matrix("# c\n1 2\n3 4\n") == [[1, 2], [3, 4]]
assert tp.is_totally_unimodular([[1, 0, 1], [0, 1, -1]])

try:
    tp.build_layer_poset([[1] * 25, [0] * 24 + [1]])
except tp.ToricPosetError as e:
    assert "GroundSetTooLarge" in str(e)
else:
    raise AssertionError("expected an error")
try:
    tp.rank([[1, 2], [3]])
except ValueError:
    pass
else:
    raise AssertionError("expected an error")
"##,
    );
}
