//! Python bindings. Matrices cross the boundary as lists of integer rows
//! (`d` rows, one column per defining vector); Python integers map to
//! arbitrary-precision integers in both directions.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use toric_poset::cli_io::{self, Invariants};
use toric_poset::layer_groups::{self, GroupElement, LayerGroupData};
use toric_poset::oracle;
use toric_poset::poset_builder::{self, HasseDiagram, LayerRecord, Mode};
use toric_poset::{exact_linalg, Error, IntMatrix, MatroidCache, SubsetId};

create_exception!(toric_poset_py, ToricPosetError, PyValueError);

fn err(e: Error) -> PyErr {
    ToricPosetError::new_err(e.to_string())
}

fn to_matrix(rows: Vec<Vec<BigInt>>) -> PyResult<IntMatrix> {
    let Some(first) = rows.first() else {
        return Err(err(Error::EmptyMatrix));
    };
    let cols = first.len();
    let mut entries = Vec::with_capacity(rows.len() * cols);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(err(Error::RaggedRows {
                line: i + 1,
                expected: cols,
                found: row.len(),
            }));
        }
        entries.extend(row.iter().cloned());
    }
    IntMatrix::new(rows.len(), cols, entries).map_err(err)
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    mode.parse()
        .map_err(|_| PyValueError::new_err(format!("unknown mode {mode:?}")))
}

/// One vertex of a poset: a layer (toric mode) or a flat (hyperplane mode).
#[pyclass(name = "Layer", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyLayer {
    #[pyo3(get)]
    id: usize,
    #[pyo3(get)]
    rank: usize,
    #[pyo3(get)]
    dim: usize,
    /// 0-based indices of the largest defining subset.
    #[pyo3(get)]
    subset: Vec<usize>,
    /// Canonical lift in `Z^subset`; all zeros in hyperplane mode.
    #[pyo3(get)]
    lift: Vec<BigInt>,
    #[pyo3(get)]
    defining_subsets: Vec<Vec<usize>>,
    #[pyo3(get)]
    name: String,
}

impl From<&LayerRecord> for PyLayer {
    fn from(v: &LayerRecord) -> Self {
        PyLayer {
            id: v.id,
            rank: v.rank,
            dim: v.dim,
            subset: v.canonical_name.subset.indices(),
            lift: v.canonical_name.lift.clone(),
            defining_subsets: v.defining_subsets.iter().map(|s| s.indices()).collect(),
            name: v.canonical_name.to_string(),
        }
    }
}

#[pymethods]
impl PyLayer {
    fn __repr__(&self) -> String {
        format!("Layer(id={}, rank={}, {})", self.id, self.rank, self.name)
    }
}

/// Hasse diagram of a poset of layers or an intersection lattice.
#[pyclass(name = "Poset", frozen)]
pub struct PyPoset {
    inner: HasseDiagram,
}

#[pymethods]
impl PyPoset {
    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn mode(&self) -> String {
        self.inner.mode.to_string()
    }

    #[getter]
    fn vertices(&self) -> Vec<PyLayer> {
        self.inner.vertices.iter().map(PyLayer::from).collect()
    }

    /// Cover relations as `(lower_id, upper_id)` pairs.
    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.arcs.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Poset(mode={}, d={}, n={}, vertices={}, edges={})",
            self.inner.mode,
            self.inner.d,
            self.inner.n,
            self.inner.len(),
            self.inner.arcs.len()
        )
    }

    fn rank_counts(&self) -> Vec<usize> {
        toric_poset::rank_counts(&self.inner)
    }

    /// `μ(0̂, v)` indexed by vertex id.
    fn mobius(&self) -> PyResult<Vec<i64>> {
        Ok(toric_poset::mobius(&self.inner).map_err(err)?.values)
    }

    /// Coefficients of `χ(t)`, lowest degree first.
    fn characteristic_polynomial(&self) -> PyResult<Vec<i64>> {
        Ok(toric_poset::characteristic_polynomial(&self.inner)
            .map_err(err)?
            .coefficients)
    }

    /// True when both posets have the same graded cover structure on the
    /// same canonical names.
    fn same_as(&self, other: &PyPoset) -> bool {
        self.inner.compare_by_name(&other.inner).is_ok()
    }

    #[pyo3(signature = (invariants = false))]
    fn to_json(&self, invariants: bool) -> PyResult<String> {
        let inv = if invariants {
            Some(Invariants::compute(&self.inner).map_err(err)?)
        } else {
            None
        };
        Ok(cli_io::emit_json(&self.inner, inv.as_ref()))
    }

    fn to_dot(&self) -> String {
        cli_io::emit_dot(&self.inner)
    }
}

/// `u · a · v = diag(factors)` with unimodular `u`, `v`.
#[pyclass(name = "SmithDecomposition", frozen)]
pub struct PySmith {
    #[pyo3(get)]
    u: Vec<Vec<BigInt>>,
    #[pyo3(get)]
    u_inv: Vec<Vec<BigInt>>,
    #[pyo3(get)]
    v: Vec<Vec<BigInt>>,
    #[pyo3(get)]
    v_inv: Vec<Vec<BigInt>>,
    #[pyo3(get)]
    factors: Vec<BigInt>,
    #[pyo3(get)]
    rank: usize,
}

#[pymethods]
impl PySmith {
    fn __repr__(&self) -> String {
        let f: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        format!(
            "SmithDecomposition(rank={}, factors=[{}])",
            self.rank,
            f.join(", ")
        )
    }
}

/// Rank function and multiplicities of the arithmetic matroid of `X`.
#[pyclass(name = "Matroid", frozen)]
pub struct PyMatroid {
    cache: MatroidCache,
}

impl PyMatroid {
    fn subset(&self, indices: Vec<usize>) -> PyResult<SubsetId> {
        self.cache.subset(&indices).map_err(err)
    }
}

#[pymethods]
impl PyMatroid {
    #[new]
    #[pyo3(signature = (rows, max_n = toric_poset::matroid::DEFAULT_MAX_GROUND_SET))]
    fn new(rows: Vec<Vec<BigInt>>, max_n: usize) -> PyResult<Self> {
        let cache = MatroidCache::with_cap(to_matrix(rows)?, max_n).map_err(err)?;
        Ok(PyMatroid { cache })
    }

    #[getter]
    fn d(&self) -> usize {
        self.cache.d()
    }

    #[getter]
    fn n(&self) -> usize {
        self.cache.n()
    }

    fn rank(&self, subset: Vec<usize>) -> PyResult<usize> {
        Ok(self.cache.rank_of_subset(self.subset(subset)?))
    }

    fn multiplicity(&self, subset: Vec<usize>) -> PyResult<BigInt> {
        Ok(self.cache.multiplicity_of_set(self.subset(subset)?))
    }

    fn layer_group(&self, subset: Vec<usize>) -> PyResult<PyLayerGroup> {
        let s = self.subset(subset)?;
        Ok(PyLayerGroup {
            inner: layer_groups::build_layer_group(&self.cache, s),
        })
    }
}

fn element_tuple(h: GroupElement) -> (Vec<BigInt>, Vec<BigInt>) {
    (h.residues, h.lift)
}

/// `LG(S) = W(S) / I(S)`. Elements are `(residues, lift)` pairs.
#[pyclass(name = "LayerGroup", frozen)]
pub struct PyLayerGroup {
    inner: LayerGroupData,
}

#[pymethods]
impl PyLayerGroup {
    #[getter]
    fn subset(&self) -> Vec<usize> {
        self.inner.subset.indices()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    /// Invariant factors greater than one.
    #[getter]
    fn factors(&self) -> Vec<BigInt> {
        self.inner.nontrivial_factors()
    }

    #[getter]
    fn order(&self) -> BigInt {
        self.inner.order.clone()
    }

    fn __len__(&self) -> PyResult<usize> {
        self.inner.order_usize().map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "LayerGroup(subset={:?}, order={})",
            self.inner.subset, self.inner.order
        )
    }

    fn elements(&self) -> PyResult<Vec<(Vec<BigInt>, Vec<BigInt>)>> {
        self.inner.order_usize().map_err(err)?;
        Ok(self
            .inner
            .enumerate_elements()
            .into_iter()
            .map(element_tuple)
            .collect())
    }

    fn canonicalize(&self, k: Vec<BigInt>) -> PyResult<(Vec<BigInt>, Vec<BigInt>)> {
        Ok(element_tuple(self.inner.canonicalize(&k).map_err(err)?))
    }

    /// Image of the element with lift `k` under the projection onto a
    /// group whose subset has one element fewer.
    fn project(
        &self,
        target: &PyLayerGroup,
        k: Vec<BigInt>,
    ) -> PyResult<(Vec<BigInt>, Vec<BigInt>)> {
        let h = self.inner.canonicalize(&k).map_err(err)?;
        let image = layer_groups::project(&self.inner, &target.inner, &h).map_err(err)?;
        Ok(element_tuple(image))
    }
}

#[pyfunction]
#[pyo3(signature = (rows, max_n = toric_poset::matroid::DEFAULT_MAX_GROUND_SET))]
fn build_layer_poset(rows: Vec<Vec<BigInt>>, max_n: usize) -> PyResult<PyPoset> {
    let x = to_matrix(rows)?;
    let inner = poset_builder::build(&x, Mode::Toric, max_n).map_err(err)?;
    Ok(PyPoset { inner })
}

#[pyfunction]
#[pyo3(signature = (rows, max_n = toric_poset::matroid::DEFAULT_MAX_GROUND_SET))]
fn build_intersection_lattice(rows: Vec<Vec<BigInt>>, max_n: usize) -> PyResult<PyPoset> {
    let x = to_matrix(rows)?;
    let inner = poset_builder::build(&x, Mode::Hyperplane, max_n).map_err(err)?;
    Ok(PyPoset { inner })
}

/// Geometric reference construction; only small instances are accepted.
#[pyfunction]
#[pyo3(signature = (rows, mode = "toric"))]
fn brute_force(rows: Vec<Vec<BigInt>>, mode: &str) -> PyResult<PyPoset> {
    let x = to_matrix(rows)?;
    let inner = match parse_mode(mode)? {
        Mode::Toric => oracle::brute_force_layer_poset(&x),
        Mode::Hyperplane => oracle::brute_force_intersection_lattice(&x),
    }
    .map_err(err)?;
    Ok(PyPoset { inner })
}

#[pyfunction]
fn smith_normal_form(rows: Vec<Vec<BigInt>>) -> PyResult<PySmith> {
    let snf = exact_linalg::smith_normal_form(&to_matrix(rows)?);
    Ok(PySmith {
        u: snf.u.to_rows(),
        u_inv: snf.u_inv.to_rows(),
        v: snf.v.to_rows(),
        v_inv: snf.v_inv.to_rows(),
        factors: snf.factors,
        rank: snf.rank,
    })
}

#[pyfunction]
fn rank(rows: Vec<Vec<BigInt>>) -> PyResult<usize> {
    Ok(exact_linalg::rank(&to_matrix(rows)?))
}

#[pyfunction]
fn gcd_of_maximal_minors(rows: Vec<Vec<BigInt>>) -> PyResult<BigInt> {
    exact_linalg::gcd_of_maximal_minors(&to_matrix(rows)?).map_err(err)
}

#[pyfunction]
fn is_totally_unimodular(rows: Vec<Vec<BigInt>>) -> PyResult<bool> {
    Ok(poset_builder::is_totally_unimodular(&to_matrix(rows)?))
}

/// Reads the text matrix format used by the command-line tool.
#[pyfunction]
fn parse_matrix(text: &str) -> PyResult<Vec<Vec<BigInt>>> {
    Ok(cli_io::parse_matrix(text).map_err(err)?.to_rows())
}

/// Points of `R^d / Z^d` where `d` independent characters vanish, as lists
/// of `fractions.Fraction` in `[0, 1)`.
#[pyfunction]
fn enumerate_torsion_points<'py>(
    py: Python<'py>,
    rows: Vec<Vec<BigInt>>,
) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
    let points = oracle::enumerate_torsion_points(&to_matrix(rows)?).map_err(err)?;
    let fraction = py.import("fractions")?.getattr("Fraction")?;
    points
        .into_iter()
        .map(|p| {
            p.into_iter()
                .map(|q| fraction.call1((q.numer().clone(), q.denom().clone())))
                .collect()
        })
        .collect()
}

#[pymodule]
pub fn toric_poset_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ToricPosetError", m.py().get_type::<ToricPosetError>())?;
    m.add_class::<PyLayer>()?;
    m.add_class::<PyPoset>()?;
    m.add_class::<PySmith>()?;
    m.add_class::<PyMatroid>()?;
    m.add_class::<PyLayerGroup>()?;
    m.add_function(wrap_pyfunction!(build_layer_poset, m)?)?;
    m.add_function(wrap_pyfunction!(build_intersection_lattice, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(smith_normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(gcd_of_maximal_minors, m)?)?;
    m.add_function(wrap_pyfunction!(is_totally_unimodular, m)?)?;
    m.add_function(wrap_pyfunction!(parse_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_torsion_points, m)?)?;
    Ok(())
}
