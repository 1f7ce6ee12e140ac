//! Python bindings exposing the main types and operations: space builders,
//! graph queries, and the measurement engine. Results that are structured
//! reports come back as plain dicts via their JSON form.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use num_rational::Rational64;

use cusped::analysis::{
    delta_barycenter, estimate_contraction, estimate_delta, fellow_traveling_membership,
    git_check, kappa as kappa_of, kappa_prime as kappa_prime_of, morse_excursion,
    quasi_geodesic_family, sublinearity_verdict, GeodesicPolicy, Rho, SublinearEstimate,
};
use cusped::cusped::{build_by_name, embedding_fit, CuspedSpace};
use cusped::graph::{from_text, to_text, Graph, PathRecord, VertexId};
use cusped::group::{CosetId, GroupFamily, GroupModel};
use cusped::spaces;
use cusped::visual::{visual_set, visual_size, visual_size_profile};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn rational(num: i64, den: i64) -> PyResult<Rational64> {
    if den == 0 {
        return Err(value_err("zero denominator"));
    }
    Ok(Rational64::new(num, den))
}

fn parse_rho(spec: &str) -> PyResult<Rho> {
    match spec {
        "zero" => Ok(Rho::Zero),
        "sqrt" => Ok(Rho::Sqrt),
        other => Err(value_err(format!("unknown rho {other:?}; use zero|sqrt"))),
    }
}

fn json_to_py(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let json = PyModule::import(py, "json")?;
    let obj = json.call_method1("loads", (text,))?;
    Ok(obj.unbind())
}

fn vertices(ids: Vec<u32>) -> Vec<VertexId> {
    ids.into_iter().map(VertexId).collect()
}

/// A finite tagged graph with BFS metric queries.
#[pyclass(name = "Graph", skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: Graph,
}

#[pymethods]
impl PyGraph {
    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn distance(&self, u: u32, v: u32) -> PyResult<u32> {
        self.inner
            .shortest_distance(VertexId(u), VertexId(v))
            .map_err(value_err)
    }

    fn ball(&self, center: u32, r: u32) -> Vec<u32> {
        self.inner
            .ball(VertexId(center), r)
            .into_iter()
            .map(|v| v.0)
            .collect()
    }

    fn neighbors(&self, v: u32) -> Vec<u32> {
        self.inner.neighbors(VertexId(v)).to_vec()
    }

    fn tag(&self, v: u32) -> String {
        self.inner.tag(VertexId(v)).token()
    }

    fn find_tag(&self, token: &str) -> Option<u32> {
        self.inner.find_token(token).map(|v| v.0)
    }

    /// Geodesics from u to v up to `cap`; returns (paths, truncated).
    fn geodesics(&self, u: u32, v: u32, cap: usize) -> PyResult<(Vec<Vec<u32>>, bool)> {
        let (paths, truncated) = self
            .inner
            .all_geodesics(VertexId(u), VertexId(v), cap)
            .map_err(value_err)?;
        Ok((
            paths
                .into_iter()
                .map(|p| p.vertices.into_iter().map(|x| x.0).collect())
                .collect(),
            truncated,
        ))
    }

    fn projection(&self, x: u32, target: Vec<u32>) -> PyResult<Vec<u32>> {
        Ok(self
            .inner
            .closest_point_projection(VertexId(x), &vertices(target))
            .map_err(value_err)?
            .into_iter()
            .map(|v| v.0)
            .collect())
    }

    fn set_diameter(&self, s: Vec<u32>) -> PyResult<u32> {
        self.inner.set_diameter(&vertices(s)).map_err(value_err)
    }

    fn to_text(&self) -> String {
        to_text(&self.inner)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<PyGraph> {
        Ok(PyGraph {
            inner: from_text(text).map_err(value_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(vertices={}, edges={})",
            self.inner.vertex_count(),
            self.inner.edge_count()
        )
    }
}

/// A Cayley ball with horoballs glued over every coset.
#[pyclass(name = "CuspedSpace")]
struct PyCuspedSpace {
    inner: CuspedSpace,
}

#[pymethods]
impl PyCuspedSpace {
    #[getter]
    fn graph(&self) -> PyGraph {
        PyGraph {
            inner: self.inner.graph.clone(),
        }
    }

    #[getter]
    fn cayley_count(&self) -> usize {
        self.inner.cayley_count
    }

    #[getter]
    fn coset_count(&self) -> usize {
        self.inner.cosets.len()
    }

    fn coset_representative(&self, coset: u32) -> PyResult<String> {
        self.inner
            .cosets
            .get(coset as usize)
            .map(|c| c.representative.clone())
            .ok_or_else(|| value_err(format!("no coset {coset}")))
    }

    fn horoball_vertices(&self, coset: u32) -> Vec<u32> {
        self.inner
            .horoball_vertices(CosetId(coset))
            .into_iter()
            .map(|v| v.0)
            .collect()
    }

    /// The vertical geodesic above a coset vertex.
    fn vertical_ray(&self, base: u32) -> PyResult<Vec<u32>> {
        let ray = self
            .inner
            .vertical_ray(VertexId(base))
            .map_err(value_err)?;
        Ok(ray.path.vertices.into_iter().map(|v| v.0).collect())
    }

    fn visual_set(&self, basepoint: u32, coset: u32, budget: usize, seed: u64) -> PyResult<Vec<u32>> {
        let vs = visual_set(&self.inner, VertexId(basepoint), CosetId(coset), budget, seed)
            .map_err(runtime_err)?;
        Ok(vs.members.into_iter().map(|v| v.0).collect())
    }

    fn visual_size(&self, basepoint: u32, coset: u32, budget: usize, seed: u64) -> PyResult<u32> {
        let vs = visual_set(&self.inner, VertexId(basepoint), CosetId(coset), budget, seed)
            .map_err(runtime_err)?;
        Ok(visual_size(&self.inner, &vs))
    }

    fn visual_profile(
        &self,
        py: Python<'_>,
        coset: u32,
        basepoints: Vec<u32>,
        budget: usize,
        seed: u64,
    ) -> PyResult<Py<PyAny>> {
        let profile = visual_size_profile(
            &self.inner,
            CosetId(coset),
            &vertices(basepoints),
            budget,
            seed,
        )
        .map_err(runtime_err)?;
        let text = serde_json::to_string(&profile).map_err(runtime_err)?;
        json_to_py(py, &text)
    }

    fn embedding_fit(&self, py: Python<'_>, budget: usize, seed: u64) -> PyResult<Py<PyAny>> {
        let fit = embedding_fit(&self.inner, budget, seed);
        let text = serde_json::to_string(&fit).map_err(runtime_err)?;
        json_to_py(py, &text)
    }

    fn __repr__(&self) -> String {
        format!(
            "CuspedSpace(family={}, R={}, D={}, vertices={})",
            self.inner.config.family,
            self.inner.config.radius,
            self.inner.config.depth,
            self.inner.graph.vertex_count()
        )
    }
}

/// Cayley ball of a supported family: free | abelian | zxz.
#[pyfunction]
fn cayley_ball(family: &str, rank: usize, radius: u32) -> PyResult<PyGraph> {
    let family = GroupFamily::parse(family).map_err(value_err)?;
    let model = GroupModel::new(family, rank).map_err(value_err)?;
    Ok(PyGraph {
        inner: model.cayley_ball(radius).graph,
    })
}

/// Cusped space for (family, rank) relative to the subgroup generated by
/// `subgroup` (e.g. "a"), truncated at Cayley radius R and horoball depth D.
#[pyfunction]
fn cusped_space(
    family: &str,
    rank: usize,
    subgroup: &str,
    radius: u32,
    depth: u32,
) -> PyResult<PyCuspedSpace> {
    Ok(PyCuspedSpace {
        inner: build_by_name(family, rank, subgroup, radius, depth).map_err(value_err)?,
    })
}

/// Ray-with-strips wedge space.
#[pyfunction]
fn strip_wedge(extent: u32) -> PyResult<PyGraph> {
    Ok(PyGraph {
        inner: spaces::strip_wedge(extent).map_err(value_err)?.graph,
    })
}

/// Strip wedge with cusped planes at odd coordinates.
#[pyfunction]
fn cusped_plane_wedge(extent: u32, depth: u32) -> PyResult<PyGraph> {
    Ok(PyGraph {
        inner: spaces::cusped_plane_wedge(extent, depth)
            .map_err(value_err)?
            .graph,
    })
}

/// kappa(rho, L, A) for rho in {"zero", "sqrt"}; rationals as (num, den).
#[pyfunction]
fn kappa(rho: &str, l: (i64, i64), a: (i64, i64)) -> PyResult<(i64, i64)> {
    let k = kappa_of(&parse_rho(rho)?, rational(l.0, l.1)?, rational(a.0, a.1)?)
        .map_err(runtime_err)?;
    Ok((*k.numer(), *k.denom()))
}

/// kappa'(rho, L, A) = (L^2 + 2)(2 kappa + A).
#[pyfunction]
fn kappa_prime(rho: &str, l: (i64, i64), a: (i64, i64)) -> PyResult<(i64, i64)> {
    let k = kappa_prime_of(&parse_rho(rho)?, rational(l.0, l.1)?, rational(a.0, a.1)?)
        .map_err(runtime_err)?;
    Ok((*k.numer(), *k.denom()))
}

/// Empirical contraction table of a target set; returns a dict with the
/// table, verdict, and kappa(rho_hat, 1, 0) when defined.
#[pyfunction]
#[pyo3(signature = (graph, target, r_max, budget, seed, window = 2))]
fn contraction(
    py: Python<'_>,
    graph: &PyGraph,
    target: Vec<u32>,
    r_max: u32,
    budget: usize,
    seed: u64,
    window: u32,
) -> PyResult<Py<PyAny>> {
    let estimate = estimate_contraction(&graph.inner, &vertices(target), r_max, budget, seed)
        .map_err(runtime_err)?;
    let verdict = sublinearity_verdict(&estimate, window).map_err(runtime_err)?;
    let kappa_10 = kappa_of(&Rho::Table(estimate.clone()), 1.into(), 0.into())
        .ok()
        .map(|k| k.to_string());
    let text = serde_json::to_string(&serde_json::json!({
        "estimate": estimate,
        "verdict": verdict,
        "kappa_10": kappa_10,
    }))
    .map_err(runtime_err)?;
    json_to_py(py, &text)
}

/// Barycenter defect of the triangle with the given corner vertices, using
/// first geodesics as sides; returns (defect, barycenter).
#[pyfunction]
fn triangle_defect(graph: &PyGraph, x: u32, y: u32, z: u32) -> PyResult<(u32, u32)> {
    let g = &graph.inner;
    let sides = [
        g.first_geodesic(VertexId(x), VertexId(y)).map_err(value_err)?,
        g.first_geodesic(VertexId(y), VertexId(z)).map_err(value_err)?,
        g.first_geodesic(VertexId(z), VertexId(x)).map_err(value_err)?,
    ];
    let (d, q) = delta_barycenter(g, &sides).map_err(runtime_err)?;
    Ok((d, q.0))
}

/// Sampled barycenter hyperbolicity estimate over a corner pool.
#[pyfunction]
#[pyo3(signature = (graph, pool, n_triangles, seed, policy = "first", cap = 4, separation = 0))]
#[allow(clippy::too_many_arguments)]
fn delta_estimate(
    py: Python<'_>,
    graph: &PyGraph,
    pool: Vec<u32>,
    n_triangles: usize,
    seed: u64,
    policy: &str,
    cap: usize,
    separation: u32,
) -> PyResult<Py<PyAny>> {
    let policy = match policy {
        "first" => GeodesicPolicy::First,
        "all" => GeodesicPolicy::AllUpToCap,
        other => return Err(value_err(format!("unknown policy {other:?}"))),
    };
    let sep = if separation > 0 {
        Some((separation, 2 * separation))
    } else {
        None
    };
    let est = estimate_delta(
        &graph.inner,
        &vertices(pool),
        n_triangles,
        policy,
        cap,
        sep,
        seed,
    );
    let text = serde_json::to_string(&est).map_err(runtime_err)?;
    json_to_py(py, &text)
}

/// Worst (L, A) excursion from a target set among generated certified
/// quasi-geodesics with endpoints on it.
#[pyfunction]
fn morse(
    py: Python<'_>,
    graph: &PyGraph,
    target: Vec<u32>,
    l: i64,
    a: i64,
    budget: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let entry = morse_excursion(
        &graph.inner,
        &vertices(target),
        Rational64::from_integer(l),
        Rational64::from_integer(a),
        budget,
        seed,
    )
    .map_err(runtime_err)?;
    let text = serde_json::to_string(&entry).map_err(runtime_err)?;
    json_to_py(py, &text)
}

/// Geodesic-image-theorem scan of a target set against its own contraction
/// table.
#[pyfunction]
#[pyo3(signature = (graph, target, r_max, budget, samples, seed, slack = 2.0))]
#[allow(clippy::too_many_arguments)]
fn git_scan(
    py: Python<'_>,
    graph: &PyGraph,
    target: Vec<u32>,
    r_max: u32,
    budget: usize,
    samples: usize,
    seed: u64,
    slack: f64,
) -> PyResult<Py<PyAny>> {
    let target = vertices(target);
    let rho: SublinearEstimate =
        estimate_contraction(&graph.inner, &target, r_max, budget, seed).map_err(runtime_err)?;
    let report = git_check(&graph.inner, &target, &rho, samples, slack, seed)
        .map_err(runtime_err)?;
    let text = serde_json::to_string(&report).map_err(runtime_err)?;
    json_to_py(py, &text)
}

/// Does the geodesic beta come kappa-close to alpha beyond radius r?
/// Alpha and beta are vertex paths; rho is "zero", "sqrt", or "fit" (fit
/// alpha's own table at the given r_max/budget).
#[pyfunction]
#[pyo3(signature = (graph, beta, alpha, r, seed, rho = "fit", r_max = 8, budget = 200_000))]
#[allow(clippy::too_many_arguments)]
fn fellow_travel(
    graph: &PyGraph,
    beta: Vec<u32>,
    alpha: Vec<u32>,
    r: u32,
    seed: u64,
    rho: &str,
    r_max: u32,
    budget: usize,
) -> PyResult<bool> {
    let g = &graph.inner;
    let alpha = PathRecord::certify(g, vertices(alpha), 1.into(), 0.into()).map_err(value_err)?;
    let beta = PathRecord::certify(g, vertices(beta), 1.into(), 0.into()).map_err(value_err)?;
    let rho = match rho {
        "fit" => Rho::Table(
            estimate_contraction(g, &alpha.vertices, r_max, budget, seed).map_err(runtime_err)?,
        ),
        other => parse_rho(other)?,
    };
    fellow_traveling_membership(g, &beta, &alpha, r, &rho, alpha.start()).map_err(runtime_err)
}

/// Certified (L, A) quasi-geodesic family between two vertices.
#[pyfunction]
fn qg_family(
    graph: &PyGraph,
    u: u32,
    v: u32,
    l: i64,
    a: i64,
    budget: usize,
    seed: u64,
) -> PyResult<Vec<Vec<u32>>> {
    let fam = quasi_geodesic_family(
        &graph.inner,
        VertexId(u),
        VertexId(v),
        Rational64::from_integer(l),
        Rational64::from_integer(a),
        budget,
        seed,
        None,
    )
    .map_err(runtime_err)?;
    Ok(fam
        .paths
        .into_iter()
        .map(|p| p.vertices.into_iter().map(|x| x.0).collect())
        .collect())
}

#[pymodule]
fn cusped_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyCuspedSpace>()?;
    m.add_function(wrap_pyfunction!(cayley_ball, m)?)?;
    m.add_function(wrap_pyfunction!(cusped_space, m)?)?;
    m.add_function(wrap_pyfunction!(strip_wedge, m)?)?;
    m.add_function(wrap_pyfunction!(cusped_plane_wedge, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(kappa_prime, m)?)?;
    m.add_function(wrap_pyfunction!(contraction, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_defect, m)?)?;
    m.add_function(wrap_pyfunction!(delta_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(morse, m)?)?;
    m.add_function(wrap_pyfunction!(git_scan, m)?)?;
    m.add_function(wrap_pyfunction!(fellow_travel, m)?)?;
    m.add_function(wrap_pyfunction!(qg_family, m)?)?;
    Ok(())
}
