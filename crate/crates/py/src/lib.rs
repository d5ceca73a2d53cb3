//! `spin7lab`: Python bindings over the core types and operations — the
//! Cayley form and its contraction identities, form-space decompositions,
//! torsion, and the harmonic flow driver. See python/smoke_test.py for usage.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spin7_core::algebra::{
    contraction_identity_residuals, hodge_star_4, pullback_four_form, standard_phi,
};
use spin7_core::flow::{
    fit_exponential_decay, run_flow, FlowConfig, HeatKernelSpec, MonitorConfig, StopReason,
};
use spin7_core::lattice::{
    seeded_field_generator, FiberChart, GeneratorSpec, LatticeGrid, StencilOrder, StructureField,
};
use spin7_core::spaces::{
    decompose_four_form, diamond, lambda_phi, project_two_form, triple_contract, Endomorphism,
    TwoFormPart,
};
use spin7_core::verify::{run_catalogue, CatalogueOptions};
use spin7_core::Matrix8;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_from_vec(components: Vec<f64>) -> PyResult<Matrix8> {
    if components.len() != 64 {
        return Err(PyValueError::new_err("expected 64 row-major components"));
    }
    Ok(Matrix8::from_fn(|i, j| components[i * 8 + j]))
}

/// Totally antisymmetric 4-form on R^8.
#[pyclass(name = "FourForm", from_py_object)]
#[derive(Clone)]
struct PyFourForm {
    inner: spin7_core::FourForm,
}

#[pymethods]
impl PyFourForm {
    /// The 14-term standard Cayley form.
    #[staticmethod]
    fn standard() -> Self {
        PyFourForm { inner: standard_phi() }
    }

    /// Zero form.
    #[staticmethod]
    fn zero() -> Self {
        PyFourForm { inner: spin7_core::FourForm::zero() }
    }

    /// Build from components on sorted index quadruples i<j<k<l
    /// (70 values, lexicographic order).
    #[staticmethod]
    fn from_sorted_components(values: Vec<f64>) -> PyResult<Self> {
        if values.len() != 70 {
            return Err(PyValueError::new_err("expected 70 sorted components"));
        }
        let mut it = values.into_iter();
        Ok(PyFourForm {
            inner: spin7_core::FourForm::from_sorted_fn(|_, _, _, _| it.next().unwrap()),
        })
    }

    fn component(&self, i: usize, j: usize, k: usize, l: usize) -> PyResult<f64> {
        if i >= 8 || j >= 8 || k >= 8 || l >= 8 {
            return Err(PyValueError::new_err("indices run 0..8"));
        }
        Ok(self.inner.component(i, j, k, l))
    }

    fn norm_sq(&self) -> f64 {
        self.inner.norm_sq()
    }

    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn hodge_star(&self) -> Self {
        PyFourForm { inner: hodge_star_4(&self.inner) }
    }

    fn lambda_phi(&self, phi: &PyFourForm) -> Self {
        PyFourForm { inner: lambda_phi(&self.inner, &phi.inner) }
    }

    /// Max-norm residuals of the four contraction identities.
    fn contraction_residuals<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = contraction_identity_residuals(&self.inner);
        let d = PyDict::new(py);
        d.set_item("single", r.single)?;
        d.set_item("double", r.double)?;
        d.set_item("triple", r.triple)?;
        d.set_item("full", r.full)?;
        Ok(d)
    }

    /// Spectral split along the Lambda_Phi eigenspaces; returns the parts
    /// keyed "1", "7", "27", "35".
    fn decompose<'py>(&self, py: Python<'py>, phi: &PyFourForm) -> PyResult<Bound<'py, PyDict>> {
        let split = decompose_four_form(&self.inner, &phi.inner);
        let d = PyDict::new(py);
        d.set_item("1", PyFourForm { inner: split.part1 })?;
        d.set_item("7", PyFourForm { inner: split.part7 })?;
        d.set_item("27", PyFourForm { inner: split.part27 })?;
        d.set_item("35", PyFourForm { inner: split.part35 })?;
        Ok(d)
    }

    /// Pull back by an 8x8 rotation matrix (row-major, 64 values).
    fn pullback(&self, rotation: Vec<f64>) -> PyResult<Self> {
        let q = matrix_from_vec(rotation)?;
        Ok(PyFourForm { inner: pullback_four_form(&q, &self.inner) })
    }

    fn sub(&self, other: &PyFourForm) -> Self {
        PyFourForm { inner: self.inner.sub(&other.inner) }
    }

    fn max_abs(&self) -> f64 {
        self.inner.max_abs()
    }

    fn __repr__(&self) -> String {
        format!("FourForm(nnz={}, norm_sq={:.6})", self.inner.nnz(), self.inner.norm_sq())
    }
}

/// Antisymmetric 2-form on R^8.
#[pyclass(name = "TwoForm", from_py_object)]
#[derive(Clone)]
struct PyTwoForm {
    inner: spin7_core::TwoForm,
}

#[pymethods]
impl PyTwoForm {
    /// Antisymmetrize a row-major 8x8 component list.
    #[staticmethod]
    fn from_components(components: Vec<f64>) -> PyResult<Self> {
        Ok(PyTwoForm { inner: spin7_core::TwoForm::from_matrix(matrix_from_vec(components)?) })
    }

    /// Coordinate two-form dx^i wedge dx^j.
    #[staticmethod]
    fn coordinate(i: usize, j: usize) -> PyResult<Self> {
        if i >= 8 || j >= 8 || i == j {
            return Err(PyValueError::new_err("need distinct indices in 0..8"));
        }
        Ok(PyTwoForm { inner: spin7_core::TwoForm::coordinate(i, j) })
    }

    fn component(&self, i: usize, j: usize) -> f64 {
        self.inner.component(i, j)
    }

    fn components(&self) -> Vec<f64> {
        (0..64).map(|n| self.inner.matrix()[(n / 8, n % 8)]).collect()
    }

    fn norm_sq(&self) -> f64 {
        self.inner.norm_sq()
    }

    fn inner_product(&self, other: &PyTwoForm) -> f64 {
        self.inner.inner(&other.inner)
    }

    /// Projection onto the 7- or 21-dimensional part (pass 7 or 21).
    fn project(&self, phi: &PyFourForm, part: usize) -> PyResult<Self> {
        let part = match part {
            7 => TwoFormPart::Seven,
            21 => TwoFormPart::TwentyOne,
            _ => return Err(PyValueError::new_err("part must be 7 or 21")),
        };
        Ok(PyTwoForm { inner: project_two_form(&self.inner, &phi.inner, part) })
    }

    /// Diamond contraction with a 4-form.
    fn diamond(&self, phi: &PyFourForm) -> PyFourForm {
        PyFourForm { inner: diamond(&Endomorphism::from_two_form(&self.inner), &phi.inner) }
    }

    fn __repr__(&self) -> String {
        format!("TwoForm(norm_sq={:.6})", self.inner.norm_sq())
    }
}

/// Antisymmetrized triple contraction of two 4-forms.
#[pyfunction]
fn triple_contract_forms(sigma: &PyFourForm, phi: &PyFourForm) -> PyTwoForm {
    PyTwoForm { inner: triple_contract(&sigma.inner, &phi.inner) }
}

/// The orthonormal Omega^2_7 basis of the standard chart.
#[pyfunction]
fn omega27_basis() -> Vec<PyTwoForm> {
    FiberChart::standard().basis().iter().map(|b| PyTwoForm { inner: *b }).collect()
}

/// Run the identity catalogue; returns one dict per check.
#[pyfunction]
#[pyo3(signature = (threshold = 1e-11, seed = 7, pullbacks = 8))]
fn verify_catalogue<'py>(
    py: Python<'py>,
    threshold: f64,
    seed: u64,
    pullbacks: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let results = run_catalogue(&standard_phi(), &CatalogueOptions { pullbacks, seed, threshold });
    results
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("id", r.id)?;
            d.set_item("residual", r.residual)?;
            d.set_item("threshold", r.threshold)?;
            d.set_item("pass", r.pass())?;
            d.set_item("description", r.description)?;
            Ok(d)
        })
        .collect()
}

/// Run a seeded harmonic-flow experiment on a periodic lattice and return
/// the recorded series and summary numbers.
#[pyfunction]
#[pyo3(signature = (active_dims, sizes, lengths, steps, amplitude = 0.05, modes = 2,
                    seed = 7, wavenumber_min = 1, wavenumber_max = 3, dt_factor = 0.2,
                    stencil = 2, monitor_every = 10, theta_t0 = None))]
#[allow(clippy::too_many_arguments)]
fn run_flow_experiment<'py>(
    py: Python<'py>,
    active_dims: Vec<usize>,
    sizes: Vec<usize>,
    lengths: Vec<f64>,
    steps: usize,
    amplitude: f64,
    modes: usize,
    seed: u64,
    wavenumber_min: usize,
    wavenumber_max: usize,
    dt_factor: f64,
    stencil: u8,
    monitor_every: usize,
    theta_t0: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = LatticeGrid::new(active_dims, sizes, lengths).map_err(value_err)?;
    let gen = GeneratorSpec::new(modes, amplitude, seed)
        .with_band(wavenumber_min, wavenumber_max);
    let fiber = seeded_field_generator(&grid, &gen).map_err(value_err)?;
    let h = grid.min_spacing();
    let cfg = FlowConfig {
        dt: dt_factor * h * h,
        steps,
        dt_safety: dt_factor,
        monitor_every,
        stencil: match stencil {
            2 => StencilOrder::Two,
            4 => StencilOrder::Four,
            _ => return Err(PyValueError::new_err("stencil must be 2 or 4")),
        },
        ..FlowConfig::default()
    };
    let monitors = MonitorConfig {
        theta_samples: theta_t0
            .map(|t0| {
                vec![HeatKernelSpec {
                    center: grid.lengths().iter().map(|l| 0.5 * l).collect(),
                    t0,
                    images: 3,
                }]
            })
            .unwrap_or_default(),
        ..MonitorConfig::default()
    };
    let (record, _state) = run_flow(StructureField::from_fiber(&fiber), &cfg, &monitors, None)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;

    let half = record.times.len() / 2;
    let (rate, r2) = fit_exponential_decay(&record.times[half..], &record.div_l2[half..]);
    let d = PyDict::new(py);
    d.set_item("times", &record.times)?;
    d.set_item("energies", &record.energies)?;
    d.set_item("sup_torsions", &record.sup_torsions)?;
    d.set_item("div_l2", &record.div_l2)?;
    d.set_item("dt", cfg.dt)?;
    d.set_item("doubling_window", record.doubling_window())?;
    d.set_item("decay_rate", rate)?;
    d.set_item("decay_r2", r2)?;
    d.set_item(
        "thetas",
        record
            .rows
            .iter()
            .map(|row| (row.t, row.thetas.first().copied().flatten()))
            .collect::<Vec<_>>(),
    )?;
    d.set_item(
        "completed",
        matches!(record.stop, StopReason::Completed | StopReason::EnergyPlateau { .. }),
    )?;
    Ok(d)
}

#[pymodule]
fn spin7lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFourForm>()?;
    m.add_class::<PyTwoForm>()?;
    m.add_function(wrap_pyfunction!(triple_contract_forms, m)?)?;
    m.add_function(wrap_pyfunction!(omega27_basis, m)?)?;
    m.add_function(wrap_pyfunction!(verify_catalogue, m)?)?;
    m.add_function(wrap_pyfunction!(run_flow_experiment, m)?)?;
    Ok(())
}
