// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Python bindings: states as lists of sixteen (re, im) pairs, reports as
//! dictionaries mirroring the CLI JSON.

use fourq::classify::classify;
use fourq::family::{seed, Family};
use fourq::fixtures::random_in_family;
use fourq::standard_form::{lu_equivalent, standard_form};
use fourq::state::PureState4;
use fourq::symmetry::symmetry_group;
use fourq::transform::{synthesize_protocol_auto, verdict, verify_protocol};
use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;

fn state_from_py(amps: Vec<(f64, f64)>) -> PyResult<PureState4> {
    if amps.len() != 16 {
        return Err(PyValueError::new_err(format!(
            "expected 16 amplitudes, got {}",
            amps.len()
        )));
    }
    let mut amp = [C64::new(0.0, 0.0); 16];
    for (i, (re, im)) in amps.iter().enumerate() {
        if !re.is_finite() || !im.is_finite() {
            return Err(PyValueError::new_err(format!("amplitude {i} not finite")));
        }
        amp[i] = C64::new(*re, *im);
    }
    Ok(PureState4 { amp })
}

fn state_to_py(psi: &PureState4) -> Vec<(f64, f64)> {
    psi.amp.iter().map(|z| (z.re, z.im)).collect()
}

fn parse_family(name: &str) -> PyResult<Family> {
    Family::from_name(name).ok_or_else(|| PyValueError::new_err(format!("unknown family {name}")))
}

fn parse_params(fam: Family, params: Option<Vec<(f64, f64)>>) -> Vec<C64> {
    match params {
        Some(p) => p.iter().map(|(re, im)| C64::new(*re, *im)).collect(),
        None => fam.default_params(),
    }
}

/// Amplitudes of a family seed state (normalized).
#[pyfunction]
#[pyo3(signature = (family, params = None))]
fn seed_state(family: &str, params: Option<Vec<(f64, f64)>>) -> PyResult<Vec<(f64, f64)>> {
    let fam = parse_family(family)?;
    let p = parse_params(fam, params);
    let s = seed(fam, &p).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(state_to_py(&s.state))
}

/// Reproducible random state inside a family.
#[pyfunction]
#[pyo3(signature = (family, rng_seed = 0, cond = 10.0, params = None))]
fn random_state(
    family: &str,
    rng_seed: u64,
    cond: f64,
    params: Option<Vec<(f64, f64)>>,
) -> PyResult<Vec<(f64, f64)>> {
    let fam = parse_family(family)?;
    let p = parse_params(fam, params);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed);
    let psi = random_in_family(fam, &p, &mut rng, cond)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(state_to_py(&psi))
}

/// Classify a state; returns {family, params, perm, margin}.
#[pyfunction]
fn classify_state(py: Python<'_>, amplitudes: Vec<(f64, f64)>) -> PyResult<Py<PyDict>> {
    let psi = state_from_py(amplitudes)?;
    let d = classify(&psi).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = PyDict::new(py);
    out.set_item("family", d.family.name())?;
    out.set_item(
        "params",
        d.params.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>(),
    )?;
    out.set_item("perm", d.perm.iter().map(|p| p + 1).collect::<Vec<_>>())?;
    out.set_item("margin", d.margin)?;
    Ok(out.into())
}

/// Transformation verdict; returns the flag dictionary.
#[pyfunction]
fn verdict_state(py: Python<'_>, amplitudes: Vec<(f64, f64)>) -> PyResult<Py<PyDict>> {
    let psi = state_from_py(amplitudes)?;
    let v = verdict(&psi).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = PyDict::new(py);
    out.set_item("family", v.family)?;
    out.set_item("in_mes", v.in_mes)?;
    out.set_item("reachable", v.reachable)?;
    out.set_item("convertible", v.convertible)?;
    out.set_item("isolated", v.isolated)?;
    out.set_item("basis", v.basis)?;
    out.set_item("unresolved", v.unresolved)?;
    out.set_item("mixed_marginals_fast_path", v.mixed_marginals_fast_path)?;
    Ok(out.into())
}

/// Standard-form Bloch vectors (list of four 3-vectors) plus metadata.
#[pyfunction]
fn standard_form_state(py: Python<'_>, amplitudes: Vec<(f64, f64)>) -> PyResult<Py<PyDict>> {
    let psi = state_from_py(amplitudes)?;
    let sf = standard_form(&psi).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = PyDict::new(py);
    out.set_item("family", sf.desc.family.name())?;
    out.set_item(
        "blochs",
        sf.grams.iter().map(|g| g.bloch.to_vec()).collect::<Vec<_>>(),
    )?;
    out.set_item("fixings", sf.fixings.clone())?;
    out.set_item("w_coefficients", sf.w_coeffs.map(|x| x.to_vec()))?;
    Ok(out.into())
}

/// LU equivalence of two states: (equivalent, distance).
#[pyfunction]
fn lu_equivalent_states(
    a: Vec<(f64, f64)>,
    b: Vec<(f64, f64)>,
) -> PyResult<(bool, f64)> {
    let pa = state_from_py(a)?;
    let pb = state_from_py(b)?;
    lu_equivalent(&pa, &pb).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Sizes of the finite symmetry part and the continuous families.
#[pyfunction]
fn symmetry_summary(py: Python<'_>, amplitudes: Vec<(f64, f64)>) -> PyResult<Py<PyDict>> {
    let psi = state_from_py(amplitudes)?;
    let d = classify(&psi).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let g = symmetry_group(&d).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let out = PyDict::new(py);
    out.set_item("family", d.family.name())?;
    out.set_item("finite_count", g.finite_elements.len())?;
    out.set_item(
        "finite_labels",
        g.finite_elements
            .iter()
            .map(|e| e.label.clone())
            .collect::<Vec<_>>(),
    )?;
    out.set_item(
        "continuous",
        g.continuous.iter().map(|c| c.label.clone()).collect::<Vec<_>>(),
    )?;
    Ok(out.into())
}

/// Synthesize an automatic-parent protocol for a reachable target; returns
/// branch weights and the verification summary.
#[pyfunction]
fn protocol_for(py: Python<'_>, amplitudes: Vec<(f64, f64)>) -> PyResult<Py<PyDict>> {
    let psi = state_from_py(amplitudes)?;
    let proto =
        synthesize_protocol_auto(&psi).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let rep = verify_protocol(&proto);
    let out = PyDict::new(py);
    out.set_item("basis", proto.basis.clone())?;
    out.set_item("measuring_party", proto.measuring_party + 1)?;
    out.set_item("r", proto.r)?;
    out.set_item(
        "weights",
        proto.branches.iter().map(|b| b.weight).collect::<Vec<_>>(),
    )?;
    out.set_item("completeness_deficit", rep.completeness_deficit)?;
    out.set_item("all_pass", rep.all_pass)?;
    out.set_item("source", state_to_py(&proto.source))?;
    out.set_item("target", state_to_py(&proto.target))?;
    Ok(out.into())
}

#[pymodule]
fn fourq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(seed_state, m)?)?;
    m.add_function(wrap_pyfunction!(random_state, m)?)?;
    m.add_function(wrap_pyfunction!(classify_state, m)?)?;
    m.add_function(wrap_pyfunction!(verdict_state, m)?)?;
    m.add_function(wrap_pyfunction!(standard_form_state, m)?)?;
    m.add_function(wrap_pyfunction!(lu_equivalent_states, m)?)?;
    m.add_function(wrap_pyfunction!(symmetry_summary, m)?)?;
    m.add_function(wrap_pyfunction!(protocol_for, m)?)?;
    m.add("SCHEMA_VERSION", fourq::json::SCHEMA_VERSION)?;
    Ok(())
}
