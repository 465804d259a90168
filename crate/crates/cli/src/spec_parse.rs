//! Parsing of state and observable specifications from the command line.
//!
//! States: `ket0`, `ket1`, `plus`, `minus`, `singlet`, or a JSON array of
//! `[re, im]` amplitude pairs (must already be unit norm).
//!
//! Observables: `pauli_x` / `pauli_y` / `pauli_z`, tensor-leg settings
//! `leg1:<angle>` / `leg2:<angle>` (radians, using the selected convention),
//! or an inline JSON matrix given as a list of rows of `[re, im]` pairs.

use qseq::eprbohm::{leg_observable, singlet_state, AngleSetting, Convention, Particle};
use qseq::hilbert::{
    pauli_x, pauli_y, pauli_z, spectral_decompose, Complex64, ComplexMatrix,
    SpectralDecomposition, StateVector, DEFAULT_DEGENERACY_TOL,
};
use qseq::{Error, Result};

pub fn parse_state(spec: &str) -> Result<StateVector> {
    let spec = spec.trim();
    match spec {
        "ket0" => return StateVector::basis(2, 0),
        "ket1" => return StateVector::basis(2, 1),
        "plus" => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            return StateVector::new(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
        }
        "minus" => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            return StateVector::new(vec![Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]);
        }
        "singlet" => return Ok(singlet_state()),
        _ => {}
    }
    let pairs: Vec<[f64; 2]> = serde_json::from_str(spec).map_err(|e| {
        Error::InvalidArgument(format!(
            "state '{spec}' is neither a preset nor a JSON amplitude list: {e}"
        ))
    })?;
    let amplitudes = pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    StateVector::new(amplitudes)
}

pub fn parse_observable(
    spec: &str,
    convention: Convention,
) -> Result<SpectralDecomposition> {
    let spec = spec.trim();
    match spec {
        "pauli_x" => {
            return Ok(spectral_decompose(&pauli_x(), DEFAULT_DEGENERACY_TOL)?.named("pauli_x"))
        }
        "pauli_y" => {
            return Ok(spectral_decompose(&pauli_y(), DEFAULT_DEGENERACY_TOL)?.named("pauli_y"))
        }
        "pauli_z" => {
            return Ok(spectral_decompose(&pauli_z(), DEFAULT_DEGENERACY_TOL)?.named("pauli_z"))
        }
        _ => {}
    }
    for (prefix, particle) in [("leg1:", Particle::First), ("leg2:", Particle::Second)] {
        if let Some(angle_text) = spec.strip_prefix(prefix) {
            let angle: f64 = angle_text.trim().parse().map_err(|e| {
                Error::InvalidArgument(format!("bad angle in '{spec}': {e}"))
            })?;
            return Ok(leg_observable(&AngleSetting::new(angle, particle, convention)));
        }
    }
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(spec).map_err(|e| {
        Error::InvalidArgument(format!(
            "observable '{spec}' is neither a preset, a leg setting, nor a JSON matrix: {e}"
        ))
    })?;
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::InvalidArgument("observable matrix must be square".into()));
    }
    let data = rows
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    let matrix = ComplexMatrix::new(dim, dim, data)?;
    Ok(spectral_decompose(&matrix, DEFAULT_DEGENERACY_TOL)?.named("matrix"))
}

/// Split on commas that sit outside any JSON brackets, so inline matrices
/// can appear in a comma-separated observable list.
pub fn split_top_level(input: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in input.chars() {
        match ch {
            '[' | '{' => {
                depth += 1;
                current.push(ch);
            }
            ']' | '}' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(current.trim().to_string());
                current.clear();
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        parts.push(current.trim().to_string());
    }
    parts
}

pub fn parse_angles(input: &str) -> Result<Vec<f64>> {
    input
        .split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("bad angle '{piece}': {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        assert_eq!(parse_state("ket0").unwrap().dim(), 2);
        assert_eq!(parse_state("singlet").unwrap().dim(), 4);
        assert_eq!(parse_observable("pauli_z", Convention::SpinHalf).unwrap().dim(), 2);
        assert_eq!(
            parse_observable("leg1:0.5", Convention::SpinHalf).unwrap().dim(),
            4
        );
    }

    #[test]
    fn json_state_must_be_unit() {
        assert!(parse_state("[[1.0,0.0],[0.0,0.0]]").is_ok());
        assert!(parse_state("[[1.0,0.0],[1.0,0.0]]").is_err());
    }

    #[test]
    fn json_observable_must_be_hermitian() {
        let ok = parse_observable("[[[0,0],[1,0]],[[1,0],[0,0]]]", Convention::SpinHalf);
        assert!(ok.is_ok());
        let bad = parse_observable("[[[0,0],[1,0]],[[0,0],[0,0]]]", Convention::SpinHalf);
        assert!(bad.is_err());
    }

    #[test]
    fn split_respects_brackets() {
        let parts = split_top_level("pauli_z,[[[0,0],[1,0]],[[1,0],[0,0]]],leg1:0.2");
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0], "pauli_z");
        assert!(parts[1].starts_with("[[["));
        assert_eq!(parts[2], "leg1:0.2");
    }
}
