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

//! JSON state files (schema "v1"): sixteen [re, im] amplitude pairs indexed
//! by the bitstring q1 q2 q3 q4 with q1 the most significant bit.

use crate::state::{PureState4, StateError};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub amplitudes: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("JSON parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("expected 16 amplitudes, found {0}")]
    WrongLength(usize),
    #[error("amplitude {index} is not finite")]
    NotFinite { index: usize },
    #[error("state error: {0}")]
    State(#[from] StateError),
}

impl StateFile {
    pub fn from_state(psi: &PureState4, label: Option<String>) -> Self {
        StateFile {
            amplitudes: psi.amp.iter().map(|z| [z.re, z.im]).collect(),
            label,
        }
    }

    pub fn to_state(&self) -> Result<PureState4, JsonError> {
        if self.amplitudes.len() != 16 {
            return Err(JsonError::WrongLength(self.amplitudes.len()));
        }
        let mut amp = [C64::new(0.0, 0.0); 16];
        for (index, pair) in self.amplitudes.iter().enumerate() {
            if !pair[0].is_finite() || !pair[1].is_finite() {
                return Err(JsonError::NotFinite { index });
            }
            amp[index] = C64::new(pair[0], pair[1]);
        }
        Ok(PureState4 { amp })
    }
}

pub fn parse_state(text: &str) -> Result<PureState4, JsonError> {
    let f: StateFile = serde_json::from_str(text)?;
    f.to_state()
}

pub fn write_state(psi: &PureState4, label: Option<String>) -> String {
    serde_json::to_string_pretty(&StateFile::from_state(psi, label)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_fixed_point() {
        let s = crate::family::seed(crate::family::Family::Ghz, &[]).unwrap();
        let text = write_state(&s.state, Some("ghz".into()));
        let parsed = parse_state(&text).unwrap();
        let text2 = write_state(&parsed, Some("ghz".into()));
        assert_eq!(text, text2);
    }

    #[test]
    fn rejects_wrong_length() {
        let bad = r#"{"amplitudes": [[1.0, 0.0]]}"#;
        assert!(matches!(parse_state(bad), Err(JsonError::WrongLength(1))));
    }

    #[test]
    fn rejects_non_finite() {
        let mut amps = vec![[0.0f64, 0.0]; 16];
        amps[0] = [f64::NAN, 0.0];
        let txt = serde_json::to_string(&StateFile {
            amplitudes: amps,
            label: None,
        })
        .unwrap();
        assert!(parse_state(&txt).is_err());
    }
}
