//! Graph problem files.
//!
//! ```json
//! {"vertices": [{"colors": 3}, {"colors": 3}], "edges": [[0, 1]]}
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grover::{ColoringProblem, ProblemError};

#[derive(Debug, Error)]
pub enum ProblemFileError {
    #[error("problem file, line {line} column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid problem: {0}")]
    Invalid(#[from] ProblemError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexEntry {
    colors: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    vertices: Vec<VertexEntry>,
    edges: Vec<[usize; 2]>,
}

/// Parses and validates a problem file.
pub fn parse_problem(text: &str) -> Result<ColoringProblem, ProblemFileError> {
    let file: ProblemFile = serde_json::from_str(text).map_err(|e| ProblemFileError::Parse {
        line: e.line(),
        column: e.column(),
        message: match e.to_string().rsplit_once(" at line ") {
            Some((head, _)) => head.to_string(),
            None => e.to_string(),
        },
    })?;
    let colors = file.vertices.iter().map(|v| v.colors).collect();
    let edges = file.edges.iter().map(|[u, v]| (*u, *v)).collect();
    Ok(ColoringProblem::new(colors, edges)?)
}

/// Serialises a problem in the same file format.
pub fn problem_to_json(problem: &ColoringProblem) -> String {
    let file = ProblemFile {
        vertices: problem
            .colors()
            .iter()
            .map(|&colors| VertexEntry { colors })
            .collect(),
        edges: problem.edges().iter().map(|&(u, v)| [u, v]).collect(),
    };
    serde_json::to_string(&file).expect("plain data serialises")
}
