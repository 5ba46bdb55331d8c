//! JSON form of a ball: schema version, presentation, vertex table (normal
//! forms), level array and edge table (`-1` for edges leaving the ball).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ball::{CayleyBall, VertexId};
use crate::error::{Error, Result};
use crate::group::PresentationSpec;

pub const BALL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallFile {
    pub schema_version: u32,
    pub presentation: PresentationSpec,
    pub radius: usize,
    pub vertices: Vec<String>,
    pub levels: Vec<usize>,
    pub edges: Vec<Vec<i64>>,
}

impl BallFile {
    pub fn from_ball(ball: &CayleyBall) -> Self {
        let alphabet = ball.oracle().alphabet();
        let width = alphabet.len();
        let (words, edges) = ball.raw_parts();
        BallFile {
            schema_version: BALL_SCHEMA_VERSION,
            presentation: PresentationSpec::of(ball.oracle()),
            radius: ball.radius(),
            vertices: words.iter().map(|w| alphabet.render(w)).collect(),
            levels: words.iter().map(|w| w.len()).collect(),
            edges: edges
                .chunks(width)
                .map(|row| {
                    row.iter()
                        .map(|&u| if u == VertexId::MAX { -1 } else { u as i64 })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn into_ball(self) -> Result<CayleyBall> {
        if self.schema_version != BALL_SCHEMA_VERSION {
            return Err(Error::Serde(format!(
                "unsupported ball schema {}",
                self.schema_version
            )));
        }
        let oracle = Arc::new(self.presentation.build()?);
        let words = self
            .vertices
            .iter()
            .map(|s| oracle.word(s))
            .collect::<Result<Vec<_>>>()?;
        if self.levels.len() != words.len()
            || words.iter().zip(&self.levels).any(|(w, &l)| w.len() != l)
        {
            return Err(Error::Serde(
                "level array does not match vertex table".into(),
            ));
        }
        let mut edges = Vec::with_capacity(words.len() * oracle.alphabet().len());
        for row in &self.edges {
            if row.len() != oracle.alphabet().len() {
                return Err(Error::Serde("edge row has wrong width".into()));
            }
            edges.extend(
                row.iter()
                    .map(|&u| if u < 0 { VertexId::MAX } else { u as VertexId }),
            );
        }
        CayleyBall::from_parts(oracle, self.radius, words, edges)
    }
}

pub fn to_json(ball: &CayleyBall) -> Result<String> {
    Ok(serde_json::to_string(&BallFile::from_ball(ball))?)
}

pub fn from_json(s: &str) -> Result<CayleyBall> {
    serde_json::from_str::<BallFile>(s)?.into_ball()
}
