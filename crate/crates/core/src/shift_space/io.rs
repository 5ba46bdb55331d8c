use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{SeqKind, SeqModel};
use crate::error::{Error, Result};
use crate::group::Alphabet;

pub const CARRIER_SCHEMA_VERSION: u32 = 1;

/// Discriminator of periodic records, serialized as `"periodic"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodicTag {
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeqRecord {
    Periodic {
        kind: PeriodicTag,
        preperiod: String,
        period: String,
    },
    Truncated {
        word: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarrierFile {
    pub schema_version: u32,
    pub alphabet: Alphabet,
    pub items: Vec<SeqRecord>,
}

impl SeqRecord {
    pub fn of(x: &SeqModel) -> Self {
        let a = x.alphabet();
        match x.kind() {
            SeqKind::PeriodicExact { preperiod, base } => SeqRecord::Periodic {
                kind: PeriodicTag::Periodic,
                preperiod: a.render(preperiod),
                period: a.render(base),
            },
            SeqKind::Truncated { word } => SeqRecord::Truncated {
                word: a.render(word),
            },
        }
    }

    pub fn model(&self, alphabet: &Arc<Alphabet>) -> Result<SeqModel> {
        match self {
            SeqRecord::Periodic {
                preperiod, period, ..
            } => SeqModel::periodic(
                alphabet.clone(),
                alphabet.word(preperiod)?,
                alphabet.word(period)?,
            ),
            SeqRecord::Truncated { word } => {
                SeqModel::truncated(alphabet.clone(), alphabet.word(word)?)
            }
        }
    }
}

impl CarrierFile {
    pub fn of(alphabet: &Alphabet, items: &[SeqModel]) -> Self {
        CarrierFile {
            schema_version: CARRIER_SCHEMA_VERSION,
            alphabet: alphabet.clone(),
            items: items.iter().map(SeqRecord::of).collect(),
        }
    }

    pub fn models(&self) -> Result<Vec<SeqModel>> {
        if self.schema_version != CARRIER_SCHEMA_VERSION {
            return Err(Error::Serde(format!(
                "unsupported carrier schema version {}",
                self.schema_version
            )));
        }
        let a = Arc::new(self.alphabet.clone());
        self.items.iter().map(|r| r.model(&a)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_space::tests::ab;

    #[test]
    fn round_trip() {
        let a = ab();
        let items: Vec<SeqModel> = ["b(a)", "(ab)", "abba"]
            .iter()
            .map(|s| SeqModel::parse(a.clone(), s).unwrap())
            .collect();
        let file = CarrierFile::of(&a, &items);
        let text = file.to_json().unwrap();
        assert!(text.contains("\"kind\": \"periodic\""));
        let back = CarrierFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.models().unwrap(), items);
        assert!(CarrierFile::from_json(&text.replace("periodic", "cyclic")).is_err());
    }
}
