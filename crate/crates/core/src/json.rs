//! JSON forms of vectors, words, vertices and portraits.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{F2Vector, Ix, Polarity};
use crate::engine::{Letter, Portrait, VertexPath, Word};
use crate::error::{Error, Result};
use crate::families::GroupSpec;

#[derive(Serialize, Deserialize)]
struct F2Json {
    polarity: String,
    support: Vec<String>,
}

impl Serialize for F2Vector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        F2Json {
            polarity: match self.polarity() {
                Polarity::Sparse => "sparse".into(),
                Polarity::Cosparse => "cosparse".into(),
            },
            support: self.support().iter().map(Ix::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for F2Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = F2Json::deserialize(d)?;
        let polarity = match j.polarity.as_str() {
            "sparse" => Polarity::Sparse,
            "cosparse" => Polarity::Cosparse,
            other => return Err(D::Error::custom(format!("unknown polarity {other:?}"))),
        };
        let support = j
            .support
            .iter()
            .map(|s| s.parse::<Ix>())
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        F2Vector::from_support(polarity, support).map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LetterJson {
    Rooted { rooted: F2Vector },
    Directed { directed: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<GroupSpec>,
    pub level: u64,
    pub letters: Vec<LetterJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<GroupSpec>,
    pub level: u64,
    pub letters: Vec<F2Vector>,
}

impl Word {
    pub fn to_json(&self) -> WordJson {
        WordJson {
            spec: None,
            level: self.level(),
            letters: self
                .letters()
                .iter()
                .map(|l| match l {
                    Letter::Rooted(v) => LetterJson::Rooted { rooted: v.clone() },
                    Letter::Directed => LetterJson::Directed { directed: true },
                })
                .collect(),
        }
    }

    /// JSON including the group, so that it can be replayed on its own.
    pub fn to_json_with_spec(&self) -> WordJson {
        WordJson {
            spec: Some(*self.spec()),
            ..self.to_json()
        }
    }

    /// Builds a word from JSON; an embedded spec must agree with `spec` when both are given.
    pub fn from_json(spec: Option<GroupSpec>, j: &WordJson) -> Result<Word> {
        let spec = resolve_spec(spec, j.spec)?;
        let mut letters = Vec::with_capacity(j.letters.len());
        for l in &j.letters {
            letters.push(match l {
                LetterJson::Rooted { rooted } => Letter::Rooted(rooted.clone()),
                LetterJson::Directed { directed: true } => Letter::Directed,
                LetterJson::Directed { directed: false } => {
                    return Err(Error::Parse("\"directed\" must be true".into()))
                }
            });
        }
        Word::from_letters(spec, j.level, letters)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("word serializes")
    }

    pub fn parse_json(spec: Option<GroupSpec>, s: &str) -> Result<Word> {
        let j: WordJson = serde_json::from_str(s)?;
        Word::from_json(spec, &j)
    }
}

impl VertexPath {
    pub fn to_json(&self) -> VertexJson {
        VertexJson {
            spec: None,
            level: self.start_level,
            letters: self.letters.clone(),
        }
    }

    pub fn to_json_with_spec(&self) -> VertexJson {
        VertexJson {
            spec: Some(self.spec),
            ..self.to_json()
        }
    }

    pub fn from_json(spec: Option<GroupSpec>, j: &VertexJson) -> Result<VertexPath> {
        let spec = resolve_spec(spec, j.spec)?;
        VertexPath::new(spec, j.level, j.letters.clone())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("vertex serializes")
    }

    pub fn parse_json(spec: Option<GroupSpec>, s: &str) -> Result<VertexPath> {
        let j: VertexJson = serde_json::from_str(s)?;
        VertexPath::from_json(spec, &j)
    }
}

/// Serde form carries the group so that a word can be read back on its own.
impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_with_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = WordJson::deserialize(d)?;
        Word::from_json(None, &j).map_err(D::Error::custom)
    }
}

impl Serialize for VertexPath {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_with_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for VertexPath {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = VertexJson::deserialize(d)?;
        VertexPath::from_json(None, &j).map_err(D::Error::custom)
    }
}

fn resolve_spec(given: Option<GroupSpec>, embedded: Option<GroupSpec>) -> Result<GroupSpec> {
    match (given, embedded) {
        (Some(a), Some(b)) if a != b => Err(Error::Invalid(format!(
            "word belongs to {} but {} was requested",
            b.name(),
            a.name()
        ))),
        (Some(a), _) | (None, Some(a)) => {
            a.validate()?;
            Ok(a)
        }
        (None, None) => Err(Error::Invalid("no group given".into())),
    }
}

#[derive(Serialize, Deserialize)]
struct PortraitJson {
    t: F2Vector,
    children: BTreeMap<String, PortraitJson>,
}

impl From<&Portrait> for PortraitJson {
    fn from(p: &Portrait) -> Self {
        PortraitJson {
            t: p.translation.clone(),
            children: p
                .children
                .iter()
                .map(|(k, v)| (k.to_string(), PortraitJson::from(v)))
                .collect(),
        }
    }
}

impl TryFrom<PortraitJson> for Portrait {
    type Error = Error;
    fn try_from(j: PortraitJson) -> Result<Portrait> {
        let mut children = BTreeMap::new();
        for (k, v) in j.children {
            children.insert(k.parse::<F2Vector>()?, Portrait::try_from(v)?);
        }
        Ok(Portrait {
            translation: j.t,
            children,
        })
    }
}

impl Serialize for Portrait {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PortraitJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Portrait {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PortraitJson::deserialize(d)?;
        Portrait::try_from(j).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f2_json_form() {
        let v = F2Vector::cosparse([1u64, 4]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"polarity":"cosparse","support":["1","4"]}"#);
        assert_eq!(serde_json::from_str::<F2Vector>(&s).unwrap(), v);
        assert!(serde_json::from_str::<F2Vector>(r#"{"polarity":"sparse","support":["3","1"]}"#).is_err());
        let big = r#"{"polarity":"sparse","support":["340282366920938463463374607431768211455"]}"#;
        let v: F2Vector = serde_json::from_str(big).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), big);
    }

    #[test]
    fn word_json_round_trip() {
        let k3 = GroupSpec::Kr { r: 3 };
        let w = Word::from_letters(k3, 2, vec![Letter::Rooted(F2Vector::basis(1u64)), Letter::Directed]).unwrap();
        let s = w.to_json_string();
        assert_eq!(
            s,
            r#"{"level":2,"letters":[{"rooted":{"polarity":"sparse","support":["1"]}},{"directed":true}]}"#
        );
        assert_eq!(Word::parse_json(Some(k3), &s).unwrap(), w);
        assert!(Word::parse_json(None, &s).is_err());
        let with = serde_json::to_string(&w.to_json_with_spec()).unwrap();
        assert_eq!(Word::parse_json(None, &with).unwrap(), w);
        assert!(Word::parse_json(Some(GroupSpec::Kr { r: 5 }), &with).is_err());
    }

    #[test]
    fn portrait_json_round_trip() {
        let mut p = Portrait::leaf(F2Vector::zero());
        p.children.insert(F2Vector::cosparse([0u64]), Portrait::leaf(F2Vector::basis(0u64)));
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains(r#""c[0]""#));
        assert_eq!(serde_json::from_str::<Portrait>(&s).unwrap(), p);
    }
}
