//! JSON documents for models, classes, motive sums, ring elements and variety
//! descriptors.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::brauer::{BrauerClass, BrauerGroupModel, Coords, GroupKind, IndexPolicy};
use crate::error::{Error, Result};
use crate::forms::{FormShadow, QuadraticForm};
use crate::motives::MotiveSum;
use crate::rational::{format_rational, parse_rational, quaternion_class, Place, RationalBrauerClass};
use crate::ring::RBElement;
use crate::varieties::{Grassmannian, Involution, MeasureReport, Quadric, VarietyDescriptor};
use crate::CSAlgebra;

/// A place of ℚ: the string `"real"` or a prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlaceDoc {
    Prime(u64),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantDoc {
    pub place: PlaceDoc,
    pub inv: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDoc {
    pub invariants: Vec<InvariantDoc>,
}

/// Residue vector (abstract models) or local invariants (Br(ℚ)). On input a class
/// of Br(ℚ) may also be given as a quaternion symbol `{"quaternion": ["-1", "3"]}`;
/// it is always written back as invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoordsDoc {
    Residues(Vec<u64>),
    Local(LocalDoc),
    Quaternion(QuaternionDoc),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuaternionDoc {
    pub quaternion: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntryDoc {
    pub coords: CoordsDoc,
    pub index: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelDoc {
    Abstract {
        orders: Vec<u64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        index_oracle: Vec<IndexEntryDoc>,
    },
    Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDoc {
    pub group: ModelDoc,
    pub coords: CoordsDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityDoc {
    pub coords: CoordsDoc,
    pub mult: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotiveSumDoc {
    pub classes: Vec<MultiplicityDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub class: CoordsDoc,
    pub coeff: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RBElementDoc {
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum VarietyDoc {
    SeveriBrauer {
        class: CoordsDoc,
        degree: u64,
    },
    Grassmannian {
        d: u64,
        class: CoordsDoc,
        degree: u64,
    },
    /// Either `form` (entries as rational strings, Br(ℚ) only) or `dim` plus `clifford_class`.
    Quadric {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        form: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        clifford_class: Option<CoordsDoc>,
        #[serde(default)]
        i3_zero: bool,
    },
    Involution {
        degree: u64,
        alg_class: CoordsDoc,
        cplus: CoordsDoc,
        cminus: CoordsDoc,
        #[serde(default)]
        i3_zero: bool,
    },
    Product {
        factors: Vec<VarietyDoc>,
    },
}

/// Input document: a group model and a variety over it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptorDoc {
    pub group: ModelDoc,
    pub variety: VarietyDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureReportDoc {
    pub rho: u64,
    pub dim: u64,
    pub jt: RBElementDoc,
    pub jt_effective: MotiveSumDoc,
}

impl PlaceDoc {
    pub fn to_place(&self) -> Result<Place> {
        match self {
            PlaceDoc::Prime(p) => Place::finite(*p),
            PlaceDoc::Named(s) if s == "real" || s == "inf" => Ok(Place::Real),
            PlaceDoc::Named(s) => match s.parse::<u64>() {
                Ok(p) => Place::finite(p),
                Err(_) => Err(Error::Parse(format!("unknown place {s:?}"))),
            },
        }
    }

    pub fn from_place(p: Place) -> Self {
        match p {
            Place::Real => PlaceDoc::Named("real".into()),
            Place::Finite(p) => PlaceDoc::Prime(p),
        }
    }
}

impl CoordsDoc {
    pub fn from_coords(c: &Coords) -> Self {
        match c {
            Coords::Residues(r) => CoordsDoc::Residues(r.clone()),
            Coords::Local(l) => CoordsDoc::Local(LocalDoc {
                invariants: l
                    .invariants()
                    .iter()
                    .map(|(&p, x)| InvariantDoc {
                        place: PlaceDoc::from_place(p),
                        inv: format_rational(x),
                    })
                    .collect(),
            }),
        }
    }

    /// Raw coordinates; model membership is checked by the caller.
    pub fn to_coords(&self) -> Result<Coords> {
        match self {
            CoordsDoc::Residues(r) => Ok(Coords::Residues(r.clone())),
            CoordsDoc::Local(l) => {
                let entries = l
                    .invariants
                    .iter()
                    .map(|e| Ok((e.place.to_place()?, parse_rational(&e.inv)?)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Coords::Local(RationalBrauerClass::from_invariants(entries)?))
            }
            CoordsDoc::Quaternion(q) => Ok(Coords::Local(quaternion_class(
                &parse_rational(&q.quaternion[0])?,
                &parse_rational(&q.quaternion[1])?,
            )?)),
        }
    }

    pub fn to_class(&self, model: &Arc<BrauerGroupModel>) -> Result<BrauerClass> {
        model.class(self.to_coords()?)
    }
}

impl ModelDoc {
    pub fn from_model(m: &BrauerGroupModel) -> Self {
        match m.kind() {
            GroupKind::RationalField => ModelDoc::Rational,
            GroupKind::Abstract { orders } => ModelDoc::Abstract {
                orders: orders.clone(),
                index_oracle: match m.index_policy() {
                    IndexPolicy::OrderIsIndex => Vec::new(),
                    IndexPolicy::Oracle(map) => map
                        .iter()
                        .map(|(c, &index)| IndexEntryDoc {
                            coords: CoordsDoc::from_coords(c),
                            index,
                        })
                        .collect(),
                },
            },
        }
    }

    pub fn to_model(&self) -> Result<Arc<BrauerGroupModel>> {
        match self {
            ModelDoc::Rational => Ok(BrauerGroupModel::rational()),
            ModelDoc::Abstract { orders, index_oracle } => {
                let base = BrauerGroupModel::abstract_group(orders)?;
                if index_oracle.is_empty() {
                    return Ok(base);
                }
                let mut map = BTreeMap::new();
                for e in index_oracle {
                    map.insert(e.coords.to_coords()?, e.index);
                }
                base.with_index_oracle(map)
            }
        }
    }
}

impl ClassDoc {
    pub fn from_class(c: &BrauerClass) -> Self {
        Self {
            group: ModelDoc::from_model(c.model()),
            coords: CoordsDoc::from_coords(c.coords()),
        }
    }

    pub fn to_class(&self) -> Result<BrauerClass> {
        self.coords.to_class(&self.group.to_model()?)
    }
}

impl MotiveSumDoc {
    pub fn from_sum(s: &MotiveSum) -> Self {
        Self {
            classes: s
                .entries()
                .map(|(c, mult)| MultiplicityDoc {
                    coords: CoordsDoc::from_coords(c),
                    mult,
                })
                .collect(),
        }
    }

    pub fn to_sum(&self, model: &Arc<BrauerGroupModel>) -> Result<MotiveSum> {
        MotiveSum::from_coords(
            model,
            self.classes
                .iter()
                .map(|e| Ok((e.coords.to_coords()?, e.mult)))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

impl RBElementDoc {
    pub fn from_element(x: &RBElement) -> Self {
        Self {
            terms: x
                .terms()
                .map(|(c, coeff)| TermDoc {
                    class: CoordsDoc::from_coords(c),
                    coeff,
                })
                .collect(),
        }
    }

    pub fn to_element(&self, model: &Arc<BrauerGroupModel>) -> Result<RBElement> {
        RBElement::normalize(
            model,
            self.terms
                .iter()
                .map(|t| Ok((t.class.to_coords()?, t.coeff)))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

fn descriptor_err(e: Error) -> Error {
    match e {
        Error::Descriptor(_) | Error::Parse(_) => e,
        other => Error::Descriptor(other.to_string()),
    }
}

impl VarietyDoc {
    pub fn from_descriptor(v: &VarietyDescriptor) -> Self {
        let cd = |c: &BrauerClass| CoordsDoc::from_coords(c.coords());
        match v {
            VarietyDescriptor::SeveriBrauer(a) => VarietyDoc::SeveriBrauer {
                class: cd(a.class()),
                degree: a.degree(),
            },
            VarietyDescriptor::Grassmannian(g) => VarietyDoc::Grassmannian {
                d: g.d(),
                class: cd(g.alg().class()),
                degree: g.alg().degree(),
            },
            VarietyDescriptor::Quadric(q) => match q.form() {
                Some(f) => VarietyDoc::Quadric {
                    form: Some(f.entries().iter().map(format_rational).collect()),
                    dim: None,
                    clifford_class: None,
                    i3_zero: q.shadow().i3_zero(),
                },
                None => VarietyDoc::Quadric {
                    form: None,
                    dim: Some(q.dim()),
                    clifford_class: Some(cd(q.shadow().clifford_class())),
                    i3_zero: q.shadow().i3_zero(),
                },
            },
            VarietyDescriptor::Involution(iv) => VarietyDoc::Involution {
                degree: iv.deg(),
                alg_class: cd(iv.alg_class()),
                cplus: cd(iv.cplus()),
                cminus: cd(iv.cminus()),
                i3_zero: iv.i3_zero(),
            },
            VarietyDescriptor::Product(xs) => VarietyDoc::Product {
                factors: xs.iter().map(Self::from_descriptor).collect(),
            },
        }
    }

    pub fn to_descriptor(&self, model: &Arc<BrauerGroupModel>) -> Result<VarietyDescriptor> {
        let class = |c: &CoordsDoc| c.to_class(model).map_err(descriptor_err);
        let v = match self {
            VarietyDoc::SeveriBrauer { class: c, degree } => {
                VarietyDescriptor::SeveriBrauer(CSAlgebra::new(class(c)?, *degree).map_err(descriptor_err)?)
            }
            VarietyDoc::Grassmannian { d, class: c, degree } => VarietyDescriptor::Grassmannian(Grassmannian::new(
                *d,
                CSAlgebra::new(class(c)?, *degree).map_err(descriptor_err)?,
            )?),
            VarietyDoc::Quadric {
                form,
                dim,
                clifford_class,
                i3_zero,
            } => match (form, dim, clifford_class) {
                (Some(entries), None, None) => {
                    let refs: Vec<&str> = entries.iter().map(String::as_str).collect();
                    let q = QuadraticForm::parse(&refs)?;
                    VarietyDescriptor::Quadric(Quadric::from_form(q, model, *i3_zero)?)
                }
                (None, Some(n), Some(c)) => VarietyDescriptor::Quadric(Quadric::from_shadow(
                    FormShadow::new(*n, class(c)?, *i3_zero).map_err(descriptor_err)?,
                )),
                _ => {
                    return Err(Error::Descriptor(
                        "quadric needs either `form` or both `dim` and `clifford_class`".into(),
                    ))
                }
            },
            VarietyDoc::Involution {
                degree,
                alg_class,
                cplus,
                cminus,
                i3_zero,
            } => VarietyDescriptor::Involution(Involution::new(
                *degree,
                class(alg_class)?,
                class(cplus)?,
                class(cminus)?,
                *i3_zero,
            )?),
            VarietyDoc::Product { factors } => VarietyDescriptor::Product(
                factors
                    .iter()
                    .map(|f| f.to_descriptor(model))
                    .collect::<Result<_>>()?,
            ),
        };
        v.validate()?;
        Ok(v)
    }
}

impl DescriptorDoc {
    pub fn from_descriptor(v: &VarietyDescriptor) -> Result<Self> {
        let model = v
            .model()
            .ok_or_else(|| Error::Descriptor("empty product has no group model".into()))?;
        Ok(Self {
            group: ModelDoc::from_model(model),
            variety: VarietyDoc::from_descriptor(v),
        })
    }

    pub fn to_descriptor(&self) -> Result<VarietyDescriptor> {
        self.variety.to_descriptor(&self.group.to_model()?)
    }

    pub fn parse(text: &str) -> Result<VarietyDescriptor> {
        let doc: Self = serde_json::from_str(text)?;
        doc.to_descriptor()
    }
}

impl MeasureReportDoc {
    pub fn from_report(r: &MeasureReport) -> Self {
        Self {
            rho: r.rho,
            dim: r.dim,
            jt: RBElementDoc::from_element(&r.jt),
            jt_effective: MotiveSumDoc::from_sum(&r.jt_effective),
        }
    }
}

/// Deterministic pretty JSON.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Serializes a big integer as a JSON number when it fits in 64 bits and as a
/// decimal string otherwise; accepts either form.
pub mod big_integer {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match v.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(x) => Ok(BigInt::from(x)),
            Repr::Str(s) => s.parse().map_err(de::Error::custom),
        }
    }
}
