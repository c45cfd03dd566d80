//! User-facing domain descriptions and their compiled form.

use serde::{Deserialize, Serialize};

use crate::domain::blended::BlendedDefining;
use crate::domain::boundary::BoundaryCurve;
use crate::domain::defining::DefiningFunction;
use crate::domain::shape::{
    ConvexPolygon, EllipseShape, Shape, SmoothedPolygon, SuperellipseShape,
};
use crate::geometry::Vec2;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    Ellipse {
        a: f64,
        b: f64,
        center: Vec2,
        rotation: f64,
    },
    Superellipse {
        a: f64,
        b: f64,
        p: f64,
        center: Vec2,
        rotation: f64,
    },
    /// Smoothed convex polygon; `epsilon` is the collar width of its
    /// blended defining function.
    Polygon {
        vertices: Vec<Vec2>,
        epsilon: Option<f64>,
    },
}

/// A convex domain together with the anchor point used for polar grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainBlock", into = "DomainBlock")]
pub struct DomainDescriptor {
    pub kind: DomainKind,
    pub anchor: Option<Vec2>,
}

impl DomainDescriptor {
    pub fn ellipse(a: f64, b: f64) -> Self {
        DomainDescriptor {
            kind: DomainKind::Ellipse {
                a,
                b,
                center: Vec2::ZERO,
                rotation: 0.0,
            },
            anchor: None,
        }
    }

    pub fn disk(r: f64) -> Self {
        DomainDescriptor::ellipse(r, r)
    }

    pub fn superellipse(a: f64, b: f64, p: f64) -> Self {
        DomainDescriptor {
            kind: DomainKind::Superellipse {
                a,
                b,
                p,
                center: Vec2::ZERO,
                rotation: 0.0,
            },
            anchor: None,
        }
    }

    pub fn polygon(vertices: Vec<Vec2>) -> Self {
        DomainDescriptor {
            kind: DomainKind::Polygon {
                vertices,
                epsilon: None,
            },
            anchor: None,
        }
    }

    pub fn centered(mut self, c: Vec2) -> Self {
        match &mut self.kind {
            DomainKind::Ellipse { center, .. } | DomainKind::Superellipse { center, .. } => {
                *center = c
            }
            DomainKind::Polygon { vertices, .. } => {
                let shift = c - ConvexPolygon::new(vertices)
                    .map(|p| p.centroid())
                    .unwrap_or(c);
                for v in vertices.iter_mut() {
                    *v += shift;
                }
            }
        }
        self
    }

    pub fn rotated(mut self, angle: f64) -> Self {
        if let DomainKind::Ellipse { rotation, .. } | DomainKind::Superellipse { rotation, .. } =
            &mut self.kind
        {
            *rotation = angle;
        }
        self
    }

    pub fn with_anchor(mut self, anchor: Vec2) -> Self {
        self.anchor = Some(anchor);
        self
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        if let DomainKind::Polygon { epsilon, .. } = &mut self.kind {
            *epsilon = Some(eps);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        match &self.kind {
            DomainKind::Ellipse {
                a,
                b,
                center,
                rotation,
            } => {
                positive("a", *a)?;
                positive("b", *b)?;
                finite_point("center", *center)?;
                finite("rotation", *rotation)?;
            }
            DomainKind::Superellipse {
                a,
                b,
                p,
                center,
                rotation,
            } => {
                positive("a", *a)?;
                positive("b", *b)?;
                if !(*p >= 2.0 && p.is_finite()) {
                    return Err(Error::Parameter(format!(
                        "superellipse exponent must be at least 2, got {p}"
                    )));
                }
                finite_point("center", *center)?;
                finite("rotation", *rotation)?;
            }
            DomainKind::Polygon { vertices, epsilon } => {
                for v in vertices {
                    finite_point("vertex", *v)?;
                }
                if let Some(e) = epsilon {
                    positive("epsilon", *e)?;
                }
                ConvexPolygon::new(vertices)?;
            }
        }
        if let Some(a) = self.anchor {
            finite_point("anchor", a)?;
        }
        Ok(())
    }

    /// The anchor if given, otherwise the centre or polygon centroid.
    pub fn anchor(&self) -> Vec2 {
        self.anchor.unwrap_or_else(|| match &self.kind {
            DomainKind::Ellipse { center, .. } | DomainKind::Superellipse { center, .. } => *center,
            DomainKind::Polygon { vertices, .. } => ConvexPolygon::new(vertices)
                .map(|p| p.centroid())
                .unwrap_or(Vec2::ZERO),
        })
    }

    pub fn shape(&self) -> Result<Shape> {
        self.validate()?;
        Ok(match &self.kind {
            DomainKind::Ellipse {
                a,
                b,
                center,
                rotation,
            } => Shape::Ellipse(EllipseShape {
                a: *a,
                b: *b,
                center: *center,
                rotation: *rotation,
            }),
            DomainKind::Superellipse {
                a,
                b,
                p,
                center,
                rotation,
            } => Shape::Superellipse(SuperellipseShape {
                a: *a,
                b: *b,
                p: *p,
                center: *center,
                rotation: *rotation,
            }),
            DomainKind::Polygon { vertices, .. } => Shape::SmoothedPolygon(SmoothedPolygon::new(
                ConvexPolygon::new(vertices)?,
                self.anchor(),
            )?),
        })
    }

    pub fn build(&self) -> Result<Domain> {
        let shape = self.shape()?;
        let anchor = self.anchor();
        if shape.level(anchor).value >= 0.0 {
            return Err(Error::Geometry(format!(
                "anchor ({}, {}) is not inside the domain",
                anchor.x, anchor.y
            )));
        }
        let curve = BoundaryCurve::new(shape.clone())?;
        let defining = match &self.kind {
            DomainKind::Polygon { epsilon, .. } => {
                DefiningFunction::blended(BlendedDefining::build(curve.clone(), *epsilon, anchor)?)?
            }
            _ => DefiningFunction::analytic(shape)?,
        };
        Ok(Domain {
            descriptor: self.clone(),
            curve,
            defining,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&DomainBlock::from(self.clone())).expect("domain block serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let block: DomainBlock =
            toml::from_str(text).map_err(|e| Error::config("domain", e.message().to_string()))?;
        DomainDescriptor::try_from(block)
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be finite")))
    }
}

fn finite_point(name: &str, v: Vec2) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be finite")))
    }
}

/// Volume, diameter and sampled outward normals of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSummary {
    pub volume: f64,
    pub diameter: f64,
    /// Boundary points paired with the outward unit normal there.
    pub normals: Vec<(Vec2, Vec2)>,
}

/// A validated domain with its boundary curve and defining function.
#[derive(Debug, Clone)]
pub struct Domain {
    descriptor: DomainDescriptor,
    curve: BoundaryCurve,
    defining: DefiningFunction,
}

impl Domain {
    pub fn descriptor(&self) -> &DomainDescriptor {
        &self.descriptor
    }

    pub fn anchor(&self) -> Vec2 {
        self.descriptor.anchor()
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    pub fn defining_function(&self) -> &DefiningFunction {
        &self.defining
    }

    pub fn contains(&self, x: Vec2) -> bool {
        self.curve.level(x).value <= 0.0
    }

    /// Distance from an interior point to the boundary.
    pub fn distance_to_boundary(&self, x: Vec2) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::DomainExceeded(x));
        }
        Ok(self.curve.project(x)?.signed_distance.max(0.0))
    }

    /// The blended defining function of this domain with collar `epsilon`
    /// and minimum at `center`.
    pub fn blended_defining(&self, epsilon: Option<f64>, center: Vec2) -> Result<DefiningFunction> {
        DefiningFunction::blended(BlendedDefining::build(self.curve.clone(), epsilon, center)?)
    }

    pub fn summary(&self) -> Result<DomainSummary> {
        let (volume, diameter) = self.curve.area_and_diameter()?;
        let normals = self
            .curve
            .samples()
            .iter()
            .map(|&b| (b, self.curve.level(b).gradient.normalized()))
            .collect();
        Ok(DomainSummary {
            volume,
            diameter,
            normals,
        })
    }
}

/// Flat key/value form of a [`DomainDescriptor`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBlock {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<[f64; 2]>,
}

impl From<DomainDescriptor> for DomainBlock {
    fn from(d: DomainDescriptor) -> Self {
        let mut block = DomainBlock {
            anchor: d.anchor.map(Vec2::to_array),
            ..Default::default()
        };
        match d.kind {
            DomainKind::Ellipse {
                a,
                b,
                center,
                rotation,
            } => {
                block.kind = "ellipse".into();
                block.a = Some(a);
                block.b = Some(b);
                block.center = Some(center.to_array());
                block.rotation = Some(rotation);
            }
            DomainKind::Superellipse {
                a,
                b,
                p,
                center,
                rotation,
            } => {
                block.kind = "superellipse".into();
                block.a = Some(a);
                block.b = Some(b);
                block.p = Some(p);
                block.center = Some(center.to_array());
                block.rotation = Some(rotation);
            }
            DomainKind::Polygon { vertices, epsilon } => {
                block.kind = "polygon".into();
                block.vertices = Some(vertices.into_iter().map(Vec2::to_array).collect());
                block.epsilon = epsilon;
            }
        }
        block
    }
}

impl TryFrom<DomainBlock> for DomainDescriptor {
    type Error = Error;

    fn try_from(b: DomainBlock) -> Result<Self> {
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| {
                Error::config(name, format!("`{name}` is required for kind `{}`", b.kind))
            })
        };
        let forbid = |name: &str, present: bool| {
            if present {
                Err(Error::config(
                    name,
                    format!("`{name}` does not apply to kind `{}`", b.kind),
                ))
            } else {
                Ok(())
            }
        };
        let center = b.center.map(Vec2::from).unwrap_or(Vec2::ZERO);
        let rotation = b.rotation.unwrap_or(0.0);
        let kind = match b.kind.as_str() {
            "ellipse" | "disk" => {
                forbid("p", b.p.is_some())?;
                forbid("vertices", b.vertices.is_some())?;
                forbid("epsilon", b.epsilon.is_some())?;
                let a = need("a", b.a)?;
                DomainKind::Ellipse {
                    a,
                    b: if b.kind == "disk" { b.b.unwrap_or(a) } else { need("b", b.b)? },
                    center,
                    rotation,
                }
            }
            "superellipse" => {
                forbid("vertices", b.vertices.is_some())?;
                forbid("epsilon", b.epsilon.is_some())?;
                DomainKind::Superellipse {
                    a: need("a", b.a)?,
                    b: need("b", b.b)?,
                    p: need("p", b.p)?,
                    center,
                    rotation,
                }
            }
            "polygon" => {
                for (name, present) in [
                    ("a", b.a.is_some()),
                    ("b", b.b.is_some()),
                    ("p", b.p.is_some()),
                    ("rotation", b.rotation.is_some()),
                    ("center", b.center.is_some()),
                ] {
                    forbid(name, present)?;
                }
                let vertices = b
                    .vertices
                    .clone()
                    .ok_or_else(|| Error::config("vertices", "`vertices` is required for kind `polygon`"))?;
                DomainKind::Polygon {
                    vertices: vertices.into_iter().map(Vec2::from).collect(),
                    epsilon: b.epsilon,
                }
            }
            other => {
                return Err(Error::config(
                    "kind",
                    format!("unknown domain kind `{other}` (expected ellipse, disk, superellipse or polygon)"),
                ))
            }
        };
        let d = DomainDescriptor {
            kind,
            anchor: b.anchor.map(Vec2::from),
        };
        d.validate()
            .map_err(|e| Error::config("domain", e.to_string()))?;
        Ok(d)
    }
}
