use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    build_second_level, even_circle_layout, full_screen_layout, init_label_attrs,
    strict_orientation_layout, Label, LayoutParams, MultiCircleLayout,
};
use crate::error::LayoutError;
use crate::geometry::{Projection, ViewState};
use crate::scene::SceneObject;

/// Second-level layout condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Free visual search; no layout.
    Cc1,
    /// Every scene label on full-screen alphabetical rings, no letter step.
    Cc2,
    /// One alphabetical circle with even spacing.
    Ec1,
    /// Labels pinned at their anchor radian, pushed outward on collision.
    Ec2,
    /// Sorted and orientated multi-circle layout.
    Ec3,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Cc1, Method::Cc2, Method::Ec1, Method::Ec2, Method::Ec3];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cc1 => "cc1",
            Method::Cc2 => "cc2",
            Method::Ec1 => "ec1",
            Method::Ec2 => "ec2",
            Method::Ec3 => "ec3",
        }
    }

    /// Whether the letter ring precedes the second level.
    pub fn uses_first_level(self) -> bool {
        matches!(self, Method::Ec1 | Method::Ec2 | Method::Ec3)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownMethod(pub String);

impl fmt::Display for UnknownMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown method `{}` (expected cc1, cc2, ec1, ec2 or ec3)", self.0)
    }
}

impl std::error::Error for UnknownMethod {}

impl FromStr for Method {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownMethod(s.to_string()))
    }
}

/// Lays out `labels` around `view.gaze` with the given method. Every method
/// shares the same orientation attributes, so their layouts are directly
/// comparable.
pub fn layout_for(
    method: Method,
    labels: &[Label],
    objects: &[SceneObject],
    view: &ViewState,
    projection: &Projection,
    params: &LayoutParams,
) -> Result<MultiCircleLayout, LayoutError> {
    params.validate()?;
    if method == Method::Ec3 {
        return build_second_level(labels, objects, view, projection, params);
    }
    if method == Method::Cc1 {
        return Err(LayoutError::Unsupported("cc1"));
    }
    let scl = init_label_attrs(labels, objects, view, projection)?;
    Ok(match method {
        Method::Cc2 => full_screen_layout(scl, view.gaze, params),
        Method::Ec1 => even_circle_layout(scl, view.gaze, params),
        Method::Ec2 => strict_orientation_layout(scl, view.gaze, params),
        Method::Cc1 | Method::Ec3 => unreachable!(),
    })
}
