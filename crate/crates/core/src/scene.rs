//! Scene objects and the scene file format.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, SimError};
use crate::geometry::{ScreenVec, Vec3, ViewState};

pub const SCENE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub u32);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: ObjectId,
    pub name: String,
    pub position: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spawn {
    pub viewpoint: Vec3,
    pub view_dir: Vec3,
    pub up: Vec3,
}

impl Spawn {
    pub fn view(&self) -> Result<ViewState, GeometryError> {
        ViewState::new(self.viewpoint, self.view_dir, self.up, ScreenVec::ZERO)
    }
}

impl Default for Spawn {
    fn default() -> Self {
        Self {
            viewpoint: Vec3::ZERO,
            view_dir: -Vec3::Z,
            up: Vec3::Y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    #[serde(default = "scene_version")]
    pub v: u32,
    pub objects: Vec<SceneObject>,
    pub spawn: Spawn,
}

fn scene_version() -> u32 {
    SCENE_FORMAT_VERSION
}

impl Scene {
    pub fn new(objects: Vec<SceneObject>, spawn: Spawn) -> Result<Self, SimError> {
        let scene = Self {
            v: SCENE_FORMAT_VERSION,
            objects,
            spawn,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.objects.is_empty() {
            return Err(SimError::EmptyScene);
        }
        let mut seen = BTreeMap::new();
        for o in &self.objects {
            if o.name.trim().is_empty() {
                return Err(SimError::InvalidConfig(format!("object {} has an empty name", o.id)));
            }
            if !o.position.is_finite() {
                return Err(SimError::InvalidConfig(format!("object {} has a non-finite position", o.id)));
            }
            if seen.insert(o.id, ()).is_some() {
                return Err(SimError::InvalidConfig(format!("duplicate object id {}", o.id)));
            }
        }
        self.spawn.view()?;
        Ok(())
    }

    pub fn object(&self, id: ObjectId) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let scene: Scene = serde_json::from_str(text)?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }
}
