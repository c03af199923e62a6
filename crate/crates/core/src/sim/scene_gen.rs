use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::geometry::Vec3;
use crate::scene::{ObjectId, Scene, SceneObject, Spawn};

const WORDS: &str = include_str!("words.txt");

/// The bundled object names.
pub fn word_list() -> Vec<&'static str> {
    WORDS.split_whitespace().collect()
}

/// Object placement style.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Regular lattice on a curved wall in front of the viewer.
    #[default]
    Grid,
    /// Random positions on a band all around the viewer.
    Scatter,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Grid => "grid",
            Preset::Scatter => "scatter",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "grid" => Ok(Preset::Grid),
            "scatter" => Ok(Preset::Scatter),
            _ => Err(SimError::InvalidConfig(format!("unknown preset `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub seed: u64,
    pub n_objects: usize,
    pub preset: Preset,
    /// 0 draws initials uniformly; values toward 1 concentrate them on a few
    /// letters (geometric weights `(1 - skew)^k` over a seeded letter order).
    pub skew: f64,
}

impl SceneSpec {
    pub fn new(seed: u64, n_objects: usize, preset: Preset) -> Self {
        Self {
            seed,
            n_objects,
            preset,
            skew: 0.0,
        }
    }
}

const GRID_DISTANCE: f64 = 3.0;
const GRID_AZIMUTH: f64 = 70.0;
const GRID_ELEVATION: f64 = 25.0;
const BAND_ELEVATION: f64 = 0.4;
const BAND_DISTANCE: (f64, f64) = (2.5, 4.5);

/// Unit direction for an azimuth (clockwise from straight ahead, toward +x)
/// and elevation, with the default spawn looking down -z.
fn bearing(azimuth: f64, elevation: f64) -> Vec3 {
    Vec3::new(
        azimuth.sin() * elevation.cos(),
        elevation.sin(),
        -azimuth.cos() * elevation.cos(),
    )
}

fn grid_positions(n: usize) -> Vec<Vec3> {
    let cols = ((2.0 * n as f64).sqrt().ceil() as usize).max(1);
    let rows = n.div_ceil(cols);
    (0..n)
        .map(|i| {
            let (r, c) = (i / cols, i % cols);
            let az = (-GRID_AZIMUTH + 2.0 * GRID_AZIMUTH * (c as f64 + 0.5) / cols as f64).to_radians();
            let el = (GRID_ELEVATION - 2.0 * GRID_ELEVATION * (r as f64 + 0.5) / rows as f64).to_radians();
            bearing(az, el) * GRID_DISTANCE
        })
        .collect()
}

fn scatter_positions(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            let az = rng.random_range(-PI..PI);
            let el = rng.random_range(-BAND_ELEVATION..BAND_ELEVATION);
            let d = rng.random_range(BAND_DISTANCE.0..BAND_DISTANCE.1);
            bearing(az, el) * d
        })
        .collect()
}

fn names(n: usize, skew: f64, rng: &mut ChaCha8Rng) -> Result<Vec<String>, SimError> {
    let mut buckets: BTreeMap<char, Vec<&str>> = BTreeMap::new();
    for w in word_list() {
        buckets.entry(w.chars().next().expect("non-empty")).or_default().push(w);
    }
    let mut letters: Vec<char> = buckets.keys().copied().collect();
    letters.shuffle(rng);
    let weights: Vec<f64> = (0..letters.len()).map(|k| (1.0 - skew).powi(k as i32)).collect();
    let pick = WeightedIndex::new(&weights)
        .map_err(|e| SimError::InvalidConfig(format!("initial weights: {e}")))?;

    let mut queues: BTreeMap<char, VecDeque<&str>> = BTreeMap::new();
    (0..n)
        .map(|_| {
            let letter = letters[pick.sample(rng)];
            let q = queues.entry(letter).or_default();
            if q.is_empty() {
                // Names repeat once a letter's words are used up.
                let mut words = buckets[&letter].clone();
                words.shuffle(rng);
                q.extend(words);
            }
            Ok(q.pop_front().expect("refilled").to_string())
        })
        .collect()
}

/// Deterministic scene for `spec`. A single object sits on the view axis.
pub fn generate_scene(spec: &SceneSpec) -> Result<Scene, SimError> {
    if spec.n_objects == 0 {
        return Err(SimError::EmptyScene);
    }
    if !(0.0..1.0).contains(&spec.skew) {
        return Err(SimError::InvalidConfig(format!(
            "skew must be in [0, 1), got {}",
            spec.skew
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let positions = if spec.n_objects == 1 {
        vec![Vec3::new(0.0, 0.0, -GRID_DISTANCE)]
    } else {
        match spec.preset {
            Preset::Grid => grid_positions(spec.n_objects),
            Preset::Scatter => scatter_positions(spec.n_objects, &mut rng),
        }
    };
    let names = names(spec.n_objects, spec.skew, &mut rng)?;
    let objects = positions
        .into_iter()
        .zip(names)
        .enumerate()
        .map(|(i, (position, name))| SceneObject {
            id: ObjectId(i as u32),
            name,
            position,
        })
        .collect();
    Scene::new(objects, Spawn::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn bundled_list_has_500_unique_words() {
        let w = word_list();
        assert_eq!(w.len(), 500);
        assert_eq!(w.iter().collect::<BTreeSet<_>>().len(), 500);
        assert!(w.iter().all(|s| s.chars().all(|c| c.is_ascii_lowercase())));
    }

    #[test]
    fn single_object_on_view_axis() {
        for preset in [Preset::Grid, Preset::Scatter] {
            let s = generate_scene(&SceneSpec::new(0, 1, preset)).unwrap();
            let p = s.objects[0].position;
            assert_eq!((p.x, p.y), (0.0, 0.0));
            assert!(p.z < 0.0);
        }
    }

    #[test]
    fn same_seed_same_scene() {
        let spec = SceneSpec::new(11, 40, Preset::Scatter);
        assert_eq!(generate_scene(&spec).unwrap(), generate_scene(&spec).unwrap());
        let other = SceneSpec { seed: 12, ..spec };
        assert_ne!(generate_scene(&spec).unwrap(), generate_scene(&other).unwrap());
    }

    #[test]
    fn grid_is_in_front() {
        let s = generate_scene(&SceneSpec::new(5, 90, Preset::Grid)).unwrap();
        let ids: BTreeSet<ObjectId> = s.objects.iter().map(|o| o.id).collect();
        assert_eq!(ids.len(), 90);
        let view = s.spawn.view().unwrap();
        for o in &s.objects {
            assert!((o.position - view.viewpoint).dot(view.view_dir) > 0.0, "{o:?}");
        }
    }

    #[test]
    fn scatter_surrounds_viewer() {
        let s = generate_scene(&SceneSpec::new(2, 200, Preset::Scatter)).unwrap();
        assert!(s.objects.iter().any(|o| o.position.z > 0.0));
        assert!(s.objects.iter().any(|o| o.position.z < 0.0));
    }

    #[test]
    fn skew_concentrates_initials() {
        let initials = |skew: f64| -> usize {
            let spec = SceneSpec {
                skew,
                ..SceneSpec::new(3, 100, Preset::Grid)
            };
            let s = generate_scene(&spec).unwrap();
            s.objects
                .iter()
                .map(|o| o.name.chars().next().unwrap())
                .collect::<BTreeSet<_>>()
                .len()
        };
        assert!(initials(0.0) > 15);
        assert!(initials(0.8) < 6);
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            generate_scene(&SceneSpec::new(0, 0, Preset::Grid)),
            Err(SimError::EmptyScene)
        ));
        let bad = SceneSpec {
            skew: 1.0,
            ..SceneSpec::new(0, 3, Preset::Grid)
        };
        assert!(generate_scene(&bad).is_err());
        assert_eq!("Scatter".parse::<Preset>().unwrap(), Preset::Scatter);
    }
}
