//! Generator configuration: one TOML document with defaults for every field,
//! validation with key paths, and named ablation presets.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::materials::{MaterialConfig, TextureMode};
use crate::render::RenderSettings;
use crate::scene::{
    ArrangementConfig, DisplacementConfig, LightConfig, RigParams, RoomBoxConfig, ScatterConfig,
    ShapeConfig, SmallPlacement, SmallSize,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed configuration at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("invalid configuration value at `{path}`: {message}")]
    Invalid { path: String, message: String },
    #[error("could not serialize configuration: {0}")]
    Serialize(#[from] toml::ser::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImageConfig {
    pub width: u32,
    pub height: u32,
}

impl Default for ImageConfig {
    fn default() -> Self {
        Self {
            width: 640,
            height: 480,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n_scenes: usize,
    pub image: ImageConfig,
    pub render: RenderSettings,
    pub shapes: ShapeConfig,
    pub displacement: DisplacementConfig,
    pub materials: MaterialConfig,
    pub rig: RigParams,
    pub arrangement: ArrangementConfig,
    pub room_box: RoomBoxConfig,
    pub ground_scatter: ScatterConfig,
    pub lights: LightConfig,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_scenes: 1,
            image: ImageConfig::default(),
            render: RenderSettings::default(),
            shapes: ShapeConfig::default(),
            displacement: DisplacementConfig::default(),
            materials: MaterialConfig::default(),
            rig: RigParams::default(),
            arrangement: ArrangementConfig::default(),
            room_box: RoomBoxConfig::default(),
            ground_scatter: ScatterConfig::default(),
            lights: LightConfig::default(),
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn at(path: &'static str) -> impl Fn(String) -> ConfigError {
            move |message| ConfigError::Invalid {
                path: path.to_string(),
                message,
            }
        }
        let ImageConfig { width, height } = self.image;
        if width == 0 || height == 0 || width as u64 * 3 != height as u64 * 4 {
            return Err(at("image")(format!(
                "{width}x{height} must be non-empty with a 4:3 width to height ratio"
            )));
        }
        self.render.validate().map_err(at("render"))?;
        self.shapes.validate().map_err(at("shapes"))?;
        self.displacement.validate().map_err(at("displacement"))?;
        self.materials.validate().map_err(at("materials"))?;
        self.rig.validate().map_err(at("rig"))?;
        self.arrangement.validate().map_err(at("arrangement"))?;
        self.room_box.validate().map_err(at("room_box"))?;
        self.ground_scatter
            .validate()
            .map_err(at("ground_scatter"))?;
        self.lights.validate().map_err(at("lights"))?;
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string(self)?)
    }

    /// Hex SHA-256 of the canonical TOML serialization.
    pub fn hash(&self) -> String {
        let text = toml::to_string(self).expect("configuration always serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Parses and validates a TOML document; absent fields take their defaults.
pub fn parse_config(document: &str) -> Result<GeneratorConfig, ConfigError> {
    let de = toml::Deserializer::parse(document).map_err(|e| ConfigError::Parse {
        path: String::new(),
        message: e.message().to_string(),
    })?;
    let config: GeneratorConfig =
        serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
            path: e.path().to_string(),
            message: e.inner().message().to_string(),
        })?;
    config.validate()?;
    Ok(config)
}

/// One row label of the generator's ablation study, as a configuration edit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ablation {
    DisplacementNo,
    DisplacementYes,
    MaterialsUniform,
    MaterialsNoise,
    MaterialsNoiseBoolean,
    LargeObjects(usize),
    SmallNone,
    SmallUniform,
    SmallClustered,
    SmallMixed,
    SmallCountSize(usize, SmallSize),
    RoomBoxWithout,
    RoomBoxWith,
    ScatterWithout,
    ScatterWith,
    /// Light count drawn from a closed range.
    LightsRange(usize, usize),
    LightsFixed(usize),
    CameraConstantFov(f64),
    CameraFixedDistance,
    CameraAzimuthSpan(f64),
    CameraDefault,
}

impl Ablation {
    /// Every row of both ablation tables except the primitive shape rows.
    pub fn all() -> Vec<Ablation> {
        use Ablation::*;
        vec![
            DisplacementNo,
            DisplacementYes,
            MaterialsUniform,
            MaterialsNoise,
            MaterialsNoiseBoolean,
            LargeObjects(1),
            LargeObjects(2),
            LargeObjects(8),
            SmallNone,
            SmallUniform,
            SmallClustered,
            SmallMixed,
            SmallCountSize(160, SmallSize::Smaller),
            SmallCountSize(160, SmallSize::Larger),
            SmallCountSize(320, SmallSize::Smaller),
            SmallCountSize(320, SmallSize::Larger),
            RoomBoxWithout,
            RoomBoxWith,
            ScatterWithout,
            ScatterWith,
            LightsRange(5, 10),
            LightsRange(5, 20),
            LightsRange(5, 40),
            LightsRange(5, 80),
            LightsFixed(40),
            LightsFixed(80),
            CameraConstantFov(35.0),
            CameraConstantFov(50.0),
            CameraConstantFov(65.0),
            CameraFixedDistance,
            CameraAzimuthSpan(90.0),
            CameraAzimuthSpan(22.5),
            CameraDefault,
        ]
    }

    pub fn label(&self) -> String {
        match *self {
            Ablation::DisplacementNo => "Displacement: No".into(),
            Ablation::DisplacementYes => "Displacement: Yes".into(),
            Ablation::MaterialsUniform => "Materials: Uniform Color".into(),
            Ablation::MaterialsNoise => "Materials: w/ Noise Texture".into(),
            Ablation::MaterialsNoiseBoolean => "Materials: w/ Noise Texture + Boolean".into(),
            Ablation::LargeObjects(n) => format!("Number of Large Objects: {n}"),
            Ablation::SmallNone => "Small Objects: None".into(),
            Ablation::SmallUniform => "Small Objects: Uniform Placement".into(),
            Ablation::SmallClustered => "Small Objects: Clustered Placement".into(),
            Ablation::SmallMixed => "Small Objects: 50-50 Clustered and Uniform".into(),
            Ablation::SmallCountSize(n, size) => format!("Small Objects: {n}; {size:?}"),
            Ablation::RoomBoxWithout => "Room Box: w/o".into(),
            Ablation::RoomBoxWith => "Room Box: w/".into(),
            Ablation::ScatterWithout => "Scattered Tiny Objects: w/o".into(),
            Ablation::ScatterWith => "Scattered Tiny Objects: w/".into(),
            Ablation::LightsRange(lo, hi) => format!("Number of Lights: {lo} - {hi}"),
            Ablation::LightsFixed(n) => format!("Number of Lights: {n}"),
            Ablation::CameraConstantFov(f) => format!("Camera: Constant FoV {f}"),
            Ablation::CameraFixedDistance => "Camera: w/o Distance Change".into(),
            Ablation::CameraAzimuthSpan(a) => format!("Camera: Azimuth Span {a}"),
            Ablation::CameraDefault => "Camera: Default".into(),
        }
    }

    /// Applies the edit on top of `config`; untouched fields keep their values.
    pub fn apply(&self, config: &mut GeneratorConfig) {
        let defaults = GeneratorConfig::default();
        match *self {
            Ablation::DisplacementNo => config.displacement.enabled = false,
            Ablation::DisplacementYes => config.displacement.enabled = true,
            Ablation::MaterialsUniform => config.materials.texture_mode = TextureMode::Uniform,
            Ablation::MaterialsNoise => config.materials.texture_mode = TextureMode::Noise,
            Ablation::MaterialsNoiseBoolean => {
                config.materials.texture_mode = TextureMode::NoiseBoolean
            }
            Ablation::LargeObjects(n) => config.arrangement.n_large = n,
            Ablation::SmallNone => config.arrangement.small_placement = SmallPlacement::None,
            Ablation::SmallUniform => config.arrangement.small_placement = SmallPlacement::Uniform,
            Ablation::SmallClustered => {
                config.arrangement.small_placement = SmallPlacement::Clustered
            }
            Ablation::SmallMixed => config.arrangement.small_placement = SmallPlacement::Mixed,
            Ablation::SmallCountSize(n, size) => {
                config.arrangement.n_small = n;
                config.arrangement.small_size = size;
            }
            Ablation::RoomBoxWithout => config.room_box.probability = 0.0,
            Ablation::RoomBoxWith => config.room_box.probability = defaults.room_box.probability,
            Ablation::ScatterWithout => config.ground_scatter.probability = 0.0,
            Ablation::ScatterWith => {
                config.ground_scatter.probability = defaults.ground_scatter.probability
            }
            Ablation::LightsRange(lo, hi) => config.lights.count = (lo, hi),
            Ablation::LightsFixed(n) => config.lights.count = (n, n),
            Ablation::CameraConstantFov(f) => config.rig.fov_deg = (f, f),
            Ablation::CameraFixedDistance => {
                let (lo, hi) = defaults.rig.radius;
                let mid = 0.5 * (lo + hi);
                config.rig.radius = (mid, mid);
            }
            Ablation::CameraAzimuthSpan(a) => config.rig.azimuth_span_deg = a,
            Ablation::CameraDefault => config.rig = defaults.rig,
        }
    }

    pub fn config(&self) -> GeneratorConfig {
        let mut c = GeneratorConfig::default();
        self.apply(&mut c);
        c
    }
}
