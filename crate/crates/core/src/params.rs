//! Mud constants, intruder geometry and the key/value parameter document.
//!
//! Everything is stored in SI. The parameter document carries an explicit
//! unit suffix on every dimensional key (`k_i_MPa_per_m`, `sigma_y_kPa`, ...)
//! and is converted on load, so reference tables can be transcribed as
//! printed. Both the SI and the MPa/kPa spellings of a key are accepted.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Unit system used when emitting parameter documents and tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    Si,
    /// MPa for stiffness, damping and bulk stiffness, kPa for yield stress.
    #[default]
    Paper,
}

impl FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "si" => Ok(Units::Si),
            "paper" => Ok(Units::Paper),
            other => Err(Error::InvalidInput(format!(
                "unknown unit system `{other}`"
            ))),
        }
    }
}

/// Drag scaling factor identified from sliding tests, shared by the presets.
pub const DEFAULT_LAMBDA_DRAG: f64 = 0.013;

/// Mud density shared by the presets, kg/m³.
pub const DEFAULT_RHO_M: f64 = 1840.0;

/// The model constants of one mud mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MudParameters {
    /// Intrusion stiffness, Pa/m.
    pub k_i: f64,
    /// Intrusion damping, Pa·s/m.
    pub b_i: f64,
    /// Withdrawal stiffness, Pa/m.
    pub k_w: f64,
    /// Withdrawal damping, Pa·s/m.
    pub b_w: f64,
    /// Bulk-spring stiffness, Pa.
    pub alpha: f64,
    /// Bulk-spring exponent, in (0, 1].
    pub beta: f64,
    /// Yield stress, Pa.
    pub sigma_y: f64,
    /// Necking filter damping ratio.
    pub zeta: f64,
    /// Necking filter natural frequency, rad/s.
    pub omega0: f64,
    /// Inertial drag scaling factor.
    pub lambda_drag: f64,
    /// Mud density, kg/m³.
    pub rho_m: f64,
    /// Volumetric water fraction. Informational only.
    pub water_content: f64,
}

impl MudParameters {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("k_i", self.k_i),
            ("b_i", self.b_i),
            ("k_w", self.k_w),
            ("b_w", self.b_w),
            ("alpha", self.alpha),
            ("sigma_y", self.sigma_y),
            ("zeta", self.zeta),
            ("omega0", self.omega0),
            ("rho_m", self.rho_m),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and > 0, got {v}"),
                });
            }
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                reason: format!("must lie in (0, 1], got {}", self.beta),
            });
        }
        if !(self.lambda_drag.is_finite() && self.lambda_drag >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda_drag",
                reason: format!("must be finite and >= 0, got {}", self.lambda_drag),
            });
        }
        if !self.water_content.is_finite() {
            return Err(Error::InvalidParameter {
                name: "water_content",
                reason: "not finite".into(),
            });
        }
        Ok(())
    }

    /// Stiffness and damping of the Maxwell element for `regime`.
    pub fn maxwell(&self, regime: crate::model::Regime) -> (f64, f64) {
        match regime {
            crate::model::Regime::Intrusion => (self.k_i, self.b_i),
            crate::model::Regime::Withdrawal => (self.k_w, self.b_w),
        }
    }

    pub fn get(&self, p: FitParam) -> f64 {
        match p {
            FitParam::KI => self.k_i,
            FitParam::BI => self.b_i,
            FitParam::KW => self.k_w,
            FitParam::BW => self.b_w,
            FitParam::Alpha => self.alpha,
            FitParam::Beta => self.beta,
            FitParam::SigmaY => self.sigma_y,
            FitParam::Zeta => self.zeta,
            FitParam::Omega0 => self.omega0,
        }
    }

    pub fn set(&mut self, p: FitParam, value: f64) {
        let slot = match p {
            FitParam::KI => &mut self.k_i,
            FitParam::BI => &mut self.b_i,
            FitParam::KW => &mut self.k_w,
            FitParam::BW => &mut self.b_w,
            FitParam::Alpha => &mut self.alpha,
            FitParam::Beta => &mut self.beta,
            FitParam::SigmaY => &mut self.sigma_y,
            FitParam::Zeta => &mut self.zeta,
            FitParam::Omega0 => &mut self.omega0,
        };
        *slot = value;
    }

    /// The nine fitted constants in [`FitParam::ALL`] order.
    pub fn fitted_vector(&self) -> [f64; 9] {
        FitParam::ALL.map(|p| self.get(p))
    }

    pub fn with_fitted_vector(mut self, values: &[f64; 9]) -> Self {
        for (p, v) in FitParam::ALL.iter().zip(values) {
            self.set(*p, *v);
        }
        self
    }
}

/// The nine constants identified from intrusion trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitParam {
    KI,
    BI,
    KW,
    BW,
    Alpha,
    Beta,
    SigmaY,
    Zeta,
    Omega0,
}

impl FitParam {
    pub const ALL: [FitParam; 9] = [
        FitParam::KI,
        FitParam::BI,
        FitParam::KW,
        FitParam::BW,
        FitParam::Alpha,
        FitParam::Beta,
        FitParam::SigmaY,
        FitParam::Zeta,
        FitParam::Omega0,
    ];

    pub fn name(self) -> &'static str {
        self.field().name
    }

    fn field(self) -> &'static Field {
        &FIELDS[self as usize]
    }

    /// Document key in the given unit system.
    pub fn key(self, units: Units) -> &'static str {
        self.field().key(units)
    }

    /// Multiplier from the given unit system to SI.
    pub fn scale(self, units: Units) -> f64 {
        self.field().scale(units)
    }

    /// Converts an SI value to `units`, dropping the last-digit noise the
    /// division leaves, so 1.21e6 Pa/m reads back as 1.21 MPa/m.
    pub fn from_si(self, value: f64, units: Units) -> f64 {
        to_units(value, self.scale(units))
    }
}

impl fmt::Display for FitParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FitParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FitParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown parameter `{s}`")))
    }
}

/// Cuboid intruder. Only the bottom face carries load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntruderGeometry {
    pub length: f64,
    pub width: f64,
    pub height: f64,
    /// Characteristic width normalizing depth in the bulk spring, m.
    pub h_char: f64,
}

impl Default for IntruderGeometry {
    /// 51 × 38 × 25 mm cuboid with the 38 mm side as characteristic width.
    fn default() -> Self {
        Self {
            length: 0.051,
            width: 0.038,
            height: 0.025,
            h_char: 0.038,
        }
    }
}

impl IntruderGeometry {
    pub fn new(length: f64, width: f64, height: f64, h_char: f64) -> Result<Self> {
        let g = Self {
            length,
            width,
            height,
            h_char,
        };
        g.validate()?;
        Ok(g)
    }

    /// Contact area of the bottom face, m².
    pub fn contact_area(&self) -> f64 {
        self.length * self.width
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("length", self.length),
            ("width", self.width),
            ("height", self.height),
            ("H", self.h_char),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("geometry must be finite and > 0, got {v}"),
                });
            }
        }
        Ok(())
    }
}

struct Field {
    name: &'static str,
    si_key: &'static str,
    paper_key: &'static str,
    paper_scale: f64,
    /// Decimals used when printing the paper-unit table.
    table_decimals: usize,
}

impl Field {
    fn key(&self, units: Units) -> &'static str {
        match units {
            Units::Si => self.si_key,
            Units::Paper => self.paper_key,
        }
    }

    fn scale(&self, units: Units) -> f64 {
        match units {
            Units::Si => 1.0,
            Units::Paper => self.paper_scale,
        }
    }
}

// First nine entries are indexed by `FitParam as usize`.
const FIELDS: [Field; 12] = [
    Field {
        name: "k_i",
        si_key: "k_i_Pa_per_m",
        paper_key: "k_i_MPa_per_m",
        paper_scale: 1e6,
        table_decimals: 2,
    },
    Field {
        name: "b_i",
        si_key: "b_i_Pa_s_per_m",
        paper_key: "b_i_MPa_s_per_m",
        paper_scale: 1e6,
        table_decimals: 2,
    },
    Field {
        name: "k_w",
        si_key: "k_w_Pa_per_m",
        paper_key: "k_w_MPa_per_m",
        paper_scale: 1e6,
        table_decimals: 2,
    },
    Field {
        name: "b_w",
        si_key: "b_w_Pa_s_per_m",
        paper_key: "b_w_MPa_s_per_m",
        paper_scale: 1e6,
        table_decimals: 2,
    },
    Field {
        name: "alpha",
        si_key: "alpha_Pa",
        paper_key: "alpha_MPa",
        paper_scale: 1e6,
        table_decimals: 2,
    },
    Field {
        name: "beta",
        si_key: "beta",
        paper_key: "beta",
        paper_scale: 1.0,
        table_decimals: 2,
    },
    Field {
        name: "sigma_y",
        si_key: "sigma_y_Pa",
        paper_key: "sigma_y_kPa",
        paper_scale: 1e3,
        table_decimals: 0,
    },
    Field {
        name: "zeta",
        si_key: "zeta",
        paper_key: "zeta",
        paper_scale: 1.0,
        table_decimals: 2,
    },
    Field {
        name: "omega0",
        si_key: "omega0_rad_per_s",
        paper_key: "omega0_rad_per_s",
        paper_scale: 1.0,
        table_decimals: 2,
    },
    Field {
        name: "lambda_drag",
        si_key: "lambda_drag",
        paper_key: "lambda_drag",
        paper_scale: 1.0,
        table_decimals: 3,
    },
    Field {
        name: "rho_m",
        si_key: "rho_m_kg_per_m3",
        paper_key: "rho_m_kg_per_m3",
        paper_scale: 1.0,
        table_decimals: 0,
    },
    Field {
        name: "water_content",
        si_key: "water_content",
        paper_key: "water_content",
        paper_scale: 1.0,
        table_decimals: 2,
    },
];

const GEOMETRY_KEYS: [&str; 4] = ["length_m", "width_m", "height_m", "H_m"];

/// Keys that may appear in a parameter document but are not model constants.
const PASSIVE_KEYS: [&str; 4] = ["name", "reported_rmse_N", "geometry", "fit_report"];

/// A parsed parameter document.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    pub name: Option<String>,
    pub params: MudParameters,
    pub geometry: IntruderGeometry,
    /// RMSE reported alongside a reference parameter row, N.
    pub reported_rmse: Option<f64>,
}

impl ParameterSet {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidInput("parameter document must be an object".into()))?;

        for key in obj.keys() {
            let known = PASSIVE_KEYS.contains(&key.as_str())
                || FIELDS.iter().any(|f| f.si_key == key || f.paper_key == key);
            if !known {
                return Err(Error::InvalidInput(format!(
                    "unknown parameter key `{key}`"
                )));
            }
        }

        let mut values = [0.0; 12];
        for (slot, field) in values.iter_mut().zip(FIELDS.iter()) {
            *slot = read_field(obj, field)?;
        }
        let params = MudParameters {
            k_i: values[0],
            b_i: values[1],
            k_w: values[2],
            b_w: values[3],
            alpha: values[4],
            beta: values[5],
            sigma_y: values[6],
            zeta: values[7],
            omega0: values[8],
            lambda_drag: values[9],
            rho_m: values[10],
            water_content: values[11],
        };
        params.validate()?;

        let geometry = match obj.get("geometry") {
            None => IntruderGeometry::default(),
            Some(g) => {
                let g = g
                    .as_object()
                    .ok_or_else(|| Error::InvalidInput("`geometry` must be an object".into()))?;
                let mut dims = [0.0; 4];
                for (slot, key) in dims.iter_mut().zip(GEOMETRY_KEYS) {
                    *slot = g.get(key).and_then(Value::as_f64).ok_or_else(|| {
                        Error::InvalidInput(format!("geometry is missing numeric `{key}`"))
                    })?;
                }
                IntruderGeometry::new(dims[0], dims[1], dims[2], dims[3])?
            }
        };

        let name = obj.get("name").and_then(Value::as_str).map(str::to_owned);
        let reported_rmse = obj.get("reported_rmse_N").and_then(Value::as_f64);
        Ok(Self {
            name,
            params,
            geometry,
            reported_rmse,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Document object with keys in the requested unit system.
    pub fn to_json(&self, units: Units) -> Map<String, Value> {
        let mut obj = Map::new();
        if let Some(name) = &self.name {
            obj.insert("name".into(), Value::from(name.as_str()));
        }
        let p = &self.params;
        let si = [
            p.water_content,
            p.k_i,
            p.b_i,
            p.k_w,
            p.b_w,
            p.alpha,
            p.beta,
            p.sigma_y,
            p.zeta,
            p.omega0,
            p.lambda_drag,
            p.rho_m,
        ];
        let order = [11, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10];
        for (value, idx) in si.iter().zip(order) {
            let field = &FIELDS[idx];
            obj.insert(
                field.key(units).into(),
                json_number(to_units(*value, field.scale(units))),
            );
        }
        if let Some(rmse) = self.reported_rmse {
            obj.insert("reported_rmse_N".into(), json_number(rmse));
        }
        let g = &self.geometry;
        let mut geo = Map::new();
        for (key, v) in GEOMETRY_KEYS
            .iter()
            .zip([g.length, g.width, g.height, g.h_char])
        {
            geo.insert((*key).into(), json_number(v));
        }
        obj.insert("geometry".into(), Value::Object(geo));
        obj
    }

    pub fn to_json_string(&self, units: Units) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.to_json(units)))
            .expect("parameter map serializes");
        s.push('\n');
        s
    }
}

fn read_field(obj: &Map<String, Value>, field: &Field) -> Result<f64> {
    let si = obj.get(field.si_key);
    let paper = if field.paper_key != field.si_key {
        obj.get(field.paper_key)
    } else {
        None
    };
    let (value, scale, key) = match (si, paper) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidInput(format!(
                "`{}` given in both SI and paper units",
                field.name
            )))
        }
        (Some(v), None) => (v, 1.0, field.si_key),
        (None, Some(v)) => (v, field.paper_scale, field.paper_key),
        (None, None) => {
            return Err(Error::InvalidInput(format!(
                "missing `{}` (or `{}`)",
                field.paper_key, field.si_key
            )))
        }
    };
    let v = value
        .as_f64()
        .ok_or_else(|| Error::InvalidInput(format!("`{key}` must be a number")))?;
    Ok(v * scale)
}

/// Converts an SI value into a unit system whose scale to SI is `scale`,
/// rounding away the last-bit noise the round trip through 1e6 introduces.
fn to_units(si: f64, scale: f64) -> f64 {
    if scale == 1.0 {
        return si;
    }
    let v = si / scale;
    format!("{v:.14e}").parse().unwrap_or(v)
}

fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

const PRESET_SOURCES: [(&str, &str); 5] = [
    ("W15", include_str!("../presets/w15.json")),
    ("W20", include_str!("../presets/w20.json")),
    ("W25", include_str!("../presets/w25.json")),
    ("W30", include_str!("../presets/w30.json")),
    ("W35", include_str!("../presets/w35.json")),
];

/// Names of the shipped presets, one per reference water content.
pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESET_SOURCES.iter().map(|(n, _)| *n)
}

/// Raw JSON text of a shipped preset.
pub fn preset_source(name: &str) -> Option<&'static str> {
    let wanted = name.to_ascii_uppercase();
    PRESET_SOURCES
        .iter()
        .find(|(n, _)| *n == wanted)
        .map(|(_, s)| *s)
}

pub fn preset(name: &str) -> Result<ParameterSet> {
    let src = preset_source(name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown preset `{name}`")))?;
    ParameterSet::from_json_str(src)
}

pub fn presets() -> Vec<ParameterSet> {
    preset_names()
        .map(|n| preset(n).expect("shipped presets are valid"))
        .collect()
}

/// Column headers of the reference parameter table.
pub const TABLE_HEADER: [&str; 11] = [
    "W",
    "k_i [MPa/m]",
    "b_i [MPa/(m/s)]",
    "k_w [MPa/m]",
    "b_w [MPa/(m/s)]",
    "alpha [MPa]",
    "beta",
    "sigma_y [kPa]",
    "zeta",
    "omega0",
    "RMSE [N]",
];

/// One row of the reference parameter table, formatted in paper units.
pub fn table_row(set: &ParameterSet) -> Vec<String> {
    let mut row = Vec::with_capacity(TABLE_HEADER.len());
    row.push(format!("{}%", (set.params.water_content * 100.0).round()));
    for p in FitParam::ALL {
        let field = p.field();
        let v = set.params.get(p) / field.paper_scale;
        row.push(format!("{:.*}", field.table_decimals, v));
    }
    row.push(match set.reported_rmse {
        Some(r) => format!("{r:.2}"),
        None => "-".into(),
    });
    row
}
