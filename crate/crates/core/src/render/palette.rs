use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    const fn hex(v: u32) -> Rgb {
        Rgb((v >> 16) as u8, (v >> 8) as u8, v as u8)
    }

    fn lerp(self, other: Rgb, t: f64) -> Rgb {
        let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
        Rgb(
            mix(self.0, other.0),
            mix(self.1, other.1),
            mix(self.2, other.2),
        )
    }

    /// Relative luminance in [0, 1], used to pick a readable text colour.
    pub fn luminance(self) -> f64 {
        (0.2126 * self.0 as f64 + 0.7152 * self.1 as f64 + 0.0722 * self.2 as f64) / 255.0
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

/// Piecewise-linear ramp through evenly spaced stops.
fn ramp(stops: &[Rgb], t: f64) -> Rgb {
    let t = t.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let i = (t.floor() as usize).min(stops.len() - 2);
    stops[i].lerp(stops[i + 1], t - i as f64)
}

/// Sequential single-hue palettes, light to dark.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Palette {
    #[default]
    Blues,
    Greens,
    Greys,
    Oranges,
    Purples,
    Reds,
}

impl Palette {
    pub const ALL: [Palette; 6] = [
        Palette::Blues,
        Palette::Greens,
        Palette::Greys,
        Palette::Oranges,
        Palette::Purples,
        Palette::Reds,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Palette::Blues => "blues",
            Palette::Greens => "greens",
            Palette::Greys => "greys",
            Palette::Oranges => "oranges",
            Palette::Purples => "purples",
            Palette::Reds => "reds",
        }
    }

    pub fn stops(self) -> [Rgb; 5] {
        let h = Rgb::hex;
        match self {
            Palette::Blues => [
                h(0xeff3ff),
                h(0xbdd7e7),
                h(0x6baed6),
                h(0x3182bd),
                h(0x08519c),
            ],
            Palette::Greens => [
                h(0xedf8e9),
                h(0xbae4b3),
                h(0x74c476),
                h(0x31a354),
                h(0x006d2c),
            ],
            Palette::Greys => [
                h(0xf7f7f7),
                h(0xcccccc),
                h(0x969696),
                h(0x636363),
                h(0x252525),
            ],
            Palette::Oranges => [
                h(0xfeedde),
                h(0xfdbe85),
                h(0xfd8d3c),
                h(0xe6550d),
                h(0xa63603),
            ],
            Palette::Purples => [
                h(0xf2f0f7),
                h(0xcbc9e2),
                h(0x9e9ac8),
                h(0x756bb1),
                h(0x54278f),
            ],
            Palette::Reds => [
                h(0xfee5d9),
                h(0xfcae91),
                h(0xfb6a4a),
                h(0xde2d26),
                h(0xa50f15),
            ],
        }
    }

    /// Fill for class `class` of `classes`; higher classes are darker and a
    /// lone class takes the darkest shade.
    pub fn shade(self, class: usize, classes: usize) -> Rgb {
        let t = if classes <= 1 {
            1.0
        } else {
            class as f64 / (classes - 1) as f64
        };
        ramp(&self.stops(), t)
    }
}

impl FromStr for Palette {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Palette::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Palette::ALL.iter().map(|p| p.as_str()).collect();
                Error::Config(format!(
                    "unknown palette `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

/// Three-anchor diverging ramp over [-1, 1] with the midpoint at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivergingPalette {
    pub negative: Rgb,
    pub zero: Rgb,
    pub positive: Rgb,
}

impl Default for DivergingPalette {
    fn default() -> Self {
        DivergingPalette {
            negative: Rgb::hex(0x2166ac),
            zero: Rgb::hex(0xf7f7f7),
            positive: Rgb::hex(0xb2182b),
        }
    }
}

impl DivergingPalette {
    pub fn color(&self, r: f64) -> Rgb {
        let r = r.clamp(-1.0, 1.0);
        if r < 0.0 {
            self.zero.lerp(self.negative, -r)
        } else {
            self.zero.lerp(self.positive, r)
        }
    }
}
