//! Classes a per-zip variable into quantile bins and writes the map as
//! GeoJSON and SVG.
//!
//!     cargo run --example choropleth -- [out_dir]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use innodex::geo::geojson::{load_zones, DEFAULT_ZIP_PROPERTY};
use innodex::render::{Choropleth, MapOptions, Palette};
use innodex::Error;

fn main() -> innodex::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let zones = load_zones(
        &Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/boston_synth/zones.geojson"),
        DEFAULT_ZIP_PROPERTY,
    )?;

    // area in km2 as the mapped value, with two zones left without data
    let mut values: BTreeMap<String, Option<f64>> = zones
        .zones()
        .iter()
        .map(|z| (z.zip_id().to_string(), Some(z.area_km2())))
        .collect();
    for zip in ["02108", "02215"] {
        values.insert(zip.to_string(), None);
    }

    let map = Choropleth::new(&zones, "area_km2", &values, 5)?;
    println!(
        "{} classes, breakpoints {:?}",
        map.class_count(),
        map.breakpoints()
    );
    for zip in ["02116", "02199", "02128", "02108"] {
        println!(
            "  {zip}: value {:?} class {:?}",
            map.value(zip),
            map.class_of(zip)
        );
    }

    let opts = MapOptions {
        palette: Palette::Greens,
        circles: true,
        ..MapOptions::default()
    };
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    for (name, body) in [
        ("area.geojson", map.to_geojson()),
        ("area.svg", map.to_svg(&opts)),
    ] {
        let path = out.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
