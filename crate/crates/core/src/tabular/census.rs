use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::geojson::parse_polygon_features;
use crate::geo::{validate_parts, BoundingBox, GeoPoint, Polygon};

/// One census tract's socio-economic observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TractRow {
    pub tract_id: String,
    pub pop_total: u64,
    pub pop_white: u64,
    pub pop_black: u64,
    pub pop_hispanic: u64,
    pub vacant_units: u64,
    pub housing_units: u64,
    pub median_income_usd: Option<f64>,
    pub median_home_value_usd: Option<f64>,
}

impl TractRow {
    pub fn validate(&self) -> Result<()> {
        let t = &self.tract_id;
        for (name, v) in [
            ("pop_white", self.pop_white),
            ("pop_black", self.pop_black),
            ("pop_hispanic", self.pop_hispanic),
        ] {
            if v > self.pop_total {
                return Err(Error::Data(format!(
                    "tract {t}: {name} {v} exceeds pop_total {}",
                    self.pop_total
                )));
            }
        }
        if self.vacant_units > self.housing_units {
            return Err(Error::Data(format!(
                "tract {t}: vacant_units {} exceeds housing_units {}",
                self.vacant_units, self.housing_units
            )));
        }
        Ok(())
    }
}

/// Census CSV header names for each tract field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CensusColumns {
    pub tract_id: String,
    pub pop_total: String,
    pub pop_white: String,
    pub pop_black: String,
    pub pop_hispanic: String,
    pub vacant_units: String,
    pub housing_units: String,
    pub median_income_usd: String,
    pub median_home_value_usd: String,
}

impl Default for CensusColumns {
    fn default() -> Self {
        CensusColumns {
            tract_id: "GEOID".into(),
            pop_total: "pop_total".into(),
            pop_white: "pop_white".into(),
            pop_black: "pop_black".into(),
            pop_hispanic: "pop_hispanic".into(),
            vacant_units: "vacant_units".into(),
            housing_units: "housing_units".into(),
            median_income_usd: "median_income".into(),
            median_home_value_usd: "median_home_value".into(),
        }
    }
}

/// Reads tract rows. Medians that are empty, non-numeric sentinels or
/// non-positive (the Census Bureau publishes negative jam values) become null.
pub fn read_census_csv<R: Read>(reader: R, columns: &CensusColumns) -> Result<Vec<TractRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Data(format!("census CSV has no column `{name}`")))
    };
    let idx = [
        col(&columns.tract_id)?,
        col(&columns.pop_total)?,
        col(&columns.pop_white)?,
        col(&columns.pop_black)?,
        col(&columns.pop_hispanic)?,
        col(&columns.vacant_units)?,
        col(&columns.housing_units)?,
        col(&columns.median_income_usd)?,
        col(&columns.median_home_value_usd)?,
    ];

    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let field = |i: usize| record.get(idx[i]).unwrap_or("").trim();
        let count = |i: usize| -> Result<u64> {
            let raw = field(i);
            raw.parse::<u64>().map_err(|_| {
                Error::Data(format!("census row {}: `{raw}` is not a count", line + 2))
            })
        };
        let median = |i: usize| -> Option<f64> {
            field(i)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v > 0.0)
        };
        let row = TractRow {
            tract_id: field(0).to_string(),
            pop_total: count(1)?,
            pop_white: count(2)?,
            pop_black: count(3)?,
            pop_hispanic: count(4)?,
            vacant_units: count(5)?,
            housing_units: count(6)?,
            median_income_usd: median(7),
            median_home_value_usd: median(8),
        };
        row.validate()?;
        rows.push(row);
    }
    Ok(rows)
}

/// A tract polygon used to build the crosswalk.
#[derive(Debug, Clone, PartialEq)]
pub struct TractGeometry {
    pub tract_id: String,
    pub polygons: Vec<Polygon>,
}

impl TractGeometry {
    pub fn new(tract_id: impl Into<String>, parts: Vec<Vec<Vec<GeoPoint>>>) -> Result<Self> {
        let tract_id = tract_id.into();
        let polygons = validate_parts(&tract_id, parts)?;
        Ok(TractGeometry { tract_id, polygons })
    }

    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::of_points(self.polygons.iter().flat_map(|p| p.exterior.points()))
            .expect("validated rings are non-empty")
    }

    pub fn contains(&self, p: &GeoPoint) -> bool {
        self.polygons
            .iter()
            .any(|part| crate::geo::part_contains(p, part))
    }
}

pub fn load_tract_geometries(path: &Path, id_property: &str) -> Result<Vec<TractGeometry>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_polygon_features(&text, id_property)?
        .into_iter()
        .map(|f| TractGeometry::new(f.id, f.parts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "GEOID,pop_total,pop_white,pop_black,pop_hispanic,vacant_units,housing_units,median_income,median_home_value
25025000100,1000,600,200,150,40,500,52000,410000
25025000200,3000,900,1500,600,90,1200,,-666666666
";

    #[test]
    fn reads_rows_with_null_medians() {
        let rows = read_census_csv(CSV.as_bytes(), &CensusColumns::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].median_income_usd, Some(52000.0));
        assert_eq!(rows[1].median_income_usd, None);
        assert_eq!(rows[1].median_home_value_usd, None);
    }

    #[test]
    fn column_names_come_from_config() {
        let renamed = CSV.replacen("pop_total", "B01003_001E", 1);
        assert!(read_census_csv(renamed.as_bytes(), &CensusColumns::default()).is_err());
        let cols = CensusColumns {
            pop_total: "B01003_001E".into(),
            ..Default::default()
        };
        assert_eq!(read_census_csv(renamed.as_bytes(), &cols).unwrap().len(), 2);
    }

    #[test]
    fn subgroup_larger_than_total_is_rejected() {
        let bad = CSV.replace("1000,600", "1000,1600");
        let err = read_census_csv(bad.as_bytes(), &CensusColumns::default()).unwrap_err();
        assert!(err.to_string().contains("pop_white"));
        let bad = CSV.replace("40,500", "600,500");
        assert!(read_census_csv(bad.as_bytes(), &CensusColumns::default()).is_err());
    }
}
