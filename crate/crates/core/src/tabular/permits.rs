use std::collections::{BTreeMap, HashSet};
use std::io::Read;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{GeoPoint, ZoneSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupancyClass {
    Commercial,
    Mixed,
    Residential,
    Other,
}

impl OccupancyClass {
    /// Lenient parse of the occupancy column; unknown labels are `Other`.
    pub fn parse(label: &str) -> Self {
        match label.trim().to_ascii_lowercase().as_str() {
            "commercial" | "comm" | "com" => OccupancyClass::Commercial,
            "mixed" | "mixed use" | "mixed-use" | "mixed_use" | "mixed/res" => {
                OccupancyClass::Mixed
            }
            "residential" | "res" | "1-2fam" | "1-3fam" | "multi" => OccupancyClass::Residential,
            _ => OccupancyClass::Other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermitRecord {
    pub permit_id: String,
    pub location: GeoPoint,
    pub occupancy_class: OccupancyClass,
    pub declared_value_usd: Option<f64>,
    pub issued_date: NaiveDate,
}

#[derive(Deserialize)]
struct PermitRow {
    permit_id: String,
    lon: f64,
    lat: f64,
    occupancy: String,
    declared_value: Option<String>,
    issued_date: String,
}

/// Reads `permit_id,lon,lat,occupancy,declared_value,issued_date`.
pub fn read_permits_csv<R: Read>(reader: R) -> Result<Vec<PermitRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut ids = HashSet::new();
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize().enumerate() {
        let row: PermitRow = row?;
        let line = i + 2;
        if !ids.insert(row.permit_id.clone()) {
            return Err(Error::Data(format!(
                "duplicate permit id {}",
                row.permit_id
            )));
        }
        let declared_value_usd = match row.declared_value.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(raw) => match raw.parse::<f64>() {
                Ok(v) if v.is_finite() && v >= 0.0 => Some(v),
                _ => {
                    return Err(Error::Data(format!(
                        "permit row {line}: declared value `{raw}` is not a nonnegative number"
                    )))
                }
            },
        };
        let issued_date = NaiveDate::parse_from_str(row.issued_date.trim(), "%Y-%m-%d")
            .map_err(|e| Error::Data(format!("permit row {line}: issued_date: {e}")))?;
        out.push(PermitRecord {
            permit_id: row.permit_id,
            location: GeoPoint::new(row.lon, row.lat)
                .map_err(|e| Error::Data(format!("permit row {line}: {e}")))?,
            occupancy_class: OccupancyClass::parse(&row.occupancy),
            declared_value_usd,
            issued_date,
        });
    }
    Ok(out)
}

/// Commercial and mixed-use permits, in input order.
pub fn filter_permits(permits: &[PermitRecord]) -> Vec<PermitRecord> {
    permits
        .iter()
        .filter(|p| {
            matches!(
                p.occupancy_class,
                OccupancyClass::Commercial | OccupancyClass::Mixed
            )
        })
        .cloned()
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PermitTally {
    pub permit_count: u64,
    pub permit_value_usd: f64,
    /// Permits without a declared value; they count but add nothing to the sum.
    pub null_values: u64,
}

impl PermitTally {
    fn add(&mut self, p: &PermitRecord) {
        self.permit_count += 1;
        match p.declared_value_usd {
            Some(v) => self.permit_value_usd += v,
            None => self.null_values += 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PermitCounts {
    /// Only zips that received at least one permit.
    pub by_zip: BTreeMap<String, PermitTally>,
    pub unassigned: PermitTally,
}

pub fn permit_zip_counts(permits: &[PermitRecord], zones: &ZoneSet) -> PermitCounts {
    let mut out = PermitCounts::default();
    for p in permits {
        match zones.assign_zone(&p.location) {
            Some(zip) => out.by_zip.entry(zip.to_string()).or_default().add(p),
            None => out.unassigned.add(p),
        }
    }
    out
}
