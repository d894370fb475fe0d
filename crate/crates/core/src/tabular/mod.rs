//! Census tracts, the tract→zip crosswalk, and building permits.

mod census;
mod crosswalk;
mod permits;
mod realloc;

pub use census::{load_tract_geometries, read_census_csv, CensusColumns, TractGeometry, TractRow};
pub use crosswalk::{
    build_crosswalk, read_crosswalk_csv, write_crosswalk_csv, Crosswalk, CrosswalkEntry,
    CrosswalkOptions, DEFAULT_SAMPLES_PER_TRACT, MIN_CROSSWALK_WEIGHT,
};
pub use permits::{
    filter_permits, permit_zip_counts, read_permits_csv, OccupancyClass, PermitCounts,
    PermitRecord, PermitTally,
};
pub use realloc::{tract_to_zip, ZipSocioRow};
