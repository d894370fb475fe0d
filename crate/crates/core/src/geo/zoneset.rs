use rstar::primitives::{GeomWithData, Rectangle};
use rstar::RTree;

use super::{BoundingBox, GeoPoint, ZipZone};
use crate::error::{Error, Result};

type ZoneEnvelope = GeomWithData<Rectangle<[f64; 2]>, usize>;

/// Immutable set of zones with a bulk-loaded R-tree over their bounding boxes.
///
/// Zones are stored sorted by zip id, so the index of a zone doubles as its
/// rank in the lexicographic tie-break.
#[derive(Debug, Clone)]
pub struct ZoneSet {
    zones: Vec<ZipZone>,
    index: RTree<ZoneEnvelope>,
}

impl ZoneSet {
    pub fn new(mut zones: Vec<ZipZone>) -> Result<Self> {
        if zones.is_empty() {
            return Err(Error::Precondition("zone set is empty".into()));
        }
        zones.sort_by(|a, b| a.zip_id().cmp(b.zip_id()));
        if let Some(w) = zones.windows(2).find(|w| w[0].zip_id() == w[1].zip_id()) {
            return Err(Error::DuplicateZone(w[0].zip_id().to_string()));
        }
        if let Some(z) = zones
            .iter()
            .find(|z| z.area_km2().is_nan() || z.area_km2() <= 0.0)
        {
            return Err(Error::InvalidGeometry {
                zone: z.zip_id().to_string(),
                reason: "zone has zero area".into(),
            });
        }
        let envelopes = zones
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let bb = z.bbox();
                GeomWithData::new(
                    Rectangle::from_corners([bb.min_lon, bb.min_lat], [bb.max_lon, bb.max_lat]),
                    i,
                )
            })
            .collect();
        Ok(ZoneSet {
            zones,
            index: RTree::bulk_load(envelopes),
        })
    }

    pub fn zones(&self) -> &[ZipZone] {
        &self.zones
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn zip_ids(&self) -> impl Iterator<Item = &str> {
        self.zones.iter().map(|z| z.zip_id())
    }

    pub fn get(&self, zip_id: &str) -> Option<&ZipZone> {
        self.position(zip_id).map(|i| &self.zones[i])
    }

    pub fn contains_zip(&self, zip_id: &str) -> bool {
        self.position(zip_id).is_some()
    }

    fn position(&self, zip_id: &str) -> Option<usize> {
        self.zones.binary_search_by(|z| z.zip_id().cmp(zip_id)).ok()
    }

    pub fn bbox(&self) -> BoundingBox {
        let mut it = self.zones.iter().map(|z| z.bbox());
        let first = it.next().expect("zone set is non-empty");
        it.fold(first, |acc, b| BoundingBox {
            min_lon: acc.min_lon.min(b.min_lon),
            min_lat: acc.min_lat.min(b.min_lat),
            max_lon: acc.max_lon.max(b.max_lon),
            max_lat: acc.max_lat.max(b.max_lat),
        })
    }

    /// Indices of zones whose bounding box contains `p` (boundary inclusive),
    /// ascending. Always a superset of the zones that contain `p`.
    pub fn candidates(&self, p: &GeoPoint) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .index
            .locate_all_at_point(&[p.lon(), p.lat()])
            .map(|e| e.data)
            .collect();
        ids.sort_unstable();
        ids
    }

    /// The zip containing `p`. A point on a shared boundary goes to the
    /// lexicographically smallest zip id.
    pub fn assign_zone(&self, p: &GeoPoint) -> Option<&str> {
        self.candidates(p)
            .into_iter()
            .map(|i| &self.zones[i])
            .find(|z| z.contains(p))
            .map(|z| z.zip_id())
    }

    /// Same contract as [`assign_zone`](Self::assign_zone) without the index.
    pub fn assign_zone_exhaustive(&self, p: &GeoPoint) -> Option<&str> {
        self.zones
            .iter()
            .find(|z| z.contains(p))
            .map(|z| z.zip_id())
    }
}
