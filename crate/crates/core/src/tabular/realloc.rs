use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::census::TractRow;
use super::crosswalk::CrosswalkEntry;
use crate::error::{Error, Result};

/// Socio-economic variables reallocated to one zip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipSocioRow {
    pub zip_id: String,
    pub pop_total: u64,
    pub pop_white: u64,
    pub pop_black: u64,
    pub pop_hispanic: u64,
    pub vacant_units: u64,
    pub housing_units: u64,
    pub pct_white: Option<f64>,
    pub pct_black: Option<f64>,
    pub pct_hispanic: Option<f64>,
    pub vacancy_rate: Option<f64>,
    pub median_income_usd: Option<f64>,
    pub median_home_value_usd: Option<f64>,
}

#[derive(Default)]
struct Acc {
    pop_total: f64,
    pop_white: f64,
    pop_black: f64,
    pop_hispanic: f64,
    vacant_units: f64,
    housing_units: f64,
    income_num: f64,
    income_den: f64,
    value_num: f64,
    value_den: f64,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

fn round_count(x: f64) -> u64 {
    x.round_ties_even() as u64
}

/// Reallocates tract variables to zips through crosswalk weights.
///
/// Counts are weight-summed per zip and rounded half-to-even; ratios are
/// taken from the rounded sums. Tract medians are combined as weighted means
/// of medians: income by weighted population, home value by weighted housing
/// units, skipping null medians. That is an approximation; true pooled
/// medians cannot be recovered from published tract medians.
pub fn tract_to_zip(tracts: &[TractRow], crosswalk: &[CrosswalkEntry]) -> Result<Vec<ZipSocioRow>> {
    let by_id: HashMap<&str, &TractRow> = tracts.iter().map(|t| (t.tract_id.as_str(), t)).collect();
    let mut acc: BTreeMap<&str, Acc> = BTreeMap::new();

    for e in crosswalk {
        let t = by_id.get(e.tract_id.as_str()).ok_or_else(|| {
            Error::Data(format!(
                "crosswalk tract {} missing from census table",
                e.tract_id
            ))
        })?;
        let w = e.weight;
        let a = acc.entry(e.zip_id.as_str()).or_default();
        a.pop_total += w * t.pop_total as f64;
        a.pop_white += w * t.pop_white as f64;
        a.pop_black += w * t.pop_black as f64;
        a.pop_hispanic += w * t.pop_hispanic as f64;
        a.vacant_units += w * t.vacant_units as f64;
        a.housing_units += w * t.housing_units as f64;
        if let Some(m) = t.median_income_usd {
            let pw = w * t.pop_total as f64;
            a.income_num += pw * m;
            a.income_den += pw;
        }
        if let Some(m) = t.median_home_value_usd {
            let hw = w * t.housing_units as f64;
            a.value_num += hw * m;
            a.value_den += hw;
        }
    }

    Ok(acc
        .into_iter()
        .map(|(zip, a)| {
            let pop_total = round_count(a.pop_total);
            let pop_white = round_count(a.pop_white);
            let pop_black = round_count(a.pop_black);
            let pop_hispanic = round_count(a.pop_hispanic);
            let vacant_units = round_count(a.vacant_units);
            let housing_units = round_count(a.housing_units);
            ZipSocioRow {
                zip_id: zip.to_string(),
                pop_total,
                pop_white,
                pop_black,
                pop_hispanic,
                vacant_units,
                housing_units,
                pct_white: ratio(pop_white, pop_total),
                pct_black: ratio(pop_black, pop_total),
                pct_hispanic: ratio(pop_hispanic, pop_total),
                vacancy_rate: ratio(vacant_units, housing_units),
                median_income_usd: (a.income_den > 0.0).then(|| a.income_num / a.income_den),
                median_home_value_usd: (a.value_den > 0.0).then(|| a.value_num / a.value_den),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tract(id: &str, pop: u64, white: u64, income: Option<f64>) -> TractRow {
        TractRow {
            tract_id: id.into(),
            pop_total: pop,
            pop_white: white,
            pop_black: 0,
            pop_hispanic: 0,
            vacant_units: pop / 10,
            housing_units: pop / 2,
            median_income_usd: income,
            median_home_value_usd: None,
        }
    }

    fn xw(t: &str, z: &str, w: f64) -> CrosswalkEntry {
        CrosswalkEntry {
            tract_id: t.into(),
            zip_id: z.into(),
            weight: w,
        }
    }

    #[test]
    fn single_tract_single_zip() {
        let rows =
            tract_to_zip(&[tract("T1", 1000, 600, None)], &[xw("T1", "02108", 1.0)]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].pop_total, 1000);
        assert_eq!(rows[0].pct_white, Some(0.6));
        assert_eq!(rows[0].vacancy_rate, Some(0.2));
    }

    #[test]
    fn half_split_sends_half_to_each() {
        let rows = tract_to_zip(
            &[tract("T1", 1000, 600, None)],
            &[xw("T1", "02108", 0.5), xw("T1", "02109", 0.5)],
        )
        .unwrap();
        assert_eq!(
            rows.iter().map(|r| r.pop_total).collect::<Vec<_>>(),
            [500, 500]
        );
    }

    #[test]
    fn medians_are_population_weighted() {
        // (50000*1000 + 70000*3000) / 4000 = 65000
        let rows = tract_to_zip(
            &[
                tract("T1", 1000, 0, Some(50_000.0)),
                tract("T2", 3000, 0, Some(70_000.0)),
            ],
            &[xw("T1", "02108", 1.0), xw("T2", "02108", 1.0)],
        )
        .unwrap();
        assert_eq!(rows[0].median_income_usd, Some(65_000.0));
    }

    #[test]
    fn null_medians_are_skipped() {
        let rows = tract_to_zip(
            &[
                tract("T1", 1000, 0, None),
                tract("T2", 3000, 0, Some(70_000.0)),
            ],
            &[xw("T1", "02108", 1.0), xw("T2", "02108", 1.0)],
        )
        .unwrap();
        assert_eq!(rows[0].median_income_usd, Some(70_000.0));
        assert_eq!(rows[0].median_home_value_usd, None);
    }

    #[test]
    fn zero_population_keeps_row_with_null_ratios() {
        let rows =
            tract_to_zip(&[tract("T1", 0, 0, Some(1.0))], &[xw("T1", "02108", 1.0)]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].pct_white, None);
        assert_eq!(rows[0].vacancy_rate, None);
        assert_eq!(rows[0].median_income_usd, None);
    }

    #[test]
    fn rounding_is_half_to_even() {
        // 0.5 * 5 = 2.5 -> 2 ; 0.5 * 7 = 3.5 -> 4
        let rows = tract_to_zip(
            &[tract("T1", 5, 0, None), tract("T2", 7, 0, None)],
            &[xw("T1", "02108", 0.5), xw("T2", "02109", 0.5)],
        )
        .unwrap();
        assert_eq!(rows[0].pop_total, 2);
        assert_eq!(rows[1].pop_total, 4);
    }

    #[test]
    fn unknown_crosswalk_tract_is_an_error() {
        assert!(tract_to_zip(&[], &[xw("T1", "02108", 1.0)]).is_err());
    }
}
