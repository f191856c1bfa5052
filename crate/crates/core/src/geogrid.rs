//! Geographic neighborhood features.
//!
//! Customers are binned into square-indexed grids (the same number of cells
//! along longitude and latitude) over the bounding box of valid coordinates.
//! Each cell reports the share of its customers that were inspected and the
//! share of those inspections that found NTL; every customer inherits the two
//! ratios of its cell at every resolution.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use crate::dataset::{CustomerId, CustomerRecord, Dataset};
use crate::error::{Error, Result};
use crate::parallel;

pub const DEFAULT_GRID_SIZES: [usize; 4] = [50, 100, 200, 400];
pub const DEFAULT_K_SIGMA: f64 = 5.0;

/// How distance from the mean coordinate is measured by the outlier filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutlierRule {
    /// Longitude and latitude tested independently against their own spread.
    #[default]
    PerAxis,
    /// Euclidean distance from the mean against the root of the summed variances.
    Radial,
}

impl OutlierRule {
    pub fn token(self) -> &'static str {
        match self {
            OutlierRule::PerAxis => "per_axis",
            OutlierRule::Radial => "radial",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        [OutlierRule::PerAxis, OutlierRule::Radial].into_iter().find(|v| v.token() == s)
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

fn within(deviation: f64, k_sigma: f64, sd: f64) -> bool {
    k_sigma == f64::INFINITY || deviation <= k_sigma * sd
}

/// Splits customers into (retained, removed) by distance from the mean
/// coordinates in units of standard deviations (population, over all input).
pub fn remove_coordinate_outliers(
    customers: &[CustomerRecord],
    k_sigma: f64,
    rule: OutlierRule,
) -> Result<(Vec<CustomerRecord>, Vec<CustomerRecord>)> {
    if customers.len() < 2 {
        return Err(Error::Degenerate(format!(
            "outlier removal needs at least 2 customers, got {}",
            customers.len()
        )));
    }
    if !(k_sigma >= 0.0) {
        return Err(Error::Config(format!("k_sigma must be non-negative, got {k_sigma}")));
    }
    if let Some(c) = customers
        .iter()
        .find(|c| !c.longitude.is_finite() || !c.latitude.is_finite())
    {
        return Err(Error::Degenerate(format!("customer {} has non-finite coordinates", c.id)));
    }
    let (mlon, slon) = mean_std(customers.iter().map(|c| c.longitude));
    let (mlat, slat) = mean_std(customers.iter().map(|c| c.latitude));
    let keep = |c: &CustomerRecord| match rule {
        OutlierRule::PerAxis => {
            within(libm::fabs(c.longitude - mlon), k_sigma, slon)
                && within(libm::fabs(c.latitude - mlat), k_sigma, slat)
        }
        OutlierRule::Radial => {
            let d = libm::hypot(c.longitude - mlon, c.latitude - mlat);
            within(d, k_sigma, libm::hypot(slon, slat))
        }
    };
    let (retained, removed): (Vec<_>, Vec<_>) = customers.iter().cloned().partition(|c| keep(c));
    if retained.is_empty() {
        return Err(Error::Degenerate("outlier removal discarded every customer".into()));
    }
    Ok((retained, removed))
}

/// Dataset without the customers flagged by [`remove_coordinate_outliers`];
/// also returns the dropped ids.
pub fn drop_coordinate_outliers(
    dataset: &Dataset,
    k_sigma: f64,
    rule: OutlierRule,
) -> Result<(Dataset, BTreeSet<CustomerId>)> {
    if k_sigma == f64::INFINITY {
        return Ok((dataset.clone(), BTreeSet::new()));
    }
    let (_, removed) = remove_coordinate_outliers(dataset.customers(), k_sigma, rule)?;
    let ids: BTreeSet<CustomerId> = removed.iter().map(|c| c.id).collect();
    Ok((dataset.without_customers(&ids), ids))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min_longitude: f64,
    pub max_longitude: f64,
    pub min_latitude: f64,
    pub max_latitude: f64,
}

impl BoundingBox {
    pub fn new(min_longitude: f64, max_longitude: f64, min_latitude: f64, max_latitude: f64) -> Result<Self> {
        if !(min_longitude < max_longitude && min_latitude < max_latitude) {
            return Err(Error::Degenerate(format!(
                "bounding box needs min < max on both axes: lon [{min_longitude}, {max_longitude}], lat [{min_latitude}, {max_latitude}]"
            )));
        }
        Ok(Self {
            min_longitude,
            max_longitude,
            min_latitude,
            max_latitude,
        })
    }

    pub fn longitude_span(&self) -> f64 {
        self.max_longitude - self.min_longitude
    }

    pub fn latitude_span(&self) -> f64 {
        self.max_latitude - self.min_latitude
    }

    pub fn contains(&self, longitude: f64, latitude: f64) -> bool {
        (self.min_longitude..=self.max_longitude).contains(&longitude)
            && (self.min_latitude..=self.max_latitude).contains(&latitude)
    }
}

/// Relative padding applied to a zero-width axis.
const DEGENERATE_PAD: f64 = 1e-9;

fn padded(min: f64, max: f64) -> (f64, f64) {
    if min < max {
        (min, max)
    } else {
        let pad = DEGENERATE_PAD * libm::fmax(libm::fabs(min), 1.0);
        (min - pad, max + pad)
    }
}

/// Tight box around the customers; an axis with a single distinct value is
/// widened by a relative epsilon so cells have positive width.
pub fn compute_bounding_box(customers: &[CustomerRecord]) -> Result<BoundingBox> {
    let first = customers
        .first()
        .ok_or_else(|| Error::Degenerate("bounding box of an empty customer set".into()))?;
    let mut b = (first.longitude, first.longitude, first.latitude, first.latitude);
    for c in customers {
        b.0 = b.0.min(c.longitude);
        b.1 = b.1.max(c.longitude);
        b.2 = b.2.min(c.latitude);
        b.3 = b.3.max(c.latitude);
    }
    let (lon0, lon1) = padded(b.0, b.1);
    let (lat0, lat1) = padded(b.2, b.3);
    BoundingBox::new(lon0, lon1, lat0, lat1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub cells_per_axis: usize,
    pub bbox: BoundingBox,
}

impl GridSpec {
    pub fn new(cells_per_axis: usize, bbox: BoundingBox) -> Result<Self> {
        if cells_per_axis == 0 {
            return Err(Error::Config("cells_per_axis must be at least 1".into()));
        }
        Ok(Self { cells_per_axis, bbox })
    }

    fn axis_index(&self, v: f64, min: f64, max: f64) -> Option<usize> {
        if !(min..=max).contains(&v) {
            return None;
        }
        let width = (max - min) / self.cells_per_axis as f64;
        let i = libm::floor((v - min) / width) as usize;
        // closed top edge
        Some(i.min(self.cells_per_axis - 1))
    }

    /// `(i, j)` with `i` along longitude and `j` along latitude, or `None`
    /// outside the box.
    pub fn cell_of(&self, longitude: f64, latitude: f64) -> Option<(usize, usize)> {
        let b = &self.bbox;
        Some((
            self.axis_index(longitude, b.min_longitude, b.max_longitude)?,
            self.axis_index(latitude, b.min_latitude, b.max_latitude)?,
        ))
    }
}

/// Kilometres per degree along each axis (planar approximation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmScale {
    pub km_per_degree_longitude: f64,
    pub km_per_degree_latitude: f64,
}

/// Area of a single cell in km².
pub fn cell_area(bbox: &BoundingBox, cells_per_axis: usize, scale: KmScale) -> f64 {
    let area = bbox.longitude_span()
        * scale.km_per_degree_longitude
        * bbox.latitude_span()
        * scale.km_per_degree_latitude;
    area / (cells_per_axis * cells_per_axis) as f64
}

/// Integer tallies of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellCounts {
    pub customers: u64,
    pub inspected: u64,
    pub ntl: u64,
}

impl CellCounts {
    fn add(&mut self, other: CellCounts) {
        self.customers += other.customers;
        self.inspected += other.inspected;
        self.ntl += other.ntl;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCellStats {
    pub i: usize,
    pub j: usize,
    pub num_customers: u64,
    pub num_inspected: u64,
    pub num_ntl: u64,
    pub inspected_ratio: f64,
    pub ntl_ratio: f64,
}

/// Inspected share; zero for an empty cell.
pub fn inspected_ratio(inspected: u64, customers: u64) -> f64 {
    if customers == 0 {
        0.0
    } else {
        inspected as f64 / customers as f64
    }
}

/// NTL share among the inspected; a cell without inspections carries no
/// evidence of NTL and reports zero.
pub fn ntl_ratio(ntl: u64, inspected: u64) -> f64 {
    if inspected == 0 {
        0.0
    } else {
        ntl as f64 / inspected as f64
    }
}

impl GridCellStats {
    fn from_counts((i, j): (usize, usize), c: CellCounts) -> Self {
        Self {
            i,
            j,
            num_customers: c.customers,
            num_inspected: c.inspected,
            num_ntl: c.ntl,
            inspected_ratio: inspected_ratio(c.inspected, c.customers),
            ntl_ratio: ntl_ratio(c.ntl, c.inspected),
        }
    }
}

/// Partial per-cell tallies. Merging is exact, associative and commutative,
/// so customer chunks can be folded on separate workers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridAccumulator {
    cells: BTreeMap<(usize, usize), CellCounts>,
}

impl GridAccumulator {
    pub fn add(&mut self, cell: (usize, usize), inspection: Option<bool>) {
        self.cells.entry(cell).or_default().add(CellCounts {
            customers: 1,
            inspected: u64::from(inspection.is_some()),
            ntl: u64::from(inspection == Some(true)),
        });
    }

    pub fn merge(mut self, other: GridAccumulator) -> Self {
        for (k, v) in other.cells {
            self.cells.entry(k).or_default().add(v);
        }
        self
    }

    pub fn counts(&self) -> &BTreeMap<(usize, usize), CellCounts> {
        &self.cells
    }
}

/// Per-cell statistics at one resolution. Empty cells are absent.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub spec: GridSpec,
    cells: BTreeMap<(usize, usize), GridCellStats>,
}

impl Grid {
    /// Occupied cells in `(i, j)` order.
    pub fn cells(&self) -> impl Iterator<Item = &GridCellStats> {
        self.cells.values()
    }

    pub fn cell(&self, i: usize, j: usize) -> Option<&GridCellStats> {
        self.cells.get(&(i, j))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Latest inspection outcome per customer (`true` = NTL found).
pub type Labels = BTreeMap<CustomerId, bool>;

fn locate(spec: &GridSpec, c: &CustomerRecord) -> Result<(usize, usize)> {
    spec.cell_of(c.longitude, c.latitude).ok_or(Error::Assignment {
        customer: c.id,
        longitude: c.longitude,
        latitude: c.latitude,
    })
}

/// Bins every customer and tallies customers, inspections and NTL per cell.
pub fn build_grid(customers: &[CustomerRecord], labels: &Labels, spec: &GridSpec) -> Result<Grid> {
    build_grid_parallel(customers, labels, spec, 1)
}

/// [`build_grid`] as a fold over `workers` customer chunks.
pub fn build_grid_parallel(
    customers: &[CustomerRecord],
    labels: &Labels,
    spec: &GridSpec,
    workers: usize,
) -> Result<Grid> {
    let chunks = parallel::chunk_bounds(customers.len(), workers);
    let partials = parallel::map_indexed(workers, chunks.len(), |k| {
        let (lo, hi) = chunks[k];
        let mut acc = GridAccumulator::default();
        for c in &customers[lo..hi] {
            acc.add(locate(spec, c)?, labels.get(&c.id).copied());
        }
        Ok::<_, Error>(acc)
    });
    let mut total = GridAccumulator::default();
    for p in partials {
        total = total.merge(p?);
    }
    Ok(Grid {
        spec: *spec,
        cells: total
            .cells
            .into_iter()
            .map(|(k, c)| (k, GridCellStats::from_counts(k, c)))
            .collect(),
    })
}

/// Builds one grid per resolution over the customers' own bounding box.
pub fn build_grids(
    customers: &[CustomerRecord],
    labels: &Labels,
    grid_sizes: &[usize],
    workers: usize,
) -> Result<Vec<Grid>> {
    let bbox = compute_bounding_box(customers)?;
    grid_sizes
        .iter()
        .map(|&n| build_grid_parallel(customers, labels, &GridSpec::new(n, bbox)?, workers))
        .collect()
}

/// Whether a customer's own inspection counts toward its cell's ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfInclusion {
    /// Cell ratios include the customer's own inspection.
    #[default]
    Include,
    /// Leave-one-out: the customer's inspection is subtracted from its cell.
    Exclude,
}

impl SelfInclusion {
    pub fn token(self) -> &'static str {
        match self {
            SelfInclusion::Include => "include",
            SelfInclusion::Exclude => "exclude",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        [SelfInclusion::Include, SelfInclusion::Exclude].into_iter().find(|v| v.token() == s)
    }
}

/// `(inspected_ratio, ntl_ratio)` per grid, flattened in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodFeatures(pub Vec<f64>);

/// Looks up each customer's cell at every resolution.
pub fn assign_neighborhood_features(
    customers: &[CustomerRecord],
    grids: &[Grid],
    labels: &Labels,
    inclusion: SelfInclusion,
) -> Result<Vec<NeighborhoodFeatures>> {
    customers
        .iter()
        .map(|c| {
            let own = labels.get(&c.id).copied();
            let mut v = Vec::with_capacity(2 * grids.len());
            for g in grids {
                let (i, j) = locate(&g.spec, c)?;
                let s = g.cell(i, j).ok_or_else(|| {
                    Error::Alignment(format!("customer {} not counted in its cell ({i}, {j})", c.id))
                })?;
                let (mut inspected, mut ntl) = (s.num_inspected, s.num_ntl);
                if inclusion == SelfInclusion::Exclude && own.is_some() {
                    inspected -= 1;
                    ntl -= u64::from(own == Some(true));
                }
                v.push(inspected_ratio(inspected, s.num_customers));
                v.push(ntl_ratio(ntl, inspected));
            }
            Ok(NeighborhoodFeatures(v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ContractStatus, CustomerClass, Voltage, Wires};
    use alloc::vec;
    use proptest::prelude::*;
    use rand::Rng;

    fn at(id: u64, longitude: f64, latitude: f64) -> CustomerRecord {
        CustomerRecord {
            id: CustomerId(id),
            longitude,
            latitude,
            class: CustomerClass::Residential,
            contract_status: ContractStatus::Active,
            wires: Wires::One,
            voltage: Voltage::AtMost2_3Kv,
        }
    }

    #[test]
    fn identical_coordinates_all_retained() {
        let cs: Vec<_> = (0..10).map(|i| at(i, 3.0, 4.0)).collect();
        let (kept, removed) = remove_coordinate_outliers(&cs, 5.0, OutlierRule::PerAxis).unwrap();
        assert_eq!(kept.len(), 10);
        assert!(removed.is_empty());
    }

    #[test]
    fn distant_point_removed() {
        let mut rng = crate::seed::rng(3);
        let mut cs: Vec<_> = (0..100)
            .map(|i| at(i, rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        cs.push(at(100, 1e6, 1e6));
        for rule in [OutlierRule::PerAxis, OutlierRule::Radial] {
            let (kept, removed) = remove_coordinate_outliers(&cs, 5.0, rule).unwrap();
            assert_eq!(kept.len(), 100);
            assert_eq!(removed.len(), 1);
            assert_eq!(removed[0].id, CustomerId(100));
        }
    }

    #[test]
    fn infinite_sigma_is_identity() {
        let cs = vec![at(0, 0.0, 0.0), at(1, 1e9, -1e9), at(2, 0.0, 0.0)];
        let (kept, _) = remove_coordinate_outliers(&cs, f64::INFINITY, OutlierRule::PerAxis).unwrap();
        assert_eq!(kept, cs);
    }

    #[test]
    fn too_few_customers_is_degenerate() {
        assert!(matches!(
            remove_coordinate_outliers(&[at(0, 0.0, 0.0)], 5.0, OutlierRule::PerAxis),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn zero_sigma_removes_all_spread_points() {
        let cs = vec![at(0, 0.0, 0.0), at(1, 1.0, 1.0)];
        assert!(matches!(
            remove_coordinate_outliers(&cs, 0.0, OutlierRule::PerAxis),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn bounding_box_two_points() {
        let b = compute_bounding_box(&[at(0, 0.0, 0.0), at(1, 1.0, 2.0)]).unwrap();
        assert_eq!(b, BoundingBox::new(0.0, 1.0, 0.0, 2.0).unwrap());
    }

    #[test]
    fn bounding_box_single_point_is_padded() {
        let b = compute_bounding_box(&[at(0, -47.5, -22.0)]).unwrap();
        assert!(b.min_longitude < -47.5 && b.max_longitude > -47.5);
        assert!(b.min_latitude < -22.0 && b.max_latitude > -22.0);
        let g = GridSpec::new(400, b).unwrap();
        assert!(g.cell_of(-47.5, -22.0).is_some());
    }

    #[test]
    fn bounding_box_empty_is_error() {
        assert!(compute_bounding_box(&[]).is_err());
    }

    #[test]
    fn synthetic_box_has_five_to_two_aspect() {
        use crate::dataset::{generate_synthetic, SyntheticConfig};
        let ds = generate_synthetic(&SyntheticConfig {
            num_customers: 3000,
            ..SyntheticConfig::default()
        })
        .unwrap();
        let (kept, _) = remove_coordinate_outliers(ds.customers(), 5.0, OutlierRule::PerAxis).unwrap();
        let b = compute_bounding_box(&kept).unwrap();
        let aspect = b.latitude_span() / b.longitude_span();
        assert!((aspect - 2.5).abs() <= 0.25, "aspect {aspect}");
    }

    #[test]
    fn figure_two_cell() {
        let b = BoundingBox::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let cs: Vec<_> = (0..5).map(|i| at(i, 0.5, 0.5)).collect();
        let labels: Labels = [(CustomerId(0), true), (CustomerId(1), false), (CustomerId(2), false)]
            .into_iter()
            .collect();
        let g = build_grid(&cs, &labels, &GridSpec::new(1, b).unwrap()).unwrap();
        let s = g.cell(0, 0).unwrap();
        assert_eq!((s.num_customers, s.num_inspected, s.num_ntl), (5, 3, 1));
        assert_eq!(s.inspected_ratio, 0.6);
        assert_eq!(s.ntl_ratio, 1.0 / 3.0);
    }

    #[test]
    fn uninspected_single_customer_ratios_zero() {
        let b = BoundingBox::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let g = build_grid(&[at(0, 0.2, 0.2)], &Labels::new(), &GridSpec::new(4, b).unwrap()).unwrap();
        let s = g.cells().next().unwrap();
        assert_eq!((s.inspected_ratio, s.ntl_ratio), (0.0, 0.0));
    }

    #[test]
    fn upper_edge_clamps_to_last_cell() {
        let b = BoundingBox::new(0.0, 1.0, 0.0, 2.0).unwrap();
        let spec = GridSpec::new(10, b).unwrap();
        assert_eq!(spec.cell_of(1.0, 2.0), Some((9, 9)));
        assert_eq!(spec.cell_of(0.0, 0.0), Some((0, 0)));
        assert_eq!(spec.cell_of(1.0 + 1e-12, 0.0), None);
    }

    #[test]
    fn outside_customer_is_assignment_error() {
        let b = BoundingBox::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let err = build_grid(&[at(7, 2.0, 0.5)], &Labels::new(), &GridSpec::new(2, b).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Assignment { customer: CustomerId(7), .. }));
    }

    #[test]
    fn table_one_cell_areas() {
        // 200 km x 500 km at one kilometre per unit
        let b = BoundingBox::new(0.0, 200.0, 0.0, 500.0).unwrap();
        let scale = KmScale {
            km_per_degree_longitude: 1.0,
            km_per_degree_latitude: 1.0,
        };
        assert_eq!(cell_area(&b, 50, scale), 40.0);
        assert_eq!(cell_area(&b, 100, scale), 10.0);
        assert_eq!(cell_area(&b, 200, scale), 2.5);
        assert_eq!(cell_area(&b, 400, scale), 0.625);
        let unit = BoundingBox::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(cell_area(&unit, 1, scale), 1.0);
    }

    #[test]
    fn lone_inspected_ntl_customer_gets_all_ones() {
        let cs = vec![at(0, 0.0, 0.0), at(1, 1.0, 1.0)];
        let labels: Labels = [(CustomerId(0), true)].into_iter().collect();
        let grids = build_grids(&cs, &labels, &DEFAULT_GRID_SIZES, 1).unwrap();
        let f = assign_neighborhood_features(&cs, &grids, &labels, SelfInclusion::Include).unwrap();
        assert_eq!(f[0].0, vec![1.0; 8]);
        assert_eq!(f[1].0, vec![0.0; 8]);
    }

    #[test]
    fn co_located_customers_share_features() {
        let cs = vec![at(0, 0.3, 0.3), at(1, 0.3, 0.3), at(2, 1.0, 1.0), at(3, 0.0, 0.9)];
        let labels: Labels = [(CustomerId(0), true), (CustomerId(2), false)].into_iter().collect();
        let grids = build_grids(&cs, &labels, &DEFAULT_GRID_SIZES, 1).unwrap();
        let f = assign_neighborhood_features(&cs, &grids, &labels, SelfInclusion::Include).unwrap();
        assert_eq!(f[0], f[1]);
        assert_eq!(f[0].0.len(), 8);
    }

    #[test]
    fn leave_one_out_excludes_own_label() {
        let cs = vec![at(0, 0.5, 0.5), at(1, 0.5, 0.5)];
        let labels: Labels = [(CustomerId(0), true), (CustomerId(1), false)].into_iter().collect();
        let b = BoundingBox::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let grids = vec![build_grid(&cs, &labels, &GridSpec::new(1, b).unwrap()).unwrap()];
        let inc = assign_neighborhood_features(&cs, &grids, &labels, SelfInclusion::Include).unwrap();
        let exc = assign_neighborhood_features(&cs, &grids, &labels, SelfInclusion::Exclude).unwrap();
        assert_eq!(inc[0].0, vec![1.0, 0.5]);
        assert_eq!(exc[0].0, vec![0.5, 0.0]);
        assert_eq!(exc[1].0, vec![0.5, 1.0]);
    }

    /// Double loop over cells and customers.
    fn brute_force(
        customers: &[CustomerRecord],
        labels: &Labels,
        spec: &GridSpec,
    ) -> BTreeMap<(usize, usize), (u64, u64, u64)> {
        let n = spec.cells_per_axis;
        let b = spec.bbox;
        let wx = b.longitude_span() / n as f64;
        let wy = b.latitude_span() / n as f64;
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let (mut c, mut ins, mut ntl) = (0, 0, 0);
                for cu in customers {
                    let in_x = (cu.longitude - b.min_longitude) / wx >= i as f64
                        && ((cu.longitude - b.min_longitude) / wx < (i + 1) as f64
                            || (i == n - 1 && cu.longitude <= b.max_longitude));
                    let in_y = (cu.latitude - b.min_latitude) / wy >= j as f64
                        && ((cu.latitude - b.min_latitude) / wy < (j + 1) as f64
                            || (j == n - 1 && cu.latitude <= b.max_latitude));
                    if in_x && in_y {
                        c += 1;
                        if let Some(&l) = labels.get(&cu.id) {
                            ins += 1;
                            ntl += u64::from(l);
                        }
                    }
                }
                if c > 0 {
                    out.insert((i, j), (c, ins, ntl));
                }
            }
        }
        out
    }

    fn random_instance(seed: u64, n: usize) -> (Vec<CustomerRecord>, Labels) {
        let mut rng = crate::seed::rng(seed);
        let cs: Vec<_> = (0..n)
            .map(|i| at(i as u64, rng.random_range(-49.0..-47.0), rng.random_range(-25.0..-20.0)))
            .collect();
        let mut labels = Labels::new();
        for c in &cs {
            if rng.random::<f64>() < 0.4 {
                labels.insert(c.id, rng.random::<f64>() < 0.3);
            }
        }
        (cs, labels)
    }

    #[test]
    fn counts_match_brute_force() {
        let (cs, labels) = random_instance(11, 200);
        let bbox = compute_bounding_box(&cs).unwrap();
        let spec = GridSpec::new(20, bbox).unwrap();
        let g = build_grid(&cs, &labels, &spec).unwrap();
        let oracle = brute_force(&cs, &labels, &spec);
        assert_eq!(g.len(), oracle.len());
        for s in g.cells() {
            let (c, ins, ntl) = oracle[&(s.i, s.j)];
            assert_eq!((s.num_customers, s.num_inspected, s.num_ntl), (c, ins, ntl));
            assert_eq!(s.inspected_ratio, inspected_ratio(ins, c));
            assert_eq!(s.ntl_ratio, ntl_ratio(ntl, ins));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn partition_and_consistency(seed in 0u64..1000, n in 1usize..400, cells in 1usize..60) {
            let (cs, labels) = random_instance(seed, n);
            let bbox = compute_bounding_box(&cs).unwrap();
            let g = build_grid(&cs, &labels, &GridSpec::new(cells, bbox).unwrap()).unwrap();
            let total: u64 = g.cells().map(|s| s.num_customers).sum();
            prop_assert_eq!(total as usize, n);
            let ntl: u64 = g.cells().map(|s| s.num_ntl).sum();
            prop_assert_eq!(ntl as usize, labels.values().filter(|&&l| l).count());
            for s in g.cells() {
                prop_assert!(s.num_ntl <= s.num_inspected && s.num_inspected <= s.num_customers);
                prop_assert!((0.0..=1.0).contains(&s.inspected_ratio));
                prop_assert!((0.0..=1.0).contains(&s.ntl_ratio));
            }
        }

        #[test]
        fn parallel_fold_matches_sequential(seed in 0u64..1000, workers in 1usize..9) {
            let (cs, labels) = random_instance(seed, 300);
            let bbox = compute_bounding_box(&cs).unwrap();
            let spec = GridSpec::new(25, bbox).unwrap();
            prop_assert_eq!(
                build_grid(&cs, &labels, &spec).unwrap(),
                build_grid_parallel(&cs, &labels, &spec, workers).unwrap()
            );
        }

        #[test]
        fn accumulator_merge_commutes(seed in 0u64..1000) {
            let (cs, labels) = random_instance(seed, 120);
            let spec = GridSpec::new(8, compute_bounding_box(&cs).unwrap()).unwrap();
            let mut parts = [GridAccumulator::default(), GridAccumulator::default(), GridAccumulator::default()];
            for (k, c) in cs.iter().enumerate() {
                parts[k % 3].add(spec.cell_of(c.longitude, c.latitude).unwrap(), labels.get(&c.id).copied());
            }
            let [a, b, c] = parts;
            let left = a.clone().merge(b.clone()).merge(c.clone());
            let right = c.merge(a.merge(b));
            prop_assert_eq!(left, right);
        }

        #[test]
        fn second_outlier_pass_keeps_a_subset(seed in 0u64..500) {
            let mut rng = crate::seed::rng(seed);
            let mut cs: Vec<_> = (0..200)
                .map(|i| at(i, rng.random::<f64>(), rng.random::<f64>()))
                .collect();
            cs.push(at(900, 50.0, 0.5));
            cs.push(at(901, 8.0, 0.5));
            let (first, _) = remove_coordinate_outliers(&cs, 3.0, OutlierRule::PerAxis).unwrap();
            let (second, _) = remove_coordinate_outliers(&first, 3.0, OutlierRule::PerAxis).unwrap();
            prop_assert!(second.len() <= first.len());
            prop_assert!(second.iter().all(|c| first.contains(c)));
        }
    }
}
