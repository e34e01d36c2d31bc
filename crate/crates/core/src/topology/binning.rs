//! Logarithmic binning of per-community properties by community size.

use serde::{Deserialize, Serialize};

use super::{CommunityProfile, TopologyError};

/// Per-community property that can be turned into a curve over size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommunityProperty {
    ScaledDensity,
    InternalTransitivity,
    AverageDistance,
    HubDominance,
}

impl CommunityProperty {
    pub const ALL: [CommunityProperty; 4] = [
        CommunityProperty::ScaledDensity,
        CommunityProperty::InternalTransitivity,
        CommunityProperty::AverageDistance,
        CommunityProperty::HubDominance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommunityProperty::ScaledDensity => "scaled_density",
            CommunityProperty::InternalTransitivity => "internal_transitivity",
            CommunityProperty::AverageDistance => "average_distance",
            CommunityProperty::HubDominance => "hub_dominance",
        }
    }

    pub fn value(self, profile: &CommunityProfile) -> Option<f64> {
        if profile.is_singleton() {
            return None;
        }
        match self {
            CommunityProperty::ScaledDensity => profile.scaled_density,
            CommunityProperty::InternalTransitivity => Some(profile.internal_transitivity),
            CommunityProperty::AverageDistance => profile.average_distance,
            CommunityProperty::HubDominance => profile.hub_dominance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub low: f64,
    pub high: f64,
    /// `None` marks an empty bin.
    pub mean: Option<f64>,
    pub count: usize,
}

/// A property averaged over logarithmic bins of community size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedSeries {
    pub property: String,
    pub bins: Vec<Bin>,
}

impl BinnedSeries {
    pub fn occupied(&self) -> impl Iterator<Item = &Bin> {
        self.bins.iter().filter(|b| b.count > 0)
    }
}

/// Bin edges `low * 10^(k / bins_per_decade)` covering `[low, high]`.
struct LogBins {
    low: f64,
    per_decade: f64,
    count: usize,
}

impl LogBins {
    fn new(low: usize, high: usize, bins_per_decade: usize) -> Self {
        let mut bins = Self {
            low: low as f64,
            per_decade: bins_per_decade.max(1) as f64,
            count: 0,
        };
        bins.count = bins.index(high) + 1;
        bins
    }

    fn index(&self, size: usize) -> usize {
        let x = (size as f64 / self.low).log10() * self.per_decade;
        // Sizes sitting exactly on an edge belong to the upper bin.
        (x + 1e-9).floor().max(0.0) as usize
    }

    fn edge(&self, k: usize) -> f64 {
        self.low * 10f64.powf(k as f64 / self.per_decade)
    }
}

/// Arithmetic mean of `property` over the communities falling in each bin.
/// Singleton communities and undefined values are skipped.
pub fn bin_by_size(
    profiles: &[CommunityProfile],
    property: CommunityProperty,
    bins_per_decade: usize,
) -> Result<BinnedSeries, TopologyError> {
    let points: Vec<(usize, f64)> = profiles
        .iter()
        .filter_map(|p| property.value(p).map(|v| (p.size, v)))
        .collect();
    let low = points
        .iter()
        .map(|p| p.0)
        .min()
        .ok_or(TopologyError::NothingToBin)?;
    let high = points.iter().map(|p| p.0).max().unwrap();
    let bins = LogBins::new(low, high, bins_per_decade);
    let mut sums = vec![(0.0, 0usize); bins.count];
    for (size, value) in points {
        let slot = &mut sums[bins.index(size)];
        slot.0 += value;
        slot.1 += 1;
    }
    Ok(BinnedSeries {
        property: property.name().to_string(),
        bins: sums
            .into_iter()
            .enumerate()
            .map(|(k, (sum, count))| Bin {
                low: bins.edge(k),
                high: bins.edge(k + 1),
                mean: (count > 0).then(|| sum / count as f64),
                count,
            })
            .collect(),
    })
}

/// Community size distribution over logarithmic bins. `mean` holds the
/// empirical probability density (community fraction per unit of size), so
/// a power law shows up as a straight line on log-log axes. Singletons are
/// included.
pub fn size_distribution(sizes: &[usize], bins_per_decade: usize) -> Option<BinnedSeries> {
    let low = sizes.iter().copied().filter(|&s| s > 0).min()?;
    let high = *sizes.iter().max()?;
    let bins = LogBins::new(low, high, bins_per_decade);
    let mut counts = vec![0usize; bins.count];
    let total = sizes.iter().filter(|&&s| s > 0).count() as f64;
    for &s in sizes.iter().filter(|&&s| s > 0) {
        counts[bins.index(s)] += 1;
    }
    Some(BinnedSeries {
        property: "community_size".to_string(),
        bins: counts
            .into_iter()
            .enumerate()
            .map(|(k, count)| {
                let (lo, hi) = (bins.edge(k), bins.edge(k + 1));
                Bin {
                    low: lo,
                    high: hi,
                    mean: (count > 0).then(|| count as f64 / total / (hi - lo)),
                    count,
                }
            })
            .collect(),
    })
}
