#pragma once

#include <vector>

#include "aerogrid/grid.hpp"
#include "aerogrid/ingest.hpp"

namespace aerogrid::influence {

using ingest::FeatureKind;
using ingest::FeatureSite;

struct KernelParams {
  double weight = 1.0;       // w_f
  double sigma_cells = 0.5;  // sigma_f, cell units
};

void validate_kernel(const KernelParams& k);

// Per-kind defaults: meter-denominated spreads at ~1 km/cell.
KernelParams default_kernel(FeatureKind kind);

enum class KernelShape { Gaussian, Radial };
enum class Combine { Max, Sum };

// Linear decay: max(0, 1 - d/r) * max_value.
double radial_influence(CellIndex center, CellIndex cell, double r, double max_value);

// w_f * exp(-d^2 / (2 sigma_f^2)), d from the site's continuous cell-space
// position to the cell.
double gaussian_influence(const FeatureSite& site, CellIndex cell,
                          const KernelParams& k, const GridSpec& spec);

// Pre-clamp accumulation. Each site contributes
//   (magnitude / scale) * kernel(d)
// where scale is magnitude_scale, or the max site magnitude when
// magnitude_scale == 0 (the density / max_density convention). Radial shape
// uses each site's own radius_cells as r. All sites must be of `kind`.
std::vector<double> channel_accumulate(FeatureKind kind,
                                       const std::vector<FeatureSite>& sites,
                                       const GridSpec& spec, const KernelParams& k,
                                       KernelShape shape, Combine combine,
                                       double magnitude_scale = 0.0);

// channel_accumulate clamped into [0, 1] and wrapped as the kind's channel.
ScalarField build_channel(FeatureKind kind, const std::vector<FeatureSite>& sites,
                          const GridSpec& spec, const KernelParams& k,
                          KernelShape shape, Combine combine,
                          double magnitude_scale = 0.0);

// Gaussian kernel, per-cell max over sites.
ScalarField build_channel_max(FeatureKind kind, const std::vector<FeatureSite>& sites,
                              const GridSpec& spec, const KernelParams& k,
                              double magnitude_scale = 0.0);

// Gaussian kernel, per-cell sum over sites.
ScalarField build_channel_sum(FeatureKind kind, const std::vector<FeatureSite>& sites,
                              const GridSpec& spec, const KernelParams& k,
                              double magnitude_scale = 0.0);

}  // namespace aerogrid::influence
