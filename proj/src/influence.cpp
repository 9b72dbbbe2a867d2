#include "aerogrid/influence.hpp"

#include <algorithm>
#include <cmath>

namespace aerogrid::influence {

void validate_kernel(const KernelParams& k) {
  if (!std::isfinite(k.weight) || k.weight < 0.0) {
    throw ValidationError("kernel weight must be finite and >= 0");
  }
  if (!std::isfinite(k.sigma_cells) || k.sigma_cells <= 0.0) {
    throw ValidationError("kernel sigma_cells must be > 0");
  }
}

KernelParams default_kernel(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Population: return {1.0, 0.5};
    case FeatureKind::Traffic: return {1.0, 0.25};
    case FeatureKind::Industrial: return {1.0, 0.15};
    case FeatureKind::Green: return {1.0, 0.7};
  }
  throw DomainError("unknown feature kind");
}

double radial_influence(CellIndex center, CellIndex cell, double r, double max_value) {
  if (!(r > 0.0)) throw DomainError("radial influence radius must be > 0");
  double d = euclidean_cells(center, cell);
  return std::max(0.0, 1.0 - d / r) * max_value;
}

namespace {

struct SitePos {
  double row, col;
  double magnitude;
  double radius_cells;
};

SitePos locate(const FeatureSite& s, const GridSpec& spec) {
  double row = (s.location.lat - spec.lat_min) / (spec.lat_max - spec.lat_min) *
               (spec.height - 1);
  double col = (s.location.lon - spec.lon_min) / (spec.lon_max - spec.lon_min) *
               (spec.width - 1);
  return {row, col, s.magnitude, s.radius_cells};
}

double distance_to(const SitePos& s, CellIndex cell) {
  double dr = cell.x - s.row;
  double dc = cell.y - s.col;
  return std::sqrt(dr * dr + dc * dc);
}

}  // namespace

namespace {

double gaussian_at(double d, const KernelParams& k) {
  return k.weight * std::exp(-(d * d) / (2.0 * k.sigma_cells * k.sigma_cells));
}

}  // namespace

double gaussian_influence(const FeatureSite& site, CellIndex cell,
                          const KernelParams& k, const GridSpec& spec) {
  validate_kernel(k);
  return gaussian_at(distance_to(locate(site, spec), cell), k);
}

std::vector<double> channel_accumulate(FeatureKind kind,
                                       const std::vector<FeatureSite>& sites,
                                       const GridSpec& spec, const KernelParams& k,
                                       KernelShape shape, Combine combine,
                                       double magnitude_scale) {
  spec.validate();
  validate_kernel(k);
  std::vector<double> acc(spec.cell_count(), 0.0);
  if (sites.empty()) return acc;

  double scale = magnitude_scale;
  if (scale == 0.0) {
    for (const auto& s : sites) scale = std::max(scale, s.magnitude);
  }
  if (scale <= 0.0) return acc;  // all magnitudes zero

  std::vector<SitePos> pos;
  pos.reserve(sites.size());
  for (const auto& s : sites) {
    if (s.kind != kind) {
      throw DomainError(std::string("site of kind ") + feature_kind_name(s.kind) +
                        " in a " + feature_kind_name(kind) + " channel build");
    }
    ingest::validate_site(s);
    pos.push_back(locate(s, spec));
  }

  for (int x = 0; x < spec.height; ++x) {
    for (int y = 0; y < spec.width; ++y) {
      double v = 0.0;
      for (const auto& s : pos) {
        double d = distance_to(s, {x, y});
        double kernel = (shape == KernelShape::Gaussian)
                            ? gaussian_at(d, k)
                            : std::max(0.0, 1.0 - d / s.radius_cells) * k.weight;
        double contribution = (s.magnitude / scale) * kernel;
        v = (combine == Combine::Max) ? std::max(v, contribution) : v + contribution;
      }
      acc[flat_index(spec, {x, y})] = v;
    }
  }
  return acc;
}

ScalarField build_channel(FeatureKind kind, const std::vector<FeatureSite>& sites,
                          const GridSpec& spec, const KernelParams& k,
                          KernelShape shape, Combine combine, double magnitude_scale) {
  auto acc = channel_accumulate(kind, sites, spec, k, shape, combine, magnitude_scale);
  for (double& v : acc) v = std::clamp(v, 0.0, 1.0);
  return ScalarField(spec, channel_of(kind), std::move(acc));
}

ScalarField build_channel_max(FeatureKind kind, const std::vector<FeatureSite>& sites,
                              const GridSpec& spec, const KernelParams& k,
                              double magnitude_scale) {
  return build_channel(kind, sites, spec, k, KernelShape::Gaussian, Combine::Max,
                       magnitude_scale);
}

ScalarField build_channel_sum(FeatureKind kind, const std::vector<FeatureSite>& sites,
                              const GridSpec& spec, const KernelParams& k,
                              double magnitude_scale) {
  return build_channel(kind, sites, spec, k, KernelShape::Gaussian, Combine::Sum,
                       magnitude_scale);
}

}  // namespace aerogrid::influence
