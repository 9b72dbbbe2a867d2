#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "aerogrid/booth.hpp"
#include "aerogrid/config.hpp"
#include "aerogrid/grid.hpp"
#include "aerogrid/metrics.hpp"
#include "aerogrid/pipeline.hpp"

namespace py = pybind11;

namespace {

using namespace aerogrid;

config::RunConfig parse_cfg(const std::string& text) {
  return config::config_from_json(text, "<config>");
}

std::vector<std::pair<int, int>> cells_of(const booth::Placement& p) {
  std::vector<std::pair<int, int>> out;
  out.reserve(p.cells.size());
  for (CellIndex c : p.cells) out.emplace_back(c.x, c.y);
  return out;
}

booth::Placement placement_of(const std::vector<std::pair<int, int>>& cells) {
  booth::Placement p;
  for (auto [x, y] : cells) p.cells.push_back(CellIndex{x, y});
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Constrained air-purification booth placement pipeline";

  m.def("default_config", [] {
    return config::config_to_json(config::default_config());
  });
  m.def("config_hash",
        [](const std::string& text) { return config::config_hash(parse_cfg(text)); },
        py::arg("config"));

  m.def("synth",
        [](const std::string& text) { pipeline::cmd_synth(parse_cfg(text)); },
        py::arg("config"));
  m.def("ingest",
        [](const std::string& text, bool self_check) {
          pipeline::cmd_ingest(parse_cfg(text), self_check);
        },
        py::arg("config"), py::arg("self_check") = false);
  m.def("train",
        [](const std::string& text) {
          ppo::TrainLog log = pipeline::cmd_train(parse_cfg(text));
          std::vector<double> rewards;
          rewards.reserve(log.episodes.size());
          for (const ppo::EpisodeLog& e : log.episodes) {
            rewards.push_back(e.reward);
          }
          return rewards;
        },
        py::arg("config"));
  m.def("place",
        [](const std::string& text, const std::string& strategy) {
          return cells_of(pipeline::cmd_place(
              parse_cfg(text), booth::strategy_from_name(strategy)));
        },
        py::arg("config"), py::arg("strategy"));
  m.def("evaluate",
        [](const std::string& text, const std::string& strategy) {
          return metrics::report_to_json(pipeline::cmd_evaluate(
              parse_cfg(text), booth::strategy_from_name(strategy)));
        },
        py::arg("config"), py::arg("strategy"));
  m.def("compare",
        [](const std::string& text) {
          return metrics::comparison_csv(pipeline::cmd_compare(parse_cfg(text)));
        },
        py::arg("config"));

  m.def("haversine_km",
        [](double lat1, double lon1, double lat2, double lon2) {
          return haversine_km(GeoPoint{lat1, lon1}, GeoPoint{lat2, lon2});
        },
        py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"));
  m.def("booth_effect",
        [](std::vector<double> aqi, int width, int height, int x, int y,
           double alpha, double sigma) {
          GridSpec spec;
          spec.width = width;
          spec.height = height;
          ScalarField field(spec, Channel::AQI, std::move(aqi));
          booth::BoothParams params{alpha, sigma};
          return booth::apply_booth_effect(field, CellIndex{x, y}, params)
              .values();
        },
        py::arg("aqi"), py::arg("width"), py::arg("height"), py::arg("x"),
        py::arg("y"), py::arg("alpha") = 0.6, py::arg("sigma") = 2.0);
  m.def("spatial_entropy",
        [](const std::vector<std::pair<int, int>>& cells, int width,
           int height) {
          GridSpec spec;
          spec.width = width;
          spec.height = height;
          return metrics::spatial_entropy(placement_of(cells), spec);
        },
        py::arg("cells"), py::arg("width"), py::arg("height"));
}
