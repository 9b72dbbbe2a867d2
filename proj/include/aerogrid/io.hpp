#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aerogrid/grid.hpp"

namespace aerogrid::io {

// Shortest round-trip decimal representation; never emits NaN/Inf.
std::string fmt_double(double v);
double parse_double(const std::string& s, const std::string& context);
int parse_int(const std::string& s, const std::string& context);

std::vector<std::string> split_csv_line(const std::string& line);

// ScalarField CSV:
//   channel,width,height
//   AQI,8,8
//   v,v,...   (one line per grid row)
void write_field(const ScalarField& field, const std::string& path);
std::string field_to_csv(const ScalarField& field);

// When `spec` is given its dimensions must match the file; its bounding box
// wins (the CSV stores no geography). Without it the default box is used.
ScalarField read_field(const std::string& path,
                       std::optional<GridSpec> spec = std::nullopt);
ScalarField field_from_csv(const std::string& text, const std::string& origin,
                           std::optional<GridSpec> spec = std::nullopt);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace aerogrid::io
