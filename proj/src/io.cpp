#include "aerogrid/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace aerogrid::io {

std::string fmt_double(double v) {
  if (!std::isfinite(v)) throw NumericError("refusing to serialize a non-finite value");
  std::array<char, 32> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw ValidationError(context + ": cannot parse number from '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& context) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ValidationError(context + ": cannot parse integer from '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string field_to_csv(const ScalarField& field) {
  std::ostringstream out;
  out << "channel,width,height\n";
  out << channel_name(field.channel()) << ',' << field.spec().width << ','
      << field.spec().height << '\n';
  const auto& v = field.values();
  for (int x = 0; x < field.spec().height; ++x) {
    for (int y = 0; y < field.spec().width; ++y) {
      if (y) out << ',';
      out << fmt_double(v[flat_index(field.spec(), {x, y})]);
    }
    out << '\n';
  }
  return out.str();
}

void write_field(const ScalarField& field, const std::string& path) {
  write_text_file(path, field_to_csv(field));
}

ScalarField field_from_csv(const std::string& text, const std::string& origin,
                           std::optional<GridSpec> spec) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) {
      throw ValidationError(origin + ": truncated field CSV at line " +
                            std::to_string(lineno + 1));
    }
    ++lineno;
  };

  next_line();
  if (split_csv_line(line) != std::vector<std::string>{"channel", "width", "height"}) {
    throw ValidationError(origin + ":1: expected header 'channel,width,height'");
  }
  next_line();
  auto meta = split_csv_line(line);
  if (meta.size() != 3) {
    throw ValidationError(origin + ":2: expected 'name,width,height'");
  }
  Channel channel = channel_from_name(meta[0]);
  int width = parse_int(meta[1], origin + ":2");
  int height = parse_int(meta[2], origin + ":2");

  GridSpec gs;
  if (spec) {
    gs = *spec;
    if (gs.width != width || gs.height != height) {
      throw ValidationError(origin + ": file is " + std::to_string(width) + "x" +
                            std::to_string(height) + " but config grid is " +
                            std::to_string(gs.width) + "x" + std::to_string(gs.height));
    }
  } else {
    gs.width = width;
    gs.height = height;
  }
  gs.validate();

  std::vector<double> values;
  values.reserve(gs.cell_count());
  for (int x = 0; x < height; ++x) {
    next_line();
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != width) {
      throw ValidationError(origin + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(width) + " values, got " +
                            std::to_string(cells.size()));
    }
    for (auto& c : cells) {
      values.push_back(parse_double(c, origin + ":" + std::to_string(lineno)));
    }
  }
  return ScalarField(gs, channel, std::move(values));
}

ScalarField read_field(const std::string& path, std::optional<GridSpec> spec) {
  return field_from_csv(read_text_file(path), path, spec);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("short write to " + path);
}

}  // namespace aerogrid::io
