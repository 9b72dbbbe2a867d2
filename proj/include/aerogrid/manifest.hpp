#pragma once

#include <string>
#include <vector>

namespace aerogrid::manifest {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

struct Entry {
  std::string path;
  std::string sha256;
  std::string config_hash;  // outputs only: the config that produced the file
  bool operator==(const Entry&) const = default;
};

// Content inventory of a run directory. Commands merge into the existing
// manifest: entries are keyed by path, kept sorted, and carry no timestamps
// so reruns are byte-identical.
struct Manifest {
  std::string config_hash;
  std::vector<Entry> inputs;
  std::vector<Entry> outputs;

  void record_input(const std::string& rel_path, const std::string& file_path);
  void record_output(const std::string& rel_path, const std::string& file_path,
                     const std::string& produced_by);

  std::string to_json() const;
  static Manifest from_json(const std::string& text, const std::string& origin);

  // Missing file loads as an empty manifest.
  static Manifest load(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace aerogrid::manifest
