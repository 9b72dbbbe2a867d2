#include "aerogrid/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>

#include "aerogrid/errors.hpp"
#include "aerogrid/io.hpp"
#include "json.hpp"

namespace aerogrid::manifest {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw IoError("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  return sha256_hex(io::read_text_file(path));
}

namespace {

void upsert(std::vector<Entry>& entries, Entry e) {
  for (Entry& existing : entries) {
    if (existing.path == e.path) {
      existing = std::move(e);
      return;
    }
  }
  entries.push_back(std::move(e));
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.path < b.path; });
}

}  // namespace

void Manifest::record_input(const std::string& rel_path,
                            const std::string& file_path) {
  upsert(inputs, Entry{rel_path, sha256_file(file_path), ""});
}

void Manifest::record_output(const std::string& rel_path,
                             const std::string& file_path,
                             const std::string& produced_by) {
  upsert(outputs, Entry{rel_path, sha256_file(file_path), produced_by});
}

std::string Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["inputs"] = nlohmann::ordered_json::array();
  for (const Entry& e : inputs) {
    j["inputs"].push_back({{"path", e.path}, {"sha256", e.sha256}});
  }
  j["outputs"] = nlohmann::ordered_json::array();
  for (const Entry& e : outputs) {
    j["outputs"].push_back({{"path", e.path},
                            {"sha256", e.sha256},
                            {"config_hash", e.config_hash}});
  }
  return j.dump(2) + "\n";
}

Manifest Manifest::from_json(const std::string& text,
                             const std::string& origin) {
  try {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(text);
    Manifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& e : j.at("inputs")) {
      m.inputs.push_back(Entry{e.at("path").get<std::string>(),
                               e.at("sha256").get<std::string>(), ""});
    }
    for (const auto& e : j.at("outputs")) {
      m.outputs.push_back(Entry{e.at("path").get<std::string>(),
                                e.at("sha256").get<std::string>(),
                                e.at("config_hash").get<std::string>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

Manifest Manifest::load(const std::string& path) {
  if (!std::filesystem::exists(path)) return Manifest{};
  return from_json(io::read_text_file(path), path);
}

void Manifest::save(const std::string& path) const {
  io::write_text_file(path, to_json());
}

}  // namespace aerogrid::manifest
