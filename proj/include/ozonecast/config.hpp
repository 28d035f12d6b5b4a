#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ozonecast/table.hpp"

namespace ozonecast {

/// Flat, ordered key=value store; the CLI's --set flags and config files
/// both land here. Values are kept verbatim so files round-trip exactly.
class KeyValues {
  public:
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    const std::map<std::string, std::string>& items() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

struct RunConfig {
    std::string data;             // input CSV path
    std::string out = ".";        // output directory (file path for synth)
    int approach = 1;
    SplitSpec split;
    std::uint64_t seed = 0;
    std::vector<std::string> models;  // empty = full roster
    int threads = 0;                  // 0 = hardware default
    KeyValues overrides;              // model.param=value

    /// Canonical key=value serialization; parse(serialize(c)) == c.
    std::string serialize() const;
    static RunConfig parse_text(const std::string& text);
    static RunConfig load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// FNV-1a hash of the canonical serialization, as 16 hex digits.
    std::string fingerprint() const;
};

}  // namespace ozonecast
