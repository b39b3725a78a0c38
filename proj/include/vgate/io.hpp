#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace vgate {

using ojson = nlohmann::ordered_json;

/// Version string embedded in provenance headers.
inline constexpr const char* version = "0.1.0";

/// Write `content` to `path` atomically: the bytes go to a sibling temp file
/// first and are renamed over the target, so an interrupted run never leaves
/// a torn output file.
void atomic_write(const std::string& path, const std::string& content);

/// Provenance block for emitted tables: tool version, the command, a
/// parameter echo, and the RNG seed where one is in play. Deliberately no
/// timestamps -- reruns with identical inputs must produce identical bytes.
struct Provenance {
    std::string command;
    std::vector<std::pair<std::string, std::string>> params;
    std::uint64_t seed = 0;
    bool has_seed = false;

    /// "# ..." comment lines, LF line endings.
    std::string header() const;
};

/// Shortest-round-trip decimal rendering of a double (printf %.17g).
std::string fmt_g17(double x);

/// A numeric CSV table: provenance header, a "# col1,col2,..." line, then
/// one row per line; %.17g cells, LF endings throughout.
struct CsvTable {
    Provenance prov;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string render() const;
    void write(const std::string& path) const;
};

/// Serialize ordered JSON (2-space indent, trailing newline) atomically.
void write_json(const std::string& path, const ojson& j);

/// Parse a JSON file, preserving object key order; throws ConfigError naming
/// the path when the file is missing or malformed.
ojson read_json_file(const std::string& path);

} // namespace vgate
