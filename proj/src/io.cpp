#include "vgate/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "vgate/errors.hpp"

namespace vgate {

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        // A pre-existing directory is fine; real failures surface on open.
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ConfigError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ignore;
        fs::remove(tmp, ignore);
        throw ConfigError("cannot rename temp file onto '" + path +
                          "': " + ec.message());
    }
}

std::string fmt_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string Provenance::header() const {
    std::string h = "# vgate ";
    h += version;
    h += '\n';
    if (!command.empty()) h += "# command: " + command + "\n";
    for (const auto& [key, value] : params) h += "# " + key + ": " + value + "\n";
    if (has_seed) h += "# seed: " + std::to_string(seed) + "\n";
    return h;
}

std::string CsvTable::render() const {
    std::string out = prov.header();
    out += "# ";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw ConfigError("csv row width disagrees with column count");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += fmt_g17(row[i]);
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::string& path) const {
    atomic_write(path, render());
}

void write_json(const std::string& path, const ojson& j) {
    atomic_write(path, j.dump(2) + "\n");
}

ojson read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    ojson j = ojson::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("invalid JSON in '" + path + "'");
    return j;
}

} // namespace vgate
