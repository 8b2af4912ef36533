#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "machlimit/errors.hpp"

namespace machlimit {

// Shortest round-trip-exact decimal form; keeps reports byte-stable.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

// Plain CSV with '#'-prefixed metadata lines; the only report format emitted.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw ValidationError("cannot open output file '" + path + "'");
    }

    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void provenance(const std::vector<std::pair<std::string, std::string>>& kv) {
        for (const auto& [k, v] : kv) out_ << "# " << k << " = " << v << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

}  // namespace machlimit
