// Experiment output: versioned CSV time series and a flat key-value summary.
// The CSV header comment carries the schema version and the configuration
// hash so a results file can always be traced to the inputs that made it.

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlspin {

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)(v));
    return buf;
}

class csv_writer {
  public:
    csv_writer(const std::string& path, const std::string& experiment,
               std::uint64_t config_hash, const std::vector<std::string>& columns)
        : out_(path), ncols_(columns.size()) {
        if (!out_) throw std::runtime_error("csv: cannot open '" + path + "'");
        if (columns.empty()) throw std::invalid_argument("csv: no columns");
        out_ << "# mlspin-csv v1 experiment=" << experiment << " config=" << hex64(config_hash)
             << "\n";
        for (std::size_t i = 0; i < columns.size(); i++)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }

    void row(const std::vector<double>& values) {
        if (values.size() != ncols_) throw std::invalid_argument("csv: row width mismatch");
        char buf[32];
        for (std::size_t i = 0; i < values.size(); i++) {
            std::snprintf(buf, sizeof buf, "%.16e", values[i]);
            out_ << buf << (i + 1 < values.size() ? "," : "\n");
        }
    }

  private:
    std::ofstream out_;
    std::size_t ncols_;
};

// Ordered key-value summary ("key = value" lines), one file per run.
class summary_writer {
  public:
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    void set(const std::string& key, double value) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", value);
        kv_[key] = buf;
    }
    void set(const std::string& key, bool pass) { kv_[key] = pass ? "pass" : "fail"; }

    bool all_passed() const {
        for (const auto& [k, v] : kv_)
            if (v == "fail") return false;
        return true;
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("summary: cannot open '" + path + "'");
        for (const auto& [k, v] : kv_) out << k << " = " << v << "\n";
    }

    const std::map<std::string, std::string>& entries() const { return kv_; }

  private:
    std::map<std::string, std::string> kv_;
};

}    // namespace mlspin
