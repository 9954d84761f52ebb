#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace curvosc_cli {

/// Floats in text outputs carry 17 significant digits so every value
/// round-trips bit-exactly and repeated runs diff clean.
inline std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// A report is an ordered list of key/value pairs; values are kept as
/// preformatted strings so text and JSON renderings agree.
struct Record {
    std::vector<std::pair<std::string, std::string>> fields;

    void add(const std::string& key, const std::string& value) { fields.emplace_back(key, value); }
    void add(const std::string& key, double value) { fields.emplace_back(key, g17(value)); }
    void add(const std::string& key, int value) { fields.emplace_back(key, std::to_string(value)); }
};

inline void write_kv(std::ostream& os, const Record& r) {
    for (const auto& [k, v] : r.fields) os << k << "=" << v << "\n";
}

/// Stream to --out PATH or stdout.
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw std::invalid_argument("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

}  // namespace curvosc_cli
