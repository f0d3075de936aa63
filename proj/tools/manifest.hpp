#pragma once

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mar/error.hpp"

namespace mar::cli {

// Ordered key = value record written next to every run's outputs. Keys
// starting with "time." carry wall-clock measurements; everything else is a
// pure function of the flags.
class Manifest {
public:
    void set(const std::string& key, const std::string& value) {
        for (auto& entry : entries_) {
            if (entry.first == key) {
                entry.second = value;
                return;
            }
        }
        entries_.emplace_back(key, value);
    }

    void set(const std::string& key, double value) {
        std::ostringstream s;
        s.precision(17);
        s << value;
        set(key, s.str());
    }

    void set(const std::string& key, long long value) { set(key, std::to_string(value)); }
    void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, const char* value) { set(key, std::string(value)); }

    void write(const std::filesystem::path& path) const {
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw IoError("cannot write manifest " + path.string());
        for (const auto& [k, v] : entries_) std::fprintf(f, "%s = %s\n", k.c_str(), v.c_str());
        std::fclose(f);
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace mar::cli
