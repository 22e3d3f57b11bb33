#pragma once
// JSON-lines file helpers used by every persistence path.

#include <fstream>
#include <functional>
#include <string>

#include "kbfresh/error.hpp"

namespace kbfresh {

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

// Calls fn(line_number, line) for each line; skips blank lines.
inline void for_each_line(const std::string& path,
                          const std::function<void(std::size_t, const std::string&)>& fn) {
    auto in = open_input(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fn(lineno, line);
    }
}

}  // namespace kbfresh
