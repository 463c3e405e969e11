#pragma once

#include "rmtlab/common.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace rmtlab::io {

/// Shortest round-trip decimal; fixed format so reruns are byte-identical.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& s) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string());
    out << s;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

/// Rows of already-formatted cells.
class Csv {
  public:
    explicit Csv(std::string header) { buf_ = std::move(header) + "\n"; }
    template <class... Ts>
    void row(Ts&&... cells) {
        bool first = true;
        auto add = [&](auto&& c) {
            if (!first) buf_ += ',';
            first = false;
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, double>)
                buf_ += fmt(c);
            else if constexpr (std::is_integral_v<T>)
                buf_ += std::to_string(c);
            else
                buf_ += c;
        };
        (add(std::forward<Ts>(cells)), ...);
        buf_ += '\n';
    }
    void save(const std::filesystem::path& path) const { write_text(path, buf_); }

  private:
    std::string buf_;
};

} // namespace rmtlab::io
