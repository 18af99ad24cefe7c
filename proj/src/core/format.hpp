#pragma once
#include <cstdarg>
#include <cstdio>
#include <string>

namespace stochham {

// printf-style formatting into std::string (the toolchain baseline lacks
// std::format). All numeric text the artifact emits goes through here so the
// formatting is canonical and byte-stable across runs.
inline std::string strfmt(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    va_list args2;
    va_copy(args2, args);
    int need = std::vsnprintf(nullptr, 0, fmt, args);
    va_end(args);
    std::string out(need > 0 ? static_cast<size_t>(need) : 0, '\0');
    if (need > 0) std::vsnprintf(out.data(), out.size() + 1, fmt, args2);
    va_end(args2);
    return out;
}

// Canonical float renderings: g17 round-trips doubles exactly (CSV contract,
// 17 significant digits); g6 is the compact form used in SVG coordinates.
inline std::string g17(double v) { return strfmt("%.17g", v); }
inline std::string g6(double v) { return strfmt("%.6g", v); }

} // namespace stochham
