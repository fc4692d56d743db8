#pragma once

#include <cstdarg>
#include <filesystem>
#include <string>
#include <vector>

namespace swingshot {

// All artifacts are written atomically: content goes to a temp file in the
// same directory, then rename() replaces the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

// printf-style append helper for building text artifacts.
void appendf(std::string& out, const char* fmt, ...)
#if defined(__GNUC__)
    __attribute__((format(printf, 2, 3)))
#endif
    ;

// Floats in line-oriented artifacts are printed with 9 significant digits.
std::string fmt_g9(double v);
// Checkpoint parameters round-trip exactly: 17 digits for double, 9 for float.
std::string fmt_g17(double v);

std::vector<std::string> split_lines(const std::string& text);
std::vector<std::string> split_fields(const std::string& line);

}  // namespace swingshot
