#pragma once

#include <string>
#include <vector>

namespace agecode {

// Formats with 12 significant digits, the fixed precision for all emitted
// floats. Output is locale-independent.
std::string format_double(double v);

// One probability per line, '#' comments and blank lines ignored.
std::vector<double> load_probability_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace agecode
