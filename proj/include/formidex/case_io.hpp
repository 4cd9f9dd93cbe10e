#pragma once

// JSON case and device files. Unknown keys are rejected and every error
// names the offending field.

#include <string>
#include <string_view>

#include "formidex/network.hpp"

namespace formidex {

/// Parses and validates a case document.
NetworkCase parse_case(std::string_view text);
NetworkCase load_case_file(const std::string& path);

/// Standalone device: {"strategy", "params", "operating_point"}.
ConverterSpec parse_device(std::string_view text);
ConverterSpec load_device_file(const std::string& path);

/// Reads a whole file; ConfigError if it cannot be opened.
std::string read_text_file(const std::string& path);

}  // namespace formidex
