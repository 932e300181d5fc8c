#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bcft/types.hpp"

namespace bcft {

// Exit codes
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// Accepts "1.5", "-0.2i", "1.25+0.1i", "1.25-0.1j" and "(1.25,0.1)".
cplx parse_complex(const std::string& text);

// Flat key/value settings read from a TOML-style file with the sections
// [tolerances], [mc] and [contour]; keys outside a section go under "".
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;
  const std::string* find(const std::string& section, const std::string& key) const;
};
ConfigFile read_config_file(const std::string& path);

// args excludes the program name.  Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bcft
