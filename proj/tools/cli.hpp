#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bcsl/channel.hpp"

namespace bcsl::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDomain = 1;  // violated precondition, infeasible config, bad input file
inline constexpr int kUsage = 2;

// args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::string& path);
Channel3 parse_channel(const std::string& path);

}  // namespace bcsl::cli
