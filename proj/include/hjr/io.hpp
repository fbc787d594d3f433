#pragma once

// On-disk formats.
//
// Checkpoint: one JSON document
//   {"version": "1", "n": int, "gamma": [n], "theta0": [n], "p": [n*n, row-major],
//    "q": [n], "r": double|null, "elapsed": double, "metadata": {string: string}}
// Doubles are written in shortest round-trip form, so read(write(c)) == c.
//
// Block stream: JSON Lines, {"phi": [[...], ...], "y": [...], "lambda": 1.0}
// per line. Unknown keys are ignored; "lambda" defaults to 1.

#include "hjr/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hjr {

// Unreadable file or malformed content.
class IoError : public Error {
public:
  using Error::Error;
};

std::string checkpoint_to_string(const Checkpoint& c, bool pretty = false);
Checkpoint checkpoint_from_string(const std::string& text);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::filesystem::path& path);

std::string block_to_line(const DataBlock& b);
DataBlock block_from_line(const std::string& line);
std::vector<DataBlock> parse_blocks(std::istream& in);
std::vector<DataBlock> read_blocks(const std::filesystem::path& path);
void write_blocks(std::ostream& out, std::span<const DataBlock> blocks);
void write_blocks(const std::filesystem::path& path, std::span<const DataBlock> blocks);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Comma-separated doubles with round-trip precision.
std::string format_double(double v);

} // namespace hjr
