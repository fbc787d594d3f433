#include "hjr/io.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hjr {
namespace {

using nlohmann::json;

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vec_from(const json& j, const char* key, Index expected) {
  if (!j.contains(key) || !j.at(key).is_array()) throw IoError(std::string("missing array '") + key + "'");
  const json& a = j.at(key);
  if (expected >= 0 && static_cast<Index>(a.size()) != expected) {
    throw IoError(std::string("'") + key + "' has " + std::to_string(a.size()) + " entries, expected " +
                  std::to_string(expected));
  }
  Vector v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw IoError(std::string("non-numeric entry in '") + key + "'");
    v(static_cast<Index>(i)) = a[i].get<double>();
  }
  return v;
}

} // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string checkpoint_to_string(const Checkpoint& c, bool pretty) {
  const Index n = c.n();
  json j;
  j["version"] = c.version;
  j["n"] = n;
  j["gamma"] = vec_json(c.hyper.gamma);
  j["theta0"] = vec_json(c.hyper.theta0);
  j["p"] = json(std::vector<double>(c.state.p.data(), c.state.p.data() + c.state.p.size()));
  j["q"] = vec_json(c.state.q);
  j["r"] = c.state.r ? json(*c.state.r) : json(nullptr);
  j["elapsed"] = c.state.elapsed;
  j["metadata"] = c.metadata;
  return j.dump(pretty ? 2 : -1);
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    Checkpoint c;
    c.version = j.at("version").get<std::string>();
    if (c.version != "1") throw IoError("unsupported checkpoint version '" + c.version + "'");
    const auto n = j.at("n").get<Index>();
    if (n < 0) throw IoError("checkpoint n is negative");
    c.hyper.gamma = vec_from(j, "gamma", n);
    c.hyper.theta0 = vec_from(j, "theta0", n);
    const Vector p = vec_from(j, "p", n * n);
    c.state.p = Eigen::Map<const Matrix>(p.data(), n, n);
    c.state.q = vec_from(j, "q", n);
    if (j.contains("r") && !j.at("r").is_null()) c.state.r = j.at("r").get<double>();
    c.state.elapsed = j.value("elapsed", 0.0);
    if (j.contains("metadata")) c.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    return c;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed checkpoint: ") + e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  write_text(path, checkpoint_to_string(c, true) + "\n");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return checkpoint_from_string(read_text(path)); }

std::string block_to_line(const DataBlock& b) {
  json rows = json::array();
  for (Index i = 0; i < b.phi.rows(); ++i) {
    rows.push_back(std::vector<double>(b.phi.row(i).data(), b.phi.row(i).data() + b.phi.cols()));
  }
  json j;
  j["phi"] = std::move(rows);
  j["y"] = vec_json(b.y);
  j["lambda"] = b.lambda;
  return j.dump();
}

DataBlock block_from_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError(std::string("block is not valid JSON: ") + e.what());
  }
  try {
    DataBlock b;
    const json& rows = j.at("phi");
    if (!rows.is_array()) throw IoError("'phi' must be an array of rows");
    const auto m = static_cast<Index>(rows.size());
    const Index n = m > 0 ? static_cast<Index>(rows.at(0).size()) : 0;
    b.phi.resize(m, n);
    for (Index i = 0; i < m; ++i) {
      const json& row = rows.at(static_cast<std::size_t>(i));
      if (!row.is_array() || static_cast<Index>(row.size()) != n) throw IoError("'phi' rows have unequal length");
      for (Index k = 0; k < n; ++k) b.phi(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    b.y = vec_from(j, "y", -1);
    if (b.y.size() != m) throw IoError("'y' has " + std::to_string(b.y.size()) + " entries for " + std::to_string(m) + " rows");
    b.lambda = j.value("lambda", 1.0);
    return b;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed block: ") + e.what());
  }
}

std::vector<DataBlock> parse_blocks(std::istream& in) {
  std::vector<DataBlock> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(block_from_line(line));
    } catch (const IoError& e) {
      throw IoError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<DataBlock> read_blocks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return parse_blocks(in);
}

void write_blocks(std::ostream& out, std::span<const DataBlock> blocks) {
  for (const auto& b : blocks) out << block_to_line(b) << '\n';
}

void write_blocks(const std::filesystem::path& path, std::span<const DataBlock> blocks) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_blocks(out, blocks);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace hjr
