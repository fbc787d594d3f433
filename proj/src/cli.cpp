#include "hjr/cli.hpp"

#include "hjr/basis.hpp"
#include "hjr/bench.hpp"
#include "hjr/io.hpp"
#include "hjr/kernels.hpp"
#include "hjr/lsq.hpp"
#include "hjr/pdhg.hpp"
#include "hjr/problems.hpp"
#include "hjr/riccati.hpp"
#include "hjr/rls.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace hjr {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 0;
  double step = 1e-3;
  std::string checkpoint;
  std::string out;
  bool pretty = false;
};

class UsageError : public Error {
public:
  using Error::Error;
};

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

// A single value broadcasts to all n entries.
Vector expand(const std::vector<double>& vals, Index n, const char* what) {
  if (vals.size() == 1) return Vector::Constant(n, vals[0]);
  if (static_cast<Index>(vals.size()) == n) return Eigen::Map<const Vector>(vals.data(), n);
  throw DimensionError(std::string(what) + " has " + std::to_string(vals.size()) + " entries, model has " +
                       std::to_string(n));
}

IntegrationConfig integration(const Globals& g) {
  IntegrationConfig cfg;
  cfg.step_h = g.step;
  cfg.validate();
  return cfg;
}

std::string require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
  return value;
}

json solution_json(const ModelSolution& s) {
  json j;
  j["theta"] = vec_json(s.theta_star);
  if (s.data_fit) j["data_fit"] = *s.data_fit;
  if (s.reg_value) j["reg_value"] = *s.reg_value;
  if (s.total_loss) j["total_loss"] = *s.total_loss;
  return j;
}

json write_and_report(const Checkpoint& c, const std::string& path) {
  write_checkpoint(path, c);
  json j = solution_json(extract_solution(c.state, c.hyper));
  j["checkpoint"] = path;
  if (auto l = recovered_loss(c.state, c.hyper)) j["total_loss"] = *l;
  return j;
}

// RLS view of a checkpoint; y_energy is recovered from r when present.
RlsState rls_from(const RiccatiState& s) {
  RlsState r{s.p, s.q, 0.0, s.elapsed};
  if (s.r) {
    Eigen::LLT<Matrix> llt(s.p);
    if (llt.info() != Eigen::Success) throw NumericalError("checkpoint P is not positive definite");
    r.y_energy = 0.5 * s.q.dot(llt.solve(s.q)) - *s.r;
  }
  return r;
}

RiccatiState riccati_from(const RlsState& s, bool had_r) {
  RiccatiState out = to_riccati(s);
  if (!had_r) out.r.reset();
  return out;
}

Index infer_n(const std::vector<DataBlock>& blocks, const std::string& basis_name, Index n_flag,
              std::size_t gamma_len, std::size_t theta_len) {
  if (!blocks.empty()) return blocks.front().cols();
  if (!basis_name.empty()) return basis(basis_name).n();
  if (n_flag > 0) return n_flag;
  if (gamma_len > 1) return static_cast<Index>(gamma_len);
  if (theta_len > 1) return static_cast<Index>(theta_len);
  throw UsageError("cannot infer the parameter count from an empty data file; pass --n or --basis");
}

void write_truth_csv(const fs::path& path, const GeneratedProblem& p, const char* grid_name) {
  std::ostringstream os;
  os << grid_name;
  for (const auto& s : p.truth) os << ',' << s.name;
  os << '\n';
  for (Index i = 0; i < p.eval_grid.size(); ++i) {
    os << format_double(p.eval_grid(i));
    for (const auto& s : p.truth) os << ',' << format_double(s.values(i));
    os << '\n';
  }
  write_text(path, os.str());
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) {
  fs::path p = base;
  const std::string stem = p.stem().string();
  p.replace_filename(stem + suffix + p.extension().string());
  return p;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

CsvTable read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      first = false;
      bool numeric = true;
      try {
        for (const auto& c : cells) (void)std::stod(c);
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) {
        t.header = cells;
        t.columns.resize(cells.size());
        continue;
      }
      t.columns.resize(cells.size());
      for (std::size_t k = 0; k < cells.size(); ++k) t.header.push_back("c" + std::to_string(k));
    }
    if (cells.size() != t.columns.size()) throw IoError("ragged CSV row in '" + path.string() + "'");
    for (std::size_t k = 0; k < cells.size(); ++k) {
      try {
        t.columns[k].push_back(std::stod(cells[k]));
      } catch (const std::exception&) {
        throw IoError("non-numeric CSV cell '" + cells[k] + "' in '" + path.string() + "'");
      }
    }
  }
  if (t.columns.empty()) throw IoError("empty CSV '" + path.string() + "'");
  return t;
}

void print_pretty(const json& j, std::ostream& out, const std::string& indent = "") {
  if (!j.is_object()) {
    out << indent << j.dump() << '\n';
    return;
  }
  std::vector<std::string> labels;
  if (j.contains("labels") && j.at("labels").is_array()) labels = j.at("labels").get<std::vector<std::string>>();
  for (const auto& [key, val] : j.items()) {
    if (key == "labels") continue;
    if (val.is_object()) {
      out << indent << key << ":\n";
      print_pretty(val, out, indent + "  ");
    } else if (val.is_array() && !val.empty() && val.front().is_number()) {
      out << indent << key << ":\n";
      for (std::size_t i = 0; i < val.size(); ++i) {
        out << indent << "  ";
        if (labels.size() == val.size()) {
          out << labels[i];
        } else {
          out << '[' << i << ']';
        }
        out << "  " << val[i].get<double>() << '\n';
      }
    } else if (val.is_array() && !val.empty() && val.front().is_object()) {
      for (std::size_t i = 0; i < val.size(); ++i) {
        out << indent << key << '[' << i << "]:\n";
        print_pretty(val[i], out, indent + "  ");
      }
    } else {
      out << indent << key << ": " << (val.is_string() ? val.get<std::string>() : val.dump()) << '\n';
    }
  }
}

// ---- subcommands ----------------------------------------------------------

struct GenArgs {
  std::string problem;
  std::int64_t count = 1000;
  double noise = -1.0;
  double lambda_b = 1.0;
  std::int64_t grid_count = 1000;
  double solver_h = 1e-4;
  double fd_h = 1e-3;
};

json cmd_gen(const Globals& g, const GenArgs& a) {
  const fs::path out = require(g.out, "--out");
  GeneratedProblem p;
  json j;
  const char* grid_name = "x";
  if (a.problem == "sin10x") {
    const double noise = a.noise < 0.0 ? 1.0 : a.noise;
    p = gen_sin10x(a.count, g.seed, noise);
    j["noise"] = noise;
  } else if (a.problem == "reaction-diffusion") {
    const double noise = a.noise < 0.0 ? 0.1 : a.noise;
    p = gen_reaction_diffusion(a.count, g.seed, noise, a.lambda_b);
    j["noise"] = noise;
    j["lambda_b"] = a.lambda_b;
  } else if (a.problem == "ko") {
    p = gen_ko(a.grid_count, a.solver_h, a.fd_h);
    grid_name = "t";
    j["grid_count"] = a.grid_count;
    j["solver_h"] = a.solver_h;
    j["fd_h"] = a.fd_h;
  } else {
    throw UsageError("unknown problem '" + a.problem + "' (expected sin10x, reaction-diffusion or ko)");
  }

  std::vector<std::string> files;
  if (a.problem == "ko") {
    for (int eq = 0; eq < 3; ++eq) {
      std::vector<DataBlock> sub;
      for (std::size_t i = 0; i < p.blocks.size(); ++i)
        if (p.groups[i] == eq) sub.push_back(p.blocks[i]);
      const fs::path f = with_suffix(out, ".eq" + std::to_string(eq + 1));
      write_blocks(f, sub);
      files.push_back(f.string());
    }
  } else if (a.problem == "reaction-diffusion") {
    std::vector<DataBlock> interior, boundary;
    for (std::size_t i = 0; i < p.blocks.size(); ++i) (p.groups[i] == 1 ? boundary : interior).push_back(p.blocks[i]);
    std::vector<DataBlock> all = interior;
    all.insert(all.end(), boundary.begin(), boundary.end());
    write_blocks(out, all);
    const fs::path bf = with_suffix(out, ".boundary");
    write_blocks(bf, boundary);
    files.push_back(out.string());
    files.push_back(bf.string());
  } else {
    write_blocks(out, p.blocks);
    files.push_back(out.string());
  }
  const fs::path truth = with_suffix(out, ".truth").replace_extension(".csv");
  write_truth_csv(truth, p, grid_name);

  j["problem"] = a.problem;
  j["seed"] = std::to_string(g.seed);
  j["basis"] = p.basis_name;
  j["blocks"] = p.blocks.size();
  j["files"] = files;
  j["truth_csv"] = truth.string();
  const fs::path manifest = with_suffix(out, ".manifest").replace_extension(".json");
  write_text(manifest, j.dump(2) + "\n");
  j["manifest"] = manifest.string();
  return j;
}

struct FitArgs {
  std::string data;
  std::vector<double> gamma{1.0};
  std::vector<double> theta0{0.0};
  std::string method = "riccati";
  std::string basis;
  Index n = 0;
};

json cmd_fit(const Globals& g, const FitArgs& a) {
  const std::string out = require(g.out, "--out");
  const std::vector<DataBlock> blocks = read_blocks(a.data);
  const Index n = infer_n(blocks, a.basis, a.n, a.gamma.size(), a.theta0.size());
  if (!a.basis.empty() && basis(a.basis).n() != n) throw DimensionError("basis size does not match the data");
  Hyperparams hyper{expand(a.gamma, n, "--gamma"), expand(a.theta0, n, "--theta0")};
  hyper.validate();
  validate_blocks(blocks, n);

  Checkpoint c;
  c.hyper = hyper;
  ModelSolution sol;
  if (a.method == "riccati") {
    c.state = fit(hyper, blocks, integration(g));
    sol = extract_solution(c.state, hyper, blocks);
  } else if (a.method == "rls") {
    c.state = to_riccati(rls_fit(hyper, blocks));
    sol = extract_solution(c.state, hyper, blocks);
  } else if (a.method == "lsq") {
    c.state = closed_form_state(hyper, blocks);
    sol = solve_direct(hyper, blocks);
  } else {
    throw UsageError("unknown method '" + a.method + "' (expected riccati, rls or lsq)");
  }
  c.metadata["method"] = a.method;
  c.metadata["seed"] = std::to_string(g.seed);
  c.metadata["step_size"] = format_double(g.step);
  c.metadata["source"] = a.data;
  c.metadata["blocks"] = std::to_string(blocks.size());
  if (!a.basis.empty()) c.metadata["basis"] = a.basis;
  write_checkpoint(out, c);

  json j = solution_json(sol);
  j["checkpoint"] = out;
  j["method"] = a.method;
  j["blocks"] = blocks.size();
  if (auto l = recovered_loss(c.state, hyper)) j["recovered_loss"] = *l;
  if (!a.basis.empty()) j["labels"] = basis(a.basis).labels();
  return j;
}

struct EditArgs {
  std::string data;
  std::string method = "riccati";
};

json cmd_edit(const Globals& g, const EditArgs& a, bool remove) {
  const std::string in = require(g.checkpoint, "--checkpoint");
  const std::string out = g.out.empty() ? in : g.out;
  Checkpoint c = read_checkpoint(in);
  const std::vector<DataBlock> blocks = read_blocks(a.data);
  validate_blocks(blocks, c.n());
  if (a.method == "riccati") {
    const IntegrationConfig cfg = integration(g);
    for (const auto& b : blocks) c.state = remove ? remove_block(c.state, b, cfg) : add_block(c.state, b, cfg);
  } else if (a.method == "rls") {
    const bool had_r = c.state.r.has_value();
    RlsState s = rls_from(c.state);
    for (const auto& b : blocks) s = remove ? rls_remove(s, b) : rls_add(s, b);
    c.state = riccati_from(s, had_r);
  } else {
    throw UsageError("unknown method '" + a.method + "' for " + (remove ? "remove" : "add") +
                     " (expected riccati or rls)");
  }
  const auto prev = c.metadata.find("blocks");
  if (prev != c.metadata.end()) {
    const long long count = std::stoll(prev->second) + (remove ? -1 : 1) * static_cast<long long>(blocks.size());
    prev->second = std::to_string(count);
  }
  json j = write_and_report(c, out);
  j["applied"] = blocks.size();
  return j;
}

struct TuneArgs {
  std::string lambda_block;
  std::vector<double> lambda;
  std::vector<double> gamma;
  std::string trace;
};

json cmd_tune(const Globals& g, const TuneArgs& a) {
  const std::string in = require(g.checkpoint, "--checkpoint");
  const std::string out = g.out.empty() ? in : g.out;
  Checkpoint c = read_checkpoint(in);
  const IntegrationConfig cfg = integration(g);
  const bool by_lambda = !a.lambda_block.empty();
  const bool by_gamma = !a.gamma.empty();
  if (by_lambda == by_gamma) throw UsageError("tune needs exactly one of --lambda-block or --gamma");
  json j;
  if (by_lambda) {
    if (a.lambda.size() != 2) throw UsageError("--lambda takes two values: OLD NEW");
    const std::vector<DataBlock> blocks = read_blocks(a.lambda_block);
    validate_blocks(blocks, c.n());
    for (const auto& b : blocks) c.state = tune_lambda(c.state, b, a.lambda[0], a.lambda[1], cfg);
    j = write_and_report(c, out);
    j["retuned_blocks"] = blocks.size();
  } else {
    ParetoTrace trace;
    const Vector new_gamma = expand(a.gamma, c.n(), "--gamma");
    GammaTuneResult res = tune_gamma(c.state, c.hyper, new_gamma, cfg, a.trace.empty() ? nullptr : &trace);
    c.state = std::move(res.state);
    c.hyper = std::move(res.hyper);
    if (!a.trace.empty()) {
      std::ostringstream os;
      os << "effective_param,data_fit,reg_norm";
      for (Index k = 0; k < c.n(); ++k) os << ",theta_" << k;
      os << '\n';
      for (const auto& rec : trace) {
        os << format_double(rec.effective_param) << ',' << format_double(rec.data_fit) << ','
           << format_double(rec.reg_norm);
        for (Index k = 0; k < rec.theta.size(); ++k) os << ',' << format_double(rec.theta(k));
        os << '\n';
      }
      write_text(a.trace, os.str());
    }
    j = write_and_report(c, out);
    if (!a.trace.empty()) {
      j["trace"] = a.trace;
      j["trace_records"] = trace.size();
    }
  }
  return j;
}

struct ShiftArgs {
  std::vector<double> theta0;
};

json cmd_shift_bias(const Globals& g, const ShiftArgs& a) {
  Checkpoint c = read_checkpoint(require(g.checkpoint, "--checkpoint"));
  if (a.theta0.empty()) throw UsageError("--theta0 is required");
  const Vector theta0 = expand(a.theta0, c.n(), "--theta0");
  const ModelSolution sol = shift_bias(c.state, c.hyper, theta0);
  json j = solution_json(sol);
  if (!g.out.empty()) {
    c.hyper.theta0 = theta0;
    write_checkpoint(g.out, c);
    j["checkpoint"] = g.out;
  }
  return j;
}

struct PdhgArgs {
  std::vector<std::string> data;
  std::string reg = "l1";
  std::vector<double> reg_weight{0.1};
  double sigma_theta = 0.5;
  double sigma_w = 0.5;
  double tol = 1e-10;
  std::int64_t max_iters = 100000;
  std::string basis;
  bool ko_check = false;
};

json cmd_pdhg(const Globals& g, const PdhgArgs& a) {
  if (a.data.empty()) throw UsageError("pdhg needs at least one data file");
  if (!g.out.empty() && a.data.size() != 1) throw UsageError("--out is only supported with a single data file");
  const IntegrationConfig cfg = integration(g);
  std::vector<std::vector<DataBlock>> sets;
  for (const auto& f : a.data) sets.push_back(read_blocks(f));
  Index n = 0;
  for (const auto& s : sets)
    if (!s.empty()) n = s.front().cols();
  if (n == 0) {
    if (a.basis.empty()) throw UsageError("cannot infer n from empty data; pass --basis");
    n = basis(a.basis).n();
  }

  ProxSpec spec;
  if (a.reg == "l1") {
    spec.kind = ProxKind::weighted_l1;
  } else if (a.reg == "l2") {
    spec.kind = ProxKind::weighted_l2_squared;
  } else {
    throw UsageError("unknown --reg '" + a.reg + "' (expected l1 or l2)");
  }
  spec.weights = expand(a.reg_weight, n, "--reg-weight");
  PdhgConfig pc;
  pc.sigma_theta = a.sigma_theta;
  pc.sigma_w = a.sigma_w;
  pc.tol = a.tol;
  pc.max_iters = a.max_iters;
  spec.validate(n);
  pc.validate(n);
  for (const auto& s : sets) validate_blocks(s, n);

  // One independent solve per data file, each on its own thread.
  std::vector<std::optional<PdhgResult>> results(sets.size());
  std::vector<RiccatiState> primals(sets.size());
  std::vector<std::exception_ptr> errors(sets.size());
  {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      workers.emplace_back([&, i] {
        try {
          primals[i] = pdhg_primal_state(n, sets[i], pc.sigma_theta, cfg);
          results[i] = pdhg_iterate(primals[i], sets[i], spec, pc);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  json j;
  json eqs = json::array();
  std::vector<std::string> labels;
  if (!a.basis.empty()) labels = basis(a.basis).labels();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const PdhgResult& r = *results[i];
    json e = solution_json(r.solution);
    const Vector sparse = sparsified(r.solution.theta_star);
    json support = json::array();
    for (Index k = 0; k < sparse.size(); ++k) {
      if (sparse(k) != 0.0) {
        if (labels.size() == static_cast<std::size_t>(n)) {
          support.push_back(labels[static_cast<std::size_t>(k)]);
        } else {
          support.push_back(k);
        }
      }
    }
    e["file"] = a.data[i];
    e["theta_sparse"] = vec_json(sparse);
    e["support"] = support;
    e["iterations"] = r.state.iteration;
    e["converged"] = r.converged;
    e["residual"] = r.residual;
    if (!labels.empty()) e["labels"] = labels;
    eqs.push_back(std::move(e));
  }
  j["equations"] = eqs;

  if (a.ko_check) {
    if (sets.size() != 3 || n != 10) throw UsageError("--ko-check needs three quad-monomial-3d data files");
    Matrix coeffs(3, 10);
    for (int eq = 0; eq < 3; ++eq) coeffs.row(eq) = results[eq]->solution.theta_star.transpose();
    const GeneratedProblem truth = gen_ko(1, 1e-4, 1e-3);
    const Trajectory model(identified_rhs(coeffs), kKoInitial, 10.0, 1e-4);
    json errs;
    for (int c = 0; c < 3; ++c) {
      Vector v(truth.eval_grid.size());
      for (Index i = 0; i < v.size(); ++i) v(i) = model.at(truth.eval_grid(i))(c);
      errs[truth.truth[c].name] = relative_l2(v, truth.truth[c].values);
    }
    j["trajectory_relative_l2"] = errs;
  }

  if (!g.out.empty()) {
    Checkpoint c;
    c.hyper = Hyperparams::uniform(n, 1.0 / pc.sigma_theta);
    c.state = primals[0];
    c.metadata["kind"] = "pdhg-primal";
    c.metadata["sigma_theta"] = format_double(pc.sigma_theta);
    write_checkpoint(g.out, c);
    j["checkpoint"] = g.out;
  }
  return j;
}

struct EvalArgs {
  std::string basis;
  std::string grid;
  std::string truth;
  std::string column;
  std::string op = "value";
  std::string values_out;
};

json cmd_eval(const Globals& g, const EvalArgs& a) {
  const Checkpoint c = read_checkpoint(require(g.checkpoint, "--checkpoint"));
  const BasisSet& b = basis(require(a.basis, "--basis"));
  if (b.arity() != 1) throw UsageError("eval needs a univariate basis");
  if (b.n() != c.n()) throw DimensionError("basis size does not match the checkpoint");
  const Vector theta = extract_solution(c.state, c.hyper).theta_star;

  Vector grid;
  std::optional<Vector> reference;
  if (!a.truth.empty()) {
    const CsvTable t = read_csv(a.truth);
    if (t.columns.size() < 2) throw IoError("truth CSV needs a grid column and a value column");
    grid = Eigen::Map<const Vector>(t.columns[0].data(), static_cast<Index>(t.columns[0].size()));
    std::size_t col = 1;
    if (!a.column.empty()) {
      const auto it = std::find(t.header.begin(), t.header.end(), a.column);
      if (it == t.header.end()) throw UsageError("truth CSV has no column '" + a.column + "'");
      col = static_cast<std::size_t>(it - t.header.begin());
    }
    reference = Eigen::Map<const Vector>(t.columns[col].data(), static_cast<Index>(t.columns[col].size()));
  } else if (!a.grid.empty()) {
    double lo = 0.0, hi = 0.0;
    long long count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream gs(a.grid);
    if (!(gs >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':') {
      throw UsageError("--grid must look like LO:HI:COUNT");
    }
    grid = uniform_grid(lo, hi, static_cast<Index>(count));
  } else if (b.name() == "poly-trig-10") {
    grid = uniform_grid(0.0, 10.0, 1001);
  } else {
    grid = uniform_grid(0.0, 1.0, 257);
  }

  Vector values(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    if (a.op == "value") {
      values(i) = feature_row(b, grid(i)).dot(theta);
    } else if (a.op == "residual") {
      values(i) = residual_row(b, grid(i), kReactionD, kReactionKappa).dot(theta);
    } else {
      throw UsageError("unknown --operator '" + a.op + "' (expected value or residual)");
    }
  }
  json j;
  j["points"] = grid.size();
  j["operator"] = a.op;
  if (reference) {
    j["relative_l2"] = relative_l2(values, *reference);
    j["max_abs_error"] = (values - *reference).cwiseAbs().maxCoeff();
  }
  if (!a.values_out.empty()) {
    std::ostringstream os;
    os << "x,value\n";
    for (Index i = 0; i < grid.size(); ++i) os << format_double(grid(i)) << ',' << format_double(values(i)) << '\n';
    write_text(a.values_out, os.str());
    j["values_csv"] = a.values_out;
  }
  return j;
}

struct BenchArgs {
  std::vector<std::string> methods{"riccati", "rls", "lsq"};
  Index n = 10;
  Index m = 1;
  std::vector<std::int64_t> sizes{100, 1000, 10000};
  int reps = 21;
};

json cmd_bench(const Globals& g, const BenchArgs& a) {
  BenchOptions opts;
  opts.repetitions = a.reps;
  opts.step_h = g.step;
  opts.seed = g.seed;
  std::vector<BenchReport> reports;
  for (const auto& name : a.methods) reports.push_back(bench_incremental(a.n, a.m, a.sizes, parse_bench_method(name), opts));
  json j;
  json arr = json::array();
  for (const auto& r : reports) {
    json e;
    e["method"] = r.method;
    e["n"] = r.n;
    e["m"] = r.m;
    e["repetitions"] = r.repetitions;
    json samples = json::array();
    for (const auto& s : r.samples) samples.push_back({{"N", s.size}, {"seconds_per_update", s.seconds}});
    e["samples"] = samples;
    e["growth"] = r.growth();
    arr.push_back(std::move(e));
  }
  j["reports"] = arr;
  j["simd"] = kernels::active_kernels().name;
  if (!g.out.empty()) {
    write_text(g.out, bench_csv(reports));
    j["csv"] = g.out;
  }
  return j;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Riccati-based regularized linear regression", "hjr"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for data generation and benchmarks")->default_val(0);
  app.add_option("--step-size", g.step, "RK4 step size")->default_val(1e-3);
  app.add_option("--checkpoint", g.checkpoint, "Input checkpoint");
  app.add_option("--out", g.out, "Output path");
  app.add_flag("--pretty", g.pretty, "Human-readable output instead of JSON");

  GenArgs gen_a;
  auto* gen = app.add_subcommand("gen", "Generate a data set")->fallthrough();
  gen->add_option("problem", gen_a.problem, "sin10x | reaction-diffusion | ko")->required();
  gen->add_option("--count", gen_a.count, "Number of sampled points")->default_val(1000);
  gen->add_option("--noise", gen_a.noise, "Gaussian noise scale (default 1 for sin10x, 0.1 for reaction-diffusion)");
  gen->add_option("--lambda-b", gen_a.lambda_b, "Boundary weight")->default_val(1.0);
  gen->add_option("--grid-count", gen_a.grid_count, "K-O sample times")->default_val(1000);
  gen->add_option("--solver-h", gen_a.solver_h, "K-O RK4 step")->default_val(1e-4);
  gen->add_option("--fd-h", gen_a.fd_h, "K-O central-difference step")->default_val(1e-3);

  FitArgs fit_a;
  auto* fitc = app.add_subcommand("fit", "Fit a model from a block stream")->fallthrough();
  fitc->add_option("data", fit_a.data, "JSON Lines block file")->required();
  fitc->add_option("--gamma", fit_a.gamma, "Regularization weights (one value or n)")->delimiter(',');
  fitc->add_option("--theta0", fit_a.theta0, "Prior bias (one value or n)")->delimiter(',');
  fitc->add_option("--method", fit_a.method, "riccati | rls | lsq")->default_val("riccati");
  fitc->add_option("--basis", fit_a.basis, "Basis name recorded in the checkpoint");
  fitc->add_option("--n", fit_a.n, "Parameter count when the data file is empty");

  EditArgs add_a, rem_a;
  auto* addc = app.add_subcommand("add", "Add blocks to a checkpoint")->fallthrough();
  addc->add_option("data", add_a.data, "JSON Lines block file")->required();
  addc->add_option("--method", add_a.method, "riccati | rls")->default_val("riccati");
  auto* remc = app.add_subcommand("remove", "Remove previously added blocks")->fallthrough();
  remc->add_option("data", rem_a.data, "JSON Lines block file")->required();
  remc->add_option("--method", rem_a.method, "riccati | rls")->default_val("riccati");

  TuneArgs tune_a;
  auto* tunec = app.add_subcommand("tune", "Retune block weights or regularization weights")->fallthrough();
  tunec->add_option("--lambda-block", tune_a.lambda_block, "Blocks whose weight changes");
  tunec->add_option("--lambda", tune_a.lambda, "OLD NEW block weight")->expected(2);
  tunec->add_option("--gamma", tune_a.gamma, "New regularization weights")->delimiter(',');
  tunec->add_option("--trace", tune_a.trace, "Write the Pareto trace CSV here");

  ShiftArgs shift_a;
  auto* shiftc = app.add_subcommand("shift-bias", "Minimizer under a new prior bias")->fallthrough();
  shiftc->add_option("--theta0", shift_a.theta0, "New bias (one value or n)")->delimiter(',');

  PdhgArgs pdhg_a;
  auto* pdhgc = app.add_subcommand("pdhg", "Sparse fit with PDHG")->fallthrough();
  pdhgc->add_option("data", pdhg_a.data, "One block file per independent problem")->required();
  pdhgc->add_option("--reg", pdhg_a.reg, "l1 | l2")->default_val("l1");
  pdhgc->add_option("--reg-weight", pdhg_a.reg_weight, "Regularization weights (one value or n)")->delimiter(',');
  pdhgc->add_option("--sigma-theta", pdhg_a.sigma_theta)->default_val(0.5);
  pdhgc->add_option("--sigma-w", pdhg_a.sigma_w)->default_val(0.5);
  pdhgc->add_option("--tol", pdhg_a.tol)->default_val(1e-10);
  pdhgc->add_option("--max-iters", pdhg_a.max_iters)->default_val(100000);
  pdhgc->add_option("--basis", pdhg_a.basis, "Basis name for labels");
  pdhgc->add_flag("--ko-check", pdhg_a.ko_check, "Re-integrate the identified K-O system and score it");

  EvalArgs eval_a;
  auto* evalc = app.add_subcommand("eval", "Evaluate a checkpoint on a grid")->fallthrough();
  evalc->add_option("--basis", eval_a.basis)->required();
  evalc->add_option("--grid", eval_a.grid, "LO:HI:COUNT");
  evalc->add_option("--truth", eval_a.truth, "CSV whose first column is the grid");
  evalc->add_option("--column", eval_a.column, "Truth column name");
  evalc->add_option("--operator", eval_a.op, "value | residual")->default_val("value");
  evalc->add_option("--values-out", eval_a.values_out, "Write model values as CSV");

  BenchArgs bench_a;
  auto* benchc = app.add_subcommand("bench", "Per-update cost vs data set size")->fallthrough();
  benchc->add_option("--method", bench_a.methods, "riccati, rls, lsq")->delimiter(',');
  benchc->add_option("--n", bench_a.n)->default_val(10);
  benchc->add_option("--m", bench_a.m)->default_val(1);
  benchc->add_option("--sizes", bench_a.sizes)->delimiter(',');
  benchc->add_option("--reps", bench_a.reps)->default_val(21);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    json result;
    if (gen->parsed()) {
      result = cmd_gen(g, gen_a);
    } else if (fitc->parsed()) {
      result = cmd_fit(g, fit_a);
    } else if (addc->parsed()) {
      result = cmd_edit(g, add_a, false);
    } else if (remc->parsed()) {
      result = cmd_edit(g, rem_a, true);
    } else if (tunec->parsed()) {
      result = cmd_tune(g, tune_a);
    } else if (shiftc->parsed()) {
      result = cmd_shift_bias(g, shift_a);
    } else if (pdhgc->parsed()) {
      result = cmd_pdhg(g, pdhg_a);
    } else if (evalc->parsed()) {
      result = cmd_eval(g, eval_a);
    } else if (benchc->parsed()) {
      result = cmd_bench(g, bench_a);
    }
    if (g.pretty) {
      print_pretty(result, out);
    } else {
      out << result.dump() << '\n';
    }
    return kExitOk;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

} // namespace hjr
