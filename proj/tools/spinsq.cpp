// spinsq.cpp — command-line front end: evaluate witness reports from
// measurement records, export minimal-variance curves, emit entanglement
// bound tables, and run the split-equivalence self-check.
//
// Exit codes: 0 success, 2 input/schema error, 3 numerical or assertion
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spinsq/sm_curves.hpp"
#include "spinsq/split_model.hpp"
#include "spinsq/spin_core.hpp"
#include "spinsq/witnesses.hpp"

namespace {

using njson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw SchemaError("cannot open output file: " + out_path);
  out << content;
  if (!out) throw SchemaError("failed writing output file: " + out_path);
}

// ---------------------------- schema handling ----------------------------

void reject_unknown_keys(const njson& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const auto& k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) throw SchemaError(where + ": unknown field '" + it.key() + "'");
  }
}

double require_number(const njson& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
  if (!obj[key].is_number()) throw SchemaError(where + ": field '" + key + "' must be a number");
  return obj[key].get<double>();
}

int require_int(const njson& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
  if (!obj[key].is_number_integer()) {
    throw SchemaError(where + ": field '" + key + "' must be an integer");
  }
  return obj[key].get<int>();
}

std::vector<std::vector<double>> parse_matrix(const njson& j, int modes, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != modes) {
    throw SchemaError(where + ": expected an M x M matrix");
  }
  std::vector<std::vector<double>> out(modes, std::vector<double>(modes));
  for (int i = 0; i < modes; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != modes) {
      throw SchemaError(where + ": expected an M x M matrix");
    }
    for (int k = 0; k < modes; ++k) {
      if (!j[i][k].is_number()) throw SchemaError(where + ": matrix entries must be numbers");
      out[i][k] = j[i][k].get<double>();
    }
  }
  return out;
}

struct ParsedRecord {
  njson echo;
  std::string label;
  spinsq::CollectiveMoments moments;
  std::optional<spinsq::ModeMomentSet> mode_set;
  std::optional<int> modes_hint;
};

ParsedRecord parse_record(const njson& rec, int index) {
  const std::string where = "records[" + std::to_string(index) + "]";
  if (!rec.is_object()) throw SchemaError(where + ": record must be an object");
  reject_unknown_keys(rec, {"label", "n", "var_sz", "mean_sx", "m", "modes"}, where);

  ParsedRecord out;
  out.echo = rec;
  if (rec.contains("label")) {
    if (!rec["label"].is_string()) throw SchemaError(where + ": field 'label' must be a string");
    out.label = rec["label"].get<std::string>();
  }

  out.moments.n_particles = require_int(rec, "n", where);
  if (out.moments.n_particles < 1) throw SchemaError(where + ": 'n' must be positive");
  out.moments.var_sz = require_number(rec, "var_sz", where);
  out.moments.mean_sx = require_number(rec, "mean_sx", where);

  if (rec.contains("m")) {
    const int m = require_int(rec, "m", where);
    if (m < 2) throw SchemaError(where + ": 'm' must be at least 2");
    out.modes_hint = m;
  }

  if (rec.contains("modes")) {
    const njson& modes_json = rec["modes"];
    if (!modes_json.is_array() || modes_json.size() < 2) {
      throw SchemaError(where + ": 'modes' must be an array of at least two mode objects");
    }
    const int m = static_cast<int>(modes_json.size());
    if (out.modes_hint && *out.modes_hint != m) {
      throw SchemaError(where + ": 'm' disagrees with the number of 'modes' entries");
    }
    out.modes_hint = m;

    spinsq::ModeMomentSet mm;
    mm.modes = m;
    mm.pi.resize(m);
    mm.mean_sx.resize(m);
    mm.var_sz.resize(m);
    mm.var_sy.assign(m, std::numeric_limits<double>::quiet_NaN());
    mm.n_particles.resize(m);
    std::optional<std::vector<std::vector<double>>> cov_sz, cov_sy;

    long long n_sum = 0;
    for (int i = 0; i < m; ++i) {
      const std::string mwhere = where + ".modes[" + std::to_string(i) + "]";
      const njson& mj = modes_json[i];
      if (!mj.is_object()) throw SchemaError(mwhere + ": mode entry must be an object");
      reject_unknown_keys(mj, {"n_i", "var_sz", "mean_sx", "var_sy", "cov_sz", "cov_sy"}, mwhere);
      mm.n_particles[i] = require_int(mj, "n_i", mwhere);
      if (mm.n_particles[i] < 1) throw SchemaError(mwhere + ": 'n_i' must be positive");
      n_sum += mm.n_particles[i];
      mm.var_sz[i] = require_number(mj, "var_sz", mwhere);
      mm.mean_sx[i] = require_number(mj, "mean_sx", mwhere);
      if (mj.contains("var_sy")) {
        if (!mj["var_sy"].is_number()) throw SchemaError(mwhere + ": 'var_sy' must be a number");
        mm.var_sy[i] = mj["var_sy"].get<double>();
      }
      auto take_cov = [&](const char* key, std::optional<std::vector<std::vector<double>>>& slot) {
        if (!mj.contains(key)) return;
        auto mat = parse_matrix(mj[key], m, mwhere + "." + key);
        if (slot && *slot != mat) {
          throw SchemaError(where + ": conflicting '" + key + "' matrices across mode entries");
        }
        slot = std::move(mat);
      };
      take_cov("cov_sz", cov_sz);
      take_cov("cov_sy", cov_sy);
    }
    if (n_sum != out.moments.n_particles) {
      throw SchemaError(where + ": mode particle numbers must sum to 'n'");
    }
    for (int i = 0; i < m; ++i) {
      mm.pi[i] = static_cast<double>(mm.n_particles[i]) / out.moments.n_particles;
    }

    auto default_cov = [&](const std::vector<double>& var) {
      std::vector<std::vector<double>> c(m, std::vector<double>(m, 0.0));
      for (int i = 0; i < m; ++i) c[i][i] = var[i];
      return c;
    };
    mm.cov_sz = cov_sz ? std::move(*cov_sz) : default_cov(mm.var_sz);
    mm.cov_sy = cov_sy ? std::move(*cov_sy) : default_cov(mm.var_sy);

    try {
      spinsq::validate(mm);
    } catch (const spinsq::Error& e) {
      throw SchemaError(where + ": " + e.what());
    }
    out.mode_set = std::move(mm);
  }
  return out;
}

std::vector<ParsedRecord> parse_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open input file: " + path);
  njson doc;
  try {
    doc = njson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("top level must be an object");
  reject_unknown_keys(doc, {"records"}, "top level");
  if (!doc.contains("records") || !doc["records"].is_array()) {
    throw SchemaError("top level must contain a 'records' array");
  }
  std::vector<ParsedRecord> out;
  int index = 0;
  for (const auto& rec : doc["records"]) {
    out.push_back(parse_record(rec, index++));
  }
  return out;
}

// ----------------------------- witness output -----------------------------

njson steering_json(const spinsq::SteeringFlags& s) {
  njson j = njson::object();
  auto put = [&j](const char* key, const std::optional<bool>& v) {
    if (v) j[key] = *v;
  };
  put("r2_b_by_a", s.r2_b_by_a);
  put("r2_a_by_b", s.r2_a_by_b);
  put("sm_b_by_a", s.sm_b_by_a);
  put("sm_a_by_b", s.sm_a_by_b);
  return j;
}

njson report_json(const spinsq::WitnessReport& rep) {
  njson j = njson::object();
  if (rep.xi2) {
    j["xi2"] = *rep.xi2;
    if (*rep.xi2 > 0.0) j["xi2_db"] = 10.0 * std::log10(*rep.xi2);
  } else {
    j["xi2"] = "undefined";
  }
  j["depth_fisher"] = rep.depth_fisher;
  j["depth_state_independent"] = rep.depth_state_independent;
  j["depth_sm"] = rep.depth_sm;
  j["max_entangled_modes"] = rep.max_entangled_modes;
  if (rep.mode_insep_k) {
    j["mode_insep_k"] = *rep.mode_insep_k;
  }
  if (rep.g2) j["g2"] = *rep.g2;
  if (rep.r2) j["r2"] = *rep.r2;
  const njson st = steering_json(rep.steering);
  if (!st.empty()) j["steering"] = st;
  njson thr = njson::array();
  for (const auto& [name, value] : rep.thresholds) {
    thr.push_back(njson{{"name", name}, {"value", value}});
  }
  j["thresholds"] = thr;
  j["errors"] = rep.errors;
  return j;
}

void report_text(std::ostringstream& os, const ParsedRecord& rec, const spinsq::WitnessReport& rep,
                 int index) {
  os << "record " << index;
  if (!rec.label.empty()) os << " (" << rec.label << ")";
  os << "\n";
  os << "  n                    = " << rec.moments.n_particles << "\n";
  if (rep.xi2) {
    os << "  xi2                  = " << fmt10(*rep.xi2);
    if (*rep.xi2 > 0.0) os << "  (" << fmt10(10.0 * std::log10(*rep.xi2)) << " dB)";
    os << "\n";
  } else {
    os << "  xi2                  = undefined\n";
  }
  os << "  depth fisher         = " << rep.depth_fisher << "\n";
  os << "  depth tight          = " << rep.depth_state_independent << "\n";
  os << "  depth sm             = " << rep.depth_sm << "\n";
  os << "  max entangled modes  = " << rep.max_entangled_modes << "\n";
  if (rep.mode_insep_k) {
    os << "  mode insep k         = " << *rep.mode_insep_k << "\n";
  } else if (rec.modes_hint) {
    os << "  mode insep k         = none\n";
  }
  if (rep.g2) os << "  g2                   = " << fmt10(*rep.g2) << "\n";
  if (rep.r2) os << "  r2                   = " << fmt10(*rep.r2) << "\n";
  auto flag = [&](const char* name, const std::optional<bool>& v) {
    if (v) os << "  steering " << name << " = " << (*v ? "violated" : "not violated") << "\n";
  };
  flag("r2 B|A     ", rep.steering.r2_b_by_a);
  flag("r2 A|B     ", rep.steering.r2_a_by_b);
  flag("sm B|A     ", rep.steering.sm_b_by_a);
  flag("sm A|B     ", rep.steering.sm_a_by_b);
  if (!rep.thresholds.empty()) {
    os << "  thresholds:\n";
    for (const auto& [name, value] : rep.thresholds) {
      os << "    " << name << " = " << fmt10(value) << "\n";
    }
  }
  for (const auto& e : rep.errors) os << "  note: " << e << "\n";
}

int cmd_witness(const std::string& input_path, const std::string& format,
                const std::string& out_path) {
  const std::vector<ParsedRecord> records = parse_input(input_path);
  if (format == "json") {
    njson doc = njson::object();
    doc["records"] = njson::array();
    for (const auto& rec : records) {
      const auto rep = spinsq::build_report(rec.moments, rec.mode_set, rec.modes_hint);
      doc["records"].push_back(njson{{"input", rec.echo}, {"report", report_json(rep)}});
    }
    write_output(out_path, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    int index = 0;
    for (const auto& rec : records) {
      const auto rep = spinsq::build_report(rec.moments, rec.mode_set, rec.modes_hint);
      report_text(os, rec, rep, index++);
    }
    write_output(out_path, os.str());
  }
  return kExitOk;
}

// ------------------------------- fs-curve --------------------------------

int cmd_fs_curve(int two_s, int points, const std::string& out_path) {
  const spinsq::FsTable table = spinsq::build_fs_table(spinsq::SpinLength(two_s), points);
  std::ostringstream os;
  os << "lambda,x,f\n";
  for (const auto& s : table.samples) {
    os << fmt17(s.lambda) << "," << fmt17(s.x) << "," << fmt17(s.f) << "\n";
  }
  write_output(out_path, os.str());
  return kExitOk;
}

// -------------------------------- bounds ---------------------------------

int cmd_bounds_modes(int modes, const std::string& out_path) {
  std::ostringstream os;
  os << "M,k,threshold\n";
  for (int k = 2; k <= modes; ++k) {
    const double threshold =
        4.0 * (k - 1) * (k - 1) / (static_cast<double>(modes) * modes * (modes - 1));
    os << modes << "," << k << "," << fmt17(threshold) << "\n";
  }
  write_output(out_path, os.str());
  return kExitOk;
}

int cmd_bounds_depth(int n, int pmax, bool polarization_grid, const std::string& out_path) {
  std::ostringstream os;
  if (!polarization_grid) {
    os << "p,fisher,tight\n";
    for (int p = 1; p <= pmax; ++p) {
      os << p << "," << fmt17(1.0 / p) << "," << fmt17(spinsq::depth_bound_state_independent(n, p))
         << "\n";
    }
  } else {
    std::vector<double> grid{0.001};
    for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
    os << "p,fisher,tight,x,sm_bound\n";
    for (int p = 1; p <= pmax; ++p) {
      const double fisher = 1.0 / p;
      const double tight = spinsq::depth_bound_state_independent(n, p);
      for (double x : grid) {
        os << p << "," << fmt17(fisher) << "," << fmt17(tight) << "," << fmt17(x) << ","
           << fmt17(spinsq::sm_xi2_bound(p, x)) << "\n";
      }
    }
  }
  write_output(out_path, os.str());
  return kExitOk;
}

// ------------------------------ split-check ------------------------------

int cmd_split_check(int two_s, double lambda, int modes) {
  const auto parent = spinsq::ground_state(spinsq::build_hamiltonian(lambda, spinsq::SpinLength(two_s)));
  const auto rep = spinsq::equivalence_check(parent.state, modes);
  std::ostringstream os;
  os << "parent: 2S = " << two_s << " (S = " << fmt10(0.5 * two_s) << "), lambda = " << fmt10(lambda)
     << ", modes M = " << modes << "\n";
  os << "xi2 = " << fmt17(rep.xi2) << "\n";
  os << "g2  = " << fmt17(rep.g2) << "  |g2 - xi2| = " << fmt10(std::abs(rep.g2 - rep.xi2)) << "\n";
  os << "r2  = " << fmt17(rep.r2) << "  |r2 - 4 xi2| = " << fmt10(std::abs(rep.r2 - 4.0 * rep.xi2))
     << "\n";
  for (const auto& gk : rep.gk2) {
    os << "gk2 k=" << gk.k << " = " << fmt17(gk.value)
       << "  expected = " << fmt17(gk.expected) << "\n";
  }
  os << "max relative error = " << fmt10(rep.max_rel_error) << "\n";
  os << (rep.pass ? "PASS" : "FAIL") << "\n";
  std::cout << os.str();
  return rep.pass ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin-squeezing entanglement witness toolkit"};
  app.require_subcommand(1);

  // witness
  std::string witness_input, witness_format = "text", witness_out;
  auto* witness = app.add_subcommand("witness", "evaluate witness reports from a JSON record file");
  witness->add_option("--input", witness_input, "input JSON file")->required();
  witness->add_option("--format", witness_format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  witness->add_option("--out", witness_out, "output file (default stdout)");

  // fs-curve
  int fs_two_s = 0, fs_points = spinsq::kFsDefaultPoints;
  std::string fs_out;
  auto* fs = app.add_subcommand("fs-curve", "export a minimal-variance curve F_S[x] as CSV");
  fs->add_option("--spin", fs_two_s, "2S (twice the spin length)")->required()
      ->check(CLI::PositiveNumber);
  fs->add_option("--points", fs_points, "number of lambda grid points (>= 16)");
  fs->add_option("--out", fs_out, "output CSV file")->required();

  // bounds
  int bounds_modes = 0, bounds_depth = 0, bounds_pmax = 0;
  bool bounds_polgrid = false;
  std::string bounds_out;
  auto* bounds = app.add_subcommand("bounds", "emit entanglement threshold tables as CSV");
  auto* opt_modes = bounds->add_option("--modes", bounds_modes, "mode count M for k-separability thresholds");
  auto* opt_depth = bounds->add_option("--depth", bounds_depth, "particle count N for depth bounds");
  bounds->add_option("--pmax", bounds_pmax, "largest group size p to tabulate");
  bounds->add_flag("--polarization-grid", bounds_polgrid,
                   "add polarization-resolved sm bound columns");
  bounds->add_option("--out", bounds_out, "output CSV file (default stdout)");
  opt_modes->excludes(opt_depth);

  // split-check
  int split_two_s = 0, split_modes = 2;
  double split_lambda = 0.0;
  auto* split = app.add_subcommand("split-check", "verify the mode-particle equivalence identities");
  split->add_option("--spin", split_two_s, "2S of the parent state")->required()
      ->check(CLI::PositiveNumber);
  split->add_option("--lambda", split_lambda, "squeezing parameter of the parent ground state")
      ->required();
  split->add_option("--modes", split_modes, "number of modes M");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*witness) return cmd_witness(witness_input, witness_format, witness_out);
    if (*fs) {
      if (fs_points < 16) {
        std::cerr << "fs-curve: --points must be at least 16\n";
        return kExitInput;
      }
      return cmd_fs_curve(fs_two_s, fs_points, fs_out);
    }
    if (*bounds) {
      if (opt_modes->count()) {
        if (bounds_modes < 2) {
          std::cerr << "bounds: --modes must be at least 2\n";
          return kExitInput;
        }
        return cmd_bounds_modes(bounds_modes, bounds_out);
      }
      if (opt_depth->count()) {
        if (bounds_depth < 1 || bounds_pmax < 1 || bounds_pmax > bounds_depth) {
          std::cerr << "bounds: require --depth N >= 1 and 1 <= --pmax <= N\n";
          return kExitInput;
        }
        return cmd_bounds_depth(bounds_depth, bounds_pmax, bounds_polgrid, bounds_out);
      }
      std::cerr << "bounds: one of --modes or --depth is required\n";
      return kExitInput;
    }
    if (*split) {
      if (split_modes < 2) {
        std::cerr << "split-check: --modes must be at least 2\n";
        return kExitInput;
      }
      return cmd_split_check(split_two_s, split_lambda, split_modes);
    }
  } catch (const SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const spinsq::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
