#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldsmdl/datagen.hpp"
#include "ldsmdl/errors.hpp"
#include "ldsmdl/io.hpp"
#include "ldsmdl/random.hpp"
#include "ldsmdl/selection.hpp"
#include "ldsmdl/simulate.hpp"

namespace ldsmdl::cli {

namespace {

using nlohmann::ordered_json;

// Exception carrying an exit code, raised by the command bodies.
struct Failure {
  int code;
  std::string message;
};

std::string iso_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv(kSeedEnv);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used);
    if (used != std::string(raw).size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw Failure{kConfigError, std::string(kSeedEnv) + " is not an unsigned integer: " + raw};
  }
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  p.replace_extension();
  return p.string() + suffix;
}

void write_manifest(const std::string& primary, const std::string& command,
                    const ordered_json& config, std::uint64_t seed,
                    const std::vector<std::string>& outputs, const std::string& started) {
  ordered_json m;
  m["command"] = command;
  m["config_snapshot"] = config;
  m["master_seed"] = seed;
  m["outputs"] = outputs;
  m["timestamps"] = {{"started", started}, {"finished", iso_now()}};
  write_text_file(manifest_path(primary), m.dump(2) + "\n");
}

// ---------------------------------------------------------------- simulate

Interval interval_from(const ordered_json& j, const char* key, Interval fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) {
    throw ParseError(std::string("config: '") + key + "' must be a two-element array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

SequenceData generate(const ordered_json& config) {
  const std::string generator = config.at("generator").get<std::string>();
  const auto seed = config.at("seed").get<std::uint64_t>();
  const int length = config.at("length").get<int>();
  SequenceData data;

  if (generator == "lds") {
    const int burn_in = config.value("burn_in", 0);
    LdsParams params;
    if (config.contains("params")) {
      params = params_from_json(config.at("params").dump());
    } else {
      RandomLdsConfig rc;
      rc.d = config.at("d").get<int>();
      rc.d_out = config.value("d_out", 1);
      rc.entry_range = interval_from(config, "entry_range", rc.entry_range);
      if (config.contains("iw_dof")) rc.iw_dof = config.at("iw_dof").get<int>();
      rc.seed = seed;
      params = random_stable_lds(rc);
    }
    Rng noise_seed = make_rng(seed, 0x73696d);
    data = simulate(params, length, burn_in, noise_seed());
  } else if (generator == "narma") {
    NarmaSpec spec;
    const int order = config.value("order", 10);
    if (order != 10 && order != 20 && order != 30) {
      throw ParseError("config: NARMA order must be 10, 20 or 30");
    }
    spec.order = static_cast<NarmaOrder>(order);
    spec.length = length;
    spec.input_range = interval_from(config, "input_range", spec.input_range);
    spec.seed = seed;
    data = narma_generate(spec);
  } else {
    throw ParseError("config: unknown generator '" + generator + "' (expected lds or narma)");
  }

  if (config.contains("trim")) {
    data = preprocess_center_trim(data, interval_from(config, "trim", {}));
  }
  return data;
}

int simulate_command(ordered_json config, const std::string& out_path,
                     std::optional<std::uint64_t> seed_override, std::ostream& out) {
  const std::string started = iso_now();
  if (seed_override) config["seed"] = *seed_override;
  SequenceData data;
  try {
    data = generate(config);
  } catch (const nlohmann::json::exception& e) {
    throw Failure{kConfigError, std::string("config: ") + e.what()};
  } catch (const ParseError& e) {
    throw Failure{kConfigError, e.what()};
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw Failure{kGenerationError, std::string("generation failed: ") + e.what()};
  }
  write_text_file(out_path, sequence_to_csv(data));
  write_manifest(out_path, "simulate", {{"config", config}, {"out", out_path}},
                 config.at("seed").get<std::uint64_t>(), {out_path}, started);
  out << data.length() << " x " << data.dim() << " -> " << out_path << "\n";
  return kOk;
}

// ---------------------------------------------------------------- select / compare

struct SelectOptions {
  std::string in;
  std::string out;
  std::string sweep;  // select only
  int dmin = 2;
  int dmax = 12;
  std::string mode = "grid";
  std::string criterion = "mdl";
  int restarts = 10;
  std::uint64_t seed = 0;
  int max_iters = 300;
  double eps = 1e-4;
  bool observable = false;
  bool fia = true;

  [[nodiscard]] ordered_json to_json() const {
    return {{"in", in},           {"out", out},         {"sweep", sweep},
            {"dmin", dmin},       {"dmax", dmax},       {"mode", mode},
            {"criterion", criterion}, {"restarts", restarts}, {"seed", seed},
            {"max_iters", max_iters}, {"eps", eps},       {"observable", observable},
            {"fia", fia}};
  }

  static SelectOptions from_json(const ordered_json& j) {
    SelectOptions o;
    o.in = j.at("in").get<std::string>();
    o.out = j.at("out").get<std::string>();
    o.sweep = j.value("sweep", std::string());
    o.dmin = j.at("dmin").get<int>();
    o.dmax = j.at("dmax").get<int>();
    o.mode = j.value("mode", o.mode);
    o.criterion = j.value("criterion", o.criterion);
    o.restarts = j.at("restarts").get<int>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.max_iters = j.value("max_iters", o.max_iters);
    o.eps = j.value("eps", o.eps);
    o.observable = j.value("observable", o.observable);
    o.fia = j.value("fia", o.fia);
    return o;
  }
};

SelectionConfig selection_config(const SelectOptions& o) {
  if (o.dmin < 2 || o.dmin > o.dmax) {
    throw Failure{kConfigError, "need 2 <= dmin <= dmax"};
  }
  SelectionConfig sc;
  sc.em.n_restarts = o.restarts;
  sc.em.seed = o.seed;
  sc.em.max_iters = o.max_iters;
  sc.em.eps = o.eps;
  sc.em.observable_state = o.observable;
  sc.compute_fia = o.fia;
  try {
    sc.em.validate();
  } catch (const Error& e) {
    throw Failure{kConfigError, e.what()};
  }
  return sc;
}

SequenceData load_sequence(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return sequence_from_csv(text);
  } catch (const ParseError& e) {
    throw Failure{kConfigError, path + ": " + e.what()};
  }
}

SelectionTrace run_search(const SequenceData& data, const SelectOptions& o, bool annihilate,
                          Criterion criterion) {
  const SelectionConfig sc = selection_config(o);
  try {
    return annihilate ? annihilation_search(data, {o.dmin, o.dmax}, sc)
                      : grid_search(data, {o.dmin, o.dmax}, sc, criterion);
  } catch (const SelectionError& e) {
    throw Failure{kFitError, e.what()};
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw Failure{kConfigError, e.what()};
  }
}

int select_command(SelectOptions o, std::ostream& out) {
  const std::string started = iso_now();
  if (o.mode != "grid" && o.mode != "annihilate") {
    throw Failure{kConfigError, "--mode must be grid or annihilate"};
  }
  Criterion criterion{};
  try {
    criterion = parse_criterion(o.criterion);
  } catch (const ParseError& e) {
    throw Failure{kConfigError, e.what()};
  }
  const bool annihilate = o.mode == "annihilate";
  if (annihilate && criterion != Criterion::MDL) {
    throw Failure{kConfigError, "annihilate mode selects by mdl only"};
  }
  if (o.sweep.empty()) o.sweep = with_suffix(o.out, ".sweep.csv");

  const SequenceData data = load_sequence(o.in);
  const SelectionTrace trace = run_search(data, o, annihilate, criterion);
  write_text_file(o.out, trace_to_json(trace));
  write_text_file(o.sweep, sweep_to_csv(trace));
  write_manifest(o.out, "select", o.to_json(), o.seed, {o.out, o.sweep}, started);
  out << trace.chosen_order << "\n";
  return kOk;
}

std::string table_cell(double normalized, double raw) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.2f (%.2f)", normalized, raw);
  return buf;
}

int compare_command(const SelectOptions& o, std::ostream& out) {
  const std::string started = iso_now();
  const SequenceData data = load_sequence(o.in);
  const SelectionTrace trace = run_search(data, o, false, Criterion::MDL);

  std::vector<std::vector<double>> normalized;
  for (const Criterion c : kAllCriteria) {
    std::vector<double> raw;
    for (const auto& rec : trace.per_order) raw.push_back(rec.value(c));
    normalized.push_back(normalize_values(std::span<const double>(raw)));
  }
  std::string csv = "order";
  for (const Criterion c : kAllCriteria) csv += "," + std::string(criterion_name(c));
  csv += '\n';
  for (std::size_t r = 0; r < trace.per_order.size(); ++r) {
    const OrderRecord& rec = trace.per_order[r];
    csv += std::to_string(rec.order);
    for (std::size_t k = 0; k < kAllCriteria.size(); ++k) {
      csv += ',';
      if (rec.ok) csv += table_cell(normalized[k][r], rec.value(kAllCriteria[k]));
    }
    csv += '\n';
  }
  csv += "argmin";
  std::string summary;
  for (const Criterion c : kAllCriteria) {
    const int best = argmin_order(trace, c);
    csv += "," + std::to_string(best);
    summary += std::string(criterion_name(c)) + "=" + std::to_string(best) + " ";
  }
  csv += '\n';

  write_text_file(o.out, csv);
  write_manifest(o.out, "compare", o.to_json(), o.seed, {o.out}, started);
  summary.pop_back();
  out << summary << "\n";
  return kOk;
}

// ---------------------------------------------------------------- replay

int replay_command(const std::string& manifest_file, std::ostream& out) {
  ordered_json manifest;
  try {
    manifest = ordered_json::parse(read_text_file(manifest_file));
  } catch (const nlohmann::json::exception& e) {
    throw Failure{kConfigError, manifest_file + ": " + e.what()};
  }
  try {
    const std::string command = manifest.at("command").get<std::string>();
    const ordered_json& snapshot = manifest.at("config_snapshot");
    const auto seed = manifest.at("master_seed").get<std::uint64_t>();
    if (command == "simulate") {
      return simulate_command(snapshot.at("config"), snapshot.at("out").get<std::string>(), seed,
                              out);
    }
    SelectOptions o = SelectOptions::from_json(snapshot);
    o.seed = seed;
    if (command == "select") return select_command(o, out);
    if (command == "compare") return compare_command(o, out);
    throw Failure{kConfigError, "manifest: unknown command '" + command + "'"};
  } catch (const nlohmann::json::exception& e) {
    throw Failure{kConfigError, manifest_file + ": " + e.what()};
  }
}

void add_search_options(CLI::App* cmd, SelectOptions& o) {
  cmd->add_option("--in", o.in, "Input sequence CSV (headerless)")->required();
  cmd->add_option("--dmin", o.dmin, "Smallest latent order")->capture_default_str();
  cmd->add_option("--dmax", o.dmax, "Largest latent order")->capture_default_str();
  cmd->add_option("--restarts", o.restarts, "EM restarts per order")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed (LDSMDL_SEED overrides)")->capture_default_str();
  cmd->add_option("--max-iters", o.max_iters, "EM iteration cap")->capture_default_str();
  cmd->add_option("--eps", o.eps, "EM convergence threshold")->capture_default_str();
  cmd->add_flag("--observable", o.observable, "Observable-state mode (delay embedding)");
  cmd->add_flag("!--no-fia", o.fia, "Skip the Fisher term (FIA column becomes the bare penalty)");
}

}  // namespace

std::string manifest_path(const std::string& primary_output) {
  return with_suffix(primary_output, ".manifest.json");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latent order selection for linear dynamical systems", "ldsmdl"};
  app.require_subcommand(1);

  std::string config_file;
  std::string sim_out;
  std::optional<std::uint64_t> sim_seed;
  auto* sim = app.add_subcommand("simulate", "Generate a sequence from a JSON config");
  sim->add_option("--config", config_file, "Generator config (JSON)")->required();
  sim->add_option("--out", sim_out, "Output sequence CSV")->required();
  sim->add_option("--seed", sim_seed, "Override the config seed");

  SelectOptions sel;
  auto* select = app.add_subcommand("select", "Choose the latent order of a sequence");
  add_search_options(select, sel);
  select->add_option("--mode", sel.mode, "annihilate | grid")->capture_default_str();
  select->add_option("--criterion", sel.criterion, "aic | bic | fia | mme | mdl")
      ->capture_default_str();
  select->add_option("--out", sel.out, "Selection trace JSON")->required();
  select->add_option("--sweep", sel.sweep, "Sweep CSV (default: <out>.sweep.csv)");

  SelectOptions cmp;
  auto* compare = app.add_subcommand("compare", "Normalized five-criterion table over orders");
  add_search_options(compare, cmp);
  compare->add_option("--out", cmp.out, "Output table CSV")->required();

  std::string manifest_file;
  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest");
  replay->add_option("--manifest", manifest_file, "Manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "ldsmdl: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*sim) {
      ordered_json config;
      try {
        config = ordered_json::parse(read_text_file(config_file));
      } catch (const nlohmann::json::exception& e) {
        throw Failure{kConfigError, config_file + ": " + e.what()};
      }
      const auto seed = env_seed() ? env_seed() : sim_seed;
      return simulate_command(std::move(config), sim_out, seed, out);
    }
    if (*select) {
      if (auto s = env_seed()) sel.seed = *s;
      return select_command(sel, out);
    }
    if (*compare) {
      if (auto s = env_seed()) cmp.seed = *s;
      return compare_command(cmp, out);
    }
    return replay_command(manifest_file, out);
  } catch (const Failure& f) {
    err << "ldsmdl: " << f.message << "\n";
    return f.code;
  } catch (const IoError& e) {
    err << "ldsmdl: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "ldsmdl: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace ldsmdl::cli
