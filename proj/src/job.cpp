#include "wlc/job.hpp"

#include "wlc/ensemble_io.hpp"
#include "wlc/observables.hpp"
#include "wlc/statistics.hpp"
#include "wlc/validation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#ifndef WLC_VERSION
#define WLC_VERSION "0.0.0"
#endif

namespace wlc {
namespace {

using nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T v{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ConfigError(key, "cannot parse '" + text + "' as a number");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::string num(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string iso_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Keys that do not change computed numbers.
bool is_volatile_key(const std::string& k) {
  return k == "command" || k == "threads" || k == "output" || k == "grid-output" || k == "checkpoint" ||
         k == "stop-after-blocks" || k == "deterministic";
}

void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place: " + ec.message());
}

Scene job_scene(const JobConfig& c) {
  if (c.geometry == "comb") return preset_comb(c.a, c.spacing, c.teeth == 0 ? 1 : c.teeth);
  return make_preset(c.geometry, c.a);
}

struct Observable {
  LoopFunctional functional;
  std::optional<CoefficientName> coefficient;
  bool comb_force = false;
};

Observable job_observable(const JobConfig& c) {
  Observable o;
  const QuadratureSettings& q = c.quad;
  if (c.geometry == "parallel") {
    o.functional = parallel_plates_functional(c.a, q);
    o.coefficient = CoefficientName::GammaParallel;
  } else if (c.geometry == "perpendicular") {
    o.functional = cm_energy_functional(job_scene(c), q);
    o.coefficient = CoefficientName::GammaPerp;
  } else if (c.geometry == "one-semi-infinite" || c.geometry == "two-semi-infinite") {
    o.functional = edge_energy_functional(job_scene(c), std::nullopt, q);
    o.coefficient = c.geometry == "one-semi-infinite" ? CoefficientName::Gamma1si : CoefficientName::Gamma2si;
  } else if (c.geometry == "comb") {
    if (c.command == "coefficient") {
      o.functional = comb_force_functional(c.a, c.spacing, c.teeth, q);
      o.comb_force = true;
    } else {
      if (c.teeth == 0) throw ConfigError("teeth", "the periodic comb (teeth = 0) only has a force observable");
      o.functional = cm_energy_functional(job_scene(c), q);
    }
  } else {
    throw ConfigError("geometry", "unknown geometry '" + c.geometry + "'");
  }
  return o;
}

json checkpoint_json(const JobConfig& c, const LoopSource& src, std::size_t blocks) {
  return json{{"settings_hash", c.settings_hash()}, {"loops", src.size()}, {"blocks", blocks}, {"done", json::object()}};
}

json load_checkpoint(const JobConfig& c, const LoopSource& src, std::size_t blocks) {
  const std::filesystem::path path = c.checkpoint;
  if (!std::filesystem::exists(path) || std::filesystem::file_size(path) == 0) return checkpoint_json(c, src, blocks);
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint", std::string("unreadable checkpoint: ") + e.what());
  }
  if (j.value("settings_hash", "") != c.settings_hash() || j.value("loops", std::size_t{0}) != src.size() ||
      j.value("blocks", std::size_t{0}) != blocks)
    throw ConfigError("checkpoint", "checkpoint belongs to a different configuration");
  return j;
}

void require_output(const std::string& path, const char* key) {
  if (path.empty()) throw ConfigError(key, "an output path is required for this command");
}

json run_gen(const JobConfig& c, std::ostream& log) {
  require_output(c.output, "output");
  log << "generating " << c.loops << " loops x " << c.ppl << " ppl in " << c.effective_dim() << "D\n";
  const Ensemble e = generate_ensemble(c.loops, c.ppl, c.effective_dim(), c.seed, c.quad.threads);
  try {
    save_ensemble(e, c.output);
  } catch (const std::exception& ex) {
    throw IoError(ex.what());
  }
  return json{{"ensemble", to_json(e.meta)}, {"path", c.output}};
}

json run_measurement(const JobConfig& c, std::ostream& log) {
  const LoopSource src = make_source(c);
  const Observable o = job_observable(c);
  log << o.functional.meta.observable << " over " << src.size() << " loops (" << src.meta().points << " ppl)\n";
  const BlockRun run = run_blocks(src, o.functional, c);
  json rec;
  rec["ensemble"] = to_json(src.meta());
  if (!run.complete()) {
    rec["status"] = "incomplete";
    rec["blocks_done"] = run.blocks_done;
    rec["blocks_total"] = run.blocks_total;
    return rec;
  }
  QuadratureMeta meta = o.functional.meta;
  meta.points = src.meta().points;
  IntegralResult r = summarize(run.values, c.quad.n_blocks, meta);
  rec["status"] = "complete";
  if (o.comb_force) {
    const double per_area = 1.0 / (c.spacing * (c.teeth == 0 ? 1 : c.teeth));
    r.value *= per_area;
    r.std_err *= per_area;
    for (double& b : r.blocks) b *= per_area;
    r.meta.observable = "comb force per area";
    rec["result"] = to_json(r);
    rec["estimate"] = comb_estimate(c.a, c.spacing);
    rec["estimate_provenance"] = "reference gamma_perp";
    return rec;
  }
  rec["result"] = to_json(r);
  const Force f = force_from_energy(r);
  rec["derived"]["force"] = {{"value", f.value}, {"std_err", f.std_err}, {"power", r.meta.power + 1}};
  if (c.command == "coefficient" && o.coefficient) {
    const Coefficient k = coefficient_from_energy(*o.coefficient, r);
    const Coefficient ref = reference_coefficient(*o.coefficient);
    rec["coefficient"] = {{"name", coefficient_name(k.name)},
                          {"value", k.value},
                          {"std_err", k.std_err},
                          {"provenance", provenance_name(k.provenance)},
                          {"reference", ref.value},
                          {"reference_std_err", ref.std_err},
                          {"ratio_to_reference", k.value / ref.value}};
  }
  return rec;
}

json run_density(const JobConfig& c, std::ostream& log) {
  require_output(c.grid_output, "grid-output");
  const LoopSource src = make_source(c);
  const Scene scene = job_scene(c);
  log << "density grid " << c.grid.nz << " x " << c.grid.nx << " over " << src.size() << " loops\n";
  const DensityGrid g = density(src, scene, c.grid, c.quad.n_blocks, c.quad.threads);
  try {
    export_grid(g, c.grid_output);
  } catch (const std::system_error& ex) {
    throw IoError(ex.what());
  }
  return json{{"ensemble", to_json(src.meta())},
              {"grid", c.grid_output},
              {"integral_per_length", integrate(g)},
              {"min", g.values.minCoeff()},
              {"max", g.values.maxCoeff()}};
}

json run_effective_area(const JobConfig& c) {
  const PlateSpec spec{c.plate_area, c.c_1si, c.c_2si, c.a};
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("A/C1si/C2si/a", e.what());
  }
  const double g1 = c.gamma_1si.value_or(reference_coefficient(CoefficientName::Gamma1si).value);
  const double g2 = c.gamma_2si.value_or(reference_coefficient(CoefficientName::Gamma2si).value);
  const EffectiveArea r = effective_area(spec, g1, g2);
  return json{{"area", spec.area},
              {"effective_area", r.area},
              {"relative_correction", r.relative_correction},
              {"gamma_1si", g1},
              {"gamma_2si", g2},
              {"gamma_parallel", kGammaParallel},
              {"provenance", c.gamma_1si || c.gamma_2si ? "computed" : "reference"}};
}

}  // namespace

std::string code_version() { return WLC_VERSION; }

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"command", "gen, energy, coefficient, density, effective-area or validate"},
      {"geometry", "parallel, perpendicular, one-semi-infinite, two-semi-infinite or comb"},
      {"a", "plate distance"},
      {"spacing", "comb tooth spacing (same units as a)"},
      {"teeth", "comb tooth count; 0 = periodic comb"},
      {"ensemble", "ensemble file (empty: generate from seed)"},
      {"loops", "number of loops"},
      {"ppl", "points per loop"},
      {"dim", "loop dimension (0: 1 for parallel, 2 otherwise)"},
      {"seed", "ensemble seed"},
      {"method", "centre-of-mass integration: reduced or grid"},
      {"z-lo", "grid lower z bound (units of a)"},
      {"z-hi", "grid upper z bound (units of a)"},
      {"x-cut", "grid half-width in x (units of a)"},
      {"cm-spacing", "grid spacing (units of a)"},
      {"tail", "x tail beyond x-cut: none or power-law"},
      {"margin", "required clearance of surfaces from the grid boundary (units of a)"},
      {"edge-cells", "cells of the two-semi-infinite double integral"},
      {"comb-panels", "Gauss-Legendre panels of the comb overlap integral"},
      {"blocks", "jackknife blocks"},
      {"threads", "worker threads (0: WLC_THREADS or hardware)"},
      {"deterministic", "fixed reduction order (always on)"},
      {"extrapolate", "two-point ppl extrapolation 2 J(N) - J(N/4)"},
      {"grid-x-lo", "density grid x start (units of a)"},
      {"grid-x-hi", "density grid x end (units of a)"},
      {"grid-nx", "density grid x nodes"},
      {"grid-z-lo", "density grid z start (units of a)"},
      {"grid-z-hi", "density grid z end (units of a)"},
      {"grid-nz", "density grid z nodes"},
      {"A", "plate area"},
      {"C1si", "circumference facing open substrate"},
      {"C2si", "circumference facing an aligned edge"},
      {"gamma-1si", "override gamma_1si for effective-area"},
      {"gamma-2si", "override gamma_2si for effective-area"},
      {"output", "result record (JSON) or ensemble file for gen"},
      {"grid-output", "density grid CSV"},
      {"checkpoint", "checkpoint file for block-wise resume"},
      {"stop-after-blocks", "stop after this many new blocks (0: run to completion)"},
  };
  return keys;
}

void JobConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "command") command = v;
  else if (key == "geometry") geometry = v;
  else if (key == "a") a = parse_value<double>(key, v);
  else if (key == "spacing") spacing = parse_value<double>(key, v);
  else if (key == "teeth") teeth = parse_value<int>(key, v);
  else if (key == "ensemble") ensemble = v;
  else if (key == "loops") loops = parse_value<std::uint64_t>(key, v);
  else if (key == "ppl") ppl = parse_value<std::uint64_t>(key, v);
  else if (key == "dim") dim = parse_value<std::uint32_t>(key, v);
  else if (key == "seed") seed = parse_value<std::uint64_t>(key, v);
  else if (key == "method") {
    try {
      quad.method = parse_cm_method(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  } else if (key == "z-lo") quad.domain.z_lo = parse_value<double>(key, v);
  else if (key == "z-hi") quad.domain.z_hi = parse_value<double>(key, v);
  else if (key == "x-cut") quad.domain.x_cut = parse_value<double>(key, v);
  else if (key == "cm-spacing") quad.domain.spacing = parse_value<double>(key, v);
  else if (key == "tail") {
    try {
      quad.domain.tail = parse_tail_mode(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  } else if (key == "margin") quad.domain.support_margin = parse_value<double>(key, v);
  else if (key == "edge-cells") quad.edge_cells = parse_value<std::size_t>(key, v);
  else if (key == "comb-panels") quad.comb_panels = parse_value<int>(key, v);
  else if (key == "blocks") quad.n_blocks = parse_value<std::size_t>(key, v);
  else if (key == "threads") quad.threads = parse_value<unsigned>(key, v);
  else if (key == "deterministic") deterministic = parse_bool(key, v);
  else if (key == "extrapolate") quad.extrapolate = parse_bool(key, v);
  else if (key == "grid-x-lo") grid.x_lo = parse_value<double>(key, v);
  else if (key == "grid-x-hi") grid.x_hi = parse_value<double>(key, v);
  else if (key == "grid-nx") grid.nx = parse_value<Eigen::Index>(key, v);
  else if (key == "grid-z-lo") grid.z_lo = parse_value<double>(key, v);
  else if (key == "grid-z-hi") grid.z_hi = parse_value<double>(key, v);
  else if (key == "grid-nz") grid.nz = parse_value<Eigen::Index>(key, v);
  else if (key == "A") plate_area = parse_value<double>(key, v);
  else if (key == "C1si") c_1si = parse_value<double>(key, v);
  else if (key == "C2si") c_2si = parse_value<double>(key, v);
  else if (key == "gamma-1si") gamma_1si = v.empty() ? std::nullopt : std::optional(parse_value<double>(key, v));
  else if (key == "gamma-2si") gamma_2si = v.empty() ? std::nullopt : std::optional(parse_value<double>(key, v));
  else if (key == "output") output = v;
  else if (key == "grid-output") grid_output = v;
  else if (key == "checkpoint") checkpoint = v;
  else if (key == "stop-after-blocks") stop_after_blocks = parse_value<std::size_t>(key, v);
  else throw ConfigError(key, "unknown key");
}

std::vector<std::pair<std::string, std::string>> JobConfig::key_values() const {
  return {
      {"command", command},
      {"geometry", geometry},
      {"a", num(a)},
      {"spacing", num(spacing)},
      {"teeth", std::to_string(teeth)},
      {"ensemble", ensemble},
      {"loops", std::to_string(loops)},
      {"ppl", std::to_string(ppl)},
      {"dim", std::to_string(dim)},
      {"seed", std::to_string(seed)},
      {"method", std::string(cm_method_name(quad.method))},
      {"z-lo", num(quad.domain.z_lo)},
      {"z-hi", num(quad.domain.z_hi)},
      {"x-cut", num(quad.domain.x_cut)},
      {"cm-spacing", num(quad.domain.spacing)},
      {"tail", std::string(tail_mode_name(quad.domain.tail))},
      {"margin", num(quad.domain.support_margin)},
      {"edge-cells", std::to_string(quad.edge_cells)},
      {"comb-panels", std::to_string(quad.comb_panels)},
      {"blocks", std::to_string(quad.n_blocks)},
      {"threads", std::to_string(quad.threads)},
      {"deterministic", deterministic ? "true" : "false"},
      {"extrapolate", quad.extrapolate ? "true" : "false"},
      {"grid-x-lo", num(grid.x_lo)},
      {"grid-x-hi", num(grid.x_hi)},
      {"grid-nx", std::to_string(grid.nx)},
      {"grid-z-lo", num(grid.z_lo)},
      {"grid-z-hi", num(grid.z_hi)},
      {"grid-nz", std::to_string(grid.nz)},
      {"A", num(plate_area)},
      {"C1si", num(c_1si)},
      {"C2si", num(c_2si)},
      {"gamma-1si", gamma_1si ? num(*gamma_1si) : ""},
      {"gamma-2si", gamma_2si ? num(*gamma_2si) : ""},
      {"output", output},
      {"grid-output", grid_output},
      {"checkpoint", checkpoint},
      {"stop-after-blocks", std::to_string(stop_after_blocks)},
  };
}

std::string JobConfig::to_text() const {
  std::string s;
  for (const auto& [k, v] : key_values()) s += k + " = " + v + "\n";
  return s;
}

std::string JobConfig::settings_hash() const {
  std::string s = code_version() + "\n";
  for (const auto& [k, v] : key_values())
    if (!is_volatile_key(k)) s += k + "=" + v + "\n";
  std::ostringstream hex;
  hex << std::hex << fnv1a64({reinterpret_cast<const unsigned char*>(s.data()), s.size()});
  return hex.str();
}

std::uint32_t JobConfig::effective_dim() const {
  if (dim != 0) return dim;
  return geometry == "parallel" ? 1 : 2;
}

void JobConfig::validate() const {
  static const std::vector<std::string> commands = {"gen", "energy", "coefficient", "density", "effective-area",
                                                    "validate"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end())
    throw ConfigError("command", "unknown command '" + command + "'");
  if (!(a > 0)) throw ConfigError("a", "must be positive");
  if (command == "effective-area" || command == "validate") return;
  try {
    (void)parse_scene_kind(geometry);
  } catch (const std::invalid_argument&) {
    throw ConfigError("geometry", "unknown geometry '" + geometry + "'");
  }
  if (geometry == "custom") throw ConfigError("geometry", "custom scenes are not available from the command line");
  if (geometry == "comb" && !(spacing > 0)) throw ConfigError("spacing", "must be positive");
  if (teeth < 0) throw ConfigError("teeth", "must be >= 0");
  if (ensemble.empty()) {
    try {
      check_ensemble_shape(loops, ppl, effective_dim());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("loops/ppl/dim", e.what());
    }
  }
  if (quad.n_blocks < 1) throw ConfigError("blocks", "must be >= 1");
  if (quad.edge_cells < 1) throw ConfigError("edge-cells", "must be >= 1");
  if (quad.comb_panels < 1) throw ConfigError("comb-panels", "must be >= 1");
  if (quad.method == CmMethod::Grid) {
    try {
      quad.domain.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("cm-spacing/z-lo/z-hi/x-cut", e.what());
    }
  }
  if (command == "density") {
    try {
      grid.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("grid-nx/grid-nz", e.what());
    }
  }
}

JobConfig parse_config(std::istream& in, JobConfig base) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n), "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    try {
      base.set(key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(n), e.what());
    }
  }
  return base;
}

JobConfig load_config(const std::filesystem::path& path, JobConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  return parse_config(in, std::move(base));
}

LoopSource make_source(const JobConfig& c) {
  if (c.ensemble.empty()) return LoopSource::generated(c.loops, c.ppl, c.effective_dim(), c.seed);
  try {
    return LoopSource::stored(load_ensemble(c.ensemble));
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
}

BlockRun run_blocks(const LoopSource& source, const LoopFunctional& functional, const JobConfig& config) {
  const std::size_t count = source.size();
  const std::size_t blocks = std::max<std::size_t>(1, std::min(config.quad.n_blocks, count));
  const std::size_t base = count / blocks, extra = count % blocks;
  BlockRun run;
  run.blocks_total = blocks;
  run.values.assign(count, 0.0);
  json cp;
  if (!config.checkpoint.empty()) cp = load_checkpoint(config, source, blocks);
  std::size_t fresh = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t first = b * base + std::min(b, extra);
    const std::size_t last = first + base + (b < extra ? 1 : 0);
    const std::string id = std::to_string(b);
    if (!cp.is_null() && cp["done"].contains(id)) {
      const std::vector<double> v = cp["done"][id].get<std::vector<double>>();
      if (v.size() != last - first) throw ConfigError("checkpoint", "block " + id + " has the wrong size");
      std::copy(v.begin(), v.end(), run.values.begin() + static_cast<std::ptrdiff_t>(first));
      ++run.blocks_done;
      continue;
    }
    if (config.stop_after_blocks > 0 && fresh == config.stop_after_blocks) continue;
    const std::vector<double> v = loop_values(source, functional, first, last, config.quad.threads);
    std::copy(v.begin(), v.end(), run.values.begin() + static_cast<std::ptrdiff_t>(first));
    ++run.blocks_done;
    ++fresh;
    if (!cp.is_null()) {
      cp["done"][id] = v;
      write_text_atomically(config.checkpoint, cp.dump());
    }
  }
  return run;
}

json to_json(const EnsembleMeta& m) {
  return json{{"seed", m.seed},   {"generator", m.generator_id}, {"loops", m.count},
              {"ppl", m.points}, {"dim", m.dim},                {"format_version", m.format_version}};
}

json to_json(const IntegralResult& r) {
  const CmDomain& d = r.meta.domain;
  json meta{{"observable", r.meta.observable}, {"method", r.meta.method}, {"extrapolated", r.meta.extrapolated},
            {"a", r.meta.a},                   {"power", r.meta.power},   {"loops", r.meta.loops},
            {"ppl", r.meta.points}};
  if (r.meta.method == "grid")
    meta["domain"] = {{"z_lo", d.z_lo},       {"z_hi", d.z_hi}, {"x_cut", d.x_cut},
                      {"spacing", d.spacing}, {"tail", tail_mode_name(d.tail)}};
  return json{{"value", r.value}, {"std_err", r.std_err}, {"n_blocks", r.n_blocks}, {"blocks", r.blocks}, {"meta", meta}};
}

JobOutcome run_job(const JobConfig& config, std::ostream& log) {
  JobOutcome out;
  json& rec = out.record;
  rec["command"] = config.command;
  rec["geometry"] = config.geometry;
  rec["a"] = config.a;
  rec["code_version"] = code_version();
  rec["settings_hash"] = config.settings_hash();
  json cfg = json::object();
  for (const auto& [k, v] : config.key_values()) cfg[k] = v;
  rec["config"] = cfg;
  rec["started"] = iso_now();
  try {
    config.validate();
    json body;
    if (config.command == "gen") {
      body = run_gen(config, log);
    } else if (config.command == "energy" || config.command == "coefficient") {
      body = run_measurement(config, log);
    } else if (config.command == "density") {
      body = run_density(config, log);
    } else if (config.command == "effective-area") {
      body = run_effective_area(config);
    } else {
      ValidationOptions opt;
      opt.threads = config.quad.threads;
      const auto checks = run_validation(opt, &log);
      bool ok = true;
      json list = json::array();
      for (const auto& c : checks) {
        ok = ok && c.passed;
        list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      }
      body = json{{"checks", list}, {"passed", ok}};
      if (!ok) out.exit_code = kExitValidation;
    }
    rec.update(body);
  } catch (const ConfigError& e) {
    rec["error"] = e.what();
    out.exit_code = kExitConfig;
  } catch (const DomainTooSmall& e) {
    rec["error"] = e.what();
    out.exit_code = kExitConfig;
  } catch (const IoError& e) {
    rec["error"] = e.what();
    out.exit_code = kExitIo;
  } catch (const EnsembleFormatError& e) {
    rec["error"] = e.what();
    out.exit_code = kExitIo;
  } catch (const std::invalid_argument& e) {
    rec["error"] = e.what();
    out.exit_code = kExitConfig;
  } catch (const std::exception& e) {
    rec["error"] = e.what();
    out.exit_code = kExitValidation;
  }
  rec["finished"] = iso_now();
  if (!config.output.empty() && config.command != "gen" && out.exit_code != kExitIo) {
    std::ofstream f(config.output);
    if (!f || !(f << rec.dump(2) << '\n')) {
      rec["error"] = "cannot write " + config.output;
      out.exit_code = kExitIo;
    }
  }
  return out;
}

}  // namespace wlc
