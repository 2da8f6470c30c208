// xrtgr: run scenarios, sweep user loads, check the decision tables.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "xrtgr/xrtgr.hpp"

namespace fs = std::filesystem;
using namespace xrtgr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("xrtgr");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* lvl = std::getenv("LOG_LEVEL")) {
    const auto parsed = spdlog::level::from_str(lvl);
    if (parsed == spdlog::level::off && std::string(lvl) != "off")
      spdlog::warn("unknown LOG_LEVEL '{}', keeping info", lvl);
    else
      spdlog::set_level(parsed);
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw IoError("cannot write " + p.string());
  return os;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_tables(const fs::path& out, const SweepResult& r) {
  ensure_dir(out);
  auto cap = open_out(out / "capacity.csv");
  write_capacity_csv(cap, r);
  auto sum = open_out(out / "capacity_summary.csv");
  write_capacity_summary_csv(sum, r);
  auto delay = open_out(out / "delay.csv");
  write_delay_csv(delay, r);
  auto prb = open_out(out / "prb.csv");
  write_prb_csv(prb, r);
  auto embb = open_out(out / "embb.csv");
  write_embb_csv(embb, r);
}

// ---------------------------------------------------------------------------

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  std::optional<int> users;
  std::optional<double> duration_s;
  int parallel{1};
  std::string out{"out"};
  std::string trace_dir;
  bool frames{false};
  bool json{false};
};

void write_traces(const ScenarioConfig& cfg, const fs::path& dir) {
  ensure_dir(dir);
  auto ch = open_out(dir / "channel.csv");
  auto arr = open_out(dir / "arrivals.csv");
  auto olla = open_out(dir / "olla.csv");
  auto tb = open_out(dir / "tb.csv");
  auto alloc = open_out(dir / "alloc.csv");
  ch << "slot,ue,cell,sinr_db,cqi\n";
  arr << "flow,frame,arrival_ms,size_bits,deadline_ms\n";
  olla << "slot,flow,hf_j,offset_db\n";
  tb << "slot,cell,flow,process,tx,mcs,n_prb,tb_bits,sinr_x_db,sinr_t_db,scenario,relay,x_action,hf_x1,hf_t1,hf_x2,"
        "delivered\n";
  alloc << "slot,cell,flow,class,prb_start,n_prb,mcs,tb_bits\n";
  TraceSinks sinks{&ch, &arr, &olla, &tb, &alloc};
  run_drop(cfg, cfg.seed, sinks);
}

int cmd_run(const RunOptions& o) {
  ScenarioConfig cfg = load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.drops) cfg.drops = *o.drops;
  if (o.users) cfg.users_per_cell = *o.users;
  if (o.duration_s) cfg.sim_duration_s = *o.duration_s;
  validate(cfg);

  const std::string label = scheme_label(cfg);
  spdlog::info("{} {}: {} users/cell, {} drops x {} s, seed {}", to_string(cfg.deployment), label, cfg.users_per_cell,
               cfg.drops, cfg.sim_duration_s, cfg.seed);
  const auto drops = run_campaign(cfg, o.parallel, [](int done, int total) {
    spdlog::debug("drop {}/{} done", done, total);
  });
  for (const auto& d : drops)
    if (!d.conserved()) throw std::runtime_error("bit conservation violated in drop " + std::to_string(d.seed));

  SweepResult r;
  r.cells.push_back({label, cfg.csi_mode, cfg.pdb_ms, cfg.users_per_cell, summarize(drops)});
  r.curves.push_back(
      {label, cfg.csi_mode,
       xr_capacity({{cfg.users_per_cell, r.cells.back().summary.satisfied_fraction}}, cfg.pdb_ms)});

  const fs::path out(o.out);
  write_tables(out, r);
  nlohmann::json j{{"config", to_json(cfg)}, {"scheme", label}, {"kpi", to_json(r.cells.back().summary)}};
  {
    auto js = open_out(out / "summary.json");
    js << j.dump(2) << '\n';
  }
  if (o.frames) {
    auto fl = open_out(out / "frames.csv");
    write_frame_log_csv(fl, drops);
  }
  if (!o.trace_dir.empty()) write_traces(cfg, o.trace_dir);

  const auto& s = r.cells.back().summary;
  if (o.json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "scheme            " << label << '\n'
              << "satisfied users   " << s.satisfied_users << '/' << s.xr_users << " (" << fmt_fixed(s.satisfied_fraction, 3)
              << ")\n"
              << "delay p50/p99 ms  " << fmt_fixed(s.delay_p50_ms, 3) << " / " << fmt_fixed(s.delay_p99_ms, 3) << '\n'
              << "median PRB load   " << fmt_fixed(s.prb_load_median, 3) << '\n'
              << "max-MCS fraction  " << fmt_fixed(s.max_mcs_fraction, 3) << '\n'
              << "initial BLER      " << fmt_fixed(s.initial_bler, 4) << '\n'
              << "results in        " << out.string() << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
  std::string config;
  std::string users{"1..10"};
  std::vector<std::string> schemes{"legacy", "SCS", "SSCS"};
  std::vector<double> pdbs;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  std::optional<double> duration_s;
  std::optional<int> embb;
  int parallel{1};
  std::string out{"sweep"};
  bool json{false};
};

int cmd_sweep(const SweepOptions& o) {
  ScenarioConfig cfg = o.config.empty() ? default_config() : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.drops) cfg.drops = *o.drops;
  if (o.duration_s) cfg.sim_duration_s = *o.duration_s;
  if (o.embb) cfg.embb_users_per_cell = *o.embb;
  SweepSpec spec;
  spec.users = parse_user_range(o.users);
  spec.schemes = o.schemes;
  spec.pdbs_ms = o.pdbs.empty() ? std::vector<double>{cfg.pdb_ms} : o.pdbs;
  spec.parallel = o.parallel;
  for (const auto& s : spec.schemes) validate(apply_scheme(cfg, parse_scheme(s)));

  const SweepResult r = run_sweep(cfg, spec, [](const std::string& scheme, double pdb, int users) {
    spdlog::info("{} PDB {} ms, {} users/cell", scheme, pdb, users);
  });
  const fs::path out(o.out);
  write_tables(out, r);
  const nlohmann::json j = to_json(r);
  {
    auto js = open_out(out / "summary.json");
    nlohmann::json full = j;
    full["config"] = to_json(cfg);
    js << full.dump(2) << '\n';
  }
  if (o.json) {
    std::cout << j["capacity"].dump(2) << '\n';
  } else {
    std::cout << "scheme              pdb_ms  capacity  interp\n";
    for (const auto& c : r.curves) {
      std::string name = c.scheme;
      name.resize(std::max<std::size_t>(name.size(), 20), ' ');
      std::cout << name << fmt_fixed(c.curve.pdb_ms, 1) << "    " << c.curve.capacity << "         "
                << fmt_fixed(c.curve.capacity_interp, 2) << '\n';
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_validate_tables(bool json) {
  const auto rows = validate_tables();
  int failed = 0;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    if (!r.pass()) ++failed;
    const std::string branch = r.soft_outcome ? std::string(to_string(*r.soft_outcome)) : "-";
    if (json) {
      arr.push_back({{"scenario", r.scenario},
                     {"scheme", to_string(r.scheme)},
                     {"hf_x2", branch},
                     {"expected", {{"relay", to_string(r.expected_relay)},
                                   {"x_action", to_string(r.expected_action)},
                                   {"retransmit", r.expected_retx},
                                   {"offset", direction_label(r.expected_direction)}}},
                     {"actual", {{"relay", to_string(r.relay)},
                                 {"x_action", to_string(r.action)},
                                 {"retransmit", r.retx},
                                 {"offset", direction_label(r.direction)}}},
                     {"pass", r.pass()}});
      continue;
    }
    std::printf("%-4s scenario %d %-4s hf_x2=%-4s | expected %-8s %-11s retx=%-3s offset %-4s | actual %-8s %-11s "
                "retx=%-3s offset %-4s\n",
                r.pass() ? "ok" : "FAIL", r.scenario, to_string(r.scheme), branch.c_str(),
                to_string(r.expected_relay), to_string(r.expected_action), r.expected_retx ? "yes" : "no",
                direction_label(r.expected_direction).c_str(), to_string(r.relay), to_string(r.action),
                r.retx ? "yes" : "no", direction_label(r.direction).c_str());
  }
  if (json) {
    std::cout << nlohmann::json{{"rows", arr}, {"passed", rows.size() - failed}, {"failed", failed}}.dump(2) << '\n';
  } else {
    std::printf("%zu/%zu rows match\n", rows.size() - failed, rows.size());
  }
  if (failed > 0) {
    for (const auto& r : rows)
      if (!r.pass()) spdlog::error("mismatch in scenario {} under {}", r.scenario, to_string(r.scheme));
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"XR tethering-group downlink system-level simulator"};
  app.require_subcommand(1);

  RunOptions ro;
  auto* run = app.add_subcommand("run", "simulate one scenario and write KPI files");
  run->add_option("--config", ro.config, "scenario YAML")->required();
  run->add_option("--seed", ro.seed, "root seed (drop d uses seed + d)");
  run->add_option("--drops", ro.drops, "number of drops")->check(CLI::PositiveNumber);
  run->add_option("--users-per-cell", ro.users, "XR users per cell")->check(CLI::NonNegativeNumber);
  run->add_option("--duration", ro.duration_s, "seconds per drop")->check(CLI::PositiveNumber);
  run->add_option("--parallel", ro.parallel, "worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", ro.out, "output directory");
  run->add_option("--trace-dir", ro.trace_dir, "write per-slot traces of the first drop here");
  run->add_flag("--frames", ro.frames, "also write the per-frame log");
  run->add_flag("--json", ro.json, "print the summary as JSON");

  SweepOptions so;
  auto* sweep = app.add_subcommand("sweep", "capacity sweep over user loads and schemes");
  sweep->add_option("--config", so.config, "base scenario YAML (default: built-in InH)");
  sweep->add_option("--users", so.users, "user range a..b");
  sweep->add_option("--schemes", so.schemes, "scheme labels")->delimiter(',');
  sweep->add_option("--pdb", so.pdbs, "packet delay budgets in ms")->delimiter(',');
  sweep->add_option("--seed", so.seed, "root seed");
  sweep->add_option("--drops", so.drops, "drops per point")->check(CLI::PositiveNumber);
  sweep->add_option("--duration", so.duration_s, "seconds per drop")->check(CLI::PositiveNumber);
  sweep->add_option("--embb-per-cell", so.embb, "eMBB users per cell")->check(CLI::NonNegativeNumber);
  sweep->add_option("--parallel", so.parallel, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", so.out, "output directory");
  sweep->add_flag("--json", so.json, "print capacities as JSON");

  bool vt_json = false;
  auto* vt = app.add_subcommand("validate-tables", "check cooperation and joint-feedback tables");
  vt->add_flag("--json", vt_json, "machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(ro);
    if (*sweep) return cmd_sweep(so);
    if (*vt) return cmd_validate_tables(vt_json);
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
