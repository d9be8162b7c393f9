// mtsim: trace generation, multi-tier buffer simulation, policy tuning,
// hierarchy recommendation and skew characterization.
//
// Exit codes: 0 success, 2 usage error, 3 validation/configuration error.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mtsim/mtsim.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInvalid = 3;

// Writes to the named file, or stdout when the path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw mtsim::ConfigError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct DeviceFlags {
  std::string catalog;
  double nvm_latency_mult = 2.0;
  std::uint64_t block_size = mtsim::kDefaultBlockSize;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--catalog", catalog, "Device catalog file (default: $MTSIM_CATALOG, else built-in)");
    cmd->add_option("--nvm-latency-mult", nvm_latency_mult,
                    "NVM latency as a multiple of DRAM latency; 0 keeps the catalog's NVM latencies")
        ->capture_default_str();
    cmd->add_option("--block-size", block_size, "Block size in bytes")->capture_default_str();
  }

  mtsim::DeviceCatalog catalog_or_default() const {
    mtsim::DeviceCatalog cat = mtsim::DeviceCatalog::defaults();
    std::string path = catalog;
    if (path.empty()) {
      if (const char* env = std::getenv("MTSIM_CATALOG")) path = env;
    }
    if (!path.empty()) {
      const mtsim::DeviceCatalog loaded = mtsim::DeviceCatalog::load(path);
      for (const auto& [name, spec] : loaded.profiles()) cat.add(name, spec);
    }
    if (nvm_latency_mult < 0) throw mtsim::UsageError("--nvm-latency-mult must be >= 0");
    if (nvm_latency_mult > 0) cat.set_nvm_multiplier(nvm_latency_mult);
    return cat;
  }

  mtsim::Hierarchy hierarchy(const std::string& spec) const {
    if (block_size == 0) throw mtsim::UsageError("--block-size must be positive");
    const auto caps = mtsim::parse_hierarchy_spec(spec);
    return mtsim::make_hierarchy(catalog_or_default(), caps.dram_bytes, caps.nvm_bytes, caps.ssd_bytes, block_size);
  }
};

struct AnnealFlags {
  mtsim::AnnealingConfig config;
  std::string mode = "replay";
  std::string grid;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--alpha", config.alpha, "Cooling factor")->capture_default_str();
    cmd->add_option("--gamma", config.gamma, "Accepted transitions per temperature")->capture_default_str();
    cmd->add_option("--t0", config.t0, "Initial temperature")->capture_default_str();
    cmd->add_option("--tmin", config.t_min, "Final temperature")->capture_default_str();
    cmd->add_option("--lambda", config.lambda, "Weight of the reciprocal NVM-write term")->capture_default_str();
    cmd->add_option("--epoch-ops", config.epoch_ops, "Operations per policy evaluation")->capture_default_str();
    cmd->add_option("--mode", mode, "replay | online")
        ->check(CLI::IsMember({"replay", "online"}))
        ->capture_default_str();
    cmd->add_option("--grid", grid, "Allowed probability values, comma separated (default 0,0.001,...,1)");
  }

  mtsim::AnnealingConfig resolved(std::uint64_t seed) const {
    mtsim::AnnealingConfig c = config;
    c.mode = mode == "online" ? mtsim::TuningMode::Online : mtsim::TuningMode::Replay;
    c.seed = seed;
    return c;
  }

  mtsim::PolicyGrid policy_grid() const {
    if (grid.empty()) return mtsim::PolicyGrid::standard();
    std::vector<double> values;
    for (const auto& item : CLI::detail::split(grid, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw mtsim::UsageError("invalid --grid value '" + item + "'");
      }
    }
    return mtsim::PolicyGrid(std::move(values));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-tier (DRAM/NVM/SSD) buffer management simulator"};
  app.require_subcommand(1);

  // gen-trace
  auto* gen = app.add_subcommand("gen-trace", "Generate a synthetic workload trace");
  std::string workload = "zipf", gen_out, gen_snapshot, gen_hierarchy;
  mtsim::WorkloadSpec wspec;
  double theta = 1.0, log_fraction = 0.2, hot_probability = 0.9, fill = 1.0;
  std::uint64_t log_blocks = 0, hot_blocks = 100, shift_period = 10'000;
  DeviceFlags gen_dev;
  gen->add_option("--workload", workload, "zipf | log | shifting")
      ->check(CLI::IsMember({"zipf", "log", "shifting"}))
      ->capture_default_str();
  gen->add_option("--blocks", wspec.blocks, "Footprint in blocks")->capture_default_str();
  gen->add_option("--ops", wspec.ops, "Number of operations")->capture_default_str();
  auto* theta_opt = gen->add_option("--theta", theta, "Zipf skew exponent (zipf only)")->capture_default_str();
  gen->add_option("--read-ratio", wspec.read_ratio, "Fraction of reads")->capture_default_str();
  auto* logf_opt = gen->add_option("--log-fraction", log_fraction, "Fraction of log writes (log only)");
  auto* logb_opt = gen->add_option("--log-blocks", log_blocks, "Log region size in blocks (log only; default blocks/4)");
  auto* hot_opt = gen->add_option("--hot-blocks", hot_blocks, "Hot window size (shifting only)");
  auto* period_opt = gen->add_option("--shift-period", shift_period, "Ops between window shifts (shifting only)");
  auto* hotp_opt = gen->add_option("--hot-probability", hot_probability, "Chance of a hot access (shifting only)");
  gen->add_option("--seed", wspec.seed, "Random seed")->capture_default_str();
  gen->add_option("-o,--output", gen_out, "Trace file")->required();
  auto* snap_opt = gen->add_option("--snapshot", gen_snapshot, "Also write a warmed snapshot file");
  gen->add_option("--fill", fill, "Snapshot fill fraction of each buffer tier")->capture_default_str();
  gen->add_option("--hierarchy", gen_hierarchy, "Hierarchy sizing the snapshot, e.g. dram:1MB,nvm:8MB,ssd:1GB");
  gen_dev.add_to(gen);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Replay a trace and report metrics");
  std::string sim_trace, sim_hierarchy, sim_policy = "1,1,1,1", sim_format = "json", sim_snapshot, sim_out;
  double sim_warmup = 0.5;
  std::uint64_t sim_seed = 0;
  DeviceFlags sim_dev;
  sim->add_option("--trace", sim_trace, "Trace file")->required();
  sim->add_option("--hierarchy", sim_hierarchy, "dram:<size>,nvm:<size>,ssd:<size>")->required();
  sim->add_option("--policy", sim_policy, "Migration policy d_r,d_w,n_r,n_w")->capture_default_str();
  sim->add_option("--warmup", sim_warmup, "Warm-up fraction of the trace")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim->add_option("--format", sim_format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sim->add_option("--snapshot", sim_snapshot, "Initial residency snapshot");
  sim->add_option("-o,--output", sim_out, "Output file (default stdout)");
  sim_dev.add_to(sim);

  // tune
  auto* tune = app.add_subcommand("tune", "Tune the migration policy with simulated annealing");
  std::string tune_trace, tune_hierarchy, tune_initial = "1,1,1,1", tune_snapshot, tune_out, tune_summary;
  std::uint64_t tune_seed = 0;
  DeviceFlags tune_dev;
  AnnealFlags tune_sa;
  tune->add_option("--trace", tune_trace, "Trace file")->required();
  tune->add_option("--hierarchy", tune_hierarchy, "dram:<size>,nvm:<size>,ssd:<size>")->required();
  tune->add_option("--initial-policy", tune_initial, "Starting policy")->capture_default_str();
  tune->add_option("--seed", tune_seed, "Random seed")->capture_default_str();
  tune->add_option("--snapshot", tune_snapshot, "Initial residency snapshot");
  tune->add_option("-o,--output", tune_out, "Tuning history CSV (default stdout)");
  tune->add_option("--summary", tune_summary, "Best-policy JSON file (default stderr)");
  tune_dev.add_to(tune);
  tune_sa.add_to(tune);

  // recommend
  auto* rec = app.add_subcommand("recommend", "Rank storage hierarchies by throughput per dollar");
  std::string rec_trace, rec_dram = "0,4GB,8GB,16GB,32GB,64GB", rec_nvm = "0,512GB,1TB,2TB", rec_ssd = "0,2TB";
  std::string rec_policy = "1,1,1,1", rec_format = "csv", rec_out;
  double rec_budget = 0.0, rec_warmup = 0.5;
  std::uint64_t rec_seed = 0;
  unsigned rec_parallel = 1;
  bool rec_tune = false;
  DeviceFlags rec_dev;
  AnnealFlags rec_sa;
  rec->add_option("--trace", rec_trace, "Trace file")->required();
  rec->add_option("--budget", rec_budget, "Budget in USD")->required();
  rec->add_option("--dram-set", rec_dram, "Candidate DRAM capacities")->capture_default_str();
  rec->add_option("--nvm-set", rec_nvm, "Candidate NVM capacities")->capture_default_str();
  rec->add_option("--ssd-set", rec_ssd, "Candidate SSD capacities")->capture_default_str();
  auto* rec_policy_opt = rec->add_option("--policy", rec_policy, "Fixed policy for every candidate")->capture_default_str();
  auto* rec_tune_opt = rec->add_flag("--tune", rec_tune, "Anneal a policy per candidate before measuring");
  rec_policy_opt->excludes(rec_tune_opt);
  rec->add_option("--warmup", rec_warmup, "Warm-up fraction")->capture_default_str();
  rec->add_option("--seed", rec_seed, "Random seed")->capture_default_str();
  rec->add_option("--parallel", rec_parallel, "Concurrent candidate simulations")->capture_default_str();
  rec->add_option("--format", rec_format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  rec->add_option("-o,--output", rec_out, "Report file (default stdout)");
  rec_dev.add_to(rec);
  rec_sa.add_to(rec);

  // characterize
  auto* chr = app.add_subcommand("characterize", "Per-block access-count CDF of a trace");
  std::string chr_trace, chr_out;
  chr->add_option("--trace", chr_trace, "Trace file")->required();
  chr->add_option("-o,--output", chr_out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "mtsim: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      const bool zipf = workload == "zipf", log = workload == "log", shifting = workload == "shifting";
      if (!zipf && theta_opt->count()) throw mtsim::UsageError("--theta only applies to --workload zipf");
      if (!log && (logf_opt->count() || logb_opt->count()))
        throw mtsim::UsageError("--log-fraction/--log-blocks only apply to --workload log");
      if (!shifting && (hot_opt->count() || period_opt->count() || hotp_opt->count()))
        throw mtsim::UsageError("--hot-blocks/--shift-period/--hot-probability only apply to --workload shifting");
      if (zipf) wspec.shape = mtsim::ZipfShape{theta};
      if (log) wspec.shape = mtsim::LogAppendShape{log_fraction, log_blocks};
      if (shifting) wspec.shape = mtsim::ShiftingHotSetShape{hot_blocks, shift_period, hot_probability};
      if (snap_opt->count() && gen_hierarchy.empty())
        throw mtsim::UsageError("--snapshot needs --hierarchy to size the buffer tiers");
      wspec.validate();
      if (!(fill >= 0.0 && fill <= 1.0)) throw mtsim::UsageError("--fill must be in [0,1]");

      const mtsim::Trace trace = mtsim::generate(wspec);
      mtsim::write_trace_file(gen_out, trace);
      if (snap_opt->count()) {
        const mtsim::Hierarchy h = gen_dev.hierarchy(gen_hierarchy);
        mtsim::write_snapshot_file(
            gen_snapshot,
            mtsim::make_snapshot(wspec, h.slots(mtsim::TierKind::Dram), h.slots(mtsim::TierKind::Nvm), fill));
      }
      return 0;
    }

    if (sim->parsed()) {
      if (!(sim_warmup >= 0.0 && sim_warmup <= 1.0)) throw mtsim::UsageError("--warmup must be in [0,1]");
      const mtsim::MigrationPolicy policy = mtsim::parse_policy(sim_policy);
      const mtsim::Hierarchy h = sim_dev.hierarchy(sim_hierarchy);
      const mtsim::Trace trace = mtsim::read_trace_file(sim_trace);
      std::optional<mtsim::Snapshot> snap;
      if (!sim_snapshot.empty()) snap = mtsim::read_snapshot_file(sim_snapshot);
      const mtsim::SimMetrics m =
          mtsim::run_trace({policy, sim_warmup, sim_seed}, h, trace, snap ? &*snap : nullptr);
      Output out(sim_out);
      if (sim_format == "csv") mtsim::write_metrics_csv(out.stream(), m);
      else mtsim::write_metrics_json(out.stream(), m);
      return 0;
    }

    if (tune->parsed()) {
      mtsim::AnnealingConfig cfg = tune_sa.resolved(tune_seed);
      cfg.initial = mtsim::parse_policy(tune_initial);
      const mtsim::PolicyGrid grid = tune_sa.policy_grid();
      const mtsim::Hierarchy h = tune_dev.hierarchy(tune_hierarchy);
      const mtsim::Trace trace = mtsim::read_trace_file(tune_trace);
      std::optional<mtsim::Snapshot> snap;
      if (!tune_snapshot.empty()) snap = mtsim::read_snapshot_file(tune_snapshot);
      const mtsim::TuningResult result = mtsim::anneal(cfg, h, trace, grid, snap ? &*snap : nullptr);
      {
        Output out(tune_out);
        mtsim::write_history_csv(out.stream(), result);
      }
      std::ofstream summary_file;
      if (!tune_summary.empty()) {
        summary_file.open(tune_summary, std::ios::binary | std::ios::trunc);
        if (!summary_file) throw mtsim::ConfigError("cannot write '" + tune_summary + "'");
      }
      std::ostream& summary = tune_summary.empty() ? std::cerr : summary_file;
      const auto& p = result.best_policy;
      summary << "{\"best_policy\": [" << p.d_r << ", " << p.d_w << ", " << p.n_r << ", " << p.n_w
              << "], \"best_objective\": " << std::setprecision(17) << result.best_objective
              << ", \"steps\": " << result.history.size() << ", \"simulations\": " << result.simulations
              << ", \"trace_exhausted\": " << (result.trace_exhausted ? "true" : "false") << "}\n";
      return 0;
    }

    if (rec->parsed()) {
      if (!(rec_budget > 0.0)) throw mtsim::UsageError("--budget must be positive");
      if (!(rec_warmup >= 0.0 && rec_warmup <= 1.0)) throw mtsim::UsageError("--warmup must be in [0,1]");
      if (rec_dev.block_size == 0) throw mtsim::UsageError("--block-size must be positive");
      mtsim::CandidateSets sets{mtsim::parse_capacity_list(rec_dram), mtsim::parse_capacity_list(rec_nvm),
                                mtsim::parse_capacity_list(rec_ssd)};
      const mtsim::DeviceCatalog catalog = rec_dev.catalog_or_default();
      mtsim::PolicySource source = rec_tune ? mtsim::PolicySource::tuned_policy(rec_sa.resolved(rec_seed),
                                                                                 rec_sa.policy_grid())
                                            : mtsim::PolicySource::fixed_policy(mtsim::parse_policy(rec_policy));
      const mtsim::Trace trace = mtsim::read_trace_file(rec_trace);
      const mtsim::Recommendation r = mtsim::recommend(
          sets, catalog, rec_budget, trace, source,
          {rec_dev.block_size, rec_warmup, rec_seed, std::max(1u, rec_parallel)});
      if (r.ranking.empty()) std::cerr << "mtsim: warning: no candidate hierarchy fits the budget\n";
      Output out(rec_out);
      if (rec_format == "json") mtsim::write_recommendation_json(out.stream(), r);
      else mtsim::write_recommendation_csv(out.stream(), r);
      return 0;
    }

    if (chr->parsed()) {
      const mtsim::Trace trace = mtsim::read_trace_file(chr_trace);
      Output out(chr_out);
      mtsim::write_skew_cdf(out.stream(), mtsim::characterize(trace));
      return 0;
    }
  } catch (const mtsim::UsageError& e) {
    std::cerr << "mtsim: " << e.what() << '\n';
    return kExitUsage;
  } catch (const mtsim::Error& e) {
    std::cerr << "mtsim: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}
