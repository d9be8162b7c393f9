#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mtsim/mtsim.hpp"

namespace py = pybind11;
using namespace mtsim;

namespace {

py::dict metrics_dict(const SimMetrics& m) {
  py::dict d;
  d["ops_total"] = m.ops_total;
  d["ops_measured"] = m.ops_measured;
  d["sim_time_ns"] = m.sim_time_ns;
  d["throughput_ops_per_s"] = m.throughput_ops_per_s;
  d["nvm_writes"] = m.nvm_writes;
  d["ssd_reads"] = m.ssd_reads;
  d["ssd_writes"] = m.ssd_writes;
  d["dram_hits"] = m.dram_hits;
  d["nvm_hits"] = m.nvm_hits;
  d["dram_evictions"] = m.dram_evictions;
  d["nvm_evictions"] = m.nvm_evictions;
  d["dram_reads"] = m.dram_reads;
  d["dram_writes"] = m.dram_writes;
  d["nvm_reads"] = m.nvm_reads;
  d["read_ops"] = m.read_ops;
  d["write_ops"] = m.write_ops;
  return d;
}

DeviceCatalog catalog_for(const std::optional<std::string>& path, double nvm_latency_mult) {
  DeviceCatalog cat = DeviceCatalog::defaults();
  if (path) {
    const DeviceCatalog loaded = DeviceCatalog::load(*path);
    for (const auto& [name, spec] : loaded.profiles()) cat.add(name, spec);
  }
  if (nvm_latency_mult > 0) cat.set_nvm_multiplier(nvm_latency_mult);
  return cat;
}

Trace generate_with(WorkloadShape shape, std::uint64_t blocks, std::uint64_t ops, double read_ratio,
                    std::uint64_t seed) {
  return generate(WorkloadSpec{std::move(shape), blocks, ops, read_ratio, seed});
}

PolicyGrid grid_named(const std::string& name) {
  if (name == "standard") return PolicyGrid::standard();
  if (name == "binary") return PolicyGrid::binary();
  throw UsageError("grid must be 'standard' or 'binary'");
}

AnnealingConfig anneal_config(std::uint64_t epoch_ops, double alpha, std::uint64_t gamma, double t0, double t_min,
                              double lambda, const std::string& mode, std::uint64_t seed,
                              const MigrationPolicy& initial) {
  AnnealingConfig c;
  c.epoch_ops = epoch_ops;
  c.alpha = alpha;
  c.gamma = gamma;
  c.t0 = t0;
  c.t_min = t_min;
  c.lambda = lambda;
  if (mode != "replay" && mode != "online") throw UsageError("mode must be 'replay' or 'online'");
  c.mode = mode == "online" ? TuningMode::Online : TuningMode::Replay;
  c.seed = seed;
  c.initial = initial;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-tier DRAM/NVM/SSD buffer management simulator";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", error.ptr());
  auto config = py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", config.ptr());
  auto parse = py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", parse.ptr());
  py::register_exception<ModelError>(m, "ModelError", error.ptr());

  py::class_<MigrationPolicy>(m, "MigrationPolicy")
      .def(py::init([](double d_r, double d_w, double n_r, double n_w) {
             MigrationPolicy p{d_r, d_w, n_r, n_w};
             p.validate();
             return p;
           }),
           py::arg("d_r") = 1.0, py::arg("d_w") = 1.0, py::arg("n_r") = 1.0, py::arg("n_w") = 1.0)
      .def_static("parse", &parse_policy)
      .def_readonly("d_r", &MigrationPolicy::d_r)
      .def_readonly("d_w", &MigrationPolicy::d_w)
      .def_readonly("n_r", &MigrationPolicy::n_r)
      .def_readonly("n_w", &MigrationPolicy::n_w)
      .def("__eq__", [](const MigrationPolicy& a, const MigrationPolicy& b) { return a == b; })
      .def("__hash__", [](const MigrationPolicy& p) { return py::hash(py::make_tuple(p.d_r, p.d_w, p.n_r, p.n_w)); })
      .def("__repr__", [](const MigrationPolicy& p) { return "MigrationPolicy(" + p.to_string() + ")"; });

  py::class_<Hierarchy>(m, "Hierarchy")
      .def_readonly("block_size", &Hierarchy::block_size)
      .def("slots", [](const Hierarchy& h, const std::string& tier) { return h.slots(parse_tier_kind(tier)); })
      .def_property_readonly("cost", &Hierarchy::total_cost);

  m.def(
      "hierarchy",
      [](const std::string& spec, std::uint64_t block_size, double nvm_latency_mult,
         const std::optional<std::string>& catalog) {
        const auto caps = parse_hierarchy_spec(spec);
        return make_hierarchy(catalog_for(catalog, nvm_latency_mult), caps.dram_bytes, caps.nvm_bytes, caps.ssd_bytes,
                              block_size);
      },
      py::arg("spec"), py::arg("block_size") = kDefaultBlockSize, py::arg("nvm_latency_mult") = 2.0,
      py::arg("catalog") = py::none(), "Hierarchy from 'dram:<size>,nvm:<size>,ssd:<size>'.");

  m.def("parse_size", &parse_size);
  m.def(
      "block_transfer_time",
      [](const std::string& device, const std::string& direction, std::uint64_t block_size, double nvm_latency_mult) {
        if (direction != "read" && direction != "write") throw UsageError("direction must be 'read' or 'write'");
        return block_transfer_time(catalog_for(std::nullopt, nvm_latency_mult).get(device),
                                   direction == "read" ? Direction::Read : Direction::Write, block_size);
      },
      py::arg("device"), py::arg("direction"), py::arg("block_size") = kDefaultBlockSize,
      py::arg("nvm_latency_mult") = 0.0);

  py::class_<Trace>(m, "Trace")
      .def(py::init([](std::uint64_t footprint, const std::vector<std::pair<std::string, BlockId>>& ops) {
             Trace t;
             t.footprint_blocks = footprint;
             for (const auto& [k, b] : ops) {
               if (k != "R" && k != "W") throw UsageError("operation kind must be 'R' or 'W'");
               t.ops.push_back({k == "R" ? OpKind::Read : OpKind::Write, b});
             }
             t.validate();
             return t;
           }),
           py::arg("footprint_blocks"), py::arg("ops"))
      .def_readonly("footprint_blocks", &Trace::footprint_blocks)
      .def("__len__", &Trace::size)
      .def("__eq__", [](const Trace& a, const Trace& b) { return a == b; })
      .def_property_readonly("ops",
                             [](const Trace& t) {
                               py::list out;
                               for (const auto& op : t.ops)
                                 out.append(py::make_tuple(op.kind == OpKind::Read ? "R" : "W", op.block));
                               return out;
                             })
      .def("referenced_blocks", &Trace::referenced_blocks)
      .def("read_count", &Trace::read_count)
      .def("save", [](const Trace& t, const std::string& path) { write_trace_file(path, t); })
      .def_static("load", &read_trace_file)
      .def("dumps",
           [](const Trace& t) {
             std::ostringstream out;
             write_trace(out, t);
             return out.str();
           })
      .def_static("loads", [](const std::string& text) {
        std::istringstream in(text);
        return read_trace(in);
      });

  m.def(
      "generate_zipf",
      [](std::uint64_t blocks, std::uint64_t ops, double theta, double read_ratio, std::uint64_t seed) {
        return generate_with(ZipfShape{theta}, blocks, ops, read_ratio, seed);
      },
      py::arg("blocks"), py::arg("ops"), py::arg("theta") = 1.0, py::arg("read_ratio") = 0.9, py::arg("seed") = 0);
  m.def(
      "generate_log",
      [](std::uint64_t blocks, std::uint64_t ops, double log_fraction, std::uint64_t log_blocks, double read_ratio,
         std::uint64_t seed) {
        return generate_with(LogAppendShape{log_fraction, log_blocks}, blocks, ops, read_ratio, seed);
      },
      py::arg("blocks"), py::arg("ops"), py::arg("log_fraction") = 0.2, py::arg("log_blocks") = 0,
      py::arg("read_ratio") = 0.9, py::arg("seed") = 0);
  m.def(
      "generate_shifting",
      [](std::uint64_t blocks, std::uint64_t ops, std::uint64_t hot_blocks, std::uint64_t shift_period,
         double hot_probability, double read_ratio, std::uint64_t seed) {
        return generate_with(ShiftingHotSetShape{hot_blocks, shift_period, hot_probability}, blocks, ops, read_ratio,
                             seed);
      },
      py::arg("blocks"), py::arg("ops"), py::arg("hot_blocks") = 100, py::arg("shift_period") = 10'000,
      py::arg("hot_probability") = 0.9, py::arg("read_ratio") = 0.9, py::arg("seed") = 0);

  m.def(
      "characterize",
      [](const Trace& t) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : characterize(t)) out.emplace_back(p.block_fraction, p.access_fraction);
        return out;
      },
      py::arg("trace"), "Per-block access-count CDF as (block_fraction, access_fraction) pairs.");

  m.def(
      "simulate",
      [](const Trace& trace, const Hierarchy& h, const MigrationPolicy& policy, double warmup, std::uint64_t seed) {
        SimMetrics metrics;
        {
          py::gil_scoped_release release;
          metrics = run_trace(EngineConfig{policy, warmup, seed}, h, trace);
        }
        return metrics_dict(metrics);
      },
      py::arg("trace"), py::arg("hierarchy"), py::arg("policy") = MigrationPolicy::eager(), py::arg("warmup") = 0.5,
      py::arg("seed") = 0);

  m.def(
      "tune",
      [](const Trace& trace, const Hierarchy& h, std::uint64_t epoch_ops, double alpha, std::uint64_t gamma,
         double t0, double t_min, double lambda, const std::string& mode, std::uint64_t seed,
         const MigrationPolicy& initial, const std::string& grid) {
        const AnnealingConfig c = anneal_config(epoch_ops, alpha, gamma, t0, t_min, lambda, mode, seed, initial);
        const PolicyGrid g = grid_named(grid);
        TuningResult r;
        {
          py::gil_scoped_release release;
          r = anneal(c, h, trace, g);
        }
        py::list history;
        for (const auto& s : r.history)
          history.append(py::make_tuple(s.step, s.temperature, s.policy, s.objective, s.accepted));
        py::dict out;
        out["best_policy"] = r.best_policy;
        out["best_objective"] = r.best_objective;
        out["history"] = history;
        out["simulations"] = r.simulations;
        out["trace_exhausted"] = r.trace_exhausted;
        return out;
      },
      py::arg("trace"), py::arg("hierarchy"), py::arg("epoch_ops"), py::arg("alpha") = 0.9, py::arg("gamma") = 10,
      py::arg("t0") = 800.0, py::arg("t_min") = 0.00008, py::arg("lambda_") = 0.0, py::arg("mode") = "replay",
      py::arg("seed") = 0, py::arg("initial") = MigrationPolicy::eager(), py::arg("grid") = "standard");

  m.def(
      "recommend",
      [](const Trace& trace, double budget, const std::string& dram_set, const std::string& nvm_set,
         const std::string& ssd_set, const MigrationPolicy& policy, double warmup, std::uint64_t seed,
         unsigned parallel, double nvm_latency_mult) {
        const CandidateSets sets{parse_capacity_list(dram_set), parse_capacity_list(nvm_set),
                                 parse_capacity_list(ssd_set)};
        const DeviceCatalog cat = catalog_for(std::nullopt, nvm_latency_mult);
        RecommendOptions opt;
        opt.warmup_fraction = warmup;
        opt.seed = seed;
        opt.parallel = parallel;
        Recommendation rec;
        {
          py::gil_scoped_release release;
          rec = recommend(sets, cat, budget, trace, PolicySource::fixed_policy(policy), opt);
        }
        py::list out;
        for (const auto& e : rec.ranking) {
          py::dict d;
          d["rank"] = e.rank;
          d["dram_bytes"] = e.choice.dram_bytes;
          d["nvm_bytes"] = e.choice.nvm_bytes;
          d["ssd_bytes"] = e.choice.ssd_bytes;
          d["cost"] = e.choice.cost;
          d["throughput"] = e.throughput;
          d["perf_per_price"] = e.perf_per_price;
          d["metrics"] = metrics_dict(e.metrics);
          d["error"] = e.error;
          out.append(d);
        }
        return out;
      },
      py::arg("trace"), py::arg("budget"), py::arg("dram_set") = "0,4GB,8GB,16GB,32GB,64GB",
      py::arg("nvm_set") = "0,512GB,1TB,2TB", py::arg("ssd_set") = "0,2TB",
      py::arg("policy") = MigrationPolicy::eager(), py::arg("warmup") = 0.5, py::arg("seed") = 0,
      py::arg("parallel") = 1, py::arg("nvm_latency_mult") = 2.0);

  m.def(
      "effective_access_time",
      [](const std::vector<std::pair<double, double>>& curve, const std::vector<std::pair<double, double>>& levels) {
        std::vector<LevelTiming> lv;
        for (const auto& [c, t] : levels) lv.push_back({c, t});
        return effective_access_time(HitRatioCurve(curve), lv);
      },
      py::arg("curve"), py::arg("levels"),
      "curve: (capacity, hit_fraction) points; levels: (capacity, access_time) from fastest to slowest.");
}
