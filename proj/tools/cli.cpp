#include "cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "commonlines/denoise.hpp"
#include "commonlines/io.hpp"

namespace commonlines::cli {

namespace {

/// Raised for anything that should exit with kExitUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalFlags {
  std::string config_path;
  std::optional<double> tol_eq;
  std::optional<double> tol_ineq;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  std::optional<std::string> base_triple;
};

RunConfig resolve_config(const GlobalFlags& flags) {
  RunConfig cfg;
  std::string path = flags.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv)) path = env;
  }
  if (!path.empty()) cfg.merge(read_json_file(path));
  if (flags.tol_eq) cfg.tolerances.eq_tol = *flags.tol_eq;
  if (flags.tol_ineq) cfg.tolerances.ineq_margin = *flags.tol_ineq;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.max_iters) cfg.max_iters = *flags.max_iters;
  if (flags.base_triple) cfg.base = *flags.base_triple == "best" ? BaseSelection::Best : BaseSelection::First;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

Json load_json(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return parse_json_text(buf.str());
  }
  return read_json_file(path);
}

/// Loading failures of any kind are input errors.
template <typename T>
T load_dataset(const std::string& path, NormPolicy policy) {
  try {
    Dataset ds = dataset_from_json(load_json(path), policy);
    if (auto* typed = std::get_if<T>(&ds)) return std::move(*typed);
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
  throw UsageError(path + ": expected a " +
                   std::string(std::is_same_v<T, FramesDataset> ? "frames" : "common_lines") +
                   " dataset");
}

void save(const std::string& path, const Json& j) {
  try {
    write_text_file(path, dump(j));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

Json provenance(const Json& base, const char* step) {
  Json meta = base.is_object() ? base : Json::object();
  meta["tool"] = kToolVersion;
  meta["step"] = step;
  return meta;
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

std::string join(const Json& indices) {
  std::string out;
  for (const auto& x : indices) out += (out.empty() ? "" : ",") + std::to_string(x.get<int>());
  return out;
}

void write_table(const Json& report, std::ostream& out) {
  const auto& tol = report.at("tolerances");
  const double eq_tol = tol.at("eq_tol").get<double>();
  const double margin = tol.at("ineq_margin").get<double>();
  auto value = [](const Json& v) { return v.is_null() ? std::string("nan") : fmt(v.get<double>()); };

  out << "family\tindices\tvalue\tthreshold\tpasses\n";
  for (const auto& c : report.at("norm_checks")) {
    out << "norm\t" << join(c.at("indices")) << '\t' << value(c.at("residual")) << '\t'
        << fmt(eq_tol) << '\t' << (c.at("passes").get<bool>() ? 1 : 0) << '\n';
  }
  for (const auto& c : report.at("triangle_certificates")) {
    out << "triangle\t" << join(c.at("indices")) << '\t' << value(c.at("gram_value")) << '\t'
        << fmt(margin) << '\t' << (c.at("passes").get<bool>() ? 1 : 0) << '\n';
  }
  for (const auto& c : report.at("loc_certificates")) {
    out << "loc\t" << join(c.at("left")) << '/' << join(c.at("right")) << '\t'
        << value(c.at("residual_signed")) << '\t' << fmt(eq_tol) << '\t'
        << (c.at("passes").get<bool>() ? 1 : 0) << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Common lines toolkit: generate, certify, reconstruct and denoise", "clines"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--config", flags.config_path,
                 std::string("JSON config file (default: $") + kConfigEnv + ")");
  app.add_option("--tol-eq", flags.tol_eq, "tolerance for equality certificates");
  app.add_option("--tol-ineq", flags.tol_ineq, "margin for strict inequality certificates");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--max-iters", flags.max_iters, "optimizer iteration cap");
  app.add_option("--base-triple", flags.base_triple, "reconstruction base triple")
      ->check(CLI::IsMember({"first", "best"}));

  std::string in_path, out_path, frames_out;
  int n = 0;
  double sigma = 0.0;
  double min_sine = kDefaultConditioning;
  std::vector<int> triple;

  auto* generate = app.add_subcommand("generate", "sample a random generic frame set");
  generate->add_option("--n", n, "number of frames (>= 3)")->required();
  generate->add_option("--out", out_path, "output frames file")->required();
  generate->add_option("--min-sine", min_sine, "conditioning floor on plane sines, line sines and normal triple volumes");

  auto* realize = app.add_subcommand("realize", "common lines of a frame set");
  realize->add_option("--in", in_path, "frames file")->required();
  realize->add_option("--out", out_path, "output common lines file")->required();

  auto* validate = app.add_subcommand("validate", "certify common lines data");
  validate->add_option("--in", in_path, "common lines file ('-' for stdin)")->required();

  auto* reconstruct = app.add_subcommand("reconstruct", "recover frames from valid data");
  reconstruct->add_option("--in", in_path, "common lines file")->required();
  reconstruct->add_option("--out", out_path, "output frames file")->required();

  auto* perturb_cmd = app.add_subcommand("perturb", "add seeded Gaussian noise");
  perturb_cmd->add_option("--in", in_path, "common lines file")->required();
  perturb_cmd->add_option("--sigma", sigma, "noise standard deviation")->required();
  perturb_cmd->add_option("--out", out_path, "output common lines file")->required();

  auto* denoise = app.add_subcommand("denoise", "project noisy data onto valid data");
  denoise->add_option("--in", in_path, "common lines file")->required();
  denoise->add_option("--out", out_path, "output common lines file")->required();
  denoise->add_option("--frames-out", frames_out, "also write the fitted frames");

  auto* angles = app.add_subcommand("angles", "triangle angles of a triple");
  angles->add_option("--in", in_path, "common lines file")->required();
  angles->add_option("indices", triple, "three distinct 1-based plane indices")
      ->required()
      ->expected(3);

  auto* plotdata = app.add_subcommand("plotdata", "tab-separated certificate table");
  plotdata->add_option("--in", in_path, "common lines file or validity report ('-' for stdin)")
      ->required();

  std::vector<const char*> argv{"clines"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const RunConfig cfg = resolve_config(flags);

    if (*generate) {
      if (n < 3) throw UsageError("--n must be at least 3");
      if (!(min_sine > 0)) throw UsageError("--min-sine must be positive");
      std::mt19937_64 rng(cfg.seed);
      constexpr int kMaxAttempts = 100;
      std::optional<FrameSet> frames = sample_generic_frames(n, rng, min_sine, kMaxAttempts);
      if (!frames) {
        err << "error: no sample with conditioning >= " << min_sine << " in " << kMaxAttempts
            << " attempts\n";
        return kExitRetries;
      }
      Json meta = provenance(Json::object(), "generate");
      meta["seed"] = cfg.seed;
      meta["min_sine"] = min_sine;
      save(out_path, to_json(FramesDataset{std::move(*frames), meta}));
      return kExitOk;
    }

    if (*realize) {
      auto ds = load_dataset<FramesDataset>(in_path, NormPolicy::Strict);
      CommonLinesData data = realize_all(ds.frames, cfg.tolerances.degenerate_tol);
      save(out_path, to_json(LinesDataset{std::move(data), provenance(ds.metadata, "realize")}));
      return kExitOk;
    }

    if (*validate) {
      auto ds = load_dataset<LinesDataset>(in_path, NormPolicy::Lenient);
      const ValidityReport report = is_valid(ds.data, cfg.tolerances);
      out << dump(report_to_json(report));
      return report.verdict == Verdict::Valid ? kExitOk : kExitFailed;
    }

    if (*reconstruct) {
      auto ds = load_dataset<LinesDataset>(in_path, NormPolicy::Strict);
      ReconstructOptions opts;
      opts.tolerances = cfg.tolerances;
      opts.base = cfg.base;
      const ReconstructionResult r = reconstruct_all(ds.data, opts);
      save(out_path, to_json(FramesDataset{r.frames, provenance(ds.metadata, "reconstruct")}));
      Json summary;
      summary["max_residual"] = r.max_residual;
      summary["base"] = {r.base[0] + 1, r.base[1] + 1, r.base[2] + 1};
      out << dump(summary);
      return kExitOk;
    }

    if (*perturb_cmd) {
      if (!(sigma >= 0)) throw UsageError("--sigma must be non-negative");
      auto ds = load_dataset<LinesDataset>(in_path, NormPolicy::Strict);
      Json meta = provenance(ds.metadata, "perturb");
      meta["sigma"] = sigma;
      meta["noise_seed"] = cfg.seed;
      save(out_path, to_json(LinesDataset{perturb(ds.data, {sigma, cfg.seed}), meta}));
      return kExitOk;
    }

    if (*denoise) {
      auto ds = load_dataset<LinesDataset>(in_path, NormPolicy::Lenient);
      ProjectOptions opts;
      opts.max_iters = cfg.max_iters;
      opts.tolerances = cfg.tolerances;
      const ProjectionResult r = project_to_cn(ds.data, opts);
      save(out_path, to_json(LinesDataset{r.projected, provenance(ds.metadata, "denoise")}));
      if (!frames_out.empty()) {
        save(frames_out, to_json(FramesDataset{r.frames, provenance(ds.metadata, "denoise")}));
      }
      Json summary;
      summary["objective"] = r.objective;
      summary["initial_objective"] = r.objective_history.front();
      summary["iterations"] = r.iterations;
      summary["converged"] = r.converged;
      out << dump(summary);
      return kExitOk;
    }

    if (*angles) {
      auto ds = load_dataset<LinesDataset>(in_path, NormPolicy::Strict);
      for (int x : triple) {
        if (x < 1 || x > ds.data.n()) throw UsageError("plane index out of range");
      }
      const TripleAngles t = triple_angles(ds.data, triple[0] - 1, triple[1] - 1, triple[2] - 1,
                                           cfg.tolerances.degenerate_tol);
      Json j;
      j["indices"] = {t.i + 1, t.j + 1, t.k + 1};
      j["alpha"] = t.alpha;
      j["beta"] = t.beta;
      j["gamma"] = t.gamma;
      out << dump(j);
      return kExitOk;
    }

    if (*plotdata) {
      Json j;
      try {
        j = load_json(in_path);
      } catch (const Error& e) {
        throw UsageError(in_path + ": " + e.what());
      }
      Json report;
      if (j.is_object() && j.contains("kind") && j.at("kind") == "validity_report") {
        report = std::move(j);
      } else {
        std::optional<Dataset> ds;
        try {
          ds = dataset_from_json(j, NormPolicy::Lenient);
        } catch (const Error& e) {
          throw UsageError(in_path + ": " + e.what());
        }
        auto* lines = std::get_if<LinesDataset>(&*ds);
        if (!lines) throw UsageError(in_path + ": expected common lines or a validity report");
        report = report_to_json(is_valid(lines->data, cfg.tolerances));
      }
      try {
        write_table(report, out);
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(in_path + ": malformed report: " + e.what());
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::ParseError ? kExitUsage : kExitFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace commonlines::cli
