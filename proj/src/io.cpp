#include "commonlines/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace commonlines {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) parse_error(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

template <int Dim>
Eigen::Matrix<double, Dim, 1> vec_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_array() || v.size() != static_cast<std::size_t>(Dim)) {
    parse_error(std::string("field \"") + key + "\" must be an array of " + std::to_string(Dim) +
                " numbers");
  }
  Eigen::Matrix<double, Dim, 1> out;
  for (int k = 0; k < Dim; ++k) {
    if (!v[static_cast<std::size_t>(k)].is_number()) {
      parse_error(std::string("field \"") + key + "\" must contain numbers");
    }
    out[k] = v[static_cast<std::size_t>(k)].get<double>();
  }
  return out;
}

template <typename Derived>
Json vec_json(const Eigen::MatrixBase<Derived>& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

Json one_based(std::initializer_list<int> indices) {
  Json out = Json::array();
  for (int x : indices) out.push_back(x + 1);
  return out;
}

Json header(const char* kind, int n, const Json& metadata) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  j["n"] = n;
  j["metadata"] = metadata.is_object() ? metadata : Json::object();
  return j;
}

std::string offender_kind(Offender::Kind k) {
  switch (k) {
    case Offender::Kind::Norm: return "norm";
    case Offender::Kind::Triangle: return "triangle";
    case Offender::Kind::Loc: return "loc";
  }
  return "unknown";
}

}  // namespace

Json to_json(const FramesDataset& ds) {
  Json j = header("frames", static_cast<int>(ds.frames.size()), ds.metadata);
  Json frames = Json::array();
  for (const auto& f : ds.frames) {
    Json rec;
    rec["a"] = vec_json(f.a());
    rec["b"] = vec_json(f.b());
    frames.push_back(std::move(rec));
  }
  j["frames"] = std::move(frames);
  return j;
}

Json to_json(const LinesDataset& ds) {
  Json j = header("common_lines", ds.data.n(), ds.metadata);
  Json pairs = Json::array();
  for (const auto& p : ds.data.pairs()) {
    Json rec;
    rec["i"] = p.i() + 1;
    rec["j"] = p.j() + 1;
    rec["v_ij"] = vec_json(p.v_ij());
    rec["v_ji"] = vec_json(p.v_ji());
    pairs.push_back(std::move(rec));
  }
  j["pairs"] = std::move(pairs);
  return j;
}

Dataset dataset_from_json(const Json& j, NormPolicy policy) {
  if (!j.is_object()) parse_error("dataset must be a JSON object");
  const int version = int_field(j, "schema_version");
  if (version < 1 || version > kSchemaVersion) {
    parse_error("unsupported schema_version " + std::to_string(version));
  }
  const Json& kind = field(j, "kind");
  if (!kind.is_string()) parse_error("field \"kind\" must be a string");
  const int n = int_field(j, "n");
  Json metadata = j.contains("metadata") ? j.at("metadata") : Json::object();
  if (!metadata.is_object()) parse_error("field \"metadata\" must be an object");

  if (kind == "frames") {
    const Json& recs = field(j, "frames");
    if (!recs.is_array() || static_cast<int>(recs.size()) != n) {
      parse_error("\"frames\" must be an array of n records");
    }
    std::vector<Frame> frames;
    frames.reserve(recs.size());
    for (const auto& rec : recs) frames.emplace_back(vec_field<3>(rec, "a"), vec_field<3>(rec, "b"));
    return FramesDataset{FrameSet(std::move(frames)), std::move(metadata)};
  }
  if (kind == "common_lines") {
    const Json& recs = field(j, "pairs");
    if (!recs.is_array()) parse_error("\"pairs\" must be an array");
    std::vector<CommonLinePair> pairs;
    pairs.reserve(recs.size());
    for (const auto& rec : recs) {
      pairs.push_back(CommonLinePair::from_raw(int_field(rec, "i") - 1, int_field(rec, "j") - 1,
                                               vec_field<2>(rec, "v_ij"), vec_field<2>(rec, "v_ji"),
                                               kDefaultTol, policy));
    }
    return LinesDataset{CommonLinesData(n, std::move(pairs)), std::move(metadata)};
  }
  parse_error("unknown dataset kind \"" + kind.get<std::string>() + "\"");
}

Json parse_json_text(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) parse_error("input is empty");
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string("malformed JSON: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::ParseError, "failed writing " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json report_to_json(const ValidityReport& report, std::size_t max_offenders) {
  Json j = header("validity_report", report.n, Json::object());
  j.erase("metadata");
  j["verdict"] = to_string(report.verdict);
  j["tolerances"] = {{"eq_tol", report.tolerances.eq_tol},
                     {"ineq_margin", report.tolerances.ineq_margin},
                     {"degenerate_tol", report.tolerances.degenerate_tol}};
  j["counts"] = {{"norm", report.norm_checks.size()},
                 {"triangle", report.triangle_certificates.size()},
                 {"loc", report.loc_certificates.size()},
                 {"failing", report.offenders.size()}};

  Json worst = Json::array();
  for (std::size_t k = 0; k < report.offenders.size() && k < max_offenders; ++k) {
    const auto& o = report.offenders[k];
    Json rec;
    rec["certificate"] = o.label();
    rec["kind"] = offender_kind(o.kind);
    Json idx = Json::array();
    for (int x : o.indices) idx.push_back(x + 1);
    rec["indices"] = std::move(idx);
    rec["value"] = o.value;
    rec["degenerate"] = o.degenerate;
    worst.push_back(std::move(rec));
  }
  j["worst_offenders"] = std::move(worst);

  Json norms = Json::array();
  for (const auto& c : report.norm_checks) {
    norms.push_back({{"indices", one_based({c.i, c.j})}, {"residual", c.residual}, {"passes", c.passes}});
  }
  j["norm_checks"] = std::move(norms);

  Json triangles = Json::array();
  for (const auto& c : report.triangle_certificates) {
    triangles.push_back({{"indices", one_based({c.indices[0], c.indices[1], c.indices[2]})},
                         {"gram_value", c.gram_value},
                         {"passes", c.passes}});
  }
  j["triangle_certificates"] = std::move(triangles);

  Json locs = Json::array();
  for (const auto& c : report.loc_certificates) {
    Json rec;
    rec["left"] = one_based({c.left[0], c.left[1], c.left[2]});
    rec["right"] = one_based({c.right[0], c.right[1], c.right[2]});
    rec["sigma"] = c.sigma;
    rec["residual_signed"] = c.degenerate ? Json(nullptr) : Json(c.residual_signed);
    rec["residual_squared"] = c.degenerate ? Json(nullptr) : Json(c.residual_squared);
    rec["degenerate"] = c.degenerate;
    rec["passes"] = c.passes;
    locs.push_back(std::move(rec));
  }
  j["loc_certificates"] = std::move(locs);
  return j;
}

void RunConfig::merge(const Json& j) {
  if (!j.is_object()) parse_error("config must be a JSON object");
  auto number = [&](const char* key, double& target) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) parse_error(std::string("config \"") + key + "\" must be a number");
    target = j.at(key).get<double>();
  };
  number("eq_tol", tolerances.eq_tol);
  number("ineq_margin", tolerances.ineq_margin);
  number("degenerate_tol", tolerances.degenerate_tol);
  if (j.contains("max_iters")) {
    if (!j.at("max_iters").is_number_integer()) parse_error("config \"max_iters\" must be an integer");
    max_iters = j.at("max_iters").get<int>();
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) parse_error("config \"seed\" must be a non-negative integer");
    seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("base_triple")) {
    const Json& b = j.at("base_triple");
    if (b == "first") {
      base = BaseSelection::First;
    } else if (b == "best") {
      base = BaseSelection::Best;
    } else {
      parse_error("config \"base_triple\" must be \"first\" or \"best\"");
    }
  }
}

void RunConfig::validate() const {
  tolerances.validate();
  if (max_iters < 0) throw Error(ErrorCode::InvalidData, "max_iters must be non-negative");
}

}  // namespace commonlines
