#include "torrent/instance_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace torrent {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json vector_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& arr) {
  Vector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Index>(i)] = arr[i].get<double>();
  return v;
}

json covariance_json(const Covariance& c) {
  json j;
  switch (c.kind) {
    case Covariance::Kind::Identity:
      j["kind"] = "identity";
      break;
    case Covariance::Kind::DiagonalUniform:
      j["kind"] = "diagonal_uniform";
      j["low"] = c.low;
      j["high"] = c.high;
      break;
    case Covariance::Kind::Explicit: {
      j["kind"] = "explicit";
      json rows = json::array();
      for (Index r = 0; r < c.sigma.rows(); ++r) {
        json row = json::array();
        for (Index cc = 0; cc < c.sigma.cols(); ++cc) row.push_back(c.sigma(r, cc));
        rows.push_back(row);
      }
      j["sigma"] = rows;
      break;
    }
  }
  return j;
}

Covariance covariance_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity") return Covariance::identity();
  if (kind == "diagonal_uniform") {
    return Covariance::diagonal_uniform(j.at("low").get<double>(), j.at("high").get<double>());
  }
  if (kind == "explicit") {
    const json& rows = j.at("sigma");
    const Index p = static_cast<Index>(rows.size());
    Matrix sigma(p, p);
    for (Index r = 0; r < p; ++r) {
      for (Index c = 0; c < p; ++c) sigma(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
    }
    return Covariance::explicit_matrix(std::move(sigma));
  }
  throw std::runtime_error("unknown covariance kind: " + kind);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string instance_csv(const RegressionInstance& inst) {
  const Index p = inst.x.rows();
  const Index n = inst.x.cols();
  std::string out;
  out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(p + 4) * 24);

  out += "index";
  for (Index i = 1; i <= p; ++i) out += ",x_" + std::to_string(i);
  out += ",y,b,eps,is_clean\r\n";

  std::vector<char> clean(static_cast<std::size_t>(n), 0);
  for (Index i : inst.clean_set) clean[static_cast<std::size_t>(i)] = 1;

  for (Index j = 0; j < n; ++j) {
    out += std::to_string(j);
    for (Index i = 0; i < p; ++i) {
      out += ',';
      out += format_double(inst.x(i, j));
    }
    out += ',';
    out += format_double(inst.y[j]);
    out += ',';
    out += format_double(inst.b[j]);
    out += ',';
    out += format_double(inst.eps[j]);
    out += ',';
    out += clean[static_cast<std::size_t>(j)] ? '1' : '0';
    out += "\r\n";
  }
  return out;
}

std::uint64_t instance_digest(const RegressionInstance& inst) {
  return fnv1a64(instance_csv(inst));
}

void save_instance(const std::filesystem::path& dir, const InstanceSpec& spec,
                   const RegressionInstance& inst) {
  std::filesystem::create_directories(dir);
  const std::string csv = instance_csv(inst);

  json meta;
  meta["format_version"] = 1;
  meta["p"] = spec.p;
  meta["n"] = spec.n;
  if (spec.sparsity_s_star) {
    meta["sparsity_s_star"] = *spec.sparsity_s_star;
  } else {
    meta["sparsity_s_star"] = nullptr;
  }
  meta["sigma"] = spec.sigma;
  meta["alpha"] = spec.alpha;
  meta["corruption_scale"] = spec.corruption_scale;
  meta["adversary"] = to_string(spec.adversary);
  if (spec.theta_tilde) {
    meta["theta_tilde"] = vector_json(*spec.theta_tilde);
  } else {
    meta["theta_tilde"] = nullptr;
  }
  meta["covariance"] = covariance_json(spec.covariance);
  meta["seed"] = spec.seed;
  meta["ground_truth"] = {{"w_star", vector_json(inst.w_star)}};
  meta["digests"] = {{"data_csv", hex64(fnv1a64(csv))}};

  write_file(dir / "data.csv", csv);
  write_file(dir / "meta.json", meta.dump(2) + "\n");
}

LoadedInstance load_instance(const std::filesystem::path& dir) {
  const std::string meta_text = read_file(dir / "meta.json");
  const std::string csv = read_file(dir / "data.csv");
  const json meta = json::parse(meta_text);

  LoadedInstance out;
  InstanceSpec& spec = out.spec;
  spec.p = meta.at("p").get<Index>();
  spec.n = meta.at("n").get<Index>();
  if (!meta.at("sparsity_s_star").is_null()) {
    spec.sparsity_s_star = meta.at("sparsity_s_star").get<Index>();
  }
  spec.sigma = meta.at("sigma").get<double>();
  spec.alpha = meta.at("alpha").get<double>();
  spec.corruption_scale = meta.at("corruption_scale").get<double>();
  spec.adversary = meta.at("adversary").get<std::string>() == "adaptive_model_shift"
                       ? AdversaryKind::AdaptiveModelShift
                       : AdversaryKind::UniformOblivious;
  if (!meta.at("theta_tilde").is_null()) {
    spec.theta_tilde = vector_from_json(meta.at("theta_tilde"));
  }
  spec.covariance = covariance_from_json(meta.at("covariance"));
  spec.seed = meta.at("seed").get<std::uint64_t>();

  const std::string stored_digest = meta.at("digests").at("data_csv").get<std::string>();
  if (stored_digest != hex64(fnv1a64(csv))) {
    throw std::runtime_error("data.csv digest mismatch in " + dir.string());
  }

  RegressionInstance& inst = out.instance;
  const Index p = spec.p;
  const Index n = spec.n;
  inst.x.resize(p, n);
  inst.y.resize(n);
  inst.b.resize(n);
  inst.eps.resize(n);
  inst.w_star = vector_from_json(meta.at("ground_truth").at("w_star"));
  if (inst.w_star.size() != p) throw std::runtime_error("ground-truth model length mismatch");

  std::istringstream lines(csv);
  std::string line;
  if (!std::getline(lines, line)) throw std::runtime_error("empty data.csv");
  Index row = 0;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (row >= n) throw std::runtime_error("data.csv has more rows than meta declares");
    const char* cursor = line.c_str();
    auto next_field = [&cursor, &line]() -> double {
      char* end = nullptr;
      const double v = std::strtod(cursor, &end);
      if (end == cursor) throw std::runtime_error("bad numeric field in data.csv: " + line);
      cursor = (*end == ',') ? end + 1 : end;
      return v;
    };
    (void)next_field();  // index column
    for (Index i = 0; i < p; ++i) inst.x(i, row) = next_field();
    inst.y[row] = next_field();
    inst.b[row] = next_field();
    inst.eps[row] = next_field();
    if (static_cast<long long>(next_field()) == 1) inst.clean_set.push_back(row);
    ++row;
  }
  if (row != n) throw std::runtime_error("data.csv has fewer rows than meta declares");

  const double scale = inst.y.norm() + 1.0;
  if ((inst.y - inst.x.transpose() * inst.w_star - inst.b - inst.eps).norm() > 1e-9 * scale) {
    throw std::runtime_error("instance reconstruction identity violated in " + dir.string());
  }
  return out;
}

}  // namespace torrent
