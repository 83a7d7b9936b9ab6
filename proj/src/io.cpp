#include "hpsurf/io.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hpsurf/errors.hpp"

namespace hpsurf::io {
namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits one CSV record; double quotes may wrap fields and escape as "".
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw InputError("unterminated quote in CSV record");
  out.push_back(trim(cur));
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw InputError("line " + std::to_string(line) + ": not a finite number: '" + s + "'");
  }
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> records;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw InputError("CSV header lacks a '" + name + "' column");
  }
};

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
    } else {
      if (fields.size() != t.header.size()) {
        throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                         " fields, got " + std::to_string(fields.size()));
      }
      t.records.emplace_back(lineno, std::move(fields));
    }
  }
  if (t.header.empty()) throw InputError("CSV input is empty");
  return t;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path);
  return in;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::vector<double> read_scores_csv(std::istream& in) {
  const auto t = read_csv(in);
  const std::size_t col = t.column("score");
  std::vector<double> out;
  out.reserve(t.records.size());
  for (const auto& [line, rec] : t.records) out.push_back(parse_number(rec[col], line));
  return out;
}

std::vector<double> read_scores_jsonl(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("line " + std::to_string(lineno) + ": invalid JSON");
    }
    if (!j.is_object() || !j.contains("score") || !j["score"].is_number()) {
      throw InputError("line " + std::to_string(lineno) + ": record lacks a numeric 'score'");
    }
    const double v = j["score"].get<double>();
    if (!std::isfinite(v)) throw InputError("line " + std::to_string(lineno) + ": non-finite score");
    out.push_back(v);
  }
  return out;
}

std::vector<double> read_scores_file(const std::string& path) {
  auto in = open(path);
  auto scores = ends_with(path, ".jsonl") || ends_with(path, ".ndjson") ? read_scores_jsonl(in) : read_scores_csv(in);
  if (scores.empty()) throw InputError("no scores in " + path);
  return scores;
}

GroupedScores read_grouped_csv(std::istream& in) {
  const auto t = read_csv(in);
  const std::size_t gcol = t.column("group");
  const std::size_t scol = t.column("score");
  GroupedScores g;
  for (const auto& [line, rec] : t.records) {
    const auto& label = rec[gcol];
    auto it = std::find(g.labels.begin(), g.labels.end(), label);
    std::size_t idx = static_cast<std::size_t>(it - g.labels.begin());
    if (it == g.labels.end()) {
      g.labels.push_back(label);
      g.groups.emplace_back();
    }
    g.groups[idx].push_back(parse_number(rec[scol], line));
  }
  if (g.groups.empty()) throw InputError("grouped CSV has no records");
  return g;
}

GroupedScores read_grouped_file(const std::string& path) {
  auto in = open(path);
  return read_grouped_csv(in);
}

Json document(const std::string& command, std::uint64_t seed) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = seed;
  return j;
}

Json to_json(const NoisyQuadraticDistribution& d) {
  Json j;
  j["variant"] = std::string(to_string(d.variant()));
  j["alpha"] = d.alpha();
  j["beta"] = d.beta();
  j["gamma"] = d.gamma();
  j["sigma"] = d.sigma();
  return j;
}

NoisyQuadraticDistribution distribution_from_json(const Json& j) {
  try {
    return {field<double>(j, "alpha"), field<double>(j, "beta"), field<double>(j, "gamma"), field<double>(j, "sigma"),
            parse_variant(field<std::string>(j, "variant"))};
  } catch (const DomainError& e) {
    throw InputError(std::string("invalid distribution: ") + e.what());
  }
}

Json to_json(const FitResult& fit) {
  Json j;
  j["direction"] = std::string(to_string(fit.direction));
  j["distribution"] = to_json(fit.dist);
  j["threshold"] = fit.threshold;
  j["n"] = fit.n;
  j["n_censored"] = fit.n_censored;
  j["objective"] = fit.objective;
  j["converged"] = fit.converged;
  j["starts_tried"] = fit.starts_tried;
  return j;
}

FitResult fit_from_json(const Json& j) {
  FitResult f;
  try {
    f.direction = parse_direction(field<std::string>(j, "direction"));
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  if (!j.contains("distribution")) throw InputError("missing field 'distribution'");
  f.dist = distribution_from_json(j["distribution"]);
  f.threshold = field<double>(j, "threshold");
  f.n = field<std::size_t>(j, "n");
  f.n_censored = field<std::size_t>(j, "n_censored");
  f.objective = field<double>(j, "objective");
  f.converged = field<bool>(j, "converged");
  f.starts_tried = field<std::size_t>(j, "starts_tried");
  return f;
}

Json to_json(const SyntheticSurface& s) {
  Json j;
  j["y_star"] = s.y_star;
  j["x_star"] = s.x_star;
  j["eigenvalues"] = s.eigenvalues;
  j["rotation"] = s.rotation;
  j["box_lo"] = s.box.lo;
  j["box_hi"] = s.box.hi;
  j["noise_sigma"] = s.noise_sigma;
  j["cubic"] = s.cubic;
  return j;
}

SyntheticSurface surface_from_json(const Json& j) {
  SyntheticSurface s;
  s.y_star = field<double>(j, "y_star");
  s.x_star = field<std::vector<double>>(j, "x_star");
  s.eigenvalues = field<std::vector<double>>(j, "eigenvalues");
  const std::size_t d = s.x_star.size();
  s.rotation = j.contains("rotation") ? field<Matrix>(j, "rotation") : identity_matrix(d);
  if (j.contains("box_lo") || j.contains("box_hi")) {
    s.box.lo = field<std::vector<double>>(j, "box_lo");
    s.box.hi = field<std::vector<double>>(j, "box_hi");
  } else {
    s.box = centered_box(s.x_star);
  }
  s.noise_sigma = j.contains("noise_sigma") ? field<double>(j, "noise_sigma") : 0.0;
  s.cubic = j.contains("cubic") ? field<double>(j, "cubic") : 0.0;
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw InputError(std::string("invalid surface: ") + e.what());
  }
  return s;
}

Json to_json(const SearchDistribution& d) {
  Json j;
  j["name"] = d.name;
  Json params = Json::array();
  for (const auto& [name, spec] : d.params) {
    Json p;
    p["name"] = name;
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, UniformParam>) {
            p["type"] = "uniform";
            p["low"] = v.low;
            p["high"] = v.high;
          } else if constexpr (std::is_same_v<T, LogUniformParam>) {
            p["type"] = "log-uniform";
            p["low"] = v.low;
            p["high"] = v.high;
          } else if constexpr (std::is_same_v<T, DiscreteUniformParam>) {
            p["type"] = "discrete-uniform";
            if (v.choices.empty()) {
              p["low"] = v.low;
              p["high"] = v.high;
            } else {
              p["choices"] = v.choices;
            }
          } else {
            p["type"] = "floor-product";
            p["of"] = v.of;
          }
        },
        spec);
    params.push_back(std::move(p));
  }
  j["parameters"] = std::move(params);
  return j;
}

SearchDistribution search_distribution_from_json(const Json& j) {
  SearchDistribution d;
  d.name = j.contains("name") ? field<std::string>(j, "name") : "";
  if (!j.contains("parameters") || !j["parameters"].is_array()) throw InputError("missing 'parameters' array");
  for (const auto& p : j["parameters"]) {
    const auto name = field<std::string>(p, "name");
    const auto type = field<std::string>(p, "type");
    ParamSpec spec;
    if (type == "uniform") {
      spec = UniformParam{field<double>(p, "low"), field<double>(p, "high")};
    } else if (type == "log-uniform") {
      spec = LogUniformParam{field<double>(p, "low"), field<double>(p, "high")};
    } else if (type == "discrete-uniform") {
      DiscreteUniformParam du;
      if (p.contains("choices")) {
        du.choices = field<std::vector<double>>(p, "choices");
      } else {
        du.low = field<std::int64_t>(p, "low");
        du.high = field<std::int64_t>(p, "high");
      }
      spec = du;
    } else if (type == "floor-product") {
      spec = FloorProductParam{field<std::vector<std::string>>(p, "of")};
    } else {
      throw InputError("unknown parameter type: " + type);
    }
    d.params.emplace_back(name, std::move(spec));
  }
  try {
    d.validate();
  } catch (const DomainError& e) {
    throw InputError(std::string("invalid search distribution: ") + e.what());
  }
  return d;
}

Json read_json_file(const std::string& path) {
  auto in = open(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception&) {
    throw InputError("invalid JSON in " + path);
  }
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open output file: " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace hpsurf::io
