#include "debias/io.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace debias {

using Json = nlohmann::ordered_json;

std::string format_double(double v) {
  if (!std::isfinite(v)) throw DataError("cannot serialize non-finite value");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

long long parse_int(std::string_view s, std::string_view what) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

namespace {

[[noreturn]] void fail_at(const std::string& source, std::size_t line, const std::string& why) {
  throw DataError(source + ":" + std::to_string(line) + ": " + why);
}

/// Calls fn(fields, line_no) for every non-blank, non-comment line.
template <typename Fn>
void for_each_record(std::istream& is, const std::string& source, char sep, Fn&& fn) {
  std::string line;
  std::size_t no = 0;
  while (std::getline(is, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    std::vector<std::string> fields;
    if (sep == ' ') {
      std::istringstream ss(line);
      std::string f;
      while (ss >> f) fields.push_back(f);
    } else {
      std::size_t start = 0;
      while (true) {
        const auto end = line.find(sep, start);
        fields.push_back(line.substr(start, end - start));
        if (end == std::string::npos) break;
        start = end + 1;
      }
    }
    try {
      fn(fields, no);
    } catch (const DataError& e) {
      fail_at(source, no, e.what());
    } catch (const Json::exception& e) {
      fail_at(source, no, e.what());
    }
  }
}

void expect_fields(const std::vector<std::string>& fields, std::size_t n, const char* layout) {
  if (fields.size() != n) {
    throw DataError("expected " + std::to_string(n) + " fields (" + layout + "), got " +
                    std::to_string(fields.size()));
  }
}

void write_provenance(std::ostream& os, const Provenance& prov) {
  os << '#';
  for (const auto& [k, v] : prov) os << ' ' << k << '=' << v;
  os << '\n';
}

std::ifstream open_input(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError(path + ": cannot open for reading");
  return is;
}

}  // namespace

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError(path + ": cannot open for writing");
  return os;
}

void write_candidates(std::ostream& os, std::span<const Example> examples, bool with_true_rank) {
  for (const auto& ex : examples) {
    Json obj;
    obj["query_id"] = ex.list.query_id;
    Json passages = Json::array();
    for (std::size_t i = 0; i < ex.list.size(); ++i) {
      const auto& p = ex.list.passages[i];
      Json jp;
      jp["passage_id"] = p.passage_id;
      jp["features"] = std::vector<double>(p.features.data(),
                                           p.features.data() + p.features.size());
      if (p.relevance_label) jp["label"] = *p.relevance_label;
      if (with_true_rank && ex.truth.size() == ex.list.size() && ex.truth.rank_of(i) > 0) {
        jp["true_rank"] = ex.truth.rank_of(i);
      }
      passages.push_back(std::move(jp));
    }
    obj["passages"] = std::move(passages);
    os << obj.dump() << '\n';
  }
}

std::vector<Example> read_candidates(std::istream& is, const std::string& source) {
  std::vector<Example> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(is, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json obj = Json::parse(line);
      if (!obj.is_object()) throw DataError("expected a JSON object");
      if (!obj.contains("query_id") || !obj["query_id"].is_string()) {
        throw DataError("missing string field query_id");
      }
      if (!obj.contains("passages") || !obj["passages"].is_array()) {
        throw DataError("missing array field passages");
      }
      Example ex;
      ex.list.query_id = obj["query_id"].get<std::string>();
      ex.list.provenance = source;
      std::vector<int> ranks;
      bool all_ranked = true;
      for (const auto& jp : obj["passages"]) {
        PassageRef p;
        if (!jp.contains("passage_id") || !jp["passage_id"].is_string()) {
          throw DataError("passage without string passage_id");
        }
        p.passage_id = jp["passage_id"].get<std::string>();
        if (!jp.contains("features") || !jp["features"].is_array()) {
          throw DataError("passage " + p.passage_id + " lacks a features array");
        }
        const auto feats = jp["features"].get<std::vector<double>>();
        p.features = Eigen::Map<const Eigen::VectorXd>(feats.data(),
                                                       static_cast<Eigen::Index>(feats.size()));
        if (jp.contains("label")) p.relevance_label = jp["label"].get<int>();
        if (jp.contains("true_rank")) {
          ranks.push_back(jp["true_rank"].get<int>());
        } else {
          all_ranked = false;
        }
        ex.list.passages.push_back(std::move(p));
      }
      ex.list.validate();
      ex.truth = all_ranked ? Ranking(ranks) : truth_from_labels(ex.list);
      if (ex.truth.partial()) throw DataError("true_rank values do not form a permutation");
      if (!out.empty() && out.front().list.dim() != ex.list.dim()) {
        throw DataError("feature dimension " + std::to_string(ex.list.dim()) +
                        " differs from the first query's " +
                        std::to_string(out.front().list.dim()));
      }
      out.push_back(std::move(ex));
    } catch (const DataError& e) {
      fail_at(source, no, e.what());
    } catch (const Json::exception& e) {
      fail_at(source, no, e.what());
    }
  }
  return out;
}

void write_qrels(std::ostream& os, const RelevanceJudgments& judgments) {
  for (const auto& [key, grade] : judgments.entries()) {
    os << key.first << " 0 " << key.second << ' ' << grade << '\n';
  }
}

RelevanceJudgments read_qrels(std::istream& is, const std::string& source) {
  RelevanceJudgments out;
  for_each_record(is, source, ' ', [&](const std::vector<std::string>& f, std::size_t) {
    expect_fields(f, 4, "query_id 0 passage_id grade");
    out.add(f[0], f[2], static_cast<int>(parse_int(f[3], "grade")));
  });
  return out;
}

void write_run(std::ostream& os, std::span<const RunRecord> run) {
  for (const auto& r : run) {
    os << r.query_id << " Q0 " << r.passage_id << ' ' << r.rank << ' ' << format_double(r.score)
       << ' ' << r.tag << '\n';
  }
}

std::vector<RunRecord> read_run(std::istream& is, const std::string& source) {
  std::vector<RunRecord> out;
  for_each_record(is, source, ' ', [&](const std::vector<std::string>& f, std::size_t) {
    expect_fields(f, 6, "query_id Q0 passage_id rank score tag");
    out.push_back({f[0], f[2], static_cast<int>(parse_int(f[3], "rank")),
                   parse_double(f[4], "score"), f[5]});
  });
  try {
    validate_run(out);
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
  return out;
}

void write_propensity(std::ostream& os, const PropensityMatrix& omega) {
  os << "input_position,output_rank,omega\n";
  for (Eigen::Index i = 0; i < omega.k(); ++i) {
    for (Eigen::Index r = 0; r < omega.k(); ++r) {
      os << i + 1 << ',' << r + 1 << ',' << format_double(omega(i, r)) << '\n';
    }
  }
}

PropensityMatrix read_propensity(std::istream& is, const std::string& source) {
  std::vector<std::tuple<long long, long long, double>> cells;
  bool header = true;
  for_each_record(is, source, ',', [&](const std::vector<std::string>& f, std::size_t) {
    expect_fields(f, 3, "input_position,output_rank,omega");
    if (header) {
      header = false;
      if (f[0] == "input_position") return;
    }
    const double v = parse_double(f[2], "omega");
    if (!(v > 0.0)) throw DataError("omega must be positive");
    cells.emplace_back(parse_int(f[0], "input_position"), parse_int(f[1], "output_rank"), v);
  });
  const auto k = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(cells.size()))));
  if (k == 0 || k * k != static_cast<long long>(cells.size())) {
    throw DataError(source + ": " + std::to_string(cells.size()) +
                    " cells do not form a square k x k grid");
  }
  Eigen::MatrixXd omega = Eigen::MatrixXd::Constant(k, k, -1.0);
  for (const auto& [i, r, v] : cells) {
    if (i < 1 || i > k || r < 1 || r > k) {
      throw DataError(source + ": cell (" + std::to_string(i) + "," + std::to_string(r) +
                      ") outside 1.." + std::to_string(k));
    }
    if (omega(i - 1, r - 1) >= 0.0) {
      throw DataError(source + ": duplicate cell (" + std::to_string(i) + "," +
                      std::to_string(r) + ")");
    }
    omega(i - 1, r - 1) = v;
  }
  return PropensityMatrix::from_values(std::move(omega));
}

void write_heatmap(std::ostream& os, const TransitionCounts& counts) {
  os << "input_position,output_rank,count\n";
  for (const auto& c : propensity_heatmap(counts)) {
    os << c.input_position << ',' << c.output_rank << ',' << c.count << '\n';
  }
}

void write_params(std::ostream& os, const Params& params) {
  os << "name,value\n";
  os << "bias_scale," << format_double(params.bias_scale) << '\n';
  for (Eigen::Index j = 0; j < params.dim(); ++j) {
    os << "content_" << j + 1 << ',' << format_double(params.content_weights(j)) << '\n';
  }
  for (Eigen::Index i = 0; i < params.window(); ++i) {
    os << "position_" << i + 1 << ',' << format_double(params.position_weights(i)) << '\n';
  }
}

Params read_params(std::istream& is, const std::string& source) {
  std::optional<double> bias;
  std::map<long long, double> content;
  std::map<long long, double> position;
  bool header = true;
  for_each_record(is, source, ',', [&](const std::vector<std::string>& f, std::size_t) {
    expect_fields(f, 2, "name,value");
    if (header) {
      header = false;
      if (f[0] == "name") return;
    }
    const std::string& name = f[0];
    const double v = parse_double(f[1], name);
    auto put = [&](std::map<long long, double>& into, std::size_t prefix) {
      const auto idx = parse_int(std::string_view(name).substr(prefix), "parameter index");
      if (idx < 1 || !into.emplace(idx, v).second) throw DataError("bad or duplicate " + name);
    };
    if (name == "bias_scale") {
      if (bias) throw DataError("duplicate bias_scale");
      bias = v;
    } else if (name.rfind("content_", 0) == 0) {
      put(content, 8);
    } else if (name.rfind("position_", 0) == 0) {
      put(position, 9);
    } else {
      throw DataError("unknown parameter '" + name + "'");
    }
  });
  if (!bias) throw DataError(source + ": missing bias_scale");
  auto dense = [&](const std::map<long long, double>& m, const char* what) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(m.size()));
    long long expect = 1;
    for (const auto& [idx, val] : m) {
      if (idx != expect) {
        throw DataError(source + ": " + what + "_" + std::to_string(expect) + " missing");
      }
      v(idx - 1) = val;
      ++expect;
    }
    if (m.empty()) throw DataError(source + ": no " + what + " weights");
    return v;
  };
  Params p;
  p.bias_scale = *bias;
  p.content_weights = dense(content, "content");
  p.position_weights = dense(position, "position");
  return p;
}

void write_loss_curve(std::ostream& os, const std::vector<double>& curve) {
  os << "epoch,mean_loss\n";
  for (std::size_t e = 0; e < curve.size(); ++e) {
    os << e + 1 << ',' << format_double(curve[e]) << '\n';
  }
}

void write_sweep(std::ostream& os, const SweepResult& sweep, const Provenance& prov) {
  write_provenance(os, prov);
  os << "position,mean_ndcg\n";
  for (Eigen::Index p = 0; p < sweep.per_position_ndcg.size(); ++p) {
    os << p + 1 << ',' << format_double(sweep.per_position_ndcg(p)) << '\n';
  }
}

void write_eval_report(std::ostream& os, const EvalReport& report, const Provenance& prov) {
  write_provenance(os, prov);
  os << "query_id,ndcg\n";
  for (const auto& [q, v] : report.per_query) os << q << ',' << format_double(v) << '\n';
}

std::vector<Example> load_candidates(const std::string& path) {
  auto is = open_input(path);
  return read_candidates(is, path);
}

RelevanceJudgments load_qrels(const std::string& path) {
  auto is = open_input(path);
  return read_qrels(is, path);
}

std::vector<RunRecord> load_run(const std::string& path) {
  auto is = open_input(path);
  return read_run(is, path);
}

PropensityMatrix load_propensity(const std::string& path) {
  auto is = open_input(path);
  return read_propensity(is, path);
}

Params load_params(const std::string& path) {
  auto is = open_input(path);
  return read_params(is, path);
}

}  // namespace debias
