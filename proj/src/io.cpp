#include "poselab/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <utility>

#include "poselab/error.hpp"

namespace poselab {
namespace {

using nlohmann::json;

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3)
    raise(ErrorCode::MalformedFile, "expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// NaN has no JSON representation; it lands as null and comes back as NaN.
double double_or_nan(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN()
                     : j.get<double>();
}

json frame_json(const Frame& f) {
  return {{"id", f.id},
          {"features", f.features},
          {"position", vec3_json(f.pose.position)},
          {"rotation",
           json::array({f.pose.rotation.w, f.pose.rotation.x,
                        f.pose.rotation.y, f.pose.rotation.z})}};
}

Frame frame_from(const json& j, std::size_t feature_dim) {
  Frame f;
  f.id = j.at("id").get<std::string>();
  f.features = j.at("features").get<std::vector<double>>();
  if (f.features.size() != feature_dim)
    raise(ErrorCode::MalformedFile,
          "frame " + f.id + ": expected " + std::to_string(feature_dim) +
              " features, found " + std::to_string(f.features.size()));
  f.pose.position = vec3_from(j.at("position"));
  const json& q = j.at("rotation");
  if (!q.is_array() || q.size() != 4)
    raise(ErrorCode::MalformedFile,
          "frame " + f.id + ": rotation must hold 4 components");
  f.pose.rotation = {q[0].get<double>(), q[1].get<double>(),
                     q[2].get<double>(), q[3].get<double>()};
  const double n = norm(f.pose.rotation);
  if (!(n >= 0.9 && n <= 1.1))
    raise(ErrorCode::BadQuaternion,
          "frame " + f.id + ": quaternion norm " + std::to_string(n) +
              " outside [0.9, 1.1]");
  // Keep already-unit bits untouched so save/load round-trips exactly.
  if (std::abs(n - 1.0) > kUnitTol) f.pose.rotation = normalize(f.pose.rotation);
  return f;
}

const json& checked_payload(const json& payload, const char* kind) {
  if (!payload.is_object() || !payload.contains("kind"))
    raise(ErrorCode::MalformedFile, "payload lacks a kind tag");
  if (payload.at("kind") != kind)
    raise(ErrorCode::MalformedFile,
          std::string("expected ") + kind + " payload, found " +
              payload.at("kind").dump());
  return payload;
}

[[noreturn]] void rethrow_malformed(const nlohmann::json::exception& e) {
  raise(ErrorCode::MalformedFile, e.what());
}

void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::IoError, "cannot open for writing: " + path);
  out << text;
  out.flush();
  if (!out) raise(ErrorCode::IoError, "write failed: " + path);
}

}  // namespace

std::string now_utc_iso8601() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

json make_document(const RunManifest& manifest, json payload) {
  json m{{"command", manifest.command},
         {"parameters", manifest.parameters},
         {"seed", manifest.seed},
         {"format_version", kFormatVersion},
         {"timestamp", manifest.timestamp.empty() ? now_utc_iso8601()
                                                  : manifest.timestamp}};
  return json{{"manifest", std::move(m)}, {"payload", std::move(payload)}};
}

void save_document(const std::string& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

json load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::MalformedFile, path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("manifest") || !doc.contains("payload"))
    raise(ErrorCode::MalformedFile,
          path + ": document must carry manifest and payload");
  const json& m = doc["manifest"];
  if (!m.is_object() || !m.contains("format_version") ||
      !m["format_version"].is_number_integer())
    raise(ErrorCode::MalformedFile, path + ": manifest lacks format_version");
  if (m["format_version"].get<int>() != kFormatVersion)
    raise(ErrorCode::MalformedFile,
          path + ": unsupported format_version " + m["format_version"].dump() +
              " (expected " + std::to_string(kFormatVersion) + ")");
  return doc;
}

const json& payload_of(const json& doc, const std::string& kind) {
  if (!doc.contains("payload"))
    raise(ErrorCode::MalformedFile, "document has no payload");
  return checked_payload(doc.at("payload"), kind.c_str());
}

std::string payload_text(const json& doc) {
  if (!doc.contains("payload"))
    raise(ErrorCode::MalformedFile, "document has no payload");
  return doc.at("payload").dump();
}

json dataset_payload(const SceneDataset& ds) {
  json train = json::array();
  for (const Frame& f : ds.train) train.push_back(frame_json(f));
  json test = json::array();
  for (const Frame& f : ds.test) test.push_back(frame_json(f));
  return {{"kind", "dataset"},
          {"name", ds.name},
          {"extents", vec3_json(ds.extents)},
          {"feature_dim", ds.feature_dim},
          {"train", std::move(train)},
          {"test", std::move(test)}};
}

SceneDataset dataset_from_payload(const json& payload) {
  try {
    checked_payload(payload, "dataset");
    SceneDataset ds;
    ds.name = payload.at("name").get<std::string>();
    ds.extents = vec3_from(payload.at("extents"));
    ds.feature_dim = payload.at("feature_dim").get<std::size_t>();
    for (const json& j : payload.at("train"))
      ds.train.push_back(frame_from(j, ds.feature_dim));
    for (const json& j : payload.at("test"))
      ds.test.push_back(frame_from(j, ds.feature_dim));
    return ds;
  } catch (const json::exception& e) {
    rethrow_malformed(e);
  }
}

json model_payload(const RegressorModel& m) {
  return {{"kind", "model"},     {"input_dim", m.input_dim},
          {"hidden_dim", m.hidden_dim}, {"head_count", m.head_count},
          {"seed", m.seed},      {"params", m.params}};
}

RegressorModel model_from_payload(const json& payload) {
  try {
    checked_payload(payload, "model");
    const auto input_dim = payload.at("input_dim").get<std::size_t>();
    const auto hidden_dim = payload.at("hidden_dim").get<std::size_t>();
    const auto head_count = payload.at("head_count").get<std::size_t>();
    const auto seed = payload.at("seed").get<std::uint64_t>();
    if (input_dim == 0 || hidden_dim == 0 || head_count == 0)
      raise(ErrorCode::MalformedFile, "model dimensions must be positive");
    RegressorModel m = init_model(input_dim, hidden_dim, head_count, seed);
    auto params = payload.at("params").get<std::vector<double>>();
    if (params.size() != m.params.size())
      raise(ErrorCode::MalformedFile,
            "expected " + std::to_string(m.params.size()) +
                " parameters, found " + std::to_string(params.size()));
    for (double p : params)
      if (!std::isfinite(p))
        raise(ErrorCode::MalformedFile, "non-finite model parameter");
    m.params = std::move(params);
    return m;
  } catch (const json::exception& e) {
    rethrow_malformed(e);
  }
}

namespace {

json histogram_json(const std::vector<HistogramBin>& bins) {
  json arr = json::array();
  for (const HistogramBin& b : bins)
    arr.push_back({{"upper_edge", b.upper_edge},
                   {"cumulative_fraction", b.cumulative_fraction}});
  return arr;
}

std::vector<HistogramBin> histogram_from(const json& arr) {
  std::vector<HistogramBin> bins;
  for (const json& j : arr)
    bins.push_back({j.at("upper_edge").get<double>(),
                    j.at("cumulative_fraction").get<double>()});
  return bins;
}

json delta_json(const MedianDelta& d) {
  return {{"a", d.a},
          {"b", d.b},
          {"abs_delta", d.abs_delta},
          {"pct_delta", d.pct_delta}};
}

MedianDelta delta_from(const json& j) {
  MedianDelta d;
  d.a = j.at("a").get<double>();
  d.b = j.at("b").get<double>();
  d.abs_delta = j.at("abs_delta").get<double>();
  d.pct_delta = double_or_nan(j.at("pct_delta"));
  return d;
}

}  // namespace

json report_payload(const EvalReport& r) {
  return {{"kind", "report"},
          {"scene", r.scene},
          {"n_frames", r.n_frames},
          {"median_pos_m", r.median_pos_m},
          {"median_rot_deg", r.median_rot_deg},
          {"median_los_deg", r.median_los_deg},
          {"pos_histogram", histogram_json(r.pos_histogram)},
          {"rot_histogram", histogram_json(r.rot_histogram)}};
}

EvalReport report_from_payload(const json& payload) {
  try {
    checked_payload(payload, "report");
    EvalReport r;
    r.scene = payload.at("scene").get<std::string>();
    r.n_frames = payload.at("n_frames").get<std::size_t>();
    r.median_pos_m = payload.at("median_pos_m").get<double>();
    r.median_rot_deg = payload.at("median_rot_deg").get<double>();
    r.median_los_deg = payload.at("median_los_deg").get<double>();
    r.pos_histogram = histogram_from(payload.at("pos_histogram"));
    r.rot_histogram = histogram_from(payload.at("rot_histogram"));
    return r;
  } catch (const json::exception& e) {
    rethrow_malformed(e);
  }
}

json grid_payload(const GridResult& g) {
  json rows = json::array();
  for (const GridRow& r : g.rows)
    rows.push_back({{"gamma", r.gamma},
                    {"val_median_pos_m", r.val_median_pos_m},
                    {"val_median_rot_deg", r.val_median_rot_deg},
                    {"val_median_los_deg", r.val_median_los_deg}});
  return {{"kind", "grid"},
          {"rows", std::move(rows)},
          {"best_gamma", g.best_gamma},
          {"selection_rule", g.selection_rule}};
}

GridResult grid_from_payload(const json& payload) {
  try {
    checked_payload(payload, "grid");
    GridResult g;
    for (const json& j : payload.at("rows")) {
      GridRow r;
      r.gamma = j.at("gamma").get<double>();
      r.val_median_pos_m = j.at("val_median_pos_m").get<double>();
      r.val_median_rot_deg = j.at("val_median_rot_deg").get<double>();
      r.val_median_los_deg = j.at("val_median_los_deg").get<double>();
      g.rows.push_back(r);
    }
    g.best_gamma = payload.at("best_gamma").get<double>();
    g.selection_rule = payload.at("selection_rule").get<std::string>();
    return g;
  } catch (const json::exception& e) {
    rethrow_malformed(e);
  }
}

json comparison_payload(const ReportComparison& c) {
  return {{"kind", "comparison"}, {"scene", c.scene},
          {"n_frames", c.n_frames},    {"pos", delta_json(c.pos)},
          {"rot", delta_json(c.rot)},  {"los", delta_json(c.los)}};
}

ReportComparison comparison_from_payload(const json& payload) {
  try {
    checked_payload(payload, "comparison");
    ReportComparison c;
    c.scene = payload.at("scene").get<std::string>();
    c.n_frames = payload.at("n_frames").get<std::size_t>();
    c.pos = delta_from(payload.at("pos"));
    c.rot = delta_from(payload.at("rot"));
    c.los = delta_from(payload.at("los"));
    return c;
  } catch (const json::exception& e) {
    rethrow_malformed(e);
  }
}

json gradcheck_payload(const GradCheckReport& r) {
  json failures = json::array();
  for (const GradCheckFailure& f : r.failures)
    failures.push_back({{"sample", f.sample},
                        {"descriptor", f.descriptor},
                        {"analytic", f.analytic},
                        {"numeric", f.numeric},
                        {"rel_error", f.rel_error}});
  return {{"kind", "gradcheck"},
          {"n_points", r.n_points},
          {"max_rel_error", r.max_rel_error},
          {"failures", std::move(failures)}};
}

void write_trace_csv(const std::string& path, const TrainTrace& trace) {
  std::string out = "iteration,total,position_term,rotation_term,los_term\n";
  for (const TraceRow& row : trace) {
    out += std::to_string(row.iteration);
    for (double v : {row.total, row.position_term, row.rotation_term,
                     row.los_term}) {
      out += ',';
      append_g17(out, v);
    }
    out += '\n';
  }
  write_text(path, out);
}

void write_histogram_csv(const std::string& path,
                         const std::vector<HistogramBin>& bins) {
  std::string out = "upper_edge,cumulative_fraction\n";
  for (const HistogramBin& b : bins) {
    append_g17(out, b.upper_edge);
    out += ',';
    append_g17(out, b.cumulative_fraction);
    out += '\n';
  }
  write_text(path, out);
}

void write_grid_csv(const std::string& path, const GridResult& g) {
  std::string out =
      "gamma,val_median_pos_m,val_median_rot_deg,val_median_los_deg\n";
  for (const GridRow& r : g.rows) {
    append_g17(out, r.gamma);
    for (double v : {r.val_median_pos_m, r.val_median_rot_deg,
                     r.val_median_los_deg}) {
      out += ',';
      append_g17(out, v);
    }
    out += '\n';
  }
  write_text(path, out);
}

}  // namespace poselab
