#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "poselab/data.hpp"
#include "poselab/eval.hpp"
#include "poselab/gradcheck.hpp"
#include "poselab/model.hpp"
#include "poselab/tuning.hpp"

namespace poselab {

// Every artifact on disk is one versioned document:
//   { "manifest": { command, parameters, seed, format_version, timestamp },
//     "payload":  { "kind": ..., ... } }
// The payload is fully determined by the inputs and seed; the manifest wraps
// it with provenance and is the only part allowed to differ between
// otherwise identical runs (its timestamp).
inline constexpr int kFormatVersion = 1;

struct RunManifest {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::string timestamp;  // ISO 8601 UTC; make_document fills it when empty
};

std::string now_utc_iso8601();

nlohmann::json make_document(const RunManifest& manifest,
                             nlohmann::json payload);

/// Writes the document with a stable layout. Raises IoError.
void save_document(const std::string& path, const nlohmann::json& doc);

/// Reads and structurally validates a document (manifest + payload present,
/// supported format_version). Raises IoError / MalformedFile.
nlohmann::json load_document(const std::string& path);

/// The payload subobject, checked against the expected kind tag.
const nlohmann::json& payload_of(const nlohmann::json& doc,
                                 const std::string& kind);

/// Compact, key-ordered byte serialization of just the payload — the unit of
/// reproducibility comparisons (manifest timestamps excluded by design).
std::string payload_text(const nlohmann::json& doc);

nlohmann::json dataset_payload(const SceneDataset& ds);
SceneDataset dataset_from_payload(const nlohmann::json& payload);

/// Flat parameter vector in layout order: trunk layers then heads, each
/// weights row-major then bias. Shapes are rebuilt from the dimensions.
nlohmann::json model_payload(const RegressorModel& m);
RegressorModel model_from_payload(const nlohmann::json& payload);

nlohmann::json report_payload(const EvalReport& r);
EvalReport report_from_payload(const nlohmann::json& payload);

nlohmann::json grid_payload(const GridResult& g);
GridResult grid_from_payload(const nlohmann::json& payload);

nlohmann::json comparison_payload(const ReportComparison& c);
ReportComparison comparison_from_payload(const nlohmann::json& payload);

nlohmann::json gradcheck_payload(const GradCheckReport& r);

// Flat tables: comma-separated, one header row, doubles at 17 significant
// digits so values survive a round trip through text.
void write_trace_csv(const std::string& path, const TrainTrace& trace);
void write_histogram_csv(const std::string& path,
                         const std::vector<HistogramBin>& bins);
void write_grid_csv(const std::string& path, const GridResult& g);

}  // namespace poselab
