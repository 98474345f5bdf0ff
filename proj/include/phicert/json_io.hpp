#pragma once

#include <json.hpp>
#include <string>

#include "phicert/errors.hpp"
#include "phicert/replay.hpp"
#include "phicert/scan.hpp"

namespace phicert {

using json = nlohmann::json;

// Input that does not match the expected document shape; carries a JSON-pointer-like path.
struct SchemaError : Error {
  SchemaError(const std::string& path_, const std::string& what_)
      : Error(path_ + ": " + what_), path(path_) {}
  std::string path;
};

json to_json(const Rat& r);
Rat rat_from_json(const json& j, const std::string& path);

json to_json(const WeightTable& w);
WeightTable weights_from_json(const json& j, int rank, int embeddings, const std::string& path);

json to_json(const RefinedSlopes& s);
RefinedSlopes slopes_from_json(const json& j, const std::string& path);

json to_json(const SubmoduleCandidate& c);
SubmoduleCandidate candidate_from_json(const json& j, const std::string& path);
json to_json(const Certificate& c);
Certificate certificate_from_json(const json& j, const std::string& path = "");

json to_json(const PinnedCase& c);
PinnedCase pinned_from_json(const json& j, const std::string& path = "");
json to_json(const ScanSummary& s);

// Deterministic serialization: sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const json& j);

}  // namespace phicert
